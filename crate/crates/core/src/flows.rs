//! Time evolution on the state space: RK4 for arbitrary fields and closed
//! forms for the unitary, gradient-like, combined and isospectral flows.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahler::gradient_field_isospectral;
use crate::linalg::{expm, expm_hermitian, ComplexMatrix, HermitianMatrix, MatrixJson, C64, I, ONE};
use crate::state::{
    entropy_of_spectrum, purity, rank_of, validate_state_tol, DensityMatrix, MULTIPLICITY_TOL, RANK_TOL,
};
use crate::su_basis::SuBasis;
use crate::tensor_fields::{check_traceless, gradient_like_field, hamiltonian_field};

/// An RK4 step is aborted once the smallest eigenvalue drops below this.
pub const POSITIVITY_ABORT: f64 = -1e-6;
/// Tolerance at which recorded trajectory states are validated.
pub const TRAJECTORY_TOL: f64 = 1e-8;
/// Allowed deviation of det g from 1 for SL elements.
pub const DET_TOL: f64 = 1e-8;
/// Smallest admissible normalization denominator Tr(g ρ g†).
pub const DENOMINATOR_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    /// X^a
    Unitary,
    /// Ỹ^b
    GradientLike,
    /// X^a + Ỹ^b
    SlCombined,
    /// Y^a = J(X^a)
    IsospectralGradient,
}

/// A flow with its generators and time grid.
#[derive(Clone, Debug)]
pub struct FlowSpec {
    pub kind: FlowKind,
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    pub t_final: f64,
    pub dt: f64,
    pub record_every: usize,
}

impl FlowSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Domain(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Domain(format!("t_final must be non-negative, got {}", self.t_final)));
        }
        if self.record_every == 0 {
            return Err(Error::Domain("record_every must be at least 1".into()));
        }
        if self.a.dim() != self.b.dim() {
            return Err(Error::Dimension(format!("generators are {}x{} and {}x{}", self.a.dim(), self.a.dim(), self.b.dim(), self.b.dim())));
        }
        check_traceless(&self.a)?;
        check_traceless(&self.b)
    }

    /// The vector field driving this flow.
    pub fn field(&self) -> impl Fn(&HermitianMatrix) -> Result<HermitianMatrix> + '_ {
        move |rho: &HermitianMatrix| match self.kind {
            FlowKind::Unitary => Ok(hamiltonian_field(&self.a, rho)),
            FlowKind::GradientLike => Ok(gradient_like_field(&self.b, rho)),
            FlowKind::SlCombined => Ok(hamiltonian_field(&self.a, rho).add(&gradient_like_field(&self.b, rho))),
            FlowKind::IsospectralGradient => gradient_field_isospectral(&self.a, rho),
        }
    }

    /// Closed-form state at time `t`.
    pub fn propagate(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        match self.kind {
            FlowKind::Unitary => unitary_propagate(&self.a, rho0, t),
            FlowKind::GradientLike => sl_propagate(&HermitianMatrix::zeros(self.b.dim()), &self.b, rho0, t),
            FlowKind::SlCombined => sl_propagate(&self.a, &self.b, rho0, t),
            FlowKind::IsospectralGradient => isospectral_propagate(&self.a, rho0, t),
        }
    }

    /// RK4 trajectory of this flow from `rho0`.
    pub fn integrate(&self, rho0: &DensityMatrix) -> std::result::Result<Trajectory, Aborted> {
        self.validate().map_err(|error| Aborted { error, partial: Trajectory::default() })?;
        rk4_integrate_every(self.field(), rho0, self.t_final, self.dt, self.record_every)
    }
}

/// On-disk form of a [`FlowSpec`]; missing generators default to zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowSpecJson {
    pub kind: FlowKind,
    #[serde(default)]
    pub a: Option<MatrixJson>,
    #[serde(default)]
    pub b: Option<MatrixJson>,
    pub t_final: f64,
    pub dt: f64,
    #[serde(default = "one")]
    pub record_every: usize,
}

fn one() -> usize {
    1
}

impl FlowSpecJson {
    /// Resolves to a spec acting on n×n matrices.
    pub fn resolve(&self, n: usize) -> Result<FlowSpec> {
        let gen = |m: &Option<MatrixJson>| -> Result<HermitianMatrix> {
            match m {
                Some(j) => j.to_hermitian(),
                None => Ok(HermitianMatrix::zeros(n)),
            }
        };
        let spec = FlowSpec {
            kind: self.kind,
            a: gen(&self.a)?,
            b: gen(&self.b)?,
            t_final: self.t_final,
            dt: self.dt,
            record_every: self.record_every,
        };
        if spec.a.dim() != n || spec.b.dim() != n {
            return Err(Error::Dimension(format!("generators must be {n}x{n} to act on the state")));
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Time-stamped states with the trace corrections applied at each step.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Trace defect removed after each recorded step (0 for the start).
    pub trace_corrections: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &DensityMatrix)> {
        self.times.last().copied().zip(self.states.last())
    }

    /// CSV header: t, x_1..x_{n²−1}, purity, entropy, lambda_1..lambda_n.
    pub fn csv_header(n: usize) -> Vec<String> {
        let mut h = vec!["t".to_string()];
        h.extend((1..n * n).map(|j| format!("x_{j}")));
        h.push("purity".into());
        h.push("entropy".into());
        h.extend((1..=n).map(|j| format!("lambda_{j}")));
        h
    }

    /// Derived observables per recorded state, in header order.
    pub fn rows(&self, basis: &SuBasis) -> Vec<Vec<f64>> {
        self.times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| {
                let mut row = vec![t];
                row.extend(basis.components(s));
                row.push(purity(s));
                row.push(entropy_of_spectrum(s.spectrum()));
                row.extend_from_slice(s.spectrum());
                row
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, basis: &SuBasis, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::csv_header(basis.n()))?;
        for row in self.rows(basis) {
            w.write_record(row.iter().map(|v| format_float(*v)))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Largest deviation of any recorded spectrum from the initial one.
    pub fn spectral_drift(&self) -> f64 {
        let Some(first) = self.states.first() else { return 0.0 };
        let l0 = first.spectrum();
        self.states
            .iter()
            .flat_map(|s| s.spectrum().iter().zip(l0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }

    /// Largest deviation of entropy from its initial value.
    pub fn entropy_drift(&self) -> f64 {
        let Some(first) = self.states.first() else { return 0.0 };
        let s0 = entropy_of_spectrum(first.spectrum());
        self.states.iter().map(|s| (entropy_of_spectrum(s.spectrum()) - s0).abs()).fold(0.0, f64::max)
    }
}

/// Fixed-precision float formatting shared by every CSV writer.
pub fn format_float(v: f64) -> String {
    format!("{v:.12e}")
}

/// RK4 stopped because the state left the state space; holds the trajectory
/// recorded up to the last valid step.
#[derive(Clone, Debug)]
pub struct Aborted {
    pub error: Error,
    pub partial: Trajectory,
}

impl fmt::Display for Aborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} states recorded)", self.error, self.partial.len())
    }
}

impl std::error::Error for Aborted {}

impl From<Aborted> for Error {
    fn from(a: Aborted) -> Error {
        a.error
    }
}

/// Classical RK4 recording every step.
pub fn rk4_integrate<F>(field: F, rho0: &DensityMatrix, t_final: f64, dt: f64) -> std::result::Result<Trajectory, Aborted>
where
    F: Fn(&HermitianMatrix) -> Result<HermitianMatrix>,
{
    rk4_integrate_every(field, rho0, t_final, dt, 1)
}

/// Classical RK4 recording every `record_every` steps plus the final state.
///
/// After each step the trace defect is removed along I/n and the result is
/// re-Hermitized; positivity is monitored, not enforced.
pub fn rk4_integrate_every<F>(
    field: F,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
    record_every: usize,
) -> std::result::Result<Trajectory, Aborted>
where
    F: Fn(&HermitianMatrix) -> Result<HermitianMatrix>,
{
    let mut traj = Trajectory { times: vec![0.0], states: vec![rho0.clone()], trace_corrections: vec![0.0] };
    let fail = |error: Error, traj: Trajectory| Err(Aborted { error, partial: traj });
    if !(dt > 0.0) || !(t_final >= 0.0) || record_every == 0 {
        return fail(Error::Domain(format!("invalid time grid: t_final = {t_final}, dt = {dt}")), traj);
    }
    if t_final > 0.0 && dt > t_final {
        return fail(Error::Domain(format!("dt = {dt} exceeds t_final = {t_final}")), traj);
    }
    let n = rho0.dim();
    let id = HermitianMatrix::identity(n);
    let full_steps = (t_final / dt * (1.0 + 1e-12)).floor() as usize;
    let remainder = t_final - full_steps as f64 * dt;
    let total = full_steps + usize::from(remainder > 1e-12 * dt.max(1.0));

    let mut rho = rho0.hermitian().clone();
    for step in 1..=total {
        let h = if step <= full_steps { dt } else { remainder };
        let stage = || -> Result<HermitianMatrix> {
            let k1 = field(&rho)?;
            let k2 = field(&rho.axpy(0.5 * h, &k1))?;
            let k3 = field(&rho.axpy(0.5 * h, &k2))?;
            let k4 = field(&rho.axpy(h, &k3))?;
            let incr = k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4);
            Ok(rho.axpy(h / 6.0, &incr))
        };
        let next = match stage() {
            Ok(m) => m,
            Err(e) => return fail(e, traj),
        };
        let defect = next.trace_re() - 1.0;
        let next = next.axpy(-defect / n as f64, &id);
        let t = if step <= full_steps { step as f64 * dt } else { t_final };
        let spectrum = match next.eigenvalues() {
            Ok(s) => s,
            Err(e) => return fail(e, traj),
        };
        let min = *spectrum.last().expect("n >= 1");
        if min < POSITIVITY_ABORT {
            return fail(Error::LeftStateSpace { time: t, min_eigenvalue: min }, traj);
        }
        rho = next;
        if step % record_every == 0 || step == total {
            let state = match validate_state_tol(&rho, TRAJECTORY_TOL, -POSITIVITY_ABORT) {
                Ok(s) => s,
                Err(e) => return fail(e, traj),
            };
            traj.times.push(t);
            traj.states.push(state);
            traj.trace_corrections.push(defect);
        }
    }
    Ok(traj)
}

/// e^{ita} ρ e^{−ita}
pub fn unitary_propagate(a: &HermitianMatrix, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let u = expm_hermitian(a, I * t)?;
    Ok(DensityMatrix::new_unchecked(rho0.conjugate_by(&u)))
}

/// g / det(g)^{1/n} with the principal root.
pub fn sl_normalize(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let det = g.determinant()?;
    if det.norm() == 0.0 {
        return Err(Error::Singular);
    }
    let root = det.powf(1.0 / g.rows() as f64);
    Ok(g.scale_c(ONE / root))
}

/// g ρ g† / Tr(g ρ g†) for det g = 1.
pub fn sl_act(g: &ComplexMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if !g.is_square() || g.rows() != rho.dim() {
        return Err(Error::Dimension(format!("{}x{} group element on an n = {} state", g.rows(), g.cols(), rho.dim())));
    }
    let dev = (g.determinant()? - ONE).norm();
    if dev > DET_TOL {
        return Err(Error::DetNotOne(dev));
    }
    act_normalized(g, rho)
}

fn act_normalized(g: &ComplexMatrix, rho: &HermitianMatrix) -> Result<DensityMatrix> {
    let m = g.matmul(rho.as_matrix()).matmul(&g.adjoint());
    let tr = m.trace().re;
    if !(tr > DENOMINATOR_TOL) {
        return Err(Error::DegenerateDenominator(tr));
    }
    Ok(DensityMatrix::new_unchecked(HermitianMatrix::hermitian_part_of(&m.scale(1.0 / tr))))
}

/// γ(t) = g_t ρ g_t† / Tr with g_t = exp(t(b + i a)).
pub fn sl_propagate(a: &HermitianMatrix, b: &HermitianMatrix, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let gen = &b.as_matrix().scale(t) + &a.as_matrix().scale_c(I * t);
    act_normalized(&expm(&gen)?, rho0)
}

/// e^{ta} ρ e^{ta} / Tr for rank-one ρ.
pub fn pure_gradient_propagate(a: &HermitianMatrix, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let rank = rank_of(rho0, RANK_TOL);
    if rank != 1 {
        return Err(Error::NotPure(rank));
    }
    act_normalized(&expm_hermitian(a, C64::new(t, 0.0))?, rho0)
}

/// Closed form of the isospectral gradient flow for spectra with at most two
/// distinct eigenvalues.
///
/// Writing ρ = λ_low I + (λ_top − λ_low) P, the flow moves P to the
/// projector onto e^{ta}·range(P); pure states are the rank-one case.
pub fn isospectral_propagate(a: &HermitianMatrix, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let e = rho0.eig()?;
    let lam = &e.values;
    let n = lam.len();
    let (top, low) = (lam[0], lam[n - 1]);
    if top - low <= MULTIPLICITY_TOL {
        return Ok(rho0.clone());
    }
    let m = lam.iter().take_while(|&&l| top - l <= MULTIPLICITY_TOL).count();
    if lam[m..].iter().any(|&l| l - low > MULTIPLICITY_TOL) {
        return Err(Error::Domain("isospectral closed form needs at most two distinct eigenvalues".into()));
    }
    let q = ComplexMatrix::from_fn(n, m, |r, c| e.vectors[(r, c)]);
    let moved = expm_hermitian(a, C64::new(t, 0.0))?.matmul(&q);
    let gram = moved.adjoint().matmul(&moved).inverse()?;
    let p = moved.matmul(&gram).matmul(&moved.adjoint());
    let rho = &ComplexMatrix::identity(n).scale(low) + &p.scale(top - low);
    Ok(DensityMatrix::new_unchecked(HermitianMatrix::hermitian_part_of(&rho)))
}
