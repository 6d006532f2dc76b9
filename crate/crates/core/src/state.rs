//! Density matrices and their scalar geometry.

use std::ops::Deref;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, C64};

/// Trace tolerance for accepting a state.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue allowed in a valid state.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Relative tolerance (against the largest eigenvalue) for counting rank.
pub const RANK_TOL: f64 = 1e-9;
/// Eigenvalues closer than this are grouped into one multiplicity block.
pub const MULTIPLICITY_TOL: f64 = 1e-9;

/// Positive semidefinite Hermitian matrix with unit trace.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    rho: HermitianMatrix,
    spectrum: OnceLock<Vec<f64>>,
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rho == other.rho
    }
}

impl Deref for DensityMatrix {
    type Target = HermitianMatrix;
    fn deref(&self) -> &HermitianMatrix {
        &self.rho
    }
}

impl DensityMatrix {
    /// Wraps a matrix already known to be a state (sampling, closed forms).
    pub(crate) fn new_unchecked(rho: HermitianMatrix) -> Self {
        DensityMatrix { rho, spectrum: OnceLock::new() }
    }

    fn with_spectrum(rho: HermitianMatrix, spectrum: Vec<f64>) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(spectrum);
        DensityMatrix { rho, spectrum: cell }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self::with_spectrum(HermitianMatrix::identity(n).scale(1.0 / n as f64), vec![1.0 / n as f64; n])
    }

    /// |ψ><ψ| for the normalized ψ.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("state vector must be nonzero and finite".into()));
        }
        let unit: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        let mut spectrum = vec![0.0; psi.len()];
        spectrum[0] = 1.0;
        Ok(Self::with_spectrum(HermitianMatrix::projector(&unit), spectrum))
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.rho
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.rho
    }

    /// Eigenvalues, descending.
    pub fn spectrum(&self) -> &[f64] {
        self.spectrum.get_or_init(|| self.rho.eigenvalues().expect("Jacobi converges on valid states"))
    }
}

/// Accepts `m` as a state at the default tolerances.
pub fn validate_state(m: &HermitianMatrix) -> Result<DensityMatrix> {
    validate_state_tol(m, TRACE_TOL, POSITIVITY_TOL)
}

/// Accepts `m` as a state if `|Tr m - 1| <= trace_tol` and every eigenvalue is
/// at least `-pos_tol`.
pub fn validate_state_tol(m: &HermitianMatrix, trace_tol: f64, pos_tol: f64) -> Result<DensityMatrix> {
    let tr = m.trace_re();
    if (tr - 1.0).abs() > trace_tol {
        return Err(Error::TraceNotOne(tr));
    }
    let spectrum = m.eigenvalues()?;
    let min = *spectrum.last().expect("dimension is positive");
    if min < -pos_tol {
        return Err(Error::NotPositive(min));
    }
    Ok(DensityMatrix::with_spectrum(m.clone(), spectrum))
}

/// Tr ρ²
pub fn purity(rho: &HermitianMatrix) -> f64 {
    rho.dot(rho)
}

/// r² = Tr ρ² − 1/n, the squared distance from the maximally mixed state.
pub fn r_squared(rho: &HermitianMatrix) -> f64 {
    purity(rho) - 1.0 / rho.dim() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PurityBounds {
    pub purity_lower: f64,
    pub purity_upper: f64,
    pub r2_lower: f64,
    pub r2_upper: f64,
}

/// Purity and r² band for states of rank `k` in dimension `n`.
pub fn purity_bounds(n: usize, k: usize) -> Result<PurityBounds> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::Domain(format!("rank {k} out of range 1..={n}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    Ok(PurityBounds {
        purity_lower: 1.0 / kf,
        purity_upper: 1.0,
        r2_lower: (nf - kf) / (nf * kf),
        r2_upper: (nf - 1.0) / nf,
    })
}

/// Number of eigenvalues above `tol · λ_max`.
pub fn rank_of(rho: &DensityMatrix, tol: f64) -> usize {
    rank_of_spectrum(rho.spectrum(), tol)
}

pub fn rank_of_spectrum(spectrum: &[f64], tol: f64) -> usize {
    let top = spectrum.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return 0;
    }
    spectrum.iter().filter(|&&l| l > tol * top).count()
}

/// Spectrum with rank and multiplicity profile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumClass {
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    /// Sizes of consecutive groups of equal eigenvalues, top first.
    pub multiplicities: Vec<usize>,
}

pub fn spectrum_class(rho: &DensityMatrix) -> SpectrumClass {
    let eigenvalues = rho.spectrum().to_vec();
    let rank = rank_of_spectrum(&eigenvalues, RANK_TOL);
    let multiplicities = group_multiplicities(&eigenvalues, MULTIPLICITY_TOL);
    SpectrumClass { eigenvalues, rank, multiplicities }
}

/// Lengths of runs of (descending) values within `tol` of the run's first.
pub fn group_multiplicities(values: &[f64], tol: f64) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[start] - values[i] > tol {
            out.push(i - start);
            start = i;
        }
    }
    out
}

/// S = −Σ λ ln λ in nats, with 0 ln 0 = 0.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(rho.spectrum())
}

pub fn entropy_of_spectrum(spectrum: &[f64]) -> f64 {
    -spectrum.iter().filter(|&&l| l > 0.0).map(|&l| l * l.ln()).sum::<f64>()
}
