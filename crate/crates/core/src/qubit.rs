//! Two-level systems in Bloch coordinates `x^j = Tr(σ_j ρ)`, ρ = (I + x·σ)/2.
//!
//! Tensors are 3×3 component arrays `T^{jk} = T(dx^j, dx^k)`; (1,1) tensors
//! are matrices acting on column vectors. Composition of a (1,1) tensor `T`
//! with a bivector `B` is `(T∘B)^{jk} = (B Tᵀ)^{jk}`, i.e. `T` applied to the
//! vector `B(dx^j, ·)`.
//!
//! - `L^j = 2 x × e_j`, the Hamiltonian field of σ_j
//! - `Ỹ^j = 2(e_j − x^j x)`, the gradient-like field of σ_j
//! - `𝕁(v) = (v × x) / r`, with `𝕁³ = −𝕁` and kernel along x
//! - `Y^j = 𝕁(L^j) = (2/r)(r² e_j − x^j x)`
//! - `G = 𝕁∘Λ = (2/r)(r² I − x xᵀ)`

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::pauli::sigma;
use crate::linalg::{HermitianMatrix, C64};
use crate::state::DensityMatrix;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Below this radius the point counts as the maximally mixed state.
pub const CENTER_TOL: f64 = 1e-10;

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(s: f64, a: Vec3, b: Vec3) -> Vec3 {
    [b[0] + s * a[0], b[1] + s * a[1], b[2] + s * a[2]]
}

fn scale(s: f64, a: Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

fn unit(j: usize) -> Result<Vec3> {
    if !(1..=3).contains(&j) {
        return Err(Error::Domain(format!("qubit field index must be 1, 2 or 3, got {j}")));
    }
    let mut e = [0.0; 3];
    e[j - 1] = 1.0;
    Ok(e)
}

fn radius(x: Vec3) -> Result<f64> {
    let r = norm(x);
    if r <= CENTER_TOL {
        return Err(Error::AtCenter(r));
    }
    Ok(r)
}

/// x^j = Tr(σ_j ρ) for a 2×2 Hermitian ρ.
pub fn bloch_coords(rho: &HermitianMatrix) -> Result<Vec3> {
    if rho.dim() != 2 {
        return Err(Error::Dimension(format!("Bloch coordinates need a 2x2 matrix, got {0}x{0}", rho.dim())));
    }
    Ok([sigma(1).dot(rho), sigma(2).dot(rho), sigma(3).dot(rho)])
}

/// (I + x·σ)/2 without checking positivity.
pub fn bloch_point(x: Vec3) -> HermitianMatrix {
    let m = crate::linalg::ComplexMatrix::from_fn(2, 2, |r, c| match (r, c) {
        (0, 0) => C64::new((1.0 + x[2]) / 2.0, 0.0),
        (1, 1) => C64::new((1.0 - x[2]) / 2.0, 0.0),
        (0, 1) => C64::new(x[0], -x[1]) / 2.0,
        _ => C64::new(x[0], x[1]) / 2.0,
    });
    HermitianMatrix::hermitian_part_of(&m)
}

/// (I + x·σ)/2 for ‖x‖ ≤ 1.
pub fn bloch_state(x: Vec3) -> Result<DensityMatrix> {
    let r = norm(x);
    if !r.is_finite() || r > 1.0 + 1e-10 {
        return Err(Error::NotState(r));
    }
    Ok(DensityMatrix::new_unchecked(bloch_point(x)))
}

/// L^j(x) = 2 x × e_j
pub fn qubit_l(j: usize, x: Vec3) -> Result<Vec3> {
    Ok(scale(2.0, cross(x, unit(j)?)))
}

/// Ỹ^j(x) = 2(e_j − x^j x)
pub fn qubit_ytilde(j: usize, x: Vec3) -> Result<Vec3> {
    let e = unit(j)?;
    Ok(scale(2.0, axpy(-x[j - 1], x, e)))
}

/// 𝕁(v) = (v × x) / r
pub fn frak_j_apply(x: Vec3, v: Vec3) -> Result<Vec3> {
    let r = radius(x)?;
    Ok(scale(1.0 / r, cross(v, x)))
}

/// Y^j = 𝕁(L^j) = (2/r)(r² e_j − x^j x)
pub fn qubit_pseudo_gradient(j: usize, x: Vec3) -> Result<Vec3> {
    frak_j_apply(x, qubit_l(j, x)?)
}

/// Closed form (2/r)(r² e_j − x^j x) of [`qubit_pseudo_gradient`].
pub fn qubit_pseudo_gradient_closed(j: usize, x: Vec3) -> Result<Vec3> {
    let r = radius(x)?;
    let e = unit(j)?;
    Ok(scale(2.0 / r, axpy(-x[j - 1], x, scale(r * r, e))))
}

/// Λ^{jk} = Λ(dx^j, dx^k) = 2 ε_{jkm} x^m
pub fn lambda_matrix(x: Vec3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (j, row) in out.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            for (m, xm) in x.iter().enumerate() {
                *v += 2.0 * levi_civita(j, k, m) * xm;
            }
        }
    }
    out
}

/// R^{jk} = 2δ_jk − 2 x^j x^k
pub fn r_matrix(x: Vec3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            out[j][k] = if j == k { 2.0 } else { 0.0 } - 2.0 * x[j] * x[k];
        }
    }
    out
}

/// Matrix of 𝕁 acting on column vectors.
pub fn frak_j_matrix(x: Vec3) -> Result<Mat3> {
    let mut out = [[0.0; 3]; 3];
    for k in 0..3 {
        let col = frak_j_apply(x, unit(k + 1)?)?;
        for j in 0..3 {
            out[j][k] = col[j];
        }
    }
    Ok(out)
}

/// G = (2/r)(r² I − x xᵀ)
pub fn g_matrix_closed(x: Vec3) -> Result<Mat3> {
    let r = radius(x)?;
    let mut out = [[0.0; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            out[j][k] = 2.0 / r * (if j == k { r * r } else { 0.0 } - x[j] * x[k]);
        }
    }
    Ok(out)
}

/// T∘B for a (1,1) tensor T and a bivector B: `B Tᵀ`.
pub fn compose(t: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            out[j][k] = (0..3).map(|m| b[j][m] * t[k][m]).sum();
        }
    }
    out
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            out[j][k] = (0..3).map(|m| a[j][m] * b[m][k]).sum();
        }
    }
    out
}

pub fn mat_scale(s: f64, a: &Mat3) -> Mat3 {
    a.map(|row| row.map(|v| s * v))
}

/// max |a − b| over entries
pub fn mat_dist(a: &Mat3, b: &Mat3) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..3 {
        for k in 0..3 {
            worst = worst.max((a[j][k] - b[j][k]).abs());
        }
    }
    worst
}

fn levi_civita(j: usize, k: usize, m: usize) -> f64 {
    match (j, k, m) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Deviations of the qubit tensor identities at one point.
#[derive(Clone, Debug, Serialize)]
pub struct QubitIdentityReport {
    pub x: Vec3,
    pub r: f64,
    /// max |𝕁³ − (−𝕁)|
    pub frak_j_cubed: f64,
    /// max_j |Y^j · ∇r²|
    pub pseudo_gradient_radial: f64,
    /// max |𝕁(L^j) − (2/r)(r² e_j − x^j x)|
    pub pseudo_gradient_closed_form: f64,
    /// max |G − 𝕁∘Λ| with G the closed form
    pub g_vs_j_lambda: f64,
    /// smallest eigenvalue of G restricted to the tangent plane, and |G x|
    pub g_tangent_min: f64,
    pub g_radial: f64,
    /// max |𝕁∘R − Λ/(4r)|
    pub j_r_vs_lambda_over_4r: f64,
    /// max |𝕁∘R − (−Λ/r)|
    pub j_r_vs_minus_lambda_over_r: f64,
    /// max_j |L^j − 4r 𝕁(Ỹ^j)|
    pub l_vs_4r_j_ytilde: f64,
    /// max_j |L^j − (−r) 𝕁(Ỹ^j)|
    pub l_vs_minus_r_j_ytilde: f64,
}

/// Evaluates every qubit identity at `x` (x ≠ 0).
pub fn qubit_tensor_identities(x: Vec3) -> Result<QubitIdentityReport> {
    let r = radius(x)?;
    let j = frak_j_matrix(x)?;
    let j3 = mat_mul(&j, &mat_mul(&j, &j));
    let lambda = lambda_matrix(x);
    let rr = r_matrix(x);
    let g = g_matrix_closed(x)?;
    let jr = compose(&j, &rr);

    let mut y_radial: f64 = 0.0;
    let mut y_closed: f64 = 0.0;
    let mut l4: f64 = 0.0;
    let mut lr: f64 = 0.0;
    for k in 1..=3 {
        let y = qubit_pseudo_gradient(k, x)?;
        y_radial = y_radial.max(dot(y, scale(2.0, x)).abs());
        y_closed = y_closed.max(norm(axpy(-1.0, qubit_pseudo_gradient_closed(k, x)?, y)));
        let l = qubit_l(k, x)?;
        let jy = frak_j_apply(x, qubit_ytilde(k, x)?)?;
        l4 = l4.max(norm(axpy(-4.0 * r, jy, l)));
        lr = lr.max(norm(axpy(r, jy, l)));
    }

    // G on the plane orthogonal to x: its quadratic form on two unit tangents.
    let t1 = {
        let seed = if x[0].abs() < 0.9 * r { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let c = cross(x, seed);
        scale(1.0 / norm(c), c)
    };
    let t2 = {
        let c = cross(x, t1);
        scale(1.0 / norm(c), c)
    };
    let quad = |u: Vec3, v: Vec3| -> f64 {
        (0..3).map(|a| (0..3).map(|b| u[a] * g[a][b] * v[b]).sum::<f64>()).sum()
    };
    let (a11, a12, a22) = (quad(t1, t1), quad(t1, t2), quad(t2, t2));
    let mean = 0.5 * (a11 + a22);
    let disc = (0.25 * (a11 - a22).powi(2) + a12 * a12).sqrt();
    let gx: Vec3 = [0, 1, 2].map(|a| (0..3).map(|b| g[a][b] * x[b]).sum());

    Ok(QubitIdentityReport {
        x,
        r,
        frak_j_cubed: mat_dist(&j3, &mat_scale(-1.0, &j)),
        pseudo_gradient_radial: y_radial,
        pseudo_gradient_closed_form: y_closed,
        g_vs_j_lambda: mat_dist(&g, &compose(&j, &lambda)),
        g_tangent_min: mean - disc,
        g_radial: norm(gx),
        j_r_vs_lambda_over_4r: mat_dist(&jr, &mat_scale(1.0 / (4.0 * r), &lambda)),
        j_r_vs_minus_lambda_over_r: mat_dist(&jr, &mat_scale(-1.0 / r, &lambda)),
        l_vs_4r_j_ytilde: l4,
        l_vs_minus_r_j_ytilde: lr,
    })
}

/// Named qubit fields for trajectories.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitField {
    L(usize),
    Ytilde(usize),
    Y(usize),
}

impl QubitField {
    pub fn eval(&self, x: Vec3) -> Result<Vec3> {
        match *self {
            QubitField::L(j) => qubit_l(j, x),
            QubitField::Ytilde(j) => qubit_ytilde(j, x),
            QubitField::Y(j) => qubit_pseudo_gradient(j, x),
        }
    }
}

impl std::str::FromStr for QubitField {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (name, idx) = s.split_at(s.len().saturating_sub(1));
        let j: usize = idx.parse().map_err(|_| Error::Parse(format!("unknown field {s:?}")))?;
        if !(1..=3).contains(&j) {
            return Err(Error::Parse(format!("field index must be 1, 2 or 3 in {s:?}")));
        }
        match name {
            "L" => Ok(QubitField::L(j)),
            "Ytilde" => Ok(QubitField::Ytilde(j)),
            "Y" => Ok(QubitField::Y(j)),
            _ => Err(Error::Parse(format!("unknown field {s:?}; expected L<j>, Ytilde<j> or Y<j>"))),
        }
    }
}

/// RK4 trajectory of a Bloch-space field, including a final partial step.
pub fn integrate_bloch<F>(field: F, x0: Vec3, t_final: f64, dt: f64) -> Result<Vec<(f64, Vec3)>>
where
    F: Fn(Vec3) -> Result<Vec3>,
{
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::Domain(format!("invalid time grid: t_final = {t_final}, dt = {dt}")));
    }
    let full = (t_final / dt * (1.0 + 1e-12)).floor() as usize;
    let rem = t_final - full as f64 * dt;
    let total = full + usize::from(rem > 1e-12 * dt.max(1.0));
    let mut out = Vec::with_capacity(total + 1);
    let mut x = x0;
    out.push((0.0, x));
    for step in 1..=total {
        let h = if step <= full { dt } else { rem };
        let k1 = field(x)?;
        let k2 = field(axpy(0.5 * h, k1, x))?;
        let k3 = field(axpy(0.5 * h, k2, x))?;
        let k4 = field(axpy(h, k3, x))?;
        for a in 0..3 {
            x[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        }
        let t = if step <= full { step as f64 * dt } else { t_final };
        out.push((t, x));
    }
    Ok(out)
}

/// Central-difference Lie bracket of Bloch-space fields.
pub fn bracket_fd<F, G>(f: F, g: G, x: Vec3, h: f64) -> Result<Vec3>
where
    F: Fn(Vec3) -> Result<Vec3>,
    G: Fn(Vec3) -> Result<Vec3>,
{
    let (fx, gx) = (f(x)?, g(x)?);
    let dg = axpy(-1.0, g(axpy(-h, fx, x))?, g(axpy(h, fx, x))?);
    let df = axpy(-1.0, f(axpy(-h, gx, x))?, f(axpy(h, gx, x))?);
    Ok(scale(0.5 / h, axpy(-1.0, df, dg)))
}

/// Largest deviation in the six-field table
/// `[L^j, L^k] = 2ε L^m`, `[L^j, Y^k] = 2ε Y^m`, `[Y^j, Y^k] = −2ε L^m`.
pub fn six_field_closure(x: Vec3, h: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for j in 1..=3 {
        for k in 1..=3 {
            let mut l_rhs = [0.0; 3];
            let mut y_rhs = [0.0; 3];
            for m in 1..=3 {
                let e = 2.0 * levi_civita(j - 1, k - 1, m - 1);
                if e != 0.0 {
                    l_rhs = axpy(e, qubit_l(m, x)?, l_rhs);
                    y_rhs = axpy(e, qubit_pseudo_gradient(m, x)?, y_rhs);
                }
            }
            let l = |j: usize| move |p: Vec3| qubit_l(j, p);
            let y = |j: usize| move |p: Vec3| qubit_pseudo_gradient(j, p);
            let ll = bracket_fd(l(j), l(k), x, h)?;
            let ly = bracket_fd(l(j), y(k), x, h)?;
            let yy = bracket_fd(y(j), y(k), x, h)?;
            worst = worst
                .max(norm(axpy(-1.0, l_rhs, ll)))
                .max(norm(axpy(-1.0, y_rhs, ly)))
                .max(norm(axpy(1.0, l_rhs, yy)));
        }
    }
    Ok(worst)
}
