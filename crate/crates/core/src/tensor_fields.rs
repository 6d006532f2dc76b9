//! Contravariant tensors on the trace-one hyperplane and the vector fields
//! they generate.
//!
//! Generators are Hermitian `a` (the anti-Hermitian Lie algebra element is
//! `i a`). Flow conventions fix every sign below:
//!
//! - Hamiltonian field `X^a(ρ) = i[a, ρ]`, flow `e^{ita} ρ e^{-ita}`.
//! - Gradient-like field `Ỹ^b(ρ) = {b, ρ} − 2 Tr(bρ) ρ`, flow
//!   `e^{tb} ρ e^{tb} / Tr(e^{tb} ρ e^{tb})`.
//!
//! Operator forms are the computational path; the coordinate forms here
//! exist to cross-check them.

use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;
use crate::su_basis::SuBasis;

/// Tolerance on `|Tr a|` for a generator to count as traceless.
pub const TRACELESS_TOL: f64 = 1e-12;

pub fn check_traceless(a: &HermitianMatrix) -> Result<()> {
    let tr = a.trace_re();
    if tr.abs() > TRACELESS_TOL * (1.0 + a.max_abs()) {
        return Err(Error::Domain(format!("generator must be traceless, trace is {tr:e}")));
    }
    Ok(())
}

/// Λ(df_a, df_b)(ρ) = Tr(ρ · (−i)[a, b]).
///
/// With this sign `X^a f_b = poisson_eval(a, b, ρ)` where `f_b(ρ) = Tr(bρ)`.
pub fn poisson_eval(a: &HermitianMatrix, b: &HermitianMatrix, rho: &HermitianMatrix) -> f64 {
    rho.dot(&a.minus_i_commutator(b))
}

/// Coordinate form Σ c(j,k,l) x^l a_j b_k of [`poisson_eval`].
pub fn poisson_coordinate(a: &HermitianMatrix, b: &HermitianMatrix, rho: &HermitianMatrix, basis: &SuBasis) -> f64 {
    let (aj, bk, xl) = (basis.components(a), basis.components(b), basis.components(rho));
    let m = basis.len();
    let mut acc = 0.0;
    for j in 0..m {
        for k in 0..m {
            let w = aj[j] * bk[k];
            if w == 0.0 {
                continue;
            }
            for (l, x) in xl.iter().enumerate() {
                acc += basis.c(j, k, l) * x * w;
            }
        }
    }
    acc
}

/// R(df_a, df_b)(ρ) = Tr(ρ{a, b}) − 2 Tr(aρ) Tr(bρ). Twice the covariance.
pub fn r_tensor_eval(a: &HermitianMatrix, b: &HermitianMatrix, rho: &HermitianMatrix) -> f64 {
    rho.dot(&a.anticommutator(b)) - 2.0 * a.dot(rho) * b.dot(rho)
}

/// Coordinate form of [`r_tensor_eval`] through d(j,k,l) and the exact
/// identity coefficient.
pub fn r_tensor_coordinate(a: &HermitianMatrix, b: &HermitianMatrix, rho: &HermitianMatrix, basis: &SuBasis) -> f64 {
    let (aj, bk, xl) = (basis.components(a), basis.components(b), basis.components(rho));
    let m = basis.len();
    let mut acc = 0.0;
    for j in 0..m {
        for k in 0..m {
            let w = aj[j] * bk[k];
            if w == 0.0 {
                continue;
            }
            let mut s = basis.d_identity(j, k);
            for (l, x) in xl.iter().enumerate() {
                s += basis.d(j, k, l) * x;
            }
            acc += w * s;
        }
    }
    let ax: f64 = aj.iter().zip(&xl).map(|(p, q)| p * q).sum();
    let bx: f64 = bk.iter().zip(&xl).map(|(p, q)| p * q).sum();
    // Tr(aρ) = Σ a_j x^j for traceless a
    acc - 2.0 * ax * bx
}

/// X^a(ρ) = i[a, ρ]
pub fn hamiltonian_field(a: &HermitianMatrix, rho: &HermitianMatrix) -> HermitianMatrix {
    a.i_commutator(rho)
}

/// Ỹ^b(ρ) = {b, ρ} − 2 Tr(bρ) ρ
pub fn gradient_like_field(b: &HermitianMatrix, rho: &HermitianMatrix) -> HermitianMatrix {
    b.anticommutator(rho).axpy(-2.0 * b.dot(rho), rho)
}

/// 𝒩(v, w) = Tr(v w)
pub fn euclid_metric_eval(v: &HermitianMatrix, w: &HermitianMatrix) -> f64 {
    v.dot(w)
}

/// 𝒥(X)(ρ) = Σ_j Tr(h_j X) X^{h_j}(ρ), which collapses to i[X, ρ].
pub fn jj_apply(x: &HermitianMatrix, rho: &HermitianMatrix) -> HermitianMatrix {
    x.i_commutator(rho)
}

/// Basis-sum form of [`jj_apply`].
pub fn jj_apply_basis(x: &HermitianMatrix, rho: &HermitianMatrix, basis: &SuBasis) -> HermitianMatrix {
    let mut out = HermitianMatrix::zeros(rho.dim());
    for (h, xj) in basis.generators().iter().zip(basis.components(x)) {
        out = out.axpy(xj, &hamiltonian_field(h, rho));
    }
    out
}

/// 𝒢(df_a, df_b)(ρ) = Tr(i[a, ρ] · i[b, ρ])
pub fn gg_eval(a: &HermitianMatrix, b: &HermitianMatrix, rho: &HermitianMatrix) -> f64 {
    euclid_metric_eval(&hamiltonian_field(a, rho), &hamiltonian_field(b, rho))
}
