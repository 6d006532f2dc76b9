//! Kähler structure of isospectral orbits.
//!
//! At a point ρ with eigenbasis |k⟩ and eigenvalues λ_1 ≥ … ≥ λ_n, a tangent
//! vector is `v = i[a, ρ]`. Its canonical generator has eigenbasis entries
//! `a_kl = −i v_kl / (λ_l − λ_k)` off the degenerate blocks and 0 on them.
//!
//! - `ω(v, w) = i Tr(ρ [b, a])`
//! - `J(v)_kl = i sgn(λ_k − λ_l) v_kl`
//! - `g(v, w) = ω(J v, w) = Σ_{k<l} (λ_k − λ_l)(a_kl b̄_kl + ā_kl b_kl)`
//!
//! All three are computed in the eigenbasis with degenerate eigenvalues
//! grouped into blocks, so nothing depends on the choice of basis inside a
//! block.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Eigen, HermitianMatrix, I, ZERO};

/// Eigenvalues closer than this are treated as one degenerate block.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Largest allowed component of a tangent vector inside a degenerate block.
pub const TANGENCY_TOL: f64 = 1e-10;
/// Default finite-difference step for Lie brackets.
pub const FD_STEP: f64 = 1e-5;

/// A point of an isospectral orbit with its cached eigendecomposition.
#[derive(Clone, Debug)]
pub struct OrbitPoint {
    rho: HermitianMatrix,
    eig: Eigen,
    /// Block index of each eigenvalue position.
    block: Vec<usize>,
}

impl OrbitPoint {
    /// Accepts any point of the trace-one hyperplane; states are the usual
    /// case, but field evaluations at nearby points need not be positive.
    pub fn new(rho: &HermitianMatrix) -> Result<Arc<Self>> {
        let eig = rho.eig()?;
        let mut block = Vec::with_capacity(eig.values.len());
        let mut id = 0;
        for (k, &l) in eig.values.iter().enumerate() {
            if k > 0 && eig.values[k - 1] - l > DEGENERACY_TOL {
                id += 1;
            }
            block.push(id);
        }
        Ok(Arc::new(OrbitPoint { rho: rho.clone(), eig, block }))
    }

    pub fn rho(&self) -> &HermitianMatrix {
        &self.rho
    }

    pub fn eigen(&self) -> &Eigen {
        &self.eig
    }

    pub fn n(&self) -> usize {
        self.rho.dim()
    }

    /// Sizes of the degenerate blocks, top eigenvalue first.
    pub fn degeneracy_profile(&self) -> Vec<usize> {
        let mut out = vec![0; self.block.last().map_or(0, |b| b + 1)];
        for &b in &self.block {
            out[b] += 1;
        }
        out
    }

    fn same_block(&self, k: usize, l: usize) -> bool {
        self.block[k] == self.block[l]
    }

    /// Orbit dimension: Σ over pairs in different blocks of 2 real directions.
    pub fn orbit_dim(&self) -> usize {
        let n = self.n();
        let mut d = 0;
        for k in 0..n {
            for l in k + 1..n {
                if !self.same_block(k, l) {
                    d += 2;
                }
            }
        }
        d
    }

    /// Eigenvalue projector onto block `b`.
    pub fn block_projector(&self, b: usize) -> HermitianMatrix {
        let n = self.n();
        let v = &self.eig.vectors;
        let m = ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n).filter(|&k| self.block[k] == b).map(|k| v[(r, k)] * v[(c, k)].conj()).sum()
        });
        HermitianMatrix::hermitian_part_of(&m)
    }

    /// Wraps `v` as a tangent vector here, rejecting degenerate-block support.
    pub fn tangent(self: &Arc<Self>, v: HermitianMatrix) -> Result<TangentVector> {
        if v.dim() != self.n() {
            return Err(Error::Dimension(format!("{}x{} tangent at an n = {} point", v.dim(), v.dim(), self.n())));
        }
        let ve = self.eig.to_eigenbasis(v.as_matrix());
        let n = self.n();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for l in 0..n {
                if self.same_block(k, l) {
                    worst = worst.max(ve[(k, l)].norm());
                }
            }
        }
        if worst > TANGENCY_TOL * (1.0 + v.max_abs()) {
            return Err(Error::NonTangent(worst));
        }
        Ok(TangentVector { v, ve, base: Arc::clone(self) })
    }

    /// Tangent vector of the Hamiltonian field of `a` at this point.
    pub fn hamiltonian_tangent(self: &Arc<Self>, a: &HermitianMatrix) -> Result<TangentVector> {
        self.tangent(a.i_commutator(&self.rho))
    }
}

/// Traceless Hermitian `v` tangent to the orbit through its base point.
#[derive(Clone, Debug)]
pub struct TangentVector {
    v: HermitianMatrix,
    /// `v` in the base point's eigenbasis.
    ve: ComplexMatrix,
    base: Arc<OrbitPoint>,
}

impl TangentVector {
    pub fn vector(&self) -> &HermitianMatrix {
        &self.v
    }

    pub fn base(&self) -> &Arc<OrbitPoint> {
        &self.base
    }

    fn same_base(&self, other: &TangentVector) -> Result<()> {
        if Arc::ptr_eq(&self.base, &other.base) || self.base.rho == other.base.rho {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    /// Canonical generator in the eigenbasis.
    fn generator_eigenbasis(&self) -> ComplexMatrix {
        let p = &self.base;
        let lam = &p.eig.values;
        let n = p.n();
        ComplexMatrix::from_fn(n, n, |k, l| {
            if p.same_block(k, l) {
                ZERO
            } else {
                -I * self.ve[(k, l)] / (lam[l] - lam[k])
            }
        })
    }
}

/// Hermitian `a` with `i[a, ρ] = v`, zero on degenerate blocks.
pub fn tangent_generator(v: &TangentVector) -> HermitianMatrix {
    let ae = v.generator_eigenbasis();
    HermitianMatrix::hermitian_part_of(&v.base.eig.from_eigenbasis(&ae))
}

/// ω(v, w) = i Tr(ρ [b, a]) with a, b the canonical generators.
pub fn omega(v: &TangentVector, w: &TangentVector) -> Result<f64> {
    v.same_base(w)?;
    let a = tangent_generator(v);
    let b = tangent_generator(w);
    Ok((I * v.base.rho.trace_product(&b.commutator(&a))).re)
}

/// J(v) in the eigenbasis: i sgn(λ_k − λ_l) v_kl, nothing on degenerate blocks.
pub fn complex_structure_apply(v: &TangentVector) -> TangentVector {
    let p = &v.base;
    let n = p.n();
    let je = ComplexMatrix::from_fn(n, n, |k, l| {
        if p.same_block(k, l) {
            ZERO
        } else if k < l {
            I * v.ve[(k, l)]
        } else {
            -I * v.ve[(k, l)]
        }
    });
    let jv = HermitianMatrix::hermitian_part_of(&p.eig.from_eigenbasis(&je));
    TangentVector { v: jv, ve: je, base: Arc::clone(p) }
}

/// J(v) = Σ_{blocks K<L} (λ_K − λ_L)(P_K a P_L + P_L a P_K), built from
/// spectral projectors and the canonical generator.
pub fn complex_structure_projector_form(v: &TangentVector) -> HermitianMatrix {
    let p = &v.base;
    let a = tangent_generator(v);
    let blocks = p.degeneracy_profile().len();
    let mut values = Vec::with_capacity(blocks);
    let mut projectors = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let k = p.block.iter().position(|&x| x == b).expect("non-empty block");
        values.push(p.eig.values[k]);
        projectors.push(p.block_projector(b));
    }
    let mut out = ComplexMatrix::zeros(p.n(), p.n());
    for k in 0..blocks {
        for l in k + 1..blocks {
            let pk = projectors[k].as_matrix();
            let pl = projectors[l].as_matrix();
            let term = &pk.matmul(&a).matmul(pl) + &pl.matmul(&a).matmul(pk);
            out = &out + &term.scale(values[k] - values[l]);
        }
    }
    HermitianMatrix::hermitian_part_of(&out)
}

/// g(v, w) = ω(J v, w); symmetric and positive definite on the orbit.
pub fn metric(v: &TangentVector, w: &TangentVector) -> Result<f64> {
    v.same_base(w)?;
    omega(&complex_structure_apply(v), w)
}

/// Explicit form Σ_{k<l} (λ_k − λ_l)(a_kl b̄_kl + ā_kl b_kl).
pub fn metric_explicit(v: &TangentVector, w: &TangentVector) -> Result<f64> {
    v.same_base(w)?;
    let (a, b) = (v.generator_eigenbasis(), w.generator_eigenbasis());
    let lam = &v.base.eig.values;
    let n = v.base.n();
    let mut acc = 0.0;
    for k in 0..n {
        for l in k + 1..n {
            acc += (lam[k] - lam[l]) * (a[(k, l)] * b[(k, l)].conj() + a[(k, l)].conj() * b[(k, l)]).re;
        }
    }
    Ok(acc)
}

/// e_a(ρ) = Tr(a ρ)
pub fn expectation_fn(a: &HermitianMatrix, rho: &HermitianMatrix) -> f64 {
    a.dot(rho)
}

/// de_a(v) = Tr(a v)
pub fn d_expectation(a: &HermitianMatrix, v: &TangentVector) -> f64 {
    a.dot(&v.v)
}

/// Y^a = J(X^a), entries |λ_k − λ_l| a_kl in the eigenbasis of ρ.
///
/// The eigenbasis formula is continuous in ρ, so it is also the extension
/// used off the orbit when taking finite differences.
pub fn gradient_field_isospectral(a: &HermitianMatrix, rho: &HermitianMatrix) -> Result<HermitianMatrix> {
    let e = rho.eig()?;
    let ae = e.to_eigenbasis(a.as_matrix());
    let lam = &e.values;
    let n = rho.dim();
    let ye = ComplexMatrix::from_fn(n, n, |k, l| ae[(k, l)] * (lam[k] - lam[l]).abs());
    Ok(HermitianMatrix::hermitian_part_of(&e.from_eigenbasis(&ye)))
}

/// [[a, ρ], ρ] = {a, ρ} − 2ρaρ; equals Y^a on pure states.
pub fn double_commutator(a: &HermitianMatrix, rho: &HermitianMatrix) -> HermitianMatrix {
    let inner = a.commutator(rho);
    HermitianMatrix::hermitian_part_of(&inner.commutator(rho))
}

/// Angle between `𝒥(X^a)` and `Y^a` and the least-squares scale factor
/// `⟨𝒥(X^a), Y^a⟩ / ⟨Y^a, Y^a⟩`. `None` when `Y^a` vanishes.
pub fn conformal_relation(a: &HermitianMatrix, rho: &HermitianMatrix) -> Result<Option<(f64, f64)>> {
    let y = gradient_field_isospectral(a, rho)?;
    let jx = crate::tensor_fields::jj_apply(&crate::tensor_fields::hamiltonian_field(a, rho), rho);
    let yy = y.dot(&y);
    if yy <= 1e-28 {
        return Ok(None);
    }
    let jy = jx.dot(&y);
    let jj = jx.dot(&jx);
    let cos = (jy / (jj * yy).sqrt()).clamp(-1.0, 1.0);
    Ok(Some((cos.abs().acos(), jy / yy)))
}

/// Central-difference Lie bracket `[F, G](ρ) = DG(ρ)[F(ρ)] − DF(ρ)[G(ρ)]`.
pub fn lie_bracket_fd<F, G>(f: F, g: G, rho: &HermitianMatrix, h: f64) -> Result<HermitianMatrix>
where
    F: Fn(&HermitianMatrix) -> Result<HermitianMatrix>,
    G: Fn(&HermitianMatrix) -> Result<HermitianMatrix>,
{
    let fv = f(rho)?;
    let gv = g(rho)?;
    let dg_f = g(&rho.axpy(h, &fv))?.sub(&g(&rho.axpy(-h, &fv))?).scale(0.5 / h);
    let df_g = f(&rho.axpy(h, &gv))?.sub(&f(&rho.axpy(-h, &gv))?).scale(0.5 / h);
    Ok(dg_f.sub(&df_g))
}

/// Result of checking one bracket identity at one point.
#[derive(Clone, Copy, Debug)]
pub struct BracketCheck {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl BracketCheck {
    pub fn max(&self) -> f64 {
        self.xx.max(self.xy).max(self.yy)
    }
}

/// Deviations in `[X^a, X^b] = −X^c`, `[X^a, Y^b] = −Y^c`, `[Y^a, Y^b] = X^c`
/// with `c = i[a, b]`, measured in max-abs entries.
pub fn commutation_suite(a: &HermitianMatrix, b: &HermitianMatrix, rho: &HermitianMatrix, h: f64) -> Result<BracketCheck> {
    use crate::tensor_fields::hamiltonian_field;
    let c = a.i_commutator(b);
    let xa = |p: &HermitianMatrix| Ok(hamiltonian_field(a, p));
    let xb = |p: &HermitianMatrix| Ok(hamiltonian_field(b, p));
    let ya = |p: &HermitianMatrix| gradient_field_isospectral(a, p);
    let yb = |p: &HermitianMatrix| gradient_field_isospectral(b, p);
    let xc = hamiltonian_field(&c, rho);
    let yc = gradient_field_isospectral(&c, rho)?;

    let dev = |m: HermitianMatrix| m.max_abs();
    Ok(BracketCheck {
        xx: dev(lie_bracket_fd(xa, xb, rho, h)?.add(&xc)),
        xy: dev(lie_bracket_fd(xa, yb, rho, h)?.add(&yc)),
        yy: dev(lie_bracket_fd(ya, yb, rho, h)?.sub(&xc)),
    })
}
