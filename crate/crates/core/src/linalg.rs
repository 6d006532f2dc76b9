//! Dense complex matrices and the handful of decompositions the rest of the
//! crate is built on.
//!
//! Everything here is small-matrix code (n up to a few dozen): row-major
//! storage, no blocking, no BLAS. Eigenvalues are always reported in
//! descending order.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative tolerance used to accept a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: k / cols, col: k % cols });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    pub fn from_complex_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Outer product |u><v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    /// [A, B] = AB - BA
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// {A, B} = AB + BA
    pub fn anticommutator(&self, other: &Self) -> Self {
        &self.matmul(other) + &other.matmul(self)
    }

    /// Tr(A B) without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for r in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(r, k)] * other[(k, r)];
            }
        }
        acc
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_defect() <= rel_tol * (1.0 + self.max_abs())
    }

    pub fn is_anti_hermitian(&self, rel_tol: f64) -> bool {
        self.scale_c(-I).is_hermitian(rel_tol)
    }

    /// (M + M†)/2
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }

    pub fn determinant(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("determinant of a {}x{} matrix", self.rows, self.cols)));
        }
        Ok(self.to_nalgebra().determinant())
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("inverse of a {}x{} matrix", self.rows, self.cols)));
        }
        let inv = self.to_nalgebra().try_inverse().ok_or(Error::Singular)?;
        Ok(Self::from_nalgebra(&inv))
    }

    /// Solves `self * X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        if !self.is_square() || self.rows != rhs.rows {
            return Err(Error::Dimension("solve: incompatible shapes".into()));
        }
        let lu = self.to_nalgebra().lu();
        let x = lu.solve(&rhs.to_nalgebra()).ok_or(Error::Singular)?;
        Ok(Self::from_nalgebra(&x))
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let svd = self.to_nalgebra().svd(false, false);
        let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<C64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &nalgebra::DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add dimension mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub dimension mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

/// Square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Accepts `m` if it is Hermitian within `HERMITIAN_TOL * (1 + max|m|)`;
    /// the stored matrix is the exact Hermitian part.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("Hermitian matrix must be square, got {}x{}", m.rows, m.cols)));
        }
        let tolerance = HERMITIAN_TOL * (1.0 + m.max_abs());
        let asymmetry = m.hermitian_defect();
        if asymmetry > tolerance {
            return Err(Error::NotHermitian { asymmetry, tolerance });
        }
        Ok(HermitianMatrix(m.hermitian_part()))
    }

    /// Projects an arbitrary square matrix onto its Hermitian part.
    pub fn hermitian_part_of(m: &ComplexMatrix) -> Self {
        assert!(m.is_square());
        HermitianMatrix(m.hermitian_part())
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        HermitianMatrix(ComplexMatrix::from_real_diag(diag))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(ComplexMatrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(ComplexMatrix::zeros(n, n))
    }

    /// |ψ><ψ| (not normalized).
    pub fn projector(psi: &[C64]) -> Self {
        HermitianMatrix(ComplexMatrix::outer(psi, psi))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace_re(&self) -> f64 {
        self.0.trace().re
    }

    pub fn add(&self, other: &Self) -> Self {
        HermitianMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        HermitianMatrix(&self.0 - &other.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.scale(s))
    }

    /// self + s * other
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        HermitianMatrix(&self.0 + &other.0.scale(s))
    }

    /// Real inner product Tr(self · other).
    pub fn dot(&self, other: &Self) -> f64 {
        self.0.trace_product(&other.0).re
    }

    /// i[self, other], Hermitian whenever both arguments are.
    pub fn i_commutator(&self, other: &Self) -> Self {
        HermitianMatrix::hermitian_part_of(&self.0.commutator(&other.0).scale_c(I))
    }

    /// -i[self, other]
    pub fn minus_i_commutator(&self, other: &Self) -> Self {
        HermitianMatrix::hermitian_part_of(&self.0.commutator(&other.0).scale_c(-I))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        HermitianMatrix::hermitian_part_of(&self.0.anticommutator(&other.0))
    }

    /// U self U†
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        HermitianMatrix::hermitian_part_of(&u.matmul(&self.0).matmul(&u.adjoint()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    pub fn eig(&self) -> Result<Eigen> {
        eig_hermitian(self)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eig_hermitian(self)?.values)
    }

    /// Applies a real function to the spectrum: V f(Λ) V†.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let e = eig_hermitian(self)?;
        let d: Vec<f64> = e.values.iter().map(|&l| f(l)).collect();
        Ok(e.reconstruct_with(&d))
    }
}

impl std::ops::Deref for HermitianMatrix {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Unitary; column k is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.reconstruct_with(&self.values)
    }

    /// V diag(d) V†
    pub fn reconstruct_with(&self, d: &[f64]) -> HermitianMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let m = ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n).map(|k| v[(r, k)] * v[(c, k)].conj() * d[k]).sum()
        });
        HermitianMatrix::hermitian_part_of(&m)
    }

    /// V† M V
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.vectors.adjoint().matmul(m).matmul(&self.vectors)
    }

    /// V M V†
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.vectors.matmul(m).matmul(&self.vectors.adjoint())
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back sorted descending (stable for ties) and the
/// eigenvector matrix is unitary to working precision.
pub fn eig_hermitian(m: &HermitianMatrix) -> Result<Eigen> {
    let n = m.dim();
    let mut a = m.as_matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();

    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    s += a[(p, q)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = n < 2 || norm == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
                let u_pp = C64::new(c, 0.0);
                let u_pq = C64::new(s, 0.0);
                let u_qp = phase.conj() * (-s);
                let u_qq = phase.conj() * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
        converged = off(&a) <= f64::EPSILON * 1e-2 * norm;
        if !converged && sweeps >= 3 {
            // Past quadratic convergence the residual stalls at roundoff level.
            converged = off(&a) <= 4.0 * f64::EPSILON * norm;
        }
    }
    if !converged {
        return Err(Error::Convergence { sweeps, norm });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

// Padé(13) coefficients for the scaling-and-squaring exponential.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential.
///
/// Hermitian and anti-Hermitian inputs (within `HERMITIAN_TOL`) go through the
/// eigendecomposition; everything else through scaling and squaring with a
/// degree-13 Padé approximant.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("expm of a {}x{} matrix", m.rows(), m.cols())));
    }
    if m.is_hermitian(HERMITIAN_TOL) {
        return expm_hermitian(&HermitianMatrix::hermitian_part_of(m), ONE);
    }
    if m.is_anti_hermitian(HERMITIAN_TOL) {
        return expm_hermitian(&HermitianMatrix::hermitian_part_of(&m.scale_c(-I)), I);
    }
    expm_pade(m)
}

/// exp(factor · H) for Hermitian H, through V exp(factor Λ) V†.
pub fn expm_hermitian(h: &HermitianMatrix, factor: C64) -> Result<ComplexMatrix> {
    let e = eig_hermitian(h)?;
    let n = h.dim();
    let d: Vec<C64> = e.values.iter().map(|&l| (factor * l).exp()).collect();
    let v = &e.vectors;
    Ok(ComplexMatrix::from_fn(n, n, |r, c| (0..n).map(|k| v[(r, k)] * d[k] * v[(c, k)].conj()).sum()))
}

/// Scaling-and-squaring exponential with a Padé(13) approximant.
pub fn expm_pade(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("expm of a {}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    let norm = m.norm_one();
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = m.scale(0.5f64.powi(s));
    let id = ComplexMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let b = &PADE13;

    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| -> ComplexMatrix {
        let mut out = a6.scale(c6);
        out = &out + &a4.scale(c4);
        out = &out + &a2.scale(c2);
        &out + &id.scale(c0)
    };
    let u_inner = a6.matmul(&lin(b[13], b[11], b[9], 0.0));
    let u = a.matmul(&(&u_inner + &lin(b[7], b[5], b[3], b[1])));
    let v_inner = a6.matmul(&lin(b[12], b[10], b[8], 0.0));
    let v = &v_inner + &lin(b[6], b[4], b[2], b[0]);

    let mut r = (&v - &u).solve(&(&v + &u))?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}

/// Kronecker product A ⊗ B.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Which tensor factor survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Traces out the complement of `keep` on a (n_A·n_B)-dimensional operator.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), keep: Subsystem) -> Result<ComplexMatrix> {
    let (na, nb) = dims;
    if na == 0 || nb == 0 || m.rows() != na * nb || m.cols() != na * nb {
        return Err(Error::Dimension(format!(
            "partial trace over {na}x{nb} needs a {}x{} matrix, got {}x{}",
            na * nb,
            na * nb,
            m.rows(),
            m.cols()
        )));
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(na, na, |i, j| (0..nb).map(|k| m[(i * nb + k, j * nb + k)]).sum()),
        Subsystem::B => ComplexMatrix::from_fn(nb, nb, |i, j| (0..na).map(|k| m[(k * nb + i, k * nb + j)]).sum()),
    })
}

/// Transpose of the B factor: (i_A i_B, j_A j_B) -> (i_A j_B, j_A i_B).
pub fn partial_transpose_b(m: &ComplexMatrix, dims: (usize, usize)) -> Result<ComplexMatrix> {
    let (na, nb) = dims;
    if m.rows() != na * nb || m.cols() != na * nb {
        return Err(Error::Dimension(format!("partial transpose over {na}x{nb} on a {}x{} matrix", m.rows(), m.cols())));
    }
    Ok(ComplexMatrix::from_fn(na * nb, na * nb, |r, c| {
        let (ia, ib) = (r / nb, r % nb);
        let (ja, jb) = (c / nb, c % nb);
        m[(ia * nb + jb, ja * nb + ib)]
    }))
}

/// Wire format for matrices: `{"n": int, "re": [[...]], "im": [[...]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        assert!(m.is_square(), "matrix JSON format holds square matrices only");
        let n = m.rows();
        MatrixJson {
            n,
            re: (0..n).map(|r| (0..n).map(|c| m[(r, c)].re).collect()).collect(),
            im: (0..n).map(|r| (0..n).map(|c| m[(r, c)].im).collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.n;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Parse(format!("matrix JSON: re/im must both be {n}x{n}")));
        }
        let data = (0..n * n).map(|k| C64::new(self.re[k / n][k % n], self.im[k / n][k % n])).collect();
        ComplexMatrix::from_row_major(n, n, data)
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.to_matrix()?)
    }
}

pub mod pauli {
    //! Pauli matrices in the standard representation.
    use super::*;

    pub fn sigma(j: usize) -> HermitianMatrix {
        let m = match j {
            0 => ComplexMatrix::identity(2),
            1 => ComplexMatrix::from_fn(2, 2, |r, c| if r != c { ONE } else { ZERO }),
            2 => ComplexMatrix::from_fn(2, 2, |r, c| match (r, c) {
                (0, 1) => -I,
                (1, 0) => I,
                _ => ZERO,
            }),
            3 => ComplexMatrix::from_real_diag(&[1.0, -1.0]),
            _ => panic!("Pauli index must be 0..=3, got {j}"),
        };
        HermitianMatrix(m)
    }
}

#[cfg(test)]
mod tests {
    use super::pauli::sigma;
    use super::*;
    use crate::sampling::{random_hermitian, rng_for};
    use std::f64::consts::{E, FRAC_1_SQRT_2, PI};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn eig_identity() {
        let e = eig_hermitian(&HermitianMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        assert!(close(&e.reconstruct(), &ComplexMatrix::identity(2), 1e-15));
    }

    #[test]
    fn eig_sigma3_is_diagonal() {
        let e = eig_hermitian(&sigma(3)).unwrap();
        assert_eq!(e.values, vec![1.0, -1.0]);
        assert!(close(&e.vectors, &ComplexMatrix::identity(2), 1e-15));
    }

    #[test]
    fn eig_sigma1_eigenvectors() {
        let e = eig_hermitian(&sigma(1)).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15 && (e.values[1] + 1.0).abs() < 1e-15);
        // top eigenvector ∝ (1, 1)/√2, bottom ∝ (1, -1)/√2, up to phase
        let top = e.vectors.column(0);
        let bot = e.vectors.column(1);
        let ov_top = (top[0].conj() + top[1].conj()) * FRAC_1_SQRT_2;
        let ov_bot = (bot[0].conj() - bot[1].conj()) * FRAC_1_SQRT_2;
        assert!((ov_top.norm() - 1.0).abs() < 1e-14);
        assert!((ov_bot.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstruction_random() {
        let mut rng = rng_for(1, 0);
        for n in 1..=8 {
            for _ in 0..20 {
                let h = random_hermitian(&mut rng, n, 3.0);
                let e = eig_hermitian(&h).unwrap();
                let err = (e.reconstruct().as_matrix() - h.as_matrix()).frobenius_norm();
                assert!(err <= 1e-10 * (1.0 + h.frobenius_norm()), "n={n} err={err}");
                let vtv = e.vectors.adjoint().matmul(&e.vectors);
                assert!(close(&vtv, &ComplexMatrix::identity(n), 1e-10));
                assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn eig_handles_degenerate_spectrum() {
        let mut rng = rng_for(2, 0);
        let u = crate::sampling::random_unitary(&mut rng, 4);
        let h = HermitianMatrix::from_real_diag(&[0.5, 0.2, 0.2, 0.1]).conjugate_by(&u);
        let e = eig_hermitian(&h).unwrap();
        for (got, want) in e.values.iter().zip([0.5, 0.2, 0.2, 0.1]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = ComplexMatrix::zeros(3, 3);
        assert!(close(&expm(&z).unwrap(), &ComplexMatrix::identity(3), 1e-15));
        assert!(close(&expm_pade(&z).unwrap(), &ComplexMatrix::identity(3), 1e-15));
    }

    #[test]
    fn expm_diagonal_cases() {
        let theta = PI / 4.0;
        let m = sigma(3).scale_c(I * theta);
        let want = ComplexMatrix::from_complex_diag(&[C64::from_polar(1.0, theta), C64::from_polar(1.0, -theta)]);
        assert!(close(&expm(&m).unwrap(), &want, 1e-14));
        assert!(close(&expm_pade(&m).unwrap(), &want, 1e-14));

        let m = sigma(3).as_matrix().clone();
        let want = ComplexMatrix::from_real_diag(&[E, 1.0 / E]);
        assert!(close(&expm(&m).unwrap(), &want, 1e-14));
        assert!(close(&expm_pade(&m).unwrap(), &want, 1e-14));
    }

    #[test]
    fn expm_routes_agree_on_hermitian_and_anti_hermitian() {
        let mut rng = rng_for(3, 0);
        for n in 2..=6 {
            let h = random_hermitian(&mut rng, n, 1.5);
            for factor in [ONE, I, C64::new(-2.0, 0.0)] {
                let m = h.scale_c(factor);
                let pade = expm_pade(&m).unwrap();
                let eig = expm_hermitian(&h, factor).unwrap();
                let rel = (&pade - &eig).frobenius_norm() / eig.frobenius_norm();
                assert!(rel <= 1e-11, "n={n} factor={factor} rel={rel}");
            }
        }
    }

    #[test]
    fn expm_non_square_rejected() {
        assert!(matches!(expm(&ComplexMatrix::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn expm_large_norm_uses_squaring() {
        // Nilpotent-plus-scalar: exp(cI + N) = e^c (I + N)
        let mut m = ComplexMatrix::identity(2).scale(7.0);
        m[(0, 1)] = C64::new(30.0, 0.0);
        let got = expm_pade(&m).unwrap();
        let e7 = 7.0f64.exp();
        assert!((got[(0, 0)].re - e7).abs() / e7 < 1e-12);
        assert!((got[(0, 1)].re - 30.0 * e7).abs() / (30.0 * e7) < 1e-12);
        assert!(got[(1, 0)].norm() < 1e-9);
    }

    #[test]
    fn kron_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert!(close(&kron(&i2, &i2), &ComplexMatrix::identity(4), 0.0));
        let zz = kron(&sigma(3), &sigma(3));
        assert!(close(&zz, &ComplexMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0]), 0.0));
        let p0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let p1 = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        assert!(close(&kron(&p0, &p1), &ComplexMatrix::from_real_diag(&[0.0, 1.0, 0.0, 0.0]), 0.0));
    }

    #[test]
    fn partial_trace_examples() {
        let bell = [C64::new(FRAC_1_SQRT_2, 0.0), ZERO, ZERO, C64::new(FRAC_1_SQRT_2, 0.0)];
        let rho = ComplexMatrix::outer(&bell, &bell);
        let ra = partial_trace(&rho, (2, 2), Subsystem::A).unwrap();
        assert!(close(&ra, &ComplexMatrix::identity(2).scale(0.5), 1e-15));

        let mixed = ComplexMatrix::identity(4).scale(0.25);
        let rb = partial_trace(&mixed, (2, 2), Subsystem::B).unwrap();
        assert!(close(&rb, &ComplexMatrix::identity(2).scale(0.5), 1e-15));

        let mut rng = rng_for(4, 0);
        let a = crate::sampling::random_state(&mut rng, 2, 2);
        let b = crate::sampling::random_state(&mut rng, 3, 3);
        let ab = kron(a.as_matrix(), b.as_matrix());
        assert!(close(&partial_trace(&ab, (2, 3), Subsystem::A).unwrap(), a.as_matrix(), 1e-14));
        assert!(close(&partial_trace(&ab, (2, 3), Subsystem::B).unwrap(), b.as_matrix(), 1e-14));
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let m = ComplexMatrix::identity(5);
        assert!(matches!(partial_trace(&m, (2, 2), Subsystem::A), Err(Error::Dimension(_))));
    }

    #[test]
    fn hermitian_construction_rejects_asymmetry() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = C64::new(1e-6, 0.0);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = C64::new(0.0, 1.0);
        m[(1, 0)] = C64::new(0.0, -1.0);
        assert!(HermitianMatrix::new(m).is_ok());
    }

    #[test]
    fn row_major_rejects_nan() {
        let r = ComplexMatrix::from_row_major(1, 2, vec![ONE, C64::new(f64::NAN, 0.0)]);
        assert_eq!(r, Err(Error::NonFinite { row: 0, col: 1 }));
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = sigma(2);
        let j = MatrixJson::from_matrix(&m);
        let text = serde_json::to_string(&j).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_hermitian().unwrap(), m);
        let bad = MatrixJson { n: 2, re: vec![vec![1.0]], im: vec![] };
        assert!(bad.to_matrix().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn expm_group_law(seed in any::<u64>(), s in -1.0f64..1.0, t in -1.0f64..1.0) {
                let mut rng = rng_for(seed, 1);
                let n = 3;
                let mut m = crate::sampling::random_complex(&mut rng, n, n);
                let norm = m.frobenius_norm();
                m = m.scale(2.0 * 0.999 / norm);
                let lhs = expm(&m.scale(s)).unwrap().matmul(&expm(&m.scale(t)).unwrap());
                let rhs = expm(&m.scale(s + t)).unwrap();
                prop_assert!((&lhs - &rhs).max_abs() <= 1e-9);
            }

            #[test]
            fn partial_trace_is_linear_and_trace_preserving(seed in any::<u64>(), alpha in -2.0f64..2.0) {
                let mut rng = rng_for(seed, 2);
                let x = crate::sampling::random_complex(&mut rng, 6, 6);
                let y = crate::sampling::random_complex(&mut rng, 6, 6);
                for keep in [Subsystem::A, Subsystem::B] {
                    let lhs = partial_trace(&(&x + &y.scale(alpha)), (2, 3), keep).unwrap();
                    let rhs = &partial_trace(&x, (2, 3), keep).unwrap()
                        + &partial_trace(&y, (2, 3), keep).unwrap().scale(alpha);
                    prop_assert!((&lhs - &rhs).max_abs() <= 1e-12);
                    let tr = partial_trace(&x, (2, 3), keep).unwrap().trace();
                    prop_assert!((tr - x.trace()).norm() <= 1e-12 * (1.0 + x.max_abs()));
                }
            }
        }
    }
}
