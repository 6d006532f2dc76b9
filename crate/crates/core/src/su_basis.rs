//! Generalized Gell-Mann bases and the coordinate chart on the trace-one
//! hyperplane.
//!
//! Convention: Hermitian, traceless `h_j` with `Tr(h_j h_k) = δ_jk`. For
//! n = 2 this gives `h_j = σ_j / √2`, so Bloch coordinates in the usual
//! σ-convention are √2 times the coordinates produced here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, MatrixJson, C64, I};

/// Orthonormal basis of traceless Hermitian n×n matrices with structure
/// constants.
///
/// `[h_j, h_k] = i c(j,k,l) h_l` and
/// `{h_j, h_k} = d(j,k,l) h_l + (2 δ_jk / n) I`, indices 0-based.
#[derive(Clone, Debug)]
pub struct SuBasis {
    n: usize,
    h: Vec<HermitianMatrix>,
    h0: HermitianMatrix,
    c: Vec<f64>,
    d: Vec<f64>,
}

impl SuBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of generators, n² − 1.
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn h(&self, j: usize) -> &HermitianMatrix {
        &self.h[j]
    }

    pub fn generators(&self) -> &[HermitianMatrix] {
        &self.h
    }

    /// I / √n
    pub fn h0(&self) -> &HermitianMatrix {
        &self.h0
    }

    fn idx(&self, j: usize, k: usize, l: usize) -> usize {
        let m = self.h.len();
        (j * m + k) * m + l
    }

    pub fn c(&self, j: usize, k: usize, l: usize) -> f64 {
        self.c[self.idx(j, k, l)]
    }

    pub fn d(&self, j: usize, k: usize, l: usize) -> f64 {
        self.d[self.idx(j, k, l)]
    }

    /// Identity coefficient of `{h_j, h_k}`: exactly 2δ_jk/n.
    pub fn d_identity(&self, j: usize, k: usize) -> f64 {
        if j == k {
            2.0 / self.n as f64
        } else {
            0.0
        }
    }

    /// Components `Tr(h_j m)`; the real parts for Hermitian `m`.
    pub fn components(&self, m: &HermitianMatrix) -> Vec<f64> {
        self.h.iter().map(|h| h.dot(m)).collect()
    }

    /// Σ_j v_j h_j
    pub fn combine(&self, v: &[f64]) -> HermitianMatrix {
        assert_eq!(v.len(), self.h.len(), "component count mismatch");
        let mut out = HermitianMatrix::zeros(self.n);
        for (h, &x) in self.h.iter().zip(v) {
            if x != 0.0 {
                out = out.axpy(x, h);
            }
        }
        out
    }

    pub fn to_json(&self) -> BasisJson {
        let m = self.h.len();
        let cube = |t: &Vec<f64>| -> Vec<Vec<Vec<f64>>> {
            (0..m).map(|j| (0..m).map(|k| (0..m).map(|l| t[(j * m + k) * m + l]).collect()).collect()).collect()
        };
        BasisJson {
            n: self.n,
            h: self.h.iter().map(|h| MatrixJson::from_matrix(h)).collect(),
            h0: MatrixJson::from_matrix(&self.h0),
            c: cube(&self.c),
            d: cube(&self.d),
            identity_coefficient: 2.0 / self.n as f64,
        }
    }
}

/// Serialized basis: matrices plus `c[j][k][l]` and `d[j][k][l]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisJson {
    pub n: usize,
    pub h: Vec<MatrixJson>,
    pub h0: MatrixJson,
    pub c: Vec<Vec<Vec<f64>>>,
    pub d: Vec<Vec<Vec<f64>>>,
    /// Coefficient of I in {h_j, h_j}.
    pub identity_coefficient: f64,
}

/// Generalized Gell-Mann basis for su(n), n ≥ 2.
///
/// Order: for each k = 1..n−1, the symmetric and antisymmetric pairs (j, k)
/// for j < k, then the k-th diagonal element.
pub fn gellmann_basis(n: usize) -> Result<SuBasis> {
    if n < 2 {
        return Err(Error::Domain(format!("basis dimension must be at least 2, got {n}")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = Vec::with_capacity(n * n - 1);
    for k in 1..n {
        for j in 0..k {
            let mut sym = ComplexMatrix::zeros(n, n);
            sym[(j, k)] = C64::new(s, 0.0);
            sym[(k, j)] = C64::new(s, 0.0);
            h.push(HermitianMatrix::hermitian_part_of(&sym));

            let mut anti = ComplexMatrix::zeros(n, n);
            anti[(j, k)] = -I * s;
            anti[(k, j)] = I * s;
            h.push(HermitianMatrix::hermitian_part_of(&anti));
        }
        let kf = k as f64;
        let norm = 1.0 / (kf * (kf + 1.0)).sqrt();
        let mut diag = vec![0.0; n];
        diag[..k].iter_mut().for_each(|x| *x = norm);
        diag[k] = -kf * norm;
        h.push(HermitianMatrix::from_real_diag(&diag));
    }

    let m = h.len();
    let products: Vec<ComplexMatrix> =
        (0..m * m).map(|jk| h[jk / m].as_matrix().matmul(h[jk % m].as_matrix())).collect();
    let mut c = vec![0.0; m * m * m];
    let mut d = vec![0.0; m * m * m];
    for j in 0..m {
        for k in 0..m {
            let comm = products[j * m + k].as_slice().iter().zip(products[k * m + j].as_slice());
            let (comm, anti): (Vec<C64>, Vec<C64>) = comm.map(|(a, b)| (a - b, a + b)).unzip();
            let comm = ComplexMatrix::from_row_major(n, n, comm).expect("finite");
            let anti = ComplexMatrix::from_row_major(n, n, anti).expect("finite");
            for l in 0..m {
                let idx = (j * m + k) * m + l;
                c[idx] = (-I * comm.trace_product(&h[l])).re;
                d[idx] = anti.trace_product(&h[l]).re;
            }
        }
    }
    let h0 = HermitianMatrix::identity(n).scale(1.0 / (n as f64).sqrt());
    Ok(SuBasis { n, h, h0, c, d })
}

/// Coordinates `x^j = Tr(h_j ξ)` of a point on the trace-one hyperplane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateVector {
    pub n: usize,
    pub x: Vec<f64>,
}

impl CoordinateVector {
    /// Σ_j (x^j)², equal to Tr ξ² − 1/n.
    pub fn r_squared(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }
}

pub fn to_coordinates(xi: &HermitianMatrix, basis: &SuBasis) -> Result<CoordinateVector> {
    if xi.dim() != basis.n() {
        return Err(Error::Dimension(format!("{}x{} matrix in an su({}) chart", xi.dim(), xi.dim(), basis.n())));
    }
    let tr = xi.trace_re();
    if (tr - 1.0).abs() > 1e-10 {
        return Err(Error::TraceNotOne(tr));
    }
    Ok(CoordinateVector { n: basis.n(), x: basis.components(xi) })
}

/// ξ = I/n + Σ_j x^j h_j
pub fn from_coordinates(x: &CoordinateVector, basis: &SuBasis) -> Result<HermitianMatrix> {
    if x.n != basis.n() || x.x.len() != basis.len() {
        return Err(Error::Dimension(format!(
            "coordinate vector of length {} for su({}) needs length {}",
            x.x.len(),
            basis.n(),
            basis.len()
        )));
    }
    if x.x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("coordinates must be finite".into()));
    }
    let n = basis.n();
    Ok(HermitianMatrix::identity(n).scale(1.0 / n as f64).add(&basis.combine(&x.x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::sigma;
    use crate::sampling::{random_hermitian, random_state, rng_for};
    use crate::state::validate_state;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn check_basis(n: usize, tol: f64) {
        let b = gellmann_basis(n).unwrap();
        let m = b.len();
        assert_eq!(m, n * n - 1);
        for j in 0..m {
            assert!(b.h(j).trace_re().abs() <= tol);
            for k in 0..m {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((b.h(j).dot(b.h(k)) - want).abs() <= tol, "n={n} j={j} k={k}");
                let comm = b.h(j).commutator(b.h(k));
                let mut rec = ComplexMatrix::zeros(n, n);
                let mut arec = ComplexMatrix::identity(n).scale(b.d_identity(j, k));
                for l in 0..m {
                    rec = &rec + &b.h(l).scale_c(I * b.c(j, k, l));
                    arec = &arec + &b.h(l).scale(b.d(j, k, l));
                }
                assert!((&comm - &rec).max_abs() <= tol);
                assert!((b.h(j).anticommutator(b.h(k)).as_matrix() - &arec).max_abs() <= tol);
            }
        }
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let c = b.c(j, k, l);
                    assert!((c + b.c(k, j, l)).abs() <= tol && (c - b.c(k, l, j)).abs() <= tol);
                    let d = b.d(j, k, l);
                    assert!((d - b.d(k, j, l)).abs() <= tol && (d - b.d(k, l, j)).abs() <= tol);
                }
            }
        }
    }

    #[test]
    fn basis_invariants_n2_to_n5() {
        for n in 2..=5 {
            check_basis(n, 1e-12);
        }
    }

    #[test]
    fn su2_is_scaled_pauli() {
        let b = gellmann_basis(2).unwrap();
        for j in 0..3 {
            let want = sigma(j + 1).scale(FRAC_1_SQRT_2);
            assert!((b.h(j).as_matrix() - want.as_matrix()).max_abs() < 1e-15);
        }
        assert!((b.c(0, 1, 2) - SQRT_2).abs() < 1e-14);
        assert!(b.d.iter().all(|x| x.abs() < 1e-15));
        assert_eq!(b.d_identity(1, 1), 1.0);
    }

    #[test]
    fn su3_structure_constant() {
        let b = gellmann_basis(3).unwrap();
        assert!((b.c(0, 1, 2) - SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn rejects_small_n() {
        assert!(matches!(gellmann_basis(1), Err(Error::Domain(_))));
    }

    #[test]
    fn coordinate_examples() {
        let b = gellmann_basis(3).unwrap();
        let x = to_coordinates(&HermitianMatrix::identity(3).scale(1.0 / 3.0), &b).unwrap();
        assert!(x.x.iter().all(|v| v.abs() < 1e-15));

        let b = gellmann_basis(2).unwrap();
        let x = to_coordinates(&HermitianMatrix::from_real_diag(&[1.0, 0.0]), &b).unwrap();
        assert!(x.x[0].abs() < 1e-15 && x.x[1].abs() < 1e-15 && (x.x[2] - FRAC_1_SQRT_2).abs() < 1e-15);

        let plus = HermitianMatrix::identity(2).add(&sigma(1)).scale(0.5);
        let x = to_coordinates(&plus, &b).unwrap();
        assert!((x.x[0] - FRAC_1_SQRT_2).abs() < 1e-15 && x.x[1].abs() < 1e-15 && x.x[2].abs() < 1e-15);

        let back = from_coordinates(&CoordinateVector { n: 2, x: vec![0.0, 0.0, FRAC_1_SQRT_2] }, &b).unwrap();
        assert!((back.as_matrix() - &ComplexMatrix::from_real_diag(&[1.0, 0.0])).max_abs() < 1e-15);

        let outside = from_coordinates(&CoordinateVector { n: 2, x: vec![2.0, 0.0, 0.0] }, &b).unwrap();
        assert!((outside.trace_re() - 1.0).abs() < 1e-15);
        assert!(matches!(validate_state(&outside), Err(crate::Error::NotPositive(_))));
    }

    #[test]
    fn coordinates_reject_bad_trace() {
        let b = gellmann_basis(2).unwrap();
        assert!(matches!(to_coordinates(&HermitianMatrix::identity(2), &b), Err(Error::TraceNotOne(_))));
    }

    #[test]
    fn json_has_expected_shape() {
        let j = gellmann_basis(3).unwrap().to_json();
        assert_eq!(j.h.len(), 8);
        assert_eq!(j.c.len(), 8);
        assert_eq!(j.c[0][1].len(), 8);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn chart_round_trips(seed in any::<u64>(), n in 2usize..=5) {
                let b = gellmann_basis(n).unwrap();
                let mut rng = rng_for(seed, 0);
                let x: Vec<f64> = (0..b.len()).map(|_| crate::sampling::gaussian(&mut rng)).collect();
                let cv = CoordinateVector { n, x };
                let xi = from_coordinates(&cv, &b).unwrap();
                let back = to_coordinates(&xi, &b).unwrap();
                for (u, v) in cv.x.iter().zip(&back.x) {
                    prop_assert!((u - v).abs() <= 1e-12);
                }

                let h = random_hermitian(&mut rng, n, 1.0);
                let xi = h.add(&HermitianMatrix::identity(n).scale((1.0 - h.trace_re()) / n as f64));
                let again = from_coordinates(&to_coordinates(&xi, &b).unwrap(), &b).unwrap();
                prop_assert!((again.as_matrix() - xi.as_matrix()).max_abs() <= 1e-12);

                let s = random_state(&mut rng, n, n);
                prop_assert!(to_coordinates(&s, &b).unwrap().r_squared() <= (n as f64 - 1.0) / n as f64 + 1e-12);
            }
        }
    }
}
