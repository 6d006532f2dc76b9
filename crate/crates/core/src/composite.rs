//! Bipartite systems H_A ⊗ H_B with basis index `i_A · n_B + i_B`.

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flows::{sl_act, sl_normalize, DET_TOL};
use crate::linalg::{kron, partial_trace, partial_transpose_b, ComplexMatrix, HermitianMatrix, Subsystem, C64, ONE};
use crate::state::{purity, rank_of, DensityMatrix, RANK_TOL};

/// Relative singular-value cutoff for Schmidt ranks.
pub const SCHMIDT_TOL: f64 = 1e-9;
/// Frobenius gap below which a state counts as a product.
pub const PRODUCT_TOL: f64 = 1e-9;
/// Partial-transpose eigenvalues above `-PPT_TOL` count as nonnegative.
pub const PPT_TOL: f64 = 1e-10;
/// Slack in the two-qubit spectral condition.
pub const SPECTRAL_SLACK: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BipartiteDims {
    pub n_a: usize,
    pub n_b: usize,
}

impl BipartiteDims {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::Dimension(format!("factor dimensions must be positive, got {n_a}x{n_b}")));
        }
        Ok(BipartiteDims { n_a, n_b })
    }

    pub fn total(&self) -> usize {
        self.n_a * self.n_b
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.n_a, self.n_b)
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if n != self.total() {
            return Err(Error::Dimension(format!("{}x{} factorization of an n = {n} system", self.n_a, self.n_b)));
        }
        Ok(())
    }
}

impl FromStr for BipartiteDims {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("dims must look like 2x3, got {s:?}"));
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        BipartiteDims::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
    }
}

/// Normalized vector of a bipartite system.
#[derive(Clone, Debug, PartialEq)]
pub struct PureBipartiteState {
    psi: Vec<C64>,
    dims: BipartiteDims,
}

impl PureBipartiteState {
    pub fn new(psi: Vec<C64>, dims: BipartiteDims) -> Result<Self> {
        dims.check(psi.len())?;
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!("state vector has norm {norm}, expected 1")));
        }
        Ok(PureBipartiteState { psi, dims })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(mut psi: Vec<C64>, dims: BipartiteDims) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("state vector must be nonzero and finite".into()));
        }
        psi.iter_mut().for_each(|z| *z /= norm);
        Self::new(psi, dims)
    }

    pub fn psi(&self) -> &[C64] {
        &self.psi
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    /// n_A × n_B coefficient matrix ψ_{ij}.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        let nb = self.dims.n_b;
        ComplexMatrix::from_fn(self.dims.n_a, nb, |i, j| self.psi[i * nb + j])
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(HermitianMatrix::projector(&self.psi))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Schmidt {
    pub rank: usize,
    /// descending, Σ s² = 1
    pub coefficients: Vec<f64>,
}

/// Singular values of the coefficient matrix; rank at relative tolerance `tol`.
pub fn schmidt_rank(psi: &PureBipartiteState, tol: f64) -> Schmidt {
    let s = psi.coefficient_matrix().singular_values();
    let top = s.first().copied().unwrap_or(0.0);
    let rank = s.iter().filter(|&&v| v > tol * top).count();
    Schmidt { rank, coefficients: s }
}

/// (Tr_B ρ, Tr_A ρ)
pub fn marginals(rho: &HermitianMatrix, dims: BipartiteDims) -> Result<(HermitianMatrix, HermitianMatrix)> {
    dims.check(rho.dim())?;
    let a = partial_trace(rho, dims.pair(), Subsystem::A)?;
    let b = partial_trace(rho, dims.pair(), Subsystem::B)?;
    Ok((HermitianMatrix::hermitian_part_of(&a), HermitianMatrix::hermitian_part_of(&b)))
}

/// ‖ρ − Tr_B ρ ⊗ Tr_A ρ‖_F
pub fn product_gap(rho: &HermitianMatrix, dims: BipartiteDims) -> Result<f64> {
    let (a, b) = marginals(rho, dims)?;
    Ok((rho.as_matrix() - &kron(&a, &b)).frobenius_norm())
}

pub fn is_product(rho: &HermitianMatrix, dims: BipartiteDims, tol: f64) -> Result<bool> {
    Ok(product_gap(rho, dims)? <= tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AbRank {
    pub k_a: usize,
    pub k_b: usize,
}

/// Marginal ranks of a product state.
pub fn ab_rank(rho: &HermitianMatrix, dims: BipartiteDims) -> Result<AbRank> {
    let gap = product_gap(rho, dims)?;
    if gap > PRODUCT_TOL {
        return Err(Error::NotProduct(gap));
    }
    let (a, b) = marginals(rho, dims)?;
    Ok(AbRank {
        k_a: rank_of(&DensityMatrix::new_unchecked(a), RANK_TOL),
        k_b: rank_of(&DensityMatrix::new_unchecked(b), RANK_TOL),
    })
}

fn check_det(g: &ComplexMatrix) -> Result<()> {
    let dev = (g.determinant()? - ONE).norm();
    if dev > DET_TOL {
        return Err(Error::DetNotOne(dev));
    }
    Ok(())
}

fn check_local(g_a: &ComplexMatrix, g_b: &ComplexMatrix, dims: BipartiteDims) -> Result<()> {
    if g_a.rows() != dims.n_a || !g_a.is_square() || g_b.rows() != dims.n_b || !g_b.is_square() {
        return Err(Error::Dimension(format!(
            "local factors {}x{} and {}x{} do not match {}x{}",
            g_a.rows(),
            g_a.cols(),
            g_b.rows(),
            g_b.cols(),
            dims.n_a,
            dims.n_b
        )));
    }
    check_det(g_a)?;
    check_det(g_b)
}

/// (g_A ⊗ g_B) ρ (g_A ⊗ g_B)† / Tr
pub fn local_sl_act(
    g_a: &ComplexMatrix,
    g_b: &ComplexMatrix,
    rho: &DensityMatrix,
    dims: BipartiteDims,
) -> Result<DensityMatrix> {
    dims.check(rho.dim())?;
    check_local(g_a, g_b, dims)?;
    sl_act(&kron(g_a, g_b), rho)
}

/// (g_A ⊗ g_B) ψ / ‖·‖
pub fn local_sl_act_pure(
    g_a: &ComplexMatrix,
    g_b: &ComplexMatrix,
    psi: &PureBipartiteState,
) -> Result<PureBipartiteState> {
    check_local(g_a, g_b, psi.dims)?;
    PureBipartiteState::normalized(kron(g_a, g_b).mat_vec(&psi.psi), psi.dims)
}

fn factor_transporter(from: &HermitianMatrix, to: &HermitianMatrix, k: usize) -> Result<ComplexMatrix> {
    let e = from.eig()?;
    let f = to.eig()?;
    let n = from.dim();
    let scales: Vec<C64> = (0..n)
        .map(|i| if i < k { C64::new((f.values[i] / e.values[i]).sqrt(), 0.0) } else { ONE })
        .collect();
    let g = f.vectors.matmul(&ComplexMatrix::from_complex_diag(&scales)).matmul(&e.vectors.adjoint());
    sl_normalize(&g)
}

/// Local SL pair carrying the product state `from` onto `to`.
pub fn product_transporter(
    from: &HermitianMatrix,
    to: &HermitianMatrix,
    dims: BipartiteDims,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let r0 = ab_rank(from, dims)?;
    let r1 = ab_rank(to, dims)?;
    if r0 != r1 {
        return Err(Error::RankMismatch { from: (r0.k_a, r0.k_b), to: (r1.k_a, r1.k_b) });
    }
    let (a0, b0) = marginals(from, dims)?;
    let (a1, b1) = marginals(to, dims)?;
    Ok((factor_transporter(&a0, &a1, r0.k_a)?, factor_transporter(&b0, &b1, r0.k_b)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BallVerdict {
    pub purity: f64,
    pub bound: f64,
    pub certified: bool,
    pub full_rank: bool,
}

/// Tr ρ² ≤ 1/(N−1) certifies the whole isospectral orbit separable.
pub fn separable_ball_test(rho: &DensityMatrix, dims: BipartiteDims) -> Result<BallVerdict> {
    dims.check(rho.dim())?;
    let n = dims.total();
    if n < 2 {
        return Err(Error::Dimension("separability ball needs N >= 2".into()));
    }
    let p = purity(rho);
    let bound = 1.0 / (n - 1) as f64;
    Ok(BallVerdict { purity: p, bound, certified: p <= bound, full_rank: rank_of(rho, RANK_TOL) == n })
}

/// λ₁ − λ₃ ≤ 2√(λ₂λ₄) for a two-qubit spectrum.
pub fn absolutely_separable_2q(spectrum: &[f64]) -> Result<bool> {
    if spectrum.len() != 4 {
        return Err(Error::Dimension(format!("two-qubit spectrum needs 4 eigenvalues, got {}", spectrum.len())));
    }
    let mut l = spectrum.to_vec();
    l.sort_by(|a, b| b.total_cmp(a));
    let root = (l[1].max(0.0) * l[3].max(0.0)).sqrt();
    Ok(l[0] - l[2] - 2.0 * root <= SPECTRAL_SLACK)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PptVerdict {
    pub ppt: bool,
    pub min_eigenvalue: f64,
}

/// Positivity of the partial transpose on B.
pub fn ppt_test(rho: &HermitianMatrix, dims: BipartiteDims) -> Result<PptVerdict> {
    dims.check(rho.dim())?;
    let pt = HermitianMatrix::hermitian_part_of(&partial_transpose_b(rho, dims.pair())?);
    let min = pt.eigenvalues()?.last().copied().unwrap_or(0.0);
    Ok(PptVerdict { ppt: min >= -PPT_TOL, min_eigenvalue: min })
}

/// (|00⟩ + |11⟩)/√2
pub fn bell_vector() -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)]
}

/// (1 − p) I/4 + p |Bell⟩⟨Bell|
pub fn werner_state(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("Werner weight must lie in [0, 1], got {p}")));
    }
    let bell = HermitianMatrix::projector(&bell_vector());
    Ok(DensityMatrix::new_unchecked(HermitianMatrix::identity(4).scale((1.0 - p) / 4.0).axpy(p, &bell)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::sampling::{random_pure_state, random_sl, random_state, random_unit_vector, random_unitary, rng_for, state_with_spectrum};

    fn dims(a: usize, b: usize) -> BipartiteDims {
        BipartiteDims::new(a, b).unwrap()
    }

    fn basis_vec(n: usize, i: usize) -> Vec<C64> {
        (0..n).map(|k| if k == i { ONE } else { ZERO }).collect()
    }

    fn product(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::new_unchecked(HermitianMatrix::hermitian_part_of(&kron(a, b)))
    }

    #[test]
    fn dims_parse() {
        assert_eq!("2x3".parse::<BipartiteDims>().unwrap(), dims(2, 3));
        assert!("2by3".parse::<BipartiteDims>().is_err());
        assert!("0x3".parse::<BipartiteDims>().is_err());
    }

    #[test]
    fn schmidt_examples() {
        let d = dims(2, 2);
        let prod = PureBipartiteState::new(basis_vec(4, 0), d).unwrap();
        assert_eq!(schmidt_rank(&prod, SCHMIDT_TOL).rank, 1);
        let bell = PureBipartiteState::new(bell_vector(), d).unwrap();
        let s = schmidt_rank(&bell, SCHMIDT_TOL);
        assert_eq!(s.rank, 2);
        for c in &s.coefficients {
            assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        }
        let mut rng = rng_for(71, 0);
        let (ua, ub) = (random_unitary(&mut rng, 2), random_unitary(&mut rng, 2));
        let moved = local_sl_act_pure(&sl_normalize(&ua).unwrap(), &sl_normalize(&ub).unwrap(), &bell).unwrap();
        let s2 = schmidt_rank(&moved, SCHMIDT_TOL);
        assert_eq!(s2.rank, 2);
        for (x, y) in s.coefficients.iter().zip(&s2.coefficients) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(PureBipartiteState::new(vec![ONE; 4], d).is_err());
    }

    #[test]
    fn schmidt_normalization() {
        let mut rng = rng_for(72, 0);
        for (a, b) in [(2, 2), (2, 3), (3, 3)] {
            let psi = PureBipartiteState::new(random_unit_vector(&mut rng, a * b), dims(a, b)).unwrap();
            let s = schmidt_rank(&psi, SCHMIDT_TOL);
            assert!((s.coefficients.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(s.rank, a.min(b));
        }
    }

    #[test]
    fn product_examples() {
        let d = dims(2, 2);
        let mut rng = rng_for(73, 0);
        let (a, b) = (random_state(&mut rng, 2, 2), random_state(&mut rng, 2, 1));
        assert!(is_product(&product(&a, &b), d, PRODUCT_TOL).unwrap());
        let bell = HermitianMatrix::projector(&bell_vector());
        let gap = product_gap(&bell, d).unwrap();
        assert!(!is_product(&bell, d, PRODUCT_TOL).unwrap());
        assert!((gap - 0.75f64.sqrt()).abs() < 1e-12);
        let corr = HermitianMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]);
        assert!(!is_product(&corr, d, PRODUCT_TOL).unwrap());
    }

    #[test]
    fn ab_rank_examples() {
        let d = dims(2, 2);
        let mixed = DensityMatrix::maximally_mixed(2);
        let up = DensityMatrix::pure(&basis_vec(2, 0)).unwrap();
        assert_eq!(ab_rank(&product(&mixed, &up), d).unwrap(), AbRank { k_a: 2, k_b: 1 });
        assert_eq!(ab_rank(&product(&up, &up), d).unwrap(), AbRank { k_a: 1, k_b: 1 });
        assert_eq!(ab_rank(&product(&mixed, &mixed), d).unwrap(), AbRank { k_a: 2, k_b: 2 });
        assert!(matches!(ab_rank(&HermitianMatrix::projector(&bell_vector()), d), Err(Error::NotProduct(_))));
    }

    #[test]
    fn local_action_factorizes() {
        let d = dims(2, 3);
        let mut rng = rng_for(74, 0);
        for _ in 0..20 {
            let a = random_state(&mut rng, 2, 2);
            let b = random_state(&mut rng, 3, 2);
            let (ga, gb) = (random_sl(&mut rng, 2, 0.5), random_sl(&mut rng, 3, 0.5));
            let out = local_sl_act(&ga, &gb, &product(&a, &b), d).unwrap();
            let want = kron(&sl_act(&ga, &a).unwrap(), &sl_act(&gb, &b).unwrap());
            assert!((out.as_matrix() - &want).max_abs() <= 1e-10);
            assert!(is_product(&out, d, PRODUCT_TOL).unwrap());
            assert_eq!(ab_rank(&out, d).unwrap(), ab_rank(&product(&a, &b), d).unwrap());
        }
    }

    #[test]
    fn local_action_rejects_det() {
        let d = dims(2, 2);
        let g = ComplexMatrix::from_real_diag(&[2.0, 1.0]);
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(matches!(local_sl_act(&g, &ComplexMatrix::identity(2), &rho, d), Err(Error::DetNotOne(_))));
    }

    #[test]
    fn bell_under_squeeze() {
        let bell = PureBipartiteState::new(bell_vector(), dims(2, 2)).unwrap();
        let ga = ComplexMatrix::from_real_diag(&[2.0, 0.5]);
        let moved = local_sl_act_pure(&ga, &ComplexMatrix::identity(2), &bell).unwrap();
        let s = schmidt_rank(&moved, SCHMIDT_TOL);
        assert_eq!(s.rank, 2);
        assert!((s.coefficients[0] - 4.0 / 17f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn global_sl_changes_schmidt_rank() {
        let mut rng = rng_for(75, 0);
        for (a, b) in [(2, 2), (2, 3), (3, 3)] {
            let d = dims(a, b);
            let prod = PureBipartiteState::new(basis_vec(a * b, 0), d).unwrap();
            let g = random_sl(&mut rng, a * b, 0.7);
            let moved = PureBipartiteState::normalized(g.mat_vec(prod.psi()), d).unwrap();
            assert!(schmidt_rank(&moved, SCHMIDT_TOL).rank > 1);
        }
    }

    #[test]
    fn transporter_example() {
        let d = dims(2, 2);
        let from = HermitianMatrix::hermitian_part_of(&kron(
            &ComplexMatrix::from_real_diag(&[0.9, 0.1]),
            &ComplexMatrix::from_real_diag(&[1.0, 0.0]),
        ));
        let to = HermitianMatrix::hermitian_part_of(&kron(
            &ComplexMatrix::from_real_diag(&[0.5, 0.5]),
            &ComplexMatrix::from_real_diag(&[1.0, 0.0]),
        ));
        let (ga, gb) = product_transporter(&from, &to, d).unwrap();
        let want = sl_normalize(&ComplexMatrix::from_real_diag(&[(5.0f64 / 9.0).sqrt(), 5f64.sqrt()])).unwrap();
        assert!((&ga - &want).max_abs() < 1e-12);
        let out = local_sl_act(&ga, &gb, &DensityMatrix::new_unchecked(from), d).unwrap();
        assert!((out.as_matrix() - to.as_matrix()).max_abs() <= 1e-8);
    }

    #[test]
    fn transporter_identity_and_mismatch() {
        let d = dims(2, 2);
        let mut rng = rng_for(76, 0);
        let rho = product(&random_state(&mut rng, 2, 2), &random_state(&mut rng, 2, 2));
        let (ga, gb) = product_transporter(&rho, &rho, d).unwrap();
        assert!((&ga - &ComplexMatrix::identity(2)).max_abs() < 1e-10);
        assert!((&gb - &ComplexMatrix::identity(2)).max_abs() < 1e-10);
        let pure = product(&random_pure_state(&mut rng, 2), &random_state(&mut rng, 2, 2));
        assert!(matches!(product_transporter(&rho, &pure, d), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn transporter_rank_deficient_round_trip() {
        let d = dims(3, 3);
        let mut rng = rng_for(77, 0);
        for _ in 0..20 {
            let from = product(&random_state(&mut rng, 3, 2), &random_state(&mut rng, 3, 1));
            let to = product(&random_state(&mut rng, 3, 2), &random_state(&mut rng, 3, 1));
            let (ga, gb) = product_transporter(&from, &to, d).unwrap();
            let there = local_sl_act(&ga, &gb, &from, d).unwrap();
            assert!((there.as_matrix() - to.as_matrix()).max_abs() <= 1e-8);
            let (ha, hb) = product_transporter(&there, &from, d).unwrap();
            let back = local_sl_act(&ha, &hb, &there, d).unwrap();
            assert!((back.as_matrix() - from.as_matrix()).max_abs() <= 1e-8);
        }
    }

    #[test]
    fn ball_examples() {
        let d = dims(2, 2);
        let v = separable_ball_test(&DensityMatrix::maximally_mixed(4), d).unwrap();
        assert!(v.certified && v.full_rank);
        assert!((v.purity - 0.25).abs() < 1e-15);
        let bell = DensityMatrix::pure(&bell_vector()).unwrap();
        assert!(!separable_ball_test(&bell, d).unwrap().certified);
    }

    #[test]
    fn spectral_condition_examples() {
        assert!(absolutely_separable_2q(&[0.25; 4]).unwrap());
        assert!(absolutely_separable_2q(&[0.4, 0.3, 0.2, 0.1]).unwrap());
        assert!(!absolutely_separable_2q(&[1.0, 0.0, 0.0, 0.0]).unwrap());
        assert!(absolutely_separable_2q(&[0.5, 0.5]).is_err());
        let mut rng = rng_for(78, 0);
        for _ in 0..200 {
            let rho = state_with_spectrum(&mut rng, &[0.4, 0.3, 0.2, 0.1]);
            assert!(ppt_test(&rho, dims(2, 2)).unwrap().ppt);
        }
    }

    #[test]
    fn ppt_examples() {
        let d = dims(2, 2);
        let bell = HermitianMatrix::projector(&bell_vector());
        let v = ppt_test(&bell, d).unwrap();
        assert!(!v.ppt);
        assert!((v.min_eigenvalue + 0.5).abs() < 1e-12);
        let mut rng = rng_for(79, 0);
        let prod = product(&random_state(&mut rng, 2, 2), &random_state(&mut rng, 2, 2));
        assert!(ppt_test(&prod, d).unwrap().ppt);
        for p in [0.0, 0.2, 1.0 / 3.0 - 1e-8, 1.0 / 3.0 + 1e-8, 0.5, 1.0] {
            let v = ppt_test(&werner_state(p).unwrap(), d).unwrap();
            assert!((v.min_eigenvalue - (1.0 - 3.0 * p) / 4.0).abs() < 1e-12);
            assert_eq!(v.ppt, p <= 1.0 / 3.0);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn local_sl_keeps_schmidt_rank(seed in any::<u64>(), shape in 0usize..3, k in 1usize..4) {
                let (a, b) = [(2, 2), (2, 3), (3, 3)][shape];
                let mut rng = rng_for(seed, 0);
                let k = k.min(a.min(b));
                let sa = random_state(&mut rng, a, k);
                let mut psi = vec![ZERO; a * b];
                // Σ_i √λ_i |u_i⟩ ⊗ |i⟩ has Schmidt rank k
                let e = sa.eig().unwrap();
                for i in 0..k {
                    for r in 0..a {
                        psi[r * b + i] += e.vectors[(r, i)] * e.values[i].max(0.0).sqrt();
                    }
                }
                let state = PureBipartiteState::normalized(psi, dims(a, b)).unwrap();
                let before = schmidt_rank(&state, SCHMIDT_TOL).rank;
                let moved = local_sl_act_pure(&random_sl(&mut rng, a, 0.5), &random_sl(&mut rng, b, 0.5), &state).unwrap();
                prop_assert_eq!(before, k);
                prop_assert_eq!(schmidt_rank(&moved, SCHMIDT_TOL).rank, before);
            }

            #[test]
            fn product_implies_ppt(seed in any::<u64>()) {
                let mut rng = rng_for(seed, 0);
                let rho = product(&random_state(&mut rng, 2, 2), &random_state(&mut rng, 3, 3));
                prop_assert!(is_product(&rho, dims(2, 3), PRODUCT_TOL).unwrap());
                prop_assert!(ppt_test(&rho, dims(2, 3)).unwrap().ppt);
            }
        }
    }
}
