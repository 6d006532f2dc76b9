//! Seeded random matrices, states and group elements.
//!
//! Every Monte Carlo sweep derives an independent ChaCha stream per task from
//! `(seed, stream, index)`, so results do not depend on how tasks are
//! scheduled across threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{expm, ComplexMatrix, HermitianMatrix, C64};
use crate::state::DensityMatrix;

pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed with stream and task identifiers into a fresh 64-bit seed.
pub fn task_seed(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index)
}

pub fn rng_for(seed: u64, stream: u64) -> SimRng {
    SimRng::seed_from_u64(task_seed(seed, stream, 0))
}

pub fn rng_for_task(seed: u64, stream: u64, index: u64) -> SimRng {
    SimRng::seed_from_u64(task_seed(seed, stream, index))
}

pub fn gaussian(rng: &mut SimRng) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Gaussian with unit variance per component.
pub fn complex_gaussian(rng: &mut SimRng) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

pub fn random_complex(rng: &mut SimRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Random Hermitian matrix with Frobenius norm `scale`.
pub fn random_hermitian(rng: &mut SimRng, n: usize, scale: f64) -> HermitianMatrix {
    let h = HermitianMatrix::hermitian_part_of(&random_complex(rng, n, n));
    let norm = h.frobenius_norm();
    if norm == 0.0 {
        return h;
    }
    h.scale(scale / norm)
}

/// Random traceless Hermitian matrix with Frobenius norm `scale`.
pub fn random_traceless_hermitian(rng: &mut SimRng, n: usize, scale: f64) -> HermitianMatrix {
    let h = HermitianMatrix::hermitian_part_of(&random_complex(rng, n, n));
    let shift = h.trace_re() / n as f64;
    let h = h.sub(&HermitianMatrix::identity(n).scale(shift));
    let norm = h.frobenius_norm();
    h.scale(scale / norm)
}

pub fn random_unit_vector(rng: &mut SimRng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Haar-distributed unitary via Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary(rng: &mut SimRng, n: usize) -> ComplexMatrix {
    let g = random_complex(rng, n, n);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for c in 0..n {
        let mut v = g.column(c);
        // two passes keep the basis orthonormal to roundoff
        for _ in 0..2 {
            for q in &cols {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(n, n, |r, c| cols[c][r])
}

/// Random state of rank `k`: G G† / Tr with G an n×k complex Gaussian.
pub fn random_state(rng: &mut SimRng, n: usize, k: usize) -> DensityMatrix {
    assert!(k >= 1 && k <= n, "rank {k} out of range for n = {n}");
    let g = random_complex(rng, n, k);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new_unchecked(HermitianMatrix::hermitian_part_of(&m.scale(1.0 / tr)))
}

pub fn random_pure_state(rng: &mut SimRng, n: usize) -> DensityMatrix {
    let psi = random_unit_vector(rng, n);
    DensityMatrix::new_unchecked(HermitianMatrix::projector(&psi))
}

/// Full-rank state whose eigenvalues are pairwise separated by at least `gap`.
pub fn random_nondegenerate_state(rng: &mut SimRng, n: usize, gap: f64) -> DensityMatrix {
    assert!(gap * (n * n) as f64 <= 1.0, "gap {gap} too large for n = {n}");
    loop {
        let mut p: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        p.sort_by(|a, b| b.total_cmp(a));
        if p.windows(2).all(|w| w[0] - w[1] >= gap) && p[n - 1] > gap * 0.5 {
            return state_with_spectrum(rng, &p);
        }
    }
}

/// Random unitary conjugate of diag(spectrum).
pub fn state_with_spectrum(rng: &mut SimRng, spectrum: &[f64]) -> DensityMatrix {
    let u = random_unitary(rng, spectrum.len());
    DensityMatrix::new_unchecked(HermitianMatrix::from_real_diag(spectrum).conjugate_by(&u))
}

/// Element of SL(n, C): exponential of a random traceless complex matrix
/// with Frobenius norm `scale`. The determinant is exactly 1 in exact
/// arithmetic.
pub fn random_sl(rng: &mut SimRng, n: usize, scale: f64) -> ComplexMatrix {
    let mut x = random_complex(rng, n, n);
    let shift = x.trace() / n as f64;
    for i in 0..n {
        x[(i, i)] -= shift;
    }
    let norm = x.frobenius_norm();
    let x = x.scale(scale / norm);
    expm(&x).expect("square input")
}
