//! Numerical geometry of finite-level quantum state spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigensolver, `expm`,
//!   Kronecker products and partial traces.
//! - [`su_basis`]: orthonormal generalized Gell-Mann bases, structure
//!   constants and the coordinate chart on the trace-one hyperplane.
//! - [`state`]: density matrices, purity, rank, spectra and entropy.
//! - [`tensor_fields`]: the Poisson and Jordan tensors and the vector fields
//!   they generate.
//! - [`kahler`]: symplectic form, complex structure and metric on
//!   isospectral orbits, plus finite-difference Lie brackets.
//! - [`flows`]: RK4 integration and closed-form propagators.
//! - [`qubit`]: the explicit two-level calculus in Bloch coordinates.
//! - [`composite`]: bipartite rank, product structure and separability tests.
//! - [`selftest`]: the acceptance suite, shared by the CLI and the tests.
//! - [`cli`]: the `qgeom` command-line front end.

// Negated float comparisons reject NaN; index loops mirror the tensor notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod composite;
pub mod error;
pub mod flows;
pub mod kahler;
pub mod linalg;
pub mod par;
pub mod qubit;
pub mod sampling;
pub mod selftest;
pub mod state;
pub mod su_basis;
pub mod tensor_fields;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianMatrix, C64};
pub use state::DensityMatrix;
pub use su_basis::SuBasis;
