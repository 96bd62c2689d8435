//! Quasi-entropies, monotone metrics and skew informations on finite-dimensional
//! density matrices.
//!
//! The crate is layered bottom-up: [`linalg`] holds the validated matrix types and the
//! spectral calculus, [`stdfun`] the scalar function catalog, [`quantities`] the
//! entropies, covariances and metrics, [`channels`] Kraus maps and the monotonicity and
//! concavity margins, and [`verify`] the finite-difference checks and property suites.
//! [`cli`] wires everything to the `qig` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod quantities;
pub mod stdfun;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, HermitianMatrix, C64};
pub use stdfun::ScalarFunctionSpec;
