//! Numerical radius of complex matrices and a verified catalogue of
//! numerical-radius inequalities.
//!
//! * [`linalg`]: dense complex matrices, a Jacobi Hermitian eigensolver and
//!   functional calculus for PSD matrices.
//! * [`numrange`]: the numerical radius `ω(T)` and the numerical range
//!   boundary.
//! * [`chains`]: Schwarz-type inequality chains on vectors and operators.
//! * [`bounds`]: the bound registry and its evaluator.
//! * [`harness`]: random ensembles and whole-catalogue verification.

pub mod bounds;
pub mod chains;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod numrange;

pub use bounds::{evaluate_bound, list_bounds, solve_implicit, BoundResult, BoundSpec, Evaluator};
pub use chains::{BoundParams, ChainResult};
pub use error::{Error, Result};
pub use harness::{run_suite, sample_matrix, EnsembleKind, EnsembleSpec, SuiteReport};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use numrange::{numerical_radius, omega, RadiusResult};
