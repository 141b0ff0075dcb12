//! Cayley's first hyperdeterminant over dense complex hypermatrices, and its
//! modulus (and squared modulus) as entanglement measures on `2n`-qudit states.
//!
//! The crate is organised bottom-up:
//!
//! - [`hypermatrix`]: dense row-major storage plus the Frobenius norm,
//!   axis permutation (π-transpose), outer product and multilinear matrix
//!   multiplication.
//! - [`hyperdet`]: signed permutation enumeration and the two permutation-sum
//!   evaluations of the hyperdeterminant (the full sum and the even-order
//!   reduced sum).
//! - [`qstate`]: pure qudit states, their hypermatrix view and the measures
//!   `|hdet|`, `|hdet|²`, plus the qubit concurrence identities.
//! - [`locc`]: two-outcome local POVMs, post-measurement states, monotonicity
//!   trials and the scalar inequality behind them.
//! - [`convexroof`]: density matrices, ensemble steering and an upper-bound
//!   estimator for the convex-roof extensions.
//!
//! Index conventions: multi-indices are 0-based and laid out last-index-fastest.
//! Documentation numbers axes from 1 where it reads more naturally.

#![forbid(unsafe_code)]
// `!(x <= tol)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convexroof;
mod error;
pub mod hyperdet;
pub mod hypermatrix;
pub mod linalg;
pub mod locc;
pub mod qstate;
pub mod random;

pub use error::{Error, Result};
pub use hyperdet::{hdet, hdet_even, hdet_naive, HdetBudget, HdetPlan, SignedPermutation};
pub use hypermatrix::{Hypermatrix, Shape};
pub use linalg::CMatrix;
pub use num_complex::Complex64;
pub use qstate::{MeasureKind, MeasureValue, PureState};
