//! Alternating invariant functions.
//!
//! A function `f(x, y)` (`y > 0`) is an *alternating invariant* when
//! `Σ_{r=0}^{n−1} (−1)^r f(x + r·y, n·y) = f(x, y)` for every odd `n ≥ 1`.
//! The crate provides the concrete members (Euler polynomials, the
//! alternating Hurwitz zeta function `ζ_E`, the Gamma-type function `Γ̃`,
//! trigonometric and exponential families), the combinators that preserve
//! the property, the convolution operator, and a residual engine that
//! checks all of it numerically or exactly.

pub mod builtins;
pub mod combinators;
pub mod convolution;
mod dd;
pub mod error;
pub mod euler;
pub mod function;
pub mod gamma_tilde;
pub mod invariance;
pub mod poly;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod zeta;

pub use error::{Error, Result};
pub use function::{BivariateFn, DomainNote, Exclusion};
pub use invariance::{
    check_grid, check_invariance, invariance_residual, Grid, GridPoint, InvarianceEntry,
    InvarianceReport, Residual, SkippedPoint,
};
pub use num_complex::Complex64;
pub use num_rational::BigRational;
pub use scalar::Scalar;
