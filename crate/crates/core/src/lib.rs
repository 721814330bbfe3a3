//! Stein operators for products, powers, quotients and sums of independent
//! random variables.
//!
//! Operators live in the Weyl algebra generated by `M` (multiplication by `x`)
//! and `D` (differentiation) with `DM = MD + I`. The main entry points are:
//!
//! * [`operator`]: normal forms, Euler-operator polynomials and recognition of
//!   the two-group shape `L(theta) - b M^q K(theta)`;
//! * [`catalog`]: distributions, their operators, moments and Mellin transforms;
//! * [`constructors`]: operators for algebraic combinations;
//! * [`duality`]: density ODEs, Meijer G candidates and gamma-product algebra;
//! * [`verify`]: moment residuals, moment recurrences and minimality searches.
//!
//! The operator algebra is generic over [`Scalar`]; everything that needs
//! exact answers is instantiated at [`Rational`].

pub mod catalog;
pub mod constructors;
pub mod duality;
pub mod error;
pub mod operator;
pub mod precision;
pub mod scalar;
pub mod verify;

pub use error::{Result, SteinError};
pub use operator::{AssumptionOneForm, EulerPoly, ExpandedOp};
pub use scalar::{Rational, Scalar};

/// Exact operator.
pub type RationalOp = ExpandedOp<Rational>;
/// Exact polynomial in `theta`.
pub type RationalEuler = EulerPoly<Rational>;
/// Exact two-group form.
pub type RationalForm = AssumptionOneForm<Rational>;
/// Floating-point operator, for quick numerical experiments.
pub type F64Op = ExpandedOp<f64>;
/// Floating-point polynomial in `theta`.
pub type F64Euler = EulerPoly<f64>;
