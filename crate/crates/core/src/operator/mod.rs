//! Operator algebra in `M` (multiplication by `x`) and `D` (differentiation).

mod assumption;
mod euler;
mod expanded;
pub mod word;

pub use assumption::{detect_assumption1, AssumptionOneForm, Detected};
pub use euler::{falling_theta, EulerPoly, Factored};
pub use expanded::ExpandedOp;
