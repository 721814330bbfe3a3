//! Density ODEs, Meijer G candidates and gamma-product Mellin algebra.

mod gamma_expr;
mod meijer;
mod ode;

pub use gamma_expr::{
    default_probes, gamma_expr_equal, Affine, Equality, GammaComparison, GammaProductExpr,
    LOG_REL_TOL,
};
pub use meijer::{
    g_identities, g_mellin, gparams_from_ode, gparams_to_ode, mellin_validity, normalize_mellin,
    GIdentity, GParams, OrderChoice,
};
pub use ode::{dual_ode, dual_of_ode, DensityODE};
