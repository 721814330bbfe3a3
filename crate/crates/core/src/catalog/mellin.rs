//! Mellin transforms `s -> E |Z|^(s-1)` as gamma products.

use num_traits::{Signed, Zero};

use crate::catalog::{AtomKind, DistExpr};
use crate::duality::{Affine, GammaProductExpr as G};
use crate::error::{Result, SteinError};
use crate::scalar::{int, rat, Rational};

/// `Gamma(a s + b)`.
fn gam(a: Rational, b: Rational) -> G {
    G::gamma(Affine::new(a, b))
}

/// `Gamma(b)`, a constant factor.
fn gam_c(b: Rational) -> G {
    G::gamma(Affine::constant(b))
}

/// `c^(a s + b)`.
fn pw(c: &Rational, a: Rational, b: Rational) -> G {
    G::power(c, Affine::new(a, b))
}

fn atom_mellin(a: &AtomKind) -> Result<G> {
    a.validate()?;
    let one = int(1);
    let half = rat(1, 2);
    Ok(match a {
        AtomKind::Gamma { r, lambda } => gamma_mellin(r, lambda),
        AtomKind::Exponential { lambda } => gamma_mellin(&one, lambda),
        AtomKind::ChiSq { d } => gamma_mellin(&(d / int(2)), &half),
        AtomKind::Beta { a, b } => gam(one.clone(), a - &one)
            .mul(&gam_c(a + b))
            .div(&gam_c(a.clone()))
            .div(&gam(one.clone(), a + b - &one)),
        AtomKind::InverseGamma { alpha, beta } => pw(beta, one.clone(), -one.clone())
            .mul(&gam(-one.clone(), alpha + &one))
            .div(&gam_c(alpha.clone())),
        AtomKind::FDist { d1, d2 } => {
            let (h1, h2) = (d1 / int(2), d2 / int(2));
            pw(&(d2 / d1), one.clone(), -one.clone())
                .mul(&gam(one.clone(), &h1 - &one))
                .mul(&gam(-one.clone(), &h2 + &one))
                .div(&gam_c(h1))
                .div(&gam_c(h2))
        }
        AtomKind::Prr { s } => {
            // (2s)^((s'-1)/2) Gamma((s'+1)/2) Gamma(s) Gamma(s'/2) / (Gamma(s + (s'-1)/2) Gamma(1/2))
            pw(&(s * int(2)), half.clone(), -half.clone())
                .mul(&gam(half.clone(), half.clone()))
                .mul(&gam_c(s.clone()))
                .mul(&gam(half.clone(), int(0)))
                .div(&gam(half.clone(), s - &half))
                .div(&gam_c(half.clone()))
        }
        AtomKind::GenGamma { r, lambda, q } => pw(lambda, -one.clone(), one.clone())
            .mul(&gam(int(1) / q, (r - &one) / q))
            .div(&gam_c(r / q)),
        AtomKind::Normal { mu, sigma2 } if mu.is_zero() => normal_mellin(sigma2),
        AtomKind::StudentT { nu } => pw(nu, half.clone(), -half.clone())
            .mul(&gam(half.clone(), int(0)))
            .mul(&gam(-half.clone(), (nu + &one) / int(2)))
            .div(&gam_c(half.clone()))
            .div(&gam_c(nu / int(2))),
        AtomKind::VgSym { r, sigma } => vg_mellin(r, sigma),
        AtomKind::Vg { r, theta, sigma } if theta.is_zero() => vg_mellin(r, sigma),
        AtomKind::Normal { .. } | AtomKind::Vg { .. } => {
            return Err(SteinError::UnsupportedExpression(format!(
                "{a} is neither positive nor symmetric about 0"
            )))
        }
    })
}

fn gamma_mellin(r: &Rational, lambda: &Rational) -> G {
    pw(lambda, int(-1), int(1))
        .mul(&gam(int(1), r - int(1)))
        .div(&gam_c(r.clone()))
}

/// `pi^(-1/2) 2^((s-1)/2) (sigma^2)^((s-1)/2) Gamma(s/2)`.
fn normal_mellin(sigma2: &Rational) -> G {
    let half = rat(1, 2);
    G::pi_pow(-half.clone())
        .mul(&pw(&int(2), half.clone(), -half.clone()))
        .mul(&pw(sigma2, half.clone(), -half.clone()))
        .mul(&gam(half, int(0)))
}

/// `sigma sqrt(V) N` with `V ~ Gamma(r/2, 1/2)`.
fn vg_mellin(r: &Rational, sigma: &Rational) -> G {
    let half = rat(1, 2);
    normal_mellin(&int(1))
        .mul(&pw(sigma, int(1), int(-1)))
        .mul(&pw(&int(2), half.clone(), -half.clone()))
        .mul(&gam(half.clone(), (r - int(1)) / int(2)))
        .div(&gam_c(r / int(2)))
}

/// Mellin transform `E |Z|^(s-1)` of an expression over positive or
/// symmetric atoms, in canonical form.
pub fn mellin(e: &DistExpr) -> Result<G> {
    Ok(mellin_raw(e)?.canonical())
}

fn mellin_raw(e: &DistExpr) -> Result<G> {
    match e {
        DistExpr::Atom(a) => atom_mellin(a),
        DistExpr::Product(fs) => fs
            .iter()
            .try_fold(G::one(), |acc, f| Ok(acc.mul(&mellin_raw(f)?))),
        // E|X^g|^(s-1) = M_X(g (s - 1) + 1)
        DistExpr::Power(b, g) => Ok(mellin_raw(b)?.substitute(g, &(int(1) - g))),
        DistExpr::Scale(b, c) => Ok(pw(&c.abs(), int(1), int(-1)).mul(&mellin_raw(b)?)),
        DistExpr::Shift(b, mu) if mu.is_zero() => mellin_raw(b),
        DistExpr::Shift(..) | DistExpr::SumIid(..) => Err(SteinError::UnsupportedExpression(
            format!("no gamma-product Mellin transform for {e}"),
        )),
    }
}
