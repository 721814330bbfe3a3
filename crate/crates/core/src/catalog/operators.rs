//! Stein operators of catalog atoms, and the Pearson and score constructions.

use std::fmt;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::catalog::AtomKind;
use crate::error::{Result, SteinError};
use crate::operator::{detect_assumption1, Detected};
use crate::scalar::{int, pow_i, rat, Rational};
use crate::{AssumptionOneForm, EulerPoly, ExpandedOp};

type Op = ExpandedOp<Rational>;
type Poly = EulerPoly<Rational>;

/// An operator in two-group form when the table entry has that shape,
/// otherwise the plain expanded operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SteinOperator {
    Form(AssumptionOneForm<Rational>),
    Expanded(Op),
}

impl SteinOperator {
    pub fn expand(&self) -> Op {
        match self {
            Self::Form(f) => f.expand(),
            Self::Expanded(op) => op.clone(),
        }
    }

    pub fn form(&self) -> Option<&AssumptionOneForm<Rational>> {
        match self {
            Self::Form(f) => Some(f),
            Self::Expanded(_) => None,
        }
    }
}

impl fmt::Display for SteinOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Form(form) => write!(f, "{}", form.factored_text()),
            Self::Expanded(op) => write!(f, "{op}"),
        }
    }
}

fn form(l: Poly, b: Rational, q: u32, k: Poly) -> SteinOperator {
    SteinOperator::Form(
        AssumptionOneForm::new(l, b, q, k).expect("table operators are nondegenerate"),
    )
}

/// The operator listed for `a` in the distribution table.
pub fn stein_operator(a: &AtomKind) -> Result<SteinOperator> {
    a.validate()?;
    let t = |r: Rational| Poly::t(r);
    Ok(match a {
        AtomKind::Normal { mu, sigma2 } if mu.is_zero() => {
            form(t(int(1)).scale(sigma2), int(1), 2, Poly::one())
        }
        AtomKind::Normal { mu, sigma2 } => SteinOperator::Expanded(
            Op::t(int(1)).scale(sigma2) + Op::m().scale(mu) - Op::m().pow(2),
        ),
        AtomKind::Gamma { r, lambda } => form(t(r.clone()), lambda.clone(), 1, Poly::one()),
        AtomKind::Exponential { lambda } => form(t(int(1)), lambda.clone(), 1, Poly::one()),
        AtomKind::ChiSq { d } => form(t(d / int(2)), rat(1, 2), 1, Poly::one()),
        AtomKind::Beta { a, b } => form(t(a.clone()), int(1), 1, t(a + b)),
        AtomKind::StudentT { nu } => form(t(int(1)).scale(nu), int(-1), 2, t(int(2) - nu)),
        AtomKind::InverseGamma { alpha, beta } => {
            form(Poly::constant(beta.clone()), int(-1), 1, t(int(1) - alpha))
        }
        AtomKind::FDist { d1, d2 } => form(
            t(d1 / int(2)).scale(d2),
            -d1.clone(),
            1,
            t(int(1) - d2 / int(2)),
        ),
        AtomKind::Prr { s } => form((t(int(1)) * t(int(2))).scale(s), int(1), 2, t(s * int(2))),
        AtomKind::VgSym { r, sigma } => form(
            (t(int(1)) * t(r.clone())).scale(&(sigma * sigma)),
            int(1),
            2,
            Poly::one(),
        ),
        AtomKind::Vg { r, theta, sigma } if theta.is_zero() => form(
            (t(int(1)) * t(r.clone())).scale(&(sigma * sigma)),
            int(1),
            2,
            Poly::one(),
        ),
        AtomKind::Vg { r, theta, sigma } => {
            // sigma^2 T_1 T_r + 2 theta M T_{r/2+1} - M^2
            let s2 = sigma * sigma;
            SteinOperator::Expanded(
                (Op::t(int(1)) * Op::t(r.clone())).scale(&s2)
                    + (Op::m() * Op::t(r / int(2) + int(1))).scale(&(theta * int(2)))
                    - Op::m().pow(2),
            )
        }
        AtomKind::GenGamma { r, lambda, q } => {
            let qi = q
                .to_integer()
                .try_into()
                .map_err(|_| SteinError::InvalidParameter("GenGamma: q too large".into()))?;
            let qi: u32 = qi;
            form(t(r.clone()), q * pow_i(lambda, qi as i64), qi, Poly::one())
        }
    })
}

/// Operator from a Pearson score `-(a x - l) / (d2 x^2 + d1 x + d0)`.
///
/// With `P(x) = d2 x^2 + d1 x + d0` the operator `f -> P f' + (P' - a x + l) f`
/// has mean zero. When `d0 != 0` it is composed with `M` on the right so that
/// the result is a polynomial in `M` and `theta`.
pub fn pearson_operator(
    a: &Rational,
    l: &Rational,
    d0: &Rational,
    d1: &Rational,
    d2: &Rational,
) -> Result<Op> {
    if d0.is_zero() && d1.is_zero() && d2.is_zero() {
        return Err(SteinError::InvalidParameter(
            "Pearson denominator is identically zero".into(),
        ));
    }
    let den = Op::from_terms([(0, 0, d0.clone()), (0, 1, d1.clone()), (0, 2, d2.clone())]);
    let lin = Op::from_terms([(0, 1, d2 * int(2) - a), (0, 0, d1 + l)]);
    let base = den * Op::d() + lin;
    Ok(if d0.is_zero() { base } else { base * Op::m() })
}

/// Result of [`score_operator`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreOperator {
    /// `D den(M) + num(M)`.
    pub op: Op,
    /// Two-group form, when the operator has exactly two degree offsets.
    pub detected: Option<Detected<Rational>>,
}

impl ScoreOperator {
    pub fn to_json(&self) -> Value {
        json!({
            "operator": self.op.to_string(),
            "assumption1": self.detected.as_ref().map(|d| json!({
                "form": d.form.factored_text(),
                "right_shift": d.right_shift,
            })),
        })
    }
}

/// Operator `D den(M) + num(M)` from a rational score `p'/p = num/den`.
/// Coefficient lists are in ascending powers of `x`.
pub fn score_operator(num: &[Rational], den: &[Rational]) -> Result<ScoreOperator> {
    if den.iter().all(Zero::is_zero) {
        return Err(SteinError::InvalidParameter(
            "score denominator is zero".into(),
        ));
    }
    let poly = |cs: &[Rational]| {
        Op::from_terms(cs.iter().enumerate().map(|(j, c)| (0, j as u32, c.clone())))
    };
    let op = Op::d() * poly(den) + poly(num);
    let detected = detect_assumption1(&op).ok();
    Ok(ScoreOperator { op, detected })
}
