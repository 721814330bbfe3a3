//! Operators for products, powers, quotients, shifts, scalings and iid sums.
//!
//! Two-group forms `L(theta) - b M^q K(theta)` are kept as polynomials in
//! `theta` rather than lists of `T` factors, so constant factors and
//! identity factors need no special treatment.

mod build;

use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Result, SteinError};
use crate::scalar::{binom, fmt_rational, int, pow_i, Rational};
use crate::{AssumptionOneForm, EulerPoly, ExpandedOp};

pub use build::{build_for_expression, ConstructionTrace, Rule, Step};

type Op = ExpandedOp<Rational>;
type Poly = EulerPoly<Rational>;
type Form = AssumptionOneForm<Rational>;

/// `T_a` with a finite parameter, or the identity that stands in for the
/// limit `T_a / a -> I` as `a -> infinity`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TFactor {
    Finite(Rational),
    Identity,
}

impl TFactor {
    /// `T_{a + shift}`; the identity stays the identity.
    pub fn op(&self, shift: i64) -> Op {
        match self {
            Self::Finite(a) => Op::t(a + int(shift)),
            Self::Identity => Op::identity(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Self::Finite(a) => json!(fmt_rational(a)),
            Self::Identity => json!("inf"),
        }
    }
}

impl fmt::Display for TFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(a) => write!(f, "{}", fmt_rational(a)),
            Self::Identity => write!(f, "inf"),
        }
    }
}

/// Same variable written at power level `k q`:
/// `prod_j L(theta + j q) - b^k M^(k q) prod_j K(theta + j q)`.
pub fn raise_power_level(a: &Form, k: u32) -> Result<Form> {
    if k == 0 {
        return Err(SteinError::InvalidParameter(
            "power level factor must be positive".into(),
        ));
    }
    let q = a.q();
    let lift = |p: &Poly| (0..k).fold(Poly::one(), |acc, j| acc * p.shift(&int(i64::from(j * q))));
    Form::new(lift(a.l()), pow_i(a.b(), i64::from(k)), k * q, lift(a.k()))
}

/// Operator for `XY` with `X`, `Y` independent: both sides are raised to
/// the least common power level `m`, then `L_X L_Y - b_X b_Y M^m K_X K_Y`.
pub fn product_operator(x: &Form, y: &Form) -> Result<Form> {
    let m = x.q().lcm(&y.q());
    let x = raise_power_level(x, m / x.q())?;
    let y = raise_power_level(y, m / y.q())?;
    Form::new(
        x.l().clone() * y.l().clone(),
        x.b() * y.b(),
        m,
        x.k().clone() * y.k().clone(),
    )
}

/// Operator for `X^gamma`: `L(gamma theta) - b M^(q/gamma) K(gamma theta)`.
/// Requires `q / gamma` to be a positive integer; see [`power_operator_raised`]
/// for the version that raises the level first when it is not.
pub fn power_operator(a: &Form, gamma: &Rational) -> Result<Form> {
    if !gamma.is_positive() {
        return Err(SteinError::Unsupported(format!(
            "power {} needs an inverse first",
            fmt_rational(gamma)
        )));
    }
    let qg = Rational::from_integer(a.q().into()) / gamma;
    if !qg.is_integer() {
        return Err(SteinError::Unsupported(format!(
            "q/gamma = {} is not an integer",
            fmt_rational(&qg)
        )));
    }
    let new_q: u32 = qg
        .to_integer()
        .try_into()
        .map_err(|_| SteinError::Unsupported("power level out of range".into()))?;
    let zero = Rational::zero();
    Form::new(
        a.l().substitute_affine(gamma, &zero),
        a.b().clone(),
        new_q,
        a.k().substitute_affine(gamma, &zero),
    )
}

/// Smallest `k` with `k q / gamma` a positive integer, for `gamma > 0`.
pub fn level_for_power(q: u32, gamma: &Rational) -> u32 {
    let (u, v) = (gamma.numer().clone(), gamma.denom().clone());
    let qv = v * num_bigint::BigInt::from(q);
    let k = &u / u.gcd(&qv);
    k.try_into().unwrap_or(u32::MAX)
}

/// [`power_operator`] after raising the power level just enough for
/// `q / gamma` to be an integer. Returns the level factor used.
pub fn power_operator_raised(a: &Form, gamma: &Rational) -> Result<(Form, u32)> {
    if !gamma.is_positive() {
        return power_operator(a, gamma).map(|f| (f, 1));
    }
    let k = level_for_power(a.q(), gamma);
    let raised = if k == 1 {
        a.clone()
    } else {
        raise_power_level(a, k)?
    };
    Ok((power_operator(&raised, gamma)?, k))
}

/// Operator for `1/X`, assuming `X != 0` almost surely:
/// `(-1)^m (b K(-theta - q) - M^q L(-theta - q))` with `m = deg K`.
pub fn inverse_operator(a: &Form) -> Result<Form> {
    let q = int(i64::from(a.q()));
    let refl = |p: &Poly| p.substitute_affine(&int(-1), &-q.clone());
    let sign = if a.m().is_multiple_of(2) {
        int(1)
    } else {
        int(-1)
    };
    Form::new(
        refl(a.k()).scale(&(a.b() * &sign)),
        int(1),
        a.q(),
        refl(a.l()).scale(&sign),
    )
}

/// Operator for `c X`: `b` becomes `b c^(-q)`.
pub fn scale_form(a: &Form, c: &Rational) -> Result<Form> {
    if c.is_zero() {
        return Err(SteinError::InvalidParameter("scale by 0".into()));
    }
    Form::new(
        a.l().clone(),
        a.b() * pow_i(c, -i64::from(a.q())),
        a.q(),
        a.k().clone(),
    )
}

/// Operator for `X + mu`: every `M` becomes `M - mu`.
pub fn translate(a: &Op, mu: &Rational) -> Op {
    let mut out = Op::zero();
    for (&(i, j), c) in a.terms() {
        for l in 0..=j {
            let coef = c
                * Rational::from_integer(binom(j.into(), l.into()))
                * pow_i(&-mu.clone(), i64::from(j - l));
            out.add_term(i, l, coef);
        }
    }
    out
}

/// Operator for the sum of `n` iid copies, for operators whose coefficients
/// are affine in `x`: each constant part is multiplied by `n`.
pub fn sum_iid_operator(a: &Op, n: u32) -> Result<Op> {
    if n == 0 {
        return Err(SteinError::InvalidParameter("sum of 0 copies".into()));
    }
    if a.m_degree().unwrap_or(0) > 1 {
        return Err(SteinError::Unsupported(format!(
            "iid sums need coefficients affine in x, got M-degree {}",
            a.m_degree().unwrap_or(0)
        )));
    }
    let n = int(i64::from(n));
    Ok(Op::from_terms(a.terms().map(|(&(i, j), c)| {
        (i, j, if j == 0 { c * &n } else { c.clone() })
    })))
}

/// Weak operator for `XY` with `X`, `Y` iid and both annihilated in
/// expectation by `M - alpha T_a - beta T_b D`:
///
/// `(M - alpha^2 T_a^2 - beta^2 T_b^2 T_1 D)(T_{a-1} - beta T_b T_{a+1} D)
///   - 2 alpha^2 beta T_a^2 T_b T_{a+1} D`,
///
/// returned normalized.
pub fn iid_pair_operator(
    alpha: &Rational,
    beta: &Rational,
    a: &TFactor,
    b: &TFactor,
) -> Result<Op> {
    if alpha.is_zero() && beta.is_zero() {
        return Err(SteinError::Degenerate("alpha = beta = 0".into()));
    }
    let (a2, b2) = (alpha * alpha, beta * beta);
    let ta = a.op(0);
    let tb = b.op(0);
    let first =
        Op::m() - (&ta * &ta).scale(&a2) - (&(&tb * &tb) * &(Op::t(int(1)) * Op::d())).scale(&b2);
    let second = a.op(-1) - (&(&tb * &a.op(1)) * &Op::d()).scale(beta);
    let tail = (&(&(&ta * &ta) * &tb) * &(a.op(1) * Op::d())).scale(&(a2 * beta * int(2)));
    let out = first * second - tail;
    if out.is_zero() {
        return Err(SteinError::Degenerate("operator vanishes".into()));
    }
    Ok(out.normalized())
}

/// Fourth-order operator for `XY` with `X ~ N(mu_x, 1)` and `Y ~ N(mu_y, 1)`
/// independent, normalized:
///
/// `M D^4 + D^3 - (2M + mu_x mu_y) D^2 - (1 + mu_x^2 + mu_y^2) D + M - mu_x mu_y`.
pub fn noncentered_normal_product(mu_x: &Rational, mu_y: &Rational) -> Op {
    let p = mu_x * mu_y;
    let s = int(1) + mu_x * mu_x + mu_y * mu_y;
    Op::from_terms([
        (4, 1, int(1)),
        (3, 0, int(1)),
        (2, 1, int(-2)),
        (2, 0, -p.clone()),
        (1, 0, -s),
        (0, 1, int(1)),
        (0, 0, -p),
    ])
}

/// `T_{r+mu} - mu D - M`, the operator of `X + mu` for `X ~ Gamma(r, 1)`.
pub fn shifted_gamma_operator(r: &Rational, mu: &Rational) -> Result<Op> {
    if !r.is_positive() {
        return Err(SteinError::InvalidParameter(
            "Gamma shape must be positive".into(),
        ));
    }
    Ok((Op::t(r + mu) - Op::d().scale(mu) - Op::m()).normalized())
}

/// Cancels the common factor `g = gcd(L, K)`: the result `R` satisfies
/// `a = R ∘ g(theta)`. Returns `R` and the monic `g` (which is `1` when
/// nothing cancels).
pub fn reduce_shared_factors(a: &Form) -> Result<(Form, Poly)> {
    let g = a.l().gcd(a.k());
    if g.deg0() == 0 {
        return Ok((a.clone(), Poly::one()));
    }
    let (l, rl) = a.l().div_rem(&g);
    let (k, rk) = a.k().div_rem(&g);
    debug_assert!(rl.is_zero() && rk.is_zero());
    Ok((Form::new(l, a.b().clone(), a.q(), k)?, g))
}
