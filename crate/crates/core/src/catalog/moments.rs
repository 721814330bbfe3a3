//! Moment oracles.
//!
//! Positive atoms have moments `E X^e` of the form
//! `prod c^e * prod Gamma(u) / prod Gamma(v)` for real `e`; these are
//! evaluated exactly whenever gamma arguments pair off at integer distances,
//! and in extended precision otherwise. Symmetric and shifted laws only get
//! integer moments.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::catalog::{AtomKind, DistExpr, Support};
use crate::error::{Result, SteinError};
use crate::precision::{self, BigFloat, Precision};
use crate::scalar::{binom, exact_root, fmt_rational, int, pow_i, rat, rising, Rational};

/// A moment: an exact rational, an extended-precision value, or divergence.
#[derive(Clone, Debug, PartialEq)]
pub enum MomentValue {
    Exact(Rational),
    Approx(BigFloat),
    DoesNotExist,
}

impl MomentValue {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Self::Exact(q) => Some(q),
            _ => None,
        }
    }

    pub fn exists(&self) -> bool {
        !matches!(self, Self::DoesNotExist)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Exact(q) => q.is_zero(),
            Self::Approx(x) => x.is_zero(),
            Self::DoesNotExist => false,
        }
    }

    fn as_float(&self, p: Precision) -> Option<BigFloat> {
        match self {
            Self::Exact(q) => Some(BigFloat::from_rational(q, p)),
            Self::Approx(x) => Some(x.clone()),
            Self::DoesNotExist => None,
        }
    }

    pub fn mul(&self, o: &Self, p: Precision) -> Self {
        match (self, o) {
            (Self::DoesNotExist, _) | (_, Self::DoesNotExist) => Self::DoesNotExist,
            (Self::Exact(a), Self::Exact(b)) => Self::Exact(a * b),
            _ => Self::Approx(self.as_float(p).unwrap().mul(&o.as_float(p).unwrap(), p)),
        }
    }

    pub fn add(&self, o: &Self, p: Precision) -> Self {
        match (self, o) {
            (Self::DoesNotExist, _) | (_, Self::DoesNotExist) => Self::DoesNotExist,
            (Self::Exact(a), Self::Exact(b)) => Self::Exact(a + b),
            _ => Self::Approx(self.as_float(p).unwrap().add(&o.as_float(p).unwrap(), p)),
        }
    }

    pub fn scale(&self, c: &Rational, p: Precision) -> Self {
        self.mul(&Self::Exact(c.clone()), p)
    }

    pub fn to_json(&self) -> Value {
        match self {
            Self::Exact(q) => json!({ "exact": fmt_rational(q) }),
            Self::Approx(x) => json!({ "approx": x.to_sci(30) }),
            Self::DoesNotExist => json!({ "exists": false }),
        }
    }
}

impl fmt::Display for MomentValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact(q) => write!(f, "{}", fmt_rational(q)),
            Self::Approx(x) => write!(f, "~{}", x.to_sci(30)),
            Self::DoesNotExist => write!(f, "does not exist"),
        }
    }
}

/// Anything that can answer `E Z^k` for integer `k >= 0`.
pub trait MomentOracle {
    fn moment(&self, k: u64) -> Result<MomentValue>;
}

impl MomentOracle for DistExpr {
    fn moment(&self, k: u64) -> Result<MomentValue> {
        moments(self, k)
    }
}

/// An explicit table `mu_0, mu_1, ...`.
impl MomentOracle for [Rational] {
    fn moment(&self, k: u64) -> Result<MomentValue> {
        self.get(k as usize)
            .map(|q| MomentValue::Exact(q.clone()))
            .ok_or(SteinError::MomentUnavailable(k as i64))
    }
}

impl MomentOracle for Vec<Rational> {
    fn moment(&self, k: u64) -> Result<MomentValue> {
        self.as_slice().moment(k)
    }
}

/// Caches the moments of an expression.
pub struct CachedOracle<'a> {
    expr: &'a DistExpr,
    cache: std::cell::RefCell<HashMap<u64, MomentValue>>,
}

impl<'a> CachedOracle<'a> {
    pub fn new(expr: &'a DistExpr) -> Self {
        Self {
            expr,
            cache: Default::default(),
        }
    }
}

impl MomentOracle for CachedOracle<'_> {
    fn moment(&self, k: u64) -> Result<MomentValue> {
        if let Some(v) = self.cache.borrow().get(&k) {
            return Ok(v.clone());
        }
        let v = moments(self.expr, k)?;
        self.cache.borrow_mut().insert(k, v.clone());
        Ok(v)
    }
}

/// `E Z^k`.
pub fn moments(e: &DistExpr, k: u64) -> Result<MomentValue> {
    raw_moment(
        e,
        &Rational::from_integer(BigInt::from(k)),
        Precision::default(),
    )
}

/// `E Z^e` for a rational exponent, where that makes sense for `e`.
pub fn raw_moment(e: &DistExpr, ex: &Rational, p: Precision) -> Result<MomentValue> {
    if ex.is_zero() {
        return Ok(MomentValue::Exact(int(1)));
    }
    match e {
        DistExpr::Atom(a) => atom_moment(a, ex, p),
        DistExpr::Product(fs) => {
            let mut acc = MomentValue::Exact(int(1));
            for f in fs {
                acc = acc.mul(&raw_moment(f, ex, p)?, p);
            }
            Ok(acc)
        }
        DistExpr::Power(b, g) => {
            if !g.is_integer() && b.support() != Support::Positive {
                return Err(unsupported(e, ex));
            }
            raw_moment(b, &(ex * g), p)
        }
        DistExpr::Scale(b, c) => {
            let inner = raw_moment(b, ex, p)?;
            if ex.is_integer() {
                let k = ex.to_integer().to_i64().ok_or_else(|| unsupported(e, ex))?;
                return Ok(inner.scale(&pow_i(c, k), p));
            }
            if !c.is_positive() || b.support() != Support::Positive {
                return Err(unsupported(e, ex));
            }
            Ok(inner.mul(&power_value(c, ex, p), p))
        }
        DistExpr::Shift(b, mu) => {
            let k = nonneg_int(ex).ok_or_else(|| unsupported(e, ex))?;
            let mut acc = MomentValue::Exact(int(0));
            for j in 0..=k {
                let c = Rational::from_integer(binom(k, j)) * pow_i(mu, (k - j) as i64);
                acc = acc.add(&moments_p(b, j, p)?.scale(&c, p), p);
            }
            Ok(acc)
        }
        DistExpr::SumIid(b, n) => {
            let k = nonneg_int(ex).ok_or_else(|| unsupported(e, ex))?;
            let base: Vec<MomentValue> =
                (0..=k).map(|j| moments_p(b, j, p)).collect::<Result<_>>()?;
            // moments of partial sums, by binomial convolution
            let mut cur = base.clone();
            for _ in 1..*n {
                cur = (0..=k as usize)
                    .map(|m| {
                        let mut acc = MomentValue::Exact(int(0));
                        for j in 0..=m {
                            let c = Rational::from_integer(binom(m as u64, j as u64));
                            acc = acc.add(&cur[j].mul(&base[m - j], p).scale(&c, p), p);
                        }
                        acc
                    })
                    .collect();
            }
            Ok(cur[k as usize].clone())
        }
    }
}

fn moments_p(e: &DistExpr, k: u64, p: Precision) -> Result<MomentValue> {
    raw_moment(e, &Rational::from_integer(BigInt::from(k)), p)
}

fn unsupported(e: &DistExpr, ex: &Rational) -> SteinError {
    SteinError::UnsupportedExpression(format!(
        "moment of order {} of {e} is not available",
        fmt_rational(ex)
    ))
}

fn nonneg_int(ex: &Rational) -> Option<u64> {
    if ex.is_integer() && !ex.is_negative() {
        ex.to_integer().to_u64()
    } else {
        None
    }
}

/// `c^e` for `c > 0`.
fn power_value(c: &Rational, ex: &Rational, p: Precision) -> MomentValue {
    if ex.is_integer() {
        return MomentValue::Exact(pow_i(c, ex.to_integer().to_i64().unwrap()));
    }
    if let Some(den) = ex.denom().to_u32() {
        if let Some(root) = exact_root(c, den) {
            return MomentValue::Exact(pow_i(&root, ex.numer().to_i64().unwrap()));
        }
    }
    let l = precision::ln_rational(c, p).mul_rational(ex, p);
    MomentValue::Approx(precision::exp(&l, p))
}

/// `prod c^e * prod Gamma(num) / prod Gamma(den)`.
#[derive(Default)]
struct GammaTerm {
    powers: Vec<(Rational, Rational)>,
    num: Vec<Rational>,
    den: Vec<Rational>,
}

impl GammaTerm {
    fn eval(mut self, p: Precision) -> MomentValue {
        if self.num.iter().any(|x| !x.is_positive()) {
            return MomentValue::DoesNotExist;
        }
        assert!(
            self.den.iter().all(|x| x.is_positive()),
            "denominator gamma arguments are positive"
        );
        let mut exact = int(1);
        // pair arguments at integer distance
        let mut i = 0;
        while i < self.num.len() {
            let x = self.num[i].clone();
            if let Some(j) = self.den.iter().position(|y| (&x - y).is_integer()) {
                let y = self.den.remove(j);
                let d = (&x - &y).to_integer().to_i64().unwrap();
                exact *= if d >= 0 {
                    rising(&y, d as u64)
                } else {
                    int(1) / rising(&x, (-d) as u64)
                };
                self.num.remove(i);
            } else {
                i += 1;
            }
        }
        let fact = |x: &Rational| {
            let n = x.to_integer().to_u64().unwrap();
            rising(&int(1), n - 1)
        };
        self.num.retain(|x| {
            if x.is_integer() {
                exact *= fact(x);
                false
            } else {
                true
            }
        });
        self.den.retain(|x| {
            if x.is_integer() {
                exact /= fact(x);
                false
            } else {
                true
            }
        });
        let mut value = MomentValue::Exact(exact);
        for (c, e) in &self.powers {
            value = value.mul(&power_value(c, e, p), p);
        }
        if self.num.is_empty() && self.den.is_empty() {
            return value;
        }
        let mut l = BigFloat::zero();
        for x in &self.num {
            l = l.add(&precision::ln_gamma(x, p), p);
        }
        for x in &self.den {
            l = l.sub(&precision::ln_gamma(x, p), p);
        }
        value.mul(&MomentValue::Approx(precision::exp(&l, p)), p)
    }
}

fn gamma_term(a: &AtomKind, e: &Rational) -> Option<GammaTerm> {
    let two = int(2);
    let half = rat(1, 2);
    Some(match a {
        AtomKind::Gamma { r, lambda } => GammaTerm {
            powers: vec![(lambda.clone(), -e.clone())],
            num: vec![r + e],
            den: vec![r.clone()],
        },
        AtomKind::Exponential { lambda } => GammaTerm {
            powers: vec![(lambda.clone(), -e.clone())],
            num: vec![int(1) + e],
            den: vec![int(1)],
        },
        AtomKind::ChiSq { d } => GammaTerm {
            powers: vec![(two.clone(), e.clone())],
            num: vec![d / &two + e],
            den: vec![d / &two],
        },
        AtomKind::Beta { a, b } => GammaTerm {
            powers: vec![],
            num: vec![a + e, a + b],
            den: vec![a.clone(), a + b + e],
        },
        AtomKind::InverseGamma { alpha, beta } => GammaTerm {
            powers: vec![(beta.clone(), e.clone())],
            num: vec![alpha - e],
            den: vec![alpha.clone()],
        },
        AtomKind::FDist { d1, d2 } => GammaTerm {
            powers: vec![(d2 / d1, e.clone())],
            num: vec![d1 / &two + e, d2 / &two - e],
            den: vec![d1 / &two, d2 / &two],
        },
        // PRR_s = sqrt(2 s B G), B ~ Beta(1, s - 1), G ~ Gamma(1/2, 1)
        AtomKind::Prr { s } => GammaTerm {
            powers: vec![(s * &two, e / &two)],
            num: vec![int(1) + e / &two, s.clone(), &half + e / &two],
            den: vec![s + e / &two, half.clone()],
        },
        AtomKind::GenGamma { r, lambda, q } => GammaTerm {
            powers: vec![(lambda.clone(), -e.clone())],
            num: vec![(r + e) / q],
            den: vec![r / q],
        },
        _ => return None,
    })
}

fn atom_moment(a: &AtomKind, e: &Rational, p: Precision) -> Result<MomentValue> {
    a.validate()?;
    if let Some(t) = gamma_term(a, e) {
        return Ok(t.eval(p));
    }
    // Laws on the whole line: integer orders only.
    if !e.is_integer() {
        return Err(unsupported(&DistExpr::Atom(a.clone()), e));
    }
    if e.is_negative() {
        // densities are bounded near 0 or blow up slower than 1/|x|
        return Ok(MomentValue::DoesNotExist);
    }
    let k = e
        .to_integer()
        .to_u64()
        .ok_or_else(|| unsupported(&DistExpr::Atom(a.clone()), e))?;
    Ok(MomentValue::Exact(match a {
        AtomKind::Normal { mu, sigma2 } => {
            let (mut prev, mut cur) = (int(0), int(1));
            for j in 1..=k {
                let next = mu * &cur + int(j as i64 - 1) * sigma2 * &prev;
                prev = cur;
                cur = next;
            }
            cur
        }
        AtomKind::StudentT { nu } => {
            if int(k as i64) >= *nu {
                return Ok(MomentValue::DoesNotExist);
            }
            if k.is_odd() {
                int(0)
            } else {
                (1..=k / 2)
                    .map(|i| int(2 * i as i64 - 1) * nu / (nu - int(2 * i as i64)))
                    .fold(int(1), |acc, x| acc * x)
            }
        }
        AtomKind::VgSym { r, sigma } => vg_moment(r, &int(0), sigma, k),
        AtomKind::Vg { r, theta, sigma } => vg_moment(r, theta, sigma, k),
        _ => unreachable!("positive atoms are handled above"),
    }))
}

/// `E (theta V + sigma sqrt(V) Z)^k` with `V ~ Gamma(r/2, 1/2)`, `Z ~ N(0,1)`.
fn vg_moment(r: &Rational, theta: &Rational, sigma: &Rational, k: u64) -> Rational {
    let half_r = r / int(2);
    let ev = |n: u64| pow_i(&int(2), n as i64) * rising(&half_r, n);
    let mut acc = int(0);
    for j in (0..=k).step_by(2) {
        let dbl_fact = (1..j).step_by(2).fold(int(1), |a, x| a * int(x as i64));
        let c = Rational::from_integer(binom(k, j));
        acc += c * pow_i(theta, (k - j) as i64) * pow_i(sigma, j as i64) * dbl_fact * ev(k - j / 2);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::atoms::*;

    fn ex(v: MomentValue) -> Rational {
        v.exact()
            .cloned()
            .unwrap_or_else(|| panic!("not exact: {v}"))
    }

    fn approx(v: MomentValue) -> f64 {
        match v {
            MomentValue::Approx(x) => x.to_f64(),
            o => panic!("expected approx, got {o}"),
        }
    }

    #[test]
    fn product_normal_moments() {
        let e = product_of(vec![normal(int(1), int(1)), normal(int(1), int(1))]);
        let got: Vec<Rational> = (1..=6).map(|k| ex(moments(&e, k).unwrap())).collect();
        let want: Vec<Rational> = [1, 4, 16, 100, 676, 5776].iter().map(|&v| int(v)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn student_moments() {
        let e = DistExpr::Atom(student(int(5)));
        assert_eq!(ex(moments(&e, 4).unwrap()), int(25));
        assert_eq!(ex(moments(&e, 3).unwrap()), int(0));
        assert_eq!(moments(&e, 5).unwrap(), MomentValue::DoesNotExist);
        // strict integrability: k < nu
        let e = DistExpr::Atom(student(rat(9, 2)));
        assert!(moments(&e, 4).unwrap().exists());
    }

    #[test]
    fn gamma_family() {
        let e = DistExpr::Atom(gamma(rat(3, 2), int(2)));
        assert_eq!(ex(moments(&e, 0).unwrap()), int(1));
        // (3/2)(5/2)(7/2) / 8
        assert_eq!(ex(moments(&e, 3).unwrap()), rat(105, 64));
        let inv = DistExpr::Atom(inverse_gamma(int(3), int(2)));
        assert_eq!(ex(moments(&inv, 2).unwrap()), int(2));
        assert_eq!(moments(&inv, 3).unwrap(), MomentValue::DoesNotExist);
        let f = DistExpr::Atom(f_dist(int(4), int(10)));
        // (d2/d1)^2 (d1/2)(d1/2+1) / ((d2/2-1)(d2/2-2))
        assert_eq!(ex(moments(&f, 2).unwrap()), rat(25, 4) * int(6) / int(12));
    }

    #[test]
    fn prr_even_moments() {
        // E Z^(2k) = (2s)^k k! (1/2)_k / (s)_k
        let s = rat(3, 2);
        let e = DistExpr::Atom(prr(s.clone()));
        for k in 0..5u64 {
            let want = pow_i(&(&s * int(2)), k as i64) * rising(&int(1), k) * rising(&rat(1, 2), k)
                / rising(&s, k);
            assert_eq!(ex(moments(&e, 2 * k).unwrap()), want);
        }
        // E Z = sqrt(3) Gamma(3/2)^2 Gamma(1) / (Gamma(2) Gamma(1/2)) = sqrt(3 pi) / 4
        let m1 = approx(moments(&e, 1).unwrap());
        assert!((m1 - (3.0 * std::f64::consts::PI).sqrt() / 4.0).abs() < 1e-14);
    }

    #[test]
    fn powers_and_scales() {
        let g = DistExpr::Atom(gamma(int(2), int(1)));
        for k in 0..6 {
            assert_eq!(
                moments(&g.clone().power(int(2)), k).unwrap(),
                moments(&g, 2 * k).unwrap()
            );
        }
        let sq = g.clone().power(rat(1, 2));
        // E sqrt(G) = Gamma(5/2) / Gamma(2) = 3 sqrt(pi) / 4
        let m1 = approx(moments(&sq, 1).unwrap());
        assert!((m1 - 0.75 * std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert_eq!(ex(moments(&sq, 2).unwrap()), int(2));
        let sc = g.clone().scale(int(-3));
        assert_eq!(ex(moments(&sc, 3).unwrap()), int(-27 * 24));
        let n = DistExpr::Atom(std_normal());
        assert!(moments(&n.clone().power(int(-1)), 2).unwrap() == MomentValue::DoesNotExist);
        assert!(raw_moment(&n, &rat(1, 2), Precision::default()).is_err());
    }

    #[test]
    fn shift_and_sum() {
        let g = DistExpr::Atom(gamma(int(2), int(1)));
        let sh = g.clone().shift(int(3));
        // E(G+3) = 5, E(G+3)^2 = 6 + 12 + 9
        assert_eq!(ex(moments(&sh, 1).unwrap()), int(5));
        assert_eq!(ex(moments(&sh, 2).unwrap()), int(27));
        // sum of 3 Gamma(2,1) is Gamma(6,1)
        let s = g.sum_iid(3);
        let six = DistExpr::Atom(gamma(int(6), int(1)));
        for k in 0..7 {
            assert_eq!(moments(&s, k).unwrap(), moments(&six, k).unwrap());
        }
    }

    #[test]
    fn variance_gamma_moments() {
        // VG(r, theta, sigma): mean r theta, variance r (sigma^2 + 2 theta^2)
        let (r, th, s) = (int(3), rat(1, 2), int(2));
        let e = DistExpr::Atom(vg(r.clone(), th.clone(), s.clone()));
        let m1 = ex(moments(&e, 1).unwrap());
        let m2 = ex(moments(&e, 2).unwrap());
        assert_eq!(m1, &r * &th);
        assert_eq!(&m2 - &m1 * &m1, &r * (&s * &s + int(2) * &th * &th));
        let sym = DistExpr::Atom(vg_sym(int(3), int(2)));
        assert_eq!(ex(moments(&sym, 3).unwrap()), int(0));
        // E Z^4 = 3 sigma^4 E V^2 = 3 * 16 * 4 (r/2)(r/2+1)
        assert_eq!(
            ex(moments(&sym, 4).unwrap()),
            int(3 * 16 * 4) * rat(3, 2) * rat(5, 2)
        );
    }

    #[test]
    fn explicit_tables() {
        let t = vec![int(1), int(2)];
        assert_eq!(t.moment(1).unwrap(), MomentValue::Exact(int(2)));
        assert_eq!(t.moment(2).unwrap_err(), SteinError::MomentUnavailable(2));
    }
}
