//! Coefficient scalars.
//!
//! The operator algebra only needs a commutative ring with a sign, so it is
//! written against [`Scalar`]. Exact work uses [`Rational`]; `f64` and `f32`
//! satisfy the same bound and are handy for quick numerical cross-checks.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::error::SteinError;

/// Exact rational numbers, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Anything usable as an operator coefficient.
pub trait Scalar:
    Num + Signed + FromPrimitive + Clone + fmt::Debug + fmt::Display + 'static
{
    /// Embeds a small integer.
    fn of_i64(v: i64) -> Self {
        Self::from_i64(v).expect("small integers are representable")
    }
}

impl<T> Scalar for T where
    T: Num + Signed + FromPrimitive + Clone + fmt::Debug + fmt::Display + 'static
{
}

/// `n/d` as a rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"3"`, `"-3/4"` or `"+7"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational, SteinError> {
    let t = s.trim();
    let bad = || SteinError::InvalidParameter(format!("not a rational: {s:?}"));
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.trim_start_matches('+').parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Canonical text form: `"3"` or `"-3/4"`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Rational to `f64` (lossy; used only for heuristics and display).
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// `q` as an `i64` when it is an integer that fits.
pub fn as_i64(q: &Rational) -> Option<i64> {
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}

/// Integer power with a possibly negative exponent. Panics on `0^(-k)`.
pub fn pow_i(q: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        num_traits::pow(q.recip(), (-e) as usize)
    }
}

/// Exact rational `p`-th root when it exists (`p >= 1`).
pub fn exact_root(q: &Rational, p: u32) -> Option<Rational> {
    if p == 1 {
        return Some(q.clone());
    }
    if q.is_negative() && p.is_multiple_of(2) {
        return None;
    }
    let n = q.numer().abs().nth_root(p);
    let d = q.denom().nth_root(p);
    let cand = Rational::new(n, d);
    let cand = if q.is_negative() { -cand } else { cand };
    (num_traits::pow(cand.clone(), p as usize) == *q).then_some(cand)
}

/// Least common multiple of positive integers.
pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Falling factorial `k (k-1) ... (k-i+1)` as a rational; zero when `i > k`.
pub fn falling(k: u64, i: u64) -> Rational {
    if i > k {
        return Rational::zero();
    }
    let mut acc = BigInt::one();
    for t in 0..i {
        acc *= BigInt::from(k - t);
    }
    Rational::from_integer(acc)
}

/// Rising factorial `(x)_n = x (x+1) ... (x+n-1)`.
pub fn rising(x: &Rational, n: u64) -> Rational {
    let mut acc = Rational::one();
    let mut t = x.clone();
    for _ in 0..n {
        acc *= &t;
        t += Rational::one();
    }
    acc
}

/// Binomial coefficient `C(n, k)`.
pub fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for t in 0..k {
        acc = acc * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["0", "3", "-3/4", "10/4"] {
            let q = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&fmt_rational(&q)).unwrap(), q);
        }
        assert_eq!(fmt_rational(&parse_rational("10/4").unwrap()), "5/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn roots_and_factorials() {
        assert_eq!(exact_root(&rat(9, 4), 2), Some(rat(3, 2)));
        assert_eq!(exact_root(&rat(2, 1), 2), None);
        assert_eq!(exact_root(&rat(-8, 27), 3), Some(rat(-2, 3)));
        assert_eq!(falling(5, 2), int(20));
        assert_eq!(falling(2, 3), int(0));
        assert_eq!(rising(&rat(1, 2), 3), rat(15, 8));
        assert_eq!(binom(6, 2), BigInt::from(15));
    }
}
