//! Extended-precision reals: binary floating point on top of `BigInt`, with
//! `ln`, `exp`, `pi` and `ln Gamma` of positive rationals.
//!
//! Precision is given in decimal digits and defaults to the value of the
//! `STEIN_PRECISION_DIGITS` environment variable (30 when unset). Values below
//! 30 are raised to 30. Every routine works with guard bits on top of the
//! requested precision.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{binom, Rational};

/// Name of the environment variable consulted by [`Precision::from_env`].
pub const PRECISION_ENV: &str = "STEIN_PRECISION_DIGITS";

/// Working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    digits: u32,
}

impl Precision {
    pub const MIN_DIGITS: u32 = 30;

    pub fn digits(digits: u32) -> Self {
        Self {
            digits: digits.max(Self::MIN_DIGITS),
        }
    }

    pub fn from_env() -> Self {
        let d = std::env::var(PRECISION_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u32>().ok())
            .unwrap_or(Self::MIN_DIGITS);
        Self::digits(d)
    }

    pub fn decimal_digits(&self) -> u32 {
        self.digits
    }

    /// Mantissa bits kept after each operation.
    pub fn bits(&self) -> u32 {
        (f64::from(self.digits) * std::f64::consts::LOG2_10).ceil() as u32 + 32
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::from_env()
    }
}

/// `mant * 2^exp`, with `mant` rounded to a fixed number of bits.
#[derive(Clone, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        Self {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    fn raw(mant: BigInt, exp: i64, bits: u32) -> Self {
        let mut out = Self { mant, exp };
        out.round_to(bits);
        out
    }

    fn round_to(&mut self, bits: u32) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let len = self.mant.bits();
        if len > u64::from(bits) {
            let drop = len - u64::from(bits);
            self.mant = round_shift(&self.mant, drop);
            self.exp += drop as i64;
        }
    }

    pub fn from_rational(q: &Rational, p: Precision) -> Self {
        let bits = p.bits() + 8;
        if q.is_zero() {
            return Self::zero();
        }
        let shift = i64::from(bits) + q.denom().bits() as i64 - q.numer().bits() as i64 + 1;
        let (num, den) = if shift >= 0 {
            (q.numer() << shift as usize, q.denom().clone())
        } else {
            (q.numer().clone(), q.denom() << (-shift) as usize)
        };
        Self::raw(div_round(&num, &den), -shift, bits)
    }

    pub fn from_i64(v: i64, p: Precision) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)), p)
    }

    /// Exact value.
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as usize)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let len = self.mant.bits() as i64;
        let keep = len.min(60);
        let top = round_shift(&self.mant, (len - keep) as u64);
        top.to_f64().unwrap() * 2f64.powi((self.exp + len - keep).clamp(-2000, 2000) as i32)
    }

    pub fn neg(&self) -> Self {
        Self {
            mant: -self.mant.clone(),
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn add(&self, o: &Self, p: Precision) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &o.mant << (o.exp - e) as usize;
        Self::raw(a + b, e, p.bits() + 8)
    }

    pub fn sub(&self, o: &Self, p: Precision) -> Self {
        self.add(&o.neg(), p)
    }

    pub fn mul(&self, o: &Self, p: Precision) -> Self {
        Self::raw(&self.mant * &o.mant, self.exp + o.exp, p.bits() + 8)
    }

    pub fn mul_rational(&self, q: &Rational, p: Precision) -> Self {
        self.mul(&Self::from_rational(q, p), p)
    }

    pub fn div(&self, o: &Self, p: Precision) -> Self {
        assert!(!o.is_zero(), "division by zero");
        let bits = p.bits() + 8;
        let shift = i64::from(bits) + o.mant.bits() as i64 - self.mant.bits() as i64 + 2;
        let shift = shift.max(0);
        let num = &self.mant << shift as usize;
        Self::raw(div_round(&num, &o.mant), self.exp - o.exp - shift, bits)
    }

    /// `|self - other| / max(|self|, |other|)`, or 0 when both vanish.
    pub fn rel_diff(&self, o: &Self, p: Precision) -> f64 {
        let d = self.sub(o, p).abs();
        let scale = if self.abs().cmp_value(&o.abs()) == Ordering::Less {
            o.abs()
        } else {
            self.abs()
        };
        if scale.is_zero() {
            return 0.0;
        }
        d.div(&scale, p).to_f64()
    }

    pub fn cmp_value(&self, o: &Self) -> Ordering {
        self.to_rational().cmp(&o.to_rational())
    }

    /// Scientific notation with `digits` significant digits.
    pub fn to_sci(&self, digits: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let v = self.to_rational();
        let neg = v.is_negative();
        let v = v.abs();
        let mut e10 = (self.abs().to_f64().log10()).floor() as i64;
        let ten = Rational::from_integer(BigInt::from(10));
        let scaled = |e: i64| -> Rational {
            let k = i64::from(digits) - 1 - e;
            if k >= 0 {
                &v * num_traits::pow(ten.clone(), k as usize)
            } else {
                &v / num_traits::pow(ten.clone(), (-k) as usize)
            }
        };
        let lo = num_traits::pow(BigInt::from(10), digits as usize - 1);
        let hi = &lo * BigInt::from(10);
        let mut s = scaled(e10).round().to_integer();
        if s >= hi {
            e10 += 1;
            s = scaled(e10).round().to_integer();
        } else if s < lo {
            e10 -= 1;
            s = scaled(e10).round().to_integer();
        }
        let txt = s.to_string();
        let (head, tail) = txt.split_at(1);
        format!(
            "{}{}{}{}e{}",
            if neg { "-" } else { "" },
            head,
            if tail.is_empty() { "" } else { "." },
            tail,
            e10
        )
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(Precision::MIN_DIGITS))
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({})", self.to_sci(Precision::MIN_DIGITS))
    }
}

fn round_shift(m: &BigInt, drop: u64) -> BigInt {
    if drop == 0 {
        return m.clone();
    }
    let half = BigInt::one() << (drop - 1) as usize;
    if m.is_negative() {
        -((-m + half) >> drop as usize)
    } else {
        (m + half) >> drop as usize
    }
}

fn div_round(n: &BigInt, d: &BigInt) -> BigInt {
    let (n, d) = if d.is_negative() {
        (-n, -d)
    } else {
        (n.clone(), d.clone())
    };
    let twice = (n << 1usize) + &d;
    twice.div_floor(&(d << 1usize))
}

/// Fixed-point helper: integers scaled by `2^w`.
struct Fixed {
    w: usize,
}

impl Fixed {
    fn one(&self) -> BigInt {
        BigInt::one() << self.w
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        round_shift(&(a * b), self.w as u64)
    }

    /// `atanh(t)` for `|t| <= 1/3`.
    fn atanh(&self, t: &BigInt) -> BigInt {
        let t2 = self.mul(t, t);
        let mut power = t.clone();
        let mut sum = BigInt::zero();
        let mut k = 1u64;
        while !power.is_zero() {
            sum += &power / BigInt::from(k);
            power = self.mul(&power, &t2);
            k += 2;
        }
        sum
    }

    /// `atan(1/n)` for integer `n >= 2`.
    fn atan_inv(&self, n: u64) -> BigInt {
        let n2 = BigInt::from(n * n);
        let mut power = self.one() / BigInt::from(n);
        let mut sum = BigInt::zero();
        let mut k = 1u64;
        let mut positive = true;
        while !power.is_zero() {
            let term = &power / BigInt::from(k);
            if positive {
                sum += term;
            } else {
                sum -= term;
            }
            positive = !positive;
            power /= &n2;
            k += 2;
        }
        sum
    }

    fn ln2(&self) -> BigInt {
        self.atanh(&(self.one() / BigInt::from(3))) << 1usize
    }

    fn pi(&self) -> BigInt {
        (self.atan_inv(5) << 4usize) - (self.atan_inv(239) << 2usize)
    }
}

fn working(p: Precision) -> Fixed {
    Fixed {
        w: p.bits() as usize + 40,
    }
}

fn from_fixed(v: BigInt, f: &Fixed, p: Precision) -> BigFloat {
    BigFloat::raw(v, -(f.w as i64), p.bits() + 8)
}

/// `pi`.
pub fn pi(p: Precision) -> BigFloat {
    let f = working(p);
    from_fixed(f.pi(), &f, p)
}

/// Natural logarithm of a positive value.
pub fn ln(x: &BigFloat, p: Precision) -> BigFloat {
    assert!(
        !x.is_zero() && !x.is_negative(),
        "ln needs a positive argument"
    );
    let f = working(p);
    // x = y * 2^e with y in [1/2, 1)
    let len = x.mant.bits() as i64;
    let e = x.exp + len;
    let y = if len as usize >= f.w {
        round_shift(&x.mant, (len as usize - f.w) as u64)
    } else {
        &x.mant << (f.w - len as usize)
    };
    let one = f.one();
    let t = div_round(&((&y - &one) << f.w), &(&y + &one));
    let ln_y = f.atanh(&t) << 1usize;
    from_fixed(ln_y + f.ln2() * BigInt::from(e), &f, p)
}

/// Natural logarithm of a positive rational.
pub fn ln_rational(q: &Rational, p: Precision) -> BigFloat {
    assert!(q.is_positive(), "ln needs a positive argument");
    ln(&BigFloat::from_rational(q, p), p)
}

/// `e^x`.
pub fn exp(x: &BigFloat, p: Precision) -> BigFloat {
    let f = working(p);
    let xf = if x.exp >= 0 {
        &x.mant << (x.exp as usize + f.w)
    } else if (-x.exp) as usize <= f.w {
        &x.mant << (f.w - (-x.exp) as usize)
    } else {
        round_shift(&x.mant, ((-x.exp) as usize - f.w) as u64)
    };
    let ln2 = f.ln2();
    let k = div_round(&xf, &ln2);
    let r = &xf - &ln2 * &k;
    let mut term = f.one();
    let mut sum = BigInt::zero();
    let mut n = 1u64;
    while !term.is_zero() {
        sum += &term;
        term = f.mul(&term, &r) / BigInt::from(n);
        n += 1;
    }
    let k = k.to_i64().expect("exponent out of range");
    BigFloat::raw(sum, k - f.w as i64, p.bits() + 8)
}

/// `ln Gamma(z)` for rational `z > 0`.
///
/// Shifts the argument up to `w >= w0`, applies the Stirling series there and
/// subtracts `ln(z (z+1) ... (z+N-1))`, computed from the exact product.
pub fn ln_gamma(z: &Rational, p: Precision) -> BigFloat {
    assert!(z.is_positive(), "ln Gamma needs a positive argument");
    let f = working(p);
    let w0 = Rational::from_integer(BigInt::from((0.12 * f.w as f64).ceil() as i64 + 2));
    let mut w = z.clone();
    let mut prod = Rational::one();
    while w < w0 {
        prod *= &w;
        w += Rational::one();
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let ln_w = ln_rational(&w, p);
    let two_pi = BigFloat::raw(f.pi() << 1usize, -(f.w as i64), p.bits() + 8);
    let mut acc = ln_w
        .mul_rational(&(&w - &half), p)
        .sub(&BigFloat::from_rational(&w, p), p)
        .add(&ln(&two_pi, p).mul_rational(&half, p), p);
    let tiny = Rational::new(BigInt::one(), BigInt::one() << (f.w + 4));
    let mut wpow = w.clone();
    let w2 = &w * &w;
    let mut k = 1usize;
    loop {
        let b = bernoulli(2 * k);
        let denom = Rational::from_integer(BigInt::from((2 * k) * (2 * k - 1))) * &wpow;
        let term = b / denom;
        acc = acc.add(&BigFloat::from_rational(&term, p), p);
        if term.abs() < tiny || k > 400 {
            break;
        }
        wpow *= &w2;
        k += 1;
    }
    if prod != Rational::one() {
        acc = acc.sub(&ln_rational(&prod, p), p);
    }
    acc
}

/// `Gamma(z)` for rational `z > 0`.
pub fn gamma(z: &Rational, p: Precision) -> BigFloat {
    exp(&ln_gamma(z, p), p)
}

/// Bernoulli number `B_n` (with `B_1 = -1/2`), cached.
pub fn bernoulli(n: usize) -> Rational {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![Rational::one()]));
    let mut b = cache.lock().unwrap();
    while b.len() <= n {
        let m = b.len() as u64;
        // sum_{k<=m} C(m+1, k) B_k = 0
        let mut s = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += Rational::from_integer(binom(m + 1, k as u64)) * bk;
        }
        let next = -s / Rational::from_integer(BigInt::from(m + 1));
        b.push(next);
    }
    b[n].clone()
}

/// Sign of a rational as `-1`, `0` or `1`.
pub fn sign_of(q: &Rational) -> i8 {
    match q.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn p() -> Precision {
        Precision::digits(30)
    }

    fn close(a: &BigFloat, lit: &str, tol_digits: u32) {
        let want = crate::scalar::parse_rational(lit).unwrap_or_else(|_| decimal(lit));
        let w = BigFloat::from_rational(&want, p());
        let rd = a.rel_diff(&w, p());
        assert!(
            rd < 10f64.powi(-(tol_digits as i32)),
            "{} vs {lit}: rel diff {rd}",
            a.to_sci(35)
        );
    }

    fn decimal(s: &str) -> Rational {
        let neg = s.starts_with('-');
        let s = s.trim_start_matches('-');
        let (i, frac) = s.split_once('.').unwrap_or((s, ""));
        let digits: BigInt = format!("{i}{frac}").parse().unwrap();
        let q = Rational::new(digits, num_traits::pow(BigInt::from(10), frac.len()));
        if neg {
            -q
        } else {
            q
        }
    }

    #[test]
    fn constants() {
        close(&pi(p()), "3.14159265358979323846264338327950288", 32);
        close(
            &ln_rational(&int(2), p()),
            "0.693147180559945309417232121458176568",
            32,
        );
        close(
            &ln_rational(&int(10), p()),
            "2.30258509299404568401799145468436421",
            32,
        );
        close(
            &exp(&BigFloat::from_i64(1, p()), p()),
            "2.71828182845904523536028747135266250",
            32,
        );
    }

    #[test]
    fn log_gamma_reference_values() {
        // ln Gamma(1/2) = ln(pi)/2
        close(
            &ln_gamma(&rat(1, 2), p()),
            "0.572364942924700087071713675676529356",
            31,
        );
        assert!(ln_gamma(&int(1), p()).to_f64().abs() < 1e-35);
        // ln Gamma(7/3)
        close(
            &ln_gamma(&rat(7, 3), p()),
            "0.174490430711438305231147806049263118",
            31,
        );
        // ln Gamma(4) = ln 6
        close(
            &ln_gamma(&int(4), p()),
            "1.79175946922805500081247735838070227",
            31,
        );
        close(
            &ln_gamma(&rat(1, 1000), p()),
            "6.90717888538385368251234466807698250",
            31,
        );
        close(
            &ln_gamma(&int(100), p()),
            "359.134205369575398776044010460286910",
            31,
        );
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), int(0));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn arithmetic_round_trip() {
        let a = BigFloat::from_rational(&rat(1, 3), p());
        let b = a.mul(&BigFloat::from_i64(3, p()), p());
        close(&b, "1", 38);
        assert_eq!(BigFloat::from_i64(1234, p()).to_sci(4), "1.234e3");
        assert_eq!(
            BigFloat::from_rational(&rat(-1, 8), p()).to_sci(3),
            "-1.25e-1"
        );
    }

    #[test]
    fn env_floor() {
        assert_eq!(Precision::digits(5).decimal_digits(), 30);
        assert!(Precision::digits(50).bits() > 166);
    }
}
