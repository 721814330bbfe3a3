//! Differential operators with polynomial coefficients in normal form.
//!
//! An [`ExpandedOp`] is a finite sum `sum c_ij M^j D^i` with every `M` to the
//! left of every `D`. Terms are keyed by `(i, j)` = (D-order, M-degree) and
//! zero coefficients are never stored, so structural equality of the maps is
//! equality of operators.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::scalar::{Rational, Scalar};

/// `sum c_ij M^j D^i`, keyed by `(i, j)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExpandedOp<S = Rational> {
    terms: BTreeMap<(u32, u32), S>,
}

impl<S: Scalar> Default for ExpandedOp<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> ExpandedOp<S> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn identity() -> Self {
        Self::scalar(S::one())
    }

    pub fn scalar(c: S) -> Self {
        Self::monomial(0, 0, c)
    }

    /// Multiplication by `x`.
    pub fn m() -> Self {
        Self::monomial(0, 1, S::one())
    }

    /// Differentiation.
    pub fn d() -> Self {
        Self::monomial(1, 0, S::one())
    }

    /// `c M^j D^i`.
    pub fn monomial(i: u32, j: u32, c: S) -> Self {
        let mut out = Self::zero();
        out.add_term(i, j, c);
        out
    }

    /// Euler operator `theta = M D`.
    pub fn theta() -> Self {
        Self::monomial(1, 1, S::one())
    }

    /// `T_r = M D + r I`.
    pub fn t(r: S) -> Self {
        Self::theta() + Self::scalar(r)
    }

    /// Builds from `(i, j, c)` triples, summing repeats and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (u32, u32, S)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (i, j, c) in it {
            out.add_term(i, j, c);
        }
        out
    }

    /// Adds `c M^j D^i` in place.
    pub fn add_term(&mut self, i: u32, j: u32, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&(i, j)) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert((i, j), s);
                }
            }
            None => {
                self.terms.insert((i, j), c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `M^j D^i`.
    pub fn coeff(&self, i: u32, j: u32) -> Option<&S> {
        self.terms.get(&(i, j))
    }

    /// `((i, j), c)` in increasing key order.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &S)> {
        self.terms.iter()
    }

    /// Highest derivative order present.
    pub fn d_order(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    /// Highest power of `x` present.
    pub fn m_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, v.clone() * c.clone()))
                .collect(),
        }
    }

    /// Composition `self ∘ other`.
    ///
    /// Uses `D^b M^c = sum_k C(b,k) c!/(c-k)! M^(c-k) D^(b-k)`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(b, a), x) in &self.terms {
            for (&(e, c), y) in &other.terms {
                let xy = x.clone() * y.clone();
                let mut w = S::one();
                for k in 0..=b.min(c) {
                    if k > 0 {
                        // w = C(b,k) * c!/(c-k)!
                        w = w * S::of_i64(((b - k + 1) * (c - k + 1)) as i64) / S::of_i64(k as i64);
                    }
                    out.add_term(b + e - k, a + c - k, xy.clone() * w.clone());
                }
            }
        }
        out
    }

    /// `self^n` under composition.
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity();
        for _ in 0..n {
            acc = acc.compose(self);
        }
        acc
    }

    /// `M^s ∘ self`, a pure index shift.
    pub fn left_mul_m(&self, s: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), v)| ((i, j + s), v.clone()))
                .collect(),
        }
    }

    /// `self ∘ D^s`, a pure index shift.
    pub fn right_mul_d(&self, s: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), v)| ((i + s, j), v.clone()))
                .collect(),
        }
    }

    /// Terms grouped by degree offset `j - i`.
    pub fn offset_groups(&self) -> BTreeMap<i64, Self> {
        let mut out: BTreeMap<i64, Self> = BTreeMap::new();
        for (&(i, j), v) in &self.terms {
            out.entry(j as i64 - i as i64)
                .or_default()
                .add_term(i, j, v.clone());
        }
        out
    }

    /// Formal adjoint: `M* = M`, `D* = -D`, order of composition reversed.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), v) in &self.terms {
            let sign = if i % 2 == 0 { S::one() } else { -S::one() };
            let piece =
                Self::monomial(i, 0, v.clone() * sign).compose(&Self::monomial(0, j, S::one()));
            out = out + piece;
        }
        out
    }

    /// Operator for `c X` given the operator for `X`: `M^j D^i` picks up `c^(i-j)`.
    pub fn rescale_variable(&self, c: &S) -> Self {
        assert!(!c.is_zero(), "scale factor must be nonzero");
        let mut out = Self::zero();
        for (&(i, j), v) in &self.terms {
            let e = i as i64 - j as i64;
            let mut f = S::one();
            for _ in 0..e.unsigned_abs() {
                f = f * c.clone();
            }
            let f = if e >= 0 { f } else { S::one() / f };
            out.add_term(i, j, v.clone() * f);
        }
        out
    }

    /// Coefficient of the largest key, i.e. highest D-order then highest M-degree.
    pub fn leading(&self) -> Option<&S> {
        self.terms.values().next_back()
    }

    /// Divides through by [`leading`](Self::leading) so scalar multiples compare equal.
    pub fn normalized(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(c) => self.scale(&(S::one() / c.clone())),
        }
    }

    /// Equality up to a nonzero scalar factor.
    pub fn eq_up_to_scale(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }

    /// `A x^k = sum c_ij (k)_i x^(k+j-i)` as a map from exponent to coefficient.
    pub fn apply_monomial(&self, k: u64) -> BTreeMap<u64, S> {
        let mut out: BTreeMap<u64, S> = BTreeMap::new();
        for (&(i, j), v) in &self.terms {
            if u64::from(i) > k {
                continue;
            }
            let mut f = S::one();
            for t in 0..u64::from(i) {
                f = f * S::of_i64((k - t) as i64);
            }
            let e = k - u64::from(i) + u64::from(j);
            let slot = out.entry(e).or_insert_with(S::zero);
            *slot = slot.clone() + v.clone() * f;
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Applies a coefficient map, e.g. to change the scalar type.
    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ExpandedOp<T> {
        ExpandedOp::from_terms(self.terms.iter().map(|(&(i, j), v)| (i, j, f(v))))
    }
}

impl<S: Scalar> Add for ExpandedOp<S> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for ((i, j), v) in rhs.terms {
            self.add_term(i, j, v);
        }
        self
    }
}

impl<S: Scalar> Sub for ExpandedOp<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Neg for ExpandedOp<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect(),
        }
    }
}

/// `a * b` is composition.
impl<S: Scalar> Mul for ExpandedOp<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

impl<'a, S: Scalar> Mul<&'a ExpandedOp<S>> for &'a ExpandedOp<S> {
    type Output = ExpandedOp<S>;
    fn mul(self, rhs: &ExpandedOp<S>) -> ExpandedOp<S> {
        self.compose(rhs)
    }
}

fn monomial_text(i: u32, j: u32) -> String {
    let part = |sym: &str, e: u32| match e {
        0 => String::new(),
        1 => sym.to_string(),
        _ => format!("{sym}^{e}"),
    };
    let parts: Vec<String> = [part("M", j), part("D", i)]
        .into_iter()
        .filter(|s| !s.is_empty())
        .collect();
    if parts.is_empty() {
        "I".to_string()
    } else {
        parts.join(" ")
    }
}

impl<S: Scalar> fmt::Display for ExpandedOp<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(i, j), c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = monomial_text(i, j);
            if mag.is_one() {
                write!(f, "{mono}")?;
            } else if mono == "I" {
                write!(f, "{mag} I")?;
            } else {
                write!(f, "{mag} {mono}")?;
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for ExpandedOp<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExpandedOp({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    d: u32,
    m: u32,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct OpJson {
    terms: Vec<TermJson>,
}

/// `{"terms":[{"d":i,"m":j,"num":"..","den":".."}]}`, numerators and
/// denominators as decimal strings so that large values survive.
impl Serialize for ExpandedOp<Rational> {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        OpJson {
            terms: self
                .terms
                .iter()
                .map(|(&(d, m), c)| TermJson {
                    d,
                    m,
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ExpandedOp<Rational> {
    fn deserialize<De: serde::Deserializer<'de>>(de: De) -> Result<Self, De::Error> {
        use serde::de::Error;
        let j = OpJson::deserialize(de)?;
        let mut out = Self::zero();
        for t in j.terms {
            let num: BigInt = t.num.parse().map_err(De::Error::custom)?;
            let den: BigInt = t.den.parse().map_err(De::Error::custom)?;
            if num_traits::Zero::is_zero(&den) {
                return Err(De::Error::custom("zero denominator"));
            }
            out.add_term(t.d, t.m, Rational::new(num, den));
        }
        Ok(out)
    }
}
