//! Polynomials in the Euler operator `theta = M D`.
//!
//! `theta^n = sum_k S(n,k) M^k D^k` (Stirling numbers of the second kind) and
//! conversely `M^l D^l = theta (theta - 1) ... (theta - l + 1)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::operator::ExpandedOp;
use crate::scalar::{fmt_rational, Rational, Scalar};

/// `sum a_n theta^n`, coefficients in ascending order with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EulerPoly<S = Rational> {
    coeffs: Vec<S>,
}

impl<S: Scalar> EulerPoly<S> {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn theta() -> Self {
        Self::from_coeffs(vec![S::zero(), S::one()])
    }

    /// `T_r = theta + r`.
    pub fn t(r: S) -> Self {
        Self::from_coeffs(vec![r, S::one()])
    }

    /// `T_{r_1} ... T_{r_n}`.
    pub fn t_product<'a, I>(rs: I) -> Self
    where
        I: IntoIterator<Item = &'a S>,
    {
        rs.into_iter()
            .fold(Self::one(), |acc, r| acc * Self::t(r.clone()))
    }

    pub fn from_coeffs(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(c) => self.scale(&(S::one() / c.clone())),
        }
    }

    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, a| acc * x.clone() + a.clone())
    }

    /// `P(a theta + c)`.
    pub fn substitute_affine(&self, a: &S, c: &S) -> Self {
        let inner = Self::from_coeffs(vec![c.clone(), a.clone()]);
        self.coeffs.iter().rev().fold(Self::zero(), |acc, k| {
            acc * inner.clone() + Self::constant(k.clone())
        })
    }

    /// `P(theta + c)`.
    pub fn shift(&self, c: &S) -> Self {
        self.substitute_affine(&S::one(), c)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc * self.clone())
    }

    /// Long division by a monic-or-not divisor; returns `(quotient, remainder)`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let n = rem.len();
        if n <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![S::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            for (t, dc) in d.coeffs.iter().enumerate() {
                rem[k + t] = rem[k + t].clone() - c.clone() * dc.clone();
            }
            quot[k] = c;
        }
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Monic greatest common divisor; zero only if both inputs are zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Expansion in normal form via Stirling numbers of the second kind.
    pub fn to_expanded(&self) -> ExpandedOp<S> {
        let mut out = ExpandedOp::zero();
        let table = stirling2::<S>(self.coeffs.len());
        for (n, a) in self.coeffs.iter().enumerate() {
            for (k, s) in table[n].iter().enumerate() {
                out.add_term(k as u32, k as u32, a.clone() * s.clone());
            }
        }
        out
    }

    /// Inverse of [`to_expanded`](Self::to_expanded) on diagonal operators `sum c_l M^l D^l`.
    /// Returns `None` if an off-diagonal term is present.
    pub fn from_diagonal(op: &ExpandedOp<S>) -> Option<Self> {
        let mut out = Self::zero();
        for (&(i, j), c) in op.terms() {
            if i != j {
                return None;
            }
            out = out + falling_theta::<S>(i).scale(c);
        }
        Some(out)
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> EulerPoly<T> {
        EulerPoly::from_coeffs(self.coeffs.iter().map(f).collect())
    }
}

/// `theta (theta - 1) ... (theta - l + 1)`.
pub fn falling_theta<S: Scalar>(l: u32) -> EulerPoly<S> {
    (0..l).fold(EulerPoly::one(), |acc, t| {
        acc * EulerPoly::t(-S::of_i64(t as i64))
    })
}

/// Rows `0..n` of the Stirling triangle of the second kind.
fn stirling2<S: Scalar>(n: usize) -> Vec<Vec<S>> {
    let mut rows: Vec<Vec<S>> = vec![vec![S::one()]];
    for m in 1..n.max(1) {
        let prev = &rows[m - 1];
        let mut row = vec![S::zero(); m + 1];
        for k in 1..=m {
            let a = prev.get(k).cloned().unwrap_or_else(S::zero);
            row[k] = S::of_i64(k as i64) * a + prev[k - 1].clone();
        }
        rows.push(row);
    }
    rows
}

impl<S: Scalar> Add for EulerPoly<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |v: &Vec<S>, k: usize| v.get(k).cloned().unwrap_or_else(S::zero);
        Self::from_coeffs(
            (0..n)
                .map(|k| get(&self.coeffs, k) + get(&rhs.coeffs, k))
                .collect(),
        )
    }
}

impl<S: Scalar> Sub for EulerPoly<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Neg for EulerPoly<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_coeffs(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<S: Scalar> Mul for EulerPoly<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (a, x) in self.coeffs.iter().enumerate() {
            for (b, y) in rhs.coeffs.iter().enumerate() {
                out[a + b] = out[a + b].clone() + x.clone() * y.clone();
            }
        }
        Self::from_coeffs(out)
    }
}

impl<S: Scalar> fmt::Display for EulerPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            let mono = match n {
                0 => String::new(),
                1 => "θ".to_string(),
                _ => format!("θ^{n}"),
            };
            match (mag.is_one(), mono.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{mono}")?,
                (false, true) => write!(f, "{mag}")?,
                (false, false) => write!(f, "{mag} {mono}")?,
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for EulerPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EulerPoly({self})")
    }
}

/// `constant * prod T_{r} * rest`, with `rest` monic and free of rational roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factored {
    pub constant: Rational,
    /// Parameters `r` of the linear factors `T_r`, sorted, with multiplicity.
    pub t_params: Vec<Rational>,
    pub rest: EulerPoly<Rational>,
}

impl Factored {
    pub fn expand(&self) -> EulerPoly<Rational> {
        EulerPoly::t_product(&self.t_params).scale(&self.constant) * self.rest.clone()
    }
}

impl fmt::Display for Factored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let bare = self.t_params.is_empty() && self.rest.deg0() == 0;
        if !self.constant.is_one() || bare {
            parts.push(fmt_rational(&self.constant));
        }
        for r in &self.t_params {
            parts.push(format!("T_{{{}}}", fmt_rational(r)));
        }
        if self.rest.deg0() > 0 {
            parts.push(format!("({})", self.rest));
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// Trial division stops above this bound; larger coefficients are left unfactored.
const FACTOR_LIMIT: u64 = 1 << 40;

impl EulerPoly<Rational> {
    /// Splits off every linear factor with a rational root.
    pub fn factor(&self) -> Factored {
        let Some(lead) = self.leading().cloned() else {
            return Factored {
                constant: Rational::zero(),
                t_params: Vec::new(),
                rest: Self::one(),
            };
        };
        let mut rest = self.monic();
        let mut t_params = Vec::new();
        while let Some(root) = rational_root(&rest) {
            let lin = Self::t(-root.clone());
            let (q, r) = rest.div_rem(&lin);
            debug_assert!(r.is_zero());
            rest = q;
            t_params.push(-root);
        }
        t_params.sort();
        Factored {
            constant: lead,
            t_params,
            rest,
        }
    }

    /// Text form like `2 T_{1/2} T_{3}`.
    pub fn factored_text(&self) -> String {
        self.factor().to_string()
    }
}

/// Some rational root of `p`, if one exists and the coefficients are small enough to search.
fn rational_root(p: &EulerPoly<Rational>) -> Option<Rational> {
    if p.deg0() == 0 {
        return None;
    }
    if p.coeffs()[0].is_zero() {
        return Some(Rational::zero());
    }
    let den_lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(den_lcm.clone())).to_integer())
        .collect();
    let a0 = ints[0].abs().to_u64()?;
    let an = ints.last().unwrap().abs().to_u64()?;
    if a0 > FACTOR_LIMIT || an > FACTOR_LIMIT {
        return None;
    }
    for q in divisors(an) {
        for pnum in divisors(a0) {
            for sign in [1i64, -1] {
                let cand = Rational::new(BigInt::from(pnum) * sign, BigInt::from(q));
                if p.eval(&cand).is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}
