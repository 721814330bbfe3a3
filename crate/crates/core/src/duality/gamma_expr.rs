//! Products of gamma functions, powers and linear factors in a variable `s`.
//!
//! A [`GammaProductExpr`] is
//! `c * pi^e * prod p^(a s + b) * prod (a s + b)^n * prod Gamma(a s + b)^n`.
//! [`GammaProductExpr::canonical`] factors power bases into primes, folds
//! integer parts of constant exponents into `c` and evaluates gamma factors at
//! constant integer or half-integer arguments, so that two expressions for the
//! same function usually become structurally identical. When they do not,
//! [`gamma_expr_equal`] falls back to comparing logarithms at probe points.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SteinError};
use crate::precision::{self, BigFloat, Precision};
use crate::scalar::{fmt_rational, int, parse_rational, pow_i, rat, Rational};

/// `a s + b`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Affine {
    pub a: Rational,
    pub b: Rational,
}

impl Affine {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    /// The constant `b`.
    pub fn constant(b: Rational) -> Self {
        Self::new(Rational::zero(), b)
    }

    /// `s`.
    pub fn s() -> Self {
        Self::new(Rational::one(), Rational::zero())
    }

    pub fn eval(&self, s: &Rational) -> Rational {
        &self.a * s + &self.b
    }

    pub fn is_constant(&self) -> bool {
        self.a.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(&self.a * c, &self.b * c)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.a + &o.a, &self.b + &o.b)
    }

    pub fn plus(&self, c: &Rational) -> Self {
        Self::new(self.a.clone(), &self.b + c)
    }

    /// Substitutes `s -> alpha s + beta`.
    pub fn substitute(&self, alpha: &Rational, beta: &Rational) -> Self {
        Self::new(&self.a * alpha, &self.a * beta + &self.b)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s_part = if self.a.is_zero() {
            String::new()
        } else if self.a.is_one() {
            "s".to_string()
        } else if self.a == -Rational::one() {
            "-s".to_string()
        } else if self.a.is_integer() {
            format!("{}s", self.a.numer())
        } else if self.a.numer().is_one() {
            format!("s/{}", self.a.denom())
        } else if *self.a.numer() == -BigInt::one() {
            format!("-s/{}", self.a.denom())
        } else {
            format!("{}s/{}", self.a.numer(), self.a.denom())
        };
        match (s_part.is_empty(), self.b.is_zero()) {
            (true, _) => write!(f, "{}", fmt_rational(&self.b)),
            (false, true) => write!(f, "{s_part}"),
            (false, false) => {
                let sign = if self.b.is_negative() { "-" } else { "+" };
                write!(f, "{s_part} {sign} {}", fmt_rational(&self.b.abs()))
            }
        }
    }
}

/// `c * pi^e * prod p^(a s + b) * prod (a s + b)^n * prod Gamma(a s + b)^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaProductExpr {
    constant: Rational,
    pi_exp: Rational,
    powers: BTreeMap<BigInt, Affine>,
    linear: BTreeMap<Affine, i64>,
    gammas: BTreeMap<Affine, i64>,
}

impl Default for GammaProductExpr {
    fn default() -> Self {
        Self::one()
    }
}

impl GammaProductExpr {
    pub fn one() -> Self {
        Self {
            constant: Rational::one(),
            pi_exp: Rational::zero(),
            powers: BTreeMap::new(),
            linear: BTreeMap::new(),
            gammas: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        assert!(!c.is_zero(), "gamma products are nonzero");
        Self {
            constant: c,
            ..Self::one()
        }
    }

    pub fn pi_pow(e: Rational) -> Self {
        Self {
            pi_exp: e,
            ..Self::one()
        }
    }

    /// `base^(exponent)` for a positive rational base.
    pub fn power(base: &Rational, exponent: Affine) -> Self {
        assert!(base.is_positive(), "power bases must be positive");
        let mut out = Self::one();
        out.raw_power(base.numer().clone(), exponent.clone());
        out.raw_power(base.denom().clone(), exponent.scale(&-Rational::one()));
        out
    }

    /// `Gamma(arg)`.
    pub fn gamma(arg: Affine) -> Self {
        Self::gamma_pow(arg, 1)
    }

    /// `Gamma(arg)^n`.
    pub fn gamma_pow(arg: Affine, n: i64) -> Self {
        let mut out = Self::one();
        if n != 0 {
            out.gammas.insert(arg, n);
        }
        out
    }

    /// The linear factor `arg`.
    pub fn linear(arg: Affine) -> Self {
        let mut out = Self::one();
        out.linear.insert(arg, 1);
        out
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn pi_exponent(&self) -> &Rational {
        &self.pi_exp
    }

    pub fn powers(&self) -> &BTreeMap<BigInt, Affine> {
        &self.powers
    }

    pub fn gammas(&self) -> &BTreeMap<Affine, i64> {
        &self.gammas
    }

    pub fn linears(&self) -> &BTreeMap<Affine, i64> {
        &self.linear
    }

    fn raw_power(&mut self, base: BigInt, exponent: Affine) {
        if base.is_one() {
            return;
        }
        let slot = self
            .powers
            .entry(base.clone())
            .or_insert_with(|| Affine::constant(Rational::zero()));
        *slot = slot.add(&exponent);
        if slot.a.is_zero() && slot.b.is_zero() {
            self.powers.remove(&base);
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.constant *= &o.constant;
        out.pi_exp += &o.pi_exp;
        for (p, e) in &o.powers {
            out.raw_power(p.clone(), e.clone());
        }
        for (arg, n) in &o.linear {
            bump(&mut out.linear, arg, *n);
        }
        for (arg, n) in &o.gammas {
            bump(&mut out.gammas, arg, *n);
        }
        out
    }

    /// Integer power, including negative exponents.
    pub fn pow(&self, n: i64) -> Self {
        let nq = int(n);
        Self {
            constant: pow_i(&self.constant, n),
            pi_exp: &self.pi_exp * &nq,
            powers: self
                .powers
                .iter()
                .filter(|_| n != 0)
                .map(|(p, e)| (p.clone(), e.scale(&nq)))
                .collect(),
            linear: self
                .linear
                .iter()
                .filter(|_| n != 0)
                .map(|(a, k)| (a.clone(), k * n))
                .collect(),
            gammas: self
                .gammas
                .iter()
                .filter(|_| n != 0)
                .map(|(a, k)| (a.clone(), k * n))
                .collect(),
        }
    }

    pub fn recip(&self) -> Self {
        self.pow(-1)
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    /// Substitutes `s -> alpha s + beta` everywhere.
    pub fn substitute(&self, alpha: &Rational, beta: &Rational) -> Self {
        let mut out = Self {
            constant: self.constant.clone(),
            pi_exp: self.pi_exp.clone(),
            ..Self::one()
        };
        for (p, e) in &self.powers {
            out.raw_power(p.clone(), e.substitute(alpha, beta));
        }
        for (arg, n) in &self.linear {
            bump(&mut out.linear, &arg.substitute(alpha, beta), *n);
        }
        for (arg, n) in &self.gammas {
            bump(&mut out.gammas, &arg.substitute(alpha, beta), *n);
        }
        out
    }

    /// The value at a fixed `s`, still as an expression (gamma factors become
    /// constants and are folded where possible).
    pub fn at(&self, s: &Rational) -> Self {
        self.substitute(&Rational::zero(), s).canonical()
    }

    /// Canonical representative; see the module documentation.
    pub fn canonical(&self) -> Self {
        let mut out = Self {
            constant: self.constant.clone(),
            pi_exp: self.pi_exp.clone(),
            ..Self::one()
        };
        for (p, e) in &self.powers {
            for (prime, mult) in factorize(p) {
                out.raw_power(prime, e.scale(&int(mult as i64)));
            }
        }
        for (arg, n) in &self.linear {
            if arg.is_constant() {
                out.constant *= pow_i(&arg.b, *n);
            } else {
                // Normalize a*s + b to leading coefficient +1 or -1 is not
                // attempted; factors are kept as written.
                bump(&mut out.linear, arg, *n);
            }
        }
        for (arg, n) in &self.gammas {
            match constant_gamma(arg) {
                Some((c, pi_half)) => {
                    out.constant *= pow_i(&c, *n);
                    out.pi_exp += rat(pi_half * *n, 2);
                }
                None => bump(&mut out.gammas, arg, *n),
            }
        }
        // Fold integer parts of constant exponents into the constant.
        let powers = std::mem::take(&mut out.powers);
        for (p, mut e) in powers {
            let whole = e.b.floor();
            if !whole.is_zero() {
                let k = whole.to_integer().to_i64().expect("exponent fits in i64");
                out.constant *= pow_i(&Rational::from_integer(p.clone()), k);
                e.b -= whole;
            }
            if !(e.a.is_zero() && e.b.is_zero()) {
                out.powers.insert(p, e);
            }
        }
        out
    }

    /// `(sign, ln |value|)` at `s`, or `None` when a gamma argument is not
    /// positive or a linear factor vanishes there.
    pub fn eval_log(&self, s: &Rational, p: Precision) -> Option<(i8, BigFloat)> {
        let mut sign = precision::sign_of(&self.constant);
        let mut acc = precision::ln_rational(&self.constant.abs(), p);
        if !self.pi_exp.is_zero() {
            acc = acc.add(
                &precision::ln(&precision::pi(p), p).mul_rational(&self.pi_exp, p),
                p,
            );
        }
        for (base, e) in &self.powers {
            let v = e.eval(s);
            if !v.is_zero() {
                let lb = precision::ln_rational(&Rational::from_integer(base.clone()), p);
                acc = acc.add(&lb.mul_rational(&v, p), p);
            }
        }
        for (arg, n) in &self.linear {
            let v = arg.eval(s);
            if v.is_zero() {
                return None;
            }
            if v.is_negative() && n % 2 != 0 {
                sign = -sign;
            }
            acc = acc.add(
                &precision::ln_rational(&v.abs(), p).mul_rational(&int(*n), p),
                p,
            );
        }
        for (arg, n) in &self.gammas {
            let v = arg.eval(s);
            if !v.is_positive() {
                return None;
            }
            acc = acc.add(&precision::ln_gamma(&v, p).mul_rational(&int(*n), p), p);
        }
        Some((sign, acc))
    }

    /// Value at `s` as an extended-precision number.
    pub fn eval(&self, s: &Rational, p: Precision) -> Option<BigFloat> {
        let (sign, l) = self.eval_log(s, p)?;
        let v = precision::exp(&l, p);
        Some(if sign < 0 { v.neg() } else { v })
    }
}

fn bump(map: &mut BTreeMap<Affine, i64>, key: &Affine, n: i64) {
    let slot = map.entry(key.clone()).or_insert(0);
    *slot += n;
    if *slot == 0 {
        map.remove(key);
    }
}

/// `Gamma(b)` for a constant positive integer or half-integer `b`, as
/// `(rational, k)` meaning `rational * pi^(k/2)`.
fn constant_gamma(arg: &Affine) -> Option<(Rational, i64)> {
    if !arg.is_constant() || !arg.b.is_positive() {
        return None;
    }
    let b = &arg.b;
    if b.is_integer() {
        let n = b.to_integer().to_u64()?;
        if n > 400 {
            return None;
        }
        let f = (1..n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k));
        return Some((Rational::from_integer(f), 0));
    }
    if *b.denom() == BigInt::from(2) {
        // Gamma(n + 1/2) = (2n)! / (4^n n!) sqrt(pi)
        let n = (b - rat(1, 2)).to_integer().to_u64()?;
        if n > 400 {
            return None;
        }
        let fact = |m: u64| (1..=m).fold(BigInt::one(), |acc, k| acc * BigInt::from(k));
        let num = fact(2 * n);
        let den = (BigInt::one() << (2 * n) as usize) * fact(n);
        return Some((Rational::new(num, den), 1));
    }
    None
}

/// Prime factorization by trial division up to `10^6`; a larger cofactor is
/// kept whole.
fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut out = Vec::new();
    let mut rest = n.abs();
    if rest <= BigInt::one() {
        return out;
    }
    let mut d = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while &d * &d <= rest && d <= limit {
        let mut k = 0;
        while rest.is_multiple_of(&d) {
            rest /= &d;
            k += 1;
        }
        if k > 0 {
            out.push((d.clone(), k));
        }
        d += if d == BigInt::from(2) { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        out.push((rest, 1));
    }
    out
}

impl fmt::Display for GammaProductExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![fmt_rational(&self.constant)];
        if !self.pi_exp.is_zero() {
            parts.push(format!("pi^({})", fmt_rational(&self.pi_exp)));
        }
        for (p, e) in &self.powers {
            parts.push(format!("{p}^({e})"));
        }
        for (arg, n) in &self.linear {
            if *n == 1 {
                parts.push(format!("({arg})"));
            } else {
                parts.push(format!("({arg})^{n}"));
            }
        }
        for (arg, n) in &self.gammas {
            if *n == 1 {
                parts.push(format!("Gamma({arg})"));
            } else {
                parts.push(format!("Gamma({arg})^{n}"));
            }
        }
        write!(f, "{}", parts.join(" * "))
    }
}

#[derive(Serialize, Deserialize)]
struct AffineJson {
    s: String,
    c: String,
}

#[derive(Serialize, Deserialize)]
struct PowerJson {
    base: String,
    exponent: AffineJson,
}

#[derive(Serialize, Deserialize)]
struct FactorJson {
    arg: AffineJson,
    power: i64,
}

#[derive(Serialize, Deserialize)]
struct ExprJson {
    constant: String,
    pi_exponent: String,
    powers: Vec<PowerJson>,
    linear: Vec<FactorJson>,
    gammas: Vec<FactorJson>,
}

fn affine_json(a: &Affine) -> AffineJson {
    AffineJson {
        s: fmt_rational(&a.a),
        c: fmt_rational(&a.b),
    }
}

fn affine_from(a: &AffineJson) -> std::result::Result<Affine, SteinError> {
    Ok(Affine::new(parse_rational(&a.s)?, parse_rational(&a.c)?))
}

impl Serialize for GammaProductExpr {
    fn serialize<Ser: serde::Serializer>(
        &self,
        ser: Ser,
    ) -> std::result::Result<Ser::Ok, Ser::Error> {
        ExprJson {
            constant: fmt_rational(&self.constant),
            pi_exponent: fmt_rational(&self.pi_exp),
            powers: self
                .powers
                .iter()
                .map(|(p, e)| PowerJson {
                    base: p.to_string(),
                    exponent: affine_json(e),
                })
                .collect(),
            linear: self
                .linear
                .iter()
                .map(|(a, n)| FactorJson {
                    arg: affine_json(a),
                    power: *n,
                })
                .collect(),
            gammas: self
                .gammas
                .iter()
                .map(|(a, n)| FactorJson {
                    arg: affine_json(a),
                    power: *n,
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for GammaProductExpr {
    fn deserialize<De: serde::Deserializer<'de>>(de: De) -> std::result::Result<Self, De::Error> {
        use serde::de::Error;
        let j = ExprJson::deserialize(de)?;
        let conv = |e: SteinError| De::Error::custom(e.to_string());
        let mut out = Self::constant(parse_rational(&j.constant).map_err(conv)?);
        out.pi_exp = parse_rational(&j.pi_exponent).map_err(conv)?;
        for p in &j.powers {
            let base: BigInt = p.base.parse().map_err(De::Error::custom)?;
            out.raw_power(base, affine_from(&p.exponent).map_err(conv)?);
        }
        for l in &j.linear {
            bump(
                &mut out.linear,
                &affine_from(&l.arg).map_err(conv)?,
                l.power,
            );
        }
        for g in &j.gammas {
            bump(
                &mut out.gammas,
                &affine_from(&g.arg).map_err(conv)?,
                g.power,
            );
        }
        Ok(out)
    }
}

/// Outcome of [`gamma_expr_equal`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Equality {
    StructurallyEqual,
    NumericallyEqual,
    Different,
}

/// Verdict plus the probe points that had to be skipped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaComparison {
    pub verdict: Equality,
    #[serde(serialize_with = "ser_rationals")]
    pub skipped: Vec<Rational>,
    /// Largest relative difference of the log-values over the probes used.
    pub max_rel_diff: f64,
}

fn ser_rationals<Ser: serde::Serializer>(
    v: &[Rational],
    ser: Ser,
) -> std::result::Result<Ser::Ok, Ser::Error> {
    v.iter()
        .map(fmt_rational)
        .collect::<Vec<_>>()
        .serialize(ser)
}

/// Default probe points for numeric comparison.
pub fn default_probes() -> Vec<Rational> {
    vec![rat(1, 2), int(1), rat(7, 3), int(4)]
}

/// Relative tolerance on log-values for numeric equality.
pub const LOG_REL_TOL: f64 = 1e-9;

/// Structural comparison of canonical forms, then numeric comparison of
/// log-values at `probes`.
pub fn gamma_expr_equal(
    a: &GammaProductExpr,
    b: &GammaProductExpr,
    probes: &[Rational],
    p: Precision,
) -> Result<GammaComparison> {
    if a.canonical() == b.canonical() {
        return Ok(GammaComparison {
            verdict: Equality::StructurallyEqual,
            skipped: Vec::new(),
            max_rel_diff: 0.0,
        });
    }
    let mut skipped = Vec::new();
    let mut used = 0;
    let mut worst = 0.0f64;
    let mut agree = true;
    for s in probes {
        match (a.eval_log(s, p), b.eval_log(s, p)) {
            (Some((sa, la)), Some((sb, lb))) => {
                used += 1;
                let diff = la.sub(&lb, p).abs().to_f64();
                let scale = la.abs().to_f64().max(lb.abs().to_f64()).max(1.0);
                let rel = diff / scale;
                worst = worst.max(rel);
                if sa != sb || rel > LOG_REL_TOL {
                    agree = false;
                }
            }
            _ => skipped.push(s.clone()),
        }
    }
    if used == 0 {
        return Err(SteinError::NoAdmissibleProbe);
    }
    Ok(GammaComparison {
        verdict: if agree {
            Equality::NumericallyEqual
        } else {
            Equality::Different
        },
        skipped,
        max_rel_diff: worst,
    })
}
