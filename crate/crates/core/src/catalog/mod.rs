//! Building-block distributions and expressions over them.

mod mellin;
mod moments;
mod operators;

use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Result, SteinError};
use crate::scalar::{fmt_rational, parse_rational, Rational};

pub use mellin::mellin;
pub use moments::{moments, raw_moment, CachedOracle, MomentOracle, MomentValue};
pub use operators::{
    pearson_operator, score_operator, stein_operator, ScoreOperator, SteinOperator,
};

/// A catalog distribution with its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AtomKind {
    /// Mean and variance.
    Normal {
        mu: Rational,
        sigma2: Rational,
    },
    /// Shape and rate.
    Gamma {
        r: Rational,
        lambda: Rational,
    },
    Beta {
        a: Rational,
        b: Rational,
    },
    StudentT {
        nu: Rational,
    },
    /// Shape and scale; the reciprocal of `Gamma(alpha, beta)`.
    InverseGamma {
        alpha: Rational,
        beta: Rational,
    },
    FDist {
        d1: Rational,
        d2: Rational,
    },
    Prr {
        s: Rational,
    },
    /// Variance-gamma with `theta = 0`, `mu = 0`.
    VgSym {
        r: Rational,
        sigma: Rational,
    },
    /// Variance-gamma with `mu = 0`.
    Vg {
        r: Rational,
        theta: Rational,
        sigma: Rational,
    },
    /// Density proportional to `x^(r-1) exp(-(lambda x)^q)`; `q` a positive integer.
    GenGamma {
        r: Rational,
        lambda: Rational,
        q: Rational,
    },
    Exponential {
        lambda: Rational,
    },
    ChiSq {
        d: Rational,
    },
}

/// Where the law lives, as far as Mellin transforms and powers care.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    /// Almost surely positive.
    Positive,
    /// Symmetric about zero.
    Symmetric,
    General,
}

impl AtomKind {
    /// Names accepted by [`AtomKind::from_name`], with parameter names.
    pub const NAMES: &'static [(&'static str, &'static [&'static str])] = &[
        ("Normal", &["mu", "sigma2"]),
        ("Gamma", &["r", "lambda"]),
        ("Beta", &["a", "b"]),
        ("StudentT", &["nu"]),
        ("InverseGamma", &["alpha", "beta"]),
        ("FDist", &["d1", "d2"]),
        ("PRR", &["s"]),
        ("VGSym", &["r", "sigma"]),
        ("VG", &["r", "theta", "sigma"]),
        ("GenGamma", &["r", "lambda", "q"]),
        ("Exponential", &["lambda"]),
        ("ChiSq", &["d"]),
    ];

    /// Builds and validates an atom from its name and positional parameters.
    pub fn from_name(name: &str, params: &[Rational]) -> Result<Self> {
        let Some((_, names)) = Self::NAMES.iter().find(|(n, _)| *n == name) else {
            return Err(SteinError::UnsupportedExpression(format!(
                "unknown distribution {name}"
            )));
        };
        if names.len() != params.len() {
            return Err(SteinError::InvalidParameter(format!(
                "{name} takes {} parameters, got {}",
                names.len(),
                params.len()
            )));
        }
        let p = |i: usize| params[i].clone();
        let atom = match name {
            "Normal" => Self::Normal {
                mu: p(0),
                sigma2: p(1),
            },
            "Gamma" => Self::Gamma {
                r: p(0),
                lambda: p(1),
            },
            "Beta" => Self::Beta { a: p(0), b: p(1) },
            "StudentT" => Self::StudentT { nu: p(0) },
            "InverseGamma" => Self::InverseGamma {
                alpha: p(0),
                beta: p(1),
            },
            "FDist" => Self::FDist { d1: p(0), d2: p(1) },
            "PRR" => Self::Prr { s: p(0) },
            "VGSym" => Self::VgSym {
                r: p(0),
                sigma: p(1),
            },
            "VG" => Self::Vg {
                r: p(0),
                theta: p(1),
                sigma: p(2),
            },
            "GenGamma" => Self::GenGamma {
                r: p(0),
                lambda: p(1),
                q: p(2),
            },
            "Exponential" => Self::Exponential { lambda: p(0) },
            "ChiSq" => Self::ChiSq { d: p(0) },
            _ => unreachable!(),
        };
        atom.validate()?;
        Ok(atom)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Normal { .. } => "Normal",
            Self::Gamma { .. } => "Gamma",
            Self::Beta { .. } => "Beta",
            Self::StudentT { .. } => "StudentT",
            Self::InverseGamma { .. } => "InverseGamma",
            Self::FDist { .. } => "FDist",
            Self::Prr { .. } => "PRR",
            Self::VgSym { .. } => "VGSym",
            Self::Vg { .. } => "VG",
            Self::GenGamma { .. } => "GenGamma",
            Self::Exponential { .. } => "Exponential",
            Self::ChiSq { .. } => "ChiSq",
        }
    }

    /// Positional parameters, in the order of [`AtomKind::NAMES`].
    pub fn params(&self) -> Vec<&Rational> {
        match self {
            Self::Normal { mu, sigma2 } => vec![mu, sigma2],
            Self::Gamma { r, lambda } => vec![r, lambda],
            Self::Beta { a, b } => vec![a, b],
            Self::StudentT { nu } => vec![nu],
            Self::InverseGamma { alpha, beta } => vec![alpha, beta],
            Self::FDist { d1, d2 } => vec![d1, d2],
            Self::Prr { s } => vec![s],
            Self::VgSym { r, sigma } => vec![r, sigma],
            Self::Vg { r, theta, sigma } => vec![r, theta, sigma],
            Self::GenGamma { r, lambda, q } => vec![r, lambda, q],
            Self::Exponential { lambda } => vec![lambda],
            Self::ChiSq { d } => vec![d],
        }
    }

    fn param_names(&self) -> &'static [&'static str] {
        Self::NAMES
            .iter()
            .find(|(n, _)| *n == self.name())
            .map(|(_, p)| *p)
            .unwrap()
    }

    /// Checks the parameter constraints of the distribution table.
    pub fn validate(&self) -> Result<()> {
        let positive = |what: &str, v: &Rational| {
            if v.is_positive() {
                Ok(())
            } else {
                Err(SteinError::InvalidParameter(format!(
                    "{}: {what} must be positive, got {}",
                    self.name(),
                    fmt_rational(v)
                )))
            }
        };
        match self {
            Self::Normal { sigma2, .. } => positive("sigma2", sigma2),
            Self::Gamma { r, lambda } => positive("r", r).and(positive("lambda", lambda)),
            Self::Beta { a, b } => positive("a", a).and(positive("b", b)),
            Self::StudentT { nu } => positive("nu", nu),
            Self::InverseGamma { alpha, beta } => {
                positive("alpha", alpha).and(positive("beta", beta))
            }
            Self::FDist { d1, d2 } => positive("d1", d1).and(positive("d2", d2)),
            Self::Prr { s } => {
                if *s > Rational::new(1.into(), 2.into()) {
                    Ok(())
                } else {
                    Err(SteinError::InvalidParameter(format!(
                        "PRR: s must exceed 1/2, got {}",
                        fmt_rational(s)
                    )))
                }
            }
            Self::VgSym { r, sigma } => positive("r", r).and(positive("sigma", sigma)),
            Self::Vg { r, sigma, .. } => positive("r", r).and(positive("sigma", sigma)),
            Self::GenGamma { r, lambda, q } => {
                positive("r", r)?;
                positive("lambda", lambda)?;
                if q.is_integer() && q.is_positive() {
                    Ok(())
                } else {
                    Err(SteinError::InvalidParameter(format!(
                        "GenGamma: q must be a positive integer, got {}",
                        fmt_rational(q)
                    )))
                }
            }
            Self::Exponential { lambda } => positive("lambda", lambda),
            Self::ChiSq { d } => positive("d", d),
        }
    }

    pub fn support(&self) -> Support {
        match self {
            Self::Normal { mu, .. } if mu.is_zero() => Support::Symmetric,
            Self::Normal { .. } => Support::General,
            Self::StudentT { .. } | Self::VgSym { .. } => Support::Symmetric,
            Self::Vg { theta, .. } if theta.is_zero() => Support::Symmetric,
            Self::Vg { .. } => Support::General,
            _ => Support::Positive,
        }
    }

    /// `{"kind": ..., "params": {...}}`.
    pub fn to_json(&self) -> Value {
        let mut params = Map::new();
        for (n, v) in self.param_names().iter().zip(self.params()) {
            params.insert((*n).to_string(), Value::String(fmt_rational(v)));
        }
        serde_json::json!({ "kind": self.name(), "params": params })
    }

    /// Inverse of [`AtomKind::to_json`]; parameters may be strings or integers.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| SteinError::InvalidParameter(format!("atom descriptor: {m}"));
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing kind"))?;
        let names = Self::NAMES
            .iter()
            .find(|(n, _)| *n == kind)
            .map(|(_, p)| *p)
            .ok_or_else(|| {
                SteinError::UnsupportedExpression(format!("unknown distribution {kind}"))
            })?;
        let params = v
            .get("params")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("missing params"))?;
        let mut vals = Vec::new();
        for n in names {
            let raw = params
                .get(*n)
                .ok_or_else(|| bad(&format!("missing parameter {n}")))?;
            let txt = match raw {
                Value::String(s) => s.clone(),
                Value::Number(x) if x.is_i64() => x.to_string(),
                _ => return Err(bad(&format!("parameter {n} must be a rational string"))),
            };
            vals.push(parse_rational(&txt)?);
        }
        Self::from_name(kind, &vals)
    }
}

impl Serialize for AtomKind {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for AtomKind {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(de)?;
        Self::from_json(&v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for AtomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.params().into_iter().map(fmt_rational).collect();
        write!(f, "{}({})", self.name(), ps.join(","))
    }
}

/// Expression tree over independent catalog atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DistExpr {
    Atom(AtomKind),
    /// Product of independent factors.
    Product(Vec<DistExpr>),
    Power(Box<DistExpr>, Rational),
    /// `base + mu`.
    Shift(Box<DistExpr>, Rational),
    /// `c * base`.
    Scale(Box<DistExpr>, Rational),
    /// Sum of `n` independent copies.
    SumIid(Box<DistExpr>, u32),
}

impl DistExpr {
    pub fn atom(a: AtomKind) -> Self {
        Self::Atom(a)
    }

    pub fn product(fs: Vec<DistExpr>) -> Self {
        Self::Product(fs)
    }

    pub fn power(self, g: Rational) -> Self {
        Self::Power(Box::new(self), g)
    }

    pub fn shift(self, mu: Rational) -> Self {
        Self::Shift(Box::new(self), mu)
    }

    pub fn scale(self, c: Rational) -> Self {
        Self::Scale(Box::new(self), c)
    }

    pub fn sum_iid(self, n: u32) -> Self {
        Self::SumIid(Box::new(self), n)
    }

    pub fn support(&self) -> Support {
        match self {
            Self::Atom(a) => a.support(),
            Self::Product(fs) => {
                let mut out = Support::Positive;
                for f in fs {
                    match f.support() {
                        Support::General => return Support::General,
                        Support::Symmetric => out = Support::Symmetric,
                        Support::Positive => {}
                    }
                }
                out
            }
            Self::Power(b, g) => match b.support() {
                Support::Positive => Support::Positive,
                Support::Symmetric if g.is_integer() => {
                    if g.to_integer().is_odd() {
                        Support::Symmetric
                    } else {
                        Support::Positive
                    }
                }
                _ => Support::General,
            },
            Self::Shift(b, mu) if mu.is_zero() => b.support(),
            Self::Shift(..) => Support::General,
            Self::Scale(b, c) => match b.support() {
                Support::Positive if c.is_positive() => Support::Positive,
                Support::Symmetric => Support::Symmetric,
                _ => Support::General,
            },
            Self::SumIid(b, _) => match b.support() {
                Support::General => Support::General,
                s => s,
            },
        }
    }

    /// Checks atom parameters and that powers are applied to suitable bases.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Atom(a) => a.validate(),
            Self::Product(fs) => {
                if fs.is_empty() {
                    return Err(SteinError::UnsupportedExpression("empty product".into()));
                }
                fs.iter().try_for_each(Self::validate)
            }
            Self::Power(b, g) => {
                b.validate()?;
                if g.is_zero() {
                    return Err(SteinError::InvalidParameter("power 0".into()));
                }
                if !g.is_integer() && b.support() != Support::Positive {
                    return Err(SteinError::UnsupportedExpression(format!(
                        "non-integer power {} of {b}, which is not a.s. positive",
                        fmt_rational(g)
                    )));
                }
                Ok(())
            }
            Self::Shift(b, _) => b.validate(),
            Self::Scale(b, c) => {
                if c.is_zero() {
                    return Err(SteinError::InvalidParameter("scale by 0".into()));
                }
                b.validate()
            }
            Self::SumIid(b, n) => {
                if *n == 0 {
                    return Err(SteinError::InvalidParameter("sum of 0 copies".into()));
                }
                b.validate()
            }
        }
    }

    /// Factors of a product, or the expression itself.
    pub fn factors(&self) -> Vec<&DistExpr> {
        match self {
            Self::Product(fs) => fs.iter().collect(),
            e => vec![e],
        }
    }
}

fn fmt_power(g: &Rational) -> String {
    if g.is_integer() {
        g.to_string()
    } else {
        format!("({})", fmt_rational(g))
    }
}

impl fmt::Display for DistExpr {
    /// Renders in the expression grammar; parsing the output gives back the
    /// same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Atom(a) => write!(f, "{a}"),
            Self::Product(fs) => {
                let parts: Vec<String> = fs
                    .iter()
                    .map(|x| match x {
                        Self::Product(_) => format!("({x})"),
                        _ => x.to_string(),
                    })
                    .collect();
                if fs.len() == 1 {
                    write!(f, "({})", parts[0])
                } else {
                    write!(f, "{}", parts.join("*"))
                }
            }
            Self::Power(b, g) => match **b {
                Self::Product(_) | Self::Power(..) => write!(f, "({b})^{}", fmt_power(g)),
                _ => write!(f, "{b}^{}", fmt_power(g)),
            },
            Self::Shift(b, mu) => write!(f, "shift({b},{})", fmt_rational(mu)),
            Self::Scale(b, c) => write!(f, "scale({b},{})", fmt_rational(c)),
            Self::SumIid(b, n) => write!(f, "sum({b},{n})"),
        }
    }
}

impl From<AtomKind> for DistExpr {
    fn from(a: AtomKind) -> Self {
        Self::Atom(a)
    }
}

/// Shorthand constructors used throughout tests and examples.
pub mod atoms {
    use super::*;
    use crate::scalar::int;

    pub fn normal(mu: Rational, sigma2: Rational) -> AtomKind {
        AtomKind::Normal { mu, sigma2 }
    }

    pub fn std_normal() -> AtomKind {
        normal(int(0), int(1))
    }

    pub fn gamma(r: Rational, lambda: Rational) -> AtomKind {
        AtomKind::Gamma { r, lambda }
    }

    pub fn beta(a: Rational, b: Rational) -> AtomKind {
        AtomKind::Beta { a, b }
    }

    pub fn student(nu: Rational) -> AtomKind {
        AtomKind::StudentT { nu }
    }

    pub fn inverse_gamma(alpha: Rational, beta: Rational) -> AtomKind {
        AtomKind::InverseGamma { alpha, beta }
    }

    pub fn f_dist(d1: Rational, d2: Rational) -> AtomKind {
        AtomKind::FDist { d1, d2 }
    }

    pub fn prr(s: Rational) -> AtomKind {
        AtomKind::Prr { s }
    }

    pub fn vg_sym(r: Rational, sigma: Rational) -> AtomKind {
        AtomKind::VgSym { r, sigma }
    }

    pub fn vg(r: Rational, theta: Rational, sigma: Rational) -> AtomKind {
        AtomKind::Vg { r, theta, sigma }
    }

    pub fn gen_gamma(r: Rational, lambda: Rational, q: Rational) -> AtomKind {
        AtomKind::GenGamma { r, lambda, q }
    }

    pub fn exponential(lambda: Rational) -> AtomKind {
        AtomKind::Exponential { lambda }
    }

    pub fn chi_sq(d: Rational) -> AtomKind {
        AtomKind::ChiSq { d }
    }

    /// `DistExpr::Atom` of each argument, multiplied.
    pub fn product_of(atoms: Vec<AtomKind>) -> DistExpr {
        DistExpr::Product(atoms.into_iter().map(DistExpr::Atom).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::atoms::*;
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn json_round_trip() {
        let a = gamma(rat(3, 2), int(2));
        let j = a.to_json();
        assert_eq!(
            j.to_string(),
            r#"{"kind":"Gamma","params":{"lambda":"2","r":"3/2"}}"#
        );
        assert_eq!(AtomKind::from_json(&j).unwrap(), a);
        let parsed: AtomKind =
            serde_json::from_str(r#"{"kind":"Beta","params":{"a":1,"b":"5/2"}}"#).unwrap();
        assert_eq!(parsed, beta(int(1), rat(5, 2)));
    }

    #[test]
    fn constraints_are_enforced() {
        assert!(AtomKind::from_name("Gamma", &[int(0), int(1)]).is_err());
        assert!(AtomKind::from_name("PRR", &[rat(1, 2)]).is_err());
        assert!(AtomKind::from_name("GenGamma", &[int(1), int(1), rat(3, 2)]).is_err());
        assert!(AtomKind::from_name("Gamma", &[int(1)]).is_err());
        assert!(AtomKind::from_name("Cauchy", &[]).is_err());
        assert!(AtomKind::from_name("VG", &[int(2), int(-3), int(1)]).is_ok());
    }

    #[test]
    fn supports() {
        let n = DistExpr::Atom(std_normal());
        let g = DistExpr::Atom(gamma(int(1), int(1)));
        assert_eq!(
            DistExpr::product(vec![n.clone(), g.clone()]).support(),
            Support::Symmetric
        );
        assert_eq!(n.clone().power(int(2)).support(), Support::Positive);
        assert_eq!(n.clone().power(int(-1)).support(), Support::Symmetric);
        assert_eq!(g.clone().shift(int(1)).support(), Support::General);
        assert!(n.power(rat(1, 2)).validate().is_err());
        assert!(g.power(rat(1, 2)).validate().is_ok());
    }

    #[test]
    fn rendering() {
        let e = DistExpr::product(vec![
            DistExpr::Atom(std_normal()),
            DistExpr::Atom(gamma(rat(1, 2), int(1))).power(int(-1)),
            DistExpr::product(vec![DistExpr::Atom(beta(int(1), int(2)))]).power(rat(1, 2)),
        ]);
        assert_eq!(
            e.to_string(),
            "Normal(0,1)*Gamma(1/2,1)^-1*((Beta(1,2)))^(1/2)"
        );
    }
}
