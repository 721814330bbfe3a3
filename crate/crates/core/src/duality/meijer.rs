//! Meijer G candidates for densities, identities on their parameters, and
//! their Mellin transforms.
//!
//! A [`GParams`] value stands for the function
//! `x -> z^e G^{m,n}_{p,q}(z | a_1..a_p ; b_1..b_q)` with `z = c x^P`,
//! up to a constant factor.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::catalog::Support;
use crate::duality::{Affine, DensityODE, GammaProductExpr as G};
use crate::error::{Result, SteinError};
use crate::scalar::{fmt_rational, int, parse_rational, pow_i, Rational};
use crate::{AssumptionOneForm, EulerPoly};

type Poly = EulerPoly<Rational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GParams {
    pub m: usize,
    pub n: usize,
    /// `a_1..a_p`; the first `n` are the ones entering `Gamma(1 - a - s)`.
    pub upper: Vec<Rational>,
    /// `b_1..b_q`; the first `m` are the ones entering `Gamma(b + s)`.
    pub lower: Vec<Rational>,
    /// `c` in `z = c x^P`.
    pub prefactor: Rational,
    /// `P` in `z = c x^P`.
    pub power: Rational,
    /// `e` in the factor `z^e`.
    pub outer_exponent: Rational,
}

impl GParams {
    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.m > self.q() || self.n > self.p() {
            return Err(SteinError::InvalidParameter(format!(
                "orders m = {}, n = {} exceed q = {}, p = {}",
                self.m,
                self.n,
                self.q(),
                self.p()
            )));
        }
        if self.prefactor.is_zero() || self.power.is_zero() {
            return Err(SteinError::InvalidParameter(
                "zero argument prefactor or power".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let list = |v: &[Rational]| v.iter().map(fmt_rational).collect::<Vec<_>>();
        json!({
            "m": self.m,
            "n": self.n,
            "p": self.p(),
            "q": self.q(),
            "upper": list(&self.upper),
            "lower": list(&self.lower),
            "arg": {
                "prefactor": fmt_rational(&self.prefactor),
                "power": fmt_rational(&self.power),
            },
            "outer_exponent": fmt_rational(&self.outer_exponent),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| SteinError::Parse {
            pos: 0,
            msg: format!("GParams JSON: bad or missing {what}"),
        };
        let rat_at = |v: &Value, what: &str| -> Result<Rational> {
            match v {
                Value::String(s) => parse_rational(s),
                Value::Number(n) => n.as_i64().map(int).ok_or_else(|| bad(what)),
                _ => Err(bad(what)),
            }
        };
        let list = |key: &str| -> Result<Vec<Rational>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| bad(key))?
                .iter()
                .map(|x| rat_at(x, key))
                .collect()
        };
        let usize_at = |key: &str| -> Result<usize> {
            v.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| bad(key))
        };
        let arg = v.get("arg").ok_or_else(|| bad("arg"))?;
        let g = Self {
            m: usize_at("m")?,
            n: usize_at("n")?,
            upper: list("upper")?,
            lower: list("lower")?,
            prefactor: rat_at(
                arg.get("prefactor").ok_or_else(|| bad("prefactor"))?,
                "prefactor",
            )?,
            power: rat_at(arg.get("power").ok_or_else(|| bad("power"))?, "power")?,
            outer_exponent: match v.get("outer_exponent") {
                Some(e) => rat_at(e, "outer_exponent")?,
                None => Rational::zero(),
            },
        };
        if usize_at("p").is_ok_and(|p| p != g.p()) || usize_at("q").is_ok_and(|q| q != g.q()) {
            return Err(bad("p/q (do not match the parameter lists)"));
        }
        g.validate()?;
        Ok(g)
    }
}

impl fmt::Display for GParams {
    /// `z^(-1/2) G^{1,1}_{1,1}(1/3 x^2 | 1/2 ; 0)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Rational]| {
            if v.is_empty() {
                "-".to_string()
            } else {
                v.iter().map(fmt_rational).collect::<Vec<_>>().join(", ")
            }
        };
        if !self.outer_exponent.is_zero() {
            write!(f, "z^({}) ", fmt_rational(&self.outer_exponent))?;
        }
        let pw = if self.power.is_one() {
            "x".to_string()
        } else {
            format!("x^({})", fmt_rational(&self.power))
        };
        write!(
            f,
            "G^{{{},{}}}_{{{},{}}}({} {pw} | {} ; {})",
            self.m,
            self.n,
            self.p(),
            self.q(),
            fmt_rational(&self.prefactor),
            list(&self.upper),
            list(&self.lower)
        )
    }
}

/// How to pick the orders `(m, n)` of the G-function among the solutions
/// of the density equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderChoice {
    /// Every lower parameter in the `Gamma(b + s)` group, no upper ones in
    /// the `Gamma(1 - a - s)` group.
    Positive,
    /// Every lower and every upper parameter in the numerator groups.
    Symmetric,
    Explicit {
        m: usize,
        n: usize,
    },
}

impl OrderChoice {
    pub fn for_support(s: Support) -> Self {
        match s {
            Support::Symmetric => Self::Symmetric,
            _ => Self::Positive,
        }
    }
}

/// Parameters of `T`-factors of a polynomial that splits over the rationals.
fn split(p: &Poly, what: &str) -> Result<(Rational, Vec<Rational>)> {
    let f = p.factor();
    if f.rest.deg0() > 0 {
        return Err(SteinError::Unsupported(format!(
            "{what} = {} does not split into T factors",
            p.factored_text()
        )));
    }
    Ok((f.constant, f.t_params))
}

/// G-function candidate solving `o`.
///
/// With `L* = c prod T_{1-r_i}` (`N` factors) and `K* = prod T_{q+1-a_j}`
/// (`M` factors), the substitution `z = kappa x^q` turns the equation into the
/// G-function equation with lower parameters `(r_i - 1)/q`, upper parameters
/// `(a_j - 1)/q` and `kappa = b (-1)^(N + m + n) q^(M - N) / c` where `b` is
/// the constant of the original Stein operator.
pub fn gparams_from_ode(o: &DensityODE, choice: OrderChoice) -> Result<GParams> {
    let (c, ld) = split(o.l(), "L")?;
    let (_, kd) = split(o.k(), "K")?;
    let q = int(i64::from(o.q()));
    let lower: Vec<Rational> = ld.iter().map(|s| -s / &q).collect();
    let upper: Vec<Rational> = kd.iter().map(|s| (&q - s) / &q).collect();
    let (nl, nk) = (lower.len(), upper.len());
    let (m, n) = match choice {
        OrderChoice::Positive => (nl, 0),
        OrderChoice::Symmetric => (nl, nk),
        OrderChoice::Explicit { m, n } => (m, n),
    };
    // the ODE constant is b (-1)^(N+M); undo that sign to recover b
    let b = o.b() * sign(nl + nk);
    let prefactor = b * sign(nl + m + n) * pow_i(&q, nk as i64 - nl as i64) / c;
    let g = GParams {
        m,
        n,
        upper,
        lower,
        prefactor,
        power: q,
        outer_exponent: Rational::zero(),
    };
    g.validate()?;
    let back = gparams_to_ode(&g)?;
    if back.with_monic_l().form() != o.with_monic_l().form() {
        return Err(SteinError::Degenerate(format!(
            "candidate {g} does not satisfy {o}"
        )));
    }
    Ok(g)
}

fn sign(k: usize) -> Rational {
    if k.is_multiple_of(2) {
        int(1)
    } else {
        int(-1)
    }
}

/// The equation satisfied by the candidate, from the G-function equation
/// `(-1)^(p-m-n) z prod T_{1-a_j} f - prod T_{-b_j} f = 0` and `z = c x^P`.
/// Requires a positive integer power and no outer factor.
pub fn gparams_to_ode(g: &GParams) -> Result<DensityODE> {
    g.validate()?;
    if !g.outer_exponent.is_zero() || !g.power.is_integer() || !g.power.is_positive() {
        return Err(SteinError::Unsupported(
            "equation only for z = c x^P with integer P > 0 and no outer power".into(),
        ));
    }
    let pw = &g.power;
    let l = Poly::t_product(g.lower.iter().map(|b| -(b * pw)).collect::<Vec<_>>().iter());
    let k = Poly::t_product(
        g.upper
            .iter()
            .map(|a| (int(1) - a) * pw)
            .collect::<Vec<_>>()
            .iter(),
    );
    let e = g.p() as i64 - g.m as i64 - g.n as i64;
    let b = sign(e.unsigned_abs() as usize) * &g.prefactor * pow_i(pw, g.q() as i64 - g.p() as i64);
    let qq: u32 = pw
        .to_integer()
        .try_into()
        .map_err(|_| SteinError::Unsupported("power too large".into()))?;
    let s = sign(g.p() + g.q());
    Ok(DensityODE::from_form(
        AssumptionOneForm::new(l, b, qq, k)?,
        if s.is_one() { 1 } else { -1 },
    ))
}

/// Named identities on G-function parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GIdentity {
    /// Cancel an upper parameter from the last `p - n` against an equal lower
    /// parameter from the first `m` (or the mirrored pairing).
    Reduce,
    /// `z^c G(z | a ; b) = G(z | a + c ; b + c)`.
    Shift(Rational),
    /// `G^{m,n}_{p,q}(z | a ; b) = G^{n,m}_{q,p}(1/z | 1 - b ; 1 - a)`.
    Invert,
}

/// Applies `which`; the flag is `false` when a reduction found nothing to
/// cancel and the parameters are returned unchanged.
pub fn g_identities(g: &GParams, which: &GIdentity) -> Result<(GParams, bool)> {
    g.validate()?;
    let mut out = g.clone();
    match which {
        GIdentity::Shift(c) => {
            out.upper.iter_mut().for_each(|a| *a += c);
            out.lower.iter_mut().for_each(|b| *b += c);
            out.outer_exponent -= c;
            Ok((out, true))
        }
        GIdentity::Invert => {
            out.m = g.n;
            out.n = g.m;
            out.upper = g.lower.iter().map(|b| int(1) - b).collect();
            out.lower = g.upper.iter().map(|a| int(1) - a).collect();
            out.prefactor = int(1) / &g.prefactor;
            out.power = -g.power.clone();
            out.outer_exponent = -g.outer_exponent.clone();
            Ok((out, true))
        }
        GIdentity::Reduce => {
            for j in g.n..g.p() {
                if let Some(i) = (0..g.m).find(|&i| g.lower[i] == g.upper[j]) {
                    out.upper.remove(j);
                    out.lower.remove(i);
                    out.m -= 1;
                    return Ok((out, true));
                }
            }
            for j in 0..g.n {
                if let Some(i) = (g.m..g.q()).find(|&i| g.lower[i] == g.upper[j]) {
                    out.upper.remove(j);
                    out.lower.remove(i);
                    out.n -= 1;
                    return Ok((out, true));
                }
            }
            Ok((out, false))
        }
    }
}

/// Checks the conditions under which the integration formula is known to
/// hold: `n = 0`, `p + 1 <= m <= q`, positive prefactor.
pub fn mellin_validity(g: &GParams) -> Result<()> {
    let mut why = Vec::new();
    if g.n != 0 {
        why.push(format!("n = {} is not 0", g.n));
    }
    if g.p() + 1 > g.m || g.m > g.q() {
        why.push(format!(
            "need p + 1 <= m <= q, have p = {}, m = {}, q = {}",
            g.p(),
            g.m,
            g.q()
        ));
    }
    if !g.prefactor.is_positive() {
        why.push("prefactor is not positive".into());
    }
    if why.is_empty() {
        Ok(())
    } else {
        Err(SteinError::ValidityViolated(why.join("; ")))
    }
}

/// `int_0^inf x^(s-1) z^e G(z) dx` with `z = c x^P`, doubled for a density
/// symmetric about 0. Refuses parameters outside [`mellin_validity`]
/// unless `force` is set.
pub fn g_mellin(g: &GParams, support: Support, force: bool) -> Result<G> {
    g.validate()?;
    if !force {
        mellin_validity(g)?;
    }
    if !g.prefactor.is_positive() {
        return Err(SteinError::ValidityViolated(
            "prefactor is not positive".into(),
        ));
    }
    if support == Support::General {
        return Err(SteinError::UnsupportedExpression(
            "Mellin transform needs positive or symmetric support".into(),
        ));
    }
    // with u = s/P + e the integral is c^(-s/P) / |P| * gamma ratio at u
    let inv_p = int(1) / &g.power;
    let u = Affine::new(inv_p.clone(), g.outer_exponent.clone());
    let neg_u = u.scale(&int(-1));
    let mut out = G::constant(inv_p.abs()).mul(&G::power(
        &g.prefactor,
        Affine::new(-inv_p, Rational::zero()),
    ));
    if support == Support::Symmetric {
        out = out.mul(&G::constant(int(2)));
    }
    for (i, b) in g.lower.iter().enumerate() {
        if i < g.m {
            out = out.mul(&G::gamma(u.plus(b)));
        } else {
            out = out.div(&G::gamma(neg_u.plus(&(int(1) - b))));
        }
    }
    for (j, a) in g.upper.iter().enumerate() {
        if j < g.n {
            out = out.mul(&G::gamma(neg_u.plus(&(int(1) - a))));
        } else {
            out = out.div(&G::gamma(u.plus(a)));
        }
    }
    Ok(out.canonical())
}

/// Divides a Mellin transform by its value at `s = 1`, turning the
/// transform of an unnormalized candidate into that of a density.
pub fn normalize_mellin(m: &G) -> G {
    m.div(&m.at(&int(1))).canonical()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::{dual_ode, gamma_expr_equal, Equality};
    use crate::precision::Precision;
    use crate::scalar::rat;

    type Form = AssumptionOneForm<Rational>;

    fn t(r: Rational) -> Poly {
        Poly::t(r)
    }

    #[test]
    fn gamma_candidate() {
        // Gamma(r, lambda): G^{1,0}_{0,1}(lambda x | - ; r - 1)
        let (r, lam) = (rat(5, 2), int(3));
        let o = dual_ode(&Form::new(t(r.clone()), lam.clone(), 1, Poly::one()).unwrap()).unwrap();
        let g = gparams_from_ode(&o, OrderChoice::Positive).unwrap();
        assert_eq!((g.m, g.n, g.p(), g.q()), (1, 0, 0, 1));
        assert_eq!(g.lower, vec![&r - int(1)]);
        assert_eq!(g.prefactor, lam);
        assert_eq!(g.to_string(), "G^{1,0}_{0,1}(3 x | - ; 3/2)");
        // its Mellin transform, normalized, is the Gamma one
        let mg = normalize_mellin(&g_mellin(&g, Support::Positive, false).unwrap());
        let want = crate::catalog::mellin(&crate::catalog::atoms::gamma(r, lam).into()).unwrap();
        let cmp = gamma_expr_equal(
            &mg,
            &want,
            &crate::duality::default_probes(),
            Precision::default(),
        )
        .unwrap();
        assert_eq!(cmp.verdict, Equality::StructurallyEqual);
    }

    #[test]
    fn exponential_pattern() {
        let g = GParams {
            m: 1,
            n: 0,
            upper: vec![],
            lower: vec![int(0)],
            prefactor: int(1),
            power: int(1),
            outer_exponent: int(0),
        };
        let mg = g_mellin(&g, Support::Positive, false).unwrap();
        assert_eq!(mg, G::gamma(Affine::s()));
    }

    #[test]
    fn shift_round_trip_and_invert_involution() {
        let g = GParams {
            m: 2,
            n: 1,
            upper: vec![rat(1, 3), int(2)],
            lower: vec![int(0), rat(-1, 2), int(4)],
            prefactor: rat(2, 7),
            power: int(2),
            outer_exponent: int(0),
        };
        let (s, _) = g_identities(&g, &GIdentity::Shift(rat(3, 4))).unwrap();
        let (back, _) = g_identities(&s, &GIdentity::Shift(rat(-3, 4))).unwrap();
        assert_eq!(back, g);
        let (i, _) = g_identities(&g, &GIdentity::Invert).unwrap();
        assert_eq!((i.m, i.n, i.p(), i.q()), (1, 2, 3, 2));
        assert_eq!(g_identities(&i, &GIdentity::Invert).unwrap().0, g);
    }

    #[test]
    fn reduce_cancels_matching_pair() {
        let g = GParams {
            m: 2,
            n: 0,
            upper: vec![int(3)],
            lower: vec![int(1), int(3)],
            prefactor: int(1),
            power: int(1),
            outer_exponent: int(0),
        };
        let (r, hit) = g_identities(&g, &GIdentity::Reduce).unwrap();
        assert!(hit);
        assert_eq!((r.m, r.p(), r.q()), (1, 0, 1));
        assert_eq!(r.lower, vec![int(1)]);
        let (same, hit) = g_identities(&r, &GIdentity::Reduce).unwrap();
        assert!(!hit);
        assert_eq!(same, r);
        // the reduced and unreduced transforms agree
        let a = g_mellin(&g, Support::Positive, true).unwrap();
        let b = g_mellin(&r, Support::Positive, false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn validity_is_enforced() {
        let g = GParams {
            m: 1,
            n: 1,
            upper: vec![int(0)],
            lower: vec![int(0)],
            prefactor: int(1),
            power: int(2),
            outer_exponent: int(0),
        };
        assert!(matches!(
            g_mellin(&g, Support::Positive, false),
            Err(SteinError::ValidityViolated(_))
        ));
        assert!(g_mellin(&g, Support::Positive, true).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let g = GParams {
            m: 1,
            n: 1,
            upper: vec![rat(-1, 2)],
            lower: vec![int(0)],
            prefactor: rat(1, 3),
            power: int(2),
            outer_exponent: rat(1, 2),
        };
        let v = g.to_json();
        assert_eq!(v["arg"]["prefactor"], "1/3");
        assert_eq!(GParams::from_json(&v).unwrap(), g);
    }
}
