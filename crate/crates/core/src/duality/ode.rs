//! Differential equations satisfied by densities, obtained by integrating a
//! Stein identity by parts.

use std::fmt;

use num_traits::{One, Signed};
use serde_json::{json, Value};

use crate::error::Result;
use crate::scalar::{fmt_rational, int, Rational};
use crate::{AssumptionOneForm, EulerPoly, ExpandedOp};

type Poly = EulerPoly<Rational>;
type Form = AssumptionOneForm<Rational>;

/// `L(theta) p - b x^q K(theta) p = 0`, stored in the same normalized shape
/// as a two-group operator (`K` monic).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityODE {
    form: Form,
    /// `(-1)^(m+n)` for the operator it was derived from.
    sign: i8,
}

impl DensityODE {
    /// Wraps an existing form as an ODE; `sign` is recorded as given.
    pub fn from_form(form: Form, sign: i8) -> Self {
        Self { form, sign }
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    /// `(-1)^(m+n)` of the Stein operator this ODE came from.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn l(&self) -> &Poly {
        self.form.l()
    }

    pub fn k(&self) -> &Poly {
        self.form.k()
    }

    pub fn b(&self) -> &Rational {
        self.form.b()
    }

    pub fn q(&self) -> u32 {
        self.form.q()
    }

    /// The operator acting on `p`.
    pub fn expand(&self) -> ExpandedOp<Rational> {
        self.form.expand()
    }

    /// Same equation divided through so that `L` is monic.
    pub fn with_monic_l(&self) -> Self {
        Self {
            form: self.form.with_monic_l(),
            sign: self.sign,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ode": self.to_string(),
            "L": self.form.l().factored_text(),
            "b": fmt_rational(self.form.b()),
            "q": self.form.q(),
            "K": self.form.k().factored_text(),
            "sign": self.sign,
            "expanded": self.expand().to_string(),
        })
    }
}

impl fmt::Display for DensityODE {
    /// `T_{0} T_{1/2} p - 3 x^2 T_{4} p = 0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.form.b();
        let sign = if b.is_negative() { "+" } else { "-" };
        let mag = b.abs();
        let c = if mag.is_one() {
            String::new()
        } else {
            format!("{} ", fmt_rational(&mag))
        };
        let xq = if self.form.q() == 1 {
            "x".to_string()
        } else {
            format!("x^{}", self.form.q())
        };
        let k = self.form.k().factored_text();
        let k = if k == "1" {
            String::new()
        } else {
            format!(" {k}")
        };
        write!(
            f,
            "{} p {sign} {c}{xq}{k} p = 0",
            self.form.l().factored_text()
        )
    }
}

/// Density equation dual to `L(theta) - b M^q K(theta)`:
/// `L*(theta) p - b (-1)^(m+n) x^q K*(theta) p = 0` with
/// `L*(theta) = (-1)^n L(-theta - 1)` and `K*(theta) = (-1)^m K(-theta - q - 1)`,
/// so that each factor `T_r` of `L` becomes `T_{1-r}` and each `T_a` of `K`
/// becomes `T_{q+1-a}`.
pub fn dual_ode(a: &Form) -> Result<DensityODE> {
    let (n, m) = (a.n(), a.m());
    let q = int(i64::from(a.q()));
    let sgn = |d: usize| if d.is_multiple_of(2) { int(1) } else { int(-1) };
    let l = a.l().substitute_affine(&int(-1), &int(-1)).scale(&sgn(n));
    let k = a
        .k()
        .substitute_affine(&int(-1), &(-q - int(1)))
        .scale(&sgn(m));
    let sign = sgn(n + m);
    let form = Form::new(l, a.b() * &sign, a.q(), k)?;
    Ok(DensityODE {
        form,
        sign: if sign.is_one() { 1 } else { -1 },
    })
}

/// Applies the dual construction to an ODE viewed as an operator; inverts
/// [`dual_ode`].
pub fn dual_of_ode(o: &DensityODE) -> Result<Form> {
    Ok(dual_ode(&o.form)?.form)
}
