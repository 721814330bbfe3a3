//! Operators of the two-group shape `L(theta) - b M^q K(theta)`.

use std::fmt;

use num_traits::{One, Signed};

use crate::error::{Result, SteinError};
use crate::operator::{EulerPoly, ExpandedOp};
use crate::scalar::{fmt_rational, Rational, Scalar};

/// `L(theta) - b M^q K(theta)` with `q >= 1`, `b != 0` and `K` monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AssumptionOneForm<S = Rational> {
    l: EulerPoly<S>,
    b: S,
    q: u32,
    k: EulerPoly<S>,
}

impl<S: Scalar> AssumptionOneForm<S> {
    /// Normalizes so that `K` is monic, moving its leading coefficient into `b`.
    pub fn new(l: EulerPoly<S>, b: S, q: u32, k: EulerPoly<S>) -> Result<Self> {
        if q == 0 {
            return Err(SteinError::Degenerate("q must be positive".into()));
        }
        if l.is_zero() {
            return Err(SteinError::Degenerate("L is zero".into()));
        }
        if b.is_zero() || k.is_zero() {
            return Err(SteinError::Degenerate("b K is zero".into()));
        }
        let lead = k.leading().unwrap().clone();
        Ok(Self {
            l,
            b: b * lead.clone(),
            q,
            k: k.scale(&(S::one() / lead)),
        })
    }

    pub fn l(&self) -> &EulerPoly<S> {
        &self.l
    }

    pub fn b(&self) -> &S {
        &self.b
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn k(&self) -> &EulerPoly<S> {
        &self.k
    }

    /// `b K` as one polynomial.
    pub fn bk(&self) -> EulerPoly<S> {
        self.k.scale(&self.b)
    }

    /// Number of T-factors of `L` (its degree).
    pub fn n(&self) -> usize {
        self.l.deg0()
    }

    /// Number of T-factors of `K` (its degree).
    pub fn m(&self) -> usize {
        self.k.deg0()
    }

    pub fn expand(&self) -> ExpandedOp<S> {
        self.l.to_expanded() - self.bk().to_expanded().left_mul_m(self.q)
    }

    /// Same operator with `L` monic.
    pub fn with_monic_l(&self) -> Self {
        let c = self.l.leading().unwrap().clone();
        Self {
            l: self.l.monic(),
            b: self.b.clone() / c,
            q: self.q,
            k: self.k.clone(),
        }
    }

    /// Multiplies the whole operator by a nonzero scalar.
    pub fn scale(&self, c: &S) -> Self {
        Self {
            l: self.l.scale(c),
            b: self.b.clone() * c.clone(),
            q: self.q,
            k: self.k.clone(),
        }
    }
}

impl AssumptionOneForm<Rational> {
    /// Text with `L` and `K` factored over the rationals.
    pub fn factored_text(&self) -> String {
        let sign = if self.b.is_negative() { "+" } else { "-" };
        let mag = self.b.abs();
        let b = if mag.is_one() {
            String::new()
        } else {
            format!("{} ", fmt_rational(&mag))
        };
        let mq = if self.q == 1 {
            "M".to_string()
        } else {
            format!("M^{}", self.q)
        };
        let k = self.k.factored_text();
        let k = if k == "1" {
            String::new()
        } else {
            format!(" {k}")
        };
        format!("{} {sign} {b}{mq}{k}", self.l.factored_text())
    }
}

impl<S: Scalar> fmt::Display for AssumptionOneForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] - ({}) M^{} [{}]", self.l, self.b, self.q, self.k)
    }
}

impl<S: Scalar> fmt::Debug for AssumptionOneForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AssumptionOneForm({self})")
    }
}

/// Result of [`detect_assumption1`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Detected<S: Scalar = Rational> {
    pub form: AssumptionOneForm<S>,
    /// Smaller degree offset `d2` of the input. If `d2 >= 0` the input equals
    /// `form ∘ M^d2`; otherwise `input ∘ M^(-d2)` equals `form`.
    pub right_shift: i64,
}

/// Recognizes `L(theta) - b M^q K(theta)` up to a right factor `M^d`.
///
/// Terms are grouped by `j - i`; exactly two groups must be present.
pub fn detect_assumption1<S: Scalar>(op: &ExpandedOp<S>) -> Result<Detected<S>> {
    let groups = op.offset_groups();
    match groups.len() {
        0 => return Err(SteinError::Degenerate("zero operator".into())),
        1 => {
            return Err(SteinError::Degenerate(
                "only one degree offset is present".into(),
            ))
        }
        2 => {}
        n => return Err(SteinError::NotAssumptionOne(n)),
    }
    let d2 = *groups.keys().next().unwrap();
    let d1 = *groups.keys().next_back().unwrap();
    let lift = if d2 < 0 { (-d2) as u32 } else { 0 };
    let work = if lift > 0 {
        op.compose(&ExpandedOp::monomial(0, lift, S::one()))
    } else {
        op.clone()
    };
    let groups = work.offset_groups();
    let e2 = d2 + lift as i64;
    let e1 = d1 + lift as i64;
    let p = group_poly(&groups[&e1], e1 as u32);
    let qpoly = group_poly(&groups[&e2], e2 as u32);
    // M^e1 P + M^e2 Q = [Q(theta - e2) + M^q P(theta - e2)] M^e2
    let back = -S::of_i64(e2);
    let l = qpoly.shift(&back);
    let bk = -p.shift(&back);
    let form = AssumptionOneForm::new(l, S::one(), (e1 - e2) as u32, bk)?;
    Ok(Detected {
        form,
        right_shift: d2,
    })
}

/// Group with offset `d >= 0`, written as `M^d P(theta)`; returns `P`.
fn group_poly<S: Scalar>(group: &ExpandedOp<S>, d: u32) -> EulerPoly<S> {
    let diag = ExpandedOp::from_terms(group.terms().map(|(&(i, j), c)| (i, j - d, c.clone())));
    EulerPoly::from_diagonal(&diag).expect("terms share one offset")
}
