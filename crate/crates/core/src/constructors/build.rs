//! Bottom-up construction of an operator for a whole expression tree.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::{
    iid_pair_operator, inverse_operator, level_for_power, noncentered_normal_product,
    power_operator, product_operator, raise_power_level, reduce_shared_factors, scale_form,
    sum_iid_operator, translate, Form, Op, Poly, TFactor,
};
use crate::catalog::{stein_operator, AtomKind, DistExpr, SteinOperator};
use crate::error::{Result, SteinError};
use crate::scalar::{fmt_rational, int, Rational};

/// One construction rule. Inputs refer to earlier steps by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Atom(AtomKind),
    RaiseLevel {
        input: usize,
        k: u32,
    },
    Product {
        left: usize,
        right: usize,
    },
    Power {
        input: usize,
        gamma: Rational,
    },
    Inverse {
        input: usize,
    },
    Scale {
        input: usize,
        c: Rational,
    },
    Translate {
        input: usize,
        mu: Rational,
    },
    SumIid {
        input: usize,
        n: u32,
    },
    IidPair {
        alpha: Rational,
        beta: Rational,
        a: TFactor,
        b: TFactor,
    },
    NoncenteredNormal {
        mu_x: Rational,
        mu_y: Rational,
    },
    /// `output ∘ cancelled(theta)` equals the input.
    Reduce {
        input: usize,
        cancelled: Poly,
    },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Atom(_) => "atom",
            Self::RaiseLevel { .. } => "raise_power_level",
            Self::Product { .. } => "product",
            Self::Power { .. } => "power",
            Self::Inverse { .. } => "inverse",
            Self::Scale { .. } => "scale",
            Self::Translate { .. } => "shift",
            Self::SumIid { .. } => "sum_iid",
            Self::IidPair { .. } => "iid_pair_product",
            Self::NoncenteredNormal { .. } => "noncentered_normal_product",
            Self::Reduce { .. } => "reduce_shared_factors",
        }
    }

    fn inputs(&self) -> Vec<usize> {
        match self {
            Self::Product { left, right } => vec![*left, *right],
            Self::RaiseLevel { input, .. }
            | Self::Power { input, .. }
            | Self::Inverse { input }
            | Self::Scale { input, .. }
            | Self::Translate { input, .. }
            | Self::SumIid { input, .. }
            | Self::Reduce { input, .. } => vec![*input],
            Self::Atom(_) | Self::IidPair { .. } | Self::NoncenteredNormal { .. } => vec![],
        }
    }

    fn params(&self) -> Value {
        let r = |q: &Rational| json!(fmt_rational(q));
        match self {
            Self::Atom(a) => a.to_json(),
            Self::RaiseLevel { k, .. } => json!({ "k": k }),
            Self::Power { gamma, .. } => json!({ "gamma": r(gamma) }),
            Self::Scale { c, .. } => json!({ "c": r(c) }),
            Self::Translate { mu, .. } => json!({ "mu": r(mu) }),
            Self::SumIid { n, .. } => json!({ "n": n }),
            Self::IidPair { alpha, beta, a, b } => json!({
                "alpha": r(alpha), "beta": r(beta), "a": a.to_json(), "b": b.to_json(),
            }),
            Self::NoncenteredNormal { mu_x, mu_y } => json!({ "mu_x": r(mu_x), "mu_y": r(mu_y) }),
            Self::Reduce { cancelled, .. } => json!({ "substitution": cancelled.factored_text() }),
            Self::Product { .. } | Self::Inverse { .. } => json!({}),
        }
    }

    /// Evaluates the rule given the outputs of the earlier steps.
    fn apply(&self, prior: &[SteinOperator]) -> Result<SteinOperator> {
        let form_of = |i: usize| {
            prior[i].form().cloned().ok_or_else(|| {
                SteinError::UnsupportedExpression(format!(
                    "{} needs a two-group operator, step {i} is {}",
                    self.name(),
                    prior[i]
                ))
            })
        };
        Ok(match self {
            Self::Atom(a) => stein_operator(a)?,
            Self::RaiseLevel { input, k } => {
                SteinOperator::Form(raise_power_level(&form_of(*input)?, *k)?)
            }
            Self::Product { left, right } => {
                SteinOperator::Form(product_operator(&form_of(*left)?, &form_of(*right)?)?)
            }
            Self::Power { input, gamma } => {
                SteinOperator::Form(power_operator(&form_of(*input)?, gamma)?)
            }
            Self::Inverse { input } => SteinOperator::Form(inverse_operator(&form_of(*input)?)?),
            Self::Scale { input, c } => match &prior[*input] {
                SteinOperator::Form(f) => SteinOperator::Form(scale_form(f, c)?),
                SteinOperator::Expanded(op) => SteinOperator::Expanded(op.rescale_variable(c)),
            },
            Self::Translate { input, mu } => {
                SteinOperator::Expanded(translate(&prior[*input].expand(), mu))
            }
            Self::SumIid { input, n } => {
                SteinOperator::Expanded(sum_iid_operator(&prior[*input].expand(), *n)?)
            }
            Self::IidPair { alpha, beta, a, b } => {
                SteinOperator::Expanded(iid_pair_operator(alpha, beta, a, b)?)
            }
            Self::NoncenteredNormal { mu_x, mu_y } => {
                SteinOperator::Expanded(noncentered_normal_product(mu_x, mu_y))
            }
            Self::Reduce { input, .. } => {
                SteinOperator::Form(reduce_shared_factors(&form_of(*input)?)?.0)
            }
        })
    }
}

/// A rule together with the operator it produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub output: SteinOperator,
}

/// Ordered record of every rule applied by [`build_for_expression`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstructionTrace {
    pub steps: Vec<Step>,
}

impl ConstructionTrace {
    fn push(&mut self, rule: Rule) -> Result<usize> {
        let output = rule.apply(&self.outputs())?;
        self.steps.push(Step { rule, output });
        Ok(self.steps.len() - 1)
    }

    fn outputs(&self) -> Vec<SteinOperator> {
        self.steps.iter().map(|s| s.output.clone()).collect()
    }

    /// Operator of the last step.
    pub fn result(&self) -> Option<Op> {
        self.steps.last().map(|s| s.output.expand())
    }

    /// Recomputes every step from its rule and checks it against the
    /// recorded output. Returns the final operator.
    pub fn replay(&self) -> Result<Op> {
        let mut done: Vec<SteinOperator> = Vec::new();
        for (i, s) in self.steps.iter().enumerate() {
            if s.rule.inputs().iter().any(|&j| j >= i) {
                return Err(SteinError::Degenerate(format!("step {i} refers forward")));
            }
            let out = s.rule.apply(&done)?;
            if out != s.output {
                return Err(SteinError::Degenerate(format!("step {i} does not replay")));
            }
            done.push(out);
        }
        done.last()
            .map(SteinOperator::expand)
            .ok_or_else(|| SteinError::Degenerate("empty trace".into()))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.steps
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    json!({
                        "step": i,
                        "rule": s.rule.name(),
                        "inputs": s.rule.inputs(),
                        "params": s.rule.params(),
                        "output": s.output.to_string(),
                        "expanded": s.output.expand().to_string(),
                    })
                })
                .collect(),
        )
    }

    /// One line per step, for human-readable output.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            let inputs: Vec<String> = s.rule.inputs().iter().map(|j| format!("#{j}")).collect();
            let params = s.rule.params();
            let params = match &params {
                Value::Object(m) if m.is_empty() => String::new(),
                p => format!(" {p}"),
            };
            out.push_str(&format!(
                "#{i} {}({}){params} => {}\n",
                s.rule.name(),
                inputs.join(", "),
                s.output
            ));
        }
        out
    }
}

/// Builds an operator for `e` bottom-up and records every step.
///
/// Products fold left to right; a product of two identical factors whose
/// operator has the shape `M - alpha T_a - beta T_b D` (non-centered normals,
/// shifted gammas, skewed variance-gamma) uses the iid pair rule, and two
/// unit-variance normals with different means use the fourth-order rule.
/// Common factors of `L` and `K` are cancelled last, unless that would
/// leave no derivative at all (as for the Cauchy operator `(1 + M^2) T_1`).
pub fn build_for_expression(e: &DistExpr) -> Result<(Op, ConstructionTrace)> {
    e.validate()?;
    let mut trace = ConstructionTrace::default();
    let last = build(e, &mut trace)?;
    if let SteinOperator::Form(f) = &trace.steps[last].output {
        let (red, g) = reduce_shared_factors(f)?;
        // cancelling everything would leave a multiplication operator
        if g.deg0() > 0 && red.n().max(red.m()) > 0 {
            trace.push(Rule::Reduce {
                input: last,
                cancelled: g,
            })?;
        }
    }
    let op = trace.result().expect("nonempty trace");
    Ok((op, trace))
}

fn unsupported(e: &DistExpr, why: &str) -> SteinError {
    SteinError::UnsupportedExpression(format!("{why}: {e}"))
}

fn require_form(trace: &ConstructionTrace, i: usize, e: &DistExpr) -> Result<Form> {
    trace.steps[i]
        .output
        .form()
        .cloned()
        .ok_or_else(|| unsupported(e, "operator is not of the form L(theta) - b M^q K(theta)"))
}

fn build(e: &DistExpr, trace: &mut ConstructionTrace) -> Result<usize> {
    match e {
        DistExpr::Atom(a) => trace.push(Rule::Atom(a.clone())),
        DistExpr::Product(fs) if fs.len() == 1 => build(&fs[0], trace),
        DistExpr::Product(fs) => {
            if fs.len() == 2 {
                if let Some(rule) = special_pair(&fs[0], &fs[1])? {
                    return trace.push(rule);
                }
            }
            let mut acc = build(&fs[0], trace)?;
            require_form(trace, acc, &fs[0])?;
            for f in &fs[1..] {
                let j = build(f, trace)?;
                require_form(trace, j, f)?;
                acc = trace.push(Rule::Product {
                    left: acc,
                    right: j,
                })?;
            }
            Ok(acc)
        }
        DistExpr::Power(b, g) => {
            let mut i = build(b, trace)?;
            let form = require_form(trace, i, b)?;
            let mut g = g.clone();
            if g.is_negative() {
                i = trace.push(Rule::Inverse { input: i })?;
                g = -g;
            }
            if g.is_one() {
                return Ok(i);
            }
            let k = level_for_power(form.q(), &g);
            if k > 1 {
                i = trace.push(Rule::RaiseLevel { input: i, k })?;
            }
            trace.push(Rule::Power { input: i, gamma: g })
        }
        DistExpr::Scale(b, c) => {
            let i = build(b, trace)?;
            trace.push(Rule::Scale {
                input: i,
                c: c.clone(),
            })
        }
        DistExpr::Shift(b, mu) if mu.is_zero() => build(b, trace),
        DistExpr::Shift(b, mu) => {
            let i = build(b, trace)?;
            trace.push(Rule::Translate {
                input: i,
                mu: mu.clone(),
            })
        }
        DistExpr::SumIid(b, 1) => build(b, trace),
        DistExpr::SumIid(b, n) => {
            let i = build(b, trace)?;
            trace.push(Rule::SumIid { input: i, n: *n })
        }
    }
}

/// Parameters `(alpha, beta, a, b)` when the law of `e` has an operator
/// `M - alpha T_a - beta T_b D` that is not already a two-group form.
fn pair_shape(e: &DistExpr) -> Option<(Rational, Rational, TFactor, TFactor)> {
    match e {
        DistExpr::Atom(AtomKind::Normal { mu, sigma2 }) if !mu.is_zero() => Some((
            mu.clone(),
            sigma2.clone(),
            TFactor::Identity,
            TFactor::Identity,
        )),
        DistExpr::Atom(AtomKind::Vg { r, theta, sigma }) if !theta.is_zero() => Some((
            theta * int(2),
            sigma * sigma,
            TFactor::Finite(r / int(2)),
            TFactor::Finite(r.clone()),
        )),
        DistExpr::Shift(b, c) if !c.is_zero() => match &**b {
            // X + c with X ~ Gamma(r, lambda): M - (1/lambda) T_{r + lambda c} + (c/lambda) D
            DistExpr::Atom(AtomKind::Gamma { r, lambda }) => Some((
                int(1) / lambda,
                -(c / lambda),
                TFactor::Finite(r + lambda * c),
                TFactor::Identity,
            )),
            DistExpr::Atom(AtomKind::Normal { mu, sigma2 }) if !(mu + c).is_zero() => {
                Some((mu + c, sigma2.clone(), TFactor::Identity, TFactor::Identity))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Mean of `e` when it is a unit-variance normal.
fn unit_normal_mean(e: &DistExpr) -> Option<Rational> {
    match e {
        DistExpr::Atom(AtomKind::Normal { mu, sigma2 }) if sigma2.is_one() => Some(mu.clone()),
        DistExpr::Shift(b, c) => unit_normal_mean(b).map(|m| m + c),
        _ => None,
    }
}

fn special_pair(x: &DistExpr, y: &DistExpr) -> Result<Option<Rule>> {
    let (px, py) = (pair_shape(x), pair_shape(y));
    if px.is_none() && py.is_none() {
        return Ok(None);
    }
    if let (Some(mx), Some(my)) = (unit_normal_mean(x), unit_normal_mean(y)) {
        if mx != my {
            return Ok(Some(Rule::NoncenteredNormal { mu_x: mx, mu_y: my }));
        }
    }
    match (px, py) {
        (Some(sx), Some(sy)) if sx == sy => {
            let (alpha, beta, a, b) = sx;
            Ok(Some(Rule::IidPair { alpha, beta, a, b }))
        }
        (Some(_), Some(_)) => Err(unsupported(
            &DistExpr::product(vec![x.clone(), y.clone()]),
            "the pair rule needs identically distributed factors",
        )),
        _ => Ok(None),
    }
}
