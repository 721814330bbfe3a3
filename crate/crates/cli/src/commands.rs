//! Subcommands and their reports.

use serde_json::{json, Value};
use stein_core::catalog::{mellin, moments, DistExpr, MomentValue};
use stein_core::constructors::{build_for_expression, ConstructionTrace};
use stein_core::duality::{
    default_probes, dual_ode, g_mellin, gamma_expr_equal, gparams_from_ode, normalize_mellin,
    DensityODE, Equality, GParams, OrderChoice,
};
use stein_core::operator::detect_assumption1;
use stein_core::precision::Precision;
use stein_core::scalar::fmt_rational;
use stein_core::verify::{
    derive_moments, null_space_search, residual_report, ResidualRow, Verdict,
};
use stein_core::{Rational, RationalOp, Result, SteinError};

/// One invocation of the tool.
#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Operator(DistExpr),
    Verify {
        expr: DistExpr,
        kmax: u64,
    },
    DensityOde(DistExpr),
    GDensity(DistExpr),
    Mellin {
        expr: DistExpr,
        probes: Option<Vec<Rational>>,
    },
    MinimalSearch {
        expr: DistExpr,
        order: u32,
        degree: u32,
        rows: Option<usize>,
    },
    Moments {
        expr: DistExpr,
        kmax: u64,
        seeds: Option<Vec<Rational>>,
    },
}

impl Command {
    pub fn expr(&self) -> &DistExpr {
        match self {
            Self::Operator(e) | Self::DensityOde(e) | Self::GDensity(e) => e,
            Self::Verify { expr, .. }
            | Self::Mellin { expr, .. }
            | Self::MinimalSearch { expr, .. }
            | Self::Moments { expr, .. } => expr,
        }
    }
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A residual was nonzero or two Mellin transforms differ.
    VerificationFailed,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Self::Ok => 0,
            Self::VerificationFailed => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub status: Status,
    pub trace: Option<ConstructionTrace>,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Self {
            text,
            json,
            status: Status::Ok,
            trace: None,
        }
    }

    /// Text output, with the construction trace appended when `explain` is set.
    pub fn render_text(&self, explain: bool) -> String {
        let mut s = self.text.clone();
        if let (true, Some(t)) = (explain, &self.trace) {
            s.push_str("\nconstruction:\n");
            s.push_str(&t.render());
        }
        s
    }

    pub fn render_json(&self, explain: bool) -> Value {
        let mut v = self.json.clone();
        if let (true, Some(t), Some(obj)) = (explain, &self.trace, v.as_object_mut()) {
            obj.insert("trace".into(), t.to_json());
        }
        v
    }
}

pub fn run(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Operator(e) => operator(e),
        Command::Verify { expr, kmax } => verify(expr, *kmax),
        Command::DensityOde(e) => density_ode(e),
        Command::GDensity(e) => g_density(e),
        Command::Mellin { expr, probes } => mellin_check(expr, probes.as_deref()),
        Command::MinimalSearch {
            expr,
            order,
            degree,
            rows,
        } => minimal_search(expr, *order, *degree, *rows),
        Command::Moments { expr, kmax, seeds } => moment_table(expr, *kmax, seeds.as_deref()),
    }
}

fn op_json(op: &RationalOp) -> Value {
    serde_json::to_value(op).expect("operators serialize")
}

fn operator(e: &DistExpr) -> Result<Report> {
    let (op, trace) = build_for_expression(e)?;
    let mut text = format!("{e}\n");
    let mut j = json!({ "expression": e.to_string(), "operator": op_json(&op), "expanded": op.to_string() });
    if let Ok(d) = detect_assumption1(&op) {
        if d.right_shift == 0 {
            text.push_str(&format!("  {}\n", d.form.factored_text()));
            j["form"] = json!(d.form.factored_text());
        }
    }
    text.push_str(&format!("  = {op}\n"));
    let mut r = Report::ok(text, j);
    r.trace = Some(trace);
    Ok(r)
}

fn verify(e: &DistExpr, kmax: u64) -> Result<Report> {
    let (op, trace) = build_for_expression(e)?;
    let rep = residual_report(&op, e, kmax)?;
    let mut text = format!("{e}\n  operator: {op}\n");
    for ((k, row), ok) in rep.rows.iter().zip(&rep.passes) {
        let cell = match row {
            ResidualRow::Value(MomentValue::Exact(q)) => fmt_rational(q),
            ResidualRow::Value(MomentValue::Approx(x)) => format!("~{}", x.to_sci(6)),
            ResidualRow::Value(MomentValue::DoesNotExist) => "undefined".into(),
            ResidualRow::Missing(n) => format!("skipped (moment {n} does not exist)"),
        };
        text.push_str(&format!(
            "  k = {k:>2}: {cell}{}\n",
            if *ok { "" } else { "  FAIL" }
        ));
    }
    let status = if rep.all_pass() {
        Status::Ok
    } else {
        Status::VerificationFailed
    };
    text.push_str(if rep.all_pass() {
        "all residuals vanish\n"
    } else {
        "nonzero residual\n"
    });
    let j = json!({ "expression": e.to_string(), "operator": op_json(&op), "residuals": rep.to_json() });
    Ok(Report {
        text,
        json: j,
        status,
        trace: Some(trace),
    })
}

fn ode_for(e: &DistExpr) -> Result<(DensityODE, ConstructionTrace)> {
    let (op, trace) = build_for_expression(e)?;
    let d = detect_assumption1(&op)?;
    if d.right_shift != 0 {
        return Err(SteinError::Unsupported(format!(
            "operator {op} is a two-group form only after a factor M^{}",
            d.right_shift
        )));
    }
    Ok((dual_ode(&d.form)?, trace))
}

fn density_ode(e: &DistExpr) -> Result<Report> {
    let (ode, trace) = ode_for(e)?;
    let text = format!("{e}\n  {ode}\n  expanded: {}\n", ode.expand());
    let mut j = ode.to_json();
    j["expression"] = json!(e.to_string());
    let mut r = Report::ok(text, j);
    r.trace = Some(trace);
    Ok(r)
}

fn g_candidate(e: &DistExpr) -> Result<(GParams, ConstructionTrace)> {
    let (ode, trace) = ode_for(e)?;
    Ok((
        gparams_from_ode(&ode, OrderChoice::for_support(e.support()))?,
        trace,
    ))
}

fn g_density(e: &DistExpr) -> Result<Report> {
    let (g, trace) = g_candidate(e)?;
    let text = format!("{e}\n  density proportional to {g}\n");
    let mut j = g.to_json();
    j["expression"] = json!(e.to_string());
    let mut r = Report::ok(text, j);
    r.trace = Some(trace);
    Ok(r)
}

fn mellin_check(e: &DistExpr, probes: Option<&[Rational]>) -> Result<Report> {
    let cat = mellin(e)?;
    let mut text = format!("{e}\n  E X^(s-1) = {cat}\n");
    let mut j = json!({ "expression": e.to_string(), "mellin": cat.to_string() });
    let (g, trace) = match g_candidate(e) {
        Ok(x) => x,
        Err(err) => {
            text.push_str(&format!("  no Meijer G candidate: {err}\n"));
            j["candidate"] = Value::Null;
            return Ok(Report::ok(text, j));
        }
    };
    let support = e.support();
    let (cand, forced) = match g_mellin(&g, support, false) {
        Ok(m) => (m, false),
        Err(SteinError::ValidityViolated(_)) => (g_mellin(&g, support, true)?, true),
        Err(err) => return Err(err),
    };
    let cand = normalize_mellin(&cand);
    let probes = probes
        .map(<[Rational]>::to_vec)
        .unwrap_or_else(default_probes);
    let cmp = gamma_expr_equal(&cand, &cat, &probes, Precision::default())?;
    text.push_str(&format!("  candidate {g}\n  its transform: {cand}\n"));
    if forced {
        text.push_str("  (transform formula applied outside its stated conditions)\n");
    }
    text.push_str(&format!("  verdict: {:?}\n", cmp.verdict));
    j["candidate"] = g.to_json();
    j["candidate_mellin"] = json!(cand.to_string());
    j["forced"] = json!(forced);
    j["comparison"] = serde_json::to_value(&cmp).expect("comparison serializes");
    let status = if cmp.verdict == Equality::Different {
        Status::VerificationFailed
    } else {
        Status::Ok
    };
    Ok(Report {
        text,
        json: j,
        status,
        trace: Some(trace),
    })
}

fn minimal_search(e: &DistExpr, order: u32, degree: u32, rows: Option<usize>) -> Result<Report> {
    let rep = null_space_search(e, order, degree, rows)?;
    let ms: Vec<String> = rep.moments.values().map(fmt_rational).collect();
    let mut text = format!(
        "{e}\n  shape: D-order <= {order}, M-degree <= {degree} ({} unknowns, {} rows)\n  moments: {}\n",
        rep.cols,
        rep.rows,
        ms.join(", ")
    );
    if let Some(d) = &rep.determinant {
        text.push_str(&format!("  determinant: {}\n", fmt_rational(d)));
    }
    match &rep.verdict {
        Verdict::UniqueZeroOnly => text.push_str("  no nonzero operator of this shape\n"),
        Verdict::FoundOperators(ops) => {
            text.push_str(&format!("  {} independent operator(s):\n", ops.len()));
            for op in ops {
                text.push_str(&format!("    {op}\n"));
            }
        }
    }
    let mut j = rep.to_json();
    j["expression"] = json!(e.to_string());
    Ok(Report::ok(text, j))
}

fn moment_table(e: &DistExpr, kmax: u64, seeds: Option<&[Rational]>) -> Result<Report> {
    let mut text = format!("{e}\n");
    let mut j = json!({ "expression": e.to_string() });
    match seeds {
        Some(seeds) => {
            let (op, trace) = build_for_expression(e)?;
            let derived = derive_moments(&op, seeds, kmax)?;
            text.push_str(&format!("  operator: {op}\n"));
            let all: Vec<&Rational> = seeds.iter().chain(&derived).collect();
            for (k, v) in all.iter().enumerate() {
                let tag = if k < seeds.len() { " (seed)" } else { "" };
                text.push_str(&format!("  E X^{k} = {}{tag}\n", fmt_rational(v)));
            }
            j["seeds"] = json!(seeds.iter().map(fmt_rational).collect::<Vec<_>>());
            j["moments"] = json!(all.iter().map(|v| fmt_rational(v)).collect::<Vec<_>>());
            let mut r = Report::ok(text, j);
            r.trace = Some(trace);
            Ok(r)
        }
        None => {
            let mut vals = Vec::new();
            for k in 0..=kmax {
                let v = moments(e, k)?;
                let cell = match &v {
                    MomentValue::Exact(q) => fmt_rational(q),
                    MomentValue::Approx(x) => format!("~{}", x.to_sci(20)),
                    MomentValue::DoesNotExist => "does not exist".into(),
                };
                text.push_str(&format!("  E X^{k} = {cell}\n"));
                vals.push(v.to_json());
            }
            j["moments"] = Value::Array(vals);
            Ok(Report::ok(text, j))
        }
    }
}
