//! Moment residuals, moment recurrences and exact minimality searches.
//!
//! Applying `A = sum c_ij M^j D^i` to `x^k` and taking expectations gives
//! `sum c_ij (k)_i mu_(k+j-i) = 0` for a Stein operator of `Z`, where
//! `(k)_i` is the falling factorial and `mu_n = E Z^n`.

pub mod linalg;

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::catalog::{CachedOracle, DistExpr, MomentOracle, MomentValue};
use crate::error::{Result, SteinError};
use crate::precision::Precision;
use crate::scalar::{falling, fmt_rational, Rational};
use crate::ExpandedOp;

pub use linalg::Matrix;

type Op = ExpandedOp<Rational>;

/// Relative tolerance for residuals computed from extended-precision moments.
pub const APPROX_RESIDUAL_TOL: f64 = 1e-20;

/// `E[A x^k] = sum c_ij (k)_i mu_(k+j-i)`.
pub fn moment_residual<O: MomentOracle + ?Sized>(
    a: &Op,
    oracle: &O,
    k: u64,
) -> Result<MomentValue> {
    Ok(residual_parts(a, oracle, k)?.0)
}

/// Residual together with the sum of absolute values of its terms.
fn residual_parts<O: MomentOracle + ?Sized>(
    a: &Op,
    oracle: &O,
    k: u64,
) -> Result<(MomentValue, f64)> {
    let p = Precision::default();
    let mut acc = MomentValue::Exact(Rational::zero());
    let mut size = 0.0f64;
    // x^k is an admissible test function only if every term of A x^k is
    // integrable, including terms that cancel after collection
    for (&(i, j), _) in a.terms() {
        if u64::from(i) <= k {
            let n = k + u64::from(j) - u64::from(i);
            if !oracle.moment(n)?.exists() {
                return Err(SteinError::MomentUnavailable(n as i64));
            }
        }
    }
    for (n, c) in a.apply_monomial(k) {
        let mu = oracle.moment(n)?;
        if !mu.exists() {
            return Err(SteinError::MomentUnavailable(n as i64));
        }
        let term = mu.scale(&c, p);
        size += match &term {
            MomentValue::Exact(q) => crate::scalar::to_f64(q).abs(),
            MomentValue::Approx(x) => x.abs().to_f64(),
            MomentValue::DoesNotExist => 0.0,
        };
        acc = acc.add(&term, p);
    }
    Ok((acc, size))
}

/// Outcome for one `k`.
#[derive(Clone, Debug, PartialEq)]
pub enum ResidualRow {
    Value(MomentValue),
    /// Some needed moment does not exist.
    Missing(i64),
}

/// Residuals for `k = 0..=kmax`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub rows: Vec<(u64, ResidualRow)>,
    /// Per-row pass flags; exact rows must be zero, approximate rows within
    /// [`APPROX_RESIDUAL_TOL`] of their term magnitude.
    pub passes: Vec<bool>,
}

impl ResidualReport {
    /// No evaluated row failed.
    pub fn all_pass(&self) -> bool {
        self.passes.iter().all(|&b| b)
    }

    /// Rows that could be evaluated.
    pub fn evaluated(&self) -> usize {
        self.rows
            .iter()
            .filter(|(_, r)| matches!(r, ResidualRow::Value(_)))
            .count()
    }

    /// Every evaluated row is an exact rational zero.
    pub fn all_exact_zero(&self) -> bool {
        self.rows.iter().all(|(_, r)| match r {
            ResidualRow::Value(MomentValue::Exact(q)) => q.is_zero(),
            ResidualRow::Value(_) => false,
            ResidualRow::Missing(_) => true,
        })
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .zip(&self.passes)
            .map(|((k, r), ok)| match r {
                ResidualRow::Value(v) => json!({ "k": k, "residual": v.to_json(), "pass": ok }),
                ResidualRow::Missing(n) => json!({ "k": k, "missing_moment": n, "pass": ok }),
            })
            .collect();
        json!({ "rows": rows, "all_pass": self.all_pass() })
    }
}

/// Residual table for `k = 0..=kmax`; rows needing a nonexistent moment are
/// reported as missing rather than failing.
pub fn residual_report<O: MomentOracle + ?Sized>(
    a: &Op,
    oracle: &O,
    kmax: u64,
) -> Result<ResidualReport> {
    let mut rows = Vec::new();
    let mut passes = Vec::new();
    for k in 0..=kmax {
        match residual_parts(a, oracle, k) {
            Ok((v, size)) => {
                let ok = match &v {
                    MomentValue::Exact(q) => q.is_zero(),
                    MomentValue::Approx(x) => {
                        x.abs().to_f64() <= APPROX_RESIDUAL_TOL * size.max(1.0)
                    }
                    MomentValue::DoesNotExist => false,
                };
                passes.push(ok);
                rows.push((k, ResidualRow::Value(v)));
            }
            Err(SteinError::MomentUnavailable(n)) => {
                passes.push(true);
                rows.push((k, ResidualRow::Missing(n)));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ResidualReport { rows, passes })
}

/// Largest and smallest degree offsets `j - i`.
fn offset_span(a: &Op) -> Result<(i64, i64)> {
    let offs: Vec<i64> = a.terms().map(|(&(i, j), _)| j as i64 - i as i64).collect();
    match (offs.iter().min(), offs.iter().max()) {
        (Some(&lo), Some(&hi)) => Ok((lo, hi)),
        _ => Err(SteinError::Degenerate("zero operator".into())),
    }
}

/// Number of seeds `mu_0..mu_m` needed by [`derive_moments`]: `m + 1` with
/// `m = max(j-i) - min(j-i) - 1`, and at least one.
pub fn seeds_needed(a: &Op) -> Result<usize> {
    let (lo, hi) = offset_span(a)?;
    Ok((hi - lo).max(1) as usize)
}

/// Forward substitution in the moment recurrence.
///
/// Given `mu_0..mu_(s-1)` in `seeds`, returns `mu_s..=mu_upto`. Row `k` of the
/// recurrence determines `mu_(k + max(j-i))` through the coefficient
/// `sum_(j-i = max) c_ij (k)_i`; if that vanishes the recurrence breaks down.
pub fn derive_moments(a: &Op, seeds: &[Rational], upto: u64) -> Result<Vec<Rational>> {
    let needed = seeds_needed(a)?;
    if seeds.len() < needed {
        return Err(SteinError::NotEnoughSeeds {
            needed,
            got: seeds.len(),
        });
    }
    let (_, hi) = offset_span(a)?;
    let mut mu: Vec<Rational> = seeds.to_vec();
    let mut out = Vec::new();
    for n in seeds.len() as u64..=upto {
        let k = n as i64 - hi;
        if k < 0 {
            return Err(SteinError::RecurrenceBreakdown(n));
        }
        let k = k as u64;
        let row = a.apply_monomial(k);
        let mut lead = Rational::zero();
        let mut rest = Rational::zero();
        for (idx, c) in row {
            if idx == n {
                lead += c;
            } else {
                rest += c * &mu[idx as usize];
            }
        }
        if lead.is_zero() {
            return Err(SteinError::RecurrenceBreakdown(k));
        }
        let v = -rest / lead;
        mu.push(v.clone());
        out.push(v);
    }
    Ok(out)
}

/// Outcome of a minimality search.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Only the zero operator fits the constraints.
    UniqueZeroOnly,
    /// A basis of operators satisfying every constraint row.
    FoundOperators(Vec<Op>),
}

/// Result of [`null_space_search`].
#[derive(Clone, Debug, PartialEq)]
pub struct NullSpaceReport {
    pub rows: usize,
    pub cols: usize,
    /// Unknowns as `(i, j)` = (D-order, M-degree), in column order.
    pub columns: Vec<(u32, u32)>,
    pub matrix: Matrix<Rational>,
    /// Moments used, by index.
    pub moments: BTreeMap<u64, Rational>,
    pub determinant: Option<Rational>,
    pub verdict: Verdict,
}

impl NullSpaceReport {
    pub fn basis(&self) -> &[Op] {
        match &self.verdict {
            Verdict::UniqueZeroOnly => &[],
            Verdict::FoundOperators(ops) => ops,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rows": self.rows,
            "cols": self.cols,
            "columns": self.columns.iter().map(|(i, j)| json!({ "d": i, "m": j })).collect::<Vec<_>>(),
            "moments": self.moments.iter().map(|(k, v)| json!({ "k": k, "value": fmt_rational(v) })).collect::<Vec<_>>(),
            "determinant": self.determinant.as_ref().map(fmt_rational),
            "verdict": match self.verdict {
                Verdict::UniqueZeroOnly => "unique_zero_only",
                Verdict::FoundOperators(_) => "found_operators",
            },
            "basis": self.basis().iter().map(|op| serde_json::to_value(op).unwrap()).collect::<Vec<_>>(),
        })
    }
}

/// Searches for operators `sum_(i <= max_d, j <= max_m) c_ij M^j D^i` whose
/// moment residuals vanish for `k = 0..rows-1`.
///
/// Columns are ordered by decreasing `i`, then decreasing `j`. The default
/// row count makes the system square.
pub fn null_space_search(
    oracle: &DistExpr,
    max_d: u32,
    max_m: u32,
    rows: Option<usize>,
) -> Result<NullSpaceReport> {
    let columns: Vec<(u32, u32)> = (0..=max_d)
        .rev()
        .flat_map(|i| (0..=max_m).rev().map(move |j| (i, j)))
        .collect();
    let rows = rows.unwrap_or(columns.len());
    let cached = CachedOracle::new(oracle);
    let mut moments = BTreeMap::new();
    let mut moment = |n: u64| -> Result<Rational> {
        match cached.moment(n)? {
            MomentValue::Exact(q) => {
                moments.insert(n, q.clone());
                Ok(q)
            }
            MomentValue::DoesNotExist => Err(SteinError::MomentUnavailable(n as i64)),
            MomentValue::Approx(_) => Err(SteinError::Unsupported(format!(
                "moment {n} of {oracle} is not rational"
            ))),
        }
    };
    let mut m = Matrix::zeros(rows, columns.len());
    for k in 0..rows {
        for (c, &(i, j)) in columns.iter().enumerate() {
            if i as usize > k {
                continue;
            }
            let n = (k + j as usize - i as usize) as u64;
            let v = falling(k as u64, i as u64) * moment(n)?;
            m.set(k, c, v);
        }
    }
    let determinant = (rows == columns.len()).then(|| m.determinant());
    let basis: Vec<Op> = m
        .null_space()
        .into_iter()
        .map(|v| Op::from_terms(columns.iter().zip(v).map(|(&(i, j), c)| (i, j, c))).normalized())
        .collect();
    let verdict = if basis.is_empty() {
        Verdict::UniqueZeroOnly
    } else {
        Verdict::FoundOperators(basis)
    };
    Ok(NullSpaceReport {
        rows,
        cols: columns.len(),
        columns,
        matrix: m,
        moments,
        determinant,
        verdict,
    })
}

/// Whether `op` lies in the span of `basis`.
pub fn in_span(op: &Op, basis: &[Op]) -> bool {
    let mut keys: Vec<(u32, u32)> = op.terms().map(|(k, _)| *k).collect();
    for b in basis {
        keys.extend(b.terms().map(|(k, _)| *k));
    }
    keys.sort();
    keys.dedup();
    let coords = |o: &Op| -> Vec<Rational> {
        keys.iter()
            .map(|&(i, j)| o.coeff(i, j).cloned().unwrap_or_else(Rational::zero))
            .collect()
    };
    let without = Matrix::from_rows(basis.iter().map(coords).collect());
    let mut with_rows: Vec<Vec<Rational>> = basis.iter().map(coords).collect();
    with_rows.push(coords(op));
    let with = Matrix::from_rows(with_rows);
    let r0 = if basis.is_empty() { 0 } else { without.rank() };
    with.rank() == r0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::atoms::*;
    use crate::scalar::{int, rat};

    #[test]
    fn gamma_residuals() {
        let (r, lam) = (rat(5, 2), int(3));
        let g = DistExpr::Atom(gamma(r.clone(), lam.clone()));
        let a = Op::t(r.clone()) - Op::m().scale(&lam);
        for k in 0..=12 {
            assert_eq!(
                moment_residual(&a, &g, k).unwrap(),
                MomentValue::Exact(int(0))
            );
        }
        let perturbed = Op::t(r + int(1)) - Op::m().scale(&lam);
        assert_eq!(
            moment_residual(&perturbed, &g, 0).unwrap(),
            MomentValue::Exact(int(1))
        );
    }

    #[test]
    fn missing_moments_are_named() {
        let t = DistExpr::Atom(student(int(3)));
        let a = Op::t(int(1)).scale(&int(3)) + Op::m().pow(2) * Op::t(int(-1));
        assert_eq!(
            moment_residual(&a, &t, 2).unwrap_err(),
            SteinError::MomentUnavailable(4)
        );
        let rep = residual_report(&a, &t, 4).unwrap();
        assert!(rep.all_pass());
        // k = 1 needs E X^3 through M^3 D even though that term cancels
        assert_eq!(rep.evaluated(), 1);
    }

    #[test]
    fn gamma_recurrence() {
        let (r, lam) = (rat(1, 3), int(2));
        let a = Op::t(r.clone()) - Op::m().scale(&lam);
        assert_eq!(seeds_needed(&a).unwrap(), 1);
        let got = derive_moments(&a, &[int(1)], 8).unwrap();
        let g = DistExpr::Atom(gamma(r, lam));
        for (k, v) in got.iter().enumerate() {
            assert_eq!(
                MomentValue::Exact(v.clone()),
                crate::catalog::moments(&g, k as u64 + 1).unwrap()
            );
        }
    }

    #[test]
    fn seeds_are_checked() {
        let a = Op::t(int(1)) - Op::m().pow(2);
        assert_eq!(
            derive_moments(&a, &[int(1)], 4).unwrap_err(),
            SteinError::NotEnoughSeeds { needed: 2, got: 1 }
        );
        assert_eq!(
            derive_moments(&a, &[int(1), int(0)], 4).unwrap(),
            vec![int(1), int(0), int(3)]
        );
    }

    #[test]
    fn gamma_operator_is_rediscovered() {
        let g = DistExpr::Atom(gamma(int(2), int(1)));
        let rep = null_space_search(&g, 1, 1, Some(4)).unwrap();
        assert_eq!(rep.basis().len(), 1);
        assert!(rep.basis()[0].eq_up_to_scale(&(Op::t(int(2)) - Op::m())));
        assert_eq!(rep.determinant, Some(int(0)));
    }

    #[test]
    fn normal_operator_is_rediscovered() {
        let n = DistExpr::Atom(std_normal());
        let rep = null_space_search(&n, 1, 1, Some(4)).unwrap();
        assert_eq!(rep.basis().len(), 1);
        assert!(rep.basis()[0].eq_up_to_scale(&(Op::d() - Op::m())));
    }

    #[test]
    fn span_membership() {
        let basis = vec![Op::d() - Op::m(), Op::m().pow(2)];
        assert!(in_span(&(Op::d() - Op::m()).scale(&int(3)), &basis));
        assert!(in_span(&(Op::d() - Op::m() + Op::m().pow(2)), &basis));
        assert!(!in_span(&Op::d(), &basis));
        assert!(!in_span(&Op::d(), &[]));
    }
}
