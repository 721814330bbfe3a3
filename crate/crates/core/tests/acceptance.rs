//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p stein-core --test acceptance -- --nocapture` to see
//! the report. Lines marked `FAIL (known)` record target values this library
//! does not reproduce because they are wrong; the `#[ignore]`d tests at the
//! bottom assert those literal targets and fail when run.

mod common;

use std::time::{Duration, Instant};

use stein_core::catalog::atoms::*;
use stein_core::catalog::MomentValue;
use stein_core::catalog::{mellin, stein_operator, AtomKind, DistExpr, Support};
use stein_core::constructors::{
    build_for_expression, iid_pair_operator, noncentered_normal_product, product_operator, TFactor,
};
use stein_core::duality::*;
use stein_core::precision::Precision;
use stein_core::scalar::{int, pow_i, rat, Rational};
use stein_core::verify::{
    derive_moments, in_span, null_space_search, residual_report, ResidualRow, Verdict,
    APPROX_RESIDUAL_TOL,
};
use stein_core::{RationalEuler as Poly, RationalForm as Form, RationalOp as Op};

/// Pinned tolerances.
const DETERMINANT_TOL: i64 = 0;
const MELLIN_NUMERIC_TOL: f64 = 1e-9;
const CRIT1_BUDGET: Duration = Duration::from_secs(1);
const CRIT2_BUDGET: Duration = Duration::from_secs(5);
const CRIT7_BUDGET: Duration = Duration::from_secs(30);

#[derive(Default)]
struct Report {
    lines: Vec<String>,
    /// Failures that make the run fail.
    hard: Vec<String>,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: impl Into<String>) {
        let detail = detail.into();
        self.lines.push(format!(
            "criterion {id}: {} {detail}",
            if ok { "PASS" } else { "FAIL" }
        ));
        if !ok {
            self.hard.push(format!("{id}: {detail}"));
        }
    }

    /// A literal target value that is not reproduced, with the reason.
    fn known_fail(&mut self, id: &str, detail: impl Into<String>) {
        self.lines
            .push(format!("criterion {id}: FAIL (known) {}", detail.into()));
    }
}

fn t(r: Rational) -> Op {
    Op::t(r)
}

fn m() -> Op {
    Op::m()
}

fn d() -> Op {
    Op::d()
}

fn t_prod(rs: &[Rational]) -> Op {
    rs.iter().fold(Op::identity(), |acc, r| acc * t(r.clone()))
}

fn build(e: &DistExpr) -> Op {
    build_for_expression(e)
        .unwrap_or_else(|err| panic!("{e}: {err}"))
        .0
        .normalized()
}

/// `MD^3 + (I - M)D^2 - (M + (1 + mu^2)I)D + M - mu^2 I`.
fn equal1(mu: &Rational) -> Op {
    let mu2 = mu * mu;
    m() * d().pow(3) + (Op::identity() - m()) * d().pow(2) - (m() + Op::scalar(int(1) + &mu2)) * d()
        + m()
        - Op::scalar(mu2)
}

/// Golden corpus: expression, expected operator written out by hand, label.
fn corpus() -> Vec<(&'static str, DistExpr, Op)> {
    let mut out = Vec::new();
    // products of centered normals
    let (s1, s2, s3) = (int(2), rat(1, 3), int(5));
    out.push((
        "normal product n=2",
        product_of(vec![normal(int(0), s1.clone()), normal(int(0), s2.clone())]),
        t_prod(&[int(1), int(1)]).scale(&(&s1 * &s2)) - m().pow(2),
    ));
    out.push((
        "normal product n=3",
        product_of(vec![
            normal(int(0), s1.clone()),
            normal(int(0), s2.clone()),
            normal(int(0), s3.clone()),
        ]),
        t_prod(&[int(1), int(1), int(1)]).scale(&(&s1 * &s2 * &s3)) - m().pow(2),
    ));
    // products of gammas
    let (r1, l1, r2, l2, r3, l3) = (rat(1, 2), int(3), int(2), rat(1, 5), rat(7, 3), int(1));
    out.push((
        "gamma product n=3",
        product_of(vec![
            gamma(r1.clone(), l1.clone()),
            gamma(r2.clone(), l2.clone()),
            gamma(r3.clone(), l3.clone()),
        ]),
        t_prod(&[r1.clone(), r2.clone(), r3.clone()]) - m().scale(&(&l1 * &l2 * &l3)),
    ));
    // normal times gamma: sigma^2 T_1 T_r T_{r+1} - lambda^2 M^2
    let (s, r, lam) = (int(3), rat(5, 2), int(2));
    out.push((
        "normal-gamma product",
        product_of(vec![
            normal(int(0), s.clone()),
            gamma(r.clone(), lam.clone()),
        ]),
        t_prod(&[int(1), r.clone(), &r + int(1)]).scale(&s) - m().pow(2).scale(&(&lam * &lam)),
    ));
    // Student products: nu_1..nu_n T_1^n - (-1)^n M^2 prod T_{2 - nu_j}
    let nus = [int(3), rat(9, 2), int(7)];
    for n in 2..=3 {
        let prod: Rational = nus[..n].iter().product();
        let sign = if n % 2 == 0 { int(1) } else { int(-1) };
        let shifts: Vec<Rational> = nus[..n].iter().map(|v| int(2) - v).collect();
        out.push((
            if n == 2 {
                "Student product n=2"
            } else {
                "Student product n=3"
            },
            product_of(nus[..n].iter().map(|v| student(v.clone())).collect()),
            t_prod(&vec![int(1); n]).scale(&prod) - (m().pow(2) * t_prod(&shifts)).scale(&sign),
        ));
    }
    // symmetric VG products: prod sigma_j^2 T_1^n prod T_{r_j} - M^2
    let vgs = [(int(3), int(2)), (rat(5, 2), rat(1, 3)), (int(1), int(1))];
    for n in 2..=3 {
        let s2: Rational = vgs[..n].iter().map(|(_, s)| s * s).product();
        let mut rs = vec![int(1); n];
        rs.extend(vgs[..n].iter().map(|(r, _)| r.clone()));
        out.push((
            if n == 2 {
                "VG product n=2"
            } else {
                "VG product n=3"
            },
            product_of(
                vgs[..n]
                    .iter()
                    .map(|(r, s)| vg_sym(r.clone(), s.clone()))
                    .collect(),
            ),
            t_prod(&rs).scale(&s2) - m().pow(2),
        ));
    }
    // PRR as sqrt(2s Beta(1, s-1) Gamma(1/2, 1)): s T_1 T_2 - M^2 T_{2s}
    let sp = rat(5, 2);
    out.push((
        "PRR construction",
        product_of(vec![beta(int(1), &sp - int(1)), gamma(rat(1, 2), int(1))])
            .scale(&sp * int(2))
            .power(rat(1, 2)),
        t_prod(&[int(1), int(2)]).scale(&sp) - m().pow(2) * t(&sp * int(2)),
    ));
    // 1 / Beta(a, b): T_{1-a-b} - M T_{1-a}
    let (a, b) = (int(3), rat(5, 2));
    out.push((
        "inverse beta",
        DistExpr::from(beta(a.clone(), b.clone())).power(int(-1)),
        t(int(1) - &a - &b) - m() * t(int(1) - &a),
    ));
    // Beta(a1, b1) / Beta(a2, b2): T_{a1} T_{1-a2-b2} - M T_{a1+b1} T_{1-a2}
    let (a1, b1, a2, b2) = (int(2), int(3), rat(7, 2), int(1));
    out.push((
        "beta quotient",
        DistExpr::product(vec![
            beta(a1.clone(), b1.clone()).into(),
            DistExpr::from(beta(a2.clone(), b2.clone())).power(int(-1)),
        ]),
        t_prod(&[a1.clone(), int(1) - &a2 - &b2]) - m() * t_prod(&[&a1 + &b1, int(1) - &a2]),
    ));
    // 1 / Gamma(alpha, beta): M T_{1-alpha} + beta
    let (al, be) = (rat(7, 2), int(2));
    out.push((
        "inverse gamma",
        DistExpr::from(gamma(al.clone(), be.clone())).power(int(-1)),
        m() * t(int(1) - &al) + Op::scalar(be.clone()),
    ));
    // (d2/d1) ChiSq(d1) / ChiSq(d2): d1 M T_{1-d2/2} + d2 T_{d1/2}
    let (d1, d2) = (int(4), int(9));
    out.push((
        "F construction",
        DistExpr::product(vec![
            chi_sq(d1.clone()).into(),
            DistExpr::from(chi_sq(d2.clone())).power(int(-1)),
        ])
        .scale(&d2 / &d1),
        (m() * t(int(1) - &d2 / int(2))).scale(&d1) + t(&d1 / int(2)).scale(&d2),
    ));
    // Cauchy as a ratio of standard normals: (I + M^2) T_1
    let n = DistExpr::from(std_normal());
    out.push((
        "Cauchy",
        DistExpr::product(vec![n.clone(), n.power(int(-1))]),
        (Op::identity() + m().pow(2)) * t(int(1)),
    ));
    // iid noncentered normals
    let mu = int(2);
    let pair = product_of(vec![normal(mu.clone(), int(1)), normal(mu.clone(), int(1))]);
    out.push(("iid noncentered normal pair", pair.clone(), equal1(&mu)));
    // noncentered normals with different means
    let (mx, my) = (int(1), rat(-1, 2));
    out.push((
        "noncentered normal pair",
        product_of(vec![normal(mx.clone(), int(1)), normal(my.clone(), int(1))]),
        m() * d().pow(4) + d().pow(3)
            - (m().scale(&int(2)) + Op::scalar(&mx * &my)) * d().pow(2)
            - Op::scalar(int(1) + &mx * &mx + &my * &my) * d()
            + m()
            - Op::scalar(&mx * &my),
    ));
    // sum of r iid products of N(mu, 1) pairs
    let rr = int(3);
    let mu2 = &mu * &mu;
    out.push((
        "sum of iid normal pairs",
        pair.sum_iid(3),
        m() * d().pow(3) + (Op::scalar(rr.clone()) - m()) * d().pow(2)
            - (m() + Op::scalar(&rr * (int(1) + &mu2))) * d()
            + m()
            - Op::scalar(&rr * &mu2),
    ));
    // iid shifted gammas
    let (rg, sh) = (int(2), int(3));
    let rm = &rg + &sh;
    let x = DistExpr::from(gamma(rg.clone(), int(1))).shift(sh.clone());
    out.push((
        "iid shifted gamma pair",
        DistExpr::product(vec![x.clone(), x]),
        (m() - t_prod(&[rm.clone(), rm.clone()]) - (t(int(1)) * d()).scale(&(&sh * &sh)))
            * (t(&rm - int(1)) + (t(&rm + int(1)) * d()).scale(&sh))
            + (t_prod(&[rm.clone(), rm.clone(), &rm + int(1)]) * d()).scale(&(&sh * int(2))),
    ));
    // iid skewed VG
    let (rv, th, sg) = (int(3), rat(1, 2), int(2));
    let (al, be) = (&th * int(2), &sg * &sg);
    let half = &rv / int(2);
    let x = DistExpr::from(vg(rv.clone(), th.clone(), sg.clone()));
    out.push((
        "iid skewed VG pair",
        DistExpr::product(vec![x.clone(), x]),
        (m() - t_prod(&[half.clone(), half.clone()]).scale(&(&al * &al))
            - (t_prod(&[rv.clone(), rv.clone(), int(1)]) * d()).scale(&(&be * &be)))
            * (t(&half - int(1)) - (t_prod(&[rv.clone(), &half + int(1)]) * d()).scale(&be))
            - (t_prod(&[half.clone(), half.clone(), rv.clone(), &half + int(1)]) * d())
                .scale(&(&al * &al * &be * int(2))),
    ));
    out.into_iter()
        .map(|(l, e, op)| (l, e, op.normalized()))
        .collect()
}

fn criterion1(rep: &mut Report) {
    let start = Instant::now();
    let e = product_of(vec![normal(int(1), int(1)), normal(int(1), int(1))]);
    let ns = null_space_search(&e, 2, 1, Some(6)).unwrap();
    let elapsed = start.elapsed();
    let moments: Vec<Rational> = ns.moments.values().cloned().collect();
    let want: Vec<Rational> = [1, 1, 4, 16, 100, 676, 5776]
        .iter()
        .map(|&v| int(v))
        .collect();
    rep.check(
        "1a",
        moments == want,
        format!(
            "moments {:?} (E X^0..E X^6, exact)",
            moments.iter().map(|q| q.to_string()).collect::<Vec<_>>()
        ),
    );
    rep.check(
        "1b",
        ns.verdict == Verdict::UniqueZeroOnly,
        "6x6 system has only the zero solution: no operator with D-order <= 2 and M-degree <= 1",
    );
    let det = ns.determinant.clone().unwrap();
    // independent oracle: cofactor expansion of the same matrix
    let rows: Vec<Vec<Rational>> = (0..6).map(|r| ns.matrix.row(r).to_vec()).collect();
    rep.check(
        "1c",
        det == cofactor_det(&rows) && det == int(276480),
        format!("determinant {det} (exact, tolerance {DETERMINANT_TOL})"),
    );
    rep.known_fail("1d", format!("target determinant 783360 is not reproduced; the exact value is {det}. Any nonzero value gives the same conclusion"));
    rep.check(
        "1e",
        elapsed < CRIT1_BUDGET,
        format!("{elapsed:?} < {CRIT1_BUDGET:?}"),
    );
}

fn cofactor_det(a: &[Vec<Rational>]) -> Rational {
    if a.len() == 1 {
        return a[0][0].clone();
    }
    let mut acc = int(0);
    for (c, x) in a[0].iter().enumerate() {
        if *x == int(0) {
            continue;
        }
        let minor: Vec<Vec<Rational>> = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != c)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = x * cofactor_det(&minor);
        acc = if c % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn criterion2_3(rep: &mut Report) {
    let start = Instant::now();
    let corpus = corpus();
    let mut mismatched = Vec::new();
    let mut built = Vec::new();
    for (label, e, want) in &corpus {
        let got = build(e);
        if &got != want {
            mismatched.push(format!("{label}: got {got}, want {want}"));
        }
        built.push((label, e, got));
    }
    let elapsed = start.elapsed();
    rep.check(
        "2",
        mismatched.is_empty() && elapsed < CRIT2_BUDGET,
        format!("{} golden operators equal as normalized operators in {elapsed:?} (< {CRIT2_BUDGET:?}) {}", corpus.len(), mismatched.join("; ")),
    );

    let (mut exact, mut approx, mut missing) = (0, 0, 0);
    let mut bad = Vec::new();
    for (label, e, op) in &built {
        let r = residual_report(op, *e, 12).unwrap();
        for ((k, row), ok) in r.rows.iter().zip(&r.passes) {
            match row {
                ResidualRow::Value(MomentValue::Exact(q)) if *q == int(0) => exact += 1,
                ResidualRow::Value(MomentValue::Approx(_)) if *ok => approx += 1,
                ResidualRow::Missing(_) => missing += 1,
                _ => bad.push(format!("{label} k={k}")),
            }
        }
    }
    rep.check(
        "3",
        bad.is_empty(),
        format!(
            "{exact} residual rows exactly 0; {approx} rows with irrational moments (PRR odd k) within relative {APPROX_RESIDUAL_TOL:e}; {missing} rows skipped for nonexistent moments {}",
            bad.join(", ")
        ),
    );
}

fn criterion4(rep: &mut Report) {
    let op = equal1(&int(1));
    let got = derive_moments(&op, &[int(1), int(1), int(4)], 6).unwrap();
    let want = vec![int(16), int(100), int(676), int(5776)];
    rep.check(
        "4",
        got == want,
        format!(
            "derived E X^3..E X^6 = {:?}",
            got.iter().map(|q| q.to_string()).collect::<Vec<_>>()
        ),
    );
}

fn criterion5(rep: &mut Report) {
    let pn = m() * d().pow(2) + d() - m();
    let pair0 =
        iid_pair_operator(&int(0), &int(1), &TFactor::Identity, &TFactor::Identity).unwrap();
    rep.check(
        "5a",
        pair0 == pn.compose(&(d() - Op::identity())).normalized(),
        "iid N(0,1) pair operator equals (MD^2 + D - M)(D - I)",
    );
    let z = noncentered_normal_product(&int(0), &int(0));
    let via_d2 = z == pn.compose(&(d().pow(2) - Op::identity()));
    rep.check(
        "5b",
        via_d2,
        "fourth-order noncentered operator at means 0 equals (MD^2 + D - M)(D^2 - I)",
    );
    rep.known_fail(
        "5c",
        "fourth-order noncentered operator at means 0 does not equal (MD^2 + D - M)(D - I); that identity belongs to the third-order iid pair operator (5a)",
    );
    let (r, sg) = (int(3), int(2));
    let s2 = &sg * &sg;
    let a = iid_pair_operator(
        &int(0),
        &s2,
        &TFactor::Finite(&r / int(2)),
        &TFactor::Finite(r.clone()),
    )
    .unwrap();
    let k0 = m() - (t_prod(&[r.clone(), r.clone(), int(1)]) * d()).scale(&(&s2 * &s2));
    let s0 =
        t(&r / int(2) - int(1)) - (t_prod(&[r.clone(), &r / int(2) + int(1)]) * d()).scale(&s2);
    let vgf = stein_operator(&vg_sym(r, sg))
        .unwrap()
        .form()
        .unwrap()
        .clone();
    let b = product_operator(&vgf, &vgf).unwrap().expand();
    rep.check(
        "5d",
        a.eq_up_to_scale(&k0.compose(&s0)) && k0.compose(&m()) == -b,
        "VG pair at theta = 0 equals K0 S0 up to scale, with K0 M = -(product VG operator)",
    );
}

fn product_form(atoms: &[AtomKind]) -> Form {
    let forms: Vec<Form> = atoms
        .iter()
        .map(|a| stein_operator(a).unwrap().form().unwrap().clone())
        .collect();
    forms[1..].iter().fold(forms[0].clone(), |acc, f| {
        product_operator(&acc, f).unwrap()
    })
}

fn criterion6(rep: &mut Report) {
    let p = Precision::default();
    let rs = [int(3), rat(5, 2), int(1)];
    let sigmas = [int(2), rat(1, 3), int(1)];
    let mut ode_ok = true;
    let mut params_ok = true;
    let mut mellin_ok = true;
    for n in 1..=3 {
        let atoms: Vec<AtomKind> = (0..n)
            .map(|j| vg_sym(rs[j].clone(), sigmas[j].clone()))
            .collect();
        let ode = dual_ode(&product_form(&atoms)).unwrap();
        let s2: Rational = sigmas[..n].iter().map(|s| s * s).product();
        let monic = ode.with_monic_l();
        let want_l = Poly::t(int(0)).pow(n as u32)
            * Poly::t_product(
                rs[..n]
                    .iter()
                    .map(|r| int(1) - r)
                    .collect::<Vec<_>>()
                    .iter(),
            );
        ode_ok &= monic.l() == &want_l
            && monic.k() == &Poly::one()
            && monic.b() == &(int(1) / &s2)
            && monic.q() == 2;

        let g = gparams_from_ode(&ode, OrderChoice::for_support(Support::Symmetric)).unwrap();
        let mut lower = g.lower.clone();
        lower.sort();
        let mut want: Vec<Rational> = rs[..n]
            .iter()
            .map(|r| (r - int(1)) / int(2))
            .chain((0..n).map(|_| int(0)))
            .collect();
        want.sort();
        params_ok &= (g.m, g.n, g.p(), g.q()) == (2 * n, 0, 0, 2 * n)
            && lower == want
            && g.prefactor == int(1) / (pow_i(&int(4), n as i64) * &s2)
            && g.power == int(2);

        let cand = normalize_mellin(&g_mellin(&g, Support::Symmetric, false).unwrap());
        let cat = mellin(&product_of(atoms)).unwrap();
        let cmp = gamma_expr_equal(&cand, &cat, &default_probes(), p).unwrap();
        mellin_ok &= cmp.verdict == Equality::StructurallyEqual;
    }
    mellin_ok &= LOG_REL_TOL == MELLIN_NUMERIC_TOL;
    rep.check(
        "6a",
        ode_ok,
        "product-VG density equation is T_0^n prod T_{1-r_j} p - x^2 p / prod sigma_j^2 = 0 for n = 1, 2, 3 (sign + for every n; a (-1)^n sign fails for odd n)",
    );
    rep.check("6b", params_ok, "G^{2n,0}_{0,2n} with lower (r_j - 1)/2 and n zeros, argument x^2/(4^n prod sigma_j^2), n = 1, 2, 3");
    rep.check("6c", mellin_ok, format!("normalized G transform structurally equal to the catalog Mellin transform, n = 1, 2, 3 (numeric fallback tolerance {MELLIN_NUMERIC_TOL:e})"));

    let nus = [int(3), rat(7, 2)];
    let prod: Rational = nus.iter().product();
    let atoms: Vec<AtomKind> = nus.iter().map(|v| student(v.clone())).collect();
    let g = gparams_from_ode(
        &dual_ode(&product_form(&atoms)).unwrap(),
        OrderChoice::Symmetric,
    )
    .unwrap();
    let mut upper = g.upper.clone();
    upper.sort();
    let mut want_upper: Vec<Rational> = nus.iter().map(|v| (int(1) - v) / int(2)).collect();
    want_upper.sort();
    let tdist = (g.m, g.n) == (2, 2)
        && upper == want_upper
        && g.lower == vec![int(0), int(0)]
        && g.prefactor == int(1) / &prod;
    let (s, _) = g_identities(&g, &GIdentity::Shift(rat(1, 2))).unwrap();
    let (inv, _) = g_identities(&s, &GIdentity::Invert).unwrap();
    let mut lower = inv.lower.clone();
    lower.sort();
    let mut halves: Vec<Rational> = nus.iter().map(|v| v / int(2)).collect();
    halves.sort();
    let tdist1 = inv.upper == vec![rat(1, 2), rat(1, 2)]
        && lower == halves
        && inv.prefactor == prod
        && inv.power == int(-2)
        && inv.outer_exponent == rat(1, 2);
    rep.check("6d", tdist && tdist1, "Student product: G^{2,2}_{2,2}(x^2/prod nu | (1-nu_j)/2 ; 0, 0), and shift(1/2) then invert gives w^(1/2) G^{2,2}_{2,2}(w | 1/2, 1/2 ; nu_j/2) with w = prod nu / x^2");
}

fn criterion7(rep: &mut Report) {
    type Suite = fn() -> Result<u32, String>;
    let suites: [(&str, Suite); 9] = [
        ("normal-form confluence", common::normal_form_confluence),
        ("T commutativity", common::t_commutativity),
        ("shift identities", common::shift_identities),
        ("dual involution", common::dual_involution),
        ("product symmetry", common::product_symmetry),
        (
            "power/inverse round trips",
            common::power_inverse_round_trips,
        ),
        (
            "euler/diagonal round trip",
            common::euler_diagonal_round_trip,
        ),
        ("detect round trip", common::detect_round_trip),
        ("G shift round trip", common::g_shift_round_trip),
    ];
    let start = Instant::now();
    let mut results = Vec::new();
    let mut ok = true;
    for (name, f) in suites {
        match f() {
            Ok(n) => results.push(format!("{name} {n}")),
            Err(e) => {
                ok = false;
                results.push(format!("{name} FAILED: {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    rep.check(
        "7",
        ok && elapsed < CRIT7_BUDGET,
        format!(
            "[{}] cases, {elapsed:?} < {CRIT7_BUDGET:?}",
            results.join(", ")
        ),
    );
}

fn criterion8(rep: &mut Report) {
    let atoms = vec![
        normal(int(0), int(3)),
        normal(int(2), rat(1, 2)),
        gamma(rat(3, 2), int(2)),
        beta(int(2), rat(5, 2)),
        student(int(13)),
        inverse_gamma(int(9), int(2)),
        f_dist(int(4), int(20)),
        vg_sym(int(3), int(2)),
        vg(int(3), rat(1, 2), int(2)),
        exponential(int(3)),
        chi_sq(int(5)),
    ];
    let mut failed = Vec::new();
    let mut names = Vec::new();
    for a in &atoms {
        let op = stein_operator(a).unwrap().expand();
        let ns = null_space_search(
            &DistExpr::from(a.clone()),
            op.d_order().unwrap(),
            op.m_degree().unwrap(),
            None,
        )
        .unwrap();
        if !in_span(&op, ns.basis()) {
            failed.push(a.to_string());
        }
        names.push(a.name());
    }
    rep.check(
        "8",
        failed.is_empty(),
        format!(
            "known operator lies in the discovered null space for {} (PRR and GenGamma excluded: irrational moments) {}",
            names.join(", "),
            failed.join(", ")
        ),
    );
}

#[test]
fn acceptance_report() {
    let mut rep = Report::default();
    criterion1(&mut rep);
    criterion2_3(&mut rep);
    criterion4(&mut rep);
    criterion5(&mut rep);
    criterion6(&mut rep);
    criterion7(&mut rep);
    criterion8(&mut rep);
    for l in &rep.lines {
        println!("{l}");
    }
    assert!(rep.hard.is_empty(), "failing criteria: {:#?}", rep.hard);
}

/// Literal target of criterion 1; the exact determinant is 276480.
#[test]
#[ignore = "known wrong target value"]
fn determinant_literal_target() {
    let e = product_of(vec![normal(int(1), int(1)), normal(int(1), int(1))]);
    let ns = null_space_search(&e, 2, 1, Some(6)).unwrap();
    assert_eq!(ns.determinant, Some(int(783360)));
}

/// Literal statement of criterion 5 for the fourth-order operator.
#[test]
#[ignore = "known false identity"]
fn noncentered_literal_factorization() {
    let pn = m() * d().pow(2) + d() - m();
    assert_eq!(
        noncentered_normal_product(&int(0), &int(0)),
        pn.compose(&(d() - Op::identity()))
    );
}
