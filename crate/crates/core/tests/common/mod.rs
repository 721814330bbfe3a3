//! Randomized property checks shared by the property tests and the
//! acceptance report. Each check runs a fixed number of cases from a
//! deterministic seed so that failures reproduce.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestError, TestRng, TestRunner};

use stein_core::catalog::atoms::*;
use stein_core::catalog::{mellin, moments, DistExpr, MomentValue};
use stein_core::constructors::{inverse_operator, power_operator, product_operator};
use stein_core::duality::*;
use stein_core::operator::detect_assumption1;
use stein_core::operator::word::{normalize_word, Letter};
use stein_core::precision::Precision;
use stein_core::scalar::{int, rat, Rational};
use stein_core::verify::{derive_moments, residual_report, ResidualRow};
use stein_core::{RationalEuler as Poly, RationalForm as Form, RationalOp as Op};

pub const CASES: u32 = 128;

/// Runs `check` on `CASES` values of `strategy`; returns the case count.
pub fn run<S: Strategy>(
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<u32, String>
where
    S::Value: std::fmt::Debug,
{
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &[7; 32]);
    let mut runner = TestRunner::new_with_rng(config, rng);
    match runner.run(&strategy, check) {
        Ok(()) => Ok(CASES),
        Err(TestError::Fail(why, v)) => Err(format!("{why}; minimal input {v:?}")),
        Err(TestError::Abort(why)) => Err(format!("aborted: {why}")),
    }
}

/// Rationals `n/d` with `|n/d| <= 10`.
pub fn small_rational() -> impl Strategy<Value = Rational> {
    (1i64..=4).prop_flat_map(|d| (-10 * d..=10 * d).prop_map(move |n| rat(n, d)))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    small_rational().prop_filter("nonzero", |q| *q != int(0))
}

pub fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..=4).prop_flat_map(|d| (1..=10 * d).prop_map(move |n| rat(n, d)))
}

pub fn euler_poly(max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rational(), 1..=max_len).prop_map(Poly::from_coeffs)
}

/// Product of `T_r` factors with random shifts.
pub fn t_product(max: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rational(), 0..=max).prop_map(|rs| Poly::t_product(rs.iter()))
}

/// A two-group form with factored `L` and `K`.
pub fn form() -> impl Strategy<Value = Form> {
    (
        prop::collection::vec(small_rational(), 1..=3),
        nonzero_rational(),
        nonzero_rational(),
        1u32..=3,
        t_product(2),
    )
        .prop_map(|(ls, c, b, q, k)| {
            Form::new(Poly::t_product(ls.iter()).scale(&c), b, q, k).unwrap()
        })
}

fn letters(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(prop_oneof![Just(Letter::M), Just(Letter::D)], 0..=max)
}

fn letter_op(l: &Letter) -> Op {
    match l {
        Letter::M => Op::m(),
        Letter::D => Op::d(),
    }
}

/// Left fold, right fold and a random split of the same word all normalize
/// to the rewriting normal form.
pub fn normal_form_confluence() -> Result<u32, String> {
    run((letters(8), any::<prop::sample::Index>()), |(w, split)| {
        let reference: Op = normalize_word(&w);
        let left = w
            .iter()
            .fold(Op::identity(), |acc, l| acc.compose(&letter_op(l)));
        let right = w
            .iter()
            .rev()
            .fold(Op::identity(), |acc, l| letter_op(l).compose(&acc));
        let k = split.index(w.len() + 1);
        let halves = normalize_word::<Rational>(&w[..k]).compose(&normalize_word(&w[k..]));
        prop_assert_eq!(&left, &reference);
        prop_assert_eq!(&right, &reference);
        prop_assert_eq!(&halves, &reference);
        Ok(())
    })
}

pub fn t_commutativity() -> Result<u32, String> {
    run((euler_poly(4), euler_poly(4)), |(p, q)| {
        let (a, b) = (p.to_expanded(), q.to_expanded());
        prop_assert_eq!(a.compose(&b), b.compose(&a));
        prop_assert_eq!(Poly::from_diagonal(&a.compose(&b)), Some(p * q));
        Ok(())
    })
}

/// `T_r M^n = M^n T_{r+n}` and `T_r D^n = D^n T_{r-n}`.
pub fn shift_identities() -> Result<u32, String> {
    let r = (1i64..=4).prop_flat_map(|d| (-3 * d..=3 * d).prop_map(move |n| rat(n, d)));
    run((r, 1u32..=3), |(r, n)| {
        let n_q = int(i64::from(n));
        let mn = Op::m().pow(n);
        let dn = Op::d().pow(n);
        prop_assert_eq!(Op::t(r.clone()).compose(&mn), mn.compose(&Op::t(&r + &n_q)));
        prop_assert_eq!(Op::t(r.clone()).compose(&dn), dn.compose(&Op::t(&r - &n_q)));
        Ok(())
    })
}

pub fn euler_diagonal_round_trip() -> Result<u32, String> {
    run(euler_poly(11), |p| {
        prop_assert_eq!(Poly::from_diagonal(&p.to_expanded()), Some(p));
        Ok(())
    })
}

/// Recognition followed by re-expansion gives back the input, up to the
/// reported right factor `M^d`.
pub fn detect_round_trip() -> Result<u32, String> {
    run((form(), 0u32..=2), |(f, d)| {
        let op = f.expand().compose(&Op::m().pow(d));
        let det = detect_assumption1(&op).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(det.right_shift, i64::from(d));
        prop_assert_eq!(det.form.expand().compose(&Op::m().pow(d)), op);
        Ok(())
    })
}

pub fn dual_involution() -> Result<u32, String> {
    run(form(), |f| {
        let o = dual_ode(&f).unwrap();
        prop_assert_eq!(dual_of_ode(&o).unwrap(), f.clone());
        // the density equation is (-1)^n times the formal adjoint
        let sign = if f.n() % 2 == 0 { int(1) } else { int(-1) };
        prop_assert_eq!(o.expand(), f.expand().adjoint().scale(&sign));
        Ok(())
    })
}

pub fn product_symmetry() -> Result<u32, String> {
    run((form(), form()), |(x, y)| {
        let xy = product_operator(&x, &y).unwrap().expand().normalized();
        let yx = product_operator(&y, &x).unwrap().expand().normalized();
        prop_assert_eq!(xy, yx);
        Ok(())
    })
}

/// `power(power(a, g), 1/g)` and `inverse(inverse(a))` give back `a` up to a
/// constant factor.
pub fn power_inverse_round_trips() -> Result<u32, String> {
    let case = (
        prop::collection::vec(small_rational(), 1..=3),
        nonzero_rational(),
        1u32..=2,
        t_product(2),
        1i64..=3,
    );
    run(case, |(ls, b, q0, k, g_abs)| {
        let g = int(g_abs);
        let a = Form::new(Poly::t_product(ls.iter()), b, q0 * g_abs as u32, k).unwrap();
        let there = power_operator(&a, &g).unwrap();
        let back = power_operator(&there, &(int(1) / &g)).unwrap();
        prop_assert!(
            back.expand().eq_up_to_scale(&a.expand()),
            "{} vs {}",
            back,
            a
        );
        let twice = inverse_operator(&inverse_operator(&a).unwrap()).unwrap();
        prop_assert!(twice.expand().eq_up_to_scale(&a.expand()));
        Ok(())
    })
}

/// Random gamma-product expressions in `s`.
pub fn gamma_expr() -> impl Strategy<Value = GammaProductExpr> {
    let affine = || (small_rational(), small_rational()).prop_map(|(a, b)| Affine::new(a, b));
    let factor = prop_oneof![
        (affine(), -2i64..=2).prop_map(|(a, n)| GammaProductExpr::gamma_pow(a, n)),
        (positive_rational(), affine()).prop_map(|(c, a)| GammaProductExpr::power(&c, a)),
        positive_rational().prop_map(GammaProductExpr::constant),
        affine().prop_map(GammaProductExpr::linear),
    ];
    prop::collection::vec(factor, 1..=4)
        .prop_map(|fs| fs.iter().fold(GammaProductExpr::one(), |acc, f| acc.mul(f)))
}

pub fn gamma_expr_equality() -> Result<u32, String> {
    let p = Precision::default();
    run((gamma_expr(), gamma_expr()), |(a, b)| {
        let probes = default_probes();
        let aa = gamma_expr_equal(&a, &a, &probes, p).unwrap();
        prop_assert_eq!(aa.verdict, Equality::StructurallyEqual);
        // a rearranged product is structurally the same expression
        let swapped = b.mul(&a).div(&b);
        prop_assert_eq!(
            gamma_expr_equal(&swapped, &a, &probes, p).unwrap().verdict,
            Equality::StructurallyEqual
        );
        let ab = gamma_expr_equal(&a, &b, &probes, p).map(|c| c.verdict);
        let ba = gamma_expr_equal(&b, &a, &probes, p).map(|c| c.verdict);
        prop_assert_eq!(ab.clone(), ba);
        if ab == Ok(Equality::StructurallyEqual) {
            for s in &probes {
                prop_assert_eq!(
                    a.eval(s, p).map(|x| x.to_f64()),
                    b.eval(s, p).map(|x| x.to_f64())
                );
            }
        }
        Ok(())
    })
}

fn gparams() -> impl Strategy<Value = GParams> {
    (0usize..=3, 0usize..=3)
        .prop_flat_map(|(p, q)| {
            (
                prop::collection::vec(small_rational(), p),
                prop::collection::vec(small_rational(), q),
                0..=q,
                0..=p,
                positive_rational(),
                nonzero_rational(),
                small_rational(),
            )
        })
        .prop_map(
            |(upper, lower, m, n, prefactor, power, outer_exponent)| GParams {
                m,
                n,
                upper,
                lower,
                prefactor,
                power,
                outer_exponent,
            },
        )
}

pub fn g_shift_round_trip() -> Result<u32, String> {
    run((gparams(), small_rational()), |(g, c)| {
        let (s, _) = g_identities(&g, &GIdentity::Shift(c.clone())).unwrap();
        let (back, _) = g_identities(&s, &GIdentity::Shift(-c)).unwrap();
        prop_assert_eq!(&back, &g);
        let (i, _) = g_identities(&g, &GIdentity::Invert).unwrap();
        let (ii, _) = g_identities(&i, &GIdentity::Invert).unwrap();
        prop_assert_eq!(ii, g);
        Ok(())
    })
}

/// The candidate from an ODE substituted back into the G-function equation
/// reproduces that ODE.
pub fn gparams_back_substitution() -> Result<u32, String> {
    run((form(), 0usize..=2), |(f, which)| {
        let o = dual_ode(&f).unwrap();
        let choice = [
            OrderChoice::Positive,
            OrderChoice::Symmetric,
            OrderChoice::Explicit { m: 0, n: 0 },
        ][which];
        let g = gparams_from_ode(&o, choice).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let back = gparams_to_ode(&g).unwrap();
        let (want, got) = (o.with_monic_l(), back.with_monic_l());
        prop_assert_eq!(got.form(), want.form());
        Ok(())
    })
}

/// Moments produced by the recurrence make every residual row vanish.
pub fn derive_moments_consistency() -> Result<u32, String> {
    run(
        (form(), prop::collection::vec(small_rational(), 6)),
        |(f, seeds)| {
            let a = f.expand();
            let need = stein_core::verify::seeds_needed(&a).unwrap();
            let table = match derive_moments(&a, &seeds[..need.min(seeds.len())], 10) {
                Ok(d) => seeds[..need.min(seeds.len())]
                    .iter()
                    .cloned()
                    .chain(d)
                    .collect::<Vec<_>>(),
                Err(_) => return Ok(()),
            };
            let rep = residual_report(&a, &table, 10).unwrap();
            for (_, row) in &rep.rows {
                if let ResidualRow::Value(v) = row {
                    prop_assert_eq!(v, &MomentValue::Exact(int(0)));
                }
            }
            prop_assert!(rep.evaluated() > 0);
            Ok(())
        },
    )
}

fn positive_atom() -> impl Strategy<Value = DistExpr> {
    prop_oneof![
        (positive_rational(), positive_rational()).prop_map(|(r, l)| DistExpr::from(gamma(r, l))),
        (positive_rational(), positive_rational()).prop_map(|(a, b)| DistExpr::from(beta(a, b))),
        positive_rational().prop_map(|l| DistExpr::from(exponential(l))),
    ]
}

pub fn mellin_multiplicative() -> Result<u32, String> {
    run((positive_atom(), positive_atom()), |(x, y)| {
        let prod = mellin(&DistExpr::product(vec![x.clone(), y.clone()])).unwrap();
        let sep = mellin(&x).unwrap().mul(&mellin(&y).unwrap());
        prop_assert_eq!(prod.canonical(), sep.canonical());
        Ok(())
    })
}

pub fn squared_moments() -> Result<u32, String> {
    run((positive_atom(), 0u64..=6), |(x, k)| {
        let sq = moments(&x.clone().power(int(2)), k).unwrap();
        prop_assert_eq!(sq, moments(&x, 2 * k).unwrap());
        Ok(())
    })
}
