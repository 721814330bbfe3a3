//! Rendering a parsed expression and parsing it again is a fixed point.

use proptest::prelude::*;
use stein_cli::parse_expression;
use stein_core::catalog::atoms::*;
use stein_core::catalog::DistExpr;
use stein_core::scalar::rat;
use stein_core::Rational;

fn pos() -> impl Strategy<Value = Rational> {
    (1i64..=20, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn any_rat() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn atom() -> impl Strategy<Value = DistExpr> {
    prop_oneof![
        (any_rat(), pos()).prop_map(|(m, s)| normal(m, s).into()),
        (pos(), pos()).prop_map(|(r, l)| gamma(r, l).into()),
        (pos(), pos()).prop_map(|(a, b)| beta(a, b).into()),
        pos().prop_map(|v| student(v).into()),
        (pos(), any_rat(), pos()).prop_map(|(r, t, s)| vg(r, t, s).into()),
        pos().prop_map(|l| exponential(l).into()),
    ]
}

fn expr() -> impl Strategy<Value = DistExpr> {
    atom().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(DistExpr::product),
            (
                inner.clone(),
                any_rat().prop_filter("nonzero", |g| *g != rat(0, 1))
            )
                .prop_map(|(e, g)| e.power(g)),
            (inner.clone(), any_rat()).prop_map(|(e, m)| e.shift(m)),
            (inner.clone(), any_rat()).prop_map(|(e, c)| e.scale(c)),
            (inner, 1u32..=5).prop_map(|(e, n)| e.sum_iid(n)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn parse_render_parse(e in expr()) {
        let once = parse_expression(&e.to_string()).unwrap();
        prop_assert_eq!(&once, &e);
        let twice = parse_expression(&once.to_string()).unwrap();
        prop_assert_eq!(twice, once);
    }
}
