//! Randomized algebraic properties, 128 cases each.

mod common;

macro_rules! property {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = common::$name() {
                    panic!("{}: {e}", stringify!($name));
                }
            }
        )*
    };
}

property!(
    normal_form_confluence,
    t_commutativity,
    shift_identities,
    euler_diagonal_round_trip,
    detect_round_trip,
    dual_involution,
    product_symmetry,
    power_inverse_round_trips,
    gamma_expr_equality,
    g_shift_round_trip,
    gparams_back_substitution,
    derive_moments_consistency,
    mellin_multiplicative,
    squared_moments,
);
