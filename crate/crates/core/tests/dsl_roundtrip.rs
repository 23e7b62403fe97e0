//! Randomized parse/print round-trip over the whole expression grammar.

use proptest::prelude::*;

use csbf_core::dsl::{parse, pretty_print, Ast, Pos};
use csbf_core::jet::Axis;
use csbf_core::rat::rat;

fn pos() -> Pos {
    Pos { line: 1, col: 1 }
}

fn arb_axis() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::X), Just(Axis::Y), Just(Axis::Z)]
}

fn arb_leaf() -> impl Strategy<Value = Ast> {
    prop_oneof![
        (-9i64..=9, 1i64..=4).prop_map(|(n, d)| Ast::Rational(rat(n, d))),
        Just(Ast::TParam),
        arb_axis().prop_map(Ast::Coord),
        arb_axis().prop_map(Ast::Covector),
        prop_oneof![
            Just("w0"),
            Just("w1"),
            Just("wt"),
            Just("a"),
            Just("chi"),
            Just("xi"),
            Just("E"),
            Just("F_"),
            Just("H"),
            Just("my_form")
        ]
        .prop_map(|name: &str| Ast::Sym(name.to_string(), pos())),
    ]
}

fn arb_ast() -> impl Strategy<Value = Ast> {
    arb_leaf().prop_recursive(4, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Ast::ScalarMul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Wedge(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Ast::Bracket(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Ast::CovariantD(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Ast::Contract(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| {
                // A negated literal folds into the literal at parse time;
                // generate the folded form directly.
                match a {
                    Ast::Rational(r) => Ast::Rational(-r),
                    other => Ast::Neg(Box::new(other)),
                }
            }),
            inner.clone().prop_map(|a| Ast::ExteriorD(Box::new(a))),
            inner.clone().prop_map(|a| Ast::Trace(Box::new(a))),
            inner.clone().prop_map(|a| Ast::Curvature(Box::new(a))),
            (inner.clone(), inner.clone(), inner)
                .prop_map(|(a, b, c)| Ast::VecField(Box::new(a), Box::new(b), Box::new(c))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(ast in arb_ast()) {
        let printed = pretty_print(&ast);
        let reparsed = parse(&printed)
            .unwrap_or_else(|e| panic!("failed to reparse '{printed}': {e}"));
        prop_assert_eq!(&reparsed, &ast, "printed: {}", printed);
        // Printing is idempotent on canonical text.
        prop_assert_eq!(pretty_print(&reparsed), printed);
    }
}
