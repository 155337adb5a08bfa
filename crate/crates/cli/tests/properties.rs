use nilweier_cli::expr::{parse_expression, Ast, BinOp, Func, Variable};
use proptest::prelude::*;

fn func() -> impl Strategy<Value = Func> {
    prop_oneof![
        Just(Func::Sin),
        Just(Func::Cos),
        Just(Func::Tan),
        Just(Func::Sinh),
        Just(Func::Cosh),
        Just(Func::Tanh),
        Just(Func::Exp),
        Just(Func::Log),
        Just(Func::Sqrt),
    ]
}

fn op() -> impl Strategy<Value = BinOp> {
    prop_oneof![
        Just(BinOp::Add),
        Just(BinOp::Sub),
        Just(BinOp::Mul),
        Just(BinOp::Div),
        Just(BinOp::Pow),
    ]
}

fn ast() -> impl Strategy<Value = Ast> {
    let leaf = prop_oneof![
        (0.0f64..1e3).prop_map(Ast::Num),
        (0u32..20).prop_map(|k| Ast::Num(k as f64 / 4.0)),
        Just(Ast::Var(Variable::S)),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Ast::Neg(Box::new(a))),
            (func(), inner.clone()).prop_map(|(f, a)| Ast::Call(f, Box::new(a))),
            (op(), inner.clone(), inner).prop_map(|(o, a, b)| Ast::Bin(o, Box::new(a), Box::new(b))),
        ]
    })
}

fn same(a: Result<f64, impl std::fmt::Debug>, b: Result<f64, impl std::fmt::Debug>) -> bool {
    match (a, b) {
        (Ok(x), Ok(y)) => x == y,
        (Err(_), Err(_)) => true,
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pretty_print_is_idempotent(a in ast()) {
        let e = nilweier_cli::Expression { ast: a, variable: Variable::S };
        let once = e.to_string();
        let parsed = parse_expression(&once, Variable::S).unwrap();
        let twice = parsed.to_string();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(parse_expression(&twice, Variable::S).unwrap(), parsed.clone());
        for x in [-1.3, 0.0, 0.7] {
            prop_assert!(same(parsed.eval(x), e.eval(x)));
        }
    }

    #[test]
    fn parse_errors_point_inside_the_input(src in "[s0-9.+*/^()-]{0,12}") {
        if let Err(e) = parse_expression(&src, Variable::S) {
            prop_assert!(e.offset >= 1 && e.offset <= src.len() + 1);
            prop_assert!(!e.expected.is_empty());
        }
    }
}
