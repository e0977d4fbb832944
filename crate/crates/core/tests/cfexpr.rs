use natfx::cfexpr::{
    check_identifiability, format_cf, parse_cf, parse_cf_inferred, CfError, CfExpr, ExposureLevel, MediatorSpec,
    Scenario, Status,
};
use proptest::prelude::*;

fn exposure() -> impl Strategy<Value = ExposureLevel> {
    prop_oneof![
        4 => Just(ExposureLevel::Treatment),
        4 => Just(ExposureLevel::Reference),
        1 => Just(ExposureLevel::named("a**")),
        1 => Just(ExposureLevel::named("dose_2")),
    ]
}

fn fixed(index: usize) -> BoxedStrategy<MediatorSpec> {
    prop_oneof![Just(format!("m{index}*")), Just("low".to_string())]
        .prop_map(MediatorSpec::Fixed)
        .boxed()
}

/// Spec for mediator `index` (1-based) of a chain: fixed, or a
/// counterfactual nesting a spec for the previous mediator.
fn chain_spec(index: usize) -> BoxedStrategy<MediatorSpec> {
    if index == 1 {
        prop_oneof![fixed(1), exposure().prop_map(MediatorSpec::natural)].boxed()
    } else {
        prop_oneof![
            1 => fixed(index),
            3 => (exposure(), chain_spec(index - 1)).prop_map(|(x, p)| MediatorSpec::nested(x, p)),
        ]
        .boxed()
    }
}

fn expr(scenario: Scenario) -> BoxedStrategy<CfExpr> {
    let k = scenario.mediators();
    let slots: Vec<BoxedStrategy<MediatorSpec>> = (1..=k)
        .map(|i| {
            if scenario.is_chain() {
                chain_spec(i)
            } else {
                prop_oneof![fixed(i), exposure().prop_map(MediatorSpec::natural)].boxed()
            }
        })
        .collect();
    (exposure(), slots).prop_map(|(x, m)| CfExpr::new(x, m)).boxed()
}

fn scenario() -> impl Strategy<Value = Scenario> {
    prop_oneof![
        Just(Scenario::SingleMediator),
        (2usize..=4).prop_map(|k| Scenario::nonseq(k).unwrap()),
        (2usize..=4).prop_map(|k| Scenario::chain(k).unwrap()),
    ]
}

fn scenario_and_expr() -> impl Strategy<Value = (Scenario, CfExpr)> {
    scenario().prop_flat_map(|s| (Just(s), expr(s)))
}

fn padded(text: &str) -> String {
    text.replace(", ", " ,\t").replace('(', " ( ")
}

proptest! {
    #[test]
    fn format_then_parse_is_identity((scenario, e) in scenario_and_expr()) {
        let text = format_cf(&e);
        prop_assert_eq!(parse_cf(&text, scenario).unwrap(), e.clone());
        prop_assert_eq!(parse_cf(&padded(&text), scenario).unwrap(), e);
    }

    #[test]
    fn inferred_scenario_accepts_canonical_text((_, e) in scenario_and_expr()) {
        let (parsed, _) = parse_cf_inferred(&format_cf(&e)).unwrap();
        prop_assert_eq!(parsed, e);
    }

    #[test]
    fn checker_is_pure((scenario, e) in scenario_and_expr()) {
        let first = check_identifiability(&e, scenario);
        let again = check_identifiability(&e.clone(), scenario);
        let reparsed = check_identifiability(&parse_cf(&format_cf(&e), scenario).unwrap(), scenario);
        prop_assert_eq!(&first, &again);
        prop_assert_eq!(&first, &reparsed);
        prop_assert_eq!(first.status == Status::Identifiable, first.conflicts.is_empty());
    }

    #[test]
    fn one_exposure_symbol_keeps_identifiability((scenario, e) in scenario_and_expr()) {
        prop_assume!(check_identifiability(&e, scenario).is_identifiable());
        for symbol in [ExposureLevel::Treatment, ExposureLevel::Reference, ExposureLevel::named("z")] {
            let collapsed = e.map_exposures(|_| symbol.clone());
            prop_assert!(check_identifiability(&collapsed, scenario).is_identifiable(), "{}", collapsed);
        }
    }
}

#[test]
fn textbook_notation_round_trips() {
    let chain = Scenario::chain(2).unwrap();
    for text in [
        "Y(a, M1(a), M2(a, M1(a)))",
        "Y(a*, M1(a), M2(a*, M1(a)))",
        "Y(a, m1*, m2*)",
        "Y(a**, M1(a*), M2(a, M1(a*)))",
    ] {
        assert_eq!(format_cf(&parse_cf(text, chain).unwrap()), text);
    }
    let e: CfExpr = "Y(a,M1(a*))".parse().unwrap();
    assert_eq!(e.to_string(), "Y(a, M1(a*))");
}

#[test]
fn malformed_text_reports_position() {
    let nonseq = Scenario::nonseq(2).unwrap();
    let err = parse_cf("Y(a, M1(a), M2(a)", nonseq).unwrap_err();
    assert!(matches!(err, CfError::Syntax { .. }), "{err}");
    let err = parse_cf("Y(a, M1(a) M2(a))", nonseq).unwrap_err();
    assert!(matches!(err, CfError::Syntax { pos: 11, .. }), "{err}");
    let err = parse_cf("Y(a, M1(a), M3(a))", nonseq).unwrap_err();
    assert!(matches!(err, CfError::UnknownMediator { index: 3, declared: 2, .. } | CfError::MisplacedMediator { .. }), "{err}");
    let err = parse_cf("Y(a, M1(a), M2(a))", Scenario::chain(2).unwrap()).unwrap_err();
    assert!(matches!(err, CfError::Arity { mediator: 2, expected: 1, found: 0, .. }), "{err}");
    let err = parse_cf("Y(a, M1(a))", nonseq).unwrap_err();
    assert!(matches!(err, CfError::MediatorCount { expected: 2, found: 1 }), "{err}");
}

#[test]
fn kite_formulas_are_flagged() {
    let chain = Scenario::chain(2).unwrap();
    let v = check_identifiability(&parse_cf("Y(a, M1(a), M2(a, M1(a*)))", chain).unwrap(), chain);
    assert_eq!(v.status, Status::Problematic);
    assert_eq!(v.conflicts.len(), 1);
    assert_eq!(v.conflicts[0].mediator, 1);
    let v = check_identifiability(&parse_cf("Y(a, m1*, M2(a*, M1(a*)))", chain).unwrap(), chain);
    assert_eq!(v.status, Status::Problematic);
}
