//! Mean outcomes in cross-world counterfactual worlds under a small
//! two-mediator chain with binary exposure and mediators.

use natfx::cfexpr::parse_cf;
use natfx::scm::{Bindings, DiscreteScm, ModelFile};

fn main() {
    let file: ModelFile = serde_json::from_str(include_str!("data/dm1.json")).unwrap();
    let model = DiscreteScm::from_model_file(file).unwrap();
    let scenario = model.scenario();
    let bindings = Bindings::new("1", "0").fix("m1*", "0").fix("m2*", "0");

    for text in [
        "Y(a, M1(a), M2(a, M1(a)))",
        "Y(a, M1(a*), M2(a, M1(a*)))",
        "Y(a, M1(a), M2(a*, M1(a)))",
        "Y(a*, M1(a), M2(a*, M1(a)))",
        "Y(a*, M1(a*), M2(a*, M1(a*)))",
        "Y(a, m1*, m2*)",
    ] {
        let expr = parse_cf(text, scenario).unwrap();
        let mean = model.eval_expectation(&expr, &bindings).unwrap();
        println!("E[{text}] = {mean:.4}");
    }

    // Cross-world formulas with conflicting mediator specs are refused.
    let bad = parse_cf("Y(a, M1(a), M2(a, M1(a*)))", scenario).unwrap();
    if let Err(e) = model.eval_expectation(&bad, &bindings) {
        println!("refused: {e}");
    }
}
