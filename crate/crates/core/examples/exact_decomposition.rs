//! Every component of the total-effect decomposition for a known model,
//! with the counterfactual contrast that defines it.

use natfx::decomp::{self, Query, Role};
use natfx::scm::{DiscreteScm, ModelFile};

fn load(text: &str) -> DiscreteScm {
    DiscreteScm::from_model_file(serde_json::from_str::<ModelFile>(text).unwrap()).unwrap()
}

fn main() {
    let chain = load(include_str!("data/dm1.json"));
    let q = Query::new("1", "0").m1_star("0").m2_star("0");
    let specs = decomp::catalog(chain.scenario(), &q).unwrap();
    let result = decomp::evaluate(&chain, &q).unwrap();
    for spec in &specs {
        let tag = if spec.role == Role::Auxiliary { " (aux)" } else { "" };
        println!("{:<20} {:>7.4}{tag}", spec.name, result.get(&spec.name).unwrap());
        println!("    {}", spec.expansion());
    }
    println!("{:<20} {:>7.4}", "TE", result.te);
    println!("sum of summands differs from TE by {:.1e}", result.sum_gap);

    let single = load(include_str!("data/ds1.json"));
    let q = Query::new("1", "0").m1_star("0");
    let r = decomp::evaluate(&single, &q).unwrap();
    println!();
    for (name, v) in r.values() {
        println!("{name:<10} {v:>7.4}");
    }
}
