//! Plug-in estimates from categorical data, compared with the values of
//! the model that generated the data.

use natfx::decomp::{self, Query};
use natfx::estimate::plugin;
use natfx::scm::{from_dataset, simulate, DiscreteScm, ModelFile, SimulationSpec};

fn main() {
    let file: ModelFile = serde_json::from_str(include_str!("data/dm1.json")).unwrap();
    let truth = DiscreteScm::from_model_file(file).unwrap();
    let q = Query::new("1", "0").m1_star("0").m2_star("0");
    let exact = decomp::evaluate(&truth, &q).unwrap();

    for n in [500, 5_000, 50_000] {
        let data = simulate(&truth, &SimulationSpec::new(&truth, n, 7)).unwrap();
        let fitted = from_dataset(&data, truth.scenario(), truth.levels()).unwrap();
        let est = plugin(&fitted, &q).unwrap();
        println!("n = {n}");
        for (name, v) in est.values() {
            let target = exact.get(&name).unwrap_or(exact.te);
            println!("  {name:<20} {v:>8.4}  (truth {target:.4})");
        }
    }
}
