use natfx::data::Dataset;
use natfx::decomp::{DecompositionResult, Query};
use natfx::estimate::{plugin, EstimateError};
use natfx::infer::{bootstrap, BootstrapConfig};
use natfx::scm::{from_dataset, simulate, DiscreteScm, Levels, ModelFile, SimulationSpec};

fn estimator(d: &Dataset) -> Result<DecompositionResult, EstimateError> {
    let q = Query::new("1", "0").m1_star("0").m2_star("0");
    let model = from_dataset(d, natfx::cfexpr::Scenario::chain(2).unwrap(), &Levels::binary(2))?;
    plugin(&model, &q)
}

/// Percentile intervals for the plug-in decomposition. The worker count
/// never changes the intervals; only the seed does.
fn main() {
    let file: ModelFile = serde_json::from_str(include_str!("data/dm1.json")).unwrap();
    let truth = DiscreteScm::from_model_file(file).unwrap();
    let data = simulate(&truth, &SimulationSpec::new(&truth, 2000, 11)).unwrap();

    let cfg = BootstrapConfig { level: 0.9, ..BootstrapConfig::new(500, 2024) };
    let report = bootstrap(&data, estimator, &cfg).unwrap();
    println!("{} replicates, {} failed", report.replicates, report.failed);
    for c in &report.result.components {
        let (lo, hi) = c.ci.unwrap();
        println!("{:<20} {:>8.4}  [{lo:.4}, {hi:.4}]", c.name, c.value);
    }
    let (lo, hi) = report.result.te_ci.unwrap();
    println!("{:<20} {:>8.4}  [{lo:.4}, {hi:.4}]", "TE", report.result.te);

    let again = bootstrap(&data, estimator, &BootstrapConfig { workers: Some(1), ..cfg }).unwrap();
    assert_eq!(again, report);
}
