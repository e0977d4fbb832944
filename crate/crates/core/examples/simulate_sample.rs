use std::io;

use natfx::scm::{simulate, DiscreteScm, ModelFile, SimulationSpec};

/// Draws a sample from the chain model and prints the first rows as CSV,
/// then the share of treated units in each mediator cell.
fn main() {
    let file: ModelFile = serde_json::from_str(include_str!("data/dm1.json")).unwrap();
    let model = DiscreteScm::from_model_file(file).unwrap();
    let spec = SimulationSpec::new(&model, 5000, 42).exposure_probs(vec![0.6, 0.4]).noise_sd(0.5);
    let data = simulate(&model, &spec).unwrap();

    data.select_rows(&(0..8).collect::<Vec<_>>()).write_csv(io::stdout()).unwrap();

    let a = data.numeric("A").unwrap();
    let m1 = data.numeric("M1").unwrap();
    for level in [0.0, 1.0] {
        let (treated, total) = a
            .iter()
            .zip(m1)
            .filter(|(_, m)| **m == level)
            .fold((0, 0), |(t, n), (a, _)| (t + (*a == 1.0) as usize, n + 1));
        println!("M1 = {level}: {treated}/{total} exposed");
    }
}
