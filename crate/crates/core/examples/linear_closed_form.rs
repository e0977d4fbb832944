//! Closed-form decomposition under the Gaussian-linear chain, first from
//! known coefficients, then from a fit to simulated data with two covariates.

use natfx::estimate::{
    expectation_w, fit_linear_system, linear_components, simulate_linear, CovariateProfile, LinearParams,
    LinearQuery, LinearSimulation, W,
};

fn main() {
    let params = LinearParams::new([120.0, 2.0, 0.8, 1.5, 0.3, 0.6, -0.02, 0.05], [3.0, 0.4, 0.02, 0.01], [27.0, 1.2], 16.0)
        .with_covariates(vec![2.5, 0.3], vec![0.1, 0.005], vec![0.8, 0.02]);
    let q = LinearQuery::new(1.0, 0.0, 27.5, 3.4);
    let c = CovariateProfile::new(vec![1.0, 48.3]);

    println!("mean outcome in each world:");
    for w in W::ALL {
        println!("  {w:?} = {:.4}", expectation_w(&params, w, &c, q.a, q.a_star));
    }

    let truth = linear_components(&params, &q, &c).unwrap();
    let mut spec = LinearSimulation::new(20_000, 3);
    spec.covariates = vec![("sex".into(), 0.5, 0.5), ("age".into(), 48.0, 12.0)];
    let data = simulate_linear(&params, &spec).unwrap();
    let fitted = fit_linear_system(&data, &[]).unwrap();
    let est = linear_components(&fitted, &q, &c).unwrap();

    println!("\n{:<20} {:>9} {:>9}", "component", "truth", "fitted");
    for ((name, t), (_, e)) in truth.values().into_iter().zip(est.values()) {
        println!("{name:<20} {t:>9.4} {e:>9.4}");
    }
}
