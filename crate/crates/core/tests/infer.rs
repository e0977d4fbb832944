mod common;

use common::*;
use natfx::data::Dataset;
use natfx::decomp::DecompositionResult;
use natfx::estimate::{plugin, EstimateError};
use natfx::infer::{bootstrap, percentile_interval, BootstrapConfig, InferError};
use natfx::scm::{self, simulate, Levels, SimulationSpec};
use proptest::prelude::*;

fn estimator(d: &Dataset) -> Result<DecompositionResult, EstimateError> {
    let model = scm::from_dataset(d, SEQ2, &Levels::binary(2))?;
    plugin(&model, &binary_query())
}

fn sample(n: usize, seed: u64) -> Dataset {
    let m = dm1();
    simulate(&m, &SimulationSpec::new(&m, n, seed)).unwrap()
}

#[test]
fn output_depends_only_on_seed_and_data() {
    let data = sample(800, 1);
    let run = |seed, workers| {
        let cfg = BootstrapConfig { workers, ..BootstrapConfig::new(200, seed) };
        serde_json::to_string(&bootstrap(&data, estimator, &cfg).unwrap()).unwrap()
    };
    let reference = run(17, Some(1));
    for workers in [None, Some(2), Some(3), Some(8)] {
        assert_eq!(run(17, workers), reference);
    }
    assert_ne!(run(18, Some(1)), reference);
}

#[test]
fn every_replicate_keeps_the_sum_identity() {
    let data = sample(600, 2);
    let r = bootstrap(&data, estimator, &BootstrapConfig::new(300, 4)).unwrap();
    assert_eq!(r.failed, 0);
    let res = &r.result;
    for c in &res.components {
        let (lo, hi) = c.ci.unwrap();
        assert!(lo <= hi, "{}", c.name);
    }
    let (lo, hi) = res.te_ci.unwrap();
    assert!(lo <= hi);
    assert!(res.sum_gap < 1e-9);

    let recorded = std::sync::Mutex::new(Vec::new());
    let checking = |d: &Dataset| {
        let out = estimator(d)?;
        let sum: f64 = out.summands().map(|c| c.value).sum();
        recorded.lock().unwrap().push((sum - out.te).abs());
        Ok::<_, EstimateError>(out)
    };
    bootstrap(&data, checking, &BootstrapConfig::new(100, 4)).unwrap();
    let gaps = recorded.into_inner().unwrap();
    assert_eq!(gaps.len(), 101);
    assert!(gaps.iter().all(|g| *g < 1e-9));
}

#[test]
fn sparse_cells_fail_under_a_strict_policy() {
    let m = dm1();
    let data = simulate(&m, &SimulationSpec::new(&m, 30, 3).exposure_probs(vec![0.9, 0.1])).unwrap();
    let strict = BootstrapConfig { max_fail: 0.0, ..BootstrapConfig::new(200, 1) };
    match bootstrap(&data, estimator, &strict) {
        Err(InferError::TooManyFailedReplicates { failed, replicates, allowed, first }) => {
            assert!(failed > 0 && replicates == 200 && allowed == 0);
            assert!(first.contains("no observations"), "{first}");
        }
        Err(InferError::FullData(msg)) => assert!(msg.contains("no observations"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn percentile_bounds_are_ordered(values in prop::collection::vec(-1e6f64..1e6, 1..200), level in 0.01f64..0.99) {
        let (lo, hi) = percentile_interval(&values, level);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(min <= lo && lo <= hi && hi <= max);
    }
}
