use std::fmt::Display;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::decomp::DecompositionResult;

#[derive(Debug, thiserror::Error)]
pub enum InferError {
    #[error("invalid bootstrap configuration: {0}")]
    InvalidConfig(String),
    #[error("estimator failed on the full data: {0}")]
    FullData(String),
    #[error("{failed} of {replicates} bootstrap replicates failed, at most {allowed} allowed; first failure: {first}")]
    TooManyFailedReplicates {
        failed: usize,
        replicates: usize,
        allowed: usize,
        first: String,
    },
    #[error("could not start the worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Percentile-bootstrap settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
    /// Largest tolerated fraction of replicates on which the estimator fails.
    pub max_fail: f64,
    /// Worker threads; `None` uses rayon's default. Results do not depend on it.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: 1000,
            level: 0.95,
            seed: 0,
            max_fail: 0.01,
            workers: None,
        }
    }
}

impl BootstrapConfig {
    pub fn new(replicates: usize, seed: u64) -> Self {
        BootstrapConfig {
            replicates,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), InferError> {
        if self.replicates < 2 {
            return Err(InferError::InvalidConfig(format!("{} replicates, need at least 2", self.replicates)));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(InferError::InvalidConfig(format!("level {} is outside (0, 1)", self.level)));
        }
        if !(0.0..=1.0).contains(&self.max_fail) {
            return Err(InferError::InvalidConfig(format!("max_fail {} is outside [0, 1]", self.max_fail)));
        }
        if self.workers == Some(0) {
            return Err(InferError::InvalidConfig("zero workers".into()));
        }
        Ok(())
    }
}

/// Point estimates from the full data with percentile intervals attached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapReport {
    pub result: DecompositionResult,
    pub replicates: usize,
    pub failed: usize,
}

/// Sample quantile with linear interpolation between order statistics
/// (`h = (n − 1) p`). `sorted` must be ascending and non-empty.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Equal-tailed percentile interval of `values` at confidence `level`.
pub fn percentile_interval(values: &[f64], level: f64) -> (f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    (quantile(&v, tail), quantile(&v, 1.0 - tail))
}

/// Resamples rows with replacement `cfg.replicates` times and re-runs
/// `estimator` on each resample.
///
/// Replicate `i` draws its rows from a ChaCha8 stream selected by `i`
/// under the master seed, and results are gathered by replicate index, so
/// the output depends only on the seed, the data and the estimator.
/// Replicates whose estimator call fails are dropped, up to
/// `cfg.max_fail` of the total.
pub fn bootstrap<F, E>(data: &Dataset, estimator: F, cfg: &BootstrapConfig) -> Result<BootstrapReport, InferError>
where
    F: Fn(&Dataset) -> Result<DecompositionResult, E> + Sync,
    E: Display,
{
    cfg.validate()?;
    let full = estimator(data).map_err(|e| InferError::FullData(e.to_string()))?;
    let n = data.n_rows();

    let run = |i: usize| -> Result<Vec<f64>, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let r = estimator(&data.select_rows(&rows)).map_err(|e| e.to_string())?;
        let mut values = Vec::with_capacity(full.components.len() + 1);
        for c in &full.components {
            values.push(
                r.get(&c.name)
                    .ok_or_else(|| format!("replicate {i} has no component {}", c.name))?,
            );
        }
        values.push(r.te);
        Ok(values)
    };
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = cfg.workers {
            builder = builder.num_threads(w);
        }
        builder.build()?
    };
    let outcomes: Vec<Result<Vec<f64>, String>> =
        pool.install(|| (0..cfg.replicates).into_par_iter().map(run).collect());

    let failed = outcomes.iter().filter(|o| o.is_err()).count();
    let allowed = (cfg.max_fail * cfg.replicates as f64).floor() as usize;
    if failed > allowed {
        let first = outcomes.iter().find_map(|o| o.as_ref().err()).cloned().unwrap_or_default();
        return Err(InferError::TooManyFailedReplicates {
            failed,
            replicates: cfg.replicates,
            allowed,
            first,
        });
    }
    let good: Vec<&Vec<f64>> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
    if good.len() < 2 {
        return Err(InferError::TooManyFailedReplicates {
            failed,
            replicates: cfg.replicates,
            allowed,
            first: "fewer than two replicates succeeded".into(),
        });
    }
    let column = |j: usize| -> Vec<f64> { good.iter().map(|v| v[j]).collect() };

    let mut result = full;
    for (j, c) in result.components.iter_mut().enumerate() {
        c.ci = Some(percentile_interval(&column(j), cfg.level));
    }
    result.te_ci = Some(percentile_interval(&column(result.components.len()), cfg.level));
    Ok(BootstrapReport {
        result,
        replicates: cfg.replicates,
        failed,
    })
}
