use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{DiscreteScm, ScmError};
use crate::data::{Column, Dataset, Roles};

/// Settings for drawing an i.i.d. sample from a [`DiscreteScm`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub n: usize,
    pub seed: u64,
    /// `Pr(A = level)` in the model's exposure-level order.
    pub exposure_probs: Vec<f64>,
    /// Standard deviation of the Gaussian noise added to `E[Y | A, M1, M2]`.
    pub noise_sd: f64,
}

impl SimulationSpec {
    /// Uniform exposure assignment and unit outcome noise.
    pub fn new(model: &DiscreteScm, n: usize, seed: u64) -> Self {
        let k = model.levels().a.len();
        SimulationSpec {
            n,
            seed,
            exposure_probs: vec![1.0 / k as f64; k],
            noise_sd: 1.0,
        }
    }

    pub fn exposure_probs(mut self, probs: Vec<f64>) -> Self {
        self.exposure_probs = probs;
        self
    }

    pub fn noise_sd(mut self, sd: f64) -> Self {
        self.noise_sd = sd;
        self
    }
}

/// Draws `spec.n` rows following `A → M1 → M2 → Y`.
///
/// Columns are `A`, `M1`, `M2` (two-mediator models only) and `Y`.
/// The same spec and model always produce the same rows.
pub fn simulate(model: &DiscreteScm, spec: &SimulationSpec) -> Result<Dataset, ScmError> {
    if spec.n == 0 {
        return Err(ScmError::NoRows);
    }
    let levels = model.levels();
    let mut probs = spec.exposure_probs.clone();
    if probs.len() != levels.a.len() {
        return Err(ScmError::InvalidDistribution {
            table: "exposure assignment",
            row: "A".into(),
            detail: format!("{} probabilities for {} levels", probs.len(), levels.a.len()),
        });
    }
    super::normalize("exposure assignment", "A", &mut probs)?;
    if !(spec.noise_sd.is_finite() && spec.noise_sd >= 0.0) {
        return Err(ScmError::InvalidDistribution {
            table: "outcome noise",
            row: "Y".into(),
            detail: format!("standard deviation {} is invalid", spec.noise_sd),
        });
    }

    let two = model.scenario().mediators() == 2;
    let n1 = levels.m1.len();
    let n2 = model.n_m2();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (mut col_a, mut col_m1, mut col_m2, mut col_y) = (
        Vec::with_capacity(spec.n),
        Vec::with_capacity(spec.n),
        Vec::with_capacity(spec.n),
        Vec::with_capacity(spec.n),
    );
    for _ in 0..spec.n {
        let a = draw(&mut rng, probs.iter().copied());
        let m1 = draw(&mut rng, (0..n1).map(|m| model.p_m1(a, m)));
        let m2 = draw(&mut rng, (0..n2).map(|m| model.p_m2(a, m1, m)));
        let noise: f64 = rng.sample(StandardNormal);
        col_a.push(a);
        col_m1.push(m1);
        if two {
            col_m2.push(m2);
        }
        col_y.push(model.y_mean(a, m1, m2) + spec.noise_sd * noise);
    }

    let mut columns = vec![
        ("A".to_string(), column(&levels.a, &col_a)),
        ("M1".to_string(), column(&levels.m1, &col_m1)),
    ];
    let mediators: &[&str] = if two {
        columns.push(("M2".to_string(), column(&levels.m2, &col_m2)));
        &["M1", "M2"]
    } else {
        &["M1"]
    };
    columns.push(("Y".to_string(), Column::Numeric(col_y)));
    Ok(Dataset::new(Roles::new("A", mediators, "Y"), columns)?)
}

/// Numeric column when every label is an integer, labels otherwise.
fn column(support: &[String], draws: &[usize]) -> Column {
    let numbers: Option<Vec<f64>> = support
        .iter()
        .map(|l| l.parse::<i64>().ok().filter(|v| v.to_string() == *l).map(|v| v as f64))
        .collect();
    match numbers {
        Some(v) => Column::Numeric(draws.iter().map(|&i| v[i]).collect()),
        None => Column::Labels(draws.iter().map(|&i| support[i].clone()).collect()),
    }
}

/// Inverse-CDF draw of an index from `probs`.
fn draw(rng: &mut ChaCha8Rng, probs: impl Iterator<Item = f64>) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.enumerate() {
        acc += p;
        if p > 0.0 {
            last = i;
        }
        if u < acc {
            return i;
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfexpr::Scenario;
    use crate::scm::{Levels, Table};

    fn dm1() -> DiscreteScm {
        let y = (0..2)
            .map(|a| {
                (0..2)
                    .map(|m1| {
                        (0..2)
                            .map(|m2| {
                                let (a, m1, m2) = (a as f64, m1 as f64, m2 as f64);
                                1.0 + a + 2.0 * m1 + 3.0 * m2 + a * m1 * m2
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        DiscreteScm::new(
            Scenario::OnePathChain(2),
            Levels::binary(2),
            vec![vec![0.8, 0.2], vec![0.4, 0.6]],
            Some(Table::Three(vec![
                vec![vec![0.9, 0.1], vec![0.6, 0.4]],
                vec![vec![0.7, 0.3], vec![0.4, 0.6]],
            ])),
            Table::Three(y),
        )
        .unwrap()
    }

    #[test]
    fn zero_rows_is_an_error() {
        let m = dm1();
        assert!(matches!(simulate(&m, &SimulationSpec::new(&m, 0, 1)), Err(ScmError::NoRows)));
    }

    #[test]
    fn same_seed_same_bytes() {
        let m = dm1();
        let spec = SimulationSpec::new(&m, 4, 7);
        let render = |d: Dataset| {
            let mut buf = Vec::new();
            d.write_csv(&mut buf).unwrap();
            buf
        };
        let first = render(simulate(&m, &spec).unwrap());
        assert_eq!(first, render(simulate(&m, &spec).unwrap()));
        assert_eq!(String::from_utf8(first).unwrap().lines().count(), 5);
    }

    #[test]
    fn m1_frequency_among_treated() {
        let m = dm1();
        let d = simulate(&m, &SimulationSpec::new(&m, 100_000, 1)).unwrap();
        let a = d.labels("A").unwrap();
        let m1 = d.labels("M1").unwrap();
        let (mut hits, mut treated) = (0usize, 0usize);
        for (a, m1) in a.iter().zip(&m1) {
            if a == "1" {
                treated += 1;
                hits += (m1 == "1") as usize;
            }
        }
        let freq = hits as f64 / treated as f64;
        assert!((freq - 0.6).abs() < 0.01, "{freq}");
    }

    #[test]
    fn bad_assignment_is_rejected() {
        let m = dm1();
        let spec = SimulationSpec::new(&m, 3, 1).exposure_probs(vec![0.2, 0.2]);
        assert!(matches!(simulate(&m, &spec), Err(ScmError::InvalidDistribution { .. })));
    }
}
