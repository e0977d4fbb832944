//! Shared fixtures: golden models, random model generators, enumeration
//! oracles and a Monte-Carlo evaluator for the Gaussian linear model.
#![allow(dead_code)]

use natfx::cfexpr::{CfExpr, ExposureLevel, MediatorSpec, Scenario};
use natfx::decomp::{ComponentSpec, Query};
use natfx::estimate::LinearParams;
use natfx::scm::{DiscreteScm, Levels, ModelFile, Table};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

pub const SEQ2: Scenario = Scenario::OnePathChain(2);
pub const NONSEQ2: Scenario = Scenario::NonSeq(2);
pub const SINGLE: Scenario = Scenario::SingleMediator;

fn model_file(text: &str) -> DiscreteScm {
    let file: ModelFile = serde_json::from_str(text).expect("model file parses");
    DiscreteScm::from_model_file(file).expect("model file is valid")
}

/// Binary chain with `E[Y] = 1 + a + 2 m1 + 3 m2 + a m1 m2`.
pub fn dm1() -> DiscreteScm {
    model_file(include_str!("../../examples/data/dm1.json"))
}

/// Binary single-mediator model with `E[Y] = 1 + a + m + 2 a m`.
pub fn ds1() -> DiscreteScm {
    model_file(include_str!("../../examples/data/ds1.json"))
}

pub fn binary_query() -> Query {
    Query::new("1", "0").m1_star("0").m2_star("0")
}

/// `Σ_{m1, m2} E[Y | t, m1, m2] Pr(m1 | x1) Pr(m2 | x2, m1)`, written as a
/// plain loop over the tables. Arguments are level indices.
pub fn oracle_w(model: &DiscreteScm, t: usize, x1: usize, x2: usize) -> f64 {
    let n1 = model.levels().m1.len();
    let n2 = model.n_m2();
    let mut total = 0.0;
    for m1 in 0..n1 {
        for m2 in 0..n2 {
            total += model.y_mean(t, m1, m2) * model.p_m1(x1, m1) * model.p_m2(x2, m1, m2);
        }
    }
    total
}

/// `E[Y(a)]` by a literal triple loop over exposure, `M1` and `M2`, with
/// the exposure loop selecting the treated level.
pub fn oracle_mean_outcome(model: &DiscreteScm, a: usize) -> f64 {
    let na = model.levels().a.len();
    let n1 = model.levels().m1.len();
    let n2 = model.n_m2();
    let mut total = 0.0;
    for x in 0..na {
        if x != a {
            continue;
        }
        for m1 in 0..n1 {
            for m2 in 0..n2 {
                total += model.y_mean(x, m1, m2) * model.p_m1(x, m1) * model.p_m2(x, m1, m2);
            }
        }
    }
    total
}

pub fn oracle_te(model: &DiscreteScm, a: usize, a_star: usize) -> f64 {
    oracle_mean_outcome(model, a) - oracle_mean_outcome(model, a_star)
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// A distribution on `n` points with weights drawn from `{0, 1, …, 10}`.
fn grid_distribution(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0..=10) as f64).collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            return w.into_iter().map(|x| x / total).collect();
        }
    }
}

/// Random model with 2 or 3 levels per variable, grid probabilities and
/// cell means uniform in [−5, 5].
pub fn random_model(rng: &mut impl Rng, scenario: Scenario) -> DiscreteScm {
    let na = rng.random_range(2..=3);
    let n1 = rng.random_range(2..=3);
    let n2 = if scenario == SINGLE { 0 } else { rng.random_range(2..=3) };
    let levels = Levels {
        a: labels(na),
        m1: labels(n1),
        m2: labels(n2),
    };
    let pm1 = (0..na).map(|_| grid_distribution(rng, n1)).collect();
    let mut mean = || rng.random_range(-5.0..=5.0);
    let (pm2, ymean) = match scenario {
        SINGLE => {
            let y = (0..na).map(|_| (0..n1).map(|_| mean()).collect()).collect();
            (None, Table::Two(y))
        }
        _ => {
            let y = (0..na)
                .map(|_| (0..n1).map(|_| (0..n2).map(|_| mean()).collect()).collect())
                .collect();
            let pm2 = if scenario == NONSEQ2 {
                Table::Two((0..na).map(|_| grid_distribution(rng, n2)).collect())
            } else {
                Table::Three(
                    (0..na)
                        .map(|_| (0..n1).map(|_| grid_distribution(rng, n2)).collect())
                        .collect(),
                )
            };
            (Some(pm2), Table::Three(y))
        }
    };
    DiscreteScm::new(scenario, levels, pm1, pm2, ymean).expect("random model is valid")
}

/// Distinct exposure levels and random fixed mediator levels.
pub fn random_query(rng: &mut impl Rng, model: &DiscreteScm) -> Query {
    let levels = model.levels();
    let na = levels.a.len();
    let a = rng.random_range(0..na);
    let a_star = (a + rng.random_range(1..na)) % na;
    let mut q = Query::new(&levels.a[a], &levels.a[a_star]).m1_star(&levels.m1[rng.random_range(0..levels.m1.len())]);
    if !levels.m2.is_empty() {
        q = q.m2_star(&levels.m2[rng.random_range(0..levels.m2.len())]);
    }
    q
}

pub fn index(model: &DiscreteScm, label: &str) -> usize {
    model.exposure_index(label).expect("query level is declared")
}

/// Linear-model parameters with every coefficient uniform in [−1, 1], one
/// covariate and `σ²_{M1}` uniform in [0.2, 2].
pub fn random_linear_params(rng: &mut impl Rng) -> LinearParams {
    let mut u = || rng.random_range(-1.0..=1.0);
    let theta = [u(), u(), u(), u(), u(), u(), u(), u()];
    let beta = [u(), u(), u(), u()];
    let gamma = [u(), u()];
    let (tc, bc, gc) = (u(), u(), u());
    let mut p = LinearParams::new(theta, beta, gamma, rng.random_range(0.2..=2.0))
        .with_covariates(vec![tc], vec![bc], vec![gc]);
    p.covariates = vec!["C".into()];
    p
}

/// Values bound to the symbols of a linear-model formula.
#[derive(Debug, Clone, Copy)]
pub struct LinearWorld<'a> {
    pub params: &'a LinearParams,
    pub c: f64,
    pub a: f64,
    pub a_star: f64,
    pub m1_star: f64,
    pub m2_star: f64,
}

impl LinearWorld<'_> {
    fn exposure(&self, x: &ExposureLevel) -> f64 {
        match x {
            ExposureLevel::Treatment => self.a,
            ExposureLevel::Reference => self.a_star,
            ExposureLevel::Named(l) => panic!("unbound exposure `{l}`"),
        }
    }

    fn fixed(&self, label: &str) -> f64 {
        match label {
            "m*" | "m1*" => self.m1_star,
            "m2*" => self.m2_star,
            other => panic!("unbound level `{other}`"),
        }
    }

    fn m1(&self, spec: &MediatorSpec, e1: f64) -> f64 {
        match spec {
            MediatorSpec::Fixed(l) => self.fixed(l),
            MediatorSpec::Counterfactual { exposure, .. } => {
                let [g0, g1] = self.params.gamma;
                g0 + g1 * self.exposure(exposure) + self.params.gamma_c[0] * self.c + e1
            }
        }
    }

    fn m2(&self, spec: &MediatorSpec, e1: f64, e2: f64) -> f64 {
        match spec {
            MediatorSpec::Fixed(l) => self.fixed(l),
            MediatorSpec::Counterfactual { exposure, parents } => {
                let [b0, b1, b2, b3] = self.params.beta;
                let x = self.exposure(exposure);
                let parent = self.m1(&parents[0], e1);
                b0 + b1 * x + (b2 + b3 * x) * parent + self.params.beta_c[0] * self.c + e2
            }
        }
    }

    /// The unit-level value of `expr` for one draw of the three noises.
    pub fn outcome(&self, expr: &CfExpr, e1: f64, e2: f64, ey: f64) -> f64 {
        let [t0, t1, t2, t3, t4, t5, t6, t7] = self.params.theta;
        let t = self.exposure(&expr.exposure);
        let m1 = self.m1(&expr.mediators[0], e1);
        let m2 = self.m2(&expr.mediators[1], e1, e2);
        t0 + t1 * t
            + t2 * m1
            + t3 * m2
            + t4 * t * m1
            + t5 * t * m2
            + t6 * m1 * m2
            + t7 * t * m1 * m2
            + self.params.theta_c[0] * self.c
            + ey
    }
}

/// Monte-Carlo mean and standard error of a contrast.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: f64,
    pub se: f64,
}

/// Estimates every component in `specs` from `draws` units. All formulas
/// of one unit share its noises, so each contrast is averaged over
/// unit-level differences.
pub fn monte_carlo(world: &LinearWorld, specs: &[ComponentSpec], draws: usize, seed: u64) -> Vec<McEstimate> {
    let mut exprs: Vec<&CfExpr> = Vec::new();
    let plans: Vec<Vec<(f64, usize)>> = specs
        .iter()
        .map(|s| {
            s.terms
                .iter()
                .map(|t| {
                    let i = exprs.iter().position(|e| **e == t.expr).unwrap_or_else(|| {
                        exprs.push(&t.expr);
                        exprs.len() - 1
                    });
                    (t.sign as f64, i)
                })
                .collect()
        })
        .collect();

    let sd1 = world.params.sigma2_m1.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0.0; exprs.len()];
    let mut mean = vec![0.0; specs.len()];
    let mut m2 = vec![0.0; specs.len()];
    for n in 1..=draws {
        let e1 = sd1 * rng.sample::<f64, _>(StandardNormal);
        let e2: f64 = rng.sample(StandardNormal);
        let ey: f64 = rng.sample(StandardNormal);
        for (v, e) in values.iter_mut().zip(&exprs) {
            *v = world.outcome(e, e1, e2, ey);
        }
        for (k, plan) in plans.iter().enumerate() {
            let x: f64 = plan.iter().map(|&(s, i)| s * values[i]).sum();
            let delta = x - mean[k];
            mean[k] += delta / n as f64;
            m2[k] += delta * (x - mean[k]);
        }
    }
    mean.iter()
        .zip(&m2)
        .map(|(&mean, &m2)| McEstimate {
            mean,
            se: (m2 / (draws - 1) as f64 / draws as f64).sqrt(),
        })
        .collect()
}

pub fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol
}

/// CSV shaped like the alcohol / BMI / GGT / blood-pressure survey extract:
/// columns `alcohol, bmi, ggt, sbp, sex, age`, with GGT log-normal and a
/// few rows missing a value.
pub fn survey_csv(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("id,alcohol,bmi,ggt,sbp,sex,age\n");
    for i in 0..n {
        let z = |rng: &mut ChaCha8Rng| rng.sample::<f64, _>(StandardNormal);
        let alcohol = f64::from(rng.random_bool(0.4));
        let sex = f64::from(rng.random_bool(0.5));
        let age = rng.random_range(20.0..80.0);
        let bmi = 24.0 + 1.2 * alcohol + 0.5 * sex + 0.03 * age + 4.0 * z(&mut rng);
        let log_ggt = 2.5 + 0.3 * alcohol + 0.02 * bmi + 0.01 * alcohol * bmi + 0.1 * sex + 0.005 * age + 0.5 * z(&mut rng);
        let sbp = 100.0 + 2.0 * alcohol + 0.4 * bmi + 1.5 * log_ggt + 0.1 * alcohol * bmi + 0.3 * alcohol * log_ggt
            + 0.02 * bmi * log_ggt + 0.01 * alcohol * bmi * log_ggt + 3.0 * sex + 0.35 * age + 10.0 * z(&mut rng);
        let ggt = log_ggt.exp();
        if i % 97 == 13 {
            out.push_str(&format!("{i},{alcohol},,{ggt:.4},{sbp:.2},{sex},{age:.1}\n"));
        } else {
            out.push_str(&format!("{i},{alcohol},{bmi:.2},{ggt:.4},{sbp:.2},{sex},{age:.1}\n"));
        }
    }
    out
}

pub const SURVEY_ROLES: &str =
    r#"{"exposure": "alcohol", "mediators": ["bmi", "ggt"], "outcome": "sbp", "covariates": ["sex", "age"]}"#;

/// Runs the command line with `args` and returns (exit code, stdout, stderr).
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("natfx").chain(args.iter().copied());
    let code = natfx::cli::main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}
