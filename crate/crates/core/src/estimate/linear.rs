use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::ols::{fit_ols, Design, OlsFit};
use super::EstimateError;
use crate::data::{Column, Dataset, Roles};
use crate::decomp::{names, DecompositionResult, Estimate, Role};

/// Coefficients of the Gaussian-linear sequential model
///
/// ```text
/// Y  = θ0 + θ1 A + θ2 M1 + θ3 M2 + θ4 A M1 + θ5 A M2 + θ6 M1 M2 + θ7 A M1 M2 + θ8'C + εY
/// M2 = β0 + β1 A + β2 M1 + β3 A M1 + β4'C + ε2
/// M1 = γ0 + γ1 A + γ2'C + ε1,   ε1 ~ N(0, σ²_M1)
/// ```
///
/// `theta_c`, `beta_c` and `gamma_c` hold θ8, β4 and γ2 and must have one
/// entry per covariate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub theta: [f64; 8],
    #[serde(default)]
    pub theta_c: Vec<f64>,
    pub beta: [f64; 4],
    #[serde(default)]
    pub beta_c: Vec<f64>,
    pub gamma: [f64; 2],
    #[serde(default)]
    pub gamma_c: Vec<f64>,
    pub sigma2_m1: f64,
    /// Covariate names in coefficient order, when known.
    #[serde(default)]
    pub covariates: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitDiagnostics>,
}

/// What [`fit_linear_system`] saw and produced besides the coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub n_used: usize,
    pub n_dropped: usize,
    pub transforms: Vec<Transform>,
    /// Response labels of the outcome, second and first mediator fits.
    pub responses: [String; 3],
    pub outcome: OlsFit,
    pub m2: OlsFit,
    pub m1: OlsFit,
    pub sigma2_y: f64,
    pub sigma2_m2: f64,
}

impl LinearParams {
    /// Parameters without covariates.
    pub fn new(theta: [f64; 8], beta: [f64; 4], gamma: [f64; 2], sigma2_m1: f64) -> Self {
        LinearParams {
            theta,
            theta_c: Vec::new(),
            beta,
            beta_c: Vec::new(),
            gamma,
            gamma_c: Vec::new(),
            sigma2_m1,
            covariates: Vec::new(),
            fit: None,
        }
    }

    pub fn with_covariates(mut self, theta_c: Vec<f64>, beta_c: Vec<f64>, gamma_c: Vec<f64>) -> Self {
        self.theta_c = theta_c;
        self.beta_c = beta_c;
        self.gamma_c = gamma_c;
        self
    }

    pub fn n_covariates(&self) -> usize {
        self.theta_c.len()
    }

    pub fn validate(&self) -> Result<(), EstimateError> {
        let k = self.theta_c.len();
        if self.beta_c.len() != k || self.gamma_c.len() != k {
            return Err(EstimateError::InvalidParams(format!(
                "covariate vectors have lengths {}, {} and {}",
                k,
                self.beta_c.len(),
                self.gamma_c.len()
            )));
        }
        if !self.covariates.is_empty() && self.covariates.len() != k {
            return Err(EstimateError::InvalidParams(format!(
                "{} covariate names for {k} coefficients",
                self.covariates.len()
            )));
        }
        if !(self.sigma2_m1 >= 0.0) {
            return Err(EstimateError::InvalidParams(format!("sigma2_m1 = {} is negative", self.sigma2_m1)));
        }
        let all = self
            .theta
            .iter()
            .chain(&self.beta)
            .chain(&self.gamma)
            .chain(&self.theta_c)
            .chain(&self.beta_c)
            .chain(&self.gamma_c)
            .chain(std::iter::once(&self.sigma2_m1));
        if all.clone().any(|v| !v.is_finite()) {
            return Err(EstimateError::InvalidParams("non-finite coefficient".into()));
        }
        Ok(())
    }

    fn check_profile(&self, c: &CovariateProfile) -> Result<(), EstimateError> {
        self.validate()?;
        if c.values.len() != self.n_covariates() {
            return Err(EstimateError::Covariates(format!(
                "profile has {} values, the model has {} covariates",
                c.values.len(),
                self.n_covariates()
            )));
        }
        Ok(())
    }
}

/// Covariate values the linear components are conditioned on.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CovariateProfile {
    pub values: Vec<f64>,
}

impl CovariateProfile {
    pub fn new(values: Vec<f64>) -> Self {
        CovariateProfile { values }
    }

    /// Parses `name=value,name=value` and orders the values by `names`.
    /// Every name must be given exactly once.
    pub fn parse(text: &str, names: &[String]) -> Result<Self, EstimateError> {
        let mut values = vec![None; names.len()];
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| EstimateError::Covariates(format!("`{part}` is not name=value")))?;
            let (name, value) = (name.trim(), value.trim());
            let slot = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| EstimateError::Covariates(format!("unknown covariate `{name}`")))?;
            if values[slot].is_some() {
                return Err(EstimateError::Covariates(format!("covariate `{name}` given twice")));
            }
            let v: f64 = value
                .parse()
                .map_err(|_| EstimateError::Covariates(format!("`{value}` is not a number (covariate `{name}`)")))?;
            values[slot] = Some(v);
        }
        let missing: Vec<&str> = names
            .iter()
            .zip(&values)
            .filter(|(_, v)| v.is_none())
            .map(|(n, _)| n.as_str())
            .collect();
        if !missing.is_empty() {
            return Err(EstimateError::Covariates(format!("no value for covariate(s) {}", missing.join(", "))));
        }
        Ok(CovariateProfile { values: values.into_iter().flatten().collect() })
    }
}

/// Exposure contrast and fixed mediator levels on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearQuery {
    pub a: f64,
    pub a_star: f64,
    pub m1_star: f64,
    pub m2_star: f64,
}

impl LinearQuery {
    pub fn new(a: f64, a_star: f64, m1_star: f64, m2_star: f64) -> Self {
        LinearQuery { a, a_star, m1_star, m2_star }
    }
}

/// The eight counterfactual means of the sequential model. `Wk` is
/// `E[Y(t, M1(x1), M2(x2, M1(x1))) | c]` with each of `t`, `x1`, `x2`
/// set to `a` or `a*` as listed by [`W::exposures`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum W {
    W1,
    W2,
    W3,
    W4,
    W5,
    W6,
    W7,
    W8,
}

impl W {
    pub const ALL: [W; 8] = [W::W1, W::W2, W::W3, W::W4, W::W5, W::W6, W::W7, W::W8];

    /// `(t, x1, x2)`, `true` meaning `a` and `false` meaning `a*`.
    pub fn exposures(self) -> (bool, bool, bool) {
        match self {
            W::W1 => (true, true, true),
            W::W2 => (true, true, false),
            W::W3 => (true, false, true),
            W::W4 => (false, true, true),
            W::W5 => (false, false, true),
            W::W6 => (false, true, false),
            W::W7 => (true, false, false),
            W::W8 => (false, false, false),
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(x, y)| x * y).sum()
}

/// `E[Y(t, M1(x1), M2(x2, M1(x1))) | c]` for arbitrary real `t`, `x1`, `x2`.
pub fn expectation_at(params: &LinearParams, c: &CovariateProfile, t: f64, x1: f64, x2: f64) -> f64 {
    let [t0, t1, t2, t3, t4, t5, t6, t7] = params.theta;
    let [b0, b1, b2, b3] = params.beta;
    let [g0, g1] = params.gamma;
    let s2 = params.sigma2_m1;
    let g = g0 + g1 * x1 + dot(&params.gamma_c, &c.values);
    let b = b0 + b1 * x2 + dot(&params.beta_c, &c.values);
    let d = b2 + b3 * x2;
    (t0 + t1 * t + dot(&params.theta_c, &c.values))
        + (t3 + t5 * t) * b
        + (t2 + t4 * t) * g
        + (t6 + t7 * t) * b * g
        + (t3 + t5 * t) * d * g
        + (t6 + t7 * t) * d * (s2 + g * g)
}

/// Closed-form value of one of the eight counterfactual means.
pub fn expectation_w(params: &LinearParams, which: W, c: &CovariateProfile, a: f64, a_star: f64) -> f64 {
    let pick = |is_a: bool| if is_a { a } else { a_star };
    let (t, x1, x2) = which.exposures();
    expectation_at(params, c, pick(t), pick(x1), pick(x2))
}

/// Every component of the sequential decomposition from its factored
/// closed form, in report order: the nine summands with PDE placed after
/// the interactions, then TE from its quartic expansion in `a`.
pub fn linear_components(
    params: &LinearParams,
    q: &LinearQuery,
    c: &CovariateProfile,
) -> Result<DecompositionResult, EstimateError> {
    params.check_profile(c)?;
    let [_, t1, t2, t3, t4, t5, t6, t7] = params.theta;
    let [b0, b1, b2, b3] = params.beta;
    let [g0, g1] = params.gamma;
    let s2 = params.sigma2_m1;
    let (a, s, m1, m2) = (q.a, q.a_star, q.m1_star, q.m2_star);

    let k = g0 + dot(&params.gamma_c, &c.values);
    let l = b0 + dot(&params.beta_c, &c.values);
    let g_s = k + g1 * s;
    let b_s = l + b1 * s;
    let d_s = b2 + b3 * s;
    let d = a - s;
    let sum = a + s;
    let u = t6 + t7 * s;
    let v = t3 + t5 * s;

    let cde = (t1 + t4 * m1 + t5 * m2 + t7 * m1 * m2) * d;
    let int_ref_am1 = (g_s - m1) * (t4 + t7 * m2) * d;
    let int_ref_am2_am1m2 =
        (t5 * (b_s + d_s * g_s - m2) + t7 * (b_s * g_s + d_s * (s2 + g_s * g_s) - m2 * g_s)) * d;
    let natint_am1 =
        (t4 * g1 + t7 * g1 * b_s + t5 * g1 * d_s + 2.0 * t7 * g1 * d_s * k + t7 * g1 * g1 * d_s * sum) * d * d;
    let natint_am2 = (t5 * b1 + t7 * b1 * g_s + t5 * b3 * g_s + t7 * b3 * (s2 + g_s * g_s)) * d * d;
    let natint_am1m2 =
        (t7 * b1 * g1 + t5 * b3 * g1 + 2.0 * t7 * b3 * g1 * k + t7 * b3 * g1 * g1 * sum) * d * d * d;
    let natint_m1m2 = (b1 * g1 * u + b3 * g1 * v + 2.0 * b3 * g1 * u * k + b3 * g1 * g1 * u * sum) * d * d;
    let pde = cde + int_ref_am1 + int_ref_am2_am1m2;
    let pie_m1 =
        (g1 * (t2 + t4 * s) + g1 * u * b_s + g1 * v * d_s + 2.0 * g1 * u * d_s * k + g1 * g1 * u * d_s * sum) * d;
    let pie_m2 = (b1 * v + b1 * u * g_s + b3 * v * g_s + b3 * u * (s2 + g_s * g_s)) * d;

    let c1 = t1
        + t5 * l
        + b1 * t3
        + t4 * k
        + g1 * t2
        + t7 * l * k
        + b1 * t6 * k
        + g1 * t6 * l
        + t5 * b2 * k
        + t3 * b3 * k
        + t3 * b2 * g1
        + t7 * b2 * s2
        + t6 * b3 * s2
        + t7 * b2 * k * k
        + t6 * b3 * k * k
        + 2.0 * g1 * t6 * b2 * k;
    let c2 = b1 * t5
        + g1 * t4
        + b1 * t7 * k
        + g1 * t7 * l
        + g1 * b1 * t6
        + t5 * b3 * k
        + t5 * b2 * g1
        + t3 * b3 * g1
        + t7 * b3 * s2
        + t7 * b3 * k * k
        + 2.0 * g1 * t7 * b2 * k
        + 2.0 * g1 * t6 * b3 * k
        + t6 * b2 * g1 * g1;
    let c3 = g1 * b1 * t7 + t5 * b3 * g1 + 2.0 * g1 * t7 * b3 * k + t7 * b2 * g1 * g1 + t6 * b3 * g1 * g1;
    let c4 = t7 * b3 * g1 * g1;
    let te = c1 * d + c2 * (a.powi(2) - s.powi(2)) + c3 * (a.powi(3) - s.powi(3)) + c4 * (a.powi(4) - s.powi(4));

    let summand = |name: &str, value: f64| Estimate { name: name.to_string(), role: Role::Summand, value, ci: None };
    let components = vec![
        summand(names::CDE, cde),
        summand(names::INT_REF_AM1, int_ref_am1),
        summand(names::INT_REF_AM2_AM1M2, int_ref_am2_am1m2),
        summand(names::NATINT_AM1, natint_am1),
        summand(names::NATINT_AM2, natint_am2),
        summand(names::NATINT_AM1M2, natint_am1m2),
        summand(names::NATINT_M1M2, natint_m1m2),
        Estimate { name: names::PDE.to_string(), role: Role::Auxiliary, value: pde, ci: None },
        summand(names::PIE_M1, pie_m1),
        summand(names::PIE_M2, pie_m2),
    ];
    Ok(DecompositionResult::new(components, te))
}

/// Transformation applied to a column before fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Log,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transform {
    pub column: String,
    pub kind: TransformKind,
}

impl Transform {
    pub fn log(column: impl Into<String>) -> Self {
        Transform { column: column.into(), kind: TransformKind::Log }
    }

    fn label(&self, column: &str) -> String {
        match self.kind {
            TransformKind::Log => format!("log({column})"),
        }
    }
}

/// Applies `transforms` in order. A log of a non-positive value fails and
/// lists the offending rows (1-based, counted within `data`).
pub fn apply_transforms(data: &Dataset, transforms: &[Transform]) -> Result<Dataset, EstimateError> {
    let mut out = data.clone();
    for t in transforms {
        let values = out.numeric(&t.column)?.to_vec();
        let bad: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !(**v > 0.0))
            .map(|(i, _)| i + 1)
            .collect();
        if !bad.is_empty() {
            return Err(EstimateError::NonPositiveLog { column: t.column.clone(), rows: bad });
        }
        out.set_numeric(&t.column, values.iter().map(|v| v.ln()).collect())?;
    }
    Ok(out)
}

/// Fits the three regressions of the sequential linear model.
///
/// The data roles must bind the exposure, two mediators (in causal order),
/// the outcome and any covariates; all must be numeric. `transforms` are
/// applied first. The outcome is regressed on `A, M1, M2, A·M1, A·M2,
/// M1·M2, A·M1·M2, C`, the second mediator on `A, M1, A·M1, C` and the
/// first mediator on `A, C`, each with an intercept.
pub fn fit_linear_system(data: &Dataset, transforms: &[Transform]) -> Result<LinearParams, EstimateError> {
    let data = apply_transforms(data, transforms)?;
    let roles = data.roles();
    if roles.mediators.len() != 2 {
        return Err(EstimateError::InvalidParams(format!(
            "the linear model needs two mediators, roles bind {}",
            roles.mediators.len()
        )));
    }
    let label = |col: &str| {
        transforms
            .iter()
            .filter(|t| t.column == col)
            .fold(col.to_string(), |acc, t| t.label(&acc))
    };
    let (na, n1, n2) = (label(&roles.exposure), label(&roles.mediators[0]), label(&roles.mediators[1]));
    let a = data.numeric(&roles.exposure)?;
    let m1 = data.numeric(&roles.mediators[0])?;
    let m2 = data.numeric(&roles.mediators[1])?;
    let y = data.numeric(&roles.outcome)?;
    let covs = roles
        .covariates
        .iter()
        .map(|c| Ok((label(c), data.numeric(c)?.to_vec())))
        .collect::<Result<Vec<_>, EstimateError>>()?;

    let n = data.n_rows();
    let prod = |cols: &[&[f64]]| -> Vec<f64> { (0..n).map(|i| cols.iter().map(|c| c[i]).product()).collect() };
    let design = |mut cols: Vec<(String, Vec<f64>)>| {
        cols.insert(0, ("(Intercept)".to_string(), vec![1.0; n]));
        cols.extend(covs.iter().cloned());
        Design::new(cols)
    };

    let outcome = fit_ols(
        &design(vec![
            (na.clone(), a.to_vec()),
            (n1.clone(), m1.to_vec()),
            (n2.clone(), m2.to_vec()),
            (format!("{na}:{n1}"), prod(&[a, m1])),
            (format!("{na}:{n2}"), prod(&[a, m2])),
            (format!("{n1}:{n2}"), prod(&[m1, m2])),
            (format!("{na}:{n1}:{n2}"), prod(&[a, m1, m2])),
        ])?,
        y,
    )?;
    let m2_fit = fit_ols(
        &design(vec![
            (na.clone(), a.to_vec()),
            (n1.clone(), m1.to_vec()),
            (format!("{na}:{n1}"), prod(&[a, m1])),
        ])?,
        m2,
    )?;
    let m1_fit = fit_ols(&design(vec![(na.clone(), a.to_vec())])?, m1)?;

    let (ey, e2, e1) = (outcome.estimates(), m2_fit.estimates(), m1_fit.estimates());
    let mut params = LinearParams::new(
        ey[..8].try_into().expect("eight outcome coefficients"),
        e2[..4].try_into().expect("four mediator coefficients"),
        e1[..2].try_into().expect("two mediator coefficients"),
        m1_fit.sigma2,
    )
    .with_covariates(ey[8..].to_vec(), e2[4..].to_vec(), e1[2..].to_vec());
    params.covariates = roles.covariates.clone();
    params.fit = Some(FitDiagnostics {
        n_used: n,
        n_dropped: data.dropped(),
        transforms: transforms.to_vec(),
        responses: [label(&roles.outcome), n2, n1],
        sigma2_y: outcome.sigma2,
        sigma2_m2: m2_fit.sigma2,
        outcome,
        m2: m2_fit,
        m1: m1_fit,
    });
    Ok(params)
}

/// Settings for [`simulate_linear`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSimulation {
    pub n: usize,
    pub seed: u64,
    /// `Pr(A = 1)`; the exposure is binary.
    pub exposure_p: f64,
    /// Mean and standard deviation of each independent Gaussian covariate.
    pub covariates: Vec<(String, f64, f64)>,
    pub sd_y: f64,
    pub sd_m2: f64,
}

impl LinearSimulation {
    pub fn new(n: usize, seed: u64) -> Self {
        LinearSimulation { n, seed, exposure_p: 0.5, covariates: Vec::new(), sd_y: 1.0, sd_m2: 1.0 }
    }
}

/// Draws rows `A, M1, M2, Y` plus covariates from the linear model. The
/// first mediator's noise has variance `params.sigma2_m1`.
pub fn simulate_linear(params: &LinearParams, spec: &LinearSimulation) -> Result<Dataset, EstimateError> {
    params.validate()?;
    if spec.covariates.len() != params.n_covariates() {
        return Err(EstimateError::Covariates(format!(
            "{} simulated covariates for {} coefficients",
            spec.covariates.len(),
            params.n_covariates()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let [t0, t1, t2, t3, t4, t5, t6, t7] = params.theta;
    let [b0, b1, b2, b3] = params.beta;
    let [g0, g1] = params.gamma;
    let sd1 = params.sigma2_m1.sqrt();
    let mut cols = vec![Vec::with_capacity(spec.n); 4 + spec.covariates.len()];
    for _ in 0..spec.n {
        let a = if rng.random::<f64>() < spec.exposure_p { 1.0 } else { 0.0 };
        let c: Vec<f64> = spec
            .covariates
            .iter()
            .map(|(_, mean, sd)| mean + sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let e: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let m1 = g0 + g1 * a + dot(&params.gamma_c, &c) + sd1 * e[0];
        let m2 = b0 + b1 * a + b2 * m1 + b3 * a * m1 + dot(&params.beta_c, &c) + spec.sd_m2 * e[1];
        let y = t0
            + t1 * a
            + t2 * m1
            + t3 * m2
            + t4 * a * m1
            + t5 * a * m2
            + t6 * m1 * m2
            + t7 * a * m1 * m2
            + dot(&params.theta_c, &c)
            + spec.sd_y * e[2];
        for (col, v) in cols.iter_mut().zip([a, m1, m2, y].into_iter().chain(c)) {
            col.push(v);
        }
    }
    let mut names = vec!["A".to_string(), "M1".into(), "M2".into(), "Y".into()];
    names.extend(spec.covariates.iter().map(|c| c.0.clone()));
    let cov_names: Vec<&str> = spec.covariates.iter().map(|c| c.0.as_str()).collect();
    let roles = Roles::new("A", &["M1", "M2"], "Y").with_covariates(&cov_names);
    Ok(Dataset::new(roles, names.into_iter().zip(cols.into_iter().map(Column::Numeric)).collect())?)
}
