//! Discrete structural causal models with one or two categorical mediators.
//!
//! A [`DiscreteScm`] holds the three tables of the factorization
//! `A → M1 → M2 → Y`: `Pr(M1 | A)`, `Pr(M2 | A, M1)` and the cell means
//! `E[Y | A, M1, M2]`. Non-sequential models store `Pr(M2 | A)` broadcast
//! over `M1`, and single-mediator models carry a one-level placeholder for
//! `M2`, so a single enumeration routine serves every scenario.

mod fit;
mod simulate;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use crate::cfexpr::{check_identifiability, CfExpr, ExposureLevel, IdentifiabilityVerdict, MediatorSpec, Scenario};
use crate::data::DataError;

pub use fit::from_dataset;
pub use simulate::{simulate, SimulationSpec};

const PROB_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum ScmError {
    #[error("formula is not identifiable: {}", describe_conflicts(.0))]
    NotIdentifiable(IdentifiabilityVerdict),
    #[error("exposure symbol `{0}` is not bound to a model level")]
    UnboundLevel(String),
    #[error("exposure level `{0}` is not declared by the model")]
    UnknownExposureLevel(String),
    #[error("value `{value}` is not in the support of M{mediator}")]
    UnknownSupportValue { mediator: usize, value: String },
    #[error("formula shape does not match the {scenario} model: {detail}")]
    ScenarioMismatch { scenario: Scenario, detail: String },
    #[error("discrete models support at most 2 mediators, scenario is {0}")]
    UnsupportedScenario(Scenario),
    #[error("table `{table}` has the wrong shape: {detail}")]
    Shape { table: &'static str, detail: String },
    #[error("row {row} of `{table}` is not a distribution: {detail}")]
    InvalidDistribution {
        table: &'static str,
        row: String,
        detail: String,
    },
    #[error("no observations for cell(s): {}", .0.join("; "))]
    EmptyCell(Vec<String>),
    #[error("model is not non-sequential: Pr(M2 | A, M1) varies with M1")]
    NotNonSequential,
    #[error("simulation needs at least one row")]
    NoRows,
    #[error(transparent)]
    Data(#[from] DataError),
}

fn describe_conflicts(v: &IdentifiabilityVerdict) -> String {
    v.conflicts
        .iter()
        .map(|c| format!("M{} appears as {}", c.mediator, c.specs.join(" and ")))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Level labels of the exposure and each mediator, in table order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Levels {
    #[serde(deserialize_with = "labels")]
    pub a: Vec<String>,
    #[serde(deserialize_with = "labels")]
    pub m1: Vec<String>,
    #[serde(default, deserialize_with = "labels", skip_serializing_if = "Vec::is_empty")]
    pub m2: Vec<String>,
}

impl Levels {
    pub fn new(a: &[&str], m1: &[&str], m2: &[&str]) -> Self {
        let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
        Levels {
            a: own(a),
            m1: own(m1),
            m2: own(m2),
        }
    }

    /// `{0, 1}` for the exposure and every mediator.
    pub fn binary(mediators: usize) -> Self {
        let b = &["0", "1"][..];
        Levels::new(b, b, if mediators == 2 { b } else { &[] })
    }
}

/// Labels may be written as JSON strings or numbers.
fn labels<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Label {
        Text(String),
        Int(i64),
        Real(f64),
    }
    Ok(Vec::<Label>::deserialize(d)?
        .into_iter()
        .map(|l| match l {
            Label::Text(s) => s,
            Label::Int(i) => i.to_string(),
            Label::Real(x) => x.to_string(),
        })
        .collect())
}

/// A 2- or 3-dimensional table as stored in a model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Table {
    Two(Vec<Vec<f64>>),
    Three(Vec<Vec<Vec<f64>>>),
}

/// On-disk form of a [`DiscreteScm`].
///
/// `pm1[a][m1]`; `pm2[a][m1][m2]` for chains or `pm2[a][m2]` for
/// non-sequential models (absent for single-mediator models);
/// `ymean[a][m1][m2]`, or `ymean[a][m]` with one mediator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub scenario: Scenario,
    pub levels: Levels,
    pub pm1: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pm2: Option<Table>,
    pub ymean: Table,
}

/// Exposure and fixed-level bindings used when evaluating a formula.
///
/// Named exposure symbols and fixed labels that are not bound explicitly
/// are looked up as literal level labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings {
    pub a: Option<String>,
    pub a_star: Option<String>,
    pub named: BTreeMap<String, String>,
    pub fixed: BTreeMap<String, String>,
}

impl Bindings {
    pub fn new(a: impl Into<String>, a_star: impl Into<String>) -> Self {
        Bindings {
            a: Some(a.into()),
            a_star: Some(a_star.into()),
            ..Default::default()
        }
    }

    pub fn fix(mut self, label: impl Into<String>, value: impl Into<String>) -> Self {
        self.fixed.insert(label.into(), value.into());
        self
    }

    pub fn name(mut self, symbol: impl Into<String>, level: impl Into<String>) -> Self {
        self.named.insert(symbol.into(), level.into());
        self
    }

    /// Same bindings with the roles of `a` and `a*` exchanged.
    pub fn swapped(&self) -> Self {
        Bindings {
            a: self.a_star.clone(),
            a_star: self.a.clone(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteScm {
    scenario: Scenario,
    levels: Levels,
    pm1: Vec<Vec<f64>>,
    pm2: Vec<Vec<Vec<f64>>>,
    ymean: Vec<Vec<Vec<f64>>>,
}

impl DiscreteScm {
    /// Validates and assembles a model. Tables are indexed in the order of
    /// `levels`; every conditional row must be non-negative and sum to 1
    /// within 1e-12, after which it is renormalized.
    pub fn new(
        scenario: Scenario,
        levels: Levels,
        pm1: Vec<Vec<f64>>,
        pm2: Option<Table>,
        ymean: Table,
    ) -> Result<Self, ScmError> {
        let (na, n1) = (levels.a.len(), levels.m1.len());
        if na == 0 || n1 == 0 {
            return Err(shape("levels", "exposure and M1 need at least one level"));
        }
        let (pm2, ymean, n2) = match scenario {
            Scenario::SingleMediator => {
                if pm2.is_some() {
                    return Err(shape("pm2", "single-mediator models take no pm2"));
                }
                let Table::Two(y) = ymean else {
                    return Err(shape("ymean", "expected ymean[a][m]"));
                };
                check_dims("ymean", &y, na, n1)?;
                let y = y
                    .into_iter()
                    .map(|row| row.into_iter().map(|v| vec![v]).collect())
                    .collect();
                (vec![vec![vec![1.0]; n1]; na], y, 1)
            }
            Scenario::NonSeq(2) | Scenario::OnePathChain(2) => {
                let n2 = levels.m2.len();
                if n2 == 0 {
                    return Err(shape("levels", "two-mediator models need M2 levels"));
                }
                let pm2 = match (scenario, pm2) {
                    (Scenario::NonSeq(_), Some(Table::Two(t))) => {
                        check_dims("pm2", &t, na, n2)?;
                        t.into_iter().map(|row| vec![row; n1]).collect()
                    }
                    (Scenario::OnePathChain(_), Some(Table::Three(t))) => {
                        check_dims3("pm2", &t, na, n1, n2)?;
                        t
                    }
                    (Scenario::NonSeq(_), _) => return Err(shape("pm2", "expected pm2[a][m2]")),
                    _ => return Err(shape("pm2", "expected pm2[a][m1][m2]")),
                };
                let Table::Three(y) = ymean else {
                    return Err(shape("ymean", "expected ymean[a][m1][m2]"));
                };
                check_dims3("ymean", &y, na, n1, n2)?;
                (pm2, y, n2)
            }
            other => return Err(ScmError::UnsupportedScenario(other)),
        };
        check_dims("pm1", &pm1, na, n1)?;
        let mut model = DiscreteScm {
            scenario,
            levels,
            pm1,
            pm2,
            ymean,
        };
        for a in 0..na {
            let label = model.levels.a[a].clone();
            normalize("pm1", &format!("A={label}"), &mut model.pm1[a])?;
            for m1 in 0..n1 {
                let row = format!("A={label}, M1={}", model.levels.m1[m1]);
                normalize("pm2", &row, &mut model.pm2[a][m1])?;
                for m2 in 0..n2 {
                    if !model.ymean[a][m1][m2].is_finite() {
                        return Err(shape("ymean", format!("non-finite mean in cell {row}")));
                    }
                }
            }
        }
        Ok(model)
    }

    pub fn from_model_file(file: ModelFile) -> Result<Self, ScmError> {
        DiscreteScm::new(file.scenario, file.levels, file.pm1, file.pm2, file.ymean)
    }

    pub fn to_model_file(&self) -> ModelFile {
        let pm2 = match self.scenario {
            Scenario::SingleMediator => None,
            Scenario::NonSeq(_) => Some(Table::Two(self.pm2.iter().map(|r| r[0].clone()).collect())),
            Scenario::OnePathChain(_) => Some(Table::Three(self.pm2.clone())),
        };
        let ymean = match self.scenario {
            Scenario::SingleMediator => Table::Two(
                self.ymean
                    .iter()
                    .map(|r| r.iter().map(|c| c[0]).collect())
                    .collect(),
            ),
            _ => Table::Three(self.ymean.clone()),
        };
        ModelFile {
            scenario: self.scenario,
            levels: self.levels.clone(),
            pm1: self.pm1.clone(),
            pm2,
            ymean,
        }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn levels(&self) -> &Levels {
        &self.levels
    }

    pub fn n_m2(&self) -> usize {
        self.pm2[0][0].len()
    }

    /// `Pr(M1 = m1 | A = a)` by level index.
    pub fn p_m1(&self, a: usize, m1: usize) -> f64 {
        self.pm1[a][m1]
    }

    /// `Pr(M2 = m2 | A = a, M1 = m1)` by level index.
    pub fn p_m2(&self, a: usize, m1: usize, m2: usize) -> f64 {
        self.pm2[a][m1][m2]
    }

    /// `E[Y | A = a, M1 = m1, M2 = m2]` by level index.
    pub fn y_mean(&self, a: usize, m1: usize, m2: usize) -> f64 {
        self.ymean[a][m1][m2]
    }

    pub fn exposure_index(&self, label: &str) -> Option<usize> {
        self.levels.a.iter().position(|l| l == label)
    }

    /// Index of `value` in the support of mediator `mediator` (1-based).
    pub fn support_index(&self, mediator: usize, value: &str) -> Option<usize> {
        let support = if mediator == 1 { &self.levels.m1 } else { &self.levels.m2 };
        support.iter().position(|l| l == value)
    }

    /// Applies `f` to every cell mean.
    pub fn map_outcome(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        for v in out.ymean.iter_mut().flatten().flatten() {
            *v = f(*v);
        }
        out
    }

    /// Reinterprets a two-mediator model as non-sequential. Fails unless
    /// `Pr(M2 | A, M1)` is constant in `M1` to within 1e-12.
    pub fn as_nonseq(&self) -> Result<Self, ScmError> {
        if self.scenario.mediators() != 2 {
            return Err(ScmError::UnsupportedScenario(self.scenario));
        }
        let constant = self.pm2.iter().all(|rows| {
            rows.iter()
                .all(|r| r.iter().zip(&rows[0]).all(|(x, y)| (x - y).abs() <= PROB_TOL))
        });
        if !constant {
            return Err(ScmError::NotNonSequential);
        }
        Ok(DiscreteScm {
            scenario: Scenario::NonSeq(2),
            ..self.clone()
        })
    }

    /// Reinterprets a two-mediator model as a chain. Always possible.
    pub fn as_chain(&self) -> Result<Self, ScmError> {
        if self.scenario.mediators() != 2 {
            return Err(ScmError::UnsupportedScenario(self.scenario));
        }
        Ok(DiscreteScm {
            scenario: Scenario::OnePathChain(2),
            ..self.clone()
        })
    }

    /// Population mean of the counterfactual `expr`, by enumeration over
    /// the mediator supports.
    pub fn eval_expectation(&self, expr: &CfExpr, bindings: &Bindings) -> Result<f64, ScmError> {
        self.check_shape(expr)?;
        let verdict = check_identifiability(expr, self.scenario);
        if !verdict.is_identifiable() {
            return Err(ScmError::NotIdentifiable(verdict));
        }
        let ey = self.resolve_exposure(&expr.exposure, bindings)?;
        let w1 = self.m1_weights(&expr.mediators[0], bindings)?;
        let n1 = self.levels.m1.len();
        let n2 = self.n_m2();
        let w2: Vec<Vec<f64>> = match expr.mediators.get(1) {
            None => vec![vec![1.0]; n1],
            Some(MediatorSpec::Fixed(label)) => {
                let k = self.resolve_fixed(2, label, bindings)?;
                let row: Vec<f64> = (0..n2).map(|m2| if m2 == k { 1.0 } else { 0.0 }).collect();
                vec![row; n1]
            }
            // The nested M1 (if any) coincides with slot 1 once the formula is
            // identifiable, so the summation index m1 stands in for it.
            Some(MediatorSpec::Counterfactual { exposure, .. }) => {
                let x2 = self.resolve_exposure(exposure, bindings)?;
                self.pm2[x2].clone()
            }
        };
        let mut total = 0.0;
        for m1 in 0..n1 {
            if w1[m1] == 0.0 {
                continue;
            }
            for m2 in 0..n2 {
                total += self.ymean[ey][m1][m2] * w1[m1] * w2[m1][m2];
            }
        }
        Ok(total)
    }

    fn m1_weights(&self, spec: &MediatorSpec, b: &Bindings) -> Result<Vec<f64>, ScmError> {
        match spec {
            MediatorSpec::Fixed(label) => {
                let k = self.resolve_fixed(1, label, b)?;
                Ok((0..self.levels.m1.len()).map(|m| if m == k { 1.0 } else { 0.0 }).collect())
            }
            MediatorSpec::Counterfactual { exposure, .. } => {
                Ok(self.pm1[self.resolve_exposure(exposure, b)?].clone())
            }
        }
    }

    fn resolve_exposure(&self, level: &ExposureLevel, b: &Bindings) -> Result<usize, ScmError> {
        let label = match level {
            ExposureLevel::Treatment => b.a.as_deref(),
            ExposureLevel::Reference => b.a_star.as_deref(),
            ExposureLevel::Named(name) => b.named.get(name).map(String::as_str).or_else(|| {
                self.exposure_index(name).map(|_| name.as_str())
            }),
        };
        let label = label.ok_or_else(|| ScmError::UnboundLevel(level.to_string()))?;
        self.exposure_index(label)
            .ok_or_else(|| ScmError::UnknownExposureLevel(label.to_string()))
    }

    fn resolve_fixed(&self, mediator: usize, label: &str, b: &Bindings) -> Result<usize, ScmError> {
        let value = b.fixed.get(label).map(String::as_str).unwrap_or(label);
        self.support_index(mediator, value)
            .ok_or_else(|| ScmError::UnknownSupportValue {
                mediator,
                value: value.to_string(),
            })
    }

    fn check_shape(&self, expr: &CfExpr) -> Result<(), ScmError> {
        let mismatch = |detail: String| ScmError::ScenarioMismatch {
            scenario: self.scenario,
            detail,
        };
        let k = self.scenario.mediators();
        if expr.mediators.len() != k {
            return Err(mismatch(format!(
                "{} mediator slot(s), model has {k}",
                expr.mediators.len()
            )));
        }
        fn arity_ok(spec: &MediatorSpec, index: usize, scenario: Scenario) -> bool {
            match spec {
                MediatorSpec::Fixed(_) => true,
                MediatorSpec::Counterfactual { parents, .. } => {
                    parents.len() == scenario.parent_arity(index)
                        && parents.iter().all(|p| arity_ok(p, index - 1, scenario))
                }
            }
        }
        for (i, spec) in expr.mediators.iter().enumerate() {
            if !arity_ok(spec, i + 1, self.scenario) {
                return Err(mismatch(format!("`{}` has the wrong nesting", spec.display(i + 1))));
            }
        }
        Ok(())
    }
}

impl fmt::Display for DiscreteScm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} model over A={:?}, M1={:?}",
            self.scenario, self.levels.a, self.levels.m1
        )?;
        if self.scenario.mediators() == 2 {
            write!(f, ", M2={:?}", self.levels.m2)?;
        }
        Ok(())
    }
}

fn shape(table: &'static str, detail: impl Into<String>) -> ScmError {
    ScmError::Shape {
        table,
        detail: detail.into(),
    }
}

fn check_dims(table: &'static str, t: &[Vec<f64>], rows: usize, cols: usize) -> Result<(), ScmError> {
    if t.len() != rows || t.iter().any(|r| r.len() != cols) {
        return Err(shape(table, format!("expected {rows}x{cols}")));
    }
    Ok(())
}

fn check_dims3(
    table: &'static str,
    t: &[Vec<Vec<f64>>],
    d0: usize,
    d1: usize,
    d2: usize,
) -> Result<(), ScmError> {
    if t.len() != d0 || t.iter().any(|m| check_dims(table, m, d1, d2).is_err()) {
        return Err(shape(table, format!("expected {d0}x{d1}x{d2}")));
    }
    Ok(())
}

fn normalize(table: &'static str, row: &str, probs: &mut [f64]) -> Result<(), ScmError> {
    let invalid = |detail: String| ScmError::InvalidDistribution {
        table,
        row: row.to_string(),
        detail,
    };
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(invalid(format!("entry {p} is not a probability")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(invalid(format!("sums to {sum}")));
    }
    for p in probs.iter_mut() {
        *p /= sum;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfexpr::parse_cf;

    const SEQ2: Scenario = Scenario::OnePathChain(2);

    fn dm1() -> DiscreteScm {
        let pm1 = vec![vec![0.8, 0.2], vec![0.4, 0.6]];
        let pm2 = vec![
            vec![vec![0.9, 0.1], vec![0.6, 0.4]],
            vec![vec![0.7, 0.3], vec![0.4, 0.6]],
        ];
        let mut y = vec![vec![vec![0.0; 2]; 2]; 2];
        for a in 0..2 {
            for m1 in 0..2 {
                for m2 in 0..2 {
                    let (a, m1, m2) = (a as f64, m1 as f64, m2 as f64);
                    y[a as usize][m1 as usize][m2 as usize] = 1.0 + a + 2.0 * m1 + 3.0 * m2 + a * m1 * m2;
                }
            }
        }
        DiscreteScm::new(SEQ2, Levels::binary(2), pm1, Some(Table::Three(pm2)), Table::Three(y)).unwrap()
    }

    fn eval(text: &str, b: &Bindings) -> Result<f64, ScmError> {
        dm1().eval_expectation(&parse_cf(text, SEQ2).unwrap(), b)
    }

    #[test]
    fn dm1_all_treatment_and_all_reference() {
        let b = Bindings::new("1", "0");
        assert!((eval("Y(a, M1(a), M2(a, M1(a)))", &b).unwrap() - 5.0).abs() < 1e-12);
        assert!((eval("Y(a*, M1(a*), M2(a*, M1(a*)))", &b).unwrap() - 1.88).abs() < 1e-12);
    }

    #[test]
    fn fixed_levels_read_the_table() {
        let b = Bindings::new("1", "0").fix("m1*", "0").fix("m2*", "0");
        assert_eq!(eval("Y(a*, m1*, m2*)", &b).unwrap(), 1.0);
        assert_eq!(eval("Y(a, 1, 1)", &b).unwrap(), 8.0);
    }

    #[test]
    fn refuses_problematic_formulas() {
        let err = eval("Y(a, M1(a), M2(a, M1(a*)))", &Bindings::new("1", "0")).unwrap_err();
        assert!(matches!(err, ScmError::NotIdentifiable(_)));
        assert_eq!(
            err.to_string(),
            "formula is not identifiable: M1 appears as M1(a) and M1(a*)"
        );
    }

    #[test]
    fn binding_errors() {
        let err = eval("Y(a**, M1(a), M2(a, M1(a)))", &Bindings::new("1", "0")).unwrap_err();
        assert!(matches!(err, ScmError::UnboundLevel(s) if s == "a**"));
        let b = Bindings::new("1", "0").name("a**", "1");
        assert!(eval("Y(a**, M1(a), M2(a, M1(a)))", &b).is_ok());
        let err = eval("Y(a, m1*, m2*)", &Bindings::new("1", "0")).unwrap_err();
        assert!(matches!(err, ScmError::UnknownSupportValue { mediator: 1, .. }));
        let err = eval("Y(a, M1(a), M2(a, M1(a)))", &Bindings::new("2", "0")).unwrap_err();
        assert!(matches!(err, ScmError::UnknownExposureLevel(_)));
    }

    #[test]
    fn nonseq_formula_on_chain_model_is_rejected() {
        let e = parse_cf("Y(a, M1(a), M2(a))", Scenario::NonSeq(2)).unwrap();
        let err = dm1().eval_expectation(&e, &Bindings::new("1", "0")).unwrap_err();
        assert!(matches!(err, ScmError::ScenarioMismatch { .. }));
    }

    #[test]
    fn rows_must_sum_to_one() {
        let err = DiscreteScm::new(
            Scenario::SingleMediator,
            Levels::binary(1),
            vec![vec![0.5, 0.6], vec![0.5, 0.5]],
            None,
            Table::Two(vec![vec![0.0; 2]; 2]),
        )
        .unwrap_err();
        assert!(matches!(err, ScmError::InvalidDistribution { table: "pm1", .. }));
        let ok = DiscreteScm::new(
            Scenario::SingleMediator,
            Levels::binary(1),
            vec![vec![0.3, 0.7 + 5e-13], vec![0.5, 0.5]],
            None,
            Table::Two(vec![vec![0.0; 2]; 2]),
        )
        .unwrap();
        assert_eq!(ok.p_m1(0, 0) + ok.p_m1(0, 1), 1.0);
    }

    #[test]
    fn model_file_round_trip() {
        let file = dm1().to_model_file();
        let text = serde_json::to_string(&file).unwrap();
        let back: ModelFile = serde_json::from_str(&text).unwrap();
        assert_eq!(DiscreteScm::from_model_file(back).unwrap(), dm1());
    }

    #[test]
    fn numeric_labels_in_model_files() {
        let text = r#"{"scenario":"single","levels":{"a":[0,1],"m1":["lo","hi"]},
            "pm1":[[0.7,0.3],[0.3,0.7]],"ymean":[[1,2],[2,5]]}"#;
        let m = DiscreteScm::from_model_file(serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(m.levels().a, vec!["0", "1"]);
        assert_eq!(m.y_mean(1, 1, 0), 5.0);
    }
}
