//! Decompositions of the total effect as signed sums of counterfactuals.
//!
//! Every component is a [`ComponentSpec`]: a name and a list of
//! `(sign, formula)` terms. Reference interactions, which the algebra
//! writes as sums over fixed mediator levels weighted by natural mediator
//! indicators, are stored in their collapsed form; for example
//! `Σ_m1 Y(a, m1, m2*) I(M1(a*) = m1)` becomes `Y(a, M1(a*), m2*)`.
//!
//! The catalogs are pure constructors. [`evaluate`] runs a catalog against
//! a [`DiscreteScm`] and checks that the summands add up to the total effect.

mod catalog;

use serde::Serialize;

use crate::cfexpr::{check_identifiability, CfExpr, Conflict, Scenario, Status};
use crate::scm::{Bindings, DiscreteScm, ScmError};

pub use catalog::{
    components_nonseq2, components_seq2, components_single, mediated_contrasts, reference_interaction_split,
    total_effect,
};

/// Component labels, shared by every estimator so reports line up.
pub mod names {
    pub const CDE: &str = "CDE";
    pub const INT_REF: &str = "INT_ref";
    pub const INT_MED: &str = "INT_med";
    pub const NATINT_AM: &str = "NatINT_AM";
    pub const PIE: &str = "PIE";
    pub const PDE: &str = "PDE";
    pub const TDE: &str = "TDE";
    pub const TIE: &str = "TIE";
    pub const TE: &str = "TE";
    pub const INT_REF_AM1: &str = "INT_ref-AM1";
    pub const INT_REF_AM2: &str = "INT_ref-AM2";
    pub const INT_REF_AM1M2: &str = "INT_ref-AM1M2";
    pub const INT_REF_AM2_AM1M2: &str = "INT_ref-AM2+AM1M2";
    pub const NATINT_AM1: &str = "NatINT_AM1";
    pub const NATINT_AM2: &str = "NatINT_AM2";
    pub const NATINT_AM1M2: &str = "NatINT_AM1M2";
    pub const NATINT_M1M2: &str = "NatINT_M1M2";
    pub const PIE_M1: &str = "PIE_M1";
    pub const PIE_M2: &str = "PIE_M2";
    pub const SIE_M1: &str = "SIE_M1";
    pub const INT_MED_AM1: &str = "INT_med-AM1";
    pub const INT_MED_AM2: &str = "INT_med-AM2";
    pub const INT_MED_AM1M2: &str = "INT_med-AM1M2";
}

#[derive(Debug, thiserror::Error)]
pub enum DecompError {
    #[error("query is missing the fixed level {0}")]
    MissingFixedLevel(&'static str),
    #[error("{name} is not identifiable and cannot be evaluated ({})", describe(.conflicts))]
    EvaluationOfProblematicSpec { name: String, conflicts: Vec<Conflict> },
    #[error("no decomposition catalog for scenario {0}")]
    UnsupportedScenario(Scenario),
    #[error("cell ({a}, {m}) of the 2x2 table is missing")]
    MissingCell { a: usize, m: usize },
    #[error(transparent)]
    Scm(#[from] ScmError),
}

fn describe(conflicts: &[Conflict]) -> String {
    conflicts
        .iter()
        .map(|c| format!("M{}: {}", c.mediator, c.specs.join(" vs ")))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Exposure contrast and fixed mediator levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Query {
    pub a: String,
    pub a_star: String,
    pub m1_star: Option<String>,
    pub m2_star: Option<String>,
}

impl Query {
    pub fn new(a: impl Into<String>, a_star: impl Into<String>) -> Self {
        Query {
            a: a.into(),
            a_star: a_star.into(),
            m1_star: None,
            m2_star: None,
        }
    }

    pub fn m1_star(mut self, level: impl Into<String>) -> Self {
        self.m1_star = Some(level.into());
        self
    }

    pub fn m2_star(mut self, level: impl Into<String>) -> Self {
        self.m2_star = Some(level.into());
        self
    }

    /// `a`, `a*` and the labels `m*`, `m1*`, `m2*` bound for evaluation.
    pub fn bindings(&self) -> Bindings {
        let mut b = Bindings::new(&self.a, &self.a_star);
        if let Some(m) = &self.m1_star {
            b = b.fix("m*", m).fix("m1*", m);
        }
        if let Some(m) = &self.m2_star {
            b = b.fix("m2*", m);
        }
        b
    }

    pub(crate) fn require_m1(&self) -> Result<(), DecompError> {
        self.m1_star.as_ref().map(|_| ()).ok_or(DecompError::MissingFixedLevel("m1*"))
    }

    pub(crate) fn require_m2(&self) -> Result<(), DecompError> {
        self.m2_star.as_ref().map(|_| ()).ok_or(DecompError::MissingFixedLevel("m2*"))
    }
}

/// How a component relates to the total effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Role {
    /// One of the terms that sum to TE.
    Summand,
    /// Reported alongside, not part of the sum.
    Auxiliary,
    /// The total effect itself.
    Total,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    pub sign: i8,
    pub expr: CfExpr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentSpec {
    pub name: String,
    pub role: Role,
    pub scenario: Scenario,
    pub terms: Vec<Term>,
    /// `Problematic` when any term fails the identifiability check.
    pub status: Status,
}

impl ComponentSpec {
    pub(crate) fn new(name: &str, role: Role, scenario: Scenario, terms: Vec<Term>) -> Self {
        let status = if terms
            .iter()
            .all(|t| check_identifiability(&t.expr, scenario).is_identifiable())
        {
            Status::Identifiable
        } else {
            Status::Problematic
        };
        ComponentSpec {
            name: name.to_string(),
            role,
            scenario,
            terms,
            status,
        }
    }

    pub fn is_identifiable(&self) -> bool {
        self.status == Status::Identifiable
    }

    /// Terms that fail the identifiability check, with their conflicts.
    pub fn problematic_terms(&self) -> Vec<(&CfExpr, Vec<Conflict>)> {
        self.terms
            .iter()
            .filter_map(|t| {
                let v = check_identifiability(&t.expr, self.scenario);
                (!v.is_identifiable()).then_some((&t.expr, v.conflicts))
            })
            .collect()
    }

    /// Signed expansion, e.g. `+Y(a, M1(a*)) - Y(a*, M1(a*))`.
    pub fn expansion(&self) -> String {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let sign = if t.sign < 0 { "-" } else { "+" };
                if i == 0 {
                    format!("{sign}{}", t.expr)
                } else {
                    format!(" {sign} {}", t.expr)
                }
            })
            .collect()
    }

    /// Value of the component on `model`. Refuses flagged specs.
    ///
    /// Positive and negative terms are summed separately, each in sorted
    /// order, so a contrast whose two halves hold the same values is
    /// exactly zero.
    pub fn evaluate(&self, model: &DiscreteScm, bindings: &Bindings) -> Result<f64, DecompError> {
        if !self.is_identifiable() {
            let conflicts = self.problematic_terms().into_iter().flat_map(|(_, c)| c).collect();
            return Err(DecompError::EvaluationOfProblematicSpec {
                name: self.name.clone(),
                conflicts,
            });
        }
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for t in &self.terms {
            let v = model.eval_expectation(&t.expr, bindings)?;
            for _ in 0..t.sign.unsigned_abs() {
                if t.sign > 0 { plus.push(v) } else { minus.push(v) }
            }
        }
        let sorted_sum = |mut v: Vec<f64>| {
            v.sort_by(f64::total_cmp);
            v.into_iter().sum::<f64>()
        };
        Ok(sorted_sum(plus) - sorted_sum(minus))
    }
}

/// One estimated component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub name: String,
    pub role: Role,
    pub value: f64,
    pub ci: Option<(f64, f64)>,
}

/// Components in report order, the total effect and the sum check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionResult {
    pub components: Vec<Estimate>,
    pub te: f64,
    pub te_ci: Option<(f64, f64)>,
    /// `|Σ summands − TE|`.
    pub sum_gap: f64,
}

impl DecompositionResult {
    /// Builds a result and computes `sum_gap` from the summands.
    pub fn new(components: Vec<Estimate>, te: f64) -> Self {
        let sum: f64 = components
            .iter()
            .filter(|c| c.role == Role::Summand)
            .map(|c| c.value)
            .sum();
        DecompositionResult {
            components,
            te,
            te_ci: None,
            sum_gap: (sum - te).abs(),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        if name == names::TE {
            return Some(self.te);
        }
        self.components.iter().find(|c| c.name == name).map(|c| c.value)
    }

    pub fn summands(&self) -> impl Iterator<Item = &Estimate> {
        self.components.iter().filter(|c| c.role == Role::Summand)
    }

    /// `(name, value)` for every component followed by TE.
    pub fn values(&self) -> Vec<(String, f64)> {
        self.components
            .iter()
            .map(|c| (c.name.clone(), c.value))
            .chain(std::iter::once((names::TE.to_string(), self.te)))
            .collect()
    }
}

/// Catalog for `scenario`: summands and auxiliaries in report order.
pub fn catalog(scenario: Scenario, q: &Query) -> Result<Vec<ComponentSpec>, DecompError> {
    match scenario {
        Scenario::SingleMediator => components_single(q),
        Scenario::NonSeq(2) => components_nonseq2(q),
        Scenario::OnePathChain(2) => components_seq2(q),
        other => Err(DecompError::UnsupportedScenario(other)),
    }
}

/// Evaluates the scenario's catalog on `model` by exact enumeration.
pub fn evaluate(model: &DiscreteScm, q: &Query) -> Result<DecompositionResult, DecompError> {
    let scenario = model.scenario();
    let specs = catalog(scenario, q)?;
    let bindings = q.bindings();
    let components = specs
        .iter()
        .map(|s| {
            Ok(Estimate {
                name: s.name.clone(),
                role: s.role,
                value: s.evaluate(model, &bindings)?,
                ci: None,
            })
        })
        .collect::<Result<Vec<_>, DecompError>>()?;
    let te = total_effect(scenario)?.evaluate(model, &bindings)?;
    Ok(DecompositionResult::new(components, te))
}

/// Classical additive interaction `p11 − p01 − p10 + p00` of a 2×2 table
/// of cell means indexed `[a][m]`.
pub fn additive_interaction(cells: &[[Option<f64>; 2]; 2]) -> Result<f64, DecompError> {
    let at = |a: usize, m: usize| cells[a][m].ok_or(DecompError::MissingCell { a, m });
    Ok(at(1, 1)? - at(0, 1)? - at(1, 0)? + at(0, 0)?)
}
