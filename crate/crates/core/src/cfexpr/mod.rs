//! Nested counterfactual formulas over a declared mediator structure.
//!
//! A formula such as `Y(a, M1(a*), M2(a, M1(a*)))` names the potential
//! outcome obtained by setting the exposure to `a` in the outcome equation
//! while each mediator takes either a fixed level (`m1*`) or its own
//! potential value under some exposure. In a one-path chain the
//! counterfactual for `M_i` (i ≥ 2) nests the value of its predecessor
//! `M_{i-1}`, which is what makes kite-graph conflicts possible.
//!
//! The module provides the AST ([`CfExpr`]), a whitespace-insensitive
//! parser ([`parse_cf`]), a canonical printer ([`format_cf`]) and the
//! syntactic identifiability check ([`check_identifiability`]).

mod identify;
mod parse;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use identify::{check_identifiability, Conflict, IdentifiabilityVerdict, Status};
pub use parse::{parse_cf, parse_cf_inferred, CfError};

/// Mediator structure a formula is interpreted against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// One mediator `A → M → Y`.
    SingleMediator,
    /// `k ≥ 2` mediators with no edges between them.
    NonSeq(usize),
    /// `k ≥ 2` mediators with edges `M_i → M_{i+1}` only.
    OnePathChain(usize),
}

impl Scenario {
    pub fn nonseq(k: usize) -> Result<Self, ScenarioError> {
        if k < 2 {
            return Err(ScenarioError::TooFewMediators(k));
        }
        Ok(Scenario::NonSeq(k))
    }

    pub fn chain(k: usize) -> Result<Self, ScenarioError> {
        if k < 2 {
            return Err(ScenarioError::TooFewMediators(k));
        }
        Ok(Scenario::OnePathChain(k))
    }

    /// Number of mediators `k`.
    pub fn mediators(&self) -> usize {
        match *self {
            Scenario::SingleMediator => 1,
            Scenario::NonSeq(k) | Scenario::OnePathChain(k) => k,
        }
    }

    pub fn is_chain(&self) -> bool {
        matches!(self, Scenario::OnePathChain(_))
    }

    /// Number of parent specs the counterfactual for mediator `index`
    /// (1-based) must carry.
    pub fn parent_arity(&self, index: usize) -> usize {
        if self.is_chain() && index >= 2 {
            1
        } else {
            0
        }
    }

    pub(crate) fn validate(&self) -> Result<(), ScenarioError> {
        match *self {
            Scenario::SingleMediator => Ok(()),
            Scenario::NonSeq(k) | Scenario::OnePathChain(k) if k < 2 => {
                Err(ScenarioError::TooFewMediators(k))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::SingleMediator => f.write_str("single"),
            Scenario::NonSeq(k) => write!(f, "nonseq{k}"),
            Scenario::OnePathChain(k) => write!(f, "seq{k}"),
        }
    }
}

impl FromStr for Scenario {
    type Err = ScenarioError;

    /// Accepts `single`, `nonseq<k>` and `seq<k>` (alias `chain<k>`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        if s == "single" {
            return Ok(Scenario::SingleMediator);
        }
        let count = |rest: &str| -> Result<usize, ScenarioError> {
            rest.parse::<usize>()
                .map_err(|_| ScenarioError::Unknown(s.clone()))
        };
        if let Some(rest) = s.strip_prefix("nonseq") {
            return Scenario::nonseq(count(rest)?);
        }
        if let Some(rest) = s.strip_prefix("seq").or_else(|| s.strip_prefix("chain")) {
            return Scenario::chain(count(rest)?);
        }
        Err(ScenarioError::Unknown(s))
    }
}

impl Serialize for Scenario {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scenario {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}` (expected single, nonseq<k> or seq<k>)")]
    Unknown(String),
    #[error("multi-mediator scenarios need at least 2 mediators, got {0}")]
    TooFewMediators(usize),
}

/// An exposure symbol inside a formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExposureLevel {
    /// `a`
    Treatment,
    /// `a*`
    Reference,
    /// Any other label, e.g. `a**`. Compared by label.
    Named(String),
}

impl ExposureLevel {
    pub fn named(label: impl Into<String>) -> Self {
        ExposureLevel::Named(label.into())
    }
}

impl fmt::Display for ExposureLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExposureLevel::Treatment => f.write_str("a"),
            ExposureLevel::Reference => f.write_str("a*"),
            ExposureLevel::Named(l) => f.write_str(l),
        }
    }
}

/// The value a mediator slot takes.
///
/// The mediator's index is implied by its position: slot `i` of a
/// [`CfExpr`] holds `M_i`, and the single parent of a chain counterfactual
/// for `M_i` is `M_{i-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MediatorSpec {
    /// Externally fixed level such as `m1*`.
    Fixed(String),
    /// Potential value under `exposure`, with the nested predecessor in
    /// chain scenarios (empty otherwise).
    Counterfactual {
        exposure: ExposureLevel,
        parents: Vec<MediatorSpec>,
    },
}

impl MediatorSpec {
    pub fn fixed(label: impl Into<String>) -> Self {
        MediatorSpec::Fixed(label.into())
    }

    /// Counterfactual with no nested parent (`M_i(x)`).
    pub fn natural(exposure: ExposureLevel) -> Self {
        MediatorSpec::Counterfactual {
            exposure,
            parents: Vec::new(),
        }
    }

    /// Counterfactual nesting its predecessor (`M_i(x, parent)`).
    pub fn nested(exposure: ExposureLevel, parent: MediatorSpec) -> Self {
        MediatorSpec::Counterfactual {
            exposure,
            parents: vec![parent],
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, MediatorSpec::Fixed(_))
    }

    /// Canonical text of this spec when it stands for mediator `index`.
    pub fn display(&self, index: usize) -> String {
        let mut out = String::new();
        write_spec(&mut out, self, index);
        out
    }

    /// Replaces every exposure symbol, recursively.
    pub fn map_exposures(&self, f: &impl Fn(&ExposureLevel) -> ExposureLevel) -> Self {
        match self {
            MediatorSpec::Fixed(l) => MediatorSpec::Fixed(l.clone()),
            MediatorSpec::Counterfactual { exposure, parents } => MediatorSpec::Counterfactual {
                exposure: f(exposure),
                parents: parents.iter().map(|p| p.map_exposures(f)).collect(),
            },
        }
    }
}

/// A nested counterfactual outcome formula `Y(x, spec_1, …, spec_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CfExpr {
    pub exposure: ExposureLevel,
    pub mediators: Vec<MediatorSpec>,
}

impl CfExpr {
    pub fn new(exposure: ExposureLevel, mediators: Vec<MediatorSpec>) -> Self {
        CfExpr {
            exposure,
            mediators,
        }
    }

    /// `Y(x, M1(x1))` in the single-mediator scenario.
    pub fn single(y: ExposureLevel, m: ExposureLevel) -> Self {
        CfExpr::new(y, vec![MediatorSpec::natural(m)])
    }

    /// `Y(x, M1(x1), M2(x2))` in the non-sequential scenario.
    pub fn nonseq2(y: ExposureLevel, m1: ExposureLevel, m2: ExposureLevel) -> Self {
        CfExpr::new(
            y,
            vec![MediatorSpec::natural(m1), MediatorSpec::natural(m2)],
        )
    }

    /// `Y(x, M1(x1), M2(x2, M1(x1)))`: the identifiable chain formula in
    /// which both occurrences of `M1` agree.
    pub fn seq2(y: ExposureLevel, m1: ExposureLevel, m2: ExposureLevel) -> Self {
        let m1_spec = MediatorSpec::natural(m1);
        CfExpr::new(
            y,
            vec![m1_spec.clone(), MediatorSpec::nested(m2, m1_spec)],
        )
    }

    pub fn map_exposures(&self, f: impl Fn(&ExposureLevel) -> ExposureLevel) -> Self {
        CfExpr {
            exposure: f(&self.exposure),
            mediators: self.mediators.iter().map(|m| m.map_exposures(&f)).collect(),
        }
    }
}

impl fmt::Display for CfExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_cf(self))
    }
}

impl Serialize for CfExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_cf(self))
    }
}

impl FromStr for CfExpr {
    type Err = CfError;

    /// Parses against the scenario implied by the formula's shape: a single
    /// slot is `SingleMediator`, any nesting makes it a chain, otherwise
    /// non-sequential.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse_inferred(s)
    }
}

/// Canonical text: no spaces except a single space after each comma.
pub fn format_cf(expr: &CfExpr) -> String {
    let mut out = String::from("Y(");
    out.push_str(&expr.exposure.to_string());
    for (i, spec) in expr.mediators.iter().enumerate() {
        out.push_str(", ");
        write_spec(&mut out, spec, i + 1);
    }
    out.push(')');
    out
}

fn write_spec(out: &mut String, spec: &MediatorSpec, index: usize) {
    match spec {
        MediatorSpec::Fixed(label) => out.push_str(label),
        MediatorSpec::Counterfactual { exposure, parents } => {
            out.push_str(&format!("M{index}({exposure}"));
            for p in parents {
                out.push_str(", ");
                write_spec(out, p, index.saturating_sub(1));
            }
            out.push(')');
        }
    }
}
