//! Kite-graph identifiability check.
//!
//! In a one-path chain, `M_i` reaches the outcome directly and through every
//! later mediator. A formula is problematic when some mediator shows up with
//! two different specs across these routes, e.g. `M1(a)` at the top level
//! and `M1(a*)` nested inside `M2`. Mixing a fixed level with a
//! counterfactual for the same mediator is a conflict too.

use serde::Serialize;

use super::{CfExpr, MediatorSpec, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Identifiable,
    Problematic,
}

/// Distinct specs found for one mediator, in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub mediator: usize,
    pub specs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentifiabilityVerdict {
    pub status: Status,
    pub conflicts: Vec<Conflict>,
}

impl IdentifiabilityVerdict {
    pub fn is_identifiable(&self) -> bool {
        self.status == Status::Identifiable
    }
}

/// Collects every occurrence of each mediator's spec (top-level slots and
/// nested parents) and reports the mediators whose occurrences disagree.
pub fn check_identifiability(expr: &CfExpr, scenario: Scenario) -> IdentifiabilityVerdict {
    let k = scenario.mediators().max(expr.mediators.len());
    let mut seen: Vec<Vec<&MediatorSpec>> = vec![Vec::new(); k + 1];
    for (slot, spec) in expr.mediators.iter().enumerate() {
        collect(spec, slot + 1, &mut seen);
    }
    let conflicts: Vec<Conflict> = seen
        .iter()
        .enumerate()
        .filter(|(_, specs)| specs.len() > 1)
        .map(|(index, specs)| Conflict {
            mediator: index,
            specs: specs.iter().map(|s| s.display(index)).collect(),
        })
        .collect();
    IdentifiabilityVerdict {
        status: if conflicts.is_empty() {
            Status::Identifiable
        } else {
            Status::Problematic
        },
        conflicts,
    }
}

fn collect<'e>(spec: &'e MediatorSpec, index: usize, seen: &mut [Vec<&'e MediatorSpec>]) {
    if index == 0 || index >= seen.len() {
        return;
    }
    if !seen[index].contains(&spec) {
        seen[index].push(spec);
    }
    if let MediatorSpec::Counterfactual { parents, .. } = spec {
        for p in parents {
            collect(p, index - 1, seen);
        }
    }
}
