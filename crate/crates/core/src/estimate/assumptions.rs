use serde::Serialize;

use crate::cfexpr::Scenario;

/// One no-unmeasured-confounding condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assumption {
    pub id: &'static str,
    pub statement: &'static str,
    pub description: &'static str,
    pub acknowledged: bool,
}

/// The conditions under which a decomposition has a causal reading.
///
/// They cannot be checked from data. Estimation runs either way; reports
/// carry the ledger so that the conditions are stated next to the numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssumptionLedger {
    pub scenario: Scenario,
    pub assumptions: Vec<Assumption>,
}

const SINGLE: [(&str, &str, &str); 4] = [
    (
        "A'1",
        "Y(a,m) ⊥ A | C",
        "no unmeasured confounding of the exposure-outcome association",
    ),
    (
        "A'2",
        "Y(a,m) ⊥ M | {A,C}",
        "no unmeasured confounding of the mediator-outcome association",
    ),
    (
        "A'3",
        "M(a) ⊥ A | C",
        "no unmeasured confounding of the exposure-mediator association",
    ),
    (
        "A'4",
        "Y(a,m) ⊥ M(a*) | C",
        "no mediator-outcome confounder is itself affected by the exposure",
    ),
];

const SET: [(&str, &str, &str); 4] = [
    (
        "A1",
        "Y(a,m1,m2) ⊥ A | C",
        "no unmeasured confounding of the exposure-outcome association",
    ),
    (
        "A2",
        "Y(a,m1,m2) ⊥ {M1,M2} | {A,C}",
        "no unmeasured confounding of the association between the mediator set and the outcome",
    ),
    (
        "A3",
        "{M1(a),M2(a,m1)} ⊥ A | C",
        "no unmeasured confounding of the association between the exposure and the mediator set",
    ),
    (
        "A4",
        "Y(a,m1,m2) ⊥ {M1(a*),M2(a*,m1)} | C",
        "no confounder of the mediator set and the outcome is itself affected by the exposure",
    ),
];

const CHAIN: [(&str, &str, &str); 2] = [
    (
        "A5",
        "M2(a,m1) ⊥ M1 | {A,C}",
        "no unmeasured confounding of the association between M1 and M2",
    ),
    (
        "A6",
        "M2(a,m1) ⊥ M1(a*) | C",
        "no confounder of M1 and M2 is itself affected by the exposure",
    ),
];

impl AssumptionLedger {
    /// The conditions for `scenario`, none acknowledged. Two non-sequential
    /// mediators are treated as one set; a chain adds the two conditions on
    /// the `M1`-`M2` association.
    pub fn for_scenario(scenario: Scenario) -> Self {
        let rows: Vec<(&'static str, &'static str, &'static str)> = match scenario {
            Scenario::SingleMediator => SINGLE.to_vec(),
            Scenario::NonSeq(_) => SET.to_vec(),
            Scenario::OnePathChain(_) => SET.iter().chain(&CHAIN).copied().collect(),
        };
        AssumptionLedger {
            scenario,
            assumptions: rows
                .into_iter()
                .map(|(id, statement, description)| Assumption { id, statement, description, acknowledged: false })
                .collect(),
        }
    }

    pub fn acknowledge_all(mut self) -> Self {
        for a in &mut self.assumptions {
            a.acknowledged = true;
        }
        self
    }

    pub fn all_acknowledged(&self) -> bool {
        self.assumptions.iter().all(|a| a.acknowledged)
    }

    pub fn ids(&self) -> Vec<&'static str> {
        self.assumptions.iter().map(|a| a.id).collect()
    }
}
