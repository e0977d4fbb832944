use super::EstimateError;
use crate::cfexpr::Scenario;
use crate::decomp::{self, names, DecompositionResult, Estimate, Query, Role};
use crate::scm::{DiscreteScm, ScmError};

/// Empirical-formula estimates for the sequential two-mediator model.
///
/// Each component is a double sum over the mediator supports of outcome
/// cell means weighted by conditional mediator probabilities. Nothing here
/// goes through the counterfactual evaluator, so the result is an
/// independent check on [`decomp::evaluate`]. Component names and order
/// match [`decomp::components_seq2`].
pub fn plugin_seq2(model: &DiscreteScm, q: &Query) -> Result<DecompositionResult, EstimateError> {
    if model.scenario() != Scenario::OnePathChain(2) {
        return Err(ScmError::UnsupportedScenario(model.scenario()).into());
    }
    let level = |label: &str| {
        model
            .exposure_index(label)
            .ok_or_else(|| ScmError::UnknownExposureLevel(label.to_string()))
    };
    let fixed = |mediator: usize, value: &Option<String>, name: &'static str| -> Result<usize, EstimateError> {
        let value = value.as_ref().ok_or(decomp::DecompError::MissingFixedLevel(name))?;
        model
            .support_index(mediator, value)
            .ok_or_else(|| ScmError::UnknownSupportValue { mediator, value: value.clone() }.into())
    };
    let a = level(&q.a)?;
    let s = level(&q.a_star)?;
    let m1s = fixed(1, &q.m1_star, "m1*")?;
    let m2s = fixed(2, &q.m2_star, "m2*")?;

    let n1 = model.levels().m1.len();
    let n2 = model.n_m2();
    let p = |x: usize, m1: usize, m2: usize| model.y_mean(x, m1, m2);
    let p1 = |x: usize, m1: usize| model.p_m1(x, m1);
    let p2 = |x: usize, m1: usize, m2: usize| model.p_m2(x, m1, m2);
    let d1 = |m1: usize| p1(a, m1) - p1(s, m1);
    let d2 = |m1: usize, m2: usize| p2(a, m1, m2) - p2(s, m1, m2);
    let sum2 = |f: &dyn Fn(usize, usize) -> f64| {
        let mut acc = 0.0;
        for m1 in 0..n1 {
            for m2 in 0..n2 {
                acc += f(m1, m2);
            }
        }
        acc
    };

    let cde = p(a, m1s, m2s) - p(s, m1s, m2s);
    let int_ref_am1: f64 = (0..n1)
        .map(|m1| (p(a, m1, m2s) - p(a, m1s, m2s) - p(s, m1, m2s) + p(s, m1s, m2s)) * p1(s, m1))
        .sum();
    let int_ref_am2_am1m2 = sum2(&|m1, m2| {
        (p(a, m1, m2) - p(a, m1, m2s) - p(s, m1, m2) + p(s, m1, m2s)) * p1(s, m1) * p2(s, m1, m2)
    });
    let natint_am1 = sum2(&|m1, m2| (p(a, m1, m2) - p(s, m1, m2)) * p2(s, m1, m2) * d1(m1));
    let natint_am2 = sum2(&|m1, m2| (p(a, m1, m2) - p(s, m1, m2)) * p1(s, m1) * d2(m1, m2));
    let natint_am1m2 = sum2(&|m1, m2| (p(a, m1, m2) - p(s, m1, m2)) * d1(m1) * d2(m1, m2));
    let natint_m1m2 = sum2(&|m1, m2| p(s, m1, m2) * d1(m1) * d2(m1, m2));
    let pde = sum2(&|m1, m2| (p(a, m1, m2) - p(s, m1, m2)) * p1(s, m1) * p2(s, m1, m2));
    let pie_m1 = sum2(&|m1, m2| p(s, m1, m2) * p2(s, m1, m2) * d1(m1));
    let pie_m2 = sum2(&|m1, m2| p(s, m1, m2) * p1(s, m1) * d2(m1, m2));
    let tde = sum2(&|m1, m2| (p(a, m1, m2) - p(s, m1, m2)) * p1(a, m1) * p2(a, m1, m2));
    let sie_m1 = sum2(&|m1, m2| p(s, m1, m2) * d1(m1) * p2(a, m1, m2));

    let mut te = 0.0;
    for m1 in 0..n1 {
        for m2 in 0..n2 {
            te += p(a, m1, m2) * p1(a, m1) * p2(a, m1, m2);
            te -= p(s, m1, m2) * p1(s, m1) * p2(s, m1, m2);
        }
    }

    let summand = |name: &str, value: f64| Estimate { name: name.to_string(), role: Role::Summand, value, ci: None };
    let auxiliary = |name: &str, value: f64| Estimate { name: name.to_string(), role: Role::Auxiliary, value, ci: None };
    let components = vec![
        summand(names::CDE, cde),
        summand(names::INT_REF_AM1, int_ref_am1),
        summand(names::INT_REF_AM2_AM1M2, int_ref_am2_am1m2),
        summand(names::NATINT_AM1, natint_am1),
        summand(names::NATINT_AM2, natint_am2),
        summand(names::NATINT_AM1M2, natint_am1m2),
        summand(names::NATINT_M1M2, natint_m1m2),
        auxiliary(names::PDE, pde),
        summand(names::PIE_M1, pie_m1),
        summand(names::PIE_M2, pie_m2),
        auxiliary(names::TDE, tde),
        auxiliary(names::SIE_M1, sie_m1),
    ];
    Ok(DecompositionResult::new(components, te))
}

/// Plug-in estimates for any discrete model: the empirical formulas for a
/// sequential two-mediator model, exact enumeration of the catalog
/// otherwise. A non-sequential model is its own plug-in estimate once
/// `Pr(M2 | A, M1)` has been pooled over `M1`, which
/// [`crate::scm::from_dataset`] does when the scenario says so.
pub fn plugin(model: &DiscreteScm, q: &Query) -> Result<DecompositionResult, EstimateError> {
    match model.scenario() {
        Scenario::OnePathChain(2) => plugin_seq2(model, q),
        _ => Ok(decomp::evaluate(model, q)?),
    }
}
