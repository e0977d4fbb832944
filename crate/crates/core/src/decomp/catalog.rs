use super::names::*;
use super::{ComponentSpec, DecompError, Query, Role, Term};
use crate::cfexpr::{parse_cf, Scenario};

const SINGLE: Scenario = Scenario::SingleMediator;
const NONSEQ2: Scenario = Scenario::NonSeq(2);
const SEQ2: Scenario = Scenario::OnePathChain(2);

fn spec(name: &str, role: Role, scenario: Scenario, terms: &[(i8, &str)]) -> ComponentSpec {
    let terms = terms
        .iter()
        .map(|&(sign, text)| Term {
            sign,
            expr: parse_cf(text, scenario).unwrap_or_else(|e| panic!("catalog formula `{text}`: {e}")),
        })
        .collect();
    ComponentSpec::new(name, role, scenario, terms)
}

use Role::{Auxiliary as Aux, Summand as Sum};

/// Total effect `Y(a) − Y(a*)` written with the composed mediators.
pub fn total_effect(scenario: Scenario) -> Result<ComponentSpec, DecompError> {
    let terms: &[(i8, &str)] = match scenario {
        SINGLE => &[(1, "Y(a, M1(a))"), (-1, "Y(a*, M1(a*))")],
        NONSEQ2 => &[(1, "Y(a, M1(a), M2(a))"), (-1, "Y(a*, M1(a*), M2(a*))")],
        SEQ2 => &[
            (1, "Y(a, M1(a), M2(a, M1(a)))"),
            (-1, "Y(a*, M1(a*), M2(a*, M1(a*)))"),
        ],
        other => return Err(DecompError::UnsupportedScenario(other)),
    };
    Ok(spec(TE, Role::Total, scenario, terms))
}

/// Four-way decomposition plus both direct/indirect splits.
///
/// Summands: CDE, INT_ref, INT_med, PIE. Auxiliaries: NatINT_AM (equal to
/// INT_med), PDE and TDE (pure and total direct effects) and TIE (total
/// indirect effect). PIE doubles as the pure indirect effect.
pub fn components_single(q: &Query) -> Result<Vec<ComponentSpec>, DecompError> {
    q.require_m1()?;
    let interaction: &[(i8, &str)] = &[
        (1, "Y(a, M1(a))"),
        (-1, "Y(a*, M1(a))"),
        (-1, "Y(a, M1(a*))"),
        (1, "Y(a*, M1(a*))"),
    ];
    Ok(vec![
        spec(CDE, Sum, SINGLE, &[(1, "Y(a, m*)"), (-1, "Y(a*, m*)")]),
        spec(
            INT_REF,
            Sum,
            SINGLE,
            &[
                (1, "Y(a, M1(a*))"),
                (-1, "Y(a*, M1(a*))"),
                (-1, "Y(a, m*)"),
                (1, "Y(a*, m*)"),
            ],
        ),
        spec(INT_MED, Sum, SINGLE, interaction),
        spec(PIE, Sum, SINGLE, &[(1, "Y(a*, M1(a))"), (-1, "Y(a*, M1(a*))")]),
        spec(NATINT_AM, Aux, SINGLE, interaction),
        spec(PDE, Aux, SINGLE, &[(1, "Y(a, M1(a*))"), (-1, "Y(a*, M1(a*))")]),
        spec(TDE, Aux, SINGLE, &[(1, "Y(a, M1(a))"), (-1, "Y(a*, M1(a))")]),
        spec(TIE, Aux, SINGLE, &[(1, "Y(a, M1(a))"), (-1, "Y(a, M1(a*))")]),
    ])
}

/// Ten-component decomposition for two unlinked mediators, with PDE, TDE
/// and SIE_M1 as auxiliaries.
pub fn components_nonseq2(q: &Query) -> Result<Vec<ComponentSpec>, DecompError> {
    q.require_m1()?;
    q.require_m2()?;
    Ok(vec![
        spec(CDE, Sum, NONSEQ2, &[(1, "Y(a, m1*, m2*)"), (-1, "Y(a*, m1*, m2*)")]),
        spec(
            INT_REF_AM1,
            Sum,
            NONSEQ2,
            &[
                (1, "Y(a, M1(a*), m2*)"),
                (-1, "Y(a, m1*, m2*)"),
                (-1, "Y(a*, M1(a*), m2*)"),
                (1, "Y(a*, m1*, m2*)"),
            ],
        ),
        spec(
            INT_REF_AM2,
            Sum,
            NONSEQ2,
            &[
                (1, "Y(a, m1*, M2(a*))"),
                (-1, "Y(a, m1*, m2*)"),
                (-1, "Y(a*, m1*, M2(a*))"),
                (1, "Y(a*, m1*, m2*)"),
            ],
        ),
        spec(
            INT_REF_AM1M2,
            Sum,
            NONSEQ2,
            &[
                (1, "Y(a, M1(a*), M2(a*))"),
                (-1, "Y(a, M1(a*), m2*)"),
                (-1, "Y(a, m1*, M2(a*))"),
                (-1, "Y(a*, M1(a*), M2(a*))"),
                (1, "Y(a*, m1*, M2(a*))"),
                (1, "Y(a*, M1(a*), m2*)"),
                (1, "Y(a, m1*, m2*)"),
                (-1, "Y(a*, m1*, m2*)"),
            ],
        ),
        spec(
            NATINT_AM1,
            Sum,
            NONSEQ2,
            &[
                (1, "Y(a, M1(a), M2(a*))"),
                (-1, "Y(a*, M1(a), M2(a*))"),
                (-1, "Y(a, M1(a*), M2(a*))"),
                (1, "Y(a*, M1(a*), M2(a*))"),
            ],
        ),
        spec(
            NATINT_AM2,
            Sum,
            NONSEQ2,
            &[
                (1, "Y(a, M1(a*), M2(a))"),
                (-1, "Y(a, M1(a*), M2(a*))"),
                (-1, "Y(a*, M1(a*), M2(a))"),
                (1, "Y(a*, M1(a*), M2(a*))"),
            ],
        ),
        spec(
            NATINT_AM1M2,
            Sum,
            NONSEQ2,
            &[
                (1, "Y(a, M1(a), M2(a))"),
                (-1, "Y(a, M1(a), M2(a*))"),
                (-1, "Y(a, M1(a*), M2(a))"),
                (-1, "Y(a*, M1(a), M2(a))"),
                (1, "Y(a*, M1(a*), M2(a))"),
                (1, "Y(a*, M1(a), M2(a*))"),
                (1, "Y(a, M1(a*), M2(a*))"),
                (-1, "Y(a*, M1(a*), M2(a*))"),
            ],
        ),
        spec(
            NATINT_M1M2,
            Sum,
            NONSEQ2,
            &[
                (1, "Y(a*, M1(a), M2(a))"),
                (-1, "Y(a*, M1(a), M2(a*))"),
                (-1, "Y(a*, M1(a*), M2(a))"),
                (1, "Y(a*, M1(a*), M2(a*))"),
            ],
        ),
        spec(
            PDE,
            Aux,
            NONSEQ2,
            &[(1, "Y(a, M1(a*), M2(a*))"), (-1, "Y(a*, M1(a*), M2(a*))")],
        ),
        spec(
            PIE_M1,
            Sum,
            NONSEQ2,
            &[(1, "Y(a*, M1(a), M2(a*))"), (-1, "Y(a*, M1(a*), M2(a*))")],
        ),
        spec(
            PIE_M2,
            Sum,
            NONSEQ2,
            &[(1, "Y(a*, M1(a*), M2(a))"), (-1, "Y(a*, M1(a*), M2(a*))")],
        ),
        spec(
            TDE,
            Aux,
            NONSEQ2,
            &[(1, "Y(a, M1(a), M2(a))"), (-1, "Y(a*, M1(a), M2(a))")],
        ),
        spec(
            SIE_M1,
            Aux,
            NONSEQ2,
            &[(1, "Y(a*, M1(a), M2(a))"), (-1, "Y(a*, M1(a*), M2(a))")],
        ),
    ])
}

/// Nine-component decomposition for the chain `M1 → M2`, with PDE, TDE
/// and SIE_M1 as auxiliaries. The two reference interactions involving
/// `M2` are fused because neither is identifiable on its own.
pub fn components_seq2(q: &Query) -> Result<Vec<ComponentSpec>, DecompError> {
    q.require_m1()?;
    q.require_m2()?;
    const W1: &str = "Y(a, M1(a), M2(a, M1(a)))";
    const W2: &str = "Y(a, M1(a), M2(a*, M1(a)))";
    const W3: &str = "Y(a, M1(a*), M2(a, M1(a*)))";
    const W4: &str = "Y(a*, M1(a), M2(a, M1(a)))";
    const W5: &str = "Y(a*, M1(a*), M2(a, M1(a*)))";
    const W6: &str = "Y(a*, M1(a), M2(a*, M1(a)))";
    const W7: &str = "Y(a, M1(a*), M2(a*, M1(a*)))";
    const W8: &str = "Y(a*, M1(a*), M2(a*, M1(a*)))";
    Ok(vec![
        spec(CDE, Sum, SEQ2, &[(1, "Y(a, m1*, m2*)"), (-1, "Y(a*, m1*, m2*)")]),
        spec(
            INT_REF_AM1,
            Sum,
            SEQ2,
            &[
                (1, "Y(a, M1(a*), m2*)"),
                (-1, "Y(a*, M1(a*), m2*)"),
                (-1, "Y(a, m1*, m2*)"),
                (1, "Y(a*, m1*, m2*)"),
            ],
        ),
        spec(
            INT_REF_AM2_AM1M2,
            Sum,
            SEQ2,
            &[
                (1, W7),
                (-1, "Y(a, M1(a*), m2*)"),
                (-1, W8),
                (1, "Y(a*, M1(a*), m2*)"),
            ],
        ),
        spec(NATINT_AM1, Sum, SEQ2, &[(1, W2), (-1, W6), (-1, W7), (1, W8)]),
        spec(NATINT_AM2, Sum, SEQ2, &[(1, W3), (-1, W7), (-1, W5), (1, W8)]),
        spec(
            NATINT_AM1M2,
            Sum,
            SEQ2,
            &[
                (1, W1),
                (-1, W2),
                (-1, W3),
                (-1, W4),
                (1, W5),
                (1, W6),
                (1, W7),
                (-1, W8),
            ],
        ),
        spec(NATINT_M1M2, Sum, SEQ2, &[(1, W4), (-1, W6), (-1, W5), (1, W8)]),
        spec(PDE, Aux, SEQ2, &[(1, W7), (-1, W8)]),
        spec(PIE_M1, Sum, SEQ2, &[(1, W6), (-1, W8)]),
        spec(PIE_M2, Sum, SEQ2, &[(1, W5), (-1, W8)]),
        spec(TDE, Aux, SEQ2, &[(1, W1), (-1, W4)]),
        spec(SIE_M1, Aux, SEQ2, &[(1, W4), (-1, W5)]),
    ])
}

/// The two halves of the fused chain reference interaction. Both are
/// flagged problematic because they contain `Y(a, m1*, M2(a*, M1(a*)))`.
pub fn reference_interaction_split(q: &Query) -> Result<Vec<ComponentSpec>, DecompError> {
    q.require_m1()?;
    q.require_m2()?;
    const FIG12: &str = "Y(a, m1*, M2(a*, M1(a*)))";
    Ok(vec![
        spec(
            INT_REF_AM2,
            Aux,
            SEQ2,
            &[
                (1, FIG12),
                (-1, "Y(a, m1*, m2*)"),
                (-1, "Y(a*, m1*, M2(a*, M1(a*)))"),
                (1, "Y(a*, m1*, m2*)"),
            ],
        ),
        spec(
            INT_REF_AM1M2,
            Aux,
            SEQ2,
            &[
                (1, "Y(a, M1(a*), M2(a*, M1(a*)))"),
                (-1, "Y(a, M1(a*), m2*)"),
                (-1, FIG12),
                (-1, "Y(a*, M1(a*), M2(a*, M1(a*)))"),
                (1, "Y(a*, m1*, M2(a*, M1(a*)))"),
                (1, "Y(a*, M1(a*), m2*)"),
                (1, "Y(a, m1*, m2*)"),
                (-1, "Y(a*, m1*, m2*)"),
            ],
        ),
    ])
}

/// Mediated interactions of the four-way decomposition extended to two
/// mediators. `INT_med-AM1(m2*)` is always evaluable; in a chain the
/// `M2` and three-way terms are flagged problematic.
pub fn mediated_contrasts(q: &Query, scenario: Scenario) -> Result<Vec<ComponentSpec>, DecompError> {
    q.require_m1()?;
    q.require_m2()?;
    let (natural_m2_a, natural_m2_ref, full_a, full_ref) = match scenario {
        NONSEQ2 => ("M2(a)", "M2(a*)", "M1(a), M2(a)", "M1(a*), M2(a*)"),
        SEQ2 => (
            "M2(a, M1(a))",
            "M2(a*, M1(a*))",
            "M1(a), M2(a, M1(a))",
            "M1(a*), M2(a*, M1(a*))",
        ),
        other => return Err(DecompError::UnsupportedScenario(other)),
    };
    let am1 = spec(
        INT_MED_AM1,
        Aux,
        scenario,
        &[
            (1, "Y(a, M1(a), m2*)"),
            (-1, "Y(a*, M1(a), m2*)"),
            (-1, "Y(a, M1(a*), m2*)"),
            (1, "Y(a*, M1(a*), m2*)"),
        ],
    );
    let y = |x: &str, rest: &str| format!("Y({x}, {rest})");
    let am2_terms = [
        (1, y("a", &format!("m1*, {natural_m2_a}"))),
        (-1, y("a", &format!("m1*, {natural_m2_ref}"))),
        (-1, y("a*", &format!("m1*, {natural_m2_a}"))),
        (1, y("a*", &format!("m1*, {natural_m2_ref}"))),
    ];
    let am1m2_terms = [
        (1, y("a", full_a)),
        (-1, y("a", full_ref)),
        (-1, y("a", "M1(a), m2*")),
        (1, y("a", "M1(a*), m2*")),
        (-1, y("a", &format!("m1*, {natural_m2_a}"))),
        (1, y("a", &format!("m1*, {natural_m2_ref}"))),
        (-1, y("a*", full_a)),
        (1, y("a*", full_ref)),
        (1, y("a*", &format!("m1*, {natural_m2_a}"))),
        (-1, y("a*", &format!("m1*, {natural_m2_ref}"))),
        (1, y("a*", "M1(a), m2*")),
        (-1, y("a*", "M1(a*), m2*")),
    ];
    Ok(vec![
        am1,
        spec(INT_MED_AM2, Aux, scenario, &borrowed(&am2_terms)),
        spec(INT_MED_AM1M2, Aux, scenario, &borrowed(&am1m2_terms)),
    ])
}

fn borrowed(terms: &[(i8, String)]) -> Vec<(i8, &str)> {
    terms.iter().map(|(s, t)| (*s, t.as_str())).collect()
}
