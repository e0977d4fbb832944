use super::{DiscreteScm, Levels, ScmError, Table};
use crate::cfexpr::Scenario;
use crate::data::Dataset;

/// Plug-in model: empirical conditional frequencies and outcome cell means.
///
/// `declared` lists levels that must appear in the model even if the data
/// never shows them (for example both exposure levels of a query). Levels
/// observed in the data are appended after the declared ones. Any cell the
/// model needs but the data leaves empty is reported as
/// [`ScmError::EmptyCell`].
pub fn from_dataset(data: &Dataset, scenario: Scenario, declared: &Levels) -> Result<DiscreteScm, ScmError> {
    let k = scenario.mediators();
    if k > 2 {
        return Err(ScmError::UnsupportedScenario(scenario));
    }
    let roles = data.roles();
    if roles.mediators.len() != k {
        return Err(ScmError::ScenarioMismatch {
            scenario,
            detail: format!("data binds {} mediator column(s)", roles.mediators.len()),
        });
    }
    let coded = |name: &str, declared: &[String]| -> Result<(Vec<String>, Vec<usize>), ScmError> {
        let (observed, codes) = data.codes(name)?;
        let support = merge(declared, &observed);
        let remap: Vec<usize> = observed
            .iter()
            .map(|l| support.iter().position(|s| s == l).unwrap_or(0))
            .collect();
        Ok((support, codes.into_iter().map(|c| remap[c as usize]).collect()))
    };
    let (support_a, col_a) = coded(&roles.exposure, &declared.a)?;
    let (support_m1, col_m1) = coded(&roles.mediators[0], &declared.m1)?;
    let (support_m2, col_m2) = if k == 2 {
        let (s, c) = coded(&roles.mediators[1], &declared.m2)?;
        (s, Some(c))
    } else {
        (Vec::new(), None)
    };
    let y = data.numeric(&roles.outcome)?;

    let levels = Levels {
        a: support_a,
        m1: support_m1,
        m2: support_m2,
    };
    let (na, n1, n2) = (levels.a.len(), levels.m1.len(), levels.m2.len().max(1));

    let mut n_a = vec![0usize; na];
    let mut n_am1 = vec![vec![0usize; n1]; na];
    let mut n_am2 = vec![vec![0usize; n2]; na];
    let mut n_cell = vec![vec![vec![0usize; n2]; n1]; na];
    let mut sum_y = vec![vec![vec![0.0f64; n2]; n1]; na];
    for row in 0..data.n_rows() {
        let a = col_a[row];
        let m1 = col_m1[row];
        let m2 = col_m2.as_ref().map_or(0, |c| c[row]);
        n_a[a] += 1;
        n_am1[a][m1] += 1;
        n_am2[a][m2] += 1;
        n_cell[a][m1][m2] += 1;
        sum_y[a][m1][m2] += y[row];
    }

    let mut empty = Vec::new();
    for a in 0..na {
        for m1 in 0..n1 {
            for m2 in 0..n2 {
                if n_cell[a][m1][m2] == 0 {
                    let mut cell = format!("A={}, M1={}", levels.a[a], levels.m1[m1]);
                    if k == 2 {
                        cell.push_str(&format!(", M2={}", levels.m2[m2]));
                    }
                    empty.push(cell);
                }
            }
        }
    }
    if !empty.is_empty() {
        return Err(ScmError::EmptyCell(empty));
    }

    let ratio = |num: usize, den: usize| num as f64 / den as f64;
    let pm1 = (0..na)
        .map(|a| (0..n1).map(|m1| ratio(n_am1[a][m1], n_a[a])).collect())
        .collect();
    let mean3: Vec<Vec<Vec<f64>>> = (0..na)
        .map(|a| {
            (0..n1)
                .map(|m1| (0..n2).map(|m2| sum_y[a][m1][m2] / n_cell[a][m1][m2] as f64).collect())
                .collect()
        })
        .collect();
    let (pm2, ymean) = match scenario {
        Scenario::SingleMediator => (
            None,
            Table::Two(mean3.iter().map(|r| r.iter().map(|c| c[0]).collect()).collect()),
        ),
        Scenario::NonSeq(_) => (
            Some(Table::Two(
                (0..na)
                    .map(|a| (0..n2).map(|m2| ratio(n_am2[a][m2], n_a[a])).collect())
                    .collect(),
            )),
            Table::Three(mean3),
        ),
        Scenario::OnePathChain(_) => (
            Some(Table::Three(
                (0..na)
                    .map(|a| {
                        (0..n1)
                            .map(|m1| (0..n2).map(|m2| ratio(n_cell[a][m1][m2], n_am1[a][m1])).collect())
                            .collect()
                    })
                    .collect(),
            )),
            Table::Three(mean3),
        ),
    };
    DiscreteScm::new(scenario, levels, pm1, pm2, ymean)
}

/// Declared levels first, then unseen observed levels in sorted order
/// (numerically when every label parses as a number).
fn merge(declared: &[String], observed: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for l in declared {
        if !out.contains(l) {
            out.push(l.clone());
        }
    }
    let mut extra: Vec<&String> = observed.iter().filter(|l| !out.contains(l)).collect();
    extra.sort();
    extra.dedup();
    if extra.iter().all(|l| l.parse::<f64>().is_ok()) {
        extra.sort_by(|x, y| x.parse::<f64>().unwrap().total_cmp(&y.parse::<f64>().unwrap()));
    }
    out.extend(extra.into_iter().cloned());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Column, Roles};

    fn data(a: &[f64], m: &[f64], y: &[f64]) -> Dataset {
        Dataset::new(
            Roles::new("a", &["m"], "y"),
            vec![
                ("a".into(), Column::Numeric(a.to_vec())),
                ("m".into(), Column::Numeric(m.to_vec())),
                ("y".into(), Column::Numeric(y.to_vec())),
            ],
        )
        .unwrap()
    }

    #[test]
    fn frequencies_and_means() {
        let d = data(&[0., 0., 1., 1., 1., 0.], &[0., 1., 1., 1., 0., 0.], &[1., 2., 3., 5., 4., 3.]);
        let m = from_dataset(&d, Scenario::SingleMediator, &Levels::default()).unwrap();
        assert_eq!(m.levels().a, vec!["0", "1"]);
        assert!((m.p_m1(0, 0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.y_mean(0, 0, 0), 2.0);
        assert_eq!(m.y_mean(1, 1, 0), 4.0);
    }

    #[test]
    fn single_row_lists_every_missing_cell() {
        let d = data(&[1.], &[0.], &[2.]);
        let err = from_dataset(&d, Scenario::SingleMediator, &Levels::binary(1)).unwrap_err();
        let ScmError::EmptyCell(cells) = err else { panic!("{err:?}") };
        assert_eq!(cells, vec!["A=0, M1=0", "A=0, M1=1", "A=1, M1=1"]);
    }

    #[test]
    fn constant_exposure_names_absent_level() {
        let d = data(&[1., 1., 1., 1.], &[0., 1., 0., 1.], &[2., 3., 2., 3.]);
        let err = from_dataset(&d, Scenario::SingleMediator, &Levels::binary(1)).unwrap_err();
        let ScmError::EmptyCell(cells) = err else { panic!("{err:?}") };
        assert!(cells.iter().all(|c| c.starts_with("A=0")), "{cells:?}");
    }

    #[test]
    fn fractional_mediator_is_rejected() {
        let d = data(&[0., 1.], &[0.5, 1.0], &[1., 2.]);
        let err = from_dataset(&d, Scenario::SingleMediator, &Levels::default()).unwrap_err();
        assert!(matches!(err, ScmError::Data(crate::data::DataError::NonCategorical { .. })));
    }

    #[test]
    fn numeric_levels_sort_numerically() {
        let obs: Vec<String> = ["10", "9", "2", "10"].iter().map(|s| s.to_string()).collect();
        assert_eq!(merge(&[], &obs), vec!["2", "9", "10"]);
    }
}
