mod common;

use common::*;
use natfx::data::{Column, Dataset, Roles};
use natfx::decomp::{self, names, DecompositionResult, Query};
use natfx::estimate::{
    apply_transforms, expectation_w, fit_linear_system, linear_components, plugin, plugin_seq2, simulate_linear,
    CovariateProfile, EstimateError, LinearParams, LinearQuery, LinearSimulation, Transform, W,
};
use natfx::scm::DiscreteScm;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn chain_model() -> impl Strategy<Value = (DiscreteScm, Query)> {
    any::<u64>().prop_map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng, SEQ2);
        let q = random_query(&mut rng, &m);
        (m, q)
    })
}

#[derive(Debug)]
struct LinearCase {
    params: LinearParams,
    q: LinearQuery,
    c: CovariateProfile,
}

fn linear_case(rng: &mut impl Rng) -> LinearCase {
    let params = random_linear_params(rng);
    let mut u = |r: f64| rng.random_range(-r..=r);
    let q = LinearQuery::new(u(2.0), u(2.0), u(3.0), u(3.0));
    let c = CovariateProfile::new(vec![u(3.0)]);
    LinearCase { params, q, c }
}

fn linear_cases() -> impl Strategy<Value = LinearCase> {
    any::<u64>().prop_map(|seed| linear_case(&mut ChaCha8Rng::seed_from_u64(seed)))
}

fn w_all(case: &LinearCase) -> Vec<f64> {
    W::ALL
        .iter()
        .map(|&k| expectation_w(&case.params, k, &case.c, case.q.a, case.q.a_star))
        .collect()
}

fn value(r: &DecompositionResult, name: &str) -> f64 {
    r.get(name).unwrap_or_else(|| panic!("missing {name}"))
}

proptest! {
    #[test]
    fn plugin_matches_formula_evaluation((m, q) in chain_model()) {
        let plug = plugin_seq2(&m, &q).unwrap();
        let exact = decomp::evaluate(&m, &q).unwrap();
        prop_assert_eq!(plug.components.len(), exact.components.len());
        for (x, y) in plug.components.iter().zip(&exact.components) {
            prop_assert_eq!(&x.name, &y.name);
            prop_assert_eq!(x.role, y.role);
            prop_assert!(close(x.value, y.value, 1e-9), "{}: {} vs {}", x.name, x.value, y.value);
        }
        prop_assert!(close(plug.te, exact.te, 1e-9));
        let routed = plugin(&m, &q).unwrap();
        prop_assert_eq!(routed.values(), plug.values());
    }

    #[test]
    fn components_are_w_contrasts(case in linear_cases()) {
        let w = w_all(&case);
        let r = linear_components(&case.params, &case.q, &case.c).unwrap();
        let [w1, w2, w3, w4, w5, w6, w7, w8] = w[..] else { unreachable!() };
        let scale = 1.0 + w.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let expected = [
            (names::NATINT_AM1, w2 - w6 - w7 + w8),
            (names::NATINT_AM2, w3 - w7 - w5 + w8),
            (names::NATINT_AM1M2, w1 - w2 - w3 - w4 + w5 + w6 + w7 - w8),
            (names::NATINT_M1M2, w4 - w6 - w5 + w8),
            (names::PIE_M1, w6 - w8),
            (names::PIE_M2, w5 - w8),
            (names::PDE, w7 - w8),
            (names::TE, w1 - w8),
        ];
        for (name, v) in expected {
            prop_assert!(close(value(&r, name), v, 1e-9 * scale), "{}: {} vs {}", name, value(&r, name), v);
        }
    }

    #[test]
    fn location_shift_moves_only_the_means(case in linear_cases(), d in -50.0f64..50.0) {
        let mut shifted = case.params.clone();
        shifted.theta[0] += d;
        let moved = LinearCase { params: shifted, q: case.q, c: case.c.clone() };
        for (x, y) in w_all(&case).iter().zip(w_all(&moved)) {
            prop_assert!(close(y, x + d, 1e-9 * (1.0 + x.abs() + d.abs())));
        }
        let before = linear_components(&case.params, &case.q, &case.c).unwrap();
        let after = linear_components(&moved.params, &moved.q, &moved.c).unwrap();
        prop_assert_eq!(before.values(), after.values());
    }

    #[test]
    fn equal_exposures_make_worlds_coincide(case in linear_cases()) {
        let q = LinearQuery { a_star: case.q.a, ..case.q };
        let same = LinearCase { params: case.params.clone(), q, c: case.c.clone() };
        let w = w_all(&same);
        prop_assert_eq!(w[0], w[7]);
        prop_assert_eq!(w[1], w[5]);
        prop_assert_eq!(w[2], w[4]);
        let r = linear_components(&same.params, &same.q, &same.c).unwrap();
        prop_assert!(r.values().iter().all(|(_, v)| *v == 0.0));
    }
}

#[test]
fn closed_form_sum_over_many_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..1000 {
        let case = linear_case(&mut rng);
        let r = linear_components(&case.params, &case.q, &case.c).unwrap();
        let w = w_all(&case);
        let sum: f64 = r.summands().map(|c| c.value).sum();
        assert_eq!(r.summands().count(), 9);
        assert!(close(sum, w[0] - w[7], 1e-9), "{sum} vs {}", w[0] - w[7]);
        assert!(close(r.te, w[0] - w[7], 1e-9));
        let pde = value(&r, names::CDE) + value(&r, names::INT_REF_AM1) + value(&r, names::INT_REF_AM2_AM1M2);
        assert_eq!(value(&r, names::PDE), pde);
    }
}

#[test]
fn only_some_components_see_the_mediator_variance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let case = linear_case(&mut rng);
        let mut wider = case.params.clone();
        wider.sigma2_m1 += 0.75;
        let before = linear_components(&case.params, &case.q, &case.c).unwrap();
        let after = linear_components(&wider, &case.q, &case.c).unwrap();
        for name in [
            names::CDE,
            names::INT_REF_AM1,
            names::NATINT_AM1,
            names::NATINT_AM1M2,
            names::NATINT_M1M2,
            names::PIE_M1,
        ] {
            assert_eq!(value(&before, name).to_bits(), value(&after, name).to_bits(), "{name}");
        }
        for name in [names::INT_REF_AM2_AM1M2, names::NATINT_AM2, names::PIE_M2, names::PDE, names::TE] {
            assert_ne!(value(&before, name), value(&after, name), "{name}");
        }
    }
}

#[test]
fn without_interactions_the_total_effect_is_a_product_of_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let mut case = linear_case(&mut rng);
        let p = &mut case.params;
        p.theta[4..].fill(0.0);
        p.beta[3] = 0.0;
        let [_, t1, t2, t3, ..] = p.theta;
        let [_, b1, b2, _] = p.beta;
        let g1 = p.gamma[1];
        let expected = (t1 + t3 * b1 + t2 * g1 + t3 * b2 * g1) * (case.q.a - case.q.a_star);
        let r = linear_components(&case.params, &case.q, &case.c).unwrap();
        assert!(close(r.te, expected, 1e-12));
        for name in [
            names::INT_REF_AM1,
            names::INT_REF_AM2_AM1M2,
            names::NATINT_AM1,
            names::NATINT_AM2,
            names::NATINT_AM1M2,
            names::NATINT_M1M2,
        ] {
            assert!(value(&r, name).abs() < 1e-12, "{name} = {}", value(&r, name));
        }
    }
}

#[test]
fn monte_carlo_mean_of_the_natural_course() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let case = linear_case(&mut rng);
    let world = LinearWorld {
        params: &case.params,
        c: case.c.values[0],
        a: case.q.a,
        a_star: case.q.a_star,
        m1_star: case.q.m1_star,
        m2_star: case.q.m2_star,
    };
    let mut spec = decomp::total_effect(SEQ2).unwrap();
    spec.terms.truncate(1);
    let mc = monte_carlo(&world, &[spec], 1_000_000, 77)[0];
    let closed = expectation_w(&case.params, W::W1, &case.c, case.q.a, case.q.a_star);
    assert!((mc.mean - closed).abs() <= 3.0 * mc.se, "{} vs {closed} (se {})", mc.mean, mc.se);
}

fn numeric(roles: Roles, cols: Vec<(&str, Vec<f64>)>) -> Dataset {
    Dataset::new(roles, cols.into_iter().map(|(n, v)| (n.to_string(), Column::Numeric(v))).collect()).unwrap()
}

#[test]
fn log_transform_names_bad_rows() {
    let roles = Roles::new("A", &["M1", "M2"], "Y");
    let d = numeric(
        roles,
        vec![
            ("A", vec![0.0, 1.0, 0.0, 1.0]),
            ("M1", vec![1.0, 2.0, 3.0, 4.0]),
            ("M2", vec![1.0, 0.0, -2.0, 4.0]),
            ("Y", vec![1.0, 2.0, 3.0, 4.0]),
        ],
    );
    let err = apply_transforms(&d, &[Transform::log("M2")]).unwrap_err();
    let EstimateError::NonPositiveLog { column, rows } = &err else { panic!("{err}") };
    assert_eq!(column, "M2");
    assert_eq!(rows, &vec![2, 3]);
    assert!(err.to_string().contains("M2"));
    let err = fit_linear_system(&d, &[Transform::log("M2")]).unwrap_err();
    assert!(matches!(err, EstimateError::NonPositiveLog { .. }));
}

#[test]
fn fit_reports_three_coefficient_tables() {
    let params = LinearParams::new([0.5, 0.3, 0.2, 0.4, 0.1, -0.2, 0.05, 0.07], [1.0, 0.6, 0.3, -0.1], [2.0, 0.8], 0.9)
        .with_covariates(vec![0.3, 0.01], vec![0.1, 0.0], vec![-0.4, 0.02]);
    let mut spec = LinearSimulation::new(3000, 4);
    spec.covariates = vec![("sex".into(), 0.5, 0.5), ("age".into(), 48.0, 15.0)];
    let data = simulate_linear(&params, &spec).unwrap();
    let fit = fit_linear_system(&data, &[]).unwrap();
    let d = fit.fit.as_ref().unwrap();
    assert_eq!(d.outcome.coefficients.len(), 10);
    assert_eq!(d.m2.coefficients.len(), 6);
    assert_eq!(d.m1.coefficients.len(), 4);
    assert_eq!(d.outcome.coefficients[7].name, "A:M1:M2");
    assert_eq!(d.n_used, 3000);
    assert_eq!(fit.covariates, vec!["sex".to_string(), "age".to_string()]);
    assert_eq!(fit.sigma2_m1, d.m1.sigma2);
    let r = linear_components(&fit, &LinearQuery::new(1.0, 0.0, 2.8, 1.8), &CovariateProfile::new(vec![1.0, 48.3]))
        .unwrap();
    assert_eq!(r.components.len(), 10);
}

#[test]
fn collinear_design_is_rejected() {
    let roles = Roles::new("A", &["M1", "M2"], "Y");
    let n = 40;
    let a: Vec<f64> = (0..n).map(|i| (i % 2) as f64).collect();
    let d = numeric(
        roles,
        vec![
            ("A", a.clone()),
            ("M1", a.clone()),
            ("M2", (0..n).map(|i| (i * i % 7) as f64).collect()),
            ("Y", (0..n).map(|i| i as f64).collect()),
        ],
    );
    let err = fit_linear_system(&d, &[]).unwrap_err();
    assert!(matches!(err, EstimateError::RankDeficient { .. }), "{err}");
}
