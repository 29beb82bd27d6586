mod common;

use std::sync::Arc;

use common::{grid_interval, iv};
use ipscore::aggregation::AggregationRule;
use ipscore::decision::{certify_unique_argmax, DecisionProblem};
use ipscore::ip_scoring::{
    forecaster_value, interval_report_grid, randomized_value, score_landscape, verify_properness, RandomizedRule,
    ReportValuer, TailoredRule, ThetaDistribution,
};
use ipscore::probability::{credal_equivalent, CredalSet};
use ipscore::sampling::{seeded, uniform_simplex, SeededRng};
use proptest::prelude::*;
use rand::Rng;

/// Value of the truthful `[0.4, 0.6]` report under uniform θ on `[0, 1]`
/// with `u = −(o − a)²` on the 0.01 action grid, from the Riemann oracle below.
const TRUTHFUL_UNIFORM_VALUE: f64 = -0.246675;

/// Midpoint Riemann sum written against the closed form of the binary
/// problem, independent of the library: the action for weight λ is the grid
/// point nearest `0.4λ + 0.6(1 − λ)`.
fn riemann_truthful_value(nodes: usize) -> f64 {
    let eu = |p: f64, a: f64| -(p * (1.0 - a) * (1.0 - a) + (1.0 - p) * a * a);
    let mut total = 0.0;
    for i in 0..nodes {
        let l = (i as f64 + 0.5) / nodes as f64;
        let a = ((0.4 * l + 0.6 * (1.0 - l)) * 100.0).round() / 100.0;
        total += l * eu(0.4, a) + (1.0 - l) * eu(0.6, a);
    }
    total / nodes as f64
}

fn neg_squared() -> Arc<DecisionProblem> {
    Arc::new(DecisionProblem::neg_squared(0.01, 2).unwrap())
}

#[test]
fn quadrature_agrees_with_riemann_oracle() {
    let oracle = riemann_truthful_value(100_000);
    assert!((oracle - TRUTHFUL_UNIFORM_VALUE).abs() <= 1e-9, "oracle {oracle}");
    let rule = RandomizedRule::new(neg_squared(), ThetaDistribution::uniform(1001).unwrap(), 1.0, 0.0).unwrap();
    let b = iv(0.4, 0.6);
    let v = randomized_value(&rule, &b, &b).unwrap();
    assert!((v - TRUTHFUL_UNIFORM_VALUE).abs() <= 1e-6, "quadrature {v}");
}

fn random_problem(rng: &mut SeededRng) -> Arc<DecisionProblem> {
    if rng.random::<bool>() {
        let step = [0.02, 0.05, 0.1, 0.25][rng.random_range(0..4)];
        Arc::new(DecisionProblem::neg_squared(step, 2).unwrap())
    } else {
        let m = rng.random_range(2..=6);
        let table = (0..m).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        Arc::new(DecisionProblem::from_table(table).unwrap())
    }
}

fn random_rule(rng: &mut SeededRng) -> AggregationRule {
    match rng.random_range(0..3) {
        0 => AggregationRule::Utilitarian,
        1 => AggregationRule::Egalitarian,
        _ => AggregationRule::fixed_linear(uniform_simplex(rng, 2)).unwrap(),
    }
}

#[test]
fn every_tailored_rule_is_proper() {
    let mut rng = seeded(2024);
    let reports = interval_report_grid(0.05).unwrap();
    for _ in 0..100 {
        let belief = grid_interval(&mut rng, 20);
        let k = rng.random_range(0.1..5.0);
        let c = rng.random_range(0.0..3.0);
        let t = TailoredRule::new(random_problem(&mut rng), random_rule(&mut rng), k, c).unwrap();
        let r = verify_properness(&t, &belief, &reports).unwrap();
        assert!(r.is_proper, "{:?} {:?} beaten by {:?}", t.rule, belief.as_interval(), r.violations);
    }
}

#[test]
fn precise_beliefs_are_uniquely_best() {
    let problem = neg_squared();
    assert!(certify_unique_argmax(&problem, 0.01).unwrap().unique);
    let precise: Vec<CredalSet> = (0..=100).map(|i| iv(i as f64 / 100.0, i as f64 / 100.0)).collect();
    for rule in [AggregationRule::Utilitarian, AggregationRule::Egalitarian] {
        let t = TailoredRule::new(Arc::clone(&problem), rule, 1.0, 0.0).unwrap();
        for p in &precise {
            let r = verify_properness(&t, p, &precise).unwrap();
            assert!(r.is_strict, "{:?}: {:?}", p.as_interval(), r.argmax);
        }
    }
}

#[test]
fn truncated_theta_loses_strictness_somewhere() {
    let beliefs = [iv(0.4, 0.6), iv(0.45, 0.47), iv(0.2, 0.3)];
    let reports = interval_report_grid(0.01).unwrap();
    let full = RandomizedRule::new(neg_squared(), ThetaDistribution::uniform(1001).unwrap(), 1.0, 0.0).unwrap();
    let cut =
        RandomizedRule::new(neg_squared(), ThetaDistribution::uniform_on(0.4, 0.6, 1001).unwrap(), 1.0, 0.0).unwrap();
    assert!(full.theta.full_support() && !cut.theta.full_support());
    let mut broken = 0;
    for b in &beliefs {
        assert!(verify_properness(&full, b, &reports).unwrap().is_strict);
        let r = verify_properness(&cut, b, &reports).unwrap();
        if !r.is_strict {
            broken += 1;
            assert!(r.argmax_indices.iter().any(|&i| !credal_equivalent(&reports[i], b).unwrap()));
        }
    }
    assert!(broken >= 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn discrete_theta_value_is_weighted_sum(seed in any::<u64>(), support in 1usize..=5) {
        let mut rng = seeded(seed);
        let weights = uniform_simplex(&mut rng, support);
        let pts: Vec<(Vec<f64>, f64)> = weights.iter().map(|&w| (uniform_simplex(&mut rng, 2), w)).collect();
        let rule = RandomizedRule::new(random_problem(&mut rng), ThetaDistribution::discrete(pts.clone()).unwrap(), 1.3, 0.2).unwrap();
        let belief = grid_interval(&mut rng, 100);
        let report = grid_interval(&mut rng, 100);
        let mut expected = 0.0;
        for (lambda, w) in pts {
            expected += w * forecaster_value(&rule.realized(lambda).unwrap(), &belief, &report).unwrap();
        }
        prop_assert!((randomized_value(&rule, &belief, &report).unwrap() - expected).abs() <= 1e-12);
    }

    #[test]
    fn share_and_fee_act_affinely(seed in any::<u64>(), k in 0.05f64..10.0, c in 0.0f64..5.0) {
        let mut rng = seeded(seed);
        let problem = random_problem(&mut rng);
        let belief = grid_interval(&mut rng, 10);
        let reports = interval_report_grid(0.1).unwrap();
        let rule = random_rule(&mut rng);
        let base = TailoredRule::new(Arc::clone(&problem), rule.clone(), 1.0, 0.0).unwrap();
        let moved = TailoredRule::new(Arc::clone(&problem), rule, k, c).unwrap();
        let theta = ThetaDistribution::uniform(101).unwrap();
        let rbase = RandomizedRule::new(Arc::clone(&problem), theta.clone(), 1.0, 0.0).unwrap();
        let rmoved = RandomizedRule::new(problem, theta, k, c).unwrap();
        for (b, m) in [(&base as &dyn ReportValuer, &moved as &dyn ReportValuer), (&rbase, &rmoved)] {
            let vb = verify_properness(b, &belief, &reports).unwrap();
            let vm = verify_properness(m, &belief, &reports).unwrap();
            for (x, y) in vb.values.iter().zip(&vm.values) {
                prop_assert!((k * x + c - y).abs() <= 1e-9);
            }
            prop_assert_eq!(vb.argmax_indices, vm.argmax_indices);
        }
    }

    #[test]
    fn landscape_is_mirror_symmetric_for_symmetric_theta(seed in any::<u64>(), pairs in 1usize..=3) {
        // λ drawn off the rational grid, so no mixture of grid reports sits
        // exactly between two grid actions.
        let mut rng = seeded(seed);
        let mut support = Vec::new();
        for w in uniform_simplex(&mut rng, pairs) {
            let l: f64 = rng.random_range(0.0..1.0);
            support.push((vec![l, 1.0 - l], w / 2.0));
            support.push((vec![1.0 - l, l], w / 2.0));
        }
        let rule = RandomizedRule::new(neg_squared(), ThetaDistribution::discrete(support).unwrap(), 1.0, 0.0).unwrap();
        let l = score_landscape(&rule, &iv(0.4, 0.6), 0.01).unwrap();
        prop_assert!(max_mirror_gap(&l.rows) <= 1e-9);
    }
}

fn max_mirror_gap(rows: &[ipscore::ip_scoring::LandscapeRow]) -> f64 {
    let key = |q1: f64, q2: f64| ((q1 * 100.0).round() as i64, (q2 * 100.0).round() as i64);
    let map: std::collections::HashMap<_, _> = rows.iter().map(|r| (key(r.q1, r.q2), r.value)).collect();
    rows.iter().map(|r| (r.value - map[&key(1.0 - r.q2, 1.0 - r.q1)]).abs()).fold(0.0, f64::max)
}

#[test]
fn minmax_landscape_is_mirror_symmetric() {
    let t = TailoredRule::new(neg_squared(), AggregationRule::Egalitarian, 1.0, 0.0).unwrap();
    let l = score_landscape(&t, &iv(0.4, 0.6), 0.01).unwrap();
    assert!(max_mirror_gap(&l.rows) <= 1e-9);
}

#[test]
fn lowest_index_ties_skew_trapezoid_landscape() {
    // The trapezoid puts weight on λ = 1/2, where e.g. the report [0, 0.01]
    // mixes to 0.005, exactly between two actions. Lowest-index tie breaking
    // resolves it downward on both sides of the mirror, so the landscape is
    // symmetric only up to the weight of such nodes.
    let rule = RandomizedRule::new(neg_squared(), ThetaDistribution::uniform(1001).unwrap(), 1.0, 0.0).unwrap();
    let l = score_landscape(&rule, &iv(0.4, 0.6), 0.01).unwrap();
    let gap = max_mirror_gap(&l.rows);
    assert!(gap > 1e-9 && gap < 1e-3, "gap {gap}");
}
