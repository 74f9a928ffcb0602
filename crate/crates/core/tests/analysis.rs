use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slice_broker::analysis::*;
use slice_broker::harness::run_synthetic;
use slice_broker::policies::{Onets, TieBreak};

fn density(mean: f64, x: f64) -> f64 {
    (-x / mean).exp() / mean
}

/// `E_u[ln(f_u / f_v)]` by composite Simpson on `[0, 60·u]`.
fn kl_by_quadrature(u: f64, v: f64) -> f64 {
    let steps = 200_000;
    let hi = 60.0 * u;
    let h = hi / steps as f64;
    let g = |x: f64| density(u, x) * (density(u, x) / density(v, x)).ln();
    let mut s = g(0.0) + g(hi);
    for k in 1..steps {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(k as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn kl_matches_quadrature() {
    let cases = [(1.0, 2.0), (2.0, 1.0), (3.0, 3.0), (0.2, 0.9), (5.0, 0.7)];
    for (u, v) in cases {
        let k = kl_exponential(u, v).unwrap();
        let q = kl_by_quadrature(u, v);
        assert!((k - q).abs() < 1e-8, "H({u}, {v}) = {k}, quadrature {q}");
    }
    assert!((kl_by_quadrature(1.0, 2.0) - 0.19315).abs() < 5e-6);
    assert!((kl_by_quadrature(2.0, 1.0) - 0.30685).abs() < 5e-6);
}

proptest! {
    #[test]
    fn kl_is_nonnegative_and_zero_only_on_equal_means(u in 0.01f64..10.0, v in 0.01f64..10.0) {
        let k = kl_exponential(u, v).unwrap();
        prop_assert!(k >= 0.0);
        prop_assert_eq!(kl_exponential(u, u).unwrap(), 0.0);
        if (u / v - 1.0).abs() > 1e-6 {
            prop_assert!(k > 0.0);
        }
    }
}

#[test]
fn lower_bound_examples() {
    let all = RewardModel::new(vec![0.4, 0.3, 0.2]).unwrap();
    assert_eq!(regret_lower_bound(&all, 3).unwrap(), 0.0);

    let two = RewardModel::new(vec![2.0, 1.0]).unwrap();
    let expected = 1.0 / kl_by_quadrature(1.0, 2.0);
    let got = regret_lower_bound(&two, 1).unwrap();
    assert!((got - expected).abs() < 1e-6, "{got} vs {expected}");
    assert!((got - 5.177).abs() < 1e-3);

    let close = RewardModel::new(vec![1.0, 1.0 - 1e-9]).unwrap();
    assert!(regret_lower_bound(&close, 1).unwrap() > 1e8);
}

#[test]
fn regret_of_a_fixed_wrong_arm() {
    let model = RewardModel::new(vec![0.9, 0.1]).unwrap();
    let rounds = vec![vec![1usize]; 100];
    let r = compute_regret(rounds.iter().map(Vec::as_slice), &model, 1).unwrap();
    assert!((r.total() - 80.0).abs() < 1e-9);
    assert_eq!(r.pulls, vec![0, 100]);
}

#[test]
fn regret_vanishes_for_oracle_and_symmetric_arms() {
    let model = RewardModel::new(vec![0.2, 0.7, 0.5]).unwrap();
    let oracle = vec![vec![1usize, 2]; 50];
    let r = compute_regret(oracle.iter().map(Vec::as_slice), &model, 2).unwrap();
    assert!(r.cumulative.iter().all(|x| x.abs() < 1e-12));

    let flat = RewardModel::new(vec![0.5; 4]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let any: Vec<Vec<usize>> = (0..50).map(|_| vec![rng.random_range(0..4)]).collect();
    let r = compute_regret(any.iter().map(Vec::as_slice), &flat, 1).unwrap();
    assert!(r.cumulative.iter().all(|x| *x == 0.0));
}

proptest! {
    #[test]
    fn regret_with_true_means_never_decreases(
        means in proptest::collection::vec(0.05f64..2.0, 2..6),
        picks in proptest::collection::vec(any::<u64>(), 1..200),
        batch_raw in 1usize..6,
    ) {
        let model = RewardModel::new(means.clone()).unwrap();
        let n = means.len();
        let batch = batch_raw.min(n);
        let rounds: Vec<Vec<usize>> = picks
            .iter()
            .map(|p| {
                let mut set: Vec<usize> = (0..n).collect();
                let mut rng = ChaCha8Rng::seed_from_u64(*p);
                for i in 0..batch {
                    let j = rng.random_range(i..n);
                    set.swap(i, j);
                }
                set.truncate(batch);
                set
            })
            .collect();
        let r = compute_regret(rounds.iter().map(Vec::as_slice), &model, batch).unwrap();
        for w in r.cumulative.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
    }
}

/// `P(arm 1 in top 2)` for three exponential arms equals one minus the
/// probability that arm 1 is the smallest draw.
#[test]
fn three_arm_top_two_example() {
    let theta = [0.6, 0.3, 0.1];
    let rates: Vec<f64> = theta.iter().map(|t| 1.0 / t).collect();
    let exact = 1.0 - rates[1] / rates.iter().sum::<f64>();

    let closed = expected_pulls_bound(&theta, 2, 1).unwrap();
    let numeric = expected_pulls_numeric(&theta, 2, 1).unwrap();
    assert!((closed - exact).abs() < 1e-12, "{closed} vs {exact}");
    assert!((numeric - exact).abs() < 1e-9);

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 1_000_000;
    let mut hits = 0u32;
    for _ in 0..draws {
        let v: Vec<f64> = theta
            .iter()
            .map(|t| -t * (1.0 - rng.random::<f64>()).ln())
            .collect();
        let above = v.iter().filter(|x| **x > v[1]).count();
        if above < 2 {
            hits += 1;
        }
    }
    let mc = f64::from(hits) / f64::from(draws);
    assert!(
        (closed - mc).abs() < 1e-3,
        "closed {closed}, monte carlo {mc}"
    );
}

#[test]
fn single_and_symmetric_arms() {
    assert_eq!(expected_pulls_bound(&[0.3], 1, 0).unwrap(), 1.0);
    assert_eq!(expected_pulls_numeric(&[0.3], 1, 0).unwrap(), 1.0);
    for arm in 0..2 {
        assert!((expected_pulls_bound(&[0.8, 0.8], 1, arm).unwrap() - 0.5).abs() < 1e-15);
        assert!((expected_pulls_numeric(&[0.8, 0.8], 1, arm).unwrap() - 0.5).abs() < 1e-9);
    }
}

#[test]
fn bound_refuses_too_many_arms() {
    let ok = vec![0.5; MAX_BOUND_ARMS];
    assert!(expected_pulls_bound(&ok, 3, 0).is_ok());
    let big = vec![0.5; MAX_BOUND_ARMS + 1];
    assert!(expected_pulls_bound(&big, 3, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_integral(
        theta in proptest::collection::vec(0.05f64..3.0, 1..=6),
        batch_raw in 1usize..=6,
        arm_raw in 0usize..6,
    ) {
        let n = theta.len();
        let batch = batch_raw.min(n);
        let arm = arm_raw % n;
        let c = expected_pulls_bound(&theta, batch, arm).unwrap();
        let q = expected_pulls_numeric(&theta, batch, arm).unwrap();
        prop_assert!((c - q).abs() < 1e-6, "closed {} numeric {}", c, q);
    }

    #[test]
    fn membership_probabilities_sum_to_batch(
        theta in proptest::collection::vec(0.05f64..3.0, 2..=6),
        batch_raw in 1usize..=6,
    ) {
        let batch = batch_raw.min(theta.len());
        let total: f64 = (0..theta.len())
            .map(|i| expected_pulls_numeric(&theta, batch, i).unwrap())
            .sum();
        prop_assert!((total - batch as f64).abs() < 1e-6, "{}", total);
    }
}

#[test]
fn egreedy_bound_reference_parameters_are_vacuous() {
    let v = egreedy_suboptimal_prob(10.0, 0.01, 10, 1e4).unwrap();
    // x^{b/(5d²)} overflows, so the raw sum is not a probability at all
    assert!(v.ratio > 1.0);
    assert!(!(v.raw >= 0.0 && v.raw < 1.0));
    assert!(v.is_vacuous());
    assert_eq!(v.clamped, 1.0);
}

#[test]
fn egreedy_bound_decreases_on_a_log_grid() {
    let mut last = f64::INFINITY;
    for k in 0..=30 {
        let t = 10f64.powf(3.0 + 0.1 * f64::from(k));
        let v = egreedy_suboptimal_prob(0.1, 1.0, 2, t).unwrap();
        assert!(v.raw > 0.0 && v.raw.is_finite());
        assert!(v.raw < last, "not decreasing at t = {t}");
        last = v.raw;
    }
}

#[test]
fn egreedy_bound_vanishes() {
    let mut last = f64::INFINITY;
    for e in 3..=9 {
        let v = egreedy_suboptimal_prob(10.0, 1.0, 2, 10f64.powi(e)).unwrap();
        assert!(v.raw < last);
        last = v.raw;
    }
    assert!(last < 1e-6, "{last}");
}

#[test]
fn lower_bound_sits_below_measured_regret() {
    let model = RewardModel::new(vec![1.0, 0.8, 0.3, 0.2, 0.1]).unwrap();
    let horizon = 10_000u32;
    let coeff = regret_lower_bound(&model, 2).unwrap();
    let runs = 10;
    let mut mean = 0.0;
    for s in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut onets = Onets::new(2, TieBreak::LowestId);
        let run = run_synthetic(&model, &mut onets, horizon, &mut rng).unwrap();
        let r = compute_regret(run.selections.iter().map(Vec::as_slice), &model, 2).unwrap();
        mean += r.total() / runs as f64;
    }
    let floor = coeff * f64::from(horizon).ln();
    assert!(
        floor <= mean,
        "lower bound {floor} above measured regret {mean}"
    );
}
