use blackgreedy::apps::monotone_sm::{CardinalityInstance, ElementSet};
use blackgreedy::apps::CoverageFunction;
use blackgreedy::harness::{run_experiment, ExperimentConfig};
use blackgreedy::*;

fn learner(q: Option<f64>, seed: u64) -> BanditLearner {
    let l = BanditLearner::new(2, 2.0, 8.0, 10_000, Responder::Proportional, split_rng(seed, 0));
    match q {
        Some(q) => l.with_exploration(q),
        None => l,
    }
}

#[test]
fn exploration_probability_formula() {
    let direct = 2f64.powf(-2.0 / 3.0) * 8f64.powf(2.0 / 3.0) * 2f64.ln().cbrt() / 1000f64.cbrt();
    assert!((tune_q(2.0, 8.0, 2, 1000) - direct).abs() < 1e-12);
    assert!((tune_q(2.0, 8.0, 2, 1000) - 0.2230).abs() < 1e-4);
    assert_eq!(tune_q(1.0, 1000.0, 2, 1), 1.0);
    assert_eq!(tune_q(1.0, 1000.0, 2, 10), 1.0);
    assert_eq!(tune_q(100.0, 1e-3, 2, 1000), 1e-3);
}

#[test]
fn action_is_frozen_between_explorations() {
    let mut l = learner(None, 4);
    let mut last: Option<ActionDistribution> = None;
    let mut fed = false;
    for _ in 0..2_000 {
        let (theta, explore) = l.begin_round();
        if let (Some(prev), false) = (&last, fed) {
            assert_eq!(prev, &theta);
        }
        fed = explore;
        if explore {
            l.feed(&[-0.5, 0.5]).unwrap();
        }
        last = Some(theta);
    }
    assert!(l.explored_count() > 0);
}

#[test]
fn full_exploration_explores_every_round() {
    let mut l = learner(Some(1.0), 0);
    for _ in 0..500 {
        assert!(l.begin_round().1);
        l.feed(&[0.1, -0.1]).unwrap();
    }
    assert_eq!(l.explored_count(), 500);
    let mut never = learner(Some(0.0), 0);
    assert!((0..500).all(|_| !never.begin_round().1));
}

#[test]
fn exploration_fraction_concentrates() {
    for seed in 0..20 {
        let mut l = learner(Some(0.1), seed);
        for _ in 0..10_000 {
            l.begin_round();
        }
        let frac = l.explored_count() as f64 / 10_000.0;
        assert!((0.08..=0.12).contains(&frac), "seed {seed}: {frac}");
    }
}

#[test]
fn feeding_requires_an_exploration_round() {
    let mut l = learner(Some(0.0), 0);
    assert!(matches!(l.feed(&[0.0, 0.0]), Err(Error::FeedWithoutExplore)));
    l.begin_round();
    assert!(matches!(l.feed(&[0.0, 0.0]), Err(Error::FeedWithoutExplore)));
    let mut e = learner(Some(1.0), 0);
    e.begin_round();
    e.feed(&[0.0, 0.0]).unwrap();
    assert!(matches!(e.feed(&[0.0, 0.0]), Err(Error::FeedWithoutExplore)));
}

#[test]
fn feedback_is_scaled_by_the_exploration_probability() {
    let mut l = learner(Some(0.5), 1);
    while !l.begin_round().1 {}
    l.feed(&[0.3, -0.3]).unwrap();
    let c = l.inner().cum_loss();
    assert!((c[0] + 0.6).abs() < 1e-15 && (c[1] - 0.6).abs() < 1e-15, "{c:?}");

    let mut z = learner(Some(0.5), 1);
    while !z.begin_round().1 {}
    let before = z.theta().clone();
    z.feed(&[0.0, 0.0]).unwrap();
    assert_eq!(z.inner().cum_loss(), &[0.0, 0.0]);
    assert_eq!(z.theta(), &before);
}

#[test]
fn scaled_feedback_is_unbiased_over_the_sampler_support() {
    let f = CoverageFunction::new(vec![0.3, 0.3, 0.4], vec![vec![0, 1], vec![1], vec![2], vec![0, 2]]).unwrap();
    let inst = CardinalityInstance::new(4, 2).unwrap();
    let z = ElementSet::from_elements(&[1]);
    let theta = ActionDistribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
    let p = inst.payoff(1, &theta, &z, &f);
    for q in [0.05, 0.3, 1.0] {
        // E[1{explore} · phat / q] = q · E[phat] / q.
        let mut mean = vec![0.0; 4];
        for (prob, s) in inst.explore_support(1, &theta, &z) {
            let v = f.value(&s.z);
            for (m, w) in mean.iter_mut().zip(&s.w) {
                *m += q * prob * v * w / q;
            }
        }
        for (a, b) in mean.iter().zip(&p) {
            assert!((a - b).abs() < 1e-12, "q={q}: {mean:?} vs {p:?}");
        }
    }
}

#[test]
fn doubling_restarts_on_epoch_boundaries() {
    let mut l = BanditLearner::doubling(2, 2.0, 8.0, Responder::Proportional, split_rng(0, 0));
    let mut qs = Vec::new();
    for _ in 0..5 {
        l.begin_round();
        qs.push(l.exploration_probability());
    }
    assert_eq!(l.restarts(), &[1, 2, 4]);
    let expect: Vec<f64> = [1, 2, 2, 4, 4].iter().map(|&t| tune_q(2.0, 8.0, 2, t)).collect();
    assert_eq!(qs, expect);
    let mut one = BanditLearner::doubling(2, 2.0, 8.0, Responder::Proportional, split_rng(0, 0));
    one.begin_round();
    assert_eq!(one.restarts(), &[1]);

    let mut long = BanditLearner::doubling(2, 2.0, 8.0, Responder::Proportional, split_rng(0, 0));
    for _ in 0..1000 {
        if long.begin_round().1 {
            long.feed(&[0.0, 0.0]).unwrap();
        }
    }
    assert_eq!(long.restarts(), &[1, 2, 4, 8, 16, 32, 64, 128, 256, 512]);
}

#[test]
fn doubling_wrapper_tracks_the_known_horizon_learner() {
    let cfg = |doubling: bool, seed: u64| {
        let json = format!(
            r#"{{"app":{{"name":"monotone_sm","n":6,"k":2}},"feedback":"bandit","doubling":{doubling},
                "horizon":16384,"seed":{seed},"adversary":{{"kind":"iid","seed":{seed}}}}}"#
        );
        ExperimentConfig::from_json(&json).unwrap()
    };
    let (mut known, mut wrapped, mut opt) = (0.0, 0.0, 0.0);
    for seed in 0..3 {
        let k = run_experiment(&cfg(false, seed)).unwrap().report;
        let w = run_experiment(&cfg(true, seed)).unwrap().report;
        assert_eq!(k.opt_sum, w.opt_sum);
        assert!(k.gamma_regret < 0.0 && w.gamma_regret < 0.0, "{} / {}", k.gamma_regret, w.gamma_regret);
        known += k.cum_reward;
        wrapped += w.cum_reward;
        opt += k.opt_sum;
    }
    // Restarts forget the learned state and re-explore heavily; the cost stays bounded.
    assert!((known - wrapped).abs() <= 0.1 * opt, "known {known} vs wrapped {wrapped} (OPT {opt})");
}
