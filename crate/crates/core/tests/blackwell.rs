use blackgreedy::apps::nsm::{nsm_payoff, LatticeInstance, LatticePoint, TableLattice};
use blackgreedy::blackwell::responder::saddle_value;
use blackgreedy::blackwell::*;
use blackgreedy::framework::{payoff_nonneg_slack, pure_payoff};
use blackgreedy::*;
use proptest::prelude::*;
use rand::Rng;

/// Minimises `obj` over `{w ≤ 0, ‖w‖₂ ≤ 1}` by refined grids over `[−1, 0]^d`; grid points
/// outside the ball are pulled radially onto it so the boundary is always sampled.
fn zoom_grid_min(d: usize, obj: &dyn Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut center = vec![-0.5; d];
    let mut h = 0.025;
    let k = 20i64;
    while h > 1e-11 {
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut idx = vec![-k; d];
        loop {
            let mut w: Vec<f64> = (0..d).map(|j| (center[j] + idx[j] as f64 * h).clamp(-1.0, 0.0)).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1.0 {
                w.iter_mut().for_each(|x| *x /= norm);
            }
            let v = obj(&w);
            if best.as_ref().map_or(true, |(b, _)| v < *b) {
                best = Some((v, w));
            }
            let mut p = 0;
            while p < d {
                idx[p] += 1;
                if idx[p] <= k {
                    break;
                }
                idx[p] = -k;
                p += 1;
            }
            if p == d {
                break;
            }
        }
        center = best.expect("grid is nonempty").1;
        h /= 2.0;
    }
    center
}

/// Euclidean projection onto orthant ∩ ball by Dykstra's alternating projections.
fn dykstra(x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let (mut y, mut p, mut q) = (x.to_vec(), vec![0.0; d], vec![0.0; d]);
    for _ in 0..20_000 {
        let a: Vec<f64> = (0..d).map(|j| (y[j] + p[j]).min(0.0)).collect();
        p = (0..d).map(|j| y[j] + p[j] - a[j]).collect();
        let b: Vec<f64> = (0..d).map(|j| a[j] + q[j]).collect();
        let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        let next: Vec<f64> = b.iter().map(|v| v / norm).collect();
        q = (0..d).map(|j| b[j] - next[j]).collect();
        y = next;
    }
    y
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn projection_examples() {
    assert_eq!(project_k(&[0.5, -2.0]), vec![0.0, -1.0]);
    assert_eq!(project_k(&[-0.3, -0.4]), vec![-0.3, -0.4]);
    assert_eq!(project_k(&[1.0, 1.0]), vec![0.0, 0.0]);
}

#[test]
fn projection_matches_grid_oracle() {
    let mut rng = split_rng(17, 0);
    for trial in 0..200 {
        let d = 1 + trial % 6;
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let oracle = dykstra(&x);
        let p = project_k(&x);
        assert!(linf(&p, &oracle) < 1e-6, "x={x:?}: {p:?} vs {oracle:?}");
    }
}

#[test]
fn ftrl_examples() {
    let zero = ftrl_argmin(&[0.0, 0.0, 0.0], 0.5, 1.7, None);
    assert_eq!(zero.w, vec![0.0; 3]);
    let s = ftrl_argmin(&[1.0, 1.0], 1.0, 2.0, None);
    let r = 1.0 / 2f64.sqrt();
    assert!(linf(&s.w, &[-r, -r]) < 1e-12);
    let s = ftrl_argmin(&[-1.0, 1.0], 1.0, 2.0, None);
    assert!(linf(&s.w, &[0.0, -1.0]) < 1e-12);
}

#[test]
fn ftrl_matches_grid_oracle_for_lq_regularisers() {
    let mut rng = split_rng(23, 0);
    for trial in 0..60 {
        let d = 2 + trial % 2;
        let q = [2.0, 1.8, 1.5, 1.3][trial % 4];
        let eta = rng.gen_range(0.05..2.0);
        let loss: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.5..3.0)).collect();
        let obj = |w: &[f64]| {
            let lin: f64 = loss.iter().zip(w).map(|(l, x)| l * x).sum();
            let qn = w.iter().map(|x| x.abs().powf(q)).sum::<f64>().powf(1.0 / q);
            lin + 0.5 * qn * qn / eta
        };
        let oracle = zoom_grid_min(d, &obj);
        let s = ftrl_argmin(&loss, eta, q, None);
        assert!(s.converged);
        assert!(obj(&s.w) <= obj(&oracle) + 1e-9, "objective {} vs oracle {}", obj(&s.w), obj(&oracle));
        assert!(linf(&s.w, &oracle) < 1e-4, "q={q} L={loss:?}: {:?} vs {oracle:?}", s.w);
    }
}

#[test]
fn regulariser_exponent_and_rate() {
    for d in [1usize, 2, 7, 8, 100, 1_000_000] {
        let q = q_exponent(d);
        assert!(q > 1.0 && q <= 2.0, "d={d}: q={q}");
    }
    assert_eq!(q_exponent(7), 2.0);
    let l = 100f64.ln();
    assert!((q_exponent(100) - l / (l - 1.0)).abs() < 1e-15);
    let eta = learning_rate(8, 2.0, 400);
    let expect = (2.0 / (3.0 * 8f64.ln())).sqrt() / (2.0 * 20.0);
    assert!((eta - expect).abs() < 1e-15);
}

#[test]
fn proportional_response_examples() {
    let t = proportional_response(&[-0.2, -0.8]);
    assert!(linf(t.probs(), &[0.2, 0.8]) < 1e-15);
    assert_eq!(proportional_response(&[0.0, 0.0]).probs(), &[0.5, 0.5]);
    let p = pure_payoff(&t, &[0.9, 0.1]);
    let inner: f64 = [-0.2, -0.8].iter().zip(&p).map(|(a, b)| a * b).sum();
    assert!(inner.abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn proportional_response_zeroes_the_inner_product(
        seed in any::<u64>(),
        d in prop::sample::select(vec![2usize, 8, 32]),
    ) {
        let mut rng = split_rng(seed, 0);
        let raw: Vec<f64> = (0..d).map(|_| -rng.gen::<f64>()).collect();
        let w = project_k(&raw);
        let y: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        let p = pure_payoff(&proportional_response(&w), &y);
        let inner: f64 = w.iter().zip(&p).map(|(a, b)| a * b).sum();
        prop_assert!(inner.abs() <= 1e-12, "{inner}");
    }
}

/// `Σ_j u_j (−Payoff_j(θ))` maximised over the vertices of
/// `A_2 = {(α_1, β_0) ∈ [−1,1]²: α_1 + β_0 ≥ 0}`, evaluated with the lattice payoff formula.
fn worst_case_m2(u: &[f64], theta: &ActionDistribution) -> f64 {
    [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0)]
        .iter()
        .map(|&(a1, b0)| {
            let p = nsm_payoff(theta, &[0.0, a1], &[b0, 0.0]);
            -(u[0] * p[0] + u[1] * p[1])
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn saddle_single_action() {
    let r = saddle_response(&[-0.4]).unwrap();
    assert_eq!(r.theta.probs(), &[1.0]);
    assert_eq!(r.value, 0.0);
}

#[test]
fn saddle_for_weight_on_the_top_value() {
    // With u = (0, 1) the point mass on the top value is not a response (worst case ½);
    // the unique response is θ = (¼, ¾) with worst case 0.
    let u = [0.0, 1.0];
    assert!((worst_case_m2(&u, &ActionDistribution::point_mass(2, 1)) - 0.5).abs() < 1e-12);
    let r = saddle_response(&[0.0, -0.7]).unwrap();
    assert!(linf(r.theta.probs(), &[0.25, 0.75]) < 1e-9, "{:?}", r.theta);
    assert!(worst_case_m2(&u, &r.theta) <= 1e-9);
    for k in 0..=100 {
        let t = k as f64 / 100.0;
        let theta = ActionDistribution::new(vec![1.0 - t, t]).unwrap();
        if (t - 0.75).abs() > 1e-9 {
            assert!(worst_case_m2(&u, &theta) > 0.0);
        }
    }
}

#[test]
fn saddle_matches_grid_search_for_equal_weights() {
    let u = [0.5, 0.5];
    let r = saddle_response(&[-0.3, -0.3]).unwrap();
    let grid_best = (0..=100)
        .map(|k| {
            let t = k as f64 / 100.0;
            worst_case_m2(&u, &ActionDistribution::new(vec![1.0 - t, t]).unwrap())
        })
        .fold(f64::INFINITY, f64::min);
    let achieved = worst_case_m2(&u, &r.theta);
    assert!(achieved <= grid_best + 1e-9, "{achieved} vs grid {grid_best}");
    assert!(achieved <= SADDLE_TOL);
    assert!((saddle_value(&u, &r.theta).unwrap() - achieved).abs() < 1e-9);
}

#[test]
fn saddle_responses_hold_against_submodular_marginals() {
    let mut rng = split_rng(31, 0);
    for trial in 0..60 {
        let m = 2 + trial % 5;
        let w: Vec<f64> = (0..m).map(|_| if rng.gen::<f64>() < 0.3 { 0.0 } else { -rng.gen::<f64>() }).collect();
        if w.iter().all(|&x| x == 0.0) {
            continue;
        }
        let r = saddle_response(&w).unwrap();
        assert!(r.value <= SADDLE_TOL);
        let mass: f64 = w.iter().sum();
        let u: Vec<f64> = w.iter().map(|x| x / mass).collect();
        // Marginals of random lattice-submodular functions lie in A_m.
        for _ in 0..10 {
            let f = TableLattice::random_quadratic(2, m, &mut rng).unwrap();
            let inst = LatticeInstance::new(2, m).unwrap();
            let z = LatticePoint { idx: vec![rng.gen_range(0..m), 0] };
            let (alpha, beta) = inst.marginals(1, &z, &f);
            let p = nsm_payoff(&r.theta, &alpha, &beta);
            let loss: f64 = u.iter().zip(&p).map(|(a, b)| -a * b).sum();
            assert!(loss <= 1e-6, "m={m}: {loss}");
        }
    }
}

#[test]
fn first_action_is_uniform_then_moves_to_the_shortfall() {
    let mut l = BlackwellLearner::new(2, 2.0, Some(100), Responder::Proportional);
    assert_eq!(algb_step(&mut l, None).unwrap().probs(), &[0.5, 0.5]);
    let theta = algb_step(&mut l, Some(&[-1.0, 1.0])).unwrap();
    assert_eq!(theta.probs(), &[1.0, 0.0]);
    assert!(l.w()[0] < 0.0 && l.w()[1] == 0.0);
    assert_eq!(l.cum_loss(), &[1.0, -1.0]);
}

#[test]
fn fixed_adversary_is_approached() {
    let t = 10_000;
    let mut l = BlackwellLearner::new(2, 2.0, Some(t), Responder::Proportional);
    let y = [0.9, 0.1];
    let mut sum = [0.0; 2];
    for _ in 0..t {
        let p = pure_payoff(l.theta(), &y);
        sum[0] += p[0];
        sum[1] += p[1];
        l.observe(&p).unwrap();
    }
    let dist = payoff_nonneg_slack(&[sum[0] / t as f64, sum[1] / t as f64]);
    assert!(dist <= 3.0 * 2.0 * (2f64.ln() / t as f64).sqrt(), "{dist}");
}

#[test]
fn learner_rejects_wrong_dimension() {
    let mut l = BlackwellLearner::new(3, 2.0, None, Responder::Proportional);
    assert!(matches!(l.observe(&[0.0, 1.0]), Err(Error::DimensionMismatch { expected: 3, got: 2 })));
}

#[test]
fn hedge_examples() {
    let mut h = HedgeLearner::new(3, 50);
    for _ in 0..50 {
        assert!(linf(hedge_step(&mut h, &[0.4, 0.4, 0.4]).probs(), &[1.0 / 3.0; 3]) < 1e-12);
    }
    let mut h = HedgeLearner::new(2, 100);
    let mut theta = h.theta().clone();
    for _ in 0..100 {
        theta = hedge_step(&mut h, &[1.0, 0.0]);
    }
    let eta = (8.0 * 2f64.ln() / 100.0).sqrt();
    let closed = (eta * 100.0).exp() / ((eta * 100.0).exp() + 1.0);
    assert!(theta.probs()[0] > 0.99);
    assert!((theta.probs()[0] - closed).abs() < 1e-12);
}

#[test]
fn hedge_regret_bound_on_random_streams() {
    let mut rng = split_rng(8, 0);
    for m in [2usize, 5, 10] {
        let t = 2_000;
        let mut h = HedgeLearner::new(m, t);
        let mut gained = 0.0;
        let mut arms = vec![0.0; m];
        let bias: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() * 0.5).collect();
        for _ in 0..t {
            let r: Vec<f64> = bias.iter().map(|b| (b + rng.gen::<f64>() * 0.5).min(1.0)).collect();
            gained += h.theta().dot(&r);
            for (a, x) in arms.iter_mut().zip(&r) {
                *a += x;
            }
            hedge_step(&mut h, &r);
        }
        let best = arms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let bound = (t as f64 * (m as f64).ln() / 2.0).sqrt() + 1.0;
        assert!(best - gained <= bound, "m={m}: regret {} > {bound}", best - gained);
    }
}

#[test]
fn hedge_and_blackwell_regret_curves_agree_on_pure_form_streams() {
    use blackgreedy::harness::{run_experiment, ExperimentConfig};
    for seed in 0..3 {
        let json = |learner: &str| {
            format!(
                r#"{{"app":{{"name":"monotone_sm","n":6,"k":2}},"learner":"{learner}","horizon":4000,
                    "seed":{seed},"adversary":{{"kind":"iid","seed":{seed}}}}}"#
            )
        };
        let bw = run_experiment(&ExperimentConfig::from_json(&json("blackwell")).unwrap()).unwrap();
        let hg = run_experiment(&ExperimentConfig::from_json(&json("hedge")).unwrap()).unwrap();
        for t in [499usize, 999, 1999, 3999] {
            let (a, b) = (bw.rows[t].cum_gamma_regret, hg.rows[t].cum_gamma_regret);
            assert!(a.signum() == b.signum(), "t={t}: {a} vs {b}");
            let r = a.abs().max(1.0) / b.abs().max(1.0);
            assert!((0.5..=2.0).contains(&r), "t={t}: blackwell {a} vs hedge {b}");
        }
    }
}
