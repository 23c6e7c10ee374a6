use std::sync::Arc;

use blackgreedy::apps::reserves::{
    auction_revenue, discretize_reserves, load_valuations_csv, revenue_from_reserves, PriceGrid, ReserveInstance,
    ReserveVector, ValuationProfile,
};
use blackgreedy::*;
use rand::Rng;

const V: [f64; 3] = [0.8, 0.5, 0.2];

fn example_instance() -> ReserveInstance {
    ReserveInstance::new(3, PriceGrid::new(vec![0.0, 0.25, 0.5, 0.75]).unwrap()).unwrap()
}

#[test]
fn auction_examples() {
    assert_eq!(auction_revenue(&[0.6, 0.0, 0.0], &V), 0.6);
    assert_eq!(auction_revenue(&[0.0; 3], &V), 0.5);
    assert_eq!(auction_revenue(&[0.9, 0.0, 0.0], &V), 0.2);
    assert_eq!(auction_revenue(&[0.9, 0.9, 0.9], &V), 0.0);
    // Ties: lowest index wins and pays the tied valuation.
    assert_eq!(auction_revenue(&[0.0, 0.0], &[0.6, 0.6]), 0.6);
}

#[test]
fn revenue_from_reserves_examples() {
    assert_eq!(revenue_from_reserves(0, 0.75, &V), 0.75);
    assert_eq!(revenue_from_reserves(0, 0.25, &V), 0.0);
    for r in [0.0, 0.3, 0.5, 0.8, 1.0] {
        assert_eq!(revenue_from_reserves(1, r, &V), 0.0);
        assert_eq!(revenue_from_reserves(2, r, &V), 0.0);
    }
    // Upper end of the interval is included, lower end is not.
    assert_eq!(revenue_from_reserves(0, 0.8, &V), 0.8);
    assert_eq!(revenue_from_reserves(0, 0.5, &V), 0.0);
}

#[test]
fn revenue_identity_holds_exactly() {
    let mut rng = split_rng(1, 0);
    for trial in 0..10_000 {
        let n = rng.gen_range(1..=5);
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let r = if trial % 4 == 0 {
            // Hit interval endpoints and ties on purpose.
            v[rng.gen_range(0..n)]
        } else {
            rng.gen::<f64>()
        };
        if trial % 7 == 0 && n > 1 {
            v[1] = v[0];
        }
        let i = rng.gen_range(0..n);
        let ones = vec![r; n];
        let mut except = ones.clone();
        except[i] = 0.0;
        assert_eq!(
            revenue_from_reserves(i, r, &v),
            auction_revenue(&ones, &v) - auction_revenue(&except, &v),
            "i={i} r={r} v={v:?}"
        );
    }
}

#[test]
fn payoff_examples() {
    let inst = example_instance();
    let f = ValuationProfile::new(V.to_vec()).unwrap();
    let z = inst.initial_point();
    assert_eq!(inst.revenue_curve(0, &f), vec![0.0, 0.0, 0.0, 0.75]);
    let p = inst.payoff(0, &ActionDistribution::point_mass(4, 3), &z, &f);
    assert_eq!(p, vec![0.75, 0.75, 0.75, 0.0]);
    assert_eq!(inst.payoff(1, &ActionDistribution::new(vec![0.25; 4]).unwrap(), &z, &f), vec![0.0; 4]);
    assert_eq!(inst.payoff_diameter(), 2.0);
    assert_eq!(inst.estimator_diameter(), 8.0);
}

#[test]
fn exploration_examples() {
    let inst = ReserveInstance::new(3, PriceGrid::new(vec![0.0, 0.5]).unwrap()).unwrap();
    let theta = ActionDistribution::new(vec![0.3, 0.7]).unwrap();
    let support = inst.explore_support(0, &theta, &inst.initial_point());
    assert_eq!(support.len(), 4);
    assert!(support.iter().all(|(p, _)| *p == 0.25));
    // Branches are ordered (j=1,+), (j=1,−), (j=2,+), (j=2,−).
    let (_, plus2) = &support[2];
    assert!((plus2.w[0] - 2.8).abs() < 1e-12 && (plus2.w[1] + 1.2).abs() < 1e-12, "{:?}", plus2.w);
    assert_eq!(plus2.z.values, vec![0.5, 0.5, 0.5]);
    assert_eq!(support[3].1.z.values, vec![0.0, 0.5, 0.5]);
    let point = ActionDistribution::point_mass(2, 1);
    assert_eq!(inst.explore_support(0, &point, &inst.initial_point())[2].1.w[1], 0.0);
}

#[test]
fn exploration_is_unbiased() {
    let mut rng = split_rng(2, 0);
    for _ in 0..200 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(2..=6);
        let inst = ReserveInstance::new(n, PriceGrid::uniform(m).unwrap()).unwrap();
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        // Put some valuations on the grid.
        if rng.gen::<bool>() {
            v[0] = inst.grid().rho()[rng.gen_range(0..m)];
        }
        let theta = validate_distribution(&(0..m).map(|_| rng.gen::<f64>()).collect::<Vec<_>>()).unwrap();
        let i = rng.gen_range(0..n);
        let z = inst.initial_point();
        let mut mean = vec![0.0; m];
        for (p, s) in inst.explore_support(i, &theta, &z) {
            let val = auction_revenue(&s.z.values, &v);
            for (acc, w) in mean.iter_mut().zip(&s.w) {
                *acc += p * val * w;
            }
        }
        // Direct payoff from the definition of q.
        let y: Vec<f64> = inst.grid().rho().iter().map(|&r| revenue_from_reserves(i, r, &v)).collect();
        let ty = theta.dot(&y);
        for j in 0..m {
            assert!((mean[j] - (ty - y[j])).abs() < 1e-12, "{mean:?} vs {y:?}");
        }
    }
}

#[test]
fn output_coin_mixes_zero_and_the_built_vector() {
    let inst = example_instance();
    let built = inst.point(vec![3, 1, 2]);
    let mut rng = split_rng(3, 0);
    let n = 10_000;
    let zeros = (0..n).filter(|_| inst.finalize(&built, &mut rng).values == vec![0.0; 3]).count();
    let freq = zeros as f64 / n as f64;
    assert!((0.47..=0.53).contains(&freq), "{freq}");
    let zero = inst.initial_point();
    assert!((0..100).all(|_| inst.finalize(&zero, &mut rng) == zero));
    let f = ValuationProfile::new(V.to_vec()).unwrap();
    let expected: f64 = inst.finalize_support(&built).iter().map(|(p, z)| p * f.value(z)).sum();
    assert!((expected - (0.5 * f.value(&zero) + 0.5 * f.value(&built))).abs() < 1e-15);
}

#[test]
fn grids() {
    assert_eq!(discretize_reserves(4).unwrap().rho(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!(discretize_reserves(1).unwrap().rho(), &[0.0, 1.0]);
    assert!(discretize_reserves(0).is_err());
    assert_eq!(PriceGrid::uniform(3).unwrap().rho(), &[0.0, 0.5, 1.0]);
    assert!(PriceGrid::new(vec![0.1, 0.5]).is_err());
    assert!(PriceGrid::new(vec![0.0, 0.5, 0.5]).is_err());
    assert!(ValuationProfile::new(vec![1.2]).is_err());
}

/// `max_r Σ_t f(r, v_t)` over reserve vectors whose coordinates come from `candidates[j]`.
fn best_total(candidates: &[Vec<f64>], profiles: &[Vec<f64>]) -> f64 {
    let n = candidates.len();
    let mut idx = vec![0usize; n];
    let mut best = 0.0f64;
    loop {
        let r: Vec<f64> = (0..n).map(|j| candidates[j][idx[j]]).collect();
        best = best.max(profiles.iter().map(|v| auction_revenue(&r, v)).sum());
        let mut p = 0;
        while p < n {
            idx[p] += 1;
            if idx[p] < candidates[p].len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
        if p == n {
            return best;
        }
    }
}

#[test]
fn discretisation_loses_at_most_one_step_per_round() {
    let mut rng = split_rng(4, 0);
    for trial in 0..100 {
        let m = 1 + trial % 8;
        let t = 5;
        let profiles: Vec<Vec<f64>> = (0..t).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect();
        // Continuous optimum: each bidder's best reserve is 0 or one of its own valuations.
        let exact: Vec<Vec<f64>> =
            (0..3).map(|j| std::iter::once(0.0).chain(profiles.iter().map(|v| v[j])).collect()).collect();
        let continuous = best_total(&exact, &profiles);
        let grid = discretize_reserves(m).unwrap().rho().to_vec();
        let gridded = best_total(&vec![grid; 3], &profiles);
        assert!(gridded <= continuous + 1e-12);
        assert!((continuous - gridded) / t as f64 <= 1.0 / m as f64 + 1e-12, "m={m}");
    }
}

#[test]
fn offline_run_earns_half_the_best_fixed_reserves() {
    let mut rng = split_rng(5, 0);
    for _ in 0..50 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(2..=4);
        let inst = ReserveInstance::new(n, PriceGrid::uniform(m).unwrap()).unwrap();
        let parts: Vec<(SharedObjective<ReserveVector>, f64)> = (0..4)
            .map(|_| {
                let v = ValuationProfile::new((0..n).map(|_| rng.gen::<f64>()).collect()).unwrap();
                (Arc::new(v) as SharedObjective<ReserveVector>, 0.25)
            })
            .collect();
        let f = MeanObjective::new(parts);
        let exact = exact_chain_expectation(&inst, &f, |i, z| inst.local_optimum(i, z, &f)).unwrap();
        let opt = inst.feasible_points().unwrap().iter().map(|z| f.value(z)).fold(0.0, f64::max);
        assert!(exact.value >= 0.5 * opt - 1e-9, "{} vs {opt}", exact.value);
    }
}

#[test]
fn valuations_load_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    std::fs::write(&path, "0.8,0.5,0.2\n0.1, 0.9, 0.3\n").unwrap();
    let rows = load_valuations_csv(&path).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1].values(), &[0.1, 0.9, 0.3]);
    std::fs::write(&path, "0.8,1.5\n").unwrap();
    assert!(load_valuations_csv(&path).is_err());
}
