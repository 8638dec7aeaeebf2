//! Zero-rate regions against the oracle and their structural properties.

mod common;

use common::{pair_from, rng, xyz};
use dht_core::divmin::{oracle_min_divergence, MarginalConstraint};
use dht_core::zero_rate::{
    cooperation_benefit_zero_rate, default_threshold_grid, e1, e2, one_bit_point, region_coherent,
    region_concurrent_equal_marginals, region_concurrent_w1_eq2, region_concurrent_w1_ge3, region_no_cooperation,
    Mapping, NoCoopMode, TypeCosts,
};
use dht_core::{models, Axis, Error, ExponentPair, HypothesisPair, JointPmf};
use proptest::prelude::*;

const X: Axis = Axis::X;
const Y1: Axis = Axis::Y1;
const Y2: Axis = Axis::Y2;

fn oracle(target: &JointPmf<f64>, cons: &[MarginalConstraint<f64>]) -> f64 {
    oracle_min_divergence(target, cons, 3, 6_000).unwrap().value
}

fn c(law: &JointPmf<f64>, axes: &[Axis]) -> MarginalConstraint<f64> {
    MarginalConstraint::from_law(law, axes).unwrap()
}

fn corner(r: dht_core::Region) -> ExponentPair<f64> {
    assert!(r.is_rectangle);
    assert_eq!(r.points.len(), 1);
    r.corner().unwrap()
}

#[test]
fn coherent_corner_against_independence_matches_oracle() {
    let mut r = rng(2);
    let p = models::random_pmf::<f64, _>(&mut r, &xyz([3, 2, 2]));
    let pair = HypothesisPair::new(p.clone(), p.product_of_marginals().unwrap()).unwrap();
    let got = corner(region_coherent(&pair).unwrap());
    let t1 = oracle(&pair.p_bar().marginal(&[X, Y1]).unwrap(), &[c(&p, &[X]), c(&p, &[Y1])]);
    let t2 = oracle(pair.p_bar(), &[c(&p, &[X]), c(&p, &[Y1]), c(&p, &[Y2])]);
    assert!((got.theta1 - t1).abs() < 1e-5, "{} vs {t1}", got.theta1);
    assert!((got.theta2 - t2).abs() < 1e-5, "{} vs {t2}", got.theta2);
}

#[test]
fn example6_rectangles_match_oracle() {
    let pair = models::example6::<f64>();
    let (p, q) = (pair.p(), pair.p_bar());
    let coh = corner(region_coherent(&pair).unwrap());
    let ge3 = corner(region_concurrent_w1_ge3(&pair).unwrap());
    let t2 = oracle(q, &[c(p, &[X]), c(p, &[Y1]), c(p, &[Y2])]);
    assert!((coh.theta2 - t2).abs() < 1e-5);
    assert!((ge3.theta2 - t2).abs() < 1e-5);
    let t1 = oracle(&p.marginal(&[X, Y1]).unwrap(), &[c(q, &[X]), c(q, &[Y1])]);
    assert!((ge3.theta1 - t1).abs() < 1e-5, "{} vs {t1}", ge3.theta1);
    let coop = cooperation_benefit_zero_rate(&pair).unwrap();
    let nc = oracle(&q.marginal(&[X, Y2]).unwrap(), &[c(p, &[X]), c(p, &[Y2])]);
    assert!(coop > 0.0);
    assert!((coop - (t2 - nc)).abs() < 1e-5);
}

#[test]
fn equal_marginal_concurrent_corner_matches_oracle() {
    // P and P̄ share P_X and differ in the (Y1, Y2) conditionals.
    let mut r = rng(8);
    let px = [0.3, 0.7];
    let mut build = || -> Vec<f64> {
        let mut t = Vec::new();
        for &m in &px {
            t.extend(common::random_weights(&mut r, 4).into_iter().map(|v| v * m));
        }
        t
    };
    let (a, b) = (build(), build());
    let pair = pair_from([2, 2, 2], &a, &b);
    let got = corner(region_concurrent_equal_marginals(&pair).unwrap());
    let (p, q) = (pair.p(), pair.p_bar());
    let t1 = oracle(&p.marginal(&[X, Y1]).unwrap(), &[c(p, &[X]), c(q, &[Y1])]);
    let t2 = oracle(q, &[c(p, &[X]), c(p, &[Y1]), c(p, &[Y2])]);
    assert!((got.theta1 - t1).abs() < 1e-5);
    assert!((got.theta2 - t2).abs() < 1e-5);
}

#[test]
fn swapping_hypotheses_changes_the_detector1_value() {
    let mut r = rng(4);
    let pair: HypothesisPair<f64> = models::random_pair(&mut r, [2, 2, 2]);
    let a = corner(region_coherent(&pair).unwrap()).theta1;
    let b = corner(region_coherent(&pair.swapped()).unwrap()).theta1;
    assert!((a - b).abs() > 1e-6);
}

#[test]
fn relabeled_x_gives_positive_theta1() {
    let mut r = rng(6);
    let p = models::random_pmf::<f64, _>(&mut r, &xyz([2, 2, 2]));
    let mut q = p.probs().to_vec();
    q.rotate_left(4);
    let pair = HypothesisPair::new(p.clone(), JointPmf::new(&xyz([2, 2, 2]), q).unwrap()).unwrap();
    if pair.x_marginal_gap() > 1e-6 {
        assert!(corner(region_concurrent_w1_ge3(&pair).unwrap()).theta1 > 1e-6);
    }
}

#[test]
fn dummy_y2_reduces_to_the_two_variable_program() {
    let mut r = rng(10);
    let p = models::random_pmf::<f64, _>(&mut r, &xyz([2, 2, 1]));
    let q = models::random_pmf::<f64, _>(&mut r, &xyz([2, 2, 1]));
    let pair = HypothesisPair::new(p.clone(), q.clone()).unwrap();
    let t2 = corner(region_concurrent_w1_ge3(&pair).unwrap()).theta2;
    let two = oracle(&q.marginal(&[X, Y1]).unwrap(), &[c(&p, &[X]), c(&p, &[Y1])]);
    assert!((t2 - two).abs() < 1e-5);
}

#[test]
fn y1_independent_and_shared_gives_no_benefit() {
    // Y1 ⫫ (X, Y2) under both laws with the same P_Y1.
    let mut r = rng(12);
    let py1 = common::random_weights(&mut r, 2);
    let mut law = || {
        let xy2 = common::random_weights(&mut r, 4);
        let mut t = vec![0.0; 8];
        for x in 0..2 {
            for y1 in 0..2 {
                for y2 in 0..2 {
                    t[(x * 2 + y1) * 2 + y2] = xy2[x * 2 + y2] * py1[y1];
                }
            }
        }
        t
    };
    let (a, b) = (law(), law());
    let pair = pair_from([2, 2, 2], &a, &b);
    let coop = corner(region_coherent(&pair).unwrap()).theta2;
    let nc = corner(region_no_cooperation(&pair, NoCoopMode::Coherent).unwrap()).theta2;
    assert!((coop - nc).abs() < 1e-8);
}

#[test]
fn one_bit_mode_errors() {
    let pair = models::example1::<f64>();
    assert!(matches!(region_concurrent_w1_eq2(&pair, 0.02, &[0.0]), Err(Error::WrongMode(_))));
    let ex6 = models::example6::<f64>();
    assert!(matches!(region_concurrent_w1_eq2(&ex6, 0.2, &[0.0]), Err(Error::Input(_))));
    assert!(matches!(region_concurrent_w1_eq2(&ex6, 0.01, &[]), Err(Error::Input(_))));
    assert!(matches!(region_concurrent_equal_marginals(&ex6), Err(Error::WrongMode(_))));
}

#[test]
fn example6_sweep_matches_oracle_at_sample_thresholds() {
    let pair = models::example6::<f64>();
    let grid: Vec<f64> = (0..=200).map(|i| -2.0 + 0.02 * i as f64).collect();
    let sweep = region_concurrent_w1_eq2(&pair, 0.01, &grid).unwrap();
    for ex in sweep.region.points.iter() {
        assert!(corner(region_concurrent_w1_ge3(&pair).unwrap()).covers(ex, 1e-12));
    }
    // each sweep coordinate is one e1 or e2 value; recheck five by the oracle
    let costs = TypeCosts::on_grid(&pair, 0.01).unwrap();
    let (p, q) = (pair.p(), pair.p_bar());
    // the gradient oracle cannot reach the structural zeros of vertex types
    let interior: Vec<_> = costs.grid.iter().filter(|g| g.0.iter().all(|&v| v >= 0.05)).collect();
    for (pi, a, b) in interior.into_iter().step_by(18).take(5) {
        let xl = JointPmf::new(&[(X, 2)], pi.clone()).unwrap();
        let o1 = oracle(&p.marginal(&[X, Y1]).unwrap(), &[MarginalConstraint::new(xl.clone()), c(q, &[Y1])]);
        let o2 = oracle(q, &[MarginalConstraint::new(xl), c(p, &[Y1]), c(p, &[Y2])]);
        assert!((a - o1).abs() < 1e-5, "{pi:?}: {a} vs {o1}");
        assert!((b - o2).abs() < 1e-5, "{b} vs {o2}");
    }
}

#[test]
fn halving_the_grid_moves_frontier_points_little() {
    let pair = models::example6::<f64>();
    for r in [-0.02, -0.01, 0.0, 0.005, 0.01, 0.02] {
        let a = one_bit_point(&pair, Mapping::Different, r, 0.01).unwrap();
        let b = one_bit_point(&pair, Mapping::Different, r, 0.005).unwrap();
        assert!((a.theta1 - b.theta1).abs() < 5e-3 && (a.theta2 - b.theta2).abs() < 5e-3, "r = {r}: {a:?} vs {b:?}");
    }
}

#[test]
fn large_threshold_puts_every_type_in_gamma_b1() {
    let pair = models::example6::<f64>();
    let costs = TypeCosts::on_grid(&pair, 0.01).unwrap();
    let min_e1 = costs.grid.iter().map(|g| g.1).fold(costs.at_px_bar.0, f64::min);
    let (t1, t2) = costs.different(1e3);
    assert_eq!(t1, min_e1);
    assert_eq!(t2, costs.at_px.1);
    let grid = default_threshold_grid(&pair, 0.01).unwrap();
    assert!(grid.windows(2).all(|w| w[0] < w[1]));
}

fn sizes() -> impl Strategy<Value = [usize; 3]> {
    (2usize..=3, 2usize..=3, 2usize..=3).prop_map(|(a, b, c)| [a, b, c])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn markov_via_y2_means_no_benefit(seed in any::<u64>(), s in sizes()) {
        let pair: HypothesisPair<f64> = models::markov_via_y2(&mut rng(seed), s).unwrap();
        let coop = corner(region_coherent(&pair).unwrap());
        let nc = corner(region_no_cooperation(&pair, NoCoopMode::Coherent).unwrap());
        prop_assert!((coop.theta1 - nc.theta1).abs() < 1e-7);
        prop_assert!((coop.theta2 - nc.theta2).abs() < 1e-7);
        prop_assert!(cooperation_benefit_zero_rate(&pair).unwrap() < 1e-7);
    }

    #[test]
    fn markov_via_y1_reduces_to_single_detector(seed in any::<u64>(), s in sizes()) {
        let pair: HypothesisPair<f64> = models::markov_via_y1(&mut rng(seed), s).unwrap();
        let coop = corner(region_coherent(&pair).unwrap());
        prop_assert!((coop.theta2 - coop.theta1).abs() < 1e-7, "{coop:?}");
    }

    #[test]
    fn benefit_is_difference_of_corners(seed in any::<u64>(), s in sizes()) {
        let pair: HypothesisPair<f64> = models::random_pair(&mut rng(seed), s);
        let b = cooperation_benefit_zero_rate(&pair).unwrap();
        let coop = corner(region_coherent(&pair).unwrap()).theta2;
        let nc = corner(region_no_cooperation(&pair, NoCoopMode::Coherent).unwrap()).theta2;
        prop_assert!(b >= 0.0);
        prop_assert!((b - (coop - nc)).abs() < 1e-9);
    }

    #[test]
    fn partition_costs_respect_typical_atoms(seed in any::<u64>()) {
        let pair: HypothesisPair<f64> = models::random_pair(&mut rng(seed), [2, 2, 2]);
        prop_assume!(pair.x_marginal_gap() > 1e-3);
        let px = pair.px().probs().to_vec();
        let pxb = pair.px_bar().probs().to_vec();
        prop_assert!(e1(&pair, &pxb).unwrap() >= 0.0);
        prop_assert!(e2(&pair, &px).unwrap() >= 0.0);
        let sweep = region_concurrent_w1_eq2(&pair, 0.05, &default_threshold_grid(&pair, 0.05).unwrap()).unwrap();
        let outer = corner(region_concurrent_w1_ge3(&pair).unwrap());
        for pt in &sweep.region.points {
            prop_assert!(outer.covers(pt, 1e-12));
        }
    }
}
