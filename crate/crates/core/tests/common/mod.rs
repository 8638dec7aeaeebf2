//! Shared fixtures and independent reference computations for integration tests.
#![allow(dead_code)]

use dht_core::{Axis, HypothesisPair, JointPmf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn xyz(sizes: [usize; 3]) -> Vec<(Axis, usize)> {
    vec![(Axis::X, sizes[0]), (Axis::Y1, sizes[1]), (Axis::Y2, sizes[2])]
}

pub fn pair_from(sizes: [usize; 3], p: &[f64], q: &[f64]) -> HypothesisPair<f64> {
    HypothesisPair::from_tables(sizes, p.to_vec(), q.to_vec()).expect("valid tables")
}

/// Full-support binary pair used for the convergence criterion; the
/// marginals are multiples of 1/8.
pub fn binary_convergence_pair() -> HypothesisPair<f64> {
    pair_from([2, 2, 2], &[0.2, 0.05, 0.1, 0.15, 0.05, 0.2, 0.15, 0.1], &[0.05, 0.1, 0.15, 0.1, 0.2, 0.1, 0.15, 0.15])
}

/// Binary pair with the conditional structure of the bundled concurrent
/// example but X-marginals (0.7, 0.3) and (0.35, 0.65), so μ = 0.1 keeps the
/// typical sets apart.
pub fn wide_gap_pair() -> HypothesisPair<f64> {
    let base = dht_core::models::example6::<f64>();
    let reweight = |law: &JointPmf<f64>, px: [f64; 2]| -> Vec<f64> {
        let m = law.marginal(&[Axis::X]).unwrap();
        law.probs().iter().enumerate().map(|(i, &v)| v * px[i / 4] / m.probs()[i / 4]).collect()
    };
    pair_from([2, 2, 2], &reweight(base.p(), [0.7, 0.3]), &reweight(base.p_bar(), [0.35, 0.65]))
}

pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Mutual information by direct summation over a row-major table with the
/// given sizes; `a` and `b` list coordinate positions.
pub fn brute_mi(table: &[f64], sizes: &[usize], a: &[usize], b: &[usize]) -> f64 {
    let idx = |mut flat: usize| -> Vec<usize> {
        let mut v = vec![0; sizes.len()];
        for k in (0..sizes.len()).rev() {
            v[k] = flat % sizes[k];
            flat /= sizes[k];
        }
        v
    };
    let key = |v: &[usize], axes: &[usize]| -> Vec<usize> { axes.iter().map(|&k| v[k]).collect() };
    use std::collections::HashMap;
    let mut pa: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut pb: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut pab: HashMap<(Vec<usize>, Vec<usize>), f64> = HashMap::new();
    for (i, &p) in table.iter().enumerate() {
        let v = idx(i);
        *pa.entry(key(&v, a)).or_default() += p;
        *pb.entry(key(&v, b)).or_default() += p;
        *pab.entry((key(&v, a), key(&v, b))).or_default() += p;
    }
    pab.iter().filter(|(_, &p)| p > 0.0).map(|((ka, kb), &p)| p * (p / (pa[ka] * pb[kb])).ln()).sum()
}

/// Information-bottleneck fixed point for the accumulated objective
/// I(U;Y1) + I(U;Y2) − I(U;X)/β: alternates
/// p(u|x) ∝ p(u)·exp(−β Σ_k D(p(y_k|x) ‖ p(y_k|u))).
/// `wy[k][x]` is the row p(y_k|x). Returns (I(U;X), I(U;Y1) + I(U;Y2)).
pub fn ib_point<R: Rng>(
    px: &[f64],
    wy: &[Vec<Vec<f64>>],
    nu: usize,
    beta: f64,
    iters: usize,
    rng: &mut R,
) -> (f64, f64) {
    let nx = px.len();
    let mut q: Vec<Vec<f64>> = (0..nx).map(|_| random_weights(rng, nu)).collect();
    let pu_of = |q: &Vec<Vec<f64>>| -> Vec<f64> { (0..nu).map(|u| (0..nx).map(|x| px[x] * q[x][u]).sum()).collect() };
    let pyu_of = |q: &Vec<Vec<f64>>, pu: &[f64], w: &Vec<Vec<f64>>, u: usize| -> Vec<f64> {
        (0..w[0].len()).map(|y| (0..nx).map(|x| px[x] * q[x][u] * w[x][y]).sum::<f64>() / pu[u]).collect()
    };
    for _ in 0..iters {
        let pu = pu_of(&q);
        let cond: Vec<Vec<Vec<f64>>> = wy
            .iter()
            .map(|w| (0..nu).map(|u| if pu[u] > 1e-300 { pyu_of(&q, &pu, w, u) } else { vec![] }).collect())
            .collect();
        for x in 0..nx {
            let logs: Vec<f64> = (0..nu)
                .map(|u| {
                    if pu[u] <= 1e-300 {
                        return f64::NEG_INFINITY;
                    }
                    let d: f64 = wy
                        .iter()
                        .zip(&cond)
                        .map(|(w, c)| {
                            w[x].iter()
                                .zip(&c[u])
                                .filter(|(&a, _)| a > 0.0)
                                .map(|(&a, &b)| a * (a / b).ln())
                                .sum::<f64>()
                        })
                        .sum();
                    pu[u].ln() - beta * d
                })
                .collect();
            let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let s: f64 = logs.iter().map(|l| (l - m).exp()).sum();
            for u in 0..nu {
                q[x][u] = (logs[u] - m).exp() / s;
            }
        }
    }
    let pu = pu_of(&q);
    let mut iux = 0.0;
    for x in 0..nx {
        for u in 0..nu {
            let v = px[x] * q[x][u];
            if v > 0.0 {
                iux += v * (q[x][u] / pu[u]).ln();
            }
        }
    }
    let mut acc = 0.0;
    for w in wy {
        let ny = w[0].len();
        let py: Vec<f64> = (0..ny).map(|y| (0..nx).map(|x| px[x] * w[x][y]).sum()).collect();
        for u in 0..nu {
            for y in 0..ny {
                let puy: f64 = (0..nx).map(|x| px[x] * q[x][u] * w[x][y]).sum();
                if puy > 0.0 {
                    acc += puy * (puy / (pu[u] * py[y])).ln();
                }
            }
        }
    }
    (iux, acc)
}

/// Upper concave envelope of `pts` (rate, value) evaluated at `r`; the
/// origin is always included.
pub fn concave_envelope_at(pts: &[(f64, f64)], r: f64) -> f64 {
    let mut all = pts.to_vec();
    all.push((0.0, 0.0));
    let mut best = f64::NEG_INFINITY;
    for &(ra, va) in &all {
        if ra <= r + 1e-12 {
            best = best.max(va);
        }
        for &(rb, vb) in &all {
            if ra <= r && rb > r {
                let t = (r - ra) / (rb - ra);
                best = best.max(va + t * (vb - va));
            }
        }
    }
    best
}

/// Oracle value of max over P_{U|X} with I(U;X) ≤ r1 of I(U;Y1) + I(U;Y2),
/// from an information-bottleneck sweep over β with random restarts at
/// |U| ∈ {|X|+1, |X|+2}.
pub fn accumulated_information_oracle(pair: &HypothesisPair<f64>, r1: f64, seed: u64) -> f64 {
    let nx = pair.sizes()[0];
    let px = pair.px().probs().to_vec();
    let rows = |a: Axis| -> Vec<Vec<f64>> {
        let c = pair.p().conditional(a, &[Axis::X]).unwrap();
        (0..nx).map(|x| c.row(x).to_vec()).collect()
    };
    let wy = vec![rows(Axis::Y1), rows(Axis::Y2)];
    let mut r = rng(seed);
    let mut pts = Vec::new();
    let mut beta = 0.5;
    while beta < 200.0 {
        let mut best = (0.0, f64::NEG_INFINITY);
        for k in 0..24 {
            let (ri, vi) = ib_point(&px, &wy, nx + 1 + k % 2, beta, 1500, &mut r);
            if vi - ri / beta > best.1 - best.0 / beta {
                best = (ri, vi);
            }
        }
        pts.push(best);
        beta *= 1.04;
    }
    concave_envelope_at(&pts, r1)
}

/// (α1, β1, α2, β2) of a single-letter coherent scheme, by summing the
/// 8 cells: the sensor bit is x-typicality, Detector 1 accepts on the bit and
/// y1-typicality, Detector 2 additionally on y2-typicality. `typ` lists
/// per-coordinate typical symbol sets.
pub fn single_letter_coherent(pair: &HypothesisPair<f64>, typ: [&[usize]; 3]) -> [f64; 4] {
    let [nx, ny1, ny2] = pair.sizes();
    let mut acc1 = [0.0; 2];
    let mut acc2 = [0.0; 2];
    for (h, law) in [pair.p(), pair.p_bar()].into_iter().enumerate() {
        for x in 0..nx {
            for y1 in 0..ny1 {
                for y2 in 0..ny2 {
                    let p = law.probs()[(x * ny1 + y1) * ny2 + y2];
                    let d1 = typ[0].contains(&x) && typ[1].contains(&y1);
                    let d2 = d1 && typ[2].contains(&y2);
                    if d1 {
                        acc1[h] += p;
                    }
                    if d2 {
                        acc2[h] += p;
                    }
                }
            }
        }
    }
    [1.0 - acc1[0], acc1[1], 1.0 - acc2[0], acc2[1]]
}

pub const AXIS_SETS: [&[Axis]; 6] =
    [&[Axis::X], &[Axis::Y1], &[Axis::Y2], &[Axis::X, Axis::Y1], &[Axis::X, Axis::Y2], &[Axis::Y1, Axis::Y2]];

/// Random full-support target on an alphabet up to 3×2×2 with 1–3 marginal
/// constraints taken from a second random law (hence feasible).
pub fn random_projection_instance<R: Rng>(rng: &mut R) -> (JointPmf<f64>, Vec<dht_core::Constraint>) {
    let sizes = [rng.random_range(2..=3), 2, 2];
    let n = sizes.iter().product();
    let target = JointPmf::new(&xyz(sizes), random_weights(rng, n)).unwrap();
    let law = JointPmf::new(&xyz(sizes), random_weights(rng, n)).unwrap();
    let k = rng.random_range(1..=3);
    let mut picks: Vec<usize> = (0..AXIS_SETS.len()).collect();
    for i in 0..k {
        let j = rng.random_range(i..picks.len());
        picks.swap(i, j);
    }
    let cons = picks[..k].iter().map(|&i| dht_core::Constraint::from_law(&law, AXIS_SETS[i]).unwrap()).collect();
    (target, cons)
}
