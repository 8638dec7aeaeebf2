//! Reference hypothesis pairs and random instance generators.

use crate::error::Result;
use crate::prob::{Axis, HypothesisPair, JointPmf};
use crate::scalar::Real;
use rand::Rng;

/// Ternary testing-against-independence instance. Under H = 1 the three
/// coordinates are independent with the H = 0 marginals.
pub const EXAMPLE1_P: [f64; 12] = [
    0.0250, 0.0250, 0.15, 0.2250, // x = 0
    0.0250, 0.2000, 0.0500, 0.0125, // x = 1
    0.2000, 0.0250, 0.0500, 0.0125, // x = 2
];

/// Binary concurrent-detection instance in its raw layout (row-major
/// (x, y1, y2)). The fourth entry has no x index in the source; it is the
/// only free cell, (0, 1, 1). Neither raw table sums to one because the
/// hypothesis axis and the y2 axis are interchanged, see [`example6_tables`].
pub const EXAMPLE6_P_RAW: [f64; 8] =
    [0.1990112, 0.16298342, 0.03853585, 0.0799361, 0.09498084, 0.03821415, 0.11018678, 0.08852474];
pub const EXAMPLE6_P_BAR_RAW: [f64; 8] =
    [0.19121486, 0.12692116, 0.19984744, 0.1560087, 0.11718922, 0.19433398, 0.04903381, 0.15307775];

/// Undoes the raw layout: raw "P(x, y1, y2)" is the law of hypothesis y2
/// at (x, y1, h), and likewise for raw "P̄".
/// Both rebuilt tables sum to one exactly.
pub fn example6_tables() -> ([f64; 8], [f64; 8]) {
    let (a, b) = (EXAMPLE6_P_RAW, EXAMPLE6_P_BAR_RAW);
    let mut p = [0.0; 8];
    let mut q = [0.0; 8];
    for xy1 in 0..4 {
        p[2 * xy1] = a[2 * xy1];
        p[2 * xy1 + 1] = b[2 * xy1];
        q[2 * xy1] = a[2 * xy1 + 1];
        q[2 * xy1 + 1] = b[2 * xy1 + 1];
    }
    (p, q)
}

fn xyz(sizes: [usize; 3]) -> [(Axis, usize); 3] {
    [(Axis::X, sizes[0]), (Axis::Y1, sizes[1]), (Axis::Y2, sizes[2])]
}

fn lits<T: Real>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::lit(x)).collect()
}

pub fn example1<T: Real>() -> HypothesisPair<T> {
    let p = JointPmf::normalized(&xyz([3, 2, 2]), lits(&EXAMPLE1_P)).expect("valid table");
    let p_bar = p.product_of_marginals().expect("valid table");
    HypothesisPair::new(p, p_bar).expect("same alphabet")
}

pub fn example6<T: Real>() -> HypothesisPair<T> {
    let (p, q) = example6_tables();
    let p = JointPmf::normalized(&xyz([2, 2, 2]), lits(&p)).expect("valid table");
    let p_bar = JointPmf::normalized(&xyz([2, 2, 2]), lits(&q)).expect("valid table");
    HypothesisPair::new(p, p_bar).expect("same alphabet")
}

/// Random pmf with every cell bounded away from zero.
pub fn random_pmf<T: Real, R: Rng + ?Sized>(rng: &mut R, layout: &[(Axis, usize)]) -> JointPmf<T> {
    let n: usize = layout.iter().map(|&(_, s)| s).product();
    let w: Vec<T> = (0..n).map(|_| T::lit(0.05 + rng.random::<f64>())).collect();
    JointPmf::normalized(layout, w).expect("positive weights")
}

/// Random full-support pair on the given alphabet.
pub fn random_pair<T: Real, R: Rng + ?Sized>(rng: &mut R, sizes: [usize; 3]) -> HypothesisPair<T> {
    let layout = xyz(sizes);
    HypothesisPair::new(random_pmf(rng, &layout), random_pmf(rng, &layout)).expect("same alphabet")
}

fn random_rows<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let w: Vec<f64> = (0..cols).map(|_| 0.05 + rng.random::<f64>()).collect();
        let s: f64 = w.iter().sum();
        v.extend(w.into_iter().map(|x| x / s));
    }
    v
}

/// Pair with X − Y2 − Y1 under both laws and a shared P_{Y1|Y2}
/// (cooperation cannot help).
pub fn markov_via_y2<T: Real, R: Rng + ?Sized>(rng: &mut R, sizes: [usize; 3]) -> Result<HypothesisPair<T>> {
    let [nx, ny1, ny2] = sizes;
    let shared = random_rows(rng, ny2, ny1);
    let build = |pxy2: &[f64]| -> Result<JointPmf<T>> {
        let mut t = vec![0.0; nx * ny1 * ny2];
        for x in 0..nx {
            for y1 in 0..ny1 {
                for y2 in 0..ny2 {
                    t[(x * ny1 + y1) * ny2 + y2] = pxy2[x * ny2 + y2] * shared[y2 * ny1 + y1];
                }
            }
        }
        JointPmf::normalized(&xyz(sizes), lits(&t))
    };
    let a = random_rows(rng, 1, nx * ny2);
    let b = random_rows(rng, 1, nx * ny2);
    HypothesisPair::new(build(&a)?, build(&b)?)
}

/// Pair with X − Y1 − Y2 under both laws and a shared P_{Y2|Y1}
/// (equivalent to a single detector observing Y1).
pub fn markov_via_y1<T: Real, R: Rng + ?Sized>(rng: &mut R, sizes: [usize; 3]) -> Result<HypothesisPair<T>> {
    let [nx, ny1, ny2] = sizes;
    let shared = random_rows(rng, ny1, ny2);
    let build = |pxy1: &[f64]| -> Result<JointPmf<T>> {
        let mut t = vec![0.0; nx * ny1 * ny2];
        for x in 0..nx {
            for y1 in 0..ny1 {
                for y2 in 0..ny2 {
                    t[(x * ny1 + y1) * ny2 + y2] = pxy1[x * ny1 + y1] * shared[y1 * ny2 + y2];
                }
            }
        }
        JointPmf::normalized(&xyz(sizes), lits(&t))
    };
    let a = random_rows(rng, 1, nx * ny1);
    let b = random_rows(rng, 1, nx * ny1);
    HypothesisPair::new(build(&a)?, build(&b)?)
}

/// Testing-against-independence pair: under H = 0, Y1 and Y2 are independent
/// and X depends on both; under H = 1 all three are independent with the same
/// marginals.
pub fn random_independence_pair<T: Real, R: Rng + ?Sized>(rng: &mut R, sizes: [usize; 3]) -> Result<HypothesisPair<T>> {
    let [nx, ny1, ny2] = sizes;
    let py1 = random_rows(rng, 1, ny1);
    let py2 = random_rows(rng, 1, ny2);
    let x_given = random_rows(rng, ny1 * ny2, nx);
    let mut t = vec![0.0; nx * ny1 * ny2];
    for x in 0..nx {
        for y1 in 0..ny1 {
            for y2 in 0..ny2 {
                t[(x * ny1 + y1) * ny2 + y2] = py1[y1] * py2[y2] * x_given[(y1 * ny2 + y2) * nx + x];
            }
        }
    }
    let p = JointPmf::normalized(&xyz(sizes), lits(&t))?;
    let p_bar = p.product_of_marginals()?;
    HypothesisPair::new(p, p_bar)
}
