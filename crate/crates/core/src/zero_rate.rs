//! Exponent regions for fixed communication alphabets.
//!
//! With a fixed number of messages the optimal regions are rectangles, except
//! under concurrent detection when the sensor can tell the X-marginals apart
//! but may only send one bit (W1 = 2). In that case the non-typical X-types
//! are split between the two messages by a threshold rule and sweeping the
//! threshold traces a tradeoff curve.
//!
//! All corner values are I-projections computed with [`crate::divmin`].

use crate::divmin::{min_divergence, MarginalConstraint};
use crate::error::{Error, Result};
use crate::prob::{Axis, HypothesisPair, JointPmf};
use crate::region::{AlphabetSize, DetectionMode, ExponentPair, ExponentRegion};
use crate::scalar::Real;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use Axis::{X, Y1, Y2};

/// X-marginals closer than this (L∞) count as equal.
pub const EQUAL_MARGINALS_TOL: f64 = 1e-9;

/// Message mapping of the one-bit concurrent scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mapping {
    /// Both typical sets share message 0; every other type sends 1.
    Same,
    /// P_X-typical sends 0, P̄_X-typical sends 1, the rest split by threshold.
    Different,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionSweepPoint<T> {
    /// Threshold in nats; `None` for [`Mapping::Same`], which has no threshold.
    pub r: Option<T>,
    pub mapping: Mapping,
    pub theta1: T,
    pub theta2: T,
}

/// Result of the one-bit concurrent computation.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSweep<T> {
    pub region: ExponentRegion<T>,
    pub points: Vec<PartitionSweepPoint<T>>,
}

/// Rectangle variants without the Detector 1 → Detector 2 link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoCoopMode {
    Coherent,
    ConcurrentEqualMarginals,
    ConcurrentW1Ge3,
}

fn constraint<T: Real>(law: &JointPmf<T>, axes: &[Axis]) -> Result<MarginalConstraint<T>> {
    MarginalConstraint::from_law(law, axes)
}

fn x_law<T: Real>(pi: &[T]) -> Result<JointPmf<T>> {
    JointPmf::new(&[(X, pi.len())], pi.to_vec())
}

pub fn marginals_equal<T: Real>(pair: &HypothesisPair<T>) -> bool {
    pair.x_marginal_gap() < T::lit(EQUAL_MARGINALS_TOL)
}

/// min D(P̃_XY1 ‖ reference_XY1) s.t. P̃_X = x_from_X, P̃_Y1 = y1_from_Y1.
fn two_variable_min<T: Real>(reference: &JointPmf<T>, x_from: &JointPmf<T>, y1_from: &JointPmf<T>) -> Result<T> {
    let target = reference.marginal(&[X, Y1])?;
    min_divergence(&target, &[constraint(x_from, &[X])?, constraint(y1_from, &[Y1])?])
}

/// Detector 1 corner under coherent detection:
/// min D(P̃_XY1 ‖ P̄_XY1) s.t. P̃_X = P_X, P̃_Y1 = P_Y1.
pub fn theta1_coherent<T: Real>(pair: &HypothesisPair<T>) -> Result<T> {
    two_variable_min(pair.p_bar(), pair.p(), pair.p())
}

/// Detector 2 corner with cooperation:
/// min D(P̃_XY1Y2 ‖ P̄_XY1Y2) s.t. P̃_X = P_X, P̃_Y1 = P_Y1, P̃_Y2 = P_Y2.
pub fn theta2_cooperative<T: Real>(pair: &HypothesisPair<T>) -> Result<T> {
    e2(pair, pair.px().probs())
}

/// Detector 2 corner without cooperation:
/// min D(P̃_XY2 ‖ P̄_XY2) s.t. P̃_X = P_X, P̃_Y2 = P_Y2.
pub fn theta2_no_cooperation<T: Real>(pair: &HypothesisPair<T>) -> Result<T> {
    let target = pair.p_bar().marginal(&[X, Y2])?;
    min_divergence(&target, &[constraint(pair.p(), &[X])?, constraint(pair.p(), &[Y2])?])
}

/// Detector 1 cost of type π under concurrent detection:
/// min D(P̃_XY1 ‖ P_XY1) s.t. P̃_X = π, P̃_Y1 = P̄_Y1.
pub fn e1<T: Real>(pair: &HypothesisPair<T>, pi: &[T]) -> Result<T> {
    two_variable_min(pair.p(), &x_law(pi)?, pair.p_bar())
}

/// Detector 2 cost of type π:
/// min D(P̃_XY1Y2 ‖ P̄_XY1Y2) s.t. P̃_X = π, P̃_Y1 = P_Y1, P̃_Y2 = P_Y2.
pub fn e2<T: Real>(pair: &HypothesisPair<T>, pi: &[T]) -> Result<T> {
    min_divergence(
        pair.p_bar(),
        &[MarginalConstraint::new(x_law(pi)?), constraint(pair.p(), &[Y1])?, constraint(pair.p(), &[Y2])?],
    )
}

/// The threshold rule: a non-typical type goes to Γ_{b(1)} iff e1 + r ≥ e2.
/// Shared by the asymptotic sweep and the finite-blocklength simulator.
#[inline]
pub fn in_gamma_b1<T: Real>(e1: T, e2: T, r: T) -> bool {
    e1 + r >= e2
}

/// Coherent detection, any W1, W2 ≥ 2.
pub fn region_coherent<T: Real>(pair: &HypothesisPair<T>) -> Result<ExponentRegion<T>> {
    pair.check_zero_rate_support()?;
    let corner = ExponentPair::new(theta1_coherent(pair)?, theta2_cooperative(pair)?);
    Ok(ExponentRegion::rectangle(corner, DetectionMode::Coherent).with_alphabets(AlphabetSize::Two, AlphabetSize::Two))
}

fn theta1_concurrent_equal<T: Real>(pair: &HypothesisPair<T>) -> Result<T> {
    two_variable_min(pair.p(), pair.p(), pair.p_bar())
}

fn theta1_concurrent_w1ge3<T: Real>(pair: &HypothesisPair<T>) -> Result<T> {
    two_variable_min(pair.p(), pair.p_bar(), pair.p_bar())
}

fn require_equal_marginals<T: Real>(pair: &HypothesisPair<T>) -> Result<()> {
    if !marginals_equal(pair) {
        return Err(Error::WrongMode(format!(
            "this rectangle requires P_X = P̄_X under concurrent detection (gap {:e}); use the W1 >= 3 or W1 = 2 regions",
            pair.x_marginal_gap().as_f64()
        )));
    }
    Ok(())
}

fn require_distinct_marginals<T: Real>(pair: &HypothesisPair<T>) -> Result<()> {
    if marginals_equal(pair) {
        return Err(Error::WrongMode(
            "this region requires P_X ≠ P̄_X under concurrent detection; use the equal-marginals rectangle".into(),
        ));
    }
    Ok(())
}

/// Concurrent detection with P_X = P̄_X, any W1, W2 ≥ 2.
pub fn region_concurrent_equal_marginals<T: Real>(pair: &HypothesisPair<T>) -> Result<ExponentRegion<T>> {
    require_equal_marginals(pair)?;
    pair.check_zero_rate_support()?;
    let corner = ExponentPair::new(theta1_concurrent_equal(pair)?, theta2_cooperative(pair)?);
    Ok(ExponentRegion::rectangle(corner, DetectionMode::Concurrent)
        .with_alphabets(AlphabetSize::Two, AlphabetSize::Two))
}

/// Concurrent detection with P_X ≠ P̄_X, W1 ≥ 3, W2 ≥ 2.
pub fn region_concurrent_w1_ge3<T: Real>(pair: &HypothesisPair<T>) -> Result<ExponentRegion<T>> {
    require_distinct_marginals(pair)?;
    pair.check_zero_rate_support()?;
    let corner = ExponentPair::new(theta1_concurrent_w1ge3(pair)?, theta2_cooperative(pair)?);
    Ok(ExponentRegion::rectangle(corner, DetectionMode::Concurrent)
        .with_alphabets(AlphabetSize::ThreeOrMore, AlphabetSize::Two))
}

/// Default simplex grid step: 0.01 for binary X, 0.02 otherwise.
pub fn default_grid_step(x_size: usize) -> f64 {
    if x_size <= 2 {
        0.01
    } else {
        0.02
    }
}

/// All pmfs on `k` symbols whose entries are multiples of `1/divisions`,
/// in lexicographic order of the count vectors.
pub fn simplex_grid<T: Real>(k: usize, divisions: usize) -> Vec<Vec<T>> {
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(k, left - c, cur, out);
            cur.pop();
        }
    }
    let mut counts = Vec::new();
    rec(k, divisions, &mut Vec::with_capacity(k), &mut counts);
    let d = T::from_usize(divisions).unwrap();
    counts.into_iter().map(|c| c.into_iter().map(|v| T::from_usize(v).unwrap() / d).collect()).collect()
}

fn linf<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).fold(T::zero(), T::max)
}

/// Concurrent detection with P_X ≠ P̄_X and a single sensor bit (W1 = 2).
///
/// Evaluates the per-type costs e1(π), e2(π) on a uniform simplex grid (plus
/// the two typical atoms), then for every threshold `r` splits the
/// non-typical grid types by [`in_gamma_b1`]. P̄_X always sits in Γ_{b(1)} and
/// P_X in Γ_{b(0)}. The `Same` mapping contributes one further point in which
/// both typical atoms share the message. The returned region is the Pareto
/// frontier over all sweep points.
pub fn region_concurrent_w1_eq2<T: Real>(
    pair: &HypothesisPair<T>,
    px_grid_step: T,
    r_grid: &[T],
) -> Result<PartitionSweep<T>> {
    require_distinct_marginals(pair)?;
    pair.check_zero_rate_support()?;
    if !(px_grid_step > T::zero() && px_grid_step <= T::lit(0.1)) {
        return Err(Error::Input(format!("grid step must lie in (0, 0.1], got {px_grid_step}")));
    }
    if r_grid.is_empty() {
        return Err(Error::Input("threshold grid is empty".into()));
    }
    let costs = TypeCosts::on_grid(pair, px_grid_step)?;
    let mut points = Vec::with_capacity(r_grid.len() + 1);
    for &r in r_grid {
        let (theta1, theta2) = costs.different(r);
        points.push(PartitionSweepPoint { r: Some(r), mapping: Mapping::Different, theta1, theta2 });
    }
    let (theta1, theta2) = costs.same();
    points.push(PartitionSweepPoint { r: None, mapping: Mapping::Same, theta1, theta2 });
    let region = ExponentRegion::from_points(
        points.iter().map(|p| ExponentPair::new(p.theta1, p.theta2)),
        DetectionMode::Concurrent,
    )
    .with_alphabets(AlphabetSize::Two, AlphabetSize::Two);
    Ok(PartitionSweep { region, points })
}

/// Threshold grid covering every distinct partition of the simplex grid.
pub fn default_threshold_grid<T: Real>(pair: &HypothesisPair<T>, px_grid_step: T) -> Result<Vec<T>> {
    require_distinct_marginals(pair)?;
    pair.check_zero_rate_support()?;
    Ok(TypeCosts::on_grid(pair, px_grid_step)?.breakpoints())
}

/// Single point of the one-bit region for a fixed mapping and threshold.
pub fn one_bit_point<T: Real>(
    pair: &HypothesisPair<T>,
    mapping: Mapping,
    r: T,
    px_grid_step: T,
) -> Result<ExponentPair<T>> {
    require_distinct_marginals(pair)?;
    pair.check_zero_rate_support()?;
    let costs = TypeCosts::on_grid(pair, px_grid_step)?;
    let (a, b) = match mapping {
        Mapping::Same => costs.same(),
        Mapping::Different => costs.different(r),
    };
    Ok(ExponentPair::new(a, b))
}

/// Per-type costs over a simplex grid, with the typical atoms kept apart.
#[derive(Debug, Clone)]
pub struct TypeCosts<T> {
    /// Non-typical grid types with (e1, e2), in grid order.
    pub grid: Vec<(Vec<T>, T, T)>,
    /// (e1, e2) at P_X.
    pub at_px: (T, T),
    /// (e1, e2) at P̄_X.
    pub at_px_bar: (T, T),
}

impl<T: Real> TypeCosts<T> {
    pub fn on_grid(pair: &HypothesisPair<T>, step: T) -> Result<Self> {
        let nx = pair.sizes()[0];
        let divisions = (T::one() / step).round().to_usize().unwrap_or(1).max(1);
        let px = pair.px().probs().to_vec();
        let pxb = pair.px_bar().probs().to_vec();
        let atom_tol = T::lit(1e-12);
        let grid: Vec<Vec<T>> = simplex_grid::<T>(nx, divisions)
            .into_iter()
            .filter(|pi| linf(pi, &px) > atom_tol && linf(pi, &pxb) > atom_tol)
            .collect();
        let evaluated: Vec<(Vec<T>, T, T)> =
            grid.into_par_iter().map(|pi| Ok((pi.clone(), e1(pair, &pi)?, e2(pair, &pi)?))).collect::<Result<_>>()?;
        Ok(Self {
            grid: evaluated,
            at_px: (e1(pair, &px)?, e2(pair, &px)?),
            at_px_bar: (e1(pair, &pxb)?, e2(pair, &pxb)?),
        })
    }

    /// Thresholds at which the partition changes: every distinct e2 − e1 on
    /// the grid, ascending, preceded by one value below all of them.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut br: Vec<T> = self.grid.iter().map(|(_, a, b)| *b - *a).collect();
        br.sort_by(|a, b| a.partial_cmp(b).unwrap());
        br.dedup();
        if let Some(&first) = br.first() {
            br.insert(0, first - T::one());
        }
        br
    }

    /// (θ1, θ2) of the `Different` mapping at threshold `r`.
    pub fn different(&self, r: T) -> (T, T) {
        let mut theta1 = self.at_px_bar.0;
        let mut theta2 = self.at_px.1;
        for (_, a, b) in &self.grid {
            if in_gamma_b1(*a, *b, r) {
                theta1 = theta1.min(*a);
            } else {
                theta2 = theta2.min(*b);
            }
        }
        (theta1, theta2)
    }

    /// (θ1, θ2) of the `Same` mapping: both typical atoms share the message
    /// that both detectors act on; all other types send the other message.
    pub fn same(&self) -> (T, T) {
        (self.at_px.0.min(self.at_px_bar.0), self.at_px.1.min(self.at_px_bar.1))
    }
}

/// Rectangle without cooperation: θ1 as in the cooperative variant, θ2 from
/// the (X, Y2) minimization alone.
pub fn region_no_cooperation<T: Real>(pair: &HypothesisPair<T>, mode: NoCoopMode) -> Result<ExponentRegion<T>> {
    pair.check_zero_rate_support()?;
    let (theta1, det, w1) = match mode {
        NoCoopMode::Coherent => (theta1_coherent(pair)?, DetectionMode::Coherent, AlphabetSize::Two),
        NoCoopMode::ConcurrentEqualMarginals => {
            require_equal_marginals(pair)?;
            (theta1_concurrent_equal(pair)?, DetectionMode::Concurrent, AlphabetSize::Two)
        }
        NoCoopMode::ConcurrentW1Ge3 => {
            require_distinct_marginals(pair)?;
            (theta1_concurrent_w1ge3(pair)?, DetectionMode::Concurrent, AlphabetSize::ThreeOrMore)
        }
    };
    let corner = ExponentPair::new(theta1, theta2_no_cooperation(pair)?);
    Ok(ExponentRegion::rectangle(corner, det).with_alphabets(w1, AlphabetSize::None))
}

/// Growth of Detector 2's rectangle side due to cooperation (clamped at zero;
/// the two minimizations differ only by constraint monotonicity).
pub fn cooperation_benefit_zero_rate<T: Real>(pair: &HypothesisPair<T>) -> Result<T> {
    pair.check_zero_rate_support()?;
    Ok((theta2_cooperative(pair)? - theta2_no_cooperation(pair)?).max(T::zero()))
}
