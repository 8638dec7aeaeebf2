//! Exponent regions as finite Pareto sets.

use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Which hypothesis Detector 1 protects.
///
/// Under coherent detection both detectors maximize the exponent of the
/// error under H = 1; under concurrent detection Detector 1 maximizes the
/// exponent of the error under H = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionMode {
    Coherent,
    Concurrent,
}

/// Communication alphabet size tag. `None` encodes a missing link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlphabetSize {
    None,
    Two,
    ThreeOrMore,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair<T> {
    pub theta1: T,
    pub theta2: T,
}

impl<T: Real> ExponentPair<T> {
    pub fn new(theta1: T, theta2: T) -> Self {
        Self { theta1, theta2 }
    }

    /// Weakly better in both coordinates and strictly better in one.
    pub fn dominates(&self, other: &Self) -> bool {
        self.theta1 >= other.theta1
            && self.theta2 >= other.theta2
            && (self.theta1 > other.theta1 || self.theta2 > other.theta2)
    }

    /// Weakly better in both coordinates, up to `tol`.
    pub fn covers(&self, other: &Self, tol: T) -> bool {
        self.theta1 + tol >= other.theta1 && self.theta2 + tol >= other.theta2
    }
}

/// A region described by its Pareto-maximal corner points, sorted by θ1.
/// The region itself is the union of the rectangles `[0, θ1] × [0, θ2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentRegion<T> {
    pub points: Vec<ExponentPair<T>>,
    pub is_rectangle: bool,
    pub mode: DetectionMode,
    pub w1: Option<AlphabetSize>,
    pub w2: Option<AlphabetSize>,
}

impl<T: Real> ExponentRegion<T> {
    pub fn rectangle(corner: ExponentPair<T>, mode: DetectionMode) -> Self {
        Self { points: vec![corner], is_rectangle: true, mode, w1: None, w2: None }
    }

    /// Pareto frontier of arbitrary candidate points.
    pub fn from_points(candidates: impl IntoIterator<Item = ExponentPair<T>>, mode: DetectionMode) -> Self {
        let points = pareto_frontier(candidates);
        let is_rectangle = points.len() == 1;
        Self { points, is_rectangle, mode, w1: None, w2: None }
    }

    pub fn with_alphabets(mut self, w1: AlphabetSize, w2: AlphabetSize) -> Self {
        self.w1 = Some(w1);
        self.w2 = Some(w2);
        self
    }

    pub fn corner(&self) -> Option<ExponentPair<T>> {
        if self.is_rectangle {
            self.points.first().copied()
        } else {
            None
        }
    }

    pub fn max_theta1(&self) -> T {
        self.points.iter().map(|p| p.theta1).fold(T::zero(), T::max)
    }

    pub fn max_theta2(&self) -> T {
        self.points.iter().map(|p| p.theta2).fold(T::zero(), T::max)
    }

    /// Whether `pt` lies in the region, allowing slack `tol`.
    pub fn contains(&self, pt: &ExponentPair<T>, tol: T) -> bool {
        self.points.iter().any(|c| c.covers(pt, tol))
    }

    /// Every corner of `other` lies in `self`.
    pub fn includes(&self, other: &Self, tol: T) -> bool {
        other.points.iter().all(|p| self.contains(p, tol))
    }
}

/// Pareto-maximal subset, sorted by ascending θ1 (hence descending θ2).
/// Exact duplicates collapse to one point; negative coordinates clamp to zero.
pub fn pareto_frontier<T: Real>(candidates: impl IntoIterator<Item = ExponentPair<T>>) -> Vec<ExponentPair<T>> {
    let pts: Vec<ExponentPair<T>> = candidates.into_iter().collect();
    pareto_indices(&pts)
        .into_iter()
        .map(|i| ExponentPair::new(pts[i].theta1.max(T::zero()), pts[i].theta2.max(T::zero())))
        .collect()
}

/// Indices of the Pareto-maximal points in frontier order (ascending θ1).
/// Among exact duplicates the first occurrence wins; NaN points are ignored.
pub fn pareto_indices<T: Real>(pts: &[ExponentPair<T>]) -> Vec<usize> {
    let key = |p: &ExponentPair<T>| (p.theta1.max(T::zero()), p.theta2.max(T::zero()));
    let mut order: Vec<usize> =
        (0..pts.len()).filter(|&i| !pts[i].theta1.is_nan() && !pts[i].theta2.is_nan()).collect();
    // θ1 descending, then θ2 descending; sweep keeping strict θ2 records
    order.sort_by(|&i, &j| {
        let (a1, a2) = key(&pts[i]);
        let (b1, b2) = key(&pts[j]);
        b1.partial_cmp(&a1).unwrap().then(b2.partial_cmp(&a2).unwrap()).then(i.cmp(&j))
    });
    let mut out: Vec<usize> = Vec::new();
    for i in order {
        match out.last() {
            Some(&last) if key(&pts[i]).1 <= key(&pts[last]).1 => {}
            _ => out.push(i),
        }
    }
    out.reverse();
    out
}
