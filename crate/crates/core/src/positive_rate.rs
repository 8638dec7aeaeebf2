//! Positive-rate exponent regions.
//!
//! The sensor quantizes X into an auxiliary U (rate R1) and Detector 1
//! quantizes (U, Y1) into V (rate R2). For fixed auxiliary channels both
//! exponents are I-projections; the region is traced by searching over the
//! channels under the rate constraints and keeping the Pareto frontier. Every
//! frontier point carries the channels that achieve it.
//!
//! Also here: the high-rate corners (sensor and Detector 1 forward their
//! observations losslessly) and the closed-form region for testing against
//! independence.

use crate::divmin::{min_divergence, MarginalConstraint};
use crate::error::{Error, Result};
use crate::prob::{
    attach_channel, entropy, kl_divergence, mutual_information, Axis, CondChannel, HypothesisPair, JointPmf,
};
use crate::region::{pareto_indices, DetectionMode, ExponentPair, ExponentRegion};
use crate::scalar::Real;
use crate::zero_rate::marginals_equal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use Axis::{U, V, X, Y1, Y2};

/// Slack allowed on rate constraints to absorb rounding in the entropies.
pub const RATE_SLACK: f64 = 1e-12;
/// Search corners within this distance of a better one are merged.
pub const FRONTIER_TOL: f64 = 1e-9;

/// Auxiliary channels P_{U|X}, P_{V|U,Y1} and, for concurrent detection with
/// distinct X-marginals, P̄_{U1|X}. The U1 channel uses the `U` axis label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxChannels<T> {
    pub u_given_x: CondChannel<T>,
    pub v_given_uy1: CondChannel<T>,
    pub u1_given_x: Option<CondChannel<T>>,
}

impl<T: Real> AuxChannels<T> {
    pub fn new(u_given_x: CondChannel<T>, v_given_uy1: CondChannel<T>) -> Result<Self> {
        if u_given_x.input_axes() != [X] || u_given_x.output_axis() != U {
            return Err(Error::Shape("P_{U|X} must map X to U".into()));
        }
        if v_given_uy1.input_axes() != [Y1, U] || v_given_uy1.output_axis() != V {
            return Err(Error::Shape("P_{V|U,Y1} must map (Y1, U) to V".into()));
        }
        if v_given_uy1.input_sizes()[1] != u_given_x.output_size() {
            return Err(Error::Shape(format!(
                "|U| = {} in P_{{U|X}} but {} in P_{{V|U,Y1}}",
                u_given_x.output_size(),
                v_given_uy1.input_sizes()[1]
            )));
        }
        Ok(Self { u_given_x, v_given_uy1, u1_given_x: None })
    }

    pub fn with_u1(mut self, u1_given_x: CondChannel<T>) -> Result<Self> {
        if u1_given_x.input_axes() != [X] || u1_given_x.output_axis() != U {
            return Err(Error::Shape("P̄_{U1|X} must map X to U".into()));
        }
        if u1_given_x.input_sizes() != self.u_given_x.input_sizes() {
            return Err(Error::Shape("P̄_{U1|X} and P_{U|X} disagree on |X|".into()));
        }
        self.u1_given_x = Some(u1_given_x);
        Ok(self)
    }

    /// |U| = |V| = 1.
    pub fn degenerate(x_size: usize, y1_size: usize) -> Self {
        let u = CondChannel::constant(&[(X, x_size)], U, &[T::one()]).expect("valid");
        let v = CondChannel::constant(&[(Y1, y1_size), (U, 1)], V, &[T::one()]).expect("valid");
        Self::new(u, v).expect("consistent")
    }

    /// U = X and V = Y1.
    pub fn identity(x_size: usize, y1_size: usize) -> Self {
        let u = CondChannel::identity((X, x_size), (U, x_size)).expect("valid");
        Self::new(u, copy_y1(y1_size, x_size, y1_size)).expect("consistent")
    }

    pub fn u_size(&self) -> usize {
        self.u_given_x.output_size()
    }

    pub fn v_size(&self) -> usize {
        self.v_given_uy1.output_size()
    }

    pub fn cast<S: Real>(&self) -> AuxChannels<S> {
        AuxChannels {
            u_given_x: self.u_given_x.cast(),
            v_given_uy1: self.v_given_uy1.cast(),
            u1_given_x: self.u1_given_x.as_ref().map(|c| c.cast()),
        }
    }

    /// Re-embeds into larger alphabets; new outputs get zero mass and the
    /// V-rows of unused U symbols are uniform.
    pub fn padded(&self, u_card: usize, v_card: usize) -> Result<Self> {
        let nu = self.u_size();
        let nv = self.v_size();
        if u_card < nu || v_card < nv {
            return Err(Error::Shape(format!("cannot shrink auxiliaries from ({nu}, {nv}) to ({u_card}, {v_card})")));
        }
        let u = pad_outputs(&self.u_given_x, u_card)?;
        let ny1 = self.v_given_uy1.input_sizes()[0];
        let mut probs = Vec::with_capacity(ny1 * u_card * v_card);
        for y1 in 0..ny1 {
            for uu in 0..u_card {
                if uu < nu {
                    let row = self.v_given_uy1.row(y1 * nu + uu);
                    probs.extend_from_slice(row);
                    probs.extend(std::iter::repeat_n(T::zero(), v_card - nv));
                } else {
                    probs.extend(std::iter::repeat_n(T::one() / T::from_usize(v_card).unwrap(), v_card));
                }
            }
        }
        let v = CondChannel::new(&[(Y1, ny1), (U, u_card)], (V, v_card), probs)?;
        let mut out = Self::new(u, v)?;
        if let Some(u1) = &self.u1_given_x {
            out.u1_given_x = Some(pad_outputs(u1, u_card.max(u1.output_size()))?);
        }
        Ok(out)
    }
}

fn pad_outputs<T: Real>(chan: &CondChannel<T>, card: usize) -> Result<CondChannel<T>> {
    let k = chan.output_size();
    let mut probs = Vec::with_capacity(chan.rows() * card);
    for r in 0..chan.rows() {
        probs.extend_from_slice(chan.row(r));
        probs.extend(std::iter::repeat_n(T::zero(), card - k));
    }
    CondChannel::new(&chan.input_layout(), (chan.output_axis(), card), probs)
}

/// V = Y1 embedded into a V-alphabet of `v_card`, ignoring U.
fn copy_y1<T: Real>(y1_size: usize, u_size: usize, v_card: usize) -> CondChannel<T> {
    let mut probs = vec![T::zero(); y1_size * u_size * v_card];
    for y1 in 0..y1_size {
        for u in 0..u_size {
            probs[(y1 * u_size + u) * v_card + y1] = T::one();
        }
    }
    CondChannel::new(&[(Y1, y1_size), (U, u_size)], (V, v_card), probs).expect("valid")
}

/// Rate pair in nats per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair<T> {
    pub r1: T,
    pub r2: T,
}

impl<T: Real> RatePair<T> {
    pub fn new(r1: T, r2: T) -> Result<Self> {
        if !(r1 >= T::zero()) || !(r2 >= T::zero()) || !r1.is_finite() || !r2.is_finite() {
            return Err(Error::Input(format!("rates must be finite and nonnegative, got ({r1}, {r2})")));
        }
        Ok(Self { r1, r2 })
    }

    pub fn from_bits(r1: T, r2: T) -> Result<Self> {
        let ln2 = T::lit(std::f64::consts::LN_2);
        Self::new(r1 * ln2, r2 * ln2)
    }
}

/// Exponents of one choice of auxiliaries, with the rates it needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxExponents<T> {
    pub theta1: T,
    pub theta2: T,
    /// I(U;X) under P.
    pub i_ux: T,
    /// I(V;Y1|U) under P.
    pub i_vy1_given_u: T,
    /// I(U1;X) under P̄, when a U1 channel is present.
    pub i_u1x: Option<T>,
}

fn check_aux<T: Real>(pair: &HypothesisPair<T>, aux: &AuxChannels<T>) -> Result<()> {
    let [nx, ny1, _] = pair.sizes();
    if aux.u_given_x.input_sizes()[0] != nx || aux.v_given_uy1.input_sizes()[0] != ny1 {
        return Err(Error::Shape(format!("auxiliary channels do not match |X| = {nx}, |Y1| = {ny1}")));
    }
    Ok(())
}

/// Joint law of (X, Y1, Y2, U, V) obtained by passing `law` through the channels.
fn full_law<T: Real>(law: &JointPmf<T>, aux: &AuxChannels<T>) -> Result<JointPmf<T>> {
    attach_channel(&attach_channel(law, &aux.u_given_x)?, &aux.v_given_uy1)
}

fn cons<T: Real>(law: &JointPmf<T>, axes: &[Axis]) -> Result<MarginalConstraint<T>> {
    MarginalConstraint::from_law(law, axes)
}

/// min D(P̃_UXY1 ‖ reference_XY1 · W) s.t. P̃_UX, P̃_UY1 equal those of
/// matched_XY1 · W.
fn theta1_generic<T: Real>(reference: &JointPmf<T>, matched: &JointPmf<T>, w: &CondChannel<T>) -> Result<T> {
    let target = attach_channel(&reference.marginal(&[X, Y1])?, w)?;
    let law = attach_channel(&matched.marginal(&[X, Y1])?, w)?;
    min_divergence(&target, &[cons(&law, &[X, U])?, cons(&law, &[Y1, U])?])
}

fn theta2_generic<T: Real>(pair: &HypothesisPair<T>, aux: &AuxChannels<T>) -> Result<T> {
    let target = full_law(pair.p_bar(), aux)?;
    let law = full_law(pair.p(), aux)?;
    min_divergence(&target, &[cons(&law, &[X, U])?, cons(&law, &[Y1, U, V])?, cons(&law, &[Y2, U, V])?])
}

fn rates_of<T: Real>(pair: &HypothesisPair<T>, aux: &AuxChannels<T>) -> Result<(T, T)> {
    let law = attach_channel(&pair.p().marginal(&[X, Y1])?, &aux.u_given_x)?;
    let law = attach_channel(&law, &aux.v_given_uy1)?;
    Ok((mutual_information(&law, &[U], &[X], &[])?, mutual_information(&law, &[V], &[Y1], &[U])?))
}

fn i_u1x<T: Real>(pair: &HypothesisPair<T>, u1: &CondChannel<T>) -> Result<T> {
    mutual_information(&attach_channel(&pair.px_bar(), u1)?, &[U], &[X], &[])
}

/// Exponents of the coherent-detection scheme for fixed auxiliaries.
pub fn exponents_for_aux_coherent<T: Real>(pair: &HypothesisPair<T>, aux: &AuxChannels<T>) -> Result<AuxExponents<T>> {
    check_aux(pair, aux)?;
    let theta1 = theta1_generic(pair.p_bar(), pair.p(), &aux.u_given_x)?;
    let theta2 = theta2_generic(pair, aux)?;
    let (i_ux, i_vy1_given_u) = rates_of(pair, aux)?;
    Ok(AuxExponents { theta1, theta2, i_ux, i_vy1_given_u, i_u1x: None })
}

/// Exponents of the concurrent-detection scheme. With equal X-marginals θ1
/// uses U under the P̄ law; otherwise θ1 uses the separate U1 channel.
pub fn exponents_for_aux_concurrent<T: Real>(
    pair: &HypothesisPair<T>,
    aux: &AuxChannels<T>,
    equal_marginals: bool,
) -> Result<AuxExponents<T>> {
    check_aux(pair, aux)?;
    if equal_marginals != marginals_equal(pair) {
        return Err(Error::WrongMode(format!(
            "equal_marginals = {equal_marginals} but ‖P_X − P̄_X‖∞ = {:e}",
            pair.x_marginal_gap().as_f64()
        )));
    }
    let (theta1, i_u1) = if equal_marginals {
        (theta1_generic(pair.p(), pair.p_bar(), &aux.u_given_x)?, None)
    } else {
        let u1 = aux.u1_given_x.as_ref().ok_or_else(|| {
            Error::Input("distinct X-marginals under concurrent detection need a P̄_{U1|X} channel".into())
        })?;
        (theta1_generic(pair.p(), pair.p_bar(), u1)?, Some(i_u1x(pair, u1)?))
    };
    let theta2 = theta2_generic(pair, aux)?;
    let (i_ux, i_vy1_given_u) = rates_of(pair, aux)?;
    Ok(AuxExponents { theta1, theta2, i_ux, i_vy1_given_u, i_u1x: i_u1 })
}

/// Exponents for whichever scheme `mode` selects on this pair.
pub fn exponents_for_aux<T: Real>(
    pair: &HypothesisPair<T>,
    aux: &AuxChannels<T>,
    mode: DetectionMode,
) -> Result<AuxExponents<T>> {
    match mode {
        DetectionMode::Coherent => exponents_for_aux_coherent(pair, aux),
        DetectionMode::Concurrent => exponents_for_aux_concurrent(pair, aux, marginals_equal(pair)),
    }
}

/// Corners reachable when both links carry their observations losslessly.
#[derive(Debug, Clone, PartialEq)]
pub struct HighRateResult<T> {
    pub region: ExponentRegion<T>,
    /// Rates that suffice (any positive margin on top).
    pub rates: RatePair<T>,
    /// E_{P_XY2}[D(P_{Y1|XY2} ‖ P̄_{Y1|XY2})].
    pub benefit: T,
}

fn named_kl<T: Real>(p: &JointPmf<T>, q: &JointPmf<T>, name: &str) -> Result<T> {
    kl_divergence(p, q).map_err(|e| match e {
        Error::InfiniteDivergence { cell } => Error::Precondition(format!(
            "{name} is infinite: the second law vanishes at cell {cell:?} where the first does not"
        )),
        other => other,
    })
}

/// Direct summation of E_{P_XY2}[D(P_{Y1|XY2} ‖ P̄_{Y1|XY2})].
pub fn high_rate_benefit<T: Real>(pair: &HypothesisPair<T>) -> Result<T> {
    let [nx, ny1, ny2] = pair.sizes();
    let p = pair.p().probs();
    let q = pair.p_bar().probs();
    let z = T::zero_threshold();
    let mut acc = T::zero();
    for x in 0..nx {
        for y2 in 0..ny2 {
            let at = |t: &[T], y1: usize| t[(x * ny1 + y1) * ny2 + y2];
            let pm: T = (0..ny1).map(|y1| at(p, y1)).sum();
            let qm: T = (0..ny1).map(|y1| at(q, y1)).sum();
            if pm <= z {
                continue;
            }
            for y1 in 0..ny1 {
                let a = at(p, y1);
                if a <= z {
                    continue;
                }
                let b = at(q, y1);
                if b <= z {
                    return Err(Error::Precondition(format!(
                        "E[D(P_Y1|XY2 ‖ P̄_Y1|XY2)] is infinite at (x, y1, y2) = ({x}, {y1}, {y2})"
                    )));
                }
                acc = acc + a * ((a / pm) / (b / qm)).ln();
            }
        }
    }
    Ok(acc.max(T::zero()))
}

pub fn high_rate_region<T: Real>(
    pair: &HypothesisPair<T>,
    mode: DetectionMode,
    cooperative: bool,
) -> Result<HighRateResult<T>> {
    let pxy1 = pair.p().marginal(&[X, Y1])?;
    let qxy1 = pair.p_bar().marginal(&[X, Y1])?;
    let theta1 = match mode {
        DetectionMode::Coherent => named_kl(&pxy1, &qxy1, "D(P_XY1 ‖ P̄_XY1)")?,
        DetectionMode::Concurrent => named_kl(&qxy1, &pxy1, "D(P̄_XY1 ‖ P_XY1)")?,
    };
    let theta2 = if cooperative {
        named_kl(pair.p(), pair.p_bar(), "D(P_XY1Y2 ‖ P̄_XY1Y2)")?
    } else {
        named_kl(&pair.p().marginal(&[X, Y2])?, &pair.p_bar().marginal(&[X, Y2])?, "D(P_XY2 ‖ P̄_XY2)")?
    };
    let hx = entropy(pair.p(), &[X])?;
    let r1 = match mode {
        DetectionMode::Coherent => hx,
        DetectionMode::Concurrent => hx.max(entropy(pair.p_bar(), &[X])?),
    };
    let r2 = if cooperative { crate::prob::conditional_entropy(pair.p(), &[Y1], &[X])? } else { T::zero() };
    let benefit = high_rate_benefit(pair)?;
    Ok(HighRateResult {
        region: ExponentRegion::rectangle(ExponentPair::new(theta1, theta2), mode),
        rates: RatePair { r1, r2 },
        benefit,
    })
}

/// Search settings for the auxiliary-channel optimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Scalarization weights λ on [0, 1]; θ1 gets λ, θ2 gets 1 − λ.
    pub lambda_points: usize,
    /// Local searches per λ (the first few start from fixed seeds).
    pub restarts: usize,
    /// Perturbation steps per local search.
    pub iterations: usize,
    /// |U|; defaults to |X| + 1.
    pub u_card: Option<usize>,
    /// |V|; defaults to |U|·|Y1| + 1.
    pub v_card: Option<usize>,
    pub seed: u64,
    /// Extra starting points, padded to the configured alphabets.
    pub warm_start: Vec<AuxChannels<f64>>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            lambda_points: 33,
            restarts: 64,
            iterations: 150,
            u_card: None,
            v_card: None,
            seed: 0x5eed,
            warm_start: Vec::new(),
        }
    }
}

impl SearchConfig {
    fn cards(&self, nx: usize, ny1: usize) -> (usize, usize) {
        let u = self.u_card.unwrap_or(nx + 1).max(1);
        (u, self.v_card.unwrap_or(u * ny1 + 1).max(1))
    }

    fn lambdas(&self) -> Vec<f64> {
        match self.lambda_points {
            0 | 1 => vec![0.5],
            k => (0..k).map(|i| i as f64 / (k - 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub tasks: usize,
    pub evaluations: usize,
    pub accepted_moves: usize,
    /// Candidates dropped because a projection failed or no feasible mix existed.
    pub failed: usize,
}

impl SearchStats {
    fn merge(&mut self, o: &Self) {
        self.tasks += o.tasks;
        self.evaluations += o.evaluations;
        self.accepted_moves += o.accepted_moves;
        self.failed += o.failed;
    }
}

/// A frontier point with the channels that achieve it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness<T> {
    pub point: ExponentPair<T>,
    pub aux: AuxChannels<T>,
    pub i_ux: T,
    pub i_vy1_given_u: T,
    pub i_u1x: Option<T>,
}

/// Searched region; `witnesses[i]` achieves `region.points[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AchievableRegion<T> {
    pub region: ExponentRegion<T>,
    pub witnesses: Vec<Witness<T>>,
    pub stats: SearchStats,
}

/// One candidate: the list of channels a problem optimizes over.
type Cand<T> = Vec<CondChannel<T>>;

struct Scored<T> {
    point: ExponentPair<T>,
    witness: Witness<T>,
}

/// Optimization problem over a list of channels. `project` enforces the rate
/// constraints; `evaluate` returns the exponent pair and its witness.
trait Problem<T: Real>: Sync {
    fn seeds(&self) -> Vec<Cand<T>>;
    fn random(&self, rng: &mut ChaCha8Rng, sparse: bool) -> Cand<T>;
    fn project(&self, c: Cand<T>) -> Result<Option<Cand<T>>>;
    fn evaluate(&self, c: &Cand<T>) -> Result<Scored<T>>;
}

fn random_channel<T: Real>(
    inputs: &[(Axis, usize)],
    output: (Axis, usize),
    rng: &mut ChaCha8Rng,
    sparse: bool,
) -> CondChannel<T> {
    let rows: usize = inputs.iter().map(|&(_, s)| s).product();
    let gamma = Gamma::new(if sparse { 0.2 } else { 1.0 }, 1.0).expect("valid shape");
    let mut w = Vec::with_capacity(rows * output.1);
    for _ in 0..rows {
        let row: Vec<f64> = (0..output.1).map(|_| gamma.sample(rng) + 1e-300).collect();
        w.extend(row.into_iter().map(T::lit));
    }
    CondChannel::from_weights(inputs, output, w).expect("positive rows")
}

fn perturb<T: Real>(c: &Cand<T>, sigma: f64, rng: &mut ChaCha8Rng) -> Cand<T> {
    let mut out = c.clone();
    let k = rng.random_range(0..out.len());
    let chan = &out[k];
    let width = chan.output_size();
    if width < 2 {
        return out;
    }
    let mut probs = chan.probs().to_vec();
    // perturb one row, occasionally all rows
    let rows: Vec<usize> =
        if rng.random::<f64>() < 0.25 { (0..chan.rows()).collect() } else { vec![rng.random_range(0..chan.rows())] };
    for r in rows {
        let row = &mut probs[r * width..(r + 1) * width];
        for p in row.iter_mut() {
            let g: f64 = StandardNormal.sample(rng);
            *p = T::lit((p.as_f64() + sigma * g).max(0.0));
        }
        let s: T = row.iter().copied().sum();
        if s > T::zero() {
            row.iter_mut().for_each(|p| *p = *p / s);
        } else {
            let j = rng.random_range(0..width);
            row.iter_mut().enumerate().for_each(|(i, p)| *p = if i == j { T::one() } else { T::zero() });
        }
    }
    out[k] = CondChannel::new(&chan.input_layout(), (chan.output_axis(), width), probs).expect("normalized rows");
    out
}

fn mix<T: Real>(a: &CondChannel<T>, b: &CondChannel<T>, t: T) -> Result<CondChannel<T>> {
    let w = a.probs().iter().zip(b.probs()).map(|(&x, &y)| (T::one() - t) * x + t * y).collect();
    CondChannel::from_weights(&a.input_layout(), (a.output_axis(), a.output_size()), w)
}

/// Moves `chan` toward `anchor` just far enough that `rate(mixed) ≤ bound`.
/// `anchor` must satisfy the bound.
fn project_rate<T: Real>(
    chan: &CondChannel<T>,
    anchor: &CondChannel<T>,
    bound: T,
    rate: impl Fn(&CondChannel<T>) -> Result<T>,
) -> Result<Option<CondChannel<T>>> {
    let slack = T::lit(RATE_SLACK);
    if rate(chan)? <= bound + slack {
        return Ok(Some(chan.clone()));
    }
    if rate(anchor)? > bound + slack {
        return Ok(None);
    }
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..48 {
        let mid = (lo + hi) / T::lit(2.0);
        if rate(&mix(chan, anchor, mid)?)? <= bound + slack {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let out = mix(chan, anchor, hi)?;
    Ok(if rate(&out)? <= bound + slack { Some(out) } else { Some(anchor.clone()) })
}

/// Channel with every row equal to the output marginal under `input_law`.
fn marginal_anchor<T: Real>(input_law: &JointPmf<T>, chan: &CondChannel<T>) -> Result<CondChannel<T>> {
    let joint = attach_channel(input_law, chan)?;
    let m = joint.marginal(&[chan.output_axis()])?;
    CondChannel::constant(&chan.input_layout(), chan.output_axis(), m.probs())
}

/// P_{V|U,Y1} replaced by P_{V|U} (rows depend on u only).
fn v_anchor<T: Real>(law_xy1: &JointPmf<T>, u: &CondChannel<T>, v: &CondChannel<T>) -> Result<CondChannel<T>> {
    let joint = attach_channel(&attach_channel(law_xy1, u)?, v)?;
    let vu = joint.conditional(V, &[U])?;
    let ny1 = v.input_sizes()[0];
    let nu = v.input_sizes()[1];
    let nv = v.output_size();
    let mut probs = Vec::with_capacity(ny1 * nu * nv);
    for _ in 0..ny1 {
        for uu in 0..nu {
            probs.extend_from_slice(vu.row(uu));
        }
    }
    CondChannel::new(&v.input_layout(), (V, nv), probs)
}

fn local_search<T: Real, P: Problem<T>>(
    problem: &P,
    lambda: f64,
    start: Cand<T>,
    iterations: usize,
    rng: &mut ChaCha8Rng,
    pool: &mut Vec<Scored<T>>,
    stats: &mut SearchStats,
) {
    let objective = |s: &Scored<T>| lambda * s.point.theta1.as_f64() + (1.0 - lambda) * s.point.theta2.as_f64();
    let mut cur = match problem.project(start) {
        Ok(Some(c)) => c,
        _ => {
            stats.failed += 1;
            return;
        }
    };
    stats.evaluations += 1;
    let mut best = match problem.evaluate(&cur) {
        Ok(s) => objective(&s),
        Err(_) => {
            stats.failed += 1;
            return;
        }
    };
    pool_insert(pool, problem.evaluate(&cur).unwrap());
    let mut sigma = 0.2;
    for _ in 0..iterations {
        let cand = match problem.project(perturb(&cur, sigma, rng)) {
            Ok(Some(c)) => c,
            _ => {
                stats.failed += 1;
                sigma = (sigma * 0.7_f64).max(1e-4);
                continue;
            }
        };
        stats.evaluations += 1;
        match problem.evaluate(&cand) {
            Ok(s) => {
                let v = objective(&s);
                pool_insert(pool, s);
                if v > best {
                    best = v;
                    cur = cand;
                    stats.accepted_moves += 1;
                    sigma = (sigma * 1.5_f64).min(0.5);
                } else {
                    sigma = (sigma * 0.8_f64).max(1e-4);
                }
            }
            Err(_) => {
                stats.failed += 1;
                sigma = (sigma * 0.7_f64).max(1e-4);
            }
        }
    }
}

/// Keeps `pool` Pareto-minimal in size: drops entries the new point covers.
fn pool_insert<T: Real>(pool: &mut Vec<Scored<T>>, s: Scored<T>) {
    if pool.iter().any(|q| q.point.covers(&s.point, T::zero())) {
        return;
    }
    pool.retain(|q| !s.point.covers(&q.point, T::zero()));
    pool.push(s);
}

fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

fn run_search<T: Real, P: Problem<T>>(
    problem: &P,
    lambdas: &[f64],
    config: &SearchConfig,
) -> (Vec<Scored<T>>, SearchStats) {
    let seeds = problem.seeds();
    let restarts = config.restarts.max(seeds.len()).max(1);
    let tasks: Vec<(usize, usize)> = (0..lambdas.len()).flat_map(|i| (0..restarts).map(move |j| (i, j))).collect();
    let results: Vec<(Vec<Scored<T>>, SearchStats)> = tasks
        .par_iter()
        .map(|&(i, j)| {
            let mut rng = task_rng(config.seed, (i * restarts + j) as u64);
            let start = if j < seeds.len() { seeds[j].clone() } else { problem.random(&mut rng, j % 2 == 1) };
            let mut pool = Vec::new();
            let mut stats = SearchStats { tasks: 1, ..Default::default() };
            local_search(problem, lambdas[i], start, config.iterations, &mut rng, &mut pool, &mut stats);
            (pool, stats)
        })
        .collect();
    let mut all = Vec::new();
    let mut stats = SearchStats::default();
    for (pool, s) in results {
        stats.merge(&s);
        all.extend(pool);
    }
    (all, stats)
}

fn into_region<T: Real>(pool: Vec<Scored<T>>, stats: SearchStats, mode: DetectionMode) -> Result<AchievableRegion<T>> {
    if pool.is_empty() {
        return Err(Error::NoConvergence { iterations: stats.evaluations, residual: f64::INFINITY });
    }
    let pts: Vec<ExponentPair<T>> = pool.iter().map(|s| s.point).collect();
    let mut keep = pareto_indices(&pts);
    // drop corners that another corner covers up to solver noise
    let tol = T::lit(FRONTIER_TOL);
    let mut by_sum = keep.clone();
    by_sum.sort_by(|&i, &j| {
        let (a, b) = (pts[i].theta1 + pts[i].theta2, pts[j].theta1 + pts[j].theta2);
        b.partial_cmp(&a).unwrap().then(i.cmp(&j))
    });
    let mut kept: Vec<usize> = Vec::new();
    for i in by_sum {
        if !kept.iter().any(|&k| pts[k].covers(&pts[i], tol)) {
            kept.push(i);
        }
    }
    keep.retain(|i| kept.contains(i));
    let mut slots: Vec<Option<Scored<T>>> = pool.into_iter().map(Some).collect();
    let witnesses: Vec<Witness<T>> = keep.iter().map(|&i| slots[i].take().unwrap().witness).collect();
    let region = ExponentRegion::from_points(witnesses.iter().map(|w| w.point), mode);
    Ok(AchievableRegion { region, witnesses, stats })
}

fn check_independence_structure<T: Real>(pair: &HypothesisPair<T>) -> Result<()> {
    let tol = T::lit(1e-9);
    let p = pair.p();
    let y12 = p.marginal(&[Y1, Y2])?;
    let split = p.marginal(&[Y1])?.product(&p.marginal(&[Y2])?)?;
    if y12.linf_distance(&split)? > tol {
        return Err(Error::WrongMode("testing against independence needs Y1 and Y2 independent under H = 0".into()));
    }
    if pair.p_bar().linf_distance(&p.product_of_marginals()?)? > tol {
        return Err(Error::WrongMode("testing against independence needs P̄ = P_X ⊗ P_Y1 ⊗ P_Y2 under H = 1".into()));
    }
    Ok(())
}

/// Whether `pair` has the testing-against-independence structure: Y1 ⊥ Y2
/// under H = 0 and P̄ = P_X ⊗ P_Y1 ⊗ P_Y2.
pub fn has_independence_structure<T: Real>(pair: &HypothesisPair<T>) -> bool {
    check_independence_structure(pair).is_ok()
}

struct IndependenceProblem<'a, T> {
    pair: &'a HypothesisPair<T>,
    r1: T,
    u_card: usize,
    cooperative: bool,
    warm: Vec<CondChannel<T>>,
}

impl<T: Real> IndependenceProblem<'_, T> {
    fn rate(&self, w: &CondChannel<T>) -> Result<T> {
        mutual_information(&attach_channel(&self.pair.px(), w)?, &[U], &[X], &[])
    }
}

impl<T: Real> Problem<T> for IndependenceProblem<'_, T> {
    fn seeds(&self) -> Vec<Cand<T>> {
        let nx = self.pair.sizes()[0];
        let mut s = vec![vec![CondChannel::constant(&[(X, nx)], U, &unit_row(self.u_card)).unwrap()]];
        if self.u_card >= nx {
            s.push(vec![CondChannel::identity((X, nx), (U, self.u_card)).unwrap()]);
        }
        s.extend(self.warm.iter().map(|w| vec![w.clone()]));
        s
    }

    fn random(&self, rng: &mut ChaCha8Rng, sparse: bool) -> Cand<T> {
        vec![random_channel(&[(X, self.pair.sizes()[0])], (U, self.u_card), rng, sparse)]
    }

    fn project(&self, c: Cand<T>) -> Result<Option<Cand<T>>> {
        let anchor = marginal_anchor(&self.pair.px(), &c[0])?;
        Ok(project_rate(&c[0], &anchor, self.r1, |w| self.rate(w))?.map(|w| vec![w]))
    }

    fn evaluate(&self, c: &Cand<T>) -> Result<Scored<T>> {
        let law = attach_channel(self.pair.p(), &c[0])?;
        let i1 = mutual_information(&law, &[U], &[Y1], &[])?;
        let i2 = mutual_information(&law, &[U], &[Y2], &[])?;
        let iux = mutual_information(&law, &[U], &[X], &[])?;
        let point = if self.cooperative { ExponentPair::new(i1, i1 + i2) } else { ExponentPair::new(i1, i2) };
        let ny1 = self.pair.sizes()[1];
        let v = CondChannel::constant(&[(Y1, ny1), (U, self.u_card)], V, &[T::one()])?;
        Ok(Scored {
            point,
            witness: Witness {
                point,
                aux: AuxChannels::new(c[0].clone(), v)?,
                i_ux: iux,
                i_vy1_given_u: T::zero(),
                i_u1x: None,
            },
        })
    }
}

fn unit_row<T: Real>(k: usize) -> Vec<T> {
    let mut r = vec![T::zero(); k];
    r[0] = T::one();
    r
}

fn independence_region<T: Real>(
    pair: &HypothesisPair<T>,
    r1: T,
    search: &SearchConfig,
    cooperative: bool,
) -> Result<AchievableRegion<T>> {
    check_independence_structure(pair)?;
    if !(r1 >= T::zero()) || !r1.is_finite() {
        return Err(Error::Input(format!("rate must be finite and nonnegative, got {r1}")));
    }
    let [nx, ny1, _] = pair.sizes();
    let (u_card, _) = search.cards(nx, ny1);
    let warm = search
        .warm_start
        .iter()
        .filter(|a| a.u_size() <= u_card)
        .map(|a| pad_outputs(&a.u_given_x.cast::<T>(), u_card))
        .collect::<Result<_>>()?;
    let problem = IndependenceProblem { pair, r1, u_card, cooperative, warm };
    let (pool, stats) = run_search(&problem, &search.lambdas(), search);
    into_region(pool, stats, DetectionMode::Coherent)
}

/// Optimal coherent region when testing against independence:
/// Pareto frontier of (I(U;Y1), I(U;Y1) + I(U;Y2)) over P_{U|X} with
/// I(U;X) ≤ r1 (nats).
pub fn region_test_against_independence<T: Real>(
    pair: &HypothesisPair<T>,
    r1: T,
    search: &SearchConfig,
) -> Result<AchievableRegion<T>> {
    independence_region(pair, r1, search, true)
}

/// Baseline without the Detector 1 → Detector 2 link: (I(U;Y1), I(U;Y2)) with
/// a common U.
pub fn region_test_against_independence_no_cooperation<T: Real>(
    pair: &HypothesisPair<T>,
    r1: T,
    search: &SearchConfig,
) -> Result<AchievableRegion<T>> {
    independence_region(pair, r1, search, false)
}

struct GeneralProblem<'a, T> {
    pair: &'a HypothesisPair<T>,
    rates: RatePair<T>,
    mode: DetectionMode,
    u_card: usize,
    v_card: usize,
    warm: Vec<AuxChannels<T>>,
    pxy1: JointPmf<T>,
}

impl<T: Real> GeneralProblem<'_, T> {
    fn aux(&self, c: &Cand<T>) -> Result<AuxChannels<T>> {
        AuxChannels::new(c[0].clone(), c[1].clone())
    }
}

impl<T: Real> Problem<T> for GeneralProblem<'_, T> {
    fn seeds(&self) -> Vec<Cand<T>> {
        let [nx, ny1, _] = self.pair.sizes();
        let mut s = Vec::new();
        let deg = AuxChannels::<T>::degenerate(nx, ny1).padded(self.u_card, self.v_card);
        if let Ok(a) = deg {
            s.push(vec![a.u_given_x, a.v_given_uy1]);
        }
        if self.u_card >= nx {
            let u = CondChannel::identity((X, nx), (U, self.u_card)).unwrap();
            let v1 = CondChannel::constant(&[(Y1, ny1), (U, self.u_card)], V, &unit_row(self.v_card)).unwrap();
            s.push(vec![u.clone(), v1]);
            if self.v_card >= ny1 {
                s.push(vec![u, copy_y1(ny1, self.u_card, self.v_card)]);
            }
        }
        s.extend(self.warm.iter().map(|a| vec![a.u_given_x.clone(), a.v_given_uy1.clone()]));
        s
    }

    fn random(&self, rng: &mut ChaCha8Rng, sparse: bool) -> Cand<T> {
        let [nx, ny1, _] = self.pair.sizes();
        vec![
            random_channel(&[(X, nx)], (U, self.u_card), rng, sparse),
            random_channel(&[(Y1, ny1), (U, self.u_card)], (V, self.v_card), rng, sparse),
        ]
    }

    fn project(&self, c: Cand<T>) -> Result<Option<Cand<T>>> {
        let px = self.pair.px();
        let u_anchor = marginal_anchor(&px, &c[0])?;
        let rate_u = |w: &CondChannel<T>| mutual_information(&attach_channel(&px, w)?, &[U], &[X], &[]);
        let Some(u) = project_rate(&c[0], &u_anchor, self.rates.r1, rate_u)? else {
            return Ok(None);
        };
        let law_u = attach_channel(&self.pxy1, &u)?;
        let v_anc = v_anchor(&self.pxy1, &u, &c[1])?;
        let rate_v = |w: &CondChannel<T>| mutual_information(&attach_channel(&law_u, w)?, &[V], &[Y1], &[U]);
        let Some(v) = project_rate(&c[1], &v_anc, self.rates.r2, rate_v)? else {
            return Ok(None);
        };
        Ok(Some(vec![u, v]))
    }

    fn evaluate(&self, c: &Cand<T>) -> Result<Scored<T>> {
        let aux = self.aux(c)?;
        let e = match self.mode {
            DetectionMode::Coherent => exponents_for_aux_coherent(self.pair, &aux)?,
            DetectionMode::Concurrent => exponents_for_aux_concurrent(self.pair, &aux, true)?,
        };
        let point = ExponentPair::new(e.theta1, e.theta2);
        Ok(Scored { point, witness: Witness { point, aux, i_ux: e.i_ux, i_vy1_given_u: e.i_vy1_given_u, i_u1x: None } })
    }
}

struct U1Problem<'a, T> {
    pair: &'a HypothesisPair<T>,
    r1: T,
    u_card: usize,
    warm: Vec<CondChannel<T>>,
}

impl<T: Real> Problem<T> for U1Problem<'_, T> {
    fn seeds(&self) -> Vec<Cand<T>> {
        let nx = self.pair.sizes()[0];
        let mut s = vec![vec![CondChannel::constant(&[(X, nx)], U, &unit_row(self.u_card)).unwrap()]];
        if self.u_card >= nx {
            s.push(vec![CondChannel::identity((X, nx), (U, self.u_card)).unwrap()]);
        }
        s.extend(self.warm.iter().map(|w| vec![w.clone()]));
        s
    }

    fn random(&self, rng: &mut ChaCha8Rng, sparse: bool) -> Cand<T> {
        vec![random_channel(&[(X, self.pair.sizes()[0])], (U, self.u_card), rng, sparse)]
    }

    fn project(&self, c: Cand<T>) -> Result<Option<Cand<T>>> {
        let pxb = self.pair.px_bar();
        let anchor = marginal_anchor(&pxb, &c[0])?;
        Ok(project_rate(&c[0], &anchor, self.r1, |w| i_u1x(self.pair, w))?.map(|w| vec![w]))
    }

    fn evaluate(&self, c: &Cand<T>) -> Result<Scored<T>> {
        let theta1 = theta1_generic(self.pair.p(), self.pair.p_bar(), &c[0])?;
        let [nx, ny1, _] = self.pair.sizes();
        let aux = AuxChannels::<T>::degenerate(nx, ny1).with_u1(c[0].clone())?;
        let point = ExponentPair::new(theta1, T::zero());
        Ok(Scored {
            point,
            witness: Witness {
                point,
                aux,
                i_ux: T::zero(),
                i_vy1_given_u: T::zero(),
                i_u1x: Some(i_u1x(self.pair, &c[0])?),
            },
        })
    }
}

/// Achievable region for the given rates, searched over auxiliary channels.
///
/// Coherent detection, and concurrent detection with equal X-marginals, trace
/// a frontier over λ. Concurrent detection with distinct X-marginals gives a
/// rectangle: θ1 is maximized over U1 alone and θ2 over (U, V) alone.
pub fn region_achievable<T: Real>(
    pair: &HypothesisPair<T>,
    rates: RatePair<T>,
    mode: DetectionMode,
    search: &SearchConfig,
) -> Result<AchievableRegion<T>> {
    let rates = RatePair::new(rates.r1, rates.r2)?;
    let [nx, ny1, _] = pair.sizes();
    let (u_card, v_card) = search.cards(nx, ny1);
    let warm: Vec<AuxChannels<T>> = search
        .warm_start
        .iter()
        .filter(|a| a.u_size() <= u_card && a.v_size() <= v_card)
        .map(|a| a.cast::<T>().padded(u_card, v_card))
        .collect::<Result<_>>()?;
    let general =
        GeneralProblem { pair, rates, mode, u_card, v_card, warm: warm.clone(), pxy1: pair.p().marginal(&[X, Y1])? };
    if mode == DetectionMode::Coherent || marginals_equal(pair) {
        let (pool, stats) = run_search(&general, &search.lambdas(), search);
        return into_region(pool, stats, mode);
    }
    // distinct marginals under concurrent detection: product region
    let u1 = U1Problem { pair, r1: rates.r1, u_card, warm: warm.iter().filter_map(|a| a.u1_given_x.clone()).collect() };
    let general = GeneralProblem { mode: DetectionMode::Coherent, ..general };
    let (pool1, s1) = run_search(&u1, &[1.0], search);
    let (pool2, mut stats) = run_search(&general, &[0.0], search);
    stats.merge(&s1);
    let best1 = pool1
        .into_iter()
        .max_by(|a, b| a.point.theta1.partial_cmp(&b.point.theta1).unwrap())
        .ok_or(Error::NoConvergence { iterations: stats.evaluations, residual: f64::INFINITY })?;
    let best2 = pool2
        .into_iter()
        .max_by(|a, b| a.point.theta2.partial_cmp(&b.point.theta2).unwrap())
        .ok_or(Error::NoConvergence { iterations: stats.evaluations, residual: f64::INFINITY })?;
    let point = ExponentPair::new(best1.point.theta1, best2.point.theta2);
    let aux = best2.witness.aux.clone().with_u1(best1.witness.aux.u1_given_x.clone().unwrap())?;
    let witness = Witness {
        point,
        aux,
        i_ux: best2.witness.i_ux,
        i_vy1_given_u: best2.witness.i_vy1_given_u,
        i_u1x: best1.witness.i_u1x,
    };
    Ok(AchievableRegion {
        region: ExponentRegion::rectangle(point, DetectionMode::Concurrent),
        witnesses: vec![witness],
        stats,
    })
}
