//! Finite-blocklength error probabilities of the coding schemes.
//!
//! Zero-rate schemes are evaluated exactly by enumerating joint types (every
//! decision depends only on the marginal types of x, y1, y2) or estimated by
//! Monte Carlo. The positive-rate random-coding scheme is Monte Carlo only.
//!
//! Typicality is the L∞ distance between an empirical type and a reference
//! pmf. Everything here is `f64`.

use crate::error::{Error, Result};
use crate::positive_rate::{AuxChannels, RatePair};
use crate::prob::{attach_channel, Axis, HypothesisPair, JointPmf};
use crate::region::{DetectionMode, ExponentPair};
use crate::zero_rate::{self, in_gamma_b1, marginals_equal, Mapping};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use Axis::{U, V, X, Y1, Y2};

/// Largest |X|·|Y1|·|Y2| for exact enumeration.
pub const EXACT_MAX_CELLS: usize = 12;
/// Largest blocklength for exact enumeration.
pub const EXACT_MAX_N: usize = 40;
/// Largest number of joint types the exact evaluator will visit.
pub const EXACT_MAX_TYPES: f64 = 2e8;
/// Largest number of x-types for which the one-bit partition is tabulated.
pub const MAX_X_TYPES: f64 = 2e5;
/// Positive-rate codebook budget: n·(R1 + R2) in nats.
pub const CODEBOOK_MAX_NATS: f64 = 26.0;
/// Positive-rate codebook budget: stored symbols per batch.
pub const CODEBOOK_MAX_SYMBOLS: f64 = 1.5e8;
/// Trials per Monte-Carlo work unit.
const CHUNK: u64 = 4096;
/// Positive-rate trials sharing one codebook draw.
pub const CODEBOOK_BATCH: u64 = 256;
/// Tolerance on typicality comparisons.
const TYP_EPS: f64 = 1e-12;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRateSchemeConfig {
    pub n: usize,
    /// Typicality radius (L∞ on types).
    pub mu: f64,
    /// Sensor alphabet: 2 or 3. Only matters for concurrent detection with
    /// distinct X-marginals.
    pub w1: u8,
    pub mapping: Mapping,
    /// Partition threshold in nats (one-bit scheme, `Different` mapping).
    pub r: f64,
    pub mode: DetectionMode,
    /// Per-observation multipliers on `mu`, for (x, y1, y2).
    pub radius_scale: [f64; 3],
}

impl ZeroRateSchemeConfig {
    pub fn new(n: usize, mu: f64, mode: DetectionMode) -> Self {
        Self { n, mu, w1: 3, mapping: Mapping::Different, r: 0.0, mode, radius_scale: [1.0; 3] }
    }

    pub fn with_w1(mut self, w1: u8) -> Self {
        self.w1 = w1;
        self
    }

    pub fn with_partition(mut self, mapping: Mapping, r: f64) -> Self {
        self.mapping = mapping;
        self.r = r;
        self
    }

    pub fn with_radius_scale(mut self, s: [f64; 3]) -> Self {
        self.radius_scale = s;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    fn radii(&self) -> [f64; 3] {
        [self.mu * self.radius_scale[0], self.mu * self.radius_scale[1], self.mu * self.radius_scale[2]]
    }
}

/// Error probabilities at one blocklength. `ci95` holds Wilson half-widths in
/// the order (α1, β1, α2, β2); it is zero for exact results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub n: usize,
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    /// −(1/n)·ln β1 (infinite when β1 = 0).
    pub exp_beta1: f64,
    pub exp_beta2: f64,
    pub ci95: [f64; 4],
    pub method: Method,
    /// Trials per hypothesis (Monte Carlo only).
    pub trials: u64,
}

impl ErrorEstimate {
    pub fn probabilities(&self) -> [f64; 4] {
        [self.alpha1, self.beta1, self.alpha2, self.beta2]
    }
}

/// Which zero-rate scheme a configuration selects on a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Scheme {
    Coherent,
    ConcurrentEqual,
    ConcurrentW1Ge3,
    ConcurrentW1Eq2 { b1: u8, different: bool, r: f64 },
}

fn validate_zero_rate(pair: &HypothesisPair<f64>, cfg: &ZeroRateSchemeConfig) -> Result<Scheme> {
    if cfg.n == 0 {
        return Err(Error::Input("blocklength must be positive".into()));
    }
    if !(cfg.mu > 0.0) || !cfg.mu.is_finite() {
        return Err(Error::Input(format!("typicality radius must be positive, got {}", cfg.mu)));
    }
    if cfg.radius_scale.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::Input("radius scales must be positive".into()));
    }
    if !cfg.r.is_finite() {
        return Err(Error::Input("partition threshold must be finite".into()));
    }
    let scheme = match cfg.mode {
        DetectionMode::Coherent => Scheme::Coherent,
        DetectionMode::Concurrent if marginals_equal(pair) => Scheme::ConcurrentEqual,
        DetectionMode::Concurrent => {
            let gap = pair.x_marginal_gap();
            let rx = cfg.radii()[0];
            if rx >= gap / 2.0 {
                return Err(Error::Precondition(format!(
                    "the typical sets of P_X and P̄_X must not intersect: need mu·scale_x < ‖P_X − P̄_X‖∞/2 = {}, got {rx}",
                    gap / 2.0
                )));
            }
            match cfg.w1 {
                3 => Scheme::ConcurrentW1Ge3,
                2 => {
                    pair.check_zero_rate_support()?;
                    let different = cfg.mapping == Mapping::Different;
                    Scheme::ConcurrentW1Eq2 { b1: u8::from(different), different, r: cfg.r }
                }
                w => return Err(Error::Input(format!("sensor alphabet must be 2 or 3, got {w}"))),
            }
        }
    };
    if (cfg.mode == DetectionMode::Coherent || scheme == Scheme::ConcurrentEqual) && cfg.w1 != 2 && cfg.w1 != 3 {
        return Err(Error::Input(format!("sensor alphabet must be 2 or 3, got {}", cfg.w1)));
    }
    Ok(scheme)
}

fn typical(counts: &[usize], n: usize, reference: &[f64], radius: f64) -> bool {
    let nf = n as f64;
    counts.iter().zip(reference).all(|(&c, &p)| (c as f64 / nf - p).abs() <= radius + TYP_EPS)
}

/// Sensor message of a zero-rate scheme given x-typicality and, for the
/// one-bit scheme, the partition rule at the x-type.
fn sensor_message(scheme: Scheme, x_p: bool, x_pb: bool, gamma_b1: impl FnOnce() -> bool) -> u8 {
    match scheme {
        Scheme::Coherent | Scheme::ConcurrentEqual => u8::from(x_p),
        Scheme::ConcurrentW1Ge3 => {
            if x_p {
                0
            } else if x_pb {
                1
            } else {
                2
            }
        }
        Scheme::ConcurrentW1Eq2 { b1, different, .. } => {
            if x_p {
                0
            } else if x_pb {
                b1
            } else if !different || gamma_b1() {
                // with the `Same` mapping every atypical type goes to Γ_1
                1
            } else {
                0
            }
        }
    }
}

/// (Ĥ1, Ĥ2) from the sensor message and the y-typicality flags.
fn decide(scheme: Scheme, m1: u8, y1_p: bool, y1_pb: bool, y2_p: bool) -> (u8, u8) {
    match scheme {
        Scheme::Coherent => {
            let pass = m1 == 1 && y1_p;
            (u8::from(!pass), u8::from(!(pass && y2_p)))
        }
        Scheme::ConcurrentEqual => {
            let h1 = u8::from(m1 == 1 && y1_pb);
            let m2_ok = m1 == 1 && y1_p;
            (h1, u8::from(!(m2_ok && y2_p)))
        }
        Scheme::ConcurrentW1Ge3 => {
            let h1 = u8::from(m1 == 1 && y1_pb);
            let m2_zero = m1 == 0 && y1_p;
            (h1, u8::from(!(m1 == 0 && m2_zero && y2_p)))
        }
        Scheme::ConcurrentW1Eq2 { b1, .. } => {
            let h1 = u8::from(m1 == b1 && y1_pb);
            let m2_zero = m1 == 0 && y1_p;
            (h1, u8::from(!(m1 == 0 && m2_zero && y2_p)))
        }
    }
}

/// Compositions of `n` into `k` nonnegative parts, lexicographic.
pub fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == k {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(left - c, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Number of compositions of `n` into `k` parts, as a float.
pub fn count_types(n: usize, k: usize) -> f64 {
    // C(n + k − 1, k − 1)
    let mut c = 1.0f64;
    for i in 1..k {
        c = c * (n + i) as f64 / i as f64;
    }
    c
}

/// Shared pieces of the zero-rate evaluators.
struct ZeroRateSetup {
    scheme: Scheme,
    n: usize,
    sizes: [usize; 3],
    radii: [f64; 3],
    px: Vec<f64>,
    pbx: Vec<f64>,
    py1: Vec<f64>,
    pby1: Vec<f64>,
    py2: Vec<f64>,
    /// One-bit scheme: Γ_{b(1)} membership per atypical x-type.
    gamma: HashMap<Vec<usize>, bool>,
}

impl ZeroRateSetup {
    fn new(pair: &HypothesisPair<f64>, cfg: &ZeroRateSchemeConfig) -> Result<Self> {
        let scheme = validate_zero_rate(pair, cfg)?;
        let marg = |law: &JointPmf<f64>, a: Axis| -> Result<Vec<f64>> { Ok(law.marginal(&[a])?.probs().to_vec()) };
        let mut s = Self {
            scheme,
            n: cfg.n,
            sizes: pair.sizes(),
            radii: cfg.radii(),
            px: marg(pair.p(), X)?,
            pbx: marg(pair.p_bar(), X)?,
            py1: marg(pair.p(), Y1)?,
            pby1: marg(pair.p_bar(), Y1)?,
            py2: marg(pair.p(), Y2)?,
            gamma: HashMap::new(),
        };
        if let Scheme::ConcurrentW1Eq2 { different: true, r, .. } = scheme {
            s.gamma = gamma_table(pair, cfg.n, &s, r)?;
        }
        Ok(s)
    }

    fn x_flags(&self, cx: &[usize]) -> (bool, bool) {
        (typical(cx, self.n, &self.px, self.radii[0]), typical(cx, self.n, &self.pbx, self.radii[0]))
    }

    fn message(&self, cx: &[usize]) -> u8 {
        let (x_p, x_pb) = self.x_flags(cx);
        sensor_message(self.scheme, x_p, x_pb, || self.gamma[cx])
    }

    fn decide(&self, m1: u8, cy1: &[usize], cy2: &[usize]) -> (u8, u8) {
        let y1_p = typical(cy1, self.n, &self.py1, self.radii[1]);
        let y1_pb = typical(cy1, self.n, &self.pby1, self.radii[1]);
        let y2_p = typical(cy2, self.n, &self.py2, self.radii[2]);
        decide(self.scheme, m1, y1_p, y1_pb, y2_p)
    }
}

/// Γ_{b(1)} membership of every atypical x-type at blocklength `n`, using
/// the per-type costs of [`zero_rate`] at the exact type.
fn gamma_table(pair: &HypothesisPair<f64>, n: usize, s: &ZeroRateSetup, r: f64) -> Result<HashMap<Vec<usize>, bool>> {
    let nx = s.sizes[0];
    if count_types(n, nx) > MAX_X_TYPES {
        return Err(Error::Resource(format!(
            "the one-bit partition needs {} x-types at n = {n}; the limit is {MAX_X_TYPES}",
            count_types(n, nx)
        )));
    }
    let atypical: Vec<Vec<usize>> = compositions(n, nx)
        .into_iter()
        .filter(|cx| {
            let (a, b) = s.x_flags(cx);
            !a && !b
        })
        .collect();
    atypical
        .into_par_iter()
        .map(|cx| {
            let member = partition_member(pair, &cx, n, r)?;
            Ok((cx, member))
        })
        .collect()
}

/// Whether the x-type with counts `cx` lies in Γ_{b(1)} for threshold `r`.
pub fn partition_member(pair: &HypothesisPair<f64>, cx: &[usize], n: usize, r: f64) -> Result<bool> {
    let pi: Vec<f64> = cx.iter().map(|&c| c as f64 / n as f64).collect();
    Ok(in_gamma_b1(zero_rate::e1(pair, &pi)?, zero_rate::e2(pair, &pi)?, r))
}

/// Compensated sum of probabilities given as logarithms.
#[derive(Debug, Clone, Copy)]
struct LogAcc {
    max: f64,
    sum: f64,
    comp: f64,
}

impl LogAcc {
    const EMPTY: Self = Self { max: f64::NEG_INFINITY, sum: 0.0, comp: 0.0 };

    fn add(&mut self, lp: f64) {
        if lp == f64::NEG_INFINITY {
            return;
        }
        if lp > self.max {
            if self.max > f64::NEG_INFINITY {
                let f = (self.max - lp).exp();
                self.sum *= f;
                self.comp *= f;
            }
            self.max = lp;
        }
        let x = (lp - self.max).exp();
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn ln(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + (self.sum + self.comp).ln()
        }
    }

    fn merge(&mut self, other: &Self) {
        self.add(other.ln());
    }
}

/// Per hypothesis: [Ĥ1 = 1, Ĥ1 = 0, Ĥ2 = 1, Ĥ2 = 0].
type EventAcc = [[LogAcc; 4]; 2];

struct Enumerator<'a> {
    setup: &'a ZeroRateSetup,
    lp: [Vec<f64>; 2],
    ln_fact: Vec<f64>,
}

struct Walk {
    cy1: Vec<usize>,
    cy2: Vec<usize>,
    acc: EventAcc,
}

impl Enumerator<'_> {
    fn rec(&self, k: usize, rem: usize, cx: &[usize], m1: u8, lw: [f64; 2], w: &mut Walk) {
        let [_, ny1, ny2] = self.setup.sizes;
        let block = ny1 * ny2;
        let cells = cx.len() * block;
        if k == cells {
            let (h1, h2) = self.setup.decide(m1, &w.cy1, &w.cy2);
            for (acc, &lw) in w.acc.iter_mut().zip(&lw) {
                let l = self.ln_fact[self.setup.n] + lw;
                acc[usize::from(1 - h1)].add(l);
                acc[2 + usize::from(1 - h2)].add(l);
            }
            return;
        }
        let x = k / block;
        let j = k % block;
        let rem = if j == 0 { cx[x] } else { rem };
        let (y1, y2) = (j / ny2, j % ny2);
        let range = if j + 1 == block { rem..=rem } else { 0..=rem };
        for c in range {
            let mut next = lw;
            if c > 0 {
                for (h, nl) in next.iter_mut().enumerate() {
                    *nl += c as f64 * self.lp[h][k] - self.ln_fact[c];
                }
                if next.iter().all(|v| *v == f64::NEG_INFINITY) {
                    continue;
                }
            }
            w.cy1[y1] += c;
            w.cy2[y2] += c;
            self.rec(k + 1, rem - c, cx, m1, next, w);
            w.cy1[y1] -= c;
            w.cy2[y2] -= c;
        }
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    for k in 1..=n {
        v[k] = v[k - 1] + (k as f64).ln();
    }
    v
}

fn ln_probs(law: &JointPmf<f64>) -> Vec<f64> {
    law.probs().iter().map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY }).collect()
}

fn exponent(ln_beta: f64, n: usize) -> f64 {
    if ln_beta == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        (-ln_beta / n as f64).max(0.0)
    }
}

/// Maps per-hypothesis event probabilities to (α1, β1, α2, β2) as logs.
/// Coherent: α1 = P0(Ĥ1=1), β1 = P1(Ĥ1=0). Concurrent: α1 = P1(Ĥ1=0),
/// β1 = P0(Ĥ1=1). Detector 2 is the same in both modes.
fn assign_errors<V: Copy>(mode: DetectionMode, ev: &[[V; 4]; 2]) -> [V; 4] {
    let (a1, b1) = match mode {
        DetectionMode::Coherent => (ev[0][0], ev[1][1]),
        DetectionMode::Concurrent => (ev[1][1], ev[0][0]),
    };
    [a1, b1, ev[0][2], ev[1][3]]
}

/// Exact error probabilities by joint-type enumeration.
pub fn exact_zero_rate_errors(pair: &HypothesisPair<f64>, cfg: &ZeroRateSchemeConfig) -> Result<ErrorEstimate> {
    let cells: usize = pair.sizes().iter().product();
    let types = count_types(cfg.n, cells);
    if cells > EXACT_MAX_CELLS || cfg.n > EXACT_MAX_N || types > EXACT_MAX_TYPES {
        return Err(Error::Resource(format!(
            "exact enumeration covers |X|·|Y1|·|Y2| <= {EXACT_MAX_CELLS}, n <= {EXACT_MAX_N} and at most {EXACT_MAX_TYPES:e} joint types \
             (here {cells} cells, n = {}, {types:e} types); use Monte Carlo instead",
            cfg.n
        )));
    }
    let setup = ZeroRateSetup::new(pair, cfg)?;
    let en =
        Enumerator { setup: &setup, lp: [ln_probs(pair.p()), ln_probs(pair.p_bar())], ln_fact: ln_factorials(cfg.n) };
    let [nx, ny1, ny2] = setup.sizes;
    let parts: Vec<EventAcc> = compositions(cfg.n, nx)
        .into_par_iter()
        .map(|cx| {
            let m1 = setup.message(&cx);
            let mut w = Walk { cy1: vec![0; ny1], cy2: vec![0; ny2], acc: [[LogAcc::EMPTY; 4]; 2] };
            en.rec(0, 0, &cx, m1, [0.0; 2], &mut w);
            w.acc
        })
        .collect();
    let mut total = [[LogAcc::EMPTY; 4]; 2];
    for p in &parts {
        for h in 0..2 {
            for e in 0..4 {
                total[h][e].merge(&p[h][e]);
            }
        }
    }
    let ln: [[f64; 4]; 2] = [0, 1].map(|h| [0, 1, 2, 3].map(|e| total[h][e].ln().min(0.0)));
    let errs = assign_errors(cfg.mode, &ln);
    Ok(ErrorEstimate {
        n: cfg.n,
        alpha1: errs[0].exp(),
        beta1: errs[1].exp(),
        alpha2: errs[2].exp(),
        beta2: errs[3].exp(),
        exp_beta1: exponent(errs[1], cfg.n),
        exp_beta2: exponent(errs[3], cfg.n),
        ci95: [0.0; 4],
        method: Method::Exact,
        trials: 0,
    })
}

/// Wilson score interval half-width at 95%.
pub fn wilson_half_width(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

fn chunk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn estimate_from_counts(n: usize, mode: DetectionMode, counts: &[[u64; 4]; 2], trials: u64) -> ErrorEstimate {
    let errs = assign_errors(mode, counts);
    let p = errs.map(|k| k as f64 / trials as f64);
    let ln = |v: f64| if v > 0.0 { v.ln() } else { f64::NEG_INFINITY };
    ErrorEstimate {
        n,
        alpha1: p[0],
        beta1: p[1],
        alpha2: p[2],
        beta2: p[3],
        exp_beta1: exponent(ln(p[1]), n),
        exp_beta2: exponent(ln(p[3]), n),
        ci95: errs.map(|k| wilson_half_width(k, trials)),
        method: Method::MonteCarlo,
        trials,
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials < 1000 {
        return Err(Error::Input(format!("Monte Carlo needs at least 1000 trials, got {trials}")));
    }
    Ok(())
}

/// Monte-Carlo estimate of the zero-rate scheme. Trials are split into
/// chunks with their own RNG stream, so results do not depend on scheduling.
pub fn monte_carlo_zero_rate(
    pair: &HypothesisPair<f64>,
    cfg: &ZeroRateSchemeConfig,
    trials: u64,
    seed: u64,
) -> Result<ErrorEstimate> {
    check_trials(trials)?;
    let setup = ZeroRateSetup::new(pair, cfg)?;
    let [nx, ny1, ny2] = setup.sizes;
    let samplers = [
        WeightedIndex::new(pair.p().probs()).map_err(|e| Error::Input(e.to_string()))?,
        WeightedIndex::new(pair.p_bar().probs()).map_err(|e| Error::Input(e.to_string()))?,
    ];
    let chunks = trials.div_ceil(CHUNK);
    let jobs: Vec<(usize, u64)> = (0..2).flat_map(|h| (0..chunks).map(move |c| (h, c))).collect();
    let parts: Vec<(usize, [u64; 4])> = jobs
        .par_iter()
        .map(|&(h, c)| {
            let mut rng = chunk_rng(seed, 2 * c + h as u64);
            let len = CHUNK.min(trials - c * CHUNK);
            let mut ev = [0u64; 4];
            let (mut cx, mut cy1, mut cy2) = (vec![0; nx], vec![0; ny1], vec![0; ny2]);
            for _ in 0..len {
                cx.fill(0);
                cy1.fill(0);
                cy2.fill(0);
                for _ in 0..setup.n {
                    let cell = samplers[h].sample(&mut rng);
                    cx[cell / (ny1 * ny2)] += 1;
                    cy1[(cell / ny2) % ny1] += 1;
                    cy2[cell % ny2] += 1;
                }
                let m1 = setup.message(&cx);
                let (h1, h2) = setup.decide(m1, &cy1, &cy2);
                ev[usize::from(1 - h1)] += 1;
                ev[2 + usize::from(1 - h2)] += 1;
            }
            (h, ev)
        })
        .collect();
    let mut counts = [[0u64; 4]; 2];
    for (h, ev) in parts {
        for e in 0..4 {
            counts[h][e] += ev[e];
        }
    }
    Ok(estimate_from_counts(cfg.n, cfg.mode, &counts, trials))
}

/// Asymptotic exponents of the zero-rate region point matching `cfg`.
pub fn theoretical_exponents(pair: &HypothesisPair<f64>, cfg: &ZeroRateSchemeConfig) -> Result<ExponentPair<f64>> {
    let region = match validate_zero_rate(pair, cfg)? {
        Scheme::Coherent => zero_rate::region_coherent(pair)?,
        Scheme::ConcurrentEqual => zero_rate::region_concurrent_equal_marginals(pair)?,
        Scheme::ConcurrentW1Ge3 => zero_rate::region_concurrent_w1_ge3(pair)?,
        Scheme::ConcurrentW1Eq2 { .. } => {
            let step = zero_rate::default_grid_step(pair.sizes()[0]);
            return zero_rate::one_bit_point(pair, cfg.mapping, cfg.r, step);
        }
    };
    Ok(region.corner().expect("rectangle"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub estimate: ErrorEstimate,
    pub theory: ExponentPair<f64>,
}

impl SweepRow {
    /// |empirical − theoretical| for both detectors.
    pub fn gaps(&self) -> [f64; 2] {
        [(self.estimate.exp_beta1 - self.theory.theta1).abs(), (self.estimate.exp_beta2 - self.theory.theta2).abs()]
    }
}

/// Error exponents at each blocklength next to the asymptotic ones. Uses
/// exact enumeration when it fits the budget, Monte Carlo otherwise.
pub fn exponent_convergence_sweep(
    pair: &HypothesisPair<f64>,
    template: &ZeroRateSchemeConfig,
    n_list: &[usize],
    mc_trials: u64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Input("blocklengths must be strictly ascending".into()));
    }
    let theory = theoretical_exponents(pair, template)?;
    n_list
        .iter()
        .map(|&n| {
            let cfg = template.with_n(n);
            let estimate = match exact_zero_rate_errors(pair, &cfg) {
                Err(Error::Resource(_)) => monte_carlo_zero_rate(pair, &cfg, mc_trials, seed)?,
                other => other?,
            };
            Ok(SweepRow { n, estimate, theory })
        })
        .collect()
}

/// Settings of the positive-rate scheme simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositiveRateSimConfig {
    pub n: usize,
    /// Base radius; the scheme tests at μ/8, μ/4, μ/2 and μ.
    pub mu: f64,
    pub mode: DetectionMode,
    /// Run the U1 check before the U test at the sensor.
    pub reversed_order: bool,
}

impl PositiveRateSimConfig {
    pub fn new(n: usize, mu: f64, mode: DetectionMode) -> Self {
        Self { n, mu, mode, reversed_order: false }
    }
}

/// Reference joint type with its axis strides, for typicality of tuples of
/// sequences listed in canonical axis order.
struct JointRef {
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl JointRef {
    fn of(law: &JointPmf<f64>, axes: &[Axis]) -> Result<Self> {
        let m = law.marginal(axes)?;
        Ok(Self { sizes: m.sizes().to_vec(), probs: m.probs().to_vec() })
    }

    /// `seqs` must follow the canonical order of the reference axes.
    fn typical(&self, seqs: &[&[u8]], radius: f64, scratch: &mut Vec<usize>) -> bool {
        let n = seqs[0].len();
        scratch.clear();
        scratch.resize(self.probs.len(), 0);
        for t in 0..n {
            let mut idx = 0;
            for (s, &k) in seqs.iter().zip(&self.sizes) {
                idx = idx * k + s[t] as usize;
            }
            scratch[idx] += 1;
        }
        typical(scratch, n, &self.probs, radius)
    }
}

/// Precomputed laws of the positive-rate scheme.
struct SchemeLaws {
    nu: usize,
    nv: usize,
    nu1: usize,
    p_u: Vec<f64>,
    /// P_{V|U} rows.
    p_v_given_u: Vec<Vec<f64>>,
    p_ux: JointRef,
    p_uy1: JointRef,
    pb_uy1: JointRef,
    p_uvy1: JointRef,
    p_uvy2: JointRef,
    u1: Option<(Vec<f64>, JointRef, JointRef)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SensorMsg {
    Zero,
    One(usize),
    Two(usize),
}

fn positive_rate_laws(pair: &HypothesisPair<f64>, aux: &AuxChannels<f64>, unequal: bool) -> Result<SchemeLaws> {
    let p = attach_channel(&attach_channel(pair.p(), &aux.u_given_x)?, &aux.v_given_uy1)?;
    let pb = attach_channel(&pair.p_bar().marginal(&[X, Y1])?, &aux.u_given_x)?;
    let nu = aux.u_size();
    let nv = aux.v_size();
    let vu = p.conditional(V, &[U])?;
    let u1 = if unequal {
        let c = aux.u1_given_x.as_ref().ok_or_else(|| {
            Error::Input("distinct X-marginals under concurrent detection need a P̄_{U1|X} channel".into())
        })?;
        let law = attach_channel(&pair.p_bar().marginal(&[X, Y1])?, c)?;
        Some((law.marginal(&[U])?.probs().to_vec(), JointRef::of(&law, &[X, U])?, JointRef::of(&law, &[Y1, U])?))
    } else {
        None
    };
    Ok(SchemeLaws {
        nu,
        nv,
        nu1: aux.u1_given_x.as_ref().map_or(0, |c| c.output_size()),
        p_u: p.marginal(&[U])?.probs().to_vec(),
        p_v_given_u: (0..nu).map(|u| vu.row(u).to_vec()).collect(),
        p_ux: JointRef::of(&p, &[X, U])?,
        p_uy1: JointRef::of(&p, &[Y1, U])?,
        pb_uy1: JointRef::of(&pb, &[Y1, U])?,
        p_uvy1: JointRef::of(&p, &[Y1, U, V])?,
        p_uvy2: JointRef::of(&p, &[Y2, U, V])?,
        u1,
    })
}

fn draw_seq<R: Rng>(rng: &mut R, dist: &WeightedIndex<f64>, n: usize) -> Vec<u8> {
    (0..n).map(|_| dist.sample(rng) as u8).collect()
}

fn weighted(p: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(p).map_err(|e| Error::Input(format!("cannot sample from {p:?}: {e}")))
}

/// Monte-Carlo estimate of the random-coding scheme with auxiliaries `aux`
/// at `rates` (nats). Codebooks are redrawn every [`CODEBOOK_BATCH`] trials;
/// codebook sizes are ⌊e^{nR}⌋.
pub fn monte_carlo_positive_rate(
    pair: &HypothesisPair<f64>,
    aux: &AuxChannels<f64>,
    rates: RatePair<f64>,
    cfg: &PositiveRateSimConfig,
    trials: u64,
    seed: u64,
) -> Result<ErrorEstimate> {
    check_trials(trials)?;
    let rates = RatePair::new(rates.r1, rates.r2)?;
    let n = cfg.n;
    if n == 0 || !(cfg.mu > 0.0) || !cfg.mu.is_finite() {
        return Err(Error::Input("need n >= 1 and a positive radius".into()));
    }
    let [nx, ny1, ny2] = pair.sizes();
    if aux.u_given_x.input_sizes()[0] != nx || aux.v_given_uy1.input_sizes()[0] != ny1 {
        return Err(Error::Shape("auxiliary channels do not match the pair's alphabets".into()));
    }
    let unequal = cfg.mode == DetectionMode::Concurrent && !marginals_equal(pair);
    let laws = positive_rate_laws(pair, aux, unequal)?;
    if [nx, ny1, ny2, laws.nu, laws.nv, laws.nu1].iter().any(|&k| k > 255) {
        return Err(Error::Input("alphabets above 255 symbols are not supported".into()));
    }
    if unequal {
        let gap = pair.x_marginal_gap();
        let need = (laws.nu + laws.nu1) as f64 * cfg.mu / 8.0;
        if gap <= need {
            return Err(Error::Precondition(format!(
                "the typical sets of P_X and P̄_X at radius mu/8 must not intersect: need ‖P_X − P̄_X‖∞ > (|U| + |U1|)·mu/8 = {need}, got {gap}"
            )));
        }
    }
    let nats = n as f64 * (rates.r1 + rates.r2);
    if nats > CODEBOOK_MAX_NATS {
        return Err(Error::Resource(format!(
            "codebooks need n·(R1 + R2) = {nats} nats; the limit is {CODEBOOK_MAX_NATS}"
        )));
    }
    let m1 = ((n as f64 * rates.r1).exp().floor() as usize).max(1);
    let m2 = ((n as f64 * rates.r2).exp().floor() as usize).max(1);
    let per_batch =
        n as f64 * (m1 as f64 * (1.0 + f64::from(u8::from(unequal))) + (2 * CODEBOOK_BATCH) as f64 * m2 as f64);
    if per_batch > CODEBOOK_MAX_SYMBOLS {
        return Err(Error::Resource(format!(
            "codebooks of sizes {m1} and {m2} at n = {n} need {per_batch:e} symbols per batch; the limit is {CODEBOOK_MAX_SYMBOLS:e}"
        )));
    }
    let sources = [weighted(pair.p().probs())?, weighted(pair.p_bar().probs())?];
    let u_dist = weighted(&laws.p_u)?;
    let v_dists: Vec<Option<WeightedIndex<f64>>> = laws.p_v_given_u.iter().map(|r| weighted(r).ok()).collect();
    let u1_dist = laws.u1.as_ref().map(|(p, _, _)| weighted(p)).transpose()?;
    let batches = trials.div_ceil(CODEBOOK_BATCH);
    let parts: Vec<[[u64; 4]; 2]> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let len = CODEBOOK_BATCH.min(trials - b * CODEBOOK_BATCH);
            let mut book_rng = chunk_rng(seed, 3 * b);
            let cu: Vec<Vec<u8>> = (0..m1).map(|_| draw_seq(&mut book_rng, &u_dist, n)).collect();
            let cu1: Vec<Vec<u8>> = match &u1_dist {
                Some(d) => (0..m1).map(|_| draw_seq(&mut book_rng, d, n)).collect(),
                None => Vec::new(),
            };
            let mut cv: HashMap<usize, Vec<Vec<u8>>> = HashMap::new();
            let mut ev = [[0u64; 4]; 2];
            for (h, src) in sources.iter().enumerate() {
                let mut rng = chunk_rng(seed, 3 * b + 1 + h as u64);
                for _ in 0..len {
                    let (h1, h2) = positive_rate_trial(
                        &laws,
                        cfg,
                        unequal,
                        src,
                        &cu,
                        &cu1,
                        &mut cv,
                        &v_dists,
                        [nx, ny1, ny2],
                        m2,
                        seed,
                        b,
                        &mut rng,
                    );
                    ev[h][usize::from(1 - h1)] += 1;
                    ev[h][2 + usize::from(1 - h2)] += 1;
                }
            }
            ev
        })
        .collect();
    let mut counts = [[0u64; 4]; 2];
    for ev in parts {
        for h in 0..2 {
            for e in 0..4 {
                counts[h][e] += ev[h][e];
            }
        }
    }
    Ok(estimate_from_counts(n, cfg.mode, &counts, trials))
}

/// Superposition codebook C_V(m1), drawn from its own RNG stream so that it
/// does not depend on the order in which trials request it.
fn v_codebook(
    u: &[u8],
    v_dists: &[Option<WeightedIndex<f64>>],
    m2: usize,
    seed: u64,
    batch: u64,
    m1: usize,
) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7f4a_7c15_9e37_79b9);
    rng.set_stream(batch.wrapping_mul(1 << 40).wrapping_add(m1 as u64));
    (0..m2)
        .map(|_| {
            u.iter()
                .map(|&s| match &v_dists[s as usize] {
                    Some(d) => d.sample(&mut rng) as u8,
                    None => 0,
                })
                .collect()
        })
        .collect()
}

fn pick<R: Rng>(rng: &mut R, hits: &[usize]) -> Option<usize> {
    if hits.is_empty() {
        None
    } else {
        Some(hits[rng.random_range(0..hits.len())])
    }
}

#[allow(clippy::too_many_arguments)]
fn positive_rate_trial<R: Rng>(
    laws: &SchemeLaws,
    cfg: &PositiveRateSimConfig,
    unequal: bool,
    src: &WeightedIndex<f64>,
    cu: &[Vec<u8>],
    cu1: &[Vec<u8>],
    cv: &mut HashMap<usize, Vec<Vec<u8>>>,
    v_dists: &[Option<WeightedIndex<f64>>],
    sizes: [usize; 3],
    m2: usize,
    seed: u64,
    batch: u64,
    rng: &mut R,
) -> (u8, u8) {
    let [_, ny1, ny2] = sizes;
    let n = cfg.n;
    let mu = cfg.mu;
    let (mut xs, mut y1s, mut y2s) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let cell = src.sample(rng);
        xs.push((cell / (ny1 * ny2)) as u8);
        y1s.push(((cell / ny2) % ny1) as u8);
        y2s.push((cell % ny2) as u8);
    }
    let mut scratch = Vec::new();
    // sensor
    let u_test = |scratch: &mut Vec<usize>, rng: &mut R| -> Option<usize> {
        let hits: Vec<usize> =
            (0..cu.len()).filter(|&m| laws.p_ux.typical(&[&xs, &cu[m]], mu / 8.0, scratch)).collect();
        pick(rng, &hits)
    };
    let u1_test = |scratch: &mut Vec<usize>, rng: &mut R| -> Option<usize> {
        let (_, ux, _) = laws.u1.as_ref()?;
        let hits: Vec<usize> = (0..cu1.len()).filter(|&m| ux.typical(&[&xs, &cu1[m]], mu / 8.0, scratch)).collect();
        pick(rng, &hits)
    };
    let msg = if unequal && cfg.reversed_order {
        match u1_test(&mut scratch, rng) {
            Some(m) => SensorMsg::Two(m),
            None => u_test(&mut scratch, rng).map_or(SensorMsg::Zero, SensorMsg::One),
        }
    } else {
        match u_test(&mut scratch, rng) {
            Some(m) => SensorMsg::One(m),
            None if unequal => u1_test(&mut scratch, rng).map_or(SensorMsg::Zero, SensorMsg::Two),
            None => SensorMsg::Zero,
        }
    };
    // Detector 1
    let p_test = |m: usize, scratch: &mut Vec<usize>| laws.p_uy1.typical(&[&y1s, &cu[m]], mu / 4.0, scratch);
    let (h1, forward) = match (cfg.mode, msg) {
        (DetectionMode::Coherent, SensorMsg::One(m)) => {
            let ok = p_test(m, &mut scratch);
            (u8::from(!ok), ok.then_some(m))
        }
        (DetectionMode::Coherent, _) => (1, None),
        (DetectionMode::Concurrent, SensorMsg::One(m)) => {
            let h1 = if unequal { 0 } else { u8::from(laws.pb_uy1.typical(&[&y1s, &cu[m]], mu / 4.0, &mut scratch)) };
            (h1, p_test(m, &mut scratch).then_some(m))
        }
        (DetectionMode::Concurrent, SensorMsg::Two(m)) => {
            let (_, _, u1y1) = laws.u1.as_ref().expect("U1 law present");
            (u8::from(u1y1.typical(&[&y1s, &cu1[m]], mu / 4.0, &mut scratch)), None)
        }
        (DetectionMode::Concurrent, SensorMsg::Zero) => (0, None),
    };
    // Detector 1 → Detector 2
    let Some(m) = forward else {
        return (h1, 1);
    };
    let book = cv.entry(m).or_insert_with(|| v_codebook(&cu[m], v_dists, m2, seed, batch, m));
    let hits: Vec<usize> =
        (0..book.len()).filter(|&k| laws.p_uvy1.typical(&[&y1s, &cu[m], &book[k]], mu / 2.0, &mut scratch)).collect();
    let Some(k) = pick(rng, &hits) else {
        return (h1, 1);
    };
    // Detector 2
    let ok = laws.p_uvy2.typical(&[&y2s, &cu[m], &book[k]], mu, &mut scratch);
    (h1, u8::from(!ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn binary_pair() -> HypothesisPair<f64> {
        HypothesisPair::from_tables(
            [2, 2, 2],
            vec![0.2, 0.1, 0.05, 0.15, 0.1, 0.05, 0.15, 0.2],
            vec![0.1, 0.15, 0.15, 0.1, 0.15, 0.1, 0.1, 0.15],
        )
        .unwrap()
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(5, 3).len(), 21);
        assert_eq!(count_types(5, 3), 21.0);
        assert_eq!(compositions(0, 2), vec![vec![0, 0]]);
    }

    #[test]
    fn log_accumulator_handles_tiny_terms() {
        let mut a = LogAcc::EMPTY;
        for _ in 0..1000 {
            a.add(-720.0);
        }
        assert!((a.ln() - (-720.0 + 1000f64.ln())).abs() < 1e-12);
        a.add(f64::NEG_INFINITY);
        assert!((a.ln() - (-720.0 + 1000f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn exact_probabilities_sum_to_one() {
        let pair = binary_pair();
        let cfg = ZeroRateSchemeConfig::new(10, 0.1, DetectionMode::Coherent);
        let setup = ZeroRateSetup::new(&pair, &cfg).unwrap();
        let en =
            Enumerator { setup: &setup, lp: [ln_probs(pair.p()), ln_probs(pair.p_bar())], ln_fact: ln_factorials(10) };
        let mut total = [[LogAcc::EMPTY; 4]; 2];
        for cx in compositions(10, 2) {
            let mut w = Walk { cy1: vec![0; 2], cy2: vec![0; 2], acc: [[LogAcc::EMPTY; 4]; 2] };
            en.rec(0, 0, &cx, setup.message(&cx), [0.0; 2], &mut w);
            for (t, a) in total.iter_mut().flatten().zip(w.acc.iter().flatten()) {
                t.merge(a);
            }
        }
        for t in &total {
            let s1 = t[0].ln().exp() + t[1].ln().exp();
            let s2 = t[2].ln().exp() + t[3].ln().exp();
            assert!((s1 - 1.0).abs() < 1e-12 && (s2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn budget_and_preconditions() {
        let pair = models::example1::<f64>();
        let cfg = ZeroRateSchemeConfig::new(41, 0.1, DetectionMode::Coherent);
        assert!(matches!(exact_zero_rate_errors(&pair, &cfg), Err(Error::Resource(_))));
        let pair = models::example6::<f64>();
        let cfg = ZeroRateSchemeConfig::new(8, 0.1, DetectionMode::Concurrent);
        assert!(matches!(exact_zero_rate_errors(&pair, &cfg), Err(Error::Precondition(_))));
        let cfg = ZeroRateSchemeConfig::new(8, 0.1, DetectionMode::Coherent);
        assert!(matches!(monte_carlo_zero_rate(&pair, &cfg, 999, 1), Err(Error::Input(_))));
    }

    #[test]
    fn wilson_width_is_symmetric() {
        assert_eq!(wilson_half_width(30, 100), wilson_half_width(70, 100));
        assert!(wilson_half_width(0, 1000) > 0.0);
    }
}
