//! Finite-alphabet probability primitives.
//!
//! A [`JointPmf`] is a dense table over a product of named coordinates. Axes
//! are always stored in canonical order `X, Y1, Y2, U, V` with the last axis
//! varying fastest. All information measures are in nats.

use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Coordinate label of a joint pmf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y1,
    Y2,
    U,
    V,
}

impl Axis {
    pub const ALL: [Axis; 5] = [Axis::X, Axis::Y1, Axis::Y2, Axis::U, Axis::V];

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Y1 => "Y1",
            Axis::Y2 => "Y2",
            Axis::U => "U",
            Axis::V => "V",
        }
    }
}

/// Row-major strides for the given sizes (last axis fastest).
pub(crate) fn strides(sizes: &[usize]) -> Vec<usize> {
    let mut s = vec![1; sizes.len()];
    for i in (0..sizes.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * sizes[i + 1];
    }
    s
}

/// Advances a multi-index in row-major order. Returns false after the last cell.
pub(crate) fn next_index(idx: &mut [usize], sizes: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < sizes[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

fn sorted_axes(axes: &[Axis]) -> Result<Vec<Axis>> {
    let mut v = axes.to_vec();
    v.sort();
    for w in v.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateAxis(w[0]));
        }
    }
    Ok(v)
}

/// Probability mass function over a finite product alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPmf<T> {
    axes: Vec<Axis>,
    sizes: Vec<usize>,
    probs: Vec<T>,
}

impl<T: Real> JointPmf<T> {
    /// Builds a pmf from `(axis, size)` pairs in any order and a row-major table
    /// laid out in that same order. The result is stored canonically.
    pub fn new(layout: &[(Axis, usize)], probs: Vec<T>) -> Result<Self> {
        let pmf = Self::from_layout_unchecked(layout, probs)?;
        pmf.validate()?;
        Ok(pmf)
    }

    /// Like [`JointPmf::new`] but rescales nonnegative weights to unit mass.
    pub fn normalized(layout: &[(Axis, usize)], weights: Vec<T>) -> Result<Self> {
        let mut pmf = Self::from_layout_unchecked(layout, weights)?;
        let total: T = pmf.probs.iter().copied().sum();
        if !(total > T::zero()) || !total.is_finite() {
            return Err(Error::NotNormalized(total.as_f64()));
        }
        for p in &mut pmf.probs {
            *p = *p / total;
        }
        pmf.validate()?;
        Ok(pmf)
    }

    /// Uniform pmf over the given layout.
    pub fn uniform(layout: &[(Axis, usize)]) -> Result<Self> {
        let n: usize = layout.iter().map(|&(_, s)| s).product();
        Self::normalized(layout, vec![T::one(); n])
    }

    /// Point mass at the given (canonical-order) index.
    pub fn point_mass(layout: &[(Axis, usize)], at: &[usize]) -> Result<Self> {
        let mut pmf = Self::from_layout_unchecked(layout, vec![])?;
        let n: usize = pmf.sizes.iter().product();
        pmf.probs = vec![T::zero(); n];
        let flat = pmf.flat_index(at)?;
        pmf.probs[flat] = T::one();
        Ok(pmf)
    }

    fn from_layout_unchecked(layout: &[(Axis, usize)], probs: Vec<T>) -> Result<Self> {
        if layout.is_empty() {
            return Err(Error::Shape("a pmf needs at least one axis".into()));
        }
        let axes: Vec<Axis> = layout.iter().map(|&(a, _)| a).collect();
        let canon = sorted_axes(&axes)?;
        let in_sizes: Vec<usize> = layout.iter().map(|&(_, s)| s).collect();
        if let Some(&(a, _)) = layout.iter().find(|&&(_, s)| s == 0) {
            return Err(Error::Shape(format!("axis {a:?} has size 0")));
        }
        let total: usize = in_sizes.iter().product();
        if !probs.is_empty() && probs.len() != total {
            return Err(Error::Shape(format!(
                "table has {} entries but the axis sizes multiply to {total}",
                probs.len()
            )));
        }
        // position of each canonical axis in the input layout
        let perm: Vec<usize> = canon.iter().map(|a| axes.iter().position(|b| b == a).unwrap()).collect();
        let sizes: Vec<usize> = perm.iter().map(|&i| in_sizes[i]).collect();
        if probs.is_empty() || perm.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(Self { axes: canon, sizes, probs });
        }
        let in_strides = strides(&in_sizes);
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; sizes.len()];
        loop {
            let src: usize = idx.iter().zip(&perm).map(|(&v, &p)| v * in_strides[p]).sum();
            out.push(probs[src]);
            if !next_index(&mut idx, &sizes) {
                break;
            }
        }
        Ok(Self { axes: canon, sizes, probs: out })
    }

    fn validate(&self) -> Result<()> {
        let total: usize = self.sizes.iter().product();
        if self.probs.len() != total {
            return Err(Error::Shape(format!("table has {} entries, expected {total}", self.probs.len())));
        }
        for (flat, &p) in self.probs.iter().enumerate() {
            if !(p >= T::zero()) || !p.is_finite() {
                return Err(Error::NegativeProbability { cell: self.multi_index(flat), value: p.as_f64() });
            }
        }
        let s: T = self.probs.iter().copied().sum();
        if (s - T::one()).abs() > T::sum_tolerance() {
            return Err(Error::NotNormalized(s.as_f64()));
        }
        Ok(())
    }

    /// Internal constructor for tables already in canonical layout and known valid
    /// up to rounding.
    pub(crate) fn from_canonical(axes: Vec<Axis>, sizes: Vec<usize>, probs: Vec<T>) -> Self {
        debug_assert_eq!(sizes.iter().product::<usize>(), probs.len());
        Self { axes, sizes, probs }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `(axis, size)` pairs in canonical order.
    pub fn layout(&self) -> Vec<(Axis, usize)> {
        self.axes.iter().copied().zip(self.sizes.iter().copied()).collect()
    }

    pub fn has_axis(&self, axis: Axis) -> bool {
        self.axes.contains(&axis)
    }

    pub fn position(&self, axis: Axis) -> Result<usize> {
        self.axes.iter().position(|&a| a == axis).ok_or(Error::UnknownAxis(axis))
    }

    pub fn size_of(&self, axis: Axis) -> Result<usize> {
        Ok(self.sizes[self.position(axis)?])
    }

    pub fn flat_index(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.sizes.len() || idx.iter().zip(&self.sizes).any(|(&i, &s)| i >= s) {
            return Err(Error::Shape(format!("index {idx:?} out of range for {:?}", self.sizes)));
        }
        Ok(idx.iter().zip(strides(&self.sizes)).map(|(&i, s)| i * s).sum())
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let st = strides(&self.sizes);
        st.iter()
            .map(|&s| {
                let v = flat / s;
                flat %= s;
                v
            })
            .collect()
    }

    pub fn get(&self, idx: &[usize]) -> Result<T> {
        Ok(self.probs[self.flat_index(idx)?])
    }

    /// For every cell, the flat index of its image in the marginal over `axes`.
    /// Returns the canonical marginal layout alongside the map.
    pub(crate) fn projection_map(&self, axes: &[Axis]) -> Result<(Vec<Axis>, Vec<usize>, Vec<usize>)> {
        if axes.is_empty() {
            return Err(Error::Shape("marginal needs a nonempty axis set".into()));
        }
        let keep = sorted_axes(axes)?;
        let pos: Vec<usize> = keep.iter().map(|&a| self.position(a)).collect::<Result<_>>()?;
        let sub_sizes: Vec<usize> = pos.iter().map(|&p| self.sizes[p]).collect();
        let sub_strides = strides(&sub_sizes);
        let mut map = Vec::with_capacity(self.probs.len());
        let mut idx = vec![0usize; self.sizes.len()];
        loop {
            map.push(pos.iter().zip(&sub_strides).map(|(&p, &s)| idx[p] * s).sum());
            if !next_index(&mut idx, &self.sizes) {
                break;
            }
        }
        Ok((keep, sub_sizes, map))
    }

    /// Sums out every coordinate not in `axes`.
    pub fn marginal(&self, axes: &[Axis]) -> Result<Self> {
        let (keep, sub_sizes, map) = self.projection_map(axes)?;
        let mut out = vec![T::zero(); sub_sizes.iter().product()];
        for (&p, &m) in self.probs.iter().zip(&map) {
            out[m] = out[m] + p;
        }
        Ok(Self::from_canonical(keep, sub_sizes, out))
    }

    /// Outer product of two pmfs on disjoint axes.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if let Some(a) = self.axes.iter().find(|a| other.axes.contains(a)) {
            return Err(Error::Overlap(format!("both factors carry axis {a:?}")));
        }
        let mut layout = self.layout();
        layout.extend(other.layout());
        let mut probs = Vec::with_capacity(self.len() * other.len());
        for &p in &self.probs {
            for &q in &other.probs {
                probs.push(p * q);
            }
        }
        let mut out = Self::from_layout_unchecked(&layout, probs)?;
        out.renormalize();
        Ok(out)
    }

    /// Product of the single-axis marginals.
    pub fn product_of_marginals(&self) -> Result<Self> {
        let mut acc = self.marginal(&[self.axes[0]])?;
        for &a in &self.axes[1..] {
            acc = acc.product(&self.marginal(&[a])?)?;
        }
        Ok(acc)
    }

    /// Conditional pmf of `of` given `given`, as a channel. Rows where the
    /// conditioning event has zero mass are filled with the uniform law.
    pub fn conditional(&self, of: Axis, given: &[Axis]) -> Result<CondChannel<T>> {
        if given.contains(&of) {
            return Err(Error::Overlap(format!("{of:?} is both conditioned and conditioning")));
        }
        let mut both = given.to_vec();
        both.push(of);
        let joint = self.marginal(&both)?;
        let out_size = self.size_of(of)?;
        let inputs = sorted_axes(given)?;
        let in_sizes: Vec<usize> = inputs.iter().map(|&a| self.size_of(a)).collect::<Result<_>>()?;
        let rows: usize = in_sizes.iter().product();
        // reorder the joint so the conditioned axis is last
        let mut probs = vec![T::zero(); rows * out_size];
        let out_pos = joint.position(of)?;
        let in_pos: Vec<usize> = inputs.iter().map(|&a| joint.position(a)).collect::<Result<_>>()?;
        let in_strides = strides(&in_sizes);
        let mut idx = vec![0usize; joint.sizes.len()];
        let mut flat = 0;
        loop {
            let row: usize = in_pos.iter().zip(&in_strides).map(|(&p, &s)| idx[p] * s).sum();
            probs[row * out_size + idx[out_pos]] = joint.probs[flat];
            flat += 1;
            if !next_index(&mut idx, &joint.sizes) {
                break;
            }
        }
        for r in 0..rows {
            let row = &mut probs[r * out_size..(r + 1) * out_size];
            let s: T = row.iter().copied().sum();
            if s > T::zero() {
                row.iter_mut().for_each(|p| *p = *p / s);
            } else {
                let u = T::one() / T::from_usize(out_size).unwrap();
                row.iter_mut().for_each(|p| *p = u);
            }
        }
        CondChannel::new(
            &inputs.iter().copied().zip(in_sizes.iter().copied()).collect::<Vec<_>>(),
            (of, out_size),
            probs,
        )
    }

    /// Rescales the table to unit mass (absorbs rounding drift).
    pub(crate) fn renormalize(&mut self) {
        let s: T = self.probs.iter().copied().sum();
        if s > T::zero() {
            for p in &mut self.probs {
                *p = *p / s;
            }
        }
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.axes == other.axes && self.sizes == other.sizes
    }

    /// Largest absolute cellwise difference. Errors if the shapes differ.
    pub fn linf_distance(&self, other: &Self) -> Result<T> {
        if !self.same_shape(other) {
            return Err(Error::Shape(format!("cannot compare {:?} with {:?}", self.layout(), other.layout())));
        }
        Ok(self.probs.iter().zip(&other.probs).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max))
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.linf_distance(other).map(|d| d <= tol).unwrap_or(false)
    }

    /// Same table with elements converted to another scalar type.
    pub fn cast<S: Real>(&self) -> JointPmf<S> {
        JointPmf {
            axes: self.axes.clone(),
            sizes: self.sizes.clone(),
            probs: self.probs.iter().map(|&p| S::lit(p.as_f64())).collect(),
        }
    }

    /// Relabels an axis (same size).
    pub fn rename_axis(&self, from: Axis, to: Axis) -> Result<Self> {
        if from == to {
            return Ok(self.clone());
        }
        if self.has_axis(to) {
            return Err(Error::DuplicateAxis(to));
        }
        self.position(from)?;
        let layout: Vec<(Axis, usize)> =
            self.layout().into_iter().map(|(a, s)| if a == from { (to, s) } else { (a, s) }).collect();
        Self::from_layout_unchecked(&layout, self.probs.clone())
    }
}

/// Conditional pmf of one output coordinate given a set of input coordinates.
///
/// Rows are laid out row-major over the (canonically ordered) input axes, and
/// each row is a simplex vector over the output alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondChannel<T> {
    input_axes: Vec<Axis>,
    input_sizes: Vec<usize>,
    output_axis: Axis,
    output_size: usize,
    probs: Vec<T>,
}

impl<T: Real> CondChannel<T> {
    pub fn new(inputs: &[(Axis, usize)], output: (Axis, usize), probs: Vec<T>) -> Result<Self> {
        let chan = Self::unchecked(inputs, output, probs)?;
        chan.validate()?;
        Ok(chan)
    }

    /// Builds from nonnegative row weights, normalizing each row.
    pub fn from_weights(inputs: &[(Axis, usize)], output: (Axis, usize), mut weights: Vec<T>) -> Result<Self> {
        let k = output.1.max(1);
        for row in weights.chunks_mut(k) {
            let s: T = row.iter().copied().sum();
            if !(s > T::zero()) {
                return Err(Error::NotNormalized(s.as_f64()));
            }
            row.iter_mut().for_each(|w| *w = *w / s);
        }
        Self::new(inputs, output, weights)
    }

    fn unchecked(inputs: &[(Axis, usize)], output: (Axis, usize), probs: Vec<T>) -> Result<Self> {
        let mut sorted = inputs.to_vec();
        sorted.sort_by_key(|&(a, _)| a);
        let input_axes: Vec<Axis> = sorted.iter().map(|&(a, _)| a).collect();
        sorted_axes(&input_axes)?;
        if input_axes.contains(&output.0) {
            return Err(Error::Overlap(format!("{:?} is both input and output", output.0)));
        }
        if output.1 == 0 || sorted.iter().any(|&(_, s)| s == 0) {
            return Err(Error::Shape("channel alphabets must be nonempty".into()));
        }
        if sorted.iter().map(|&(a, _)| a).ne(inputs.iter().map(|&(a, _)| a)) {
            return Err(Error::Shape("channel inputs must be listed in canonical order (X, Y1, Y2, U, V)".into()));
        }
        let input_sizes: Vec<usize> = sorted.iter().map(|&(_, s)| s).collect();
        Ok(Self { input_axes, input_sizes, output_axis: output.0, output_size: output.1, probs })
    }

    fn validate(&self) -> Result<()> {
        let expected = self.rows() * self.output_size;
        if self.probs.len() != expected {
            return Err(Error::Shape(format!("channel table has {} entries, expected {expected}", self.probs.len())));
        }
        for (r, row) in self.probs.chunks(self.output_size).enumerate() {
            if let Some((j, &p)) = row.iter().enumerate().find(|(_, &p)| !(p >= T::zero()) || !p.is_finite()) {
                return Err(Error::NegativeProbability { cell: vec![r, j], value: p.as_f64() });
            }
            let s: T = row.iter().copied().sum();
            if (s - T::one()).abs() > T::sum_tolerance() {
                return Err(Error::NotNormalized(s.as_f64()));
            }
        }
        Ok(())
    }

    /// Deterministic channel copying `input` into `output` (embedding when the
    /// output alphabet is larger).
    pub fn identity(input: (Axis, usize), output: (Axis, usize)) -> Result<Self> {
        if output.1 < input.1 {
            return Err(Error::Shape(format!("identity channel needs |{:?}| >= |{:?}|", output.0, input.0)));
        }
        let mut probs = vec![T::zero(); input.1 * output.1];
        for i in 0..input.1 {
            probs[i * output.1 + i] = T::one();
        }
        Self::new(&[input], output, probs)
    }

    /// Channel whose every row is the same pmf `row`.
    pub fn constant(inputs: &[(Axis, usize)], output: Axis, row: &[T]) -> Result<Self> {
        let rows: usize = inputs.iter().map(|&(_, s)| s).product();
        let probs = row.iter().copied().cycle().take(rows * row.len()).collect();
        Self::new(inputs, (output, row.len()), probs)
    }

    pub fn input_axes(&self) -> &[Axis] {
        &self.input_axes
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_axis(&self) -> Axis {
        self.output_axis
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn rows(&self) -> usize {
        self.input_sizes.iter().product()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.probs[r * self.output_size..(r + 1) * self.output_size]
    }

    pub fn input_layout(&self) -> Vec<(Axis, usize)> {
        self.input_axes.iter().copied().zip(self.input_sizes.iter().copied()).collect()
    }

    pub fn cast<S: Real>(&self) -> CondChannel<S> {
        CondChannel {
            input_axes: self.input_axes.clone(),
            input_sizes: self.input_sizes.clone(),
            output_axis: self.output_axis,
            output_size: self.output_size,
            probs: self.probs.iter().map(|&p| S::lit(p.as_f64())).collect(),
        }
    }

    /// Same channel with the output coordinate relabeled.
    pub fn with_output_axis(&self, axis: Axis) -> Result<Self> {
        if self.input_axes.contains(&axis) {
            return Err(Error::Overlap(format!("{axis:?} is an input of the channel")));
        }
        let mut c = self.clone();
        c.output_axis = axis;
        Ok(c)
    }
}

/// Builds the joint law of `pmf` extended by the channel output.
pub fn attach_channel<T: Real>(pmf: &JointPmf<T>, chan: &CondChannel<T>) -> Result<JointPmf<T>> {
    if pmf.has_axis(chan.output_axis) {
        return Err(Error::DuplicateAxis(chan.output_axis));
    }
    let in_pos: Vec<usize> = chan.input_axes.iter().map(|&a| pmf.position(a)).collect::<Result<_>>()?;
    for (&p, &s) in in_pos.iter().zip(&chan.input_sizes) {
        if pmf.sizes[p] != s {
            return Err(Error::Shape(format!("channel expects |{:?}| = {s}, pmf has {}", pmf.axes[p], pmf.sizes[p])));
        }
    }
    let mut layout = pmf.layout();
    layout.push((chan.output_axis, chan.output_size));
    let mut axes: Vec<Axis> = layout.iter().map(|&(a, _)| a).collect();
    axes.sort();
    let sizes: Vec<usize> = axes.iter().map(|a| layout.iter().find(|(b, _)| b == a).unwrap().1).collect();
    let out_pos = axes.iter().position(|&a| a == chan.output_axis).unwrap();
    // positions of the old axes inside the new layout
    let old_pos: Vec<usize> = pmf.axes.iter().map(|a| axes.iter().position(|b| b == a).unwrap()).collect();
    let old_strides = strides(&pmf.sizes);
    let row_strides = strides(&chan.input_sizes);
    let total: usize = sizes.iter().product();
    let mut probs = Vec::with_capacity(total);
    let mut idx = vec![0usize; sizes.len()];
    loop {
        let src: usize = old_pos.iter().zip(&old_strides).map(|(&p, &s)| idx[p] * s).sum();
        let row: usize = in_pos.iter().zip(&row_strides).map(|(&p, &s)| idx[old_pos[p]] * s).sum();
        probs.push(pmf.probs[src] * chan.probs[row * chan.output_size + idx[out_pos]]);
        if !next_index(&mut idx, &sizes) {
            break;
        }
    }
    Ok(JointPmf::from_canonical(axes, sizes, probs))
}

/// D(p‖q) in nats.
pub fn kl_divergence<T: Real>(p: &JointPmf<T>, q: &JointPmf<T>) -> Result<T> {
    if !p.same_shape(q) {
        return Err(Error::Shape(format!("divergence between {:?} and {:?}", p.layout(), q.layout())));
    }
    let z = T::zero_threshold();
    let mut acc = T::zero();
    for (flat, (&a, &b)) in p.probs.iter().zip(&q.probs).enumerate() {
        if a <= z {
            continue;
        }
        if b <= z {
            return Err(Error::InfiniteDivergence { cell: p.multi_index(flat) });
        }
        acc = acc + a * (a / b).ln();
    }
    Ok(acc.max(T::zero()))
}

/// Shannon entropy of the marginal over `axes`, in nats.
pub fn entropy<T: Real>(pmf: &JointPmf<T>, axes: &[Axis]) -> Result<T> {
    let m = pmf.marginal(axes)?;
    Ok(m.probs.iter().filter(|&&p| p > T::zero()).map(|&p| -p * p.ln()).sum())
}

/// H(A | C).
pub fn conditional_entropy<T: Real>(pmf: &JointPmf<T>, axes: &[Axis], given: &[Axis]) -> Result<T> {
    if given.is_empty() {
        return entropy(pmf, axes);
    }
    let mut all = axes.to_vec();
    all.extend_from_slice(given);
    Ok((entropy(pmf, &all)? - entropy(pmf, given)?).max(T::zero()))
}

/// I(A; B | C) in nats. `cond` may be empty.
pub fn mutual_information<T: Real>(pmf: &JointPmf<T>, a: &[Axis], b: &[Axis], cond: &[Axis]) -> Result<T> {
    let overlap = a.iter().find(|x| b.contains(x) || cond.contains(x)).or(b.iter().find(|x| cond.contains(x)));
    if let Some(x) = overlap {
        return Err(Error::Overlap(format!("axis {x:?} appears in two argument sets")));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::Shape("mutual information needs nonempty axis sets".into()));
    }
    let with = |s: &[Axis]| -> Vec<Axis> {
        let mut v = s.to_vec();
        v.extend_from_slice(cond);
        v
    };
    let mut ab = a.to_vec();
    ab.extend_from_slice(b);
    let h_ac = entropy(pmf, &with(a))?;
    let h_bc = entropy(pmf, &with(b))?;
    let h_abc = entropy(pmf, &with(&ab))?;
    let h_c = if cond.is_empty() { T::zero() } else { entropy(pmf, cond)? };
    Ok((h_ac + h_bc - h_abc - h_c).max(T::zero()))
}

/// Joint law over (X, Y1, Y2) under both hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisPair<T> {
    p: JointPmf<T>,
    p_bar: JointPmf<T>,
}

impl<T: Real> HypothesisPair<T> {
    /// `p` is the null law (H = 0), `p_bar` the alternative (H = 1).
    pub fn new(p: JointPmf<T>, p_bar: JointPmf<T>) -> Result<Self> {
        if !p.same_shape(&p_bar) {
            return Err(Error::Shape(format!(
                "hypotheses have different alphabets: {:?} vs {:?}",
                p.layout(),
                p_bar.layout()
            )));
        }
        if p.axes() != [Axis::X, Axis::Y1, Axis::Y2] {
            return Err(Error::Shape(format!("hypothesis laws must live on (X, Y1, Y2), got {:?}", p.axes())));
        }
        Ok(Self { p, p_bar })
    }

    /// Convenience constructor from flat row-major tables (x outer, y2 inner).
    pub fn from_tables(sizes: [usize; 3], p: Vec<T>, p_bar: Vec<T>) -> Result<Self> {
        let layout = [(Axis::X, sizes[0]), (Axis::Y1, sizes[1]), (Axis::Y2, sizes[2])];
        Self::new(JointPmf::new(&layout, p)?, JointPmf::new(&layout, p_bar)?)
    }

    pub fn p(&self) -> &JointPmf<T> {
        &self.p
    }

    pub fn p_bar(&self) -> &JointPmf<T> {
        &self.p_bar
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.p.sizes[0], self.p.sizes[1], self.p.sizes[2]]
    }

    /// Swaps the roles of the two hypotheses.
    pub fn swapped(&self) -> Self {
        Self { p: self.p_bar.clone(), p_bar: self.p.clone() }
    }

    pub fn px(&self) -> JointPmf<T> {
        self.p.marginal(&[Axis::X]).expect("X axis present")
    }

    pub fn px_bar(&self) -> JointPmf<T> {
        self.p_bar.marginal(&[Axis::X]).expect("X axis present")
    }

    /// ‖P_X − P̄_X‖∞.
    pub fn x_marginal_gap(&self) -> T {
        self.px().linf_distance(&self.px_bar()).expect("same shape")
    }

    /// Checks the zero-rate support assumptions: P̄ > 0 everywhere and
    /// P_{XY1} > 0 everywhere.
    pub fn check_zero_rate_support(&self) -> Result<()> {
        let z = T::zero_threshold();
        if let Some(flat) = self.p_bar.probs.iter().position(|&v| v <= z) {
            return Err(Error::Precondition(format!(
                "zero-rate exponents require P̄_XY1Y2 > 0 everywhere; cell {:?} is zero",
                self.p_bar.multi_index(flat)
            )));
        }
        let pxy1 = self.p.marginal(&[Axis::X, Axis::Y1])?;
        if let Some(flat) = pxy1.probs.iter().position(|&v| v <= z) {
            return Err(Error::Precondition(format!(
                "zero-rate exponents require P_XY1 > 0 everywhere; cell {:?} is zero",
                pxy1.multi_index(flat)
            )));
        }
        Ok(())
    }

    pub fn cast<S: Real>(&self) -> HypothesisPair<S> {
        HypothesisPair { p: self.p.cast(), p_bar: self.p_bar.cast() }
    }
}
