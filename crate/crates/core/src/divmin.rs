//! Divergence minimization under fixed sub-marginals (I-projection).
//!
//! Every exponent in the crate has the form `min D(Q‖T)` over joint laws `Q`
//! that match a list of prescribed marginals. The feasible set is an
//! intersection of linear families, so the minimizer is unique and is reached
//! by cyclic iterative scaling: each sweep rescales `Q` so that one constraint
//! holds exactly, in list order, until every marginal is within `tol`.
//!
//! [`oracle_min_divergence`] solves the same program by an unrelated route
//! (exponentiated gradient on the simplex with an augmented quadratic penalty)
//! and [`certify`] checks the optimality conditions of a returned solution.

use crate::error::{Error, Result};
use crate::prob::{kl_divergence, Axis, JointPmf};
use crate::scalar::Real;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Default sweep budget for iterative scaling.
pub const DEFAULT_MAX_ITERS: usize = 100_000;

/// Overlapping constraints must agree on shared marginals to this tolerance.
const CONSISTENCY_TOL: f64 = 1e-9;

/// A prescribed marginal: the minimizer restricted to `axes` must equal `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalConstraint<T> {
    target: JointPmf<T>,
}

impl<T: Real> MarginalConstraint<T> {
    /// The constrained axes are those of `target`.
    pub fn new(target: JointPmf<T>) -> Self {
        Self { target }
    }

    /// Constraint pinning the marginal of `law` on `axes`.
    pub fn from_law(law: &JointPmf<T>, axes: &[Axis]) -> Result<Self> {
        Ok(Self::new(law.marginal(axes)?))
    }

    pub fn axes(&self) -> &[Axis] {
        self.target.axes()
    }

    pub fn target(&self) -> &JointPmf<T> {
        &self.target
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult<T> {
    /// D(argmin‖target) in nats.
    pub value: T,
    pub argmin: JointPmf<T>,
    /// Completed sweeps over the constraint list.
    pub iterations: usize,
    /// Largest absolute marginal deviation of `argmin`.
    pub residual: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionSettings<T> {
    pub tol: T,
    pub max_iters: usize,
}

impl<T: Real> Default for ProjectionSettings<T> {
    fn default() -> Self {
        Self { tol: T::default_projection_tol(), max_iters: DEFAULT_MAX_ITERS }
    }
}

/// Precomputed cell→marginal maps for a constraint list.
struct Compiled<T> {
    maps: Vec<Vec<usize>>,
    targets: Vec<Vec<T>>,
}

fn compile<T: Real>(ambient: &JointPmf<T>, constraints: &[MarginalConstraint<T>]) -> Result<Compiled<T>> {
    let mut maps = Vec::with_capacity(constraints.len());
    let mut targets = Vec::with_capacity(constraints.len());
    for c in constraints {
        for (&a, &s) in c.axes().iter().zip(c.target.sizes()) {
            let have = ambient.size_of(a)?;
            if have != s {
                return Err(Error::Shape(format!("constraint on {a:?} has {s} symbols, ambient alphabet has {have}")));
            }
        }
        let (_, _, map) = ambient.projection_map(c.axes())?;
        maps.push(map);
        targets.push(c.target.probs().to_vec());
    }
    Ok(Compiled { maps, targets })
}

/// Fails fast on constraint lists that cannot be met simultaneously: overlapping
/// constraints that disagree on their common marginal, or prescribed mass on a
/// cylinder the target does not charge.
pub fn check_feasibility<T: Real>(target: &JointPmf<T>, constraints: &[MarginalConstraint<T>]) -> Result<()> {
    let compiled = compile(target, constraints)?;
    let tol = T::lit(CONSISTENCY_TOL).max(T::sum_tolerance());
    for (i, a) in constraints.iter().enumerate() {
        for b in &constraints[i + 1..] {
            let common: Vec<Axis> = a.axes().iter().copied().filter(|x| b.axes().contains(x)).collect();
            if common.is_empty() {
                continue;
            }
            let gap = a.target.marginal(&common)?.linf_distance(&b.target.marginal(&common)?)?;
            if gap > tol {
                return Err(Error::Infeasible(format!(
                    "constraints on {:?} and {:?} disagree on the {:?} marginal by {:e}",
                    a.axes(),
                    b.axes(),
                    common,
                    gap.as_f64()
                )));
            }
        }
    }
    let z = T::zero_threshold();
    for ((c, map), r) in constraints.iter().zip(&compiled.maps).zip(&compiled.targets) {
        let mut mass = vec![T::zero(); r.len()];
        for (&t, &m) in target.probs().iter().zip(map) {
            mass[m] = mass[m] + t;
        }
        if let Some(cell) = (0..r.len()).find(|&k| r[k] > z && mass[k] <= z) {
            return Err(Error::Infeasible(format!(
                "constraint on {:?} puts mass on cell {:?} where the reference law has none",
                c.axes(),
                c.target.multi_index(cell)
            )));
        }
    }
    Ok(())
}

fn max_residual<T: Real>(q: &[T], compiled: &Compiled<T>, scratch: &mut Vec<T>) -> T {
    let mut worst = T::zero();
    for (map, r) in compiled.maps.iter().zip(&compiled.targets) {
        scratch.clear();
        scratch.resize(r.len(), T::zero());
        for (&v, &m) in q.iter().zip(map) {
            scratch[m] = scratch[m] + v;
        }
        for (&a, &b) in scratch.iter().zip(r) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

/// Minimizes D(Q‖target) subject to the marginal constraints.
pub fn i_project<T: Real>(
    target: &JointPmf<T>,
    constraints: &[MarginalConstraint<T>],
    tol: T,
    max_iters: usize,
) -> Result<ProjectionResult<T>> {
    i_project_observed(target, constraints, tol, max_iters, |_, _| {})
}

/// [`i_project`] with the default tolerance and sweep budget.
pub fn i_project_default<T: Real>(
    target: &JointPmf<T>,
    constraints: &[MarginalConstraint<T>],
) -> Result<ProjectionResult<T>> {
    let s = ProjectionSettings::default();
    i_project(target, constraints, s.tol, s.max_iters)
}

/// Minimum value only, default settings.
pub fn min_divergence<T: Real>(target: &JointPmf<T>, constraints: &[MarginalConstraint<T>]) -> Result<T> {
    Ok(i_project_default(target, constraints)?.value)
}

/// [`i_project`] that hands every completed sweep's iterate to `observer`.
pub fn i_project_observed<T: Real>(
    target: &JointPmf<T>,
    constraints: &[MarginalConstraint<T>],
    tol: T,
    max_iters: usize,
    mut observer: impl FnMut(usize, &[T]),
) -> Result<ProjectionResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    check_feasibility(target, constraints)?;
    let compiled = compile(target, constraints)?;
    let z = T::zero_threshold();
    let mut q: Vec<T> = target.probs().to_vec();
    let mut scratch = Vec::new();
    let mut residual = max_residual(&q, &compiled, &mut scratch);
    let mut iterations = 0;
    while residual >= tol {
        if iterations == max_iters {
            return Err(Error::NoConvergence { iterations, residual: residual.as_f64() });
        }
        for (map, r) in compiled.maps.iter().zip(&compiled.targets) {
            scratch.clear();
            scratch.resize(r.len(), T::zero());
            for (&v, &m) in q.iter().zip(map) {
                scratch[m] = scratch[m] + v;
            }
            for (k, (&have, &want)) in scratch.iter().zip(r).enumerate() {
                if have <= T::zero() && want > z {
                    return Err(Error::Infeasible(format!(
                        "scaling emptied cell {k} of the {:?} marginal that must carry {want}",
                        target.axes()
                    )));
                }
            }
            // turn scratch into the scaling factors
            for (f, &want) in scratch.iter_mut().zip(r) {
                *f = if *f > T::zero() { want / *f } else { T::zero() };
            }
            for (v, &m) in q.iter_mut().zip(map) {
                *v = *v * scratch[m];
            }
        }
        iterations += 1;
        observer(iterations, &q);
        residual = max_residual(&q, &compiled, &mut scratch);
        if !residual.is_finite() {
            return Err(Error::NoConvergence { iterations, residual: residual.as_f64() });
        }
    }
    let argmin = JointPmf::from_canonical(target.axes().to_vec(), target.sizes().to_vec(), q);
    let value = kl_divergence(&argmin, target)?;
    Ok(ProjectionResult { value, argmin, iterations, residual })
}

/// Outcome of the gradient-based verification solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult<T> {
    pub value: T,
    /// Largest marginal deviation of the best iterate.
    pub residual: T,
}

const ORACLE_PENALTY: f64 = 20.0;
const ORACLE_INNER: usize = 250;
const ORACLE_SEED: u64 = 0x0d1f_5eed;

/// Independent solver for the program of [`i_project`]: exponentiated-gradient
/// descent on the joint simplex applied to the divergence plus a quadratic
/// penalty on constraint violation, with multiplier updates between inner
/// rounds. Starts from `restarts` random points, spends `steps` gradient steps
/// per start, and returns the best near-feasible value. Computes in `f64`.
pub fn oracle_min_divergence<T: Real>(
    target: &JointPmf<T>,
    constraints: &[MarginalConstraint<T>],
    restarts: usize,
    steps: usize,
) -> Result<OracleResult<T>> {
    if restarts == 0 || steps == 0 {
        return Err(Error::Input("oracle needs at least one restart and one step".into()));
    }
    check_feasibility(target, constraints)?;
    let t64 = target.cast::<f64>();
    let cons64: Vec<MarginalConstraint<f64>> =
        constraints.iter().map(|c| MarginalConstraint::new(c.target.cast())).collect();
    let compiled = compile(&t64, &cons64)?;
    let z = f64::zero_threshold();
    let support: Vec<usize> = (0..t64.len()).filter(|&k| t64.probs()[k] > z).collect();
    let log_t: Vec<f64> = support.iter().map(|&k| t64.probs()[k].ln()).collect();
    let maps: Vec<Vec<usize>> = compiled.maps.iter().map(|m| support.iter().map(|&k| m[k]).collect()).collect();
    let rho = ORACLE_PENALTY;
    let eta = 1.0 / (1.0 + rho * constraints.len().max(1) as f64);
    let outer = steps.div_ceil(ORACLE_INNER).max(1);

    let residuals = |q: &[f64], out: &mut Vec<Vec<f64>>| {
        for ((map, r), res) in maps.iter().zip(&compiled.targets).zip(out.iter_mut()) {
            res.iter_mut().zip(r).for_each(|(x, &b)| *x = -b);
            for (&v, &m) in q.iter().zip(map) {
                res[m] += v;
            }
        }
    };

    let mut best: Option<(f64, f64)> = None;
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    for _ in 0..restarts {
        let mut lq: Vec<f64> = log_t
            .iter()
            .map(|&l| {
                let g: f64 = StandardNormal.sample(&mut rng);
                l + g
            })
            .collect();
        normalize_log(&mut lq);
        let mut q: Vec<f64> = lq.iter().map(|&l| l.exp()).collect();
        let mut mult: Vec<Vec<f64>> = compiled.targets.iter().map(|r| vec![0.0; r.len()]).collect();
        let mut res: Vec<Vec<f64>> = mult.clone();
        for _ in 0..outer {
            for _ in 0..ORACLE_INNER {
                residuals(&q, &mut res);
                for (k, l) in lq.iter_mut().enumerate() {
                    let mut g = *l - log_t[k];
                    for ((map, y), r) in maps.iter().zip(&mult).zip(&res) {
                        g += y[map[k]] + rho * r[map[k]];
                    }
                    *l -= eta * g;
                }
                normalize_log(&mut lq);
                q.iter_mut().zip(&lq).for_each(|(v, &l)| *v = l.exp());
            }
            residuals(&q, &mut res);
            for (y, r) in mult.iter_mut().zip(&res) {
                y.iter_mut().zip(r).for_each(|(a, &b)| *a += rho * b);
            }
        }
        residuals(&q, &mut res);
        let resid = res.iter().flatten().fold(0.0f64, |m, &v| m.max(v.abs()));
        let value: f64 = q
            .iter()
            .zip(&lq)
            .zip(&log_t)
            .filter(|((&v, _), _)| v > 0.0)
            .map(|((&v, &l), &lt)| v * (l - lt))
            .sum::<f64>()
            .max(0.0);
        best = match best {
            None => Some((value, resid)),
            Some((bv, br)) => {
                let feasible = resid <= 1e-8;
                let best_feasible = br <= 1e-8;
                if (feasible && (!best_feasible || value < bv)) || (!feasible && !best_feasible && resid < br) {
                    Some((value, resid))
                } else {
                    Some((bv, br))
                }
            }
        };
    }
    let (value, residual) = best.unwrap();
    Ok(OracleResult { value: T::lit(value), residual: T::lit(residual) })
}

fn normalize_log(lq: &mut [f64]) {
    let m = lq.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = lq.iter().map(|&l| (l - m).exp()).sum();
    let shift = m + s.ln();
    lq.iter_mut().for_each(|l| *l -= shift);
}

/// Outcome of [`certify`].
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    /// Largest marginal deviation of the argmin.
    pub residual: f64,
    /// Least-squares residual of log(argmin/target) against the constraint cylinders.
    pub factorization_residual: f64,
    /// |reported value − D(argmin‖target)|.
    pub value_gap: f64,
}

/// Checks a projection result: (a) marginal residuals below ten times the
/// default tolerance, (b) the density ratio argmin/target factorizes over the
/// constrained coordinate sets, (c) the reported value equals D(argmin‖target).
pub fn certify<T: Real>(
    result: &ProjectionResult<T>,
    target: &JointPmf<T>,
    constraints: &[MarginalConstraint<T>],
) -> Result<CertificateReport> {
    if !result.argmin.same_shape(target) {
        return Err(Error::Shape("argmin and target differ in shape".into()));
    }
    let q = result.argmin.cast::<f64>();
    let t = target.cast::<f64>();
    let cons64: Vec<MarginalConstraint<f64>> =
        constraints.iter().map(|c| MarginalConstraint::new(c.target.cast())).collect();
    let compiled = compile(&t, &cons64)?;
    let mut failures = Vec::new();

    let residual = max_residual(q.probs(), &compiled, &mut Vec::new());
    let res_tol = 10.0 * T::default_projection_tol().as_f64();
    if residual.is_nan() || residual >= res_tol {
        failures.push(format!("(a) marginal residual {residual:e} >= {res_tol:e}"));
    }

    let z = f64::zero_threshold();
    let mut support_ok = true;
    let mut rows = Vec::new();
    for k in 0..q.len() {
        let (qk, tk) = (q.probs()[k], t.probs()[k]);
        if qk > z {
            if tk <= z {
                support_ok = false;
            } else {
                rows.push(k);
            }
        } else if tk > z {
            // a vanished cell must sit in a cylinder the constraints empty
            let explained = compiled.maps.iter().zip(&compiled.targets).any(|(map, r)| r[map[k]] <= z);
            if !explained {
                support_ok = false;
            }
        }
    }
    let offsets: Vec<usize> = compiled
        .targets
        .iter()
        .scan(0, |acc, r| {
            let o = *acc;
            *acc += r.len();
            Some(o)
        })
        .collect();
    let cols: usize = compiled.targets.iter().map(Vec::len).sum::<usize>() + 1;
    let factorization_residual = if rows.is_empty() {
        f64::INFINITY
    } else {
        let a = DMatrix::from_fn(rows.len(), cols, |i, j| {
            if j == cols - 1 {
                return 1.0;
            }
            let k = rows[i];
            let hit = compiled.maps.iter().zip(&offsets).any(|(map, &o)| o + map[k] == j);
            if hit {
                1.0
            } else {
                0.0
            }
        });
        let y = DVector::from_iterator(rows.len(), rows.iter().map(|&k| (q.probs()[k] / t.probs()[k]).ln()));
        // pseudo-inverse through the normal equations; the SVD solver loses
        // accuracy on these rank-deficient 0/1 designs
        let at = a.transpose();
        let eig = (&at * &a).symmetric_eigen();
        let aty = &at * &y;
        let cutoff = 1e-10 * eig.eigenvalues.amax().max(1.0);
        let mut x = DVector::zeros(cols);
        for (i, &l) in eig.eigenvalues.iter().enumerate() {
            if l > cutoff {
                let v = eig.eigenvectors.column(i);
                x += v * (v.dot(&aty) / l);
            }
        }
        (&a * x - &y).amax()
    };
    if !support_ok {
        failures.push("(b) argmin charges cells outside the product-form support".into());
    }
    if !(factorization_residual < 1e-6) {
        failures.push(format!(
            "(b) log-ratio is not a sum of constraint-cylinder terms (residual {factorization_residual:e})"
        ));
    }

    let value_gap = match kl_divergence(&q, &t) {
        Ok(d) => (d - result.value.as_f64()).abs(),
        Err(_) => f64::INFINITY,
    };
    let gap_tol = 1e-10f64.max(1e3 * T::epsilon().as_f64());
    if !(value_gap <= gap_tol) {
        failures.push(format!("(c) reported value off by {value_gap:e}"));
    }

    if failures.is_empty() {
        Ok(CertificateReport { residual, factorization_residual, value_gap })
    } else {
        Err(Error::Certificate(failures.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Axis::{X, Y1, Y2};
    use approx::assert_abs_diff_eq;

    fn binary_xy(p: [f64; 4]) -> JointPmf<f64> {
        JointPmf::new(&[(X, 2), (Y1, 2)], p.to_vec()).unwrap()
    }

    fn ber(a: Axis, p: f64) -> JointPmf<f64> {
        JointPmf::new(&[(a, 2)], vec![1.0 - p, p]).unwrap()
    }

    #[test]
    fn satisfied_constraints_give_zero() {
        let t = binary_xy([0.1, 0.2, 0.3, 0.4]);
        let cons =
            vec![MarginalConstraint::from_law(&t, &[X]).unwrap(), MarginalConstraint::from_law(&t, &[Y1]).unwrap()];
        let r = i_project_default(&t, &cons).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.argmin, t);
    }

    #[test]
    fn fully_pinned_joint() {
        let t = binary_xy([0.1, 0.2, 0.3, 0.4]);
        let r = binary_xy([0.25, 0.25, 0.25, 0.25]);
        let res = i_project_default(&t, &[MarginalConstraint::new(r.clone())]).unwrap();
        assert!(res.argmin.approx_eq(&r, 1e-15));
        assert_abs_diff_eq!(res.value, kl_divergence(&r, &t).unwrap(), epsilon = 1e-14);
    }

    /// Both marginals of a 2×2 table fixed to Ber(0.5): Q = [[a, ½−a], [½−a, a]].
    /// Scan a at step 1e-6, then refine inside the best bracket.
    fn grid_oracle_2x2(t: &JointPmf<f64>) -> (f64, f64) {
        let obj = |a: f64| {
            let q = [a, 0.5 - a, 0.5 - a, a];
            q.iter().zip(t.probs()).filter(|(&v, _)| v > 0.0).map(|(&v, &w)| v * (v / w).ln()).sum::<f64>()
        };
        let mut best = (f64::INFINITY, 0.0);
        let steps = 500_000;
        for i in 0..=steps {
            let a = i as f64 * 1e-6;
            let v = obj(a);
            if v < best.0 {
                best = (v, a);
            }
        }
        let (mut lo, mut hi) = ((best.1 - 1e-6).max(0.0), (best.1 + 1e-6).min(0.5));
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if obj(m1) < obj(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let a = 0.5 * (lo + hi);
        (obj(a), a)
    }

    fn correlated_2x2() -> JointPmf<f64> {
        // Ber(0.3) ⊗ Ber(0.7) with a correlating tilt
        binary_xy([0.7 * 0.3 + 0.05, 0.7 * 0.7 - 0.05, 0.3 * 0.3 - 0.05, 0.3 * 0.7 + 0.05])
    }

    #[test]
    fn two_by_two_matches_grid_scan() {
        let t = correlated_2x2();
        let cons = vec![MarginalConstraint::new(ber(X, 0.5)), MarginalConstraint::new(ber(Y1, 0.5))];
        let res = i_project_default(&t, &cons).unwrap();
        let (grid_value, a) = grid_oracle_2x2(&t);
        assert_abs_diff_eq!(res.value, grid_value, epsilon = 1e-9);
        assert_abs_diff_eq!(res.argmin.probs()[0], a, epsilon = 1e-6);
        certify(&res, &t, &cons).unwrap();

        // the grid solution itself passes the certificate
        let q = binary_xy([a, 0.5 - a, 0.5 - a, a]);
        let grid_result =
            ProjectionResult { value: kl_divergence(&q, &t).unwrap(), argmin: q, iterations: 0, residual: 0.0 };
        certify(&grid_result, &t, &cons).unwrap();
    }

    #[test]
    fn corrupted_argmin_fails_certificate() {
        let t = correlated_2x2();
        let cons = vec![MarginalConstraint::new(ber(X, 0.5)), MarginalConstraint::new(ber(Y1, 0.5))];
        let mut res = i_project_default(&t, &cons).unwrap();
        let mut probs = res.argmin.probs().to_vec();
        probs[1] += 1e-2;
        res.argmin = JointPmf::normalized(&res.argmin.layout(), probs).unwrap();
        let err = certify(&res, &t, &cons).unwrap_err().to_string();
        assert!(err.contains("(b)") || err.contains("(c)"), "{err}");
    }

    #[test]
    fn inconsistent_overlap_is_infeasible() {
        let t = JointPmf::<f64>::uniform(&[(X, 2), (Y1, 2), (Y2, 2)]).unwrap();
        let a = JointPmf::new(&[(X, 2), (Y1, 2)], vec![0.25; 4]).unwrap();
        let b = JointPmf::new(&[(X, 2), (Y2, 2)], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let cons = vec![MarginalConstraint::new(a), MarginalConstraint::new(b)];
        assert!(matches!(i_project_default(&t, &cons), Err(Error::Infeasible(_))));
        assert!(matches!(oracle_min_divergence(&t, &cons, 1, 10), Err(Error::Infeasible(_))));
    }

    #[test]
    fn mass_outside_target_support_is_infeasible() {
        let t = binary_xy([0.5, 0.5, 0.0, 0.0]);
        let cons = vec![MarginalConstraint::new(ber(X, 0.5))];
        assert!(matches!(i_project_default(&t, &cons), Err(Error::Infeasible(_))));
    }

    #[test]
    fn zero_target_cells_stay_zero() {
        let t = binary_xy([0.4, 0.0, 0.3, 0.3]);
        let cons = vec![MarginalConstraint::new(ber(X, 0.5)), MarginalConstraint::new(ber(Y1, 0.3))];
        let res = i_project_default(&t, &cons).unwrap();
        assert_eq!(res.argmin.probs()[1], 0.0);
        assert_abs_diff_eq!(res.argmin.probs()[2], 0.2, epsilon = 1e-9);
        certify(&res, &t, &cons).unwrap();
    }

    #[test]
    fn sweep_budget_exhaustion() {
        let t = correlated_2x2();
        let cons = vec![MarginalConstraint::new(ber(X, 0.5)), MarginalConstraint::new(ber(Y1, 0.5))];
        match i_project(&t, &cons, 1e-14, 1) {
            Err(Error::NoConvergence { iterations, residual }) => {
                assert_eq!(iterations, 1);
                assert!(residual > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn oracle_trivial_cases() {
        let t = binary_xy([0.1, 0.2, 0.3, 0.4]);
        let cons = vec![MarginalConstraint::from_law(&t, &[X]).unwrap()];
        let o = oracle_min_divergence(&t, &cons, 2, 5_000).unwrap();
        assert!(o.value < 1e-9);
        let r = binary_xy([0.25, 0.25, 0.25, 0.25]);
        let o = oracle_min_divergence(&t, &[MarginalConstraint::new(r.clone())], 2, 20_000).unwrap();
        assert_abs_diff_eq!(o.value, kl_divergence(&r, &t).unwrap(), epsilon = 1e-7);
    }

    #[test]
    fn single_precision_projection() {
        let t = correlated_2x2().cast::<f32>();
        let cons = vec![
            MarginalConstraint::new(ber(X, 0.5).cast::<f32>()),
            MarginalConstraint::new(ber(Y1, 0.5).cast::<f32>()),
        ];
        let r32 = i_project_default(&t, &cons).unwrap();
        let r64 = i_project_default(
            &correlated_2x2(),
            &[MarginalConstraint::new(ber(X, 0.5)), MarginalConstraint::new(ber(Y1, 0.5))],
        )
        .unwrap();
        assert!((r32.value as f64 - r64.value).abs() < 1e-4);
    }
}
