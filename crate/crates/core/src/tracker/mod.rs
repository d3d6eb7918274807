//! Predictor-corrector path tracking for square parameter-dependent systems.
//!
//! The tracker is generic over [`PathSystem`]; the Cox homotopies, the
//! moving-slice lift, the λ-systems of the orbit slices and the polyhedral
//! cell homotopies all implement it.

mod cox;
mod patch;

pub use cox::{
    jacobian_condition, CoxHomotopy, LaurentSegment, MovingSlicePath, OrbitDegeneration, SlicedCoxPath, StraightLine,
};
pub use patch::{orthogonal_slice, patch_reduce, Patch, Slice};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::system::C64;

/// A square system `H(y, t) = 0` with `dim` unknowns, tracked in real `t`.
pub trait PathSystem {
    fn dim(&self) -> usize;

    /// Value, Jacobian with respect to `y`, and derivative with respect to `t`.
    fn evaluate(&self, y: &DVector<C64>, t: f64) -> (DVector<C64>, DMatrix<C64>, DVector<C64>);

    /// Called after every accepted step. Systems with moving coordinate
    /// charts recompute them here and return the point in the new chart.
    fn accept(&mut self, y: &DVector<C64>, _t: f64) -> DVector<C64> {
        y.clone()
    }

    /// The point in ambient coordinates.
    fn ambient(&self, y: &DVector<C64>) -> DVector<C64> {
        y.clone()
    }

    /// Condition number reported to diagnostics.
    fn condition(&self, y: &DVector<C64>, t: f64) -> f64 {
        let (_, j, _) = self.evaluate(y, t);
        complex_condition(&j)
    }
}

/// 2-norm condition number after scaling every row to unit length; infinite
/// when singular.
pub fn complex_condition(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let mut m = m.clone();
    for mut row in m.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 && norm.is_finite() {
            row.unscale_mut(norm);
        }
    }
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Relative Newton tolerance on the correction size.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    /// Largest admissible first Newton correction, relative to `max(1, |y|)`.
    pub max_first_correction: f64,
    pub divergence_bound: f64,
    pub max_steps: usize,
    /// Stop with [`TrackStatus::Singular`] when the condition number exceeds this.
    pub singular_condition: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            initial_step: 0.01,
            min_step: 1e-14,
            max_step: 0.1,
            newton_tol: 1e-11,
            max_newton_iters: 3,
            max_first_correction: 0.05,
            divergence_bound: 1e8,
            max_steps: 50_000,
            singular_condition: 1e14,
        }
    }
}

impl TrackOptions {
    /// Settings for the endgame region near the target.
    pub fn endgame() -> Self {
        TrackOptions { min_step: 1e-16, divergence_bound: 1e10, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrackStatus {
    Success,
    Diverged,
    MinStepReached,
    MaxSteps,
    Singular,
    /// The starting point could not be corrected onto the path.
    StartFailed,
}

#[derive(Clone, Debug)]
pub struct TrackResult {
    pub y: DVector<C64>,
    pub t: f64,
    pub status: TrackStatus,
    pub steps: usize,
    pub rejected: usize,
    pub condition: f64,
}

/// One accepted step, as reported to observers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub condition: f64,
    pub step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NewtonError {
    NoConvergence,
    SingularJacobian,
}

fn solve(j: &DMatrix<C64>, rhs: &DVector<C64>) -> Option<DVector<C64>> {
    let x = j.clone().lu().solve(rhs)?;
    if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Some(x)
    } else {
        None
    }
}

fn tangent<S: PathSystem + ?Sized>(sys: &S, y: &DVector<C64>, t: f64) -> Option<DVector<C64>> {
    let (_, j, dt) = sys.evaluate(y, t);
    solve(&j, &(-dt))
}

/// Newton iteration at fixed `t`. Each correction must contract and the
/// first one must be small relative to the point.
pub fn newton_correct<S: PathSystem + ?Sized>(
    sys: &S,
    y0: &DVector<C64>,
    t: f64,
    opts: &TrackOptions,
    cond_hint: f64,
) -> Result<(DVector<C64>, usize), NewtonError> {
    let mut y = y0.clone();
    let tol = opts.newton_tol.max(10.0 * f64::EPSILON * cond_hint.min(1e16));
    let mut prev = f64::INFINITY;
    for it in 0..opts.max_newton_iters {
        let (f, j, _) = sys.evaluate(&y, t);
        let dy = solve(&j, &(-f)).ok_or(NewtonError::SingularJacobian)?;
        let scale = y.norm().max(1.0);
        let nd = dy.norm();
        if it == 0 && nd > opts.max_first_correction * scale {
            return Err(NewtonError::NoConvergence);
        }
        if it > 0 && nd > 0.5 * prev && nd > tol * scale {
            return Err(NewtonError::NoConvergence);
        }
        y += dy;
        if nd <= tol * scale {
            return Ok((y, it + 1));
        }
        prev = nd;
    }
    Err(NewtonError::NoConvergence)
}

/// Extra Newton steps until the correction stops shrinking.
pub fn refine<S: PathSystem + ?Sized>(sys: &S, y0: &DVector<C64>, t: f64, max_iters: usize) -> DVector<C64> {
    let mut y = y0.clone();
    let mut prev = f64::INFINITY;
    for _ in 0..max_iters {
        let (f, j, _) = sys.evaluate(&y, t);
        let Some(dy) = solve(&j, &(-f)) else { break };
        let nd = dy.norm();
        if !(nd < prev) || nd > 1e-3 * y.norm().max(1.0) {
            break;
        }
        y += dy;
        prev = nd;
        if nd <= 1e-16 * y.norm().max(1.0) {
            break;
        }
    }
    y
}

/// Tracks `y0` from `t0` to `t1`, calling `observer` after every accepted step.
pub fn track<S: PathSystem + ?Sized>(
    sys: &mut S,
    y0: &DVector<C64>,
    t0: f64,
    t1: f64,
    opts: &TrackOptions,
    observer: &mut dyn FnMut(&StepRecord),
) -> TrackResult {
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut steps = 0usize;
    let mut rejected = 0usize;
    let mut cond = sys.condition(y0, t0);
    let result = |y: DVector<C64>, t: f64, status, steps, rejected, condition| TrackResult {
        y,
        t,
        status,
        steps,
        rejected,
        condition,
    };
    let mut y = match newton_correct(sys, y0, t0, &TrackOptions { max_newton_iters: 6, max_first_correction: 1e-2, ..opts.clone() }, cond) {
        Ok((y, _)) => y,
        Err(_) => return result(y0.clone(), t0, TrackStatus::StartFailed, 0, 0, cond),
    };
    let mut h = opts.initial_step.min(opts.max_step).min((t1 - t0).abs());
    let mut successes = 0usize;
    while t != t1 {
        if steps + rejected >= opts.max_steps {
            return result(y, t, TrackStatus::MaxSteps, steps, rejected, cond);
        }
        let remaining = (t1 - t).abs();
        let (dt, t_new) = if h >= remaining { (t1 - t, t1) } else { (dir * h, t + dir * h) };
        let predicted = rk4(sys, &y, t, dt);
        let corrected = predicted.and_then(|yp| newton_correct(sys, &yp, t_new, opts, cond).ok());
        match corrected {
            Some((yc, _)) => {
                t = t_new;
                y = sys.accept(&yc, t);
                steps += 1;
                successes += 1;
                if successes >= 2 {
                    h = (2.0 * h).min(opts.max_step);
                    successes = 0;
                }
                cond = sys.condition(&y, t);
                observer(&StepRecord { t, condition: cond, step: dt.abs() });
                if sys.ambient(&y).norm() > opts.divergence_bound {
                    return result(y, t, TrackStatus::Diverged, steps, rejected, cond);
                }
                if cond > opts.singular_condition && t != t1 {
                    return result(y, t, TrackStatus::Singular, steps, rejected, cond);
                }
            }
            None => {
                rejected += 1;
                successes = 0;
                h *= 0.5;
                if h < opts.min_step {
                    return result(y, t, TrackStatus::MinStepReached, steps, rejected, cond);
                }
            }
        }
    }
    result(y, t, TrackStatus::Success, steps, rejected, cond)
}

fn rk4<S: PathSystem + ?Sized>(sys: &S, y: &DVector<C64>, t: f64, dt: f64) -> Option<DVector<C64>> {
    let h = C64::new(dt, 0.0);
    let half = C64::new(0.5 * dt, 0.0);
    let k1 = tangent(sys, y, t)?;
    let k2 = tangent(sys, &(y + &k1 * half), t + 0.5 * dt)?;
    let k3 = tangent(sys, &(y + &k2 * half), t + 0.5 * dt)?;
    let k4 = tangent(sys, &(y + &k3 * h), t + dt)?;
    Some(y + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0))
}
