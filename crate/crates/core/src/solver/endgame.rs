//! Tracking from `τ_EG` to the target, switching orbit representatives on
//! the slice when a representative diverges or runs into the base locus.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::orbit::{same_point, slice_orbit, RepresentativeSearch};
use crate::system::C64;
use crate::toric::CoxData;
use crate::tracker::{jacobian_condition, refine, track, CoxHomotopy, PathSystem, SlicedCoxPath, Slice, StepRecord, TrackOptions, TrackStatus};

/// Below this `τ` the last segment runs straight to zero.
const LAST_DECADE: f64 = 1e-14;
/// Stalls below this `τ` are treated as singular endpoints.
const STALL_TAU: f64 = 1e-6;
/// Log-log slope beyond which a coordinate counts as trending.
const TREND_SLOPE: f64 = 0.2;
/// Endpoint Jacobian condition above which a solution is flagged singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttemptOutcome {
    /// Finite endpoint off the base locus.
    Landed,
    Diverged,
    BaseLocus,
    Failed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Attempt {
    pub outcome: AttemptOutcome,
    /// Last point reached, in Cox coordinates.
    pub z: Vec<C64>,
    pub tau: f64,
    pub steps: usize,
    pub singular: bool,
    pub condition: f64,
}

#[derive(Clone, Debug)]
pub struct EndgameConfig {
    pub base_locus_tol: f64,
    /// Representatives tried after the first one.
    pub max_switches: usize,
    pub options: TrackOptions,
    pub search: RepresentativeSearch,
}

impl Default for EndgameConfig {
    fn default() -> Self {
        EndgameConfig {
            base_locus_tol: 1e-8,
            max_switches: usize::MAX,
            options: TrackOptions::endgame(),
            search: RepresentativeSearch::Monodromy,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EndgameResult {
    pub attempts: Vec<Attempt>,
    /// Index of the landed attempt.
    pub landed: Option<usize>,
}

impl EndgameResult {
    pub fn switches(&self) -> usize {
        self.attempts.len().saturating_sub(1)
    }

    pub fn solution(&self) -> Option<&Attempt> {
        self.landed.map(|i| &self.attempts[i])
    }
}

struct Checkpoint {
    log_tau: f64,
    log_abs: Vec<f64>,
    log_norm: f64,
}

impl Checkpoint {
    fn new(tau: f64, z: &[C64]) -> Self {
        let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        Checkpoint {
            log_tau: tau.ln(),
            log_abs: z.iter().map(|v| v.norm().max(f64::MIN_POSITIVE).ln()).collect(),
            log_norm: norm.max(f64::MIN_POSITIVE).ln(),
        }
    }
}

/// Slopes of `log|z_i|` and `log‖z‖` against `log τ` between the last
/// `count + 1` checkpoints, newest last. Positive slope: shrinking as `τ → 0`.
fn slopes(hist: &[Checkpoint], count: usize) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
    if hist.len() < count + 1 {
        return None;
    }
    let tail = &hist[hist.len() - count - 1..];
    let mut coords = Vec::with_capacity(count);
    let mut norms = Vec::with_capacity(count);
    for w in tail.windows(2) {
        let dt = w[1].log_tau - w[0].log_tau;
        coords.push(w[0].log_abs.iter().zip(&w[1].log_abs).map(|(a, b)| (b - a) / dt).collect());
        norms.push((w[1].log_norm - w[0].log_norm) / dt);
    }
    Some((coords, norms))
}

/// Coordinates shrinking steadily towards zero and already small.
fn vanishing(hist: &[Checkpoint], z: &[C64], rel: f64) -> Vec<bool> {
    let scale = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
    match slopes(hist, 2) {
        Some((coords, _)) => (0..z.len())
            .map(|i| coords.iter().all(|c| c[i] >= TREND_SLOPE) && z[i].norm() <= rel * scale)
            .collect(),
        None => vec![false; z.len()],
    }
}

fn trend_verdict(hist: &[Checkpoint], z: &[C64], start_norm: f64, cox: &CoxData) -> Option<AttemptOutcome> {
    if let Some((_, norms)) = slopes(hist, 3) {
        let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norms.iter().all(|&s| s <= -TREND_SLOPE) && norm >= 10.0 * start_norm {
            return Some(AttemptOutcome::Diverged);
        }
    }
    let small = vanishing(hist, z, 1e-3);
    if small.iter().any(|&b| b) && cox.irrelevant_gens.iter().all(|g| g.iter().any(|&i| small[i])) {
        return Some(AttemptOutcome::BaseLocus);
    }
    None
}

/// Gauss-Newton on the target and the slice with the coordinates in `zero`
/// held at zero.
fn gauss_newton(hom: &dyn CoxHomotopy, slice: &Slice, z: &[C64], zero: &[bool]) -> Vec<C64> {
    let k = z.len();
    let n = hom.n();
    let free: Vec<usize> = (0..k).filter(|&i| !zero[i]).collect();
    let mut x = DVector::from_fn(k, |i, _| if zero[i] { C64::new(0.0, 0.0) } else { z[i] });
    let scale = x.norm().max(1.0);
    let mut prev = f64::INFINITY;
    for _ in 0..40 {
        let (f, j, _) = hom.eval(x.as_slice(), 0.0);
        let l = slice.eval(&x);
        let mut rhs = DVector::zeros(k);
        rhs.rows_mut(0, n).copy_from(&(-f));
        rhs.rows_mut(n, k - n).copy_from(&(-l));
        let m = DMatrix::from_fn(k, free.len(), |r, c| if r < n { j[(r, free[c])] } else { slice.a[(r - n, free[c])] });
        let Ok(dx) = m.svd(true, true).solve(&rhs, 1e-14) else { break };
        let nd = dx.norm();
        if !nd.is_finite() || nd > 10.0 * prev {
            break;
        }
        for (c, &i) in free.iter().enumerate() {
            x[i] += dx[c];
        }
        prev = nd;
        if nd <= 1e-15 * scale {
            break;
        }
    }
    x.iter().copied().collect()
}

fn residual(hom: &dyn CoxHomotopy, slice: &Slice, z: &[C64]) -> f64 {
    let (f, _, _) = hom.eval(z, 0.0);
    let scale = z.iter().map(|v| v.norm()).fold(1.0, f64::max);
    f.norm().max(slice.eval(&DVector::from_column_slice(z)).norm() / scale)
}

/// Gauss-Newton on all coordinates, kept only if it lowers the residual.
pub(crate) fn polish(hom: &dyn CoxHomotopy, slice: &Slice, z: Vec<C64>) -> Vec<C64> {
    let p = gauss_newton(hom, slice, &z, &vec![false; z.len()]);
    if residual(hom, slice, &p) < residual(hom, slice, &z) {
        p
    } else {
        z
    }
}

fn landing(
    hom: &dyn CoxHomotopy,
    slice: &Slice,
    z: Vec<C64>,
    tau: f64,
    steps: usize,
    cox: &CoxData,
    cfg: &EndgameConfig,
) -> Attempt {
    let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let z = if norm.is_finite() && norm <= cfg.options.divergence_bound { polish(hom, slice, z) } else { z };
    let condition = jacobian_condition(hom, slice, &z, 0.0);
    let outcome = if !norm.is_finite() || norm > cfg.options.divergence_bound {
        AttemptOutcome::Diverged
    } else if cox.base_locus_residual(&z) <= cfg.base_locus_tol {
        AttemptOutcome::BaseLocus
    } else {
        AttemptOutcome::Landed
    };
    Attempt { outcome, z, tau, steps, singular: condition > SINGULAR_CONDITION, condition }
}

/// One endgame run for the representative `z` at `τ_EG`.
pub fn endgame_attempt(
    hom: &dyn CoxHomotopy,
    slice: &Slice,
    tau_eg: f64,
    z: &[C64],
    cox: &CoxData,
    cfg: &EndgameConfig,
    observer: &mut dyn FnMut(&StepRecord),
) -> Attempt {
    let stop = |outcome, z: Vec<C64>, tau, steps, condition| Attempt { outcome, z, tau, steps, singular: false, condition };
    let mut path = match SlicedCoxPath::new(hom, slice.clone()) {
        Ok(p) => p,
        Err(_) => return stop(AttemptOutcome::Failed, z.to_vec(), tau_eg, 0, f64::INFINITY),
    };
    let z0 = DVector::from_column_slice(z);
    let start_norm = z0.norm();
    let mut y = path.local(&z0);
    let mut hist = vec![Checkpoint::new(tau_eg, z)];
    let mut tau = tau_eg;
    let mut steps = 0;
    while tau > 0.0 {
        let next = if tau / 10.0 < LAST_DECADE { 0.0 } else { tau / 10.0 };
        let r = track(&mut path, &y, tau, next, &cfg.options, observer);
        steps += r.steps;
        let zr: Vec<C64> = path.ambient(&r.y).iter().copied().collect();
        match r.status {
            TrackStatus::Success if next == 0.0 => {
                let yr = refine(&path, &r.y, 0.0, 8);
                let zf = path.ambient(&yr).iter().copied().collect();
                return landing(hom, slice, zf, 0.0, steps, cox, cfg);
            }
            TrackStatus::Success => {
                y = r.y;
                tau = next;
                hist.push(Checkpoint::new(tau, &zr));
                if let Some(o) = trend_verdict(&hist, &zr, start_norm, cox) {
                    return stop(o, zr, tau, steps, r.condition);
                }
            }
            TrackStatus::Diverged => return stop(AttemptOutcome::Diverged, zr, r.t, steps, r.condition),
            _ => {
                if r.t > 0.0 && r.t < tau {
                    hist.push(Checkpoint::new(r.t, &zr));
                }
                if let Some(o) = trend_verdict(&hist, &zr, start_norm, cox) {
                    return stop(o, zr, r.t, steps, r.condition);
                }
                if r.t > STALL_TAU {
                    return stop(AttemptOutcome::Failed, zr, r.t, steps, r.condition);
                }
                let zero = vanishing(&hist, &zr, 1e-4);
                let zf = gauss_newton(hom, slice, &zr, &zero);
                return landing(hom, slice, zf, 0.0, steps, cox, cfg);
            }
        }
    }
    stop(AttemptOutcome::Failed, z.to_vec(), tau, steps, f64::INFINITY)
}

/// Runs attempts from `z_eg`, switching to unused representatives of its
/// orbit on `slice` until one lands or the switches run out.
#[allow(clippy::too_many_arguments)]
pub fn endgame(
    hom: &dyn CoxHomotopy,
    slice: &Slice,
    tau_eg: f64,
    z_eg: &[C64],
    cox: &CoxData,
    cfg: &EndgameConfig,
    rng: &mut impl Rng,
    observer: &mut dyn FnMut(&StepRecord),
) -> EndgameResult {
    let mut used = vec![z_eg.to_vec()];
    let mut reps: Option<Vec<Vec<C64>>> = None;
    let mut attempts = Vec::new();
    let mut current = z_eg.to_vec();
    loop {
        let a = endgame_attempt(hom, slice, tau_eg, &current, cox, cfg, observer);
        log::debug!("endgame attempt {}: {:?} at τ = {:.1e}", attempts.len(), a.outcome, a.tau);
        let landed = a.outcome == AttemptOutcome::Landed;
        attempts.push(a);
        if landed {
            return EndgameResult { landed: Some(attempts.len() - 1), attempts };
        }
        if attempts.len() > cfg.max_switches {
            break;
        }
        let reps = reps.get_or_insert_with(|| slice_orbit(z_eg, slice, cox, cfg.search, rng));
        match reps.iter().find(|p| !used.iter().any(|u| same_point(u, p))) {
            Some(p) => {
                used.push(p.clone());
                current = p.clone();
            }
            None => break,
        }
    }
    EndgameResult { attempts, landed: None }
}

/// Runs one attempt from every representative of the orbit of `z_eg` on `slice`.
pub fn endgame_all_representatives(
    hom: &dyn CoxHomotopy,
    slice: &Slice,
    tau_eg: f64,
    z_eg: &[C64],
    cox: &CoxData,
    cfg: &EndgameConfig,
    rng: &mut impl Rng,
) -> Vec<Attempt> {
    slice_orbit(z_eg, slice, cox, cfg.search, rng)
        .iter()
        .map(|z| endgame_attempt(hom, slice, tau_eg, z, cox, cfg, &mut |_| {}))
        .collect()
}
