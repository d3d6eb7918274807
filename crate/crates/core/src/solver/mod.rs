//! Solving on the toric variety: start-solution lifting, tracking in Cox
//! coordinates down to `τ_EG`, the endgame and endpoint classification.

mod endgame;
mod orbit;

pub use endgame::{
    endgame, endgame_all_representatives, endgame_attempt, Attempt, AttemptOutcome, EndgameConfig, EndgameResult,
    SINGULAR_CONDITION,
};
pub use orbit::{
    expected_representatives, lambda_system, same_point, slice_orbit, switch_representative, RepresentativeSearch,
    LOOP_BUDGET, SEPARATION,
};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{integer_kernel, well_conditioned_columns, IntMatrix};
use crate::startsys::StartSystem;
use crate::system::{monomial, CoxSystem, SparseSystem, C64};
use crate::toric::CoxData;
use crate::tracker::{orthogonal_slice, track, MovingSlicePath, PathSystem, SlicedCoxPath, Slice, StepRecord, StraightLine, TrackOptions, TrackStatus};
use orbit::{random_complex, random_vector};
use endgame::polish;

/// Extra attempts of the main phase with smaller steps.
const MAIN_RETRIES: usize = 2;
const LIFT_ATTEMPTS: usize = 3;
/// Rounds of re-tracking paths whose nonsingular endpoints coincide.
const COLLISION_ROUNDS: usize = 2;
/// Endpoint residual above which the point is polished again in its best chart.
const POLISH_ABOVE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceStrategy {
    #[default]
    Random,
    Orthogonal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub tau_eg: f64,
    pub seed: u64,
    pub slice: SliceStrategy,
    pub base_locus_tol: f64,
    /// Relative size below which a coordinate counts as zero.
    pub zero_tol: f64,
    /// Defaults to the generic orbit degree.
    pub max_switches: Option<usize>,
    pub gamma: Option<C64>,
    pub search: RepresentativeSearch,
    pub record_condition: bool,
    pub track: TrackOptions,
    pub endgame: TrackOptions,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tau_eg: 0.1,
            seed: 0,
            slice: SliceStrategy::Random,
            base_locus_tol: 1e-8,
            zero_tol: 1e-8,
            max_switches: None,
            gamma: None,
            search: RepresentativeSearch::Monodromy,
            record_condition: false,
            track: TrackOptions::default(),
            endgame: TrackOptions::endgame(),
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_eg > 0.0 && self.tau_eg <= 1.0) {
            return Err(Error::Invalid(format!("tau_eg must lie in (0, 1], got {}", self.tau_eg)));
        }
        if let Some(g) = self.gamma {
            if !(g.norm() > 0.0) {
                return Err(Error::Invalid("gamma must be nonzero".into()));
            }
        }
        Ok(())
    }

    fn endgame_config(&self, cox: &CoxData) -> EndgameConfig {
        EndgameConfig {
            base_locus_tol: self.base_locus_tol,
            max_switches: self.max_switches.unwrap_or(cox.generic_orbit_degree as usize),
            options: self.endgame.clone(),
            search: self.search,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PointStatus {
    Torus,
    Boundary,
    BaseLocus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    /// Indices of the nonzero coordinates, 0-based.
    pub stratum: Vec<usize>,
    pub status: PointStatus,
    /// Rays of the vanishing coordinates, naming the face system the point solves.
    pub face_rays: Vec<Vec<i64>>,
}

/// Representative of `G·z` in the affine chart of `cone`: real positive `λ`
/// bring the coordinates off the cone to 1 and even out the rest.
fn chart_representative(z: &[C64], cone: &[usize], cox: &CoxData) -> Option<Vec<C64>> {
    const OFF_CONE_WEIGHT: f64 = 1e4;
    let r = cox.orbit_dim();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..cox.k {
        let a = z[i].norm();
        if !a.is_finite() {
            return None;
        }
        let on = cone.contains(&i);
        if a == 0.0 {
            if on {
                continue;
            }
            return None;
        }
        let w = if on { 1.0 } else { OFF_CONE_WEIGHT };
        let mut row: Vec<f64> = (0..r).map(|c| w * cox.p2[c][i] as f64).collect();
        row.push(if on { -1.0 } else { 0.0 });
        rows.push(row);
        rhs.push(-w * a.ln());
    }
    let m = DMatrix::from_fn(rows.len(), r + 1, |i, j| rows[i][j]);
    let mu = m.svd(true, true).solve(&DVector::from_vec(rhs), 1e-12).ok()?;
    Some(
        (0..cox.k)
            .map(|i| {
                let e: f64 = (0..r).map(|c| cox.p2[c][i] as f64 * mu[c]).sum();
                z[i] * e.exp()
            })
            .collect(),
    )
}

/// The chart representative of `G·z` with the smallest largest coordinate.
/// Its vanishing coordinates do not depend on where the slice met the orbit.
pub fn chart_normalized(z: &[C64], cox: &CoxData) -> Vec<C64> {
    if cox.orbit_dim() == 0 {
        return z.to_vec();
    }
    let top = |w: &[C64]| w.iter().map(|v| v.norm()).fold(0.0, f64::max);
    cox.max_cones
        .iter()
        .filter_map(|cone| chart_representative(z, cone, cox))
        .filter(|w| top(w).is_finite())
        .min_by(|a, b| top(a).total_cmp(&top(b)))
        .unwrap_or_else(|| z.to_vec())
}

/// Stratum and status of `z`. Vanishing is judged in the best affine chart;
/// points of the base locus are caught before that.
pub fn classify(z: &[C64], zero_tol: f64, base_locus_tol: f64, cox: &CoxData) -> Classification {
    let scale = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let raw: Vec<usize> = (0..z.len()).filter(|&i| z[i].norm() > zero_tol * scale).collect();
    let (stratum, status) = if raw.len() < z.len() && cox.base_locus_residual(z) <= base_locus_tol {
        (raw, PointStatus::BaseLocus)
    } else {
        let w = chart_normalized(z, cox);
        let scale = w.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let stratum: Vec<usize> = (0..w.len()).filter(|&i| w[i].norm() > zero_tol * scale).collect();
        let status = if stratum.len() == w.len() { PointStatus::Torus } else { PointStatus::Boundary };
        (stratum, status)
    };
    let face_rays = (0..z.len()).filter(|i| !stratum.contains(i)).map(|i| cox.ray(i)).collect();
    Classification { stratum, status, face_rays }
}

/// Coordinates of the point on its torus orbit of the variety: the characters
/// `x^{F^T m}` for `m` orthogonal to the rays of the vanishing coordinates.
pub fn orbit_coordinates(z: &[C64], stratum: &[usize], cox: &CoxData) -> Vec<C64> {
    let zero: Vec<Vec<i64>> = (0..cox.k).filter(|i| !stratum.contains(i)).map(|i| cox.ray(i)).collect();
    let basis = if zero.is_empty() { IntMatrix::identity(cox.n) } else { integer_kernel(&IntMatrix::from_rows(&zero)) };
    (0..basis.ncols())
        .map(|c| {
            let m = basis.col_i64(c);
            monomial(z, (0..cox.k).map(|i| cox.ray(i).iter().zip(&m).map(|(a, b)| a * b).sum()))
        })
        .collect()
}

/// Whether two endpoints are the same point of the variety.
pub fn same_solution(a: &Solution, b: &Solution, cox: &CoxData) -> bool {
    if a.stratum != b.stratum {
        return false;
    }
    let (u, v) = (orbit_coordinates(&a.cox, &a.stratum, cox), orbit_coordinates(&b.cox, &b.stratum, cox));
    u.iter().zip(&v).all(|(x, y)| (x - y).norm() <= 1e-6 * x.norm().max(y.norm()).max(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PathStatus {
    Success,
    Failed,
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathInfo {
    pub steps: usize,
    pub switches: usize,
    pub status: PathStatus,
    pub attempts: Vec<AttemptOutcome>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// Index of the start solution.
    pub index: usize,
    pub cox: Vec<C64>,
    pub stratum: Vec<usize>,
    pub status: PointStatus,
    pub face_rays: Vec<Vec<i64>>,
    pub torus: Option<Vec<C64>>,
    /// Relative residual of each homogenized equation.
    pub residuals: Vec<f64>,
    pub residual: f64,
    pub singular: bool,
    pub condition: f64,
    pub path: PathInfo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub reason: String,
    pub last: Vec<C64>,
    pub path: PathInfo,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PathOutcome {
    Solved(Solution),
    Failed(Failure),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CondRow {
    pub path_id: usize,
    pub tau: f64,
    pub cond: f64,
    pub step: f64,
}

#[derive(Clone, Debug)]
pub struct SolveOutput {
    pub solutions: Vec<Solution>,
    pub failures: Vec<Failure>,
    pub condition_log: Vec<CondRow>,
    pub gamma: C64,
}

impl SolveOutput {
    /// Boundary strata hit by more than one solution; a hint for
    /// positive-dimensional components.
    pub fn repeated_boundary_strata(&self) -> Vec<(Vec<usize>, usize)> {
        let mut out: Vec<(Vec<usize>, usize)> = Vec::new();
        for s in self.solutions.iter().filter(|s| s.status == PointStatus::Boundary) {
            match out.iter_mut().find(|(st, _)| *st == s.stratum) {
                Some(e) => e.1 += 1,
                None => out.push((s.stratum.clone(), 1)),
            }
        }
        out.retain(|e| e.1 > 1);
        out
    }
}

pub fn random_unit(rng: &mut impl Rng) -> C64 {
    C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
}

/// Random affine slice of codimension `k - n`.
pub fn random_slice(cox: &CoxData, rng: &mut impl Rng) -> Slice {
    let r = cox.orbit_dim();
    Slice { a: DMatrix::from_fn(r, cox.k, |_, _| random_complex(rng)), b: random_vector(rng, r) }
}

/// Cox coordinates `v` with `π(v) = t`, supported on `columns`; the other
/// coordinates are 1.
pub fn initial_lift(t: &[C64], cox: &CoxData, columns: &[usize]) -> Result<Vec<C64>> {
    let n = cox.n;
    let sub = cox.f.select_cols(columns).to_f64().map(|v| C64::new(v, 0.0));
    let logs = DVector::from_fn(n, |j, _| t[j].ln());
    let x = sub.lu().solve(&logs).ok_or(Error::RankDeficient { rank: n.saturating_sub(1), needed: n })?;
    let mut v = vec![C64::new(1.0, 0.0); cox.k];
    for (c, &i) in columns.iter().enumerate() {
        v[i] = x[c].exp();
    }
    Ok(v)
}

fn lift_one(
    t: &[C64],
    g: &CoxSystem,
    slice: &Slice,
    cox: &CoxData,
    columns: &[usize],
    gammas: &[C64],
    rng: &mut impl Rng,
) -> Result<Vec<C64>> {
    let v = initial_lift(t, cox, columns)?;
    let rest: Vec<usize> = (0..cox.k).filter(|i| !columns.contains(i)).collect();
    let from = Slice {
        a: DMatrix::from_fn(rest.len(), cox.k, |r, c| C64::new(if rest[r] == c { 1.0 } else { 0.0 }, 0.0)),
        b: DVector::from_element(rest.len(), C64::new(-1.0, 0.0)),
    };
    let off_orbit = |z: &[C64]| -> Result<f64> {
        let image = cox.quotient_map(z)?;
        Ok(image.iter().zip(t).map(|(a, b)| (a - b).norm() / b.norm().max(1.0)).fold(0.0, f64::max))
    };
    let opts = TrackOptions::default();
    let mut last = Error::Invalid("no lift attempt".into());
    for &gamma in gammas {
        let mut path = MovingSlicePath { start: g, from: from.clone(), to: slice.clone(), gamma };
        let r = track(&mut path, &DVector::from_column_slice(&v), 1.0, 0.0, &opts, &mut |_| {});
        if r.status != TrackStatus::Success {
            last = Error::Invalid(format!("lift tracking stopped with {:?} at τ = {:.2e}", r.status, r.t));
            continue;
        }
        let z: Vec<C64> = r.y.iter().copied().collect();
        let off = off_orbit(&z)?;
        if off > 1e-10 {
            last = Error::Invalid(format!("lift left the orbit (relative error {off:.2e})"));
            continue;
        }
        return Ok(z);
    }
    // solve for the orbit parameters on the slice directly
    log::debug!("moving-slice lift failed ({last}); solving for orbit parameters");
    for z in slice_orbit(&v, slice, cox, RepresentativeSearch::Exhaustive, rng) {
        if matches!(off_orbit(&z), Ok(off) if off <= 1e-10) && g.relative_residual(&z) <= 1e-10 {
            return Ok(z);
        }
    }
    Err(last)
}

/// Points on `slice` over the torus solutions `t` of the start system,
/// obtained by moving a coordinate slice through `v` with `π(v) = t`.
pub fn lift_start_solutions(
    torus_solutions: &[Vec<C64>],
    g: &CoxSystem,
    slice: &Slice,
    cox: &CoxData,
    rng: &mut impl Rng,
) -> Result<Vec<Result<Vec<C64>>>> {
    let columns = well_conditioned_columns(&cox.f, cox.n)?;
    let gammas: Vec<C64> = (0..LIFT_ATTEMPTS).map(|_| random_unit(rng)).collect();
    let seed: u64 = rng.random();
    Ok(torus_solutions
        .par_iter()
        .enumerate()
        .map(|(i, t)| lift_one(t, g, slice, cox, &columns, &gammas, &mut per_path_rng(seed, i)))
        .collect())
}

fn check_start(target: &SparseSystem, start: &StartSystem, cox: &CoxData) -> Result<()> {
    if start.system.n != target.n || start.system.polys.len() != target.polys.len() {
        return Err(Error::Invalid("start system has a different shape than the target".into()));
    }
    for (i, (a, b)) in target.supports().into_iter().zip(start.system.supports()).enumerate() {
        let (mut a, mut b) = (a, b);
        a.sort();
        b.sort();
        if a != b {
            return Err(Error::Invalid(format!("start equation {i} has a different support than the target")));
        }
    }
    if start.solutions.len() as u64 != cox.bkk {
        return Err(Error::StartCountMismatch { expected: cox.bkk as usize, got: start.solutions.len() });
    }
    Ok(())
}

struct Shared<'a> {
    cox: &'a CoxData,
    target: CoxSystem,
    start: CoxSystem,
    columns: Vec<usize>,
    cfg: &'a SolveConfig,
    endgame: EndgameConfig,
}

fn per_path_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

fn run_path(
    index: usize,
    t: &[C64],
    first: (C64, &Slice, &Result<Vec<C64>>),
    sh: &Shared,
    opts: &TrackOptions,
    log: &mut Vec<CondRow>,
) -> PathOutcome {
    let mut rng = per_path_rng(sh.cfg.seed, index);
    let record = sh.cfg.record_condition;
    let mut observer = |s: &StepRecord| {
        if record {
            log.push(CondRow { path_id: index, tau: s.t, cond: s.condition, step: s.step });
        }
    };
    let mut steps = 0;
    let mut last = t.to_vec();
    let mut reason = String::new();
    let gamma = first.0;
    let mut slice = first.1.clone();
    for attempt in 0..=MAIN_RETRIES {
        // retries keep the homotopy so that the path still ends at the
        // solution belonging to this start point; a new random slice only
        // changes the representative, which may have run off to infinity
        let fresh = attempt > 0 && sh.cfg.slice == SliceStrategy::Random;
        if fresh {
            slice = random_slice(sh.cox, &mut rng);
        }
        let scale = 0.1f64.powi(attempt as i32);
        let opts = TrackOptions {
            max_step: opts.max_step * scale,
            initial_step: opts.initial_step.min(opts.max_step * scale),
            max_first_correction: opts.max_first_correction * scale,
            ..opts.clone()
        };
        let relift = |rng: &mut ChaCha8Rng| {
            let gammas: Vec<C64> = (0..LIFT_ATTEMPTS).map(|_| random_unit(rng)).collect();
            lift_one(t, &sh.start, &slice, sh.cox, &sh.columns, &gammas, rng)
        };
        let z1 = match first.2 {
            _ if fresh => relift(&mut rng),
            Err(_) if attempt > 0 => relift(&mut rng),
            lift => lift.clone(),
        };
        let z1 = match z1 {
            Ok(z) => DVector::from_vec(z),
            Err(e) => {
                reason = format!("start lift failed: {e}");
                continue;
            }
        };
        let hom = StraightLine { target: sh.target.clone(), start: sh.start.clone(), gamma };
        let path = match sh.cfg.slice {
            SliceStrategy::Random => SlicedCoxPath::new(&hom, slice.clone()),
            SliceStrategy::Orthogonal => SlicedCoxPath::orthogonal(&hom, sh.cox.p2_f64(), &z1),
        };
        let mut path = match path {
            Ok(p) => p,
            Err(e) => {
                reason = e.to_string();
                continue;
            }
        };
        let y1 = path.local(&z1);
        let r = track(&mut path, &y1, 1.0, sh.cfg.tau_eg, &opts, &mut observer);
        steps += r.steps;
        let z_eg: Vec<C64> = path.ambient(&r.y).iter().copied().collect();
        if r.status != TrackStatus::Success {
            reason = format!("tracking to τ_EG stopped with {:?} at τ = {:.3e}", r.status, r.t);
            last = z_eg;
            continue;
        }
        let eg_slice = match sh.cfg.slice {
            SliceStrategy::Random => slice.clone(),
            SliceStrategy::Orthogonal => {
                let a = DMatrix::from_fn(sh.cox.orbit_dim(), sh.cox.k, |_, _| random_complex(&mut rng));
                Slice::through(a, &DVector::from_column_slice(&z_eg))
            }
        };
        let eg = endgame(&hom, &eg_slice, sh.cfg.tau_eg, &z_eg, sh.cox, &sh.endgame, &mut rng, &mut observer);
        steps += eg.attempts.iter().map(|a| a.steps).sum::<usize>();
        let outcomes: Vec<AttemptOutcome> = eg.attempts.iter().map(|a| a.outcome).collect();
        let switches = eg.switches();
        let Some(landed) = eg.solution() else {
            let failed_all = outcomes.iter().all(|o| *o == AttemptOutcome::Failed);
            if failed_all && attempt < MAIN_RETRIES {
                reason = "endgame tracking failed".into();
                last = z_eg;
                continue;
            }
            let last = eg.attempts.last().map(|a| a.z.clone()).unwrap_or(z_eg);
            return PathOutcome::Failed(Failure {
                index,
                reason: format!("no representative landed off the base locus ({outcomes:?})"),
                last,
                path: PathInfo { steps, switches, status: PathStatus::Exhausted, attempts: outcomes },
            });
        };
        let residuals_at = |z: &[C64]| -> Vec<f64> {
            sh.target.polys.iter().map(|p| p.eval(z).norm() / p.term_scale(z).max(f64::MIN_POSITIVE)).collect()
        };
        let worst = |r: &[f64]| r.iter().copied().fold(0.0, f64::max);
        let mut z = landed.z.clone();
        if !(worst(&residuals_at(&z)) <= POLISH_ABOVE) {
            // Newton in a badly scaled representative stalls early; redo it
            // in the best chart with a slice through the point
            let w = chart_normalized(&z, sh.cox);
            let through = orthogonal_slice(&sh.cox.p2_f64(), &DVector::from_column_slice(&w));
            let p = polish(&hom, &through, w);
            if worst(&residuals_at(&p)) < worst(&residuals_at(&z)) {
                z = p;
            }
        }
        let class = classify(&z, sh.cfg.zero_tol, sh.cfg.base_locus_tol, sh.cox);
        let residuals = residuals_at(&z);
        let residual = worst(&residuals);
        let info = PathInfo { steps, switches, status: PathStatus::Success, attempts: outcomes };
        if !(residual <= 1e-8) && attempt < MAIN_RETRIES {
            reason = format!("endpoint residual {residual:.2e} above 1e-8");
            last = z;
            continue;
        }
        if !(residual <= 1e-8) {
            return PathOutcome::Failed(Failure {
                index,
                reason: format!("endpoint residual {residual:.2e} above 1e-8"),
                last: z,
                path: PathInfo { status: PathStatus::Failed, ..info },
            });
        }
        let torus = if class.status == PointStatus::Torus { sh.cox.quotient_map(&z).ok() } else { None };
        return PathOutcome::Solved(Solution {
            index,
            cox: z,
            stratum: class.stratum,
            status: class.status,
            face_rays: class.face_rays,
            torus,
            residuals,
            residual,
            singular: landed.singular,
            condition: landed.condition,
            path: info,
        });
    }
    PathOutcome::Failed(Failure {
        index,
        reason,
        last,
        path: PathInfo { steps, switches: 0, status: PathStatus::Failed, attempts: Vec::new() },
    })
}

fn colliding_paths(results: &[(PathOutcome, Vec<CondRow>)], cox: &CoxData) -> Vec<usize> {
    let solved: Vec<(usize, &Solution)> = results
        .iter()
        .enumerate()
        .filter_map(|(i, (o, _))| match o {
            PathOutcome::Solved(s) if !s.singular => Some((i, s)),
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    for (a, &(i, si)) in solved.iter().enumerate() {
        for &(j, sj) in &solved[..a] {
            if same_solution(si, sj, cox) {
                out.extend([i, j]);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Solves `target` on its toric variety, tracking one path per start solution.
pub fn solve(target: &SparseSystem, start: &StartSystem, cfg: &SolveConfig) -> Result<SolveOutput> {
    let cox = CoxData::from_system(target)?;
    solve_with(&cox, target, start, cfg)
}

pub fn solve_with(cox: &CoxData, target: &SparseSystem, start: &StartSystem, cfg: &SolveConfig) -> Result<SolveOutput> {
    cfg.validate()?;
    check_start(target, start, cox)?;
    let f = cox.homogenize_system(target)?;
    let g = cox.homogenize_system(&start.system)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let gamma = cfg.gamma.map(|g| g / g.norm()).unwrap_or_else(|| random_unit(&mut rng));
    let slice = random_slice(cox, &mut rng);
    let lifts = lift_start_solutions(&start.solutions, &g, &slice, cox, &mut rng)?;
    let shared = Shared {
        cox,
        target: f,
        start: g,
        columns: well_conditioned_columns(&cox.f, cox.n)?,
        cfg,
        endgame: cfg.endgame_config(cox),
    };
    let run = |i: usize, opts: &TrackOptions| {
        let mut log = Vec::new();
        let out = run_path(i, &start.solutions[i], (gamma, &slice, &lifts[i]), &shared, opts, &mut log);
        (out, log)
    };
    let mut results: Vec<(PathOutcome, Vec<CondRow>)> =
        (0..start.solutions.len()).into_par_iter().map(|i| run(i, &cfg.track)).collect();
    // A nonsingular solution ends exactly one path; coinciding endpoints mean a
    // path jumped. Re-track them on the same homotopy with smaller steps.
    let mut opts = cfg.track.clone();
    for _ in 0..COLLISION_ROUNDS {
        let collided = colliding_paths(&results, cox);
        if collided.is_empty() {
            break;
        }
        log::info!("re-tracking paths {collided:?} with coinciding endpoints");
        opts.max_step /= 10.0;
        opts.initial_step = opts.initial_step.min(opts.max_step);
        opts.max_first_correction /= 10.0;
        let redo: Vec<(PathOutcome, Vec<CondRow>)> = collided.par_iter().map(|&i| run(i, &opts)).collect();
        for (i, r) in collided.into_iter().zip(redo) {
            results[i] = r;
        }
    }
    let mut out = SolveOutput { solutions: Vec::new(), failures: Vec::new(), condition_log: Vec::new(), gamma };
    for (o, log) in results {
        match o {
            PathOutcome::Solved(s) => out.solutions.push(s),
            PathOutcome::Failed(f) => out.failures.push(f),
        }
        out.condition_log.extend(log);
    }
    Ok(out)
}
