//! Generic start systems with the target's supports, solved by the
//! polyhedral homotopy: binomial systems on the mixed cells, then tracking
//! in the torus along the lifting.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{smith_normal_form, IntMatrix};
use crate::polytope::{random_mixed_cells, Lifting, MixedCell, Point};
use crate::system::{monomial, monomial_gradient, LaurentPoly, SparseSystem, Term, C64};
use crate::tracker::{refine, track, PathSystem, TrackOptions, TrackStatus};

/// Liftings for start systems are drawn from `[1, START_LIFTING_MAX]`.
/// Small values keep the powers of the deformation parameter moderate.
const START_LIFTING_MAX: i64 = 64;
const ROUNDS: usize = 3;
/// Starting value of `log s` after normalizing the smallest positive power to 1.
const SIGMA_START: f64 = -36.0;

/// A start system together with all its solutions in the torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StartSystem {
    pub system: SparseSystem,
    pub solutions: Vec<Vec<C64>>,
}

/// All solutions of `c_i t^{p_i} + d_i t^{q_i} = 0`, `i = 1..n`, in the torus.
pub fn binomial_solutions(pairs: &[(Point, Point)], coeffs: &[(C64, C64)]) -> Result<Vec<Vec<C64>>> {
    let n = pairs.len();
    let rows: Vec<Vec<i64>> = pairs.iter().map(|(p, q)| p.iter().zip(q).map(|(a, b)| a - b).collect()).collect();
    let v = IntMatrix::from_rows(&rows);
    let snf = smith_normal_form(&v);
    if snf.rank < n {
        return Err(Error::RankDeficient { rank: snf.rank, needed: n });
    }
    // t^{V} = r with r_i = -d_i / c_i. With U V W = D and log t = W log s,
    // the system becomes s_l^{d_l} = prod_i r_i^{U_li}.
    let log_r: Vec<C64> = coeffs.iter().map(|(c, d)| (-d / c).ln()).collect();
    let u = snf.p.to_rows_i64();
    let w = snf.q.to_rows_i64();
    let degrees: Vec<u64> = snf.diag.iter().map(|d| d.to_u64().ok_or(Error::Overflow)).collect::<Result<_>>()?;
    let log_rho: Vec<C64> = (0..n).map(|l| (0..n).map(|i| log_r[i] * u[l][i] as f64).sum()).collect();
    let mut out = Vec::new();
    let mut idx = vec![0u64; n];
    loop {
        let log_s: Vec<C64> = (0..n)
            .map(|l| (log_rho[l] + C64::new(0.0, 2.0 * PI * idx[l] as f64)) / degrees[l] as f64)
            .collect();
        let t: Vec<C64> = (0..n).map(|j| (0..n).map(|l| log_s[l] * w[j][l] as f64).sum::<C64>().exp()).collect();
        out.push(t);
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(out);
            }
            idx[pos] += 1;
            if idx[pos] < degrees[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `sum_m c_m y^m s^{e_m}` with `s = exp(σ)` and `e_m >= 0`, vanishing
/// exactly on the cell's points.
struct CellHomotopy<'a> {
    system: &'a SparseSystem,
    powers: Vec<Vec<f64>>,
}

impl CellHomotopy<'_> {
    fn new<'a>(system: &'a SparseSystem, lifting: &Lifting, cell: &MixedCell) -> CellHomotopy<'a> {
        let mut raw: Vec<Vec<i128>> = Vec::new();
        for (i, p) in system.polys.iter().enumerate() {
            let vals: Vec<i128> = p
                .terms
                .iter()
                .enumerate()
                .map(|(m, t)| {
                    let dot: i128 = t.exponent.iter().zip(&cell.numerator).map(|(&a, &b)| a as i128 * b).sum();
                    dot + cell.denominator * lifting.values[i][m] as i128
                })
                .collect();
            let min = *vals.iter().min().unwrap();
            raw.push(vals.into_iter().map(|v| v - min).collect());
        }
        let smallest = raw.iter().flatten().copied().filter(|&v| v > 0).min().unwrap_or(1);
        let powers = raw.iter().map(|r| r.iter().map(|&v| v as f64 / smallest as f64).collect()).collect();
        CellHomotopy { system, powers }
    }
}

impl PathSystem for CellHomotopy<'_> {
    fn dim(&self) -> usize {
        self.system.n
    }

    fn evaluate(&self, y: &DVector<C64>, sigma: f64) -> (DVector<C64>, DMatrix<C64>, DVector<C64>) {
        let n = self.system.n;
        let mut val = DVector::zeros(n);
        let mut jac = DMatrix::zeros(n, n);
        let mut d = DVector::zeros(n);
        let mut g = vec![C64::new(0.0, 0.0); n];
        for (i, p) in self.system.polys.iter().enumerate() {
            g.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            for (t, &e) in p.terms.iter().zip(&self.powers[i]) {
                let w = (sigma * e).exp();
                if w == 0.0 {
                    continue;
                }
                let c = t.coeff * w;
                let m = monomial_gradient(y.as_slice(), &t.exponent, c, &mut g);
                val[i] += c * m;
                d[i] += c * m * e;
            }
            for j in 0..n {
                jac[(i, j)] = g[j];
            }
        }
        (val, jac, d)
    }
}

/// Same supports, unit-modulus random coefficients.
pub fn random_system(supports: &[Vec<Point>], rng: &mut impl Rng) -> SparseSystem {
    let polys = supports
        .iter()
        .map(|s| {
            LaurentPoly::new(
                s.iter()
                    .map(|m| Term { exponent: m.clone(), coeff: C64::from_polar(1.0, rng.random_range(0.0..TAU)) })
                    .collect(),
            )
        })
        .collect();
    SparseSystem { n: supports.len(), polys }
}

/// Tracks the solutions of one cell's binomial system to the start system.
fn solve_cell(system: &SparseSystem, lifting: &Lifting, cell: &MixedCell) -> Result<Vec<Vec<C64>>> {
    let pairs: Vec<(Point, Point)> = cell
        .pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| (system.polys[i].terms[a].exponent.clone(), system.polys[i].terms[b].exponent.clone()))
        .collect();
    let coeffs: Vec<(C64, C64)> = cell
        .pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| (system.polys[i].terms[a].coeff, system.polys[i].terms[b].coeff))
        .collect();
    let starts = binomial_solutions(&pairs, &coeffs)?;
    let opts = TrackOptions { max_step: 1.0, initial_step: 0.05, ..TrackOptions::default() };
    starts
        .into_par_iter()
        .map(|y0| {
            let mut h = CellHomotopy::new(system, lifting, cell);
            let y0 = DVector::from_vec(y0);
            let r = track(&mut h, &y0, SIGMA_START, 0.0, &opts, &mut |_| {});
            if r.status != TrackStatus::Success {
                return Err(Error::CellTrackFailed(format!("{:?} at log s = {:.3}", r.status, r.t)));
            }
            Ok(refine(&h, &r.y, 0.0, 5).iter().copied().collect())
        })
        .collect()
}

fn distinct(points: &[Vec<C64>], tol: f64) -> bool {
    for i in 0..points.len() {
        for j in 0..i {
            let d: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let s = points[i].iter().map(|a| a.norm()).fold(1.0, f64::max);
            if d <= tol * s {
                return false;
            }
        }
    }
    true
}

/// A start system with random unit-modulus coefficients on the given
/// supports and all of its torus solutions.
pub fn polyhedral_start(supports: &[Vec<Point>], seed: u64) -> Result<StartSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = Error::CellTrackFailed("no attempt".into());
    for _ in 0..ROUNDS {
        let system = random_system(supports, &mut rng);
        let (lifting, cells) = random_mixed_cells(&system.supports(), START_LIFTING_MAX, &mut rng)?;
        let expected: u64 = cells.iter().map(|c| c.volume).sum();
        let per_cell: Result<Vec<Vec<Vec<C64>>>> =
            cells.par_iter().map(|cell| solve_cell(&system, &lifting, cell)).collect();
        let solutions: Vec<Vec<C64>> = match per_cell {
            Ok(s) => s.into_iter().flatten().collect(),
            Err(e) => {
                log::debug!("start system round failed: {e}");
                last = e;
                continue;
            }
        };
        if solutions.len() as u64 != expected {
            last = Error::StartCountMismatch { expected: expected as usize, got: solutions.len() };
            continue;
        }
        let worst = solutions.iter().map(|t| system.relative_residual(t)).fold(0.0, f64::max);
        if worst > 1e-10 || !distinct(&solutions, 1e-8) {
            last = Error::CellTrackFailed(format!("start solutions not certified (residual {worst:.2e})"));
            continue;
        }
        return Ok(StartSystem { system, solutions });
    }
    Err(last)
}

/// Evaluates `t^m` for each support point; used by tests and diagnostics.
pub fn support_monomials(support: &[Point], t: &[C64]) -> Vec<C64> {
    support.iter().map(|m| monomial(t, m.iter().copied())).collect()
}
