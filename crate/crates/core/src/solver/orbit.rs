//! Representatives of a `G`-orbit on a fixed slice.
//!
//! The points of `G·z ∩ {A x + b = 0}` are `w·λ·z` for torsion tuples `w`
//! and solutions `λ ∈ (C*)^{k-n}` of the λ-system
//! `Σ_j A_ij (w·z)_j λ^{P''_{:,j}} + b_i = 0`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::startsys::polyhedral_start;
use crate::system::{LaurentPoly, SparseSystem, Term, C64};
use crate::toric::CoxData;
use crate::tracker::{track, LaurentSegment, Slice, TrackOptions, TrackStatus};

/// Monodromy loops tried per torsion component before giving up.
pub const LOOP_BUDGET: usize = 20;

/// Two representatives are the same when closer than this, relative to scale.
pub const SEPARATION: f64 = 1e-8;

pub(crate) fn random_complex(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) / std::f64::consts::SQRT_2
}

pub(crate) fn random_vector(rng: &mut impl Rng, len: usize) -> DVector<C64> {
    DVector::from_fn(len, |_, _| random_complex(rng))
}

pub fn same_point(a: &[C64], b: &[C64]) -> bool {
    let scale = a.iter().chain(b).map(|v| v.norm()).fold(1.0, f64::max);
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    d <= SEPARATION * scale
}

/// The λ-system for the orbit of `z` with constant term `b`.
pub fn lambda_system(z: &[C64], a: &DMatrix<C64>, b: &DVector<C64>, cox: &CoxData) -> SparseSystem {
    let r = cox.orbit_dim();
    let polys = (0..r)
        .map(|i| {
            let mut terms: Vec<Term> = (0..cox.k)
                .filter(|&j| z[j].norm() > 0.0)
                .map(|j| Term { exponent: (0..r).map(|row| cox.p2[row][j]).collect(), coeff: a[(i, j)] * z[j] })
                .collect();
            terms.push(Term { exponent: vec![0; r], coeff: b[i] });
            LaurentPoly::new(terms)
        })
        .collect();
    SparseSystem { n: r, polys }
}

/// Tracks `λ` along the straight segments `b_0 → b_1 → …`.
fn track_constants(
    z: &[C64],
    a: &DMatrix<C64>,
    legs: &[DVector<C64>],
    lambda: &[C64],
    cox: &CoxData,
) -> Option<Vec<C64>> {
    let opts = TrackOptions::default();
    let mut y = DVector::from_column_slice(lambda);
    for pair in legs.windows(2) {
        let from = lambda_system(z, a, &pair[0], cox);
        let to = lambda_system(z, a, &pair[1], cox);
        let mut seg = LaurentSegment { from: &from, to: &to, gamma: C64::new(1.0, 0.0) };
        let r = track(&mut seg, &y, 0.0, 1.0, &opts, &mut |_| {});
        if r.status != TrackStatus::Success {
            return None;
        }
        y = r.y;
    }
    Some(y.iter().copied().collect())
}

/// How the λ-system is solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum RepresentativeSearch {
    /// Random triangle loops in the constant term, seeded at `λ = 1`.
    #[default]
    Monodromy,
    /// Full polyhedral solve of each λ-system.
    Exhaustive,
}

/// Expected number of representatives of the orbit of `z`, when the
/// stratum admits a degree formula.
pub fn expected_representatives(z: &[C64], cox: &CoxData) -> Option<(u64, u64)> {
    let stratum: Vec<usize> = (0..cox.k).filter(|&i| z[i].norm() > 0.0).collect();
    cox.orbit_degree(&stratum).ok().map(|d| (d.degree, d.components))
}

/// All representatives of `G·z` on `slice` that the search finds, `z`
/// itself first when it lies on the slice.
pub fn slice_orbit(
    z: &[C64],
    slice: &Slice,
    cox: &CoxData,
    search: RepresentativeSearch,
    rng: &mut impl Rng,
) -> Vec<Vec<C64>> {
    let r = cox.orbit_dim();
    let zv = DVector::from_column_slice(z);
    let mut found: Vec<Vec<C64>> = Vec::new();
    if slice.eval(&zv).norm() <= 1e-9 * zv.norm().max(1.0) {
        found.push(z.to_vec());
    }
    if r == 0 {
        return found;
    }
    let expected = expected_representatives(z, cox);
    let per_component = expected.map(|(d, s)| (d / s.max(1)) as usize);
    let total = expected.map(|(d, _)| d as usize);
    let b = &slice.b;
    let one = vec![C64::new(1.0, 0.0); r];
    // loops much wider than |b| wind around the discriminant far more often
    let scale = 4.0 * b.norm().max(1e-3);

    for w in cox.torsion_elements() {
        if total.is_some_and(|t| found.len() >= t) {
            break;
        }
        let zw = cox.orbit_point(z, &w, &[]);
        let push = |found: &mut Vec<Vec<C64>>, lambda: &[C64]| -> bool {
            if lambda.iter().any(|l| !l.re.is_finite() || !l.im.is_finite() || l.norm() == 0.0) {
                return false;
            }
            let p = cox.orbit_point(&zw, &vec![0; w.len()], lambda);
            if found.iter().any(|q| same_point(q, &p)) {
                false
            } else {
                found.push(p);
                true
            }
        };
        let mut component: Vec<Vec<C64>> = Vec::new();
        match search {
            RepresentativeSearch::Exhaustive => {
                let target = lambda_system(&zw, &slice.a, b, cox);
                let Ok(start) = polyhedral_start(&target.supports(), rng.random()) else { continue };
                let gamma = C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
                for s in &start.solutions {
                    let mut seg = LaurentSegment { from: &start.system, to: &target, gamma };
                    let res = track(&mut seg, &DVector::from_column_slice(s), 0.0, 1.0, &TrackOptions::default(), &mut |_| {});
                    if res.status == TrackStatus::Success {
                        let l: Vec<C64> = res.y.iter().copied().collect();
                        if push(&mut found, &l) {
                            component.push(l);
                        }
                    }
                }
            }
            RepresentativeSearch::Monodromy => {
                let bw = -(&slice.a * DVector::from_column_slice(&zw));
                let seed = if (&bw - b).norm() <= 1e-12 * b.norm().max(1.0) {
                    Some(one.clone())
                } else {
                    let mid = random_vector(rng, r) * C64::new(scale, 0.0);
                    track_constants(&zw, &slice.a, &[bw, mid, b.clone()], &one, cox)
                };
                let Some(seed) = seed else { continue };
                let mut lambdas = vec![seed.clone()];
                push(&mut found, &seed);
                component.push(seed);
                for _ in 0..LOOP_BUDGET {
                    if per_component.is_some_and(|c| lambdas.len() >= c) {
                        break;
                    }
                    let b1 = random_vector(rng, r) * C64::new(scale, 0.0);
                    let b2 = random_vector(rng, r) * C64::new(scale, 0.0);
                    let legs = [b.clone(), b1, b2, b.clone()];
                    let mut new = Vec::new();
                    for l in &lambdas {
                        if let Some(end) = track_constants(&zw, &slice.a, &legs, l, cox) {
                            let p = cox.orbit_point(&zw, &vec![0; w.len()], &end);
                            let known = lambdas
                                .iter()
                                .chain(&new)
                                .any(|q: &Vec<C64>| same_point(&cox.orbit_point(&zw, &vec![0; w.len()], q), &p));
                            if !known {
                                new.push(end);
                            }
                        }
                    }
                    for l in new {
                        push(&mut found, &l);
                        lambdas.push(l);
                    }
                }
                component.extend(lambdas.into_iter().skip(1));
            }
        }
        log::trace!("torsion {w:?}: {} λ-solutions", component.len());
    }
    found
}

/// A representative of `G·z` on `slice` not within separation of any point in `used`.
pub fn switch_representative(
    z: &[C64],
    slice: &Slice,
    cox: &CoxData,
    used: &[Vec<C64>],
    rng: &mut impl Rng,
) -> Result<Vec<C64>> {
    slice_orbit(z, slice, cox, RepresentativeSearch::Monodromy, rng)
        .into_iter()
        .find(|p| !used.iter().any(|u| same_point(u, p)))
        .ok_or(Error::NoNewRepresentative { loops: LOOP_BUDGET })
}
