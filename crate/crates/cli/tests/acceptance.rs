//! Acceptance checks. Prints one line per criterion and exits nonzero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use coxhom::lattice::{smith_normal_form, IntMatrix};
use coxhom::polytope::{mixed_volume, normalized_volume_of_points, Point};
use coxhom::solver::{
    endgame_all_representatives, orbit_coordinates, random_slice, same_solution, solve_with, switch_representative,
    AttemptOutcome, EndgameConfig, PointStatus, SliceStrategy, Solution, SolveConfig, SolveOutput,
};
use coxhom::startsys::{polyhedral_start, random_system};
use coxhom::system::{LaurentPoly, SparseSystem, C64};
use coxhom::toric::CoxData;
use coxhom::tracker::{track, OrbitDegeneration, Slice, SlicedCoxPath, StraightLine, TrackOptions, TrackStatus};
use coxhom_cli::io::{condition_csv, SystemFile};
use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn fixture(name: &str) -> SparseSystem {
    let path = format!("{}/tests/data/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    SystemFile::parse(&text).and_then(|f| f.system()).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn solve_timed(sys: &SparseSystem, cfg: &SolveConfig) -> (CoxData, SolveOutput, Duration) {
    let t0 = Instant::now();
    let cox = CoxData::from_system(sys).expect("compactification");
    let start = polyhedral_start(&cox.supports, cfg.seed).expect("start system");
    let out = solve_with(&cox, sys, &start, cfg).expect("solve");
    (cox, out, t0.elapsed())
}

fn rel_close(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * x.norm().max(y.norm()).max(1.0))
}

/// Places `values`, listed in the order of `rays`, at the indices the variety uses.
fn reorder(cox: &CoxData, rays: &[[i64; 2]], values: &[f64]) -> Vec<C64> {
    let mut z = vec![c(0.0); cox.k];
    for (u, v) in rays.iter().zip(values) {
        z[cox.ray_index(u).expect("ray")] = c(*v);
    }
    z
}

fn indices(cox: &CoxData, rays: &[&[i64]]) -> Vec<usize> {
    let mut out: Vec<usize> = rays.iter().map(|u| cox.ray_index(u).expect("ray")).collect();
    out.sort();
    out
}

const HIRZEBRUCH_RAYS: [[i64; 2]; 4] = [[1, 0], [0, 1], [-1, 2], [0, -1]];

fn hirzebruch_golden() -> Check {
    let (cox, out, time) = solve_timed(&fixture("hirzebruch"), &SolveConfig::default());
    ensure!(out.failures.is_empty(), "{} failed paths", out.failures.len());
    ensure!(out.solutions.len() == 3, "{} solutions", out.solutions.len());
    let r = &HIRZEBRUCH_RAYS;
    let expected: [(Vec<usize>, [f64; 4]); 3] = [
        (indices(&cox, &[&r[0], &r[1], &r[2], &r[3]]), [-1.0, -1.0, 1.0, 1.0]),
        (indices(&cox, &[&r[1], &r[2], &r[3]]), [0.0, -1.0, 1.0, 1.0]),
        (indices(&cox, &[&r[0], &r[1], &r[3]]), [1.0, -1.0, 0.0, 1.0]),
    ];
    for (stratum, values) in &expected {
        let z = reorder(&cox, r, values);
        let target = orbit_coordinates(&z, stratum, &cox);
        let hit = out.solutions.iter().find(|s| &s.stratum == stratum);
        let Some(s) = hit else { return Err(format!("no solution on stratum {stratum:?}")) };
        let got = orbit_coordinates(&s.cox, stratum, &cox);
        ensure!(rel_close(&got, &target, 1e-8), "stratum {stratum:?}: {got:?} vs {target:?}");
        if stratum.len() == cox.k {
            let t = cox.quotient_map(&s.cox).map_err(|e| e.to_string())?;
            let t_ref = cox.quotient_map(&z).map_err(|e| e.to_string())?;
            ensure!(rel_close(&t, &t_ref, 1e-8), "torus point {t:?} vs {t_ref:?}");
        }
    }
    let worst = out.solutions.iter().map(|s| s.residual).fold(0.0, f64::max);
    ensure!(worst <= 1e-8, "residual {worst:.2e}");
    ensure!(time < Duration::from_secs(5), "took {time:?}");
    Ok(format!("3 solutions on the expected strata, max residual {worst:.1e}, {:.2} s", time.as_secs_f64()))
}

fn hirzebruch_system(constant: f64) -> SparseSystem {
    let one = c(1.0);
    let f1 = LaurentPoly::from_pairs(&[
        (&[0, 0], one),
        (&[1, 0], one),
        (&[0, 1], one),
        (&[1, 1], one),
        (&[2, 1], one),
        (&[3, 1], one),
    ]);
    let f2 = LaurentPoly::from_pairs(&[(&[0, 0], c(constant)), (&[0, 1], one), (&[1, 1], one), (&[2, 1], one)]);
    SparseSystem::new(2, vec![f1, f2]).expect("system")
}

fn torus_example() -> Check {
    let sys = hirzebruch_system(2.0);
    let (cox, out, _) = solve_timed(&sys, &SolveConfig::default());
    let w = C64::from_polar(1.0, PI / 3.0);
    let expected = [vec![c(-1.0), c(-2.0)], vec![w, -w.conj()], vec![w.conj(), -w]];
    for t in &expected {
        ensure!(sys.relative_residual(t) <= 1e-12, "reference point {t:?} is not a root");
    }
    ensure!(out.failures.is_empty() && out.solutions.len() == 3, "{} solutions", out.solutions.len());
    for s in &out.solutions {
        ensure!(s.status == PointStatus::Torus, "solution {} is {:?}", s.index, s.status);
    }
    for t in &expected {
        let found = out.solutions.iter().filter_map(|s| s.torus.as_ref()).any(|u| rel_close(u, t, 1e-8));
        ensure!(found, "no solution at {t:?}");
    }
    // total degrees (4, 3) and bidegrees (3, 1), (2, 1)
    let degree = |p: &LaurentPoly, w: [i64; 2]| p.terms.iter().map(|t| t.exponent[0] * w[0] + t.exponent[1] * w[1]).max().unwrap();
    let (f1, f2) = (&sys.polys[0], &sys.polys[1]);
    let bezout = degree(f1, [1, 1]) * degree(f2, [1, 1]);
    let two_hom = degree(f1, [1, 0]) * degree(f2, [0, 1]) + degree(f1, [0, 1]) * degree(f2, [1, 0]);
    ensure!(cox.bkk == 3, "bkk {}", cox.bkk);
    ensure!(bezout == 12, "Bezout bound {bezout}");
    ensure!(two_hom == 5, "2-homogeneous bound {two_hom}");
    Ok(format!("3 torus solutions, bkk {} vs Bezout {bezout} and 2-homogeneous {two_hom}", cox.bkk))
}

fn pillow_supports() -> Vec<Vec<Point>> {
    let p: Vec<Point> = vec![vec![0, 0], vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]];
    vec![p.clone(), p]
}

/// Square pyramid with apex over the center of the base.
fn pyramid_supports() -> Vec<Vec<Point>> {
    let p: Vec<Point> = vec![vec![1, 1, 0], vec![1, -1, 0], vec![-1, 1, 0], vec![-1, -1, 0], vec![0, 0, 1]];
    vec![p.clone(), p.clone(), p]
}

fn orbit_degrees() -> Check {
    let t0 = Instant::now();
    let h = CoxData::from_system(&fixture("hirzebruch")).map_err(|e| e.to_string())?;
    ensure!(h.generic_orbit_degree == 3, "Hirzebruch generic degree {}", h.generic_orbit_degree);
    let r = &HIRZEBRUCH_RAYS;
    for stratum in [indices(&h, &[&r[0], &r[2], &r[3]]), indices(&h, &[&r[0], &r[1], &r[2]])] {
        let d = h.orbit_degree(&stratum).map_err(|e| e.to_string())?;
        ensure!(d.degree == 1, "Hirzebruch stratum {stratum:?} degree {}", d.degree);
    }
    let p = CoxData::from_supports(&pillow_supports()).map_err(|e| e.to_string())?;
    let all: Vec<usize> = (0..p.k).collect();
    let d = p.orbit_degree(&all).map_err(|e| e.to_string())?;
    ensure!(d.degree == 2 && d.components == 2, "pillow {d:?}");
    let y = CoxData::from_supports(&pyramid_supports()).map_err(|e| e.to_string())?;
    let rays: [&[i64]; 5] = [&[0, 0, 1], &[1, 0, -1], &[0, 1, -1], &[-1, 0, -1], &[0, -1, -1]];
    let reference = [[2i64, 1, 0, 1, 0], [2, 0, 1, 0, 1]];
    let mut rows = vec![vec![0i64; y.k]; 2];
    for (q, u) in rays.iter().enumerate() {
        let j = y.ray_index(u).ok_or("pyramid ray missing")?;
        for (row, refrow) in rows.iter_mut().zip(&reference) {
            row[j] = refrow[q];
        }
    }
    let ours = IntMatrix::from_rows(&y.p2).row_hermite_form();
    let theirs = IntMatrix::from_rows(&rows).row_hermite_form();
    ensure!(ours.to_rows_i64() == theirs.to_rows_i64(), "pyramid kernel {:?} vs {:?}", y.p2, rows);
    let time = t0.elapsed();
    ensure!(time < Duration::from_secs(1), "took {time:?}");
    Ok(format!("Hirzebruch 3/1/1, pillow 2 with 2 components, pyramid kernel lattice equal, {:.0} ms", time.as_secs_f64() * 1e3))
}

fn random_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
}

fn nonzero_complex(rng: &mut impl Rng) -> C64 {
    C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..2.0 * PI))
}

fn distinct(points: &[Vec<C64>], tol: f64) -> bool {
    points.iter().enumerate().all(|(i, p)| {
        points[..i].iter().all(|q| {
            let scale = p.iter().chain(q).map(|v| v.norm()).fold(1.0, f64::max);
            p.iter().zip(q).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) > tol * scale
        })
    })
}

fn monodromy_degrees() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut report = Vec::new();
    for (name, cox) in [
        ("Hirzebruch", CoxData::from_system(&fixture("hirzebruch"))),
        ("pillow", CoxData::from_supports(&pillow_supports())),
    ] {
        let cox = cox.map_err(|e| e.to_string())?;
        let d = cox.generic_orbit_degree as usize;
        for trial in 0..10 {
            let z = DVector::from_fn(cox.k, |_, _| nonzero_complex(&mut rng));
            let a = DMatrix::from_fn(cox.orbit_dim(), cox.k, |_, _| random_complex(&mut rng));
            let slice = Slice::through(a, &z);
            let z: Vec<C64> = z.iter().copied().collect();
            let mut reps = vec![z.clone()];
            while let Ok(p) = switch_representative(&z, &slice, &cox, &reps, &mut rng) {
                reps.push(p);
                if reps.len() > d {
                    break;
                }
            }
            ensure!(reps.len() == d, "{name} slice {trial}: {} representatives, degree {d}", reps.len());
            ensure!(distinct(&reps, 1e-8), "{name} slice {trial}: representatives within 1e-8");
            for p in &reps {
                ensure!(slice.eval(&DVector::from_column_slice(p)).norm() <= 1e-8 * p.iter().map(|v| v.norm()).fold(1.0, f64::max), "{name}: off the slice");
            }
        }
        report.push(format!("{name} {d}"));
    }
    Ok(format!("{} representatives on each of 10 slices", report.join(", ")))
}

fn endgame_fractions() -> Check {
    let cox = CoxData::from_system(&fixture("hirzebruch")).map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for (normal, other) in [([0i64, -1], AttemptOutcome::Diverged), ([0, 1], AttemptOutcome::BaseLocus)] {
        let j = cox.ray_index(&normal).ok_or("ray")?;
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut r0: Vec<C64> = (0..cox.k).map(|_| random_complex(&mut rng)).collect();
            let mut r1 = vec![c(0.0); cox.k];
            r0[j] = c(0.0);
            r1[j] = c(1.0);
            let hom = OrbitDegeneration { f: cox.f.to_rows_i64(), r0, r1 };
            let slice = random_slice(&cox, &mut rng);
            let z = hom.point(0.1);
            let attempts = endgame_all_representatives(&hom, &slice, 0.1, &z, &cox, &EndgameConfig::default(), &mut rng);
            let outcomes: Vec<AttemptOutcome> = attempts.iter().map(|a| a.outcome).collect();
            let count = |o: AttemptOutcome| outcomes.iter().filter(|&&x| x == o).count();
            ensure!(
                outcomes.len() == 3 && count(AttemptOutcome::Landed) == 1 && count(other) == 2,
                "moving ray {normal:?}, seed {seed}: {outcomes:?}"
            );
        }
        summary.push(format!("ray {normal:?}: 1 landed, 2 {other:?}"));
    }
    Ok(format!("{} (5 seeds each)", summary.join("; ")))
}

fn weighted_projective() -> Check {
    let (cox, out, time) = solve_timed(&fixture("weighted_projective"), &SolveConfig::default());
    ensure!(out.failures.is_empty() && out.solutions.len() == 4, "{} solutions, {} failures", out.solutions.len(), out.failures.len());
    let small = indices(&cox, &[&[0, 0, 1], &[-1, -1, -2]]);
    let near: Vec<&Solution> = out
        .solutions
        .iter()
        .filter(|s| small.iter().all(|&i| (1e-14..=1e-10).contains(&s.cox[i].norm())))
        .collect();
    ensure!(near.len() == 2, "{} solutions near the singular point", near.len());
    for s in &near {
        let t = cox.quotient_map(&s.cox).map_err(|e| e.to_string())?;
        let least = t.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        ensure!(least >= 1e10, "torus image magnitude {least:.1e}");
    }
    ensure!(time < Duration::from_secs(10), "took {time:?}");
    Ok(format!("4 solutions, 2 near the singular point, {:.2} s", time.as_secs_f64()))
}

fn bott_samelson() -> Check {
    let (cox, out, time) = solve_timed(&fixture("bott_samelson"), &SolveConfig::default());
    ensure!(cox.bkk == 10, "bkk {}", cox.bkk);
    ensure!(out.failures.is_empty(), "{} failures", out.failures.len());
    let d1 = cox.ray_index(&[-1, -1, 0]).ok_or("ray")?;
    let torus = out.solutions.iter().filter(|s| s.status == PointStatus::Torus && !s.singular).count();
    let on_d1 = out.solutions.iter().filter(|s| !s.stratum.contains(&d1) && s.singular).count();
    ensure!(torus == 6 && on_d1 == 4, "{torus} nonsingular torus, {on_d1} singular on the divisor");
    ensure!(cox.generic_orbit_degree == 5, "generic degree {}", cox.generic_orbit_degree);
    let rest: Vec<usize> = (0..cox.k).filter(|&i| i != d1).collect();
    let d = cox.orbit_degree(&rest).map_err(|e| e.to_string())?;
    ensure!(d.degree == 3, "divisor stratum degree {}", d.degree);
    ensure!(time < Duration::from_secs(30), "took {time:?}");
    Ok(format!("bkk 10, 6 torus + 4 singular on the divisor, degrees 5/3, {:.2} s", time.as_secs_f64()))
}

fn snf_checks(rng: &mut ChaCha8Rng) -> Check {
    for case in 0..200 {
        let (r, cols) = (rng.random_range(1..=5), rng.random_range(1..=5));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..cols).map(|_| rng.random_range(-9..=9)).collect()).collect();
        let a = IntMatrix::from_rows(&rows);
        let snf = smith_normal_form(&a);
        ensure!(snf.p.det().abs().is_one() && snf.q.det().abs().is_one(), "case {case}: transforms not unimodular");
        ensure!(snf.p.mul(&a).mul(&snf.q).to_rows_i64() == snf.diagonal_matrix().to_rows_i64(), "case {case}: PAQ != D");
        let f = snf.invariant_factors();
        ensure!(f.len() == a.rank() && f.iter().all(|s| s.is_positive()), "case {case}: rank");
        ensure!(f.windows(2).all(|w| (&w[1] % &w[0]).is_zero()), "case {case}: divisibility");
    }
    Ok("200 SNF".into())
}

fn minkowski(a: &[Point], b: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = a.iter().flat_map(|p| b.iter().map(move |q| p.iter().zip(q).map(|(x, y)| x + y).collect())).collect();
    out.sort();
    out.dedup();
    out
}

fn mixed_volume_oracle(s: &[Vec<Point>]) -> i64 {
    let n = s.len();
    let mut total = 0i64;
    for mask in 1u32..(1 << n) {
        let mut sum: Vec<Point> = vec![vec![0; n]];
        for (i, si) in s.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum = minkowski(&sum, si);
            }
        }
        let sign = if (n - mask.count_ones() as usize) % 2 == 0 { 1 } else { -1 };
        total += sign * normalized_volume_of_points(&sum) as i64;
    }
    total / (1..=n as i64).product::<i64>()
}

fn mixed_volume_checks(rng: &mut ChaCha8Rng) -> Check {
    let mv = |s: &[Vec<Point>]| mixed_volume(s, 3).map(|v| v as i64).map_err(|e| e.to_string());
    let mut cases = 0;
    for (dim, count) in [(2usize, 20), (3, 8)] {
        for case in 0..count {
            let support = |rng: &mut ChaCha8Rng| -> Vec<Point> {
                let m = rng.random_range(dim + 1..=dim + 4);
                (0..m).map(|_| (0..dim).map(|_| rng.random_range(0..=3)).collect()).collect()
            };
            let s: Vec<Vec<Point>> = (0..dim).map(|_| support(rng)).collect();
            let base = mv(&s)?;
            ensure!(base == mixed_volume_oracle(&s), "dim {dim} case {case}: {base} vs oracle");
            let mut rev = s.clone();
            rev.reverse();
            ensure!(mv(&rev)? == base, "dim {dim} case {case}: not symmetric");
            let extra = support(rng);
            let mut sum = s.clone();
            sum[0] = minkowski(&s[0], &extra);
            let mut other = s.clone();
            other[0] = extra;
            ensure!(mv(&sum)? == base + mv(&other)?, "dim {dim} case {case}: not additive");
            let same = vec![s[0].clone(); dim];
            ensure!(mv(&same)? == normalized_volume_of_points(&s[0]) as i64, "dim {dim} case {case}: equal supports");
            cases += 1;
        }
    }
    Ok(format!("{cases} mixed volumes"))
}

fn section_and_grading(rng: &mut ChaCha8Rng) -> Check {
    let systems: Vec<(&str, Vec<Vec<Point>>)> = vec![
        ("hirzebruch", fixture("hirzebruch").supports()),
        ("pillow", pillow_supports()),
        ("pyramid", pyramid_supports()),
        ("bott-samelson", fixture("bott_samelson").supports()),
        ("weighted", fixture("weighted_projective").supports()),
    ];
    let close = |a: C64, b: C64| (a - b).norm() <= 1e-9 * a.norm().max(b.norm()).max(1.0);
    for (name, supports) in &systems {
        let cox = CoxData::from_supports(supports).map_err(|e| e.to_string())?;
        let sys = random_system(supports, rng);
        let f = cox.homogenize_system(&sys).map_err(|e| e.to_string())?;
        let torsion = cox.torsion_elements();
        for _ in 0..100 {
            let z: Vec<C64> = (0..cox.k).map(|_| nonzero_complex(rng)).collect();
            let t = cox.quotient_map(&z).map_err(|e| e.to_string())?;
            let fz = f.eval(&z);
            for i in 0..cox.n {
                let expected = cox.offset_monomial(i, &z) * sys.polys[i].eval(&t);
                ensure!(close(fz[i], expected), "{name}: section identity {} vs {expected}", fz[i]);
            }
            let w = &torsion[rng.random_range(0..torsion.len())];
            let lambda: Vec<C64> = (0..cox.orbit_dim()).map(|_| nonzero_complex(rng)).collect();
            let gz = cox.orbit_point(&z, w, &lambda);
            let gt = cox.quotient_map(&gz).map_err(|e| e.to_string())?;
            ensure!(t.iter().zip(&gt).all(|(a, b)| close(*a, *b)), "{name}: the group moved the torus point");
            let fgz = f.eval(&gz);
            for i in 0..cox.n {
                let lhs = fgz[i] * cox.offset_monomial(i, &z);
                let rhs = fz[i] * cox.offset_monomial(i, &gz);
                ensure!(close(lhs, rhs), "{name}: equation {i} not homogeneous");
            }
        }
    }
    Ok("section identity and grading on 5 x 100 points".into())
}

fn random_planar(rng: &mut ChaCha8Rng) -> (SparseSystem, CoxData) {
    loop {
        let supports: Vec<Vec<Point>> = (0..2)
            .map(|_| {
                let m = rng.random_range(3..=6);
                (0..m).map(|_| vec![rng.random_range(0..=3), rng.random_range(0..=3)]).collect()
            })
            .collect();
        let Ok(cox) = CoxData::from_supports(&supports) else { continue };
        if cox.k <= 6 && (1..=12).contains(&cox.bkk) {
            return (random_system(&cox.supports, rng), cox);
        }
    }
}

fn path_checks(rng: &mut ChaCha8Rng) -> Check {
    for case in 0..20 {
        let seed: u64 = rng.random();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sys, cox) = random_planar(&mut rng);
        let start = polyhedral_start(&cox.supports, seed).map_err(|e| e.to_string())?;

        let hom = StraightLine {
            target: cox.homogenize_system(&sys).map_err(|e| e.to_string())?,
            start: cox.homogenize_system(&start.system).map_err(|e| e.to_string())?,
            gamma: C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)),
        };
        let slice = random_slice(&cox, &mut rng);
        let lifted = coxhom::solver::lift_start_solutions(&start.solutions, &hom.start, &slice, &cox, &mut rng)
            .map_err(|e| e.to_string())?;
        let mut midway = Vec::new();
        for z in lifted {
            let z = DVector::from_vec(z.map_err(|e| format!("case {case}: lift {e}"))?);
            let mut path = SlicedCoxPath::orthogonal(&hom, cox.p2_f64(), &z).map_err(|e| e.to_string())?;
            let y = path.local(&z);
            let r = track(&mut path, &y, 1.0, 0.5, &TrackOptions::default(), &mut |_| {});
            ensure!(r.status == TrackStatus::Success, "case {case}: path stopped with {:?}", r.status);
            let x: Vec<C64> = path.patch.to_ambient(&r.y).iter().copied().collect();
            midway.push(cox.quotient_map(&x).map_err(|e| e.to_string())?);
        }
        ensure!(midway.len() as u64 == cox.bkk && distinct(&midway, 1e-6), "case {case}: paths meet midway");

        let solve = |cfg: SolveConfig| -> Result<Vec<Solution>, String> {
            let out = solve_with(&cox, &sys, &start, &cfg).map_err(|e| e.to_string())?;
            ensure!(out.failures.is_empty(), "case {case}: {} failed paths", out.failures.len());
            Ok(out.solutions)
        };
        let a = solve(SolveConfig { seed: 1, ..SolveConfig::default() })?;
        let b = solve(SolveConfig { seed: 2, slice: SliceStrategy::Orthogonal, ..SolveConfig::default() })?;
        ensure!(a.len() as u64 == cox.bkk && b.len() as u64 == cox.bkk, "case {case}: solution counts");
        for (i, s) in a.iter().enumerate() {
            ensure!(a[..i].iter().all(|r| !same_solution(s, r, &cox)), "case {case}: repeated solution");
            ensure!(b.iter().any(|r| same_solution(s, r, &cox)), "case {case}: slices disagree");
        }
    }
    Ok("20 random planar systems".into())
}

fn condition_logs() -> Check {
    let sys = fixture("scaled_hirzebruch");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for slice in [SliceStrategy::Random, SliceStrategy::Orthogonal] {
        let cfg = SolveConfig { slice, record_condition: true, ..SolveConfig::default() };
        let (cox, out, _) = solve_timed(&sys, &cfg);
        ensure!(cox.bkk == 36, "bkk {}", cox.bkk);
        ensure!(out.failures.is_empty() && out.solutions.len() == 36, "{slice:?}: {} of 36 paths", out.solutions.len());
        let bytes = condition_csv(&out.condition_log).map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("{slice:?}.csv"));
        std::fs::write(&path, &bytes).map_err(|e| e.to_string())?;
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let mut lines = text.lines();
        ensure!(lines.next() == Some("path_id,tau,cond,step"), "{slice:?}: header");
        let mut ids: Vec<usize> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
        ids.sort();
        ids.dedup();
        ensure!(ids.len() == 36, "{slice:?}: {} paths logged", ids.len());
    }
    Ok("scaled Hirzebruch: 36/36 paths and condition CSVs for both slices".into())
}

fn properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let parts = [
        snf_checks(&mut rng)?,
        mixed_volume_checks(&mut rng)?,
        section_and_grading(&mut rng)?,
        path_checks(&mut rng)?,
        condition_logs()?,
    ];
    Ok(parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("Hirzebruch golden solutions", hirzebruch_golden),
        ("perturbed Hirzebruch torus solutions", torus_example),
        ("orbit degrees", orbit_degrees),
        ("monodromy matches orbit degree", monodromy_degrees),
        ("endgame fractions", endgame_fractions),
        ("weighted projective", weighted_projective),
        ("Bott-Samelson", bott_samelson),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
