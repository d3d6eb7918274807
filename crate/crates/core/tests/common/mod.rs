#![allow(dead_code)]

use coxhom::polytope::Point;
pub use coxhom::system::{LaurentPoly, SparseSystem, Term, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn poly(terms: &[(&[i64], C64)]) -> LaurentPoly {
    LaurentPoly::from_pairs(terms)
}

/// Hirzebruch example: one torus solution, two on the boundary.
pub fn hirzebruch(constant: f64) -> SparseSystem {
    let one = c(1.0);
    let f1 = poly(&[(&[0, 0], one), (&[1, 0], one), (&[0, 1], one), (&[1, 1], one), (&[2, 1], one), (&[3, 1], one)]);
    let f2 = poly(&[(&[0, 0], c(constant)), (&[0, 1], one), (&[1, 1], one), (&[2, 1], one)]);
    SparseSystem::new(2, vec![f1, f2]).unwrap()
}

pub fn hirzebruch_supports() -> Vec<Vec<Point>> {
    hirzebruch(1.0).supports()
}

/// Support `{0, ±e1, ±e2}` in both equations.
pub fn pillow_supports() -> Vec<Vec<Point>> {
    let p: Vec<Point> = vec![vec![0, 0], vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]];
    vec![p.clone(), p]
}

/// Square pyramid with apex over the origin.
pub fn pyramid_supports() -> Vec<Vec<Point>> {
    let p: Vec<Point> = vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![-1, 0, 0], vec![0, -1, 0], vec![0, 0, 1]];
    vec![p.clone(), p.clone(), p]
}

/// Three equations sharing every coefficient but the `t1²` one, perturbed by `eps`.
pub fn weighted_projective(eps: [C64; 3]) -> SparseSystem {
    let rows: [[f64; 4]; 3] = [[9.0, 3.0, 9.0, 2.0], [5.0, 2.0, 3.0, 4.0], [4.0, 8.0, 4.0, 9.0]];
    let polys = rows
        .iter()
        .zip(eps)
        .map(|(r, e)| {
            poly(&[
                (&[2, 0, 0], c(3.0) + e),
                (&[1, 1, 0], c(7.0)),
                (&[0, 2, 0], c(7.0)),
                (&[1, 0, 0], c(r[0])),
                (&[0, 1, 0], c(r[1])),
                (&[0, 0, 1], c(r[2])),
                (&[0, 0, 0], c(r[3])),
            ])
        })
        .collect();
    SparseSystem::new(3, polys).unwrap()
}

pub fn random_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
}

/// Equations in `x, y, z` where the `x²z`/`xy` and `xyz`/`y²` pairs share coefficients.
pub fn bott_samelson(seed: u64) -> SparseSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let polys = (0..3)
        .map(|_| {
            let cs: Vec<C64> = (0..8).map(|_| random_complex(&mut rng)).collect();
            let terms = vec![
                Term { exponent: vec![0, 0, 0], coeff: cs[0] },
                Term { exponent: vec![1, 0, 0], coeff: cs[1] },
                Term { exponent: vec![0, 1, 0], coeff: cs[2] },
                Term { exponent: vec![0, 0, 1], coeff: cs[3] },
                Term { exponent: vec![1, 0, 1], coeff: cs[4] },
                Term { exponent: vec![0, 1, 1], coeff: cs[5] },
                Term { exponent: vec![2, 0, 1], coeff: cs[6] },
                Term { exponent: vec![1, 1, 1], coeff: cs[7] },
                Term { exponent: vec![1, 1, 0], coeff: cs[6] },
                Term { exponent: vec![0, 2, 0], coeff: cs[7] },
            ];
            LaurentPoly::new(terms)
        })
        .collect();
    SparseSystem::new(3, polys).unwrap()
}

/// Hirzebruch polytope scaled so that the offsets are `(0, 0, 3, 3)`, both equations dense on it.
pub fn scaled_hirzebruch(seed: u64) -> SparseSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<Point> = Vec::new();
    for y in 0..=3i64 {
        for x in 0..=(2 * y + 3) {
            pts.push(vec![x, y]);
        }
    }
    let polys = (0..2)
        .map(|_| LaurentPoly::new(pts.iter().map(|p| Term { exponent: p.clone(), coeff: random_complex(&mut rng) }).collect()))
        .collect();
    SparseSystem::new(2, polys).unwrap()
}
