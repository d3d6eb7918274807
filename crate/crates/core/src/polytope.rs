//! Lattice polytopes from supports: convex hulls, Minkowski sums, facet
//! data, normalized volumes and mixed volumes via mixed cells.
//!
//! All arithmetic here is exact. Hulls use the double description method on
//! the homogenized cone `{(u, c) : <u, p> + c >= 0}` with checked `i128`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::IntMatrix;

pub type Point = Vec<i64>;

/// Inequality `<normal, m> + offset >= 0` with a primitive inner normal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    pub fn eval(&self, m: &[i64]) -> i64 {
        dot(&self.normal, m) + self.offset
    }
}

/// Full-dimensional lattice polytope with both representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    pub dim: usize,
    pub vertices: Vec<Point>,
    /// Facets sorted lexicographically by normal vector.
    pub facets: Vec<Facet>,
    /// `incidence[j]` lists the vertices lying on facet `j`.
    pub incidence: Vec<Vec<usize>>,
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd_i128(a as i128, b as i128) as i64
}

/// Dimension of the affine span of `points`.
pub fn affine_dimension(points: &[Point]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = &points[0];
    let diffs: Vec<Vec<i64>> =
        points[1..].iter().map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    IntMatrix::from_rows(&diffs).rank()
}

fn dedup_points(points: &[Point]) -> Vec<Point> {
    let set: BTreeSet<Point> = points.iter().cloned().collect();
    set.into_iter().collect()
}

#[derive(Clone)]
struct Ray {
    v: Vec<i128>,
    tight: Vec<u64>,
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn bits_and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bits_count(a: &[u64]) -> usize {
    a.iter().map(|x| x.count_ones() as usize).sum()
}

fn bits_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn det_i128(m: &[Vec<i128>]) -> Result<i128> {
    let n = m.len();
    if n == 0 {
        return Ok(1);
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != 0) else {
            return Ok(0);
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = a[i][j].checked_mul(a[k][k]).ok_or(Error::Overflow)?;
                let y = a[i][k].checked_mul(a[k][j]).ok_or(Error::Overflow)?;
                a[i][j] = x.checked_sub(y).ok_or(Error::Overflow)? / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

/// Adjugate of a square matrix, so that `m · adj(m) = det(m) · I`.
fn adjugate_i128(m: &[Vec<i128>]) -> Result<Vec<Vec<i128>>> {
    let n = m.len();
    if n == 1 {
        return Ok(vec![vec![1]]);
    }
    let mut adj = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i128>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect())
                .collect();
            let d = det_i128(&minor)?;
            adj[j][i] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    Ok(adj)
}

/// Picks `n + 1` affinely independent points (indices) from a full-dimensional set.
fn initial_simplex(points: &[Point], n: usize) -> Option<Vec<usize>> {
    let mut chosen = vec![0usize];
    let mut diffs: Vec<Vec<i64>> = Vec::new();
    for (i, p) in points.iter().enumerate().skip(1) {
        if chosen.len() == n + 1 {
            break;
        }
        let d: Vec<i64> = p.iter().zip(&points[0]).map(|(a, b)| a - b).collect();
        let mut trial = diffs.clone();
        trial.push(d.clone());
        if IntMatrix::from_rows(&trial).rank() == trial.len() {
            diffs.push(d);
            chosen.push(i);
        }
    }
    (chosen.len() == n + 1).then_some(chosen)
}

/// Facets of the convex hull of a full-dimensional point set, by the double
/// description method.
fn hull_facets(points: &[Point], n: usize) -> Result<Vec<Facet>> {
    let d = n + 1;
    let m = points.len();
    let words = m.div_ceil(64);
    let row = |i: usize| -> Vec<i128> {
        let mut r: Vec<i128> = points[i].iter().map(|&v| v as i128).collect();
        r.push(1);
        r
    };
    let init = initial_simplex(points, n).ok_or(Error::Degenerate { dim: affine_dimension(points), expected: n })?;
    let mat: Vec<Vec<i128>> = init.iter().map(|&i| row(i)).collect();
    let det = det_i128(&mat)?;
    let adj = adjugate_i128(&mat)?;
    let sgn = det.signum();
    let mut rays: Vec<Ray> = (0..d)
        .map(|j| {
            let v: Vec<i128> = (0..d).map(|i| sgn * adj[i][j]).collect();
            let mut tight = vec![0u64; words];
            for (jj, &pi) in init.iter().enumerate() {
                if jj != j {
                    bit_set(&mut tight, pi);
                }
            }
            Ray { v: normalize_i128(v), tight }
        })
        .collect();
    for c in 0..m {
        if init.contains(&c) {
            continue;
        }
        let a = row(c);
        let mut vals = Vec::with_capacity(rays.len());
        for r in &rays {
            let mut s: i128 = 0;
            for (x, y) in a.iter().zip(&r.v) {
                s = s.checked_add(x.checked_mul(*y).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
            }
            vals.push(s);
        }
        if vals.iter().all(|&v| v >= 0) {
            for (r, &v) in rays.iter_mut().zip(&vals) {
                if v == 0 {
                    bit_set(&mut r.tight, c);
                }
            }
            continue;
        }
        let mut next: Vec<Ray> = Vec::new();
        for (r, &v) in rays.iter().zip(&vals) {
            if v >= 0 {
                let mut r = r.clone();
                if v == 0 {
                    bit_set(&mut r.tight, c);
                }
                next.push(r);
            }
        }
        for (ip, rp) in rays.iter().enumerate() {
            if vals[ip] <= 0 {
                continue;
            }
            for (ineg, rn) in rays.iter().enumerate() {
                if vals[ineg] >= 0 {
                    continue;
                }
                let common = bits_and(&rp.tight, &rn.tight);
                if bits_count(&common) + 2 < d {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(io, ro)| io == ip || io == ineg || !bits_subset(&common, &ro.tight));
                if !adjacent {
                    continue;
                }
                let (vp, vn) = (vals[ip], -vals[ineg]);
                let mut v = Vec::with_capacity(d);
                for (x, y) in rp.v.iter().zip(&rn.v) {
                    let t1 = vp.checked_mul(*y).ok_or(Error::Overflow)?;
                    let t2 = vn.checked_mul(*x).ok_or(Error::Overflow)?;
                    v.push(t1.checked_add(t2).ok_or(Error::Overflow)?);
                }
                let mut tight = common;
                bit_set(&mut tight, c);
                next.push(Ray { v: normalize_i128(v), tight });
            }
        }
        rays = next;
    }
    let mut facets: BTreeSet<Facet> = BTreeSet::new();
    for r in rays {
        let u: Vec<i64> = r.v[..n].iter().map(|&x| i64::try_from(x).map_err(|_| Error::Overflow)).collect::<Result<_>>()?;
        let g = u.iter().fold(0, |g, &x| gcd_i64(g, x));
        if g == 0 {
            continue;
        }
        let u: Vec<i64> = u.iter().map(|x| x / g).collect();
        let offset = -points.iter().map(|p| dot(&u, p)).min().unwrap();
        facets.insert(Facet { normal: u, offset });
    }
    Ok(facets.into_iter().collect())
}

fn normalize_i128(v: Vec<i128>) -> Vec<i128> {
    let g = v.iter().fold(0, |g, &x| gcd_i128(g, x));
    if g <= 1 {
        v
    } else {
        v.into_iter().map(|x| x / g).collect()
    }
}

impl LatticePolytope {
    /// Builds the polytope from an H-representation candidate set and the
    /// generating points; vertices are the points where the tight normals
    /// span the whole space.
    fn from_points_and_facets(points: &[Point], facets: Vec<Facet>, n: usize) -> Result<Self> {
        let mut vertices: Vec<Point> = Vec::new();
        for p in points {
            let tight: Vec<Vec<i64>> = facets.iter().filter(|f| f.eval(p) == 0).map(|f| f.normal.clone()).collect();
            if tight.len() >= n && IntMatrix::from_rows(&tight).rank() == n {
                vertices.push(p.clone());
            }
        }
        vertices.sort();
        vertices.dedup();
        let incidence = facets
            .iter()
            .map(|f| (0..vertices.len()).filter(|&i| f.eval(&vertices[i]) == 0).collect())
            .collect();
        let poly = LatticePolytope { dim: n, vertices, facets, incidence };
        poly.validate(points)?;
        Ok(poly)
    }

    /// Cross-check of both representations against the generating points.
    fn validate(&self, points: &[Point]) -> Result<()> {
        for p in points {
            if self.facets.iter().any(|f| f.eval(p) < 0) {
                return Err(Error::Invalid("hull inequality violated by a generating point".into()));
            }
        }
        for (j, inc) in self.incidence.iter().enumerate() {
            let pts: Vec<Point> = inc.iter().map(|&i| self.vertices[i].clone()).collect();
            if affine_dimension(&pts) + 1 != self.dim {
                return Err(Error::Invalid(format!("facet {j} is not of codimension one")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, m: &[i64]) -> bool {
        self.facets.iter().all(|f| f.eval(m) >= 0)
    }

    /// Lattice points of the polytope (bounding-box enumeration).
    pub fn lattice_points(&self) -> Vec<Point> {
        let n = self.dim;
        let lo: Vec<i64> = (0..n).map(|i| self.vertices.iter().map(|v| v[i]).min().unwrap()).collect();
        let hi: Vec<i64> = (0..n).map(|i| self.vertices.iter().map(|v| v[i]).max().unwrap()).collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            if self.contains(&cur) {
                out.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                cur[i] += 1;
                if cur[i] <= hi[i] {
                    break;
                }
                cur[i] = lo[i];
                i += 1;
            }
        }
    }

    /// Polytope `{m : <u_j, m> + a_j >= 0}` for the given normals and offsets.
    pub fn from_inequalities(normals: &[Vec<i64>], offsets: &[i64], bound: i64) -> Result<Self> {
        let n = normals.first().map(|u| u.len()).unwrap_or(0);
        let mut pts = Vec::new();
        let mut cur = vec![-bound; n];
        'outer: loop {
            if normals.iter().zip(offsets).all(|(u, a)| dot(u, &cur) + a >= 0) {
                pts.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    break 'outer;
                }
                cur[i] += 1;
                if cur[i] <= bound {
                    break;
                }
                cur[i] = -bound;
                i += 1;
            }
        }
        convex_hull(&pts)
    }
}

/// Convex hull of a full-dimensional point set.
pub fn convex_hull(points: &[Point]) -> Result<LatticePolytope> {
    let pts = dedup_points(points);
    let n = pts.first().map(|p| p.len()).ok_or(Error::Degenerate { dim: 0, expected: 1 })?;
    let dim = affine_dimension(&pts);
    if dim < n {
        return Err(Error::Degenerate { dim, expected: n });
    }
    let facets = hull_facets(&pts, n)?;
    LatticePolytope::from_points_and_facets(&pts, facets, n)
}

/// Minkowski sum of the convex hulls of the given supports, which may be
/// individually lower-dimensional; the sum must be full-dimensional.
pub fn minkowski_sum_points(supports: &[Vec<Point>]) -> Result<LatticePolytope> {
    let n = supports.first().and_then(|s| s.first()).map(|p| p.len()).ok_or(Error::Invalid("empty support".into()))?;
    let reduce = |pts: Vec<Point>| -> Vec<Point> {
        let pts = dedup_points(&pts);
        if affine_dimension(&pts) == n {
            if let Ok(p) = convex_hull(&pts) {
                return p.vertices;
            }
        }
        pts
    };
    let mut acc: Vec<Point> = vec![vec![0; n]];
    for s in supports {
        let s = reduce(s.clone());
        let mut next = Vec::with_capacity(acc.len() * s.len());
        for a in &acc {
            for b in &s {
                next.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        acc = reduce(next);
    }
    convex_hull(&acc)
}

/// Minkowski sum of full-dimensional polytopes.
pub fn minkowski_sum(polys: &[LatticePolytope]) -> Result<LatticePolytope> {
    let supports: Vec<Vec<Point>> = polys.iter().map(|p| p.vertices.clone()).collect();
    minkowski_sum_points(&supports)
}

/// Facet matrix and divisor offsets of a family of supports.
#[derive(Clone, Debug)]
pub struct FacetData {
    /// `n × k`, columns are the primitive inner facet normals of the Minkowski sum.
    pub f: IntMatrix,
    /// `offsets[i][j] = -min_{m in A_i} <u_j, m>`.
    pub offsets: Vec<Vec<i64>>,
    pub sum: LatticePolytope,
}

pub fn facet_data(supports: &[Vec<Point>]) -> Result<FacetData> {
    let sum = minkowski_sum_points(supports)?;
    let n = sum.dim;
    let normals: Vec<Vec<i64>> = sum.facets.iter().map(|f| f.normal.clone()).collect();
    let f = IntMatrix::from_cols(&normals, n);
    let offsets = supports
        .iter()
        .map(|s| normals.iter().map(|u| -s.iter().map(|m| dot(u, m)).min().unwrap()).collect())
        .collect();
    Ok(FacetData { f, offsets, sum })
}

/// `n! · Vol(P)` by a pulling triangulation over the face lattice.
pub fn normalized_volume(p: &LatticePolytope) -> u64 {
    let all: Vec<usize> = (0..p.vertices.len()).collect();
    let simplices = pull_triangulate(p, &all, p.dim);
    simplices
        .iter()
        .map(|s| {
            let base = &p.vertices[s[0]];
            let rows: Vec<Vec<i64>> =
                s[1..].iter().map(|&i| p.vertices[i].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
            IntMatrix::from_rows(&rows).det().abs().to_u64().expect("volume overflow")
        })
        .sum()
}

/// Normalized volume of the hull of arbitrary points; 0 when lower-dimensional.
pub fn normalized_volume_of_points(points: &[Point]) -> u64 {
    match convex_hull(points) {
        Ok(p) => normalized_volume(&p),
        Err(_) => 0,
    }
}

fn pull_triangulate(p: &LatticePolytope, face: &[usize], dim: usize) -> Vec<Vec<usize>> {
    if dim == 0 {
        return vec![vec![face[0]]];
    }
    let v0 = face[0];
    let mut subfaces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for inc in &p.incidence {
        let sub: Vec<usize> = face.iter().copied().filter(|i| inc.contains(i)).collect();
        if sub.is_empty() || sub.len() == face.len() || sub.contains(&v0) {
            continue;
        }
        let pts: Vec<Point> = sub.iter().map(|&i| p.vertices[i].clone()).collect();
        if affine_dimension(&pts) + 1 == dim {
            subfaces.insert(sub);
        }
    }
    let mut out = Vec::new();
    for sub in subfaces {
        for mut s in pull_triangulate(p, &sub, dim - 1) {
            s.insert(0, v0);
            out.push(s);
        }
    }
    out
}

/// Lifting values for each point of each support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lifting {
    pub values: Vec<Vec<i64>>,
}

impl Lifting {
    /// Uniform integer lifting in `[1, max]`.
    pub fn random(supports: &[Vec<Point>], max: i64, rng: &mut impl Rng) -> Self {
        Lifting { values: supports.iter().map(|s| s.iter().map(|_| rng.random_range(1..=max)).collect()).collect() }
    }
}

/// Fine mixed cell of type (1, …, 1) of the regular mixed subdivision
/// induced by a lifting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedCell {
    /// For each support, the indices of the two points spanning the cell.
    pub pairs: Vec<(usize, usize)>,
    /// Inner normal `alpha = numerator / denominator` of the lower facet
    /// `(alpha, 1)` of the lifted configuration; `denominator > 0`.
    pub numerator: Vec<i128>,
    pub denominator: i128,
    pub volume: u64,
}

impl MixedCell {
    pub fn normal_f64(&self) -> Vec<f64> {
        self.numerator.iter().map(|&x| x as f64 / self.denominator as f64).collect()
    }
}

/// Enumerates all fine mixed cells by exhaustive search over point pairs.
pub fn mixed_cells(supports: &[Vec<Point>], lifting: &Lifting) -> Result<Vec<MixedCell>> {
    let n = supports.len();
    if supports.iter().any(|s| s.iter().any(|p| p.len() != n)) {
        return Err(Error::Invalid("supports must live in Z^n with n equations".into()));
    }
    let pairs: Vec<Vec<(usize, usize)>> = supports
        .iter()
        .map(|s| {
            let mut v = Vec::new();
            for a in 0..s.len() {
                for b in a + 1..s.len() {
                    v.push((a, b));
                }
            }
            v
        })
        .collect();
    if pairs.iter().any(|p| p.is_empty()) {
        return Ok(Vec::new());
    }
    let mut cells = Vec::new();
    let mut choice = vec![0usize; n];
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(n);
    search_cells(supports, lifting, &pairs, 0, &mut choice, &mut rows, &mut cells)?;
    Ok(cells)
}

fn search_cells(
    supports: &[Vec<Point>],
    lifting: &Lifting,
    pairs: &[Vec<(usize, usize)>],
    depth: usize,
    choice: &mut Vec<usize>,
    rows: &mut Vec<Vec<i64>>,
    out: &mut Vec<MixedCell>,
) -> Result<()> {
    let n = supports.len();
    if depth == n {
        if let Some(cell) = check_cell(supports, lifting, pairs, choice)? {
            out.push(cell);
        }
        return Ok(());
    }
    for (ci, &(a, b)) in pairs[depth].iter().enumerate() {
        let d: Vec<i64> = supports[depth][b].iter().zip(&supports[depth][a]).map(|(x, y)| x - y).collect();
        rows.push(d);
        // prune linearly dependent partial choices
        if IntMatrix::from_rows(rows).rank() == rows.len() {
            choice[depth] = ci;
            search_cells(supports, lifting, pairs, depth + 1, choice, rows, out)?;
        }
        rows.pop();
    }
    Ok(())
}

fn check_cell(
    supports: &[Vec<Point>],
    lifting: &Lifting,
    pairs: &[Vec<(usize, usize)>],
    choice: &[usize],
) -> Result<Option<MixedCell>> {
    let n = supports.len();
    let mut dmat = vec![vec![0i128; n]; n];
    let mut rhs = vec![0i128; n];
    for i in 0..n {
        let (a, b) = pairs[i][choice[i]];
        for j in 0..n {
            dmat[i][j] = (supports[i][b][j] - supports[i][a][j]) as i128;
        }
        rhs[i] = (lifting.values[i][a] - lifting.values[i][b]) as i128;
    }
    let det = det_i128(&dmat)?;
    if det == 0 {
        return Ok(None);
    }
    let adj = adjugate_i128(&dmat)?;
    // alpha = adj · rhs / det
    let mut num = vec![0i128; n];
    for j in 0..n {
        let mut s = 0i128;
        for i in 0..n {
            s = s.checked_add(adj[j][i].checked_mul(rhs[i]).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
        }
        num[j] = s;
    }
    let (num, den) = if det < 0 { (num.iter().map(|x| -x).collect::<Vec<_>>(), -det) } else { (num, det) };
    let scaled = |i: usize, p: usize| -> Result<i128> {
        let mut s = 0i128;
        for j in 0..n {
            s = s
                .checked_add(num[j].checked_mul(supports[i][p][j] as i128).ok_or(Error::Overflow)?)
                .ok_or(Error::Overflow)?;
        }
        s.checked_add(den.checked_mul(lifting.values[i][p] as i128).ok_or(Error::Overflow)?).ok_or(Error::Overflow)
    };
    // a tie only matters for a candidate that is otherwise a cell
    let mut tie = false;
    for i in 0..n {
        let (a, b) = pairs[i][choice[i]];
        let base = scaled(i, a)?;
        for p in 0..supports[i].len() {
            if p == a || p == b {
                continue;
            }
            let v = scaled(i, p)?;
            if v < base {
                return Ok(None);
            }
            tie |= v == base;
        }
    }
    if tie {
        return Err(Error::LiftingDegenerate { attempts: 1 });
    }
    let pairs_out = (0..n).map(|i| pairs[i][choice[i]]).collect();
    Ok(Some(MixedCell { pairs: pairs_out, numerator: num, denominator: den, volume: det.unsigned_abs() as u64 }))
}

const MAX_LIFTING_ATTEMPTS: usize = 10;
const LIFTING_MAX: i64 = 1 << 20;

/// Mixed cells for a random lifting drawn from `rng`, retrying on
/// non-generic liftings.
pub fn random_mixed_cells(
    supports: &[Vec<Point>],
    lifting_max: i64,
    rng: &mut impl Rng,
) -> Result<(Lifting, Vec<MixedCell>)> {
    for _ in 0..MAX_LIFTING_ATTEMPTS {
        let lifting = Lifting::random(supports, lifting_max, rng);
        match mixed_cells(supports, &lifting) {
            Ok(cells) => return Ok((lifting, cells)),
            Err(Error::LiftingDegenerate { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::LiftingDegenerate { attempts: MAX_LIFTING_ATTEMPTS })
}

/// Normalized mixed volume, cross-checked by a second independent lifting.
pub fn mixed_volume(supports: &[Vec<Point>], seed: u64) -> Result<u64> {
    let n = supports.len();
    let reduced: Vec<Vec<Point>> = supports
        .iter()
        .map(|s| {
            let s = dedup_points(s);
            if affine_dimension(&s) == n {
                convex_hull(&s).map(|p| p.vertices).unwrap_or(s)
            } else {
                s
            }
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = |rng: &mut ChaCha8Rng| -> Result<u64> {
        let (_, cells) = random_mixed_cells(&reduced, LIFTING_MAX, rng)?;
        Ok(cells.iter().map(|c| c.volume).sum())
    };
    let first = total(&mut rng)?;
    let second = total(&mut rng)?;
    if first == second {
        return Ok(first);
    }
    let third = total(&mut rng)?;
    if third == first || third == second {
        Ok(third)
    } else {
        Err(Error::Invalid(format!("inconsistent mixed volumes {first}, {second}, {third}")))
    }
}

/// Mixed volume of full-dimensional polytopes.
pub fn mixed_volume_polytopes(polys: &[LatticePolytope], seed: u64) -> Result<u64> {
    let supports: Vec<Vec<Point>> = polys.iter().map(|p| p.vertices.clone()).collect();
    mixed_volume(&supports, seed)
}

/// Normalized volume through the exact determinant of a simplex, used by
/// callers that already hold `n + 1` points.
pub fn simplex_volume(points: &[Point]) -> BigInt {
    let base = &points[0];
    let rows: Vec<Vec<i64>> = points[1..].iter().map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    IntMatrix::from_rows(&rows).det().abs()
}
