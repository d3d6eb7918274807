//! The Cox construction of the toric variety attached to a sparse system:
//! grading data, irrelevant ideal, homogenization, quotient map, orbit
//! parametrization and orbit degrees.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{integer_kernel, lattice_index, smith_normal_form, IntMatrix, SnfResult};
use crate::polytope::{facet_data, mixed_volume, normalized_volume_of_points, LatticePolytope, Point};
use crate::system::{monomial, CoxPolynomial, CoxSystem, LaurentPoly, SparseSystem, C64};

/// Seed used for the internal mixed volume computation. The result does not
/// depend on it; it only fixes which liftings are tried.
pub const MV_SEED: u64 = 0x5eed;

#[derive(Clone, Debug)]
pub struct CoxData {
    pub n: usize,
    pub k: usize,
    /// `n × k` facet matrix; column `j` is the inner normal `u_j`.
    pub f: IntMatrix,
    /// Per-equation divisor offsets `a_i ∈ Z^k`.
    pub offsets: Vec<Vec<i64>>,
    /// Minkowski sum of the Newton polytopes.
    pub polytope: LatticePolytope,
    /// Smith form `P F^T Q = diag(s)`, with the kernel rows of `P` size-reduced.
    pub snf: SnfResult,
    /// First `n` rows of `P`.
    pub p1: Vec<Vec<i64>>,
    /// Last `k - n` rows of `P`, a basis of `ker F`.
    pub p2: Vec<Vec<i64>>,
    /// Invariant factors `s_1 | … | s_n`.
    pub torsion_orders: Vec<u64>,
    /// Ray index sets of the maximal cones, one per vertex of the polytope.
    pub max_cones: Vec<Vec<usize>>,
    /// Variable index sets of the monomial generators of the irrelevant ideal.
    pub irrelevant_gens: Vec<Vec<usize>>,
    pub generic_orbit_degree: u64,
    pub bkk: u64,
    pub supports: Vec<Vec<Point>>,
}

/// Result of an orbit degree computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDegree {
    pub degree: u64,
    /// `s_I`, the number of irreducible components of the orbit.
    pub components: u64,
    /// `q_I`, the index of the lattice spanned by `P''_{:,I}`.
    pub lattice_index: u64,
    /// Normalized volume of the orbit polytope.
    pub volume: u64,
}

fn to_u64(b: &BigInt) -> Result<u64> {
    b.to_u64().ok_or(Error::Overflow)
}

impl CoxData {
    pub fn from_system(system: &SparseSystem) -> Result<Self> {
        Self::from_supports(&system.supports())
    }

    pub fn from_supports(supports: &[Vec<Point>]) -> Result<Self> {
        let fd = facet_data(supports)?;
        let n = fd.f.nrows();
        let k = fd.f.ncols();
        if supports.len() != n {
            return Err(Error::Invalid(format!("{} supports in dimension {}", supports.len(), n)));
        }
        let mut snf = smith_normal_form(&fd.f.transpose());
        if snf.rank < n {
            return Err(Error::RankDeficient { rank: snf.rank, needed: n });
        }
        let kernel_rows: Vec<usize> = (n..k).collect();
        snf.p.size_reduce_rows(&kernel_rows);
        let rows = snf.p.to_rows_i64();
        let p1 = rows[..n].to_vec();
        let p2 = rows[n..].to_vec();
        let torsion_orders = snf.invariant_factors().iter().map(to_u64).collect::<Result<Vec<_>>>()?;

        let poly = fd.sum;
        let max_cones: Vec<Vec<usize>> = (0..poly.vertices.len())
            .map(|v| (0..k).filter(|&j| poly.incidence[j].contains(&v)).collect())
            .collect();
        let irrelevant_gens = max_cones
            .iter()
            .map(|cone| (0..k).filter(|i| !cone.contains(i)).collect())
            .collect();
        let bkk = mixed_volume(supports, MV_SEED)?;

        let mut cox = CoxData {
            n,
            k,
            f: fd.f,
            offsets: fd.offsets,
            polytope: poly,
            snf,
            p1,
            p2,
            torsion_orders,
            max_cones,
            irrelevant_gens,
            generic_orbit_degree: 0,
            bkk,
            supports: supports.to_vec(),
        };
        let all: Vec<usize> = (0..k).collect();
        let generic = cox.orbit_degree(&all)?;
        debug_assert_eq!(generic.lattice_index, 1);
        cox.generic_orbit_degree = generic.degree;
        Ok(cox)
    }

    /// `k - n`, the dimension of the quasitorus.
    pub fn orbit_dim(&self) -> usize {
        self.k - self.n
    }

    /// Normal vector of ray `j`.
    pub fn ray(&self, j: usize) -> Vec<i64> {
        self.f.col_i64(j)
    }

    /// Index of the ray with the given normal, if any.
    pub fn ray_index(&self, normal: &[i64]) -> Option<usize> {
        (0..self.k).find(|&j| self.ray(j) == normal)
    }

    pub fn p2_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.orbit_dim(), self.k, |r, c| self.p2[r][c] as f64)
    }

    /// Product of the invariant factors.
    pub fn torsion_size(&self) -> u64 {
        self.torsion_orders.iter().product()
    }

    /// `Z^{k-n}` plus the nontrivial cyclic torsion summands.
    pub fn class_group(&self) -> String {
        let mut parts = Vec::new();
        match self.orbit_dim() {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for &s in &self.torsion_orders {
            if s > 1 {
                parts.push(format!("Z/{s}"));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" ⊕ ")
        }
    }

    /// Exponent of the homogenized monomial of `m` in equation `i`.
    pub fn homogenized_exponent(&self, i: usize, m: &[i64]) -> Vec<i64> {
        (0..self.k)
            .map(|j| {
                let u = self.f.col_i64(j);
                u.iter().zip(m).map(|(a, b)| a * b).sum::<i64>() + self.offsets[i][j]
            })
            .collect()
    }

    /// Homogenizes equation `i` term by term, `m ↦ F^T m + a_i`.
    pub fn homogenize(&self, i: usize, poly: &LaurentPoly) -> Result<CoxPolynomial> {
        let mut exponents = Vec::with_capacity(poly.terms.len());
        for t in &poly.terms {
            let e = self.homogenized_exponent(i, &t.exponent);
            if e.iter().any(|&x| x < 0) {
                return Err(Error::NegativeExponent { equation: i, exponent: e });
            }
            exponents.push(e);
        }
        Ok(CoxPolynomial {
            degree: self.offsets[i].clone(),
            exponents,
            coeffs: poly.terms.iter().map(|t| t.coeff).collect(),
            sources: poly.support(),
        })
    }

    pub fn homogenize_system(&self, system: &SparseSystem) -> Result<CoxSystem> {
        let polys = system.polys.iter().enumerate().map(|(i, p)| self.homogenize(i, p)).collect::<Result<_>>()?;
        Ok(CoxSystem { k: self.k, polys })
    }

    /// `t_j = z^{F_{j,:}}`.
    pub fn quotient_map(&self, z: &[C64]) -> Result<Vec<C64>> {
        if let Some(index) = z.iter().position(|x| *x == C64::new(0.0, 0.0)) {
            return Err(Error::ZeroCoordinate { index });
        }
        Ok((0..self.n).map(|j| monomial(z, self.f.row_i64(j).into_iter())).collect())
    }

    /// Applies the group element `(w, λ)`; `w[j]` is the exponent of the
    /// primitive `s_j`-th root of unity in torsion component `j`.
    pub fn orbit_point(&self, z: &[C64], w: &[u64], lambda: &[C64]) -> Vec<C64> {
        (0..self.k)
            .map(|i| {
                let mut v = z[i];
                for (j, &wj) in w.iter().enumerate() {
                    let s = self.torsion_orders[j];
                    if s > 1 && wj % s != 0 {
                        let e = self.p1[j][i].rem_euclid(s as i64) as f64 * wj as f64;
                        v *= C64::from_polar(1.0, 2.0 * PI * e / s as f64);
                    }
                }
                for (r, l) in lambda.iter().enumerate() {
                    let e = self.p2[r][i];
                    if e != 0 {
                        v *= l.powi(e as i32);
                    }
                }
                v
            })
            .collect()
    }

    /// All torsion tuples `w`, the trivial one first.
    pub fn torsion_elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0u64; self.n]];
        for (j, &s) in self.torsion_orders.iter().enumerate() {
            let mut next = Vec::new();
            for w in &out {
                for e in 0..s {
                    let mut w2 = w.clone();
                    w2[j] = e;
                    next.push(w2);
                }
            }
            out = next;
        }
        out
    }

    /// `conv({0} ∪ {P''_{:,i} : i ∈ I})`, as its generating points.
    pub fn orbit_polytope_points(&self, stratum: &[usize]) -> Vec<Point> {
        let r = self.orbit_dim();
        let mut pts = vec![vec![0i64; r]];
        for &i in stratum {
            pts.push((0..r).map(|row| self.p2[row][i]).collect());
        }
        pts
    }

    pub fn orbit_polytope(&self, stratum: &[usize]) -> Result<LatticePolytope> {
        crate::polytope::convex_hull(&self.orbit_polytope_points(stratum))
    }

    /// Checks that points with nonzero coordinates exactly on `stratum` lie
    /// over the simplicial part of the variety.
    pub fn check_stratum(&self, stratum: &[usize]) -> Result<()> {
        let complement: Vec<usize> = (0..self.k).filter(|i| !stratum.contains(i)).collect();
        let nv = self.polytope.vertices.len();
        let face: Vec<usize> = (0..nv)
            .filter(|v| complement.iter().all(|&j| self.polytope.incidence[j].contains(v)))
            .collect();
        if face.is_empty() {
            return Err(Error::InBaseLocus { stratum: stratum.to_vec() });
        }
        let cone: Vec<usize> =
            (0..self.k).filter(|&j| face.iter().all(|v| self.polytope.incidence[j].contains(v))).collect();
        if self.f.select_cols(&cone).rank() != cone.len() {
            return Err(Error::RankDrop { stratum: stratum.to_vec(), reason: "cone is not simplicial".into() });
        }
        Ok(())
    }

    /// Degree of the closure of `G·z` for `z` with nonzero coordinates
    /// exactly on `stratum` (0-based indices).
    pub fn orbit_degree(&self, stratum: &[usize]) -> Result<OrbitDegree> {
        let mut stratum = stratum.to_vec();
        stratum.sort_unstable();
        stratum.dedup();
        if stratum.iter().any(|&i| i >= self.k) {
            return Err(Error::Invalid(format!("stratum index out of range 0..{}", self.k)));
        }
        self.check_stratum(&stratum)?;
        let r = self.orbit_dim();
        let p2 = IntMatrix::from_rows(&self.p2);
        let sub = p2.select_cols(&stratum);
        let q = match lattice_index(&sub, r).finite() {
            Some(q) => to_u64(q)?,
            None => {
                return Err(Error::RankDrop {
                    stratum: stratum.clone(),
                    reason: format!("kernel columns on the stratum have rank {} < {}", sub.rank(), r),
                })
            }
        };
        let complement: Vec<usize> = (0..self.k).filter(|i| !stratum.contains(i)).collect();
        let kernel = if complement.is_empty() {
            IntMatrix::identity(self.n)
        } else {
            integer_kernel(&self.f.select_cols(&complement).transpose())
        };
        let relation = self.f.select_cols(&stratum).transpose().mul(&kernel);
        let s_big: BigInt = if relation.ncols() == 0 {
            BigInt::one()
        } else {
            smith_normal_form(&relation).invariant_factors().iter().product()
        };
        let s = to_u64(&s_big)?;
        let volume = normalized_volume_of_points(&self.orbit_polytope_points(&stratum));
        let num = BigInt::from(s) * BigInt::from(volume);
        let (deg, rem) = num.div_rem(&BigInt::from(q));
        if !rem.is_zero() {
            return Err(Error::Invalid(format!("orbit degree {s}·{volume}/{q} is not an integer")));
        }
        Ok(OrbitDegree { degree: to_u64(&deg)?, components: s, lattice_index: q, volume })
    }

    /// `max_g |g(z)| / prod_{i in g} max(1, |z_i|)` over the irrelevant
    /// generators. Zero exactly on the base locus, where every generator vanishes.
    pub fn base_locus_residual(&self, z: &[C64]) -> f64 {
        self.irrelevant_gens
            .iter()
            .map(|g| g.iter().map(|&i| z[i].norm() / z[i].norm().max(1.0)).product::<f64>())
            .fold(0.0, f64::max)
    }

    /// Monomial `x^{a_i}` evaluated at `z`, used in the section identity.
    pub fn offset_monomial(&self, i: usize, z: &[C64]) -> C64 {
        monomial(z, self.offsets[i].iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::Term;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn poly(exps: &[&[i64]], coeffs: &[f64]) -> LaurentPoly {
        LaurentPoly::new(exps.iter().zip(coeffs).map(|(e, &v)| Term { exponent: e.to_vec(), coeff: c(v) }).collect())
    }

    fn hirzebruch(constant: f64) -> SparseSystem {
        let f1 = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1], &[2, 1], &[3, 1]], &[1.0; 6]);
        let f2 = poly(&[&[0, 0], &[0, 1], &[1, 1], &[2, 1]], &[constant, 1.0, 1.0, 1.0]);
        SparseSystem::new(2, vec![f1, f2]).unwrap()
    }

    /// Column indices of the given normals.
    fn order(cox: &CoxData, normals: &[[i64; 2]]) -> Vec<usize> {
        normals.iter().map(|u| cox.ray_index(u).unwrap()).collect()
    }

    // Normals u1..u4 as listed for the Hirzebruch surface.
    const H2: [[i64; 2]; 4] = [[1, 0], [0, 1], [-1, 2], [0, -1]];

    #[test]
    fn hirzebruch_data() {
        let cox = CoxData::from_system(&hirzebruch(1.0)).unwrap();
        assert_eq!((cox.n, cox.k, cox.bkk, cox.generic_orbit_degree), (2, 4, 3, 3));
        let o = order(&cox, &H2);
        // offsets of the second equation: only u4 has a nonzero offset
        let a2: Vec<i64> = o.iter().map(|&j| cox.offsets[1][j]).collect();
        assert_eq!(a2, vec![0, 0, 0, 1]);
        // generators x3x4, x1x4, x1x2, x2x3 in the listed numbering
        let mut gens: Vec<Vec<usize>> = cox
            .irrelevant_gens
            .iter()
            .map(|g| {
                let mut v: Vec<usize> = g.iter().map(|&j| o.iter().position(|&x| x == j).unwrap() + 1).collect();
                v.sort();
                v
            })
            .collect();
        gens.sort();
        assert_eq!(gens, vec![vec![1, 2], vec![1, 4], vec![2, 3], vec![3, 4]]);
        // P'' rows span the same lattice as the known kernel basis
        let p2 = IntMatrix::from_rows(&cox.p2);
        let expected_listed = [[-1i64, 2, -1, 0], [0, -1, 0, -1]];
        let mut expected = vec![vec![0i64; 4]; 2];
        for r in 0..2 {
            for (pi, &j) in o.iter().enumerate() {
                expected[r][j] = expected_listed[r][pi];
            }
        }
        assert_eq!(p2.row_hermite_form(), IntMatrix::from_rows(&expected).row_hermite_form());
        assert_eq!(cox.class_group(), "Z^2");
    }

    #[test]
    fn hirzebruch_homogenization() {
        let sys = hirzebruch(1.0);
        let cox = CoxData::from_system(&sys).unwrap();
        let o = order(&cox, &H2);
        let to_listed = |e: &Vec<i64>| -> Vec<i64> { o.iter().map(|&j| e[j]).collect() };
        let f2 = cox.homogenize(1, &sys.polys[1]).unwrap();
        let mut got: Vec<Vec<i64>> = f2.exponents.iter().map(to_listed).collect();
        got.sort();
        let mut want = vec![vec![0, 0, 0, 1], vec![0, 1, 2, 0], vec![1, 1, 1, 0], vec![2, 1, 0, 0]];
        want.sort();
        assert_eq!(got, want);
        let f1 = cox.homogenize(0, &sys.polys[0]).unwrap();
        let mut got: Vec<Vec<i64>> = f1.exponents.iter().map(to_listed).collect();
        got.sort();
        let mut want = vec![
            vec![0, 0, 1, 1],
            vec![1, 0, 0, 1],
            vec![0, 1, 3, 0],
            vec![1, 1, 2, 0],
            vec![2, 1, 1, 0],
            vec![3, 1, 0, 0],
        ];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn hirzebruch_known_solutions() {
        let sys = hirzebruch(1.0);
        let cox = CoxData::from_system(&sys).unwrap();
        let hs = cox.homogenize_system(&sys).unwrap();
        let o = order(&cox, &H2);
        let from_listed = |p: [f64; 4]| -> Vec<C64> {
            let mut z = vec![c(0.0); 4];
            for (pi, &j) in o.iter().enumerate() {
                z[j] = c(p[pi]);
            }
            z
        };
        for p in [[-1.0, -1.0, 1.0, 1.0], [0.0, -1.0, 1.0, 1.0], [1.0, -1.0, 0.0, 1.0]] {
            let z = from_listed(p);
            assert!(hs.eval(&z).norm() < 1e-14);
            assert!(cox.base_locus_residual(&z) > 0.5);
        }
        let t = cox.quotient_map(&from_listed([-1.0, -1.0, 1.0, 1.0])).unwrap();
        assert!((t[0] - c(-1.0)).norm() < 1e-15 && (t[1] - c(-1.0)).norm() < 1e-15);
        assert_eq!(cox.base_locus_residual(&from_listed([0.0, 1.0, 0.0, 1.0])), 0.0);
        let eps = 1e-6;
        let r = cox.base_locus_residual(&from_listed([eps, 1.0, eps, 1.0]));
        assert!((r - eps).abs() < 1e-18);
        assert!(matches!(cox.quotient_map(&from_listed([0.0, 1.0, 1.0, 1.0])), Err(Error::ZeroCoordinate { .. })));
    }

    #[test]
    fn hirzebruch_orbit_degrees() {
        let cox = CoxData::from_system(&hirzebruch(1.0)).unwrap();
        let o = order(&cox, &H2);
        let deg = |listed: &[usize]| -> Result<OrbitDegree> {
            cox.orbit_degree(&listed.iter().map(|&p| o[p - 1]).collect::<Vec<_>>())
        };
        assert_eq!(deg(&[1, 2, 3, 4]).unwrap().degree, 3);
        assert_eq!(deg(&[1, 2, 3, 4]).unwrap().components, 1);
        assert_eq!(deg(&[1, 3, 4]).unwrap().degree, 1);
        assert_eq!(deg(&[1, 2, 3]).unwrap().degree, 1);
        assert_eq!(deg(&[2, 3, 4]).unwrap().degree, 3);
        assert_eq!(deg(&[1, 2, 4]).unwrap().degree, 3);
        assert!(matches!(deg(&[2, 4]), Err(Error::InBaseLocus { .. })));
        assert_eq!(cox.orbit_polytope(&(0..4).collect::<Vec<_>>()).unwrap().vertices.len(), 4);
    }

    #[test]
    fn pillow_degree_and_class_group() {
        let pts: Vec<Point> = vec![vec![0, 0], vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]];
        let cox = CoxData::from_supports(&[pts.clone(), pts]).unwrap();
        assert_eq!(cox.torsion_orders, vec![1, 2]);
        assert_eq!(cox.class_group(), "Z^2 ⊕ Z/2");
        let d = cox.orbit_degree(&[0, 1, 2, 3]).unwrap();
        assert_eq!((d.degree, d.components, d.volume), (2, 2, 1));
        assert_eq!(cox.generic_orbit_degree, 2);
        assert_eq!(cox.torsion_elements().len(), 2);
    }

    #[test]
    fn pyramid_generators_and_orbit_map() {
        let pts: Vec<Point> = vec![vec![1, 1, 0], vec![1, -1, 0], vec![-1, 1, 0], vec![-1, -1, 0], vec![0, 0, 1]];
        let cox = CoxData::from_supports(&[pts.clone(), pts.clone(), pts]).unwrap();
        assert_eq!(cox.k, 5);
        // label rays as listed: x1 base, then the four side facets
        let base = cox.ray_index(&[0, 0, 1]).unwrap();
        let mut sizes: Vec<usize> = cox.irrelevant_gens.iter().map(|g| g.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 2, 2, 2]);
        assert!(cox.irrelevant_gens.contains(&vec![base]));
        // generic orbit: the apex cone is not simplicial, so the orbit map
        // still acts; check it against the kernel directly
        let z: Vec<C64> = (0..5).map(|i| C64::new(1.0 + i as f64, 0.5)).collect();
        let lam = [C64::new(0.3, 1.1), C64::new(-0.7, 0.2)];
        let gz = cox.orbit_point(&z, &[0, 0, 0], &lam);
        let t0 = cox.quotient_map(&z).unwrap();
        let t1 = cox.quotient_map(&gz).unwrap();
        for j in 0..3 {
            assert!((t0[j] - t1[j]).norm() < 1e-12 * t0[j].norm());
        }
        // lattice equal to the one spanned by the listed kernel rows
        let listed = |u: &[i64]| cox.ray_index(u).unwrap();
        let cols = [listed(&[0, 0, 1]), listed(&[1, 0, -1]), listed(&[0, 1, -1]), listed(&[-1, 0, -1]), listed(&[0, -1, -1])];
        let mut expected = vec![vec![0i64; 5]; 2];
        let listed_rows = [[2i64, 1, 0, 1, 0], [2, 0, 1, 0, 1]];
        for r in 0..2 {
            for (pi, &j) in cols.iter().enumerate() {
                expected[r][j] = listed_rows[r][pi];
            }
        }
        assert_eq!(
            IntMatrix::from_rows(&cox.p2).row_hermite_form(),
            IntMatrix::from_rows(&expected).row_hermite_form()
        );
    }

    #[test]
    fn projective_plane() {
        let lin: Vec<Point> = vec![vec![0, 0], vec![1, 0], vec![0, 1]];
        let cox = CoxData::from_supports(&[lin.clone(), lin]).unwrap();
        assert_eq!((cox.k, cox.generic_orbit_degree, cox.bkk), (3, 1, 1));
        let mut gens = cox.irrelevant_gens.clone();
        gens.sort();
        assert_eq!(gens, vec![vec![0], vec![1], vec![2]]);
        for i in 0..3 {
            let s: Vec<usize> = (0..3).filter(|&j| j != i).collect();
            assert_eq!(cox.orbit_degree(&s).unwrap().degree, 1);
        }
        assert_eq!(cox.class_group(), "Z");
    }

    #[test]
    fn negative_exponent_detected() {
        let sys = hirzebruch(1.0);
        let cox = CoxData::from_system(&sys).unwrap();
        let bad = poly(&[&[-5, 0]], &[1.0]);
        assert!(matches!(cox.homogenize(0, &bad), Err(Error::NegativeExponent { .. })));
    }
}
