use nalgebra::{DMatrix, DVector};

use super::patch::{orthogonal_slice, patch_reduce, Patch, Slice};
use super::{complex_condition, PathSystem};
use crate::error::Result;
use crate::system::{monomial_gradient, CoxSystem, SparseSystem, C64};

/// A family of `n` equations in the `k` Cox coordinates, parametrized by `τ`.
pub trait CoxHomotopy: Sync {
    fn n(&self) -> usize;
    fn k(&self) -> usize;
    /// Values, the `n × k` Jacobian and the `τ`-derivative.
    fn eval(&self, x: &[C64], tau: f64) -> (DVector<C64>, DMatrix<C64>, DVector<C64>);
}

/// `H(x; τ) = (1 - τ) F(x) + γ τ G(x)`: the target at `τ = 0`, the start at `τ = 1`.
#[derive(Clone, Debug)]
pub struct StraightLine {
    pub target: CoxSystem,
    pub start: CoxSystem,
    pub gamma: C64,
}

impl CoxHomotopy for StraightLine {
    fn n(&self) -> usize {
        self.target.polys.len()
    }

    fn k(&self) -> usize {
        self.target.k
    }

    fn eval(&self, x: &[C64], tau: f64) -> (DVector<C64>, DMatrix<C64>, DVector<C64>) {
        let (fv, fj) = self.target.eval_jac(x);
        let (gv, gj) = self.start.eval_jac(x);
        let a = C64::new(1.0 - tau, 0.0);
        let b = self.gamma * tau;
        (&fv * a + &gv * b, fj * a + gj * b, gv * self.gamma - fv)
    }
}

/// Binomial equations `x^{F_j+} r^{F_j-} = x^{F_j-} r^{F_j+}` cutting out the
/// orbit of the moving point `r(τ) = r0 + τ r1`.
#[derive(Clone, Debug)]
pub struct OrbitDegeneration {
    /// Rows of the facet matrix.
    pub f: Vec<Vec<i64>>,
    pub r0: Vec<C64>,
    pub r1: Vec<C64>,
}

impl OrbitDegeneration {
    pub fn point(&self, tau: f64) -> Vec<C64> {
        self.r0.iter().zip(&self.r1).map(|(a, b)| a + b * tau).collect()
    }
}

impl CoxHomotopy for OrbitDegeneration {
    fn n(&self) -> usize {
        self.f.len()
    }

    fn k(&self) -> usize {
        self.r0.len()
    }

    fn eval(&self, x: &[C64], tau: f64) -> (DVector<C64>, DMatrix<C64>, DVector<C64>) {
        let (n, k) = (self.n(), self.k());
        let r = self.point(tau);
        let one = C64::new(1.0, 0.0);
        let mut val = DVector::zeros(n);
        let mut jac = DMatrix::zeros(n, k);
        let mut dtau = DVector::zeros(n);
        for (j, row) in self.f.iter().enumerate() {
            let pos: Vec<i64> = row.iter().map(|&e| e.max(0)).collect();
            let neg: Vec<i64> = row.iter().map(|&e| (-e).max(0)).collect();
            let mut gx_pos = vec![C64::new(0.0, 0.0); k];
            let mut gx_neg = vec![C64::new(0.0, 0.0); k];
            let mut gr_pos = vec![C64::new(0.0, 0.0); k];
            let mut gr_neg = vec![C64::new(0.0, 0.0); k];
            let xp = monomial_gradient(x, &pos, one, &mut gx_pos);
            let xn = monomial_gradient(x, &neg, one, &mut gx_neg);
            let rp = monomial_gradient(&r, &pos, one, &mut gr_pos);
            let rn = monomial_gradient(&r, &neg, one, &mut gr_neg);
            val[j] = xp * rn - xn * rp;
            for i in 0..k {
                jac[(j, i)] = gx_pos[i] * rn - gx_neg[i] * rp;
            }
            let drn: C64 = gr_neg.iter().zip(&self.r1).map(|(g, d)| g * d).sum();
            let drp: C64 = gr_pos.iter().zip(&self.r1).map(|(g, d)| g * d).sum();
            dtau[j] = xp * drn - xn * drp;
        }
        (val, jac, dtau)
    }
}

/// Condition number of the square Jacobian of `(H(·; τ), A x + b)` at `x`.
pub fn jacobian_condition(hom: &dyn CoxHomotopy, slice: &Slice, x: &[C64], tau: f64) -> f64 {
    let (_, j, _) = hom.eval(x, tau);
    let (n, k) = (j.nrows(), j.ncols());
    let mut m = DMatrix::zeros(k, k);
    m.rows_mut(0, n).copy_from(&j);
    m.rows_mut(n, k - n).copy_from(&slice.a);
    complex_condition(&m)
}

/// A Cox homotopy restricted to an affine slice, tracked in patch
/// coordinates. With `orthogonal` set, the slice is recomputed through the
/// current point after every accepted step.
pub struct SlicedCoxPath<'a> {
    pub hom: &'a dyn CoxHomotopy,
    pub slice: Slice,
    pub patch: Patch,
    pub orthogonal: Option<DMatrix<f64>>,
}

impl<'a> SlicedCoxPath<'a> {
    pub fn new(hom: &'a dyn CoxHomotopy, slice: Slice) -> Result<Self> {
        let patch = patch_reduce(&slice)?;
        Ok(SlicedCoxPath { hom, slice, patch, orthogonal: None })
    }

    /// Orthogonal slicing through `z` using the kernel rows `p2`.
    pub fn orthogonal(hom: &'a dyn CoxHomotopy, p2: DMatrix<f64>, z: &DVector<C64>) -> Result<Self> {
        let slice = orthogonal_slice(&p2, z);
        let patch = patch_reduce(&slice)?;
        Ok(SlicedCoxPath { hom, slice, patch, orthogonal: Some(p2) })
    }

    pub fn local(&self, x: &DVector<C64>) -> DVector<C64> {
        self.patch.to_local(x)
    }
}

impl PathSystem for SlicedCoxPath<'_> {
    fn dim(&self) -> usize {
        self.hom.n()
    }

    fn evaluate(&self, y: &DVector<C64>, t: f64) -> (DVector<C64>, DMatrix<C64>, DVector<C64>) {
        let x = self.patch.to_ambient(y);
        let (v, j, d) = self.hom.eval(x.as_slice(), t);
        (v, j * &self.patch.kernel, d)
    }

    fn accept(&mut self, y: &DVector<C64>, _t: f64) -> DVector<C64> {
        let Some(p2) = &self.orthogonal else { return y.clone() };
        let z = self.patch.to_ambient(y);
        let slice = orthogonal_slice(p2, &z);
        match patch_reduce(&slice) {
            Ok(patch) => {
                self.slice = slice;
                self.patch = patch;
                self.patch.to_local(&z)
            }
            // keep the last valid slice
            Err(_) => y.clone(),
        }
    }

    fn ambient(&self, y: &DVector<C64>) -> DVector<C64> {
        self.patch.to_ambient(y)
    }

    fn condition(&self, y: &DVector<C64>, t: f64) -> f64 {
        jacobian_condition(self.hom, &self.slice, self.patch.to_ambient(y).as_slice(), t)
    }
}

/// `(G(x), γ τ L1(x) + (τ - 1) L(x))` in all `k` coordinates, moving the
/// slice from `L1` at `τ = 1` to `L` at `τ = 0`.
pub struct MovingSlicePath<'a> {
    pub start: &'a CoxSystem,
    pub from: Slice,
    pub to: Slice,
    pub gamma: C64,
}

impl PathSystem for MovingSlicePath<'_> {
    fn dim(&self) -> usize {
        self.start.k
    }

    fn evaluate(&self, x: &DVector<C64>, t: f64) -> (DVector<C64>, DMatrix<C64>, DVector<C64>) {
        let k = self.start.k;
        let n = self.start.polys.len();
        let (gv, gj) = self.start.eval_jac(x.as_slice());
        let a = self.gamma * t;
        let b = C64::new(t - 1.0, 0.0);
        let l1 = self.from.eval(x);
        let l = self.to.eval(x);
        let mut val = DVector::zeros(k);
        let mut jac = DMatrix::zeros(k, k);
        let mut d = DVector::zeros(k);
        val.rows_mut(0, n).copy_from(&gv);
        val.rows_mut(n, k - n).copy_from(&(&l1 * a + &l * b));
        jac.rows_mut(0, n).copy_from(&gj);
        jac.rows_mut(n, k - n).copy_from(&(&self.from.a * a + &self.to.a * b));
        d.rows_mut(n, k - n).copy_from(&(l1 * self.gamma + l));
        (val, jac, d)
    }
}

/// `(1 - s) γ G(y) + s F(y)` between two Laurent systems with identical
/// term lists, tracked from `s = 0` to `s = 1`.
pub struct LaurentSegment<'a> {
    pub from: &'a SparseSystem,
    pub to: &'a SparseSystem,
    pub gamma: C64,
}

impl PathSystem for LaurentSegment<'_> {
    fn dim(&self) -> usize {
        self.to.n
    }

    fn evaluate(&self, y: &DVector<C64>, s: f64) -> (DVector<C64>, DMatrix<C64>, DVector<C64>) {
        let t = y.as_slice();
        let a = self.gamma * (1.0 - s);
        let b = C64::new(s, 0.0);
        let fv = DVector::from_vec(self.from.eval(t));
        let tv = DVector::from_vec(self.to.eval(t));
        let fj = self.from.jacobian(t);
        let tj = self.to.jacobian(t);
        (&fv * a + &tv * b, fj * a + tj * b, tv - fv * self.gamma)
    }
}
