//! Sparse Laurent systems in torus coordinates and polynomial systems in
//! Cox coordinates, with value and gradient evaluation.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::Point;

pub type C64 = Complex64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponent: Vec<i64>,
    pub coeff: C64,
}

/// Laurent polynomial `sum c_m t^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentPoly {
    pub terms: Vec<Term>,
}

impl LaurentPoly {
    /// Merges repeated exponents by summing their coefficients.
    pub fn new(terms: Vec<Term>) -> Self {
        let mut merged: BTreeMap<Vec<i64>, C64> = BTreeMap::new();
        let mut order: Vec<Vec<i64>> = Vec::new();
        for t in terms {
            if !merged.contains_key(&t.exponent) {
                order.push(t.exponent.clone());
            }
            *merged.entry(t.exponent).or_insert(C64::new(0.0, 0.0)) += t.coeff;
        }
        let terms = order.into_iter().map(|e| Term { coeff: merged[&e], exponent: e }).collect();
        LaurentPoly { terms }
    }

    pub fn from_pairs(pairs: &[(&[i64], C64)]) -> Self {
        Self::new(pairs.iter().map(|(e, c)| Term { exponent: e.to_vec(), coeff: *c }).collect())
    }

    pub fn support(&self) -> Vec<Point> {
        self.terms.iter().map(|t| t.exponent.clone()).collect()
    }

    pub fn eval(&self, t: &[C64]) -> C64 {
        self.terms.iter().map(|term| term.coeff * monomial(t, term.exponent.iter().copied())).sum()
    }

    /// Value and gradient at a point of the torus.
    pub fn eval_with_gradient(&self, t: &[C64], grad: &mut [C64]) -> C64 {
        grad.iter_mut().for_each(|g| *g = C64::new(0.0, 0.0));
        let mut val = C64::new(0.0, 0.0);
        for term in &self.terms {
            val += term.coeff * monomial_gradient(t, &term.exponent, term.coeff, grad);
        }
        val
    }

    /// Sum of coefficient moduli, a scale for relative residuals.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }
}

/// `z^e` for possibly negative exponents.
pub fn monomial(z: &[C64], e: impl Iterator<Item = i64>) -> C64 {
    let mut v = C64::new(1.0, 0.0);
    for (zi, ei) in z.iter().zip(e) {
        if ei != 0 {
            v *= zi.powi(ei as i32);
        }
    }
    v
}

/// Returns `z^e` and accumulates `coeff * d(z^e)/dz` into `grad`. Handles zero
/// coordinates exactly for nonnegative exponents.
pub fn monomial_gradient(z: &[C64], e: &[i64], coeff: C64, grad: &mut [C64]) -> C64 {
    let k = z.len();
    let one = C64::new(1.0, 0.0);
    let pw: Vec<C64> = (0..k).map(|j| if e[j] == 0 { one } else { z[j].powi(e[j] as i32) }).collect();
    let mut prefix = vec![one; k + 1];
    for j in 0..k {
        prefix[j + 1] = prefix[j] * pw[j];
    }
    let mut suffix = one;
    for j in (0..k).rev() {
        if e[j] != 0 {
            let d = C64::new(e[j] as f64, 0.0) * z[j].powi((e[j] - 1) as i32);
            grad[j] += coeff * d * prefix[j] * suffix;
        }
        suffix *= pw[j];
    }
    prefix[k]
}

/// Square Laurent system `f_1 = … = f_n = 0` in `n` torus variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseSystem {
    pub n: usize,
    pub polys: Vec<LaurentPoly>,
}

impl SparseSystem {
    pub fn new(n: usize, polys: Vec<LaurentPoly>) -> Result<Self> {
        if polys.len() != n {
            return Err(Error::Invalid(format!("{} equations in {} variables", polys.len(), n)));
        }
        for (i, p) in polys.iter().enumerate() {
            if p.terms.is_empty() {
                return Err(Error::Invalid(format!("equation {i} has no terms")));
            }
            if p.terms.iter().any(|t| t.exponent.len() != n) {
                return Err(Error::Invalid(format!("equation {i} has an exponent of wrong length")));
            }
        }
        Ok(SparseSystem { n, polys })
    }

    pub fn supports(&self) -> Vec<Vec<Point>> {
        self.polys.iter().map(|p| p.support()).collect()
    }

    pub fn eval(&self, t: &[C64]) -> Vec<C64> {
        self.polys.iter().map(|p| p.eval(t)).collect()
    }

    pub fn jacobian(&self, t: &[C64]) -> DMatrix<C64> {
        let n = self.n;
        let mut j = DMatrix::zeros(n, n);
        let mut g = vec![C64::new(0.0, 0.0); n];
        for (i, p) in self.polys.iter().enumerate() {
            p.eval_with_gradient(t, &mut g);
            for c in 0..n {
                j[(i, c)] = g[c];
            }
        }
        j
    }

    /// Largest residual `|f_i(t)|` divided by the sum of `|c_m t^m|` over the terms.
    pub fn relative_residual(&self, t: &[C64]) -> f64 {
        self.polys
            .iter()
            .map(|p| {
                let v = p.eval(t).norm();
                let s: f64 = p.terms.iter().map(|term| (term.coeff * monomial(t, term.exponent.iter().copied())).norm()).sum();
                if s > 0.0 { v / s } else { v }
            })
            .fold(0.0, f64::max)
    }

    /// Same supports, new coefficients (one vector per equation).
    pub fn with_coefficients(&self, coeffs: &[Vec<C64>]) -> SparseSystem {
        let polys = self
            .polys
            .iter()
            .zip(coeffs)
            .map(|(p, c)| LaurentPoly {
                terms: p.terms.iter().zip(c).map(|(t, &coeff)| Term { exponent: t.exponent.clone(), coeff }).collect(),
            })
            .collect();
        SparseSystem { n: self.n, polys }
    }
}

/// Polynomial with nonnegative exponents in the `k` Cox variables.
#[derive(Clone, Debug, PartialEq)]
pub struct CoxPolynomial {
    /// Offset vector representing the degree class.
    pub degree: Vec<i64>,
    pub exponents: Vec<Vec<i64>>,
    pub coeffs: Vec<C64>,
    /// Torus exponent `m` each term was homogenized from.
    pub sources: Vec<Point>,
}

impl CoxPolynomial {
    pub fn eval(&self, z: &[C64]) -> C64 {
        self.exponents.iter().zip(&self.coeffs).map(|(e, c)| c * monomial(z, e.iter().copied())).sum()
    }

    pub fn eval_with_gradient(&self, z: &[C64], grad: &mut [C64]) -> C64 {
        grad.iter_mut().for_each(|g| *g = C64::new(0.0, 0.0));
        let mut val = C64::new(0.0, 0.0);
        for (e, &c) in self.exponents.iter().zip(&self.coeffs) {
            val += c * monomial_gradient(z, e, c, grad);
        }
        val
    }

    /// Sum of `|c| · |z^e|` over the terms.
    pub fn term_scale(&self, z: &[C64]) -> f64 {
        self.exponents.iter().zip(&self.coeffs).map(|(e, c)| (c * monomial(z, e.iter().copied())).norm()).sum()
    }
}

/// Homogenized system in Cox coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct CoxSystem {
    pub k: usize,
    pub polys: Vec<CoxPolynomial>,
}

impl CoxSystem {
    pub fn eval(&self, z: &[C64]) -> DVector<C64> {
        DVector::from_iterator(self.polys.len(), self.polys.iter().map(|p| p.eval(z)))
    }

    /// Values and the `n × k` Jacobian.
    pub fn eval_jac(&self, z: &[C64]) -> (DVector<C64>, DMatrix<C64>) {
        let n = self.polys.len();
        let mut val = DVector::zeros(n);
        let mut jac = DMatrix::zeros(n, self.k);
        let mut g = vec![C64::new(0.0, 0.0); self.k];
        for (i, p) in self.polys.iter().enumerate() {
            val[i] = p.eval_with_gradient(z, &mut g);
            for c in 0..self.k {
                jac[(i, c)] = g[c];
            }
        }
        (val, jac)
    }

    /// Largest per-equation residual relative to the term magnitudes and
    /// the coefficient size: `|f_i(z)| / max(sum |c z^e|, sum |c| · tiny)`.
    pub fn relative_residual(&self, z: &[C64]) -> f64 {
        self.polys
            .iter()
            .map(|p| {
                let v = p.eval(z).norm();
                let s = p.term_scale(z);
                let c: f64 = p.coeffs.iter().map(|c| c.norm()).sum();
                let scale = s.max(c * 1e-300);
                if scale > 0.0 { v / scale } else { v }
            })
            .fold(0.0, f64::max)
    }
}
