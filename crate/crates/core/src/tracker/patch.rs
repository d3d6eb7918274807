use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::system::C64;

/// Affine map `x ↦ A x + b` with `A` of size `(k - n) × k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Slice {
    pub a: DMatrix<C64>,
    pub b: DVector<C64>,
}

impl Slice {
    pub fn eval(&self, x: &DVector<C64>) -> DVector<C64> {
        &self.a * x + &self.b
    }

    /// Slice with linear part `a` passing through `x`.
    pub fn through(a: DMatrix<C64>, x: &DVector<C64>) -> Self {
        let b = -(&a * x);
        Slice { a, b }
    }
}

/// Coordinates `x = x̂ + K y` on the slice.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    pub x_hat: DVector<C64>,
    /// Orthonormal basis of `ker A`, `k × n`.
    pub kernel: DMatrix<C64>,
}

impl Patch {
    pub fn to_ambient(&self, y: &DVector<C64>) -> DVector<C64> {
        &self.x_hat + &self.kernel * y
    }

    /// Patch coordinates of a point on the slice.
    pub fn to_local(&self, x: &DVector<C64>) -> DVector<C64> {
        self.kernel.adjoint() * (x - &self.x_hat)
    }
}

/// Least-norm point `x̂` with `A x̂ + b = 0` and an orthonormal kernel basis of `A`.
pub fn patch_reduce(slice: &Slice) -> Result<Patch> {
    let a = &slice.a;
    let (r, k) = a.shape();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    // Orthonormalize the conjugated rows, which span the orthogonal
    // complement of the kernel, then extend by coordinate vectors.
    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(k);
    for i in 0..r {
        let v: DVector<C64> = a.row(i).transpose().map(|c| c.conj());
        match orthonormalize(&basis, v, 1e-10 * scale) {
            Some(q) => basis.push(q),
            None => return Err(Error::RankDeficientSlice),
        }
    }
    let mut kernel = Vec::with_capacity(k - r);
    for e in 0..k {
        if basis.len() == k {
            break;
        }
        let mut v = DVector::zeros(k);
        v[e] = C64::new(1.0, 0.0);
        if let Some(q) = orthonormalize(&basis, v, 0.1) {
            basis.push(q.clone());
            kernel.push(q);
        }
    }
    let kernel = DMatrix::from_columns(&kernel);
    let gram = a * a.adjoint();
    let w = gram.lu().solve(&(-&slice.b)).ok_or(Error::RankDeficientSlice)?;
    let x_hat = a.adjoint() * w;
    Ok(Patch { x_hat, kernel })
}

/// Gram-Schmidt with one reorthogonalization pass; `None` if the residual is
/// below `min_norm`.
fn orthonormalize(basis: &[DVector<C64>], mut v: DVector<C64>, min_norm: f64) -> Option<DVector<C64>> {
    for _ in 0..2 {
        for q in basis {
            let c = q.dotc(&v);
            v -= q * c;
        }
    }
    let nv = v.norm();
    if nv < min_norm {
        None
    } else {
        Some(v / C64::new(nv, 0.0))
    }
}

/// Slice through `z` whose linear part is `conj(P'' diag(z))`, orthogonal to
/// the orbit through `z`.
pub fn orthogonal_slice(p2: &DMatrix<f64>, z: &DVector<C64>) -> Slice {
    let a = DMatrix::from_fn(p2.nrows(), p2.ncols(), |r, c| (z[c] * p2[(r, c)]).conj());
    Slice::through(a, z)
}
