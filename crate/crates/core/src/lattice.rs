//! Exact integer linear algebra: Smith normal form, kernels, lattice
//! indices and selection of well-conditioned column subsets.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix with arbitrary-precision entries, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows_string())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. All rows must have equal length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&v| BigInt::from(v)));
        }
        IntMatrix { rows: r, cols: c, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols<R: AsRef<[i64]>>(cols: &[R], nrows: usize) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            let col = col.as_ref();
            assert_eq!(col.len(), nrows);
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, BigInt::from(v));
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    /// Entry as `i64`; panics if it does not fit.
    pub fn get_i64(&self, i: usize, j: usize) -> i64 {
        self.get(i, j).to_i64().expect("entry exceeds i64")
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn select_cols(&self, idx: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(idx.len(), self.cols);
        for (ii, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                out.set(ii, j, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn row_i64(&self, i: usize) -> Vec<i64> {
        (0..self.cols).map(|j| self.get_i64(i, j)).collect()
    }

    pub fn col_i64(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get_i64(i, j)).collect()
    }

    pub fn to_rows_i64(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row_i64(i)).collect()
    }

    fn to_rows_string(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64().unwrap_or(f64::NAN))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * f;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * f;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        smith_normal_form(self).rank
    }

    /// Determinant of a square matrix (fraction-free elimination).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m.get(i, k).is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                m.swap_rows(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1)
    }

    /// Row-style Hermite normal form of the lattice spanned by the rows.
    /// Zero rows are dropped; pivots are positive and entries above a pivot
    /// are reduced into `[0, pivot)`. Two matrices span the same row lattice
    /// iff their Hermite forms coincide.
    pub fn row_hermite_form(&self) -> IntMatrix {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            loop {
                // smallest nonzero in column c at or below r
                let mut best: Option<usize> = None;
                for i in r..m.rows {
                    if !m.get(i, c).is_zero()
                        && best.map_or(true, |b| m.get(i, c).abs() < m.get(b, c).abs())
                    {
                        best = Some(i);
                    }
                }
                let Some(b) = best else { break };
                m.swap_rows(r, b);
                let mut done = true;
                for i in r + 1..m.rows {
                    if m.get(i, c).is_zero() {
                        continue;
                    }
                    let q = m.get(i, c).div_floor(m.get(r, c));
                    m.add_row(i, r, &-q);
                    if !m.get(i, c).is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if r < m.rows && !m.get(r, c).is_zero() {
                if m.get(r, c).is_negative() {
                    m.negate_row(r);
                }
                for i in 0..r {
                    let q = m.get(i, c).div_floor(m.get(r, c));
                    m.add_row(i, r, &-q);
                }
                r += 1;
            }
        }
        m.select_rows(&(0..r).collect::<Vec<_>>())
    }

    /// Greedy pairwise size reduction of the given rows among themselves.
    /// The row lattice is unchanged.
    pub fn size_reduce_rows(&mut self, rows: &[usize]) {
        let norm2 = |m: &IntMatrix, i: usize| -> BigInt {
            (0..m.cols).map(|j| m.get(i, j) * m.get(i, j)).sum()
        };
        let dot = |m: &IntMatrix, a: usize, b: usize| -> BigInt {
            (0..m.cols).map(|j| m.get(a, j) * m.get(b, j)).sum()
        };
        for _ in 0..100 {
            let mut changed = false;
            for &i in rows {
                for &j in rows {
                    if i == j {
                        continue;
                    }
                    let nj = norm2(self, j);
                    if nj.is_zero() {
                        continue;
                    }
                    let d = dot(self, i, j);
                    // nearest integer of d / nj
                    let two = BigInt::from(2);
                    let q = (&d * &two + &nj).div_floor(&(&nj * &two));
                    if q.is_zero() {
                        continue;
                    }
                    let before = norm2(self, i);
                    self.add_row(i, j, &-&q);
                    if norm2(self, i) < before {
                        changed = true;
                    } else {
                        self.add_row(i, j, &q);
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
}

/// Result of a Smith normal form computation `P·A·Q = D`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    /// Unimodular `rows × rows` left transform.
    pub p: IntMatrix,
    /// Unimodular `cols × cols` right transform.
    pub q: IntMatrix,
    /// Diagonal entries `s_1 | s_2 | …` (length `min(rows, cols)`), zeros after the rank.
    pub diag: Vec<BigInt>,
    pub rank: usize,
}

impl SnfResult {
    /// Nonzero invariant factors.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.diag[..self.rank]
    }

    /// The diagonal matrix `D` with the shape of the input.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.p.nrows(), self.q.nrows());
        for (i, s) in self.diag.iter().enumerate() {
            d.set(i, i, s.clone());
        }
        d
    }
}

/// Smith normal form by repeated division with remainder, pivoting on the
/// entry of smallest absolute value.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.nrows(), a.ncols());
    let mut d = a.clone();
    let mut p = IntMatrix::identity(m);
    let mut q = IntMatrix::identity(n);
    let mut rank = 0;
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let v = d.get(i, j);
                    if !v.is_zero() && best.map_or(true, |(bi, bj)| v.abs() < d.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            d.swap_rows(t, bi);
            p.swap_rows(t, bi);
            d.swap_cols(t, bj);
            q.swap_cols(t, bj);

            let mut clean = true;
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let f = -(d.get(i, t).div_floor(d.get(t, t)));
                d.add_row(i, t, &f);
                p.add_row(i, t, &f);
                clean &= d.get(i, t).is_zero();
            }
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let f = -(d.get(t, j).div_floor(d.get(t, t)));
                d.add_col(j, t, &f);
                q.add_col(j, t, &f);
                clean &= d.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let piv = d.get(t, t).clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    p.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_zero() {
            break;
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            p.negate_row(t);
        }
        rank += 1;
    }
    let diag = (0..m.min(n)).map(|i| d.get(i, i).clone()).collect();
    SnfResult { p, q, diag, rank }
}

/// Z-basis of `{v : A v = 0}` as the columns of the returned matrix.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let n = a.ncols();
    if a.nrows() == 0 {
        return IntMatrix::identity(n);
    }
    let snf = smith_normal_form(a);
    let idx: Vec<usize> = (snf.rank..n).collect();
    snf.q.select_cols(&idx)
}

/// Index of a sublattice of `Z^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(BigInt),
    /// The image has lower rank than the ambient lattice.
    Infinite,
}

impl LatticeIndex {
    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            LatticeIndex::Finite(v) => Some(v),
            LatticeIndex::Infinite => None,
        }
    }
}

/// Index of the lattice spanned by the columns of `a` in `Z^ambient_rank`
/// (`a` has `ambient_rank` rows).
pub fn lattice_index(a: &IntMatrix, ambient_rank: usize) -> LatticeIndex {
    assert_eq!(a.nrows(), ambient_rank, "row count must equal ambient rank");
    if ambient_rank == 0 {
        return LatticeIndex::Finite(BigInt::one());
    }
    if a.ncols() == 0 {
        return LatticeIndex::Infinite;
    }
    let snf = smith_normal_form(a);
    if snf.rank < ambient_rank {
        return LatticeIndex::Infinite;
    }
    LatticeIndex::Finite(snf.invariant_factors().iter().product())
}

/// 2-norm condition number of a real matrix; infinite when singular.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= max * 1e-15 || min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn binomial(n: usize, k: usize) -> usize {
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Exhaustive search is used below this many candidate subsets.
const EXHAUSTIVE_LIMIT: usize = 5000;

/// Chooses `n` columns of the rank-`n` matrix `f` forming a well-conditioned
/// square submatrix. Small instances are searched exhaustively; otherwise
/// column-pivoted Gram-Schmidt (on raw and on normalized columns) seeds a
/// single-swap descent on the condition number. Ties go to the
/// lexicographically smallest index set.
pub fn well_conditioned_columns(f: &IntMatrix, n: usize) -> Result<Vec<usize>> {
    let rank = f.rank();
    if rank < n || f.nrows() != n {
        return Err(Error::RankDeficient { rank, needed: n });
    }
    let fm = f.to_f64();
    let k = fm.ncols();
    let cond_of = |idx: &[usize]| -> f64 {
        let cols: Vec<_> = idx.iter().map(|&j| fm.column(j).into_owned()).collect();
        condition_number(&DMatrix::from_columns(&cols))
    };
    let better = |c: f64, cand: &[usize], best: &Option<(Vec<usize>, f64)>| -> bool {
        match best {
            None => c.is_finite(),
            Some((bc, bv)) => c < bv * (1.0 - 1e-9) || ((c - bv).abs() <= bv * 1e-9 && cand < bc.as_slice()),
        }
    };
    if binomial(k, n) <= EXHAUSTIVE_LIMIT {
        let mut best: Option<(Vec<usize>, f64)> = None;
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let c = cond_of(&idx);
            if better(c, &idx, &best) {
                best = Some((idx.clone(), c));
            }
            let mut i = n;
            while i > 0 && idx[i - 1] == k - n + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..n {
                idx[j] = idx[j - 1] + 1;
            }
        }
        return best.map(|b| b.0).ok_or(Error::RankDeficient { rank, needed: n });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for normalize in [false, true] {
        let mut chosen = pivoted_columns(&fm, n, normalize)?;
        let mut current = cond_of(&chosen);
        loop {
            let mut step: Option<(Vec<usize>, f64)> = None;
            for pos in 0..n {
                for j in 0..k {
                    if chosen.contains(&j) {
                        continue;
                    }
                    let mut cand = chosen.clone();
                    cand[pos] = j;
                    cand.sort_unstable();
                    let c = cond_of(&cand);
                    if c < current * (1.0 - 1e-9) && better(c, &cand, &step) {
                        step = Some((cand, c));
                    }
                }
            }
            match step {
                Some((c, v)) => {
                    chosen = c;
                    current = v;
                }
                None => break,
            }
        }
        if better(current, &chosen, &best) {
            best = Some((chosen, current));
        }
    }
    best.map(|b| b.0).ok_or(Error::RankDeficient { rank, needed: n })
}

fn pivoted_columns(fm: &DMatrix<f64>, n: usize, normalize: bool) -> Result<Vec<usize>> {
    let k = fm.ncols();
    let mut resid: Vec<nalgebra::DVector<f64>> = (0..k)
        .map(|j| {
            let c = fm.column(j).into_owned();
            if normalize { c.normalize() } else { c }
        })
        .collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best = None;
        let mut best_norm = 1e-12;
        for (j, r) in resid.iter().enumerate() {
            if chosen.contains(&j) {
                continue;
            }
            let nr = r.norm();
            if nr > best_norm * (1.0 + 1e-12) {
                best_norm = nr;
                best = Some(j);
            }
        }
        let j = best.ok_or(Error::RankDeficient { rank: chosen.len(), needed: n })?;
        chosen.push(j);
        let qv = &resid[j] / best_norm;
        for r in resid.iter_mut() {
            let c = qv.dot(r);
            *r -= &qv * c;
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}
