//! Small dense matrices over any [`Scalar`] field.
//!
//! Exact routines (row reduction, kernels, determinants, orthogonal bases of
//! symmetric forms) work for every field; spectral routines are `f64` only and
//! go through `nalgebra`.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &S> {
        self.data.iter()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> DenseMatrix<T> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.clone() * b.clone();
                    let slot = &mut out.data[i * other.cols + j];
                    *slot = slot.clone() + prod;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() - b.clone())
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Largest entry modulus (0 for an empty matrix).
    pub fn max_modulus(&self) -> f64 {
        self.data.iter().map(Scalar::modulus).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Reduced row echelon form by Gauss-Jordan elimination.
    ///
    /// Pivots are chosen as the first nonzero entry, which is only meaningful
    /// for exact fields; float callers should use the SVD routines instead.
    pub fn rref(&self) -> Rref<S> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = S::one() / m[(row, col)].clone();
            for c in col..m.cols {
                m[(row, c)] = m[(row, c)].clone() * inv.clone();
            }
            for r in 0..m.rows {
                if r == row || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for c in col..m.cols {
                    let delta = factor.clone() * m[(row, c)].clone();
                    m[(r, c)] = m[(r, c)].clone() - delta;
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right kernel `{x : A x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<S>> {
        let Rref { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -matrix[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn determinant(&self) -> S {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let mut det = S::one();
        for col in 0..m.cols {
            let Some(p) = (col..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                return S::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det = det * pivot.clone();
            for r in col + 1..m.rows {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone() / pivot.clone();
                for c in col..m.cols {
                    let delta = factor.clone() * m[(col, c)].clone();
                    m[(r, c)] = m[(r, c)].clone() - delta;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

use num_traits::Zero;

impl<S> Index<(usize, usize)> for DenseMatrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for DenseMatrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

#[derive(Clone, Debug)]
pub struct Rref<S> {
    pub matrix: DenseMatrix<S>,
    pub pivots: Vec<usize>,
}

/// Orthogonal basis of the non-degenerate quotient of a symmetric bilinear form.
///
/// `vectors` holds one basis vector per column (coordinates in the original
/// basis); `norms[j]` is the form evaluated on column `j` and is never zero.
#[derive(Clone, Debug)]
pub struct OrthogonalBasis<S> {
    pub vectors: DenseMatrix<S>,
    pub norms: Vec<S>,
}

/// Gram-Schmidt for a real symmetric form over an exact field.
///
/// Candidates are processed in the original basis order. When every remaining
/// candidate is isotropic but two of them pair nontrivially, their sum is used
/// (the indefinite case). Candidates orthogonal to everything are radical
/// vectors and are dropped, so the result spans a complement of the kernel.
pub fn orthogonal_basis<S: Scalar>(gram: &DenseMatrix<S>) -> OrthogonalBasis<S> {
    assert!(gram.is_square(), "Gram matrix must be square");
    let n = gram.rows();
    let form = |x: &[S], y: &[S]| -> S {
        let gy = gram.mul_vec(y);
        x.iter()
            .zip(&gy)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .fold(S::zero(), |acc, (a, b)| acc + a.conj() * b.clone())
    };
    let mut candidates: Vec<Vec<S>> = (0..n)
        .map(|i| {
            let mut v = vec![S::zero(); n];
            v[i] = S::one();
            v
        })
        .collect();
    let mut basis: Vec<Vec<S>> = Vec::new();
    let mut norms: Vec<S> = Vec::new();
    loop {
        let chosen = match candidates.iter().position(|x| !form(x, x).is_zero()) {
            Some(i) => candidates.remove(i),
            None => {
                let mut pair = None;
                'search: for i in 0..candidates.len() {
                    for j in i + 1..candidates.len() {
                        if !form(&candidates[i], &candidates[j]).is_zero() {
                            pair = Some((i, j));
                            break 'search;
                        }
                    }
                }
                let Some((i, j)) = pair else { break };
                let sum: Vec<S> = candidates[i]
                    .iter()
                    .zip(&candidates[j])
                    .map(|(a, b)| a.clone() + b.clone())
                    .collect();
                // B(x+y, x+y) = 2 B(x, y) for a real symmetric form.
                debug_assert!(!form(&sum, &sum).is_zero());
                candidates.remove(j);
                sum
            }
        };
        let norm = form(&chosen, &chosen);
        for cand in candidates.iter_mut() {
            let coeff = form(&chosen, cand) / norm.clone();
            if coeff.is_zero() {
                continue;
            }
            for (c, b) in cand.iter_mut().zip(&chosen) {
                *c = c.clone() - coeff.clone() * b.clone();
            }
        }
        basis.push(chosen);
        norms.push(norm);
    }
    let r = basis.len();
    let vectors = DenseMatrix::from_fn(n, r, |i, j| basis[j][i].clone());
    OrthogonalBasis { vectors, norms }
}

impl DenseMatrix<f64> {
    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Vec::new();
        }
        let mut sv: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Operator (spectral) norm; 0 for an empty block.
    pub fn operator_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Numerical rank and kernel basis from the SVD.
    ///
    /// A singular value counts as zero when it is at most
    /// `tol * max(1, largest singular value)`.
    pub fn numerical_kernel(&self, tol: f64) -> (usize, Vec<Vec<f64>>) {
        if self.rows == 0 || self.cols == 0 {
            return (0, (0..self.cols).map(|i| unit(self.cols, i)).collect());
        }
        // Pad with zero rows so the SVD returns a complete V.
        let n = self.cols;
        let mut a = DMatrix::<f64>::zeros(self.rows.max(n), n);
        a.view_mut((0, 0), (self.rows, n)).copy_from(&self.to_nalgebra());
        let svd = a.svd(false, true);
        let v_t = svd.v_t.expect("requested V");
        let largest = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
        let cutoff = tol * largest.max(1.0);
        let mut rank = 0;
        let mut kernel = Vec::new();
        for (i, &sigma) in svd.singular_values.iter().enumerate() {
            if sigma > cutoff {
                rank += 1;
            } else {
                kernel.push(v_t.row(i).iter().copied().collect());
            }
        }
        (rank, kernel)
    }
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}
