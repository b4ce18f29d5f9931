//! Truncated lowest-weight representations.
//!
//! A [`TruncatedRep`] keeps the levels `0..=N` of the irreducible quotient of
//! a Verma module, each with an orthogonal basis, together with the blocks of
//! every `L_n`, `|n| ≤ N`, between levels that survive the cut.
//!
//! Exact mode works over the rationals: the basis of a level comes from
//! Gram-Schmidt on the Gram matrix, so it is orthogonal with rational norms
//! (square roots never enter) and the adjoint relation reads
//! `D_{k-n} A_n = A_{-n}ᵀ D_k`. Float mode diagonalizes the Gram matrix and
//! rescales, so the basis is orthonormal and `A_{-n} = A_nᵀ`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{orthogonal_basis, DenseMatrix};
use crate::params::{CentralCharge, LowestWeight, ParamDisplay};
use crate::scalar::{Rational, RealScalar, Scalar};
use crate::verma::{GramMatrix, VermaModule};

/// Relative eigenvalue cutoff separating null directions in float mode.
pub const FLOAT_NULL_CUTOFF: f64 = 1e-13;

/// Default cap on the dimension of one level of a tensor product.
pub const DEFAULT_TENSOR_DIM_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Debug)]
pub struct RepOptions {
    /// Keep indefinite (non-unitary) quotients instead of refusing them.
    pub allow_indefinite: bool,
    /// See [`VermaModule::with_cocycle_denominator`]; 12 unless injecting faults.
    pub cocycle_denominator: i64,
}

impl Default for RepOptions {
    fn default() -> Self {
        Self {
            allow_indefinite: false,
            cocycle_denominator: 12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedRep<S> {
    c: S,
    h: S,
    n_max: usize,
    level_dims: Vec<usize>,
    norms: Vec<Vec<S>>,
    blocks: BTreeMap<(i64, usize), DenseMatrix<S>>,
    basis_transforms: Option<Vec<DenseMatrix<S>>>,
    unitary: bool,
}

/// A vector of the truncated space, one coordinate slice per level.
pub type GradedVector<S> = Vec<Vec<S>>;

impl TruncatedRep<Rational> {
    /// Exact truncated representation; refuses non-unitary `(c, h)`.
    pub fn exact(c: &CentralCharge<Rational>, h: &LowestWeight<Rational>, n_max: usize) -> Result<Self> {
        Self::exact_with(c, h, n_max, &RepOptions::default())
    }

    pub fn exact_with(
        c: &CentralCharge<Rational>,
        h: &LowestWeight<Rational>,
        n_max: usize,
        options: &RepOptions,
    ) -> Result<Self> {
        check_truncation(n_max)?;
        let module = VermaModule::new(c, h).with_cocycle_denominator(options.cocycle_denominator);
        let grams = module.gram_matrices(n_max);
        let bases: Vec<_> = grams.par_iter().map(|g| orthogonal_basis(&g.entries)).collect();
        let mut unitary = true;
        for (k, b) in bases.iter().enumerate() {
            if b.norms.iter().any(|n| *n < Rational::from_int(0)) {
                unitary = false;
                if !options.allow_indefinite {
                    return Err(non_unitary(c.value(), h.value(), k));
                }
            }
        }
        let transforms: Vec<_> = bases.iter().map(|b| b.vectors.clone()).collect();
        let norms: Vec<_> = bases.into_iter().map(|b| b.norms).collect();
        let extract = Self::gram_extract(&grams, &transforms, &norms);
        Ok(Self::assemble(&module, transforms, extract, norms, n_max, unitary))
    }
}

impl TruncatedRep<f64> {
    /// Float truncated representation with orthonormal bases from the
    /// spectral decomposition of each Gram matrix.
    pub fn float(c: &CentralCharge<f64>, h: &LowestWeight<f64>, n_max: usize) -> Result<Self> {
        Self::float_with(c, h, n_max, &RepOptions::default())
    }

    pub fn float_with(
        c: &CentralCharge<f64>,
        h: &LowestWeight<f64>,
        n_max: usize,
        options: &RepOptions,
    ) -> Result<Self> {
        check_truncation(n_max)?;
        let module = VermaModule::new(c, h).with_cocycle_denominator(options.cocycle_denominator);
        let grams = module.gram_matrices(n_max);
        let mut transforms = Vec::with_capacity(grams.len());
        let mut extract = Vec::with_capacity(grams.len());
        let mut norms = Vec::with_capacity(grams.len());
        let mut unitary = true;
        for g in &grams {
            // Identically zero rows are null outright and are kept out of the
            // eigensolver, which can return NaN on such matrices.
            let raw = g.entries.to_nalgebra();
            let live: Vec<usize> = (0..raw.nrows()).filter(|&i| raw.row(i).iter().any(|x| *x != 0.0)).collect();
            let p = live.len();
            // Unit-diagonal scaling: monomial norms span many orders of
            // magnitude and would otherwise swamp the relative null cutoff.
            let s: Vec<f64> = live
                .iter()
                .map(|&i| match raw[(i, i)].abs() {
                    d if d > 0.0 => d.sqrt().recip(),
                    _ => 1.0,
                })
                .collect();
            let eig = if p == 0 {
                SymmetricEigen {
                    eigenvectors: DMatrix::zeros(0, 0),
                    eigenvalues: nalgebra::DVector::zeros(0),
                }
            } else {
                SymmetricEigen::new(DMatrix::from_fn(p, p, |i, j| raw[(live[i], live[j])] * s[i] * s[j]))
            };
            if eig.eigenvalues.iter().chain(eig.eigenvectors.iter()).any(|x| !x.is_finite()) {
                return Err(Error::Eigen { level: g.level });
            }
            let scale = eig.eigenvalues.iter().map(|l| l.abs()).fold(1.0_f64, f64::max);
            let cutoff = FLOAT_NULL_CUTOFF * scale;
            let mut order: Vec<usize> = (0..p).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let kept: Vec<usize> = order.into_iter().filter(|&i| eig.eigenvalues[i].abs() > cutoff).collect();
            if kept.iter().any(|&i| eig.eigenvalues[i] < 0.0) {
                unitary = false;
                if !options.allow_indefinite {
                    return Err(non_unitary(c.value(), h.value(), g.level));
                }
            }
            // Coefficients vanish on dead rows, so scatter back by `live`.
            let full = raw.nrows();
            let mut b = DenseMatrix::from_fn(full, kept.len(), |_, _| 0.0);
            let mut e = DenseMatrix::from_fn(kept.len(), full, |_, _| 0.0);
            for (j, &i) in kept.iter().enumerate() {
                let root = eig.eigenvalues[i].abs().sqrt();
                for (r, &row) in live.iter().enumerate() {
                    let v = eig.eigenvectors[(r, i)];
                    b[(row, j)] = s[r] * v / root;
                    // Inverse read off the orthogonal eigenvectors: |Λ|^{1/2} Vᵀ S⁻¹.
                    // Forming Bᵀ G instead would cost a full factor of the condition number.
                    e[(j, row)] = root * v / s[r];
                }
            }
            norms.push(kept.iter().map(|&i| eig.eigenvalues[i].signum()).collect());
            transforms.push(b);
            extract.push(e);
        }
        Ok(Self::assemble(&module, transforms, extract, norms, n_max, unitary))
    }
}

fn check_truncation(n_max: usize) -> Result<()> {
    if n_max < 2 {
        return Err(Error::Precondition(format!("truncation level must be at least 2, got {n_max}")));
    }
    Ok(())
}

fn non_unitary<S: ParamDisplay>(c: &S, h: &S, level: usize) -> Error {
    Error::NonUnitary {
        c: c.render(),
        h: h.render(),
        level,
    }
}

impl<S: RealScalar> TruncatedRep<S> {
    /// Row i of `extract[k]` maps monomial coordinates x to ⟨e_i, x⟩ / ⟨e_i, e_i⟩.
    fn gram_extract(grams: &[GramMatrix<S>], transforms: &[DenseMatrix<S>], norms: &[Vec<S>]) -> Vec<DenseMatrix<S>> {
        transforms
            .iter()
            .zip(grams)
            .zip(norms)
            .map(|((b, g), d)| {
                let bt_g = b.transpose().matmul(&g.entries);
                DenseMatrix::from_fn(bt_g.rows(), bt_g.cols(), |i, j| bt_g[(i, j)].clone() / d[i].clone())
            })
            .collect()
    }

    /// `extract[k]` is a left inverse of `transforms[k]` that annihilates the
    /// null directions of level `k`.
    fn assemble(
        module: &VermaModule<S>,
        transforms: Vec<DenseMatrix<S>>,
        extract: Vec<DenseMatrix<S>>,
        norms: Vec<Vec<S>>,
        n_max: usize,
        unitary: bool,
    ) -> Self {
        let top = n_max as i64;
        let keys: Vec<(i64, usize)> = (-top..=top)
            .flat_map(|n| (0..=n_max).map(move |k| (n, k)))
            .filter(|&(n, k)| (0..=top).contains(&(k as i64 - n)))
            .collect();
        let blocks: BTreeMap<_, _> = keys
            .par_iter()
            .map(|&(n, k)| {
                let target = (k as i64 - n) as usize;
                let action = module.action_matrix(n, k);
                let block = extract[target].matmul(&action.matmul(&transforms[k]));
                ((n, k), block)
            })
            .collect();
        Self {
            c: module.central_charge().clone(),
            h: module.lowest_weight().clone(),
            n_max,
            level_dims: norms.iter().map(Vec::len).collect(),
            norms,
            blocks,
            basis_transforms: Some(transforms),
            unitary,
        }
    }

    pub fn central_charge(&self) -> &S {
        &self.c
    }

    pub fn lowest_weight(&self) -> &S {
        &self.h
    }

    /// Truncation level `N`.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn level_dims(&self) -> &[usize] {
        &self.level_dims
    }

    pub fn dim(&self, level: usize) -> usize {
        self.level_dims.get(level).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.level_dims.iter().sum()
    }

    /// `⟨e_i, e_i⟩` for the basis of `level` (all ones in float mode).
    pub fn norms(&self, level: usize) -> &[S] {
        &self.norms[level]
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// Block of `L_n` from `level` to `level − n`, when both survive the cut.
    pub fn block(&self, n: i64, level: usize) -> Option<&DenseMatrix<S>> {
        self.blocks.get(&(n, level))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(i64, usize), &DenseMatrix<S>)> {
        self.blocks.iter()
    }

    /// Monomial coordinates of the basis of `level` (columns), for
    /// representations built directly from a Verma module.
    pub fn basis_transform(&self, level: usize) -> Option<&DenseMatrix<S>> {
        self.basis_transforms.as_ref().map(|t| &t[level])
    }

    /// Energy `h + k` of `level`.
    pub fn energy(&self, level: usize) -> S {
        self.h.clone() + S::from_int(level as i64)
    }

    pub fn zero_vector(&self) -> GradedVector<S> {
        self.level_dims.iter().map(|&d| vec![S::zero(); d]).collect()
    }

    /// The lowest-weight vector (first basis vector of level 0).
    pub fn lowest_vector(&self) -> GradedVector<S> {
        let mut v = self.zero_vector();
        v[0][0] = S::one();
        v
    }

    /// `L_n v`, dropping components pushed outside `0..=N`.
    pub fn apply(&self, n: i64, v: &GradedVector<S>) -> GradedVector<S> {
        let mut out = self.zero_vector();
        for (k, comp) in v.iter().enumerate() {
            if comp.iter().all(|x| x.is_zero()) {
                continue;
            }
            if let Some(b) = self.block(n, k) {
                let target = (k as i64 - n) as usize;
                let image = b.mul_vec(comp);
                for (o, x) in out[target].iter_mut().zip(image) {
                    *o = o.clone() + x;
                }
            }
        }
        out
    }

    /// `⟨u, v⟩` in the representation's inner product.
    pub fn inner(&self, u: &GradedVector<S>, v: &GradedVector<S>) -> S {
        let mut acc = S::zero();
        for (k, (a, b)) in u.iter().zip(v).enumerate() {
            for ((x, y), d) in a.iter().zip(b).zip(&self.norms[k]) {
                acc = acc + x.conj() * y.clone() * d.clone();
            }
        }
        acc
    }

    pub fn safe_window(&self, word: &[i64]) -> SafeWindow {
        SafeWindow::for_word(self.n_max, word)
    }

    /// `(L_m L_n − L_n L_m − (m−n)L_{m+n} − (c/12)(m³−m)δ_{m+n,0})` on `level`,
    /// or `None` when the level is outside the safe window of either ordering.
    pub fn relation_residual(&self, m: i64, n: i64, level: usize) -> Option<DenseMatrix<S>> {
        let window = SafeWindow::for_word(self.n_max, &[n, m]).intersect(&SafeWindow::for_word(self.n_max, &[m, n]));
        if !window.contains(level) {
            return None;
        }
        let mid_n = (level as i64 - n) as usize;
        let mid_m = (level as i64 - m) as usize;
        let mn = self.block(m, mid_n)?.matmul(self.block(n, level)?);
        let nm = self.block(n, mid_m)?.matmul(self.block(m, level)?);
        let sum = self.block(m + n, level)?;
        let mut res = mn.sub(&nm).sub(&sum.scale(&S::from_int(m - n)));
        if m + n == 0 {
            let central = self.c.clone() * S::from_int(m * m * m - m) / S::from_int(12);
            for i in 0..res.rows() {
                res[(i, i)] = res[(i, i)].clone() - central.clone();
            }
        }
        Some(res)
    }

    /// Checks every relation with `|m|, |n| ≤ max_mode` on every safe level.
    pub fn relation_summary(&self, max_mode: i64) -> RelationSummary {
        let mut summary = RelationSummary::default();
        for m in -max_mode..=max_mode {
            for n in -max_mode..=max_mode {
                for level in 0..=self.n_max {
                    if let Some(res) = self.relation_residual(m, n, level) {
                        summary.windows_checked += 1;
                        summary.max_residual = summary.max_residual.max(res.max_modulus());
                        if !res.is_zero() {
                            summary.nonzero_windows += 1;
                        }
                    }
                }
            }
        }
        summary
    }

    /// `D_{k−n} A_n(k) − A_{−n}(k−n)† D_k` (zero when the adjoint relation holds).
    pub fn hermiticity_residual(&self, n: i64, level: usize) -> Option<DenseMatrix<S>> {
        let target = usize::try_from(level as i64 - n).ok()?;
        let a = self.block(n, level)?;
        let b = self.block(-n, target)?;
        let lhs = DenseMatrix::diagonal(&self.norms[target]).matmul(a);
        let rhs = b.adjoint().matmul(&DenseMatrix::diagonal(&self.norms[level]));
        Some(lhs.sub(&rhs))
    }

    /// Largest hermiticity residual over all blocks, and whether all are exactly zero.
    pub fn hermiticity_summary(&self) -> (f64, bool) {
        let mut worst = 0.0_f64;
        let mut exact = true;
        for &(n, k) in self.blocks.keys() {
            if let Some(r) = self.hermiticity_residual(n, k) {
                worst = worst.max(r.max_modulus());
                exact &= r.is_zero();
            }
        }
        (worst, exact)
    }

    /// `2(⟨Ω, [L₂, L₋₂]Ω⟩/⟨Ω,Ω⟩ − 4h)`, with `h` read off the `L₀` block.
    pub fn measure_central_charge(&self) -> Result<S> {
        let missing = || Error::Precondition("central charge needs levels 0 and 2".into());
        let l0 = self.block(0, 0).ok_or_else(missing)?;
        let up = self.block(-2, 0).ok_or_else(missing)?;
        let down = self.block(2, 2).ok_or_else(missing)?;
        // L₂Ω = 0, so only L₂L₋₂ contributes.
        let value = down.matmul(up)[(0, 0)].clone();
        let h = l0[(0, 0)].clone();
        Ok(S::from_int(2) * (value - S::from_int(4) * h))
    }

    /// The graded tensor product cut at total level `n_max`, with
    /// `L_n = L_n ⊗ 1 + 1 ⊗ L_n`.
    pub fn tensor(a: &Self, b: &Self, n_max: usize, dim_cap: usize) -> Result<Self> {
        check_truncation(n_max)?;
        if a.n_max < n_max || b.n_max < n_max {
            return Err(Error::Precondition(format!(
                "factors truncated at {} and {} cannot give a product truncated at {n_max}",
                a.n_max, b.n_max
            )));
        }
        // Level k basis: (i, α, β) with α in level i of a and β in level k−i of b.
        let mut index: Vec<Vec<(usize, usize, usize)>> = Vec::with_capacity(n_max + 1);
        let mut norms = Vec::with_capacity(n_max + 1);
        for k in 0..=n_max {
            let mut idx = Vec::new();
            let mut nk = Vec::new();
            for i in 0..=k {
                for (alpha, na) in a.norms[i].iter().enumerate() {
                    for (beta, nb) in b.norms[k - i].iter().enumerate() {
                        idx.push((i, alpha, beta));
                        nk.push(na.clone() * nb.clone());
                    }
                }
            }
            if idx.len() > dim_cap {
                return Err(Error::DimensionCap {
                    level: k,
                    dim: idx.len(),
                    cap: dim_cap,
                });
            }
            index.push(idx);
            norms.push(nk);
        }
        let lookup: Vec<BTreeMap<(usize, usize, usize), usize>> = index
            .iter()
            .map(|idx| idx.iter().enumerate().map(|(p, &key)| (key, p)).collect())
            .collect();
        let top = n_max as i64;
        let mut blocks = BTreeMap::new();
        for n in -top..=top {
            for k in 0..=n_max {
                let target = k as i64 - n;
                if !(0..=top).contains(&target) {
                    continue;
                }
                let target = target as usize;
                let mut m = DenseMatrix::<S>::zeros(index[target].len(), index[k].len());
                for (col, &(i, alpha, beta)) in index[k].iter().enumerate() {
                    let j = k - i;
                    if let Some(ba) = a.block(n, i) {
                        let ti = (i as i64 - n) as usize;
                        for alpha2 in 0..ba.rows() {
                            let x = &ba[(alpha2, alpha)];
                            if !x.is_zero() {
                                let row = lookup[target][&(ti, alpha2, beta)];
                                m[(row, col)] = m[(row, col)].clone() + x.clone();
                            }
                        }
                    }
                    if let Some(bb) = b.block(n, j) {
                        for beta2 in 0..bb.rows() {
                            let x = &bb[(beta2, beta)];
                            if !x.is_zero() {
                                let row = lookup[target][&(i, alpha, beta2)];
                                m[(row, col)] = m[(row, col)].clone() + x.clone();
                            }
                        }
                    }
                }
                blocks.insert((n, k), m);
            }
        }
        Ok(Self {
            c: a.c.clone() + b.c.clone(),
            h: a.h.clone() + b.h.clone(),
            n_max,
            level_dims: norms.iter().map(Vec::len).collect(),
            norms,
            blocks,
            basis_transforms: None,
            unitary: a.unitary && b.unitary,
        })
    }

    /// Rebuilds a representation from serialized parts (see [`crate::format`]).
    pub fn from_parts(
        c: S,
        h: S,
        n_max: usize,
        norms: Vec<Vec<S>>,
        blocks: BTreeMap<(i64, usize), DenseMatrix<S>>,
        unitary: bool,
    ) -> Self {
        Self {
            c,
            h,
            n_max,
            level_dims: norms.iter().map(Vec::len).collect(),
            norms,
            blocks,
            basis_transforms: None,
            unitary,
        }
    }
}

/// Outcome of a sweep over Virasoro relations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RelationSummary {
    pub windows_checked: usize,
    pub nonzero_windows: usize,
    pub max_residual: f64,
}

/// Levels on which a sequence of operator applications never leaves `0..=N`.
///
/// Each step is a set of modes that may act at that point; a level is
/// admissible iff every path through the steps keeps the level in range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafeWindow {
    n_max: usize,
    steps: Vec<Vec<i64>>,
    admissible: Vec<usize>,
}

impl SafeWindow {
    /// Window for `L_{word[last]} ⋯ L_{word[0]}` (first element acts first).
    pub fn for_word(n_max: usize, word: &[i64]) -> Self {
        let steps: Vec<Vec<i64>> = word.iter().map(|&n| vec![n]).collect();
        Self::for_steps(n_max, &steps)
    }

    pub fn for_steps(n_max: usize, steps: &[Vec<i64>]) -> Self {
        let top = n_max as i64;
        let admissible = (0..=n_max)
            .filter(|&k| {
                let mut reachable = vec![k as i64];
                for step in steps {
                    let mut next = Vec::new();
                    for &lvl in &reachable {
                        for &n in step {
                            let t = lvl - n;
                            if !(0..=top).contains(&t) {
                                return false;
                            }
                            next.push(t);
                        }
                    }
                    next.sort_unstable();
                    next.dedup();
                    reachable = next;
                }
                true
            })
            .collect();
        Self {
            n_max,
            steps: steps.to_vec(),
            admissible,
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Self {
            n_max: self.n_max.min(other.n_max),
            steps,
            admissible: self
                .admissible
                .iter()
                .copied()
                .filter(|k| other.admissible.contains(k))
                .collect(),
        }
    }

    pub fn contains(&self, level: usize) -> bool {
        self.admissible.contains(&level)
    }

    pub fn levels(&self) -> &[usize] {
        &self.admissible
    }

    pub fn is_empty(&self) -> bool {
        self.admissible.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_traits::Zero;

    fn exact(c: Rational, h: Rational, n: usize) -> TruncatedRep<Rational> {
        TruncatedRep::exact(&CentralCharge::new(c).unwrap(), &LowestWeight::new(h).unwrap(), n).unwrap()
    }

    #[test]
    fn safe_window_for_single_modes() {
        let w = SafeWindow::for_word(4, &[2]);
        assert_eq!(w.levels(), &[2, 3, 4]);
        let w = SafeWindow::for_word(4, &[-3, 3]);
        assert_eq!(w.levels(), &[0, 1]);
        let w = SafeWindow::for_steps(6, &[vec![-1, 0, 1], vec![-1, 1]]);
        assert_eq!(w.levels(), &[2, 3, 4]);
    }

    #[test]
    fn l0_is_graded() {
        let (c, h) = (rational(1, 2), rational(1, 2));
        let rep = exact(c, h.clone(), 5);
        for k in 0..=5 {
            let b = rep.block(0, k).unwrap();
            let expected = DenseMatrix::<Rational>::identity(rep.dim(k)).scale(&(h.clone() + rational(k as i64, 1)));
            assert_eq!(*b, expected);
        }
    }

    #[test]
    fn vacuum_matrix_element() {
        let c = rational(7, 10);
        let rep = exact(c.clone(), rational(0, 1), 4);
        assert_eq!(rep.level_dims()[1], 0);
        let omega = rep.lowest_vector();
        let v = rep.apply(-2, &omega);
        let back = rep.apply(2, &v);
        assert_eq!(rep.inner(&omega, &back), c / rational(2, 1));
    }

    #[test]
    fn rejects_small_truncation_and_non_unitary() {
        let c = CentralCharge::new(rational(1, 2)).unwrap();
        assert!(TruncatedRep::exact(&c, &LowestWeight::vacuum(), 1).is_err());
        // h = 1/4 is not in the c = 1/2 Kac table; its Gram form goes negative.
        let err = TruncatedRep::exact(&c, &LowestWeight::new(rational(1, 4)).unwrap(), 6).unwrap_err();
        assert!(matches!(err, Error::NonUnitary { .. }), "{err}");
    }

    #[test]
    fn exact_relations_and_adjoints() {
        let rep = exact(rational(2, 1), rational(1, 3), 6);
        let s = rep.relation_summary(3);
        assert!(s.windows_checked > 0);
        assert_eq!(s.nonzero_windows, 0);
        assert_eq!(rep.hermiticity_summary(), (0.0, true));
    }

    #[test]
    fn float_rep_is_orthonormal_and_hermitian() {
        let rep = TruncatedRep::float(&CentralCharge::new(0.5).unwrap(), &LowestWeight::new(0.0).unwrap(), 6).unwrap();
        assert!(rep.norms(3).iter().all(|&n| n == 1.0));
        let (worst, _) = rep.hermiticity_summary();
        assert!(worst < 1e-10, "{worst}");
        assert!(rep.relation_summary(3).max_residual < 1e-10);
    }

    #[test]
    fn fault_hook_breaks_relations() {
        let opts = RepOptions {
            cocycle_denominator: 13,
            ..RepOptions::default()
        };
        let rep = TruncatedRep::exact_with(
            &CentralCharge::new(rational(1, 2)).unwrap(),
            &LowestWeight::vacuum(),
            4,
            &opts,
        )
        .unwrap();
        assert!(rep.relation_summary(3).nonzero_windows > 0);
    }

    #[test]
    fn tensor_of_vacua() {
        let a = exact(rational(1, 2), rational(0, 1), 4);
        let t = TruncatedRep::tensor(&a, &a, 4, DEFAULT_TENSOR_DIM_CAP).unwrap();
        assert_eq!(t.level_dims()[1], 0);
        assert!(t.lowest_weight().is_zero());
        assert_eq!(t.measure_central_charge().unwrap(), rational(1, 1));
        assert!(TruncatedRep::tensor(&a, &a, 4, 2).is_err());
    }
}
