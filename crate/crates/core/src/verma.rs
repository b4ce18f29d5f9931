//! Verma modules of the Virasoro algebra in the partition (PBW) basis.
//!
//! `L_n` acts on a monomial `L_{-λ₁}⋯L_{-λ_k}Φ` by commuting it to the right
//! with `[L_n, L_m] = (n − m)L_{n+m} + (c/12)(n³ − n)δ_{n+m,0}` until it either
//! reaches `Φ` (where `L_nΦ = 0` for `n > 0` and `L_0Φ = hΦ`) or sits in
//! front of a partition it extends.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::params::{CentralCharge, LowestWeight};
use crate::partition::{enumerate_partitions, Partition};
use crate::scalar::RealScalar;

type Terms<S> = BTreeMap<Partition, S>;

/// An element of one graded piece of the Verma module.
#[derive(Clone, Debug, PartialEq)]
pub struct VermaVector<S> {
    level: usize,
    coeffs: Terms<S>,
}

impl<S: RealScalar> VermaVector<S> {
    pub fn zero(level: usize) -> Self {
        Self {
            level,
            coeffs: Terms::new(),
        }
    }

    pub fn monomial(partition: Partition) -> Self {
        Self::from_terms(partition.weight(), [(partition, S::one())])
    }

    /// The lowest-weight vector `Φ`.
    pub fn lowest() -> Self {
        Self::monomial(Partition::empty())
    }

    /// Builds a vector from `(partition, coefficient)` pairs, all of weight `level`.
    pub fn from_terms(level: usize, terms: impl IntoIterator<Item = (Partition, S)>) -> Self {
        let mut v = Self::zero(level);
        for (p, c) in terms {
            assert_eq!(p.weight(), level, "partition {p} is not at level {level}");
            v.add_term(p, c);
        }
        v
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, p: &Partition) -> S {
        self.coeffs.get(p).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &S)> {
        self.coeffs.iter()
    }

    /// Coordinates in the reverse-lexicographic monomial basis of its level.
    pub fn to_coordinates(&self) -> Vec<S> {
        enumerate_partitions(self.level)
            .iter()
            .map(|p| self.coefficient(p))
            .collect()
    }

    pub fn from_coordinates(level: usize, coords: &[S]) -> Self {
        let basis = enumerate_partitions(level);
        assert_eq!(basis.len(), coords.len());
        Self::from_terms(level, basis.into_iter().zip(coords.iter().cloned()))
    }

    pub fn scaled(&self, s: &S) -> Self {
        let mut out = Self::zero(self.level);
        for (p, c) in &self.coeffs {
            out.add_term(p.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(self.level, other.level, "adding vectors of different levels");
        let mut out = self.clone();
        for (p, c) in &other.coeffs {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(&-S::one()))
    }

    fn add_term(&mut self, p: Partition, c: S) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(p).or_insert_with(S::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            // Remove exact cancellations so the zero vector has empty support.
            let key = self
                .coeffs
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.coeffs.remove(&k);
            }
        }
    }
}

/// Gram (Shapovalov) matrix at one level, in the reverse-lexicographic
/// monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix<S> {
    pub level: usize,
    pub c: S,
    pub h: S,
    pub basis: Vec<Partition>,
    pub entries: DenseMatrix<S>,
}

/// Rank of one Gram matrix and a basis of its kernel (the null vectors).
#[derive(Clone, Debug)]
pub struct LevelRank<S> {
    pub level: usize,
    pub rank: usize,
    pub null_basis: Vec<VermaVector<S>>,
    /// Singular-value cutoff used in float mode; `None` when exact.
    pub tolerance: Option<f64>,
}

/// Relative singular-value cutoff for float-mode ranks.
pub const FLOAT_RANK_TOLERANCE: f64 = 1e-10;

/// The Verma module `M(c, h)` with memoized normal ordering.
pub struct VermaModule<S> {
    c: S,
    h: S,
    cocycle_denominator: i64,
    cache: Mutex<HashMap<(i64, Partition), Terms<S>>>,
}

impl<S: RealScalar> VermaModule<S> {
    pub fn new(c: &CentralCharge<S>, h: &LowestWeight<S>) -> Self {
        Self {
            c: c.value().clone(),
            h: h.value().clone(),
            cocycle_denominator: 12,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Replaces the `12` in the central term `(c/12)(n³ − n)`.
    ///
    /// Only meant for fault-injection tests: with anything but 12 the
    /// resulting matrices no longer satisfy the Virasoro relations.
    #[doc(hidden)]
    pub fn with_cocycle_denominator(mut self, denominator: i64) -> Self {
        assert!(denominator != 0);
        self.cocycle_denominator = denominator;
        self
    }

    pub fn central_charge(&self) -> &S {
        &self.c
    }

    pub fn lowest_weight(&self) -> &S {
        &self.h
    }

    /// `L_n · v`. A result below level 0 is the zero vector (reported at level 0).
    pub fn act(&self, n: i64, v: &VermaVector<S>) -> VermaVector<S> {
        let target = v.level as i64 - n;
        if target < 0 {
            return VermaVector::zero(0);
        }
        let mut out = VermaVector::zero(target as usize);
        for (p, coeff) in v.terms() {
            for (q, d) in self.act_monomial(n, p) {
                out.add_term(q, coeff.clone() * d);
            }
        }
        out
    }

    /// Applies `L_{word[0]}` first, then `L_{word[1]}`, and so on.
    pub fn act_word(&self, word: &[i64], v: &VermaVector<S>) -> VermaVector<S> {
        word.iter().fold(v.clone(), |acc, &n| self.act(n, &acc))
    }

    fn central_term(&self, n: i64) -> S {
        self.c.clone() * S::from_int(n * n * n - n) / S::from_int(self.cocycle_denominator)
    }

    fn act_monomial(&self, n: i64, p: &Partition) -> Terms<S> {
        let weight = p.weight() as i64;
        if n > weight {
            return Terms::new();
        }
        let key = (n, p.clone());
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(&key) {
            return hit.clone();
        }
        let out = self.normal_order(n, p);
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(key, out.clone());
        out
    }

    fn normal_order(&self, n: i64, p: &Partition) -> Terms<S> {
        let mut out = Terms::new();
        let weight = p.weight() as i64;
        if n == 0 {
            push(&mut out, p.clone(), self.h.clone() + S::from_int(weight));
            return out;
        }
        let Some((&first, rest)) = p.parts().split_first() else {
            if n < 0 {
                push(&mut out, Partition::from_sorted(vec![(-n) as u32]), S::one());
            }
            return out;
        };
        let rest = Partition::from_sorted(rest.to_vec());
        let p0 = i64::from(first);
        if n < 0 && -n >= p0 {
            push(&mut out, p.with_leading((-n) as u32), S::one());
            return out;
        }
        // L_n L_{-p0} X = L_{-p0} L_n X + (n + p0) L_{n-p0} X + δ_{n,p0} (c/12)(n³ − n) X
        for (q, d) in self.act_monomial(n, &rest) {
            for (r, e) in self.act_monomial(-p0, &q) {
                push(&mut out, r, d.clone() * e);
            }
        }
        let bracket = S::from_int(n + p0);
        if !bracket.is_zero() {
            for (q, d) in self.act_monomial(n - p0, &rest) {
                push(&mut out, q, bracket.clone() * d);
            }
        }
        if n == p0 {
            push(&mut out, rest, self.central_term(n));
        }
        out
    }

    /// Matrix of `L_n` from level `k` to level `k − n` in monomial bases
    /// (columns indexed by partitions of `k`).
    pub fn action_matrix(&self, n: i64, k: usize) -> DenseMatrix<S> {
        let target = k as i64 - n;
        let cols = enumerate_partitions(k);
        if target < 0 {
            return DenseMatrix::zeros(0, cols.len());
        }
        let rows = enumerate_partitions(target as usize);
        let index: HashMap<&Partition, usize> = rows.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut m = DenseMatrix::zeros(rows.len(), cols.len());
        for (j, p) in cols.iter().enumerate() {
            for (q, d) in self.act_monomial(n, p) {
                m[(index[&q], j)] = d;
            }
        }
        m
    }

    /// `⟨m_λ, m_μ⟩` computed as the `Φ`-coefficient of
    /// `L_{λ_r}⋯L_{λ₁} m_μ`.
    pub fn inner_product(&self, lambda: &Partition, mu: &Partition) -> S {
        if lambda.weight() != mu.weight() {
            return S::zero();
        }
        let word: Vec<i64> = lambda.parts().iter().map(|&x| i64::from(x)).collect();
        self.act_word(&word, &VermaVector::monomial(mu.clone()))
            .coefficient(&Partition::empty())
    }

    /// Gram matrices for every level `0..=max_level`.
    ///
    /// Uses `⟨L_{-λ₁} m_{λ'}, m_μ⟩ = ⟨m_{λ'}, L_{λ₁} m_μ⟩` so each level reuses
    /// the one `λ₁` below it.
    pub fn gram_matrices(&self, max_level: usize) -> Vec<GramMatrix<S>> {
        let mut out: Vec<GramMatrix<S>> = Vec::with_capacity(max_level + 1);
        for k in 0..=max_level {
            let basis = enumerate_partitions(k);
            let mut entries = DenseMatrix::zeros(basis.len(), basis.len());
            if k == 0 {
                entries[(0, 0)] = S::one();
            }
            for (i, lambda) in basis.iter().enumerate().filter(|_| k > 0) {
                let first = lambda.parts()[0];
                let tail = Partition::from_sorted(lambda.parts()[1..].to_vec());
                let lower = &out[k - first as usize];
                let tail_idx = lower.basis.iter().position(|p| *p == tail).expect("tail partition");
                for (j, mu) in basis.iter().enumerate().skip(i) {
                    let mut acc = S::zero();
                    for (q, d) in self.act_monomial(i64::from(first), mu) {
                        let q_idx = lower.basis.iter().position(|p| *p == q).expect("image partition");
                        acc = acc + d * lower.entries[(tail_idx, q_idx)].clone();
                    }
                    entries[(i, j)] = acc.clone();
                    entries[(j, i)] = acc;
                }
            }
            out.push(GramMatrix {
                level: k,
                c: self.c.clone(),
                h: self.h.clone(),
                basis,
                entries,
            });
        }
        out
    }

    pub fn gram_matrix(&self, k: usize) -> GramMatrix<S> {
        self.gram_matrices(k).pop().expect("at least level 0")
    }

    /// Rank of the level-`k` Gram matrix and its null vectors.
    pub fn level_rank(&self, k: usize) -> LevelRank<S> {
        rank_of(&self.gram_matrix(k))
    }
}

/// Exact rank in exact fields; SVD with [`FLOAT_RANK_TOLERANCE`] otherwise.
pub fn rank_of<S: RealScalar>(gram: &GramMatrix<S>) -> LevelRank<S> {
    let k = gram.level;
    let (rank, kernel, tolerance) = if S::EXACT {
        let rank = gram.entries.rank();
        (rank, gram.entries.kernel(), None)
    } else {
        let f = gram.entries.map(RealScalar::as_f64);
        let (rank, kernel) = f.numerical_kernel(FLOAT_RANK_TOLERANCE);
        let kernel = kernel
            .into_iter()
            .map(|v| v.into_iter().map(S::from_f64_lossy).collect())
            .collect();
        (rank, kernel, Some(FLOAT_RANK_TOLERANCE))
    };
    LevelRank {
        level: k,
        rank,
        null_basis: kernel
            .iter()
            .map(|v| VermaVector::from_coordinates(k, v))
            .collect(),
        tolerance,
    }
}

fn push<S: RealScalar>(terms: &mut Terms<S>, p: Partition, c: S) {
    if c.is_zero() {
        return;
    }
    let slot = terms.entry(p.clone()).or_insert_with(S::zero);
    *slot = slot.clone() + c;
    if slot.is_zero() {
        terms.remove(&p);
    }
}

/// Validates that `k` is within a configured maximum level.
pub fn check_level(k: usize, max_level: usize) -> Result<()> {
    if k > max_level {
        return Err(Error::Precondition(format!(
            "level {k} exceeds the configured maximum {max_level}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};

    fn module(c: Rational, h: Rational) -> VermaModule<Rational> {
        VermaModule::new(&CentralCharge::new(c).unwrap(), &LowestWeight::new(h).unwrap())
    }

    fn m(parts: &[u32]) -> VermaVector<Rational> {
        VermaVector::monomial(Partition::new(parts.to_vec()))
    }

    #[test]
    fn lowering_the_first_descendant() {
        let h = rational(3, 7);
        let v = module(rational(1, 2), h.clone());
        let out = v.act(1, &m(&[1]));
        assert_eq!(out, VermaVector::lowest().scaled(&(rational(2, 1) * h)));
    }

    #[test]
    fn grading_and_central_term() {
        let (c, h) = (rational(7, 10), rational(1, 2));
        let v = module(c.clone(), h.clone());
        assert_eq!(v.act(0, &m(&[2])), m(&[2]).scaled(&(h.clone() + rational(2, 1))));
        let expected = rational(4, 1) * h + c / rational(2, 1);
        assert_eq!(v.act(2, &m(&[2])), VermaVector::lowest().scaled(&expected));
    }

    #[test]
    fn raising_reorders_into_partitions() {
        let v = module(rational(1, 1), rational(0, 1));
        // L_{-1} L_{-2} Φ = L_{-2} L_{-1} Φ + L_{-3} Φ
        let out = v.act(-1, &m(&[2]));
        let expected = m(&[2, 1]).plus(&m(&[3]));
        assert_eq!(out, expected);
    }

    #[test]
    fn annihilation_below_level_zero() {
        let v = module(rational(1, 2), rational(1, 3));
        assert!(v.act(3, &m(&[2])).is_zero());
        assert!(v.act(1, &VermaVector::lowest()).is_zero());
    }

    #[test]
    fn zero_vector_has_empty_support() {
        let a = m(&[2, 1]);
        assert!(a.minus(&a).is_zero());
    }

    #[test]
    fn level_two_gram() {
        let (c, h) = (rational(3, 5), rational(2, 9));
        let g = module(c.clone(), h.clone()).gram_matrix(2);
        let two = rational(2, 1);
        let expected = DenseMatrix::from_rows(vec![
            vec![rational(4, 1) * h.clone() + c / two.clone(), rational(6, 1) * h.clone()],
            vec![rational(6, 1) * h.clone(), rational(8, 1) * h.clone() * h.clone() + rational(4, 1) * h],
        ]);
        assert_eq!(g.entries, expected);
    }

    #[test]
    fn vacuum_null_vectors() {
        let v = module(rational(2, 1), rational(0, 1));
        let r1 = v.level_rank(1);
        assert_eq!(r1.rank, 0);
        assert_eq!(r1.null_basis, vec![m(&[1])]);
        assert_eq!(v.level_rank(2).rank, 1);
        assert!(r1.tolerance.is_none());
    }

    #[test]
    fn float_rank_reports_tolerance() {
        let v = VermaModule::new(&CentralCharge::new(0.5).unwrap(), &LowestWeight::new(0.0).unwrap());
        let r = v.level_rank(2);
        assert_eq!(r.rank, 1);
        assert_eq!(r.tolerance, Some(FLOAT_RANK_TOLERANCE));
    }

    #[test]
    fn level_bound() {
        assert!(check_level(13, 12).is_err());
        assert!(check_level(12, 12).is_ok());
    }
}
