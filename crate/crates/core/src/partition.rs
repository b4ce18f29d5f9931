use std::fmt;

use serde::{Deserialize, Serialize};

/// A partition `λ₁ ≥ λ₂ ≥ … ≥ λ_k > 0`, indexing the Verma monomial
/// `L_{-λ₁} ⋯ L_{-λ_k} Φ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Sorts `parts` into weakly decreasing order and drops zeros.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    /// Wraps parts that are already weakly decreasing and positive.
    pub(crate) fn from_sorted(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]) && parts.iter().all(|&p| p > 0));
        Self(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    /// `L_{-a}` prepended; `a` must be at least the current largest part.
    pub(crate) fn with_leading(&self, a: u32) -> Self {
        debug_assert!(self.0.first().is_none_or(|&p| a >= p));
        let mut parts = Vec::with_capacity(self.0.len() + 1);
        parts.push(a);
        parts.extend_from_slice(&self.0);
        Self(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `k` in reverse-lexicographic order:
/// `(4), (3,1), (2,2), (2,1,1), (1,1,1,1)` for `k = 4`.
pub fn enumerate_partitions(k: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill(k, k, &mut current, &mut out);
    out
}

fn fill(remaining: usize, max_part: usize, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition::from_sorted(current.clone()));
        return;
    }
    for part in (1..=remaining.min(max_part)).rev() {
        current.push(part as u32);
        fill(remaining - part, part, current, out);
        current.pop();
    }
}

/// The partition number `p(k)`.
pub fn partition_count(k: usize) -> usize {
    // p(n) via the coin-change recurrence over part sizes.
    let mut p = vec![0usize; k + 1];
    p[0] = 1;
    for part in 1..=k {
        for n in part..=k {
            p[n] += p[n - part];
        }
    }
    p[k]
}
