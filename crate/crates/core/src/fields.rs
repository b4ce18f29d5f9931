//! Vector fields on the circle described by their Fourier coefficients
//! `f̂ₙ = (1/2π)∫ e^{-inα} f(e^{iα}) dα`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Complex64, Scalar};

/// Anything that can produce Fourier coefficients on demand.
pub trait FourierSource: Sync {
    fn coefficient(&self, n: i64) -> Complex64;

    fn is_real(&self) -> bool;

    /// Largest `|n|` with a possibly nonzero coefficient, `None` for
    /// infinite support.
    fn support_radius(&self) -> Option<u64>;

    /// Declared decay `|f̂ₙ| ≤ M/|n|³`, if known.
    fn decay_bound(&self) -> Option<DecayBound> {
        None
    }

    /// A decay bound valid for `|n| ≥ from`, possibly sharper than
    /// [`FourierSource::decay_bound`].
    fn decay_bound_from(&self, from: u64) -> Option<DecayBound> {
        let _ = from;
        self.decay_bound()
    }

    /// Nonzero coefficients only occur at `|n| ≡ residue (mod modulus)`.
    fn support_class(&self) -> (u64, u64) {
        (1, 0)
    }
}

/// `|f̂ₙ| ≤ constant / |n|³` for every `|n| ≥ from`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayBound {
    pub constant: f64,
    pub from: u64,
}

/// `1 + |n|^{3/2}`, the weight of the three-halves norm.
pub fn three_halves_weight(n: i64) -> f64 {
    1.0 + (n.unsigned_abs() as f64).powf(1.5)
}

/// Finitely supported field with coefficients in `T` (complex floats or
/// Gaussian rationals).
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField<T = Complex64> {
    coeffs: BTreeMap<i64, T>,
    real: bool,
    decay: Option<DecayBound>,
    class: (u64, u64),
}

pub type ExactField = FourierField<crate::scalar::ComplexRational>;

impl<T: Scalar> FourierField<T> {
    pub fn zero() -> Self {
        Self {
            coeffs: BTreeMap::new(),
            real: true,
            decay: None,
            class: (1, 0),
        }
    }

    /// Builds a field from `(n, f̂ₙ)` pairs; the reality flag is detected.
    pub fn from_coefficients(pairs: impl IntoIterator<Item = (i64, T)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (n, c) in pairs {
            if !c.is_zero() {
                coeffs.insert(n, c);
            }
        }
        let mut f = Self {
            coeffs,
            real: false,
            decay: None,
            class: (1, 0),
        };
        f.real = f.reality_violations().is_empty();
        f
    }

    /// Like [`FourierField::from_coefficients`] but fails when the field is not real.
    pub fn real_from_coefficients(pairs: impl IntoIterator<Item = (i64, T)>) -> Result<Self> {
        let f = Self::from_coefficients(pairs);
        let offending = f.reality_violations();
        if offending.is_empty() {
            Ok(f)
        } else {
            Err(Error::NotReal { offending })
        }
    }

    /// `f̂ₙ = 1` and nothing else.
    pub fn mode(n: i64) -> Self {
        Self::from_coefficients([(n, T::one())])
    }

    /// The constant field `f ≡ 1` (so `T(f) = L₀`).
    pub fn constant_one() -> Self {
        Self::mode(0)
    }

    /// `cos(nθ)`, i.e. `f̂_{±n} = 1/2`.
    pub fn cosine(n: i64) -> Self {
        let half = T::one() / T::from_int(2);
        if n == 0 {
            return Self::constant_one();
        }
        Self::from_coefficients([(n, half.clone()), (-n, half)])
    }

    pub fn with_decay(mut self, decay: Option<DecayBound>) -> Self {
        self.decay = decay;
        self
    }

    /// Declared decay beyond the stored coefficients.
    pub fn decay(&self) -> Option<DecayBound> {
        self.decay
    }

    pub fn coefficient_exact(&self, n: i64) -> T {
        self.coeffs.get(&n).cloned().unwrap_or_else(T::zero)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (i64, &T)> {
        self.coeffs.iter().map(|(&n, c)| (n, c))
    }

    pub fn support(&self) -> Vec<i64> {
        self.coeffs.keys().copied().collect()
    }

    pub fn radius(&self) -> u64 {
        self.coeffs.keys().map(|n| n.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn real(&self) -> bool {
        self.real
    }

    /// Indices `n ≥ 0` at which `f̂_{-n} ≠ conj(f̂ₙ)`.
    pub fn reality_violations(&self) -> Vec<i64> {
        let mut bad: Vec<i64> = self
            .coeffs
            .keys()
            .map(|n| n.abs())
            .filter(|&n| self.coefficient_exact(-n) != self.coefficient_exact(n).conj())
            .collect();
        bad.sort_unstable();
        bad.dedup();
        bad
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.coeffs.clone();
        for (&n, c) in &other.coeffs {
            let slot = out.entry(n).or_insert_with(T::zero);
            *slot = slot.clone() + c.clone();
        }
        Self::from_coefficients(out)
    }

    pub fn scaled(&self, s: &T) -> Self {
        Self::from_coefficients(self.coeffs.iter().map(|(&n, c)| (n, c.clone() * s.clone())))
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(&-T::one()))
    }

    /// Coefficients with `|n| ≤ radius`.
    pub fn truncated(&self, radius: u64) -> Self {
        Self::from_coefficients(
            self.coeffs
                .iter()
                .filter(|(n, _)| n.unsigned_abs() <= radius)
                .map(|(&n, c)| (n, c.clone())),
        )
    }
}

impl FourierField<Complex64> {
    /// Materializes `|n| ≤ radius` of any source, keeping its decay metadata.
    pub fn from_source(source: &dyn FourierSource, radius: u64) -> Self {
        let r = radius as i64;
        let mut f = Self::from_coefficients((-r..=r).map(|n| (n, source.coefficient(n))));
        f.real = source.is_real();
        f.decay = source.decay_bound_from(radius + 1);
        f.class = source.support_class();
        f
    }

    /// Reality up to a float tolerance.
    pub fn is_real_within(&self, tol: f64) -> bool {
        self.coeffs
            .iter()
            .all(|(&n, c)| (self.coefficient_exact(-n) - c.conj()).norm() <= tol)
    }

    /// Writes `n,re,im` rows (with a header line).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "re", "im"])?;
        for (&n, c) in &self.coeffs {
            w.write_record([n.to_string(), format!("{:.17e}", c.re), format!("{:.17e}", c.im)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `n, re, im` rows; a header line is optional. Errors carry the
    /// 1-based line number.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .flexible(true)
            .from_reader(input);
        let mut pairs = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = rec.position().map_or(i + 1, |p| p.line() as usize);
            if i == 0 && rec.get(0).is_some_and(|s| s.eq_ignore_ascii_case("n")) {
                continue;
            }
            if rec.len() != 3 {
                return Err(Error::Format {
                    what: "coefficient csv",
                    line,
                    detail: format!("expected 3 fields `n, re, im`, found {}", rec.len()),
                });
            }
            let bad = |what: &str| Error::Format {
                what: "coefficient csv",
                line,
                detail: format!("cannot parse {what}"),
            };
            let n: i64 = rec[0].parse().map_err(|_| bad("n"))?;
            let re: f64 = rec[1].parse().map_err(|_| bad("re"))?;
            let im: f64 = rec[2].parse().map_err(|_| bad("im"))?;
            pairs.push((n, Complex64::new(re, im)));
        }
        Ok(Self::from_coefficients(pairs))
    }
}

impl FourierSource for FourierField<Complex64> {
    fn coefficient(&self, n: i64) -> Complex64 {
        self.coefficient_exact(n)
    }
    fn is_real(&self) -> bool {
        self.real
    }
    fn support_radius(&self) -> Option<u64> {
        Some(self.radius())
    }
    fn decay_bound(&self) -> Option<DecayBound> {
        self.decay
    }
    fn support_class(&self) -> (u64, u64) {
        self.class
    }
}

/// Bound on `Σ_{|n|>cutoff} |f̂ₙ|(1 + |n|^{3/2})`: stored coefficients beyond
/// the cutoff plus the declared decay beyond the stored range.
pub fn discarded_norm<T: Scalar>(field: &FourierField<T>, cutoff: u64) -> f64 {
    let stored: f64 = field
        .coefficients()
        .filter(|(n, _)| n.unsigned_abs() > cutoff)
        .map(|(n, c)| c.modulus() * three_halves_weight(n))
        .sum();
    let tail = field
        .decay
        .map_or(0.0, |b| decay_tail_bound(&b, field.radius().max(cutoff), field.class));
    stored + tail
}

/// `Σ_{|n|≤K} f̂ₙ e^{inθ}` (for finitely supported fields `K` is their radius).
pub fn partial_sum(source: &dyn FourierSource, theta: f64, radius: u64) -> Complex64 {
    let r = radius as i64;
    (-r..=r).fold(Complex64::new(0.0, 0.0), |acc, n| {
        acc + source.coefficient(n) * Complex64::from_polar(1.0, n as f64 * theta)
    })
}

/// Pointwise value of a finitely supported field. For a real field the
/// imaginary residue is rounding only.
pub fn evaluate(field: &FourierField<Complex64>, theta: f64) -> f64 {
    partial_sum(field, theta, field.radius()).re
}

/// The bracket `h = [f, g]` in Fourier form together with the central term:
/// `ĥ_k = Σₙ (2n − k) f̂ₙ ĝ_{k−n}` and `ω = (c/12) Σₙ (n³ − n) f̂ₙ ĝ_{−n}`,
/// so that `[T(f), T(g)] = T(h) + ω`.
pub fn bracket_with_cocycle<T: Scalar>(f: &FourierField<T>, g: &FourierField<T>, c: &T) -> (FourierField<T>, T) {
    let mut h: BTreeMap<i64, T> = BTreeMap::new();
    let mut omega = T::zero();
    for (n, a) in f.coefficients() {
        for (m, b) in g.coefficients() {
            let k = n + m;
            let prod = a.clone() * b.clone();
            let slot = h.entry(k).or_insert_with(T::zero);
            *slot = slot.clone() + T::from_int(n - m) * prod.clone();
            if k == 0 {
                omega = omega + T::from_int(n * n * n - n) * prod;
            }
        }
    }
    (FourierField::from_coefficients(h), c.clone() * omega / T::from_int(12))
}

/// Partial sums of `‖f‖_{3/2} = Σ|f̂ₙ|(1 + |n|^{3/2})` and a tail bound.
#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub field_id: String,
    pub cutoff: u64,
    /// `partial_sums[K] = Σ_{|n|≤K}`, for `K = 0..=cutoff`.
    pub partial_sums: Vec<f64>,
    /// Bound on `Σ_{|n|>cutoff}` from the decay metadata; `Some(0)` for
    /// fields supported inside the cutoff.
    pub tail_bound: Option<f64>,
    pub verdict: NormVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormVerdict {
    Finite,
    Unknown,
}

impl NormReport {
    pub fn partial(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }

    /// Partial sum plus tail bound (an upper bound on the norm), if known.
    pub fn upper_bound(&self) -> Option<f64> {
        self.tail_bound.map(|t| self.partial() + t)
    }
}

/// `Σ_{|n|>K, |n| ≡ r (mod q)} M(1 + |n|^{3/2})/|n|³`, bounded above through
/// the first term plus `(1/q)∫` of the decreasing majorant.
pub fn decay_tail_bound(bound: &DecayBound, cutoff: u64, class: (u64, u64)) -> f64 {
    let (q, r) = (class.0.max(1), class.1 % class.0.max(1));
    let start = (cutoff + 1).max(bound.from).max(1);
    let offset = (r + q - start % q) % q;
    let n0 = (start + offset) as f64;
    let g = |x: f64| x.powi(-3) + x.powf(-1.5);
    let integral = 0.5 / (n0 * n0) + 2.0 / n0.sqrt();
    2.0 * bound.constant * (g(n0) + integral / q as f64)
}

pub fn norm_three_halves(source: &dyn FourierSource, cutoff: u64, field_id: &str) -> NormReport {
    let cutoff = cutoff.max(1);
    let mut partial_sums = Vec::with_capacity(cutoff as usize + 1);
    let mut acc = source.coefficient(0).norm();
    partial_sums.push(acc);
    for n in 1..=cutoff as i64 {
        let w = three_halves_weight(n);
        acc += (source.coefficient(n).norm() + source.coefficient(-n).norm()) * w;
        partial_sums.push(acc);
    }
    let tail_bound = match source.support_radius() {
        Some(r) if r <= cutoff => Some(0.0),
        _ => source
            .decay_bound_from(cutoff + 1)
            .map(|b| decay_tail_bound(&b, cutoff, source.support_class())),
    };
    NormReport {
        field_id: field_id.to_string(),
        cutoff,
        partial_sums,
        verdict: if tail_bound.is_some() {
            NormVerdict::Finite
        } else {
            NormVerdict::Unknown
        },
        tail_bound,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MollifierKind {
    /// `m_k(n) = max(0, 1 − |n|/(k+1))`.
    Fejer,
    /// `m_k(n) = exp(−n²/(2k²))`.
    Gaussian,
}

/// Approximate identity acting by Fourier multipliers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MollifierFamily {
    pub kind: MollifierKind,
}

impl Default for MollifierFamily {
    fn default() -> Self {
        Self {
            kind: MollifierKind::Fejer,
        }
    }
}

impl MollifierFamily {
    pub fn fejer() -> Self {
        Self {
            kind: MollifierKind::Fejer,
        }
    }

    pub fn gaussian() -> Self {
        Self {
            kind: MollifierKind::Gaussian,
        }
    }

    /// The multiplier `m_k(n) ∈ [0, 1]`, with `m_k(0) = 1`.
    pub fn multiplier(&self, k: u64, n: i64) -> f64 {
        let a = n.unsigned_abs() as f64;
        match self.kind {
            MollifierKind::Fejer => (1.0 - a / (k as f64 + 1.0)).max(0.0),
            MollifierKind::Gaussian => {
                let k = k.max(1) as f64;
                (-a * a / (2.0 * k * k)).exp()
            }
        }
    }

    /// Radius beyond which the multiplier is negligible (exactly zero for Fejér).
    pub fn radius(&self, k: u64) -> u64 {
        match self.kind {
            MollifierKind::Fejer => k,
            // exp(−x²/2) < 1e-18 for x > 9.1
            MollifierKind::Gaussian => (k.max(1) as f64 * 9.2).ceil() as u64,
        }
    }
}

/// `φ_k * f`, coefficient-wise `m_k(n) f̂ₙ`.
pub fn mollify(source: &dyn FourierSource, family: &MollifierFamily, k: u64) -> FourierField<Complex64> {
    let radius = match source.support_radius() {
        Some(r) => r.min(family.radius(k)),
        None => family.radius(k),
    } as i64;
    let mut f = FourierField::from_coefficients(
        (-radius..=radius).map(|n| (n, source.coefficient(n) * family.multiplier(k, n))),
    );
    f.real = source.is_real();
    let cut_short = source.support_radius().is_none_or(|r| r > radius as u64);
    if family.kind == MollifierKind::Gaussian && cut_short {
        // Multipliers are bounded by 1, so the source's decay bound still holds.
        f.decay = source.decay_bound_from(radius as u64 + 1);
        f.class = source.support_class();
    }
    f
}

/// Largest `|f(θ)|` over `samples` equally spaced points of `[a, b]`.
pub fn sup_on_arc(field: &FourierField<Complex64>, a: f64, b: f64, samples: usize) -> f64 {
    (0..samples.max(2))
        .map(|i| a + (b - a) * i as f64 / (samples.max(2) - 1) as f64)
        .map(|t| evaluate(field, t).abs())
        .fold(0.0, f64::max)
}

pub fn complex(re: f64, im: f64) -> Complex64 {
    Complex::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, ComplexRational};

    fn q(n: i64, d: i64) -> ComplexRational {
        Complex::new(rational(n, d), rational(0, 1))
    }

    #[test]
    fn cosine_coefficients_and_value() {
        let f: FourierField = FourierField::cosine(1);
        assert_eq!(f.coefficient(1), complex(0.5, 0.0));
        assert_eq!(f.coefficient(-1), complex(0.5, 0.0));
        assert_eq!(f.coefficient(2), complex(0.0, 0.0));
        assert!((evaluate(&f, 0.0) - 1.0).abs() < 1e-15);
        assert!(f.real());
    }

    #[test]
    fn norms_of_simple_fields() {
        let zero: FourierField = FourierField::zero();
        let r = norm_three_halves(&zero, 4, "zero");
        assert_eq!(r.partial(), 0.0);
        assert_eq!(r.tail_bound, Some(0.0));
        let cos: FourierField = FourierField::cosine(1);
        let r = norm_three_halves(&cos, 4, "cos");
        assert!((r.partial() - 2.0).abs() < 1e-15);
        assert!(r.partial_sums.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn bracket_examples() {
        let c = q(7, 10);
        // f = 2 cos 2θ, g = 1
        let f = ExactField::from_coefficients([(2, q(1, 1)), (-2, q(1, 1))]);
        let g = ExactField::constant_one();
        let (h, omega) = bracket_with_cocycle(&f, &g, &c);
        assert_eq!(h.coefficient_exact(2), q(2, 1));
        assert_eq!(h.coefficient_exact(-2), q(-2, 1));
        assert_eq!(h.support(), vec![-2, 2]);
        assert_eq!(omega, q(0, 1));
        // f̂₂ = 1, ĝ₋₂ = 1
        let (h, omega) = bracket_with_cocycle(&ExactField::mode(2), &ExactField::mode(-2), &c);
        assert_eq!(h.support(), vec![0]);
        assert_eq!(h.coefficient_exact(0), q(4, 1));
        assert_eq!(omega, c / q(2, 1));
        // bracket(f, f) = 0
        let (h, omega) = bracket_with_cocycle(&f, &f, &q(1, 1));
        assert!(h.is_zero());
        assert_eq!(omega, q(0, 1));
    }

    #[test]
    fn fejer_on_cosine() {
        let cos: FourierField = FourierField::cosine(1);
        let m = mollify(&cos, &MollifierFamily::fejer(), 1);
        assert_eq!(m.coefficient(1), complex(0.25, 0.0));
        assert_eq!(m.coefficient(-1), complex(0.25, 0.0));
        assert!(mollify(&FourierField::zero(), &MollifierFamily::fejer(), 3).is_zero());
    }

    #[test]
    fn multipliers_are_bounded() {
        for fam in [MollifierFamily::fejer(), MollifierFamily::gaussian()] {
            for k in [1, 5, 50] {
                assert_eq!(fam.multiplier(k, 0), 1.0);
                for n in -200..=200 {
                    let m = fam.multiplier(k, n);
                    assert!((0.0..=1.0).contains(&m));
                }
            }
            assert!(fam.multiplier(100_000, 7) > 0.999);
        }
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let f = FourierField::from_coefficients([(2, complex(0.5, -0.25)), (-2, complex(0.5, 0.25))]);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = FourierField::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, f);
        let err = FourierField::read_csv("n,re,im\n1, 0.5, 0\n2, x, 0\n".as_bytes()).unwrap_err();
        match err {
            Error::Format { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn reality_violations_listed() {
        let f = FourierField::from_coefficients([(1, complex(1.0, 0.0)), (3, complex(0.0, 1.0)), (-3, complex(0.0, -1.0))]);
        assert_eq!(f.reality_violations(), vec![1]);
        assert!(FourierField::real_from_coefficients([(2, complex(1.0, 0.0))]).is_err());
    }

    #[test]
    fn tail_bound_dominates_sparse_majorant() {
        let b = DecayBound { constant: 1.0, from: 1 };
        for cutoff in [10_u64, 100, 1000] {
            let direct: f64 = (cutoff + 1..2_000_000)
                .filter(|n| n % 4 == 2)
                .map(|n| 2.0 * (1.0 + (n as f64).powf(1.5)) / (n as f64).powi(3))
                .sum();
            assert!(decay_tail_bound(&b, cutoff, (4, 2)) >= direct, "cutoff {cutoff}");
        }
    }
}
