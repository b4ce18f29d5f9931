//! The field glued from four rotated copies of the Möbius field
//! `g₁(z) = (i−1)z + 2 − (i+1)z⁻¹` on the quarter arcs between `1, i, −1, −i`.
//!
//! On the arc from `p` to `ip` the field is `g_p(z) = p² g₁(z/p)`, so
//! `ĝ_p,m = p^{2−m} ĝ₁,m`. All piece coefficients and corner points are
//! Gaussian integers, which makes corner data exact.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{DecayBound, ExactField, FourierField, FourierSource};
use crate::quadrature;
use crate::scalar::{rational, Complex64, ComplexRational};

pub type GaussianInt = Complex<i64>;

/// `(ĝ₁,₋₁, ĝ₁,₀, ĝ₁,₁)`.
pub const G1_COEFFICIENTS: [GaussianInt; 3] = [
    Complex { re: -1, im: -1 },
    Complex { re: 2, im: 0 },
    Complex { re: -1, im: 1 },
];

/// `i^k` for any integer `k`.
pub fn i_pow(k: i64) -> GaussianInt {
    match k.rem_euclid(4) {
        0 => Complex::new(1, 0),
        1 => Complex::new(0, 1),
        2 => Complex::new(-1, 0),
        _ => Complex::new(0, -1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Corner {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "i")]
    I,
    #[serde(rename = "-1")]
    MinusOne,
    #[serde(rename = "-i")]
    MinusI,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::One, Corner::I, Corner::MinusOne, Corner::MinusI];

    /// `j` with corner `i^j`.
    pub fn index(self) -> usize {
        match self {
            Corner::One => 0,
            Corner::I => 1,
            Corner::MinusOne => 2,
            Corner::MinusI => 3,
        }
    }

    pub fn from_index(j: usize) -> Self {
        Self::ALL[j % 4]
    }

    pub fn point(self) -> GaussianInt {
        i_pow(self.index() as i64)
    }

    pub fn angle(self) -> f64 {
        self.index() as f64 * FRAC_PI_2
    }

    pub fn label(self) -> &'static str {
        match self {
            Corner::One => "1",
            Corner::I => "i",
            Corner::MinusOne => "-1",
            Corner::MinusI => "-i",
        }
    }
}

impl std::str::FromStr for Corner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Corner::ALL
            .into_iter()
            .find(|c| c.label() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown corner `{s}` (expected 1, i, -1 or -i)")))
    }
}

/// A value or derivative at a corner from the arc ending there (`left`) and
/// the arc starting there (`right`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OneSided {
    pub left: i64,
    pub right: i64,
}

impl OneSided {
    pub fn jump(&self) -> i64 {
        self.right - self.left
    }
}

/// `f̂ₙ = rational + over_pi / π`, exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCoefficient {
    pub rational: ComplexRational,
    pub over_pi: ComplexRational,
}

impl ExactCoefficient {
    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.over_pi.is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        let f = |q: &ComplexRational| {
            use num_traits::ToPrimitive;
            Complex64::new(q.re.to_f64().unwrap_or(f64::NAN), q.im.to_f64().unwrap_or(f64::NAN))
        };
        f(&self.rational) + f(&self.over_pi) / PI
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseMobiusField {
    pieces: [[GaussianInt; 3]; 4],
    /// Arc sums `(m − n, A_m)` for `n = 0, 1, 2, 3`; they depend on `n` only
    /// through `n mod 4` apart from `m − n` itself.
    residue_sums: [[GaussianInt; 3]; 4],
}

impl Default for PiecewiseMobiusField {
    fn default() -> Self {
        build_piecewise_mobius()
    }
}

pub fn build_piecewise_mobius() -> PiecewiseMobiusField {
    let pieces = std::array::from_fn(|j| {
        let p = j as i64;
        std::array::from_fn(|idx| {
            let m = idx as i64 - 1;
            G1_COEFFICIENTS[idx] * i_pow(p * (2 - m))
        })
    });
    let residue_sums = std::array::from_fn(|r| {
        std::array::from_fn(|idx| {
            let d = idx as i64 - 1 - r as i64;
            (0..4).fold(GaussianInt::zero(), |acc, j| acc + pieces[j][idx] * i_pow(d * j as i64))
        })
    });
    PiecewiseMobiusField { pieces, residue_sums }
}

fn gauss_to_c64(z: GaussianInt) -> Complex64 {
    Complex64::new(z.re as f64, z.im as f64)
}

fn gauss_to_exact(z: GaussianInt) -> ComplexRational {
    Complex::new(rational(z.re, 1), rational(z.im, 1))
}

impl PiecewiseMobiusField {
    /// Coefficients `(ĝ₋₁, ĝ₀, ĝ₁)` of the piece on the arc from `i^j` to `i^{j+1}`.
    pub fn piece(&self, j: usize) -> [GaussianInt; 3] {
        self.pieces[j % 4]
    }

    pub fn piece_field(&self, j: usize) -> FourierField<Complex64> {
        FourierField::from_coefficients(self.piece(j).iter().enumerate().map(|(idx, &c)| (idx as i64 - 1, gauss_to_c64(c))))
    }

    pub fn piece_field_exact(&self, j: usize) -> ExactField {
        ExactField::from_coefficients(self.piece(j).iter().enumerate().map(|(idx, &c)| (idx as i64 - 1, gauss_to_exact(c))))
    }

    /// `d^order/dθ^order` of piece `j` at `z = i^q` (order 0 is the value).
    fn piece_derivative(&self, j: usize, q: i64, order: u32) -> GaussianInt {
        let mut acc = GaussianInt::zero();
        for (idx, &c) in self.piece(j).iter().enumerate() {
            let m = idx as i64 - 1;
            // d/dθ e^{imθ} = (im) e^{imθ}
            let factor = (Complex::new(0, m)).powu(order);
            acc += c * factor * i_pow(q * m);
        }
        acc
    }

    fn real_part(z: GaussianInt) -> i64 {
        debug_assert_eq!(z.im, 0, "real field produced a complex corner value");
        z.re
    }

    pub fn corner_value(&self, corner: Corner) -> OneSided {
        self.one_sided_derivatives(corner, 0)
    }

    /// Exact one-sided `θ`-derivatives at a corner.
    pub fn one_sided_derivatives(&self, corner: Corner, order: u32) -> OneSided {
        let j = corner.index();
        let q = j as i64;
        OneSided {
            left: Self::real_part(self.piece_derivative((j + 3) % 4, q, order)),
            right: Self::real_part(self.piece_derivative(j, q, order)),
        }
    }

    /// Index of the arc containing `θ`; corners belong to the arc they start.
    pub fn arc_of(theta: f64) -> usize {
        let t = theta.rem_euclid(TAU);
        ((t / FRAC_PI_2).floor() as usize).min(3)
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        let j = Self::arc_of(theta);
        self.piece_value(j, theta)
    }

    /// Real part of piece `j` at angle `θ` (not restricted to its arc).
    pub fn piece_value(&self, j: usize, theta: f64) -> f64 {
        self.piece(j)
            .iter()
            .enumerate()
            .map(|(idx, &c)| gauss_to_c64(c) * Complex64::from_polar(1.0, (idx as f64 - 1.0) * theta))
            .sum::<Complex64>()
            .re
    }

    /// `Σ_m A_m` form of `f̂ₙ`: arc `j` contributes
    /// `ĉ_{j,m} i^{(m−n)j} ∫₀^{π/2} e^{i(m−n)θ} dθ` for each piece mode `m`.
    fn arc_sums(&self, n: i64) -> [(i64, GaussianInt); 3] {
        let sums = &self.residue_sums[n.rem_euclid(4) as usize];
        std::array::from_fn(|idx| (idx as i64 - 1 - n, sums[idx]))
    }

    /// Exact Fourier coefficient.
    pub fn coefficient_exact(&self, n: i64) -> ExactCoefficient {
        let mut rational_part = ComplexRational::zero();
        let mut over_pi = ComplexRational::zero();
        for (d, a) in self.arc_sums(n) {
            if a.is_zero() {
                continue;
            }
            if d == 0 {
                // (1/2π)·A·π/2
                rational_part = rational_part + gauss_to_exact(a) * Complex::new(rational(1, 4), rational(0, 1));
            } else {
                // (1/2π)·A·(i^d − 1)/(i d) = (1/π)·A·(i^d − 1)(−i)/(2d)
                let num = a * (i_pow(d) - GaussianInt::new(1, 0)) * GaussianInt::new(0, -1);
                over_pi = over_pi + gauss_to_exact(num) * Complex::new(rational(1, 2 * d), rational(0, 1));
            }
        }
        ExactCoefficient {
            rational: rational_part,
            over_pi,
        }
    }

    /// Independent route through adaptive quadrature on each arc.
    pub fn coefficient_quadrature(&self, n: i64, tol: f64) -> Result<(Complex64, f64)> {
        let mut total = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for j in 0..4 {
            let coeffs = self.piece(j).map(gauss_to_c64);
            let integrand = |t: f64| {
                let g = coeffs
                    .iter()
                    .enumerate()
                    .map(|(idx, &c)| c * Complex64::from_polar(1.0, (idx as f64 - 1.0 - n as f64) * t))
                    .sum::<Complex64>();
                g
            };
            let a = j as f64 * FRAC_PI_2;
            let (v, e) = quadrature::integrate(integrand, a, a + FRAC_PI_2, tol * TAU / 4.0)?;
            total += v;
            err += e;
        }
        Ok((total / TAU, err / TAU))
    }

    /// `max_{2≤|n|≤n_max} |f̂ₙ||n|³` and the `n > 0` attaining it.
    pub fn empirical_decay_constant(&self, n_max: u64) -> (f64, i64) {
        (2..=n_max as i64)
            .flat_map(|n| [n, -n])
            .map(|n| (self.coefficient(n).norm() * (n.abs() as f64).powi(3), n.abs()))
            .fold((0.0, 0), |best, cur| if cur.0 > best.0 { cur } else { best })
    }

    /// `count` equally spaced `(θ, f(θ))` samples on `[0, 2π)`.
    pub fn samples(&self, count: usize) -> Vec<(f64, f64)> {
        (0..count)
            .map(|i| {
                let t = TAU * i as f64 / count as f64;
                (t, self.evaluate(t))
            })
            .collect()
    }

    pub fn write_samples<W: Write>(&self, count: usize, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["theta", "value"])?;
        for (t, v) in self.samples(count) {
            w.write_record([format!("{t:.17e}"), format!("{v:.17e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl FourierSource for PiecewiseMobiusField {
    /// Sums the arc terms over a common integer denominator first, so large
    /// `|n|` does not lose digits to cancellation.
    fn coefficient(&self, n: i64) -> Complex64 {
        let mut rational_part = Complex64::new(0.0, 0.0);
        let mut terms: Vec<(Complex<i128>, i128)> = Vec::with_capacity(3);
        for (d, a) in self.arc_sums(n) {
            if a.is_zero() {
                continue;
            }
            if d == 0 {
                rational_part += gauss_to_c64(a) / 4.0;
            } else {
                let num = a * (i_pow(d) - GaussianInt::new(1, 0)) * GaussianInt::new(0, -1);
                terms.push((Complex::new(num.re as i128, num.im as i128), d as i128));
            }
        }
        let denom: i128 = 2 * terms.iter().map(|t| t.1).product::<i128>();
        let numer = terms.iter().enumerate().fold(Complex::<i128>::new(0, 0), |acc, (i, (num, _))| {
            let others: i128 = terms.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| t.1).product();
            acc + num * others
        });
        rational_part + Complex64::new(numer.re as f64 / denom as f64, numer.im as f64 / denom as f64) / PI
    }

    fn is_real(&self) -> bool {
        true
    }

    fn support_radius(&self) -> Option<u64> {
        None
    }

    fn decay_bound(&self) -> Option<DecayBound> {
        self.decay_bound_from(2)
    }

    /// From the closed form `|f̂ₙ| = 8/(π|n³ − n|)`, so
    /// `|f̂ₙ||n|³ ≤ (8/π)·n₀²/(n₀² − 1)` for `|n| ≥ n₀ ≥ 2`.
    fn decay_bound_from(&self, from: u64) -> Option<DecayBound> {
        let n0 = from.max(2) as f64;
        Some(DecayBound {
            constant: 8.0 / PI * n0 * n0 / (n0 * n0 - 1.0),
            from: from.max(2),
        })
    }

    fn support_class(&self) -> (u64, u64) {
        (4, 2)
    }
}
