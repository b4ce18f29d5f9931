//! Truncated smeared operators `T(f) = Σ f̂ₙ Lₙ`, their commutators, and the
//! heat commutators `[Lₙ, e^{−εL₀}]`.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{
    bracket_with_cocycle, discarded_norm, three_halves_weight, ExactField, FourierField,
    FourierSource,
};
use crate::linalg::DenseMatrix;
use crate::piecewise::{Corner, PiecewiseMobiusField};
use crate::rep::{SafeWindow, TruncatedRep};
use crate::scalar::{complexify, Complex64, Rational, RealScalar, Scalar};

/// Default tolerance on the discarded `‖·‖_{3/2}` tail before a smear warns.
pub const DEFAULT_BIAS_TOLERANCE: f64 = 1e-6;

pub type ComplexGraded<S> = Vec<Vec<Complex<S>>>;

/// What the smearing cutoff discarded.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationBias {
    pub cutoff: usize,
    /// Upper bound on `Σ_{|n|>cutoff} |f̂ₙ|(1 + |n|^{3/2})`.
    pub discarded: f64,
    pub tolerance: f64,
    pub warning: bool,
}

/// `T(f)` on a truncated representation, stored as blocks keyed by
/// `(source level, target level)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmearedOperator<S: RealScalar> {
    n_max: usize,
    cutoff: usize,
    support: Vec<i64>,
    norms: Vec<Vec<S>>,
    blocks: BTreeMap<(usize, usize), DenseMatrix<Complex<S>>>,
    bias: TruncationBias,
}

pub fn smear<S: RealScalar>(
    rep: &TruncatedRep<S>,
    field: &FourierField<Complex<S>>,
    cutoff: usize,
) -> Result<SmearedOperator<S>> {
    smear_with(rep, field, cutoff, DEFAULT_BIAS_TOLERANCE)
}

pub fn smear_with<S: RealScalar>(
    rep: &TruncatedRep<S>,
    field: &FourierField<Complex<S>>,
    cutoff: usize,
    bias_tolerance: f64,
) -> Result<SmearedOperator<S>> {
    if cutoff > rep.n_max() {
        return Err(Error::Precondition(format!(
            "smearing cutoff {cutoff} exceeds the truncation level {}",
            rep.n_max()
        )));
    }
    let support: Vec<i64> = field
        .support()
        .into_iter()
        .filter(|n| n.unsigned_abs() as usize <= cutoff)
        .collect();
    let mut blocks: BTreeMap<(usize, usize), DenseMatrix<Complex<S>>> = BTreeMap::new();
    for &n in &support {
        let coeff = field.coefficient_exact(n);
        for k in 0..=rep.n_max() {
            let Some(b) = rep.block(n, k) else { continue };
            let target = (k as i64 - n) as usize;
            let term = b.map(|x| complexify(x) * coeff.clone());
            blocks
                .entry((k, target))
                .and_modify(|acc| *acc = acc.add(&term))
                .or_insert(term);
        }
    }
    let discarded = discarded_norm(field, cutoff as u64);
    Ok(SmearedOperator {
        n_max: rep.n_max(),
        cutoff,
        support,
        norms: (0..=rep.n_max()).map(|k| rep.norms(k).to_vec()).collect(),
        blocks,
        bias: TruncationBias {
            cutoff,
            discarded,
            tolerance: bias_tolerance,
            warning: discarded > bias_tolerance,
        },
    })
}

impl<S: RealScalar> SmearedOperator<S> {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Modes that entered the sum.
    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn bias(&self) -> &TruncationBias {
        &self.bias
    }

    pub fn block(&self, source: usize, target: usize) -> Option<&DenseMatrix<Complex<S>>> {
        self.blocks.get(&(source, target))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &DenseMatrix<Complex<S>>)> {
        self.blocks.iter()
    }

    /// Source levels on which no mode of the support leaves `0..=N`.
    pub fn safe_window(&self) -> SafeWindow {
        SafeWindow::for_steps(self.n_max, &[self.support.clone()])
    }

    fn dim(&self, level: usize) -> usize {
        self.norms[level].len()
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        let mut blocks = self.blocks.clone();
        for (key, b) in &other.blocks {
            let b = b.scale(&Complex::<S>::from_int(sign));
            blocks
                .entry(*key)
                .and_modify(|acc| *acc = acc.add(&b))
                .or_insert(b);
        }
        let mut support = self.support.clone();
        support.extend(other.support.iter().copied());
        support.sort_unstable();
        support.dedup();
        Self {
            n_max: self.n_max,
            cutoff: self.cutoff.max(other.cutoff),
            support,
            norms: self.norms.clone(),
            blocks,
            bias: TruncationBias {
                cutoff: self.cutoff.max(other.cutoff),
                discarded: self.bias.discarded + other.bias.discarded,
                tolerance: self.bias.tolerance,
                warning: self.bias.warning || other.bias.warning,
            },
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.combine(other, -1)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut blocks: BTreeMap<(usize, usize), DenseMatrix<Complex<S>>> = BTreeMap::new();
        for (&(src, mid), b) in &other.blocks {
            for (&(from, dst), a) in self.blocks.range((mid, 0)..=(mid, usize::MAX)) {
                debug_assert_eq!(from, mid);
                let p = a.matmul(b);
                blocks
                    .entry((src, dst))
                    .and_modify(|acc| *acc = acc.add(&p))
                    .or_insert(p);
            }
        }
        let mut support: Vec<i64> = self
            .support
            .iter()
            .flat_map(|a| other.support.iter().map(move |b| a + b))
            .collect();
        support.sort_unstable();
        support.dedup();
        Self {
            n_max: self.n_max,
            cutoff: self.cutoff.max(other.cutoff),
            support,
            norms: self.norms.clone(),
            blocks,
            bias: self.bias.clone(),
        }
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).minus(&other.compose(self))
    }

    pub fn apply(&self, v: &ComplexGraded<S>) -> ComplexGraded<S> {
        let mut out: ComplexGraded<S> = self.norms.iter().map(|d| vec![Complex::zero(); d.len()]).collect();
        for (&(src, dst), b) in &self.blocks {
            if v[src].iter().all(|x| x.is_zero()) {
                continue;
            }
            for (o, x) in out[dst].iter_mut().zip(b.mul_vec(&v[src])) {
                *o = o.clone() + x;
            }
        }
        out
    }

    /// Hermiticity `D_t T(s→t) = T(t→s)† D_s` over pairs of window levels:
    /// returns the largest residual, whether all are exactly zero, and the
    /// number of block pairs checked.
    pub fn hermiticity(&self) -> (f64, bool, usize) {
        let window = self.safe_window();
        let mut worst = 0.0_f64;
        let mut exact = true;
        let mut checked = 0;
        for &s in window.levels() {
            for &t in window.levels() {
                let zero_st = DenseMatrix::zeros(self.dim(t), self.dim(s));
                let zero_ts = DenseMatrix::zeros(self.dim(s), self.dim(t));
                let st = self.block(s, t).unwrap_or(&zero_st);
                let ts = self.block(t, s).unwrap_or(&zero_ts);
                let ds = DenseMatrix::diagonal(&self.norms[s].iter().map(complexify).collect::<Vec<_>>());
                let dt = DenseMatrix::diagonal(&self.norms[t].iter().map(complexify).collect::<Vec<_>>());
                let res = dt.matmul(st).sub(&ts.adjoint().matmul(&ds));
                worst = worst.max(res.max_modulus());
                exact &= res.is_zero();
                checked += 1;
            }
        }
        (worst, exact, checked)
    }
}

fn zero_graded<S: RealScalar>(rep: &TruncatedRep<S>) -> ComplexGraded<S> {
    rep.level_dims().iter().map(|&d| vec![Complex::zero(); d]).collect()
}

/// `⟨u, v⟩` for complex vectors in the representation's inner product.
pub fn inner<S: RealScalar>(rep: &TruncatedRep<S>, u: &ComplexGraded<S>, v: &ComplexGraded<S>) -> Complex<S> {
    let mut acc = Complex::<S>::zero();
    for (k, (a, b)) in u.iter().zip(v).enumerate() {
        for ((x, y), d) in a.iter().zip(b).zip(rep.norms(k)) {
            acc = acc + x.conj() * y.clone() * complexify(d);
        }
    }
    acc
}

pub fn lowest_complex<S: RealScalar>(rep: &TruncatedRep<S>) -> ComplexGraded<S> {
    let mut v = zero_graded(rep);
    v[0][0] = Complex::one();
    v
}

/// `‖T(f)Ω‖² = (c/12) Σ_{n≥2} |f̂₋ₙ|²(n³ − n)` over the stored coefficients.
pub fn vacuum_norm<S: RealScalar>(field: &FourierField<Complex<S>>, c: &S) -> S {
    let mut acc = S::zero();
    for (n, coeff) in field.coefficients() {
        if n <= -2 {
            let m = -n;
            acc = acc + coeff.norm_sqr() * S::from_int(m * m * m - m);
        }
    }
    c.clone() * acc / S::from_int(12)
}

/// The same series for any source, summed for `2 ≤ n ≤ radius`.
pub fn vacuum_norm_series(source: &dyn FourierSource, c: f64, radius: u64) -> f64 {
    let sum: f64 = (2..=radius as i64)
        .map(|n| {
            let nf = n as f64;
            source.coefficient(-n).norm_sqr() * (nf * nf * nf - nf)
        })
        .sum();
    c / 12.0 * sum
}

/// `⟨T(f)Ω, T(f)Ω⟩` computed from the representation matrices.
pub fn vacuum_norm_matrix<S: RealScalar>(rep: &TruncatedRep<S>, field: &FourierField<Complex<S>>) -> Result<S> {
    let t = smear(rep, field, rep.n_max())?;
    let v = t.apply(&lowest_complex(rep));
    Ok(inner(rep, &v, &v).re)
}

/// A JSON-ready check outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub parameters: serde_json::Value,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, parameters: serde_json::Value, residual: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            parameters,
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }
}

/// Outcome of `[T(f), T(g)] = T(h) + ω` on the joint safe window.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorCheck<S: RealScalar> {
    pub bracket: FourierField<Complex<S>>,
    pub cocycle: Complex<S>,
    pub window: Vec<usize>,
    pub max_residual: f64,
    pub exact_zero: bool,
}

pub fn commutator_check<S: RealScalar>(
    rep: &TruncatedRep<S>,
    f: &FourierField<Complex<S>>,
    g: &FourierField<Complex<S>>,
) -> Result<CommutatorCheck<S>> {
    let c = complexify(rep.central_charge());
    let (h, omega) = bracket_with_cocycle(f, g, &c);
    let n = rep.n_max();
    for field in [f, g, &h] {
        if field.radius() as usize > n {
            return Err(Error::Precondition(format!(
                "field support radius {} exceeds the truncation level {n}",
                field.radius()
            )));
        }
    }
    let tf = smear(rep, f, n)?;
    let tg = smear(rep, g, n)?;
    let th = smear(rep, &h, n)?;
    let lhs = tf.commutator(&tg);
    let window = SafeWindow::for_steps(n, &[g.support(), f.support()])
        .intersect(&SafeWindow::for_steps(n, &[f.support(), g.support()]));
    let mut worst = 0.0_f64;
    let mut exact = true;
    for &src in window.levels() {
        for dst in 0..=n {
            let d_dst = rep.dim(dst);
            let d_src = rep.dim(src);
            let zero = DenseMatrix::zeros(d_dst, d_src);
            let mut res = lhs
                .block(src, dst)
                .unwrap_or(&zero)
                .sub(th.block(src, dst).unwrap_or(&zero));
            if src == dst {
                for i in 0..d_src {
                    res[(i, i)] = res[(i, i)].clone() - omega.clone();
                }
            }
            worst = worst.max(res.max_modulus());
            exact &= res.is_zero();
        }
    }
    Ok(CommutatorCheck {
        bracket: h,
        cocycle: omega,
        window: window.levels().to_vec(),
        max_residual: worst,
        exact_zero: exact,
    })
}

/// Exact rational image of a float field (every `f64` is a dyadic rational).
pub fn rationalize(field: &FourierField<Complex64>) -> ExactField {
    let q = |x: f64| BigRational::from_float(x).unwrap_or_default();
    ExactField::from_coefficients(field.coefficients().map(|(n, c)| (n, Complex::new(q(c.re), q(c.im)))))
}

/// `T(f) − T(f − g_p) − T(g_p)` for the piecewise field truncated at `N`, in
/// exact arithmetic, plus the largest `|f − g_p|` on the arc starting at `p`
/// over `samples` points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionCheck {
    pub corner: Corner,
    pub max_residual: f64,
    pub exact_zero: bool,
    pub arc_samples: usize,
    pub arc_max_difference: f64,
}

pub fn decomposition_check(
    rep: &TruncatedRep<Rational>,
    field: &PiecewiseMobiusField,
    corner: Corner,
    samples: usize,
) -> Result<DecompositionCheck> {
    let n = rep.n_max();
    let f = rationalize(&FourierField::from_source(field, n as u64));
    let gp = field.piece_field_exact(corner.index());
    let t_f = smear(rep, &f, n)?;
    let t_rest = smear(rep, &f.minus(&gp), n)?;
    let t_gp = smear(rep, &gp, n)?;
    let res = t_f.minus(&t_rest).minus(&t_gp);
    let worst = res.blocks().map(|(_, b)| b.max_modulus()).fold(0.0, f64::max);
    let exact = res.blocks().all(|(_, b)| b.is_zero());
    let j = corner.index();
    let a = corner.angle();
    let arc_max = (0..samples)
        .map(|i| a + std::f64::consts::FRAC_PI_2 * (i as f64 + 0.5) / samples as f64)
        .map(|t| (field.evaluate(t) - field.piece_value(j, t)).abs())
        .fold(0.0, f64::max);
    Ok(DecompositionCheck {
        corner,
        max_residual: worst,
        exact_zero: exact,
        arc_samples: samples,
        arc_max_difference: arc_max,
    })
}

/// Results of the vacuum-module identities used to propagate a scalar from
/// level 2 to all modes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VacuumPropagationReport {
    /// Dimension of the `L₀ = 2` eigenspace.
    pub level2_dim: usize,
    /// Whether `L₋₂Ω` is nonzero (so it spans that eigenspace).
    pub level2_spanned_by_l_minus_2: bool,
    /// `(n, holds)` for `L₋₁L₋ₙΩ = (n−1)L₋ₙ₋₁Ω`, `2 ≤ n ≤ N−1`.
    pub induction: Vec<(i64, bool)>,
    pub propagation: Option<Propagation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Propagation {
    /// Whether the second representation shares the `L₋₁, L₀, L₁` blocks.
    pub hypotheses_hold: bool,
    /// `ζ` with `L̃₋₂Ω = ζL₋₂Ω`, if it exists.
    pub zeta: Option<String>,
    /// `(n, holds)` for `L̃₋ₙΩ = ζL₋ₙΩ` reached through the recursion, `2 ≤ n ≤ N`.
    pub propagated: Vec<(i64, bool)>,
}

fn vacuum_image(rep: &TruncatedRep<Rational>, n: i64) -> Vec<Rational> {
    rep.apply(n, &rep.lowest_vector())[(-n) as usize].clone()
}

fn proportionality(a: &[Rational], b: &[Rational]) -> Option<Rational> {
    // ζ with a = ζ b
    let pivot = b.iter().position(|x| !x.is_zero())?;
    let zeta = a[pivot].clone() / b[pivot].clone();
    a.iter()
        .zip(b)
        .all(|(x, y)| *x == zeta.clone() * y.clone())
        .then_some(zeta)
}

pub fn vacuum_propagation_checks(rep: &TruncatedRep<Rational>, other: Option<&TruncatedRep<Rational>>) -> Result<VacuumPropagationReport> {
    let n_max = rep.n_max();
    if n_max < 3 || !rep.lowest_weight().is_zero() {
        return Err(Error::Precondition("propagation checks need a vacuum representation with N ≥ 3".into()));
    }
    let l2 = vacuum_image(rep, -2);
    let induction = (2..n_max as i64)
        .map(|n| {
            let ln = rep.apply(-n, &rep.lowest_vector());
            let lhs = rep.apply(-1, &ln);
            let rhs = vacuum_image(rep, -n - 1);
            let target = (n + 1) as usize;
            let ok = lhs[target]
                .iter()
                .zip(&rhs)
                .all(|(x, y)| *x == Rational::from_int(n - 1) * y.clone());
            (n, ok)
        })
        .collect();
    let propagation = other.map(|tilde| {
        let same = |n: i64| (0..=n_max).all(|k| rep.block(n, k) == tilde.block(n, k));
        let hypotheses_hold = tilde.n_max() == n_max && [-1, 0, 1].into_iter().all(same);
        let zeta = proportionality(&vacuum_image(tilde, -2), &l2);
        let propagated = match (&zeta, hypotheses_hold) {
            (Some(z), true) => {
                // L̃₋ₙ₋₁Ω = L̃₋₁L̃₋ₙΩ/(n−1), seeded with L̃₋₂Ω.
                let mut current = tilde.apply(-2, &tilde.lowest_vector());
                let mut out = vec![(2, vacuum_image(rep, -2).iter().map(|x| z.clone() * x.clone()).collect::<Vec<_>>() == current[2])];
                for n in 2..n_max as i64 {
                    let next = tilde.apply(-1, &current);
                    let scale = Rational::from_int(1) / Rational::from_int(n - 1);
                    current = next.iter().map(|lvl| lvl.iter().map(|x| x.clone() * scale.clone()).collect()).collect();
                    let target = (n + 1) as usize;
                    let direct = vacuum_image(tilde, -n - 1);
                    let expected: Vec<Rational> = vacuum_image(rep, -n - 1).iter().map(|x| z.clone() * x.clone()).collect();
                    out.push((n + 1, current[target] == expected && direct == expected));
                }
                out
            }
            _ => Vec::new(),
        };
        Propagation {
            hypotheses_hold,
            zeta: zeta.as_ref().map(crate::scalar::format_rational),
            propagated,
        }
    });
    Ok(VacuumPropagationReport {
        level2_dim: rep.dim(2),
        level2_spanned_by_l_minus_2: l2.iter().any(|x| !x.is_zero()),
        induction,
        propagation,
    })
}

/// `f_m(ε) = e^{−εk} − e^{−ε(k+m)}` for real `k ≥ 0`.
pub fn fm(k: f64, m: u32, eps: f64) -> f64 {
    (-eps * k).exp() - (-eps * (k + m as f64)).exp()
}

/// Maximizer and maximum of `|f_m|²` on `ε > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FmSup {
    /// `+∞` when `k = 0` (the supremum 1 is approached, not attained).
    pub eps_max: f64,
    pub sup_squared: f64,
}

pub fn fm_sup(k: f64, m: u32) -> FmSup {
    let mf = m as f64;
    if k <= 0.0 {
        return FmSup {
            eps_max: f64::INFINITY,
            sup_squared: 1.0,
        };
    }
    let ratio = k / (k + mf);
    FmSup {
        eps_max: -ratio.ln() / mf,
        sup_squared: ratio.powf(2.0 * k / mf) * (mf / (k + mf)).powi(2),
    }
}

/// `a·x − b·x` with both products made exact by fused multiply-add.
fn compensated_difference(a: f64, b: f64, x: f64) -> f64 {
    let p = a * x;
    let e = a.mul_add(x, -p);
    let q = b * x;
    let f = b.mul_add(x, -q);
    (p - q) + (e - f)
}

/// One level of a heat commutator: `R v_k = factor · Lₙ v_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatLevel {
    pub source: usize,
    pub target: usize,
    /// `e^{−ε(h+source)} − e^{−ε(h+target)}`.
    pub factor: f64,
    /// `Lₙ e^{−εL₀} − e^{−εL₀} Lₙ` on this level, entry by entry.
    pub block: DenseMatrix<f64>,
    pub mode_norm: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeatCommutator {
    pub n: i64,
    pub eps: f64,
    pub levels: Vec<HeatLevel>,
    /// Operator norm on the truncation (levels map to distinct levels).
    pub norm: f64,
}

pub fn heat_commutator(rep: &TruncatedRep<f64>, n: i64, eps: f64) -> Result<HeatCommutator> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Precondition(format!("ε must be positive and finite, got {eps}")));
    }
    if n.unsigned_abs() as usize > rep.n_max() {
        return Err(Error::Precondition(format!("|n| = {} exceeds N = {}", n.abs(), rep.n_max())));
    }
    let h = *rep.lowest_weight();
    let mut levels = Vec::new();
    for k in 0..=rep.n_max() {
        let Some(l) = rep.block(n, k) else { continue };
        let target = (k as i64 - n) as usize;
        let a = (-eps * (h + k as f64)).exp();
        let b = (-eps * (h + target as f64)).exp();
        let block = l.map(|&x| compensated_difference(a, b, x));
        let norm = block.operator_norm();
        levels.push(HeatLevel {
            source: k,
            target,
            factor: a - b,
            mode_norm: l.operator_norm(),
            block,
            norm,
        });
    }
    let norm = levels.iter().map(|l| l.norm).fold(0.0, f64::max);
    Ok(HeatCommutator { n, eps, levels, norm })
}

/// Largest relative deviation between `‖R v_k‖` and `|f_m(ε)|·‖Lₙ v_k‖`
/// over `samples` seeded Gaussian vectors per level.
pub fn heat_identity_residual(rep: &TruncatedRep<f64>, heat: &HeatCommutator, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for lvl in &heat.levels {
        let l = rep.block(heat.n, lvl.source).expect("level taken from the representation");
        if l.rows() == 0 || l.cols() == 0 {
            continue;
        }
        for _ in 0..samples {
            let v: Vec<f64> = (0..l.cols()).map(|_| StandardNormal.sample(&mut rng)).collect();
            let rv = norm2(&lvl.block.mul_vec(&v));
            let lv = norm2(&l.mul_vec(&v));
            let expected = lvl.factor.abs() * lv;
            if expected == 0.0 {
                worst = worst.max(rv);
            } else {
                worst = worst.max((rv - expected).abs() / expected);
            }
        }
    }
    worst
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `max ‖T(f)v‖ / (r̂‖f‖_{3/2}‖(1+L₀)v‖)` over seeded Gaussian vectors
/// supported on the smear's safe window (the bound holds iff this is ≤ 1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyBoundCheck {
    pub samples: usize,
    pub r_hat: f64,
    pub field_norm: f64,
    pub worst_ratio: f64,
    pub pass: bool,
}

pub fn energy_bound_check(
    rep: &TruncatedRep<f64>,
    field: &FourierField<Complex64>,
    r_hat: f64,
    samples: usize,
    seed: u64,
) -> Result<EnergyBoundCheck> {
    let t = smear(rep, field, rep.n_max())?;
    let window = t.safe_window();
    let field_norm: f64 = field.coefficients().map(|(n, c)| c.norm() * three_halves_weight(n)).sum();
    let h = *rep.lowest_weight();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let mut v = zero_graded(rep);
        let mut energy_sq = 0.0;
        for &k in window.levels() {
            for x in v[k].iter_mut() {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                *x = Complex64::new(re, im);
                energy_sq += (1.0 + h + k as f64).powi(2) * x.norm_sqr();
            }
        }
        if energy_sq == 0.0 {
            continue;
        }
        let tv = t.apply(&v);
        let tv_norm = inner(rep, &tv, &tv).re.sqrt();
        let bound = r_hat * field_norm * energy_sq.sqrt();
        let ratio = if bound > 0.0 { tv_norm / bound } else if tv_norm > 0.0 { f64::INFINITY } else { 0.0 };
        worst = worst.max(ratio);
    }
    Ok(EnergyBoundCheck {
        samples,
        r_hat,
        field_norm,
        worst_ratio: worst,
        pass: worst <= 1.0 + 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{CentralCharge, LowestWeight};
    use crate::scalar::{rational, ComplexRational};

    fn q(n: i64, d: i64) -> ComplexRational {
        Complex::new(rational(n, d), rational(0, 1))
    }

    fn vacuum(c: Rational, n: usize) -> TruncatedRep<Rational> {
        TruncatedRep::exact(&CentralCharge::new(c).unwrap(), &LowestWeight::vacuum(), n).unwrap()
    }

    #[test]
    fn constant_field_gives_l0() {
        let rep = vacuum(rational(1, 2), 4);
        let t = smear(&rep, &ExactField::constant_one(), 4).unwrap();
        for k in 0..=4 {
            let expected = rep.block(0, k).unwrap().map(complexify);
            assert_eq!(t.block(k, k).unwrap(), &expected);
        }
        assert!(!t.bias().warning);
    }

    #[test]
    fn two_cos_two_theta_on_vacuum() {
        let rep = vacuum(rational(1, 2), 4);
        let f = ExactField::from_coefficients([(2, q(1, 1)), (-2, q(1, 1))]);
        let t = smear(&rep, &f, 4).unwrap();
        let omega = lowest_complex(&rep);
        let t_omega = t.apply(&omega);
        assert_eq!(inner(&rep, &t_omega, &t_omega), q(1, 4));
        let (_, exact, checked) = t.hermiticity();
        assert!(exact && checked > 0);
    }

    #[test]
    fn cutoff_is_validated() {
        let rep = vacuum(rational(1, 2), 3);
        assert!(smear(&rep, &ExactField::mode(1), 4).is_err());
        let s = smear(&rep, &ExactField::mode(3).plus(&ExactField::mode(1)), 2).unwrap();
        assert!(s.bias().warning);
        assert_eq!(s.support(), &[1]);
    }

    #[test]
    fn vacuum_norm_examples() {
        let c = rational(7, 10);
        assert_eq!(vacuum_norm(&ExactField::mode(-2), &c), c.clone() / rational(2, 1));
        let mobius = ExactField::from_coefficients([(-1, q(3, 1)), (0, q(1, 1)), (1, q(3, 1))]);
        assert_eq!(vacuum_norm(&mobius, &c), rational(0, 1));
    }

    #[test]
    fn fm_sup_examples() {
        let s = fm_sup(1.0, 1);
        assert!((s.eps_max - 2f64.ln()).abs() < 1e-15);
        assert!((s.sup_squared - 1.0 / 16.0).abs() < 1e-16);
        assert_eq!(fm_sup(0.0, 3).sup_squared, 1.0);
    }

    #[test]
    fn commutator_of_modes() {
        let rep = vacuum(rational(1, 2), 6);
        let check = commutator_check(&rep, &ExactField::mode(2), &ExactField::mode(-2)).unwrap();
        assert!(check.exact_zero);
        assert_eq!(check.cocycle, q(1, 4));
        assert!(!check.window.is_empty());
    }
}
