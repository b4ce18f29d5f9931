//! The ten acceptance criteria, each runnable on its own.

use std::fmt;
use std::time::Instant;

use anyhow::{ensure, Result};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use virasoro_core::bounds::{
    decay_report, default_eps_grid, default_mollifier_grid, estimate_q, estimate_r, log_grid, mollifier_report,
};
use virasoro_core::fields::{ExactField, FourierField, MollifierFamily};
use virasoro_core::piecewise::Corner;
use virasoro_core::rep::DEFAULT_TENSOR_DIM_CAP;
use virasoro_core::scalar::{format_rational, rational};
use virasoro_core::smear::{commutator_check, fm, fm_sup, heat_commutator, heat_identity_residual, vacuum_propagation_checks};
use virasoro_core::{
    build_piecewise_mobius, vacuum_norm, CentralCharge, FourierSource, LowestWeight, Mode, Rational, RepOptions,
    TruncatedRep, Verdict,
};

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "Virasoro relations on safe windows"),
    (2, "vacuum spectrum at levels 1 and 2"),
    (3, "vacuum recursion L-1 L-n = (n-1) L-n-1"),
    (4, "heat factor supremum vs grid search"),
    (5, "heat commutator chain q <= 3 r^2"),
    (6, "piecewise Mobius field"),
    (7, "nonvanishing T(f) on the vacuum"),
    (8, "Fejer mollifier convergence"),
    (9, "central charge additivity"),
    (10, "smeared commutator realization"),
];

/// Budget for the whole suite.
pub const SUITE_BUDGET_SECONDS: f64 = 600.0;

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    /// Float mode skips the rational relation sweep and reads level
    /// dimensions from float representations.
    pub mode: Mode,
    /// Truncation level for the relation sweep.
    pub n: usize,
    pub seed: u64,
    pub fault_cocycle_den: Option<i64>,
    /// Criterion ids to run; all when `None`.
    pub only: Option<Vec<u8>>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Exact,
            n: 8,
            seed: 0,
            fault_cocycle_den: None,
            only: None,
        }
    }
}

impl SuiteOptions {
    fn rep_options(&self) -> RepOptions {
        RepOptions {
            allow_indefinite: true,
            cocycle_denominator: self.fault_cocycle_den.unwrap_or(12),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {} [{:.2}s]",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub results: Vec<CriterionResult>,
    pub total_seconds: f64,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass) && self.total_seconds <= SUITE_BUDGET_SECONDS
    }

    /// Timings are left out so the JSON is reproducible.
    pub fn to_json(&self) -> Value {
        json!({
            "criteria": self.results.iter().map(|r| json!({
                "id": r.id,
                "name": r.name,
                "pass": r.pass,
                "detail": r.detail,
            })).collect::<Vec<_>>(),
            "all_pass": self.results.iter().all(|r| r.pass),
        })
    }
}

pub fn run_suite(opts: &SuiteOptions) -> SuiteReport {
    run_suite_with(opts, |_| {})
}

/// Runs the selected criteria in order, handing each result to `progress`.
pub fn run_suite_with(opts: &SuiteOptions, mut progress: impl FnMut(&CriterionResult)) -> SuiteReport {
    let start = Instant::now();
    let mut results = Vec::new();
    for (id, _) in CRITERIA {
        if opts.only.as_ref().is_some_and(|only| !only.contains(&id)) {
            continue;
        }
        let r = run_criterion(id, opts);
        progress(&r);
        results.push(r);
    }
    SuiteReport {
        results,
        total_seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_criterion(id: u8, opts: &SuiteOptions) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => relations(opts),
        2 => vacuum_spectrum(opts),
        3 => vacuum_recursion(),
        4 => heat_factor(),
        5 => heat_chain(opts.seed),
        6 => piecewise_field(),
        7 => nonvanishing(),
        8 => mollifier(),
        9 => additivity(),
        10 => commutators(opts),
        _ => Err(anyhow::anyhow!("no criterion {id}")),
    };
    let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e:#}")));
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    CriterionResult {
        id,
        name,
        pass,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

const TEST_CHARGES: [(i64, i64); 4] = [(1, 2), (7, 10), (1, 1), (2, 1)];
const FLOAT_RELATION_TOLERANCE: f64 = 1e-10;

fn relations(opts: &SuiteOptions) -> Result<(bool, String)> {
    let rep_opts = opts.rep_options();
    let mut exact_windows = 0;
    let mut exact_nonzero = 0;
    let mut float_worst = 0.0_f64;
    let mut indefinite = Vec::new();
    for &(cn, cd) in &TEST_CHARGES {
        for h in [rational(0, 1), rational(1, 2)] {
            let c = rational(cn, cd);
            if opts.mode == Mode::Exact {
                let rep = TruncatedRep::exact_with(&CentralCharge::new(c.clone())?, &LowestWeight::new(h.clone())?, opts.n, &rep_opts)?;
                if !rep.is_unitary() {
                    indefinite.push(format!("({}, {})", format_rational(&c), format_rational(&h)));
                }
                let s = rep.relation_summary(3);
                exact_windows += s.windows_checked;
                exact_nonzero += s.nonzero_windows;
            }
            let (cf, hf) = (cn as f64 / cd as f64, if h == rational(0, 1) { 0.0 } else { 0.5 });
            let rep = TruncatedRep::float_with(&CentralCharge::new(cf)?, &LowestWeight::new(hf)?, opts.n, &rep_opts)?;
            float_worst = float_worst.max(rep.relation_summary(3).max_residual);
        }
    }
    let exact_ok = opts.mode == Mode::Float || (exact_windows > 0 && exact_nonzero == 0);
    let float_ok = float_worst <= FLOAT_RELATION_TOLERANCE;
    let mut detail = format!("8 (c, h) pairs at N = {}, |m|,|n| <= 3; ", opts.n);
    if opts.mode == Mode::Exact {
        detail += &format!("exact: {exact_nonzero} of {exact_windows} windows nonzero; ");
    }
    detail += &format!("float: max residual {float_worst:.2e} (tol 1e-10)");
    if !indefinite.is_empty() {
        detail += &format!("; indefinite form kept for {}", indefinite.join(", "));
    }
    Ok((exact_ok && float_ok, detail))
}

fn vacuum_spectrum(opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut dims = Vec::new();
    for &(cn, cd) in &TEST_CHARGES {
        let d = match opts.mode {
            Mode::Exact => TruncatedRep::exact(&CentralCharge::new(rational(cn, cd))?, &LowestWeight::vacuum(), 4)?
                .level_dims()
                .to_vec(),
            Mode::Float => TruncatedRep::float(&CentralCharge::new(cn as f64 / cd as f64)?, &LowestWeight::vacuum(), 4)?
                .level_dims()
                .to_vec(),
        };
        dims.push((d[1], d[2]));
    }
    let pass = dims.iter().all(|&d| d == (0, 1));
    Ok((pass, format!("(dim level 1, dim level 2) for c = 1/2, 7/10, 1, 2: {dims:?}")))
}

fn vacuum_recursion() -> Result<(bool, String)> {
    let rep = TruncatedRep::exact(&CentralCharge::new(rational(1, 2))?, &LowestWeight::vacuum(), 12)?;
    let report = vacuum_propagation_checks(&rep, None)?;
    let failed: Vec<i64> = report.induction.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    let checked: Vec<i64> = report.induction.iter().map(|(n, _)| *n).collect();
    let covers = (2..=11).all(|n| checked.contains(&n));
    let pass = covers && failed.is_empty() && report.level2_dim == 1 && report.level2_spanned_by_l_minus_2;
    Ok((pass, format!("c = 1/2, N = 12, n = 2..11 exact; failures {failed:?}")))
}

/// `max |f_m|²` by a coarse log grid on `[1e-6, 200]` followed by a fine
/// linear grid around the best coarse point.
pub fn fm_grid_sup(k: f64, m: u32) -> f64 {
    const POINTS: usize = 4000;
    let f = |e: f64| fm(k, m, e).powi(2);
    let (a, b) = (1e-6f64.ln(), 200f64.ln());
    let coarse: Vec<f64> = (0..=POINTS).map(|i| (a + (b - a) * i as f64 / POINTS as f64).exp()).collect();
    let mut best = 0;
    for i in 1..coarse.len() {
        if f(coarse[i]) > f(coarse[best]) {
            best = i;
        }
    }
    let lo = coarse[best.saturating_sub(1)];
    let hi = coarse[(best + 1).min(POINTS)];
    (0..=POINTS).map(|i| f(lo + (hi - lo) * i as f64 / POINTS as f64)).fold(f64::NEG_INFINITY, f64::max)
}

fn heat_factor() -> Result<(bool, String)> {
    let mut worst_rel = 0.0_f64;
    let mut cap_violations = 0;
    for k in 0..=50u32 {
        for m in 1..=50u32 {
            let s = fm_sup(k as f64, m);
            let g = fm_grid_sup(k as f64, m);
            worst_rel = worst_rel.max((s.sup_squared - g).abs() / s.sup_squared);
            if s.sup_squared > (m as f64 / (k + m) as f64).powi(2) * (1.0 + 1e-15) {
                cap_violations += 1;
            }
        }
    }
    let pass = worst_rel <= 1e-6 && cap_violations == 0;
    Ok((
        pass,
        format!("k <= 50, m <= 50: worst relative error {worst_rel:.2e} (tol 1e-6); cap violations {cap_violations}"),
    ))
}

fn heat_chain(seed: u64) -> Result<(bool, String)> {
    let rep = TruncatedRep::float(&CentralCharge::new(0.5)?, &LowestWeight::vacuum(), 16)?;
    let r = estimate_r(&rep);
    let q = estimate_q(&rep, &default_eps_grid(), &r)?;
    let mut worst = 0.0_f64;
    for n in (-16i64..=16).filter(|&n| n != 0) {
        for (i, eps) in log_grid(1e-4, 20.0, 12)?.into_iter().enumerate() {
            let heat = heat_commutator(&rep, n, eps)?;
            let s = seed.wrapping_add((n + 16) as u64 * 100 + i as u64);
            worst = worst.max(heat_identity_residual(&rep, &heat, 4, s));
        }
    }
    let pass = q.verdict == Verdict::Pass && worst <= 1e-12;
    Ok((
        pass,
        format!(
            "c = 1/2, N = 16: q = {:.4} <= 3 r^2 = {:.4}; level identity worst relative residual {worst:.2e} (tol 1e-12)",
            q.estimate,
            3.0 * r.estimate
        ),
    ))
}

fn piecewise_field() -> Result<(bool, String)> {
    let f = build_piecewise_mobius();
    let mut problems = Vec::new();
    for corner in Corner::ALL {
        let v = f.corner_value(corner);
        let d1 = f.one_sided_derivatives(corner, 1);
        let d2 = f.one_sided_derivatives(corner, 2);
        if v.left != 0 || v.right != 0 {
            problems.push(format!("value at {}", corner.label()));
        }
        if d1.left != d1.right {
            problems.push(format!("first derivative at {}", corner.label()));
        }
        if d2.jump().abs() != 4 {
            problems.push(format!("second-derivative jump at {}", corner.label()));
        }
    }
    let d1_one = f.one_sided_derivatives(Corner::One, 1).left;
    if d1_one != -2 {
        problems.push(format!("derivative at 1 is {d1_one}"));
    }
    for n in -400..=400i64 {
        if f.coefficient_exact(n).is_zero() != (n.rem_euclid(4) != 2) {
            problems.push(format!("coefficient support at n = {n}"));
        }
    }
    let mut quad_worst = 0.0_f64;
    for n in -40..=40 {
        let (q, _) = f.coefficient_quadrature(n, 1e-14)?;
        quad_worst = quad_worst.max((q - f.coefficient(n)).norm());
    }
    if quad_worst > 1e-12 {
        problems.push(format!("quadrature deviation {quad_worst:.2e}"));
    }
    let m200 = decay_report(&f, 200, "piecewise-mobius").estimate;
    let m400 = decay_report(&f, 400, "piecewise-mobius").estimate;
    let drift = (m200 - m400).abs() / m400;
    if drift > 0.05 {
        problems.push(format!("decay constant drift {drift:.3}"));
    }
    Ok((
        problems.is_empty(),
        format!(
            "corners 0, C1 with jumps 4, support n = 2 mod 4 (|n| <= 400), quadrature {quad_worst:.1e}, M(200) = {m200:.6}, M(400) = {m400:.6}{}",
            if problems.is_empty() { String::new() } else { format!("; problems: {}", problems.join(", ")) }
        ),
    ))
}

fn nonvanishing() -> Result<(bool, String)> {
    let c = 0.5;
    let n = 12;
    let rep = TruncatedRep::float(&CentralCharge::new(c)?, &LowestWeight::vacuum(), n)?;
    let field = FourierField::from_source(&build_piecewise_mobius(), n as u64);
    let closed = vacuum_norm(&field, &c);
    let matrix = virasoro_core::smear::vacuum_norm_matrix(&rep, &field)?;
    let diff = (closed - matrix).abs();
    Ok((
        closed > 0.0 && diff <= 1e-8,
        format!("c = 1/2, cutoff N = {n}: closed form {closed:.12e}, matrix {matrix:.12e}, difference {diff:.1e} (tol 1e-8)"),
    ))
}

fn mollifier() -> Result<(bool, String)> {
    let f = build_piecewise_mobius();
    let r = mollifier_report(&f, &MollifierFamily::fejer(), &default_mollifier_grid(), "piecewise-mobius")?;
    let monotone = r.extra["monotone"] == json!(true);
    let first = r.extra["first_k_below_target"].as_u64();
    let last = r.extra["final_value"].as_f64().unwrap_or(f64::NAN);
    let pass = r.verdict == Verdict::Pass && monotone;
    Ok((
        pass,
        format!(
            "Fejer k = 1..2^26: monotone {monotone}, first k below 1e-3: {}, value at 2^26 {last:.3e} (includes tail bound {:.2e})",
            first.map_or("none".to_string(), |k| k.to_string()),
            r.extra["tail_bound"].as_f64().unwrap_or(f64::NAN)
        ),
    ))
}

fn additivity() -> Result<(bool, String)> {
    let vac = |c: Rational| -> Result<TruncatedRep<Rational>> {
        Ok(TruncatedRep::exact(&CentralCharge::new(c)?, &LowestWeight::vacuum(), 6)?)
    };
    let half = vac(rational(1, 2))?;
    let four_fifths = vac(rational(4, 5))?;
    let a = TruncatedRep::tensor(&half, &half, 6, DEFAULT_TENSOR_DIM_CAP)?.measure_central_charge()?;
    let b = TruncatedRep::tensor(&half, &four_fifths, 6, DEFAULT_TENSOR_DIM_CAP)?.measure_central_charge()?;
    let pass = a == rational(1, 1) && b == rational(13, 10);
    Ok((
        pass,
        format!("1/2 + 1/2 -> {}, 1/2 + 4/5 -> {} (N = 6, exact)", format_rational(&a), format_rational(&b)),
    ))
}

/// Largest field radius for random commutator pairs on a truncation at `n`.
/// Radii `a + b ≤ n/2` keep the level `n/2` inside every safe window.
pub fn radius_cap(n: usize) -> i64 {
    (n as i64 / 4).clamp(1, 3)
}

/// A real field with random rational coefficients on `|n| ≤ radius`.
pub fn random_real_field(rng: &mut ChaCha8Rng, radius: i64) -> ExactField {
    let mut pairs = vec![(0, Complex::new(rational(rng.random_range(-4..=4), 3), rational(0, 1)))];
    for n in 1..=radius {
        if n == radius || rng.random_bool(0.6) {
            let re = rational(rng.random_range(-6..=6), rng.random_range(1..=4));
            let im = rational(rng.random_range(-6..=6), rng.random_range(1..=4));
            pairs.push((n, Complex::new(re.clone(), im.clone())));
            pairs.push((-n, Complex::new(re, -im)));
        }
    }
    ExactField::from_coefficients(pairs)
}

fn commutators(opts: &SuiteOptions) -> Result<(bool, String)> {
    const PAIRS: usize = 20;
    let rep_opts = opts.rep_options();
    let vacuum = TruncatedRep::exact_with(&CentralCharge::new(rational(1, 2))?, &LowestWeight::vacuum(), 12, &rep_opts)?;
    let charged = TruncatedRep::exact_with(&CentralCharge::new(rational(1, 1))?, &LowestWeight::new(rational(1, 4))?, 8, &rep_opts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut failures = Vec::new();
    let mut windows = 0;
    for i in 0..PAIRS {
        let rep = if i % 2 == 0 { &vacuum } else { &charged };
        let cap = radius_cap(rep.n_max());
        let (a, b) = (rng.random_range(1..=cap), rng.random_range(1..=cap));
        let f = random_real_field(&mut rng, a);
        let g = random_real_field(&mut rng, b);
        ensure!(f.real() && g.real(), "sampled field is not real");
        let check = commutator_check(rep, &f, &g)?;
        windows += check.window.len();
        if check.window.is_empty() || !check.exact_zero {
            failures.push(i);
        }
    }
    Ok((
        failures.is_empty(),
        format!("{PAIRS} seeded pairs (seed {}) on c = 1/2 vacuum N = 12 and c = 1, h = 1/4, N = 8; {windows} window levels; failing pairs {failures:?}", opts.seed),
    ))
}
