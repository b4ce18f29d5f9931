//! Subcommand bodies. Each returns whether its checks passed.

use std::fs::File;

use anyhow::{Context, Result};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use virasoro_core::bounds::{decay_report, default_mollifier_grid, estimate_q, estimate_r, mollifier_report, BoundReport};
use virasoro_core::fields::{norm_three_halves, ExactField};
use virasoro_core::scalar::format_rational;
use virasoro_core::smear::{
    commutator_check, decomposition_check, energy_bound_check, fm_sup, vacuum_propagation_checks, rationalize, vacuum_norm_matrix,
    CheckRecord,
};
use virasoro_core::{
    build_piecewise_mobius, smear, vacuum_norm, CentralCharge, Corner, FourierField, FourierSource, LowestWeight, Mode,
    MollifierFamily, PiecewiseMobiusField, Rational, RepOptions, TruncatedRep, Verdict,
};

use crate::cache::{self, CacheStatus};
use crate::config::RunConfig;
use crate::exit::UsageError;
use crate::output::{decimal, Writer};
use crate::suite::{fm_grid_sup, radius_cap, random_real_field, run_suite_with, SuiteOptions};

const FLOAT_TOLERANCE: f64 = 1e-10;

fn rep_options(cfg: &RunConfig) -> RepOptions {
    RepOptions {
        // A mutated central term distorts the Gram forms; keep them to expose the relations.
        allow_indefinite: cfg.fault_cocycle_den.is_some(),
        cocycle_denominator: cfg.fault_cocycle_den.unwrap_or(12),
    }
}

fn exact_rep(cfg: &RunConfig) -> Result<(TruncatedRep<Rational>, CacheStatus)> {
    let opts = rep_options(cfg);
    let build = || TruncatedRep::exact_with(&CentralCharge::new(cfg.c.clone())?, &LowestWeight::new(cfg.h.clone())?, cfg.n, &opts);
    let Some(dir) = &cfg.cache else {
        return Ok((build()?, CacheStatus::Disabled));
    };
    let key = cache::cache_key(&cfg.c, &cfg.h, cfg.n, &opts);
    if let Some(rep) = cache::load(dir, &key)? {
        return Ok((rep, CacheStatus::Hit));
    }
    let rep = build()?;
    cache::store(dir, &key, &rep)?;
    Ok((rep, CacheStatus::Miss))
}

fn float_rep(cfg: &RunConfig) -> Result<TruncatedRep<f64>> {
    Ok(TruncatedRep::float_with(
        &CentralCharge::new(cfg.c_f64())?,
        &LowestWeight::new(cfg.h_f64())?,
        cfg.n,
        &rep_options(cfg),
    )?)
}

pub fn cmd_rep(cfg: &RunConfig) -> Result<bool> {
    let mut out = Writer::new(&cfg.out)?;
    let (dims, unitary, summary, herm, cache_status, tolerance) = match cfg.mode {
        Mode::Exact => {
            let (rep, status) = exact_rep(cfg)?;
            (rep.level_dims().to_vec(), rep.is_unitary(), rep.relation_summary(3), rep.hermiticity_summary(), status, 0.0)
        }
        Mode::Float => {
            let rep = float_rep(cfg)?;
            (rep.level_dims().to_vec(), rep.is_unitary(), rep.relation_summary(3), rep.hermiticity_summary(), CacheStatus::Disabled, FLOAT_TOLERANCE)
        }
    };
    let relations_ok = match cfg.mode {
        Mode::Exact => summary.nonzero_windows == 0,
        Mode::Float => summary.max_residual <= tolerance,
    };
    let herm_ok = match cfg.mode {
        Mode::Exact => herm.1,
        Mode::Float => herm.0 <= tolerance,
    };
    let pass = relations_ok && herm_ok;
    let report = json!({
        "config": cfg.summary(),
        "level_dims": dims,
        "unitary": unitary,
        "relations": {
            "max_mode": 3,
            "windows_checked": summary.windows_checked,
            "nonzero_windows": summary.nonzero_windows,
            "max_residual": summary.max_residual,
            "tolerance": tolerance,
            "pass": relations_ok,
        },
        "hermiticity": {"max_residual": herm.0, "exact": herm.1, "pass": herm_ok},
        "cache": cache_status.as_str(),
        "pass": pass,
    });
    out.write_report("rep.json", "rep", report)?;
    let mut csv = String::from("level,dim\n");
    for (k, d) in dims.iter().enumerate() {
        csv += &format!("{k},{d}\n");
    }
    out.write_text("rep_levels.csv", &csv)?;
    println!("level_dims = {dims:?}");
    println!(
        "relations: {} of {} windows nonzero, max residual {:.3e} -> {}",
        summary.nonzero_windows,
        summary.windows_checked,
        summary.max_residual,
        verdict(relations_ok)
    );
    println!("hermiticity: max residual {:.3e} -> {}", herm.0, verdict(herm_ok));
    println!("cache: {}", cache_status.as_str());
    Ok(pass)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// A field named on the command line.
pub enum FieldSpec {
    Piecewise(PiecewiseMobiusField),
    Finite { id: String, field: FourierField },
}

impl FieldSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        if spec == "piecewise-mobius" {
            return Ok(Self::Piecewise(build_piecewise_mobius()));
        }
        if let Some(n) = spec.strip_prefix("mode:") {
            let n: i64 = n.trim().parse().map_err(|_| UsageError(format!("bad mode index in {spec:?}")))?;
            return Ok(Self::Finite {
                id: spec.to_string(),
                field: FourierField::mode(n),
            });
        }
        let file = File::open(spec).map_err(|e| UsageError(format!("cannot open field file {spec:?}: {e}")))?;
        let field = FourierField::read_csv(file).with_context(|| format!("reading {spec}"))?;
        let offending = field.reality_violations();
        if !offending.is_empty() {
            return Err(UsageError(format!("field in {spec} is not real: coefficient(-n) != conj(coefficient(n)) for n = {offending:?}")).into());
        }
        Ok(Self::Finite {
            id: spec.to_string(),
            field,
        })
    }

    pub fn id(&self) -> &str {
        match self {
            Self::Piecewise(_) => "piecewise-mobius",
            Self::Finite { id, .. } => id,
        }
    }

    pub fn source(&self) -> &dyn FourierSource {
        match self {
            Self::Piecewise(f) => f,
            Self::Finite { field, .. } => field,
        }
    }

    /// Coefficients on `|n| ≤ radius`.
    pub fn truncated(&self, radius: u64) -> FourierField {
        FourierField::from_source(self.source(), radius)
    }
}

fn corner_rows(f: &PiecewiseMobiusField) -> Vec<Value> {
    Corner::ALL
        .iter()
        .map(|&c| {
            let v = f.corner_value(c);
            let d1 = f.one_sided_derivatives(c, 1);
            let d2 = f.one_sided_derivatives(c, 2);
            json!({
                "corner": c.label(),
                "value_left": v.left, "value_right": v.right,
                "d1_left": d1.left, "d1_right": d1.right,
                "d2_left": d2.left, "d2_right": d2.right,
                "d2_jump": d2.jump(),
            })
        })
        .collect()
}

pub fn cmd_field(cfg: &RunConfig, spec: &str) -> Result<bool> {
    let field = FieldSpec::parse(spec)?;
    let mut out = Writer::new(&cfg.out)?;
    let src = field.source();
    let cutoff = cfg.cutoff.unwrap_or(match src.support_radius() {
        Some(r) => r.max(2),
        None => 64,
    });
    let table = field.truncated(cutoff);
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    out.write_bytes("field_coefficients.csv", csv)?;
    let norm = norm_three_halves(src, cutoff, field.id());
    let decay = decay_report(src, cutoff.max(2), field.id());
    let decay_double = decay_report(src, 2 * cutoff.max(2), field.id());
    let drift = if decay_double.estimate > 0.0 {
        (decay.estimate - decay_double.estimate).abs() / decay_double.estimate
    } else {
        0.0
    };
    let mut decay_rows: Vec<(i64, f64)> = decay.table.iter().filter_map(|c| c.mode.map(|n| (n, c.value))).collect();
    decay_rows.sort_by_key(|r| r.0);
    let mut decay_csv = String::from("n,ratio\n");
    for (n, v) in &decay_rows {
        decay_csv += &format!("{n},{v}\n");
    }
    out.write_text("field_decay.csv", &decay_csv)?;
    let mut report = json!({
        "config": cfg.summary(),
        "field": field.id(),
        "cutoff": cutoff,
        "real": src.is_real(),
        "coefficient_rows": table.coefficients().count(),
        "norm": norm,
        "decay": {
            "n_max": cutoff.max(2),
            "estimate": decay.estimate,
            "witness_n": decay.witness.as_ref().and_then(|w| w.mode),
            "estimate_double_cutoff": decay_double.estimate,
            "relative_drift": drift,
        },
    });
    let mut pass = true;
    if let FieldSpec::Piecewise(f) = &field {
        let rows = corner_rows(f);
        let mut corner_csv = String::from("corner,value_left,value_right,d1_left,d1_right,d2_left,d2_right,d2_jump\n");
        for r in &rows {
            corner_csv += &format!(
                "{},{},{},{},{},{},{},{}\n",
                r["corner"].as_str().unwrap_or(""),
                r["value_left"], r["value_right"], r["d1_left"], r["d1_right"], r["d2_left"], r["d2_right"], r["d2_jump"]
            );
        }
        out.write_text("field_corners.csv", &corner_csv)?;
        let mut samples = Vec::new();
        f.write_samples(1024, &mut samples)?;
        out.write_bytes("field_samples.csv", samples)?;
        pass = rows.iter().all(|r| {
            r["value_left"] == 0 && r["value_right"] == 0 && r["d1_left"] == r["d1_right"] && r["d2_jump"].as_i64().map(i64::abs) == Some(4)
        });
        report["corners"] = Value::Array(rows);
        println!("corners: value 0, C1, second-derivative jumps 4 -> {}", verdict(pass));
    }
    report["pass"] = json!(pass);
    out.write_report("field.json", "field", report)?;
    println!("field {} cutoff {cutoff}: {} nonzero coefficients", field.id(), table.coefficients().count());
    println!(
        "3/2-norm partial sum {:.6e}, upper bound {}",
        norm.partial(),
        norm.upper_bound().map_or("unknown".to_string(), |b| format!("{b:.6e}"))
    );
    println!("decay constant {:.6} (drift to 2x cutoff {:.2e})", decay.estimate, drift);
    Ok(pass)
}

fn to_float(f: &ExactField) -> FourierField {
    FourierField::from_coefficients(
        f.coefficients()
            .map(|(n, c)| (n, Complex64::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN)))),
    )
}

pub fn cmd_smear(cfg: &RunConfig, spec: &str, pairs: usize) -> Result<bool> {
    let field = FieldSpec::parse(spec)?;
    if !field.source().is_real() {
        return Err(UsageError(format!("smearing needs a real field; {} is not real", field.id())).into());
    }
    let cutoff = cfg.cutoff.unwrap_or(cfg.n as u64);
    if cutoff as usize > cfg.n {
        return Err(UsageError(format!("cutoff {cutoff} exceeds the truncation level {}", cfg.n)).into());
    }
    let f = field.truncated(cutoff);
    let vacuum = cfg.h == Rational::from_integer(0.into());
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cap = radius_cap(cfg.n);
    // Below N = 4 no pair of nonconstant fields has a safe window.
    let pairs = if cfg.n >= 4 { pairs } else { 0 };
    let sample_pair = |rng: &mut ChaCha8Rng| {
        let a = rng.random_range(1..=cap);
        let f = random_real_field(rng, a);
        let b = rng.random_range(1..=cap);
        (f, random_real_field(rng, b))
    };
    let bias;
    match cfg.mode {
        Mode::Exact => {
            let (rep, _) = exact_rep(cfg)?;
            let fe = rationalize(&f);
            let t = smear(&rep, &fe, cutoff as usize)?;
            bias = serde_json::to_value(t.bias())?;
            let (worst, exact, _) = t.hermiticity();
            checks.push(CheckRecord::new("hermiticity", json!({}), if exact { 0.0 } else { worst.max(f64::MIN_POSITIVE) }, 0.0));
            if vacuum {
                let closed = vacuum_norm(&fe, &cfg.c);
                let matrix = vacuum_norm_matrix(&rep, &fe)?;
                let diff = (closed.clone() - matrix).to_f64().unwrap_or(f64::NAN).abs();
                checks.push(CheckRecord::new("vacuum_norm_agreement", json!({"closed_form": format_rational(&closed)}), diff, 0.0));
                checks.push(positivity("vacuum_norm_positive", closed.to_f64().unwrap_or(0.0)));
            }
            if let FieldSpec::Piecewise(pw) = &field {
                for corner in Corner::ALL {
                    let d = decomposition_check(&rep, pw, corner, 256)?;
                    let residual = if d.exact_zero { 0.0 } else { d.max_residual.max(f64::MIN_POSITIVE) };
                    checks.push(CheckRecord::new("decomposition", json!({"corner": corner.label()}), residual, 0.0));
                }
            }
            if vacuum && cfg.n >= 3 {
                let r = vacuum_propagation_checks(&rep, None)?;
                let failed = r.induction.iter().filter(|(_, ok)| !ok).count();
                checks.push(CheckRecord::new("vacuum_recursion", json!({"levels": r.induction.len()}), failed as f64, 0.0));
                let level2 = if r.level2_dim == 1 && r.level2_spanned_by_l_minus_2 { 0.0 } else { 1.0 };
                checks.push(CheckRecord::new("level2_spanned_by_l_minus_2", json!({"dim": r.level2_dim}), level2, 0.0));
            }
            for i in 0..pairs {
                let (a, b) = sample_pair(&mut rng);
                let c = commutator_check(&rep, &a, &b)?;
                let residual = if c.exact_zero && !c.window.is_empty() { 0.0 } else { c.max_residual.max(f64::MIN_POSITIVE) };
                checks.push(CheckRecord::new("commutator_realization", json!({"pair": i, "window": c.window}), residual, 0.0));
            }
        }
        Mode::Float => {
            let rep = float_rep(cfg)?;
            let t = smear(&rep, &f, cutoff as usize)?;
            bias = serde_json::to_value(t.bias())?;
            checks.push(CheckRecord::new("hermiticity", json!({}), t.hermiticity().0, FLOAT_TOLERANCE));
            if vacuum {
                let closed = vacuum_norm(&f, &cfg.c_f64());
                let matrix = vacuum_norm_matrix(&rep, &f)?;
                checks.push(CheckRecord::new("vacuum_norm_agreement", json!({"closed_form": closed}), (closed - matrix).abs(), 1e-8));
                checks.push(positivity("vacuum_norm_positive", closed));
            }
            if rep.is_unitary() {
                let r_hat = estimate_r(&rep).estimate.sqrt();
                let e = energy_bound_check(&rep, &f, r_hat, 200, cfg.seed)?;
                checks.push(CheckRecord::new("energy_bound", json!({"r_hat": r_hat, "samples": e.samples}), e.worst_ratio, 1.0 + 1e-12));
            }
            for i in 0..pairs {
                let (a, b) = sample_pair(&mut rng);
                let c = commutator_check(&rep, &to_float(&a), &to_float(&b))?;
                let residual = if c.window.is_empty() { f64::INFINITY } else { c.max_residual };
                checks.push(CheckRecord::new("commutator_realization", json!({"pair": i, "window": c.window}), residual, 1e-8));
            }
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    let mut out = Writer::new(&cfg.out)?;
    let mut csv = String::from("check,parameters,residual,tolerance,pass\n");
    for c in &checks {
        csv += &format!("{},\"{}\",{},{},{}\n", c.check, c.parameters.to_string().replace('"', "\"\""), decimal(c.residual), decimal(c.tolerance), c.pass);
    }
    out.write_text("smear_checks.csv", &csv)?;
    out.write_report(
        "smear.json",
        "smear",
        json!({
            "config": cfg.summary(),
            "field": field.id(),
            "cutoff": cutoff,
            "truncation_bias": bias,
            "checks": checks,
            "pass": pass,
        }),
    )?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.check.as_str()).collect();
    println!("smear {} at cutoff {cutoff}: {} checks, {} failed {failed:?} -> {}", field.id(), checks.len(), failed.len(), verdict(pass));
    Ok(pass)
}

fn positivity(name: &str, value: f64) -> CheckRecord {
    // Residual 0 when positive; otherwise how far from positive.
    CheckRecord::new(name, json!({"value": value}), if value > 0.0 { 0.0 } else { 1.0 - value }, 0.0)
}

fn table_free(report: &BoundReport) -> Value {
    let mut v = report.to_json();
    if let Some(obj) = v.as_object_mut() {
        obj.remove("table");
    }
    v
}

pub fn cmd_bounds(cfg: &RunConfig, mollifier: bool, fm_max: u32) -> Result<bool> {
    let rep = float_rep(cfg)?;
    let r = estimate_r(&rep);
    let q = estimate_q(&rep, &cfg.eps_grid, &r)?;
    let mut out = Writer::new(&cfg.out)?;
    let mut buf = Vec::new();
    r.write_csv(&mut buf)?;
    out.write_bytes("bounds_r.csv", buf)?;
    let mut buf = Vec::new();
    q.write_csv(&mut buf)?;
    out.write_bytes("bounds_q.csv", buf)?;

    let mut by_mode: std::collections::BTreeMap<i64, f64> = std::collections::BTreeMap::new();
    for c in r.evaluated() {
        if let Some(n) = c.mode {
            let e = by_mode.entry(n).or_insert(0.0);
            *e = e.max(c.value);
        }
    }
    let mut csv = String::from("n,ratio\n");
    for (n, v) in &by_mode {
        csv += &format!("{n},{v}\n");
    }
    out.write_text("bounds_r_by_mode.csv", &csv)?;

    let mut fm_rows = Vec::new();
    let mut fm_csv = String::from("k,m,eps_max,sup_squared,grid_sup_squared,relative_error\n");
    let mut fm_worst = 0.0_f64;
    for k in 0..=fm_max {
        for m in 1..=fm_max {
            let s = fm_sup(k as f64, m);
            let g = fm_grid_sup(k as f64, m);
            let rel = (s.sup_squared - g).abs() / s.sup_squared;
            fm_worst = fm_worst.max(rel);
            fm_csv += &format!("{k},{m},{},{},{g},{rel}\n", s.eps_max, s.sup_squared);
            if k <= 2 && m <= 2 {
                fm_rows.push(json!({"k": k, "m": m, "eps_max": s.eps_max, "sup_squared": s.sup_squared, "grid": g}));
            }
        }
    }
    out.write_text("bounds_fm.csv", &fm_csv)?;
    let fm_ok = fm_worst <= 1e-6;
    let chain_ok = q.verdict == Verdict::Pass;

    let mut report = json!({
        "config": cfg.summary(),
        "r": table_free(&r),
        "q": table_free(&q),
        "chain": {"q": q.estimate, "three_r_squared": 3.0 * r.estimate, "pass": chain_ok},
        "fm_cross_check": {"max_index": fm_max, "worst_relative_error": fm_worst, "tolerance": 1e-6, "pass": fm_ok, "sample_rows": fm_rows},
    });
    let mut mollifier_ok = true;
    if mollifier {
        let m = mollifier_report(&build_piecewise_mobius(), &MollifierFamily::fejer(), &default_mollifier_grid(), "piecewise-mobius")?;
        let mut csv = String::from("k,norm\n");
        for c in &m.table {
            csv += &format!("{},{}\n", c.k.unwrap_or(0), c.value);
        }
        out.write_text("bounds_mollifier.csv", &csv)?;
        mollifier_ok = m.verdict == Verdict::Pass && m.extra["monotone"] == json!(true);
        println!(
            "mollifier: first k below 1e-3 = {}, value at k_max {:.3e} -> {}",
            m.extra["first_k_below_target"], m.extra["final_value"].as_f64().unwrap_or(f64::NAN), verdict(mollifier_ok)
        );
        report["mollifier"] = table_free(&m);
    }
    let pass = chain_ok && fm_ok && mollifier_ok;
    report["pass"] = json!(pass);
    out.write_report("bounds.json", "bounds", report)?;
    println!("r^2 = {:.6} (r = {:.6}) at witness {:?}", r.estimate, r.estimate.sqrt(), r.witness.as_ref().map(|w| (w.level, w.mode)));
    println!("q = {:.6} vs 3 r^2 = {:.6} -> {}", q.estimate, 3.0 * r.estimate, verdict(chain_ok));
    for w in &q.warnings {
        println!("warning: {w}");
    }
    println!("f_m supremum cross-check up to {fm_max}: worst relative error {fm_worst:.2e} -> {}", verdict(fm_ok));
    Ok(pass)
}

pub fn cmd_check_all(cfg: &RunConfig, only: Option<Vec<u8>>) -> Result<bool> {
    if let Some(ids) = &only {
        if let Some(bad) = ids.iter().find(|&&i| !(1..=10).contains(&i)) {
            return Err(UsageError(format!("no criterion {bad}; criteria are numbered 1 to 10")).into());
        }
    }
    let opts = SuiteOptions {
        mode: cfg.mode,
        n: cfg.n,
        seed: cfg.seed,
        fault_cocycle_den: cfg.fault_cocycle_den,
        only,
    };
    let report = run_suite_with(&opts, |r| println!("{r}"));
    let pass = report.all_pass();
    let failed = report.results.iter().filter(|r| !r.pass).count();
    println!(
        "{} of {} criteria passed in {:.1}s -> {}",
        report.results.len() - failed,
        report.results.len(),
        report.total_seconds,
        verdict(pass)
    );
    let mut out = Writer::new(&cfg.out)?;
    out.write_report("check_all.json", "check-all", json!({"config": cfg.summary(), "suite": report.to_json()}))?;
    Ok(pass)
}
