use num_traits::ToPrimitive;
use virasoro_core::bounds::*;
use virasoro_core::fields::{mollify, FourierField, FourierSource, MollifierFamily};
use virasoro_core::scalar::rational;
use virasoro_core::*;

fn float_rep(c: f64, h: f64, n: usize) -> TruncatedRep<f64> {
    TruncatedRep::float(&CentralCharge::new(c).unwrap(), &LowestWeight::new(h).unwrap(), n).unwrap()
}

/// Largest eigenvalue of a small symmetric PSD matrix by power iteration.
fn top_eigenvalue(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
    let mut lambda = 0.0;
    for _ in 0..5000 {
        let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m[i][j] * v[j]).sum()).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = w.iter().map(|x| x / norm).collect::<Vec<_>>();
        let change = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        lambda = norm;
        if change < 1e-15 {
            break;
        }
    }
    lambda
}

/// `‖L_n|_k‖²` from the exact orthogonal basis: the top eigenvalue of
/// `D_k^{-1/2} Bᵀ D_t B D_k^{-1/2}`.
fn exact_mode_norm_squared(rep: &TruncatedRep<Rational>, n: i64, k: usize) -> f64 {
    let b = rep.block(n, k).unwrap();
    let t = (k as i64 - n) as usize;
    let ds: Vec<f64> = rep.norms(k).iter().map(|d| d.to_f64().unwrap()).collect();
    let dt: Vec<f64> = rep.norms(t).iter().map(|d| d.to_f64().unwrap()).collect();
    let bf = |i: usize, j: usize| b[(i, j)].to_f64().unwrap();
    let s = b.cols();
    let m: Vec<Vec<f64>> = (0..s)
        .map(|i| {
            (0..s)
                .map(|j| (0..b.rows()).map(|r| bf(r, i) * dt[r] * bf(r, j)).sum::<f64>() / (ds[i] * ds[j]).sqrt())
                .collect()
        })
        .collect();
    top_eigenvalue(&m)
}

#[test]
fn r_ratio_closed_forms_on_the_vacuum() {
    for c in [0.5, 0.7, 1.0, 2.0] {
        let rep = float_rep(c, 0.0, 6);
        // ‖L₋₂Ω‖² = c/2 over |n|³ = 8.
        assert!((r_ratio(&rep, -2, 0).unwrap() - c / 16.0).abs() < 1e-14);
        // L₂ on the unit vector at level 2 has norm² c/2; E = 2 gives 4 + 8 + 8.
        assert!((r_ratio(&rep, 2, 2).unwrap() - c / 40.0).abs() < 1e-14);
        // L₀ on level k: E²/E² = 1.
        assert!((r_ratio(&rep, 0, 4).unwrap() - 1.0).abs() < 1e-14);
        assert!(r_ratio(&rep, 0, 0).is_none());
    }
}

#[test]
fn r_ratio_matches_exact_gram_oracle() {
    let exact = TruncatedRep::exact(&CentralCharge::new(rational(7, 10)).unwrap(), &LowestWeight::new(rational(1, 10)).unwrap(), 8).unwrap();
    let rep = float_rep(0.7, 0.1, 8);
    let mut checked = 0;
    for k in 0..=8usize {
        for n in -8i64..=8 {
            let Some(ratio) = r_ratio(&rep, n, k) else { continue };
            let e = 0.1 + k as f64;
            let a = n.unsigned_abs() as f64;
            let want = exact_mode_norm_squared(&exact, n, k) / (e * e + e * a * a + a * a * a);
            assert!((ratio - want).abs() <= 1e-9 * want.max(1e-12), "k={k} n={n}: {ratio} vs {want}");
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn chain_inequality_holds_across_central_charges() {
    for (c, n) in [(0.5, 16), (0.7, 12), (1.0, 12), (2.0, 12)] {
        let rep = float_rep(c, 0.0, n);
        let r = estimate_r(&rep);
        let q = estimate_q(&rep, &default_eps_grid(), &r).unwrap();
        assert_eq!(q.verdict, Verdict::Pass, "c={c}: q={} r²={}", q.estimate, r.estimate);
        assert!(q.estimate <= 3.0 * r.estimate);
        assert!(q.estimate > 0.0);
    }
}

#[test]
fn ising_vacuum_r_is_the_energy_cell() {
    let rep = float_rep(0.5, 0.0, 16);
    let r = estimate_r(&rep);
    assert!((r.estimate - 1.0).abs() < 1e-12, "{}", r.estimate);
    assert!(r.table.iter().any(|c| c.skipped.is_some()));
    assert!(r.evaluated().count() + r.skipped().count() == r.table.len());
}

#[test]
fn r_estimate_is_nondecreasing_in_truncation() {
    for h in [0.0, 0.5] {
        let values: Vec<f64> = [4, 6, 8, 10, 12].iter().map(|&n| estimate_r(&float_rep(1.0, h, n)).estimate).collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{values:?}");
    }
}

#[test]
fn witnesses_reproduce_bit_for_bit() {
    let rep = float_rep(0.7, 0.0, 10);
    let r = estimate_r(&rep);
    let w = r.witness.clone().unwrap();
    assert_eq!(r_ratio(&rep, w.mode.unwrap(), w.level.unwrap()).unwrap().to_bits(), w.value.to_bits());
    assert_eq!(w.value, r.estimate);

    let q = estimate_q(&rep, &default_eps_grid(), &r).unwrap();
    let w = q.witness.clone().unwrap();
    let n = w.mode.unwrap();
    let norms: Vec<(usize, f64)> = (0..=rep.n_max())
        .filter_map(|k| rep.block(n, k).map(|b| (k, b.operator_norm())))
        .collect();
    let (value, level) = q_ratio(&rep, n, w.eps.unwrap(), &norms);
    assert_eq!(value.to_bits(), w.value.to_bits());
    assert_eq!(level, w.level);
    assert_eq!(q.estimate, w.value);
}

#[test]
fn q_grid_validation_and_boundary_warning() {
    let rep = float_rep(0.5, 0.0, 8);
    let r = estimate_r(&rep);
    assert!(estimate_q(&rep, &[], &r).is_err());
    assert!(estimate_q(&rep, &[0.1, -1.0], &r).is_err());
    assert!(log_grid(1.0, 0.5, 10).is_err());
    // A grid far to the left of every maximizer puts the grid maximum on its edge.
    let q = estimate_q(&rep, &log_grid(1e-6, 1e-5, 5).unwrap(), &r).unwrap();
    assert!(!q.warnings.is_empty());
    let q = estimate_q(&rep, &default_eps_grid(), &r).unwrap();
    assert!(q.estimate >= q.table.iter().map(|c| c.value).fold(0.0, f64::max));
}

#[test]
fn reports_serialize_deterministically() {
    let rep = float_rep(0.5, 0.0, 6);
    let r = estimate_r(&rep);
    assert_eq!(r.to_json().to_string(), estimate_r(&rep).to_json().to_string());
    let mut csv = Vec::new();
    r.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "level,mode,eps,k,value,skipped");
    assert_eq!(text.lines().count(), r.table.len() + 1);
}

#[test]
fn decay_constant_is_stable_between_cutoffs() {
    let f = build_piecewise_mobius();
    let a = decay_report(&f, 200, "piecewise");
    let b = decay_report(&f, 400, "piecewise");
    assert!((a.estimate - b.estimate).abs() <= 0.05 * b.estimate);
    assert!((b.estimate - 32.0 / (3.0 * std::f64::consts::PI)).abs() < 1e-12);
    assert_eq!(b.witness.unwrap().mode.unwrap().abs(), 2);
    let ratio = b.extra["last_decade_ratio"].as_f64().unwrap();
    // Largest weighted coefficient past n = 40 sits at n = 42: (8/π)·n²/(n²−1).
    let want = (8.0 * 1764.0 / 1763.0) / (32.0 / 3.0);
    assert!((ratio - want).abs() < 1e-12, "{ratio} vs {want}");
}

#[test]
fn fejer_report_matches_direct_sums() {
    let f = build_piecewise_mobius();
    let fam = MollifierFamily::fejer();
    let ks = [1u64, 4, 16, 64];
    let r = mollifier_report(&f, &fam, &ks, "piecewise").unwrap();
    let tail = r.extra["tail_bound"].as_f64().unwrap();
    for (cell, &k) in r.table.iter().zip(&ks) {
        // Direct oracle far past the report cutoff; the report value bounds it from above.
        let direct: f64 = (1..=200_000i64)
            .map(|n| (1.0 - fam.multiplier(k, n)) * 2.0 * f.coefficient(n).norm() * (1.0 + (n as f64).powf(1.5)))
            .sum();
        assert!(cell.value >= direct, "k={k}");
        assert!(cell.value - direct <= tail + 1e-12, "k={k}");
    }
}

#[test]
fn fejer_report_on_finite_fields_is_exact() {
    let g = FourierField::from_source(&build_piecewise_mobius(), 30);
    let fam = MollifierFamily::fejer();
    let ks = [2u64, 5, 9];
    let r = mollifier_report(&g, &fam, &ks, "cut").unwrap();
    for (cell, &k) in r.table.iter().zip(&ks) {
        let m = mollify(&g, &fam, k);
        let direct: f64 = (-30..=30i64)
            .map(|n| (g.coefficient(n) - m.coefficient(n)).norm() * (1.0 + (n.unsigned_abs() as f64).powf(1.5)))
            .sum();
        assert!((cell.value - direct).abs() <= 1e-13, "k={k}");
    }
}

#[test]
fn mollifier_distance_decreases_monotonically() {
    let f = build_piecewise_mobius();
    let ks: Vec<u64> = (0..=18).map(|e| 1u64 << e).collect();
    for (fam, count) in [(MollifierFamily::fejer(), ks.len()), (MollifierFamily::gaussian(), 13)] {
        let r = mollifier_report(&f, &fam, &ks[..count], "piecewise").unwrap();
        assert_eq!(r.extra["monotone"], serde_json::json!(true));
        assert!(r.table.windows(2).all(|w| w[1].value < w[0].value));
    }
}

#[test]
fn fejer_reaches_the_target_on_the_default_grid() {
    let f = build_piecewise_mobius();
    let r = mollifier_report(&f, &MollifierFamily::fejer(), &default_mollifier_grid(), "piecewise").unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.extra["first_k_below_target"], serde_json::json!(1u64 << 25));
    assert!(r.extra["final_value"].as_f64().unwrap() < MOLLIFIER_TARGET);
}

#[test]
fn mollifier_needs_metadata_for_infinite_support() {
    struct Bare;
    impl FourierSource for Bare {
        fn coefficient(&self, _n: i64) -> num_complex::Complex64 {
            num_complex::Complex64::new(0.0, 0.0)
        }
        fn is_real(&self) -> bool {
            true
        }
        fn support_radius(&self) -> Option<u64> {
            None
        }
    }
    assert!(mollifier_report(&Bare, &MollifierFamily::fejer(), &[1, 2], "bare").is_err());
    assert!(mollifier_report(&build_piecewise_mobius(), &MollifierFamily::fejer(), &[], "x").is_err());
}
