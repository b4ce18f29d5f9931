//! Adaptive Gauss-Legendre quadrature for smooth complex integrands.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::Complex64;

const ORDER: usize = 20;
const MAX_PANELS: usize = 2000;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        out
    })
}

fn fixed(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> Complex64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule()
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &(x, w)| acc + f(mid + half * x) * (w * half))
}

/// Integral of `f` over `[a, b]` with absolute error estimate at most `tol`.
///
/// Globally adaptive: the interval with the largest local error estimate
/// (difference between one panel and its two halves) is bisected until the
/// summed estimate drops below `tol`. Fails with the achieved estimate once
/// the panel budget is exhausted.
pub fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Result<(Complex64, f64)> {
    let mut panels = vec![panel(&f, a, b)];
    loop {
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if err <= tol || panels.len() >= MAX_PANELS {
            let value = panels.iter().fold(Complex64::new(0.0, 0.0), |acc, p| acc + p.value);
            if err > tol {
                return Err(Error::Quadrature {
                    achieved: err,
                    requested: tol,
                });
            }
            return Ok((value, err));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .expect("nonempty");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(panel(&f, p.a, mid));
        panels.push(panel(&f, mid, p.b));
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

fn panel(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> Panel {
    let mid = 0.5 * (a + b);
    let whole = fixed(f, a, b);
    let halves = fixed(f, a, mid) + fixed(f, mid, b);
    Panel {
        a,
        b,
        value: halves,
        err: (halves - whole).norm(),
    }
}
