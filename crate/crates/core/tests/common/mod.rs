//! Shared helpers for the statistical test suites: an adaptive Simpson
//! integrator used as an independent oracle for the special-function and
//! residual-mass closed forms, plus small counting utilities.
#![allow(dead_code)]

use std::collections::HashMap;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute
/// tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    simpson_step(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Three binomial standard errors around probability `p` at sample size
/// `n`, the acceptance band used throughout the suites.
pub fn three_sigma_band(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Count occurrences of hashable draws.
pub fn count_draws<K, I>(draws: I) -> HashMap<K, u64>
where
    K: std::hash::Hash + Eq,
    I: IntoIterator<Item = K>,
{
    let mut counts = HashMap::new();
    for d in draws {
        *counts.entry(d).or_insert(0) += 1;
    }
    counts
}

/// Bin values in `[0, 1)` into `bins` equal-width cells, for coarse
/// two-sample comparisons of continuous laws.
pub fn bin_unit_interval(values: impl IntoIterator<Item = f64>, bins: usize) -> HashMap<usize, u64> {
    let mut counts = HashMap::new();
    for v in values {
        let b = ((v * bins as f64) as usize).min(bins - 1);
        *counts.entry(b).or_insert(0) += 1;
    }
    counts
}
