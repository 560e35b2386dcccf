//! 1D quadrature helpers: adaptive Simpson for one-off integrals and
//! composite cumulative Simpson for table construction.

use crate::error::{Error, Result};

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> (f64, bool) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 {
        return (left + right + delta / 15.0, false);
    }
    if delta.abs() <= 15.0 * tol {
        return (left + right + delta / 15.0, true);
    }
    let (lv, lok) = adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    let (rv, rok) = adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    (lv + rv, lok && rok)
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    let (value, converged) = adapt(&f, a, b, fa, fm, fb, whole, tol, 48);
    if !converged {
        return Err(Error::QuadratureDiverged(format!(
            "adaptive Simpson on [{a}, {b}] did not reach tolerance {tol:.1e}"
        )));
    }
    Ok(value)
}

/// Composite Simpson with `n` equal intervals (midpoint refinement).
pub fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = crate::kahan::KahanSum::new();
    for i in 0..n {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        acc.add(simpson(f(x0), f(0.5 * (x0 + x1)), f(x1), h));
    }
    acc.value()
}

/// Cumulative composite Simpson: returns the antiderivative sampled on the
/// `n + 1` uniform nodes of `[a, b]`, starting from 0 at `a`.
pub fn cumulative_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = crate::kahan::KahanSum::new();
    out.push(0.0);
    let mut f0 = f(a);
    for i in 0..n {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        let f1 = f(x1);
        acc.add(simpson(f0, f(0.5 * (x0 + x1)), f1, h));
        out.push(acc.value());
        f0 = f1;
    }
    out
}
