//! Adaptive Simpson quadrature for the handful of one-dimensional
//! integrals in the analytic layer.

use crate::error::{Error, Result};

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::Quadrature(format!("bad interval [{a}, {b}]")));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut depth_exceeded = false;
    let v = rec(f, a, b, fa, fm, fb, whole, tol, 48, &mut depth_exceeded);
    if depth_exceeded {
        return Err(Error::Quadrature(format!(
            "failed to reach tolerance {tol} on [{a}, {b}]"
        )));
    }
    Ok(v)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    depth_exceeded: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        *depth_exceeded = true;
        return left + right;
    }
    rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, depth_exceeded)
        + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, depth_exceeded)
}
