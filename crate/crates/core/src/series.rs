//! Truncation control and lattice-sum helpers shared by the analytic
//! evaluators.
//!
//! All interference transforms are products/sums over `Z^n`. Evaluation
//! truncates every index to a box `|i| <= M` and certifies the neglected
//! tail with geometric-series bounds in the penetration losses; if the
//! bound cannot be brought below `tol` by `max_radius`, evaluation reports
//! non-convergence instead of returning an uncertified value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesControl {
    /// Initial truncation radius for all lattice indices.
    pub radius: usize,
    /// Target absolute error of the certified tail.
    pub tol: f64,
    /// Hard cap on the truncation radius.
    pub max_radius: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { radius: 16, tol: 1e-9, max_radius: 4096 }
    }
}

impl SeriesControl {
    pub fn new(radius: usize, tol: f64, max_radius: usize) -> Result<Self> {
        if radius == 0 || !(tol > 0.0) || max_radius < radius {
            return Err(Error::InvalidParams(format!(
                "series control requires radius >= 1, tol > 0, max_radius >= radius (got {radius}, {tol}, {max_radius})"
            )));
        }
        Ok(SeriesControl { radius, tol, max_radius })
    }

    /// Radii to try: `radius`, doubling up to `max_radius` (inclusive).
    pub(crate) fn schedule(&self) -> impl Iterator<Item = usize> + '_ {
        let mut m = self.radius;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let cur = m.min(self.max_radius);
            if cur == self.max_radius {
                done = true;
            }
            m = m.saturating_mul(2);
            Some(cur)
        })
    }

    pub(crate) fn non_convergence(&self) -> Error {
        Error::NonConvergence { radius: self.max_radius, tol: self.tol }
    }
}

/// `sum_{i in Z} K^{|i|} = (1+K)/(1-K)`.
pub(crate) fn geom_total(k: f64) -> f64 {
    (1.0 + k) / (1.0 - k)
}

/// `sum_{|i| > m} K^{|i|} = 2 K^{m+1}/(1-K)`.
pub(crate) fn geom_tail(k: f64, m: usize) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    2.0 * k.powi(m as i32 + 1) / (1.0 - k)
}

/// Upper bound on `sum_{|i| > m} K^{|i - l|}` (shift `l`, box radius `m >= |l|`).
pub(crate) fn geom_tail_shifted(k: f64, m: usize, l: i64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    let l = l.unsigned_abs() as usize;
    debug_assert!(m >= l);
    2.0 * k.powi((m + 1 - l) as i32) / (1.0 - k)
}

/// Upper bound on `sum_{a in Z^d, some |a_q| > m} prod_q K_q^{|a_q|}`
/// (union bound over the axis that escapes the box).
pub(crate) fn box_tail(ks: &[f64], m: usize) -> f64 {
    let mut total = 0.0;
    for q in 0..ks.len() {
        let mut t = geom_tail(ks[q], m);
        for (q2, &k2) in ks.iter().enumerate() {
            if q2 != q {
                t *= geom_total(k2);
            }
        }
        total += t;
    }
    total
}

/// Visit every absolute-value class of the box `[-m, m]^d`: the callback
/// receives the vector of absolute values and the number of sign patterns
/// mapping to it (`2^{#nonzero}`).
pub(crate) fn for_each_abs_class<F: FnMut(&[u32], f64)>(d: usize, m: usize, mut f: F) {
    let mut abs = vec![0u32; d];
    fn rec<F: FnMut(&[u32], f64)>(abs: &mut [u32], q: usize, m: usize, mult: f64, f: &mut F) {
        if q == abs.len() {
            f(abs, mult);
            return;
        }
        for a in 0..=m as u32 {
            abs[q] = a;
            let mult_q = if a == 0 { 1.0 } else { 2.0 };
            rec(abs, q + 1, m, mult * mult_q, f);
        }
    }
    rec(&mut abs, 0, m, 1.0, &mut f);
}

/// Compensated accumulator for long sums.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
