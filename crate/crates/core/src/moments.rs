//! Closed-form interference moments in the typical room and at the
//! typical user, spatial correlation, and the correlated-vs-uncorrelated
//! comparison in 3-D.
//!
//! All expressions are exact functions of the density ratios
//! `r_i = lambda_i / mu_i` and the penetration losses `K_i`; replacing
//! `(lambda, mu)` by `(c lambda, c mu)` leaves every output unchanged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{pow_abs, GridParams, RoomIndex};
use crate::quad::adaptive_simpson;

/// First/second-moment summary for one room pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean: f64,
    pub variance: f64,
    /// Covariance with the room named in the query, if one was given.
    pub covariance: Option<f64>,
    pub corr_coeff: Option<f64>,
}

/// Both bilateral geometric sums of the appendix lemma:
/// `S1 = sum_{i in Z} K^{|i| + |i-k|}` and
/// `S2 = sum_{i != i'} K^{|i| + |i'-k|}`.
pub fn geom_sums(k_loss: f64, k: u64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&k_loss) {
        return Err(Error::InvalidParams(format!("K must lie in [0, 1), got {k_loss}")));
    }
    let s1 = pow_abs(k_loss, k as i64) * (k as f64 + (1.0 + k_loss * k_loss) / (1.0 - k_loss * k_loss));
    let full = (1.0 + k_loss) / (1.0 - k_loss);
    Ok((s1, full * full - s1))
}

/// `a_i = ((1+K_i)/(1-K_i))^2`.
fn a_coeff(k: f64) -> f64 {
    let g = (1.0 + k) / (1.0 - k);
    g * g
}

/// `b_i(x) = K_i^{|x|} (|x| + (1+K_i^2)/(1-K_i^2))`.
fn b_coeff(k: f64, x: i64) -> f64 {
    pow_abs(k, x) * (x.unsigned_abs() as f64 + (1.0 + k * k) / (1.0 - k * k))
}

/// Mean interference observed in the typical room (no fading).
pub fn mean_room(params: &GridParams) -> f64 {
    let r_sum: f64 = params.ratios().iter().sum();
    let leak: f64 = params.k.iter().map(|&k| (1.0 + k) / (1.0 - k)).product();
    params.edge_mult() * r_sum * leak
}

/// Covariance of the interference between the typical room and `room`.
///
/// The `(sum_j r_j)^2` terms of the joint moment cancel against the
/// squared mean algebraically, so the covariance is evaluated without
/// subtraction and is exact for distant rooms.
pub fn covariance_room(params: &GridParams, room: &RoomIndex) -> Result<f64> {
    check_room(params, room)?;
    let em = params.edge_mult();
    let r_sum: f64 = params.ratios().iter().sum();
    let b_prod: f64 = (0..params.n).map(|i| b_coeff(params.k[i], room.0[i])).product();
    let a_prod: f64 = params.k.iter().map(|&k| a_coeff(k)).product();
    let cross: f64 = (0..params.n)
        .map(|j| {
            let r = params.ratio(j);
            r * r * b_coeff(params.k[j], room.0[j]) / a_coeff(params.k[j])
        })
        .sum();
    Ok(em * r_sum * b_prod + em * em * a_prod * cross)
}

/// Joint moment `E[I_0 I_room]` (no fading).
pub fn joint_moment_room(params: &GridParams, room: &RoomIndex) -> Result<f64> {
    let mean = mean_room(params);
    Ok(covariance_room(params, room)? + mean * mean)
}

/// Variance of the interference observed in the typical room.
pub fn variance_room(params: &GridParams) -> f64 {
    covariance_room(params, &RoomIndex::zero(params.n)).expect("zero room is always valid")
}

/// Correlation coefficient between the typical room and `room`.
pub fn corr_coeff(params: &GridParams, room: &RoomIndex) -> Result<f64> {
    let var = variance_room(params);
    if var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(covariance_room(params, room)? / var)
}

/// Mean interference observed at the typical user (no fading).
///
/// Exceeds `mean_room` whenever some `lambda_i > 0`: the zero cell is
/// size-biased (Feller's paradox).
pub fn mean_user(params: &GridParams) -> f64 {
    let leak: f64 = params.k.iter().map(|&k| (1.0 + k) / (1.0 - k)).product();
    let r_sum: f64 = (0..params.n)
        .map(|j| params.ratio(j) * 2.0 / (1.0 + params.k[j]))
        .sum();
    params.edge_mult() * leak * r_sum
}

/// Mean interference at the typical user under the 3-D *uncorrelated*
/// shadowing model.
///
/// Evaluated through the Campbell integral
/// `lambda_j int exp(-mu_j |x| (1 - K_j)) dx` by numerical quadrature, so
/// its equality with [`mean_user`] is a genuine cross-check rather than
/// an alias.
pub fn uncorr_mean_user_3d(params: &GridParams) -> Result<f64> {
    params.require_dim(3)?;
    let mut total = 0.0;
    for j in 0..3 {
        if params.lambda[j] == 0.0 {
            continue;
        }
        let mu = params.mu[j];
        let k = params.k[j];
        let rate = mu * (1.0 - k);
        // Split at 0 by symmetry; integrate far enough that the tail is
        // below the quadrature tolerance.
        let upper = 45.0 / rate;
        let half = adaptive_simpson(&|x: f64| (-rate * x).exp(), 0.0, upper, 1e-13)?;
        let campbell = params.lambda[j] * 2.0 * half;
        let leak: f64 = (0..3)
            .filter(|&q| q != j)
            .map(|q| (1.0 + params.k[q]) / (1.0 - params.k[q]))
            .product();
        total += params.edge_mult() * campbell * leak;
    }
    Ok(total)
}

/// Variance of the interference at the typical user, 3-D correlated case.
pub fn var_user_corr_3d(params: &GridParams) -> Result<f64> {
    params.require_dim(3)?;
    let leak: f64 = params.k.iter().map(|&k| (1.0 + k) / (1.0 - k)).product();
    let first: f64 = (0..3)
        .map(|j| {
            let k = params.k[j];
            let r = params.ratio(j);
            32.0 * (1.0 - k) / (1.0 + k).powi(3) * r * r
        })
        .sum();
    let mixed: f64 = params.k.iter().map(|&k| (1.0 + k * k) / (1.0 - k * k)).product();
    let second: f64 = (0..3)
        .map(|j| 8.0 / (1.0 + params.k[j] * params.k[j]) * params.ratio(j))
        .sum();
    Ok(leak * leak * first + mixed * second)
}

/// Variance of the interference at the typical user, 3-D uncorrelated case.
pub fn var_user_uncorr_3d(params: &GridParams) -> Result<f64> {
    params.require_dim(3)?;
    let mixed: f64 = params.k.iter().map(|&k| (1.0 + k * k) / (1.0 - k * k)).product();
    let sum: f64 = (0..3)
        .map(|j| {
            let k = params.k[j];
            params.ratio(j) * (1.0 + k) / (1.0 + k * k)
        })
        .sum();
    Ok(4.0 * mixed * sum)
}

/// Closed-form ratio `Var[I_cor] / Var[I_unc]` in the regime
/// `lambda_2 = lambda_3 = 0`.
pub fn variance_ratio_3d(params: &GridParams) -> Result<f64> {
    params.require_dim(3)?;
    if params.lambda[1] != 0.0 || params.lambda[2] != 0.0 {
        return Err(Error::Precondition(
            "variance ratio closed form requires lambda_2 = lambda_3 = 0".into(),
        ));
    }
    let k1 = params.k[0];
    let factor: f64 = (1..3)
        .map(|q| {
            let k = params.k[q];
            (1.0 + k).powi(3) / ((1.0 - k) * (1.0 + k * k))
        })
        .product();
    Ok(2.0 / (1.0 + k1) * (1.0 + 4.0 * params.ratio(0) * factor))
}

/// Mean/variance/correlation bundle for one queried room.
pub fn moment_report(params: &GridParams, room: Option<&RoomIndex>) -> Result<MomentReport> {
    let mean = mean_room(params);
    let variance = variance_room(params);
    let covariance = room.map(|r| covariance_room(params, r)).transpose()?;
    let corr_coeff = match (covariance, variance) {
        (Some(_), v) if v == 0.0 => return Err(Error::ZeroVariance),
        (Some(c), v) => Some(c / v),
        (None, _) => None,
    };
    Ok(MomentReport { mean, variance, covariance, corr_coeff })
}

fn check_room(params: &GridParams, room: &RoomIndex) -> Result<()> {
    if room.dim() != params.n {
        return Err(Error::Dimension { expected: params.n, got: room.dim() });
    }
    Ok(())
}
