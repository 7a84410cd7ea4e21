//! Model parameters and room labeling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of an `n`-dimensional Poisson grid with Cox transmitters.
///
/// Axis `i` carries a wall process of intensity `mu[i]` (planes
/// perpendicular to the axis) and each room edge parallel to the axis
/// carries `2^{n-1}` independent transmitter processes of intensity
/// `lambda[i]` each. `k[i]` is the power penetration loss of one wall
/// perpendicular to axis `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub n: usize,
    pub mu: Vec<f64>,
    pub lambda: Vec<f64>,
    pub k: Vec<f64>,
}

impl GridParams {
    pub fn new(mu: Vec<f64>, lambda: Vec<f64>, k: Vec<f64>) -> Result<Self> {
        let p = GridParams { n: mu.len(), mu, lambda, k };
        p.validate()?;
        Ok(p)
    }

    /// Symmetric parameters: `mu_i = mu`, `lambda_i = lambda`, `k_i = k` on all axes.
    pub fn symmetric(n: usize, mu: f64, lambda: f64, k: f64) -> Result<Self> {
        Self::new(vec![mu; n], vec![lambda; n], vec![k; n])
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!("dimension must be >= 2, got {}", self.n)));
        }
        if self.mu.len() != self.n || self.lambda.len() != self.n || self.k.len() != self.n {
            return Err(Error::InvalidParams(format!(
                "mu/lambda/k must all have length n={}, got {}/{}/{}",
                self.n,
                self.mu.len(),
                self.lambda.len(),
                self.k.len()
            )));
        }
        for (i, &m) in self.mu.iter().enumerate() {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::InvalidParams(format!("mu[{i}] must be finite and > 0, got {m}")));
            }
        }
        for (i, &l) in self.lambda.iter().enumerate() {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::InvalidParams(format!("lambda[{i}] must be finite and >= 0, got {l}")));
            }
        }
        for (i, &k) in self.k.iter().enumerate() {
            if !(0.0..1.0).contains(&k) {
                return Err(Error::InvalidParams(format!("k[{i}] must lie in [0, 1), got {k}")));
            }
        }
        Ok(())
    }

    /// Density ratio `r_i = lambda_i / mu_i`.
    pub fn ratio(&self, i: usize) -> f64 {
        self.lambda[i] / self.mu[i]
    }

    pub fn ratios(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.ratio(i)).collect()
    }

    /// `2^{n-1}`, the number of transmitter processes per edge.
    pub fn edge_mult(&self) -> f64 {
        (1u64 << (self.n - 1)) as f64
    }

    pub fn k_max(&self) -> f64 {
        self.k.iter().cloned().fold(0.0, f64::max)
    }

    pub fn equal_k(&self) -> Option<f64> {
        let k0 = self.k[0];
        self.k.iter().all(|&k| k == k0).then_some(k0)
    }

    pub fn require_dim(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::Dimension { expected: n, got: self.n });
        }
        Ok(())
    }
}

/// Integer room label relative to the typical room (or to the zero cell).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoomIndex(pub Vec<i64>);

impl RoomIndex {
    pub fn zero(n: usize) -> Self {
        RoomIndex(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&i| i == 0)
    }

    /// Graph distance to the typical room: total number of separating walls.
    pub fn l1(&self) -> u64 {
        self.0.iter().map(|&i| i.unsigned_abs()).sum()
    }

    /// Power attenuation from this room to the typical room, `prod_i K_i^{|i_i|}`.
    /// Uses the convention `0^0 = 1`.
    pub fn attenuation(&self, params: &GridParams) -> f64 {
        self.0
            .iter()
            .zip(&params.k)
            .map(|(&ix, &k)| pow_abs(k, ix))
            .product()
    }
}

/// `k^{|e|}` with `0^0 = 1`.
pub(crate) fn pow_abs(k: f64, e: i64) -> f64 {
    let e = e.unsigned_abs();
    if e == 0 {
        1.0
    } else {
        k.powi(e.min(i32::MAX as u64) as i32)
    }
}

/// Channel fading selector for the path gain model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelModel {
    /// `h = 1` deterministically.
    NoFading,
    /// `h` drawn fresh per link as a unit-mean exponential.
    Rayleigh,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_params() {
        assert!(GridParams::new(vec![1.0, 1.0], vec![0.1, 0.1], vec![0.5, 1.0]).is_err());
        assert!(GridParams::new(vec![1.0, 0.0], vec![0.1, 0.1], vec![0.5, 0.5]).is_err());
        assert!(GridParams::new(vec![1.0, 1.0], vec![-0.1, 0.1], vec![0.5, 0.5]).is_err());
        assert!(GridParams::new(vec![1.0], vec![0.1], vec![0.5]).is_err());
        assert!(GridParams::symmetric(3, 1.0, 0.1, 0.3).is_ok());
    }

    #[test]
    fn attenuation_convention_zero_to_zero() {
        let p = GridParams::symmetric(3, 1.0, 0.1, 0.0).unwrap();
        // 0^0 = 1: the in-room link is unattenuated even at K = 0.
        assert_eq!(RoomIndex::zero(3).attenuation(&p), 1.0);
        assert_eq!(RoomIndex(vec![1, 0, 0]).attenuation(&p), 0.0);
    }

    #[test]
    fn attenuation_product() {
        let p = GridParams::new(vec![1.0, 1.0, 1.0], vec![0.1; 3], vec![0.5, 0.1, 0.2]).unwrap();
        let a = RoomIndex(vec![2, -1, 0]).attenuation(&p);
        assert!((a - 0.5f64.powi(2) * 0.1).abs() < 1e-15);
    }
}
