use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::model::FourierModel;
use crate::{KamError, Result};

/// Weighted coefficient bound for the sup norm on the complex strip `|Im theta| <= rho`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripNorm {
    pub rho: f64,
    pub value: f64,
}

impl FourierModel {
    /// `max_i sum_j sum_k |c_k,ij| e^{2 pi |k|_1 rho}`.
    pub fn strip_norm(&self, rho: f64) -> Result<f64> {
        self.weighted_sum(rho, false)
    }

    /// Same bound for the transpose (largest column sum).
    pub fn strip_norm_transpose(&self, rho: f64) -> Result<f64> {
        self.weighted_sum(rho, true)
    }

    pub fn strip(&self, rho: f64) -> Result<StripNorm> {
        Ok(StripNorm { rho, value: self.strip_norm(rho)? })
    }

    fn weighted_sum(&self, rho: f64, transpose: bool) -> Result<f64> {
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(KamError::Invalid(format!("strip width {rho} must be finite and nonnegative")));
        }
        let space = self.space();
        let (rows, cols) = self.shape();
        let lines = if transpose { cols } else { rows };
        let mut sums = vec![0.0f64; lines];
        let mut k = vec![0i64; space.dim()];
        for m in 0..space.n_modes() {
            space.mode_into(m, &mut k);
            let order: i64 = k.iter().map(|v| v.abs()).sum();
            let w = (2.0 * PI * order as f64 * rho).exp();
            for i in 0..rows {
                for j in 0..cols {
                    let c = self.coefficients()[self.offset(m, i, j)].norm();
                    if c > 0.0 {
                        sums[if transpose { j } else { i }] += c * w;
                    }
                }
            }
        }
        let v = sums.into_iter().fold(0.0, f64::max);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(KamError::NormOverflow { rho })
        }
    }

    /// Coefficient mass in the outer quarter of the mode box along any axis,
    /// a cheap indicator of truncation quality.
    pub fn spectral_tail(&self) -> f64 {
        let space = self.space();
        let cut = space.cutoffs();
        let mut k = vec![0i64; space.dim()];
        let mut tail = 0.0;
        for m in 0..space.n_modes() {
            space.mode_into(m, &mut k);
            let outer = k.iter().zip(cut).any(|(&kl, &ml)| 4 * kl.unsigned_abs() as usize > 3 * ml);
            if outer {
                let rc = self.rows() * self.cols();
                tail += self.coefficients()[m * rc..(m + 1) * rc].iter().map(|c| c.norm()).sum::<f64>();
            }
        }
        tail
    }
}
