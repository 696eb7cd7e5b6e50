use serde::{Deserialize, Serialize};

use crate::{KamError, Result};

/// Geometric bites `delta_j = delta0 / a^j` that shrink the strip from `rho0` to `rho_inf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripSchedule {
    pub rho0: f64,
    pub rho_inf: f64,
    pub delta0: f64,
    pub ratio_a: f64,
}

impl StripSchedule {
    pub fn new(rho0: f64, rho_inf: f64, delta0: f64) -> Result<Self> {
        if !(rho_inf > 0.0 && rho0 > rho_inf) {
            return Err(KamError::Invalid(format!("need 0 < rho_inf < rho, got rho = {rho0}, rho_inf = {rho_inf}")));
        }
        let max = (rho0 - rho_inf) / 3.0;
        if !(delta0 > 0.0 && delta0 < max) {
            return Err(KamError::Invalid(format!("delta = {delta0} outside (0, {max})")));
        }
        let ratio_a = (rho0 - rho_inf) / (rho0 - 3.0 * delta0 - rho_inf);
        Ok(Self { rho0, rho_inf, delta0, ratio_a })
    }

    /// Initial bite `(rho - rho_inf) / 6`, which minimizes `a / delta`.
    pub fn optimal(rho0: f64, rho_inf: f64) -> Result<Self> {
        Self::new(rho0, rho_inf, (rho0 - rho_inf) / 6.0)
    }

    pub fn bite(&self, j: usize) -> f64 {
        self.delta0 / self.ratio_a.powi(j as i32)
    }

    /// Strip width before step `j`: `rho0 - 3 (delta_0 + ... + delta_{j-1})`.
    pub fn strip(&self, j: usize) -> f64 {
        let q = 1.0 / self.ratio_a;
        let partial = self.delta0 * (1.0 - q.powi(j as i32)) / (1.0 - q);
        self.rho0 - 3.0 * partial
    }

    /// `rho_inf - (rho0 - 3 sum_j delta_j)`, relative to `rho_inf`.
    pub fn geometric_identity_residual(&self) -> f64 {
        let total = self.delta0 / (1.0 - 1.0 / self.ratio_a);
        (self.rho_inf - (self.rho0 - 3.0 * total)).abs() / self.rho_inf
    }
}
