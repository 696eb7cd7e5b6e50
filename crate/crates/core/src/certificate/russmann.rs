use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::special::{gamma, hurwitz_zeta, upper_incomplete_gamma_integral};
use crate::fourier::{for_each_in_shell, is_representative, DiophantineData};
use crate::{KamError, Result};

/// Which Rüssmann values enter the tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RussmannMode {
    /// `c_R(delta0, m)`, `c1_R(delta0, m)` and `c_R(rho0, m)`.
    #[default]
    Sharp,
    /// The uniform bounds `c^_R`, `c^1_R`.
    Uniform,
}

/// `(tau + 1)^(tau + 1) / tau^tau`.
pub fn derivative_factor(tau: f64) -> f64 {
    (tau + 1.0).powf(tau + 1.0) / tau.powf(tau)
}

/// `2^{d+1-2tau} zeta(2, 2^tau) pi^{-2tau-2}`.
fn tail_prefactor(d: usize, tau: f64) -> f64 {
    2f64.powf(d as f64 + 1.0 - 2.0 * tau) * hurwitz_zeta(2.0, 2f64.powf(tau)) * PI.powf(-2.0 * tau - 2.0)
}

/// `c^_R = sqrt(2^{d+1-2tau} zeta(2, 2^tau) pi^{-2tau-2} Gamma(2tau+1))`.
pub fn russmann_hat(d: usize, tau: f64) -> f64 {
    (tail_prefactor(d, tau) * gamma(2.0 * tau + 1.0)).sqrt()
}

/// `W_o = sum_{|k|_1 = o} |2 pi k.omega|^{-2}` for `o = 1..=m`, independent of `delta`.
///
/// The divisor is the symbol of `L_omega`; with a bare `|k.omega|` the sharp value
/// would exceed `c^_R`.
#[derive(Clone, Debug)]
pub struct ShellSums {
    weights: Vec<f64>,
}

impl ShellSums {
    pub fn new(dio: &DiophantineData, m: usize) -> Result<Self> {
        if m > dio.checked_cutoff {
            return Err(KamError::BeyondCutoff { order: m, cutoff: dio.checked_cutoff });
        }
        let omega = &dio.omega;
        let weights = (1..=m)
            .into_par_iter()
            .map(|o| {
                let mut w = 0.0;
                for_each_in_shell(omega.len(), o, |k| {
                    if is_representative(k) {
                        let kw: f64 = k.iter().zip(omega).map(|(&a, &b)| a as f64 * b).sum();
                        w += 2.0 / (2.0 * PI * kw).powi(2);
                    }
                });
                w
            })
            .collect();
        Ok(Self { weights })
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    /// `gamma^2 delta^{2tau} 2^d sum_{0<|k|_1<=m} e^{-4 pi |k|_1 delta} / |2 pi k.omega|^2`, shells in increasing order.
    fn finite_sum(&self, delta: f64, upto: usize, dio: &DiophantineData) -> f64 {
        let s: f64 = self.weights[..upto].iter().enumerate().map(|(i, w)| (-4.0 * PI * (i + 1) as f64 * delta).exp() * w).sum();
        dio.gamma.powi(2) * delta.powf(2.0 * dio.tau) * 2f64.powi(dio.dim() as i32) * s
    }
}

fn tail(delta: f64, m: usize, dio: &DiophantineData) -> f64 {
    tail_prefactor(dio.dim(), dio.tau) * upper_incomplete_gamma_integral(4.0 * PI * delta * (m + 1) as f64, 2.0 * dio.tau)
}

/// The two addends under the square root of `c_R(delta, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpBound {
    pub delta: f64,
    pub m: usize,
    pub finite_sum: f64,
    pub tail: f64,
    pub value: f64,
}

pub fn c_r(delta: f64, m: usize, dio: &DiophantineData, shells: &ShellSums) -> Result<SharpBound> {
    if !(delta > 0.0) || m < 1 {
        return Err(KamError::Invalid(format!("c_R needs delta > 0 and m >= 1, got delta = {delta}, m = {m}")));
    }
    if m > shells.m() {
        return Err(KamError::Invalid(format!("shell sums cover m <= {}, asked for {m}", shells.m())));
    }
    let finite_sum = shells.finite_sum(delta, m, dio);
    let tail = tail(delta, m, dio);
    Ok(SharpBound { delta, m, finite_sum, tail, value: (finite_sum + tail).sqrt() })
}

/// Smallest `m` with `tail / finite_sum < 1e-2`, capped by the Diophantine cutoff.
pub fn default_m(delta: f64, dio: &DiophantineData) -> Result<usize> {
    let cap = dio.checked_cutoff;
    let omega = &dio.omega;
    let scale = dio.gamma.powi(2) * delta.powf(2.0 * dio.tau) * 2f64.powi(dio.dim() as i32);
    let mut s = 0.0;
    for o in 1..=cap {
        let mut w = 0.0;
        for_each_in_shell(omega.len(), o, |k| {
            if is_representative(k) {
                let kw: f64 = k.iter().zip(omega).map(|(&a, &b)| a as f64 * b).sum();
                w += 2.0 / (2.0 * PI * kw).powi(2);
            }
        });
        s += (-4.0 * PI * o as f64 * delta).exp() * w;
        if tail(delta, o, dio) < 1e-2 * scale * s {
            return Ok(o);
        }
    }
    Ok(cap)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RussmannConstants {
    pub delta: f64,
    pub m: usize,
    pub gamma: f64,
    pub tau: f64,
    pub d: usize,
    pub omega: Vec<f64>,
    pub c_r: f64,
    pub c_hat: f64,
    pub c1_r: f64,
    pub c1_hat: f64,
    pub sharp: SharpBound,
    /// `c_R(tau delta / (tau + 1), m)`.
    pub sharp_derivative: SharpBound,
}

/// `m = None` picks [`default_m`].
pub fn compute_russmann(delta: f64, m: Option<usize>, dio: &DiophantineData) -> Result<RussmannConstants> {
    let m = match m {
        Some(m) => m,
        None => default_m(delta, dio)?,
    };
    let shells = ShellSums::new(dio, m)?;
    russmann_with(delta, m, dio, &shells)
}

/// Same as [`compute_russmann`] reusing precomputed shell sums.
pub fn russmann_with(delta: f64, m: usize, dio: &DiophantineData, shells: &ShellSums) -> Result<RussmannConstants> {
    let tau = dio.tau;
    let sharp = c_r(delta, m, dio, shells)?;
    let sharp_derivative = c_r(tau * delta / (tau + 1.0), m, dio, shells)?;
    let c_hat = russmann_hat(dio.dim(), tau);
    let factor = derivative_factor(tau);
    Ok(RussmannConstants {
        delta,
        m,
        gamma: dio.gamma,
        tau,
        d: dio.dim(),
        omega: dio.omega.clone(),
        c_r: sharp.value,
        c_hat,
        c1_r: factor * sharp_derivative.value,
        c1_hat: factor * c_hat,
        sharp,
        sharp_derivative,
    })
}

/// The three Rüssmann values the tables read.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RussmannInputs {
    pub mode: RussmannMode,
    pub m: usize,
    /// `c_R(delta)`.
    pub c_delta: f64,
    /// `c1_R(delta)`.
    pub c1_delta: f64,
    /// `c_R(rho)`.
    pub c_rho: f64,
}

impl RussmannInputs {
    pub fn new(mode: RussmannMode, delta: f64, rho: f64, m: Option<usize>, dio: &DiophantineData) -> Result<Self> {
        match mode {
            RussmannMode::Uniform => {
                let c = russmann_hat(dio.dim(), dio.tau);
                Ok(Self { mode, m: 0, c_delta: c, c1_delta: derivative_factor(dio.tau) * c, c_rho: c })
            }
            RussmannMode::Sharp => {
                let m = match m {
                    Some(m) => m,
                    None => default_m(delta.min(dio.tau * delta / (dio.tau + 1.0)), dio)?,
                };
                let shells = ShellSums::new(dio, m)?;
                let at_delta = russmann_with(delta, m, dio, &shells)?;
                let at_rho = c_r(rho, m, dio, &shells)?;
                Ok(Self { mode, m, c_delta: at_delta.c_r, c1_delta: at_delta.c1_r, c_rho: at_rho.value })
            }
        }
    }
}
