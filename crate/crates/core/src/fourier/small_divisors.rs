use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::FourierModel;
use crate::{KamError, Result};

/// A frequency vector together with the range over which `|k.omega| >= gamma / |k|_1^tau` was checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiophantineData {
    pub omega: Vec<f64>,
    pub gamma: f64,
    pub tau: f64,
    pub checked_cutoff: usize,
}

impl DiophantineData {
    pub fn omega_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.omega)
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }
}

/// Calls `f` for every `k` with `|k|_1 == order`.
pub fn for_each_in_shell(dim: usize, order: usize, mut f: impl FnMut(&[i64])) {
    let mut k = vec![0i64; dim];
    shell_rec(&mut k, 0, order as i64, &mut f);
}

fn shell_rec(k: &mut [i64], l: usize, rem: i64, f: &mut impl FnMut(&[i64])) {
    if l + 1 == k.len() {
        k[l] = rem;
        f(k);
        if rem != 0 {
            k[l] = -rem;
            f(k);
        }
        return;
    }
    for v in -rem..=rem {
        k[l] = v;
        shell_rec(k, l + 1, rem - v.abs(), f);
    }
}

/// True for exactly one of `k`, `-k` (first nonzero entry positive).
pub(crate) fn is_representative(k: &[i64]) -> bool {
    k.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
}

fn dot(k: &[i64], omega: &[f64]) -> f64 {
    k.iter().zip(omega).map(|(&a, &b)| a as f64 * b).sum()
}

fn resonance_floor(order: usize, omega: &[f64]) -> f64 {
    let scale = omega.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    16.0 * f64::EPSILON * order as f64 * scale
}

/// Smallest `|k|_1^tau |k.omega|` over `0 < |k|_1 <= k_max` and a minimizer.
pub fn best_gamma(omega: &[f64], tau: f64, k_max: usize) -> Result<(f64, Vec<i64>)> {
    let mut best = (f64::INFINITY, vec![0; omega.len()]);
    let mut resonant = None;
    for order in 1..=k_max {
        let w = (order as f64).powf(tau);
        let floor = resonance_floor(order, omega);
        for_each_in_shell(omega.len(), order, |k| {
            if resonant.is_some() || !is_representative(k) {
                return;
            }
            let kw = dot(k, omega).abs();
            if kw <= floor {
                resonant = Some(k.to_vec());
            } else if w * kw < best.0 {
                best = (w * kw, k.to_vec());
            }
        });
        if let Some(k) = resonant {
            return Err(KamError::Resonance { k });
        }
    }
    Ok(best)
}

/// Exhaustive check of the Diophantine inequality up to `k_max`.
pub fn verify_diophantine(omega: &[f64], gamma: f64, tau: f64, k_max: usize) -> Result<DiophantineData> {
    let d = omega.len();
    if d < 2 {
        return Err(KamError::Invalid("frequency must have at least two components".into()));
    }
    if !(gamma > 0.0) {
        return Err(KamError::Invalid(format!("gamma = {gamma} must be positive")));
    }
    if !(tau >= (d - 1) as f64) {
        return Err(KamError::Invalid(format!("tau = {tau} below d - 1 = {}", d - 1)));
    }
    if k_max < 1 {
        return Err(KamError::Invalid("k_max must be at least 1".into()));
    }
    let (gamma_max, k) = best_gamma(omega, tau, k_max)?;
    if gamma_max < gamma {
        return Err(KamError::NotDiophantine { k, gamma_max });
    }
    Ok(DiophantineData { omega: omega.to_vec(), gamma, tau, checked_cutoff: k_max })
}

/// Zero-average solution `u` of `L_omega u = v - <v>`.
pub fn solve_cohomological(v: &FourierModel, dio: &DiophantineData) -> Result<FourierModel> {
    let space = v.space();
    if dio.dim() != space.dim() {
        return Err(KamError::Shape(format!("{}-frequency on a {}-torus", dio.dim(), space.dim())));
    }
    if space.max_order() > dio.checked_cutoff {
        return Err(KamError::BeyondCutoff { order: space.max_order(), cutoff: dio.checked_cutoff });
    }
    let mut out = v.clone();
    let rc = v.rows() * v.cols();
    let mut k = vec![0i64; space.dim()];
    for m in 0..space.n_modes() {
        space.mode_into(m, &mut k);
        let block = &mut out.coefficients_mut()[m * rc..(m + 1) * rc];
        if k.iter().all(|&x| x == 0) {
            block.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            continue;
        }
        let order: usize = k.iter().map(|x| x.unsigned_abs() as usize).sum();
        let kw = dot(&k, &dio.omega);
        if kw.abs() <= resonance_floor(order, &dio.omega) {
            return Err(KamError::Resonance { k: k.clone() });
        }
        let divisor = Complex64::new(0.0, -2.0 * PI * kw);
        block.iter_mut().for_each(|c| *c /= divisor);
    }
    Ok(out)
}
