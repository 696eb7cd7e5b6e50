use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::{inverse, row_norm};
use crate::{KamError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum NeumannVerdict {
    /// `|M^-1_bar| < inverse_bound` and `|M^-1_bar - M^-1| < difference_bound`.
    Invertible { inverse_bound: f64, difference_bound: f64 },
    /// The smallness quantity is not below 1; nothing is claimed.
    Indeterminate { smallness: f64 },
}

/// Perturbed-inverse lemma: with `|M^-1| < sigma` and
/// `sigma |M^-1| |M_bar - M| / (sigma - |M^-1|) < 1`, `M_bar` is invertible.
pub fn neumann_inverse_check(m: &DMatrix<f64>, m_bar: &DMatrix<f64>, sigma: f64) -> Result<NeumannVerdict> {
    if m.shape() != m_bar.shape() || !m.is_square() {
        return Err(KamError::Shape(format!("{:?} against {:?}", m.shape(), m_bar.shape())));
    }
    let inv_norm = row_norm(&inverse(m)?);
    if !(inv_norm < sigma) {
        return Err(KamError::Hypothesis { name: "sigma".into(), detail: format!("|M^-1| = {inv_norm:.6e} is not below sigma = {sigma:.6e}") });
    }
    let diff = row_norm(&(m_bar - m));
    let smallness = sigma * inv_norm * diff / (sigma - inv_norm);
    if smallness < 1.0 {
        Ok(NeumannVerdict::Invertible { inverse_bound: sigma, difference_bound: sigma * inv_norm * diff })
    } else {
        Ok(NeumannVerdict::Indeterminate { smallness })
    }
}
