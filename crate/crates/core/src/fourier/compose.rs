use nalgebra::DMatrix;

use super::model::FourierModel;
use super::space::FourierSpace;
use crate::{KamError, Result};

/// `f(theta + g(theta))` for a real `d`-vector model `g`.
///
/// `g` is measured with the strip norm at `rho_g`; the call fails unless
/// that size is strictly below `budget`.
pub fn compose_shift(f: &FourierModel, g: &FourierModel, rho_g: f64, budget: f64) -> Result<FourierModel> {
    let space = f.space();
    if g.space() != space {
        return Err(KamError::Shape("compose_shift: models live in different spaces".into()));
    }
    if g.shape() != (space.dim(), 1) {
        return Err(KamError::Shape(format!("shift must be a {}-vector, got {:?}", space.dim(), g.shape())));
    }
    let size = g.strip_norm(rho_g)?;
    if size >= budget {
        return Err(KamError::ShiftBudget { size, budget });
    }
    let grid = space.padded_grid();
    let nodes = FourierSpace::nodes(&grid);
    let shifts = g.evaluate_on(&grid)?;
    let points: Vec<Vec<f64>> = nodes
        .iter()
        .zip(&shifts)
        .map(|(t, s)| t.iter().enumerate().map(|(l, &x)| x + s[(l, 0)]).collect())
        .collect();
    let values = synthesize_par(f, &points)?;
    FourierModel::analyze(space, &grid, &values)
}

/// Parallel direct synthesis over chunks of points.
pub(crate) fn synthesize_par(f: &FourierModel, points: &[Vec<f64>]) -> Result<Vec<DMatrix<f64>>> {
    use rayon::prelude::*;
    let chunks: Vec<Vec<DMatrix<f64>>> = points.par_chunks(256).map(|c| f.synthesize(c)).collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    use super::*;

    #[test]
    fn zero_shift_is_identity() {
        let s = FourierSpace::uniform(2, 4, 16).unwrap();
        let f = FourierModel::from_fn(&s, 2, 1, |k, i, _| Complex64::new(0.3f64.powi((k[0].abs() + k[1].abs()) as i32), i as f64 * 0.1));
        let g = FourierModel::zeros(&s, 2, 1);
        let h = compose_shift(&f, &g, 0.0, 0.1).unwrap();
        assert!(h.sub(&f).unwrap().max_coefficient() < 1e-13);
    }

    #[test]
    fn constant_shift_is_a_phase() {
        let s = FourierSpace::uniform(2, 4, 16).unwrap();
        let mut f = FourierModel::zeros(&s, 1, 1);
        f.set_coefficient(&[1, 0], 0, 0, Complex64::new(0.0, -0.5)).unwrap();
        let c = 0.05;
        let g = FourierModel::constant(&s, &DMatrix::from_column_slice(2, 1, &[c, 0.0]));
        let h = compose_shift(&f, &g, 0.0, 0.1).unwrap();
        let expect = Complex64::new(0.0, -0.5) * Complex64::from_polar(1.0, 2.0 * PI * c);
        assert!((h.coefficient(&[1, 0], 0, 0) - expect).norm() < 1e-14);
    }

    #[test]
    fn budget_is_enforced() {
        let s = FourierSpace::uniform(2, 4, 16).unwrap();
        let f = FourierModel::zeros(&s, 1, 1);
        let g = FourierModel::constant(&s, &DMatrix::from_column_slice(2, 1, &[0.1, 0.0]));
        assert!(matches!(compose_shift(&f, &g, 0.0, 0.1), Err(KamError::ShiftBudget { .. })));
    }
}
