use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::geometry::HamiltonianSystem;
use crate::{KamError, Result};

const STEP: f64 = 1e-5;
const TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct AuditEntry {
    pub callable: &'static str,
    pub max_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub points: usize,
    pub entries: Vec<AuditEntry>,
}

/// Worst relative error `|fd - exact| / max(1, |exact|)` of a derivative tensor.
fn compare(exact: &[DMatrix<f64>], parent: impl Fn(&DVector<f64>) -> DMatrix<f64>, z: &DVector<f64>) -> f64 {
    let mut worst = 0.0f64;
    for (t, ex) in exact.iter().enumerate() {
        let mut zp = z.clone();
        let mut zm = z.clone();
        zp[t] += STEP;
        zm[t] -= STEP;
        let fd = (parent(&zp) - parent(&zm)) / (2.0 * STEP);
        let scale = ex.amax().max(1.0);
        worst = worst.max((fd - ex).amax() / scale);
    }
    worst
}

/// Split a Jacobian into the per-variable slices used for derivative tensors.
fn slices_of_jacobian(j: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
    (0..j.ncols()).map(|t| DMatrix::from_iterator(j.nrows(), 1, j.column(t).iter().cloned())).collect()
}

/// Central-difference check of every derivative callable at `points` random
/// points of the box `|z|_inf <= radius`. Fails naming the worst callable.
pub fn finite_difference_audit(sys: &dyn HamiltonianSystem, points: usize, radius: f64, seed: u64) -> Result<AuditReport> {
    let n = sys.dof();
    let extra = n - sys.torus_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: [&'static str; 11] = ["DH", "DX_h", "D2X_h", "DOmega", "DG", "DJ", "Dp", "DX_p", "DT_h", "D_zPhi", "X_h"];
    let mut worst = [0.0f64; 11];
    for _ in 0..points {
        let z = DVector::from_fn(2 * n, |_, _| rng.gen_range(-radius..radius));
        let s = DVector::from_fn(extra, |_, _| rng.gen_range(-1.0..1.0));
        let col = |v: DVector<f64>| DMatrix::from_column_slice(v.len(), 1, v.as_slice());
        let errs = [
            compare(&slices_of_jacobian(&DMatrix::from_row_slice(1, 2 * n, sys.gradient(&z).as_slice())), |y| DMatrix::from_element(1, 1, sys.hamiltonian(y)), &z),
            compare(&slices_of_jacobian(&sys.vector_field_jacobian(&z)), |y| col(sys.vector_field(y)), &z),
            compare(&sys.vector_field_second(&z), |y| sys.vector_field_jacobian(y), &z),
            compare(&sys.symplectic_form_derivative(&z), |y| sys.symplectic_form(y), &z),
            compare(&sys.metric_derivative(&z), |y| sys.metric(y), &z),
            compare(&sys.complex_structure_derivative(&z), |y| sys.complex_structure(y), &z),
            if extra == 0 {
                0.0
            } else {
                compare(&slices_of_jacobian(&sys.moment_jacobian(&z)), |y| col(sys.moment_map(y)), &z)
            },
            if extra == 0 {
                0.0
            } else {
                compare(&sys.moment_fields_derivative(&z), |y| sys.moment_fields(y), &z)
            },
            compare(&sys.torsion_derivative(&z), |y| sys.torsion(y), &z),
            compare(&slices_of_jacobian(&sys.moment_flow_jacobian(&s, &z)), |y| col(sys.moment_flow(&s, y)), &z),
            {
                // X_h against Omega^{-1} DH^T
                let om = sys.symplectic_form(&z);
                let x = sys.vector_field(&z);
                let rhs = crate::linalg::inverse(&om)? * sys.gradient(&z);
                (x - &rhs).amax() / rhs.amax().max(1.0)
            },
        ];
        for (w, e) in worst.iter_mut().zip(errs) {
            *w = w.max(e);
        }
    }
    let entries: Vec<AuditEntry> = names.iter().zip(worst).map(|(&callable, max_error)| AuditEntry { callable, max_error }).collect();
    if let Some(bad) = entries.iter().filter(|e| !(e.max_error <= TOLERANCE)).max_by(|a, b| a.max_error.total_cmp(&b.max_error)) {
        return Err(KamError::Audit { callable: bad.callable.into(), error: bad.max_error });
    }
    Ok(AuditReport { points, entries })
}
