//! Quasi-Newton correction of approximately invariant tori.

mod iterate;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::fourier::{compose_shift, solve_cohomological, DiophantineData, FourierModel};
use crate::geometry::{build_frames, vector_field_on, FrameBundle, HamiltonianSystem};
use crate::linalg::inverse;
use crate::{KamError, Result};

pub use iterate::{fit_order, iterate, IterationRecord, NewtonConfig, NewtonRun, UpdateRule, Verdict};

/// Smallest accepted `|det <T>|`.
pub const TWIST_THRESHOLD: f64 = 1e-12;

fn point(z: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(z.as_slice())
}

/// `E = X_h o K + L_omega K`. Fails if a padded-grid sample leaves the system domain.
pub fn invariance_error(k: &FourierModel, sys: &dyn HamiltonianSystem, omega: &DVector<f64>) -> Result<FourierModel> {
    let radius = sys.domain_radius();
    if radius.is_finite() {
        let norm = k.padded_samples().iter().map(|z| z.amax()).fold(0.0, f64::max);
        if !(norm <= radius) {
            return Err(KamError::DomainEscape { norm, radius });
        }
    }
    vector_field_on(k, sys)?.add(&k.lie_derivative(omega)?)
}

#[derive(Clone, Debug)]
pub struct Projections {
    /// `-N^T Omega E`.
    pub eta_l: FourierModel,
    /// `L^T Omega E`.
    pub eta_n: FourierModel,
}

impl Projections {
    pub fn avg_eta_n(&self) -> DVector<f64> {
        self.eta_n.average().column(0).into_owned()
    }
}

pub fn project_error(e: &FourierModel, bundle: &FrameBundle, sys: &dyn HamiltonianSystem, k: &FourierModel) -> Result<Projections> {
    let mut out = FourierModel::pointwise_many(&[k, &bundle.l, &bundle.n, e], 2, |v| {
        let oe = sys.symplectic_form(&point(v[0])) * v[3];
        Ok(vec![-(v[2].transpose() * &oe), v[1].transpose() * oe])
    })?;
    let eta_n = out.pop().expect("two outputs");
    let eta_l = out.pop().expect("two outputs");
    Ok(Projections { eta_l, eta_n })
}

/// `max{ |eta^L|_rho, |eta^N|_rho / (gamma delta^tau) }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightedErrorNorm {
    pub value: f64,
    pub tangent: f64,
    pub normal: f64,
    pub rho: f64,
    pub delta: f64,
}

impl WeightedErrorNorm {
    pub fn measure(p: &Projections, rho: f64, delta: f64, dio: &DiophantineData) -> Result<Self> {
        let tangent = p.eta_l.strip_norm(rho)?;
        let normal = p.eta_n.strip_norm(rho)?;
        let value = tangent.max(normal / (dio.gamma * delta.powf(dio.tau)));
        Ok(Self { value, tangent, normal, rho, delta })
    }
}

#[derive(Clone, Debug)]
pub struct CorrectionData {
    pub xi_n: FourierModel,
    pub avg_xi_n: DVector<f64>,
    /// Zero average; rows `0..d` shift the angles, the rest are moment times.
    pub xi_l: FourierModel,
    pub torus_dim: usize,
}

impl CorrectionData {
    pub fn xi_l_dk(&self) -> Result<FourierModel> {
        self.xi_l.block(0, 0, self.torus_dim, 1)
    }

    pub fn xi_l_xp(&self) -> Result<Option<FourierModel>> {
        let extra = self.xi_l.rows() - self.torus_dim;
        if extra == 0 {
            return Ok(None);
        }
        self.xi_l.block(self.torus_dim, 0, extra, 1).map(Some)
    }

    pub fn zero(k: &FourierModel, n: usize) -> Self {
        Self {
            xi_n: FourierModel::zeros(k.space(), n, 1),
            avg_xi_n: DVector::zeros(n),
            xi_l: FourierModel::zeros(k.space(), n, 1),
            torus_dim: k.dim(),
        }
    }
}

/// Solves `L_omega xi^N = eta^N`, `L_omega xi^L + T xi^N = eta^L` with `<xi^L> = 0`.
pub fn solve_corrections(eta_l: &FourierModel, eta_n: &FourierModel, torsion: &FourierModel, dio: &DiophantineData) -> Result<CorrectionData> {
    let r_eta_n = solve_cohomological(eta_n, dio)?;
    let t_avg = torsion.average();
    let det = t_avg.determinant();
    if !(det.abs() >= TWIST_THRESHOLD) {
        return Err(KamError::Twist { det });
    }
    let rhs = eta_l.sub(&torsion.matmul(&r_eta_n)?)?.average();
    let avg_xi_n = inverse(&t_avg)? * rhs;
    let xi_n = r_eta_n.add_constant(&avg_xi_n)?;
    let xi_l = solve_cohomological(&eta_l.sub(&torsion.matmul(&xi_n)?)?, dio)?;
    Ok(CorrectionData { xi_n, avg_xi_n: avg_xi_n.column(0).into_owned(), xi_l, torus_dim: eta_l.dim() })
}

/// `K + L xi^L + N xi^N`.
pub fn update_classical(k: &FourierModel, bundle: &FrameBundle, corr: &CorrectionData) -> Result<FourierModel> {
    k.add(&bundle.l.matmul(&corr.xi_l)?)?.add(&bundle.n.matmul(&corr.xi_n)?)
}

/// Size limits for the modified update: the angle shift is measured at `rho` and
/// must stay below `budget`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftGuard {
    pub rho: f64,
    pub budget: f64,
}

/// `Phi(xi^L_Xp, (K + N xi^N) o (id + xi^L_DK))`.
pub fn update_modified(k: &FourierModel, bundle: &FrameBundle, corr: &CorrectionData, sys: &dyn HamiltonianSystem, guard: ShiftGuard) -> Result<FourierModel> {
    let inner = k.add(&bundle.n.matmul(&corr.xi_n)?)?;
    let shifted = compose_shift(&inner, &corr.xi_l_dk()?, guard.rho, guard.budget)?;
    let Some(times) = corr.xi_l_xp()? else {
        return Ok(shifted);
    };
    let radius = sys.flow_time_radius();
    let size = times.strip_norm(guard.rho)?;
    if !(size < radius) {
        return Err(KamError::TimeOutOfRange { time: size, radius });
    }
    FourierModel::pointwise(&[&shifted, &times], |v| {
        let z = sys.moment_flow(&point(v[1]), &point(v[0]));
        Ok(DMatrix::from_column_slice(z.len(), 1, z.as_slice()))
    })
}

/// Snapshot of one iterate with everything measured on it.
#[derive(Clone, Debug)]
pub struct TorusState {
    pub k: FourierModel,
    pub e: FourierModel,
    pub projections: Projections,
    pub weighted_error: WeightedErrorNorm,
    pub bundle: FrameBundle,
    pub rho: f64,
}

impl TorusState {
    pub fn assess(k: FourierModel, sys: &dyn HamiltonianSystem, dio: &DiophantineData, rho: f64, delta: f64) -> Result<Self> {
        let omega = dio.omega_vector();
        let e = invariance_error(&k, sys, &omega)?;
        let bundle = build_frames(&k, sys)?;
        let projections = project_error(&e, &bundle, sys, &k)?;
        let weighted_error = WeightedErrorNorm::measure(&projections, rho, delta, dio)?;
        Ok(Self { k, e, projections, weighted_error, bundle, rho })
    }

    pub fn corrections(&self, dio: &DiophantineData) -> Result<CorrectionData> {
        solve_corrections(&self.projections.eta_l, &self.projections.eta_n, &self.bundle.torsion, dio)
    }
}
