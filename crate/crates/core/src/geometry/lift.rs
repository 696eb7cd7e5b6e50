use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::frames::compose_with;
use super::system::HamiltonianSystem;
use crate::fourier::{FourierModel, FourierSpace};
use crate::{KamError, Result};

/// Data of the reduction: the moment frequency and the average momentum of the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftSpec {
    pub omega_p: DVector<f64>,
    pub p0: DVector<f64>,
}

impl LiftSpec {
    /// Direct moment frequency; `p0 = <p o K>`.
    pub fn new(omega_p: DVector<f64>, k: &FourierModel, sys: &dyn HamiltonianSystem) -> Result<Self> {
        let extra = sys.dof() - sys.torus_dim();
        if omega_p.len() != extra {
            return Err(KamError::Shape(format!("moment frequency of length {} for {extra} integrals", omega_p.len())));
        }
        let p0 = momentum_on(k, sys)?.average().column(0).into_owned();
        Ok(Self { omega_p, p0 })
    }

    /// `omega_p = Df(p0)^T` for a discount `f` given through its gradient.
    pub fn from_discount(grad_f: impl Fn(&DVector<f64>) -> DVector<f64>, k: &FourierModel, sys: &dyn HamiltonianSystem) -> Result<Self> {
        let p0 = momentum_on(k, sys)?.average().column(0).into_owned();
        Self::new(grad_f(&p0), k, sys)
    }
}

/// `p o K` as a column model.
pub fn momentum_on(k: &FourierModel, sys: &dyn HamiltonianSystem) -> Result<FourierModel> {
    compose_with(k, |z| {
        let p = sys.moment_map(z);
        DMatrix::from_column_slice(p.len(), 1, p.as_slice())
    })
}

/// `sup |p o K - <p o K>|` on the padded grid.
pub fn momentum_spread(k: &FourierModel, sys: &dyn HamiltonianSystem) -> Result<f64> {
    let pk = momentum_on(k, sys)?;
    let avg = pk.average();
    Ok(pk.padded_samples().iter().map(|p| (p - &avg).amax()).fold(0.0, f64::max))
}

fn check_time(sys: &dyn HamiltonianSystem, s: &DVector<f64>) -> Result<()> {
    let radius = sys.flow_time_radius();
    let t = s.amax();
    if !(t <= radius) {
        return Err(KamError::TimeOutOfRange { time: t, radius });
    }
    Ok(())
}

/// Residual of the lifted embedding at one point:
/// `X_h(K^) - D_z Phi DK omega - X_p(K^) omega_p`.
fn lifted_residual(sys: &dyn HamiltonianSystem, s: &DVector<f64>, z: &DVector<f64>, dk: &DMatrix<f64>, omega: &DVector<f64>, omega_p: &DVector<f64>) -> (DVector<f64>, f64) {
    let zh = sys.moment_flow(s, z);
    let r = sys.vector_field(&zh) - sys.moment_flow_jacobian(s, z) * dk * omega - sys.moment_fields(&zh) * omega_p;
    let e = r.amax();
    (zh, e)
}

/// Samples of `K^(theta, s) = Phi(s, K(theta))` on the model grid and the invariance residual.
#[derive(Clone, Debug)]
pub struct CylinderLift {
    /// `samples[i][j]` is `K^` at `s_grid[i]` and the `j`-th grid node.
    pub samples: Vec<Vec<DVector<f64>>>,
    pub residual: f64,
}

pub fn lift_cylinder(k: &FourierModel, sys: &dyn HamiltonianSystem, spec: &LiftSpec, omega: &DVector<f64>, s_grid: &[DVector<f64>]) -> Result<CylinderLift> {
    let extra = sys.dof() - sys.torus_dim();
    for s in s_grid {
        if s.len() != extra {
            return Err(KamError::Shape(format!("flow time of length {} for {extra} integrals", s.len())));
        }
        check_time(sys, s)?;
    }
    let zs: Vec<DVector<f64>> = k.samples().iter().map(|m| m.column(0).into_owned()).collect();
    let dks = k.jacobian()?.samples();
    let mut samples = Vec::with_capacity(s_grid.len());
    let mut residual = 0.0f64;
    for s in s_grid {
        let row: Vec<(DVector<f64>, f64)> = zs.par_iter().zip(dks.par_iter()).map(|(z, dk)| lifted_residual(sys, s, z, dk, omega, &spec.omega_p)).collect();
        residual = row.iter().fold(residual, |a, (_, e)| a.max(*e));
        samples.push(row.into_iter().map(|(z, _)| z).collect());
    }
    Ok(CylinderLift { samples, residual })
}

/// Invariant `n`-torus obtained by closing the moment directions.
#[derive(Clone, Debug)]
pub struct TorusLift {
    /// `K^(theta, sigma) = Phi(2 pi sigma, K(theta))` on `T^n`.
    pub khat: FourierModel,
    /// `(omega, omega_p / 2 pi)`.
    pub frequency: DVector<f64>,
    /// `sup |X_h o K^ + L K^|` over the product grid.
    pub residual: f64,
}

/// Closes the cylinder when the moment flow is `2 pi`-periodic. The moment axes get
/// `s_nodes` grid points and cutoff `s_nodes / 2`.
pub fn lift_torus(k: &FourierModel, sys: &dyn HamiltonianSystem, spec: &LiftSpec, omega: &DVector<f64>, s_nodes: usize) -> Result<TorusLift> {
    let (n, d) = (sys.dof(), sys.torus_dim());
    let extra = n - d;
    if extra == 0 {
        return Err(KamError::Invalid("no moment directions to lift".into()));
    }
    check_time(sys, &DVector::from_element(extra, 2.0 * PI))?;
    let zs: Vec<DVector<f64>> = k.samples().iter().map(|m| m.column(0).into_owned()).collect();
    for (i, z) in zs.iter().enumerate().step_by(zs.len().div_ceil(16).max(1)) {
        for a in 0..extra {
            let mut s = DVector::zeros(extra);
            s[a] = 2.0 * PI;
            let back = sys.moment_flow(&s, z);
            if (&back - z).amax() > 1e-12 * (1.0 + z.amax()) {
                return Err(KamError::Invalid(format!("moment flow is not 2 pi-periodic along axis {a} (node {i})")));
            }
        }
    }

    let mut cutoffs = k.space().cutoffs().to_vec();
    let mut grid = k.space().grid().to_vec();
    cutoffs.extend(std::iter::repeat_n(s_nodes / 2, extra));
    grid.extend(std::iter::repeat_n(s_nodes, extra));
    let space = FourierSpace::new(cutoffs, grid.clone())?;
    let s_grid = vec![s_nodes; extra];
    let sigmas = FourierSpace::nodes(&s_grid);
    // first axis slowest: theta nodes outer, sigma nodes inner
    let values: Vec<DMatrix<f64>> = zs
        .par_iter()
        .flat_map_iter(|z| {
            sigmas.iter().map(move |sig| {
                let s = DVector::from_iterator(extra, sig.iter().map(|x| 2.0 * PI * x));
                let zh = sys.moment_flow(&s, z);
                DMatrix::from_column_slice(2 * n, 1, zh.as_slice())
            })
        })
        .collect();
    let khat = FourierModel::analyze(&space, &grid, &values)?;

    let mut frequency = omega.clone().resize_vertically(n, 0.0);
    for a in 0..extra {
        frequency[d + a] = spec.omega_p[a] / (2.0 * PI);
    }
    let lie = khat.lie_derivative(&frequency)?.samples();
    let residual = khat
        .samples()
        .par_iter()
        .zip(lie.par_iter())
        .map(|(z, lz)| (sys.vector_field(&z.column(0).into_owned()) + lz.column(0)).amax())
        .reduce(|| 0.0, f64::max);
    Ok(TorusLift { khat, frequency, residual })
}
