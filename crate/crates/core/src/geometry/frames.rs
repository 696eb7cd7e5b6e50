use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::system::HamiltonianSystem;
use crate::fourier::FourierModel;
use crate::linalg::{condition, inverse, omega0, singular_range};
use crate::{KamError, Result};

/// Relative rank threshold for `L`.
pub const RANK_THRESHOLD: f64 = 1e-8;
/// Largest accepted condition number of `G_L` at a node.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

fn point(z: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(z.as_slice())
}

fn check_torus(k: &FourierModel, sys: &dyn HamiltonianSystem) -> Result<()> {
    let n = sys.dof();
    if k.shape() != (2 * n, 1) {
        return Err(KamError::Shape(format!("torus of shape {:?} for {n} degrees of freedom", k.shape())));
    }
    if k.dim() != sys.torus_dim() {
        return Err(KamError::Shape(format!("{}-torus for a system with d = {}", k.dim(), sys.torus_dim())));
    }
    Ok(())
}

/// `z -> f(z)` composed with the torus, on the padded grid.
pub fn compose_with(k: &FourierModel, f: impl Fn(&DVector<f64>) -> DMatrix<f64> + Sync) -> Result<FourierModel> {
    FourierModel::pointwise(&[k], |v| Ok(f(&point(v[0]))))
}

/// `X_h o K`.
pub fn vector_field_on(k: &FourierModel, sys: &dyn HamiltonianSystem) -> Result<FourierModel> {
    compose_with(k, |z| {
        let x = sys.vector_field(z);
        DMatrix::from_column_slice(x.len(), 1, x.as_slice())
    })
}

#[derive(Clone, Debug)]
pub struct TangentFrame {
    /// `[DK | X_p o K]`, `2n x n`.
    pub l: FourierModel,
    /// Smallest singular value of `L(theta)` over the padded grid.
    pub min_singular: f64,
}

pub fn build_tangent_frame(k: &FourierModel, sys: &dyn HamiltonianSystem) -> Result<TangentFrame> {
    check_torus(k, sys)?;
    let (n, d) = (sys.dof(), sys.torus_dim());
    let dk = k.jacobian()?;
    let l = if n == d {
        dk
    } else {
        let xp = compose_with(k, |z| sys.moment_fields(z))?;
        FourierModel::hstack(&[&dk, &xp])?
    };
    let samples = l.padded_samples();
    let min_singular = samples.par_iter().map(|m| singular_range(m).0).reduce(|| f64::INFINITY, f64::min);
    let threshold = RANK_THRESHOLD * l.strip_norm(0.0)?;
    if !(min_singular > threshold) {
        return Err(KamError::DegenerateFrame { sigma_min: min_singular, threshold });
    }
    Ok(TangentFrame { l, min_singular })
}

/// Adapted frame of a torus and the diagnostics that do not depend on the frequency.
#[derive(Clone, Debug)]
pub struct FrameBundle {
    pub l: FourierModel,
    pub n: FourierModel,
    /// `G_L^{-1}`.
    pub b: FourierModel,
    pub g_l: FourierModel,
    /// `[L N]`.
    pub p: FourierModel,
    pub torsion: FourierModel,
    /// `[[0, T], [0, 0]]`.
    pub lambda: FourierModel,
    pub omega_l: FourierModel,
    pub omega_n: FourierModel,
    /// `P^T Omega P - Omega_0`.
    pub e_sym: FourierModel,
    pub min_singular: f64,
    /// Worst condition number of `G_L` over the padded grid.
    pub gram_condition: f64,
}

pub fn build_frames(k: &FourierModel, sys: &dyn HamiltonianSystem) -> Result<FrameBundle> {
    let tangent = build_tangent_frame(k, sys)?;
    let n = sys.dof();
    let l = tangent.l;
    let cond = std::sync::Mutex::new(0.0f64);
    // outputs: G_L, B, N, T, Omega_N
    let mut out = FourierModel::pointwise_many(&[k, &l], 5, |v| {
        let z = point(v[0]);
        let lz = v[1];
        let g_l = lz.transpose() * sys.metric(&z) * lz;
        let c = condition(&g_l);
        if !(c <= GRAM_CONDITION_LIMIT) {
            return Err(KamError::IllConditioned { cond: c });
        }
        {
            let mut w = cond.lock().expect("poisoned");
            *w = w.max(c);
        }
        let b = inverse(&g_l)?;
        let nz = sys.complex_structure(&z) * lz * &b;
        let t = nz.transpose() * sys.torsion(&z) * &nz;
        let om_n = nz.transpose() * sys.symplectic_form(&z) * &nz;
        Ok(vec![g_l, b, nz, t, om_n])
    })?
    .into_iter();
    let mut next = || out.next().expect("five outputs");
    let (g_l, b, nf, torsion, omega_n) = (next(), next(), next(), next(), next());
    let p = FourierModel::hstack(&[&l, &nf])?;
    let zero = FourierModel::zeros(k.space(), n, n);
    let lambda = FourierModel::from_blocks(&[vec![&zero, &torsion], vec![&zero, &zero]])?;
    let omega_l = lagrangianity_residual(k, &l, sys)?;
    let e_sym = symplecticity_residual(k, &p, sys)?;
    let gram_condition = cond.into_inner().expect("poisoned");
    Ok(FrameBundle { l, n: nf, b, g_l, p, torsion, lambda, omega_l, omega_n, e_sym, min_singular: tangent.min_singular, gram_condition })
}

/// `Omega_L` assembled from `Omega_DK = DK^T Omega DK` and `D(p o K)`.
pub fn lagrangianity_residual(k: &FourierModel, l: &FourierModel, sys: &dyn HamiltonianSystem) -> Result<FourierModel> {
    let (n, d) = (sys.dof(), sys.torus_dim());
    let dk = l.block(0, 0, 2 * n, d)?;
    let omega_dk = FourierModel::pointwise(&[k, &dk], |v| {
        let z = point(v[0]);
        Ok(v[1].transpose() * sys.symplectic_form(&z) * v[1])
    })?;
    if n == d {
        return Ok(omega_dk);
    }
    let pk = compose_with(k, |z| {
        let p = sys.moment_map(z);
        DMatrix::from_column_slice(p.len(), 1, p.as_slice())
    })?;
    let dp = pk.jacobian()?;
    let zero = FourierModel::zeros(k.space(), n - d, n - d);
    let dpt = dp.transpose();
    let neg = dp.scale(-1.0);
    FourierModel::from_blocks(&[vec![&omega_dk, &dpt], vec![&neg, &zero]])
}

/// `P^T Omega o K P - Omega_0`.
pub fn symplecticity_residual(k: &FourierModel, p: &FourierModel, sys: &dyn HamiltonianSystem) -> Result<FourierModel> {
    let o0 = omega0(sys.dof());
    FourierModel::pointwise(&[k, p], |v| {
        let z = point(v[0]);
        Ok(v[1].transpose() * sys.symplectic_form(&z) * v[1] - &o0)
    })
}

/// The four `n x n` blocks of `E_red`.
#[derive(Clone, Debug)]
pub struct ReducibilityBlocks {
    pub ll: FourierModel,
    pub ln: FourierModel,
    pub nl: FourierModel,
    pub nn: FourierModel,
}

impl ReducibilityBlocks {
    pub fn named(&self) -> [(&'static str, &FourierModel); 4] {
        [("LL", &self.ll), ("LN", &self.ln), ("NL", &self.nl), ("NN", &self.nn)]
    }

    /// Largest strip norm over the blocks.
    pub fn max_norm(&self, rho: f64) -> Result<f64> {
        self.named().iter().try_fold(0.0f64, |acc, (_, m)| Ok(acc.max(m.strip_norm(rho)?)))
    }
}

/// `E_red = Omega_0^{-1} P^T Omega o K (DX_h o K P + L_omega P) - Lambda`.
pub fn reducibility_residual(k: &FourierModel, bundle: &FrameBundle, sys: &dyn HamiltonianSystem, omega: &DVector<f64>) -> Result<ReducibilityBlocks> {
    let n = sys.dof();
    let o0inv = -omega0(n);
    let lie_p = bundle.p.lie_derivative(omega)?;
    let e = FourierModel::pointwise(&[k, &bundle.p, &lie_p, &bundle.lambda], |v| {
        let z = point(v[0]);
        let xp = sys.vector_field_jacobian(&z) * v[1] + v[2];
        Ok(&o0inv * v[1].transpose() * sys.symplectic_form(&z) * xp - v[3])
    })?;
    Ok(ReducibilityBlocks {
        ll: e.block(0, 0, n, n)?,
        ln: e.block(0, n, n, n)?,
        nl: e.block(n, 0, n, n)?,
        nn: e.block(n, n, n, n)?,
    })
}
