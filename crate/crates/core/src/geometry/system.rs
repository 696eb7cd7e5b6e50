use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{inverse, omega0, row_norm};

/// Closed-form description of a Hamiltonian system with `n - d` first integrals in involution.
///
/// Coordinates are `z = (q_1..q_n, p_1..p_n)`. Derivative tensors are returned
/// as slices: entry `t` of a `Vec<DMatrix>` is the partial derivative with
/// respect to `z_t`. The triple defaults to the canonical one
/// (`Omega = J = Omega_0`, `G = I`); systems with a non-constant triple must
/// override the triple callables together with [`HamiltonianSystem::torsion_derivative`].
pub trait HamiltonianSystem: Send + Sync {
    fn name(&self) -> String;
    /// Degrees of freedom `n`.
    fn dof(&self) -> usize;
    /// Dimension `d` of the tori.
    fn torus_dim(&self) -> usize;

    fn hamiltonian(&self, z: &DVector<f64>) -> f64;
    /// `DH(z)` as a column.
    fn gradient(&self, z: &DVector<f64>) -> DVector<f64>;
    fn vector_field(&self, z: &DVector<f64>) -> DVector<f64>;
    fn vector_field_jacobian(&self, z: &DVector<f64>) -> DMatrix<f64>;
    fn vector_field_jacobian_transpose(&self, z: &DVector<f64>) -> DMatrix<f64> {
        self.vector_field_jacobian(z).transpose()
    }
    fn vector_field_second(&self, z: &DVector<f64>) -> Vec<DMatrix<f64>>;

    fn symplectic_form(&self, _z: &DVector<f64>) -> DMatrix<f64> {
        omega0(self.dof())
    }
    fn symplectic_form_derivative(&self, _z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        zeros_tensor(2 * self.dof())
    }
    fn metric(&self, _z: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(2 * self.dof(), 2 * self.dof())
    }
    fn metric_derivative(&self, _z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        zeros_tensor(2 * self.dof())
    }
    fn complex_structure(&self, _z: &DVector<f64>) -> DMatrix<f64> {
        omega0(self.dof())
    }
    fn complex_structure_transpose(&self, z: &DVector<f64>) -> DMatrix<f64> {
        self.complex_structure(z).transpose()
    }
    fn complex_structure_derivative(&self, _z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        zeros_tensor(2 * self.dof())
    }
    fn complex_structure_transpose_derivative(&self, z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.complex_structure_derivative(z).into_iter().map(|m| m.transpose()).collect()
    }
    /// Action form `a` with `Omega = da`; canonical choice `a = (p, -q)/2`.
    fn action_form(&self, z: &DVector<f64>) -> DVector<f64> {
        -0.5 * omega0(self.dof()) * z
    }

    /// `T_h = Omega (DX_h + DJ[X_h] J + J DX_h J)`.
    fn torsion(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let x = self.vector_field(z);
        let dx = self.vector_field_jacobian(z);
        let j = self.complex_structure(z);
        let dj = self.complex_structure_derivative(z);
        let mut djx = DMatrix::zeros(j.nrows(), j.ncols());
        for (t, m) in dj.iter().enumerate() {
            djx += m * x[t];
        }
        self.symplectic_form(z) * (&dx + djx * &j + &j * &dx * &j)
    }
    /// Derivative of [`HamiltonianSystem::torsion`]; the default is exact for constant triples.
    fn torsion_derivative(&self, z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let om = self.symplectic_form(z);
        let j = self.complex_structure(z);
        self.vector_field_second(z).into_iter().map(|d| &om * (&d + &j * &d * &j)).collect()
    }

    /// Moment map `p(z)` of length `n - d`.
    fn moment_map(&self, z: &DVector<f64>) -> DVector<f64>;
    /// `Dp(z)`, of size `(n - d) x 2n`.
    fn moment_jacobian(&self, z: &DVector<f64>) -> DMatrix<f64>;
    /// `X_p = Omega^{-1} Dp^T`, of size `2n x (n - d)`.
    fn moment_fields(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let om = self.symplectic_form(z);
        inverse(&om).expect("symplectic form is invertible") * self.moment_jacobian(z).transpose()
    }
    fn moment_fields_transpose(&self, z: &DVector<f64>) -> DMatrix<f64> {
        self.moment_fields(z).transpose()
    }
    fn moment_fields_derivative(&self, z: &DVector<f64>) -> Vec<DMatrix<f64>>;
    fn moment_fields_transpose_derivative(&self, z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.moment_fields_derivative(z).into_iter().map(|m| m.transpose()).collect()
    }
    /// Moment flow `Phi(s, z)`; identity when `d = n`.
    fn moment_flow(&self, s: &DVector<f64>, z: &DVector<f64>) -> DVector<f64>;
    fn moment_flow_jacobian(&self, s: &DVector<f64>, z: &DVector<f64>) -> DMatrix<f64>;
    /// Largest `|s|` for which the flow is defined.
    fn flow_time_radius(&self) -> f64 {
        f64::INFINITY
    }

    /// Radius of the real region `|z|_inf <= R` where the callables may be evaluated.
    fn domain_radius(&self) -> f64 {
        f64::INFINITY
    }

    /// Rigorous H1 bounds on a complex polydisc, when the system can provide them.
    fn analytic_bounds(&self, _domain: &BoundsDomain) -> Option<SystemBounds> {
        None
    }
}

fn zeros_tensor(m: usize) -> Vec<DMatrix<f64>> {
    vec![DMatrix::zeros(m, m); m]
}

/// Complex domain `{|z|_inf < radius}` and time disc `{|s| < time_radius}` for the H1 bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsDomain {
    pub radius: f64,
    pub time_radius: f64,
}

/// Global bounds of the H1 hypothesis over a [`BoundsDomain`].
///
/// Derivative bounds use `|DM| = max_i sum_j sum_t |d_t M_ij|`; the `_t`
/// variants take the maximum over columns instead.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemBounds {
    pub domain: BoundsDomain,
    /// False when the values come from sampling rather than analytic bounds.
    pub rigorous: bool,
    pub c_omega: f64,
    pub c_g: f64,
    pub c_j: f64,
    pub c_jt: f64,
    pub c_domega: f64,
    pub c_dg: f64,
    pub c_dj: f64,
    pub c_djt: f64,
    pub c_xh: f64,
    pub c_dxh: f64,
    pub c_dxht: f64,
    pub c_d2xh: f64,
    pub c_th: f64,
    pub c_dth: f64,
    pub c_xp: f64,
    pub c_dxp: f64,
    pub c_xpt: f64,
    pub c_dxpt: f64,
    pub c_dphi: f64,
}

impl SystemBounds {
    pub fn fields(&self) -> [(&'static str, f64); 19] {
        [
            ("c_Omega", self.c_omega),
            ("c_G", self.c_g),
            ("c_J", self.c_j),
            ("c_JT", self.c_jt),
            ("c_DOmega", self.c_domega),
            ("c_DG", self.c_dg),
            ("c_DJ", self.c_dj),
            ("c_DJT", self.c_djt),
            ("c_Xh", self.c_xh),
            ("c_DXh", self.c_dxh),
            ("c_DXhT", self.c_dxht),
            ("c_D2Xh", self.c_d2xh),
            ("c_Th", self.c_th),
            ("c_DTh", self.c_dth),
            ("c_Xp", self.c_xp),
            ("c_DXp", self.c_dxp),
            ("c_XpT", self.c_xpt),
            ("c_DXpT", self.c_dxpt),
            ("c_DPhi", self.c_dphi),
        ]
    }

    /// All constants finite and nonnegative, and `r > rho`.
    pub fn validate(&self, rho: f64) -> crate::Result<()> {
        for (name, v) in self.fields() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(crate::KamError::Hypothesis { name: name.into(), detail: format!("bound {v} is not a finite nonnegative number") });
            }
        }
        if !(self.domain.time_radius > rho) {
            return Err(crate::KamError::Hypothesis {
                name: "r".into(),
                detail: format!("time radius {} must exceed rho = {rho}", self.domain.time_radius),
            });
        }
        Ok(())
    }
}

/// Residuals of the compatible-triple identities at `z`:
/// `J^T Omega + Omega J`, `J^T Omega - G`, `J^2 + I`, `Omega - G J`, `Omega + Omega^T`, `G - G^T`.
pub fn triple_residual(sys: &dyn HamiltonianSystem, z: &DVector<f64>) -> f64 {
    let om = sys.symplectic_form(z);
    let g = sys.metric(z);
    let j = sys.complex_structure(z);
    let m = 2 * sys.dof();
    let id = DMatrix::<f64>::identity(m, m);
    [
        row_norm(&(j.transpose() * &om + &om * &j)),
        row_norm(&(j.transpose() * &om - &g)),
        row_norm(&(&j * &j + &id)),
        row_norm(&(&om - &g * &j)),
        row_norm(&(&om + om.transpose())),
        row_norm(&(&g - g.transpose())),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Residuals of `X_h^T Omega = -DH`, `Dp X_p = 0`, `Dp X_h = 0` and the symmetry of `T_h` at `z`.
pub fn hamiltonian_residuals(sys: &dyn HamiltonianSystem, z: &DVector<f64>) -> [f64; 4] {
    let om = sys.symplectic_form(z);
    let x = sys.vector_field(z);
    let dh = sys.gradient(z);
    let dp = sys.moment_jacobian(z);
    let th = sys.torsion(z);
    [
        (x.transpose() * &om + dh.transpose()).amax(),
        (&dp * sys.moment_fields(z)).amax(),
        (&dp * &x).amax(),
        (&th - th.transpose()).amax(),
    ]
}

/// Non-rigorous H1 bounds from real samples of the domain; flagged `rigorous = false`.
pub fn estimate_bounds(sys: &dyn HamiltonianSystem, domain: &BoundsDomain, samples: usize, seed: u64) -> SystemBounds {
    let n = sys.dof();
    let extra = n - sys.torus_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = SystemBounds {
        domain: *domain,
        rigorous: false,
        c_omega: 0.0,
        c_g: 0.0,
        c_j: 0.0,
        c_jt: 0.0,
        c_domega: 0.0,
        c_dg: 0.0,
        c_dj: 0.0,
        c_djt: 0.0,
        c_xh: 0.0,
        c_dxh: 0.0,
        c_dxht: 0.0,
        c_d2xh: 0.0,
        c_th: 0.0,
        c_dth: 0.0,
        c_xp: 0.0,
        c_dxp: 0.0,
        c_xpt: 0.0,
        c_dxpt: 0.0,
        c_dphi: if extra == 0 { 1.0 } else { 0.0 },
    };
    let up = |slot: &mut f64, v: f64| *slot = slot.max(v);
    for _ in 0..samples {
        let z = DVector::from_fn(2 * n, |_, _| rng.gen_range(-domain.radius..domain.radius));
        up(&mut b.c_omega, row_norm(&sys.symplectic_form(&z)));
        up(&mut b.c_g, row_norm(&sys.metric(&z)));
        up(&mut b.c_j, row_norm(&sys.complex_structure(&z)));
        up(&mut b.c_jt, row_norm(&sys.complex_structure_transpose(&z)));
        up(&mut b.c_domega, tensor_norm(&sys.symplectic_form_derivative(&z)));
        up(&mut b.c_dg, tensor_norm(&sys.metric_derivative(&z)));
        up(&mut b.c_dj, tensor_norm(&sys.complex_structure_derivative(&z)));
        up(&mut b.c_djt, tensor_norm(&sys.complex_structure_transpose_derivative(&z)));
        up(&mut b.c_xh, sys.vector_field(&z).amax());
        up(&mut b.c_dxh, row_norm(&sys.vector_field_jacobian(&z)));
        up(&mut b.c_dxht, row_norm(&sys.vector_field_jacobian_transpose(&z)));
        up(&mut b.c_d2xh, tensor_norm(&sys.vector_field_second(&z)));
        up(&mut b.c_th, row_norm(&sys.torsion(&z)));
        up(&mut b.c_dth, tensor_norm(&sys.torsion_derivative(&z)));
        if extra > 0 {
            up(&mut b.c_xp, row_norm(&sys.moment_fields(&z)));
            up(&mut b.c_xpt, row_norm(&sys.moment_fields_transpose(&z)));
            up(&mut b.c_dxp, tensor_norm(&sys.moment_fields_derivative(&z)));
            up(&mut b.c_dxpt, tensor_norm(&sys.moment_fields_transpose_derivative(&z)));
            let s = DVector::from_fn(extra, |_, _| rng.gen_range(-domain.time_radius..domain.time_radius));
            up(&mut b.c_dphi, row_norm(&sys.moment_flow_jacobian(&s, &z)));
        }
    }
    b
}

/// `max_i sum_j sum_t |T[t]_ij|` for a derivative tensor stored as slices.
pub fn tensor_norm(t: &[DMatrix<f64>]) -> f64 {
    let Some(first) = t.first() else { return 0.0 };
    (0..first.nrows())
        .map(|i| t.iter().map(|m| m.row(i).iter().map(|x| x.abs()).sum::<f64>()).sum::<f64>())
        .fold(0.0, f64::max)
}
