use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::poly::Poly;
use crate::geometry::{BoundsDomain, HamiltonianSystem, SystemBounds};
use crate::linalg::omega0;

type PolyMat = Vec<Vec<Poly>>;

/// Flow of the moment fields, supplied in closed form by each family.
pub trait MomentFlow: Send + Sync {
    fn flow(&self, s: &DVector<f64>, z: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, s: &DVector<f64>, z: &DVector<f64>) -> DMatrix<f64>;
    /// Bound of `|D_z Phi|` over complex times `|s| < r`.
    fn jacobian_bound(&self, r: f64) -> f64;
    fn time_radius(&self) -> f64 {
        f64::INFINITY
    }
}

/// Rotation of the planes `(q_i, p_i)`, one per moment, by angle `s_j`:
/// the flow of `X_{I_i}` with `I_i = (q_i^2 + p_i^2) / 2`.
#[derive(Clone, Debug)]
pub struct PlaneRotation {
    pub n: usize,
    pub planes: Vec<usize>,
}

impl MomentFlow for PlaneRotation {
    fn flow(&self, s: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let mut out = z.clone();
        for (j, &i) in self.planes.iter().enumerate() {
            let (c, sn) = (s[j].cos(), s[j].sin());
            let (q, p) = (z[i], z[self.n + i]);
            out[i] = q * c + p * sn;
            out[self.n + i] = -q * sn + p * c;
        }
        out
    }

    fn jacobian(&self, s: &DVector<f64>, _z: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::identity(2 * self.n, 2 * self.n);
        for (j, &i) in self.planes.iter().enumerate() {
            let (c, sn) = (s[j].cos(), s[j].sin());
            m[(i, i)] = c;
            m[(i, self.n + i)] = sn;
            m[(self.n + i, i)] = -sn;
            m[(self.n + i, self.n + i)] = c;
        }
        m
    }

    fn jacobian_bound(&self, r: f64) -> f64 {
        // |cos s|, |sin s| <= cosh(Im s) <= cosh r
        if self.planes.is_empty() {
            1.0
        } else {
            2.0 * r.cosh()
        }
    }
}

/// Canonical-triple system whose Hamiltonian and moment map are polynomials.
/// All derivatives are exact polynomial derivatives.
#[derive(Clone)]
pub struct PolynomialSystem {
    name: String,
    n: usize,
    d: usize,
    h: Poly,
    grad: Vec<Poly>,
    xh: Vec<Poly>,
    dxh: PolyMat,
    d2xh: Vec<PolyMat>,
    th: PolyMat,
    dth: Vec<PolyMat>,
    moment: Vec<Poly>,
    dp: PolyMat,
    xp: PolyMat,
    dxp: Vec<PolyMat>,
    flow: Option<Arc<dyn MomentFlow>>,
    domain_radius: f64,
}

/// `Omega_0^{-1} v = (v_p, -v_q)`.
fn apply_omega0_inv(n: usize, v: &[Poly]) -> Vec<Poly> {
    (0..2 * n).map(|i| if i < n { v[n + i].clone() } else { v[i - n].scale(-1.0) }).collect()
}

fn jac(v: &[Poly], nvars: usize) -> PolyMat {
    v.iter().map(|p| (0..nvars).map(|t| p.derivative(t)).collect()).collect()
}

fn diff_mat(m: &PolyMat, t: usize) -> PolyMat {
    m.iter().map(|r| r.iter().map(|p| p.derivative(t)).collect()).collect()
}

fn const_left(a: &DMatrix<f64>, m: &PolyMat) -> PolyMat {
    let nv = m[0][0].nvars();
    (0..a.nrows())
        .map(|i| {
            (0..m[0].len())
                .map(|j| (0..a.ncols()).filter(|&k| a[(i, k)] != 0.0).fold(Poly::zero(nv), |acc, k| acc.add(&m[k][j].scale(a[(i, k)]))))
                .collect()
        })
        .collect()
}

fn const_right(m: &PolyMat, a: &DMatrix<f64>) -> PolyMat {
    let nv = m[0][0].nvars();
    (0..m.len())
        .map(|i| {
            (0..a.ncols())
                .map(|j| (0..a.nrows()).filter(|&k| a[(k, j)] != 0.0).fold(Poly::zero(nv), |acc, k| acc.add(&m[i][k].scale(a[(k, j)]))))
                .collect()
        })
        .collect()
}

fn add_mat(a: &PolyMat, b: &PolyMat) -> PolyMat {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect()).collect()
}

fn eval_mat(m: &PolyMat, rows: usize, cols: usize, z: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |i, j| m[i][j].eval(z))
}

fn bound_rows(m: &PolyMat, r: f64) -> f64 {
    m.iter().map(|row| row.iter().map(|p| p.sup_bound(r)).sum::<f64>()).fold(0.0, f64::max)
}

fn bound_cols(m: &PolyMat, r: f64) -> f64 {
    let cols = m.first().map_or(0, |row| row.len());
    (0..cols).map(|j| m.iter().map(|row| row[j].sup_bound(r)).sum::<f64>()).fold(0.0, f64::max)
}

fn bound_tensor_rows(t: &[PolyMat], r: f64) -> f64 {
    let Some(first) = t.first() else { return 0.0 };
    (0..first.len()).map(|i| t.iter().map(|m| m[i].iter().map(|p| p.sup_bound(r)).sum::<f64>()).sum::<f64>()).fold(0.0, f64::max)
}

fn bound_tensor_cols(t: &[PolyMat], r: f64) -> f64 {
    let Some(first) = t.first() else { return 0.0 };
    let cols = first.first().map_or(0, |row| row.len());
    (0..cols).map(|j| t.iter().map(|m| m.iter().map(|row| row[j].sup_bound(r)).sum::<f64>()).sum::<f64>()).fold(0.0, f64::max)
}

impl PolynomialSystem {
    /// `h` in `2n` variables; `moment` holds the `n - d` first integrals.
    pub fn new(name: impl Into<String>, n: usize, h: Poly, moment: Vec<Poly>, flow: Option<Arc<dyn MomentFlow>>) -> Self {
        let m = 2 * n;
        assert_eq!(h.nvars(), m, "Hamiltonian must use 2n variables");
        let d = n - moment.len();
        let grad: Vec<Poly> = (0..m).map(|t| h.derivative(t)).collect();
        let xh = apply_omega0_inv(n, &grad);
        let dxh = jac(&xh, m);
        let d2xh: Vec<PolyMat> = (0..m).map(|t| diff_mat(&dxh, t)).collect();
        let o = omega0(n);
        let jdxj = const_right(&const_left(&o, &dxh), &o);
        let th = const_left(&o, &add_mat(&dxh, &jdxj));
        let dth: Vec<PolyMat> = (0..m).map(|t| diff_mat(&th, t)).collect();
        let dp = jac(&moment, m);
        // columns of X_p are Omega_0^{-1} grad p_j
        let cols: Vec<Vec<Poly>> = dp.iter().map(|row| apply_omega0_inv(n, row)).collect();
        let xp: PolyMat = (0..m).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        let dxp: Vec<PolyMat> = if moment.is_empty() { Vec::new() } else { (0..m).map(|t| diff_mat(&xp, t)).collect() };
        Self {
            name: name.into(),
            n,
            d,
            h,
            grad,
            xh,
            dxh,
            d2xh,
            th,
            dth,
            moment,
            dp,
            xp,
            dxp,
            flow,
            domain_radius: f64::INFINITY,
        }
    }

    pub fn with_domain_radius(mut self, r: f64) -> Self {
        self.domain_radius = r;
        self
    }

    pub fn hamiltonian_poly(&self) -> &Poly {
        &self.h
    }

    pub fn moment_polys(&self) -> &[Poly] {
        &self.moment
    }

    fn extra(&self) -> usize {
        self.n - self.d
    }
}

impl HamiltonianSystem for PolynomialSystem {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn dof(&self) -> usize {
        self.n
    }

    fn torus_dim(&self) -> usize {
        self.d
    }

    fn hamiltonian(&self, z: &DVector<f64>) -> f64 {
        self.h.eval(z.as_slice())
    }

    fn gradient(&self, z: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(2 * self.n, self.grad.iter().map(|p| p.eval(z.as_slice())))
    }

    fn vector_field(&self, z: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(2 * self.n, self.xh.iter().map(|p| p.eval(z.as_slice())))
    }

    fn vector_field_jacobian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        eval_mat(&self.dxh, 2 * self.n, 2 * self.n, z.as_slice())
    }

    fn vector_field_second(&self, z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.d2xh.iter().map(|m| eval_mat(m, 2 * self.n, 2 * self.n, z.as_slice())).collect()
    }

    fn torsion(&self, z: &DVector<f64>) -> DMatrix<f64> {
        eval_mat(&self.th, 2 * self.n, 2 * self.n, z.as_slice())
    }

    fn torsion_derivative(&self, z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.dth.iter().map(|m| eval_mat(m, 2 * self.n, 2 * self.n, z.as_slice())).collect()
    }

    fn moment_map(&self, z: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.extra(), self.moment.iter().map(|p| p.eval(z.as_slice())))
    }

    fn moment_jacobian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        if self.extra() == 0 {
            return DMatrix::zeros(0, 2 * self.n);
        }
        eval_mat(&self.dp, self.extra(), 2 * self.n, z.as_slice())
    }

    fn moment_fields(&self, z: &DVector<f64>) -> DMatrix<f64> {
        if self.extra() == 0 {
            return DMatrix::zeros(2 * self.n, 0);
        }
        eval_mat(&self.xp, 2 * self.n, self.extra(), z.as_slice())
    }

    fn moment_fields_derivative(&self, z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        if self.extra() == 0 {
            return vec![DMatrix::zeros(2 * self.n, 0); 2 * self.n];
        }
        self.dxp.iter().map(|m| eval_mat(m, 2 * self.n, self.extra(), z.as_slice())).collect()
    }

    fn moment_flow(&self, s: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        match &self.flow {
            Some(f) => f.flow(s, z),
            None => z.clone(),
        }
    }

    fn moment_flow_jacobian(&self, s: &DVector<f64>, z: &DVector<f64>) -> DMatrix<f64> {
        match &self.flow {
            Some(f) => f.jacobian(s, z),
            None => DMatrix::identity(2 * self.n, 2 * self.n),
        }
    }

    fn flow_time_radius(&self) -> f64 {
        self.flow.as_ref().map_or(f64::INFINITY, |f| f.time_radius())
    }

    fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    fn analytic_bounds(&self, domain: &BoundsDomain) -> Option<SystemBounds> {
        let r = domain.radius;
        let extra = self.extra();
        Some(SystemBounds {
            domain: *domain,
            rigorous: true,
            c_omega: 1.0,
            c_g: 1.0,
            c_j: 1.0,
            c_jt: 1.0,
            c_domega: 0.0,
            c_dg: 0.0,
            c_dj: 0.0,
            c_djt: 0.0,
            c_xh: self.xh.iter().map(|p| p.sup_bound(r)).fold(0.0, f64::max),
            c_dxh: bound_rows(&self.dxh, r),
            c_dxht: bound_cols(&self.dxh, r),
            c_d2xh: bound_tensor_rows(&self.d2xh, r),
            c_th: bound_rows(&self.th, r),
            c_dth: bound_tensor_rows(&self.dth, r),
            c_xp: if extra == 0 { 0.0 } else { bound_rows(&self.xp, r) },
            c_dxp: if extra == 0 { 0.0 } else { bound_tensor_rows(&self.dxp, r) },
            c_xpt: if extra == 0 { 0.0 } else { bound_cols(&self.xp, r) },
            c_dxpt: if extra == 0 { 0.0 } else { bound_tensor_cols(&self.dxp, r) },
            c_dphi: match (&self.flow, extra) {
                (_, 0) | (None, _) => 1.0,
                (Some(f), _) => f.jacobian_bound(domain.time_radius),
            },
        })
    }
}
