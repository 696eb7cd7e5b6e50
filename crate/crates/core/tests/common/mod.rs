#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

use kamtorus::fourier::FourierSpace;
use kamtorus::geometry::{BoundsDomain, HamiltonianSystem, SystemBounds};
use kamtorus::systems::{OscillatorFamily, PolynomialSystem, RotationalFamily};

pub const PHI: f64 = 1.618_033_988_749_895;

/// Delegates to a shipped system, optionally corrupting `DX_h` or shrinking the flow time radius.
pub struct Tampered {
    pub inner: PolynomialSystem,
    pub dxh_shift: f64,
    pub time_radius: Option<f64>,
}

impl HamiltonianSystem for Tampered {
    fn name(&self) -> String {
        format!("tampered-{}", self.inner.name())
    }
    fn dof(&self) -> usize {
        self.inner.dof()
    }
    fn torus_dim(&self) -> usize {
        self.inner.torus_dim()
    }
    fn hamiltonian(&self, z: &DVector<f64>) -> f64 {
        self.inner.hamiltonian(z)
    }
    fn gradient(&self, z: &DVector<f64>) -> DVector<f64> {
        self.inner.gradient(z)
    }
    fn vector_field(&self, z: &DVector<f64>) -> DVector<f64> {
        self.inner.vector_field(z)
    }
    fn vector_field_jacobian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let mut m = self.inner.vector_field_jacobian(z);
        m[(0, 0)] += self.dxh_shift;
        m
    }
    fn vector_field_second(&self, z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.inner.vector_field_second(z)
    }
    fn torsion(&self, z: &DVector<f64>) -> DMatrix<f64> {
        self.inner.torsion(z)
    }
    fn torsion_derivative(&self, z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.inner.torsion_derivative(z)
    }
    fn moment_map(&self, z: &DVector<f64>) -> DVector<f64> {
        self.inner.moment_map(z)
    }
    fn moment_jacobian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        self.inner.moment_jacobian(z)
    }
    fn moment_fields(&self, z: &DVector<f64>) -> DMatrix<f64> {
        self.inner.moment_fields(z)
    }
    fn moment_fields_derivative(&self, z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.inner.moment_fields_derivative(z)
    }
    fn moment_flow(&self, s: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        self.inner.moment_flow(s, z)
    }
    fn moment_flow_jacobian(&self, s: &DVector<f64>, z: &DVector<f64>) -> DMatrix<f64> {
        self.inner.moment_flow_jacobian(s, z)
    }
    fn flow_time_radius(&self) -> f64 {
        self.time_radius.unwrap_or_else(|| self.inner.flow_time_radius())
    }
    fn domain_radius(&self) -> f64 {
        self.inner.domain_radius()
    }
    fn analytic_bounds(&self, domain: &BoundsDomain) -> Option<SystemBounds> {
        self.inner.analytic_bounds(domain)
    }
}

pub fn golden(scale: f64) -> Vec<f64> {
    vec![scale, scale * PHI]
}

pub fn oscillator(coupling: f64) -> OscillatorFamily {
    OscillatorFamily::tuned(&golden(1.0), vec![0.5, 0.3], &[0.5, 0.4], coupling).unwrap()
}

pub fn rotational(coupling: f64, coupling3: f64) -> RotationalFamily {
    RotationalFamily::tuned(&golden(1.0), vec![0.5, 0.3, 0.2], &[0.5, 0.4, 0.3], 2.0, coupling, coupling3).unwrap()
}

pub fn space(cutoff: usize, grid: usize) -> FourierSpace {
    FourierSpace::uniform(2, cutoff, grid).unwrap()
}

/// Radii of the small tori used for converged runs; the weighted norm reaches 1e-11 there.
pub const SMALL: [f64; 3] = [0.05, 0.04, 0.03];

pub fn small_oscillator(coupling: f64) -> OscillatorFamily {
    OscillatorFamily::tuned(&golden(1.0), vec![0.5, 0.3], &SMALL[..2], coupling).unwrap()
}

pub fn small_rotational(coupling: f64, coupling3: f64) -> RotationalFamily {
    RotationalFamily::tuned(&golden(1.0), vec![0.5, 0.3, 0.2], &SMALL, 2.0, coupling, coupling3).unwrap()
}

pub fn diophantine(cutoff: usize) -> kamtorus::fourier::DiophantineData {
    let omega = golden(1.0);
    let (g, _) = kamtorus::fourier::best_gamma(&omega, 1.0, 2 * cutoff).unwrap();
    kamtorus::fourier::verify_diophantine(&omega, 0.9 * g, 1.0, 2 * cutoff).unwrap()
}

/// The reference strip: rho = 0.1, rho_inf = 0.04, delta = 0.01, so a = 2.
pub fn schedule() -> kamtorus::fourier::StripSchedule {
    kamtorus::fourier::StripSchedule::new(0.1, 0.04, 0.01).unwrap()
}

pub fn run_oscillator(coupling: f64, max_iter: usize) -> (OscillatorFamily, kamtorus::newton::NewtonRun) {
    let fam = small_oscillator(coupling);
    let (k0, _) = fam.exact_torus(&space(8, 32), &SMALL[..2]).unwrap();
    let cfg = kamtorus::newton::NewtonConfig { max_iter, tol: 1e-11, ..Default::default() };
    let run = kamtorus::newton::iterate(k0, &fam.system(), &diophantine(8), &schedule(), &cfg);
    (fam, run)
}

pub fn diophantine_to(k_max: usize) -> kamtorus::fourier::DiophantineData {
    let omega = golden(1.0);
    let (g, _) = kamtorus::fourier::best_gamma(&omega, 1.0, 16).unwrap();
    kamtorus::fourier::verify_diophantine(&omega, 0.9 * g, 1.0, k_max).unwrap()
}

/// Bounds domain for the certificate runs: `|z| < 1`, `|s| < 0.5`.
pub fn bounds_for(sys: &dyn HamiltonianSystem) -> SystemBounds {
    sys.analytic_bounds(&BoundsDomain { radius: 1.0, time_radius: 0.5 }).unwrap()
}

pub const CONTROLS: kamtorus::certificate::ControlConstants = kamtorus::certificate::ControlConstants { mu: 0.5, mu_e: 0.5, mu_eta_n: 1.0 };

#[derive(Clone)]
pub struct Certified {
    pub state: kamtorus::newton::TorusState,
    pub ledger: kamtorus::certificate::ConstantLedger,
    pub fin: kamtorus::certificate::FinalConstants,
    pub report: kamtorus::certificate::KamReport,
}

/// Measures `k` on the reference strip and runs the certificate with `sigma = margin * norm`.
pub fn certify(k: &kamtorus::fourier::FourierModel, sys: &dyn HamiltonianSystem, dio: &kamtorus::fourier::DiophantineData, russ: &kamtorus::certificate::RussmannInputs, margin: f64) -> kamtorus::Result<Certified> {
    use kamtorus::certificate::*;
    let sched = schedule();
    let state = kamtorus::newton::TorusState::assess(k.clone(), sys, dio, sched.rho0, sched.delta0)?;
    let bounds = bounds_for(sys);
    let measured = MeasuredNorms::of(&state, bounds.domain.radius)?;
    let sigma = ConditionNumbers::with_margin(&measured, margin);
    let dims = Dimensions { d: sys.torus_dim(), n: sys.dof() };
    let mut ledger = assemble_tables(&bounds, &sigma, &CONTROLS, dio, dims, sched.rho0, sched.delta0, russ)?;
    let fin = final_constants(&mut ledger, &sched, &CONTROLS, &measured)?;
    let report = check_kam(&state, &ledger, &fin, bounds.rigorous)?;
    Ok(Certified { state, ledger, fin, report })
}
