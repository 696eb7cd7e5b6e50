use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::polynomial::{PlaneRotation, PolynomialSystem};
use crate::fourier::{FourierModel, FourierSpace};
use crate::{KamError, Result};

/// `I_i = (q_i^2 + p_i^2) / 2` in `2n` variables.
fn action(n: usize, i: usize) -> Poly {
    let q = Poly::var(2 * n, i);
    let p = Poly::var(2 * n, n + i);
    q.mul(&q).add(&p.mul(&p)).scale(0.5)
}

/// `a I + b I^2 / 2`.
fn profile(n: usize, i: usize, a: f64, b: f64) -> Poly {
    let ii = action(n, i);
    ii.scale(a).add(&ii.mul(&ii).scale(0.5 * b))
}

fn q_squared(n: usize, i: usize) -> Poly {
    let q = Poly::var(2 * n, i);
    q.mul(&q)
}

fn check_radii(radii: &[f64], n: usize) -> Result<()> {
    if radii.len() != n {
        return Err(KamError::Shape(format!("{} radii for {n} planes", radii.len())));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0)) {
        return Err(KamError::Invalid(format!("radius {r} must be positive")));
    }
    Ok(())
}

/// `(r cos 2 pi theta_i, -r sin 2 pi theta_i)` in the rotating planes; the
/// remaining planes sit at `(r_i, 0)`.
fn circle_torus(space: &FourierSpace, n: usize, radii: &[f64]) -> FourierModel {
    let d = space.dim();
    let mut k = FourierModel::zeros(space, 2 * n, 1);
    for i in 0..n {
        if i < d {
            let mut e = vec![0i64; d];
            e[i] = 1;
            k.set_coefficient(&e, i, 0, Complex64::new(radii[i] / 2.0, 0.0)).unwrap();
            k.set_coefficient(&e, n + i, 0, Complex64::new(0.0, radii[i] / 2.0)).unwrap();
        } else {
            k.set_coefficient(&vec![0; d], i, 0, Complex64::new(radii[i], 0.0)).unwrap();
        }
    }
    k
}

/// Uncoupled planar oscillators `sum_i (a_i I_i + b_i I_i^2 / 2)` plus `eps q_1^2 q_2^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorFamily {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub coupling: f64,
}

impl OscillatorFamily {
    pub fn new(a: Vec<f64>, b: Vec<f64>, coupling: f64) -> Result<Self> {
        if a.len() != b.len() || a.len() < 2 {
            return Err(KamError::Shape(format!("need matching profiles for n >= 2 planes, got {} and {}", a.len(), b.len())));
        }
        Ok(Self { a, b, coupling })
    }

    /// Chooses `a_i` so that the torus of radii `r` rotates with frequency `omega`.
    pub fn tuned(omega: &[f64], b: Vec<f64>, radii: &[f64], coupling: f64) -> Result<Self> {
        check_radii(radii, b.len())?;
        if omega.len() != b.len() {
            return Err(KamError::Shape("frequency and profile lengths differ".into()));
        }
        let a = omega.iter().zip(&b).zip(radii).map(|((w, b), r)| 2.0 * PI * w - b * r * r / 2.0).collect();
        Self::new(a, b, coupling)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn hamiltonian(&self) -> Poly {
        let n = self.n();
        let mut h = Poly::zero(2 * n);
        for i in 0..n {
            h = h.add(&profile(n, i, self.a[i], self.b[i]));
        }
        h.add(&q_squared(n, 0).mul(&q_squared(n, 1)).scale(self.coupling))
    }

    pub fn system(&self) -> PolynomialSystem {
        PolynomialSystem::new("oscillator", self.n(), self.hamiltonian(), Vec::new(), None)
    }

    /// `omega_i = h_i'(r_i^2 / 2) / (2 pi)`.
    pub fn frequency(&self, radii: &[f64]) -> Result<DVector<f64>> {
        check_radii(radii, self.n())?;
        Ok(DVector::from_fn(self.n(), |i, _| (self.a[i] + self.b[i] * radii[i] * radii[i] / 2.0) / (2.0 * PI)))
    }

    /// Closed-form torus, invariant when the coupling vanishes.
    pub fn exact_torus(&self, space: &FourierSpace, radii: &[f64]) -> Result<(FourierModel, DVector<f64>)> {
        if space.dim() != self.n() {
            return Err(KamError::Shape(format!("{}-torus for {} planes", space.dim(), self.n())));
        }
        let omega = self.frequency(radii)?;
        Ok((circle_torus(space, self.n(), radii), omega))
    }
}

/// Three planes with the third action as a first integral:
/// `h_1(I_1) + h_2(I_2) + h_3(I_3) + eps q_1^2 q_2^2 + kappa q_1^2 I_3 - nu I_3`.
///
/// The moment map is `p = I_3` and its flow rotates plane 3. The discount
/// `nu` turns the invariant 3-tori into 2-tori of the discounted field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationalFamily {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub coupling: f64,
    #[serde(default)]
    pub coupling3: f64,
    #[serde(default)]
    pub discount: f64,
}

impl RotationalFamily {
    pub fn new(a: Vec<f64>, b: Vec<f64>, coupling: f64, coupling3: f64, discount: f64) -> Result<Self> {
        if a.len() != 3 || b.len() != 3 {
            return Err(KamError::Shape("rotational family has exactly three planes".into()));
        }
        Ok(Self { a, b, coupling, coupling3, discount })
    }

    /// Tunes the first two planes to `omega` and sets the discount to the
    /// rotation rate of plane 3 at radius `r_3`.
    pub fn tuned(omega: &[f64], b: Vec<f64>, radii: &[f64], a3: f64, coupling: f64, coupling3: f64) -> Result<Self> {
        check_radii(radii, 3)?;
        if omega.len() != 2 || b.len() != 3 {
            return Err(KamError::Shape("rotational family needs a 2-frequency and three profiles".into()));
        }
        let a = vec![2.0 * PI * omega[0] - b[0] * radii[0] * radii[0] / 2.0, 2.0 * PI * omega[1] - b[1] * radii[1] * radii[1] / 2.0, a3];
        let mut fam = Self::new(a, b, coupling, coupling3, 0.0)?;
        fam.discount = fam.natural_discount(radii[2]);
        Ok(fam)
    }

    /// `h_3'(r_3^2 / 2)`, the raw-time rotation rate of plane 3.
    pub fn natural_discount(&self, r3: f64) -> f64 {
        self.a[2] + self.b[2] * r3 * r3 / 2.0
    }

    fn base(&self) -> Poly {
        let n = 3;
        let mut h = Poly::zero(6);
        for i in 0..n {
            h = h.add(&profile(n, i, self.a[i], self.b[i]));
        }
        h.add(&q_squared(n, 0).mul(&q_squared(n, 1)).scale(self.coupling))
            .add(&q_squared(n, 0).mul(&action(n, 2)).scale(self.coupling3))
    }

    fn build(&self, name: &str, h: Poly) -> PolynomialSystem {
        let flow = Arc::new(PlaneRotation { n: 3, planes: vec![2] });
        PolynomialSystem::new(name, 3, h, vec![action(3, 2)], Some(flow))
    }

    /// The discounted system `H - nu I_3`, whose 2-tori the solver computes.
    pub fn system(&self) -> PolynomialSystem {
        self.build("rotational", self.base().add(&action(3, 2).scale(-self.discount)))
    }

    /// The original system, used when lifting to 3-tori.
    pub fn undiscounted(&self) -> PolynomialSystem {
        self.build("rotational-undiscounted", self.base())
    }

    pub fn frequency(&self, radii: &[f64]) -> Result<DVector<f64>> {
        check_radii(radii, 3)?;
        Ok(DVector::from_fn(2, |i, _| (self.a[i] + self.b[i] * radii[i] * radii[i] / 2.0) / (2.0 * PI)))
    }

    /// Closed-form 2-torus with plane 3 parked at `(r_3, 0)`; invariant for the
    /// discounted field when both couplings vanish and `nu = h_3'(r_3^2/2)`.
    pub fn exact_torus(&self, space: &FourierSpace, radii: &[f64]) -> Result<(FourierModel, DVector<f64>)> {
        if space.dim() != 2 {
            return Err(KamError::Shape("rotational tori are two-dimensional".into()));
        }
        let omega = self.frequency(radii)?;
        Ok((circle_torus(space, 3, radii), omega))
    }
}

/// Family selector used by run configurations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FamilySpec {
    Oscillator(OscillatorFamily),
    Rotational(RotationalFamily),
}

impl FamilySpec {
    pub fn system(&self) -> PolynomialSystem {
        match self {
            FamilySpec::Oscillator(f) => f.system(),
            FamilySpec::Rotational(f) => f.system(),
        }
    }

    pub fn exact_torus(&self, space: &FourierSpace, radii: &[f64]) -> Result<(FourierModel, DVector<f64>)> {
        match self {
            FamilySpec::Oscillator(f) => f.exact_torus(space, radii),
            FamilySpec::Rotational(f) => f.exact_torus(space, radii),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Oscillator(_) => "oscillator",
            FamilySpec::Rotational(_) => "rotational",
        }
    }
}

/// Names accepted by [`FamilySpec`].
pub const FAMILIES: [&str; 2] = ["oscillator", "rotational"];

