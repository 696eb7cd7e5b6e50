//! Shipped example systems with polynomial Hamiltonians.

mod audit;
mod families;
mod poly;
mod polynomial;

pub use audit::{finite_difference_audit, AuditEntry, AuditReport};
pub use families::{FamilySpec, OscillatorFamily, RotationalFamily, FAMILIES};
pub use poly::Poly;
pub use polynomial::{MomentFlow, PlaneRotation, PolynomialSystem};
