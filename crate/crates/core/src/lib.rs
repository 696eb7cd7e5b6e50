//! Solver and a-posteriori certifier for quasi-periodic invariant tori of
//! Hamiltonian systems with first integrals in involution.
//!
//! The pipeline is: pick a system ([`systems`]), parameterize a torus as a
//! [`fourier::FourierModel`], build the adapted frames ([`geometry`]), run the
//! quasi-Newton iteration ([`newton`]) and evaluate the KAM condition
//! ([`certificate`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
mod error;
pub mod fourier;
pub mod geometry;
pub mod linalg;
pub mod newton;
pub mod systems;

pub use error::{KamError, Result};
