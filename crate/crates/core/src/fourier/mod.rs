//! Fourier function algebra on `T^d`.
//!
//! Models carry a fixed mode box and sampling grid. Nonlinear operations go
//! through the padded grid (twice the sampling grid per axis) and come back
//! through [`FourierModel::analyze`].

mod algebra;
mod compose;
mod fft;
pub mod io;
mod model;
mod norm;
mod schedule;
mod small_divisors;
mod space;

pub use compose::compose_shift;
pub use model::FourierModel;
pub use norm::StripNorm;
pub use schedule::StripSchedule;
pub(crate) use small_divisors::is_representative;
pub use small_divisors::{best_gamma, for_each_in_shell, solve_cohomological, verify_diophantine, DiophantineData};
pub use space::FourierSpace;
