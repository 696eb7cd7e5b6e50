//! Rüssmann constants, the constant tables and the KAM condition.
//!
//! Rows are evaluated in the printed order with ordinary floating point, so a
//! passing report is not a rigorous proof; directed rounding would be needed for that.

mod kam;
mod ledger;
mod neumann;
mod russmann;
pub mod special;
mod tables;

pub use kam::{check_kam, final_constants, ClosenessRadii, FinalConstants, InnerTerm, KamReport, MeasuredNorms, INNER_TERMS};
pub use ledger::{ConstantLedger, LedgerEntry};
pub use neumann::{neumann_inverse_check, NeumannVerdict};
pub use russmann::{c_r, compute_russmann, default_m, derivative_factor, russmann_hat, russmann_with, RussmannConstants, RussmannInputs, RussmannMode, SharpBound, ShellSums};
pub use special::{hurwitz_zeta, upper_incomplete_gamma_integral};
pub use tables::{assemble_tables, ConditionNumbers, ControlConstants, Dimensions};
