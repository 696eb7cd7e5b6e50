//! Hamiltonian systems with compatible triples, adapted frames and the
//! geometric residuals that vanish on invariant tori.

mod frames;
mod lift;
mod system;

pub use frames::{
    build_frames, build_tangent_frame, compose_with, lagrangianity_residual, reducibility_residual, symplecticity_residual, vector_field_on, FrameBundle,
    ReducibilityBlocks, TangentFrame, GRAM_CONDITION_LIMIT, RANK_THRESHOLD,
};
pub use lift::{lift_cylinder, lift_torus, momentum_on, momentum_spread, CylinderLift, LiftSpec, TorusLift};
pub use system::{estimate_bounds, hamiltonian_residuals, tensor_norm, triple_residual, BoundsDomain, HamiltonianSystem, SystemBounds};
