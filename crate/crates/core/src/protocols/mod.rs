//! Reduced ancilla states of the three protocols and their derivatives.
//!
//! Each coupling outcome kicks the oscillator by `±α`, so after `R` rounds the
//! branch labelled by the outcome string `a` sits at `μ_a = Rβ + Σ a_n α_n`.
//! The reduced state is `ρ_{ab} = 2^{-R} ⟨μ_b|μ_a⟩`; for constant kicks it only
//! depends on Hamming weights and is stored in the compressed Dicke basis.

mod build;
mod spec;
mod state;

pub use build::{
    build_seq_rho, build_seq_rho_with, build_single_rho, build_state, build_two_param_rho,
    build_two_param_rho_with, d_rho, joint_qfi_closed_form, Limits,
};
pub use spec::{Param, ProtocolKind, ProtocolSpec};
pub use state::{hermiticity_defect, AncillaState, StateDerivative};
