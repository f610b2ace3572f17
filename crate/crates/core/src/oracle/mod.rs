//! Reference implementations used to validate the fast paths.
//!
//! Nothing here calls into the protocol builders, the Fisher module or the
//! decoherence module; the shared pieces are the amplitude type and
//! [`coherent_overlap`](crate::math::coherent_overlap). The grid fixture is
//! the exception: it inspects a state produced by the builders.

mod brute;
mod fock;
mod grid;
mod qfi_ref;
mod sampler;

pub use brute::{brute_force_seq, permute_qubits, readout_amplitude, BranchPlan, BruteForce};
pub use fock::{
    coherent_vector, displacement_commutator_coefficient, displacement_matrix, fock_ancilla_matrix,
    fock_lindblad_evolve, FockState, Liouvillian, SignalDrive, DEFAULT_FOCK_DIM,
};
pub use grid::{grid_fixture_at, grid_pattern, grid_state_fixture, reference_case_matrix, GridFixture};
pub use qfi_ref::{
    branch_rho_derivative, fidelity_qfi, pure_state_qfi, pure_state_qfi_branches, pure_state_qfi_dicke,
    restrict_to_dicke, root_fidelity, sld_qfi,
};
pub use sampler::{record_distribution, sample_trajectories, Bitstring};
