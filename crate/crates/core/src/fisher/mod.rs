//! Fisher information, readout distributions and Cramér-Rao bounds.
//!
//! Conventions:
//! - QFI uses `F_ab = Σ 2 Re(A_jk conj(B_jk)) / (p_j + p_k)` with `A = V†∂_aρV`.
//!   This is the normalization for which the single-measurement QFI equals
//!   `4N²|α|²e^{-4|α|²}`.
//! - Readout applies `exp(iπσ_y/4)` to every ancilla and measures `σ_z`. The
//!   single-measurement CFI is then
//!   `4N²|α|²e^{-4|α|²} sin²x / (1 - e^{-4|α|²} cos²x)` with `x = 2Nβ₁|α|` for
//!   imaginary `α`, which equals the QFI at `x = π/2`. The prefactor is 4; a
//!   prefactor of 2 would contradict that equality.
//! - Dicke-basis transfer: `V[k][k'] = ⟨D_{k'}|u^{⊗N}|D_k⟩`. For this `u` the
//!   closed form carries the sign `(-1)^{k'-s}` under the binomial sum, which
//!   differs from `(-1)^s` by a sign per column and leaves probabilities unchanged.

mod cfi;
mod eigen;
mod qfi;
mod report;
mod scaling;
mod transfer;

pub use cfi::{
    cfi_matrix, crb_min_over_rounds, estimated_params, index_of, noisy_cfi, outcome_distribution,
    outcome_distribution_with, protocol_cfi, single_two_param_crb, CrbSeries, DerivativeMode,
    OutcomeDistribution,
};
pub use eigen::HermitianEigen;
pub use qfi::{qfi_matrix, qfi_scalar, qfi_scalar_with_cutoff};
pub use report::{crb_of, FisherReport, UsedMatrix};
pub use scaling::scaling_exponent;
pub use transfer::{
    measurement_unitary, transfer_matrix, transfer_matrix_direct, unitarity_defect, MeasurementMap, Qubit2,
};

/// Closed-form single-measurement QFI `4N²|α|²e^{-4|α|²}`.
pub fn single_qfi_closed_form(n: usize, alpha_mag: f64) -> f64 {
    let (n, a2) = (n as f64, alpha_mag * alpha_mag);
    4.0 * n * n * a2 * (-4.0 * a2).exp()
}
