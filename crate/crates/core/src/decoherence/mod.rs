//! Amplitude decay of the oscillator during the protocol.
//!
//! Loss and dephasing enter through `Γ = γ + γ_d`: coherent amplitudes decay as
//! `e^{-Γt/2}` per round while the signal keeps driving the oscillator. Branch
//! states stay coherent, and each pair of branches acquires a coherence factor
//! that is exact for the loss channel. Genuine dephasing is not
//! coherent-state preserving; the Fock-space oracle keeps it as a separate
//! dissipator so the error of folding it into `Γ` can be measured.

mod approx;
mod branches;
mod model;

pub use approx::{noisy_crb_curve, symmetric_noisy_approx, CurvePoint, NoisyCrbCurve};
pub use branches::{
    evolve_noisy_branches, evolve_noisy_branches_from, BranchEnsemble, BranchRecord, PhaseConvention,
};
pub use model::{displaced_amplitude, NoiseModel};
