// SPDX-License-Identifier: Apache-2.0

//! Ancilla-assisted displacement sensing of a harmonic oscillator.
//!
//! A qubit is repeatedly coupled to an oscillator through a state-dependent
//! displacement `±α` and measured, while the oscillator accumulates an unknown
//! displacement `β` each round. The crate builds the reduced ancilla states of
//! the single-measurement and sequential protocols, evaluates quantum and
//! classical Fisher information on them, and models amplitude decay.
//!
//! Modules:
//! - [`math`]: coherent-state overlaps, log-domain binomial weights, index maps.
//! - [`protocols`]: ancilla density matrices and their parameter derivatives.
//! - [`fisher`]: QFI, CFI, basis transfer, outcome distributions, CRB.
//! - [`decoherence`]: noisy branch evolution and the Hamming-compressed model.
//! - [`oracle`]: brute-force and truncated-Fock references, trajectory sampler.

pub mod decoherence;
pub mod error;
pub mod fisher;
pub mod math;
pub mod oracle;
pub mod protocols;
pub mod tol;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
