use super::model::NoiseModel;
use crate::error::{Error, Result};
use crate::fisher::Qubit2;
use crate::math::{coherent_overlap, ComplexAmplitude};
use crate::protocols::{ProtocolKind, ProtocolSpec};
use crate::tol::MAX_BRANCH_ROUNDS;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

/// Which phases accompany a displacement of a coherent-state dyad.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseConvention {
    /// Displacements shift coherent amplitudes without extra phases, so the
    /// branch states are `|Rβ + Σ a_n α_n⟩`.
    Plain,
    /// Physical displacement operators, `D(x)|μ⟩ = e^{i Im(xμ*)}|μ + x⟩`.
    Weyl,
}

/// One outcome string and the oscillator amplitude it leaves behind.
///
/// Bit `j` of `bits` is the outcome of the `j`-th kick, 1 for `+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchRecord {
    pub bits: u64,
    pub amplitude: ComplexAmplitude,
    /// Amplitude of this branch in the joint state, `2^{-K/2}`.
    pub weight: f64,
}

#[derive(Debug, Clone, Copy)]
struct Round {
    kick: Option<ComplexAmplitude>,
}

/// Exact branch-resolved state of the noisy protocol.
///
/// Coherence factors between branches are replayed on demand from the two
/// outcome strings, so memory stays linear in the branch count.
#[derive(Debug, Clone)]
pub struct BranchEnsemble {
    records: Vec<BranchRecord>,
    rounds: Vec<Round>,
    /// Which kicks probe the imaginary quadrature (two-parameter only).
    quadrature: Vec<bool>,
    eta: f64,
    drive: ComplexAmplitude,
    initial: ComplexAmplitude,
    convention: PhaseConvention,
}

const MAX_DENSE_KICKS: usize = 13;

impl BranchEnsemble {
    pub fn records(&self) -> &[BranchRecord] {
        &self.records
    }

    pub fn kicks(&self) -> usize {
        self.quadrature.len()
    }

    /// Replays two outcome strings; returns final amplitudes and the
    /// accumulated log coherence factor.
    fn replay(&self, a: u64, b: u64) -> (Complex64, Complex64, Complex64) {
        let (mut mu, mut nu) = (self.initial, self.initial);
        let mut ln_f = Complex64::new(0.0, 0.0);
        let eta = self.eta;
        let b_drive = self.drive;
        let mut slot = 0;
        for r in &self.rounds {
            let d0 = mu - nu;
            if eta < 1.0 && d0 != Complex64::new(0.0, 0.0) {
                let c = 1.0 - eta * eta;
                ln_f += Complex64::new(
                    -c * d0.norm_sqr() / 2.0,
                    c * (mu * nu.conj()).im + (1.0 - eta) * (d0 * b_drive.conj()).im,
                );
            }
            if self.convention == PhaseConvention::Weyl {
                ln_f += Complex64::new(0.0, (b_drive * d0.conj()).im);
            }
            mu = eta * mu + b_drive;
            nu = eta * nu + b_drive;
            if let Some(alpha) = r.kick {
                let x = if a >> slot & 1 == 1 { alpha } else { -alpha };
                let y = if b >> slot & 1 == 1 { alpha } else { -alpha };
                if self.convention == PhaseConvention::Weyl {
                    ln_f += Complex64::new(0.0, (x * mu.conj()).im - (y * nu.conj()).im);
                }
                mu += x;
                nu += y;
                slot += 1;
            }
        }
        (mu, nu, ln_f)
    }

    /// Coherence factor between two branches, excluding their overlap.
    pub fn coherence(&self, a: u64, b: u64) -> Complex64 {
        self.replay(a, b).2.exp()
    }

    /// `ρ_ab = 2^{-K} ⟨μ_b|μ_a⟩ f_ab` over all `2^K` outcome strings.
    pub fn reduced_matrix(&self) -> Result<DMatrix<Complex64>> {
        let k = self.kicks();
        if k > MAX_DENSE_KICKS {
            return Err(Error::Resource(format!(
                "dense reduced matrix needs 4^{k} entries; limit is {MAX_DENSE_KICKS} kicks"
            )));
        }
        let d = 1usize << k;
        let scale = (d as f64).recip();
        let cols: Vec<Vec<Complex64>> = (0..d)
            .into_par_iter()
            .map(|a| {
                (0..d)
                    .map(|b| {
                        let (mu, nu, ln_f) = self.replay(a as u64, b as u64);
                        coherent_overlap(nu, mu) * ln_f.exp() * scale
                    })
                    .collect()
            })
            .collect();
        Ok(DMatrix::from_fn(d, d, |a, b| cols[a][b]))
    }

    /// Probability of every readout string when each ancilla is rotated by `u`.
    pub fn readout_probabilities(&self, u: &Qubit2) -> Result<Vec<f64>> {
        let mut m = self.reduced_matrix()?;
        let k = self.kicks();
        let d = 1usize << k;
        for q in 0..k {
            let bit = 1usize << q;
            // rows: m ← U m
            for col in 0..d {
                for r in 0..d {
                    if r & bit == 0 {
                        let (x0, x1) = (m[(r, col)], m[(r | bit, col)]);
                        m[(r, col)] = u[0][0] * x0 + u[0][1] * x1;
                        m[(r | bit, col)] = u[1][0] * x0 + u[1][1] * x1;
                    }
                }
            }
            // columns: m ← m U†
            for row in 0..d {
                for c in 0..d {
                    if c & bit == 0 {
                        let (x0, x1) = (m[(row, c)], m[(row, c | bit)]);
                        m[(row, c)] = x0 * u[0][0].conj() + x1 * u[0][1].conj();
                        m[(row, c | bit)] = x0 * u[1][0].conj() + x1 * u[1][1].conj();
                    }
                }
            }
        }
        Ok((0..d).map(|i| m[(i, i)].re).collect())
    }

    /// Readout probabilities grouped by Hamming weight, laid out like the
    /// compressed states: `k` for one quadrature, `(k_r, k_i)` row-major for two.
    pub fn weight_distribution(&self, u: &Qubit2) -> Result<Vec<f64>> {
        let probs = self.readout_probabilities(u)?;
        let n_im = self.quadrature.iter().filter(|&&q| q).count();
        let n_re = self.kicks() - n_im;
        let two = n_im > 0;
        let mut out = vec![0.0; if two { (n_re + 1) * (n_im + 1) } else { n_re + 1 }];
        for (z, p) in probs.iter().enumerate() {
            let (mut wr, mut wi) = (0, 0);
            for (j, &imag) in self.quadrature.iter().enumerate() {
                if z >> j & 1 == 1 {
                    if imag {
                        wi += 1;
                    } else {
                        wr += 1;
                    }
                }
            }
            let idx = if two { wr * (n_im + 1) + wi } else { wr };
            out[idx] += p;
        }
        Ok(out)
    }

    /// Weighted mean of the branch amplitudes.
    pub fn mean_amplitude(&self) -> Complex64 {
        self.records.iter().map(|r| r.amplitude * r.weight * r.weight).sum()
    }
}

/// Enumerates all branches of the noisy protocol, starting from vacuum with
/// displacements that carry no extra phases.
pub fn evolve_noisy_branches(spec: &ProtocolSpec, noise: &NoiseModel) -> Result<BranchEnsemble> {
    evolve_noisy_branches_from(spec, noise, Complex64::new(0.0, 0.0), PhaseConvention::Plain)
}

/// Per round: the signal accrues while the amplitude decays
/// (`μ → e^{-Γt/2} μ + b` with `b` from [`NoiseModel::round_displacement`]),
/// then the `±α` kick. A dyad `|μ⟩⟨ν|` picks up, over one round of loss and drive,
/// `ln f = -(1-η²)|Δ|²/2 + i(1-η²) Im(μν*) + i(1-η) Im(Δ b*)` with `Δ = μ - ν`
/// taken at the start of the round and `η = e^{-Γt/2}`.
pub fn evolve_noisy_branches_from(
    spec: &ProtocolSpec,
    noise: &NoiseModel,
    initial: ComplexAmplitude,
    convention: PhaseConvention,
) -> Result<BranchEnsemble> {
    spec.validate()?;
    noise.validate()?;
    let total = spec.total_rounds();
    if total > MAX_BRANCH_ROUNDS {
        return Err(Error::Resource(format!(
            "{total} rounds exceed the branch enumeration limit of {MAX_BRANCH_ROUNDS}; \
             use symmetric_noisy_approx"
        )));
    }
    let rounds: Vec<Round> = spec.round_kicks().into_iter().map(|kick| Round { kick }).collect();
    let quadrature: Vec<bool> = match spec.kind {
        ProtocolKind::SeqTwoParam => (0..spec.schedule.len()).map(|j| j % 2 == 1).collect(),
        ProtocolKind::SeqOneParam => vec![false; spec.n],
        ProtocolKind::SingleMeasurement => vec![false],
    };
    let mut ens = BranchEnsemble {
        records: Vec::new(),
        rounds,
        quadrature,
        eta: noise.eta(),
        drive: noise.round_displacement(spec.beta),
        initial,
        convention,
    };
    let k = ens.kicks();
    let weight = (0.5f64).powi(k as i32).sqrt();
    ens.records = (0..1u64 << k)
        .into_par_iter()
        .map(|bits| BranchRecord { bits, amplitude: ens.replay(bits, bits).0, weight })
        .collect();
    Ok(ens)
}
