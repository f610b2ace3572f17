//! Simulated measurement records, one outcome per round.
//!
//! The branch model shifts coherent states without the displacement phases,
//! so a later displacement changes the statistics of outcomes already
//! recorded. Propagating a conditional oscillator state forward would not
//! reproduce the end-of-protocol distribution. Instead the exact joint record
//! distribution is built first and each outcome is drawn from its conditional
//! given the record so far.

use super::brute::brute_force_seq;
use crate::decoherence::{evolve_noisy_branches, NoiseModel};
use crate::error::{Error, Result};
use crate::fisher::measurement_unitary;
use crate::protocols::ProtocolSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Readout record; bit `j` is the outcome of the `j`-th measurement, 1 for `↑`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bitstring {
    pub bits: u64,
    pub len: usize,
}

impl Bitstring {
    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            f.write_str(if self.bits >> j & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `levels[r][p]`: probability that the first `r` outcomes equal the low `r` bits of `p`.
fn prefix_marginals(probs: Vec<f64>, k: usize) -> Vec<Vec<f64>> {
    let mut levels = vec![Vec::new(); k + 1];
    levels[k] = probs;
    for r in (0..k).rev() {
        let bit = 1usize << r;
        let next = &levels[r + 1];
        levels[r] = (0..bit).map(|p| next[p] + next[p | bit]).collect();
    }
    levels
}

/// Exact probability of every record.
pub fn record_distribution(spec: &ProtocolSpec, noise: Option<&NoiseModel>) -> Result<Vec<f64>> {
    let mut probs = match noise {
        Some(n) if n.gamma_total() > 0.0 => evolve_noisy_branches(spec, n)?.readout_probabilities(&measurement_unitary())?,
        _ => brute_force_seq(spec)?.probabilities,
    };
    for p in &mut probs {
        if *p < -1e-8 {
            return Err(Error::Numerical(format!("record probability {p} is negative")));
        }
        *p = p.max(0.0);
    }
    Ok(probs)
}

/// Draws `count` measurement records; the same seed gives the same records.
pub fn sample_trajectories(spec: &ProtocolSpec, noise: Option<&NoiseModel>, seed: u64, count: usize) -> Result<Vec<Bitstring>> {
    if count == 0 {
        return Err(Error::Domain("count must be at least 1".into()));
    }
    let probs = record_distribution(spec, noise)?;
    let k = probs.len().trailing_zeros() as usize;
    let levels = prefix_marginals(probs, k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut bits = 0usize;
        for r in 0..k {
            let here = levels[r][bits];
            let up = levels[r + 1][bits | 1 << r];
            let u: f64 = rng.gen();
            if here > 0.0 && u * here < up {
                bits |= 1 << r;
            }
        }
        out.push(Bitstring { bits: bits as u64, len: k });
    }
    Ok(out)
}
