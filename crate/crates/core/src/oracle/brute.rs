//! Branch enumeration straight from the joint pure state
//! `2^{-K/2} Σ_a |a⟩ ⊗ |Rβ + Σ_j a_j α_j⟩`.

use crate::error::{Error, Result};
use crate::math::{coherent_overlap, ComplexAmplitude};
use crate::protocols::{ProtocolKind, ProtocolSpec};
use crate::tol::MAX_BRANCH_ROUNDS;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Kicks and signal multiplier read off a protocol spec.
#[derive(Debug, Clone)]
pub struct BranchPlan {
    /// Total signal displacement is `signal_rounds · β`.
    pub signal_rounds: usize,
    pub kicks: Vec<ComplexAmplitude>,
    /// `true` for kicks on the imaginary quadrature of a two-parameter run.
    pub imaginary: Vec<bool>,
}

impl BranchPlan {
    pub fn from_spec(spec: &ProtocolSpec) -> Result<Self> {
        spec.validate()?;
        let plan = match spec.kind {
            ProtocolKind::SingleMeasurement => BranchPlan {
                signal_rounds: spec.n,
                kicks: vec![spec.schedule[0]],
                imaginary: vec![false],
            },
            ProtocolKind::SeqOneParam => BranchPlan {
                signal_rounds: spec.n,
                kicks: spec.schedule.clone(),
                imaginary: vec![false; spec.n],
            },
            ProtocolKind::SeqTwoParam => BranchPlan {
                signal_rounds: spec.schedule.len(),
                kicks: spec.schedule.clone(),
                imaginary: (0..spec.schedule.len()).map(|j| j % 2 == 1).collect(),
            },
        };
        if plan.signal_rounds > MAX_BRANCH_ROUNDS {
            return Err(Error::Resource(format!(
                "{} rounds exceed the branch enumeration limit of {MAX_BRANCH_ROUNDS}",
                plan.signal_rounds
            )));
        }
        Ok(plan)
    }

    pub fn amplitude(&self, beta: Complex64, bits: u64) -> Complex64 {
        let mut mu = beta * self.signal_rounds as f64;
        for (j, &a) in self.kicks.iter().enumerate() {
            mu += if bits >> j & 1 == 1 { a } else { -a };
        }
        mu
    }
}

/// Output of [`brute_force_seq`]. Bit `j` of a branch label is `1` for `a_j = +1`;
/// bit `j` of a readout label is `1` for `↑`.
#[derive(Debug, Clone)]
pub struct BruteForce {
    pub plan: BranchPlan,
    pub branches: Vec<(u64, ComplexAmplitude)>,
    /// Reduced ancilla matrix in the `±` basis, `ρ_ab = 2^{-K}⟨μ_b|μ_a⟩`.
    pub rho: DMatrix<Complex64>,
    /// Readout probability of every `↓/↑` string.
    pub probabilities: Vec<f64>,
}

/// `⟨z|a⟩` for `|±⟩ = (|↓⟩ ± |↑⟩)/√2`, `z = 0` for `↓`, `a = 1` for `+`.
pub fn readout_amplitude(z: usize, a: usize) -> f64 {
    if z == 1 && a == 0 {
        -FRAC_1_SQRT_2
    } else {
        FRAC_1_SQRT_2
    }
}

const MAX_DENSE_KICKS: usize = 12;

pub fn brute_force_seq(spec: &ProtocolSpec) -> Result<BruteForce> {
    let plan = BranchPlan::from_spec(spec)?;
    let k = plan.kicks.len();
    if k > MAX_DENSE_KICKS {
        return Err(Error::Resource(format!("{k} kicks exceed the dense oracle limit of {MAX_DENSE_KICKS}")));
    }
    let d = 1usize << k;
    let branches: Vec<(u64, Complex64)> = (0..d as u64).map(|b| (b, plan.amplitude(spec.beta, b))).collect();
    let w = 1.0 / d as f64;
    let rho = DMatrix::from_fn(d, d, |a, b| coherent_overlap(branches[b].1, branches[a].1) * w);
    let probabilities = readout(&rho, k);
    Ok(BruteForce { plan, branches, rho, probabilities })
}

/// `P(z) = Σ_{a,b} ⟨z|a⟩ ρ_ab ⟨b|z⟩`, one qubit at a time.
fn readout(rho: &DMatrix<Complex64>, k: usize) -> Vec<f64> {
    let d = 1usize << k;
    let r = |z: usize, a: usize| readout_amplitude(z, a);
    let mut m = rho.clone();
    for q in 0..k {
        let bit = 1usize << q;
        for i in 0..d {
            for j in 0..d {
                if i & bit == 0 {
                    let (x0, x1) = (m[(i, j)], m[(i | bit, j)]);
                    m[(i, j)] = x0 * r(0, 0) + x1 * r(0, 1);
                    m[(i | bit, j)] = x0 * r(1, 0) + x1 * r(1, 1);
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                if j & bit == 0 {
                    let (x0, x1) = (m[(i, j)], m[(i, j | bit)]);
                    m[(i, j)] = x0 * r(0, 0) + x1 * r(0, 1);
                    m[(i, j | bit)] = x0 * r(1, 0) + x1 * r(1, 1);
                }
            }
        }
    }
    (0..d).map(|z| m[(z, z)].re).collect()
}

impl BruteForce {
    fn weights(&self, bits: usize) -> (usize, usize) {
        let (mut wr, mut wi) = (0, 0);
        for (j, &im) in self.plan.imaginary.iter().enumerate() {
            if bits >> j & 1 == 1 {
                if im {
                    wi += 1
                } else {
                    wr += 1
                }
            }
        }
        (wr, wi)
    }

    fn counts(&self) -> (usize, usize) {
        let n_im = self.plan.imaginary.iter().filter(|&&b| b).count();
        (self.plan.kicks.len() - n_im, n_im)
    }

    fn class_of(&self, bits: usize) -> usize {
        let (n_re, n_im) = self.counts();
        let (wr, wi) = self.weights(bits);
        if n_im == 0 {
            let _ = n_re;
            wr
        } else {
            wr * (n_im + 1) + wi
        }
    }

    fn class_count(&self) -> usize {
        let (n_re, n_im) = self.counts();
        if n_im == 0 {
            n_re + 1
        } else {
            (n_re + 1) * (n_im + 1)
        }
    }

    /// Projection of `ρ` onto normalized Dicke states of each quadrature,
    /// ordered like the compressed builders (`k_r` outer).
    pub fn dicke_grouped(&self) -> DMatrix<Complex64> {
        let c = self.class_count();
        let d = self.rho.nrows();
        let mut size = vec![0usize; c];
        for a in 0..d {
            size[self.class_of(a)] += 1;
        }
        let mut out = DMatrix::<Complex64>::zeros(c, c);
        for a in 0..d {
            for b in 0..d {
                out[(self.class_of(a), self.class_of(b))] += self.rho[(a, b)];
            }
        }
        DMatrix::from_fn(c, c, |i, j| out[(i, j)] / ((size[i] * size[j]) as f64).sqrt())
    }

    /// Readout probabilities summed over strings with equal Hamming weights.
    pub fn weight_distribution(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.class_count()];
        for (z, p) in self.probabilities.iter().enumerate() {
            out[self.class_of(z)] += p;
        }
        out
    }

    /// Amplitudes of the normalized Dicke states in the `±` basis expanded in
    /// `↓/↑` strings, then regrouped: `T[k][k'] = ⟨D_{k'}^{z}|D_k^{±}⟩`.
    pub fn dicke_basis_change(k: usize) -> DMatrix<f64> {
        let d = 1usize << k;
        let pop = |x: usize| x.count_ones() as usize;
        let mut t = DMatrix::<f64>::zeros(k + 1, k + 1);
        let mut size = vec![0usize; k + 1];
        for a in 0..d {
            size[pop(a)] += 1;
        }
        for a in 0..d {
            for z in 0..d {
                let amp: f64 = (0..k).map(|j| readout_amplitude(z >> j & 1, a >> j & 1)).product();
                t[(pop(a), pop(z))] += amp;
            }
        }
        DMatrix::from_fn(k + 1, k + 1, |i, j| t[(i, j)] / ((size[i] * size[j]) as f64).sqrt())
    }
}

/// Permutes the kick positions of a reduced matrix.
pub fn permute_qubits(rho: &DMatrix<Complex64>, perm: &[usize]) -> DMatrix<Complex64> {
    let d = rho.nrows();
    let map = |x: usize| -> usize {
        perm.iter().enumerate().fold(0, |acc, (j, &p)| acc | ((x >> j & 1) << p))
    };
    let mut out = DMatrix::<Complex64>::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            out[(map(a), map(b))] = rho[(a, b)];
        }
    }
    out
}
