//! Truncated Fock-space master-equation reference.

use super::brute::BranchPlan;
use crate::decoherence::NoiseModel;
use crate::error::{Error, Result};
use crate::protocols::ProtocolSpec;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

pub const DEFAULT_FOCK_DIM: usize = 60;
const TOP_POPULATION_LIMIT: f64 = 1e-6;
const HALVING_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-9;
const MAX_STEPS: usize = 1 << 16;

type Op = DMatrix<Complex64>;

/// Qubit ⊗ oscillator density matrix, qubit outer: index `q·dim + n`,
/// `q = 0` for `↓`.
#[derive(Debug, Clone)]
pub struct FockState {
    pub dim: usize,
    pub rho: Op,
}

/// Coherent state `|x⟩` truncated to `dim` levels, by the stable recurrence
/// `c_n = c_{n-1} x / √n`.
pub fn coherent_vector(dim: usize, x: Complex64) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(dim);
    let mut c = Complex64::new((-x.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            c = c * x / (n as f64).sqrt();
        }
        v.push(c);
    }
    v
}

/// Matrix of `D(x)` on the truncated space, column `n` being `D(x)|n⟩` from
/// `D|n⟩ = (a† - x*) D|n-1⟩ / √n`.
pub fn displacement_matrix(dim: usize, x: Complex64) -> Op {
    let mut m = Op::zeros(dim, dim);
    let mut col = coherent_vector(dim, x);
    for n in 0..dim {
        if n > 0 {
            let mut next = vec![Complex64::new(0.0, 0.0); dim];
            for i in 0..dim {
                let raise = if i > 0 { (i as f64).sqrt() * col[i - 1] } else { Complex64::new(0.0, 0.0) };
                next[i] = (raise - x.conj() * col[i]) / (n as f64).sqrt();
            }
            col = next;
        }
        for i in 0..dim {
            m[(i, n)] = col[i];
        }
    }
    m
}

/// Oscillator Liouvillian with drive `H = i(εa† - ε*a)`, loss, heating and
/// dephasing.
#[derive(Debug, Clone, Copy)]
pub struct Liouvillian {
    pub epsilon: Complex64,
    pub loss: f64,
    pub heating: f64,
    pub dephasing: f64,
}

impl Liouvillian {
    pub fn new(noise: &NoiseModel, epsilon: Complex64) -> Self {
        Liouvillian {
            epsilon,
            loss: noise.gamma * (1.0 + noise.n_th),
            heating: noise.gamma * noise.n_th,
            dephasing: noise.gamma_d,
        }
    }

    fn apply(&self, s: &Op) -> Op {
        let d = s.nrows();
        let sq: Vec<f64> = (0..=d).map(|n| (n as f64).sqrt()).collect();
        let at = |i: isize, j: isize| -> Complex64 {
            if i < 0 || j < 0 || i >= d as isize || j >= d as isize {
                Complex64::new(0.0, 0.0)
            } else {
                s[(i as usize, j as usize)]
            }
        };
        let e = self.epsilon;
        Op::from_fn(d, d, |i, j| {
            let (ii, jj) = (i as isize, j as isize);
            let (ni, nj) = (i as f64, j as f64);
            // (a†σ)_ij, (aσ)_ij, (σa)_ij, (σa†)_ij
            let adag_s = sq[i] * at(ii - 1, jj);
            let a_s = sq[i + 1] * at(ii + 1, jj);
            let s_a = sq[j] * at(ii, jj - 1);
            let s_adag = sq[j + 1] * at(ii, jj + 1);
            let mut r = e * adag_s - e.conj() * a_s - (e * s_adag - e.conj() * s_a);
            let sij = s[(i, j)];
            if self.loss != 0.0 {
                r += self.loss * (sq[i + 1] * sq[j + 1] * at(ii + 1, jj + 1) - 0.5 * (ni + nj) * sij);
            }
            if self.heating != 0.0 {
                r += self.heating * (sq[i] * sq[j] * at(ii - 1, jj - 1) - 0.5 * (ni + nj + 2.0) * sij);
            }
            if self.dephasing != 0.0 {
                r += self.dephasing * (ni * nj - 0.5 * (ni * ni + nj * nj)) * sij;
            }
            r
        })
    }

    fn rk4(&self, s: &Op, duration: f64, steps: usize) -> Op {
        let h = duration / steps as f64;
        let hc = Complex64::new(h, 0.0);
        let mut x = s.clone();
        for _ in 0..steps {
            let k1 = self.apply(&x);
            let k2 = self.apply(&(&x + &k1 * (hc * 0.5)));
            let k3 = self.apply(&(&x + &k2 * (hc * 0.5)));
            let k4 = self.apply(&(&x + &k3 * hc));
            let two = Complex64::new(2.0, 0.0);
            x += (k1 + k2 * two + k3 * two + k4) * (hc / 6.0);
        }
        x
    }

    /// Evolves an oscillator operator, doubling the step count until halving
    /// the step changes the result by less than `1e-9` in max-norm.
    /// Returns the result and the accepted step count.
    pub fn evolve(&self, s: &Op, duration: f64, start_steps: usize) -> Result<(Op, usize)> {
        if duration == 0.0 {
            return Ok((s.clone(), 0));
        }
        let mut steps = start_steps.max(1);
        let mut coarse = self.rk4(s, duration, steps);
        loop {
            let fine = self.rk4(s, duration, 2 * steps);
            let gap = (&fine - &coarse).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if gap < HALVING_TOL {
                return Ok((fine, 2 * steps));
            }
            steps *= 2;
            if steps > MAX_STEPS {
                return Err(Error::Numerical("Fock integration did not converge".into()));
            }
            coarse = fine;
        }
    }
}

fn top_population(rho: &Op, dim: usize) -> f64 {
    let top = dim - dim.div_ceil(10);
    let blocks = rho.nrows() / dim;
    (0..blocks).flat_map(|q| (top..dim).map(move |n| q * dim + n)).map(|i| rho[(i, i)].re).sum()
}

impl FockState {
    /// Ancilla in `|↓⟩`, oscillator in the coherent state `|x⟩`.
    pub fn down_coherent(dim: usize, x: Complex64) -> Self {
        let v = coherent_vector(dim, x);
        let mut rho = Op::zeros(2 * dim, 2 * dim);
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] = v[i] * v[j].conj();
            }
        }
        FockState { dim, rho }
    }

    pub fn block(&self, q: usize, r: usize) -> Op {
        self.rho.view((q * self.dim, r * self.dim), (self.dim, self.dim)).into_owned()
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn top_population(&self) -> f64 {
        top_population(&self.rho, self.dim)
    }

    pub fn check_truncation(&self) -> Result<()> {
        let p = self.top_population();
        if p >= TOP_POPULATION_LIMIT {
            return Err(Error::Resource(format!(
                "population {p:e} in the top 10% of {} Fock levels; increase the dimension",
                self.dim
            )));
        }
        Ok(())
    }

    /// `⟨a⟩`.
    pub fn mean_amplitude(&self) -> Complex64 {
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for q in 0..2 {
            for n in 0..d - 1 {
                // Tr(aρ) = Σ √(n+1) ρ_{n+1, n}
                acc += ((n + 1) as f64).sqrt() * self.rho[(q * d + n + 1, q * d + n)];
            }
        }
        acc
    }

    /// `|+⟩⟨+| ⊗ D(α) + |−⟩⟨−| ⊗ D(-α)` with `|±⟩ = (|↓⟩ ± |↑⟩)/√2`.
    pub fn controlled_displacement(&self, alpha: Complex64) -> Self {
        let d = self.dim;
        let dp = displacement_matrix(d, alpha);
        let dm = displacement_matrix(d, -alpha);
        let sum = (&dp + &dm) * Complex64::new(0.5, 0.0);
        let diff = (&dp - &dm) * Complex64::new(0.5, 0.0);
        let mut u = Op::zeros(2 * d, 2 * d);
        u.view_mut((0, 0), (d, d)).copy_from(&sum);
        u.view_mut((d, d), (d, d)).copy_from(&sum);
        u.view_mut((0, d), (d, d)).copy_from(&diff);
        u.view_mut((d, 0), (d, d)).copy_from(&diff);
        FockState { dim: d, rho: &u * &self.rho * u.adjoint() }
    }
}

/// Signal drive that displaces the oscillator by `beta` per round of length
/// `t_round` when there is no noise: `ε = β / t_round`.
#[derive(Debug, Clone, Copy)]
pub struct SignalDrive {
    pub beta: Complex64,
    pub t_round: f64,
}

impl SignalDrive {
    pub fn epsilon(&self) -> Complex64 {
        if self.t_round > 0.0 {
            self.beta / self.t_round
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

/// Evolves every qubit block of `state` under the oscillator master equation
/// for `duration` seconds; the qubit itself is idle.
pub fn fock_lindblad_evolve(state: &FockState, noise: &NoiseModel, drive: SignalDrive, duration: f64) -> Result<FockState> {
    state.check_truncation()?;
    let l = Liouvillian::new(noise, drive.epsilon());
    let d = state.dim;
    let blocks = state.rho.nrows() / d;
    let mut rho = Op::zeros(state.rho.nrows(), state.rho.ncols());
    for q in 0..blocks {
        for r in 0..blocks {
            let b = state.rho.view((q * d, r * d), (d, d)).into_owned();
            let (out, _) = l.evolve(&b, duration, 16)?;
            rho.view_mut((q * d, r * d), (d, d)).copy_from(&out);
        }
    }
    let out = FockState { dim: d, rho };
    if (out.trace() - state.trace()).norm() > TRACE_TOL {
        return Err(Error::Numerical(format!("trace drifted to {}", out.trace())));
    }
    out.check_truncation()?;
    Ok(out)
}

/// Reduced ancilla matrix in the `±` basis over all `2^K` outcome strings,
/// obtained by evolving every oscillator dyad `|branch a⟩⟨branch b|` through
/// the rounds with physical displacement operators.
pub fn fock_ancilla_matrix(spec: &ProtocolSpec, noise: &NoiseModel, dim: usize) -> Result<DMatrix<Complex64>> {
    let plan = BranchPlan::from_spec(spec)?;
    let k = plan.kicks.len();
    if k > 6 {
        return Err(Error::Resource(format!("{k} kicks exceed the Fock oracle limit of 6")));
    }
    let rounds = spec.round_kicks();
    let l = Liouvillian::new(noise, SignalDrive { beta: spec.beta, t_round: noise.t_round }.epsilon());
    let v0 = coherent_vector(dim, Complex64::new(0.0, 0.0));
    let start = Op::from_fn(dim, dim, |i, j| v0[i] * v0[j].conj());
    // calibrate the step count on the vacuum over one round
    let (_, mut steps) = l.evolve(&start, noise.t_round, 8)?;
    steps = steps.max(8);
    let mut dyads: Vec<(u64, u64, Op)> = vec![(0, 0, start)];
    let mut slot = 0;
    for kick in rounds {
        dyads = dyads
            .into_par_iter()
            .map(|(a, b, s)| l.evolve(&s, noise.t_round, steps / 2).map(|(o, _)| (a, b, o)))
            .collect::<Result<Vec<_>>>()?;
        if let Some(alpha) = kick {
            let dp = displacement_matrix(dim, alpha);
            let dm = displacement_matrix(dim, -alpha);
            let mut next = Vec::with_capacity(dyads.len() * 4);
            for (a, b, s) in &dyads {
                for (sa, da) in [(0u64, &dm), (1u64, &dp)] {
                    let left = da * s;
                    for (sb, db) in [(0u64, &dm), (1u64, &dp)] {
                        next.push((a | sa << slot, b | sb << slot, &left * db.adjoint()));
                    }
                }
            }
            dyads = next;
            slot += 1;
        }
    }
    let n = 1usize << k;
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for (a, b, s) in &dyads {
        let pop: f64 = (dim - dim.div_ceil(10)..dim).map(|i| s[(i, i)].norm()).sum();
        if a == b && pop >= TOP_POPULATION_LIMIT {
            return Err(Error::Resource(format!("Fock dimension {dim} too small for branch {a:b}")));
        }
        out[(*a as usize, *b as usize)] = s.trace() / n as f64;
    }
    Ok(out)
}

/// `2 sin(|α|²)`: `[D(|α|), D(i|α|)] = 2i sin(|α|²) D(|α| + i|α|)`.
pub fn displacement_commutator_coefficient(alpha_mag: f64) -> f64 {
    2.0 * (alpha_mag * alpha_mag).sin()
}

