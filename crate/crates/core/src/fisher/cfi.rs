use super::report::FisherReport;
use super::transfer::{measurement_unitary, MeasurementMap, Qubit2};
use crate::decoherence::{symmetric_noisy_approx, NoiseModel};
use crate::error::{Error, Result};
use crate::math::HammingIndex;
use crate::protocols::{build_state, d_rho, AncillaState, Param, ProtocolKind, ProtocolSpec};
use crate::tol::{EPS_NEG_PROB, EPS_PROB};
use nalgebra::Matrix2;

/// Probability of each Hamming-weight outcome after readout.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub index: HammingIndex,
    pub p: Vec<f64>,
    /// Mean fraction of `↑` outcomes, `⟨k⟩/N` (summed over both quadratures).
    pub mean_excitation: f64,
}

impl OutcomeDistribution {
    fn from_raw(index: HammingIndex, raw: Vec<f64>) -> Result<Self> {
        let mut p = raw;
        for (i, x) in p.iter_mut().enumerate() {
            if *x < EPS_NEG_PROB {
                return Err(Error::Numerical(format!("outcome {i} has probability {x:e}")));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let total = match index {
            HammingIndex::Scalar { n } => n,
            HammingIndex::Pair { n_re, n_im } => n_re + n_im,
        } as f64;
        let mean: f64 = p
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let (a, b) = index.weights(i);
                (a + b) as f64 * x
            })
            .sum();
        Ok(OutcomeDistribution { index, p, mean_excitation: mean / total })
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// Outcome distribution of `state` measured qubit-by-qubit in the basis `u`.
pub fn outcome_distribution(state: &AncillaState, u: &Qubit2) -> Result<OutcomeDistribution> {
    let map = MeasurementMap::new(state.index(), u)?;
    outcome_distribution_with(state, &map)
}

pub fn outcome_distribution_with(state: &AncillaState, map: &MeasurementMap) -> Result<OutcomeDistribution> {
    if map.index() != state.index() {
        return Err(Error::Usage("measurement map and state have different bases".into()));
    }
    OutcomeDistribution::from_raw(state.index(), map.diagonal(state.entries()))
}

/// `F_ab = Σ_k ∂_a P(k) ∂_b P(k) / P(k)`, skipping `P(k) < 1e-14`.
///
/// `dp` holds one derivative vector per parameter (one or two).
pub fn cfi_matrix(dist: &OutcomeDistribution, dp: &[Vec<f64>]) -> Result<FisherReport> {
    if dp.is_empty() || dp.len() > 2 {
        return Err(Error::Usage(format!("expected 1 or 2 derivative vectors, got {}", dp.len())));
    }
    if dp.iter().any(|d| d.len() != dist.p.len()) {
        return Err(Error::Usage("derivative length does not match distribution".into()));
    }
    let mut f = Matrix2::<f64>::zeros();
    for (k, &p) in dist.p.iter().enumerate() {
        if p < EPS_PROB {
            continue;
        }
        for a in 0..dp.len() {
            for b in 0..dp.len() {
                f[(a, b)] += dp[a][k] * dp[b][k] / p;
            }
        }
    }
    Ok(FisherReport::from_cfi(f, dp.len()))
}

/// How `∂P` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    /// Through the analytic `∂ρ` and the transfer matrix.
    Analytic,
    /// Central difference of the distribution with step `h`.
    FiniteDifference(f64),
}

/// Parameters estimated by a protocol: the probed quadrature for one-parameter
/// protocols, both for the two-parameter protocol.
pub fn estimated_params(spec: &ProtocolSpec) -> Vec<Param> {
    match spec.kind {
        ProtocolKind::SeqTwoParam => Param::BOTH.to_vec(),
        _ => vec![spec.sensitive_param()],
    }
}

/// Classical Fisher information of the noiseless protocol in the readout basis.
pub fn protocol_cfi(spec: &ProtocolSpec, map: &MeasurementMap, mode: DerivativeMode) -> Result<FisherReport> {
    let state = build_state(spec)?;
    let dist = outcome_distribution_with(&state, map)?;
    let params = estimated_params(spec);
    let dp = match mode {
        DerivativeMode::Analytic => params
            .iter()
            .map(|&p| d_rho(&state, p).map(|d| map.diagonal(&d.entries)))
            .collect::<Result<Vec<_>>>()?,
        DerivativeMode::FiniteDifference(h) => params
            .iter()
            .map(|&p| {
                let step = p.direction() * h;
                let up = outcome_distribution_with(&build_state(&spec.with_beta(spec.beta + step))?, map)?;
                let dn = outcome_distribution_with(&build_state(&spec.with_beta(spec.beta - step))?, map)?;
                Ok(up.p.iter().zip(&dn.p).map(|(a, b)| (a - b) / (2.0 * h)).collect())
            })
            .collect::<Result<Vec<_>>>()?,
    };
    cfi_matrix(&dist, &dp)
}

/// Noisy-state CFI with central differences in `β`, step `h`, checked against
/// step `h/2`.
pub fn noisy_cfi(spec: &ProtocolSpec, noise: &NoiseModel, map: &MeasurementMap) -> Result<FisherReport> {
    const H: f64 = 1e-5;
    const HALVING_TOL: f64 = 1e-4;
    let dist_at = |b| -> Result<OutcomeDistribution> {
        outcome_distribution_with(&symmetric_noisy_approx(&spec.with_beta(b), noise)?, map)
    };
    let dist = dist_at(spec.beta)?;
    let params = estimated_params(spec);
    let diff = |p: Param, h: f64| -> Result<Vec<f64>> {
        let step = p.direction() * h;
        let up = dist_at(spec.beta + step)?;
        let dn = dist_at(spec.beta - step)?;
        Ok(up.p.iter().zip(&dn.p).map(|(a, b)| (a - b) / (2.0 * h)).collect())
    };
    let mut dp = Vec::new();
    for &p in &params {
        let full = diff(p, H)?;
        let half = diff(p, H / 2.0)?;
        let scale = full.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
        let gap = full.iter().zip(&half).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if gap > HALVING_TOL * scale.max(1.0) {
            return Err(Error::Numerical(format!(
                "finite-difference derivative unstable under step halving ({gap:e})"
            )));
        }
        dp.push(half);
    }
    cfi_matrix(&dist, &dp)
}

/// CRB of every prefix protocol and the running minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct CrbSeries {
    pub per_round: Vec<f64>,
    pub running_min: Vec<f64>,
}

/// For each prefix `n = 1..=R` the CFI-based CRB of the first `n` rounds
/// measured in the standard basis, and its running minimum.
pub fn crb_min_over_rounds(spec: &ProtocolSpec, noise: Option<&NoiseModel>) -> Result<CrbSeries> {
    let u = measurement_unitary();
    let mut per_round = Vec::with_capacity(spec.total_rounds());
    for n in 1..=spec.total_rounds() {
        let pre = spec.prefix(n)?;
        let map = MeasurementMap::new(index_of(&pre), &u)?;
        let report = match noise {
            Some(nm) if nm.gamma_total() > 0.0 => noisy_cfi(&pre, nm, &map)?,
            _ => protocol_cfi(&pre, &map, DerivativeMode::Analytic)?,
        };
        per_round.push(report.crb);
    }
    let mut running_min = Vec::with_capacity(per_round.len());
    let mut best = f64::INFINITY;
    for &c in &per_round {
        best = best.min(c);
        running_min.push(best);
    }
    Ok(CrbSeries { per_round, running_min })
}

/// Basis of the state `build_state(spec)` would produce.
pub fn index_of(spec: &ProtocolSpec) -> HammingIndex {
    match spec.kind {
        ProtocolKind::SingleMeasurement => HammingIndex::Scalar { n: 1 },
        ProtocolKind::SeqOneParam => HammingIndex::Scalar { n: spec.n },
        ProtocolKind::SeqTwoParam => {
            let (n_re, n_im) = spec.quadrature_counts();
            HammingIndex::Pair { n_re, n_im }
        }
    }
}

/// CRB of the single-measurement baseline estimating both quadratures with
/// two independent runs of `n` rounds: `1/F₁ + 1/F₂`.
pub fn single_two_param_crb(n: usize, alpha_mag: f64, beta: num_complex::Complex64, noise: Option<&NoiseModel>) -> Result<f64> {
    use num_complex::Complex64;
    let map = MeasurementMap::new(HammingIndex::Scalar { n: 1 }, &measurement_unitary())?;
    let mut total = 0.0;
    for alpha in [Complex64::new(0.0, alpha_mag), Complex64::new(alpha_mag, 0.0)] {
        let spec = ProtocolSpec::single(n, alpha, beta)?;
        let r = match noise {
            Some(nm) if nm.gamma_total() > 0.0 => noisy_cfi(&spec, nm, &map)?,
            _ => protocol_cfi(&spec, &map, DerivativeMode::Analytic)?,
        };
        total += r.crb;
    }
    Ok(total)
}
