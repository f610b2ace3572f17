use super::model::NoiseModel;
use crate::error::Result;
use crate::fisher::{crb_min_over_rounds, single_two_param_crb, CrbSeries};
use crate::fisher::{measurement_unitary, noisy_cfi, protocol_cfi, DerivativeMode, MeasurementMap};
use crate::math::{coherent_overlap, dicke_weight, polar_from_log, HammingIndex};
use crate::protocols::{build_state, AncillaState, ProtocolKind, ProtocolSpec};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Hamming-compressed noisy state.
///
/// Each weight class `k` is represented by one mean-field trajectory whose kick
/// in every round is the class average `α(2k/N - 1)`; decay and coherence
/// factors then follow the branch model round by round. The result is a Gram
/// matrix, so it is Hermitian, trace one and positive semidefinite. Without
/// noise the builders are called directly.
pub fn symmetric_noisy_approx(spec: &ProtocolSpec, noise: &NoiseModel) -> Result<AncillaState> {
    spec.validate()?;
    noise.validate()?;
    if noise.gamma_total() == 0.0 {
        return build_state(spec);
    }
    let eta = noise.eta();
    let b = noise.round_displacement(spec.beta);
    let kicks = spec.round_kicks();
    let (index, class_kicks, log_w): (HammingIndex, Vec<Vec<Complex64>>, Vec<f64>) = match spec.kind {
        ProtocolKind::SingleMeasurement => {
            let a = spec.schedule[0];
            let per_class = [-a, a]
                .iter()
                .map(|&x| kicks.iter().map(|k| if k.is_some() { x } else { Complex64::new(0.0, 0.0) }).collect())
                .collect();
            (HammingIndex::Scalar { n: 1 }, per_class, vec![0.5f64.ln(); 2])
        }
        ProtocolKind::SeqOneParam => {
            let n = spec.n;
            let per_class = (0..=n)
                .map(|k| {
                    let f = 2.0 * k as f64 / n as f64 - 1.0;
                    spec.schedule.iter().map(|&a| a * f).collect()
                })
                .collect();
            let w = (0..=n).map(|k| dicke_weight(n, k).map(|d| d.log_gamma)).collect::<Result<_>>()?;
            (HammingIndex::Scalar { n }, per_class, w)
        }
        ProtocolKind::SeqTwoParam => {
            let (n_re, n_im) = spec.quadrature_counts();
            let index = HammingIndex::Pair { n_re, n_im };
            let frac = |k: usize, n: usize| if n == 0 { 0.0 } else { 2.0 * k as f64 / n as f64 - 1.0 };
            let log_w = |k: usize, n: usize| if n == 0 { Ok(0.0) } else { dicke_weight(n, k).map(|d| d.log_gamma) };
            let mut per_class = Vec::with_capacity(index.dim());
            let mut w = Vec::with_capacity(index.dim());
            for i in 0..index.dim() {
                let (kr, ki) = index.weights(i);
                let (fr, fi) = (frac(kr, n_re), frac(ki, n_im));
                per_class.push(
                    spec.schedule
                        .iter()
                        .enumerate()
                        .map(|(j, &a)| a * if j % 2 == 0 { fr } else { fi })
                        .collect(),
                );
                w.push(log_w(kr, n_re)? + log_w(ki, n_im)?);
            }
            (index, per_class, w)
        }
    };
    let d = index.dim();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let (mu, nu, ln_f) = mean_field_pair(&class_kicks[i], &class_kicks[j], eta, b);
            let ov = coherent_overlap(nu, mu) * ln_f.exp();
            let z = if ov.norm() == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                polar_from_log(0.5 * (log_w[i] + log_w[j]) + ov.norm().ln(), ov.arg())
            };
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
        m[(i, i)].im = 0.0;
    }
    // renormalize the rounding in the diagonal
    let tr = m.trace().re;
    m /= Complex64::new(tr, 0.0);
    AncillaState::new(m, index, spec.clone())
}

fn mean_field_pair(ka: &[Complex64], kb: &[Complex64], eta: f64, b: Complex64) -> (Complex64, Complex64, Complex64) {
    let (mut mu, mut nu) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut ln_f = Complex64::new(0.0, 0.0);
    let c = 1.0 - eta * eta;
    for (x, y) in ka.iter().zip(kb) {
        let d0 = mu - nu;
        ln_f += Complex64::new(-c * d0.norm_sqr() / 2.0, c * (mu * nu.conj()).im + (1.0 - eta) * (d0 * b.conj()).im);
        mu = eta * mu + b + x;
        nu = eta * nu + b + y;
    }
    (mu, nu, ln_f)
}

/// One point of a CRB-versus-time curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub round: usize,
    pub time: f64,
    pub crb: f64,
    pub running_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyCrbCurve {
    pub sequential: Vec<CurvePoint>,
    pub single: Vec<CurvePoint>,
}

fn to_curve(series: &CrbSeries, t_round: f64) -> Vec<CurvePoint> {
    series
        .per_round
        .iter()
        .zip(&series.running_min)
        .enumerate()
        .map(|(i, (&crb, &running_min))| CurvePoint { round: i + 1, time: (i + 1) as f64 * t_round, crb, running_min })
        .collect()
}

/// CRB against interrogation time for the sequential protocol (minimum over
/// prefix rounds, noisy states from [`symmetric_noisy_approx`]) and for the
/// single-measurement protocol measured once after `n` rounds.
///
/// For a two-parameter `spec` the single-measurement baseline is two
/// independent runs, `1/F₁ + 1/F₂`.
pub fn noisy_crb_curve(spec: &ProtocolSpec, noise: &NoiseModel, rounds_max: usize) -> Result<NoisyCrbCurve> {
    let rounds = rounds_max.min(spec.total_rounds());
    let seq_spec = spec.prefix(rounds)?;
    let seq = crb_min_over_rounds(&seq_spec, Some(noise))?;
    let alpha_mag = spec.schedule[0].norm();
    let mut single = Vec::with_capacity(rounds);
    for n in 1..=rounds {
        let crb = match spec.kind {
            ProtocolKind::SeqTwoParam => single_two_param_crb(n, alpha_mag, spec.beta, Some(noise))?,
            _ => {
                let s = ProtocolSpec::single(n, spec.schedule[0], spec.beta)?;
                let map = MeasurementMap::new(HammingIndex::Scalar { n: 1 }, &measurement_unitary())?;
                if noise.gamma_total() > 0.0 {
                    noisy_cfi(&s, noise, &map)?.crb
                } else {
                    protocol_cfi(&s, &map, DerivativeMode::Analytic)?.crb
                }
            }
        };
        single.push(crb);
    }
    let mut best = f64::INFINITY;
    let single_series = CrbSeries {
        running_min: single.iter().map(|&c| {
            best = best.min(c);
            best
        }).collect(),
        per_round: single,
    };
    Ok(NoisyCrbCurve { sequential: to_curve(&seq, noise.t_round), single: to_curve(&single_series, noise.t_round) })
}
