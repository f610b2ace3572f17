use super::spec::{Param, ProtocolKind, ProtocolSpec};
use super::state::{AncillaState, StateDerivative};
use crate::error::{Error, Result};
use crate::math::{dicke_weight, polar_from_log, scaled_sqrt_weight_product, DickeWeight, HammingIndex};
use crate::tol::{DEFAULT_MAX_PAIR_DIM, DEFAULT_MAX_ROUNDS};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Size limits applied by the builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_rounds: usize,
    pub max_pair_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_rounds: DEFAULT_MAX_ROUNDS, max_pair_dim: DEFAULT_MAX_PAIR_DIM }
    }
}

impl Limits {
    fn check(&self, spec: &ProtocolSpec) -> Result<()> {
        if spec.n > self.max_rounds {
            return Err(Error::Resource(format!(
                "N = {} exceeds max_rounds = {}",
                spec.n, self.max_rounds
            )));
        }
        if spec.kind == ProtocolKind::SeqTwoParam {
            let (r, i) = spec.quadrature_counts();
            let d = (r + 1) * (i + 1);
            if d > self.max_pair_dim {
                return Err(Error::Resource(format!(
                    "two-parameter dimension {d} (N = {}) exceeds max_pair_dim = {}",
                    spec.n, self.max_pair_dim
                )));
            }
        }
        Ok(())
    }
}

fn expect_kind(spec: &ProtocolSpec, kind: ProtocolKind) -> Result<()> {
    spec.validate()?;
    if spec.kind != kind {
        return Err(Error::Usage(format!("expected a {kind:?} protocol, got {:?}", spec.kind)));
    }
    Ok(())
}

fn weights(n: usize) -> Vec<DickeWeight> {
    (0..=n).map(|k| dicke_weight(n, k).expect("k in range")).collect()
}

/// Phase of entry `(i, j)` and its gradient in `(β₁, β₂)`.
///
/// Sign conventions, checked against the branch-enumeration oracle:
/// - single measurement, basis index 0 is `a = -1` and 1 is `a = +1`:
///   `ψ = (a - a') N Im(αβ*)`;
/// - one parameter, `k` counts `+` outcomes: `ψ = 2N(k - k') Im(αβ*)`;
/// - two parameters with `α₀ = |α|` real and `b = β`:
///   `Φ = 2n|α|[b₁(k_i - k_i') - b₂(k_r - k_r')]
///      + |α|²[4(k_r' k_i - k_i' k_r) + 2n_r(k_i' - k_i) + 2n_i(k_r - k_r')]`
///   where `n = n_r + n_i` is the number of signal rounds. A general `α₀ = |α|e^{iφ}`
///   is handled by rotating `b = β e^{-iφ}`.
struct PhaseModel {
    kind: ProtocolKind,
    index: HammingIndex,
    alpha: Complex64,
    beta: Complex64,
    n_signal: f64,
}

impl PhaseModel {
    fn new(spec: &ProtocolSpec, index: HammingIndex) -> Self {
        PhaseModel {
            kind: spec.kind,
            index,
            alpha: spec.schedule[0],
            beta: spec.beta,
            n_signal: spec.total_rounds() as f64,
        }
    }

    fn phase(&self, i: usize, j: usize) -> (f64, [f64; 2]) {
        let (a, b) = (self.alpha, self.beta);
        let im_ab = (a * b.conj()).im;
        let grad_im_ab = [a.im, -a.re];
        match self.kind {
            ProtocolKind::SingleMeasurement | ProtocolKind::SeqOneParam => {
                let dk = i as f64 - j as f64;
                // a - a' = 2(i - j) for the ±1 labels; 2(k - k') for Dicke weights
                let c = 2.0 * dk * self.n_signal;
                (c * im_ab, [c * grad_im_ab[0], c * grad_im_ab[1]])
            }
            ProtocolKind::SeqTwoParam => {
                let HammingIndex::Pair { n_re, n_im } = self.index else { unreachable!() };
                let (kr, ki) = self.index.weights(i);
                let (kr2, ki2) = self.index.weights(j);
                let (kr, ki, kr2, ki2) = (kr as f64, ki as f64, kr2 as f64, ki2 as f64);
                let mag = a.norm();
                let rot = if mag > 0.0 { a / mag } else { Complex64::new(1.0, 0.0) };
                let bb = b * rot.conj();
                let c1 = 2.0 * self.n_signal * mag * (ki - ki2);
                let c2 = -2.0 * self.n_signal * mag * (kr - kr2);
                let quad = mag * mag
                    * (4.0 * (kr2 * ki - ki2 * kr)
                        + 2.0 * n_re as f64 * (ki2 - ki)
                        + 2.0 * n_im as f64 * (kr - kr2));
                let phi = c1 * bb.re + c2 * bb.im + quad;
                // b₁ = β₁cosφ + β₂sinφ, b₂ = -β₁sinφ + β₂cosφ
                let (cs, sn) = (rot.re, rot.im);
                (phi, [c1 * cs - c2 * sn, c1 * sn + c2 * cs])
            }
        }
    }
}

fn assemble(
    spec: &ProtocolSpec,
    index: HammingIndex,
    log_mag: impl Fn(usize, usize) -> f64,
) -> Result<AncillaState> {
    let model = PhaseModel::new(spec, index);
    let d = index.dim();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let z = polar_from_log(log_mag(i, j), model.phase(i, j).0);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
        m[(i, i)].im = 0.0;
    }
    AncillaState::new(m, index, spec.clone())
}

/// Single-measurement ancilla state: a 2×2 matrix over `a ∈ {-1, +1}`.
pub fn build_single_rho(spec: &ProtocolSpec) -> Result<AncillaState> {
    expect_kind(spec, ProtocolKind::SingleMeasurement)?;
    Limits::default().check(spec)?;
    let a2 = spec.schedule[0].norm_sqr();
    let index = HammingIndex::Scalar { n: 1 };
    assemble(spec, index, |i, j| {
        let da = 2.0 * (i as f64 - j as f64);
        0.5f64.ln() - da * da * a2 / 2.0
    })
}

/// Sequential one-parameter state over Hamming weights `k = 0..=N`.
pub fn build_seq_rho(spec: &ProtocolSpec) -> Result<AncillaState> {
    build_seq_rho_with(spec, Limits::default())
}

pub fn build_seq_rho_with(spec: &ProtocolSpec, limits: Limits) -> Result<AncillaState> {
    expect_kind(spec, ProtocolKind::SeqOneParam)?;
    if !spec.is_constant() {
        return Err(Error::Usage("Dicke compression needs a constant schedule".into()));
    }
    limits.check(spec)?;
    let n = spec.n;
    let w = weights(n);
    let a2 = spec.schedule[0].norm_sqr();
    assemble(spec, HammingIndex::Scalar { n }, |i, j| {
        let (mant, scale) = scaled_sqrt_weight_product(w[i], w[j]);
        let dk = i as f64 - j as f64;
        mant.ln() + scale - 2.0 * dk * dk * a2
    })
}

/// Sequential two-parameter state over `(k_r, k_i)`, row-major with `k_r` outer.
pub fn build_two_param_rho(spec: &ProtocolSpec) -> Result<AncillaState> {
    build_two_param_rho_with(spec, Limits::default())
}

pub fn build_two_param_rho_with(spec: &ProtocolSpec, limits: Limits) -> Result<AncillaState> {
    expect_kind(spec, ProtocolKind::SeqTwoParam)?;
    limits.check(spec)?;
    let (n_re, n_im) = spec.quadrature_counts();
    let index = HammingIndex::Pair { n_re, n_im };
    let wr = weights(n_re);
    let wi = if n_im > 0 { weights(n_im) } else { Vec::new() };
    let zero_weight = DickeWeight { n: 0, k: 0, log_gamma: 0.0 };
    let wi_at = |k: usize| if n_im > 0 { wi[k] } else { zero_weight };
    let a2 = spec.schedule[0].norm_sqr();
    assemble(spec, index, |i, j| {
        let (kr, ki) = index.weights(i);
        let (kr2, ki2) = index.weights(j);
        let (m1, s1) = scaled_sqrt_weight_product(wr[kr], wr[kr2]);
        let (m2, s2) = scaled_sqrt_weight_product(wi_at(ki), wi_at(ki2));
        let dr = kr as f64 - kr2 as f64;
        let di = ki as f64 - ki2 as f64;
        (m1 * m2).ln() + s1 + s2 - 2.0 * a2 * (dr * dr + di * di)
    })
}

/// Builds the noiseless state for any protocol kind.
pub fn build_state(spec: &ProtocolSpec) -> Result<AncillaState> {
    match spec.kind {
        ProtocolKind::SingleMeasurement => build_single_rho(spec),
        ProtocolKind::SeqOneParam => build_seq_rho(spec),
        ProtocolKind::SeqTwoParam => build_two_param_rho(spec),
    }
}

/// Analytic `∂ρ/∂β_j`: every entry times `i ∂ψ/∂β_j`.
///
/// A quadrature the protocol is insensitive to yields the zero matrix.
pub fn d_rho(state: &AncillaState, param: Param) -> Result<StateDerivative> {
    let spec = state.spec();
    let model = PhaseModel::new(spec, state.index());
    let d = state.dim();
    let rho = state.entries();
    let mut out = StateDerivative::zeros(d, param);
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let g = model.phase(i, j).1[param.index()];
            out.entries[(i, j)] = rho[(i, j)] * Complex64::new(0.0, g);
        }
    }
    Ok(out)
}

/// Closed-form QFI of the joint qubit-oscillator pure state.
///
/// - single measurement: `4N²(1 + |α|²)`;
/// - one parameter, any schedule: `4N²(1 + Σ|α_n|²)`, which is `4N³|α|² + 4N²`
///   for a constant kick;
/// - two parameters: the `β₁` entry, `4n²(1 + Σ_odd |α_n|²)` with `n` the
///   total number of rounds; only the `iα` kicks contribute to it.
pub fn joint_qfi_closed_form(kind: ProtocolKind, n: usize, schedule: &[Complex64]) -> f64 {
    let n = n as f64;
    match kind {
        ProtocolKind::SingleMeasurement => 4.0 * n * n * (1.0 + schedule[0].norm_sqr()),
        ProtocolKind::SeqOneParam => {
            4.0 * n * n * (1.0 + schedule.iter().map(|a| a.norm_sqr()).sum::<f64>())
        }
        ProtocolKind::SeqTwoParam => {
            let rounds = schedule.len() as f64;
            let s: f64 = schedule.iter().skip(1).step_by(2).map(|a| a.norm_sqr()).sum();
            4.0 * rounds * rounds * (1.0 + s)
        }
    }
}
