use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::SQRT_2;

/// Markovian noise on the oscillator plus the signal coupling.
///
/// Rates are in 1/s, `t_round` in s. The fast paths fold dephasing into the
/// amplitude decay rate `Γ = γ + γ_d`; `n_th` is only used by the Fock oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub gamma: f64,
    pub gamma_d: f64,
    pub n_th: f64,
    pub t_round: f64,
    pub g: f64,
}

impl NoiseModel {
    pub fn new(gamma: f64, gamma_d: f64, n_th: f64, t_round: f64, g: f64) -> Result<Self> {
        let m = NoiseModel { gamma, gamma_d, n_th, t_round, g };
        m.validate()?;
        Ok(m)
    }

    pub fn noiseless(t_round: f64, g: f64) -> Self {
        NoiseModel { gamma: 0.0, gamma_d: 0.0, n_th: 0.0, t_round, g }
    }

    /// Pure amplitude decay with `Γt/2 = tau_eff` and coupling `g` chosen so
    /// that one round accrues `|β|` in the noiseless limit.
    pub fn from_tau_eff(tau_eff: f64, t_round: f64, beta_mag: f64) -> Result<Self> {
        if !(t_round > 0.0) {
            return Err(Error::Domain("t_round must be positive".into()));
        }
        Self::new(2.0 * tau_eff / t_round, 0.0, 0.0, t_round, SQRT_2 * beta_mag / t_round)
    }

    /// `τ_eff = 0.15`, `t = 15.92 μs`, `|β| = 0.5`.
    pub fn reference() -> Self {
        Self::from_tau_eff(0.15, 15.92e-6, 0.5).expect("valid constants")
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma", self.gamma),
            ("gamma_d", self.gamma_d),
            ("n_th", self.n_th),
            ("t_round", self.t_round),
            ("g", self.g),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn gamma_total(&self) -> f64 {
        self.gamma + self.gamma_d
    }

    pub fn tau_eff(&self) -> f64 {
        self.gamma_total() * self.t_round / 2.0
    }

    /// Amplitude retained over one round, `e^{-Γt/2}`.
    pub fn eta(&self) -> f64 {
        (-self.tau_eff()).exp()
    }

    /// Displacement accrued in one round from vacuum for a noiseless step `β`:
    /// `β (1 - e^{-τ}) / τ`.
    pub fn round_displacement(&self, beta: Complex64) -> Complex64 {
        beta * exp_rel(self.tau_eff())
    }

    /// Whether `t_round = √2|β|/g` holds to relative `tol`.
    pub fn consistent_with(&self, beta: Complex64, tol: f64) -> bool {
        if self.g == 0.0 {
            return beta.norm() == 0.0;
        }
        let t = SQRT_2 * beta.norm() / self.g;
        (t - self.t_round).abs() <= tol * self.t_round.max(t)
    }
}

/// `(1 - e^{-x}) / x`, continuous at 0.
fn exp_rel(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x / 2.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// Mean amplitude of a resonantly driven, decaying oscillator after time `t`:
/// `√2 g / Γ (1 - e^{-Γt/2})`, or `g t / √2` when `Γ = 0`.
pub fn displaced_amplitude(g: f64, gamma: f64, t: f64) -> f64 {
    g * t / SQRT_2 * exp_rel(gamma * t / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_limits() {
        let (g, t) = (3.0e4, 2.0e-5);
        assert!((displaced_amplitude(g, 0.0, t) - g * t / SQRT_2).abs() < 1e-15);
        let gamma = 1.0e4;
        let want = SQRT_2 * g / gamma * (1.0 - (-gamma * t / 2.0).exp());
        assert!((displaced_amplitude(g, gamma, t) - want).abs() < 1e-12 * want);
        assert!((displaced_amplitude(g, gamma, 1.0) - SQRT_2 * g / gamma).abs() < 1e-9);
    }

    #[test]
    fn reference_rates() {
        let m = NoiseModel::reference();
        assert!((m.tau_eff() - 0.15).abs() < 1e-12);
        assert!((m.gamma_total() - 1.89e4).abs() < 0.01 * 1.89e4);
        let caption = NoiseModel::new(1.89e4, 0.0, 0.0, 15.92e-6, 0.0).unwrap();
        assert!((caption.tau_eff() - 0.1504).abs() < 1e-4);
        assert!(m.consistent_with(Complex64::new(0.3536, 0.3536), 1e-3));
        assert!(NoiseModel::new(-1.0, 0.0, 0.0, 1.0, 1.0).is_err());
    }
}
