//! Numerical primitives shared by the fast paths and the oracles.

mod dicke;
mod index;

pub use dicke::{dicke_weight, scaled_sqrt_weight_product, DickeWeight};
pub use index::HammingIndex;

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Complex amplitude of a coherent state, a signal displacement or a kick.
pub type ComplexAmplitude = Complex64;

/// `⟨bra|ket⟩` for coherent states.
pub fn coherent_overlap(bra: ComplexAmplitude, ket: ComplexAmplitude) -> ComplexAmplitude {
    (-(bra.norm_sqr() + ket.norm_sqr()) / 2.0 + bra.conj() * ket).exp()
}

/// Rejects NaN or infinite components.
pub fn ensure_finite(z: ComplexAmplitude, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} is not finite: {z}")))
    }
}

/// `exp(log_mag) * e^{i phase}`, flushing tiny magnitudes to zero.
pub(crate) fn polar_from_log(log_mag: f64, phase: f64) -> Complex64 {
    if log_mag < crate::tol::UNDERFLOW.ln() {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::from_polar(log_mag.exp(), phase)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_basics() {
        let one = coherent_overlap(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        assert!((one - 1.0).norm() < 1e-15);
        let g = Complex64::new(0.3, 0.7);
        assert!((coherent_overlap(g, g) - 1.0).norm() < 1e-15);
        let v = coherent_overlap(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        assert!((v.norm() - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn overlap_magnitude_and_symmetry() {
        let pts = [
            Complex64::new(0.1, -0.4),
            Complex64::new(-1.3, 0.2),
            Complex64::new(2.0, 2.5),
            Complex64::new(0.0, -0.9),
        ];
        for &a in &pts {
            for &b in &pts {
                let o = coherent_overlap(a, b);
                assert!((o.norm() - (-(a - b).norm_sqr() / 2.0).exp()).abs() < 1e-12);
                assert!((o - coherent_overlap(b, a).conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn finite_check() {
        assert!(ensure_finite(Complex64::new(f64::NAN, 0.0), "x").is_err());
        assert!(ensure_finite(Complex64::new(1.0, 2.0), "x").is_ok());
    }
}
