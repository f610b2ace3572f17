use crate::error::{Error, Result};
use std::f64::consts::LN_2;

/// Log of the binomial weight `γ_k = C(N, k) / 2^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickeWeight {
    pub n: usize,
    pub k: usize,
    pub log_gamma: f64,
}

impl DickeWeight {
    pub fn value(&self) -> f64 {
        self.log_gamma.exp()
    }
}

fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

pub fn dicke_weight(n: usize, k: usize) -> Result<DickeWeight> {
    if n == 0 {
        return Err(Error::Domain("round count must be positive".into()));
    }
    if k > n {
        return Err(Error::Domain(format!("Hamming weight {k} exceeds N = {n}")));
    }
    let log_gamma =
        ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k) - n as f64 * LN_2;
    Ok(DickeWeight { n, k, log_gamma })
}

/// `√(γ_a γ_b)` as `mantissa · e^{log_scale}` with `mantissa ∈ [0.5, 2)`.
pub fn scaled_sqrt_weight_product(wa: DickeWeight, wb: DickeWeight) -> (f64, f64) {
    debug_assert_eq!(wa.n, wb.n);
    let log = 0.5 * (wa.log_gamma + wb.log_gamma);
    // split at a power of two so the mantissa is exact
    let e = (log / LN_2).floor();
    let log_scale = e * LN_2;
    let mut mantissa = (log - log_scale).exp();
    let mut log_scale = log_scale;
    if mantissa >= 2.0 {
        mantissa /= 2.0;
        log_scale += LN_2;
    }
    (mantissa, log_scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert!((dicke_weight(2, 1).unwrap().value() - 0.5).abs() < 1e-15);
        assert!((dicke_weight(1, 0).unwrap().value() - 0.5).abs() < 1e-15);
        assert!(dicke_weight(3, 4).is_err());
        assert!(dicke_weight(0, 0).is_err());
    }

    #[test]
    fn normalized_and_symmetric() {
        for n in [1usize, 7, 100, 500, 1000] {
            let s: f64 = (0..=n).map(|k| dicke_weight(n, k).unwrap().value()).sum();
            assert!((s - 1.0).abs() < 1e-12, "N={n}: {s}");
            for k in 0..=n {
                let a = dicke_weight(n, k).unwrap().log_gamma;
                let b = dicke_weight(n, n - k).unwrap().log_gamma;
                assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn scaled_product() {
        let w = |n, k| dicke_weight(n, k).unwrap();
        let (m, s) = scaled_sqrt_weight_product(w(2, 1), w(2, 1));
        assert!((m * s.exp() - 0.5).abs() < 1e-15);
        let (m, s) = scaled_sqrt_weight_product(w(4, 0), w(4, 4));
        assert!((m * s.exp() - 1.0 / 16.0).abs() < 1e-15);
        for (a, b) in [(0, 500), (250, 251), (3, 17)] {
            let (m, _) = scaled_sqrt_weight_product(w(500, a), w(500, b));
            assert!((0.5..2.0).contains(&m));
        }
    }
}
