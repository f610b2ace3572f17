use crate::error::{Error, Result};

/// Local exponent `p = d ln F / d ln N` at each interior sample.
pub fn scaling_exponent(samples: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if samples.len() < 3 {
        return Err(Error::Usage(format!("need at least 3 samples, got {}", samples.len())));
    }
    for w in samples.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::Domain("N must be strictly increasing".into()));
        }
    }
    if let Some(&(n, f)) = samples.iter().find(|s| s.0 <= 0.0 || s.1 <= 0.0) {
        return Err(Error::Domain(format!("non-positive sample ({n}, {f})")));
    }
    Ok(samples
        .windows(3)
        .map(|w| {
            let p = (w[2].1.ln() - w[0].1.ln()) / (w[2].0.ln() - w[0].0.ln());
            (w[1].0, p)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law() {
        let s: Vec<_> = [10.0, 20.0, 40.0, 80.0].iter().map(|&n: &f64| (n, 2.5 * n.powi(3))).collect();
        for (_, p) in scaling_exponent(&s).unwrap() {
            assert!((p - 3.0).abs() < 1e-9);
        }
        assert!(matches!(scaling_exponent(&s[..2]), Err(Error::Usage(_))));
        assert!(scaling_exponent(&[(1.0, 1.0), (1.0, 2.0), (3.0, 3.0)]).is_err());
    }
}
