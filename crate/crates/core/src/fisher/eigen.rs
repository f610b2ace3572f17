use crate::error::{Error, Result};
use crate::tol::EPS_FLUSH;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Eigen-decomposition `m = V diag(values) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

const REAL_FRAME_TOL: f64 = 1e-14;

impl HermitianEigen {
    pub fn new(m: &DMatrix<Complex64>) -> Result<Self> {
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let floor = EPS_FLUSH * scale;
        let m = m.map(|z| if z.norm() < floor { Complex64::new(0.0, 0.0) } else { z });
        let out = if let Some(theta) = diagonal_phase_frame(&m) {
            Self::real_frame(&m, &theta)?
        } else {
            let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0)
                .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
            HermitianEigen { values: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors }
        };
        if out.values.iter().any(|v| !v.is_finite()) || out.vectors.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("eigensolver returned non-finite values".into()));
        }
        Ok(out)
    }

    /// `V† d V`.
    pub fn to_eigenbasis(&self, d: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        self.vectors.adjoint() * d * &self.vectors
    }

    fn real_frame(m: &DMatrix<Complex64>, theta: &[f64]) -> Result<Self> {
        let n = m.nrows();
        let s = DMatrix::<f64>::from_fn(n, n, |i, j| {
            (m[(i, j)] * Complex64::from_polar(1.0, theta[j] - theta[i])).re
        });
        let eig = SymmetricEigen::try_new(s, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numerical("real symmetric eigensolver did not converge".into()))?;
        let vectors = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            Complex64::from_polar(eig.eigenvectors[(i, j)], theta[i])
        });
        Ok(HermitianEigen { values: eig.eigenvalues.iter().copied().collect(), vectors })
    }
}

/// Finds `θ` with `m_ij = e^{i(θ_i - θ_j)} s_ij`, `s` real symmetric, if one exists.
///
/// The one-parameter states have this form, and a real eigensolve is several
/// times faster than a complex one at the dimensions used for large `N`.
fn diagonal_phase_frame(m: &DMatrix<Complex64>) -> Option<Vec<f64>> {
    let n = m.nrows();
    if n < 2 {
        return None;
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    let mut theta = vec![0.0; n];
    for i in 1..n {
        let z = m[(i, i - 1)];
        if z.norm() <= 1e-8 * scale {
            return None;
        }
        theta[i] = theta[i - 1] + z.arg();
    }
    for i in 0..n {
        for j in 0..n {
            let r = m[(i, j)] * Complex64::from_polar(1.0, theta[j] - theta[i]);
            if r.im.abs() > REAL_FRAME_TOL * scale {
                return None;
            }
        }
    }
    Some(theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &DMatrix<Complex64>) {
        let e = HermitianEigen::new(m).unwrap();
        let d = DMatrix::<Complex64>::from_diagonal(&nalgebra::DVector::from_iterator(
            e.values.len(),
            e.values.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        let back = &e.vectors * d * e.vectors.adjoint();
        assert!((back - m).norm() < 1e-12);
    }

    #[test]
    fn separable_and_general() {
        let n = 5;
        let th: Vec<f64> = (0..n).map(|i| 0.3 * i as f64 * i as f64).collect();
        let sep = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            let s = 1.0 / (1.0 + (i + j) as f64);
            Complex64::from_polar(s, th[i] - th[j])
        });
        assert!(diagonal_phase_frame(&sep).is_some());
        check(&sep);
        let gen = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            let s = 1.0 / (1.0 + (i + j) as f64);
            Complex64::from_polar(s, 0.1 * (i * i * j) as f64 - 0.1 * (j * j * i) as f64)
        });
        assert!(diagonal_phase_frame(&gen).is_none());
        check(&gen);
    }

    #[test]
    fn tiny_entries_do_not_poison_the_solve() {
        let n = 40;
        let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            let d = (i as f64 - j as f64).abs();
            Complex64::from_polar((-(d * d) * 20.0).exp() * 1e-3, 0.01 * (i as f64 - j as f64))
        });
        let e = HermitianEigen::new(&m).unwrap();
        assert!(e.values.iter().all(|v| v.is_finite()));
    }
}
