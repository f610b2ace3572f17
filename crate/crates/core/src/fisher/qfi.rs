use super::eigen::HermitianEigen;
use super::report::{FisherReport, UsedMatrix};
use crate::error::{Error, Result};
use crate::protocols::{AncillaState, StateDerivative};
use crate::tol::{EPS_EIG, EPS_PSD};
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

fn decompose(state: &AncillaState) -> Result<HermitianEigen> {
    let eig = HermitianEigen::new(state.entries())?;
    let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < EPS_PSD {
        return Err(Error::Numerical(format!("state has eigenvalue {min:e}")));
    }
    Ok(eig)
}

/// `Σ_{p_j+p_k > cutoff} 2 A_jk conj(B_jk) / (p_j + p_k)` in the eigenbasis.
fn pair_sum(p: &[f64], a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, cutoff: f64) -> Complex64 {
    let n = p.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            let s = p[j] + p[k];
            if s > cutoff {
                acc += 2.0 * a[(j, k)] * b[(j, k)].conj() / s;
            }
        }
    }
    acc
}

/// Quantum Fisher information `Σ 2|⟨j|∂ρ|k⟩|² / (p_j + p_k)`.
pub fn qfi_scalar(state: &AncillaState, d: &StateDerivative) -> Result<f64> {
    qfi_scalar_with_cutoff(state, d, EPS_EIG)
}

pub fn qfi_scalar_with_cutoff(state: &AncillaState, d: &StateDerivative, cutoff: f64) -> Result<f64> {
    if d.is_zero() {
        return Ok(0.0);
    }
    let eig = decompose(state)?;
    let a = eig.to_eigenbasis(&d.entries);
    Ok(pair_sum(&eig.values, &a, &a, cutoff).re)
}

/// Two-parameter QFI matrix and the SLD commutation residual.
///
/// `sld_residual` is `max_{a,b} |Im ½Tr(ρ{L_a, L_b})|`, from the same eigenbasis.
pub fn qfi_matrix(state: &AncillaState, d1: &StateDerivative, d2: &StateDerivative) -> Result<FisherReport> {
    let eig = decompose(state)?;
    let a = [eig.to_eigenbasis(&d1.entries), eig.to_eigenbasis(&d2.entries)];
    let mut f = Matrix2::<f64>::zeros();
    let mut residual = 0.0f64;
    for i in 0..2 {
        for j in i..2 {
            let s = pair_sum(&eig.values, &a[i], &a[j], EPS_EIG);
            f[(i, j)] = s.re;
            f[(j, i)] = s.re;
            residual = residual.max(s.im.abs());
        }
    }
    let mut report = FisherReport::from_qfi(f, 2);
    report.sld_residual = residual;
    report.used_matrix = UsedMatrix::Qfi;
    Ok(report)
}
