//! Reference QFI computations that avoid the eigen-sum of the fast path.

use super::brute::BranchPlan;
use crate::error::{Error, Result};
use crate::math::coherent_overlap;
use crate::protocols::Param;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

fn param_dir(p: Param) -> Complex64 {
    match p {
        Param::Beta1 => Complex64::new(1.0, 0.0),
        Param::Beta2 => Complex64::new(0.0, 1.0),
    }
}

/// QFI of the joint pure state `Σ_a c_a |a⟩|μ_a⟩` with orthonormal `|a⟩`, from
/// coherent-state moments: `4[Σ|c_a|² (|μ'|²(|μ_a|²+1) - Re(μ_a*μ')²) - |Σ|c_a|² Im(μ'μ_a*)|²]`
/// where `μ' = ∂μ_a/∂β` is the same for every branch.
pub fn pure_state_qfi(branches: &[(f64, Complex64)], dmu: Complex64) -> f64 {
    let mut second = 0.0;
    let mut first = 0.0;
    for &(w, mu) in branches {
        let re = (mu.conj() * dmu).re;
        second += w * (dmu.norm_sqr() * (mu.norm_sqr() + 1.0) - re * re);
        first += w * (dmu * mu.conj()).im;
    }
    4.0 * (second - first * first)
}

/// Joint-state QFI of the constant-kick one-parameter protocol over Dicke
/// weights, with binomial weights built by the multiplicative recurrence.
pub fn pure_state_qfi_dicke(n: usize, alpha: Complex64, beta: Complex64, p: Param) -> f64 {
    let nf = n as f64;
    let mut log_w = -nf * std::f64::consts::LN_2;
    let mut branches = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            log_w += ((n - k + 1) as f64 / k as f64).ln();
        }
        let mu = beta * nf + alpha * (2.0 * k as f64 - nf);
        branches.push((log_w.exp(), mu));
    }
    pure_state_qfi(&branches, param_dir(p) * nf)
}

/// Joint-state QFI by enumerating all `2^K` branches of an arbitrary schedule.
pub fn pure_state_qfi_branches(signal_rounds: usize, kicks: &[Complex64], beta: Complex64, p: Param) -> Result<f64> {
    if kicks.len() > 24 {
        return Err(Error::Resource(format!("{} kicks exceed the enumeration limit of 24", kicks.len())));
    }
    let plan = BranchPlan { signal_rounds, kicks: kicks.to_vec(), imaginary: vec![false; kicks.len()] };
    let d = 1u64 << kicks.len();
    let w = 1.0 / d as f64;
    let branches: Vec<(f64, Complex64)> = (0..d).map(|b| (w, plan.amplitude(beta, b))).collect();
    Ok(pure_state_qfi(&branches, param_dir(p) * signal_rounds as f64))
}

/// `∂ρ_ab/∂β` of `ρ_ab = 2^{-K}⟨μ_b|μ_a⟩` with `∂μ = R·dir` for every branch.
pub fn branch_rho_derivative(plan: &BranchPlan, beta: Complex64, p: Param) -> DMatrix<Complex64> {
    let k = plan.kicks.len();
    let d = 1usize << k;
    let delta = param_dir(p) * plan.signal_rounds as f64;
    let mu: Vec<Complex64> = (0..d as u64).map(|b| plan.amplitude(beta, b)).collect();
    DMatrix::from_fn(d, d, |a, b| {
        let (ma, mb) = (mu[a], mu[b]);
        let dexp = -(ma.conj() * delta).re - (mb.conj() * delta).re + mb.conj() * delta + delta.conj() * ma;
        coherent_overlap(mb, ma) * dexp / d as f64
    })
}

/// Restricts a `2^K` matrix to the Dicke states of the `±` labels.
pub fn restrict_to_dicke(m: &DMatrix<Complex64>, k: usize) -> DMatrix<Complex64> {
    let d = 1usize << k;
    let mut size = vec![0usize; k + 1];
    for a in 0..d {
        size[a.count_ones() as usize] += 1;
    }
    let mut out = DMatrix::<Complex64>::zeros(k + 1, k + 1);
    for a in 0..d {
        for b in 0..d {
            out[(a.count_ones() as usize, b.count_ones() as usize)] += m[(a, b)];
        }
    }
    DMatrix::from_fn(k + 1, k + 1, |i, j| out[(i, j)] / ((size[i] * size[j]) as f64).sqrt())
}

/// QFI `Tr(∂ρ L)` with the SLD `L` from the linear system `∂ρ = ½(Lρ + ρL)`,
/// solved densely in vectorized form by least squares.
pub fn sld_qfi(rho: &DMatrix<Complex64>, drho: &DMatrix<Complex64>) -> Result<f64> {
    let d = rho.nrows();
    let n = d * d;
    // vec(Lρ) = (ρᵀ ⊗ I) vec(L), vec(ρL) = (I ⊗ ρ) vec(L), column-major
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..d {
        for i in 0..d {
            let row = j * d + i;
            for m in 0..d {
                // (Lρ)_ij = Σ_m L_im ρ_mj
                a[(row, m * d + i)] += 0.5 * rho[(m, j)];
                // (ρL)_ij = Σ_m ρ_im L_mj
                a[(row, j * d + m)] += 0.5 * rho[(i, m)];
            }
        }
    }
    let rhs = DVector::from_iterator(n, drho.iter().copied());
    let svd = a.svd(true, true);
    let tol = 1e-12 * svd.singular_values.max();
    let x = svd
        .solve(&rhs, tol)
        .map_err(|e| Error::Numerical(format!("SLD solve failed: {e}")))?;
    let l = DMatrix::from_column_slice(d, d, x.as_slice());
    let f = (drho * l).trace();
    Ok(f.re)
}

fn hermitian_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(m.clone());
    let d = eig.eigenvalues.map(|v| Complex64::new(v.max(0.0).sqrt(), 0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

/// Root fidelity `Tr √(√ρ σ √ρ)`.
pub fn root_fidelity(rho: &DMatrix<Complex64>, sigma: &DMatrix<Complex64>) -> f64 {
    let s = hermitian_sqrt(rho);
    let m = &s * sigma * &s;
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(m).eigenvalues.iter().map(|v| v.max(0.0).sqrt()).sum()
}

/// QFI from the curvature of the root fidelity, `F = -4 ∂²_h √F(ρ(β), ρ(β+h))`,
/// using the 9-point central stencil (eight displaced states).
pub fn fidelity_qfi<F>(state_at: F, beta: Complex64, p: Param, h: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Result<DMatrix<Complex64>>,
{
    const C: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let rho0 = state_at(beta)?;
    let dir = param_dir(p);
    let mut second = C[0] * root_fidelity(&rho0, &rho0);
    for (j, &c) in C.iter().enumerate().skip(1) {
        let s = j as f64 * h;
        let up = root_fidelity(&rho0, &state_at(beta + dir * s)?);
        let dn = root_fidelity(&rho0, &state_at(beta - dir * s)?);
        second += c * (up + dn);
    }
    Ok(-4.0 * second / (h * h))
}
