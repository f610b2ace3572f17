use crate::error::{Error, Result};
use crate::math::HammingIndex;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Single-qubit unitary stored as `u[z][a] = ⟨z|u|a⟩`.
pub type Qubit2 = [[Complex64; 2]; 2];

/// `exp(iπσ_y/4)`, which maps the coupling eigenbasis to the measured basis.
///
/// Source index 0 is `|−⟩` and 1 is `|+⟩`; target index 0 is `|↓⟩`. With this
/// labelling an undisturbed register (all `|−⟩`) is read out as all `|↓⟩`.
pub fn measurement_unitary() -> Qubit2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |x: f64| Complex64::new(x, 0.0);
    [[c(h), c(h)], [c(-h), c(h)]]
}

pub fn unitarity_defect(u: &Qubit2) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..2 {
        for b in 0..2 {
            let s: Complex64 = (0..2).map(|z| u[z][a].conj() * u[z][b]).sum();
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((s - want).norm());
        }
    }
    worst
}

fn check_unitary(u: &Qubit2) -> Result<()> {
    let d = unitarity_defect(u);
    if d > 1e-12 {
        return Err(Error::Domain(format!("single-qubit map is not unitary (defect {d:e})")));
    }
    Ok(())
}

/// Matrix of `u^{⊗N}` between Dicke bases: `V[k][k'] = ⟨D_{k'}|u^{⊗N}|D_k⟩`.
///
/// Built by adding one qubit at a time, which keeps every step a convex-like
/// combination of bounded entries and stays accurate for `N` in the hundreds.
/// The binomial sum in [`transfer_matrix_direct`] cancels catastrophically
/// there.
pub fn transfer_matrix(n: usize, u: &Qubit2) -> Result<DMatrix<Complex64>> {
    check_unitary(u)?;
    let mut v = DMatrix::<Complex64>::from_element(1, 1, Complex64::new(1.0, 0.0));
    for m in 1..=n {
        let mf = m as f64;
        let mut next = DMatrix::<Complex64>::zeros(m + 1, m + 1);
        for k in 0..=m {
            let src0 = ((m - k) as f64 / mf).sqrt();
            let src1 = (k as f64 / mf).sqrt();
            for kp in 0..=m {
                let dst0 = ((m - kp) as f64 / mf).sqrt();
                let dst1 = (kp as f64 / mf).sqrt();
                let mut acc = Complex64::new(0.0, 0.0);
                if k < m {
                    if kp < m {
                        acc += src0 * dst0 * u[0][0] * v[(k, kp)];
                    }
                    if kp > 0 {
                        acc += src0 * dst1 * u[1][0] * v[(k, kp - 1)];
                    }
                }
                if k > 0 {
                    if kp < m {
                        acc += src1 * dst0 * u[0][1] * v[(k - 1, kp)];
                    }
                    if kp > 0 {
                        acc += src1 * dst1 * u[1][1] * v[(k - 1, kp - 1)];
                    }
                }
                next[(k, kp)] = acc;
            }
        }
        v = next;
    }
    Ok(v)
}

fn ln_choose(n: usize, k: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

/// Same matrix from the closed binomial sum
/// `V[k][k'] = √(C(N,k)/C(N,k')) Σ_s C(k,s) C(N-k,k'-s) u₁₁^s u₀₁^{k-s} u₁₀^{k'-s} u₀₀^{N-k-k'+s}`,
/// evaluated term by term in log-magnitude and phase.
///
/// Accurate while the alternating terms do not cancel much; use
/// [`transfer_matrix`] beyond a few tens of qubits.
pub fn transfer_matrix_direct(n: usize, u: &Qubit2) -> Result<DMatrix<Complex64>> {
    check_unitary(u)?;
    let lg = |z: Complex64, p: usize| -> Option<(f64, f64)> {
        if p == 0 {
            Some((0.0, 0.0))
        } else if z.norm() == 0.0 {
            None
        } else {
            Some((p as f64 * z.norm().ln(), p as f64 * z.arg()))
        }
    };
    let mut v = DMatrix::<Complex64>::zeros(n + 1, n + 1);
    for k in 0..=n {
        for kp in 0..=n {
            let prefix = 0.5 * (ln_choose(n, k) - ln_choose(n, kp));
            let lo = (k + kp).saturating_sub(n);
            let hi = k.min(kp);
            let mut terms = Vec::new();
            for s in lo..=hi {
                let parts = [
                    lg(u[1][1], s),
                    lg(u[0][1], k - s),
                    lg(u[1][0], kp - s),
                    lg(u[0][0], n + s - k - kp),
                ];
                if parts.iter().any(|p| p.is_none()) {
                    continue;
                }
                let (mut lm, mut ph) = (prefix + ln_choose(k, s) + ln_choose(n - k, kp - s), 0.0);
                for (m, p) in parts.iter().flatten() {
                    lm += m;
                    ph += p;
                }
                terms.push((lm, ph));
            }
            if terms.is_empty() {
                continue;
            }
            let top = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
            let sum: Complex64 =
                terms.iter().map(|&(lm, ph)| Complex64::from_polar((lm - top).exp(), ph)).sum();
            v[(k, kp)] = sum * top.exp();
        }
    }
    Ok(v)
}

/// Readout map for an ancilla basis: one transfer matrix per quadrature.
#[derive(Debug, Clone)]
pub struct MeasurementMap {
    index: HammingIndex,
    v_re: DMatrix<Complex64>,
    v_im: Option<DMatrix<Complex64>>,
}

impl MeasurementMap {
    pub fn new(index: HammingIndex, u: &Qubit2) -> Result<Self> {
        match index {
            HammingIndex::Scalar { n } => {
                Ok(MeasurementMap { index, v_re: transfer_matrix(n, u)?, v_im: None })
            }
            HammingIndex::Pair { n_re, n_im } => Ok(MeasurementMap {
                index,
                v_re: transfer_matrix(n_re, u)?,
                v_im: Some(transfer_matrix(n_im, u)?),
            }),
        }
    }

    pub fn index(&self) -> HammingIndex {
        self.index
    }

    /// `diag(Wᵀ m W̄)` with `W` the (Kronecker) transfer matrix; real part only.
    pub fn diagonal(&self, m: &DMatrix<Complex64>) -> Vec<f64> {
        match &self.v_im {
            None => {
                let v = &self.v_re;
                let t = m * v.map(|z| z.conj());
                (0..v.ncols())
                    .map(|c| (0..v.nrows()).map(|r| v[(r, c)] * t[(r, c)]).sum::<Complex64>().re)
                    .collect()
            }
            Some(vi) => self.pair_diagonal(m, vi),
        }
    }

    fn pair_diagonal(&self, m: &DMatrix<Complex64>, vi: &DMatrix<Complex64>) -> Vec<f64> {
        let vr = &self.v_re;
        let (nr, ni) = (vr.nrows(), vi.nrows());
        let d = nr * ni;
        // contract the column index of m with conj(Vr ⊗ Vi), one factor at a time
        let mut x = vec![Complex64::new(0.0, 0.0); d * nr * ni];
        for row in 0..d {
            for mr in 0..nr {
                for zi in 0..ni {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for mi in 0..ni {
                        acc += m[(row, mr * ni + mi)] * vi[(mi, zi)].conj();
                    }
                    x[(row * nr + mr) * ni + zi] = acc;
                }
            }
        }
        let mut y = vec![Complex64::new(0.0, 0.0); d * d];
        for row in 0..d {
            for zr in 0..nr {
                for zi in 0..ni {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for mr in 0..nr {
                        acc += x[(row * nr + mr) * ni + zi] * vr[(mr, zr)].conj();
                    }
                    y[row * d + zr * ni + zi] = acc;
                }
            }
        }
        let mut out = vec![0.0; d];
        for (z, o) in out.iter_mut().enumerate() {
            let (zr, zi) = (z / ni, z % ni);
            let mut acc = Complex64::new(0.0, 0.0);
            for row in 0..d {
                let (mr, mi) = (row / ni, row % ni);
                acc += vr[(mr, zr)] * vi[(mi, zi)] * y[row * d + z];
            }
            *o = acc.re;
        }
        out
    }
}
