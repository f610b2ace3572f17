use super::spec::{Param, ProtocolSpec};
use crate::error::{Error, Result};
use crate::math::HammingIndex;
use crate::tol::{EPS_NORM, EPS_PSD};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Reduced density matrix of the ancilla register in a Hamming-weight basis.
#[derive(Debug, Clone)]
pub struct AncillaState {
    entries: DMatrix<Complex64>,
    index: HammingIndex,
    spec: ProtocolSpec,
}

impl AncillaState {
    /// Checks Hermiticity and unit trace. Positivity is checked on demand by
    /// [`AncillaState::check_psd`] since it needs an eigensolve.
    pub fn new(entries: DMatrix<Complex64>, index: HammingIndex, spec: ProtocolSpec) -> Result<Self> {
        let d = index.dim();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::Usage(format!(
                "matrix is {}x{}, index expects {d}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let herm = hermiticity_defect(&entries);
        if herm > EPS_NORM {
            return Err(Error::Numerical(format!("state not Hermitian: defect {herm:e}")));
        }
        let tr = entries.trace();
        if (tr - 1.0).norm() > EPS_NORM {
            return Err(Error::Numerical(format!("state trace is {tr}")));
        }
        Ok(AncillaState { entries, index, spec })
    }

    pub fn dim(&self) -> usize {
        self.index.dim()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn index(&self) -> HammingIndex {
        self.index
    }

    pub fn spec(&self) -> &ProtocolSpec {
        &self.spec
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = crate::fisher::HermitianEigen::new(&self.entries)?;
        Ok(eig.values.iter().copied().fold(f64::INFINITY, f64::min))
    }

    pub fn check_psd(&self) -> Result<()> {
        let m = self.min_eigenvalue()?;
        if m < EPS_PSD {
            return Err(Error::Numerical(format!("state has eigenvalue {m:e}")));
        }
        Ok(())
    }
}

/// `∂ρ/∂β_j` in the same basis as its parent state.
#[derive(Debug, Clone)]
pub struct StateDerivative {
    pub entries: DMatrix<Complex64>,
    pub param: Param,
}

impl StateDerivative {
    pub fn zeros(dim: usize, param: Param) -> Self {
        StateDerivative { entries: DMatrix::zeros(dim, dim), param }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }
}

/// `max |m - m†|` entrywise.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
