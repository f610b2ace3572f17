use crate::error::{Error, Result};

/// Ordering of an ancilla matrix basis by Hamming weights.
///
/// `Pair` is row-major with the real-quadrature weight outer:
/// `index = k_r * (n_im + 1) + k_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HammingIndex {
    Scalar { n: usize },
    Pair { n_re: usize, n_im: usize },
}

impl HammingIndex {
    pub fn dim(&self) -> usize {
        match *self {
            HammingIndex::Scalar { n } => n + 1,
            HammingIndex::Pair { n_re, n_im } => (n_re + 1) * (n_im + 1),
        }
    }

    pub fn linear(&self, k_r: usize, k_i: usize) -> Result<usize> {
        match *self {
            HammingIndex::Scalar { n } if k_r <= n && k_i == 0 => Ok(k_r),
            HammingIndex::Pair { n_re, n_im } if k_r <= n_re && k_i <= n_im => {
                Ok(k_r * (n_im + 1) + k_i)
            }
            _ => Err(Error::Domain(format!("weights ({k_r}, {k_i}) outside {self:?}"))),
        }
    }

    /// Inverse of [`HammingIndex::linear`]; the scalar case returns `(k, 0)`.
    pub fn weights(&self, idx: usize) -> (usize, usize) {
        match *self {
            HammingIndex::Scalar { .. } => (idx, 0),
            HammingIndex::Pair { n_im, .. } => (idx / (n_im + 1), idx % (n_im + 1)),
        }
    }
}
