use nalgebra::Matrix2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UsedMatrix {
    Qfi,
    Cfi,
}

/// Fisher matrices and the resulting Cramér-Rao bound.
///
/// `params` is 1 for one-parameter results, in which case only the `(0, 0)`
/// entries are meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherReport {
    pub params: usize,
    pub qfi: Matrix2<f64>,
    pub cfi: Matrix2<f64>,
    pub sld_residual: f64,
    pub crb: f64,
    /// Set when the matrix behind `crb` is not invertible; `crb` is then `+∞`.
    pub singular: bool,
    pub used_matrix: UsedMatrix,
    /// Per-round CRB, filled by round-resolved computations.
    pub history: Vec<f64>,
}

impl FisherReport {
    pub(crate) fn from_qfi(qfi: Matrix2<f64>, params: usize) -> Self {
        let (crb, singular) = crb_of(&qfi, params);
        FisherReport {
            params,
            qfi,
            cfi: Matrix2::zeros(),
            sld_residual: 0.0,
            crb,
            singular,
            used_matrix: UsedMatrix::Qfi,
            history: Vec::new(),
        }
    }

    pub(crate) fn from_cfi(cfi: Matrix2<f64>, params: usize) -> Self {
        let (crb, singular) = crb_of(&cfi, params);
        FisherReport {
            params,
            qfi: Matrix2::zeros(),
            cfi,
            sld_residual: 0.0,
            crb,
            singular,
            used_matrix: UsedMatrix::Cfi,
            history: Vec::new(),
        }
    }
}

const SINGULAR_RCOND: f64 = 1e-12;

/// `Tr F⁻¹`, or `+∞` with the singular flag.
pub fn crb_of(f: &Matrix2<f64>, params: usize) -> (f64, bool) {
    if params == 1 {
        let x = f[(0, 0)];
        return if x > 0.0 { (1.0 / x, false) } else { (f64::INFINITY, true) };
    }
    let det = f[(0, 0)] * f[(1, 1)] - f[(0, 1)] * f[(1, 0)];
    let scale = f[(0, 0)].abs().max(f[(1, 1)].abs());
    if scale == 0.0 || det <= SINGULAR_RCOND * scale * scale {
        return (f64::INFINITY, true);
    }
    ((f[(0, 0)] + f[(1, 1)]) / det, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crb_values() {
        let f = Matrix2::new(4.0, 0.0, 0.0, 2.0);
        assert_eq!(crb_of(&f, 2), (0.75, false));
        let g = Matrix2::new(4.0, 0.0, 0.0, 0.0);
        assert!(crb_of(&g, 2).1);
        assert_eq!(crb_of(&g, 1), (0.25, false));
    }
}
