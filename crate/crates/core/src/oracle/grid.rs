//! `N = 1`, `β = 0` two-parameter state at `|α| = √(nπ)`.

use super::fock::{displacement_commutator_coefficient, displacement_matrix};
use crate::error::Result;
use crate::protocols::{build_two_param_rho, AncillaState, ProtocolSpec};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Reference 4×4 matrix for `N = 1`, `β = 0` with off-diagonal phases in
/// units of `|α|²`, basis order
/// `(k_r, k_i) = (0,0), (0,1), (1,0), (1,1)`.
pub fn reference_case_matrix(alpha_mag: f64) -> DMatrix<Complex64> {
    let a = alpha_mag * alpha_mag;
    let e = |re: f64, im: f64| Complex64::new(re * a, im * a).exp() / 4.0;
    let one = Complex64::new(0.25, 0.0);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            one, e(-2.0, 1.0), e(-2.0, -1.0), e(-4.0, 0.0),
            e(-2.0, -1.0), one, e(-4.0, 2.0), e(-2.0, 3.0),
            e(-2.0, 1.0), e(-4.0, -2.0), one, e(-2.0, -3.0),
            e(-4.0, 0.0), e(-2.0, -3.0), e(-2.0, 3.0), one,
        ],
    )
}

/// Real pattern `¼[[1, ±x, ±x, x²], [±x, 1, x², ±x], [±x, x², 1, ±x], [x², ±x, ±x, 1]]`
/// with `x = e^{-2nπ}`, `+` for even `n` and `-` for odd `n`.
pub fn grid_pattern(n: u32) -> DMatrix<Complex64> {
    let x = (-2.0 * n as f64 * PI).exp();
    let s = if n % 2 == 0 { x } else { -x };
    let c = |v: f64| Complex64::new(v / 4.0, 0.0);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            c(1.0), c(s), c(s), c(x * x),
            c(s), c(1.0), c(x * x), c(s),
            c(s), c(x * x), c(1.0), c(s),
            c(x * x), c(s), c(s), c(1.0),
        ],
    )
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct GridFixture {
    pub n: u32,
    pub alpha_mag: f64,
    pub state: AncillaState,
    /// `max |built - reference|` entrywise.
    pub deviation_from_reference: f64,
    /// `max |built - pattern|` entrywise.
    pub deviation_from_pattern: f64,
    /// `2 sin(|α|²)`.
    pub commutator_coefficient: f64,
    /// Max-norm of `[D(|α|), D(i|α|)]` on the lowest Fock levels.
    pub commutator_norm: f64,
}

/// Builds the fixture for `|α| = √(nπ)`.
pub fn grid_state_fixture(n: u32) -> Result<GridFixture> {
    grid_fixture_at(n, (n as f64 * PI).sqrt())
}

/// Same comparisons at an arbitrary `|α|`; the pattern uses `n`.
pub fn grid_fixture_at(n: u32, alpha_mag: f64) -> Result<GridFixture> {
    let spec = ProtocolSpec::seq_two(1, Complex64::new(alpha_mag, 0.0), Complex64::new(0.0, 0.0))?;
    let state = build_two_param_rho(&spec)?;
    let deviation_from_reference = max_abs_diff(state.entries(), &reference_case_matrix(alpha_mag));
    let deviation_from_pattern = max_abs_diff(state.entries(), &grid_pattern(n));
    Ok(GridFixture {
        n,
        alpha_mag,
        deviation_from_reference,
        deviation_from_pattern,
        commutator_coefficient: displacement_commutator_coefficient(alpha_mag),
        commutator_norm: truncated_commutator_norm(alpha_mag),
        state,
    })
}

fn truncated_commutator_norm(alpha_mag: f64) -> f64 {
    let dim = 120;
    let keep = 20;
    let x = displacement_matrix(dim, Complex64::new(alpha_mag, 0.0));
    let y = displacement_matrix(dim, Complex64::new(0.0, alpha_mag));
    let c = &x * &y - &y * &x;
    c.view((0, 0), (keep, keep)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
