//! Shared tolerances.

/// Trace and Hermiticity tolerance for ancilla states.
pub const EPS_NORM: f64 = 1e-12;
/// Cutoff on `p_j + p_k` in the QFI eigen-sum.
pub const EPS_EIG: f64 = 1e-12;
/// Most negative eigenvalue accepted before a state is rejected.
pub const EPS_PSD: f64 = -1e-10;
/// Outcome probabilities below this are skipped in the CFI sum.
pub const EPS_PROB: f64 = 1e-14;
/// Probabilities more negative than this are a numerical failure.
pub const EPS_NEG_PROB: f64 = -1e-8;
/// Magnitudes below this are stored as exact zeros.
pub const UNDERFLOW: f64 = 1e-300;
/// Entries below this fraction of the largest entry are zeroed before an
/// eigensolve; the dense solver returns NaN on matrices holding values near
/// 1e-200 alongside O(1) entries.
pub const EPS_FLUSH: f64 = 1e-60;
/// Default upper bound on rounds per quadrature.
pub const DEFAULT_MAX_ROUNDS: usize = 2000;
/// Default upper bound on the two-parameter matrix dimension.
pub const DEFAULT_MAX_PAIR_DIM: usize = 10_201;
/// Rounds above which branch enumeration is refused.
pub const MAX_BRANCH_ROUNDS: usize = 22;
