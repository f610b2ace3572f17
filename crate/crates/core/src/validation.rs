//! Quick self-checks shared by the command-line `validate` experiment.

use crate::decoherence::{evolve_noisy_branches, NoiseModel};
use crate::fisher::{
    measurement_unitary, outcome_distribution, qfi_matrix, qfi_scalar, single_qfi_closed_form, transfer_matrix,
};
use crate::oracle::{brute_force_seq, pure_state_qfi_dicke};
use crate::protocols::{build_state, d_rho, joint_qfi_closed_form, Param, ProtocolKind, ProtocolSpec};
use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check(name: &'static str, value: f64, tolerance: f64) -> CheckResult {
    CheckResult { name, passed: value.is_finite() && value <= tolerance, value, tolerance }
}

fn run_or_inf(f: impl FnOnce() -> crate::Result<f64>) -> f64 {
    f().unwrap_or(f64::INFINITY)
}

/// Runs the oracle-equivalence and closed-form checks.
pub fn run_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();

    out.push(check(
        "single-measurement QFI closed form",
        run_or_inf(|| {
            let mut worst = 0.0f64;
            for n in [1, 10, 100] {
                for a in [0.1, 0.5, 1.0] {
                    let s = build_state(&ProtocolSpec::single(n, c(0.0, a), c(0.0, 0.0))?)?;
                    let f = qfi_scalar(&s, &d_rho(&s, Param::Beta1)?)?;
                    let want = single_qfi_closed_form(n, a);
                    worst = worst.max((f - want).abs() / want);
                }
            }
            Ok(worst)
        }),
        1e-8,
    ));

    for (name, spec) in [
        ("one-parameter state vs branch enumeration", ProtocolSpec::seq_one(6, c(0.0, 0.3), c(0.07, -0.04))),
        ("two-parameter state vs branch enumeration", ProtocolSpec::seq_two(3, c(0.25, 0.0), c(0.05, 0.03))),
        ("single-measurement state vs branch enumeration", ProtocolSpec::single(10, c(0.5, 0.0), c(0.0, 0.1))),
    ] {
        out.push(check(
            name,
            run_or_inf(|| {
                let spec = spec?;
                Ok(max_diff(build_state(&spec)?.entries(), &brute_force_seq(&spec)?.dicke_grouped()))
            }),
            1e-12,
        ));
    }

    out.push(check(
        "joint QFI closed form vs pure-state sum",
        run_or_inf(|| {
            let mut worst = 0.0f64;
            for n in [1usize, 5, 50, 200] {
                let a = c(0.0, 0.3);
                let want = joint_qfi_closed_form(ProtocolKind::SeqOneParam, n, &vec![a; n]);
                let got = pure_state_qfi_dicke(n, a, c(0.1, 0.2), Param::Beta1);
                worst = worst.max((got - want).abs() / want);
            }
            Ok(worst)
        }),
        1e-10,
    ));

    out.push(check(
        "two-parameter QFI off-diagonal and SLD residual",
        run_or_inf(|| {
            let s = build_state(&ProtocolSpec::seq_two(4, c(0.2, 0.0), c(0.05, 0.05))?)?;
            let r = qfi_matrix(&s, &d_rho(&s, Param::Beta1)?, &d_rho(&s, Param::Beta2)?)?;
            let f11 = r.qfi[(0, 0)];
            Ok((r.qfi[(0, 1)].abs().max(r.sld_residual).max((f11 - r.qfi[(1, 1)]).abs())) / f11)
        }),
        1e-10,
    ));

    out.push(check(
        "transfer matrix unitarity at N = 500",
        run_or_inf(|| {
            let v = transfer_matrix(500, &measurement_unitary())?;
            let n = v.nrows();
            Ok(max_diff(&(&v * v.adjoint()), &DMatrix::identity(n, n)))
        }),
        1e-10,
    ));

    out.push(check(
        "readout distribution vs branch enumeration",
        run_or_inf(|| {
            let spec = ProtocolSpec::seq_one(6, c(0.0, 0.3), c(0.1, 0.05))?;
            let p = outcome_distribution(&build_state(&spec)?, &measurement_unitary())?;
            let q = brute_force_seq(&spec)?.weight_distribution();
            Ok(p.p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        }),
        1e-10,
    ));

    out.push(check(
        "noise-free branch model vs noiseless state",
        run_or_inf(|| {
            let spec = ProtocolSpec::seq_two(2, c(0.3, 0.0), c(0.1, -0.2))?;
            let ens = evolve_noisy_branches(&spec, &NoiseModel::noiseless(1.0, 1.0))?;
            let brute = brute_force_seq(&spec)?;
            Ok(max_diff(&ens.reduced_matrix()?, &brute.rho))
        }),
        1e-12,
    ));

    out
}
