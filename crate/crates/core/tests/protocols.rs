mod common;

use common::{c, max_diff, rng, uniform};
use nalgebra::DMatrix;
use num_complex::Complex64;
use seqmeas_core::fisher::scaling_exponent;
use seqmeas_core::math::dicke_weight;
use seqmeas_core::oracle::{brute_force_seq, pure_state_qfi_branches, pure_state_qfi_dicke};
use seqmeas_core::protocols::*;
use seqmeas_core::Error;

fn entries(spec: &ProtocolSpec) -> DMatrix<Complex64> {
    build_state(spec).unwrap().entries().clone()
}

#[test]
fn single_zero_signal_and_no_kick() {
    let a = 0.4;
    let m = entries(&ProtocolSpec::single(7, c(a, 0.0), c(0.0, 0.0)).unwrap());
    assert!((m[(0, 1)] - c(0.5 * (-2.0 * a * a as f64).exp(), 0.0)).norm() < 1e-15);
    assert!((m[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
    let m = entries(&ProtocolSpec::single(7, c(0.0, 0.0), c(0.3, 0.1)).unwrap());
    assert!(m.iter().all(|z| (z - c(0.5, 0.0)).norm() < 1e-15));
}

#[test]
fn builders_match_branch_enumeration() {
    for spec in [
        ProtocolSpec::single(10, c(0.5, 0.0), c(0.0, 0.1)).unwrap(),
        ProtocolSpec::seq_one(3, c(0.0, 0.2), c(0.1, 0.0)).unwrap(),
        ProtocolSpec::seq_two(2, c(0.2, 0.0), c(0.05, 0.03)).unwrap(),
    ] {
        let d = max_diff(&entries(&spec), &brute_force_seq(&spec).unwrap().dicke_grouped());
        assert!(d < 1e-12, "{:?}: {d}", spec.kind);
    }
}

#[test]
fn seq_zero_signal_is_real_gaussian() {
    let (n, a) = (8usize, 0.3);
    let m = entries(&ProtocolSpec::seq_one(n, c(0.0, a), c(0.0, 0.0)).unwrap());
    for k in 0..=n {
        for kp in 0..=n {
            let w = (dicke_weight(n, k).unwrap().value() * dicke_weight(n, kp).unwrap().value()).sqrt();
            let d = (k as f64 - kp as f64).powi(2);
            let want = w * (-2.0 * d * a * a).exp();
            assert!((m[(k, kp)] - c(want, 0.0)).norm() < 1e-14);
        }
    }
}

#[test]
fn tiny_kick_gives_uniform_dicke_projector() {
    let n = 6;
    let m = entries(&ProtocolSpec::seq_one(n, c(0.0, 1e-9), c(0.2, 0.0)).unwrap());
    let v: Vec<f64> = (0..=n).map(|k| dicke_weight(n, k).unwrap().value().sqrt()).collect();
    for i in 0..=n {
        for j in 0..=n {
            assert!((m[(i, j)].re - v[i] * v[j]).abs() < 1e-8);
        }
    }
}

#[test]
fn conjugation_and_gaussian_suppression() {
    let mut r = rng(5);
    for _ in 0..10 {
        let n = 2 + (uniform(&mut r, 0.0, 30.0) as usize);
        let alpha = Complex64::from_polar(uniform(&mut r, 0.05, 0.8), uniform(&mut r, 0.0, 6.28));
        let beta = c(uniform(&mut r, -0.3, 0.3), uniform(&mut r, -0.3, 0.3));
        let spec = ProtocolSpec::seq_one(n, alpha, beta).unwrap();
        let m = entries(&spec);
        let mm = entries(&spec.with_beta(-beta));
        assert!(max_diff(&mm, &m.map(|z| z.conj())) < 1e-14);
        for k in 0..=n {
            for kp in 0..=n {
                let w = (dicke_weight(n, k).unwrap().value() * dicke_weight(n, kp).unwrap().value()).sqrt();
                let d = (k as f64 - kp as f64).powi(2);
                let ratio = m[(k, kp)].norm() / w;
                let want = (-2.0 * d * alpha.norm_sqr()).exp();
                assert!((ratio - want).abs() < 1e-12 * want.max(1e-300) + 1e-300);
            }
        }
    }
}

#[test]
fn builder_kind_and_size_guards() {
    let one = ProtocolSpec::seq_one(3, c(0.2, 0.0), c(0.0, 0.0)).unwrap();
    assert!(matches!(build_two_param_rho(&one), Err(Error::Usage(_))));
    assert!(matches!(build_single_rho(&one), Err(Error::Usage(_))));
    let big = ProtocolSpec::seq_one(2001, c(0.2, 0.0), c(0.0, 0.0)).unwrap();
    assert!(matches!(build_seq_rho(&big), Err(Error::Resource(_))));
    let limits = Limits { max_rounds: 10, ..Limits::default() };
    assert!(matches!(build_seq_rho_with(&ProtocolSpec::seq_one(11, c(0.2, 0.0), c(0.0, 0.0)).unwrap(), limits), Err(Error::Resource(_))));
    assert!(ProtocolSpec::seq_one(0, c(0.2, 0.0), c(0.0, 0.0)).is_err());
}

#[test]
fn built_states_are_legal() {
    let mut r = rng(8);
    for _ in 0..10 {
        let a = uniform(&mut r, 0.01, 1.0);
        let b = c(uniform(&mut r, -1.0, 1.0), uniform(&mut r, -1.0, 1.0));
        for spec in [
            ProtocolSpec::seq_one(40, c(0.0, a), b).unwrap(),
            ProtocolSpec::seq_two(6, c(a, 0.0), b).unwrap(),
        ] {
            let s = build_state(&spec).unwrap();
            assert!(hermiticity_defect(s.entries()) < 1e-14);
            assert!((s.entries().trace() - c(1.0, 0.0)).norm() < 1e-12);
            s.check_psd().unwrap();
        }
    }
}

fn fd(spec: &ProtocolSpec, p: Param, h: f64) -> DMatrix<Complex64> {
    let up = entries(&spec.with_beta(spec.beta + p.direction() * h));
    let dn = entries(&spec.with_beta(spec.beta - p.direction() * h));
    (up - dn) / Complex64::new(2.0 * h, 0.0)
}

#[test]
fn derivative_matches_finite_differences() {
    let mut r = rng(21);
    for kind in [ProtocolKind::SingleMeasurement, ProtocolKind::SeqOneParam, ProtocolKind::SeqTwoParam] {
        for _ in 0..10 {
            let a = uniform(&mut r, 0.05, 0.5);
            let phase = uniform(&mut r, 0.0, 6.28);
            let b = c(uniform(&mut r, -0.2, 0.2), uniform(&mut r, -0.2, 0.2));
            let spec = match kind {
                ProtocolKind::SingleMeasurement => ProtocolSpec::single(9, Complex64::from_polar(a, phase), b),
                ProtocolKind::SeqOneParam => ProtocolSpec::seq_one(7, Complex64::from_polar(a, phase), b),
                ProtocolKind::SeqTwoParam => ProtocolSpec::seq_two(3, Complex64::from_polar(a, phase), b),
            }
            .unwrap();
            let s = build_state(&spec).unwrap();
            for p in Param::BOTH {
                let d = d_rho(&s, p).unwrap();
                let num = fd(&spec, p, 1e-6);
                let scale = d.entries.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-3);
                assert!(max_diff(&d.entries, &num) < 1e-6 * scale, "{kind:?} {p:?}");
                assert!(hermiticity_defect(&d.entries) < 1e-12);
                assert!(d.entries.trace().norm() < 1e-12);
            }
        }
    }
}

#[test]
fn real_kick_is_blind_to_the_real_signal() {
    let s = build_state(&ProtocolSpec::seq_one(5, c(0.3, 0.0), c(0.1, 0.1)).unwrap()).unwrap();
    assert!(d_rho(&s, Param::Beta1).unwrap().is_zero());
    assert!(!d_rho(&s, Param::Beta2).unwrap().is_zero());
}

#[test]
fn joint_closed_form_examples() {
    let f = joint_qfi_closed_form(ProtocolKind::SeqOneParam, 5, &[c(0.0, 0.3); 5]);
    assert!((f - 145.0).abs() < 1e-10);
    let f = joint_qfi_closed_form(ProtocolKind::SingleMeasurement, 10, &[c(0.5, 0.0)]);
    assert!((f - 500.0).abs() < 1e-10);
}

#[test]
fn joint_closed_form_matches_pure_state_sum() {
    for n in [1usize, 2, 10, 77, 200] {
        let a = c(0.0, 0.25);
        let want = joint_qfi_closed_form(ProtocolKind::SeqOneParam, n, &vec![a; n]);
        let got = pure_state_qfi_dicke(n, a, c(0.1, -0.05), Param::Beta1);
        assert!((got - want).abs() < 1e-10 * want, "N={n}");
    }
    let ramp: Vec<Complex64> = (1..=10).map(|k| c(0.0, 0.03 * k as f64)).collect();
    let want = joint_qfi_closed_form(ProtocolKind::SeqOneParam, 10, &ramp);
    let got = pure_state_qfi_branches(10, &ramp, c(0.02, 0.0), Param::Beta1).unwrap();
    assert!((got - want).abs() < 1e-10 * want);
}

#[test]
fn ramp_schedule_exponent_tends_to_five() {
    let f = |n: usize| {
        let sched: Vec<Complex64> = (1..=n).map(|k| c(0.0, 0.1 * k as f64)).collect();
        joint_qfi_closed_form(ProtocolKind::SeqOneParam, n, &sched)
    };
    let samples: Vec<(f64, f64)> = [100usize, 200, 400, 700, 1000].iter().map(|&n| (n as f64, f(n))).collect();
    let p = scaling_exponent(&samples).unwrap();
    let last = p.last().unwrap().1;
    assert!((last - 5.0).abs() < 0.01, "{last}");
}
