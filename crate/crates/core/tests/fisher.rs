mod common;

use common::{c, max_diff, rng, uniform};
use nalgebra::DMatrix;
use num_complex::Complex64;
use seqmeas_core::fisher::*;
use seqmeas_core::math::HammingIndex;
use seqmeas_core::oracle::{
    branch_rho_derivative, brute_force_seq, fidelity_qfi, restrict_to_dicke, sld_qfi, BruteForce,
};
use seqmeas_core::protocols::*;

fn state(spec: &ProtocolSpec) -> AncillaState {
    build_state(spec).unwrap()
}

fn qfi_of(spec: &ProtocolSpec, p: Param) -> f64 {
    let s = state(spec);
    qfi_scalar(&s, &d_rho(&s, p).unwrap()).unwrap()
}

#[test]
fn single_qfi_matches_closed_form() {
    for n in [1, 10, 100] {
        for a in [0.1, 0.5, 1.0] {
            let spec = ProtocolSpec::single(n, c(0.0, a), c(0.02, -0.01)).unwrap();
            let f = qfi_of(&spec, Param::Beta1);
            let want = single_qfi_closed_form(n, a);
            assert!((f - want).abs() < 1e-8 * want, "N={n} a={a}: {f} vs {want}");
        }
    }
    let f = qfi_of(&ProtocolSpec::single(10, c(0.0, 0.5), c(0.0, 0.0)).unwrap(), Param::Beta1);
    assert!((f - 36.787944117144235).abs() < 1e-9);
}

#[test]
fn zero_derivative_gives_zero() {
    let s = state(&ProtocolSpec::seq_one(6, c(0.3, 0.0), c(0.1, 0.0)).unwrap());
    let d = d_rho(&s, Param::Beta1).unwrap();
    assert!(d.is_zero());
    assert_eq!(qfi_scalar(&s, &d).unwrap(), 0.0);
}

#[test]
fn seq_qfi_matches_dense_sld_solve() {
    // ancilla QFI from the branch-enumerated joint state, restricted to the
    // symmetric subspace, with the SLD from a dense linear solve
    let spec = ProtocolSpec::seq_one(5, c(0.2, 0.0), c(0.03, 0.05)).unwrap();
    let brute = brute_force_seq(&spec).unwrap();
    let rho = restrict_to_dicke(&brute.rho, 5);
    let drho = restrict_to_dicke(&branch_rho_derivative(&brute.plan, spec.beta, Param::Beta2), 5);
    let want = sld_qfi(&rho, &drho).unwrap();
    let got = qfi_of(&spec, Param::Beta2);
    assert!((got - want).abs() < 1e-8 * want, "{got} vs {want}");
}

#[test]
fn two_param_qfi_is_diagonal_and_saturable() {
    let s = state(&ProtocolSpec::seq_two(4, c(0.2, 0.0), c(0.05, 0.05)).unwrap());
    let r = qfi_matrix(&s, &d_rho(&s, Param::Beta1).unwrap(), &d_rho(&s, Param::Beta2).unwrap()).unwrap();
    let f11 = r.qfi[(0, 0)];
    assert!(r.qfi[(0, 1)].abs() < 1e-10 * f11);
    assert!((f11 - r.qfi[(1, 1)]).abs() < 1e-10 * f11);
    assert!(r.sld_residual < 1e-10 * f11);
}

#[test]
fn two_param_qfi_matches_fidelity_curvature_at_zero_signal() {
    let spec = ProtocolSpec::seq_two(2, c(0.4, 0.0), c(0.0, 0.0)).unwrap();
    let s = state(&spec);
    let r = qfi_matrix(&s, &d_rho(&s, Param::Beta1).unwrap(), &d_rho(&s, Param::Beta2).unwrap()).unwrap();
    assert!(r.qfi[(0, 0)] > 0.0);
    for p in Param::BOTH {
        let f = fidelity_qfi(|b| Ok(state(&spec.with_beta(b)).entries().clone()), spec.beta, p, 0.02).unwrap();
        let want = r.qfi[(p.index(), p.index())];
        assert!((f - want).abs() < 1e-6 * want, "{p:?}: {f} vs {want}");
    }
}

#[test]
fn cutoff_sensitivity_is_small() {
    let spec = ProtocolSpec::seq_one(200, c(0.0, 0.3), c(0.0, 0.0)).unwrap();
    let s = state(&spec);
    let d = d_rho(&s, Param::Beta1).unwrap();
    let base = qfi_scalar(&s, &d).unwrap();
    for eps in [1e-10, 1e-14] {
        let f = qfi_scalar_with_cutoff(&s, &d, eps).unwrap();
        assert!((f - base).abs() < 1e-6 * base, "cutoff {eps}: {f} vs {base}");
    }
}

#[test]
fn transfer_matrix_reproduces_brute_force_basis_change() {
    let u = measurement_unitary();
    let v = transfer_matrix(6, &u).unwrap();
    let t = BruteForce::dicke_basis_change(6);
    let t = t.map(|x| Complex64::new(x, 0.0));
    assert!(max_diff(&v, &t) < 1e-10);
    for k in 0..=6 {
        let col: f64 = (0..=6).map(|m| v[(m, k)].norm_sqr()).sum();
        assert!((col - 1.0).abs() < 1e-12);
    }
}

#[test]
fn transfer_unitary_up_to_500() {
    let u = measurement_unitary();
    for n in [1, 50, 200, 500] {
        let v = transfer_matrix(n, &u).unwrap();
        let e = &v * v.adjoint() - DMatrix::<Complex64>::identity(n + 1, n + 1);
        assert!(e.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
    }
}

#[test]
fn hadamard_transfer_is_itself() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let had = [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]];
    let v = transfer_matrix(1, &had).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert!((v[(i, j)] - had[i][j]).norm() < 1e-15);
        }
    }
}

#[test]
fn undisturbed_register_reads_all_down() {
    for spec in [
        ProtocolSpec::seq_one(3, c(0.0, 0.0), c(0.0, 0.0)).unwrap(),
        ProtocolSpec::seq_one(30, c(0.0, 0.0), c(0.0, 0.0)).unwrap(),
    ] {
        let p = outcome_distribution(&state(&spec), &measurement_unitary()).unwrap();
        assert!((p.p[0] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn distributions_match_brute_force_and_normalize() {
    let mut r = rng(11);
    let u = measurement_unitary();
    for _ in 0..5 {
        let a = uniform(&mut r, 0.05, 0.6);
        let b = c(uniform(&mut r, -0.2, 0.2), uniform(&mut r, -0.2, 0.2));
        for spec in [
            ProtocolSpec::seq_one(6, c(0.0, a), b).unwrap(),
            ProtocolSpec::seq_two(3, c(a, 0.0), b).unwrap(),
            ProtocolSpec::single(7, c(a, 0.0), b).unwrap(),
        ] {
            let p = outcome_distribution(&state(&spec), &u).unwrap();
            let q = brute_force_seq(&spec).unwrap().weight_distribution();
            assert!((p.total() - 1.0).abs() < 1e-10);
            for (x, y) in p.p.iter().zip(&q) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn forty_rounds_distribution_is_near_symmetric() {
    let spec = ProtocolSpec::seq_one(40, c(0.0, 0.2), c(0.1, 0.0)).unwrap();
    let p = outcome_distribution(&state(&spec), &measurement_unitary()).unwrap();
    assert!((p.mean_excitation - 0.5).abs() < 0.1, "{}", p.mean_excitation);
}

fn binary_cfi(n: usize, a: f64, beta1: f64) -> f64 {
    // p(↓) = ½(1 + e^{-2|α|²} cos x), x = 2Nβ₁|α|
    let x = 2.0 * n as f64 * beta1 * a;
    let e = (-2.0 * a * a).exp();
    let p = 0.5 * (1.0 + e * x.cos());
    let dp = -0.5 * e * x.sin() * 2.0 * n as f64 * a;
    dp * dp / (p * (1.0 - p))
}

#[test]
fn single_cfi_resolves_prefactor() {
    let (n, a) = (10usize, 0.2);
    let beta1 = std::f64::consts::FRAC_PI_2 / (2.0 * n as f64 * a);
    let spec = ProtocolSpec::single(n, c(0.0, a), c(beta1, 0.0)).unwrap();
    let map = MeasurementMap::new(HammingIndex::Scalar { n: 1 }, &measurement_unitary()).unwrap();
    let r = protocol_cfi(&spec, &map, DerivativeMode::Analytic).unwrap();
    let q = single_qfi_closed_form(n, a);
    assert!((r.cfi[(0, 0)] - q).abs() < 1e-10 * q);
    assert!((binary_cfi(n, a, beta1) - q).abs() < 1e-10 * q);
    let four = |b: f64| {
        let x = 2.0 * n as f64 * b * a;
        let e4 = (-4.0 * a * a).exp();
        4.0 * (n * n) as f64 * a * a * e4 * x.sin().powi(2) / (1.0 - e4 * x.cos().powi(2))
    };
    for b in [0.01, 0.1, 0.33, 0.5] {
        let s = spec.with_beta(c(b, 0.0));
        let got = protocol_cfi(&s, &map, DerivativeMode::Analytic).unwrap().cfi[(0, 0)];
        assert!((got - binary_cfi(n, a, b)).abs() < 1e-9 * got.max(1e-6));
        assert!((got - four(b)).abs() < 1e-9 * got.max(1e-6));
    }
    let dip = spec.with_beta(c(std::f64::consts::PI / (2.0 * n as f64 * a), 0.0));
    assert!(protocol_cfi(&dip, &map, DerivativeMode::Analytic).unwrap().cfi[(0, 0)] < 1e-20);
}

#[test]
fn cfi_analytic_matches_finite_difference() {
    let spec = ProtocolSpec::seq_two(3, c(0.3, 0.0), c(0.07, 0.04)).unwrap();
    let map = MeasurementMap::new(index_of(&spec), &measurement_unitary()).unwrap();
    let a = protocol_cfi(&spec, &map, DerivativeMode::Analytic).unwrap();
    let f = protocol_cfi(&spec, &map, DerivativeMode::FiniteDifference(1e-6)).unwrap();
    assert!((a.cfi - f.cfi).abs().max() < 1e-6 * a.cfi.abs().max());
}

#[test]
fn cfi_bounded_by_qfi() {
    let u = measurement_unitary();
    let mut r = rng(3);
    for _ in 0..10 {
        let a = uniform(&mut r, 0.05, 0.8);
        let b = c(uniform(&mut r, -0.3, 0.3), uniform(&mut r, -0.3, 0.3));
        let one = ProtocolSpec::seq_one(12, c(0.0, a), b).unwrap();
        let map = MeasurementMap::new(index_of(&one), &u).unwrap();
        let fc = protocol_cfi(&one, &map, DerivativeMode::Analytic).unwrap().cfi[(0, 0)];
        let fq = qfi_of(&one, Param::Beta1);
        assert!(fc <= fq * (1.0 + 1e-9));

        let two = ProtocolSpec::seq_two(3, c(a, 0.0), b).unwrap();
        let s = state(&two);
        let q = qfi_matrix(&s, &d_rho(&s, Param::Beta1).unwrap(), &d_rho(&s, Param::Beta2).unwrap()).unwrap();
        let map = MeasurementMap::new(index_of(&two), &u).unwrap();
        let cl = protocol_cfi(&two, &map, DerivativeMode::Analytic).unwrap();
        assert!(cl.crb >= q.crb - 1e-9);
    }
}

#[test]
fn crb_prefixes() {
    let spec = ProtocolSpec::seq_two(4, c(0.2, 0.0), c(0.1, 0.2)).unwrap();
    let s = crb_min_over_rounds(&spec, None).unwrap();
    assert_eq!(s.per_round.len(), 8);
    assert!(s.per_round[0].is_infinite());
    assert!(s.running_min.windows(2).all(|w| w[1] <= w[0]));
    assert!(s.running_min[7] <= s.per_round[7]);
    let one = ProtocolSpec::seq_one(5, c(0.0, 0.2), c(0.1, 0.0)).unwrap();
    let s1 = crb_min_over_rounds(&one, None).unwrap();
    let first = ProtocolSpec::seq_one(1, c(0.0, 0.2), c(0.1, 0.0)).unwrap();
    let map = MeasurementMap::new(index_of(&first), &measurement_unitary()).unwrap();
    let direct = protocol_cfi(&first, &map, DerivativeMode::Analytic).unwrap().crb;
    assert!((s1.per_round[0] - direct).abs() < 1e-12 * direct);
}

#[test]
fn seq_beats_single_on_a_coarse_grid() {
    for n in [20, 60] {
        for k in 1..=10 {
            let a = 0.1 * k as f64;
            let seq = qfi_of(&ProtocolSpec::seq_one(n, c(0.0, a), c(0.0, 0.0)).unwrap(), Param::Beta1);
            assert!(seq >= single_qfi_closed_form(n, a) * (1.0 - 1e-12));
        }
    }
}

#[test]
fn optimal_single_coupling() {
    let best = (0..=1000)
        .map(|i| 0.3 + 0.4 * i as f64 / 1000.0)
        .map(|a| (a, qfi_of(&ProtocolSpec::single(10, c(0.0, a), c(0.0, 0.0)).unwrap(), Param::Beta1)))
        .fold((0.0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    assert!((best.0 - 0.5).abs() <= 0.005);
}

#[test]
fn rejects_bad_cfi_input() {
    let d = OutcomeDistribution { index: HammingIndex::Scalar { n: 1 }, p: vec![0.5, 0.5], mean_excitation: 0.5 };
    assert!(cfi_matrix(&d, &[]).is_err());
    assert!(cfi_matrix(&d, &[vec![1.0]]).is_err());
    let r = cfi_matrix(&d, &[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
    assert!(r.singular && r.crb.is_infinite());
}
