mod common;

use common::{c, max_diff, rng, total_variation, uniform};
use rand::seq::SliceRandom;
use seqmeas_core::decoherence::{displaced_amplitude, NoiseModel};
use seqmeas_core::oracle::*;
use seqmeas_core::protocols::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::f64::consts::PI;

#[test]
fn single_round_branch_pair() {
    let (a, b) = (c(0.0, 0.4), c(0.1, 0.2));
    let spec = ProtocolSpec::seq_one(1, a, b).unwrap();
    let brute = brute_force_seq(&spec).unwrap();
    assert_eq!(brute.branches.len(), 2);
    let g = seqmeas_core::math::coherent_overlap(b + a, b - a) / 2.0;
    assert!((brute.rho[(0, 1)] - g).norm() < 1e-15 || (brute.rho[(1, 0)] - g).norm() < 1e-15);
}

#[test]
fn brute_force_matches_fast_path_on_random_draws() {
    let mut r = rng(99);
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let mag = uniform(&mut r, 0.05, 0.7);
        let ph = uniform(&mut r, 0.0, 2.0 * PI);
        let alpha = num_complex::Complex64::from_polar(mag, ph);
        let beta = c(uniform(&mut r, -0.3, 0.3), uniform(&mut r, -0.3, 0.3));
        let rounds = 1 + (uniform(&mut r, 0.0, 10.0) as usize).min(9);
        for spec in [
            ProtocolSpec::seq_one(rounds, alpha, beta).unwrap(),
            ProtocolSpec::single(rounds, alpha, beta).unwrap(),
            ProtocolSpec::seq_two(rounds.div_ceil(2).max(1).min(5), alpha, beta).unwrap(),
        ] {
            let fast = build_state(&spec).unwrap();
            let d = max_diff(fast.entries(), &brute_force_seq(&spec).unwrap().dicke_grouped());
            worst = worst.max(d);
        }
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn reduced_matrix_is_permutation_invariant() {
    let spec = ProtocolSpec::seq_one(6, c(0.0, 0.35), c(0.12, -0.07)).unwrap();
    let rho = brute_force_seq(&spec).unwrap().rho;
    let mut r = rng(4);
    let mut perm: Vec<usize> = (0..6).collect();
    for _ in 0..20 {
        perm.shuffle(&mut r);
        assert!(max_diff(&permute_qubits(&rho, &perm), &rho) < 1e-12);
    }
}

#[test]
fn branch_limit() {
    let spec = ProtocolSpec::seq_one(23, c(0.0, 0.1), c(0.0, 0.0)).unwrap();
    assert!(brute_force_seq(&spec).is_err());
}

#[test]
fn fock_identity_without_noise_or_drive() {
    let s = FockState::down_coherent(30, c(0.5, -0.2));
    let quiet = NoiseModel::new(0.0, 0.0, 0.0, 1.0, 0.0).unwrap();
    let out = fock_lindblad_evolve(&s, &quiet, SignalDrive { beta: c(0.0, 0.0), t_round: 1.0 }, 1.0).unwrap();
    assert!(max_diff(&out.rho, &s.rho) < 1e-12);
}

#[test]
fn fock_loss_shrinks_mean() {
    let s = FockState::down_coherent(40, c(0.5, 0.0));
    let noise = NoiseModel::new(1.0, 0.0, 0.0, 0.3, 0.0).unwrap();
    let out = fock_lindblad_evolve(&s, &noise, SignalDrive { beta: c(0.0, 0.0), t_round: 0.3 }, 0.3).unwrap();
    assert!((out.mean_amplitude() - c(0.5 * (-0.15f64).exp(), 0.0)).norm() < 1e-6);
    assert!((out.trace() - c(1.0, 0.0)).norm() < 1e-9);
}

#[test]
fn fock_driven_vacuum() {
    let (gamma, t, g) = (1.89e4, 15.92e-6, 0.5 * 2f64.sqrt() / 15.92e-6);
    let noise = NoiseModel::new(gamma, 0.0, 0.0, t, g).unwrap();
    let beta = c(g * t / 2f64.sqrt(), 0.0);
    let s = FockState::down_coherent(40, c(0.0, 0.0));
    let out = fock_lindblad_evolve(&s, &noise, SignalDrive { beta, t_round: t }, t).unwrap();
    let want = displaced_amplitude(g, gamma, t);
    assert!((out.mean_amplitude().norm() - want).abs() < 1e-6, "{} vs {want}", out.mean_amplitude().norm());
}

#[test]
fn fock_truncation_guard() {
    let s = FockState::down_coherent(12, c(3.0, 0.0));
    assert!(s.check_truncation().is_err());
}

#[test]
fn sampler_deterministic_and_ground_at_rest() {
    let spec = ProtocolSpec::seq_one(6, c(0.0, 0.3), c(0.1, 0.0)).unwrap();
    let a = sample_trajectories(&spec, None, 17, 500).unwrap();
    let b = sample_trajectories(&spec, None, 17, 500).unwrap();
    assert_eq!(a, b);
    let rest = ProtocolSpec::seq_one(6, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
    assert!(sample_trajectories(&rest, None, 3, 200).unwrap().iter().all(|s| s.bits == 0));
    assert!(sample_trajectories(&rest, None, 3, 0).is_err());
}

fn histogram(samples: &[Bitstring], n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n + 1];
    for s in samples {
        h[s.weight()] += 1.0;
    }
    h
}

#[test]
fn sampler_statistics() {
    let spec = ProtocolSpec::seq_one(6, c(0.0, 0.3), c(0.15, 0.05)).unwrap();
    let exact = brute_force_seq(&spec).unwrap().weight_distribution();
    let count = 100_000;
    let h = histogram(&sample_trajectories(&spec, None, 2024, count).unwrap(), 6);
    let emp: Vec<f64> = h.iter().map(|x| x / count as f64).collect();
    assert!(total_variation(&emp, &exact) < 0.01);
    let mut chi2 = 0.0;
    let mut dof = 0usize;
    for (o, p) in h.iter().zip(&exact) {
        let e = p * count as f64;
        if e > 5.0 {
            chi2 += (o - e).powi(2) / e;
            dof += 1;
        }
    }
    let crit = ChiSquared::new((dof - 1) as f64).unwrap().inverse_cdf(0.999);
    assert!(chi2 < crit, "chi2 {chi2} vs {crit}");
}

#[test]
fn grid_fixture_magnitudes_and_commutator() {
    for a in [0.2, PI.sqrt(), (2.0 * PI).sqrt()] {
        let f = grid_fixture_at(1, a).unwrap();
        println!("|alpha| = {a:.4}: deviation from reference matrix {:.3e}", f.deviation_from_reference);
    }
    for n in 1..=3 {
        let f = grid_state_fixture(n).unwrap();
        let pattern = grid_pattern(n);
        let built = f.state.entries();
        for (a, b) in built.iter().zip(pattern.iter()) {
            assert!((a.norm() - b.norm()).abs() < 1e-12);
            assert!(a.im.abs() < 1e-12);
        }
        // the built phases are 2|α|² = 2nπ, so every entry is positive
        if n % 2 == 0 {
            assert!(f.deviation_from_pattern < 1e-12, "n={n}: {}", f.deviation_from_pattern);
        } else {
            assert!(built.iter().all(|z| z.re > 0.0));
        }
        assert!(f.commutator_coefficient.abs() < 1e-12);
        assert!(f.commutator_norm < 1e-8, "n={n}: {}", f.commutator_norm);
    }
    let generic = displacement_commutator_coefficient(0.5);
    assert!((generic - 2.0 * 0.25f64.sin()).abs() < 1e-15);
}

#[test]
fn noisy_sampler_matches_branch_ensemble() {
    let spec = ProtocolSpec::seq_one(4, c(0.0, 0.3), c(0.2, 0.0)).unwrap();
    let noise = NoiseModel::reference();
    let exact = record_distribution(&spec, Some(&noise)).unwrap();
    let count = 50_000;
    let samples = sample_trajectories(&spec, Some(&noise), 5, count).unwrap();
    assert_eq!(samples, sample_trajectories(&spec, Some(&noise), 5, count).unwrap());
    let mut emp = vec![0.0; exact.len()];
    for s in &samples {
        emp[s.bits as usize] += 1.0 / count as f64;
    }
    assert!(total_variation(&emp, &exact) < 0.01);
}
