//! One function per experiment; each returns a long-format table.

use crate::config::{Experiment, ProtocolName, Resolved};
use crate::output::{Cell, Table};
use num_complex::Complex64;
use rayon::prelude::*;
use seqmeas_core::decoherence::{noisy_crb_curve, NoiseModel};
use seqmeas_core::fisher::{
    crb_min_over_rounds, index_of, measurement_unitary, outcome_distribution_with, protocol_cfi, qfi_matrix,
    qfi_scalar, scaling_exponent, single_qfi_closed_form, single_two_param_crb, DerivativeMode, MeasurementMap,
};
use seqmeas_core::oracle::sample_trajectories;
use seqmeas_core::protocols::{build_state, d_rho, Param, ProtocolSpec};
use seqmeas_core::validation::run_suite;
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Invariant(String),
    Resource(String),
    Numerical(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "config error: {m}"),
            RunError::Invariant(m) => write!(f, "invariant violated: {m}"),
            RunError::Resource(m) => write!(f, "resource limit: {m}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<seqmeas_core::Error> for RunError {
    fn from(e: seqmeas_core::Error) -> Self {
        use seqmeas_core::Error as E;
        match e {
            E::Domain(m) | E::Usage(m) => RunError::Config(m),
            E::Resource(m) => RunError::Resource(m),
            E::Numerical(m) => RunError::Numerical(m),
        }
    }
}

type Res<T> = Result<T, RunError>;

pub struct Report {
    pub table: Table,
    /// Names of failed checks; only the validate experiment reports these.
    pub failed: Vec<String>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn beta(cfg: &Resolved) -> Complex64 {
    c(cfg.beta[0], cfg.beta[1])
}

fn grid2<A: Copy + Sync, B: Copy + Sync>(a: &[A], b: &[B]) -> Vec<(A, B)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

fn seq_qfi(n: usize, a: f64, b: Complex64) -> Res<f64> {
    let s = build_state(&ProtocolSpec::seq_one(n, c(0.0, a), b)?)?;
    Ok(qfi_scalar(&s, &d_rho(&s, Param::Beta1)?)?)
}

fn qfi_sweep(cfg: &Resolved) -> Res<Table> {
    let b = beta(cfg);
    let rows: Vec<[f64; 2]> = grid2(&cfg.n, &cfg.alpha)
        .par_iter()
        .map(|&(n, a)| -> Res<[f64; 2]> {
            let s = build_state(&ProtocolSpec::single(n, c(0.0, a), b)?)?;
            let single = qfi_scalar(&s, &d_rho(&s, Param::Beta1)?)?;
            Ok([single, seq_qfi(n, a, b)?])
        })
        .collect::<Res<_>>()?;
    let mut t = Table::new(&["protocol", "N", "alpha", "qfi"]);
    for ((n, a), [single, seq]) in grid2(&cfg.n, &cfg.alpha).into_iter().zip(rows) {
        t.push(vec!["single".into(), n.into(), a.into(), single.into()]);
        t.push(vec!["sequential".into(), n.into(), a.into(), seq.into()]);
    }
    Ok(t)
}

fn scaling_map(cfg: &Resolved) -> Res<Table> {
    let b = beta(cfg);
    let rows: Vec<(f64, f64)> = grid2(&cfg.n, &cfg.alpha)
        .par_iter()
        .map(|&(n, a)| -> Res<(f64, f64)> {
            let f: Vec<(f64, f64)> =
                [n - 1, n, n + 1].iter().map(|&m| Ok((m as f64, seq_qfi(m, a, b)?))).collect::<Res<_>>()?;
            Ok((f[1].1, scaling_exponent(&f)?[0].1))
        })
        .collect::<Res<_>>()?;
    let mut t = Table::new(&["N", "alpha", "n_alpha_sq", "qfi", "p"]);
    for ((n, a), (f, p)) in grid2(&cfg.n, &cfg.alpha).into_iter().zip(rows) {
        t.push(vec![n.into(), a.into(), (n as f64 * a * a).into(), f.into(), p.into()]);
    }
    Ok(t)
}

fn two_param_compare(cfg: &Resolved) -> Res<Table> {
    let b = beta(cfg);
    let points = grid2(&cfg.n, &cfg.alpha);
    let rows: Vec<[[f64; 2]; 3]> = points
        .par_iter()
        .map(|&(n, a)| -> Res<[[f64; 2]; 3]> {
            let one = seq_qfi(n, a, b)?;
            let two_n = seq_qfi(2 * n, a, b)?;
            let s = build_state(&ProtocolSpec::seq_two(n, c(a, 0.0), b)?)?;
            let q = qfi_matrix(&s, &d_rho(&s, Param::Beta1)?, &d_rho(&s, Param::Beta2)?)?;
            Ok([[one, 0.0], [two_n, 0.0], [q.qfi[(0, 0)], q.qfi[(1, 1)]]])
        })
        .collect::<Res<_>>()?;
    let mut t = Table::new(&["protocol", "N", "alpha", "f11", "f22"]);
    for ((n, a), r) in points.into_iter().zip(rows) {
        for (name, [f11, f22]) in ["seq-one", "seq-one-2n", "seq-two"].iter().zip(r) {
            t.push(vec![(*name).into(), n.into(), a.into(), f11.into(), f22.into()]);
        }
    }
    Ok(t)
}

struct SaturationRow {
    n: usize,
    seq: [f64; 4],
    single: [f64; 3],
}

fn cfi_saturation(cfg: &Resolved) -> Res<Table> {
    let u = measurement_unitary();
    let n_max = *cfg.n.iter().max().expect("nonempty grid");
    let points = grid2(&cfg.beta1, &cfg.alpha);
    let blocks: Vec<Vec<SaturationRow>> = points
        .par_iter()
        .map(|&(b1, a)| -> Res<Vec<SaturationRow>> {
            let b = c(b1, 0.0);
            // prefixes of the longest run give every shorter run
            let series = crb_min_over_rounds(&ProtocolSpec::seq_one(n_max, c(0.0, a), b)?, None)?;
            let single_map = MeasurementMap::new(index_of(&ProtocolSpec::single(1, c(0.0, a), b)?), &u)?;
            cfg.n
                .par_iter()
                .map(|&n| -> Res<SaturationRow> {
                    let spec = ProtocolSpec::seq_one(n, c(0.0, a), b)?;
                    let s = build_state(&spec)?;
                    let qfi = qfi_scalar(&s, &d_rho(&s, Param::Beta1)?)?;
                    let map = MeasurementMap::new(index_of(&spec), &u)?;
                    let mean = outcome_distribution_with(&s, &map)?.mean_excitation;
                    let cfi = 1.0 / series.per_round[n - 1];
                    let best = 1.0 / series.running_min[n - 1];

                    let one = ProtocolSpec::single(n, c(0.0, a), b)?;
                    let s1 = build_state(&one)?;
                    let q1 = qfi_scalar(&s1, &d_rho(&s1, Param::Beta1)?)?;
                    let f1 = protocol_cfi(&one, &single_map, DerivativeMode::Analytic)?.cfi[(0, 0)];
                    let m1 = outcome_distribution_with(&s1, &single_map)?.mean_excitation;
                    Ok(SaturationRow { n, seq: [cfi, qfi, best, mean], single: [f1, q1, m1] })
                })
                .collect()
        })
        .collect::<Res<_>>()?;
    let mut t = Table::new(&["protocol", "alpha", "beta1", "N", "cfi", "qfi", "ratio", "cfi_best_prefix", "mean_k_over_n"]);
    for ((b1, a), rows) in points.into_iter().zip(blocks) {
        for r in rows {
            let [cfi, qfi, best, mean] = r.seq;
            t.push(vec![
                "sequential".into(),
                a.into(),
                b1.into(),
                r.n.into(),
                cfi.into(),
                qfi.into(),
                (cfi / qfi).into(),
                best.into(),
                mean.into(),
            ]);
            let [f1, q1, m1] = r.single;
            t.push(vec!["single".into(), a.into(), b1.into(), r.n.into(), f1.into(), q1.into(), (f1 / q1).into(), f1.into(), m1.into()]);
        }
    }
    Ok(t)
}

fn crb_map(cfg: &Resolved) -> Res<Table> {
    let phases: Vec<f64> = (0..cfg.phase_steps).map(|j| 2.0 * PI * j as f64 / cfg.phase_steps as f64).collect();
    let mut points = Vec::new();
    for &n in &cfg.n {
        for &a in &cfg.alpha {
            for &m in &cfg.beta_mag {
                for &ph in &phases {
                    points.push((n, a, m, ph));
                }
            }
        }
    }
    let rows: Vec<(f64, f64)> = points
        .par_iter()
        .map(|&(n, a, m, ph)| -> Res<(f64, f64)> {
            let b = Complex64::from_polar(m, ph);
            let seq = crb_min_over_rounds(&ProtocolSpec::seq_two(n, c(a, 0.0), b)?, None)?;
            let seq_min = *seq.running_min.last().expect("at least one round");
            Ok((seq_min, single_two_param_crb(n, a, b, None)?))
        })
        .collect::<Res<_>>()?;
    let mut t = Table::new(&["protocol", "N", "alpha", "beta_mag", "phase", "beta1", "beta2", "crb"]);
    for ((n, a, m, ph), (seq, single)) in points.into_iter().zip(rows) {
        let b = Complex64::from_polar(m, ph);
        for (name, crb) in [("sequential", seq), ("single", single)] {
            t.push(vec![name.into(), n.into(), a.into(), m.into(), ph.into(), b.re.into(), b.im.into(), crb.into()]);
        }
    }
    Ok(t)
}

fn noise_model(cfg: &Resolved) -> Res<Option<NoiseModel>> {
    cfg.noise
        .as_ref()
        .map(|n| NoiseModel::new(n.gamma, n.gamma_d, n.n_th, n.t_round, n.g).map_err(RunError::from))
        .transpose()
}

fn decoherence(cfg: &Resolved) -> Res<Table> {
    if cfg.n.len() != 1 || cfg.alpha.len() != 1 {
        return Err(RunError::Config("decoherence takes a single grid.n and a single |alpha|".into()));
    }
    let noise = noise_model(cfg)?.expect("resolved with a noise model");
    let spec = ProtocolSpec::seq_two(cfg.n[0], c(cfg.alpha[0], 0.0), beta(cfg))?;
    let curve = noisy_crb_curve(&spec, &noise, cfg.rounds_max.unwrap_or(usize::MAX))?;
    let mut t = Table::new(&["protocol", "round", "time", "crb", "crb_running_min"]);
    for (name, pts) in [("sequential", &curve.sequential), ("single", &curve.single)] {
        for p in pts {
            t.push(vec![name.into(), p.round.into(), p.time.into(), p.crb.into(), p.running_min.into()]);
        }
    }
    Ok(t)
}

fn validate() -> Report {
    let mut t = Table::new(&["check", "value", "tolerance", "passed"]);
    let mut failed = Vec::new();
    for r in run_suite() {
        if !r.passed {
            failed.push(r.name.to_string());
        }
        t.push(vec![r.name.into(), r.value.into(), r.tolerance.into(), r.passed.into()]);
    }
    Report { table: t, failed }
}

fn sample(cfg: &Resolved) -> Res<Table> {
    let n = cfg.n[0];
    let a = c(cfg.alpha[0], cfg.alpha[1]);
    let b = beta(cfg);
    let spec = match cfg.protocol {
        ProtocolName::Single => ProtocolSpec::single(n, a, b)?,
        ProtocolName::SeqOne => ProtocolSpec::seq_one(n, a, b)?,
        ProtocolName::SeqTwo => ProtocolSpec::seq_two(n, a, b)?,
    };
    let noise = noise_model(cfg)?;
    let records = sample_trajectories(&spec, noise.as_ref(), cfg.seed, cfg.count)?;
    let mut t = Table::new(&["trajectory", "record", "weight"]);
    for (i, r) in records.iter().enumerate() {
        t.push(vec![i.into(), r.to_string().into(), r.weight().into()]);
    }
    Ok(t)
}

pub fn run(cfg: &Resolved) -> Res<Report> {
    let table = match cfg.experiment {
        Experiment::QfiSweep => qfi_sweep(cfg)?,
        Experiment::ScalingMap => scaling_map(cfg)?,
        Experiment::TwoParamCompare => two_param_compare(cfg)?,
        Experiment::CfiSaturation => cfi_saturation(cfg)?,
        Experiment::CrbMap => crb_map(cfg)?,
        Experiment::Decoherence => decoherence(cfg)?,
        Experiment::Validate => return Ok(validate()),
        Experiment::Sample => sample(cfg)?,
    };
    check_invariants(cfg, &table)?;
    Ok(Report { table, failed: Vec::new() })
}

fn num(row: &[Cell], i: usize) -> f64 {
    match row[i] {
        Cell::Num(x) => x,
        Cell::Int(x) => x as f64,
        _ => f64::NAN,
    }
}

const RATIO_SLACK: f64 = 1e-9;
const CLOSED_FORM_REL: f64 = 1e-8;

/// Re-checks every row before it is written.
pub fn check_invariants(cfg: &Resolved, t: &Table) -> Res<()> {
    let fail = |i: usize, what: &str| Err(RunError::Invariant(format!("row {}: {what}", i + 1)));
    for (i, row) in t.rows.iter().enumerate() {
        for name in ["qfi", "cfi", "f11", "f22", "cfi_best_prefix"] {
            if let Some(j) = t.column(name) {
                let x = num(row, j);
                if !(x.is_finite() && x >= 0.0) {
                    return fail(i, &format!("{name} = {x} is not a finite non-negative number"));
                }
            }
        }
        for name in ["crb", "crb_running_min"] {
            if let Some(j) = t.column(name) {
                let x = num(row, j);
                if x.is_nan() || x <= 0.0 {
                    return fail(i, &format!("{name} = {x} is not positive"));
                }
            }
        }
        if let (Some(jc), Some(jq)) = (t.column("cfi"), t.column("qfi")) {
            if num(row, jc) > num(row, jq) * (1.0 + RATIO_SLACK) + 1e-12 {
                return fail(i, "CFI exceeds QFI");
            }
        }
        if let Some(j) = t.column("mean_k_over_n") {
            let m = num(row, j);
            if !(-1e-12..=1.0 + 1e-12).contains(&m) {
                return fail(i, &format!("mean excitation {m} outside [0, 1]"));
            }
        }
        if let Some(j) = t.column("p") {
            if !num(row, j).is_finite() {
                return fail(i, "scaling exponent is not finite");
            }
        }
        if cfg.experiment == Experiment::QfiSweep && row[0] == Cell::from("single") {
            let (n, a, f) = (num(row, 1) as usize, num(row, 2), num(row, 3));
            let want = single_qfi_closed_form(n, a);
            if (f - want).abs() > CLOSED_FORM_REL * want.max(f64::MIN_POSITIVE) && want > 0.0 {
                return fail(i, &format!("single-measurement QFI {f} differs from closed form {want}"));
            }
        }
    }
    if let (Some(jr), Some(jm)) = (t.column("round"), t.column("crb_running_min")) {
        for w in t.rows.windows(2) {
            if w[0][0] == w[1][0] && num(&w[1], jr) > num(&w[0], jr) && num(&w[1], jm) > num(&w[0], jm) {
                return Err(RunError::Invariant("running minimum increased".into()));
            }
        }
    }
    Ok(())
}
