//! Experiment configuration. TOML, strictly parsed; every key is optional and
//! falls back to the per-experiment default.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    QfiSweep,
    ScalingMap,
    TwoParamCompare,
    CfiSaturation,
    CrbMap,
    Decoherence,
    Validate,
    Sample,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolName {
    Single,
    SeqOne,
    SeqTwo,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub grid: GridSection,
    pub noise: Option<NoiseSection>,
    #[serde(default)]
    pub sample: SampleSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub full_scale: Option<bool>,
}

/// Parameter grids. `n` and `n_range` are alternatives, as are `alpha` and
/// the `alpha_min`/`alpha_max`/`alpha_steps` triple.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: Option<Vec<usize>>,
    pub n_range: Option<[usize; 2]>,
    pub alpha: Option<Vec<f64>>,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub alpha_steps: Option<usize>,
    pub alpha_log: Option<bool>,
    pub beta: Option<[f64; 2]>,
    pub beta1: Option<Vec<f64>>,
    pub beta_mag_min: Option<f64>,
    pub beta_mag_max: Option<f64>,
    pub beta_mag_steps: Option<usize>,
    pub phase_steps: Option<usize>,
    pub rounds_max: Option<usize>,
}

/// Either `tau_eff` (with `t_round`) or explicit rates.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub tau_eff: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma_d: Option<f64>,
    pub n_th: Option<f64>,
    pub t_round: Option<f64>,
    pub g: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSection {
    pub protocol: Option<ProtocolName>,
    pub n: Option<usize>,
    pub alpha: Option<[f64; 2]>,
    pub beta: Option<[f64; 2]>,
    pub count: Option<usize>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn parse(text: &str, origin: &str) -> Result<FileConfig, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError(format!("{origin}: {e}")))
}

pub fn load(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}

/// Fully resolved settings, embedded in the output metadata.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub experiment: Experiment,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub workers: usize,
    pub seed: u64,
    pub full_scale: bool,
    pub n: Vec<usize>,
    pub alpha: Vec<f64>,
    pub beta: [f64; 2],
    pub beta1: Vec<f64>,
    pub beta_mag: Vec<f64>,
    pub phase_steps: usize,
    pub rounds_max: Option<usize>,
    pub noise: Option<ResolvedNoise>,
    pub protocol: ProtocolName,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedNoise {
    pub gamma: f64,
    pub gamma_d: f64,
    pub n_th: f64,
    pub t_round: f64,
    pub g: f64,
}

/// Command-line and environment values that take precedence over the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub full_scale: bool,
}

/// Desk-scale rounds per quadrature for the two-parameter comparison.
pub const DESK_TWO_PARAM_N: usize = 24;
pub const FULL_TWO_PARAM_N: usize = 100;

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

fn logspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), steps).into_iter().map(f64::exp).collect()
}

fn bad(key: &str, why: &str) -> ConfigError {
    ConfigError(format!("{key}: {why}"))
}

struct Defaults {
    n: Vec<usize>,
    alpha: (f64, f64, usize, bool),
    beta: [f64; 2],
}

fn defaults(e: Experiment, full_scale: bool) -> Defaults {
    let sweep = (0.05, 1.0, 40, false);
    match e {
        Experiment::QfiSweep => Defaults { n: vec![410, 450, 500], alpha: sweep, beta: [0.0, 0.0] },
        Experiment::ScalingMap => Defaults { n: vec![50, 100, 200], alpha: (0.003, 2.0, 30, true), beta: [0.0, 0.0] },
        Experiment::TwoParamCompare => Defaults {
            n: vec![if full_scale { FULL_TWO_PARAM_N } else { DESK_TWO_PARAM_N }],
            alpha: (0.05, 1.0, 20, false),
            beta: [0.0, 0.0],
        },
        Experiment::CfiSaturation => Defaults { n: (1..=200).collect(), alpha: (0.2, 0.2, 1, false), beta: [0.0, 0.0] },
        Experiment::CrbMap => Defaults { n: vec![20], alpha: (0.2, 0.2, 1, false), beta: [0.0, 0.0] },
        Experiment::Decoherence => Defaults { n: vec![12], alpha: (0.4, 0.4, 1, false), beta: [0.3536, 0.3536] },
        Experiment::Validate => Defaults { n: vec![], alpha: (0.0, 0.0, 0, false), beta: [0.0, 0.0] },
        Experiment::Sample => Defaults { n: vec![6], alpha: (0.3, 0.3, 1, false), beta: [0.15, 0.05] },
    }
}

fn positive(key: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(bad(key, "must be positive and finite"))
    }
}

fn non_negative(key: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(bad(key, "must be non-negative and finite"))
    }
}

fn steps(key: &str, s: usize) -> Result<usize, ConfigError> {
    if s == 0 {
        Err(bad(key, "steps must be positive"))
    } else {
        Ok(s)
    }
}

fn resolve_noise(sec: &NoiseSection, beta_mag: f64) -> Result<ResolvedNoise, ConfigError> {
    let t_round = positive("noise.t_round", sec.t_round.unwrap_or(15.92e-6))?;
    let n_th = non_negative("noise.n_th", sec.n_th.unwrap_or(0.0))?;
    let g_default = std::f64::consts::SQRT_2 * beta_mag / t_round;
    let g = non_negative("noise.g", sec.g.unwrap_or(g_default))?;
    if beta_mag > 0.0 && ((g * t_round / std::f64::consts::SQRT_2 - beta_mag).abs() > 1e-6 * beta_mag) {
        return Err(bad("noise.g", "inconsistent with |beta| = g t_round / sqrt 2"));
    }
    let (gamma, gamma_d) = match (sec.tau_eff, sec.gamma) {
        (Some(_), Some(_)) => return Err(bad("noise.tau_eff", "give either tau_eff or gamma, not both")),
        (Some(tau), None) => {
            if sec.gamma_d.is_some() {
                return Err(bad("noise.gamma_d", "cannot be combined with tau_eff"));
            }
            (2.0 * non_negative("noise.tau_eff", tau)? / t_round, 0.0)
        }
        (None, gamma) => (
            non_negative("noise.gamma", gamma.unwrap_or(2.0 * 0.15 / t_round))?,
            non_negative("noise.gamma_d", sec.gamma_d.unwrap_or(0.0))?,
        ),
    };
    Ok(ResolvedNoise { gamma, gamma_d, n_th, t_round, g })
}

pub fn resolve(experiment: Experiment, file: FileConfig, ov: Overrides) -> Result<Resolved, ConfigError> {
    if let Some(e) = file.experiment {
        if e != experiment {
            return Err(bad("experiment", &format!("file is for `{e}`, command asked for `{experiment}`")));
        }
    }
    let full_scale = ov.full_scale || file.run.full_scale.unwrap_or(false);
    let d = defaults(experiment, full_scale);
    let g = &file.grid;

    let n = match (&g.n, g.n_range) {
        (Some(_), Some(_)) => return Err(bad("grid.n_range", "give either n or n_range")),
        (Some(v), None) => v.clone(),
        (None, Some([lo, hi])) => {
            if lo == 0 || hi < lo {
                return Err(bad("grid.n_range", "needs 1 <= lo <= hi"));
            }
            (lo..=hi).collect()
        }
        (None, None) => d.n.clone(),
    };
    if experiment != Experiment::Validate {
        if n.is_empty() {
            return Err(bad("grid.n", "grid is empty"));
        }
        if n.contains(&0) {
            return Err(bad("grid.n", "round counts must be positive"));
        }
    }
    if experiment == Experiment::ScalingMap && n.contains(&1) {
        return Err(bad("grid.n", "scaling exponents need N >= 2"));
    }

    let has_range = g.alpha_min.is_some() || g.alpha_max.is_some() || g.alpha_steps.is_some() || g.alpha_log.is_some();
    let alpha = match (&g.alpha, has_range) {
        (Some(_), true) => return Err(bad("grid.alpha", "give either alpha or alpha_min/alpha_max/alpha_steps")),
        (Some(v), false) => v.clone(),
        (None, _) => {
            let lo = g.alpha_min.unwrap_or(d.alpha.0);
            let hi = g.alpha_max.unwrap_or(d.alpha.1);
            let s = if experiment == Experiment::Validate { 0 } else { steps("grid.alpha_steps", g.alpha_steps.unwrap_or(d.alpha.2))? };
            if hi < lo {
                return Err(bad("grid.alpha_max", "below alpha_min"));
            }
            if g.alpha_log.unwrap_or(d.alpha.3) {
                positive("grid.alpha_min", lo)?;
                logspace(lo, hi, s)
            } else {
                linspace(lo, hi, s)
            }
        }
    };
    if experiment != Experiment::Validate && alpha.is_empty() {
        return Err(bad("grid.alpha", "grid is empty"));
    }
    for &a in &alpha {
        non_negative("grid.alpha", a)?;
    }

    let beta = g.beta.unwrap_or(d.beta);
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(bad("grid.beta", "must be finite"));
    }
    let beta1 = g.beta1.clone().unwrap_or_else(|| vec![0.05, 0.1]);
    if beta1.is_empty() {
        return Err(bad("grid.beta1", "grid is empty"));
    }
    let mag_lo = non_negative("grid.beta_mag_min", g.beta_mag_min.unwrap_or(0.05))?;
    let mag_hi = non_negative("grid.beta_mag_max", g.beta_mag_max.unwrap_or(1.0))?;
    if mag_hi < mag_lo {
        return Err(bad("grid.beta_mag_max", "below beta_mag_min"));
    }
    let beta_mag = linspace(mag_lo, mag_hi, steps("grid.beta_mag_steps", g.beta_mag_steps.unwrap_or(21))?);
    let phase_steps = steps("grid.phase_steps", g.phase_steps.unwrap_or(21))?;
    let rounds_max = g.rounds_max.map(|r| steps("grid.rounds_max", r)).transpose()?;

    let beta_mag_here = (beta[0] * beta[0] + beta[1] * beta[1]).sqrt();
    let noise = match (&file.noise, experiment) {
        (Some(sec), _) => Some(resolve_noise(sec, beta_mag_here)?),
        (None, Experiment::Decoherence) => Some(resolve_noise(&NoiseSection::default(), beta_mag_here)?),
        (None, _) => None,
    };

    let s = &file.sample;
    let protocol = s.protocol.unwrap_or(ProtocolName::SeqOne);
    let count = s.count.unwrap_or(1000);
    if count == 0 {
        return Err(bad("sample.count", "must be at least 1"));
    }
    let (n, alpha, beta) = if experiment == Experiment::Sample {
        let a = s.alpha.unwrap_or([0.0, 0.3]);
        let b = s.beta.unwrap_or(d.beta);
        if g.n.is_some() || g.alpha.is_some() || g.beta.is_some() {
            return Err(bad("grid", "the sample experiment reads sample.n, sample.alpha and sample.beta"));
        }
        let n = s.n.unwrap_or(6);
        if n == 0 {
            return Err(bad("sample.n", "must be positive"));
        }
        (vec![n], vec![a[0], a[1]], b)
    } else {
        if s.protocol.is_some() || s.n.is_some() || s.alpha.is_some() || s.beta.is_some() || s.count.is_some() {
            return Err(bad("sample", "only used by the sample experiment"));
        }
        (n, alpha, beta)
    };

    let env_out = std::env::var_os("SEQMEAS_OUT").map(PathBuf::from);
    let env_workers = match std::env::var("SEQMEAS_WORKERS") {
        Ok(v) => Some(v.parse::<usize>().map_err(|_| bad("SEQMEAS_WORKERS", "not a non-negative integer"))?),
        Err(_) => None,
    };
    let workers = ov.workers.or(env_workers).or(file.run.workers).unwrap_or(0);
    let out = ov.out.or(env_out).or(file.output.path);
    let format = ov.format.or(file.output.format).unwrap_or_else(|| match out.as_ref().and_then(|p| p.extension()) {
        Some(e) if e == "json" => Format::Json,
        _ => Format::Csv,
    });
    let seed = ov.seed.or(file.run.seed).unwrap_or(0);

    Ok(Resolved {
        experiment,
        format,
        out,
        workers,
        seed,
        full_scale,
        n,
        alpha,
        beta,
        beta1,
        beta_mag,
        phase_steps,
        rounds_max,
        noise,
        protocol,
        count,
    })
}
