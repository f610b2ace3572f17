use crate::error::{Error, Result};
use crate::math::{ensure_finite, ComplexAmplitude};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    /// `N` signal rounds followed by one coupling kick and one measurement.
    SingleMeasurement,
    /// One kick and measurement per round, all along one quadrature.
    SeqOneParam,
    /// Kicks alternate between `α` and `iα` so both quadratures are probed.
    SeqTwoParam,
}

/// Quadrature of `β = β₁ + iβ₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Beta1,
    Beta2,
}

impl Param {
    pub const BOTH: [Param; 2] = [Param::Beta1, Param::Beta2];

    pub fn index(self) -> usize {
        match self {
            Param::Beta1 => 0,
            Param::Beta2 => 1,
        }
    }

    /// Unit step in the complex plane along this quadrature.
    pub fn direction(self) -> Complex64 {
        match self {
            Param::Beta1 => Complex64::new(1.0, 0.0),
            Param::Beta2 => Complex64::new(0.0, 1.0),
        }
    }
}

/// Protocol definition.
///
/// `n` is the number of rounds per quadrature. The schedule holds one kick per
/// round: length `n` for the one-parameter kinds and `2n` for `SeqTwoParam`.
/// A two-parameter prefix with an odd number of rounds is also accepted, in
/// which case `n` counts the real-quadrature rounds and the schedule has
/// length `2n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    pub n: usize,
    pub beta: ComplexAmplitude,
    pub schedule: Vec<ComplexAmplitude>,
}

const SCHEDULE_TOL: f64 = 1e-12;

impl ProtocolSpec {
    pub fn new(
        kind: ProtocolKind,
        n: usize,
        beta: ComplexAmplitude,
        schedule: Vec<ComplexAmplitude>,
    ) -> Result<Self> {
        let spec = ProtocolSpec { kind, n, beta, schedule };
        spec.validate()?;
        Ok(spec)
    }

    pub fn single(n: usize, alpha: ComplexAmplitude, beta: ComplexAmplitude) -> Result<Self> {
        Self::new(ProtocolKind::SingleMeasurement, n, beta, vec![alpha; n])
    }

    pub fn seq_one(n: usize, alpha: ComplexAmplitude, beta: ComplexAmplitude) -> Result<Self> {
        Self::new(ProtocolKind::SeqOneParam, n, beta, vec![alpha; n])
    }

    /// Alternating schedule `α₀, iα₀, α₀, iα₀, ...` with `2n` entries.
    pub fn seq_two(n: usize, alpha0: ComplexAmplitude, beta: ComplexAmplitude) -> Result<Self> {
        let i = Complex64::i();
        let schedule = (0..2 * n)
            .map(|j| if j % 2 == 0 { alpha0 } else { i * alpha0 })
            .collect();
        Self::new(ProtocolKind::SeqTwoParam, n, beta, schedule)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(self.beta, "beta")?;
        for a in &self.schedule {
            ensure_finite(*a, "schedule entry")?;
        }
        if self.n == 0 {
            return Err(Error::Domain("round count must be positive".into()));
        }
        let len = self.schedule.len();
        match self.kind {
            ProtocolKind::SingleMeasurement | ProtocolKind::SeqOneParam => {
                if len != self.n {
                    return Err(Error::Domain(format!(
                        "schedule has {len} entries, expected {}",
                        self.n
                    )));
                }
            }
            ProtocolKind::SeqTwoParam => {
                if len != 2 * self.n && len != 2 * self.n - 1 {
                    return Err(Error::Domain(format!(
                        "two-parameter schedule has {len} entries, expected {}",
                        2 * self.n
                    )));
                }
                let a0 = self.schedule[0];
                let scale = a0.norm().max(1.0);
                for (j, a) in self.schedule.iter().enumerate() {
                    let want = if j % 2 == 0 { a0 } else { Complex64::i() * a0 };
                    if (a - want).norm() > SCHEDULE_TOL * scale {
                        return Err(Error::Domain(format!(
                            "two-parameter schedule entry {j} is {a}, expected {want}"
                        )));
                    }
                }
            }
        }
        if self.kind == ProtocolKind::SingleMeasurement && !self.is_constant() {
            return Err(Error::Domain("single-measurement kick must be constant".into()));
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        let a0 = self.schedule[0];
        let scale = a0.norm().max(1.0);
        self.schedule.iter().all(|a| (a - a0).norm() <= SCHEDULE_TOL * scale)
    }

    /// Number of rounds in which the signal is accrued.
    pub fn total_rounds(&self) -> usize {
        match self.kind {
            ProtocolKind::SingleMeasurement | ProtocolKind::SeqOneParam => self.n,
            ProtocolKind::SeqTwoParam => self.schedule.len(),
        }
    }

    /// Kick applied at the end of each round, `None` where no kick happens.
    pub fn round_kicks(&self) -> Vec<Option<ComplexAmplitude>> {
        match self.kind {
            ProtocolKind::SingleMeasurement => {
                let mut v = vec![None; self.n];
                v[self.n - 1] = Some(self.schedule[0]);
                v
            }
            _ => self.schedule.iter().map(|&a| Some(a)).collect(),
        }
    }

    /// Real- and imaginary-kick round counts of a two-parameter schedule.
    pub fn quadrature_counts(&self) -> (usize, usize) {
        let len = self.schedule.len();
        (len.div_ceil(2), len / 2)
    }

    /// The first `rounds` rounds of this protocol as a protocol of its own.
    pub fn prefix(&self, rounds: usize) -> Result<Self> {
        if rounds == 0 || rounds > self.total_rounds() {
            return Err(Error::Domain(format!(
                "prefix length {rounds} outside 1..={}",
                self.total_rounds()
            )));
        }
        let n = match self.kind {
            ProtocolKind::SeqTwoParam => rounds.div_ceil(2),
            _ => rounds,
        };
        Self::new(self.kind, n, self.beta, self.schedule[..rounds].to_vec())
    }

    pub fn with_beta(&self, beta: ComplexAmplitude) -> Self {
        ProtocolSpec { beta, ..self.clone() }
    }

    /// The quadrature a one-parameter protocol is most sensitive to.
    ///
    /// The phase of a kick `α` picks the quadrature: imaginary `α` probes `β₁`
    /// and real `α` probes `β₂`.
    pub fn sensitive_param(&self) -> Param {
        let a = self.schedule[0];
        if a.im.abs() >= a.re.abs() {
            Param::Beta1
        } else {
            Param::Beta2
        }
    }
}
