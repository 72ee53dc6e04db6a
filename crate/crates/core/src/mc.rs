//! Seeded Monte Carlo runs of the full encode → decode protocol.
//!
//! Trial `t` draws from its own ChaCha stream (`seed = master_seed`,
//! `stream = t`), so a run is bit-identical for any number of threads. Trials
//! are processed in fixed-size blocks whose partial statistics are merged in
//! block order.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::protocol::{decode, encode, BlochAngles, QubitPair, Target};
use crate::state::{fidelity, make_qubit_state};

const BLOCK: u64 = 1 << 14;

/// Independent uniform variates for one trial.
pub struct TrialStream {
    rng: ChaCha8Rng,
}

impl TrialStream {
    pub fn new(master_seed: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(trial);
        Self { rng }
    }

    /// Uniform in `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

/// Inverse-CDF draw from the uniform distribution on the Bloch sphere:
/// `θ = arccos(1 − 2u₁)` has density `(1/2) sin θ`, `φ = 2π u₂`.
pub fn sample_bloch(u1: f64, u2: f64) -> BlochAngles {
    let theta = (1.0 - 2.0 * u1).clamp(-1.0, 1.0).acos();
    BlochAngles::new(theta, TAU * u2).expect("arccos lands in [0, pi]")
}

/// How each trial picks the qubit to decode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetPolicy {
    Always1,
    Always2,
    /// Qubit 1 on even trials, qubit 2 on odd ones.
    Alternate,
    Random,
}

impl TargetPolicy {
    fn choose(self, trial: u64, u: f64) -> Target {
        match self {
            TargetPolicy::Always1 => Target::First,
            TargetPolicy::Always2 => Target::Second,
            TargetPolicy::Alternate if trial.is_multiple_of(2) => Target::First,
            TargetPolicy::Alternate => Target::Second,
            TargetPolicy::Random if u < 0.5 => Target::First,
            TargetPolicy::Random => Target::Second,
        }
    }
}

impl std::str::FromStr for TargetPolicy {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "always-1" => Ok(Self::Always1),
            "always-2" => Ok(Self::Always2),
            "alternate" => Ok(Self::Alternate),
            "random" => Ok(Self::Random),
            other => Err(domain(format!("unknown target policy `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: u64,
    pub master_seed: u64,
    pub target_policy: TargetPolicy,
}

impl TrialConfig {
    pub fn new(trials: u64, master_seed: u64, target_policy: TargetPolicy) -> Result<Self> {
        if trials == 0 {
            return Err(domain("at least one trial is required"));
        }
        Ok(Self {
            trials,
            master_seed,
            target_policy,
        })
    }
}

/// What happened in one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub pair: QubitPair,
    pub outcome: usize,
    pub target: Target,
    pub success: bool,
    /// Fidelity of the reconstructed qubit with the original; `None` on failure.
    pub fidelity: Option<f64>,
    pub failure_level: Option<usize>,
}

/// Runs trial `trial` of the run seeded with `master_seed`.
pub fn run_trial(master_seed: u64, trial: u64, policy: TargetPolicy) -> Result<TrialRecord> {
    let mut stream = TrialStream::new(master_seed, trial);
    // Fixed draw order: q1, q2, encoding, target choice, decoding.
    let q1 = sample_bloch(stream.next_unit(), stream.next_unit());
    let q2 = sample_bloch(stream.next_unit(), stream.next_unit());
    let u_encode = stream.next_unit();
    let u_target = stream.next_unit();
    let u_decode = stream.next_unit();

    let pair = QubitPair::new(q1, q2);
    let record = encode(&pair, u_encode)?;
    let target = policy.choose(trial, u_target);
    let decoded = decode(&record.qutrit, record.outcome, target, u_decode)?;
    let fidelity = decoded
        .reconstructed
        .as_ref()
        .map(|state| fidelity(state, &make_qubit_state(pair.qubit(target))))
        .transpose()?;
    Ok(TrialRecord {
        pair,
        outcome: record.outcome.index(),
        target,
        success: decoded.success,
        fidelity,
        failure_level: decoded.failure_level,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: u64,
    pub outcome_counts: [u64; 4],
    pub success_count: u64,
    pub failure_count: u64,
    /// Smallest fidelity over successful trials; 1 when none succeeded.
    pub min_success_fidelity: f64,
    pub mean_success_rate: f64,
    /// Binomial standard error of `mean_success_rate`.
    pub standard_error: f64,
}

impl TrialStats {
    pub fn outcome_frequency(&self, outcome: usize) -> f64 {
        self.outcome_counts[outcome] as f64 / self.trials as f64
    }

    /// Binomial standard error of an outcome frequency with true probability `p`.
    pub fn outcome_standard_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    trials: u64,
    outcome_counts: [u64; 4],
    successes: u64,
    min_fidelity: Option<f64>,
}

impl Tally {
    fn add(&mut self, record: &TrialRecord) {
        self.trials += 1;
        self.outcome_counts[record.outcome] += 1;
        if record.success {
            self.successes += 1;
        }
        if let Some(f) = record.fidelity {
            self.min_fidelity = Some(self.min_fidelity.map_or(f, |m| m.min(f)));
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        for (a, b) in self.outcome_counts.iter_mut().zip(other.outcome_counts) {
            *a += b;
        }
        self.successes += other.successes;
        self.min_fidelity = match (self.min_fidelity, other.min_fidelity) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }

    fn into_stats(self) -> TrialStats {
        let n = self.trials as f64;
        let rate = self.successes as f64 / n;
        TrialStats {
            trials: self.trials,
            outcome_counts: self.outcome_counts,
            success_count: self.successes,
            failure_count: self.trials - self.successes,
            min_success_fidelity: self.min_fidelity.unwrap_or(1.0),
            mean_success_rate: rate,
            standard_error: (rate * (1.0 - rate) / n).sqrt(),
        }
    }
}

/// Runs every trial of `config` on the current rayon pool.
pub fn run_trials(config: &TrialConfig) -> Result<TrialStats> {
    let blocks = config.trials.div_ceil(BLOCK);
    let tallies = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let start = block * BLOCK;
            let end = (start + BLOCK).min(config.trials);
            let mut tally = Tally::default();
            for trial in start..end {
                tally.add(&run_trial(config.master_seed, trial, config.target_policy)?);
            }
            Ok(tally)
        })
        .collect::<Result<Vec<Tally>>>()?;
    Ok(tallies
        .into_iter()
        .fold(Tally::default(), Tally::merge)
        .into_stats())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn inverse_cdf_endpoints() {
        assert_eq!(sample_bloch(0.0, 0.0).theta(), 0.0);
        assert_abs_diff_eq!(sample_bloch(0.5, 0.0).theta(), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(sample_bloch(0.25, 0.5).phi(), PI, epsilon = 1e-15);
    }

    #[test]
    fn stratified_mean_cosine_vanishes() {
        let n = 1_000_000;
        let mean: f64 = (0..n)
            .map(|i| sample_bloch((i as f64 + 0.5) / n as f64, 0.0).theta().cos())
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 2e-3);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let draw = |seed, trial| {
            let mut s = TrialStream::new(seed, trial);
            (0..4).map(|_| s.next_unit()).collect::<Vec<_>>()
        };
        assert_eq!(draw(7, 3), draw(7, 3));
        assert_ne!(draw(7, 3), draw(7, 4));
        assert_ne!(draw(7, 3), draw(8, 3));
        assert!(draw(1, 1).iter().all(|u| (0.0..1.0).contains(u)));
    }

    #[test]
    fn policies() {
        assert_eq!(TargetPolicy::Alternate.choose(4, 0.9), Target::First);
        assert_eq!(TargetPolicy::Alternate.choose(5, 0.1), Target::Second);
        assert_eq!(TargetPolicy::Random.choose(0, 0.2), Target::First);
        assert_eq!(TargetPolicy::Random.choose(0, 0.7), Target::Second);
        assert_eq!(
            "always-2".parse::<TargetPolicy>().unwrap(),
            TargetPolicy::Always2
        );
        assert!("sometimes".parse::<TargetPolicy>().is_err());
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(TrialConfig::new(0, 1, TargetPolicy::Always1).is_err());
    }

    #[test]
    fn single_trial_is_deterministic() {
        let config = TrialConfig::new(1, 42, TargetPolicy::Random).unwrap();
        let a = run_trials(&config).unwrap();
        let b = run_trials(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials, 1);
        assert_eq!(a.outcome_counts.iter().sum::<u64>(), 1);
        assert_eq!(a.success_count + a.failure_count, 1);
        assert_eq!(
            run_trial(42, 0, TargetPolicy::Random).unwrap(),
            run_trial(42, 0, TargetPolicy::Random).unwrap()
        );
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let config = TrialConfig::new(40_000, 9, TargetPolicy::Random).unwrap();
        let reference = run_trials(&config).unwrap();
        for threads in [1, 2, 5] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            assert_eq!(pool.install(|| run_trials(&config)).unwrap(), reference);
        }
    }

    #[test]
    fn successful_trials_reconstruct_exactly() {
        for trial in 0..2000 {
            let r = run_trial(5, trial, TargetPolicy::Alternate).unwrap();
            assert_eq!(r.success, r.fidelity.is_some());
            assert_eq!(r.success, r.failure_level.is_none());
            if let Some(f) = r.fidelity {
                assert!(f >= 1.0 - 1e-12);
            }
        }
    }
}
