//! Seeded Monte Carlo over random channel obstructions.
//!
//! Each trial draws one uniform number per inner channel pass (`M x N`
//! draws, row-major); a draw below the noise rate blocks that pass. Trial
//! `k` uses its own ChaCha8 stream derived from `(seed, k)`, so results do
//! not depend on how trials are scheduled across threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::run_scheduled;
use crate::error::{Error, Result};
use crate::outcome::{CompensatedSum, OutcomeDistribution};
use crate::params::{BobBit, ProtocolParams};
use crate::schedule::{BlockingSchedule, ChannelState};

pub const DEFAULT_TRIALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    rate: f64,
    seed: u64,
    trials: usize,
}

impl NoiseModel {
    pub fn new(rate: f64, seed: u64, trials: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::ProbabilityOutOfRange {
                name: "B",
                value: rate,
            });
        }
        if trials == 0 {
            return Err(Error::ZeroTrials);
        }
        Ok(Self { rate, seed, trials })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trials(&self) -> usize {
        self.trials
    }
}

/// Independent random stream for trial (or bit) `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws one schedule. Noise overrides Bob: a pass blocked by an
/// obstruction is recorded as noise even when Bob also blocks.
pub fn sample_schedule<R: Rng + ?Sized>(
    params: &ProtocolParams,
    bit: BobBit,
    rate: f64,
    rng: &mut R,
) -> BlockingSchedule {
    let bob = ChannelState::for_bit(bit);
    BlockingSchedule::from_fn(params.outer_cycles(), params.inner_cycles(), |_, _| {
        let draw: f64 = rng.random();
        if draw < rate {
            ChannelState::BlockedByNoise
        } else {
            bob
        }
    })
}

/// Per-field standard error of the Monte Carlo mean.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct OutcomeStdError {
    pub p_d1: f64,
    pub p_d2: f64,
    pub p_d3: f64,
    pub p_bob: f64,
    pub p_noise: f64,
}

impl OutcomeStdError {
    pub fn to_array(&self) -> [f64; 5] {
        [self.p_d1, self.p_d2, self.p_d3, self.p_bob, self.p_noise]
    }

    fn from_array([p_d1, p_d2, p_d3, p_bob, p_noise]: [f64; 5]) -> Self {
        Self {
            p_d1,
            p_d2,
            p_d3,
            p_bob,
            p_noise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub mean: OutcomeDistribution,
    pub std_error: OutcomeStdError,
    pub trials: usize,
    pub seed: u64,
}

/// Shifted-data mean and standard error. Identical samples give their
/// common value and a zero error exactly.
fn summarize(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let shift = samples[0];
    let mut sum = CompensatedSum::new();
    let mut sum_sq = CompensatedSum::new();
    for &s in samples {
        let d = s - shift;
        sum.add(d);
        sum_sq.add(d * d);
    }
    let mean = shift + sum.value() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let variance = (sum_sq.value() - sum.value() * sum.value() / n) / (n - 1.0);
    (mean, (variance.max(0.0) / n).sqrt())
}

pub fn monte_carlo(
    params: &ProtocolParams,
    bit: BobBit,
    model: &NoiseModel,
) -> Result<MonteCarloResult> {
    let outcomes = (0..model.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(model.seed, trial as u64);
            let schedule = sample_schedule(params, bit, model.rate, &mut rng);
            run_scheduled(params, &schedule)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut means = [0.0; 5];
    let mut errors = [0.0; 5];
    let mut column = Vec::with_capacity(outcomes.len());
    for field in 0..5 {
        column.clear();
        column.extend(outcomes.iter().map(|d| d.to_array()[field]));
        (means[field], errors[field]) = summarize(&column);
    }
    Ok(MonteCarloResult {
        mean: OutcomeDistribution::from_array(means),
        std_error: OutcomeStdError::from_array(errors),
        trials: model.trials,
        seed: model.seed,
    })
}
