//! End-to-end message transmission with retransmission on inconclusive
//! attempts.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{run_protocol, run_scheduled};
use crate::error::{Error, Result};
use crate::info::{mutual_information, ClickStatistics, Detector};
use crate::noise::{sample_schedule, stream_rng};
use crate::outcome::OutcomeDistribution;
use crate::params::{BobBit, ProtocolParams};

pub const DEFAULT_MAX_RETRIES: u32 = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionConfig {
    bits: Vec<BobBit>,
    params: ProtocolParams,
    noise_rate: f64,
    eta: f64,
    max_retries: u32,
    seed: u64,
}

impl SessionConfig {
    pub fn new(bits: Vec<BobBit>, params: ProtocolParams, seed: u64) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyMessage);
        }
        Ok(Self {
            bits,
            params,
            noise_rate: 0.0,
            eta: 1.0,
            max_retries: DEFAULT_MAX_RETRIES,
            seed,
        })
    }

    pub fn with_noise_rate(mut self, rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::ProbabilityOutOfRange {
                name: "B",
                value: rate,
            });
        }
        self.noise_rate = rate;
        Ok(self)
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::ProbabilityOutOfRange {
                name: "eta",
                value: eta,
            });
        }
        self.eta = eta;
        Ok(self)
    }

    pub fn with_max_retries(mut self, max_retries: u32) -> Self {
        self.max_retries = max_retries;
        self
    }

    pub fn bits(&self) -> &[BobBit] {
        &self.bits
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }
}

/// Per-attempt outcome as Alice experiences it.
fn draw_outcome<R: Rng + ?Sized>(dist: &OutcomeDistribution, eta: f64, rng: &mut R) -> Detector {
    let u: f64 = rng.random();
    let categories = [
        (dist.p_d1, Detector::D1),
        (dist.p_d2, Detector::D2),
        (dist.p_d3, Detector::D3),
        (dist.p_bob + dist.p_noise, Detector::BobSide),
    ];
    let mut cumulative = 0.0;
    // rounding can leave u just above the last edge; the last non-empty
    // category absorbs it
    let mut picked = Detector::BobSide;
    for (p, detector) in categories {
        if p <= 0.0 {
            continue;
        }
        picked = detector;
        cumulative += p;
        if u < cumulative {
            break;
        }
    }
    match picked {
        Detector::D1 | Detector::D2 => {
            let clicked: f64 = rng.random();
            if clicked < eta {
                picked
            } else {
                Detector::Inconclusive
            }
        }
        other => other,
    }
}

#[derive(Debug, Clone)]
struct BitRecord {
    decoded: Option<BobBit>,
    attempts: u32,
    counts: [u64; 5],
}

fn send_bit(
    config: &SessionConfig,
    index: usize,
    bit: BobBit,
    noiseless: &[OutcomeDistribution; 2],
) -> Result<BitRecord> {
    let mut rng = stream_rng(config.seed, index as u64);
    let mut counts = [0u64; 5];
    for attempt in 1..=config.max_retries + 1 {
        let dist = if config.noise_rate > 0.0 {
            let schedule = sample_schedule(&config.params, bit, config.noise_rate, &mut rng);
            run_scheduled(&config.params, &schedule)?
        } else {
            noiseless[bit.as_u8() as usize]
        };
        let outcome = draw_outcome(&dist, config.eta, &mut rng);
        counts[outcome as usize] += 1;
        let decoded = match outcome {
            Detector::D1 => Some(BobBit::Pass),
            Detector::D2 => Some(BobBit::Block),
            _ => None,
        };
        if decoded.is_some() {
            return Ok(BitRecord {
                decoded,
                attempts: attempt,
                counts,
            });
        }
    }
    Ok(BitRecord {
        decoded: None,
        attempts: config.max_retries + 1,
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionResult {
    /// `None` marks an erased bit.
    pub decoded: Vec<Option<u8>>,
    pub attempts: Vec<u32>,
    /// Errors over non-erased bits; 0 when every bit is erased.
    pub ber: f64,
    pub erasure_rate: f64,
    /// Conclusive bits per photon sent.
    pub throughput: f64,
    /// Wrong-click information over all attempts, in bits.
    pub mutual_information: f64,
}

/// Uniformly random message drawn from a stream reserved for message
/// generation, so it never overlaps the per-bit transmission streams.
pub fn random_message(len: usize, seed: u64) -> Vec<BobBit> {
    let mut rng = stream_rng(seed, u64::MAX);
    (0..len)
        .map(|_| {
            if rng.random::<bool>() {
                BobBit::Block
            } else {
                BobBit::Pass
            }
        })
        .collect()
}

/// Sends every bit, each on its own random stream derived from the seed.
pub fn transmit(config: &SessionConfig) -> Result<SessionResult> {
    let noiseless = [
        run_protocol(&config.params, BobBit::Pass),
        run_protocol(&config.params, BobBit::Block),
    ];
    let records = config
        .bits
        .par_iter()
        .enumerate()
        .map(|(i, &bit)| send_bit(config, i, bit, &noiseless))
        .collect::<Result<Vec<_>>>()?;

    let mut counts = [[0u64; 5]; 2];
    let mut errors = 0usize;
    let mut conclusive = 0usize;
    let mut photons = 0u64;
    for (record, &bit) in records.iter().zip(&config.bits) {
        for (total, c) in counts[bit.as_u8() as usize].iter_mut().zip(record.counts) {
            *total += c;
        }
        photons += u64::from(record.attempts);
        if let Some(decoded) = record.decoded {
            conclusive += 1;
            if decoded != bit {
                errors += 1;
            }
        }
    }

    let n = config.bits.len();
    let stats = ClickStatistics::from_counts(counts)?;
    Ok(SessionResult {
        decoded: records
            .iter()
            .map(|r| r.decoded.map(BobBit::as_u8))
            .collect(),
        attempts: records.iter().map(|r| r.attempts).collect(),
        ber: if conclusive > 0 {
            errors as f64 / conclusive as f64
        } else {
            0.0
        },
        erasure_rate: (n - conclusive) as f64 / n as f64,
        throughput: conclusive as f64 / photons as f64,
        mutual_information: mutual_information(&stats)?,
    })
}
