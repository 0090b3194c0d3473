//! Click statistics, wrong-click mutual information and error rates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::outcome::{compensated_sum, OutcomeDistribution};
use crate::params::BobBit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Detector {
    D1,
    D2,
    D3,
    /// Bob's absorber, D4, or a foreign obstruction in the channel.
    BobSide,
    /// D1/D2 mass lost to detector sensitivity.
    Inconclusive,
}

impl Detector {
    pub const ALL: [Detector; 5] = [
        Detector::D1,
        Detector::D2,
        Detector::D3,
        Detector::BobSide,
        Detector::Inconclusive,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Detector::D1 => "D1",
            Detector::D2 => "D2",
            Detector::D3 => "D3",
            Detector::BobSide => "Bob-side",
            Detector::Inconclusive => "inconclusive",
        }
    }
}

/// Joint probabilities `P(bit sent, detector)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClickStatistics {
    joint: [[f64; 5]; 2],
}

fn bit_index(bit: BobBit) -> usize {
    bit.as_u8() as usize
}

impl ClickStatistics {
    pub fn from_joint(joint: [[f64; 5]; 2]) -> Result<Self> {
        if joint.iter().flatten().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::InvalidStatistics("negative or NaN entry".into()));
        }
        let total = compensated_sum(joint.iter().flatten().copied());
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidStatistics(format!(
                "total probability {total}"
            )));
        }
        Ok(Self { joint })
    }

    /// Normalized counts of `(bit, detector)` events.
    pub fn from_counts(counts: [[u64; 5]; 2]) -> Result<Self> {
        let total: u64 = counts.iter().flatten().sum();
        if total == 0 {
            return Err(Error::InvalidStatistics("no events".into()));
        }
        let mut joint = [[0.0; 5]; 2];
        for (row, counts_row) in joint.iter_mut().zip(counts) {
            for (p, c) in row.iter_mut().zip(counts_row) {
                *p = c as f64 / total as f64;
            }
        }
        Self::from_joint(joint)
    }

    pub fn joint(&self, bit: BobBit, detector: Detector) -> f64 {
        self.joint[bit_index(bit)][detector.index()]
    }

    pub fn bit_marginal(&self, bit: BobBit) -> f64 {
        compensated_sum(self.joint[bit_index(bit)])
    }

    pub fn detector_marginal(&self, detector: Detector) -> f64 {
        self.joint[0][detector.index()] + self.joint[1][detector.index()]
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.joint.iter().flatten().copied())
    }

    /// Probability that `detector` (D1 or D2) clicks for the wrong bit.
    pub fn wrong_click(&self, detector: Detector) -> f64 {
        match detector {
            Detector::D1 => self.joint(BobBit::Block, Detector::D1),
            Detector::D2 => self.joint(BobBit::Pass, Detector::D2),
            _ => 0.0,
        }
    }

    pub fn correct_click(&self, detector: Detector) -> f64 {
        match detector {
            Detector::D1 => self.joint(BobBit::Pass, Detector::D1),
            Detector::D2 => self.joint(BobBit::Block, Detector::D2),
            _ => 0.0,
        }
    }
}

fn thin(dist: &OutcomeDistribution, eta: f64) -> [f64; 5] {
    let d1 = dist.p_d1 * eta;
    let d2 = dist.p_d2 * eta;
    let lost = (dist.p_d1 - d1) + (dist.p_d2 - d2);
    [
        0.5 * d1,
        0.5 * d2,
        0.5 * dist.p_d3,
        0.5 * (dist.p_bob + dist.p_noise),
        0.5 * lost,
    ]
}

/// Equal-prior joint table with D1/D2 clicks thinned by sensitivity `eta`.
pub fn build_statistics(
    pass: &OutcomeDistribution,
    block: &OutcomeDistribution,
    eta: f64,
) -> Result<ClickStatistics> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::ProbabilityOutOfRange {
            name: "eta",
            value: eta,
        });
    }
    ClickStatistics::from_joint([thin(pass, eta), thin(block, eta)])
}

/// `I = -Σ_{i=1,2} P(y=D_i) log₂ P(x=D_i)`, where `y = D_i` is a wrong click
/// at `D_i` and `x = D_i` is any click there.
pub fn mutual_information(stats: &ClickStatistics) -> Result<f64> {
    let mut info = 0.0;
    for detector in [Detector::D1, Detector::D2] {
        let wrong = stats.wrong_click(detector);
        if wrong == 0.0 {
            continue;
        }
        let marginal = stats.detector_marginal(detector);
        if marginal <= 0.0 {
            return Err(Error::MutualInformationDomain {
                detector: detector.name(),
                wrong,
            });
        }
        info -= wrong * marginal.log2();
    }
    Ok(info)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRates {
    pub wrong_click_rate: f64,
    pub inconclusive_rate: f64,
    /// `None` when D1 and D2 never click.
    pub conclusive_accuracy: Option<f64>,
}

pub fn error_rates(stats: &ClickStatistics) -> ErrorRates {
    let wrong = stats.wrong_click(Detector::D1) + stats.wrong_click(Detector::D2);
    let correct = stats.correct_click(Detector::D1) + stats.correct_click(Detector::D2);
    let conclusive = wrong + correct;
    ErrorRates {
        wrong_click_rate: wrong,
        inconclusive_rate: stats.detector_marginal(Detector::Inconclusive),
        conclusive_accuracy: (conclusive > 0.0).then(|| correct / conclusive),
    }
}
