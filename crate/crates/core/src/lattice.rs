//! Brute-force walk over the full beam-splitter lattice with one named sink
//! per absorber.
//!
//! This deliberately shares no arithmetic with [`crate::engine`]: angles
//! are rebuilt from `π`, every splitter is an explicit 2x2 matrix acting on
//! named modes, and every absorption event is recorded under its own
//! `(big cycle, inner cycle)` key. It is the reference the engine is
//! checked against.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Result;
use crate::outcome::OutcomeDistribution;
use crate::params::ProtocolParams;
use crate::schedule::{BlockingSchedule, ChannelState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    OuterArm,
    InnerArm,
    Channel,
}

impl Mode {
    fn index(self) -> usize {
        match self {
            Mode::OuterArm => 0,
            Mode::InnerArm => 1,
            Mode::Channel => 2,
        }
    }
}

/// Where absorbed probability ends up. Cycle indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sink {
    D3 {
        big_cycle: usize,
    },
    Bob {
        big_cycle: usize,
        inner_cycle: usize,
    },
    Noise {
        big_cycle: usize,
        inner_cycle: usize,
    },
}

/// One elementary lattice event, reported to observers after it happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    OuterSplitter {
        big_cycle: usize,
    },
    InnerSplitter {
        big_cycle: usize,
        inner_cycle: usize,
    },
    ChannelPass {
        big_cycle: usize,
        inner_cycle: usize,
        state: ChannelState,
    },
    CollectD3 {
        big_cycle: usize,
    },
    Terminal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeLattice {
    amplitudes: [f64; 3],
    sinks: BTreeMap<Sink, f64>,
    p_d1: f64,
    p_d2: f64,
}

impl Default for ModeLattice {
    fn default() -> Self {
        Self::new()
    }
}

impl ModeLattice {
    /// Photon entering the outer arm.
    pub fn new() -> Self {
        Self {
            amplitudes: [1.0, 0.0, 0.0],
            sinks: BTreeMap::new(),
            p_d1: 0.0,
            p_d2: 0.0,
        }
    }

    pub fn amplitude(&self, mode: Mode) -> f64 {
        self.amplitudes[mode.index()]
    }

    pub fn occupation(&self, mode: Mode) -> f64 {
        let a = self.amplitude(mode);
        a * a
    }

    pub fn sinks(&self) -> &BTreeMap<Sink, f64> {
        &self.sinks
    }

    /// `stay` keeps `cosθ` of its own amplitude; `cross` receives `sinθ`.
    pub fn beam_splitter(&mut self, stay: Mode, cross: Mode, theta: f64) {
        let matrix = [[theta.cos(), -theta.sin()], [theta.sin(), theta.cos()]];
        let input = [self.amplitude(stay), self.amplitude(cross)];
        let mut output = [0.0; 2];
        for (row, out) in matrix.iter().zip(output.iter_mut()) {
            *out = row[0] * input[0] + row[1] * input[1];
        }
        self.amplitudes[stay.index()] = output[0];
        self.amplitudes[cross.index()] = output[1];
    }

    pub fn absorb(&mut self, mode: Mode, sink: Sink) {
        let p = self.occupation(mode);
        *self.sinks.entry(sink).or_insert(0.0) += p;
        self.amplitudes[mode.index()] = 0.0;
    }

    /// Sends the outer arm to D1 and the inner arm to D2.
    pub fn detect(&mut self) {
        self.p_d1 += self.occupation(Mode::OuterArm);
        self.p_d2 += self.occupation(Mode::InnerArm);
        self.amplitudes[Mode::OuterArm.index()] = 0.0;
        self.amplitudes[Mode::InnerArm.index()] = 0.0;
    }

    /// Active norm plus every sink and terminal.
    pub fn total_probability(&self) -> f64 {
        let active: f64 = self.amplitudes.iter().map(|a| a * a).sum();
        let absorbed: f64 = self.sinks.values().sum();
        active + absorbed + self.p_d1 + self.p_d2
    }

    pub fn outcome(&self) -> OutcomeDistribution {
        let mut out = OutcomeDistribution {
            p_d1: self.p_d1,
            p_d2: self.p_d2,
            ..Default::default()
        };
        for (sink, p) in &self.sinks {
            match sink {
                Sink::D3 { .. } => out.p_d3 += p,
                Sink::Bob { .. } => out.p_bob += p,
                Sink::Noise { .. } => out.p_noise += p,
            }
        }
        out
    }
}

fn chain_angle(cycles: usize, imperfection: f64) -> f64 {
    let k = cycles as f64;
    let nominal = PI / (2.0 * k);
    nominal + imperfection * nominal / k
}

/// Walks every splitter and absorber in order, handing each event to
/// `observe` after it has been applied.
pub fn simulate_observed(
    params: &ProtocolParams,
    schedule: &BlockingSchedule,
    mut observe: impl FnMut(Step, &ModeLattice),
) -> Result<ModeLattice> {
    schedule.check(params)?;
    let big = params.outer_cycles();
    let small = params.inner_cycles();
    let outer_theta = chain_angle(big, params.outer_imperfection());
    let inner_theta = chain_angle(small, params.inner_imperfection());

    let mut lattice = ModeLattice::new();
    for m in 1..=big {
        lattice.beam_splitter(Mode::OuterArm, Mode::InnerArm, outer_theta);
        observe(Step::OuterSplitter { big_cycle: m }, &lattice);

        let runs_inner = m < big || params.final_inner_chain();
        if !runs_inner {
            continue;
        }
        for n in 1..=small {
            lattice.beam_splitter(Mode::InnerArm, Mode::Channel, inner_theta);
            observe(
                Step::InnerSplitter {
                    big_cycle: m,
                    inner_cycle: n,
                },
                &lattice,
            );

            let state = schedule.get(m - 1, n - 1);
            match state {
                ChannelState::Transparent => {}
                ChannelState::BlockedByBob => lattice.absorb(
                    Mode::Channel,
                    Sink::Bob {
                        big_cycle: m,
                        inner_cycle: n,
                    },
                ),
                ChannelState::BlockedByNoise => lattice.absorb(
                    Mode::Channel,
                    Sink::Noise {
                        big_cycle: m,
                        inner_cycle: n,
                    },
                ),
            }
            observe(
                Step::ChannelPass {
                    big_cycle: m,
                    inner_cycle: n,
                    state,
                },
                &lattice,
            );
        }
        lattice.absorb(Mode::Channel, Sink::D3 { big_cycle: m });
        observe(Step::CollectD3 { big_cycle: m }, &lattice);
    }
    lattice.detect();
    observe(Step::Terminal, &lattice);
    Ok(lattice)
}

pub fn simulate_exact(
    params: &ProtocolParams,
    schedule: &BlockingSchedule,
) -> Result<OutcomeDistribution> {
    Ok(simulate_observed(params, schedule, |_, _| {})?.outcome())
}

/// Channel occupation right after the channel element of one inner pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelOccupation {
    pub big_cycle: usize,
    pub inner_cycle: usize,
    pub probability: f64,
}

/// `z²` after every inner pass, in lattice order.
pub fn leak_trace(
    params: &ProtocolParams,
    schedule: &BlockingSchedule,
) -> Result<Vec<ChannelOccupation>> {
    let mut trace = Vec::new();
    simulate_observed(params, schedule, |step, lattice| {
        if let Step::ChannelPass {
            big_cycle,
            inner_cycle,
            ..
        } = step
        {
            trace.push(ChannelOccupation {
                big_cycle,
                inner_cycle,
                probability: lattice.occupation(Mode::Channel),
            });
        }
    })?;
    Ok(trace)
}
