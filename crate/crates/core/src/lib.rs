//! Simulator for direct counterfactual communication built on the chained
//! quantum Zeno effect.
//!
//! A photon cycles through `M` outer beam splitters; between consecutive
//! outer splitters its inner-arm component runs an inner chain of `N`
//! splitters whose far arm is the transmission channel to Bob. Bob either
//! leaves the channel open (bit 0, D1 clicks) or blocks it (bit 1, D2
//! clicks). [`engine`] evaluates the amplitude recursions, [`lattice`]
//! re-derives them by brute force, [`michelson`] does the same through the
//! polarization realization, and [`noise`], [`info`] and [`session`] layer
//! channel noise, information metrics and message transmission on top.

pub mod engine;
pub mod error;
pub mod info;
pub mod lattice;
pub mod michelson;
pub mod noise;
pub mod outcome;
pub mod params;
pub mod schedule;
pub mod session;

pub use engine::{
    inner_chain, p1_closed_form, rotate_pair, run_protocol, run_scheduled, simple_chain,
};
pub use error::{Error, Result};
pub use info::{
    build_statistics, error_rates, mutual_information, ClickStatistics, Detector, ErrorRates,
};
pub use lattice::{leak_trace, simulate_exact, ModeLattice};
pub use michelson::{run_michelson, spr_rotate, PolarizationAmplitude};
pub use noise::{monte_carlo, sample_schedule, MonteCarloResult, NoiseModel};
pub use outcome::OutcomeDistribution;
pub use params::{BobBit, ProtocolParams};
pub use schedule::{BlockingSchedule, ChannelState};
pub use session::{random_message, transmit, SessionConfig, SessionResult};
