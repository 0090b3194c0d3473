//! Protocol parameters: cycle counts, rotation angles and rotator imperfections.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Bob's choice for one signal photon.
///
/// Logic 0 leaves the channel open, logic 1 blocks it for every inner pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "u8")]
pub enum BobBit {
    Pass,
    Block,
}

impl BobBit {
    pub const BOTH: [BobBit; 2] = [BobBit::Pass, BobBit::Block];

    pub fn as_u8(self) -> u8 {
        match self {
            BobBit::Pass => 0,
            BobBit::Block => 1,
        }
    }
}

impl TryFrom<u8> for BobBit {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            0 => Ok(BobBit::Pass),
            1 => Ok(BobBit::Block),
            other => Err(Error::InvalidBit(other)),
        }
    }
}

impl From<BobBit> for u8 {
    fn from(bit: BobBit) -> u8 {
        bit.as_u8()
    }
}

impl fmt::Display for BobBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Cycle counts and rotation settings for the chained interferometer.
///
/// The outer chain has `M` big cycles with nominal rotation `π/2M` per
/// cycle; each big cycle hosts `N` small cycles with nominal rotation
/// `π/2N`. A rotator imperfection factor `s` adds `s·θ/K` to every cycle of
/// the chain with `K` cycles, so a full chain over-rotates by `s·θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolParams {
    outer_cycles: usize,
    inner_cycles: usize,
    outer_imperfection: f64,
    inner_imperfection: f64,
    final_inner_chain: bool,
}

impl ProtocolParams {
    pub fn new(outer_cycles: usize, inner_cycles: usize) -> Result<Self> {
        if outer_cycles == 0 {
            return Err(Error::ZeroCycles { name: "M" });
        }
        if inner_cycles == 0 {
            return Err(Error::ZeroCycles { name: "N" });
        }
        Ok(Self {
            outer_cycles,
            inner_cycles,
            outer_imperfection: 0.0,
            inner_imperfection: 0.0,
            final_inner_chain: false,
        })
    }

    /// Sets `s_M = s_N = s`.
    pub fn with_imperfection(self, s: f64) -> Result<Self> {
        self.with_imperfections(s, s)
    }

    pub fn with_imperfections(mut self, outer: f64, inner: f64) -> Result<Self> {
        if !outer.is_finite() {
            return Err(Error::NonFinite {
                name: "s_M",
                value: outer,
            });
        }
        if !inner.is_finite() {
            return Err(Error::NonFinite {
                name: "s_N",
                value: inner,
            });
        }
        self.outer_imperfection = outer;
        self.inner_imperfection = inner;
        Ok(self)
    }

    /// Runs an inner chain after the last outer beam splitter as well, so
    /// D2 sees `y_{M,N}` instead of `y_{M,0}`.
    pub fn with_final_inner_chain(mut self, enabled: bool) -> Self {
        self.final_inner_chain = enabled;
        self
    }

    pub fn outer_cycles(&self) -> usize {
        self.outer_cycles
    }

    pub fn inner_cycles(&self) -> usize {
        self.inner_cycles
    }

    pub fn outer_imperfection(&self) -> f64 {
        self.outer_imperfection
    }

    pub fn inner_imperfection(&self) -> f64 {
        self.inner_imperfection
    }

    pub fn final_inner_chain(&self) -> bool {
        self.final_inner_chain
    }

    /// Number of inner chains a photon traverses: `M - 1`, or `M` with the
    /// final inner chain enabled.
    pub fn inner_chain_count(&self) -> usize {
        if self.final_inner_chain {
            self.outer_cycles
        } else {
            self.outer_cycles - 1
        }
    }

    pub fn nominal_outer_angle(&self) -> f64 {
        FRAC_PI_2 / self.outer_cycles as f64
    }

    pub fn nominal_inner_angle(&self) -> f64 {
        FRAC_PI_2 / self.inner_cycles as f64
    }

    /// Per-cycle outer rotation including the rotator error.
    pub fn outer_angle(&self) -> f64 {
        let theta = self.nominal_outer_angle();
        theta + self.outer_imperfection * (theta / self.outer_cycles as f64)
    }

    /// Per-cycle inner rotation including the rotator error.
    pub fn inner_angle(&self) -> f64 {
        let theta = self.nominal_inner_angle();
        theta + self.inner_imperfection * (theta / self.inner_cycles as f64)
    }
}
