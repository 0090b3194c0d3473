//! Per-pass channel states for every inner cycle of a signal photon.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{BobBit, ProtocolParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ChannelState {
    Transparent,
    BlockedByBob,
    BlockedByNoise,
}

impl ChannelState {
    pub fn is_blocked(self) -> bool {
        !matches!(self, ChannelState::Transparent)
    }

    /// The channel state Bob alone produces.
    pub fn for_bit(bit: BobBit) -> Self {
        match bit {
            BobBit::Pass => ChannelState::Transparent,
            BobBit::Block => ChannelState::BlockedByBob,
        }
    }
}

/// An `M x N` grid of channel states, row `m` (0-based) being the inner
/// chain that follows the `(m+1)`-th outer beam splitter.
///
/// Without the final inner chain the last row is never consulted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingSchedule {
    outer: usize,
    inner: usize,
    cells: Vec<ChannelState>,
}

impl BlockingSchedule {
    pub fn constant(outer: usize, inner: usize, state: ChannelState) -> Self {
        Self {
            outer,
            inner,
            cells: vec![state; outer * inner],
        }
    }

    pub fn for_bit(params: &ProtocolParams, bit: BobBit) -> Self {
        Self::constant(
            params.outer_cycles(),
            params.inner_cycles(),
            ChannelState::for_bit(bit),
        )
    }

    pub fn from_fn(
        outer: usize,
        inner: usize,
        mut f: impl FnMut(usize, usize) -> ChannelState,
    ) -> Self {
        let mut cells = Vec::with_capacity(outer * inner);
        for m in 0..outer {
            for n in 0..inner {
                cells.push(f(m, n));
            }
        }
        Self {
            outer,
            inner,
            cells,
        }
    }

    pub fn outer(&self) -> usize {
        self.outer
    }

    pub fn inner(&self) -> usize {
        self.inner
    }

    pub fn get(&self, m: usize, n: usize) -> ChannelState {
        assert!(
            m < self.outer && n < self.inner,
            "schedule index out of range"
        );
        self.cells[m * self.inner + n]
    }

    pub fn set(&mut self, m: usize, n: usize, state: ChannelState) {
        assert!(
            m < self.outer && n < self.inner,
            "schedule index out of range"
        );
        self.cells[m * self.inner + n] = state;
    }

    pub fn row(&self, m: usize) -> &[ChannelState] {
        &self.cells[m * self.inner..(m + 1) * self.inner]
    }

    pub fn count(&self, state: ChannelState) -> usize {
        self.cells.iter().filter(|&&c| c == state).count()
    }

    pub fn check(&self, params: &ProtocolParams) -> Result<()> {
        if self.outer != params.outer_cycles() || self.inner != params.inner_cycles() {
            return Err(Error::ScheduleShape {
                outer: params.outer_cycles(),
                inner: params.inner_cycles(),
                got_outer: self.outer,
                got_inner: self.inner,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_check() {
        let params = ProtocolParams::new(3, 4).unwrap();
        assert!(BlockingSchedule::for_bit(&params, BobBit::Pass)
            .check(&params)
            .is_ok());
        let wrong = BlockingSchedule::constant(4, 3, ChannelState::Transparent);
        assert!(matches!(
            wrong.check(&params),
            Err(Error::ScheduleShape { .. })
        ));
    }

    #[test]
    fn rows_are_row_major() {
        let s = BlockingSchedule::from_fn(2, 3, |m, n| {
            if m == 1 && n == 2 {
                ChannelState::BlockedByNoise
            } else {
                ChannelState::Transparent
            }
        });
        assert_eq!(s.row(1)[2], ChannelState::BlockedByNoise);
        assert_eq!(s.get(1, 2), ChannelState::BlockedByNoise);
        assert_eq!(s.count(ChannelState::BlockedByNoise), 1);
    }
}
