//! Polarization-based realization with two tandem Michelson interferometers.
//!
//! A switchable polarization rotator turns the photon by `β` on each pass,
//! and the photon crosses it twice per round trip, so one cycle rotates by
//! `2β`. Polarizing beam splitters send the V component onward: from the
//! outer interferometer into the inner one, and from the inner one into the
//! channel toward Bob. Switchable mirrors hold the photon for `M` (outer)
//! and `N` (inner) cycles. Optical delays are taken as perfectly matched.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::outcome::{CompensatedSum, OutcomeDistribution};
use crate::params::{BobBit, ProtocolParams};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PolarizationAmplitude {
    pub h: f64,
    pub v: f64,
}

impl PolarizationAmplitude {
    pub const H: Self = Self { h: 1.0, v: 0.0 };

    pub fn norm_sqr(&self) -> f64 {
        self.h * self.h + self.v * self.v
    }
}

/// `|H> -> cosβ|H> + sinβ|V>`, `|V> -> cosβ|V> - sinβ|H>`.
pub fn spr_rotate(state: PolarizationAmplitude, beta: f64) -> PolarizationAmplitude {
    let (s, c) = beta.sin_cos();
    PolarizationAmplitude {
        h: c * state.h - s * state.v,
        v: s * state.h + c * state.v,
    }
}

/// Rotator angle per pass; two passes give the per-cycle rotation.
fn rotator_angle(cycles: usize, imperfection: f64) -> f64 {
    let beta = FRAC_PI_4 / cycles as f64;
    beta + imperfection * (beta / cycles as f64)
}

struct Ledger {
    d3: CompensatedSum,
    d4: CompensatedSum,
}

/// One visit of an amplitude to the inner interferometer. The photon enters
/// as H and leaves as H after SM2 opens; V left in the channel arm at that
/// point goes to D3.
fn inner_visit(amplitude: f64, beta: f64, cycles: usize, bit: BobBit, ledger: &mut Ledger) -> f64 {
    let mut state = PolarizationAmplitude {
        h: amplitude,
        v: 0.0,
    };
    for _ in 0..cycles {
        state = spr_rotate(spr_rotate(state, beta), beta);
        // PBS2 sends V to Bob. Turning his Pockels cell on flips it, and
        // PBS_B then routes it into D4.
        if bit == BobBit::Block {
            ledger.d4.add(state.v * state.v);
            state.v = 0.0;
        }
    }
    ledger.d3.add(state.v * state.v);
    state.h
}

pub fn run_michelson(params: &ProtocolParams, bit: BobBit) -> OutcomeDistribution {
    let outer_cycles = params.outer_cycles();
    let inner_cycles = params.inner_cycles();
    let beta_outer = rotator_angle(outer_cycles, params.outer_imperfection());
    let beta_inner = rotator_angle(inner_cycles, params.inner_imperfection());
    let mut ledger = Ledger {
        d3: CompensatedSum::new(),
        d4: CompensatedSum::new(),
    };

    // SM1 closes behind the H photon from the source.
    let mut outer = PolarizationAmplitude::H;
    for cycle in 1..=outer_cycles {
        // V from the previous cycle spends N cycles in the inner
        // interferometer before PBS1 recombines it.
        if cycle > 1 {
            outer.v = inner_visit(outer.v, beta_inner, inner_cycles, bit, &mut ledger);
        }
        outer = spr_rotate(spr_rotate(outer, beta_outer), beta_outer);
    }
    if params.final_inner_chain() {
        outer.v = inner_visit(outer.v, beta_inner, inner_cycles, bit, &mut ledger);
    }

    // SM1 opens; PBS0 sends H to D1 and V to D2.
    OutcomeDistribution {
        p_d1: outer.h * outer.h,
        p_d2: outer.v * outer.v,
        p_d3: ledger.d3.value(),
        p_bob: ledger.d4.value(),
        p_noise: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};

    #[test]
    fn spr_examples() {
        assert_eq!(
            spr_rotate(PolarizationAmplitude::H, 0.0),
            PolarizationAmplitude::H
        );

        let twice = spr_rotate(spr_rotate(PolarizationAmplitude::H, FRAC_PI_8), FRAC_PI_8);
        let once = spr_rotate(PolarizationAmplitude::H, FRAC_PI_4);
        assert!((twice.h - once.h).abs() < 1e-15 && (twice.v - once.v).abs() < 1e-15);

        let v = spr_rotate(PolarizationAmplitude { h: 0.0, v: 1.0 }, FRAC_PI_4);
        assert!((v.h + FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((v.v - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_block() {
        let p = ProtocolParams::new(2, 2).unwrap();
        let d = run_michelson(&p, BobBit::Block);
        assert!((d.p_d1 - 0.0625).abs() < 1e-12);
        assert!((d.p_d2 - 0.5625).abs() < 1e-12);
        assert!((d.p_bob - 0.375).abs() < 1e-12);
        assert_eq!(d.p_d3, 0.0);
    }

    #[test]
    fn published_block_point() {
        let p = ProtocolParams::new(25, 320).unwrap();
        let d = run_michelson(&p, BobBit::Block);
        assert!((d.p_d2 - 0.912).abs() < 0.002, "{}", d.p_d2);
    }
}
