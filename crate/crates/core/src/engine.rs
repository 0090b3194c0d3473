//! Amplitude recursions for the single Zeno chain and the chained protocol.
//!
//! All amplitudes are real. A beam splitter with angle `θ` (reflectivity
//! `cos²θ`) maps `(a, b)` to `(a cosθ - b sinθ, a sinθ + b cosθ)`, where `a`
//! is the arm that stays on Alice's side.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::outcome::{CompensatedSum, OutcomeDistribution};
use crate::params::{BobBit, ProtocolParams};
use crate::schedule::{BlockingSchedule, ChannelState};

#[derive(Debug, Clone, Copy)]
struct Rotation {
    cos: f64,
    sin: f64,
}

impl Rotation {
    fn new(theta: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        Self { cos, sin }
    }

    #[inline]
    fn apply(self, a: f64, b: f64) -> (f64, f64) {
        (a * self.cos - b * self.sin, a * self.sin + b * self.cos)
    }
}

pub fn rotate_pair(a: f64, b: f64, theta: f64) -> (f64, f64) {
    Rotation::new(theta).apply(a, b)
}

/// Photon amplitudes on the outer arm (`x`), the inner-chain left arm (`y`)
/// and the transmission channel (`z`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TripartiteAmplitude {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TripartiteAmplitude {
    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }
}

/// Single chain of `n` beam splitters with `θ = π/2N`.
///
/// When blocked, the channel arm is absorbed after every splitter,
/// including the last, so D2 never fires.
pub fn simple_chain(n: usize, blocked: bool) -> Result<OutcomeDistribution> {
    if n == 0 {
        return Err(Error::ZeroCycles { name: "N" });
    }
    let rot = Rotation::new(FRAC_PI_2 / n as f64);
    let (mut upper, mut lower) = (1.0, 0.0);
    let mut absorbed = CompensatedSum::new();
    for _ in 0..n {
        (upper, lower) = rot.apply(upper, lower);
        if blocked {
            absorbed.add(lower * lower);
            lower = 0.0;
        }
    }
    Ok(OutcomeDistribution {
        p_d1: upper * upper,
        p_d2: lower * lower,
        p_bob: absorbed.value(),
        ..Default::default()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InnerChainOutput {
    pub y: f64,
    pub z: f64,
    pub absorbed_bob: f64,
    pub absorbed_noise: f64,
}

fn run_inner(rot: Rotation, y_in: f64, passes: &[ChannelState]) -> InnerChainOutput {
    let (mut y, mut z) = (y_in, 0.0);
    let mut bob = CompensatedSum::new();
    let mut noise = CompensatedSum::new();
    for &pass in passes {
        let (next_y, channel) = rot.apply(y, z);
        y = next_y;
        match pass {
            ChannelState::Transparent => z = channel,
            ChannelState::BlockedByBob => {
                bob.add(channel * channel);
                z = 0.0;
            }
            ChannelState::BlockedByNoise => {
                noise.add(channel * channel);
                z = 0.0;
            }
        }
    }
    InnerChainOutput {
        y,
        z,
        absorbed_bob: bob.value(),
        absorbed_noise: noise.value(),
    }
}

/// Runs one inner chain of `N` small cycles starting from `y_in` on the
/// left arm and an empty channel.
pub fn inner_chain(
    y_in: f64,
    params: &ProtocolParams,
    passes: &[ChannelState],
) -> Result<InnerChainOutput> {
    if passes.len() != params.inner_cycles() {
        return Err(Error::PassCount {
            expected: params.inner_cycles(),
            got: passes.len(),
        });
    }
    Ok(run_inner(Rotation::new(params.inner_angle()), y_in, passes))
}

fn run_rows<'a>(
    params: &ProtocolParams,
    row: impl Fn(usize) -> &'a [ChannelState],
) -> OutcomeDistribution {
    let outer = Rotation::new(params.outer_angle());
    let inner = Rotation::new(params.inner_angle());
    let mut d3 = CompensatedSum::new();
    let mut bob = CompensatedSum::new();
    let mut noise = CompensatedSum::new();

    let mut chain = |y: f64, m: usize| {
        let out = run_inner(inner, y, row(m));
        d3.add(out.z * out.z);
        bob.add(out.absorbed_bob);
        noise.add(out.absorbed_noise);
        out.y
    };

    // x_1 = a_M, y_{1,0} = b_M
    let (mut x, mut y) = outer.apply(1.0, 0.0);
    for m in 1..params.outer_cycles() {
        let y_end = chain(y, m - 1);
        (x, y) = outer.apply(x, y_end);
    }
    if params.final_inner_chain() {
        y = chain(y, params.outer_cycles() - 1);
    }

    OutcomeDistribution {
        p_d1: x * x,
        p_d2: y * y,
        p_d3: d3.value(),
        p_bob: bob.value(),
        p_noise: noise.value(),
    }
}

/// Exact terminal distribution when Bob holds `bit` for every inner pass
/// and nothing else touches the channel.
pub fn run_protocol(params: &ProtocolParams, bit: BobBit) -> OutcomeDistribution {
    let passes = vec![ChannelState::for_bit(bit); params.inner_cycles()];
    run_rows(params, |_| &passes)
}

/// Exact terminal distribution for an arbitrary per-pass schedule.
pub fn run_scheduled(
    params: &ProtocolParams,
    schedule: &BlockingSchedule,
) -> Result<OutcomeDistribution> {
    schedule.check(params)?;
    Ok(run_rows(params, |m| schedule.row(m)))
}

/// `cos^{2M}(π/2M)`, the D1 probability when Bob passes.
pub fn p1_closed_form(outer_cycles: usize) -> Result<f64> {
    if outer_cycles == 0 {
        return Err(Error::ZeroCycles { name: "M" });
    }
    let reflect = (FRAC_PI_2 / outer_cycles as f64).cos();
    Ok(reflect.powi(2 * outer_cycles as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    const TIGHT: f64 = 1e-12;

    fn params(m: usize, n: usize) -> ProtocolParams {
        ProtocolParams::new(m, n).unwrap()
    }

    #[test]
    fn rotate_pair_examples() {
        assert_eq!(rotate_pair(1.0, 0.0, 0.0), (1.0, 0.0));
        let (a, b) = rotate_pair(1.0, 0.0, FRAC_PI_2);
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-15);
        let (a, b) = rotate_pair(1.0, 0.0, FRAC_PI_4);
        assert_abs_diff_eq!(a, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(b, FRAC_1_SQRT_2, epsilon = 1e-15);
        // second column: |01> -> cos|01> - sin|10>
        let (a, b) = rotate_pair(0.0, 1.0, FRAC_PI_4);
        assert_abs_diff_eq!(a, -FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(b, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn simple_chain_unblocked_ends_in_d2() {
        for n in [1, 2, 3, 10, 100, 1000] {
            let d = simple_chain(n, false).unwrap();
            assert_abs_diff_eq!(d.p_d2, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(d.p_d1, 0.0, epsilon = 1e-12);
            assert_eq!(d.p_bob, 0.0);
        }
    }

    #[test]
    fn simple_chain_blocked_small_cases() {
        let d = simple_chain(1, true).unwrap();
        assert_abs_diff_eq!(d.p_d1, 0.0, epsilon = 1e-30);
        assert_abs_diff_eq!(d.p_bob, 1.0, epsilon = TIGHT);
        assert_eq!(d.p_d2, 0.0);

        // two splitters at π/4: absorb 1/2, then 1/4 of the remaining 1/2
        let d = simple_chain(2, true).unwrap();
        assert_abs_diff_eq!(d.p_d1, 0.25, epsilon = TIGHT);
        assert_abs_diff_eq!(d.p_bob, 0.75, epsilon = TIGHT);
        assert_eq!(d.p_d2, 0.0);
    }

    #[test]
    fn simple_chain_blocked_matches_cos_power() {
        for n in [3, 17, 500] {
            let d = simple_chain(n, true).unwrap();
            let expected = (FRAC_PI_2 / n as f64).cos().powi(2 * n as i32);
            assert_abs_diff_eq!(d.p_d1, expected, epsilon = TIGHT);
            assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-12);
        }
        assert_eq!(simple_chain(0, true), Err(Error::ZeroCycles { name: "N" }));
    }

    #[test]
    fn inner_chain_transparent_moves_all_to_channel() {
        let p = params(3, 64);
        let passes = vec![ChannelState::Transparent; 64];
        let out = inner_chain(1.0, &p, &passes).unwrap();
        assert_abs_diff_eq!(out.y, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.z, 1.0, epsilon = 1e-14);
        assert_eq!(out.absorbed_bob, 0.0);
        assert_eq!(out.absorbed_noise, 0.0);
    }

    #[test]
    fn inner_chain_blocked_two_steps() {
        let p = params(3, 2);
        let passes = [ChannelState::BlockedByBob; 2];
        let out = inner_chain(1.0, &p, &passes).unwrap();
        assert_abs_diff_eq!(out.y, 0.5, epsilon = TIGHT);
        assert_eq!(out.z, 0.0);
        assert_abs_diff_eq!(out.absorbed_bob, 0.75, epsilon = TIGHT);
        assert_eq!(out.absorbed_noise, 0.0);

        let passes = [ChannelState::BlockedByNoise; 2];
        let out = inner_chain(1.0, &p, &passes).unwrap();
        assert_abs_diff_eq!(out.absorbed_noise, 0.75, epsilon = TIGHT);
        assert_eq!(out.absorbed_bob, 0.0);
    }

    #[test]
    fn inner_chain_blocked_large_n_follows_cos_power() {
        let n = 2000;
        let p = params(3, n);
        let passes = vec![ChannelState::BlockedByBob; n];
        let out = inner_chain(1.0, &p, &passes).unwrap();
        let theta = FRAC_PI_2 / n as f64;
        assert_abs_diff_eq!(out.y, theta.cos().powi(n as i32), epsilon = TIGHT);
        assert_abs_diff_eq!(out.y * out.y + out.absorbed_bob, 1.0, epsilon = TIGHT);
    }

    #[test]
    fn inner_chain_rejects_wrong_length() {
        let p = params(3, 4);
        let passes = [ChannelState::Transparent; 3];
        assert_eq!(
            inner_chain(1.0, &p, &passes),
            Err(Error::PassCount {
                expected: 4,
                got: 3
            })
        );
    }

    #[test]
    fn two_by_two_hand_unrolled() {
        // x_1 = y_{1,0} = √2/2; blocked inner chain gives y_{1,2} = √2/4,
        // so x_2 = 1/2 - 1/4 and y_{2,0} = 1/2 + 1/4.
        let p = params(2, 2);
        let block = run_protocol(&p, BobBit::Block);
        assert_abs_diff_eq!(block.p_d1, 0.0625, epsilon = TIGHT);
        assert_abs_diff_eq!(block.p_d2, 0.5625, epsilon = TIGHT);
        assert_abs_diff_eq!(block.p_bob, 0.375, epsilon = TIGHT);
        assert_eq!(block.p_d3, 0.0);
        assert_eq!(block.p_noise, 0.0);

        // transparent chain swaps y into the channel, so x_2 = y_{2,0} = 1/2
        let pass = run_protocol(&p, BobBit::Pass);
        assert_abs_diff_eq!(pass.p_d1, 0.25, epsilon = TIGHT);
        assert_abs_diff_eq!(pass.p_d2, 0.25, epsilon = TIGHT);
        assert_abs_diff_eq!(pass.p_d3, 0.5, epsilon = TIGHT);
        assert_eq!(pass.p_bob, 0.0);
        assert_eq!(pass.p_noise, 0.0);
    }

    #[test]
    fn single_outer_cycle_transmits_everything() {
        for n in [1, 5, 100] {
            let d = run_protocol(&params(1, n), BobBit::Pass);
            assert_abs_diff_eq!(d.p_d1, 0.0, epsilon = 1e-30);
            assert_abs_diff_eq!(d.p_d2, 1.0, epsilon = TIGHT);
        }
    }

    #[test]
    fn published_operating_points() {
        let cases = [
            (25, 320, 0.906, 0.912),
            (50, 1250, 0.952, 0.953),
            (150, 10000, 0.984, 0.982),
        ];
        for (m, n, p1, p2) in cases {
            let p = params(m, n);
            assert_abs_diff_eq!(run_protocol(&p, BobBit::Pass).p_d1, p1, epsilon = 0.002);
            assert_abs_diff_eq!(run_protocol(&p, BobBit::Block).p_d2, p2, epsilon = 0.002);
        }
    }

    #[test]
    fn closed_form_values() {
        assert_abs_diff_eq!(p1_closed_form(1).unwrap(), 0.0, epsilon = 1e-30);
        assert_abs_diff_eq!(p1_closed_form(2).unwrap(), 0.25, epsilon = 1e-15);
        assert_eq!(
            (p1_closed_form(25).unwrap() * 1000.0).round() / 1000.0,
            0.906
        );
        assert!(p1_closed_form(0).is_err());
    }

    #[test]
    fn closed_form_matches_recursion() {
        for m in [1, 2, 3, 10, 25, 77] {
            for n in [1, 10, 100] {
                let d = run_protocol(&params(m, n), BobBit::Pass);
                assert_abs_diff_eq!(d.p_d1, p1_closed_form(m).unwrap(), epsilon = TIGHT);
            }
        }
    }

    #[test]
    fn final_inner_chain_costs_about_cos_2n() {
        let base = params(25, 320);
        let literal = run_protocol(&base, BobBit::Block);
        let symmetric = run_protocol(&base.with_final_inner_chain(true), BobBit::Block);
        let factor = (FRAC_PI_2 / 320.0).cos().powi(2 * 320);
        assert_abs_diff_eq!(symmetric.p_d2, literal.p_d2 * factor, epsilon = TIGHT);
        assert_abs_diff_eq!(symmetric.total(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn scheduled_constant_matches_protocol_bitwise() {
        let p = params(6, 9).with_imperfection(1.5).unwrap();
        for bit in BobBit::BOTH {
            let s = BlockingSchedule::for_bit(&p, bit);
            assert_eq!(run_scheduled(&p, &s).unwrap(), run_protocol(&p, bit));
        }
        let wrong = BlockingSchedule::constant(6, 8, ChannelState::Transparent);
        assert!(run_scheduled(&p, &wrong).is_err());
    }

    #[test]
    fn leak_sinks_are_exclusive() {
        let p = params(10, 40).with_imperfection(0.7).unwrap();
        assert_eq!(run_protocol(&p, BobBit::Block).p_d3, 0.0);
        assert_eq!(run_protocol(&p, BobBit::Pass).p_bob, 0.0);
    }
}
