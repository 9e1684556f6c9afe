//! Shared fixtures for integration tests: a unit-scale parameter set and the
//! full calibration pipeline (cross phase to pi, self phases to 2 pi).

#![allow(dead_code)]

use eitcat::*;
use num_complex::Complex64 as C64;

/// Unit-scale medium: c/v0 = 4 so the matter-wave amplitude factor is 2,
/// small enough that barred amplitudes stay inside modest Fock cutoffs.
pub fn unit_params() -> PhysicalParams {
    PhysicalParams {
        g2n: 4.0,
        v0: 0.5,
        c: 2.0,
        mu: CollisionMatrix::new(2.0, 1.0, 2.0),
        mu_b_n: 0.0,
        mu_bj_n: [0.0, 0.0],
        gamma: 0.0,
        length: 1.0,
        delta: [0.0, 0.0],
        k_mismatch: [1.0, 1.0],
        lambda_probe: 1e-3,
        delta_v: 0.0,
    }
}

/// Ramp from strong control to a residual mixing angle within the exit
/// tolerance (theta(L) = pi/2 - 2e-4 at unit parameters).
pub fn release_profile() -> ControlProfile {
    ControlProfile::tanh_ramp(2000.0, 2e-4, 0.45, 0.05)
}

/// Strong constant control: theta stays at 5e-4.
pub fn hold_profile() -> ControlProfile {
    ControlProfile::constant(2000.0)
}

pub fn channel_both() -> ChannelConfig {
    ChannelConfig::new(release_profile(), release_profile(), TransferPlan::Both)
}

pub fn channel_first_only() -> ChannelConfig {
    ChannelConfig::new(release_profile(), hold_profile(), TransferPlan::FirstOnly)
}

pub fn channel_second_only() -> ChannelConfig {
    ChannelConfig::new(hold_profile(), release_profile(), TransferPlan::SecondOnly)
}

/// Full calibration pipeline: scale mu12 for a pi cross phase, retune the
/// self-collision coefficients for 2 pi self phases, and assemble the gate.
/// Returns the calibrated parameter set and the gate.
pub fn calibrated_gate(
    params: &PhysicalParams,
    channel: &ChannelConfig,
) -> (PhysicalParams, KerrGateSpec) {
    let mut p = params.clone();
    let s = calibrate_to_pi(&p, channel, CalibrationKnob::ScaleMu12).expect("calibration");
    p.mu.m12 *= s;
    let (m11, m22) = snap_self_phases(&p, channel).expect("self-phase snap");
    p.mu.m11 = m11;
    p.mu.m22 = m22;
    let integrals = phase_integrals(&p, channel, p.length).expect("phase integrals");
    let gate = gate_spec(&p, channel, &integrals).expect("gate spec");
    (p, gate)
}

/// The four-component entangled cat written out from the closed form:
/// (|a,b> + |-a,b> + |a,-b> - |-a,-b>) / 2.
pub fn four_term_cat(a: C64, b: C64) -> CoherentSuperposition {
    let half = C64::new(0.5, 0.0);
    CoherentSuperposition::from_terms(
        2,
        [
            (half, vec![a, b]),
            (half, vec![-a, b]),
            (half, vec![a, -b]),
            (-half, vec![-a, -b]),
        ],
    )
}

/// The atom-light entangled output of a single first-only channel:
/// 1/2 |abar>(|b> + |-b>) + 1/2 |-abar>(|b> - |-b>).
pub fn atom_light_state(abar: C64, b: C64) -> CoherentSuperposition {
    four_term_cat(abar, b)
}
