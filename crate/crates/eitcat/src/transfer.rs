//! Analytic transfer layer: self- and cross-phase-modulation integrals,
//! the pi cross-phase calibration, and the effective two-mode Kerr gate.
//!
//! The accumulated phase on probe j per quantum in probe k is
//!
//!   Phi_jk(z) = mu_jk / cos^2 theta_k(0) *
//!               Int_0^z cos^2 theta_j(xi) g^4 n^2
//!               / (Omega_0k^2(xi) (Omega_0j^2(xi) + g^2 n v0/c)) dxi,
//!
//! with the entrance factor cos^2 theta_k(0) kept explicit (it is 1 when the
//! control fields are strong at the entrance). The number-diagonal gate built
//! from these integrals is
//!
//!   U = exp[-i (phi_11 n1^2 + phi_22 n2^2 + phi_12 n1 n2)],
//!
//! where phi_jj = Phi_jj(L) and phi_12 averages the two directed cross terms.
//! Calibration drives phi_12 to pi, which turns a two-mode coherent input
//! into the four-component entangled cat.

use crate::error::{Error, Result};
use crate::params::{ChannelConfig, PhysicalParams};
use crate::quad;

/// Accumulated phase coefficients and amplitude ratios at one position.
#[derive(Debug, Clone, Copy)]
pub struct PhaseIntegrals {
    /// phi[j][k]: phase on probe j per quantum in probe k (rad).
    pub phi: [[f64; 2]; 2],
    /// cos theta_j(z) / cos theta_j(0) per probe.
    pub amplitude_ratio: [f64; 2],
    /// Position the integrals were evaluated at (m).
    pub z_eval: f64,
}

impl PhaseIntegrals {
    /// Total coefficient of the n1 n2 cross term.
    pub fn cross_phase(&self) -> f64 {
        0.5 * (self.phi[0][1] + self.phi[1][0])
    }

    /// Self-phase-modulation coefficient of probe j (0-based): phase per
    /// quantum of its own mode.
    pub fn self_phase(&self, j: usize) -> f64 {
        self.phi[j][j]
    }

    /// Cross-phase-modulation coefficient on probe j: phase per quantum of
    /// the partner mode.
    pub fn cross_phase_on(&self, j: usize) -> f64 {
        self.phi[j][1 - j]
    }
}

/// Where each probe ends up at the channel exit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeOutput {
    /// Probe transferred to a matter wave; amplitude scales by sqrt(c/v0) sin theta(L).
    ToAtomLaser,
    /// Probe leaves as light; amplitude scales by cos theta(L) / cos theta(0).
    StaysLight,
}

/// Parameters of the effective two-mode Kerr gate implied by one channel.
#[derive(Debug, Clone, Copy)]
pub struct KerrGateSpec {
    /// Coefficient of n1^2 (rad).
    pub phi_11: f64,
    /// Coefficient of n2^2 (rad).
    pub phi_22: f64,
    /// Coefficient of n1 n2 (rad).
    pub phi_12: f64,
    pub transfer_1: ModeOutput,
    pub transfer_2: ModeOutput,
    /// Output amplitude scale of probe 1 (includes the matter-wave factor).
    pub amp_1: f64,
    /// Output amplitude scale of probe 2.
    pub amp_2: f64,
}

impl KerrGateSpec {
    /// Gate with explicit phases, unit amplitude factors and light outputs.
    /// Useful for tests and for running the gate outside a channel context.
    pub fn bare(phi_11: f64, phi_22: f64, phi_12: f64) -> Self {
        Self {
            phi_11,
            phi_22,
            phi_12,
            transfer_1: ModeOutput::StaysLight,
            transfer_2: ModeOutput::StaysLight,
            amp_1: 1.0,
            amp_2: 1.0,
        }
    }
}

// Integrand of the directed integral I_jk at position xi (mu and entrance
// factors applied by the caller): g^4 n^2 Omega_j^2 / (Omega_k^2 (Omega_j^2 + A)^2).
fn directed_integrand<'a>(
    params: &'a PhysicalParams,
    channel: &'a ChannelConfig,
    j: usize,
    k: usize,
) -> impl Fn(f64) -> f64 + 'a {
    let a = params.angle_scale_sq();
    let g4n2 = params.g2n * params.g2n;
    move |xi: f64| {
        let oj2 = channel.profile(j).rabi(xi).powi(2);
        let ok2 = channel.profile(k).rabi(xi).powi(2);
        g4n2 * oj2 / (ok2 * (oj2 + a) * (oj2 + a))
    }
}

fn entrance_cos_sq(params: &PhysicalParams, channel: &ChannelConfig, k: usize) -> f64 {
    let a = params.angle_scale_sq();
    let ok2 = channel.profile(k).rabi(0.0).powi(2);
    ok2 / (ok2 + a)
}

// Phi_jk integrated to z (no domain check; calibration integrates past L).
fn phi_entry_raw(params: &PhysicalParams, channel: &ChannelConfig, j: usize, k: usize, z: f64) -> Result<f64> {
    let mu = params.mu.get(j, k);
    if mu == 0.0 {
        return Ok(0.0);
    }
    let f = directed_integrand(params, channel, j, k);
    let scale = mu / entrance_cos_sq(params, channel, k);
    let mut breaks = channel.profile_1.feature_points();
    breaks.extend(channel.profile_2.feature_points());
    let r = quad::integrate_with_breaks(|xi| scale * f(xi), 0.0, z, 1e-12, 1e-13, &breaks)?;
    Ok(r.value)
}

/// Evaluate all four phase coefficients and both amplitude ratios at z.
pub fn phase_integrals(
    params: &PhysicalParams,
    channel: &ChannelConfig,
    z: f64,
) -> Result<PhaseIntegrals> {
    params.validate()?;
    channel.profile_1.validate()?;
    channel.profile_2.validate()?;
    if !z.is_finite() || z < 0.0 || z > params.length {
        return Err(Error::Domain(format!(
            "position z = {} outside the medium [0, {}]",
            z, params.length
        )));
    }
    let mut phi = [[0.0; 2]; 2];
    for (j, row) in phi.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            *entry = phi_entry_raw(params, channel, j, k, z)?;
        }
    }
    let a = params.angle_scale_sq();
    let cos_ratio = |p: &crate::params::ControlProfile| {
        let o0 = p.rabi(0.0).powi(2);
        let oz = p.rabi(z).powi(2);
        ((oz / (oz + a)) / (o0 / (o0 + a))).sqrt()
    };
    Ok(PhaseIntegrals {
        phi,
        amplitude_ratio: [cos_ratio(&channel.profile_1), cos_ratio(&channel.profile_2)],
        z_eval: z,
    })
}

/// Which knob the calibration is allowed to turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationKnob {
    /// Scale the cross-collision coefficient mu12 (the integral is linear in it).
    ScaleMu12,
    /// Scale the medium length; the profiles are evaluated on the extended
    /// domain unchanged.
    ScaleLength,
}

const BRACKET_LO: f64 = 1e-6;
const BRACKET_HI: f64 = 1e6;
/// Residual tolerance on |cross_phase - pi| after calibration.
pub const CALIBRATION_TOL: f64 = 1e-10;

/// Find the knob scale s that makes the total cross-phase coefficient equal
/// pi. The integral is monotone in both knobs, so a bracketed root search
/// (Brent) converges; for the mu12 knob the dependence is exactly linear and
/// the first secant step lands on the root.
pub fn calibrate_to_pi(
    params: &PhysicalParams,
    channel: &ChannelConfig,
    knob: CalibrationKnob,
) -> Result<f64> {
    params.validate()?;
    let cross = |s: f64| -> Result<f64> {
        match knob {
            CalibrationKnob::ScaleMu12 => {
                let mut p = params.clone();
                p.mu.m12 *= s;
                let i01 = phi_entry_raw(&p, channel, 0, 1, p.length)?;
                let i10 = phi_entry_raw(&p, channel, 1, 0, p.length)?;
                Ok(0.5 * (i01 + i10))
            }
            CalibrationKnob::ScaleLength => {
                let z = params.length * s;
                let i01 = phi_entry_raw(params, channel, 0, 1, z)?;
                let i10 = phi_entry_raw(params, channel, 1, 0, z)?;
                Ok(0.5 * (i01 + i10))
            }
        }
    };
    let f = |s: f64| -> Result<f64> { Ok(cross(s)? - std::f64::consts::PI) };
    let f_lo = f(BRACKET_LO)?;
    let f_hi = f(BRACKET_HI)?;
    if f_lo == 0.0 {
        return Ok(BRACKET_LO);
    }
    if f_hi == 0.0 {
        return Ok(BRACKET_HI);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::CalibrationInfeasible {
            lo: BRACKET_LO,
            hi: BRACKET_HI,
        });
    }
    bracketed_root(f, BRACKET_LO, f_lo, BRACKET_HI, f_hi, CALIBRATION_TOL)
}

// Illinois-damped regula falsi on a sign-changing bracket. Superlinear on
// smooth monotone functions; the first secant step is exact when f is linear
// in the knob.
fn bracketed_root<F: Fn(f64) -> Result<f64>>(
    f: F,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
    f_tol: f64,
) -> Result<f64> {
    let mut side = 0i8;
    for _ in 0..500 {
        let x = (a * fb - b * fa) / (fb - fa);
        let fx = f(x)?;
        if fx.abs() <= f_tol {
            return Ok(x);
        }
        if (fx > 0.0) == (fb > 0.0) {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
    }
    Err(Error::CalibrationInfeasible {
        lo: a.min(b),
        hi: a.max(b),
    })
}

/// Self-collision coefficients that make both self phases equal exactly 2 pi
/// at z = L, so the self terms act as the identity on photon-number spectra.
/// Returns (mu11, mu22). This generalizes the equal-profile tuning
/// mu11 = mu22 = 2 mu12 to unequal control profiles.
pub fn snap_self_phases(params: &PhysicalParams, channel: &ChannelConfig) -> Result<(f64, f64)> {
    let tau = std::f64::consts::TAU;
    let mut out = [0.0; 2];
    for (j, slot) in out.iter_mut().enumerate() {
        let f = directed_integrand(params, channel, j, j);
        let scale = 1.0 / entrance_cos_sq(params, channel, j);
        let mut breaks = channel.profile_1.feature_points();
        breaks.extend(channel.profile_2.feature_points());
        let i =
            quad::integrate_with_breaks(|xi| scale * f(xi), 0.0, params.length, 1e-12, 1e-13, &breaks)?;
        if i.value <= 0.0 {
            return Err(Error::Domain(
                "self-phase integral vanishes; cannot snap".to_string(),
            ));
        }
        *slot = tau / i.value;
    }
    Ok((out[0], out[1]))
}

/// Assemble the effective Kerr gate from phase integrals evaluated at z = L.
pub fn gate_spec(
    params: &PhysicalParams,
    channel: &ChannelConfig,
    integrals: &PhaseIntegrals,
) -> Result<KerrGateSpec> {
    if (integrals.z_eval - params.length).abs() > 1e-12 * params.length {
        return Err(Error::Domain(format!(
            "gate requires integrals at z = L = {}, got z = {}",
            params.length, integrals.z_eval
        )));
    }
    let bar = (params.c / params.v0).sqrt();
    let mut transfer = [ModeOutput::StaysLight; 2];
    let mut amp = [0.0f64; 2];
    for j in 0..2 {
        if channel.transfers_to_matter(j) {
            let theta_l = crate::params::mixing_angle(params, channel.profile(j), params.length)?;
            transfer[j] = ModeOutput::ToAtomLaser;
            amp[j] = bar * theta_l.sin();
        } else {
            transfer[j] = ModeOutput::StaysLight;
            amp[j] = integrals.amplitude_ratio[j];
        }
    }
    Ok(KerrGateSpec {
        phi_11: integrals.phi[0][0],
        phi_22: integrals.phi[1][1],
        phi_12: integrals.cross_phase(),
        transfer_1: transfer[0],
        transfer_2: transfer[1],
        amp_1: amp[0],
        amp_2: amp[1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{CollisionMatrix, ControlProfile, TransferPlan};
    use std::f64::consts::PI;

    fn unit_params() -> PhysicalParams {
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

    fn equal_ramp_channel() -> ChannelConfig {
        let prof = ControlProfile::tanh_ramp(30.0, 2e-4, 0.45, 0.05);
        ChannelConfig::new(prof.clone(), prof, TransferPlan::Both)
    }

    #[test]
    fn zero_mu_gives_zero_phases() {
        let mut p = unit_params();
        p.mu = CollisionMatrix::zero();
        let ch = equal_ramp_channel();
        let pi_ = phase_integrals(&p, &ch, 1.0).unwrap();
        assert_eq!(pi_.phi, [[0.0; 2]; 2]);
    }

    #[test]
    fn constant_profile_closed_form() {
        let p = unit_params();
        let omega = 3.0;
        let ch = ChannelConfig::new(
            ControlProfile::constant(omega),
            ControlProfile::constant(omega),
            TransferPlan::Both,
        );
        // Constant integrand: Phi_jk(z) = mu_jk z g^4 n^2 / (Omega^2 (Omega^2 + A)),
        // the entrance ratio being exactly 1.
        let z = 0.7;
        let pi_ = phase_integrals(&p, &ch, z).unwrap();
        let a = p.angle_scale_sq();
        let base = z * p.g2n * p.g2n / (omega * omega * (omega * omega + a));
        for j in 0..2 {
            for k in 0..2 {
                let expect = p.mu.get(j, k) * base;
                assert!(
                    (pi_.phi[j][k] - expect).abs() / expect < 1e-12,
                    "phi[{j}][{k}]"
                );
            }
        }
        assert!((pi_.amplitude_ratio[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ramp_profile_matches_dense_trapezoid() {
        let p = unit_params();
        let ch = equal_ramp_channel();
        let pi_ = phase_integrals(&p, &ch, 1.0).unwrap();
        // Independent oracle: 1e6-point trapezoid on the same integrand.
        let n = 1_000_000usize;
        let h = 1.0 / n as f64;
        let a = p.angle_scale_sq();
        let f = |xi: f64, j: usize, k: usize| {
            let oj2 = ch.profile(j).rabi(xi).powi(2);
            let ok2 = ch.profile(k).rabi(xi).powi(2);
            p.g2n * p.g2n * oj2 / (ok2 * (oj2 + a) * (oj2 + a))
        };
        for j in 0..2 {
            for k in 0..2 {
                let mut acc = 0.5 * (f(0.0, j, k) + f(1.0, j, k));
                for i in 1..n {
                    acc += f(i as f64 * h, j, k);
                }
                let o0 = ch.profile(k).rabi(0.0).powi(2);
                let oracle = acc * h * p.mu.get(j, k) / (o0 / (o0 + a));
                assert!(
                    (pi_.phi[j][k] - oracle).abs() / oracle.abs() < 1e-8,
                    "phi[{j}][{k}]: {} vs {}",
                    pi_.phi[j][k],
                    oracle
                );
            }
        }
    }

    #[test]
    fn linearity_and_monotonicity() {
        let p = unit_params();
        let ch = equal_ramp_channel();
        let base = phase_integrals(&p, &ch, 0.6).unwrap();
        let mut p2 = p.clone();
        p2.mu = CollisionMatrix::new(4.0, 2.0, 4.0);
        let doubled = phase_integrals(&p2, &ch, 0.6).unwrap();
        for j in 0..2 {
            for k in 0..2 {
                assert!((doubled.phi[j][k] - 2.0 * base.phi[j][k]).abs() < 1e-10);
            }
        }
        let further = phase_integrals(&p, &ch, 0.9).unwrap();
        for j in 0..2 {
            for k in 0..2 {
                assert!(further.phi[j][k] >= base.phi[j][k]);
            }
        }
    }

    #[test]
    fn calibrate_mu12_matches_linear_solution() {
        let p = unit_params();
        let ch = equal_ramp_channel();
        let s = calibrate_to_pi(&p, &ch, CalibrationKnob::ScaleMu12).unwrap();
        let cross1 = phase_integrals(&p, &ch, 1.0).unwrap().cross_phase();
        let linear = PI / cross1;
        assert!(
            (s - linear).abs() / linear < 1e-12,
            "s = {s}, pi/phi = {linear}"
        );
        // Re-evaluation oracle.
        let mut p2 = p.clone();
        p2.mu.m12 *= s;
        let cross = phase_integrals(&p2, &ch, 1.0).unwrap().cross_phase();
        assert!((cross - PI).abs() < 1e-8);
    }

    #[test]
    fn calibrate_is_idempotent() {
        let p = unit_params();
        let ch = equal_ramp_channel();
        let s = calibrate_to_pi(&p, &ch, CalibrationKnob::ScaleMu12).unwrap();
        let mut p2 = p.clone();
        p2.mu.m12 *= s;
        let s2 = calibrate_to_pi(&p2, &ch, CalibrationKnob::ScaleMu12).unwrap();
        assert!((s2 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn calibrate_already_at_pi_returns_one() {
        let p = unit_params();
        let ch = equal_ramp_channel();
        let cross1 = phase_integrals(&p, &ch, 1.0).unwrap().cross_phase();
        let mut p2 = p.clone();
        p2.mu.m12 *= PI / cross1;
        let s = calibrate_to_pi(&p2, &ch, CalibrationKnob::ScaleMu12).unwrap();
        assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn calibrate_length_knob() {
        let p = unit_params();
        // Constant strong-ish profiles keep the integrand flat past L.
        let ch = ChannelConfig::new(
            ControlProfile::tanh_ramp(30.0, 0.5, 0.45, 0.05),
            ControlProfile::tanh_ramp(30.0, 0.5, 0.45, 0.05),
            TransferPlan::Both,
        );
        let s = calibrate_to_pi(&p, &ch, CalibrationKnob::ScaleLength).unwrap();
        let mut p2 = p.clone();
        p2.length *= s;
        let ch2 = ch.clone();
        let cross = phase_integrals(&p2, &ch2, p2.length).unwrap().cross_phase();
        assert!((cross - PI).abs() < 1e-8, "cross = {cross}");
    }

    #[test]
    fn calibrate_infeasible_without_cross_collisions() {
        let mut p = unit_params();
        p.mu = CollisionMatrix::new(1.0, 0.0, 1.0);
        let ch = equal_ramp_channel();
        assert!(matches!(
            calibrate_to_pi(&p, &ch, CalibrationKnob::ScaleMu12),
            Err(Error::CalibrationInfeasible { .. })
        ));
    }

    #[test]
    fn equal_profiles_give_double_self_phase() {
        // mu11 = mu22 = 2 mu12 with identical profiles: phi_11 = phi_22 = 2 phi_12.
        let p = unit_params();
        let ch = equal_ramp_channel();
        let pi_ = phase_integrals(&p, &ch, 1.0).unwrap();
        let cross = pi_.cross_phase();
        assert!((pi_.phi[0][0] - 2.0 * cross).abs() / (2.0 * cross) < 1e-10);
        assert!((pi_.phi[1][1] - 2.0 * cross).abs() / (2.0 * cross) < 1e-10);
    }

    #[test]
    fn calibrated_gate_has_pi_cross_and_two_pi_self_phases() {
        let p = unit_params();
        let ch = equal_ramp_channel();
        let s = calibrate_to_pi(&p, &ch, CalibrationKnob::ScaleMu12).unwrap();
        let mut p2 = p.clone();
        p2.mu.m12 *= s;
        p2.mu.m11 = 2.0 * p2.mu.m12;
        p2.mu.m22 = 2.0 * p2.mu.m12;
        let integrals = phase_integrals(&p2, &ch, 1.0).unwrap();
        let gate = gate_spec(&p2, &ch, &integrals).unwrap();
        assert!((gate.phi_12 - PI).abs() < 1e-8);
        assert!((gate.phi_11 - 2.0 * PI).abs() < 2e-8);
        assert!((gate.phi_22 - 2.0 * PI).abs() < 2e-8);
        assert_eq!(gate.transfer_1, ModeOutput::ToAtomLaser);
        assert_eq!(gate.transfer_2, ModeOutput::ToAtomLaser);
        let bar = (p2.c / p2.v0).sqrt();
        assert!(gate.amp_1 <= bar && gate.amp_1 > bar * (1.0 - 1e-6));
    }

    #[test]
    fn snap_self_phases_yields_two_pi() {
        let p = unit_params();
        let ch = ChannelConfig::new(
            ControlProfile::tanh_ramp(30.0, 2e-4, 0.45, 0.05),
            ControlProfile::constant(30.0),
            TransferPlan::FirstOnly,
        );
        let (m11, m22) = snap_self_phases(&p, &ch).unwrap();
        let mut p2 = p.clone();
        p2.mu.m11 = m11;
        p2.mu.m22 = m22;
        let integrals = phase_integrals(&p2, &ch, 1.0).unwrap();
        assert!((integrals.phi[0][0] - 2.0 * PI).abs() < 1e-9);
        assert!((integrals.phi[1][1] - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn gate_spec_transfer_flags_follow_plan() {
        let p = unit_params();
        let ch = ChannelConfig::new(
            ControlProfile::tanh_ramp(30.0, 2e-4, 0.45, 0.05),
            ControlProfile::constant(30.0),
            TransferPlan::FirstOnly,
        );
        let integrals = phase_integrals(&p, &ch, 1.0).unwrap();
        let gate = gate_spec(&p, &ch, &integrals).unwrap();
        assert_eq!(gate.transfer_1, ModeOutput::ToAtomLaser);
        assert_eq!(gate.transfer_2, ModeOutput::StaysLight);
        // A light output through a constant control keeps unit amplitude.
        assert!((gate.amp_2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_spec_rejects_integrals_not_at_exit() {
        let p = unit_params();
        let ch = equal_ramp_channel();
        let integrals = phase_integrals(&p, &ch, 0.5).unwrap();
        assert!(gate_spec(&p, &ch, &integrals).is_err());
    }

    #[test]
    fn mu_zero_gate_is_pure_transfer() {
        let mut p = unit_params();
        p.mu = CollisionMatrix::zero();
        let ch = equal_ramp_channel();
        let integrals = phase_integrals(&p, &ch, 1.0).unwrap();
        let gate = gate_spec(&p, &ch, &integrals).unwrap();
        assert_eq!(gate.phi_11, 0.0);
        assert_eq!(gate.phi_22, 0.0);
        assert_eq!(gate.phi_12, 0.0);
    }
}
