//! Physical parameters, control-field profiles and the derived per-point
//! quantities (mixing angle, group velocity, transit time).
//!
//! Conventions: all rates in rad/s, lengths in m. The coupling and density
//! only ever enter through the product g^2 n, so that product is stored as a
//! single field. Collision coefficients with the medium density likewise
//! enter as products (mu * n).

use crate::error::{Error, Result};
use crate::quad;

/// Symmetric 2x2 collision matrix between the two transfer states.
///
/// Entries are phase-accumulation coefficients: radians of Kerr phase per
/// metre of medium per quantum in the partner mode. Symmetry (mu12 = mu21)
/// is guaranteed by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
}

impl CollisionMatrix {
    pub fn new(m11: f64, m12: f64, m22: f64) -> Self {
        Self { m11, m12, m22 }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// mu_jk with 0-based indices; mu_jk = mu_kj.
    pub fn get(&self, j: usize, k: usize) -> f64 {
        match (j, k) {
            (0, 0) => self.m11,
            (1, 1) => self.m22,
            (0, 1) | (1, 0) => self.m12,
            _ => panic!("collision matrix index out of range"),
        }
    }
}

/// All scalar physics constants for one medium.
#[derive(Debug, Clone)]
pub struct PhysicalParams {
    /// Product of squared atom-light coupling and atomic density, g^2 n (rad^2/s^2).
    pub g2n: f64,
    /// Longitudinal atomic beam velocity v0 (m/s).
    pub v0: f64,
    /// Probe phase velocity c (m/s).
    pub c: f64,
    /// Collision matrix between the two transfer states (rad/m per quantum).
    pub mu: CollisionMatrix,
    /// Self-collision shift of the source state times density, mu_b * n (rad/s).
    pub mu_b_n: f64,
    /// Cross-collision shifts source<->transfer states times density, mu_bj * n (rad/s).
    pub mu_bj_n: [f64; 2],
    /// Excited-state decay rate gamma (rad/s).
    pub gamma: f64,
    /// Medium length L (m).
    pub length: f64,
    /// Two-photon detunings per channel (rad/s).
    pub delta: [f64; 2],
    /// Residual probe/control wavevector mismatch per channel, |k_p - k_s| (1/m).
    pub k_mismatch: [f64; 2],
    /// Probe wavelength (m).
    pub lambda_probe: f64,
    /// Longitudinal velocity spread of the beam around v0 (m/s).
    pub delta_v: f64,
}

impl PhysicalParams {
    /// Check the structural invariants: g^2 n > 0, c > v0 > 0, L > 0,
    /// gamma >= 0, everything finite.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.g2n,
            self.v0,
            self.c,
            self.mu.m11,
            self.mu.m12,
            self.mu.m22,
            self.mu_b_n,
            self.mu_bj_n[0],
            self.mu_bj_n[1],
            self.gamma,
            self.length,
            self.delta[0],
            self.delta[1],
            self.k_mismatch[0],
            self.k_mismatch[1],
            self.lambda_probe,
            self.delta_v,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite physical parameter".into()));
        }
        if self.g2n <= 0.0 {
            return Err(Error::Domain(format!("g2n must be > 0, got {}", self.g2n)));
        }
        if !(self.c > self.v0 && self.v0 > 0.0) {
            return Err(Error::Domain(format!(
                "need c > v0 > 0, got c = {}, v0 = {}",
                self.c, self.v0
            )));
        }
        if self.length <= 0.0 {
            return Err(Error::Domain(format!(
                "medium length must be > 0, got {}",
                self.length
            )));
        }
        if self.gamma < 0.0 {
            return Err(Error::Domain(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// g^2 n v0 / c, the square of the Rabi frequency at which the mixing
    /// angle crosses pi/4 (rad^2/s^2).
    pub fn angle_scale_sq(&self) -> f64 {
        self.g2n * self.v0 / self.c
    }
}

/// Shape family for the space-dependent control Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileShape {
    /// Omega(z) = omega_in everywhere.
    Constant,
    /// Single smooth ramp from omega_in to omega_out around `center`.
    TanhRamp,
    /// Ramp down to omega_out around `center`, back up to omega_in around
    /// `center + 2 width * separation`; used to release and recapture a probe.
    DoubleRamp,
}

/// A space-dependent control-field Rabi frequency Omega_0(z).
#[derive(Debug, Clone)]
pub struct ControlProfile {
    pub shape: ProfileShape,
    /// Rabi frequency at the entrance, z = 0 (rad/s).
    pub omega_in: f64,
    /// Rabi frequency approached at the exit (rad/s); must stay > 0.
    pub omega_out: f64,
    /// Ramp midpoint z0 (m).
    pub center: f64,
    /// Ramp width w (m).
    pub width: f64,
}

impl ControlProfile {
    pub fn constant(omega: f64) -> Self {
        Self {
            shape: ProfileShape::Constant,
            omega_in: omega,
            omega_out: omega,
            center: 0.0,
            width: 1.0,
        }
    }

    pub fn tanh_ramp(omega_in: f64, omega_out: f64, center: f64, width: f64) -> Self {
        Self {
            shape: ProfileShape::TanhRamp,
            omega_in,
            omega_out,
            center,
            width,
        }
    }

    /// Down-and-back profile: dips to omega_out around `center`, recovers to
    /// omega_in a fixed four widths later.
    pub fn double_ramp(omega_in: f64, omega_out: f64, center: f64, width: f64) -> Self {
        Self {
            shape: ProfileShape::DoubleRamp,
            omega_in,
            omega_out,
            center,
            width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_in > 0.0 && self.omega_out > 0.0) {
            return Err(Error::Domain(format!(
                "control Rabi frequencies must be > 0 (omega_in = {}, omega_out = {})",
                self.omega_in, self.omega_out
            )));
        }
        if self.width <= 0.0 {
            return Err(Error::Domain(format!(
                "profile width must be > 0, got {}",
                self.width
            )));
        }
        Ok(())
    }

    /// Omega_0(z) in rad/s. Defined for all z; strictly positive.
    ///
    /// Ramps are evaluated as convex combinations with logistic weights,
    /// Omega = omega_in sig(-u) + omega_out sig(u): no cancellation even when
    /// the endpoint frequencies differ by many orders of magnitude (the
    /// integrands downstream divide by Omega^2 and would amplify any noise).
    pub fn rabi(&self, z: f64) -> f64 {
        match self.shape {
            ProfileShape::Constant => self.omega_in,
            ProfileShape::TanhRamp => {
                let u = 2.0 * (z - self.center) / self.width;
                self.omega_in * sigmoid(-u) + self.omega_out * sigmoid(u)
            }
            ProfileShape::DoubleRamp => {
                let u1 = 2.0 * (z - self.center) / self.width;
                let u2 = 2.0 * (z - (self.center + 4.0 * self.width)) / self.width;
                // Dip weight (1 - sig(-u1))(1 - sig(u2)) written without
                // differences of near-equal terms.
                let a = sigmoid(-u1);
                let b = sigmoid(u2);
                let w_dip = sigmoid(u1) * sigmoid(-u2);
                let w_in = a + b - a * b;
                self.omega_in * w_in + self.omega_out * w_dip
            }
        }
    }

    /// d/dz ln Omega_0(z), analytic.
    pub fn dlog_rabi(&self, z: f64) -> f64 {
        match self.shape {
            ProfileShape::Constant => 0.0,
            ProfileShape::TanhRamp => {
                let u = 2.0 * (z - self.center) / self.width;
                let d = (self.omega_out - self.omega_in) * 2.0 / self.width
                    * sigmoid(u)
                    * sigmoid(-u);
                d / self.rabi(z)
            }
            ProfileShape::DoubleRamp => {
                let u1 = 2.0 * (z - self.center) / self.width;
                let u2 = 2.0 * (z - (self.center + 4.0 * self.width)) / self.width;
                let s1p = 2.0 / self.width * sigmoid(u1) * sigmoid(-u1);
                let s2p = 2.0 / self.width * sigmoid(u2) * sigmoid(-u2);
                // d/dz of the dip weight sig(u1) sig(-u2).
                let d = (self.omega_out - self.omega_in)
                    * (s1p * sigmoid(-u2) - sigmoid(u1) * s2p);
                d / self.rabi(z)
            }
        }
    }

    /// Positions where the profile has structure; used to seed adaptive
    /// quadrature so narrow ramps inside long integration ranges are seen.
    pub fn feature_points(&self) -> Vec<f64> {
        match self.shape {
            ProfileShape::Constant => Vec::new(),
            ProfileShape::TanhRamp => vec![
                self.center - 4.0 * self.width,
                self.center,
                self.center + 4.0 * self.width,
            ],
            ProfileShape::DoubleRamp => vec![
                self.center - 4.0 * self.width,
                self.center,
                self.center + 4.0 * self.width,
                self.center + 8.0 * self.width,
                self.center + 12.0 * self.width,
            ],
        }
    }
}

/// Which probe ends up as a matter wave at the exit of a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferPlan {
    /// Both control fields ramp down: both probes leave as atom lasers.
    Both,
    /// Only the first control ramps down: probe 1 -> atom laser, probe 2
    /// leaves as light.
    FirstOnly,
    /// Mirror image: probe 2 -> atom laser, probe 1 leaves as light.
    SecondOnly,
}

/// Control-field configuration of one transfer channel.
#[derive(Debug, Clone)]
pub struct ChannelConfig {
    pub profile_1: ControlProfile,
    pub profile_2: ControlProfile,
    pub plan: TransferPlan,
}

/// Exit-angle tolerance: a "full transfer" end must reach theta(L) within
/// this of pi/2, a "stays light" end must stay within this of 0.
pub const EXIT_ANGLE_TOL: f64 = 1e-3;

#[inline]
fn sigmoid(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

/// Residual fractions left on the wrong side of a transfer at z = L.
#[derive(Debug, Clone, Copy)]
pub struct TransferResiduals {
    /// Fraction of probe j remaining in the unwanted component:
    /// cos^2 theta_j(L) for a matter-wave end, sin^2 theta_j(L) for a light end.
    pub deficit: [f64; 2],
}

impl ChannelConfig {
    pub fn new(profile_1: ControlProfile, profile_2: ControlProfile, plan: TransferPlan) -> Self {
        Self {
            profile_1,
            profile_2,
            plan,
        }
    }

    pub fn profile(&self, j: usize) -> &ControlProfile {
        match j {
            0 => &self.profile_1,
            1 => &self.profile_2,
            _ => panic!("channel index out of range"),
        }
    }

    /// True if probe j (0-based) is transferred to a matter wave at z = L.
    pub fn transfers_to_matter(&self, j: usize) -> bool {
        match self.plan {
            TransferPlan::Both => true,
            TransferPlan::FirstOnly => j == 0,
            TransferPlan::SecondOnly => j == 1,
        }
    }

    /// Check the exit mixing angles against the plan and report residual
    /// transfer deficits.
    pub fn validate(&self, params: &PhysicalParams) -> Result<TransferResiduals> {
        params.validate()?;
        self.profile_1.validate()?;
        self.profile_2.validate()?;
        let mut deficit = [0.0; 2];
        for (j, slot) in deficit.iter_mut().enumerate() {
            let theta_l = mixing_angle(params, self.profile(j), params.length)?;
            if self.transfers_to_matter(j) {
                if theta_l < std::f64::consts::FRAC_PI_2 - EXIT_ANGLE_TOL {
                    return Err(Error::Domain(format!(
                        "probe {} should transfer to matter but theta(L) = {:.6} rad",
                        j + 1,
                        theta_l
                    )));
                }
                *slot = theta_l.cos().powi(2);
            } else {
                if theta_l > EXIT_ANGLE_TOL {
                    return Err(Error::Domain(format!(
                        "probe {} should stay light but theta(L) = {:.6} rad",
                        j + 1,
                        theta_l
                    )));
                }
                *slot = theta_l.sin().powi(2);
            }
        }
        Ok(TransferResiduals { deficit })
    }
}

fn check_z(params: &PhysicalParams, z: f64) -> Result<()> {
    if !z.is_finite() || z < 0.0 || z > params.length {
        return Err(Error::Domain(format!(
            "position z = {} outside the medium [0, {}]",
            z, params.length
        )));
    }
    Ok(())
}

/// Mixing angle theta(z) in (0, pi/2), defined by
/// tan^2 theta = g^2 n v0 / (Omega_0^2(z) c).
pub fn mixing_angle(params: &PhysicalParams, profile: &ControlProfile, z: f64) -> Result<f64> {
    check_z(params, z)?;
    let omega = profile.rabi(z);
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::Domain(format!(
            "control Rabi frequency must be > 0 at z = {z}, got {omega}"
        )));
    }
    Ok((params.angle_scale_sq().sqrt() / omega).atan())
}

/// Group velocity V_gr(z) = c (1 + (g^2 n / Omega_0^2)(v0/c)) / (1 + g^2 n / Omega_0^2).
///
/// Interpolates monotonically between c (strong control) and v0 (weak control).
pub fn group_velocity(params: &PhysicalParams, profile: &ControlProfile, z: f64) -> Result<f64> {
    check_z(params, z)?;
    let omega = profile.rabi(z);
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::Domain(format!(
            "control Rabi frequency must be > 0 at z = {z}, got {omega}"
        )));
    }
    let w = params.g2n / (omega * omega);
    Ok(params.c * (1.0 + w * params.v0 / params.c) / (1.0 + w))
}

/// Transit time of the probe envelope from the entrance to z:
/// integral of dz' / V_gr(z'), by adaptive quadrature.
pub fn transit_time(params: &PhysicalParams, profile: &ControlProfile, z: f64) -> Result<f64> {
    check_z(params, z)?;
    profile.validate()?;
    let f = |zi: f64| {
        let omega = profile.rabi(zi);
        let w = params.g2n / (omega * omega);
        (1.0 + w) / (params.c * (1.0 + w * params.v0 / params.c))
    };
    let r = quad::integrate(f, 0.0, z, 0.0, 1e-13)?;
    Ok(r.value)
}
