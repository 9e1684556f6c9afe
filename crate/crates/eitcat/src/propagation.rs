//! Semiclassical probe-envelope integrator and validity-condition checks.
//!
//! The envelope equation
//!
//!   [(1 + W_j) d/dt + c (1 + W_j v0/c) d/dz] E_j
//!     + i c Sum_k mu_jk (g^4 n^2 / Omega_0k^4) |E_k|^2 E_j
//!     = W_j v0 (d/dz ln Omega_0j) E_j,          W_j = g^2 n / Omega_0j^2,
//!
//! is first-order advection with the z-dependent speed V_gr, so it is solved
//! by the method of characteristics: the transit time, the stimulated-Raman
//! amplitude factor and the accumulated Kerr phase are integrated along each
//! characteristic with composite Simpson steps (4th order in the step size).
//! Envelopes are complex means; intensities transport linearly, which makes
//! the partner-mode intensity entering the Kerr term available in closed form
//! along the characteristic being integrated.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::{group_velocity, ChannelConfig, PhysicalParams};

/// Input probe envelopes at z = 0 as functions of time.
#[derive(Debug, Clone, Copy)]
pub enum InputPulse {
    /// amp * exp(-(t - center)^2 / (2 width^2)); used for delay measurements.
    Gaussian { amp: C64, center: f64, width: f64 },
    /// Smooth flat top between `start` and `stop` with tanh ramps of scale
    /// `ramp`; the uniform plateau makes accumulated phase comparable to the
    /// plane-wave quadrature.
    FlatTop {
        amp: C64,
        start: f64,
        stop: f64,
        ramp: f64,
    },
}

impl InputPulse {
    pub fn eval(&self, t: f64) -> C64 {
        match *self {
            InputPulse::Gaussian { amp, center, width } => {
                let u = (t - center) / width;
                amp * (-0.5 * u * u).exp()
            }
            InputPulse::FlatTop {
                amp,
                start,
                stop,
                ramp,
            } => amp * 0.5 * (((t - start) / ramp).tanh() - ((t - stop) / ramp).tanh()),
        }
    }

    pub fn intensity(&self, t: f64) -> f64 {
        self.eval(t).norm_sqr()
    }

    /// Sharpest time scale in the pulse; the grid must resolve it.
    pub fn min_feature(&self) -> f64 {
        match *self {
            InputPulse::Gaussian { width, .. } => width,
            InputPulse::FlatTop { ramp, .. } => ramp,
        }
    }
}

/// Grid resolution request for the integrator.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Number of z steps (nz + 1 samples on [0, L]).
    pub nz: usize,
    /// Number of t steps (nt + 1 samples on [0, t_max]).
    pub nt: usize,
    pub t_max: f64,
}

/// Step sizes and the characteristic-crossing ratio of a finished run.
#[derive(Debug, Clone, Copy)]
pub struct SchemeMeta {
    pub dz: f64,
    pub dt: f64,
    /// (dz / min_z V_gr) / dt: how many t cells one z step sweeps at the
    /// slowest point. Informational; the characteristic tracing is exact.
    pub cfl_like_ratio: f64,
}

/// Complex probe envelopes on a uniform (z, t) grid, plus the integrator's
/// own per-channel transit times and amplitude factors at z = L.
#[derive(Debug, Clone)]
pub struct EnvelopeGrid {
    pub z_points: Vec<f64>,
    pub t_points: Vec<f64>,
    /// Envelope of probe j; rows index z, columns index t.
    pub e1: DMatrix<C64>,
    pub e2: DMatrix<C64>,
    pub meta: SchemeMeta,
    /// Numerically integrated transit time to z = L per channel (s).
    pub transit: [f64; 2],
    /// Numerically integrated amplitude factor at z = L per channel.
    pub amp_factor: [f64; 2],
}

const MIN_POINTS_PER_FEATURE: f64 = 8.0;

// Composite cumulative Simpson on [0, L] with n steps: each step uses the
// midpoint, giving a 4th-order antiderivative on the n+1 lattice points.
fn cumulative_simpson<F: Fn(f64) -> f64>(f: F, length: f64, n: usize) -> Vec<f64> {
    let h = length / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for i in 0..n {
        let a = i as f64 * h;
        acc += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
        out.push(acc);
    }
    out
}

// Cubic (4-point Lagrange) interpolation on a uniform grid, clamped at the
// edges.
fn interp_cubic(values: &[f64], t0: f64, dt: f64, x: f64) -> f64 {
    let n = values.len();
    let u = (x - t0) / dt;
    if u <= 0.0 {
        return values[0];
    }
    if u >= (n - 1) as f64 {
        return values[n - 1];
    }
    let i = (u.floor() as usize).min(n - 2);
    let base = i.saturating_sub(1).min(n - 4);
    let s = u - base as f64;
    let mut acc = 0.0;
    for (k, &v) in values[base..base + 4].iter().enumerate() {
        let mut w = 1.0;
        for m in 0..4 {
            if m != k {
                w *= (s - m as f64) / (k as f64 - m as f64);
            }
        }
        acc += w * v;
    }
    acc
}

/// Integrate the two coupled probe envelopes through the medium.
pub fn integrate(
    params: &PhysicalParams,
    channel: &ChannelConfig,
    pulses: [InputPulse; 2],
    grid: &GridSpec,
) -> Result<EnvelopeGrid> {
    params.validate()?;
    channel.profile_1.validate()?;
    channel.profile_2.validate()?;
    if grid.nz < 4 || grid.nt < 4 || grid.t_max.is_nan() || grid.t_max <= 0.0 {
        return Err(Error::Domain(
            "grid needs nz >= 4, nt >= 4, t_max > 0".to_string(),
        ));
    }
    let dt = grid.t_max / grid.nt as f64;
    let feature = pulses[0].min_feature().min(pulses[1].min_feature());
    let required_dt = feature / MIN_POINTS_PER_FEATURE;
    if dt > required_dt {
        return Err(Error::GridResolution {
            what: format!(
                "t step {dt:.6e} cannot resolve the sharpest pulse feature {feature:.6e}"
            ),
            name: "dt",
            required: required_dt,
            got: dt,
        });
    }
    let lattice = 2 * grid.nz; // half-step lattice for midpoint lookups
    let len = params.length;
    let a = params.angle_scale_sq();
    let g4n2 = params.g2n * params.g2n;

    // Per-channel transit time and log amplitude factor on the half lattice.
    let mut transit = Vec::with_capacity(2);
    let mut log_amp = Vec::with_capacity(2);
    for j in 0..2 {
        let prof = channel.profile(j);
        let inv_v = |z: f64| {
            let w = params.g2n / prof.rabi(z).powi(2);
            (1.0 + w) / (params.c * (1.0 + w * params.v0 / params.c))
        };
        let raman = |z: f64| {
            params.g2n * (params.v0 / params.c) * prof.dlog_rabi(z) / (prof.rabi(z).powi(2) + a)
        };
        transit.push(cumulative_simpson(inv_v, len, lattice));
        log_amp.push(cumulative_simpson(raman, len, lattice));
    }
    let t_arrive = transit[0][lattice].max(transit[1][lattice]);
    if grid.t_max < t_arrive {
        return Err(Error::GridResolution {
            what: "time window ends before the slowest envelope reaches z = L".to_string(),
            name: "t_max",
            required: t_arrive,
            got: grid.t_max,
        });
    }

    // Kerr phase along the characteristic labelled by input time t0, marched
    // in z with Simpson steps; rows index z, columns index t0 on the t grid.
    let dz = len / grid.nz as f64;
    let kerr_rate = |j: usize, half_idx: usize, t0: f64| -> f64 {
        let z = 0.5 * dz * half_idx as f64;
        let oj2 = channel.profile(j).rabi(z).powi(2);
        let mut rate = 0.0;
        for k in 0..2 {
            let mu = params.mu.get(j, k);
            if mu == 0.0 {
                continue;
            }
            let ok2 = channel.profile(k).rabi(z).powi(2);
            let gk = (2.0 * log_amp[k][half_idx]).exp();
            let partner_t = t0 + transit[j][half_idx] - transit[k][half_idx];
            let intensity = gk * pulses[k].intensity(partner_t);
            rate += mu * g4n2 * oj2 * intensity / (ok2 * ok2 * (oj2 + a));
        }
        rate
    };
    let mut phase = [
        DMatrix::from_element(grid.nz + 1, grid.nt + 1, 0.0f64),
        DMatrix::from_element(grid.nz + 1, grid.nt + 1, 0.0f64),
    ];
    let any_kerr = params.mu.m11 != 0.0 || params.mu.m12 != 0.0 || params.mu.m22 != 0.0;
    if any_kerr {
        for (j, phase_j) in phase.iter_mut().enumerate() {
            for m in 0..=grid.nt {
                let t0 = m as f64 * dt;
                let mut acc = 0.0;
                for i in 0..grid.nz {
                    let f0 = kerr_rate(j, 2 * i, t0);
                    let fm = kerr_rate(j, 2 * i + 1, t0);
                    let f1 = kerr_rate(j, 2 * i + 2, t0);
                    acc += dz / 6.0 * (f0 + 4.0 * fm + f1);
                    phase_j[(i + 1, m)] = acc;
                }
            }
        }
    }

    // Assemble the grid: each output node reads its own characteristic.
    let z_points: Vec<f64> = (0..=grid.nz).map(|i| i as f64 * dz).collect();
    let t_points: Vec<f64> = (0..=grid.nt).map(|m| m as f64 * dt).collect();
    let mut envelopes = [
        DMatrix::from_element(grid.nz + 1, grid.nt + 1, C64::new(0.0, 0.0)),
        DMatrix::from_element(grid.nz + 1, grid.nt + 1, C64::new(0.0, 0.0)),
    ];
    for j in 0..2 {
        for i in 0..=grid.nz {
            let t_j = transit[j][2 * i];
            let g = log_amp[j][2 * i].exp();
            let row: Vec<f64> = (0..=grid.nt).map(|mm| phase[j][(i, mm)]).collect();
            for m in 0..=grid.nt {
                let t0 = t_points[m] - t_j;
                let base = pulses[j].eval(t0);
                let phi = if any_kerr {
                    interp_cubic(&row, 0.0, dt, t0)
                } else {
                    0.0
                };
                let val = base * g * C64::new(0.0, -phi).exp();
                if !val.re.is_finite() || !val.im.is_finite() {
                    return Err(Error::Blowup {
                        z_index: i,
                        t_index: m,
                    });
                }
                envelopes[j][(i, m)] = val;
            }
        }
    }
    let mut v_min = f64::INFINITY;
    for i in 0..=lattice {
        let z = (0.5 * dz * i as f64).min(len);
        for j in 0..2 {
            v_min = v_min.min(group_velocity(params, channel.profile(j), z)?);
        }
    }
    let [e1, e2] = envelopes;
    Ok(EnvelopeGrid {
        z_points,
        t_points,
        e1,
        e2,
        meta: SchemeMeta {
            dz,
            dt,
            cfl_like_ratio: (dz / v_min) / dt,
        },
        transit: [transit[0][lattice], transit[1][lattice]],
        amp_factor: [log_amp[0][lattice].exp(), log_amp[1][lattice].exp()],
    })
}

impl EnvelopeGrid {
    fn mode(&self, j: usize) -> &DMatrix<C64> {
        match j {
            0 => &self.e1,
            1 => &self.e2,
            _ => panic!("mode index out of range"),
        }
    }

    /// Output envelope magnitude maximum over the exit slice z = L divided by
    /// the input magnitude maximum over the same t grid.
    pub fn peak_magnitude_ratio(&self, j: usize, pulse: &InputPulse) -> f64 {
        let e = self.mode(j);
        let last = e.nrows() - 1;
        let out_max = (0..e.ncols())
            .map(|m| e[(last, m)].norm())
            .fold(0.0f64, f64::max);
        let in_max = self
            .t_points
            .iter()
            .map(|&t| pulse.eval(t).norm())
            .fold(0.0f64, f64::max);
        out_max / in_max
    }

    /// Intensity-centroid delay between exit and entrance slices.
    pub fn centroid_delay(&self, j: usize, pulse: &InputPulse) -> f64 {
        let e = self.mode(j);
        let last = e.nrows() - 1;
        let (mut num_o, mut den_o, mut num_i, mut den_i) = (0.0, 0.0, 0.0, 0.0);
        for (m, &t) in self.t_points.iter().enumerate() {
            let w_o = e[(last, m)].norm_sqr();
            num_o += t * w_o;
            den_o += w_o;
            let w_i = pulse.intensity(t);
            num_i += t * w_i;
            den_i += w_i;
        }
        num_o / den_o - num_i / den_i
    }

    /// Accumulated nonlinear phase at the exit-slice intensity peak, taken
    /// relative to the linearly transported envelope.
    pub fn phase_at_peak(&self, j: usize, pulse: &InputPulse) -> f64 {
        let e = self.mode(j);
        let last = e.nrows() - 1;
        let m_star = (0..e.ncols())
            .max_by(|&x, &y| e[(last, x)].norm().total_cmp(&e[(last, y)].norm()))
            .unwrap();
        let t0 = self.t_points[m_star] - self.transit[j];
        let base = pulse.eval(t0) * self.amp_factor[j];
        -(e[(last, m_star)] / base).arg()
    }

    /// Columnar dump: z, t, Re E1, Im E1, Re E2, Im E2.
    pub fn to_columns(&self) -> String {
        let mut s = String::from("z,t,e1_re,e1_im,e2_re,e2_im\n");
        for (i, &z) in self.z_points.iter().enumerate() {
            for (m, &t) in self.t_points.iter().enumerate() {
                let a = self.e1[(i, m)];
                let b = self.e2[(i, m)];
                s.push_str(&format!(
                    "{z:.9e},{t:.9e},{:.9e},{:.9e},{:.9e},{:.9e}\n",
                    a.re, a.im, b.re, b.im
                ));
            }
        }
        s
    }
}

/// Dephasing criterion: compressed pulse length over the probe wavelength.
pub const DEPHASING_RATIO_MIN: f64 = 100.0;

/// Loss, Doppler, dephasing and adiabaticity margins for a configuration.
#[derive(Debug, Clone)]
pub struct ValidityReport {
    /// Adopted per-channel loss exponents (the conservative bound value).
    pub eta: [f64; 2],
    /// Bound |delta_j + mu_bj n| L / v0.
    pub eta_bound: [f64; 2],
    /// exp(-eta) per channel.
    pub transmission: [f64; 2],
    /// Allowed Doppler spread min_j (1/|k_p - k_s|)(1/L - mu_bj n / v0);
    /// infinite for perfectly matched wavevectors.
    pub doppler_margin: f64,
    pub doppler_ok: bool,
    /// min_j min_z V_gr_j * pulse_duration / lambda.
    pub compression_ratio: f64,
    pub dephasing_ok: bool,
    /// max_j max_z |d/dz ln Omega_0j| V_gr_j * pulse_duration.
    pub adiabatic_measure: f64,
    pub adiabatic_ok: bool,
}

impl ValidityReport {
    /// Key/value text dump.
    pub fn to_text(&self) -> String {
        format!(
            "eta_1 = {:.16e}\neta_2 = {:.16e}\n\
             eta_bound_1 = {:.16e}\neta_bound_2 = {:.16e}\n\
             transmission_1 = {:.16e}\ntransmission_2 = {:.16e}\n\
             doppler_margin = {:.16e}\ndoppler_ok = {}\n\
             compression_ratio = {:.16e}\ndephasing_ok = {}\n\
             adiabatic_measure = {:.16e}\nadiabatic_ok = {}\n",
            self.eta[0],
            self.eta[1],
            self.eta_bound[0],
            self.eta_bound[1],
            self.transmission[0],
            self.transmission[1],
            self.doppler_margin,
            self.doppler_ok,
            self.compression_ratio,
            self.dephasing_ok,
            self.adiabatic_measure,
            self.adiabatic_ok
        )
    }
}

/// Evaluate the validity bounds for a configuration and pulse duration.
pub fn validity_check(
    params: &PhysicalParams,
    channel: &ChannelConfig,
    pulse_duration: f64,
) -> Result<ValidityReport> {
    params.validate()?;
    let mut eta = [0.0; 2];
    for (j, e) in eta.iter_mut().enumerate() {
        *e = (params.delta[j] + params.mu_bj_n[j]).abs() * params.length / params.v0;
    }
    let transmission = [(-eta[0]).exp(), (-eta[1]).exp()];
    let mut doppler_margin = f64::INFINITY;
    for j in 0..2 {
        let inner = 1.0 / params.length - params.mu_bj_n[j].abs() / params.v0;
        let margin = if params.k_mismatch[j] == 0.0 {
            f64::INFINITY
        } else {
            inner / params.k_mismatch[j].abs()
        };
        doppler_margin = doppler_margin.min(margin);
    }
    let doppler_ok = doppler_margin > 0.0 && params.delta_v / params.v0 <= doppler_margin;

    const SCAN: usize = 1024;
    let mut v_min = [f64::INFINITY; 2];
    let mut adiabatic = 0.0f64;
    for i in 0..=SCAN {
        let z = params.length * i as f64 / SCAN as f64;
        for (j, vm) in v_min.iter_mut().enumerate() {
            let v = group_velocity(params, channel.profile(j), z)?;
            *vm = vm.min(v);
            adiabatic =
                adiabatic.max(channel.profile(j).dlog_rabi(z).abs() * v * pulse_duration);
        }
    }
    let compression_ratio =
        v_min[0].min(v_min[1]) * pulse_duration / params.lambda_probe;
    Ok(ValidityReport {
        eta,
        eta_bound: eta,
        transmission,
        doppler_margin,
        doppler_ok,
        compression_ratio,
        dephasing_ok: compression_ratio >= DEPHASING_RATIO_MIN,
        adiabatic_measure: adiabatic,
        adiabatic_ok: adiabatic < 1.0,
    })
}
