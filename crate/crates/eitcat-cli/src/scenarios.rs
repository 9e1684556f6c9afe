//! Scenario implementations and output writers.
//!
//! Every run writes a `manifest.txt` (config hash, version, seed, timestamp)
//! plus scenario-specific CSV / state files. All numeric output uses 17
//! significant digits so oracle comparisons round-trip losslessly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use sha2::{Digest, Sha256};

use eitcat::*;

use crate::{Cli, Scenario};

pub fn run(cli: &Cli) -> Result<()> {
    let raw = fs::read_to_string(&cli.config).map_err(|e| Error::Config {
        key: cli.config.display().to_string(),
        msg: format!("cannot read: {e}"),
    })?;
    let mut cfg = RunConfig::parse(&raw)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(cutoff) = cli.cutoff {
        cfg.fock_cutoff = cutoff;
    }
    fs::create_dir_all(&cli.out).map_err(|e| Error::Config {
        key: cli.out.display().to_string(),
        msg: format!("cannot create output dir: {e}"),
    })?;
    write_manifest(cli, &raw, &cfg)?;
    match cli.scenario {
        Scenario::Cat => run_cat(cli, &cfg),
        Scenario::AtomLight => run_atom_light(cli, &cfg),
        Scenario::Swap => run_swap(cli, &cfg),
        Scenario::Propagate => run_propagate(cli, &cfg),
        Scenario::Calibrate => run_calibrate(cli, &cfg),
        Scenario::Validity => run_validity(cli, &cfg),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::write(dir.join(name), contents).map_err(|e| Error::Config {
        key: name.to_string(),
        msg: format!("cannot write: {e}"),
    })
}

fn write_manifest(cli: &Cli, raw_config: &str, cfg: &RunConfig) -> Result<()> {
    let hash = Sha256::digest(raw_config.as_bytes());
    let hex: String = hash.iter().fold(String::new(), |mut acc, b| {
        let _ = write!(acc, "{b:02x}");
        acc
    });
    let ts = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let text = format!(
        "scenario = {:?}\nconfig = {}\nconfig_sha256 = {hex}\nversion = {}\nseed = {}\nfock_cutoff = {}\ntimestamp_unix = {ts}\n",
        cli.scenario,
        cli.config.display(),
        env!("CARGO_PKG_VERSION"),
        cfg.seed,
        cfg.fock_cutoff,
    );
    write_file(&cli.out, "manifest.txt", &text)
}

/// Calibrate the collision matrix for one channel: cross phase to pi (unless
/// there are no cross collisions at all), then self phases to 2 pi when the
/// config asks for it. Returns the retuned parameters, the gate and the
/// mu12 scale factor.
fn calibrated_gate(cfg: &RunConfig, channel: &ChannelConfig) -> Result<(PhysicalParams, KerrGateSpec, f64)> {
    let mut params = cfg.params.clone();
    let mut scale = 1.0;
    if params.mu.m12 != 0.0 {
        scale = calibrate_to_pi(&params, channel, CalibrationKnob::ScaleMu12)?;
        params.mu.m12 *= scale;
        if cfg.snap_self_phases {
            let (m11, m22) = snap_self_phases(&params, channel)?;
            params.mu.m11 = m11;
            params.mu.m22 = m22;
        }
    }
    let integrals = phase_integrals(&params, channel, params.length)?;
    let gate = gate_spec(&params, channel, &integrals)?;
    Ok((params, gate, scale))
}

// Gate with the same phases but unit amplitude factors; the Fock oracle has
// no counterpart for the matter-wave amplitude relabelling.
fn unscaled(gate: &KerrGateSpec) -> KerrGateSpec {
    let mut g = *gate;
    g.amp_1 = 1.0;
    g.amp_2 = 1.0;
    g
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Fidelity of the symbolic gate output against the Fock oracle, computed in
/// the photon-number-preserving convention at the configured cutoff.
fn oracle_fidelity(
    cfg: &RunConfig,
    gate: &KerrGateSpec,
    in1: C64,
    in2: C64,
) -> Result<(f64, f64, f64)> {
    let bare = unscaled(gate);
    let sym = apply_kerr_symbolic(&bare, &CoherentSuperposition::coherent_product(&[in1, in2]))?;
    let num = apply_kerr_fock(
        &bare,
        &FockVector::coherent_product(in1, in2, cfg.fock_cutoff)?,
    );
    let sym_fock = to_fock(&sym, cfg.fock_cutoff)?;
    let fidelity = sym_fock.fidelity(&num);
    let entropy_sym = entanglement_entropy(&sym, 1)?;
    let mut normalized = num.clone();
    normalized.normalize()?;
    let entropy_fock = normalized.entanglement_entropy()?;
    Ok((fidelity, entropy_sym, entropy_fock))
}

// Shared body of the cat and atom-light scenarios: run one channel, compare
// against the Fock oracle, report entropies and transfer deficits. Falls back
// to the numeric gate path (with a notice) when the calibrated phases land
// outside the symbolic domain.
fn run_single_channel(cli: &Cli, cfg: &RunConfig, channel: &ChannelConfig, label: &str) -> Result<()> {
    let residuals = channel.validate(&cfg.params)?;
    let (_, gate, scale) = calibrated_gate(cfg, channel)?;
    match run_channel(channel, cfg.alpha, cfg.beta, &gate) {
        Ok(state) => {
            let entropy = entanglement_entropy(&state, 1)?;
            let (fidelity, entropy_unscaled, entropy_fock) =
                oracle_fidelity(cfg, &gate, cfg.alpha, cfg.beta)?;
            write_file(&cli.out, "state.txt", &state.to_text())?;
            let mut csv = String::from(
                "mu12_scale,phi_11,phi_22,phi_12,deficit_1,deficit_2,entropy,fidelity_unscaled_vs_fock,entropy_unscaled,entropy_unscaled_fock,norm\n",
            );
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                fmt(scale),
                fmt(gate.phi_11),
                fmt(gate.phi_22),
                fmt(gate.phi_12),
                fmt(residuals.deficit[0]),
                fmt(residuals.deficit[1]),
                fmt(entropy),
                fmt(fidelity),
                fmt(entropy_unscaled),
                fmt(entropy_fock),
                fmt(state.norm_sq()),
            ));
            write_file(&cli.out, "summary.csv", &csv)?;
            println!(
                "{label}: {} terms, entropy {entropy:.9} ebit, oracle fidelity {fidelity:.12}",
                state.terms().len()
            );
        }
        Err(Error::UnsupportedGatePhases { .. }) => {
            eprintln!(
                "notice: gate phases ({:.6}, {:.6}, {:.6}) are outside the symbolic domain; \
                 reporting the Fock-path output in the photon-number-preserving convention",
                gate.phi_11, gate.phi_22, gate.phi_12
            );
            let bare = unscaled(&gate);
            let mut num = apply_kerr_fock(
                &bare,
                &FockVector::coherent_product(cfg.alpha, cfg.beta, cfg.fock_cutoff)?,
            );
            num.normalize()?;
            let entropy_fock = num.entanglement_entropy()?;
            write_file(&cli.out, "state_fock.txt", &num.to_text())?;
            let mut csv = String::from(
                "mu12_scale,phi_11,phi_22,phi_12,deficit_1,deficit_2,entropy_unscaled_fock\n",
            );
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt(scale),
                fmt(gate.phi_11),
                fmt(gate.phi_22),
                fmt(gate.phi_12),
                fmt(residuals.deficit[0]),
                fmt(residuals.deficit[1]),
                fmt(entropy_fock),
            ));
            write_file(&cli.out, "summary.csv", &csv)?;
            println!("{label}: numeric path, entropy {entropy_fock:.9} ebit (unscaled)");
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn run_cat(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    // Symmetric configuration: the first control profile drives both probes
    // and both are transferred to matter.
    let channel = ChannelConfig::new(
        cfg.channel.profile_1.clone(),
        cfg.channel.profile_1.clone(),
        TransferPlan::Both,
    );
    run_single_channel(cli, cfg, &channel, "cat")
}

fn run_atom_light(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    let channel = ChannelConfig::new(
        cfg.channel.profile_1.clone(),
        cfg.channel.profile_2.clone(),
        TransferPlan::FirstOnly,
    );
    run_single_channel(cli, cfg, &channel, "atom-light")
}

// Mirror image of a channel: probe roles exchanged.
fn mirrored(channel: &ChannelConfig) -> ChannelConfig {
    let plan = match channel.plan {
        TransferPlan::Both => TransferPlan::Both,
        TransferPlan::FirstOnly => TransferPlan::SecondOnly,
        TransferPlan::SecondOnly => TransferPlan::FirstOnly,
    };
    ChannelConfig::new(channel.profile_2.clone(), channel.profile_1.clone(), plan)
}

fn run_swap(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    if cfg.channel.plan != TransferPlan::FirstOnly {
        return Err(Error::ChannelMismatch(
            "swap expects transfer_plan = first; channel 2 is its mirror image".to_string(),
        ));
    }
    let ch1_cfg = cfg.channel.clone();
    let ch2_cfg = mirrored(&ch1_cfg);
    ch1_cfg.validate(&cfg.params)?;
    ch2_cfg.validate(&cfg.params)?;
    let (_, gate1, _) = calibrated_gate(cfg, &ch1_cfg)?;
    let (_, gate2, _) = calibrated_gate(cfg, &ch2_cfg)?;
    let (a1, _a2) = split(cfg.alpha);
    let (b1, _b2) = split(cfg.beta);
    let ch1 = run_channel(&ch1_cfg, a1, b1, &gate1)?;
    let ch2 = run_channel(&ch2_cfg, a1, b1, &gate2)?;
    let outcomes = swap(&ch1, &ch2)?;

    // Fock-oracle cross-check in the photon-number-preserving convention:
    // the whole pipeline re-run on the truncated number grid.
    let bare1 = unscaled(&gate1);
    let bare2 = unscaled(&gate2);
    let ch1_u = run_channel(&ch1_cfg, a1, b1, &bare1)?;
    let ch2_u = run_channel(&ch2_cfg, a1, b1, &bare2)?;
    let outcomes_u = swap(&ch1_u, &ch2_u)?;
    let f1 = apply_kerr_fock(&bare1, &FockVector::coherent_product(a1, b1, cfg.fock_cutoff)?);
    let f2 = apply_kerr_fock(&bare2, &FockVector::coherent_product(a1, b1, cfg.fock_cutoff)?);
    let fock_outcomes = swap_fock(&f1, &f2, b1, a1)?;

    let mut csv =
        String::from("outcome,probability,entropy,oracle_probability_gap,oracle_state_fidelity\n");
    for ((o, ou), of) in outcomes.iter().zip(&outcomes_u).zip(&fock_outcomes) {
        let gap = (ou.probability - of.probability).abs();
        let fidelity = if ou.probability > 1e-12 {
            to_fock(&ou.atom_state, cfg.fock_cutoff)?.fidelity(&of.atom_state)
        } else {
            1.0
        };
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            o.outcome.label(),
            fmt(o.probability),
            fmt(o.entropy),
            fmt(gap),
            fmt(fidelity)
        ));
        write_file(
            &cli.out,
            &format!("atom_state_{}.txt", o.outcome.label()),
            &o.atom_state.to_text(),
        )?;
    }
    write_file(&cli.out, "outcomes.csv", &csv)?;
    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    println!("swap: probability sum {total:.12}");
    for ((o, ou), of) in outcomes.iter().zip(&outcomes_u).zip(&fock_outcomes) {
        println!(
            "  {:<9} p = {:.9}  entropy = {:.9} ebit  (oracle gap {:.2e})",
            o.outcome.label(),
            o.probability,
            o.entropy,
            (ou.probability - of.probability).abs()
        );
    }

    if let Some(n) = cli.sample {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let o = sample_swap(&outcomes, &mut rng);
            let idx = BellOutcome::ALL.iter().position(|&x| x == o).unwrap();
            counts[idx] += 1;
        }
        let mut csv = String::from("outcome,count,frequency\n");
        for (i, o) in BellOutcome::ALL.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{}\n",
                o.label(),
                counts[i],
                fmt(counts[i] as f64 / n.max(1) as f64)
            ));
        }
        write_file(&cli.out, "samples.csv", &csv)?;
        println!("sampled {n} Bell measurements with seed {}", cfg.seed);
    }
    Ok(())
}

fn run_propagate(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    // Symmetric channel: both probes see the first profile, which makes the
    // analytic cross-phase integrand and the envelope equation coincide.
    let channel = ChannelConfig::new(
        cfg.channel.profile_1.clone(),
        cfg.channel.profile_1.clone(),
        TransferPlan::Both,
    );
    let (params, _, _) = calibrated_gate(cfg, &channel)?;

    // Demo pulses sized from the time window: a quarter-window plateau is
    // long enough to read the phase at its centre, short enough to clear the
    // slowest transit.
    let t_max = cfg.grid.t_max;
    let width = 0.25 * t_max;
    let flat = [
        InputPulse::FlatTop {
            amp: C64::new(cfg.pulse_amp[0], 0.0),
            start: 0.1 * t_max,
            stop: 0.1 * t_max + width,
            ramp: width / 10.0,
        },
        InputPulse::FlatTop {
            amp: C64::new(cfg.pulse_amp[1], 0.0),
            start: 0.1 * t_max,
            stop: 0.1 * t_max + width,
            ramp: width / 10.0,
        },
    ];
    let gauss = InputPulse::Gaussian {
        amp: C64::new(cfg.pulse_amp[0], 0.0),
        center: 0.1 * t_max + 0.5 * width,
        width: width / 6.0,
    };

    // Analytic references.
    let delay_ref = transit_time(&params, &channel.profile_1, params.length)?;
    let a = params.angle_scale_sq();
    let ratio_ref = {
        let o0 = channel.profile_1.rabi(0.0).powi(2);
        let ol = channel.profile_1.rabi(params.length).powi(2);
        ((ol / (ol + a)) / (o0 / (o0 + a))).sqrt()
    };
    let integrals = phase_integrals(&params, &channel, params.length)?;
    let phase_ref = (integrals.phi[0][0] * cfg.pulse_amp[0].powi(2))
        + (integrals.phi[0][1] * cfg.pulse_amp[1].powi(2));

    let grid = integrate(&params, &channel, flat, &cfg.grid)?;
    write_file(&cli.out, "grid.csv", &grid.to_columns())?;
    let ratio_meas = grid.peak_magnitude_ratio(0, &flat[0]);
    let phase_meas = grid.phase_at_peak(0, &flat[0]);
    let gauss_grid = integrate(&params, &channel, [gauss, gauss], &cfg.grid)?;
    let delay_meas = gauss_grid.centroid_delay(0, &gauss);

    let mut csv = String::from("quantity,measured,reference,rel_error\n");
    for (name, m, r) in [
        ("delay", delay_meas, delay_ref),
        ("amplitude_ratio", ratio_meas, ratio_ref),
        ("kerr_phase", phase_meas, phase_ref),
    ] {
        csv.push_str(&format!(
            "{name},{},{},{}\n",
            fmt(m),
            fmt(r),
            fmt((m - r).abs() / r.abs().max(1e-300))
        ));
    }
    write_file(&cli.out, "comparison.csv", &csv)?;
    println!(
        "propagate: delay rel {:.2e}, ratio rel {:.2e}, phase rel {:.2e} (grid {} x {})",
        (delay_meas - delay_ref).abs() / delay_ref,
        (ratio_meas - ratio_ref).abs() / ratio_ref,
        (phase_meas - phase_ref).abs() / phase_ref.abs().max(1e-300),
        cfg.grid.nz,
        cfg.grid.nt
    );

    if let Some(levels) = cli.grid_refine {
        let mut csv = String::from("nz,transit_error,amp_factor_error\n");
        let mut errs = Vec::new();
        for lvl in 0..levels.max(2) {
            let nz = cfg.grid.nz.max(8) << lvl;
            let spec = GridSpec {
                nz,
                nt: cfg.grid.nt,
                t_max: cfg.grid.t_max,
            };
            let g = integrate(&params, &channel, [gauss, gauss], &spec)?;
            let et = (g.transit[0] - delay_ref).abs();
            let eg = (g.amp_factor[0] - ratio_ref).abs();
            csv.push_str(&format!("{nz},{},{}\n", fmt(et), fmt(eg)));
            errs.push((et, eg));
        }
        write_file(&cli.out, "refine.csv", &csv)?;
        for pair in errs.windows(2) {
            println!(
                "  refine: transit order {:.2}, amplitude order {:.2}",
                (pair[0].0 / pair[1].0).log2(),
                (pair[0].1 / pair[1].1).log2()
            );
        }
    }
    Ok(())
}

fn run_calibrate(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    let channel = cfg.channel.clone();
    let before = phase_integrals(&cfg.params, &channel, cfg.params.length)?;
    let scale = calibrate_to_pi(&cfg.params, &channel, CalibrationKnob::ScaleMu12)?;
    let mut params = cfg.params.clone();
    params.mu.m12 *= scale;
    let after = phase_integrals(&params, &channel, params.length)?;
    let residual = (after.cross_phase() - std::f64::consts::PI).abs();
    let mut csv = String::from("knob,scale,cross_phase_before,cross_phase_after,residual\n");
    csv.push_str(&format!(
        "mu12,{},{},{},{}\n",
        fmt(scale),
        fmt(before.cross_phase()),
        fmt(after.cross_phase()),
        fmt(residual)
    ));
    write_file(&cli.out, "calibration.csv", &csv)?;
    println!("calibrate: scale {scale:.12e}, residual {residual:.3e}");
    Ok(())
}

fn run_validity(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    let report = validity_check(&cfg.params, &cfg.channel, cfg.pulse_duration)?;
    write_file(&cli.out, "validity.txt", &report.to_text())?;
    println!(
        "validity: transmission ({:.6}, {:.6}), doppler_ok {}, dephasing_ok {}, adiabatic_ok {}",
        report.transmission[0],
        report.transmission[1],
        report.doppler_ok,
        report.dephasing_ok,
        report.adiabatic_ok
    );
    Ok(())
}
