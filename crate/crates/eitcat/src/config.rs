//! Flat key/value configuration files.
//!
//! Format: one `key = value` pair per line, `#` starts a comment. Keys match
//! the parameter field names; units are SI (rad/s, m, m/s) and documented in
//! the shipped default file.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::{
    ChannelConfig, CollisionMatrix, ControlProfile, PhysicalParams, ProfileShape, TransferPlan,
};
use crate::propagation::GridSpec;

/// Everything a scenario run needs, parsed from one config file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub channel: ChannelConfig,
    /// Coherent input amplitudes of the two probes.
    pub alpha: C64,
    pub beta: C64,
    pub fock_cutoff: usize,
    /// Retune mu11/mu22 so both self phases are exact 2 pi multiples.
    pub snap_self_phases: bool,
    pub pulse_duration: f64,
    /// Flat-top / Gaussian envelope amplitudes for propagation runs.
    pub pulse_amp: [f64; 2],
    pub grid: GridSpec,
    pub seed: u64,
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            key: format!("line {}", lineno + 1),
            msg: format!("expected 'key = value', got '{line}'"),
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

struct Reader {
    map: BTreeMap<String, String>,
    used: std::collections::BTreeSet<String>,
}

impl Reader {
    fn f64(&mut self, key: &str) -> Result<f64> {
        self.used.insert(key.to_string());
        let raw = self.map.get(key).ok_or_else(|| Error::Config {
            key: key.to_string(),
            msg: "missing required key".to_string(),
        })?;
        raw.parse::<f64>().map_err(|e| Error::Config {
            key: key.to_string(),
            msg: format!("bad float '{raw}': {e}"),
        })
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        self.used.insert(key.to_string());
        match self.map.get(key) {
            None => Ok(default),
            Some(raw) => raw.parse::<f64>().map_err(|e| Error::Config {
                key: key.to_string(),
                msg: format!("bad float '{raw}': {e}"),
            }),
        }
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        self.used.insert(key.to_string());
        match self.map.get(key) {
            None => Ok(default),
            Some(raw) => raw.parse::<usize>().map_err(|e| Error::Config {
                key: key.to_string(),
                msg: format!("bad integer '{raw}': {e}"),
            }),
        }
    }

    fn u64_or(&mut self, key: &str, default: u64) -> Result<u64> {
        self.used.insert(key.to_string());
        match self.map.get(key) {
            None => Ok(default),
            Some(raw) => raw.parse::<u64>().map_err(|e| Error::Config {
                key: key.to_string(),
                msg: format!("bad integer '{raw}': {e}"),
            }),
        }
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool> {
        self.used.insert(key.to_string());
        match self.map.get(key).map(|s| s.as_str()) {
            None => Ok(default),
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") => Ok(false),
            Some(other) => Err(Error::Config {
                key: key.to_string(),
                msg: format!("bad bool '{other}', expected true/false"),
            }),
        }
    }

    fn string_or(&mut self, key: &str, default: &str) -> String {
        self.used.insert(key.to_string());
        self.map
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string())
    }

    fn finish(self) -> Result<()> {
        for key in self.map.keys() {
            if !self.used.contains(key) {
                return Err(Error::Config {
                    key: key.clone(),
                    msg: "unknown key".to_string(),
                });
            }
        }
        Ok(())
    }
}

fn parse_profile(r: &mut Reader, prefix: &str) -> Result<ControlProfile> {
    let shape = r.string_or(&format!("{prefix}_shape"), "constant");
    let omega_in = r.f64(&format!("{prefix}_omega_in"))?;
    let omega_out = r.f64_or(&format!("{prefix}_omega_out"), omega_in)?;
    let center = r.f64_or(&format!("{prefix}_center"), 0.0)?;
    let width = r.f64_or(&format!("{prefix}_width"), 1.0)?;
    let shape = match shape.as_str() {
        "constant" => ProfileShape::Constant,
        "tanh" => ProfileShape::TanhRamp,
        "double" => ProfileShape::DoubleRamp,
        other => {
            return Err(Error::Config {
                key: format!("{prefix}_shape"),
                msg: format!("unknown shape '{other}', expected constant|tanh|double"),
            })
        }
    };
    Ok(ControlProfile {
        shape,
        omega_in,
        omega_out,
        center,
        width,
    })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut r = Reader {
            map: parse_pairs(text)?,
            used: Default::default(),
        };
        let params = PhysicalParams {
            g2n: r.f64("g2n")?,
            v0: r.f64("v0")?,
            c: r.f64("c")?,
            mu: CollisionMatrix::new(r.f64("mu11")?, r.f64("mu12")?, r.f64("mu22")?),
            mu_b_n: r.f64_or("mu_b_n", 0.0)?,
            mu_bj_n: [r.f64_or("mu_b1_n", 0.0)?, r.f64_or("mu_b2_n", 0.0)?],
            gamma: r.f64_or("gamma", 0.0)?,
            length: r.f64("length")?,
            delta: [r.f64_or("delta_1", 0.0)?, r.f64_or("delta_2", 0.0)?],
            k_mismatch: [
                r.f64_or("k_mismatch_1", 0.0)?,
                r.f64_or("k_mismatch_2", 0.0)?,
            ],
            lambda_probe: r.f64("lambda_probe")?,
            delta_v: r.f64_or("delta_v", 0.0)?,
        };
        let plan = match r.string_or("transfer_plan", "both").as_str() {
            "both" => TransferPlan::Both,
            "first" => TransferPlan::FirstOnly,
            "second" => TransferPlan::SecondOnly,
            other => {
                return Err(Error::Config {
                    key: "transfer_plan".to_string(),
                    msg: format!("unknown plan '{other}', expected both|first|second"),
                })
            }
        };
        let channel = ChannelConfig::new(
            parse_profile(&mut r, "profile1")?,
            parse_profile(&mut r, "profile2")?,
            plan,
        );
        let alpha = C64::new(r.f64_or("alpha_re", 1.0)?, r.f64_or("alpha_im", 0.0)?);
        let beta = C64::new(r.f64_or("beta_re", 1.0)?, r.f64_or("beta_im", 0.0)?);
        let cfg = RunConfig {
            params,
            channel,
            alpha,
            beta,
            fock_cutoff: r.usize_or("fock_cutoff", 48)?,
            snap_self_phases: r.bool_or("snap_self_phases", true)?,
            pulse_duration: r.f64_or("pulse_duration", 1.0)?,
            pulse_amp: [r.f64_or("pulse_amp_1", 1.0)?, r.f64_or("pulse_amp_2", 1.0)?],
            grid: GridSpec {
                nz: r.usize_or("grid_nz", 128)?,
                nt: r.usize_or("grid_nt", 512)?,
                t_max: r.f64_or("grid_t_max", 4.0)?,
            },
            seed: r.u64_or("seed", 7)?,
        };
        r.finish()?;
        cfg.params.validate()?;
        cfg.channel.profile_1.validate()?;
        cfg.channel.profile_2.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            key: path.display().to_string(),
            msg: format!("cannot read: {e}"),
        })?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
        g2n = 4.0
        v0 = 0.5
        c = 2.0
        mu11 = 2.0
        mu12 = 1.0
        mu22 = 2.0
        length = 1.0
        lambda_probe = 1e-3
        profile1_omega_in = 30.0
        profile2_omega_in = 30.0
    ";

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.fock_cutoff, 48);
        assert_eq!(cfg.seed, 7);
        assert!(cfg.snap_self_phases);
        assert_eq!(cfg.params.mu.m12, 1.0);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# header comment\n\n{MINIMAL}\nseed = 42 # trailing\n");
        let cfg = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn missing_key_is_reported_by_name() {
        let err = RunConfig::parse("g2n = 4.0").unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "v0"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = format!("{MINIMAL}\nnot_a_key = 1\n");
        let err = RunConfig::parse(&text).unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "not_a_key"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn bad_float_is_reported_with_key() {
        let text = MINIMAL.replace("v0 = 0.5", "v0 = fast");
        let err = RunConfig::parse(&text).unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "v0"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn tanh_profile_round_trip() {
        let text = format!(
            "{MINIMAL}
            profile1_shape = tanh
            profile1_omega_out = 2e-4
            profile1_center = 0.45
            profile1_width = 0.05
            transfer_plan = first
            "
        );
        let cfg = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg.channel.profile_1.shape, ProfileShape::TanhRamp);
        assert_eq!(cfg.channel.plan, TransferPlan::FirstOnly);
    }
}
