//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input fell outside its mathematical domain (e.g. a position outside
    /// the medium, a non-positive Rabi frequency).
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature failed to reach the requested tolerance. Carries
    /// the residual error estimate and the worst remaining subinterval.
    #[error("quadrature did not converge: residual {residual:.3e} on [{lo:.6e}, {hi:.6e}]")]
    Quadrature { residual: f64, lo: f64, hi: f64 },

    /// Root bracketing for the phase calibration failed inside the allowed
    /// scale window.
    #[error("calibration infeasible: no sign change for scale in [{lo:.1e}, {hi:.1e}]")]
    CalibrationInfeasible { lo: f64, hi: f64 },

    /// The requested Fock cutoff cannot hold the state to the tail tolerance.
    #[error("Fock cutoff {cutoff} too small: per-term tail mass {tail:.3e} exceeds {tol:.1e}; need cutoff >= {required}")]
    CutoffTooSmall {
        cutoff: usize,
        tail: f64,
        tol: f64,
        required: usize,
    },

    /// A projection was requested onto a basis that does not span the state's
    /// support on the measured mode(s).
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    /// An operation required a normalized state but got one with a different
    /// norm.
    #[error("state not normalized: |<psi|psi>| = {norm_sq:.12}")]
    NotNormalized { norm_sq: f64 },

    /// The symbolic Kerr path only supports cross phases in {0, pi} (mod 2pi)
    /// and self phases in 2pi * Z.
    #[error("gate phases unsupported by the symbolic path: phi_11={phi_11:.6}, phi_22={phi_22:.6}, phi_12={phi_12:.6}")]
    UnsupportedGatePhases {
        phi_11: f64,
        phi_22: f64,
        phi_12: f64,
    },

    /// The channel configuration and gate disagree (transfer flags, spans).
    #[error("channel/gate mismatch: {0}")]
    ChannelMismatch(String),

    /// The propagation grid cannot resolve the input pulses.
    #[error("grid under-resolved: {what}; need {name} <= {required:.6e} (got {got:.6e})")]
    GridResolution {
        what: String,
        name: &'static str,
        required: f64,
        got: f64,
    },

    /// The integrator produced a non-finite value.
    #[error("numerical blow-up at z index {z_index}, t index {t_index}")]
    Blowup { z_index: usize, t_index: usize },

    /// A configuration file could not be parsed or is missing keys.
    #[error("config error ({key}): {msg}")]
    Config { key: String, msg: String },
}

impl Error {
    /// Coarse error category, used by the CLI for exit codes.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Domain(_) | Error::Config { .. } => ErrorCategory::Input,
            Error::Quadrature { .. } | Error::GridResolution { .. } | Error::Blowup { .. } => {
                ErrorCategory::Numeric
            }
            Error::CalibrationInfeasible { .. } => ErrorCategory::Calibration,
            Error::CutoffTooSmall { .. }
            | Error::BasisMismatch(_)
            | Error::NotNormalized { .. }
            | Error::UnsupportedGatePhases { .. }
            | Error::ChannelMismatch(_) => ErrorCategory::State,
        }
    }
}

/// Error classes with stable process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad user input or config file.
    Input,
    /// Numerical failure (quadrature, PDE grid).
    Numeric,
    /// Calibration could not be completed.
    Calibration,
    /// Quantum-state errors (cutoff, basis, normalization).
    State,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Input => 2,
            ErrorCategory::Numeric => 3,
            ErrorCategory::Calibration => 4,
            ErrorCategory::State => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
