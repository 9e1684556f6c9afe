//! Slow-light quantum state transfer with collisional Kerr phases.
//!
//! An atomic beam driven by two space-dependent control fields converts two
//! weak coherent probes into matter waves. Atom-atom collisions imprint self-
//! and cross-phase modulation on the transferred states; with the cross phase
//! calibrated to pi the output is an entangled superposition of
//! macroscopically distinct coherent states. Measuring the light modes of two
//! mirror-image channels in a cat-state Bell basis then leaves two spatially
//! separated atom lasers entangled.
//!
//! The crate provides:
//! - the analytic layer (mixing angle, group velocity, phase integrals,
//!   pi-phase calibration, effective Kerr gate),
//! - a dual quantum-state engine: exact coherent-superposition algebra plus a
//!   truncated Fock oracle for independent numeric verification,
//! - the beam-split / transfer / Bell-measurement protocol,
//! - a method-of-characteristics integrator for the semiclassical envelope
//!   equation cross-validating delay, amplitude scaling and Kerr phase,
//! - validity-bound checks (loss, Doppler, dephasing, adiabaticity).

pub mod config;
pub mod error;
pub mod fock;
pub mod params;
pub mod propagation;
pub mod protocol;
pub mod quad;
pub mod states;
pub mod transfer;

pub use config::RunConfig;
pub use error::{Error, ErrorCategory, Result};
pub use fock::{apply_kerr_fock, to_fock, FockVector};
pub use params::{
    group_velocity, mixing_angle, transit_time, ChannelConfig, CollisionMatrix, ControlProfile,
    PhysicalParams, ProfileShape, TransferPlan,
};
pub use propagation::{integrate, validity_check, EnvelopeGrid, GridSpec, InputPulse, ValidityReport};
pub use protocol::{
    run_channel, sample_swap, split, swap, swap_fock, BellBasis, BellOutcome, SwapOutcome,
};
pub use states::{
    apply_kerr_symbolic, coherent_overlap, entanglement_entropy, project, CatBasis, CatSign,
    CoherentSuperposition,
};
pub use transfer::{
    calibrate_to_pi, gate_spec, phase_integrals, snap_self_phases, CalibrationKnob, KerrGateSpec,
    ModeOutput, PhaseIntegrals,
};
