//! Flyby-anomaly frequency shifts and lossless interferometer simulation.
//!
//! - [`physics`]: rotating bodies, flyby geometry, the Doppler shift formula.
//! - [`state`]: normalized single-quantum states over named modes.
//! - [`network`]: optical elements, successive-substitution propagation and
//!   the dense transfer-matrix route used to cross-check it.
//! - [`netlang`]: the line-based `.ifo` network language.
//! - [`stats`]: detector probabilities, shot-noise sampling, feasibility.
//! - [`scenario`]: config files, sweeps and report output for the CLI.
//! - [`exec`]: rayon-backed batch evaluation with a sequential fallback.

pub mod exec;
pub mod netlang;
pub mod network;
pub mod physics;
pub mod scenario;
pub mod state;
pub mod stats;

pub use exec::Execution;
pub use netlang::{format_network, parse_network, Diagnostic, Severity};
pub use network::{
    apply_element, compose_unitary, mach_zehnder_output, mach_zehnder_phase_preset,
    mach_zehnder_preset, propagate, Element, Network, NetworkError, TransferMatrix,
};
pub use physics::{
    doppler_shift, fractional_shift, k_factor, parallel_flyby_shift, phase_coefficient,
    BeamSource, FlybyGeometry, PhysicalConstants, RotatingBody, SPEED_OF_LIGHT,
};
pub use state::{overlap, probability, unit_state, Amplitude, ModeLabel, PureState};
pub use stats::{
    detection_probabilities, probabilities_from_body, required_quanta, sample_counts,
    CountSample, DetectionProbabilities,
};
