//! Scenario evaluation: one config in, one report out, or one report per
//! sweep step.

pub mod config;
pub mod report;
pub mod sweep;

use std::path::PathBuf;

use thiserror::Error;

use crate::exec::{self, Execution};
use crate::netlang::{parse_network, Diagnostic};
use crate::network::{mach_zehnder_phase_preset, mach_zehnder_preset, Network};
use crate::physics::{doppler_shift, fractional_shift, k_factor, phase_coefficient};
use crate::state::unit_state;
use crate::stats::{
    detection_probabilities, fold_phase, required_quanta, sample_counts, StatsError,
    RNG_ALGORITHM,
};

pub use config::{NetworkSpec, Sampling, ScenarioConfig};
pub use report::{emit, OutputFormat, Report, ReportDocument, Units};
pub use sweep::{Scale, SweepParameter, SweepSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("{key}: {message}")]
    Config { key: String, message: String },
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}:\n{}", path.display(), render(diagnostics))]
    Netlang {
        path: PathBuf,
        diagnostics: Vec<Diagnostic>,
    },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{parameter} = {value:?}: {source}")]
    Step {
        parameter: String,
        value: f64,
        source: Box<ScenarioError>,
    },
}

fn render(diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

impl ScenarioError {
    /// 1 for configuration and parse problems, 2 for numerical or
    /// validation failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config { .. }
            | ScenarioError::Io { .. }
            | ScenarioError::Netlang { .. } => 1,
            ScenarioError::Stats(_) => 2,
            ScenarioError::Step { source, .. } => source.exit_code(),
        }
    }
}

struct Evaluation {
    report: Report,
    detectors: Vec<String>,
}

/// The scenario's network and, for the preset, the phase applied in its arm.
fn build_network(config: &ScenarioConfig) -> Result<Option<(Network, Option<f64>)>, ScenarioError> {
    let network = match &config.network {
        None => return Ok(None),
        Some(NetworkSpec::MachZehnder {
            delta_phase: Some(p),
        }) => mach_zehnder_phase_preset(*p),
        Some(NetworkSpec::MachZehnder { delta_phase: None }) => {
            let beam = config.beam.ok_or_else(|| ScenarioError::Config {
                key: "beam".into(),
                message: "required by the rotating-object arm".into(),
            })?;
            mach_zehnder_preset(config.body, beam)
        }
        Some(NetworkSpec::File { path, text }) => {
            let net = parse_network(text, Some(&config.body), config.beam.as_ref()).map_err(
                |diagnostics| ScenarioError::Netlang {
                    path: path.clone(),
                    diagnostics,
                },
            )?;
            return Ok(Some((net, None)));
        }
    };
    let arm = network.elements()[1].phase();
    Ok(Some((network, arm)))
}

fn evaluate(config: &ScenarioConfig, seed_offset: u64) -> Result<Evaluation, ScenarioError> {
    let body = &config.body;
    let mut report = Report {
        parameter: None,
        k_factor: k_factor(body),
        fractional_shift: fractional_shift(body),
        phase_coefficient: phase_coefficient(body),
        doppler_shift_rad_s: None,
        delta_phase_rad: None,
        p_d1: None,
        p_d2: None,
        counts_d1: None,
        counts_d2: None,
        required_quanta: None,
        seed: None,
    };
    if let (Some(geometry), Some(beam)) = (&config.geometry, &config.beam) {
        report.doppler_shift_rad_s = Some(doppler_shift(body, geometry, beam));
    }

    let mut detectors = Vec::new();
    if let Some((network, arm_phase)) = build_network(config)? {
        report.delta_phase_rad = arm_phase;
        let probs = detection_probabilities(&network, &unit_state(network.source().clone()))?;
        detectors = probs.entries().iter().map(|(n, _)| n.clone()).collect();
        report.p_d1 = probs.entries().first().map(|(_, p)| *p);
        report.p_d2 = probs.entries().get(1).map(|(_, p)| *p);
        if let Some(sampling) = config.sampling {
            let seed = sampling.seed.wrapping_add(seed_offset);
            let sample = sample_counts(&probs, sampling.shots, seed);
            report.counts_d1 = sample.counts.first().map(|(_, c)| *c);
            report.counts_d2 = sample.counts.get(1).map(|(_, c)| *c);
            report.seed = Some(seed);
        }
    }

    if let (Some(z), Some(phase)) = (config.z, config.feasibility_phase()) {
        report.required_quanta = match required_quanta(fold_phase(phase), z) {
            Ok(n) => Some(n),
            Err(StatsError::ZeroSignal) => None,
            Err(e) => return Err(e.into()),
        };
    }

    Ok(Evaluation { report, detectors })
}

/// Evaluates one scenario.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Report, ScenarioError> {
    evaluate(config, 0).map(|e| e.report)
}

/// Evaluates one report per grid value, in grid order. Step `k` samples with
/// seed `seed + k`, so results do not depend on `execution`.
pub fn run_sweep_with(
    config: &ScenarioConfig,
    sweep: &SweepSpec,
    execution: Execution,
) -> Result<Vec<(f64, Report)>, ScenarioError> {
    Ok(sweep_evaluations(config, sweep, execution)?
        .into_iter()
        .map(|(v, e)| (v, e.report))
        .collect())
}

/// [`run_sweep_with`] using the default execution.
pub fn run_sweep(
    config: &ScenarioConfig,
    sweep: &SweepSpec,
) -> Result<Vec<(f64, Report)>, ScenarioError> {
    run_sweep_with(config, sweep, Execution::default())
}

fn sweep_evaluations(
    config: &ScenarioConfig,
    sweep: &SweepSpec,
    execution: Execution,
) -> Result<Vec<(f64, Evaluation)>, ScenarioError> {
    sweep.check_compatible(config)?;
    let values = sweep.values();
    let results = exec::map_indexed(values.len(), execution, |k| {
        let value = values[k];
        sweep
            .apply(config, value)
            .and_then(|c| evaluate(&c, k as u64))
            .map(|mut e| {
                e.report.parameter = Some(value);
                (value, e)
            })
            .map_err(|source| ScenarioError::Step {
                parameter: sweep.parameter.name().to_string(),
                value,
                source: Box::new(source),
            })
    });
    results.into_iter().collect()
}

/// Output document for a single scenario.
pub fn scenario_document(config: &ScenarioConfig) -> Result<ReportDocument, ScenarioError> {
    let e = evaluate(config, 0)?;
    Ok(ReportDocument {
        parameter_name: None,
        detectors: e.detectors,
        rng: RNG_ALGORITHM.to_string(),
        units: Units::new(None),
        rows: vec![e.report],
    })
}

/// Output document for a sweep.
pub fn sweep_document(
    config: &ScenarioConfig,
    sweep: &SweepSpec,
    execution: Execution,
) -> Result<ReportDocument, ScenarioError> {
    let evaluations = sweep_evaluations(config, sweep, execution)?;
    let detectors = evaluations
        .first()
        .map(|(_, e)| e.detectors.clone())
        .unwrap_or_default();
    Ok(ReportDocument {
        parameter_name: Some(sweep.parameter.name().to_string()),
        detectors,
        rng: RNG_ALGORITHM.to_string(),
        units: Units::new(Some(sweep.parameter.unit())),
        rows: evaluations.into_iter().map(|(_, e)| e.report).collect(),
    })
}
