//! Detector statistics: ideal probabilities, shot-noise realizations, and a
//! rough estimate of how many quanta resolve a phase.

use std::f64::consts::PI;
use std::num::NonZeroU64;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::network::{propagate, Network, NetworkError};
use crate::physics::{phase_coefficient, BeamSource, RotatingBody};
use crate::state::{probability, PureState, NORM_TOLERANCE};

/// Name of the generator behind [`sample_counts`], recorded in outputs.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9)";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("probability leakage: {0:e} of the probability ends outside the detectors")]
    Leakage(f64),
    #[error("unresolvable: zero signal")]
    ZeroSignal,
    #[error("phase {0} is outside (0, π]")]
    PhaseRange(f64),
    #[error("significance z must be positive and finite, got {0}")]
    Significance(f64),
}

/// Probability per detector, in detector declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionProbabilities {
    entries: Vec<(String, f64)>,
}

impl DetectionProbabilities {
    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn get(&self, detector: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(n, _)| n == detector)
            .map(|(_, p)| *p)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }
}

/// Detector counts for a finite number of quanta.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSample {
    pub counts: Vec<(String, u64)>,
    pub total: u64,
    pub seed: u64,
}

impl CountSample {
    pub fn get(&self, detector: &str) -> Option<u64> {
        self.counts
            .iter()
            .find(|(n, _)| n == detector)
            .map(|(_, c)| *c)
    }
}

/// `|(m, ψ)|²` for each detector mode of `network` after propagating `initial`.
///
/// Probability left on non-detector modes above the normalization tolerance
/// is reported as leakage; below it the detector values are renormalized.
pub fn detection_probabilities(
    network: &Network,
    initial: &PureState,
) -> Result<DetectionProbabilities, StatsError> {
    let out = propagate(network, initial)?;
    let entries: Vec<(String, f64)> = network
        .detectors()
        .iter()
        .map(|(name, mode)| (name.clone(), probability(mode, &out)))
        .collect();
    let detected: f64 = entries.iter().map(|(_, p)| p).sum();
    let leakage = out.norm_sqr() - detected;
    if leakage > NORM_TOLERANCE || detected == 0.0 {
        return Err(StatsError::Leakage(leakage));
    }
    Ok(DetectionProbabilities {
        entries: entries
            .into_iter()
            .map(|(n, p)| (n, p / detected))
            .collect(),
    })
}

/// `{D1: cos²(2Kω), D2: sin²(2Kω)}`, the argument reduced mod 2π first.
pub fn probabilities_from_body(body: &RotatingBody, beam: &BeamSource) -> DetectionProbabilities {
    let arg = (phase_coefficient(body) * beam.angular_frequency()).rem_euclid(2.0 * PI);
    let (s, c) = arg.sin_cos();
    DetectionProbabilities {
        entries: vec![("D1".to_string(), c * c), ("D2".to_string(), s * s)],
    }
}

/// Multinomial draw of `total` quanta over the detectors, as a chain of
/// conditional binomials. Deterministic for a fixed seed.
pub fn sample_counts(probs: &DetectionProbabilities, total: NonZeroU64, seed: u64) -> CountSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining = total.get();
    let mut mass = 1.0f64;
    let last = probs.entries.len().saturating_sub(1);
    let mut counts = Vec::with_capacity(probs.entries.len());
    for (k, (name, p)) in probs.entries.iter().enumerate() {
        let n = if k == last {
            remaining
        } else if remaining == 0 || mass <= 0.0 {
            0
        } else {
            let q = (p / mass).clamp(0.0, 1.0);
            Binomial::new(remaining, q)
                .expect("q in [0, 1]")
                .sample(&mut rng)
        };
        counts.push((name.clone(), n));
        remaining -= n;
        mass -= p;
    }
    CountSample {
        counts,
        total: total.get(),
        seed,
    }
}

/// Independent draws with seeds `seed, seed + 1, …`, so results do not depend
/// on how the runs are scheduled.
pub fn sample_runs(
    probs: &DetectionProbabilities,
    total: NonZeroU64,
    seed: u64,
    runs: usize,
    execution: Execution,
) -> Vec<CountSample> {
    exec::map_indexed(runs, execution, |k| {
        sample_counts(probs, total, seed.wrapping_add(k as u64))
    })
}

/// Smallest `N` with `N·p > z·√(N·p·(1−p))` for `p = sin²(Δ/2)`, i.e.
/// `N = ⌈z²(1−p)/p⌉`, at least one. Normal approximation; a planning number,
/// not a power calculation.
pub fn required_quanta(delta_phase: f64, z: f64) -> Result<u64, StatsError> {
    if !(z.is_finite() && z > 0.0) {
        return Err(StatsError::Significance(z));
    }
    if delta_phase == 0.0 {
        return Err(StatsError::ZeroSignal);
    }
    if !(delta_phase > 0.0 && delta_phase <= PI) {
        return Err(StatsError::PhaseRange(delta_phase));
    }
    let half = delta_phase / 2.0;
    let p = half.sin().powi(2);
    if p == 0.0 {
        return Err(StatsError::ZeroSignal);
    }
    let cos2 = half.cos().powi(2);
    let raw = z * z * cos2 / p;
    // (1-p)/p picks up a few ulps of rounding; snap values that are an
    // integer up to that noise before taking the ceiling.
    let nearest = raw.round();
    let n = if (raw - nearest).abs() <= 8.0 * f64::EPSILON * raw.max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    Ok(n.max(1.0).min(u64::MAX as f64) as u64)
}

/// Folds an arbitrary phase onto `[0, π]`, the range where `sin²(Δ/2)` is
/// single-valued.
pub fn fold_phase(delta_phase: f64) -> f64 {
    let r = delta_phase.rem_euclid(2.0 * PI);
    if r > PI {
        2.0 * PI - r
    } else {
        r
    }
}
