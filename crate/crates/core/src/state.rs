//! Single-quantum pure states over named beam modes.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Complex amplitude of one mode.
pub type Amplitude = Complex64;

/// Allowed deviation of `Σ|α|²` from one.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Per-component tolerance for amplitude comparisons.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("invalid mode label {0:?}: expected [A-Za-z][A-Za-z0-9_]*")]
    Label(String),
    #[error("amplitude of mode {0} is not finite")]
    NonFinite(ModeLabel),
    #[error("state norm² is {0}, expected 1")]
    NotNormalized(f64),
}

/// Name of a beam path, e.g. `a` … `e` in a Mach-Zehnder layout.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel(String);

impl ModeLabel {
    pub fn new(name: impl Into<String>) -> Result<Self, StateError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(Self(name))
        } else {
            Err(StateError::Label(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `[A-Za-z][A-Za-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A normalized superposition over modes. Absent modes carry zero amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: BTreeMap<ModeLabel, Amplitude>,
}

impl PureState {
    pub fn new(
        amplitudes: impl IntoIterator<Item = (ModeLabel, Amplitude)>,
    ) -> Result<Self, StateError> {
        let state = Self::from_raw(amplitudes)?;
        state.check_norm()?;
        Ok(state)
    }

    /// Builds without the normalization check; finiteness is still enforced.
    pub(crate) fn from_raw(
        amplitudes: impl IntoIterator<Item = (ModeLabel, Amplitude)>,
    ) -> Result<Self, StateError> {
        let mut map = BTreeMap::new();
        for (mode, amp) in amplitudes {
            if !(amp.re.is_finite() && amp.im.is_finite()) {
                return Err(StateError::NonFinite(mode));
            }
            let entry = map.entry(mode).or_insert(Amplitude::new(0.0, 0.0));
            *entry += amp;
        }
        map.retain(|_, a: &mut Amplitude| a.norm_sqr() != 0.0);
        Ok(Self { amplitudes: map })
    }

    pub(crate) fn check_norm(&self) -> Result<(), StateError> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(StateError::NotNormalized(n));
        }
        Ok(())
    }

    /// `Σ|α|²` over all modes.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Nonzero amplitudes, ordered by mode label.
    pub fn iter(&self) -> impl Iterator<Item = (&ModeLabel, &Amplitude)> {
        self.amplitudes.iter()
    }

    pub fn modes(&self) -> impl Iterator<Item = &ModeLabel> {
        self.amplitudes.keys()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Multiplies every amplitude by `e^{iφ}`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let factor = Amplitude::from_polar(1.0, phase);
        Self {
            amplitudes: self
                .amplitudes
                .iter()
                .map(|(m, a)| (m.clone(), a * factor))
                .collect(),
        }
    }

    /// Largest per-component difference between two states.
    pub fn max_deviation(&self, other: &PureState) -> f64 {
        let zero = Amplitude::new(0.0, 0.0);
        self.amplitudes
            .keys()
            .chain(other.amplitudes.keys())
            .map(|m| {
                let a = self.amplitudes.get(m).unwrap_or(&zero);
                let b = other.amplitudes.get(m).unwrap_or(&zero);
                (a.re - b.re).abs().max((a.im - b.im).abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &PureState, tolerance: f64) -> bool {
        self.max_deviation(other) <= tolerance
    }

    pub(crate) fn into_map(self) -> BTreeMap<ModeLabel, Amplitude> {
        self.amplitudes
    }
}

/// Basis state with amplitude 1 on `mode`.
pub fn unit_state(mode: ModeLabel) -> PureState {
    let mut amplitudes = BTreeMap::new();
    amplitudes.insert(mode, Amplitude::new(1.0, 0.0));
    PureState { amplitudes }
}

/// Inner product of the basis vector for `reference_mode` with `state`.
pub fn overlap(reference_mode: &ModeLabel, state: &PureState) -> Amplitude {
    state
        .amplitudes
        .get(reference_mode)
        .copied()
        .unwrap_or(Amplitude::new(0.0, 0.0))
}

/// `|(m, ψ)|²`
pub fn probability(reference_mode: &ModeLabel, state: &PureState) -> f64 {
    overlap(reference_mode, state).norm_sqr()
}
