//! Lossless optical networks propagated by successive substitution of modes.
//!
//! Phase convention for a 50/50 splitter: the transmitted amplitude is
//! multiplied by `1/√2` and the reflected one by `i/√2`. For a splitter with
//! outputs `(t, r)` the first input maps to `(t + i·r)/√2` and the second input
//! to `(r + i·t)/√2`. Mirrors impart no phase. Other texts use a symmetric or
//! a `±1` reflection convention; results in this crate are only comparable to
//! ones that use the same convention.
//!
//! Two routes exist through a network: [`propagate`] rewrites the sparse
//! amplitude map element by element, and [`compose_unitary`] multiplies dense
//! per-element transfer matrices. They are kept independent so that each can
//! serve as an oracle for the other.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::physics::{parallel_flyby_shift, BeamSource, RotatingBody};
use crate::state::{
    is_identifier, Amplitude, ModeLabel, PureState, StateError, AMPLITUDE_TOLERANCE,
    NORM_TOLERANCE,
};

/// Maximum entry of `M†M − I` accepted for a transfer matrix.
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

/// Writer recorded for amplitude injected at the network source.
pub const SOURCE_WRITER: &str = "source";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("mode {0} declared more than once")]
    DuplicateMode(ModeLabel),
    #[error("element name {0} used more than once")]
    DuplicateElement(String),
    #[error("invalid element name {0:?}")]
    ElementName(String),
    #[error("{owner}: mode {mode} is not declared")]
    UndeclaredMode { owner: String, mode: ModeLabel },
    #[error("{0}: splitter outputs must differ")]
    SplitterOutputs(String),
    #[error("{0}: splitter inputs must differ")]
    SplitterInputs(String),
    #[error("{0}: phase must be finite")]
    NonFinitePhase(String),
    #[error("detector {0} declared more than once")]
    DuplicateDetector(String),
    #[error("detectors {first} and {second} both watch mode {mode}")]
    SharedDetectorMode {
        first: String,
        second: String,
        mode: ModeLabel,
    },
    #[error("{overwriter} overwrites live amplitude on mode {mode} written by {writer}")]
    SingleAssignment {
        mode: ModeLabel,
        writer: String,
        overwriter: String,
    },
    #[error("{element}: output mode {mode} already holds amplitude")]
    Occupied { element: String, mode: ModeLabel },
    #[error("{element}: transfer matrix is not unitary (max |M†M − I| = {deviation:e})")]
    NonUnitary { element: String, deviation: f64 },
    #[error("{element}: {source}")]
    State {
        element: String,
        #[source]
        source: StateError,
    },
    #[error("initial state has amplitude on undeclared mode {0}")]
    InitialOffNetwork(ModeLabel),
}

/// A lossless optical element acting on named modes.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    /// 50/50 splitter with one or two inputs. A single-input splitter has an
    /// implicit vacuum second port.
    BeamSplitter {
        name: String,
        input: ModeLabel,
        second_input: Option<ModeLabel>,
        transmit_out: ModeLabel,
        reflect_out: ModeLabel,
    },
    Mirror {
        name: String,
        input: ModeLabel,
        output: ModeLabel,
    },
    PhaseShifter {
        name: String,
        mode: ModeLabel,
        phase: f64,
    },
    /// Beam path running parallel to the rotation axis of a heavy rotating
    /// object; acts as a phase shifter with phase `8ΩRω/c`.
    RotatingObjectSegment {
        name: String,
        mode: ModeLabel,
        body: RotatingBody,
        beam: BeamSource,
    },
}

impl Element {
    pub fn name(&self) -> &str {
        match self {
            Element::BeamSplitter { name, .. }
            | Element::Mirror { name, .. }
            | Element::PhaseShifter { name, .. }
            | Element::RotatingObjectSegment { name, .. } => name,
        }
    }

    pub fn inputs(&self) -> Vec<&ModeLabel> {
        match self {
            Element::BeamSplitter {
                input,
                second_input,
                ..
            } => std::iter::once(input).chain(second_input.as_ref()).collect(),
            Element::Mirror { input, .. } => vec![input],
            Element::PhaseShifter { mode, .. } | Element::RotatingObjectSegment { mode, .. } => {
                vec![mode]
            }
        }
    }

    pub fn outputs(&self) -> Vec<&ModeLabel> {
        match self {
            Element::BeamSplitter {
                transmit_out,
                reflect_out,
                ..
            } => vec![transmit_out, reflect_out],
            Element::Mirror { output, .. } => vec![output],
            Element::PhaseShifter { mode, .. } | Element::RotatingObjectSegment { mode, .. } => {
                vec![mode]
            }
        }
    }

    /// Phase applied by phase-type elements, reduced to `[0, 2π)`.
    pub fn phase(&self) -> Option<f64> {
        match self {
            Element::PhaseShifter { phase, .. } => Some(phase.rem_euclid(2.0 * PI)),
            Element::RotatingObjectSegment { body, beam, .. } => {
                Some(parallel_flyby_shift(body, beam).rem_euclid(2.0 * PI))
            }
            _ => None,
        }
    }

    /// Elements that move amplitude between modes, as opposed to phase-only ones.
    fn routes(&self) -> bool {
        matches!(self, Element::BeamSplitter { .. } | Element::Mirror { .. })
    }

    fn local_errors(&self) -> Vec<NetworkError> {
        let mut errors = Vec::new();
        if !is_identifier(self.name()) {
            errors.push(NetworkError::ElementName(self.name().to_string()));
        }
        match self {
            Element::BeamSplitter {
                name,
                input,
                second_input,
                transmit_out,
                reflect_out,
            } => {
                if transmit_out == reflect_out {
                    errors.push(NetworkError::SplitterOutputs(name.clone()));
                }
                if second_input.as_ref() == Some(input) {
                    errors.push(NetworkError::SplitterInputs(name.clone()));
                }
            }
            Element::PhaseShifter { name, phase, .. } if !phase.is_finite() => {
                errors.push(NetworkError::NonFinitePhase(name.clone()));
            }
            _ => {}
        }
        errors
    }
}

/// A validated interferometer: declared modes, a source, elements applied in
/// list order, and named detectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    modes: Vec<ModeLabel>,
    source: ModeLabel,
    elements: Vec<Element>,
    detectors: Vec<(String, ModeLabel)>,
}

impl Network {
    pub fn new(
        modes: Vec<ModeLabel>,
        source: ModeLabel,
        elements: Vec<Element>,
        detectors: Vec<(String, ModeLabel)>,
    ) -> Result<Self, NetworkError> {
        match check(&modes, &source, &elements, &detectors).into_iter().next() {
            Some(e) => Err(e),
            None => Ok(Self {
                modes,
                source,
                elements,
                detectors,
            }),
        }
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn source(&self) -> &ModeLabel {
        &self.source
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Detector name and watched mode, in declaration order.
    pub fn detectors(&self) -> &[(String, ModeLabel)] {
        &self.detectors
    }
}

/// All validation errors for a prospective network. Structural errors are
/// reported first; the unitarity check only runs on a structurally sound
/// network.
pub(crate) fn check(
    modes: &[ModeLabel],
    source: &ModeLabel,
    elements: &[Element],
    detectors: &[(String, ModeLabel)],
) -> Vec<NetworkError> {
    let mut errors = Vec::new();

    let mut declared = HashSet::new();
    for m in modes {
        if !declared.insert(m) {
            errors.push(NetworkError::DuplicateMode(m.clone()));
        }
    }
    let require = |owner: &str, mode: &ModeLabel, errors: &mut Vec<NetworkError>| {
        if !declared.contains(mode) {
            errors.push(NetworkError::UndeclaredMode {
                owner: owner.to_string(),
                mode: mode.clone(),
            });
        }
    };
    require(SOURCE_WRITER, source, &mut errors);

    let mut names = HashSet::new();
    for e in elements {
        if !names.insert(e.name()) {
            errors.push(NetworkError::DuplicateElement(e.name().to_string()));
        }
        errors.extend(e.local_errors());
        let mut seen = HashSet::new();
        for m in e.inputs().into_iter().chain(e.outputs()) {
            if seen.insert(m) {
                require(e.name(), m, &mut errors);
            }
        }
    }

    let mut detector_names = HashSet::new();
    let mut watched: HashMap<&ModeLabel, &str> = HashMap::new();
    for (name, mode) in detectors {
        if !is_identifier(name) {
            errors.push(NetworkError::ElementName(name.clone()));
        }
        if !detector_names.insert(name) {
            errors.push(NetworkError::DuplicateDetector(name.clone()));
        }
        require(name, mode, &mut errors);
        if let Some(first) = watched.insert(mode, name) {
            errors.push(NetworkError::SharedDetectorMode {
                first: first.to_string(),
                second: name.clone(),
                mode: mode.clone(),
            });
        }
    }

    errors.extend(single_assignment_violations(source, elements));

    if errors.is_empty() {
        if let Err(e) = compose_elements(modes, elements) {
            errors.push(e);
        }
    }
    errors
}

/// Static check that no routing element writes a mode which still carries
/// amplitude from an earlier writer. A mode is live from the moment it is
/// written (or is the source) until a routing element consumes it as input.
pub(crate) fn single_assignment_violations(
    source: &ModeLabel,
    elements: &[Element],
) -> Vec<NetworkError> {
    let mut live: HashMap<&ModeLabel, &str> = HashMap::new();
    live.insert(source, SOURCE_WRITER);
    let mut violations = Vec::new();
    for e in elements.iter().filter(|e| e.routes()) {
        for input in e.inputs() {
            live.remove(input);
        }
        for out in e.outputs() {
            if let Some(writer) = live.insert(out, e.name()) {
                violations.push(NetworkError::SingleAssignment {
                    mode: out.clone(),
                    writer: writer.to_string(),
                    overwriter: e.name().to_string(),
                });
            }
        }
    }
    violations
}

fn wrap_state(element: &Element) -> impl FnOnce(StateError) -> NetworkError + '_ {
    move |source| NetworkError::State {
        element: element.name().to_string(),
        source,
    }
}

/// Applies one element to a state by rewriting its amplitude map.
pub fn apply_element(state: &PureState, element: &Element) -> Result<PureState, NetworkError> {
    let mut amps: BTreeMap<ModeLabel, Amplitude> = state.clone().into_map();
    let zero = Amplitude::new(0.0, 0.0);
    let inputs = element.inputs();

    let occupied_check = |amps: &BTreeMap<ModeLabel, Amplitude>, out: &ModeLabel| {
        let held = amps.get(out).copied().unwrap_or(zero);
        if !inputs.contains(&out) && held.norm() > AMPLITUDE_TOLERANCE {
            Err(NetworkError::Occupied {
                element: element.name().to_string(),
                mode: out.clone(),
            })
        } else {
            Ok(())
        }
    };

    match element {
        Element::BeamSplitter {
            input,
            second_input,
            transmit_out,
            reflect_out,
            ..
        } => {
            occupied_check(&amps, transmit_out)?;
            occupied_check(&amps, reflect_out)?;
            let first = amps.remove(input).unwrap_or(zero);
            let second = second_input
                .as_ref()
                .and_then(|m| amps.remove(m))
                .unwrap_or(zero);
            let i = Amplitude::i();
            *amps.entry(transmit_out.clone()).or_insert(zero) +=
                (first + i * second) * FRAC_1_SQRT_2;
            *amps.entry(reflect_out.clone()).or_insert(zero) +=
                (i * first + second) * FRAC_1_SQRT_2;
        }
        Element::Mirror { input, output, .. } => {
            occupied_check(&amps, output)?;
            if let Some(a) = amps.remove(input) {
                *amps.entry(output.clone()).or_insert(zero) += a;
            }
        }
        Element::PhaseShifter { mode, .. } | Element::RotatingObjectSegment { mode, .. } => {
            let phase = element.phase().expect("phase element");
            if let Some(a) = amps.get_mut(mode) {
                *a *= Amplitude::from_polar(1.0, phase);
            }
        }
    }

    let next = PureState::from_raw(amps).map_err(wrap_state(element))?;
    if (next.norm_sqr() - state.norm_sqr()).abs() > NORM_TOLERANCE {
        return Err(NetworkError::State {
            element: element.name().to_string(),
            source: StateError::NotNormalized(next.norm_sqr()),
        });
    }
    Ok(next)
}

/// Folds [`apply_element`] over the network's elements in order.
pub fn propagate(network: &Network, initial: &PureState) -> Result<PureState, NetworkError> {
    if let Some(m) = initial.modes().find(|m| !network.modes.contains(m)) {
        return Err(NetworkError::InitialOffNetwork(m.clone()));
    }
    let mut state = initial.clone();
    for element in &network.elements {
        state = apply_element(&state, element)?;
        state.check_norm().map_err(wrap_state(element))?;
    }
    Ok(state)
}

/// Closed-form output of the two-splitter interferometer for a phase `Δ` in
/// one arm: `ψ = i((e^{iΔ}+1)/2) d + ((e^{iΔ}−1)/2) e`.
pub fn mach_zehnder_output(delta_phase: f64) -> PureState {
    let rot = Amplitude::from_polar(1.0, delta_phase);
    let one = Amplitude::new(1.0, 0.0);
    let d = Amplitude::i() * (rot + one) / 2.0;
    let e = (rot - one) / 2.0;
    PureState::from_raw([(label("d"), d), (label("e"), e)]).expect("finite phase")
}

fn label(s: &str) -> ModeLabel {
    ModeLabel::new(s).expect("static label")
}

/// Dense transfer matrix over a network's declared modes; column `j` is the
/// image of basis mode `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    modes: Vec<ModeLabel>,
    matrix: DMatrix<Amplitude>,
}

impl TransferMatrix {
    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn matrix(&self) -> &DMatrix<Amplitude> {
        &self.matrix
    }

    /// Entry mapping amplitude of `from` into `to`.
    pub fn entry(&self, to: &ModeLabel, from: &ModeLabel) -> Option<Amplitude> {
        let r = self.modes.iter().position(|m| m == to)?;
        let c = self.modes.iter().position(|m| m == from)?;
        Some(self.matrix[(r, c)])
    }

    /// Max entry of `M†M − I`.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }

    /// Matrix-vector product on the declared modes.
    pub fn apply(&self, state: &PureState) -> Result<PureState, NetworkError> {
        let n = self.modes.len();
        let mut v = nalgebra::DVector::from_element(n, Amplitude::new(0.0, 0.0));
        for (m, a) in state.iter() {
            let k = self
                .modes
                .iter()
                .position(|x| x == m)
                .ok_or_else(|| NetworkError::InitialOffNetwork(m.clone()))?;
            v[k] = *a;
        }
        let out = &self.matrix * v;
        PureState::from_raw(self.modes.iter().cloned().zip(out.iter().copied())).map_err(|source| {
            NetworkError::State {
                element: "transfer matrix".to_string(),
                source,
            }
        })
    }
}

fn unitarity_deviation(m: &DMatrix<Amplitude>) -> f64 {
    let gram = m.adjoint() * m;
    let n = gram.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((gram[(r, c)] - Amplitude::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Product of per-element transfer matrices in application order.
pub fn compose_unitary(network: &Network) -> Result<TransferMatrix, NetworkError> {
    compose_elements(&network.modes, &network.elements)
}

fn compose_elements(
    modes: &[ModeLabel],
    elements: &[Element],
) -> Result<TransferMatrix, NetworkError> {
    let index: HashMap<&ModeLabel, usize> = modes.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let n = modes.len();
    let mut total = DMatrix::<Amplitude>::identity(n, n);
    for element in elements {
        let m = element_matrix(element, &index, n);
        let deviation = unitarity_deviation(&m);
        if deviation.is_nan() || deviation > UNITARITY_TOLERANCE {
            return Err(NetworkError::NonUnitary {
                element: element.name().to_string(),
                deviation,
            });
        }
        total = m * total;
    }
    let composed = TransferMatrix {
        modes: modes.to_vec(),
        matrix: total,
    };
    let deviation = composed.unitarity_deviation();
    if deviation.is_nan() || deviation > UNITARITY_TOLERANCE {
        return Err(NetworkError::NonUnitary {
            element: "network".to_string(),
            deviation,
        });
    }
    Ok(composed)
}

/// Transfer matrix of one element embedded in the identity.
///
/// A splitter acts on the set `U` of its input and output modes. Its 2×2 block
/// maps the first input and a second port onto `(t, r)`; for a single-input
/// splitter the second port is the first of `t`, `r` that differs from the
/// input (the vacuum port). The remaining modes of `U` are permuted onto the
/// vacated modes so the full matrix stays unitary; on states that pass the
/// occupancy check those entries only ever see zero amplitude.
fn element_matrix(
    element: &Element,
    index: &HashMap<&ModeLabel, usize>,
    n: usize,
) -> DMatrix<Amplitude> {
    let zero = Amplitude::new(0.0, 0.0);
    let one = Amplitude::new(1.0, 0.0);
    let mut m = DMatrix::<Amplitude>::identity(n, n);
    let idx = |mode: &ModeLabel| index[mode];

    match element {
        Element::BeamSplitter {
            input,
            second_input,
            transmit_out,
            reflect_out,
            ..
        } => {
            let port2 = second_input.clone().unwrap_or_else(|| {
                if transmit_out != input {
                    transmit_out.clone()
                } else {
                    reflect_out.clone()
                }
            });
            let mut span: Vec<&ModeLabel> = Vec::new();
            for mode in [input, &port2, transmit_out, reflect_out] {
                if !span.contains(&mode) {
                    span.push(mode);
                }
            }
            for &col in &span {
                for &row in &span {
                    m[(idx(row), idx(col))] = zero;
                }
            }
            let t = idx(transmit_out);
            let r = idx(reflect_out);
            let s = Amplitude::new(FRAC_1_SQRT_2, 0.0);
            let si = Amplitude::new(0.0, FRAC_1_SQRT_2);
            m[(t, idx(input))] = s;
            m[(r, idx(input))] = si;
            m[(r, idx(&port2))] = s;
            m[(t, idx(&port2))] = si;

            let domain = span.iter().filter(|x| **x != input && **x != &port2);
            let codomain = span
                .iter()
                .filter(|x| **x != transmit_out && **x != reflect_out);
            for (from, to) in domain.zip(codomain) {
                m[(idx(to), idx(from))] = one;
            }
        }
        Element::Mirror { input, output, .. } => {
            if input != output {
                let (i, o) = (idx(input), idx(output));
                m[(i, i)] = zero;
                m[(o, o)] = zero;
                m[(o, i)] = one;
                m[(i, o)] = one;
            }
        }
        Element::PhaseShifter { mode, .. } | Element::RotatingObjectSegment { mode, .. } => {
            let phase = element.phase().expect("phase element");
            let k = idx(mode);
            m[(k, k)] = Amplitude::from_polar(1.0, phase);
        }
    }
    m
}

fn mach_zehnder_with(arm: Element) -> Network {
    let modes = ["a", "b", "c", "d", "e"].map(label).to_vec();
    let elements = vec![
        Element::BeamSplitter {
            name: "S1".into(),
            input: label("a"),
            second_input: None,
            transmit_out: label("b"),
            reflect_out: label("c"),
        },
        arm,
        Element::Mirror {
            name: "M1".into(),
            input: label("b"),
            output: label("b"),
        },
        Element::Mirror {
            name: "M2".into(),
            input: label("c"),
            output: label("c"),
        },
        Element::BeamSplitter {
            name: "S2".into(),
            input: label("b"),
            second_input: Some(label("c")),
            transmit_out: label("e"),
            reflect_out: label("d"),
        },
    ];
    let detectors = vec![("D1".to_string(), label("d")), ("D2".to_string(), label("e"))];
    Network::new(modes, label("a"), elements, detectors).expect("preset is valid")
}

/// Two-splitter interferometer with the rotating object `O` in arm `b`.
/// Detector `D1` watches `d`, `D2` watches `e`.
pub fn mach_zehnder_preset(body: RotatingBody, beam: BeamSource) -> Network {
    mach_zehnder_with(Element::RotatingObjectSegment {
        name: "O".into(),
        mode: label("b"),
        body,
        beam,
    })
}

/// Same topology as [`mach_zehnder_preset`] with a plain phase shifter `O`.
pub fn mach_zehnder_phase_preset(delta_phase: f64) -> Network {
    mach_zehnder_with(Element::PhaseShifter {
        name: "O".into(),
        mode: label("b"),
        phase: delta_phase,
    })
}

/// Michelson layout unfolded into a Mach-Zehnder: the beam crosses the
/// rotating object twice (out and back), so the arm phase is `2Δω`. Not backed
/// by a closed form of its own.
#[cfg(feature = "extrapolation")]
pub fn michelson_double_pass_preset(body: RotatingBody, beam: BeamSource) -> Network {
    let mut net = mach_zehnder_preset(body, beam);
    net.elements.insert(
        2,
        Element::RotatingObjectSegment {
            name: "O_return".into(),
            mode: label("b"),
            body,
            beam,
        },
    );
    net
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{overlap, probability, unit_state};

    fn m(s: &str) -> ModeLabel {
        label(s)
    }

    fn bs(name: &str, input: &str, second: Option<&str>, t: &str, r: &str) -> Element {
        Element::BeamSplitter {
            name: name.into(),
            input: m(input),
            second_input: second.map(m),
            transmit_out: m(t),
            reflect_out: m(r),
        }
    }

    #[test]
    fn first_splitter_substitution() {
        let out = apply_element(&unit_state(m("a")), &bs("S1", "a", None, "b", "c")).unwrap();
        let expected = PureState::new([
            (m("b"), Amplitude::new(FRAC_1_SQRT_2, 0.0)),
            (m("c"), Amplitude::new(0.0, FRAC_1_SQRT_2)),
        ])
        .unwrap();
        assert!(out.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn zero_phase_is_identity() {
        let s = mach_zehnder_output(0.7);
        let p = Element::PhaseShifter {
            name: "P".into(),
            mode: m("d"),
            phase: 0.0,
        };
        assert_eq!(apply_element(&s, &p).unwrap(), s);
    }

    #[test]
    fn second_splitter_matches_closed_form() {
        let s2 = bs("S2", "b", Some("c"), "e", "d");
        for k in 0..50 {
            let delta = k as f64 * 0.13;
            let before = PureState::new([
                (m("b"), Amplitude::from_polar(FRAC_1_SQRT_2, delta)),
                (m("c"), Amplitude::new(0.0, FRAC_1_SQRT_2)),
            ])
            .unwrap();
            let after = apply_element(&before, &s2).unwrap();
            assert!(after.approx_eq(&mach_zehnder_output(delta), 1e-12));
        }
    }

    #[test]
    fn closed_form_endpoints() {
        let zero = mach_zehnder_output(0.0);
        assert!(zero.approx_eq(
            &PureState::new([(m("d"), Amplitude::i())]).unwrap(),
            1e-15
        ));
        let pi = mach_zehnder_output(PI);
        assert!(pi.approx_eq(
            &PureState::new([(m("e"), Amplitude::new(-1.0, 0.0))]).unwrap(),
            1e-15
        ));
        let half = mach_zehnder_output(PI / 2.0);
        assert!((probability(&m("d"), &half) - 0.5).abs() < 1e-15);
        assert!((probability(&m("e"), &half) - 0.5).abs() < 1e-15);
        // Δ = 0: amplitude on d is i
        assert!((overlap(&m("d"), &zero) - Amplitude::i()).norm() < 1e-15);
        assert_eq!(overlap(&m("e"), &zero), Amplitude::new(0.0, 0.0));
    }

    #[test]
    fn empty_network_is_identity() {
        let net = Network::new(vec![m("a"), m("b")], m("a"), vec![], vec![]).unwrap();
        let s = unit_state(m("a"));
        assert_eq!(propagate(&net, &s).unwrap(), s);
        let u = compose_unitary(&net).unwrap();
        assert_eq!(u.matrix(), &DMatrix::identity(2, 2));
    }

    #[test]
    fn single_splitter_block() {
        let net = Network::new(
            vec![m("a"), m("b"), m("x")],
            m("a"),
            vec![bs("S", "a", None, "a", "b")],
            vec![],
        )
        .unwrap();
        let u = compose_unitary(&net).unwrap();
        let s = FRAC_1_SQRT_2;
        let expect = |to: &str, from: &str, want: Amplitude| {
            let got = u.entry(&m(to), &m(from)).unwrap();
            assert!((got - want).norm() < 1e-15, "{to}<-{from}: {got}");
        };
        expect("a", "a", Amplitude::new(s, 0.0));
        expect("a", "b", Amplitude::new(0.0, s));
        expect("b", "a", Amplitude::new(0.0, s));
        expect("b", "b", Amplitude::new(s, 0.0));
        expect("x", "x", Amplitude::new(1.0, 0.0));
        expect("x", "a", Amplitude::new(0.0, 0.0));
    }

    #[test]
    fn preset_matches_matrix_and_closed_form() {
        for k in 0..20 {
            let delta = k as f64 * 0.31;
            let net = mach_zehnder_phase_preset(delta);
            let a = unit_state(m("a"));
            let direct = propagate(&net, &a).unwrap();
            assert!(direct.approx_eq(&mach_zehnder_output(delta), 1e-12));
            let u = compose_unitary(&net).unwrap();
            assert!(u.unitarity_deviation() < 1e-9);
            assert!(u.apply(&a).unwrap().approx_eq(&direct, 1e-12));
        }
    }

    #[test]
    fn zero_rotation_preset_goes_to_d() {
        let body = RotatingBody::new(0.0, 0.05).unwrap();
        let beam = BeamSource::new(1e15).unwrap();
        let out = propagate(&mach_zehnder_preset(body, beam), &unit_state(m("a"))).unwrap();
        assert!((probability(&m("d"), &out) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn runtime_occupancy_is_rejected() {
        let s = PureState::new([
            (m("a"), Amplitude::new(FRAC_1_SQRT_2, 0.0)),
            (m("b"), Amplitude::new(FRAC_1_SQRT_2, 0.0)),
        ])
        .unwrap();
        let err = apply_element(&s, &bs("S", "a", None, "b", "c")).unwrap_err();
        assert_eq!(
            err,
            NetworkError::Occupied {
                element: "S".into(),
                mode: m("b")
            }
        );
        // outputs that are also inputs pass through the element
        assert!(apply_element(&s, &bs("T", "a", Some("b"), "b", "a")).is_ok());
    }

    #[test]
    fn static_single_assignment() {
        let err = Network::new(
            vec![m("a"), m("b"), m("c"), m("d")],
            m("a"),
            vec![bs("S1", "a", None, "b", "c"), bs("S3", "a", None, "b", "d")],
            vec![],
        )
        .unwrap_err();
        assert_eq!(
            err,
            NetworkError::SingleAssignment {
                mode: m("b"),
                writer: "S1".into(),
                overwriter: "S3".into()
            }
        );
        let err = Network::new(
            vec![m("a"), m("b")],
            m("a"),
            vec![Element::Mirror {
                name: "M".into(),
                input: m("b"),
                output: m("a"),
            }],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, NetworkError::SingleAssignment { ref writer, .. } if writer == SOURCE_WRITER));
    }

    #[test]
    fn structural_errors() {
        let modes = vec![m("a"), m("b"), m("c")];
        let err = Network::new(
            modes.clone(),
            m("a"),
            vec![bs("S", "a", None, "b", "b")],
            vec![],
        )
        .unwrap_err();
        assert_eq!(err, NetworkError::SplitterOutputs("S".into()));
        let err = Network::new(modes.clone(), m("z"), vec![], vec![]).unwrap_err();
        assert!(matches!(err, NetworkError::UndeclaredMode { .. }));
        let err = Network::new(
            modes.clone(),
            m("a"),
            vec![],
            vec![("D".into(), m("b")), ("E".into(), m("b"))],
        )
        .unwrap_err();
        assert!(matches!(err, NetworkError::SharedDetectorMode { .. }));
        let err = Network::new(
            vec![m("a"), m("a")],
            m("a"),
            vec![],
            vec![],
        )
        .unwrap_err();
        assert_eq!(err, NetworkError::DuplicateMode(m("a")));
    }

    #[cfg(feature = "extrapolation")]
    #[test]
    fn michelson_doubles_the_phase() {
        let body = RotatingBody::new(754.0, 0.05).unwrap();
        let beam = BeamSource::new(1.0e6).unwrap();
        let out = propagate(&michelson_double_pass_preset(body, beam), &unit_state(m("a"))).unwrap();
        let phase = 2.0 * parallel_flyby_shift(&body, &beam);
        assert!(out.approx_eq(&mach_zehnder_output(phase), 1e-9));
    }
}
