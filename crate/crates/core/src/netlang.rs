//! Line-based interferometer description language (`.ifo` files).
//!
//! ```text
//! mode a b c d e
//! source a
//! bs S1 a -> b c        # single input: a -> (b + i c)/√2
//! rotor O b
//! mirror M1 b -> b
//! mirror M2 c -> c
//! bs S2 b c -> e d      # b -> (e + i d)/√2, c -> (d + i e)/√2
//! detect D1 d
//! detect D2 e
//! ```
//!
//! Statements apply in file order. `phase` literals are radians. Parsing
//! collects every diagnostic in one pass instead of stopping at the first.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fmt::Write as _;

use crate::network::{self, Element, Network, NetworkError};
use crate::physics::{BeamSource, RotatingBody};
use crate::state::{is_identifier, ModeLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A located parser message; line and column are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl Diagnostic {
    fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
            severity: Severity::Error,
        }
    }

    fn warning(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
            severity: Severity::Warning,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.line, self.column, self.severity, self.message
        )
    }
}

/// Result of a parse, including warnings on success.
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub network: Option<Network>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (byte, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                tokens.push(Token {
                    text: &line[s..byte],
                    column: line[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(byte),
            _ => {}
        }
    }
    tokens
}

/// `[+-]?(digits[.digits?] | .digits)([eE][+-]?digits)?`
fn is_decimal_literal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if matches!(b.first(), Some(b'+' | b'-')) {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return false;
    }
    if i < b.len() && matches!(b[i], b'e' | b'E') {
        i += 1;
        if i < b.len() && matches!(b[i], b'+' | b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == b.len()
}

/// A mode reference and where it appeared.
#[derive(Debug, Clone)]
struct ModeRef {
    label: ModeLabel,
    line: usize,
    column: usize,
}

#[derive(Debug)]
struct Statement {
    line: usize,
    name_column: usize,
    element: Element,
    refs: Vec<ModeRef>,
}

#[derive(Default)]
struct Collector {
    diagnostics: Vec<Diagnostic>,
    modes: Vec<ModeRef>,
    source: Option<ModeRef>,
    elements: Vec<Statement>,
    detectors: Vec<(String, ModeRef, usize)>,
}

impl Collector {
    fn error(&mut self, line: usize, column: usize, message: impl Into<String>) {
        self.diagnostics
            .push(Diagnostic::error(line, column, message));
    }

    fn mode_ref(&mut self, line: usize, tok: Token<'_>) -> Option<ModeRef> {
        match ModeLabel::new(tok.text) {
            Ok(label) => Some(ModeRef {
                label,
                line,
                column: tok.column,
            }),
            Err(_) => {
                self.error(line, tok.column, format!("invalid mode name `{}`", tok.text));
                None
            }
        }
    }

    fn name(&mut self, line: usize, tok: Token<'_>) -> Option<String> {
        if is_identifier(tok.text) {
            Some(tok.text.to_string())
        } else {
            self.error(line, tok.column, format!("invalid name `{}`", tok.text));
            None
        }
    }

    fn arity(
        &mut self,
        line: usize,
        keyword: Token<'_>,
        args: &[Token<'_>],
        expected: usize,
        usage: &str,
    ) -> bool {
        if args.len() == expected {
            true
        } else {
            let column = args.get(expected).map_or(keyword.column, |t| t.column);
            self.error(line, column, format!("expected `{usage}`"));
            false
        }
    }

    fn statement(
        &mut self,
        line: usize,
        tokens: &[Token<'_>],
        body: Option<&RotatingBody>,
        beam: Option<&BeamSource>,
    ) {
        let keyword = tokens[0];
        let args = &tokens[1..];
        match keyword.text {
            "mode" => {
                if args.is_empty() {
                    self.error(line, keyword.column, "expected `mode <name>+`");
                }
                for &tok in args {
                    if let Some(m) = self.mode_ref(line, tok) {
                        if let Some(prev) = self.modes.iter().find(|p| p.label == m.label) {
                            let msg = format!(
                                "mode `{}` already declared on line {}",
                                m.label, prev.line
                            );
                            self.error(line, tok.column, msg);
                        } else {
                            self.modes.push(m);
                        }
                    }
                }
            }
            "source" => {
                if !self.arity(line, keyword, args, 1, "source <name>") {
                    return;
                }
                if let Some(prev) = &self.source {
                    let msg = format!("duplicate source declaration (first on line {})", prev.line);
                    self.error(line, keyword.column, msg);
                    return;
                }
                self.source = self.mode_ref(line, args[0]);
            }
            "bs" => self.splitter(line, keyword, args),
            "mirror" => {
                let usage = "mirror <name> <in> -> <out>";
                if !self.arity(line, keyword, args, 4, usage) {
                    return;
                }
                if args[2].text != "->" {
                    self.error(line, args[2].column, format!("expected `->` in `{usage}`"));
                    return;
                }
                let name = self.name(line, args[0]);
                let input = self.mode_ref(line, args[1]);
                let output = self.mode_ref(line, args[3]);
                if let (Some(name), Some(input), Some(output)) = (name, input, output) {
                    self.push(
                        line,
                        args[0].column,
                        Element::Mirror {
                            name,
                            input: input.label.clone(),
                            output: output.label.clone(),
                        },
                        vec![input, output],
                    );
                }
            }
            "phase" => {
                if !self.arity(line, keyword, args, 3, "phase <name> <mode> <radians>") {
                    return;
                }
                let name = self.name(line, args[0]);
                let mode = self.mode_ref(line, args[1]);
                let phase = match args[2].text.parse::<f64>() {
                    Ok(v) if is_decimal_literal(args[2].text) && v.is_finite() => Some(v),
                    _ => {
                        let msg = format!("invalid radians literal `{}`", args[2].text);
                        self.error(line, args[2].column, msg);
                        None
                    }
                };
                if let (Some(name), Some(mode), Some(phase)) = (name, mode, phase) {
                    self.push(
                        line,
                        args[0].column,
                        Element::PhaseShifter {
                            name,
                            mode: mode.label.clone(),
                            phase,
                        },
                        vec![mode],
                    );
                }
            }
            "rotor" => {
                if !self.arity(line, keyword, args, 2, "rotor <name> <mode>") {
                    return;
                }
                let name = self.name(line, args[0]);
                let mode = self.mode_ref(line, args[1]);
                let (Some(body), Some(beam)) = (body, beam) else {
                    self.error(
                        line,
                        keyword.column,
                        "`rotor` requires rotating-body and beam parameters",
                    );
                    return;
                };
                if let (Some(name), Some(mode)) = (name, mode) {
                    self.push(
                        line,
                        args[0].column,
                        Element::RotatingObjectSegment {
                            name,
                            mode: mode.label.clone(),
                            body: *body,
                            beam: *beam,
                        },
                        vec![mode],
                    );
                }
            }
            "detect" => {
                if !self.arity(line, keyword, args, 2, "detect <name> <mode>") {
                    return;
                }
                let name = self.name(line, args[0]);
                let mode = self.mode_ref(line, args[1]);
                if let (Some(name), Some(mode)) = (name, mode) {
                    self.detectors.push((name, mode, args[0].column));
                }
            }
            other => {
                self.error(line, keyword.column, format!("unknown keyword `{other}`"));
            }
        }
    }

    fn splitter(&mut self, line: usize, keyword: Token<'_>, args: &[Token<'_>]) {
        let usage = "bs <name> <in> [<in2>] -> <t_out> <r_out>";
        let Some(arrow) = args.iter().position(|t| t.text == "->") else {
            self.error(line, keyword.column, format!("expected `->` in `{usage}`"));
            return;
        };
        let (before, after) = (&args[..arrow], &args[arrow + 1..]);
        if !(2..=3).contains(&before.len()) || after.len() != 2 {
            self.error(line, keyword.column, format!("expected `{usage}`"));
            return;
        }
        let name = self.name(line, before[0]);
        let inputs: Vec<_> = before[1..]
            .iter()
            .map(|&t| self.mode_ref(line, t))
            .collect();
        let t_out = self.mode_ref(line, after[0]);
        let r_out = self.mode_ref(line, after[1]);
        let mut ok = true;
        if let (Some(t), Some(r)) = (&t_out, &r_out) {
            if t.label == r.label {
                self.error(line, after[1].column, "splitter outputs must differ");
                ok = false;
            }
        }
        if let [Some(a), Some(b)] = inputs.as_slice() {
            if a.label == b.label {
                self.error(line, before[2].column, "splitter inputs must differ");
                ok = false;
            }
        }
        if !ok || name.is_none() || t_out.is_none() || r_out.is_none() {
            return;
        }
        let Some(inputs) = inputs.into_iter().collect::<Option<Vec<_>>>() else {
            return;
        };
        let (t_out, r_out) = (t_out.unwrap(), r_out.unwrap());
        let element = Element::BeamSplitter {
            name: name.unwrap(),
            input: inputs[0].label.clone(),
            second_input: inputs.get(1).map(|m| m.label.clone()),
            transmit_out: t_out.label.clone(),
            reflect_out: r_out.label.clone(),
        };
        let mut refs = inputs;
        refs.extend([t_out, r_out]);
        self.push(line, before[0].column, element, refs);
    }

    fn push(&mut self, line: usize, name_column: usize, element: Element, refs: Vec<ModeRef>) {
        if let Some(prev) = self.elements.iter().find(|s| s.element.name() == element.name()) {
            let msg = format!(
                "duplicate element name `{}` (first on line {})",
                element.name(),
                prev.line
            );
            self.error(line, name_column, msg);
            return;
        }
        self.elements.push(Statement {
            line,
            name_column,
            element,
            refs,
        });
    }

    /// Cross-statement checks once every line has been read.
    fn finish(mut self) -> ParseOutcome {
        let declared: HashSet<ModeLabel> = self.modes.iter().map(|m| m.label.clone()).collect();
        let mut used: HashSet<ModeLabel> = HashSet::new();

        let mut refs: Vec<ModeRef> = Vec::new();
        match &self.source {
            Some(s) => refs.push(s.clone()),
            None => self.error(1, 1, "missing source declaration"),
        }
        for s in &self.elements {
            refs.extend(s.refs.iter().cloned());
        }
        for (_, m, _) in &self.detectors {
            refs.push(m.clone());
        }
        for r in refs {
            if declared.contains(&r.label) {
                used.insert(r.label);
            } else {
                self.error(r.line, r.column, format!("undeclared mode `{}`", r.label));
            }
        }

        let mut detector_names: HashMap<&str, usize> = HashMap::new();
        let mut watched: HashMap<&ModeLabel, &str> = HashMap::new();
        let mut detector_errors = Vec::new();
        for (name, mode, col) in &self.detectors {
            if let Some(first) = detector_names.insert(name, mode.line) {
                detector_errors.push(Diagnostic::error(
                    mode.line,
                    *col,
                    format!("duplicate detector name `{name}` (first on line {first})"),
                ));
            }
            if let Some(first) = watched.insert(&mode.label, name) {
                detector_errors.push(Diagnostic::error(
                    mode.line,
                    mode.column,
                    format!("mode `{}` is already watched by detector `{first}`", mode.label),
                ));
            }
        }
        self.diagnostics.extend(detector_errors);

        if let Some(source) = &self.source {
            let elements: Vec<Element> = self.elements.iter().map(|s| s.element.clone()).collect();
            let lines: HashMap<&str, (usize, usize)> = self
                .elements
                .iter()
                .map(|s| (s.element.name(), (s.line, s.name_column)))
                .collect();
            for v in network::single_assignment_violations(&source.label, &elements) {
                if let NetworkError::SingleAssignment {
                    mode,
                    writer,
                    overwriter,
                } = &v
                {
                    let (line, column) = lines[overwriter.as_str()];
                    let origin = if writer == network::SOURCE_WRITER {
                        format!("the source on line {}", source.line)
                    } else {
                        format!("`{writer}` on line {}", lines[writer.as_str()].0)
                    };
                    self.diagnostics.push(Diagnostic::error(
                        line,
                        column,
                        format!(
                            "single-assignment violation: `{overwriter}` writes mode `{mode}` \
                             while it still holds amplitude from {origin}"
                        ),
                    ));
                }
            }
        }

        for m in &self.modes {
            if !used.contains(&m.label) {
                self.diagnostics.push(Diagnostic::warning(
                    m.line,
                    m.column,
                    format!("mode `{}` is never used", m.label),
                ));
            }
        }
        if self.detectors.is_empty() && self.source.is_some() {
            self.diagnostics
                .push(Diagnostic::warning(1, 1, "no detectors declared"));
        }

        let mut network = None;
        if !self.diagnostics.iter().any(Diagnostic::is_error) {
            let source = self.source.as_ref().expect("checked above");
            let result = Network::new(
                self.modes.iter().map(|m| m.label.clone()).collect(),
                source.label.clone(),
                self.elements.iter().map(|s| s.element.clone()).collect(),
                self.detectors
                    .iter()
                    .map(|(n, m, _)| (n.clone(), m.label.clone()))
                    .collect(),
            );
            match result {
                Ok(n) => network = Some(n),
                Err(e) => {
                    let (line, column) = match &e {
                        NetworkError::NonUnitary { element, .. } => self
                            .elements
                            .iter()
                            .find(|s| s.element.name() == element)
                            .map_or((1, 1), |s| (s.line, s.name_column)),
                        _ => (1, 1),
                    };
                    self.error(line, column, e.to_string());
                }
            }
        }

        self.diagnostics
            .sort_by_key(|d| (d.line, d.column, d.severity));
        ParseOutcome {
            network,
            diagnostics: self.diagnostics,
        }
    }
}

/// Parses a network description, returning warnings alongside the result.
pub fn parse_network_with_diagnostics(
    source: &str,
    body: Option<&RotatingBody>,
    beam: Option<&BeamSource>,
) -> ParseOutcome {
    let mut collector = Collector::default();
    for (k, raw) in source.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let code = line.split_once('#').map_or(line, |(code, _)| code);
        let tokens = tokenize(code);
        if !tokens.is_empty() {
            collector.statement(k + 1, &tokens, body, beam);
        }
    }
    collector.finish()
}

/// Parses a network description. On failure every diagnostic is returned,
/// errors and warnings alike, ordered by position.
///
/// `rotor` statements need both `body` and `beam`.
pub fn parse_network(
    source: &str,
    body: Option<&RotatingBody>,
    beam: Option<&BeamSource>,
) -> Result<Network, Vec<Diagnostic>> {
    let outcome = parse_network_with_diagnostics(source, body, beam);
    outcome.network.ok_or(outcome.diagnostics)
}

/// Canonical text for a network, LF line endings. Rotor parameters are not
/// serialized; re-parsing needs the same body and beam.
pub fn format_network(network: &Network) -> String {
    let mut out = String::new();
    let modes: Vec<&str> = network.modes().iter().map(ModeLabel::as_str).collect();
    let _ = writeln!(out, "mode {}", modes.join(" "));
    let _ = writeln!(out, "source {}", network.source());
    for element in network.elements() {
        let _ = match element {
            Element::BeamSplitter {
                name,
                input,
                second_input: Some(second),
                transmit_out,
                reflect_out,
            } => writeln!(out, "bs {name} {input} {second} -> {transmit_out} {reflect_out}"),
            Element::BeamSplitter {
                name,
                input,
                second_input: None,
                transmit_out,
                reflect_out,
            } => writeln!(out, "bs {name} {input} -> {transmit_out} {reflect_out}"),
            Element::Mirror {
                name,
                input,
                output,
            } => writeln!(out, "mirror {name} {input} -> {output}"),
            // Debug formatting is the shortest string that round-trips.
            Element::PhaseShifter { name, mode, phase } => {
                writeln!(out, "phase {name} {mode} {phase:?}")
            }
            Element::RotatingObjectSegment { name, mode, .. } => {
                writeln!(out, "rotor {name} {mode}")
            }
        };
    }
    for (name, mode) in network.detectors() {
        let _ = writeln!(out, "detect {name} {mode}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{mach_zehnder_output, mach_zehnder_preset, propagate};
    use crate::state::unit_state;

    pub(crate) const FIG2: &str = "\
mode a b c d e
source a
bs S1 a -> b c
rotor O b
mirror M1 b -> b
mirror M2 c -> c
bs S2 b c -> e d
detect D1 d
detect D2 e
";

    fn errors(src: &str) -> Vec<Diagnostic> {
        parse_network(src, None, None).unwrap_err()
    }

    #[test]
    fn literals() {
        for ok in ["0", "1.5", "-2.", ".5", "+1e-7", "3E+2", "6.283185307179586"] {
            assert!(is_decimal_literal(ok), "{ok}");
        }
        for bad in ["", "e5", ".", "1e", "nan", "inf", "0x10", "1.2.3", "--1", "1e5.0"] {
            assert!(!is_decimal_literal(bad), "{bad}");
        }
    }

    #[test]
    fn tokenizer_columns() {
        let toks = tokenize("  bs  S1 a");
        let cols: Vec<_> = toks.iter().map(|t| (t.text, t.column)).collect();
        assert_eq!(cols, vec![("bs", 3), ("S1", 7), ("a", 10)]);
    }

    #[test]
    fn fig2_document() {
        let body = RotatingBody::new(754.0, 0.05).unwrap();
        let beam = BeamSource::new(2.0e6).unwrap();
        let net = parse_network(FIG2, Some(&body), Some(&beam)).unwrap();
        assert_eq!(net, mach_zehnder_preset(body, beam));
        let out = propagate(&net, &unit_state(net.source().clone())).unwrap();
        let phase = net.elements()[1].phase().unwrap();
        assert!(out.approx_eq(&mach_zehnder_output(phase), 1e-12));
    }

    #[test]
    fn crlf_and_comments() {
        let src = "# header\r\nmode a b   # two modes\r\nsource a\r\nmirror M a -> b\r\ndetect D b\r\n";
        let net = parse_network(src, None, None).unwrap();
        assert_eq!(net.elements().len(), 1);
    }

    #[test]
    fn empty_document() {
        let diags = errors("");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].message, "missing source declaration");
        assert_eq!((diags[0].line, diags[0].column), (1, 1));
    }

    #[test]
    fn identical_splitter_outputs() {
        let diags = errors("mode a b\nsource a\nbs X a -> b b\n");
        let d = diags.iter().find(|d| d.is_error()).unwrap();
        assert_eq!(d.message, "splitter outputs must differ");
        assert_eq!((d.line, d.column), (3, 13));
    }

    #[test]
    fn collects_every_error() {
        let src = "mode a b\nsource a\nfrobnicate x\nmirror M a -> z\nmode a\nphase P b 1.2.3\nrotor O b\n";
        let diags = errors(src);
        let found: Vec<(usize, &str)> = diags
            .iter()
            .filter(|d| d.is_error())
            .map(|d| (d.line, d.message.as_str()))
            .collect();
        assert_eq!(
            found,
            vec![
                (3, "unknown keyword `frobnicate`"),
                (4, "undeclared mode `z`"),
                (5, "mode `a` already declared on line 1"),
                (6, "invalid radians literal `1.2.3`"),
                (7, "`rotor` requires rotating-body and beam parameters"),
            ]
        );
    }

    #[test]
    fn duplicate_element_and_source() {
        let src = "mode a b c\nsource a\nsource b\nmirror M a -> b\nmirror M b -> c\n";
        let diags = errors(src);
        let errs: Vec<_> = diags.iter().filter(|d| d.is_error()).collect();
        assert_eq!(errs.iter().map(|d| d.line).collect::<Vec<_>>(), vec![3, 5]);
        assert!(errs[1].message.starts_with("duplicate element name `M`"));
    }

    #[test]
    fn single_assignment_names_both_elements() {
        let src = "mode a b c d\nsource a\nbs S1 a -> b c\nbs S3 a -> b d\n";
        let diags = errors(src);
        let d = diags.iter().find(|d| d.is_error()).unwrap();
        assert_eq!(d.line, 4);
        assert!(d.message.contains("`S3`") && d.message.contains("`S1` on line 3"), "{}", d.message);
    }

    #[test]
    fn warnings_do_not_fail() {
        let outcome = parse_network_with_diagnostics("mode a b\nsource a\n", None, None);
        assert!(outcome.network.is_some());
        let msgs: Vec<_> = outcome.diagnostics.iter().map(|d| d.to_string()).collect();
        assert_eq!(
            msgs,
            vec![
                "1:1: warning: no detectors declared",
                "1:8: warning: mode `b` is never used"
            ]
        );
    }

    #[test]
    fn format_minimal() {
        let net = parse_network("mode a\nsource a\n", None, None).unwrap();
        assert_eq!(format_network(&net), "mode a\nsource a\n");
    }

    #[test]
    fn format_fig2_is_canonical() {
        let body = RotatingBody::new(754.0, 0.05).unwrap();
        let beam = BeamSource::new(1.0).unwrap();
        let net = mach_zehnder_preset(body, beam);
        assert_eq!(format_network(&net), FIG2);
    }
}
