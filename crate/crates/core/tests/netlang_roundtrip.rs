mod common;

use common::random_network;
use flyby::netlang::{parse_network, Severity};
use flyby::{
    format_network, mach_zehnder_output, mach_zehnder_preset, propagate, unit_state, BeamSource,
    RotatingBody,
};

const FIG2: &str = include_str!("../data/mach-zehnder.ifo");

#[test]
fn fig2_file_matches_closed_form_for_many_phases() {
    let body = RotatingBody::new(754.0, 0.05).unwrap();
    for k in 0..200 {
        let beam = BeamSource::new(k as f64 * 2.0e4).unwrap();
        let net = parse_network(FIG2, Some(&body), Some(&beam)).unwrap();
        let out = propagate(&net, &unit_state(net.source().clone())).unwrap();
        let phase = net.elements()[1].phase().unwrap();
        assert!(out.max_deviation(&mach_zehnder_output(phase)) < 1e-12);
    }
}

#[test]
fn preset_round_trip() {
    let body = RotatingBody::new(754.0, 0.05).unwrap();
    let beam = BeamSource::new(3.3e6).unwrap();
    let net = mach_zehnder_preset(body, beam);
    let text = format_network(&net);
    let back = parse_network(&text, Some(&body), Some(&beam)).unwrap();
    let a = unit_state(net.source().clone());
    let d = propagate(&net, &a).unwrap().max_deviation(&propagate(&back, &a).unwrap());
    assert!(d < 1e-12);
    assert_eq!(format_network(&back), text);
}

#[test]
fn fuzzed_round_trips() {
    for seed in 0..100 {
        let f = random_network(seed);
        let text = format_network(&f.network);
        let parsed = parse_network(&text, Some(&f.body), Some(&f.beam))
            .unwrap_or_else(|d| panic!("seed {seed}: {d:?}\n{text}"));
        let initial = unit_state(f.network.source().clone());
        let before = propagate(&f.network, &initial).unwrap();
        let after = propagate(&parsed, &initial).unwrap();
        assert!(before.max_deviation(&after) < 1e-12, "seed {seed}");
        assert_eq!(parsed, f.network, "seed {seed}");
        assert_eq!(format_network(&parsed), text, "seed {seed}");
    }
}

#[test]
fn diagnostics_point_at_lines() {
    let cases: [(&str, usize, &str); 7] = [
        ("", 1, "missing source declaration"),
        ("mode a b\nsource a\nbs X a -> b b\n", 3, "splitter outputs must differ"),
        ("mode a\nsource a\n\n\nwobble a\n", 5, "unknown keyword `wobble`"),
        ("mode a\nsource a\nmirror M a -> q\n", 3, "undeclared mode `q`"),
        ("mode a b\nsource a\nmirror M a -> b\nmirror M b -> a\n", 4, "duplicate element name `M`"),
        ("mode a b\nsource a\nrotor R a\n", 3, "`rotor` requires rotating-body and beam parameters"),
        ("mode a b c\nsource a\nbs S a -> b c\nmirror M c -> b\n", 4, "single-assignment violation"),
    ];
    for (src, line, message) in cases {
        let diags = parse_network(src, None, None).unwrap_err();
        let hit = diags
            .iter()
            .find(|d| d.severity == Severity::Error && d.message.starts_with(message))
            .unwrap_or_else(|| panic!("{message:?} not in {diags:?}"));
        assert_eq!(hit.line, line, "{message}");
    }
}
