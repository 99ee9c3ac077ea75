use std::f64::consts::PI;
use std::path::Path;

use flyby::scenario::report::write_csv;
use flyby::scenario::{run_scenario, run_sweep, run_sweep_with, ScenarioConfig, SweepSpec};
use flyby::Execution;

fn config(text: &str) -> ScenarioConfig {
    ScenarioConfig::parse(text, Path::new(".")).unwrap()
}

#[test]
fn disk_stack_report() {
    let r = run_scenario(&config("[body]\nrpm = 7200\nradius_m = 0.05\n")).unwrap();
    assert!((r.k_factor / 2.513e-7 - 1.0).abs() < 5e-3);
    assert_eq!(r.fractional_shift, 4.0 * r.k_factor);
    assert_eq!(r.phase_coefficient, 2.0 * r.k_factor);
    assert!(r.p_d1.is_none() && r.doppler_shift_rad_s.is_none());
}

#[test]
fn zero_rotation_mach_zehnder() {
    let r = run_scenario(&config(
        "[body]\nomega_rad_s = 0\nradius_m = 1\n[beam]\nomega_rad_s = 1e15\n[network]\npreset = \"mach-zehnder\"\n",
    ))
    .unwrap();
    assert_eq!(r.p_d1, Some(1.0));
    assert_eq!(r.p_d2, Some(0.0));

    let mut buf = Vec::new();
    write_csv(&[r], &mut buf).unwrap();
    let row = String::from_utf8(buf).unwrap().lines().nth(1).unwrap().to_string();
    assert_eq!(row.split(',').nth(5), Some("1.0"));
    assert_eq!(row.split(',').nth(6), Some("0.0"));
}

#[test]
fn parallel_geometry_reduces_to_fractional_shift() {
    let r = run_scenario(&config(
        "[body]\nrpm = 7200\nradius_m = 0.05\n[beam]\nomega_rad_s = 2.5e6\n\
         [geometry]\ndelta_in = \"0 deg\"\ndelta_out = \"180 deg\"\n",
    ))
    .unwrap();
    let d = r.doppler_shift_rad_s.unwrap();
    assert!((d - r.fractional_shift * 2.5e6).abs() <= 4.0 * f64::EPSILON * d);
}

#[test]
fn delta_phase_sweep_follows_cos_squared() {
    let c = config(
        "[body]\nrpm = 7200\nradius_m = 0.05\n[network]\npreset = \"mach-zehnder\"\ndelta_phase = \"0 rad\"\n",
    );
    let s: SweepSpec = format!("delta_phase:0:{}:9", 2.0 * PI).parse().unwrap();
    let rows = run_sweep(&c, &s).unwrap();
    assert_eq!(rows.len(), 9);
    for (x, r) in &rows {
        assert!((r.p_d1.unwrap() - (x / 2.0).cos().powi(2)).abs() < 1e-12);
        assert!((r.p_d1.unwrap() + r.p_d2.unwrap() - 1.0).abs() < 1e-12);
    }
    let two: SweepSpec = "delta_phase:0.5:1.5:2".parse().unwrap();
    let rows = run_sweep(&c, &two).unwrap();
    assert_eq!(rows.iter().map(|(x, _)| *x).collect::<Vec<_>>(), vec![0.5, 1.5]);
}

#[test]
fn sweeps_are_schedule_independent() {
    let c = config(
        "[body]\nrpm = 7200\nradius_m = 0.05\n[beam]\nomega_rad_s = 1e6\n\
         [network]\npreset = \"mach-zehnder\"\n[sampling]\nshots = 1000\nseed = 42\n[feasibility]\nz = 2\n",
    );
    let s: SweepSpec = "beam_omega:1e5:1e12:40:log".parse().unwrap();
    let par = run_sweep_with(&c, &s, Execution::Parallel).unwrap();
    let seq = run_sweep_with(&c, &s, Execution::Sequential).unwrap();
    assert_eq!(par, seq);
    for (k, (_, r)) in par.iter().enumerate() {
        assert_eq!(r.seed, Some(42 + k as u64));
    }
}

#[test]
fn incompatible_sweep_is_rejected() {
    let c = config("[body]\nrpm = 7200\nradius_m = 0.05\n");
    let s: SweepSpec = "delta_phase:0:1:3".parse().unwrap();
    assert!(run_sweep(&c, &s).is_err());
    let s: SweepSpec = "body_omega:1:1e12:3:log".parse().unwrap();
    let err = run_sweep(&c, &s).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().starts_with("body_omega = 1000000000000.0"), "{err}");
}
