//! Scenario configuration files.
//!
//! TOML with one section per concern:
//!
//! ```toml
//! [body]
//! rpm = 7200            # or omega_rad_s = 754.0, or preset = "disk-stack" | "earth"
//! radius_m = 0.05
//!
//! [beam]
//! omega_rad_s = 1.0e15
//!
//! [geometry]            # optional; angles need a unit suffix
//! delta_in = "0 deg"
//! delta_out = "3.141592653589793 rad"
//!
//! [network]             # optional; exactly one of preset / file
//! preset = "mach-zehnder"
//! delta_phase = "90 deg"  # optional, replaces the rotor by a fixed phase
//!
//! [sampling]            # optional
//! shots = 100000
//! seed = 7
//!
//! [feasibility]         # optional
//! z = 3.0
//! ```

use std::fs;
use std::num::NonZeroU64;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::ScenarioError;
use crate::physics::{BeamSource, FlybyGeometry, PhysicsError, RotatingBody};

/// A named body parameter set with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyPreset {
    pub name: &'static str,
    pub angular_velocity_rad_s: f64,
    pub radius_m: f64,
    pub source: &'static str,
}

pub const BODY_PRESETS: [BodyPreset; 2] = [
    BodyPreset {
        name: "disk-stack",
        angular_velocity_rad_s: 754.0,
        radius_m: 0.05,
        source: "hard-drive stack at 7200 rpm (754 rad/s), disk radius 0.05 m",
    },
    BodyPreset {
        name: "earth",
        angular_velocity_rad_s: 7.292_115_9e-5,
        radius_m: 6.371e6,
        source: "sidereal rotation rate (IERS) and IUGG mean radius",
    },
];

pub fn body_preset(name: &str) -> Option<&'static BodyPreset> {
    BODY_PRESETS.iter().find(|p| p.name == name)
}

impl BodyPreset {
    pub fn body(&self) -> RotatingBody {
        RotatingBody::new(self.angular_velocity_rad_s, self.radius_m).expect("valid preset")
    }

    /// Config snippet reproducing this preset.
    pub fn to_config(&self) -> String {
        format!(
            "# {}\n[body]\nomega_rad_s = {:?}\nradius_m = {:?}\n",
            self.source, self.angular_velocity_rad_s, self.radius_m
        )
    }
}

/// Which interferometer a scenario evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSpec {
    /// Built-in two-splitter layout. Without `delta_phase` the arm holds the
    /// rotating object; with it, a fixed phase shifter.
    MachZehnder { delta_phase: Option<f64> },
    /// A `.ifo` description, read when the config is loaded.
    File { path: PathBuf, text: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub shots: NonZeroU64,
    pub seed: u64,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub body: RotatingBody,
    pub beam: Option<BeamSource>,
    pub geometry: Option<FlybyGeometry>,
    pub network: Option<NetworkSpec>,
    pub sampling: Option<Sampling>,
    pub z: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    body: Option<RawBody>,
    beam: Option<RawBeam>,
    geometry: Option<RawGeometry>,
    network: Option<RawNetwork>,
    sampling: Option<RawSampling>,
    feasibility: Option<RawFeasibility>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBody {
    preset: Option<String>,
    omega_rad_s: Option<f64>,
    rpm: Option<f64>,
    radius_m: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeam {
    omega_rad_s: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    delta_in: String,
    delta_out: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    preset: Option<String>,
    file: Option<PathBuf>,
    delta_phase: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampling {
    shots: Option<u64>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFeasibility {
    z: Option<f64>,
}

fn config_error(key: &str, message: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Config {
        key: key.to_string(),
        message: message.to_string(),
    }
}

fn physics(key: &str) -> impl FnOnce(PhysicsError) -> ScenarioError + '_ {
    move |e| config_error(key, e)
}

/// Parses an angle with a mandatory `rad` or `deg` suffix, e.g. `"20 deg"`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (number, to_rad) = if let Some(n) = t.strip_suffix("deg") {
        (n, true)
    } else if let Some(n) = t.strip_suffix("rad") {
        (n, false)
    } else {
        return Err(format!("angle `{text}` needs a `rad` or `deg` suffix"));
    };
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|_| format!("invalid angle `{text}`"))?;
    if !value.is_finite() {
        return Err(format!("invalid angle `{text}`"));
    }
    Ok(if to_rad { value.to_radians() } else { value })
}

impl ScenarioConfig {
    /// Reads a config file; network file paths resolve relative to it.
    pub fn from_file(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|e| ScenarioError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ScenarioError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            config_error("config", e.message().to_string() + &location(text, e.span()))
        })?;

        let rb = raw.body.ok_or_else(|| config_error("body", "section is required"))?;
        let body = match (&rb.preset, rb.omega_rad_s, rb.rpm) {
            (Some(name), None, None) => {
                if rb.radius_m.is_some() {
                    return Err(config_error("body.radius_m", "cannot be combined with body.preset"));
                }
                body_preset(name)
                    .ok_or_else(|| {
                        config_error("body.preset", format!("unknown preset `{name}` (disk-stack, earth)"))
                    })?
                    .body()
            }
            (None, Some(omega), None) => {
                let r = rb.radius_m.ok_or_else(|| config_error("body.radius_m", "is required"))?;
                RotatingBody::new(omega, r).map_err(physics("body"))?
            }
            (None, None, Some(rpm)) => {
                let r = rb.radius_m.ok_or_else(|| config_error("body.radius_m", "is required"))?;
                RotatingBody::from_rpm(rpm, r).map_err(physics("body"))?
            }
            _ => {
                return Err(config_error(
                    "body",
                    "give exactly one of preset, omega_rad_s, rpm",
                ))
            }
        };

        let beam = raw
            .beam
            .map(|b| BeamSource::new(b.omega_rad_s).map_err(physics("beam.omega_rad_s")))
            .transpose()?;

        let geometry = match raw.geometry {
            None => None,
            Some(g) => {
                let angle = |key: &str, text: &str| -> Result<f64, ScenarioError> {
                    let v = parse_angle(text).map_err(|m| config_error(key, m))?;
                    if !(0.0..=std::f64::consts::PI).contains(&v) {
                        return Err(config_error(key, format!("{v} rad is outside [0, π]")));
                    }
                    Ok(v)
                };
                let din = angle("geometry.delta_in", &g.delta_in)?;
                let dout = angle("geometry.delta_out", &g.delta_out)?;
                if beam.is_none() {
                    return Err(config_error("geometry", "requires a [beam] section"));
                }
                Some(FlybyGeometry::new(din, dout).map_err(physics("geometry"))?)
            }
        };

        let network = match raw.network {
            None => None,
            Some(n) => {
                let delta_phase = n
                    .delta_phase
                    .as_deref()
                    .map(|t| parse_angle(t).map_err(|m| config_error("network.delta_phase", m)))
                    .transpose()?;
                match (n.preset, n.file) {
                    (Some(p), None) => {
                        if p != "mach-zehnder" {
                            return Err(config_error(
                                "network.preset",
                                format!("unknown preset `{p}` (mach-zehnder)"),
                            ));
                        }
                        if delta_phase.is_none() && beam.is_none() {
                            return Err(config_error(
                                "network",
                                "the rotating-object arm requires a [beam] section or network.delta_phase",
                            ));
                        }
                        Some(NetworkSpec::MachZehnder { delta_phase })
                    }
                    (None, Some(file)) => {
                        if delta_phase.is_some() {
                            return Err(config_error(
                                "network.delta_phase",
                                "only applies to network.preset",
                            ));
                        }
                        let path = base_dir.join(file);
                        let text = fs::read_to_string(&path).map_err(|e| {
                            config_error("network.file", format!("{}: {e}", path.display()))
                        })?;
                        Some(NetworkSpec::File { path, text })
                    }
                    _ => {
                        return Err(config_error(
                            "network",
                            "give exactly one of preset, file",
                        ))
                    }
                }
            }
        };

        let sampling = match raw.sampling {
            Some(RawSampling {
                shots: Some(shots),
                seed,
            }) => Some(Sampling {
                shots: NonZeroU64::new(shots)
                    .ok_or_else(|| config_error("sampling.shots", "must be at least 1"))?,
                seed: seed.unwrap_or(0),
            }),
            Some(RawSampling {
                shots: None,
                seed: Some(_),
            }) => {
                return Err(config_error(
                    "sampling.shots",
                    "is required when sampling.seed is set",
                ))
            }
            Some(RawSampling {
                shots: None,
                seed: None,
            })
            | None => None,
        };

        let z =raw.feasibility.and_then(|f| f.z);

        let config = ScenarioConfig {
            body,
            beam,
            geometry,
            network,
            sampling,
            z,
        };
        config.validate()?;
        Ok(config)
    }

    /// Cross-field checks, also run after command-line overrides.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.sampling.is_some() && self.network.is_none() {
            return Err(config_error("sampling", "requires a [network] section"));
        }
        if let Some(z) = self.z {
            if !(z.is_finite() && z > 0.0) {
                return Err(config_error("feasibility.z", "must be positive and finite"));
            }
            if self.feasibility_phase().is_none() {
                return Err(config_error(
                    "feasibility.z",
                    "needs network.delta_phase or a [beam] section",
                ));
            }
        }
        Ok(())
    }

    /// Phase whose resolvability `required_quanta` estimates: the explicit
    /// arm phase if one is set, else the axis-parallel shift `8ΩRω/c`.
    pub fn feasibility_phase(&self) -> Option<f64> {
        match (&self.network, &self.beam) {
            (Some(NetworkSpec::MachZehnder {
                delta_phase: Some(p),
            }), _) => Some(*p),
            (_, Some(beam)) => Some(crate::physics::parallel_flyby_shift(&self.body, beam)),
            _ => None,
        }
    }
}

fn location(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(s) => {
            let line = text[..s.start.min(text.len())].matches('\n').count() + 1;
            format!(" (line {line})")
        }
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn parse(text: &str) -> Result<ScenarioConfig, ScenarioError> {
        ScenarioConfig::parse(text, Path::new("."))
    }

    fn key_of(e: ScenarioError) -> String {
        match e {
            ScenarioError::Config { key, .. } => key,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("180 deg").unwrap(), PI);
        assert_eq!(parse_angle("0.5rad").unwrap(), 0.5);
        assert!(parse_angle("0.5").is_err());
        assert!(parse_angle("x deg").is_err());
    }

    #[test]
    fn disk_stack_by_rpm() {
        let c = parse("[body]\nrpm = 7200\nradius_m = 0.05\n").unwrap();
        assert!((c.body.angular_velocity() - 240.0 * PI).abs() < 1e-12);
        assert!(c.network.is_none() && c.beam.is_none());
    }

    #[test]
    fn presets() {
        let c = parse("[body]\npreset = \"earth\"\n").unwrap();
        assert_eq!(c.body, BODY_PRESETS[1].body());
        let text = BODY_PRESETS[0].to_config();
        assert_eq!(parse(&text).unwrap().body, BODY_PRESETS[0].body());
    }

    #[test]
    fn errors_carry_key_paths() {
        assert_eq!(key_of(parse("").unwrap_err()), "body");
        assert_eq!(
            key_of(parse("[body]\nrpm = 1\nomega_rad_s = 2\nradius_m = 1\n").unwrap_err()),
            "body"
        );
        assert_eq!(key_of(parse("[body]\nrpm = 1\n").unwrap_err()), "body.radius_m");
        let geo = "[body]\nrpm = 1\nradius_m = 1\n[beam]\nomega_rad_s = 1\n[geometry]\ndelta_in = \"0\"\ndelta_out = \"1 rad\"\n";
        assert_eq!(key_of(parse(geo).unwrap_err()), "geometry.delta_in");
        let geo = geo.replace("\"0\"", "\"200 deg\"");
        assert_eq!(key_of(parse(&geo).unwrap_err()), "geometry.delta_in");
        let net = "[body]\nrpm = 1\nradius_m = 1\n[network]\npreset = \"mach-zehnder\"\n";
        assert_eq!(key_of(parse(net).unwrap_err()), "network");
        let net = "[body]\nrpm = 1\nradius_m = 1\n[network]\nfile = \"/nonexistent/x.ifo\"\n";
        assert_eq!(key_of(parse(net).unwrap_err()), "network.file");
        assert_eq!(key_of(parse("[body]\nrpm = 1\nradius_m = 1\nbogus = 2\n").unwrap_err()), "config");
    }

    #[test]
    fn full_config() {
        let c = parse(
            "[body]\nomega_rad_s = 754\nradius_m = 0.05\n[beam]\nomega_rad_s = 1e15\n\
             [geometry]\ndelta_in = \"0 deg\"\ndelta_out = \"180 deg\"\n\
             [network]\npreset = \"mach-zehnder\"\n[sampling]\nshots = 1000\nseed = 5\n\
             [feasibility]\nz = 3\n",
        )
        .unwrap();
        assert_eq!(c.sampling.unwrap().seed, 5);
        assert_eq!(c.z, Some(3.0));
        assert_eq!(c.network, Some(NetworkSpec::MachZehnder { delta_phase: None }));
    }
}
