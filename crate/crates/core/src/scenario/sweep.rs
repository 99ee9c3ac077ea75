//! One-dimensional parameter sweeps.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::config::{NetworkSpec, ScenarioConfig};
use super::ScenarioError;
use crate::physics::{BeamSource, FlybyGeometry, RotatingBody};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Arm phase of the Mach-Zehnder preset, rad.
    DeltaPhase,
    /// Beam angular frequency, rad/s.
    BeamOmega,
    /// Body angular velocity, rad/s.
    BodyOmega,
    /// Body mean radius, m.
    BodyRadius,
    /// Outgoing declination, rad.
    DeltaOut,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 5] = [
        SweepParameter::DeltaPhase,
        SweepParameter::BeamOmega,
        SweepParameter::BodyOmega,
        SweepParameter::BodyRadius,
        SweepParameter::DeltaOut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::DeltaPhase => "delta_phase",
            SweepParameter::BeamOmega => "beam_omega",
            SweepParameter::BodyOmega => "body_omega",
            SweepParameter::BodyRadius => "body_radius",
            SweepParameter::DeltaOut => "delta_out",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            SweepParameter::DeltaPhase | SweepParameter::DeltaOut => "rad",
            SweepParameter::BeamOmega | SweepParameter::BodyOmega => "rad/s",
            SweepParameter::BodyRadius => "m",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Logarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub scale: Scale,
}

fn sweep_error(message: impl Into<String>) -> ScenarioError {
    ScenarioError::Config {
        key: "sweep".to_string(),
        message: message.into(),
    }
}

impl SweepSpec {
    pub fn new(
        parameter: SweepParameter,
        from: f64,
        to: f64,
        steps: usize,
        scale: Scale,
    ) -> Result<Self, ScenarioError> {
        if !(from.is_finite() && to.is_finite() && from < to) {
            return Err(sweep_error(format!("need finite from < to, got {from}..{to}")));
        }
        if steps < 2 {
            return Err(sweep_error("steps must be at least 2"));
        }
        if scale == Scale::Logarithmic && from <= 0.0 {
            return Err(sweep_error("logarithmic sweeps need from > 0"));
        }
        Ok(Self {
            parameter,
            from,
            to,
            steps,
            scale,
        })
    }

    /// Grid values in increasing order; both endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k == 0 {
                    return self.from;
                }
                if k == self.steps - 1 {
                    return self.to;
                }
                let t = k as f64 / last;
                match self.scale {
                    Scale::Linear => self.from + (self.to - self.from) * t,
                    Scale::Logarithmic => (self.from.ln() + (self.to / self.from).ln() * t).exp(),
                }
            })
            .collect()
    }

    /// Checks that the swept parameter makes sense for `config`.
    pub fn check_compatible(&self, config: &ScenarioConfig) -> Result<(), ScenarioError> {
        match self.parameter {
            SweepParameter::DeltaPhase => {
                if !matches!(config.network, Some(NetworkSpec::MachZehnder { .. })) {
                    return Err(sweep_error(
                        "delta_phase sweeps need network.preset = \"mach-zehnder\"",
                    ));
                }
            }
            SweepParameter::DeltaOut => {
                if config.beam.is_none() {
                    return Err(sweep_error("delta_out sweeps need a [beam] section"));
                }
                if self.from < 0.0 || self.to > PI {
                    return Err(sweep_error("delta_out must stay within [0, π]"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// `config` with the swept parameter set to `value`.
    pub fn apply(&self, config: &ScenarioConfig, value: f64) -> Result<ScenarioConfig, ScenarioError> {
        let mut c = config.clone();
        let physics = |e| ScenarioError::Config {
            key: self.parameter.name().to_string(),
            message: format!("{e}"),
        };
        match self.parameter {
            SweepParameter::DeltaPhase => {
                c.network = Some(NetworkSpec::MachZehnder {
                    delta_phase: Some(value),
                })
            }
            SweepParameter::BeamOmega => c.beam = Some(BeamSource::new(value).map_err(physics)?),
            SweepParameter::BodyOmega => {
                c.body = RotatingBody::new(value, c.body.mean_radius()).map_err(physics)?
            }
            SweepParameter::BodyRadius => {
                c.body = RotatingBody::new(c.body.angular_velocity(), value).map_err(physics)?
            }
            SweepParameter::DeltaOut => {
                let din = c.geometry.map_or(0.0, |g| g.declination_in());
                c.geometry = Some(FlybyGeometry::new(din, value).map_err(physics)?);
            }
        }
        Ok(c)
    }
}

impl FromStr for SweepSpec {
    type Err = ScenarioError;

    /// `<param>:<from>:<to>:<steps>[:log|:lin]`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(sweep_error(format!(
                "expected <param>:<from>:<to>:<steps>[:log], got `{s}`"
            )));
        }
        let parameter = SweepParameter::ALL
            .into_iter()
            .find(|p| p.name() == parts[0])
            .ok_or_else(|| {
                let names: Vec<_> = SweepParameter::ALL.iter().map(|p| p.name()).collect();
                sweep_error(format!("unknown parameter `{}` ({})", parts[0], names.join(", ")))
            })?;
        let number = |t: &str| -> Result<f64, ScenarioError> {
            t.parse().map_err(|_| sweep_error(format!("invalid number `{t}`")))
        };
        let from = number(parts[1])?;
        let to = number(parts[2])?;
        let steps = parts[3]
            .parse()
            .map_err(|_| sweep_error(format!("invalid step count `{}`", parts[3])))?;
        let scale = match parts.get(4) {
            None | Some(&"lin") => Scale::Linear,
            Some(&"log") => Scale::Logarithmic,
            Some(other) => return Err(sweep_error(format!("unknown scale `{other}`"))),
        };
        SweepSpec::new(parameter, from, to, steps, scale)
    }
}
