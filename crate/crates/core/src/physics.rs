//! Rotating-body parameters and the empirical flyby Doppler formula.
//!
//! The flyby anomaly is modelled by the heuristic
//! `Δω = 2Kω (cos δᵢ − cos δₒ)` with `K = 2ΩR/c`. All angles are radians and
//! all frequencies are angular (rad/s); unit conversion happens at the config
//! boundary only.

use std::f64::consts::PI;

use thiserror::Error;

/// Speed of light in vacuum, m/s (exact SI value).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Fixed physical constants used by the formulas in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub speed_of_light: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        speed_of_light: SPEED_OF_LIGHT,
    };
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhysicsError {
    #[error("mean radius must be positive and finite, got {0}")]
    Radius(f64),
    #[error("angular velocity must be non-negative and finite, got {0}")]
    AngularVelocity(f64),
    #[error("surface speed 2ΩR = {0} m/s is not below the speed of light")]
    Superluminal(f64),
    #[error("declination must be finite, got {0}")]
    Declination(f64),
    #[error("beam angular frequency must be non-negative and finite, got {0}")]
    BeamFrequency(f64),
}

/// A heavy rotating object: angular velocity Ω (rad/s) and mean radius R (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingBody {
    angular_velocity: f64,
    mean_radius: f64,
}

impl RotatingBody {
    pub fn new(angular_velocity: f64, mean_radius: f64) -> Result<Self, PhysicsError> {
        if !(mean_radius.is_finite() && mean_radius > 0.0) {
            return Err(PhysicsError::Radius(mean_radius));
        }
        if !(angular_velocity.is_finite() && angular_velocity >= 0.0) {
            return Err(PhysicsError::AngularVelocity(angular_velocity));
        }
        let surface = 2.0 * angular_velocity * mean_radius;
        if surface >= SPEED_OF_LIGHT {
            return Err(PhysicsError::Superluminal(surface));
        }
        Ok(Self {
            angular_velocity,
            mean_radius,
        })
    }

    /// Builds a body from revolutions per minute (converted with 2π/60).
    pub fn from_rpm(rpm: f64, mean_radius: f64) -> Result<Self, PhysicsError> {
        Self::new(rpm_to_rad_s(rpm), mean_radius)
    }

    /// Rad/s.
    pub fn angular_velocity(&self) -> f64 {
        self.angular_velocity
    }

    /// Meters.
    pub fn mean_radius(&self) -> f64 {
        self.mean_radius
    }
}

pub fn rpm_to_rad_s(rpm: f64) -> f64 {
    rpm * 2.0 * PI / 60.0
}

/// Declinations of the incoming and outgoing asymptotic velocity vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlybyGeometry {
    declination_in: f64,
    declination_out: f64,
}

impl FlybyGeometry {
    /// Path parallel to the rotation axis: in along the axis, out against it.
    pub const PARALLEL_TO_AXIS: FlybyGeometry = FlybyGeometry {
        declination_in: 0.0,
        declination_out: PI,
    };

    pub fn new(declination_in: f64, declination_out: f64) -> Result<Self, PhysicsError> {
        for d in [declination_in, declination_out] {
            if !d.is_finite() {
                return Err(PhysicsError::Declination(d));
            }
        }
        Ok(Self {
            declination_in,
            declination_out,
        })
    }

    pub fn declination_in(&self) -> f64 {
        self.declination_in
    }

    pub fn declination_out(&self) -> f64 {
        self.declination_out
    }

    /// Same path traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        Self {
            declination_in: self.declination_out,
            declination_out: self.declination_in,
        }
    }
}

/// Angular frequency ω (rad/s) of the light or matter wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSource {
    angular_frequency: f64,
}

impl BeamSource {
    pub fn new(angular_frequency: f64) -> Result<Self, PhysicsError> {
        if !(angular_frequency.is_finite() && angular_frequency >= 0.0) {
            return Err(PhysicsError::BeamFrequency(angular_frequency));
        }
        Ok(Self { angular_frequency })
    }

    pub fn angular_frequency(&self) -> f64 {
        self.angular_frequency
    }
}

/// `K = 2ΩR/c`, always in `[0, 1)` for a valid body.
pub fn k_factor(body: &RotatingBody) -> f64 {
    2.0 * body.angular_velocity * body.mean_radius / SPEED_OF_LIGHT
}

/// Relative frequency shift `Δω/ω = 4K` for the axis-parallel flyby.
pub fn fractional_shift(body: &RotatingBody) -> f64 {
    4.0 * k_factor(body)
}

/// Coefficient `2K` multiplying ω inside the detector probabilities,
/// i.e. half the fractional shift.
pub fn phase_coefficient(body: &RotatingBody) -> f64 {
    2.0 * k_factor(body)
}

/// Signed shift `2Kω (cos δᵢ − cos δₒ)` in rad/s.
pub fn doppler_shift(body: &RotatingBody, geometry: &FlybyGeometry, beam: &BeamSource) -> f64 {
    let k = k_factor(body);
    2.0 * k
        * beam.angular_frequency
        * (geometry.declination_in.cos() - geometry.declination_out.cos())
}

/// Shift for a path parallel to the rotation axis, `8ΩRω/c = 4Kω`.
pub fn parallel_flyby_shift(body: &RotatingBody, beam: &BeamSource) -> f64 {
    4.0 * k_factor(body) * beam.angular_frequency
}
