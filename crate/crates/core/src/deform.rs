//! Closed-form deformation function C(β) = π(1 − β²) and derived quantities.
//!
//! All speeds are normalized to β = v/c. The dimensionful speed scale only
//! enters the supercritical offset and the flow rates.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Dimensionless speed β = |v|/c, restricted to [0, 1].
///
/// Negative velocities are represented by their magnitude, so C(−v) = C(v)
/// holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct VelocityRatio(f64);

impl VelocityRatio {
    pub fn new(beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return domain(format!("velocity ratio must lie in [0, 1], got {beta}"));
        }
        Ok(Self(beta))
    }

    /// Builds β = |v|/c from a signed velocity.
    pub fn from_velocity(v: f64, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return domain(format!("speed scale c must be positive, got {c}"));
        }
        Self::new(v.abs() / c)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Value of the deformation function, in units where the rest value is π.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DeformationValue(pub f64);

impl DeformationValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Perimeter, area and volume ratio of the contracted figure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricMeasures {
    /// L = C·D
    pub length: f64,
    /// A = ¼C²D²
    pub area: f64,
    /// V(β)/V(0) = (C/π)³
    pub volume_ratio: f64,
}

/// C(β) = π(1 − β²).
pub fn c_model(beta: VelocityRatio) -> DeformationValue {
    let b = beta.value();
    DeformationValue(PI * (1.0 - b * b))
}

/// First and second derivatives of C with respect to β: (−2πβ, −2π).
pub fn c_model_derivatives(beta: VelocityRatio) -> (f64, f64) {
    (-2.0 * PI * beta.value(), -2.0 * PI)
}

/// Speed ratio at which C(β) = 1, i.e. β_c = √(1 − 1/π).
pub fn critical_beta() -> VelocityRatio {
    VelocityRatio((1.0 - 1.0 / PI).sqrt())
}

/// γ = 1/√(1 − β²). Undefined at β = 1.
pub fn lorentz_gamma(beta: VelocityRatio) -> Result<f64> {
    let b = beta.value();
    if b >= 1.0 {
        return domain("Lorentz factor diverges at beta = 1");
    }
    Ok(1.0 / (1.0 - b * b).sqrt())
}

/// Supercritical stabilization value C₀ = π + K/(βc)².
pub fn c_supercritical_limit(beta: VelocityRatio, k_offset: f64, c: f64) -> Result<DeformationValue> {
    if !(c > 0.0) {
        return domain(format!("speed scale c must be positive, got {c}"));
    }
    let v = beta.value() * c;
    if v == 0.0 {
        return domain("supercritical limit is undefined at beta = 0");
    }
    Ok(DeformationValue(PI + k_offset / (v * v)))
}

/// Length, area and volume ratio for rest diameter `diameter`.
///
/// The area uses A = ¼C²D² as stated by the model, which gives π²D²/4 at rest
/// rather than the disk area πD²/4.
pub fn geometric_measures(beta: VelocityRatio, diameter: f64) -> Result<GeometricMeasures> {
    if !(diameter > 0.0) {
        return domain(format!("rest diameter must be positive, got {diameter}"));
    }
    let c = c_model(beta).value();
    Ok(GeometricMeasures {
        length: c * diameter,
        area: 0.25 * c * c * diameter * diameter,
        volume_ratio: (c / PI).powi(3),
    })
}

/// Inflection speed of the quartic-corrected profile
/// C(v) = π(1 − v²/c²) + a(v²/c²)².
///
/// Returns `None` when the correction keeps the profile concave on [0, c].
pub fn quartic_inflection(a: f64, c: f64) -> Option<f64> {
    if !(c > 0.0) || !(a > 0.0) {
        return None;
    }
    let ratio = PI / (6.0 * a);
    (ratio <= 1.0).then(|| c * ratio.sqrt())
}

/// The quartic-corrected profile itself, used by inflection scans.
pub fn quartic_profile(v: f64, a: f64, c: f64) -> f64 {
    let x = (v / c) * (v / c);
    PI * (1.0 - x) + a * x * x
}
