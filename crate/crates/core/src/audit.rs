//! Recomputes each printed reference value and records the deviation.

use std::f64::consts::PI;

use crate::deform::{c_model, critical_beta, geometric_measures, VelocityRatio};
use crate::elliptic::{c_complementary_form, c_exact};
use crate::error::Result;
use crate::flow::{fit_conformal_linearization, linearized_alpha};
use crate::invariants::{conformal_rescale, invariant_triple, sphere_unit, ManifoldSpec};

/// Relative deviation at or below which a row counts as reproduced.
pub const PASS_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AuditClaim {
    pub label: &'static str,
    pub paper_value: f64,
    pub computed_value: f64,
    pub abs_dev: f64,
    /// abs_dev / |paper_value|, or abs_dev when the printed value is 0.
    pub rel_dev: f64,
    pub note: &'static str,
}

impl AuditClaim {
    fn new(label: &'static str, paper_value: f64, computed_value: f64, note: &'static str) -> Self {
        let abs_dev = (paper_value - computed_value).abs();
        let rel_dev = if paper_value == 0.0 { abs_dev } else { abs_dev / paper_value.abs() };
        Self { label, paper_value, computed_value, abs_dev, rel_dev, note }
    }

    pub fn passes(&self) -> bool {
        self.rel_dev <= PASS_RTOL
    }

    pub fn status(&self) -> &'static str {
        if self.passes() {
            "PASS"
        } else {
            "DEVIATION"
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuditReport {
    pub claims: Vec<AuditClaim>,
}

impl AuditReport {
    pub fn get(&self, label: &str) -> Option<&AuditClaim> {
        self.claims.iter().find(|c| c.label == label)
    }

    pub fn deviations(&self) -> impl Iterator<Item = &AuditClaim> {
        self.claims.iter().filter(|c| !c.passes())
    }
}

pub fn paper_claim_audit() -> Result<AuditReport> {
    let pi2 = PI * PI;
    let bc = critical_beta();
    let mut rows = vec![
        AuditClaim::new("v_c", 0.8257, bc.value(), "sqrt(1 - 1/pi) rounds to 0.8256"),
        AuditClaim::new("C(v_c)", 1.0, c_model(bc).value(), "model value at the critical speed"),
    ];

    let unit = invariant_triple(sphere_unit());
    rows.push(AuditClaim::new("I1_unit_sphere", 12.0 * pi2, unit.i1, "R*Vol with R = 6, Vol = 2pi^2"));
    rows.push(AuditClaim::new("I2_unit_sphere", 72.0 * pi2, unit.i2, "R^2*Vol"));
    rows.push(AuditClaim::new("I3_unit_sphere", 48.0 * pi2, unit.i3, "(R^2/3)*Vol gives 24pi^2"));

    let rescaled = conformal_rescale(sphere_unit(), PI / 2.0)?;
    rows.push(AuditClaim::new(
        "R_rescaled",
        24.0 / pi2,
        rescaled.scalar_curvature,
        "metric factor (pi/2)^2, length factor pi/2",
    ));
    rows.push(AuditClaim::new(
        "Vol_rescaled_physical",
        PI.powi(5) / 4.0,
        rescaled.volume(),
        "2pi^2 * (pi/2)^3",
    ));

    let normalized = invariant_triple(ManifoldSpec::new(rescaled.scalar_curvature, PI.powi(3) / 4.0)?);
    rows.push(AuditClaim::new("I1_rescaled", 6.0 * pi2, normalized.i1, "R = 24/pi^2 with normalized volume pi^3/4"));
    rows.push(AuditClaim::new("I2_rescaled", 36.0 * pi2, normalized.i2, "R^2 * pi^3/4"));
    rows.push(AuditClaim::new("I3_rescaled", 24.0 * pi2, normalized.i3, "(R^2/3) * pi^3/4"));

    let physical = invariant_triple(rescaled);
    rows.push(AuditClaim::new("I1_rescaled_physical", 6.0 * pi2, physical.i1, "R = 24/pi^2 with volume pi^5/4"));
    rows.push(AuditClaim::new("I2_rescaled_physical", 36.0 * pi2, physical.i2, "R^2 * pi^5/4"));
    rows.push(AuditClaim::new("I3_rescaled_physical", 24.0 * pi2, physical.i3, "(R^2/3) * pi^5/4"));

    // limit metric pi*g0: metric factor pi, length factor sqrt(pi)
    let limit = invariant_triple(conformal_rescale(sphere_unit(), PI.sqrt())?);
    rows.push(AuditClaim::new("I1_limit_metric", 6.0 * pi2, limit.i1, "unit sphere under metric factor pi"));
    rows.push(AuditClaim::new("I2_limit_metric", 36.0 * pi2, limit.i2, "unit sphere under metric factor pi"));
    rows.push(AuditClaim::new("I3_limit_metric", 24.0 * pi2, limit.i3, "unit sphere under metric factor pi"));

    let rest = VelocityRatio::new(0.0)?;
    rows.push(AuditClaim::new(
        "E(k) modulus convention",
        c_complementary_form(rest),
        c_exact(rest),
        "2E(sqrt(1 - b^2)) vs perimeter integral 2E(b) at b = 0",
    ));

    let half = VelocityRatio::new(0.5)?;
    rows.push(AuditClaim::new(
        "C(0.5) model vs perimeter",
        c_model(half).value(),
        c_exact(half),
        "pi(1 - b^2) vs 2E(b)",
    ));

    rows.push(AuditClaim::new(
        "area at rest (D = 2)",
        geometric_measures(rest, 2.0)?.area,
        PI,
        "C^2 D^2 / 4 vs disk area pi D^2 / 4",
    ));

    let alpha = linearized_alpha(1.0)?;
    let fit = fit_conformal_linearization(1.0, 1e-3)?;
    rows.push(AuditClaim::new(
        "conformal linearization slope (k = 1)",
        -alpha,
        fit.slope,
        "fitted dCdot/dC near pi; magnitude 2k/pi^2, opposite sign",
    ));
    rows.push(AuditClaim::new(
        "conformal rate at C = pi (k = 1)",
        0.0,
        fit.intercept,
        "-2k/pi: pi is not a fixed point",
    ));

    Ok(AuditReport { claims: rows })
}
