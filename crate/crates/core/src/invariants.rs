//! Metric invariants of constant-curvature 3-manifolds.
//!
//! With constant scalar curvature R the Ricci tensor is (R/3)g, so
//! I₁ = ∫R dV = R·Vol, I₂ = ∫R² dV = R²·Vol and I₃ = ∫‖Ric‖² dV = (R²/3)·Vol.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Constant scalar curvature and volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldSpec {
    pub scalar_curvature: f64,
    volume: f64,
}

impl ManifoldSpec {
    pub fn new(scalar_curvature: f64, volume: f64) -> Result<Self> {
        if !(volume > 0.0) {
            return domain(format!("volume must be positive, got {volume}"));
        }
        Ok(Self { scalar_curvature, volume })
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantTriple {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

impl InvariantTriple {
    pub fn as_array(&self) -> [f64; 3] {
        [self.i1, self.i2, self.i3]
    }
}

pub fn invariant_triple(spec: ManifoldSpec) -> InvariantTriple {
    let r = spec.scalar_curvature;
    let i2 = r * r * spec.volume;
    InvariantTriple { i1: r * spec.volume, i2, i3: i2 / 3.0 }
}

/// Unit round 3-sphere: R = 6, Vol = 2π².
pub fn sphere_unit() -> ManifoldSpec {
    ManifoldSpec { scalar_curvature: 6.0, volume: 2.0 * PI * PI }
}

/// Rescales lengths by `s` (metric by s²): R → R/s², Vol → Vol·s³.
pub fn conformal_rescale(spec: ManifoldSpec, s: f64) -> Result<ManifoldSpec> {
    if !(s > 0.0) {
        return domain(format!("length scale must be positive, got {s}"));
    }
    ManifoldSpec::new(spec.scalar_curvature / (s * s), spec.volume * s * s * s)
}

/// Invariants of the metric C·g₀: R = R₀/C and Vol = Vol₀·C^{3/2}.
pub fn flow_invariant_scaling(c_value: f64, r0: f64, vol0: f64) -> Result<InvariantTriple> {
    if !(c_value > 0.0) {
        return domain(format!("conformal factor must be positive, got {c_value}"));
    }
    Ok(invariant_triple(ManifoldSpec::new(r0 / c_value, vol0 * c_value.powf(1.5))?))
}

/// True iff every component's relative deviation from `reference` is ≤ `tol`.
///
/// Zero reference components are compared absolutely.
pub fn sphere_signature_check(t: InvariantTriple, reference: InvariantTriple, tol: f64) -> bool {
    t.as_array().iter().zip(reference.as_array()).all(|(&x, r)| {
        let scale = if r == 0.0 { 1.0 } else { r.abs() };
        (x - r).abs() / scale <= tol
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn triples() {
        let flat = invariant_triple(ManifoldSpec::new(0.0, 5.0).unwrap());
        assert_eq!(flat.as_array(), [0.0, 0.0, 0.0]);
        let t = invariant_triple(sphere_unit());
        assert!(close(t.i1, 12.0 * PI * PI) && close(t.i2, 72.0 * PI * PI) && close(t.i3, 24.0 * PI * PI));
        let t = invariant_triple(ManifoldSpec::new(1.0, 3.0).unwrap());
        assert_eq!(t.as_array(), [3.0, 3.0, 1.0]);
        assert!(ManifoldSpec::new(1.0, 0.0).is_err());
    }

    #[test]
    fn rescaling() {
        let s = sphere_unit();
        assert_eq!(conformal_rescale(s, 1.0).unwrap(), s);
        let r = conformal_rescale(s, PI / 2.0).unwrap();
        assert!(close(r.scalar_curvature, 24.0 / (PI * PI)));
        assert!(close(r.volume(), PI.powi(5) / 4.0));
        assert!(conformal_rescale(s, 0.0).is_err());
    }

    #[test]
    fn flow_scaling() {
        let base = invariant_triple(sphere_unit());
        assert_eq!(flow_invariant_scaling(1.0, 6.0, 2.0 * PI * PI).unwrap(), base);
        let t4 = flow_invariant_scaling(4.0, 6.0, 2.0 * PI * PI).unwrap();
        assert!(close(t4.i1 / base.i1, 2.0));
        let tp = flow_invariant_scaling(PI, 6.0, 2.0 * PI * PI).unwrap();
        assert!(close(tp.i1, 209.921_019_931_498_35));
        assert!(flow_invariant_scaling(0.0, 6.0, 1.0).is_err());
    }

    #[test]
    fn signature_check() {
        let r = invariant_triple(sphere_unit());
        assert!(sphere_signature_check(r, r, 1e-12));
        let tol = 1e-6;
        let off = InvariantTriple { i2: r.i2 * (1.0 + 2.0 * tol), ..r };
        assert!(!sphere_signature_check(off, r, tol));
        let limit = flow_invariant_scaling(PI, 6.0, 2.0 * PI * PI).unwrap();
        let near = flow_invariant_scaling(PI * (1.0 + 1e-15), 6.0, 2.0 * PI * PI).unwrap();
        assert!(sphere_signature_check(near, limit, 1e-12));
    }
}
