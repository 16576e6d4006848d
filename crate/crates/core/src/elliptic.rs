//! Exact perimeter of the contracted circle.
//!
//! A circle of radius R contracted along one axis by √(1 − β²) has perimeter
//! L = R∫₀^{2π}√(1 − β²sin²θ)dθ = 4R·E(β), so C = L/2R = 2E(β).

use std::f64::consts::{FRAC_PI_2, PI};

use crate::deform::{c_model, VelocityRatio};
use crate::error::{domain, Result};

const AGM_RTOL: f64 = 1e-15;
const AGM_MAX_ITER: usize = 64;

/// Elliptic modulus k ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Modulus(f64);

impl Modulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&k) {
            return domain(format!("elliptic modulus must lie in [0, 1], got {k}"));
        }
        Ok(Self(k))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<VelocityRatio> for Modulus {
    fn from(beta: VelocityRatio) -> Self {
        Modulus(beta.value())
    }
}

/// The three perimeter ratios at one speed and their deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerimeterComparison {
    pub c_exact: f64,
    pub c_first_order: f64,
    pub c_model: f64,
    /// c_exact − c_model
    pub dev_model: f64,
    /// c_exact − c_first_order
    pub dev_first_order: f64,
}

/// Complete elliptic integral of the second kind, E(k) = ∫₀^{π/2}√(1 − k²sin²θ)dθ.
///
/// Computed with the AGM: with a₀ = 1, b₀ = √(1 − k²), c₀ = k and
/// cₙ₊₁ = (aₙ − bₙ)/2, E = K·(1 − Σ 2ⁿ⁻¹cₙ²) where K = π/(2·AGM).
pub fn complete_elliptic_e(k: Modulus) -> f64 {
    let k = k.value();
    if k == 0.0 {
        return FRAC_PI_2;
    }
    if k == 1.0 {
        return 1.0;
    }
    let mut a = 1.0_f64;
    let mut b = (1.0 - k * k).sqrt();
    let mut sum = 0.5 * k * k;
    let mut weight = 0.5;
    for _ in 0..AGM_MAX_ITER {
        let c = 0.5 * (a - b);
        let next_a = 0.5 * (a + b);
        let next_b = (a * b).sqrt();
        weight *= 2.0;
        sum += weight * c * c;
        a = next_a;
        b = next_b;
        if (a - b).abs() <= AGM_RTOL * a {
            break;
        }
    }
    PI / (2.0 * a) * (1.0 - sum)
}

/// C(β) = 2E(β), the exact perimeter over the rest diameter.
pub fn c_exact(beta: VelocityRatio) -> f64 {
    2.0 * complete_elliptic_e(beta.into())
}

/// First-order expansion π(1 − β²/4).
pub fn c_first_order(beta: VelocityRatio) -> f64 {
    let b = beta.value();
    PI * (1.0 - 0.25 * b * b)
}

/// 2E(√(1 − β²)), the complementary-modulus form. Kept for the audit only;
/// it disagrees with [`c_exact`] except at β = 1/√2.
pub fn c_complementary_form(beta: VelocityRatio) -> f64 {
    let b = beta.value();
    let kp = (1.0 - b * b).max(0.0).sqrt();
    2.0 * complete_elliptic_e(Modulus(kp.min(1.0)))
}

pub fn compare(beta: VelocityRatio) -> PerimeterComparison {
    let exact = c_exact(beta);
    let first = c_first_order(beta);
    let model = c_model(beta).value();
    PerimeterComparison {
        c_exact: exact,
        c_first_order: first,
        c_model: model,
        dev_model: exact - model,
        dev_first_order: exact - first,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_simpson;

    fn quad_e(k: f64) -> f64 {
        adaptive_simpson(|t: f64| (1.0 - k * k * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-13)
    }

    fn b(x: f64) -> VelocityRatio {
        VelocityRatio::new(x).unwrap()
    }

    #[test]
    fn endpoints() {
        assert_eq!(complete_elliptic_e(Modulus::new(0.0).unwrap()), FRAC_PI_2);
        assert_eq!(complete_elliptic_e(Modulus::new(1.0).unwrap()), 1.0);
        assert!(Modulus::new(1.5).is_err());
        assert!(Modulus::new(-0.5).is_err());
    }

    #[test]
    fn reference_value_at_half() {
        // mpmath ellipe(m = 0.25)
        let e = complete_elliptic_e(Modulus::new(0.5).unwrap());
        assert!((e - 1.467_462_209_339_427_2).abs() < 1e-14);
        assert!((e - quad_e(0.5)).abs() < 1e-12);
    }

    #[test]
    fn near_one_is_continuous() {
        let e = complete_elliptic_e(Modulus::new(1.0 - 1e-12).unwrap());
        assert!((e - 1.0).abs() < 1e-9);
        assert!(e > 1.0);
    }

    #[test]
    fn perimeter_ratios() {
        assert!((c_exact(b(0.0)) - PI).abs() < 1e-15);
        assert_eq!(c_exact(b(1.0)), 2.0);
        assert!((c_exact(b(0.5)) - 2.934_924_418_678_854_3).abs() < 1e-13);
        assert!((c_first_order(b(0.5)) - PI * 15.0 / 16.0).abs() < 1e-15);
        assert!((c_first_order(b(1.0)) - 0.75 * PI).abs() < 1e-15);
    }

    #[test]
    fn comparison_rows() {
        let r = compare(b(0.0));
        assert_eq!((r.dev_model, r.dev_first_order), (0.0, 0.0));
        let r = compare(b(0.5));
        assert!((r.dev_model - 0.578_729_928_486_509_4).abs() < 1e-13);
        // leading term −3πβ⁴/64 of the series; exact value from mpmath
        let r = compare(b(0.1));
        assert!((r.dev_first_order + 1.478_791_248_234_187_5e-5).abs() < 1e-15);
        assert!((r.dev_first_order + 3.0 * PI / 64.0 * 1e-4).abs() < 1e-7);
    }

    #[test]
    fn complementary_form_agrees_only_at_diagonal() {
        let d = b(std::f64::consts::FRAC_1_SQRT_2);
        assert!((c_complementary_form(d) - c_exact(d)).abs() < 1e-14);
        assert_eq!(c_complementary_form(b(0.0)), 2.0);
        assert!((c_complementary_form(b(1.0)) - PI).abs() < 1e-15);
    }
}
