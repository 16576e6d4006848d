//! Velocity grids and sampled deformation profiles.

use crate::deform::{c_model, critical_beta, VelocityRatio};
use crate::error::{domain, Error, Result};

/// Strictly increasing speed ratios in [0, 1], at least two of them.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    samples: Vec<f64>,
}

impl VelocityGrid {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return domain(format!("velocity grid needs at least 2 samples, got {}", samples.len()));
        }
        if samples.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return domain("velocity grid samples must lie in [0, 1]");
        }
        if samples.windows(2).any(|w| w[1] <= w[0]) {
            return domain("velocity grid samples must be strictly increasing");
        }
        Ok(Self { samples })
    }

    /// `n` evenly spaced samples from `beta_min` to `beta_max` inclusive.
    pub fn uniform(beta_min: f64, beta_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return domain(format!("velocity grid needs at least 2 samples, got {n}"));
        }
        if !(beta_min < beta_max) {
            return domain(format!("empty speed range [{beta_min}, {beta_max}]"));
        }
        let step = (beta_max - beta_min) / (n - 1) as f64;
        let mut samples: Vec<f64> = (0..n).map(|i| beta_min + step * i as f64).collect();
        samples[n - 1] = beta_max;
        Self::new(samples)
    }

    /// `n` samples spanning [0, β_c], the domain of the L² energy.
    pub fn subcritical(n: usize) -> Result<Self> {
        Self::uniform(0.0, critical_beta().value(), n)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn beta_max(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    pub fn ratios(&self) -> impl Iterator<Item = VelocityRatio> + '_ {
        self.samples.iter().map(|&b| VelocityRatio::new(b).expect("validated grid"))
    }
}

/// One C value per grid sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationProfile {
    pub values: Vec<f64>,
}

impl DeformationProfile {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    /// The static model C(β) = π(1 − β²) sampled on the grid.
    pub fn static_model(grid: &VelocityGrid) -> Self {
        Self::new(grid.ratios().map(|b| c_model(b).value()).collect())
    }

    pub fn uniform(grid: &VelocityGrid, value: f64) -> Self {
        Self::new(vec![value; grid.len()])
    }

    pub fn from_fn(grid: &VelocityGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::new(grid.samples().iter().map(|&b| f(b)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_against(&self, grid: &VelocityGrid) -> Result<()> {
        if self.values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "profile has {} values but grid has {} samples",
                self.values.len(),
                grid.len()
            )));
        }
        Ok(())
    }
}
