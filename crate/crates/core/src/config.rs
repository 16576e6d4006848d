//! Flat `key = value` run configuration.
//!
//! Recognized keys: alpha, c, K, lambda, k_curv, regime, dt, method, tol,
//! grid.n, grid.beta_max. Blank lines and `#` comments are ignored; unknown
//! or repeated keys are errors.

use std::collections::BTreeSet;
use std::path::Path;

use crate::deform::critical_beta;
use crate::energy::PotentialParams;
use crate::error::{Error, Result};
use crate::flow::{FlowConfig, Regime};
use crate::grid::VelocityGrid;

pub const KEYS: [&str; 11] =
    ["alpha", "c", "K", "lambda", "k_curv", "regime", "dt", "method", "tol", "grid.n", "grid.beta_max"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub flow: FlowConfig,
    pub lambda: f64,
    pub grid_n: usize,
    /// `None` means β_c, or 1 for the supercritical regime.
    pub grid_beta_max: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { flow: FlowConfig::default(), lambda: 1.0, grid_n: 101, grid_beta_max: None }
    }
}

impl RunConfig {
    pub fn beta_max(&self) -> f64 {
        self.grid_beta_max.unwrap_or(match self.flow.regime {
            Regime::SupercriticalLinear => 1.0,
            _ => critical_beta().value(),
        })
    }

    pub fn grid(&self) -> Result<VelocityGrid> {
        VelocityGrid::uniform(0.0, self.beta_max(), self.grid_n)
    }

    pub fn potential(&self) -> Result<PotentialParams> {
        PotentialParams::new(self.lambda)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!("line {}: unknown key '{key}'", lineno + 1)));
            }
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
            let num = || {
                value
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("line {}: '{key}' expects a number, got '{value}'", lineno + 1)))
            };
            match key {
                "alpha" => cfg.flow.alpha = num()?,
                "c" => cfg.flow.c = num()?,
                "K" => cfg.flow.k_offset = num()?,
                "lambda" => cfg.lambda = num()?,
                "k_curv" => cfg.flow.k_curv = num()?,
                "regime" => cfg.flow.regime = value.parse()?,
                "dt" => cfg.flow.dt = if value == "auto" { None } else { Some(num()?) },
                "method" => cfg.flow.method = value.parse()?,
                "tol" => cfg.flow.tol = num()?,
                "grid.n" => {
                    cfg.grid_n = value.parse().map_err(|_| {
                        Error::Config(format!("line {}: 'grid.n' expects an integer, got '{value}'", lineno + 1))
                    })?
                }
                "grid.beta_max" => cfg.grid_beta_max = Some(num()?),
                _ => unreachable!("key list checked above"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.flow.validate()?;
        self.potential()?;
        if self.grid_n < 2 {
            return Err(Error::Config(format!("grid.n must be at least 2, got {}", self.grid_n)));
        }
        let bm = self.beta_max();
        if !(bm > 0.0 && bm <= 1.0) {
            return Err(Error::Config(format!("grid.beta_max must lie in (0, 1], got {bm}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::Method;

    #[test]
    fn parses_all_keys() {
        let text = "\
# comment
alpha = 2.5
c = 3
K = 1
lambda = 0.5
k_curv = 2   # trailing comment
regime = supercritical-linear
dt = 1e-4
method = adaptive-rk
tol = 1e-9
grid.n = 33
grid.beta_max = 0.9
";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.flow.alpha, 2.5);
        assert_eq!(cfg.flow.c, 3.0);
        assert_eq!(cfg.flow.k_offset, 1.0);
        assert_eq!(cfg.lambda, 0.5);
        assert_eq!(cfg.flow.k_curv, 2.0);
        assert_eq!(cfg.flow.regime, Regime::SupercriticalLinear);
        assert_eq!(cfg.flow.dt, Some(1e-4));
        assert_eq!(cfg.flow.method, Method::AdaptiveRk);
        assert_eq!(cfg.flow.tol, 1e-9);
        assert_eq!(cfg.grid_n, 33);
        assert_eq!(cfg.beta_max(), 0.9);
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg.beta_max(), critical_beta().value());
        let sup = RunConfig::parse("regime = supercritical-linear").unwrap();
        assert_eq!(sup.beta_max(), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::parse("alhpa = 1").is_err());
        assert!(RunConfig::parse("alpha = 1\nalpha = 2").is_err());
        assert!(RunConfig::parse("alpha 1").is_err());
        assert!(RunConfig::parse("alpha = x").is_err());
        assert!(RunConfig::parse("alpha = -1").is_err());
        assert!(RunConfig::parse("grid.n = 1").is_err());
        assert!(RunConfig::parse("grid.beta_max = 1.5").is_err());
        assert!(RunConfig::parse("regime = turbulent").is_err());
        assert!(RunConfig::parse("lambda = -0.1").is_err());
    }
}
