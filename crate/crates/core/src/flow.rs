//! Evolution of C(β, τ) in flow time τ.
//!
//! Every grid sample follows its own scalar ODE; there is no coupling across
//! β. Supported dynamics:
//!
//! - linear relaxation dC/dτ = −αβ²(C − target), with target π
//!   (subcritical) or the piecewise π / C₀ target (supercritical);
//! - the conformal reduction dC/dτ = −2k/C, which reaches C = 0 in finite
//!   time τ* = C(0)²/4k;
//! - the undamped second-order equation C̈ + αβ²(C − π) = 0 started at rest.
//!
//! All rates are in normalized units where κ = α·v²/c² = αβ².

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::deform::{c_supercritical_limit, critical_beta, VelocityRatio};
use crate::error::{domain, Error, Result};
use crate::grid::{DeformationProfile, VelocityGrid};
use crate::ode::{rk4_adaptive, rk4_fixed};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Relaxation toward π at every sample.
    SubcriticalLinear,
    /// Piecewise relaxation: toward π below β_c, toward C₀ = π + K/(βc)² at or above.
    SupercriticalLinear,
    ConformalNonlinear,
    SecondOrder,
}

impl Regime {
    pub fn is_linear(self) -> bool {
        matches!(self, Regime::SubcriticalLinear | Regime::SupercriticalLinear)
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::SubcriticalLinear => "subcritical-linear",
            Regime::SupercriticalLinear => "supercritical-linear",
            Regime::ConformalNonlinear => "conformal-nonlinear",
            Regime::SecondOrder => "second-order",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subcritical-linear" | "subcritical" => Ok(Regime::SubcriticalLinear),
            "supercritical-linear" | "supercritical" => Ok(Regime::SupercriticalLinear),
            "conformal-nonlinear" | "conformal" => Ok(Regime::ConformalNonlinear),
            "second-order" => Ok(Regime::SecondOrder),
            other => Err(Error::Config(format!("unknown regime '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4,
    AdaptiveRk,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rk4 => "rk4",
            Method::AdaptiveRk => "adaptive-rk",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "adaptive-rk" | "adaptive" => Ok(Method::AdaptiveRk),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// Physical and numerical parameters of a flow run.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub alpha: f64,
    /// Speed scale; only enters the supercritical target.
    pub c: f64,
    /// Supercritical offset K in C₀ = π + K/v².
    pub k_offset: f64,
    pub regime: Regime,
    /// Background curvature constant for the conformal regime.
    pub k_curv: f64,
    /// Fixed step; `None` selects min(1e-3, 0.01/κ_max).
    pub dt: Option<f64>,
    pub method: Method,
    pub tol: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            c: 1.0,
            k_offset: 0.0,
            regime: Regime::SubcriticalLinear,
            k_curv: 1.0,
            dt: None,
            method: Method::Rk4,
            tol: 1e-10,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::Config(format!("{what} must be positive and finite, got {v}")));
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad("c", self.c);
        }
        if !(self.tol > 0.0) {
            return bad("tol", self.tol);
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad("dt", dt);
            }
        }
        if !self.k_offset.is_finite() {
            return Err(Error::Config(format!("K must be finite, got {}", self.k_offset)));
        }
        match self.regime {
            Regime::ConformalNonlinear => {
                if !(self.k_curv > 0.0 && self.k_curv.is_finite()) {
                    return bad("k_curv", self.k_curv);
                }
            }
            _ => {
                if !(self.alpha > 0.0 && self.alpha.is_finite()) {
                    return bad("alpha", self.alpha);
                }
            }
        }
        Ok(())
    }

    /// Per-sample relaxation rate κ = αβ².
    pub fn rate(&self, beta: VelocityRatio) -> f64 {
        self.alpha * beta.value() * beta.value()
    }

    /// Fixed point of a linear or second-order regime at this speed.
    ///
    /// Samples exactly at β_c take the subcritical branch.
    pub fn target(&self, beta: VelocityRatio) -> Result<f64> {
        match self.regime {
            Regime::SubcriticalLinear | Regime::SecondOrder => Ok(PI),
            Regime::SupercriticalLinear => {
                if beta.value() <= critical_beta().value() {
                    Ok(PI)
                } else {
                    Ok(c_supercritical_limit(beta, self.k_offset, self.c)?.value())
                }
            }
            Regime::ConformalNonlinear => domain("the conformal flow has no fixed point"),
        }
    }
}

/// Flow-time snapshot of the whole profile.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub tau: f64,
    pub profile: DeformationProfile,
    /// dC/dτ per sample, carried only by the second-order regime.
    pub rate: Option<DeformationProfile>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: VelocityGrid,
    pub states: Vec<FlowState>,
    pub config: FlowConfig,
}

impl Trajectory {
    pub fn final_state(&self) -> &FlowState {
        self.states.last().expect("trajectory has at least one state")
    }

    pub fn taus(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.tau).collect()
    }

    /// C(τ) at grid sample `index` across all snapshots.
    pub fn sample_series(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.profile.values[index]).collect()
    }
}

/// Instantaneous dC/dτ for the configured regime (C̈ for the second-order regime).
pub fn rhs(c_value: f64, beta: VelocityRatio, cfg: &FlowConfig) -> Result<f64> {
    match cfg.regime {
        Regime::ConformalNonlinear => {
            if !(c_value > 0.0) {
                return domain(format!("conformal flow requires C > 0, got {c_value}"));
            }
            Ok(-2.0 * cfg.k_curv / c_value)
        }
        _ => Ok(-cfg.rate(beta) * (c_value - cfg.target(beta)?)),
    }
}

/// Exact solution target + (C₀ − target)·e^{−κτ} of a linear regime.
pub fn analytic_linear(beta: VelocityRatio, tau: f64, c_init: f64, cfg: &FlowConfig) -> Result<f64> {
    if !cfg.regime.is_linear() {
        return Err(Error::Config(format!("analytic_linear needs a linear regime, got {}", cfg.regime)));
    }
    cfg.validate()?;
    let target = cfg.target(beta)?;
    Ok(target + (c_init - target) * (-cfg.rate(beta) * tau).exp())
}

/// Time at which the conformal flow started at `c_init` reaches C = 0.
pub fn conformal_tau_star(c_init: f64, k_curv: f64) -> f64 {
    c_init * c_init / (4.0 * k_curv)
}

/// Exact conformal solution √(C₀² − 4kτ), defined for τ < τ*.
pub fn analytic_conformal(c_init: f64, k_curv: f64, tau: f64) -> Result<f64> {
    if !(c_init > 0.0) {
        return domain(format!("conformal flow requires C > 0, got {c_init}"));
    }
    if !(k_curv > 0.0) {
        return domain(format!("k_curv must be positive, got {k_curv}"));
    }
    if tau < 0.0 {
        return domain(format!("flow time must be non-negative, got {tau}"));
    }
    let tau_star = conformal_tau_star(c_init, k_curv);
    if tau >= tau_star {
        return Err(Error::DomainExhausted { beta: None, tau_star });
    }
    Ok((c_init * c_init - 4.0 * k_curv * tau).sqrt())
}

/// Linear coefficient α = 2k/π² of the conformal flow expanded about C = π.
pub fn linearized_alpha(k_curv: f64) -> Result<f64> {
    if !(k_curv > 0.0) {
        return domain(format!("k_curv must be positive, got {k_curv}"));
    }
    Ok(2.0 * k_curv / (PI * PI))
}

/// Relaxation time 1/(αβ²).
pub fn relaxation_time(beta: VelocityRatio, alpha: f64) -> Result<f64> {
    if beta.value() == 0.0 {
        return domain("relaxation time diverges at beta = 0");
    }
    if !(alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    Ok(1.0 / (alpha * beta.value() * beta.value()))
}

/// π + δ·cos(β√α·τ): the second-order equation started at rest.
pub fn second_order_solution(beta: VelocityRatio, alpha: f64, delta_c0: f64, tau: f64) -> f64 {
    let omega = beta.value() * alpha.sqrt();
    PI + delta_c0 * (omega * tau).cos()
}

/// dC/dτ of [`second_order_solution`].
pub fn second_order_rate(beta: VelocityRatio, alpha: f64, delta_c0: f64, tau: f64) -> f64 {
    let omega = beta.value() * alpha.sqrt();
    -delta_c0 * omega * (omega * tau).sin()
}

/// Oscillator energy ½Ċ² + ½αβ²(C − π)².
pub fn second_order_energy(c_value: f64, c_rate: f64, beta: VelocityRatio, alpha: f64) -> f64 {
    let b = beta.value();
    0.5 * c_rate * c_rate + 0.5 * alpha * b * b * (c_value - PI).powi(2)
}

/// Snapshot times 0, s, 2s, … below `tau_end`, then `tau_end`.
pub fn snapshot_times(tau_end: f64, snapshot_every: f64) -> Vec<f64> {
    let mut times = vec![0.0];
    let mut i = 1u64;
    loop {
        let t = snapshot_every * i as f64;
        if t >= tau_end * (1.0 - 1e-12) {
            break;
        }
        times.push(t);
        i += 1;
    }
    times.push(tau_end);
    times
}

fn auto_dt(grid: &VelocityGrid, initial: &DeformationProfile, cfg: &FlowConfig, tau_end: f64) -> f64 {
    let stiffness = match cfg.regime {
        Regime::SubcriticalLinear | Regime::SupercriticalLinear => {
            grid.ratios().map(|b| cfg.rate(b)).fold(0.0, f64::max)
        }
        Regime::SecondOrder => grid.beta_max() * cfg.alpha.sqrt(),
        Regime::ConformalNonlinear => initial
            .values
            .iter()
            .map(|&c| {
                let end = (c * c - 4.0 * cfg.k_curv * tau_end).max(f64::MIN_POSITIVE);
                2.0 * cfg.k_curv / end
            })
            .fold(0.0, f64::max),
    };
    if stiffness > 0.0 {
        (0.01 / stiffness).min(1e-3)
    } else {
        1e-3
    }
}

/// Evolves one sample through `times` (starting at `times[0]`), returning C
/// at each time and, for the second-order regime, dC/dτ as well.
pub fn evolve_sample(
    beta: VelocityRatio,
    c_init: f64,
    cfg: &FlowConfig,
    times: &[f64],
    dt: f64,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let mut h = dt;
    let mut advance = |f: &dyn Fn(&[f64; 2]) -> [f64; 2], y: [f64; 2], t0: f64, t1: f64| -> Result<[f64; 2]> {
        match cfg.method {
            Method::Rk4 => rk4_fixed(&f, y, t0, t1, dt),
            Method::AdaptiveRk => rk4_adaptive(&f, y, t0, t1, cfg.tol, &mut h),
        }
    };
    let mut values = Vec::with_capacity(times.len());
    let mut rates = Vec::with_capacity(times.len());
    let mut y = [c_init, 0.0];
    values.push(y[0]);
    rates.push(y[1]);
    match cfg.regime {
        Regime::ConformalNonlinear => {
            let k = cfg.k_curv;
            // C ≤ 0 yields NaN, which the stepper reports
            let f = move |y: &[f64; 2]| [if y[0] > 0.0 { -2.0 * k / y[0] } else { f64::NAN }, 0.0];
            for w in times.windows(2) {
                y = advance(&f, y, w[0], w[1]).map_err(|e| match e {
                    Error::Numerical(_) => Error::DomainExhausted {
                        beta: Some(beta.value()),
                        tau_star: conformal_tau_star(c_init, k),
                    },
                    other => other,
                })?;
                if !(y[0] > 0.0) {
                    return Err(Error::DomainExhausted {
                        beta: Some(beta.value()),
                        tau_star: conformal_tau_star(c_init, k),
                    });
                }
                values.push(y[0]);
            }
            Ok((values, None))
        }
        Regime::SecondOrder => {
            let kappa = cfg.rate(beta);
            let f = move |y: &[f64; 2]| [y[1], -kappa * (y[0] - PI)];
            for w in times.windows(2) {
                y = advance(&f, y, w[0], w[1])?;
                values.push(y[0]);
                rates.push(y[1]);
            }
            Ok((values, Some(rates)))
        }
        Regime::SubcriticalLinear | Regime::SupercriticalLinear => {
            let kappa = cfg.rate(beta);
            let target = cfg.target(beta)?;
            let f = move |y: &[f64; 2]| [-kappa * (y[0] - target), 0.0];
            for w in times.windows(2) {
                y = advance(&f, y, w[0], w[1])?;
                values.push(y[0]);
            }
            Ok((values, None))
        }
    }
}

/// Integrates every grid sample from τ = 0 to `tau_end`, recording snapshots
/// at multiples of `snapshot_every` and at `tau_end`.
///
/// Samples are evolved in parallel; the result is identical to sequential
/// evaluation.
pub fn integrate(
    grid: &VelocityGrid,
    initial: &DeformationProfile,
    cfg: &FlowConfig,
    tau_end: f64,
    snapshot_every: f64,
) -> Result<Trajectory> {
    cfg.validate()?;
    initial.check_against(grid)?;
    if !(tau_end > 0.0 && tau_end.is_finite()) {
        return domain(format!("tau_end must be positive, got {tau_end}"));
    }
    if !(snapshot_every > 0.0) {
        return domain(format!("snapshot interval must be positive, got {snapshot_every}"));
    }
    if let Some(i) = initial.values.iter().position(|v| !v.is_finite()) {
        return domain(format!("initial profile is not finite at beta = {}", grid.samples()[i]));
    }
    if cfg.regime == Regime::ConformalNonlinear {
        if let Some(i) = initial.values.iter().position(|&v| !(v > 0.0)) {
            return domain(format!(
                "conformal flow requires C > 0, got {} at beta = {}",
                initial.values[i],
                grid.samples()[i]
            ));
        }
        // the sample that runs out first
        let (i, tau_star) = initial
            .values
            .iter()
            .map(|&c| conformal_tau_star(c, cfg.k_curv))
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty grid");
        if tau_end >= tau_star {
            return Err(Error::DomainExhausted { beta: Some(grid.samples()[i]), tau_star });
        }
    }

    let dt = cfg.dt.unwrap_or_else(|| auto_dt(grid, initial, cfg, tau_end));
    let times = snapshot_times(tau_end, snapshot_every);
    let betas: Vec<VelocityRatio> = grid.ratios().collect();
    let per_sample: Vec<(Vec<f64>, Option<Vec<f64>>)> = betas
        .par_iter()
        .zip(initial.values.par_iter())
        .map(|(&beta, &c0)| evolve_sample(beta, c0, cfg, &times, dt))
        .collect::<Result<_>>()?;

    let states = times
        .iter()
        .enumerate()
        .map(|(j, &tau)| FlowState {
            tau,
            profile: DeformationProfile::new(per_sample.iter().map(|(v, _)| v[j]).collect()),
            rate: (cfg.regime == Regime::SecondOrder).then(|| {
                DeformationProfile::new(
                    per_sample.iter().map(|(_, r)| r.as_ref().map_or(0.0, |r| r[j])).collect(),
                )
            }),
        })
        .collect();
    Ok(Trajectory { grid: grid.clone(), states, config: cfg.clone() })
}

/// Least-squares slope of −ln|δ(τ)| against τ, i.e. the measured decay rate.
///
/// Points with |δ| below `floor` are ignored; `None` if fewer than two remain.
pub fn fit_decay_rate(taus: &[f64], deviations: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .zip(deviations)
        .filter(|(_, d)| d.abs() > floor)
        .map(|(&t, d)| (t, d.abs().ln()))
        .collect();
    linear_fit(&pts).map(|(slope, _)| -slope)
}

/// Ordinary least squares y = slope·x + intercept.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Linear model Ċ ≈ intercept + slope·(C − π) fitted to a numerically
/// integrated conformal trajectory crossing C = π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalLinearization {
    pub slope: f64,
    pub intercept: f64,
}

/// Integrates the conformal flow from π + δ until it reaches π − δ and fits
/// the observed Ċ (central differences of the trajectory) against C − π.
///
/// The slope comes out as +2k/π² and the intercept as −2k/π: the flow passes
/// through π without stopping, and nearby trajectories separate at rate 2k/π².
pub fn fit_conformal_linearization(k_curv: f64, delta: f64) -> Result<ConformalLinearization> {
    if !(delta > 0.0 && delta < PI) {
        return domain(format!("perturbation must lie in (0, π), got {delta}"));
    }
    let c0 = PI + delta;
    let cfg = FlowConfig { regime: Regime::ConformalNonlinear, k_curv, ..FlowConfig::default() };
    cfg.validate()?;
    // C² is affine in τ, so the crossing time of π − δ is known
    let tau_end = (c0 * c0 - (PI - delta).powi(2)) / (4.0 * k_curv);
    let n = 201;
    let times: Vec<f64> = (0..n).map(|i| tau_end * i as f64 / (n - 1) as f64).collect();
    let h = times[1] - times[0];
    let beta = VelocityRatio::new(0.0)?;
    let (values, _) = evolve_sample(beta, c0, &cfg, &times, (h / 10.0).min(1e-3))?;
    let points: Vec<(f64, f64)> = (1..n - 1)
        .map(|i| (values[i] - PI, (values[i + 1] - values[i - 1]) / (2.0 * h)))
        .collect();
    let (slope, intercept) =
        linear_fit(&points).ok_or_else(|| Error::Numerical("degenerate linearization fit".into()))?;
    Ok(ConformalLinearization { slope, intercept })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: f64) -> VelocityRatio {
        VelocityRatio::new(x).unwrap()
    }

    fn cfg(regime: Regime) -> FlowConfig {
        FlowConfig { regime, ..FlowConfig::default() }
    }

    #[test]
    fn rhs_values() {
        let sub = cfg(Regime::SubcriticalLinear);
        assert_eq!(rhs(PI, b(0.7), &sub).unwrap(), 0.0);
        assert!((rhs(PI + 1.0, b(0.5), &sub).unwrap() + 0.25).abs() < 1e-15);
        let conf = cfg(Regime::ConformalNonlinear);
        assert_eq!(rhs(2.0, b(0.3), &conf).unwrap(), -1.0);
        assert!(rhs(0.0, b(0.3), &conf).is_err());
        assert!(rhs(-1.0, b(0.3), &conf).is_err());
    }

    #[test]
    fn supercritical_target_is_piecewise() {
        let sup = FlowConfig { k_offset: 1.0, ..cfg(Regime::SupercriticalLinear) };
        assert_eq!(sup.target(b(0.5)).unwrap(), PI);
        assert_eq!(sup.target(critical_beta()).unwrap(), PI);
        assert!((sup.target(b(1.0)).unwrap() - (PI + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn analytic_linear_values() {
        let sub = cfg(Regime::SubcriticalLinear);
        assert_eq!(analytic_linear(b(0.4), 0.0, 1.3, &sub).unwrap(), 1.3);
        assert_eq!(analytic_linear(b(0.4), 7.0, PI, &sub).unwrap(), PI);
        let half = analytic_linear(b(1.0), 2f64.ln(), PI + 1.0, &sub).unwrap();
        assert!((half - (PI + 0.5)).abs() < 1e-15);
        assert!(analytic_linear(b(0.4), 1.0, 1.0, &cfg(Regime::ConformalNonlinear)).is_err());
    }

    #[test]
    fn analytic_linear_solves_rhs() {
        // central difference of the closed form reproduces the vector field
        let sup = FlowConfig { alpha: 2.5, k_offset: 0.7, ..cfg(Regime::SupercriticalLinear) };
        for &beta in &[0.2, 0.6, 0.9, 1.0] {
            let h = 1e-5;
            let tau = 0.3;
            let c = analytic_linear(b(beta), tau, 1.0, &sup).unwrap();
            let d = (analytic_linear(b(beta), tau + h, 1.0, &sup).unwrap()
                - analytic_linear(b(beta), tau - h, 1.0, &sup).unwrap())
                / (2.0 * h);
            assert!((d - rhs(c, b(beta), &sup).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn analytic_conformal_values() {
        assert_eq!(analytic_conformal(2.0, 1.0, 0.0).unwrap(), 2.0);
        assert!((analytic_conformal(2.0, 1.0, 0.75).unwrap() - 1.0).abs() < 1e-15);
        assert!(analytic_conformal(2.0, 1.0, 1.0 - 1e-12).unwrap() < 1e-5);
        assert!(analytic_conformal(2.0, 1.0, 1.0).is_err());
        assert!((analytic_conformal(2.0, 1.0, 0.5).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let near = analytic_conformal(PI, 1.0, PI * PI / 4.0 * (1.0 - 1e-10)).unwrap();
        assert!(near > 0.0 && near < 1e-4);
        assert!(matches!(
            analytic_conformal(PI, 1.0, PI * PI / 4.0),
            Err(Error::DomainExhausted { .. })
        ));
        assert!(analytic_conformal(0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn scalar_helpers() {
        assert!((linearized_alpha(PI * PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((linearized_alpha(1.0).unwrap() - 0.202_642_367_284_675_6).abs() < 1e-15);
        assert!(linearized_alpha(0.0).is_err());
        assert_eq!(relaxation_time(b(1.0), 1.0).unwrap(), 1.0);
        assert_eq!(relaxation_time(b(0.5), 1.0).unwrap(), 4.0);
        assert!((relaxation_time(b(0.1), 2.0).unwrap() - 50.0).abs() < 1e-12);
        assert!(relaxation_time(b(0.0), 1.0).is_err());
    }

    #[test]
    fn second_order_closed_form() {
        assert_eq!(second_order_solution(b(0.3), 2.0, 0.5, 0.0), PI + 0.5);
        assert!((second_order_solution(b(1.0), 1.0, 1.0, PI) - (PI - 1.0)).abs() < 1e-15);
        assert_eq!(second_order_solution(b(0.3), 2.0, 0.0, 5.0), PI);
    }

    #[test]
    fn snapshot_schedule() {
        assert_eq!(snapshot_times(1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let t = snapshot_times(1.0, 0.3);
        assert_eq!(t.len(), 5);
        assert!((t[3] - 0.9).abs() < 1e-15 && t[4] == 1.0);
        assert_eq!(snapshot_times(1.0, 5.0), vec![0.0, 1.0]);
    }

    #[test]
    fn equilibrium_is_preserved() {
        let grid = VelocityGrid::subcritical(9).unwrap();
        let tr = integrate(&grid, &DeformationProfile::uniform(&grid, PI), &cfg(Regime::SubcriticalLinear), 2.0, 0.5)
            .unwrap();
        for s in &tr.states {
            assert!(s.profile.values.iter().all(|&v| v == PI));
        }
    }

    #[test]
    fn integrate_matches_linear_oracle() {
        let grid = VelocityGrid::uniform(0.0, 1.0, 11).unwrap();
        let c = FlowConfig { dt: Some(1e-3), ..cfg(Regime::SubcriticalLinear) };
        let tr = integrate(&grid, &DeformationProfile::uniform(&grid, PI + 1.0), &c, 10.0, 1.0).unwrap();
        for (i, beta) in grid.ratios().enumerate() {
            let exact = analytic_linear(beta, 10.0, PI + 1.0, &c).unwrap();
            let got = tr.final_state().profile.values[i];
            assert!(((got - exact) / exact).abs() <= 1e-8);
        }
    }

    #[test]
    fn integrate_conformal_oracle_and_exhaustion() {
        let grid = VelocityGrid::uniform(0.0, 1.0, 3).unwrap();
        let c = cfg(Regime::ConformalNonlinear);
        let tr = integrate(&grid, &DeformationProfile::uniform(&grid, 2.0), &c, 0.5, 0.1).unwrap();
        for v in &tr.final_state().profile.values {
            assert!((v - 2f64.sqrt()).abs() < 1e-8);
        }
        match integrate(&grid, &DeformationProfile::uniform(&grid, 2.0), &c, 1.0, 0.1) {
            Err(Error::DomainExhausted { tau_star, .. }) => assert_eq!(tau_star, 1.0),
            other => panic!("expected exhaustion, got {other:?}"),
        }
        assert!(integrate(&grid, &DeformationProfile::new(vec![1.0, 0.0, 1.0]), &c, 0.1, 0.1).is_err());
    }

    #[test]
    fn adaptive_method_matches_oracle() {
        let grid = VelocityGrid::uniform(0.1, 1.0, 5).unwrap();
        let c = FlowConfig { method: Method::AdaptiveRk, alpha: 3.0, ..cfg(Regime::SubcriticalLinear) };
        let tr = integrate(&grid, &DeformationProfile::static_model(&grid), &c, 5.0, 0.5).unwrap();
        for (i, beta) in grid.ratios().enumerate() {
            let init = PI * (1.0 - beta.value().powi(2));
            let exact = analytic_linear(beta, 5.0, init, &c).unwrap();
            assert!((tr.final_state().profile.values[i] - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn second_order_integration_tracks_cosine() {
        let grid = VelocityGrid::uniform(0.2, 1.0, 5).unwrap();
        let c = FlowConfig { alpha: 4.0, dt: Some(1e-3), ..cfg(Regime::SecondOrder) };
        let tr = integrate(&grid, &DeformationProfile::uniform(&grid, PI + 0.3), &c, 20.0, 1.0).unwrap();
        for s in &tr.states {
            for (i, beta) in grid.ratios().enumerate() {
                let exact = second_order_solution(beta, 4.0, 0.3, s.tau);
                assert!((s.profile.values[i] - exact).abs() < 1e-9);
                let rate = s.rate.as_ref().unwrap().values[i];
                assert!((rate - second_order_rate(beta, 4.0, 0.3, s.tau)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn per_sample_independence() {
        let grid = VelocityGrid::uniform(0.0, 1.0, 4).unwrap();
        let c = cfg(Regime::ConformalNonlinear);
        let a = DeformationProfile::new(vec![2.0, 3.0, 4.0, 5.0]);
        let p = DeformationProfile::new(vec![5.0, 2.0, 4.0, 3.0]);
        let ta = integrate(&grid, &a, &c, 0.5, 0.25).unwrap();
        let tp = integrate(&grid, &p, &c, 0.5, 0.25).unwrap();
        let perm = [3, 0, 2, 1];
        for (sa, sp) in ta.states.iter().zip(&tp.states) {
            for (j, &src) in perm.iter().enumerate() {
                assert_eq!(sp.profile.values[j], sa.profile.values[src]);
            }
        }
    }

    #[test]
    fn decay_fit() {
        let taus: Vec<f64> = (0..10).map(|i| i as f64 * 0.5).collect();
        let devs: Vec<f64> = taus.iter().map(|t| 2.0 * (-0.7 * t).exp()).collect();
        assert!((fit_decay_rate(&taus, &devs, 1e-300).unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(fit_decay_rate(&taus, &[0.0; 10], 1e-300), None);
    }

    #[test]
    fn conformal_linearization_slope() {
        let fit = fit_conformal_linearization(1.0, 1e-3).unwrap();
        let alpha = linearized_alpha(1.0).unwrap();
        assert!(((fit.slope - alpha) / alpha).abs() < 0.01);
        assert!((fit.intercept + 2.0 / PI).abs() < 1e-6);
    }

    #[test]
    fn config_validation() {
        assert!(FlowConfig { alpha: 0.0, ..FlowConfig::default() }.validate().is_err());
        assert!(FlowConfig { tol: 0.0, ..FlowConfig::default() }.validate().is_err());
        assert!(FlowConfig { dt: Some(-1.0), ..FlowConfig::default() }.validate().is_err());
        // alpha is not needed by the conformal regime
        assert!(FlowConfig { alpha: 0.0, ..cfg(Regime::ConformalNonlinear) }.validate().is_ok());
        assert!(FlowConfig { k_curv: 0.0, ..cfg(Regime::ConformalNonlinear) }.validate().is_err());
        assert_eq!("conformal-nonlinear".parse::<Regime>().unwrap(), Regime::ConformalNonlinear);
        assert!("bogus".parse::<Regime>().is_err());
    }
}
