//! Energy functionals of deformation profiles.

use std::f64::consts::PI;

use crate::deform::critical_beta;
use crate::error::{domain, Error, Result};
use crate::flow::{FlowState, Trajectory};
use crate::grid::VelocityGrid;
use crate::quadrature::integrate_samples;

const COVER_TOL: f64 = 1e-12;

/// λ in the quadratic potential V(C) = λ/2·(C − π)².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    lambda: f64,
}

impl PotentialParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return domain(format!("lambda must be non-negative, got {lambda}"));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(self) -> f64 {
        self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEntry {
    pub tau: f64,
    pub energy: f64,
    /// dE/dτ from finite differences of the energy across snapshots.
    pub rate_quadrature: f64,
    /// dE/dτ from the dissipation integral −2α∫β²(C − π)².
    pub rate_lemma: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnergyTrace {
    pub entries: Vec<EnergyEntry>,
}

impl EnergyTrace {
    /// Indices `i` with E[i] > E[i−1] + tol·max(E[i−1], tiny).
    pub fn increasing_steps(&self, rtol: f64) -> Vec<usize> {
        self.entries
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].energy > w[0].energy + rtol * w[0].energy.max(f64::MIN_POSITIVE))
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Restricts samples to [0, β_c], inserting an interpolated endpoint at β_c
/// when the grid overshoots it between samples.
fn subcritical_window(grid: &VelocityGrid, values: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if values.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "profile has {} values but grid has {} samples",
            values.len(),
            grid.len()
        )));
    }
    let bc = critical_beta().value();
    let xs = grid.samples();
    if xs[0] > COVER_TOL || grid.beta_max() < bc - COVER_TOL {
        return Err(Error::GridMismatch(format!(
            "energy integral needs a grid covering [0, {bc}], got [{}, {}]",
            xs[0],
            grid.beta_max()
        )));
    }
    let keep = xs.iter().take_while(|&&b| b <= bc + COVER_TOL).count();
    let mut wx = xs[..keep].to_vec();
    let mut wy = values[..keep].to_vec();
    if wx[keep - 1] < bc - COVER_TOL {
        let (x0, x1) = (xs[keep - 1], xs[keep]);
        let t = (bc - x0) / (x1 - x0);
        wx.push(bc);
        wy.push(values[keep - 1] + t * (values[keep] - values[keep - 1]));
    }
    Ok((wx, wy))
}

/// E = ∫_{−β_c}^{β_c}(C − π)² dβ = 2∫₀^{β_c}(C − π)² dβ, in normalized speed units.
pub fn l2_energy(state: &FlowState, grid: &VelocityGrid) -> Result<f64> {
    let (xs, ys) = subcritical_window(grid, &state.profile.values)?;
    let integrand: Vec<f64> = ys.iter().map(|c| (c - PI).powi(2)).collect();
    Ok(2.0 * integrate_samples(&xs, &integrand))
}

/// The same energy with dimensionful speed v = βc, i.e. c times [`l2_energy`].
pub fn l2_energy_dimensional(state: &FlowState, grid: &VelocityGrid, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return domain(format!("speed scale c must be positive, got {c}"));
    }
    Ok(c * l2_energy(state, grid)?)
}

/// dE/dτ = −2α∫_{−β_c}^{β_c} β²(C − π)² dβ along the subcritical flow.
pub fn l2_energy_rate(state: &FlowState, grid: &VelocityGrid, alpha: f64) -> Result<f64> {
    let (xs, ys) = subcritical_window(grid, &state.profile.values)?;
    let integrand: Vec<f64> = xs.iter().zip(&ys).map(|(b, c)| b * b * (c - PI).powi(2)).collect();
    Ok(-2.0 * alpha * 2.0 * integrate_samples(&xs, &integrand))
}

/// Derivative at `at` of the parabola through three points.
fn parabola_slope(x: [f64; 3], y: [f64; 3], at: f64) -> f64 {
    let l0 = ((at - x[1]) + (at - x[2])) / ((x[0] - x[1]) * (x[0] - x[2]));
    let l1 = ((at - x[0]) + (at - x[2])) / ((x[1] - x[0]) * (x[1] - x[2]));
    let l2 = ((at - x[0]) + (at - x[1])) / ((x[2] - x[0]) * (x[2] - x[1]));
    y[0] * l0 + y[1] * l1 + y[2] * l2
}

/// Energy and its finite-difference and dissipation-integral rates at every snapshot.
pub fn energy_trace(trajectory: &Trajectory) -> Result<EnergyTrace> {
    let grid = &trajectory.grid;
    let alpha = trajectory.config.alpha;
    let taus = trajectory.taus();
    let energies: Vec<f64> = trajectory.states.iter().map(|s| l2_energy(s, grid)).collect::<Result<_>>()?;
    let n = taus.len();
    let entries = trajectory
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let rate_quadrature = match n {
                1 => 0.0,
                2 => (energies[1] - energies[0]) / (taus[1] - taus[0]),
                _ => {
                    let j = i.clamp(1, n - 2);
                    parabola_slope(
                        [taus[j - 1], taus[j], taus[j + 1]],
                        [energies[j - 1], energies[j], energies[j + 1]],
                        taus[i],
                    )
                }
            };
            Ok(EnergyEntry {
                tau: s.tau,
                energy: energies[i],
                rate_quadrature,
                rate_lemma: l2_energy_rate(s, grid, alpha)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EnergyTrace { entries })
}

/// Dirichlet energy ½∫_{−c}^{c}(dC/dv)² dv of a profile sampled uniformly on [−c, c].
///
/// The profile is interpolated by a parabola on each pair of cells (a trailing
/// odd cell is linear) and the derivative of that interpolant is integrated
/// exactly. Quadratic profiles are reproduced exactly, as are piecewise-linear
/// profiles whose kinks sit on even-indexed nodes.
pub fn dirichlet_energy(values: &[f64], c: f64) -> Result<f64> {
    if values.len() < 3 {
        return domain(format!("Dirichlet energy needs at least 3 samples, got {}", values.len()));
    }
    if !(c > 0.0) {
        return domain(format!("speed scale c must be positive, got {c}"));
    }
    let h = 2.0 * c / (values.len() - 1) as f64;
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < values.len() {
        let (y0, y1, y2) = (values[i], values[i + 1], values[i + 2]);
        // p'(x) = a + b·x on [0, 2h]
        let a = (-3.0 * y0 + 4.0 * y1 - y2) / (2.0 * h);
        let b = (y0 - 2.0 * y1 + y2) / (h * h);
        total += 2.0 * h * a * a + 4.0 * a * b * h * h + 8.0 * b * b * h * h * h / 3.0;
        i += 2;
    }
    if i + 1 < values.len() {
        let slope = (values[i + 1] - values[i]) / h;
        total += slope * slope * h;
    }
    Ok(0.5 * total)
}

/// ρ = ½Ċ² + ½|∇C|² + λ/2·(C − π)².
pub fn energy_density(c_value: f64, dc_dtau: f64, grad_c: f64, params: PotentialParams) -> f64 {
    0.5 * dc_dtau * dc_dtau + 0.5 * grad_c * grad_c + 0.5 * params.lambda * (c_value - PI).powi(2)
}

/// Result of imposing C(0) = π and C(±c) = 0 on the quadratic a·v² + b·v + d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticBoundarySolution {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    /// Dimension of the solution set's null space; 0 means a unique member.
    pub free_parameters: usize,
    /// Largest absolute constraint residual of the returned member.
    pub residual: f64,
}

/// Solves the three boundary constraints for the three quadratic coefficients.
pub fn solve_quadratic_boundary(c: f64) -> Result<QuadraticBoundarySolution> {
    if !(c > 0.0) {
        return domain(format!("speed scale c must be positive, got {c}"));
    }
    // rows: [v², v, 1] at v = 0, c, −c
    let m = [[0.0, 0.0, 1.0], [c * c, c, 1.0], [c * c, -c, 1.0]];
    let rhs = [PI, 0.0, 0.0];
    let det3 = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let det = det3(&m);
    let scale = c.powi(3).max(1.0);
    if det.abs() <= 1e-12 * scale {
        return Err(Error::Numerical("boundary constraints are degenerate".into()));
    }
    let mut coeffs = [0.0; 3];
    for (col, coeff) in coeffs.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = rhs[row];
        }
        *coeff = det3(&mc) / det;
    }
    let residual = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| (row[0] * coeffs[0] + row[1] * coeffs[1] + row[2] * coeffs[2] - r).abs())
        .fold(0.0, f64::max);
    Ok(QuadraticBoundarySolution { a: coeffs[0], b: coeffs[1], d: coeffs[2], free_parameters: 0, residual })
}
