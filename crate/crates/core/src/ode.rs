//! Fixed-step RK4 and step-doubling adaptive RK4 for small autonomous systems.

use crate::error::{Error, Result};

const MAX_ADAPTIVE_STEPS: usize = 10_000_000;

pub fn rk4_step<const N: usize>(f: &impl Fn(&[f64; N]) -> [f64; N], y: &[f64; N], h: f64) -> [f64; N] {
    let axpy = |a: &[f64; N], s: f64, b: &[f64; N]| -> [f64; N] {
        let mut out = *a;
        for i in 0..N {
            out[i] += s * b[i];
        }
        out
    };
    let k1 = f(y);
    let k2 = f(&axpy(y, 0.5 * h, &k1));
    let k3 = f(&axpy(y, 0.5 * h, &k2));
    let k4 = f(&axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn check_finite<const N: usize>(y: &[f64; N], t: f64) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical(format!("non-finite state at tau = {t}")))
    }
}

/// Advances from `t0` to `t1` with equal RK4 steps no longer than `dt`.
pub fn rk4_fixed<const N: usize>(
    f: &impl Fn(&[f64; N]) -> [f64; N],
    y0: [f64; N],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<[f64; N]> {
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(y0);
    }
    // tolerate round-off in span/dt so that exact multiples do not gain a step
    let steps = ((span / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        y = rk4_step(f, &y, h);
        check_finite(&y, t0 + h * (i + 1) as f64)?;
    }
    Ok(y)
}

/// Step-doubling RK4: each step is compared against two half steps and
/// accepted when the difference is within `tol·max(1, |y|)`.
///
/// `h` carries the step size between calls; it is updated in place.
pub fn rk4_adaptive<const N: usize>(
    f: &impl Fn(&[f64; N]) -> [f64; N],
    y0: [f64; N],
    t0: f64,
    t1: f64,
    tol: f64,
    h: &mut f64,
) -> Result<[f64; N]> {
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(y0);
    }
    let h_min = span.abs().max(1.0) * 1e-14;
    let mut t = t0;
    let mut y = y0;
    let mut steps = 0usize;
    if !(*h > 0.0) {
        *h = span.min(1e-3);
    }
    while t < t1 {
        steps += 1;
        if steps > MAX_ADAPTIVE_STEPS {
            return Err(Error::Numerical(format!("adaptive stepping exceeded {MAX_ADAPTIVE_STEPS} steps")));
        }
        let last = t + *h >= t1;
        let step = if last { t1 - t } else { *h };
        let full = rk4_step(f, &y, step);
        let half = rk4_step(f, &y, 0.5 * step);
        let two_half = rk4_step(f, &half, 0.5 * step);
        let mut err = 0.0_f64;
        for i in 0..N {
            let scale = two_half[i].abs().max(1.0);
            err = err.max((two_half[i] - full[i]).abs() / (15.0 * scale));
        }
        if !err.is_finite() {
            err = f64::INFINITY;
        }
        if err <= tol {
            // Richardson extrapolation of the two half steps
            let mut next = two_half;
            for i in 0..N {
                next[i] += (two_half[i] - full[i]) / 15.0;
            }
            check_finite(&next, t + step)?;
            y = next;
            t = if last { t1 } else { t + step };
            let grow = if err == 0.0 { 4.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 4.0) };
            if !last {
                *h = step * grow;
            }
        } else {
            let shrink = if err.is_finite() { (0.9 * (tol / err).powf(0.2)).clamp(0.1, 0.9) } else { 0.1 };
            *h = step * shrink;
            if *h < h_min {
                return Err(Error::Numerical(format!(
                    "adaptive step fell below {h_min:e} at tau = {t} without meeting tol = {tol:e}"
                )));
            }
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_step_exponential() {
        let y = rk4_fixed(&|y: &[f64; 1]| [-y[0]], [1.0], 0.0, 1.0, 1e-3).unwrap();
        assert!((y[0] - (-1f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn fixed_step_fourth_order() {
        let err = |dt: f64| {
            let y = rk4_fixed(&|y: &[f64; 1]| [-y[0]], [1.0], 0.0, 1.0, dt).unwrap();
            (y[0] - (-1f64).exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn adaptive_oscillator() {
        let mut h = 0.0;
        let y = rk4_adaptive(&|y: &[f64; 2]| [y[1], -y[0]], [1.0, 0.0], 0.0, 10.0, 1e-12, &mut h).unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((y[1] + 10f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn adaptive_reports_blowup() {
        let mut h = 0.1;
        let r = rk4_adaptive(&|y: &[f64; 1]| [y[0] * y[0]], [1.0], 0.0, 2.0, 1e-10, &mut h);
        assert!(matches!(r, Err(Error::Numerical(_))));
    }
}
