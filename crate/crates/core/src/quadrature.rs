//! Quadrature over sampled data and over closures.

/// Relative spacing tolerance below which a sample set counts as uniform.
const UNIFORM_RTOL: f64 = 1e-9;

/// Whether `xs` is (numerically) uniformly spaced.
pub fn is_uniform(xs: &[f64]) -> bool {
    if xs.len() < 3 {
        return true;
    }
    let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    xs.windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= UNIFORM_RTOL * h.abs())
}

/// Trapezoid rule on arbitrary (strictly increasing) abscissae.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Composite Simpson on uniform samples with spacing `h`.
///
/// An odd number of intervals is closed with Simpson's 3/8 rule on the last
/// three, keeping the O(h⁴) order.
pub fn simpson_uniform(h: f64, ys: &[f64]) -> f64 {
    let n = ys.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (ys[0] + ys[1]),
        3 => h / 3.0 * (ys[0] + 4.0 * ys[1] + ys[2]),
        _ => {
            let intervals = n - 1;
            let (simpson_end, tail) = if intervals.is_multiple_of(2) {
                (n - 1, 0.0)
            } else {
                let k = n - 4;
                (k, 3.0 * h / 8.0 * (ys[k] + 3.0 * ys[k + 1] + 3.0 * ys[k + 2] + ys[k + 3]))
            };
            if simpson_end == 0 {
                return tail;
            }
            let mut acc = ys[0] + ys[simpson_end];
            for (i, y) in ys.iter().enumerate().take(simpson_end).skip(1) {
                acc += if i % 2 == 1 { 4.0 * y } else { 2.0 * y };
            }
            h / 3.0 * acc + tail
        }
    }
}

/// Simpson on uniform abscissae, trapezoid otherwise.
pub fn integrate_samples(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    if is_uniform(xs) {
        let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        simpson_uniform(h, ys)
    } else {
        trapezoid(xs, ys)
    }
}

/// Adaptive Simpson quadrature of `f` over [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(&f, a, b, fa, fm, fb, whole, tol, 50)
}
