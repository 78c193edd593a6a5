//! Adaptive Simpson quadrature.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Options for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Absolute tolerance for the whole interval; split evenly across panels.
    pub abs_tol: f64,
    /// Maximum bisection depth below each initial panel.
    pub max_depth: u32,
    /// Number of equal panels the interval is cut into before adapting.
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_depth: 40,
            initial_panels: 1,
        }
    }
}

impl QuadOptions {
    pub fn with_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels.max(1);
        self
    }
}

struct Simpson<'a, F> {
    f: &'a F,
    max_depth: u32,
    failed: bool,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn recurse(&mut self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        if depth >= self.max_depth || !(m > a && m < b) {
            self.failed = true;
            return left + right + delta / 15.0;
        }
        self.recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
            + self.recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `opts.abs_tol`.
///
/// Fails with [`Error::Numeric`] when some panel hits the depth cap without
/// meeting its share of the tolerance, or when the result is not finite.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let panels = opts.initial_panels.max(1);
    let width = (b - a) / panels as f64;
    let tol = opts.abs_tol / panels as f64;
    let mut s = Simpson {
        f: &f,
        max_depth: opts.max_depth,
        failed: false,
    };
    let mut total = 0.0;
    let mut fa = f(a);
    for i in 0..panels {
        let pa = a + width * i as f64;
        let pb = if i + 1 == panels { b } else { a + width * (i + 1) as f64 };
        let pm = 0.5 * (pa + pb);
        let fm = f(pm);
        let fb = f(pb);
        let whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += s.recurse(pa, pb, fa, fm, fb, whole, tol, 0);
        fa = fb;
    }
    if s.failed {
        return Err(Error::Numeric(format!(
            "adaptive Simpson did not converge on [{a}, {b}] within depth {}",
            opts.max_depth
        )));
    }
    if !total.is_finite() {
        return Err(Error::Numeric(format!("non-finite integral on [{a}, {b}]")));
    }
    Ok(total)
}

/// Integrates a complex-valued `f` by integrating its real and imaginary
/// parts separately, each to `opts.abs_tol`.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<Complex64> {
    let re = integrate(|x| f(x).re, a, b, opts)?;
    let im = integrate(|x| f(x).im, a, b, opts)?;
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((v - 0.0).abs() < 1e-14);
        let v = integrate(|x| x * x, -1.0, 2.0, QuadOptions::default()).unwrap();
        assert!((v - 3.0).abs() < 1e-13);
    }

    #[test]
    fn smooth_and_peaked() {
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, QuadOptions::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
        // narrow Gaussian, needs initial panels to be seen at all
        let s = 0.01f64;
        let g = |x: f64| (-(x - 0.3) * (x - 0.3) / (2.0 * s * s)).exp();
        let v = integrate(g, -1.0, 1.0, QuadOptions::default().with_panels(64)).unwrap();
        let exact = s * (2.0 * std::f64::consts::PI).sqrt();
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn reversed_and_empty() {
        let v = integrate(|x| x, 1.0, 0.0, QuadOptions::default()).unwrap();
        assert!((v + 0.5).abs() < 1e-15);
        assert_eq!(integrate(|x| x, 1.0, 1.0, QuadOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn depth_cap_reports_failure() {
        let opts = QuadOptions { abs_tol: 1e-14, max_depth: 3, initial_panels: 1 };
        let r = integrate(|x: f64| (50.0 * x).sin(), 0.0, 3.0, opts);
        assert!(matches!(r, Err(Error::Numeric(_))));
    }

    #[test]
    fn complex_exponential() {
        let v = integrate_complex(
            |x| Complex64::new(0.0, x).exp(),
            0.0,
            std::f64::consts::PI,
            QuadOptions::default(),
        )
        .unwrap();
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-10);
    }
}
