//! Bessel functions `I0`, `I1`, `J0` and the von Mises concentration solver.
//!
//! Small arguments use the Maclaurin series; large arguments use the
//! Hankel-type asymptotic expansions, truncated at their smallest term. The
//! modified functions are carried in exponentially scaled form
//! (`e^{-x} I_n(x)`) so that ratios and densities never overflow.

use crate::error::{domain, Result};

/// Evaluation strategy for one family of Bessel functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEvalPolicy {
    /// Arguments with `|x| <= series_cutoff` use the power series.
    pub series_cutoff: f64,
    /// Hard cap on the number of asymptotic terms.
    pub asymptotic_terms: usize,
    /// Relative truncation threshold for both expansions.
    pub abs_tol: f64,
}

impl BesselEvalPolicy {
    /// Policy for `I0` and `I1`.
    pub const MODIFIED: Self = Self {
        series_cutoff: 15.0,
        asymptotic_terms: 64,
        abs_tol: 1e-17,
    };

    /// Policy for `J0`.
    pub const ORDINARY: Self = Self {
        series_cutoff: 12.0,
        asymptotic_terms: 64,
        abs_tol: 1e-17,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.series_cutoff > 0.0) {
            return Err(domain("Bessel policy needs abs_tol > 0 and series_cutoff > 0"));
        }
        Ok(())
    }

    /// `e^{-x} I_order(x)` for `x >= 0`, `order` in {0, 1}.
    fn scaled_modified(&self, order: u32, x: f64) -> f64 {
        if x <= self.series_cutoff {
            // I_n(x) = (x/2)^n sum_k (x^2/4)^k / (k! (k+n)!)
            let q = 0.25 * x * x;
            let mut term = if order == 0 { 1.0 } else { 0.5 * x };
            let mut sum = term;
            let mut k = 0u32;
            loop {
                k += 1;
                term *= q / (k as f64 * (k + order) as f64);
                sum += term;
                if term <= self.abs_tol * sum || k > 500 {
                    break;
                }
            }
            sum * (-x).exp()
        } else {
            // e^{-x} I_n(x) ~ (2 pi x)^{-1/2} sum_k t_k,
            // t_k = t_{k-1} ((2k-1)^2 - 4n^2) / (8 k x)
            let four_nu_sq = 4.0 * (order * order) as f64;
            let mut term = 1.0f64;
            let mut sum = 1.0f64;
            for k in 1..=self.asymptotic_terms {
                let odd = (2 * k - 1) as f64;
                let next = term * (odd * odd - four_nu_sq) / (8.0 * k as f64 * x);
                if next.abs() >= term.abs() {
                    break;
                }
                term = next;
                sum += term;
                if term.abs() <= self.abs_tol * sum.abs() {
                    break;
                }
            }
            sum / (2.0 * std::f64::consts::PI * x).sqrt()
        }
    }

    fn j0(&self, x: f64) -> f64 {
        let x = x.abs();
        if x <= self.series_cutoff {
            let q = 0.25 * x * x;
            let mut term = 1.0f64;
            let mut sum = 1.0f64;
            let mut k = 0u32;
            loop {
                k += 1;
                term *= -q / ((k * k) as f64);
                sum += term;
                if term.abs() <= self.abs_tol || k > 500 {
                    break;
                }
            }
            sum
        } else {
            // J0(x) ~ sqrt(2/(pi x)) (P cos w - Q sin w), w = x - pi/4, with
            // b_k = b_{k-1} (2k-1)^2 / (8k),
            // P = sum (-1)^j b_{2j} / x^{2j},  Q = -sum (-1)^j b_{2j+1} / x^{2j+1}.
            let mut p = 1.0f64;
            let mut q = 0.0f64;
            let mut term = 1.0f64;
            for k in 1..=self.asymptotic_terms {
                let odd = (2 * k - 1) as f64;
                let next = term * odd * odd / (8.0 * k as f64 * x);
                if next >= term {
                    break;
                }
                term = next;
                let j = k / 2;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                if k % 2 == 0 {
                    p += sign * term;
                } else {
                    q -= sign * term;
                }
                if term <= self.abs_tol {
                    break;
                }
            }
            let w = x - std::f64::consts::FRAC_PI_4;
            (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * w.cos() - q * w.sin())
        }
    }
}

impl Default for BesselEvalPolicy {
    fn default() -> Self {
        Self::MODIFIED
    }
}

fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(domain(format!("{name}: non-finite argument {x}")));
    }
    if x < 0.0 {
        return Err(domain(format!("{name}: argument {x} must be >= 0")));
    }
    Ok(())
}

/// Exponentially scaled `e^{-x} I0(x)`, finite for every `x >= 0`.
pub fn bessel_i0e(x: f64) -> Result<f64> {
    check_nonneg("bessel_i0e", x)?;
    Ok(BesselEvalPolicy::MODIFIED.scaled_modified(0, x))
}

/// Exponentially scaled `e^{-x} I1(x)`.
pub fn bessel_i1e(x: f64) -> Result<f64> {
    check_nonneg("bessel_i1e", x)?;
    Ok(BesselEvalPolicy::MODIFIED.scaled_modified(1, x))
}

/// Modified Bessel function `I0(x)` for `x >= 0`. Overflows to infinity
/// beyond `x ~ 713`; use [`bessel_i0e`] there.
pub fn bessel_i0(x: f64) -> Result<f64> {
    Ok(bessel_i0e(x)? * x.exp())
}

/// Modified Bessel function `I1(x)` for `x >= 0`.
pub fn bessel_i1(x: f64) -> Result<f64> {
    Ok(bessel_i1e(x)? * x.exp())
}

/// `I1(alpha) / I0(alpha)`, in `[0, 1)`, without overflow for large `alpha`.
pub fn bessel_ratio_i1_i0(alpha: f64) -> Result<f64> {
    check_nonneg("bessel_ratio_i1_i0", alpha)?;
    let p = BesselEvalPolicy::MODIFIED;
    Ok(p.scaled_modified(1, alpha) / p.scaled_modified(0, alpha))
}

/// Bessel function of the first kind `J0(x)`; even in `x`.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("bessel_j0: non-finite argument {x}")));
    }
    Ok(BesselEvalPolicy::ORDINARY.j0(x))
}

/// Circular variance `1 - (I1(alpha)/I0(alpha))^2` of a von Mises law.
pub fn circular_variance(alpha: f64) -> Result<f64> {
    let r = bessel_ratio_i1_i0(alpha)?;
    Ok(1.0 - r * r)
}

/// Residual at which [`solve_concentration`] stops.
pub const CONCENTRATION_TOL: f64 = 1e-10;

/// Solves `nu_sq = 1 - (I1(alpha)/I0(alpha))^2` for the concentration `alpha`.
///
/// The map `alpha -> 1 - ratio^2` decreases monotonically from 1 to 0, so the
/// root is bracketed by growing an upper bound geometrically and then bisected.
/// `nu_sq = 1` returns exactly 0; `nu_sq = 0` (a point mass) is rejected.
pub fn solve_concentration(nu_sq: f64) -> Result<f64> {
    if !nu_sq.is_finite() || nu_sq <= 0.0 || nu_sq > 1.0 {
        return Err(domain(format!(
            "solve_concentration: circular variance {nu_sq} must lie in (0, 1]"
        )));
    }
    if nu_sq == 1.0 {
        return Ok(0.0);
    }
    let residual = |a: f64| -> f64 {
        // argument is always >= 0 here
        circular_variance(a).unwrap_or(f64::NAN) - nu_sq
    };

    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while residual(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(crate::Error::Numeric(format!(
                "solve_concentration: failed to bracket nu_sq = {nu_sq}"
            )));
        }
    }

    let mut best = hi;
    let mut best_res = residual(hi).abs();
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        let r = residual(mid);
        if r.abs() < best_res {
            best = mid;
            best_res = r.abs();
        }
        if best_res <= CONCENTRATION_TOL || mid <= lo || mid >= hi {
            break;
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best_res > CONCENTRATION_TOL {
        return Err(crate::Error::Numeric(format!(
            "solve_concentration: residual {best_res:e} above tolerance for nu_sq = {nu_sq}"
        )));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn i0_i1_reference_values() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        assert_eq!(bessel_i1(0.0).unwrap(), 0.0);
        assert_relative_eq!(bessel_i0(1.0).unwrap(), 1.2660658777520084, max_relative = 1e-13);
        assert_relative_eq!(bessel_i0(2.0).unwrap(), 2.2795853023360673, max_relative = 1e-13);
        assert_relative_eq!(bessel_i1(1.0).unwrap(), 0.5651591039924851, max_relative = 1e-13);
        assert_relative_eq!(bessel_i1(2.0).unwrap(), 1.5906368546373291, max_relative = 1e-13);
    }

    #[test]
    fn ratio_values() {
        assert_eq!(bessel_ratio_i1_i0(0.0).unwrap(), 0.0);
        assert_relative_eq!(
            bessel_ratio_i1_i0(2.0).unwrap(),
            0.6977746579640077,
            max_relative = 1e-13
        );
        let a = 1e6;
        let asym = 1.0 - 1.0 / (2.0 * a) - 1.0 / (8.0 * a * a);
        assert_relative_eq!(bessel_ratio_i1_i0(a).unwrap(), asym, max_relative = 1e-12);
        let big = bessel_ratio_i1_i0(1e8).unwrap();
        assert!(big < 1.0 && big > 1.0 - 1e-8);
    }

    #[test]
    fn j0_values() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert!((bessel_j0(std::f64::consts::PI).unwrap() + 0.30424217764409384).abs() < 1e-12);
        assert!(bessel_j0(2.404825557695773).unwrap().abs() < 1e-9);
        // crossover continuity
        let c = BesselEvalPolicy::ORDINARY.series_cutoff;
        let l = bessel_j0(c).unwrap();
        let r = bessel_j0(c + 1e-12).unwrap();
        assert!((l - r).abs() < 1e-10);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_i0(f64::NAN).is_err());
        assert!(bessel_i1(f64::INFINITY).is_err());
        assert!(bessel_i0(-1.0).is_err());
        assert!(bessel_ratio_i1_i0(-0.5).is_err());
        assert!(bessel_j0(f64::NEG_INFINITY).is_err());
        assert!(solve_concentration(0.0).is_err());
        assert!(solve_concentration(-0.1).is_err());
        assert!(solve_concentration(1.0 + 1e-9).is_err());
        assert!(solve_concentration(f64::NAN).is_err());
    }

    #[test]
    fn concentration_examples() {
        assert_eq!(solve_concentration(1.0).unwrap(), 0.0);
        for nu_sq in [0.01, 0.005, 0.5] {
            let a = solve_concentration(nu_sq).unwrap();
            assert!((circular_variance(a).unwrap() - nu_sq).abs() <= 1e-10);
        }
        // nu^2 ~ 1/alpha for concentrated laws
        let a = solve_concentration(0.01).unwrap();
        assert!((a - 100.0).abs() < 0.01, "alpha = {a}");
        let half = solve_concentration(0.5).unwrap();
        assert!((bessel_ratio_i1_i0(half).unwrap() - 0.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn policy_validation() {
        assert!(BesselEvalPolicy::default().validate().is_ok());
        let bad = BesselEvalPolicy { abs_tol: 0.0, ..BesselEvalPolicy::MODIFIED };
        assert!(bad.validate().is_err());
    }
}
