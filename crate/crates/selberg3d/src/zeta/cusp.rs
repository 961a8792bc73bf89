//! The cusp integral `∫₀^∞ e^{-sx} sinh x / (cosh x - cos t) dx` by
//! quadrature and by its Fourier series.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{euler_alternating, integrate_to_infinity, wynn_epsilon, QuadConfig};

/// Required stability of the accelerated series.
pub const SERIES_TOL: f64 = 1e-9;
/// Number of partial sums handed to the epsilon algorithm.
const WYNN_TERMS: usize = 48;

/// Both evaluations of the cusp integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspIntegral {
    pub s: Complex64,
    pub t: f64,
    /// Value of the accelerated series, the returned value.
    pub value: Complex64,
    pub series_error: f64,
    pub quadrature: Complex64,
    pub quadrature_error: f64,
}

impl CuspIntegral {
    pub fn discrepancy(&self) -> f64 {
        (self.value - self.quadrature).norm()
    }
}

fn check(s: Complex64, t: f64) -> Result<()> {
    if !(s.re > 0.0) {
        return Err(Error::Domain(format!("cusp integral needs Re s > 0, got {s}")));
    }
    if !(t > 0.0 && t <= PI) {
        return Err(Error::Domain(format!("cusp integral needs t in (0, π], got {t}")));
    }
    Ok(())
}

/// `1/(s-1+k) - 1/(s+1+k)`.
fn coeff(s: Complex64, k: f64) -> Complex64 {
    (s - 1.0 + k).inv() - (s + 1.0 + k).inv()
}

/// The integral by adaptive quadrature.
pub fn cusp_integral_quad(s: Complex64, t: f64) -> Result<(Complex64, f64)> {
    check(s, t)?;
    let cos_t = t.cos();
    // sinh x / (cosh x - cos t) with e^{-x} factored out of both
    let f = |x: f64| {
        let e = (-x).exp();
        let kernel = (1.0 - e * e) / (1.0 + e * e - 2.0 * cos_t * e);
        (-s * x).exp() * kernel
    };
    let x_max = (60.0 / s.re).min(1e4);
    let cfg = QuadConfig::with_tol(1e-15, 1e-13);
    let r = integrate_to_infinity(f, 0.0, (0.5 / s.re).min(0.5), x_max, &cfg)?;
    Ok((r.value, r.error))
}

/// The series `(1/sin t) Σ_k sin(kt)(1/(s-1+k) - 1/(s+1+k))`, and at `t = π`
/// its limit `Σ_k k(-1)^{k+1}(...)`.
pub fn cusp_integral_series(s: Complex64, t: f64) -> Result<(Complex64, f64)> {
    check(s, t)?;
    if t == PI {
        // Σ_{j≥0} (-1)^j a_j with a_j = (j+1) c_{j+1}
        let a = |j: usize| coeff(s, (j + 1) as f64) * (j + 1) as f64;
        let v1 = euler_alternating(a, 20, 40);
        let v2 = euler_alternating(a, 30, 50);
        let err = (v1 - v2).norm();
        if !(err <= SERIES_TOL * v2.norm().max(1.0)) {
            return Err(Error::SeriesDivergence(format!("Euler transform at s={s}: spread {err:.2e}")));
        }
        return Ok((v2, err));
    }
    // sin(kt) = (e^{ikt} - e^{-ikt}) / 2i; each exponential series is
    // accelerated separately.
    let accelerate = |sign: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        let partial: Vec<Complex64> = (1..=WYNN_TERMS)
            .map(|k| {
                acc += coeff(s, k as f64) * Complex64::from_polar(1.0, sign * k as f64 * t);
                acc
            })
            .collect();
        wynn_epsilon(&partial)
    };
    let (p, ep) = accelerate(1.0);
    let (m, em) = accelerate(-1.0);
    let value = (p - m) / Complex64::new(0.0, 2.0 * t.sin());
    let err = (ep + em) / (2.0 * t.sin());
    if !(err <= SERIES_TOL * value.norm().max(1.0)) {
        return Err(Error::SeriesDivergence(format!("epsilon algorithm at s={s}, t={t}: spread {err:.2e}")));
    }
    Ok((value, err))
}

/// The cusp integral from the series, with the quadrature as cross-check.
pub fn cusp_integral(s: Complex64, t: f64) -> Result<CuspIntegral> {
    let (value, series_error) = cusp_integral_series(s, t)?;
    let (quadrature, quadrature_error) = cusp_integral_quad(s, t)?;
    Ok(CuspIntegral { s, t, value, series_error, quadrature, quadrature_error })
}

/// `t` with `cos t = 1 - |1-ε²|²/2`, the angle attached to a cuspidal
/// elliptic class.
pub fn angle_from_defect(one_minus_eps2_sq: f64) -> Result<f64> {
    let c = 1.0 - one_minus_eps2_sq / 2.0;
    if !(-1.0..1.0).contains(&c) {
        return Err(Error::Domain(format!("|1-ε²|² = {one_minus_eps2_sq} is outside (0, 4]")));
    }
    Ok(c.acos())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn grid_agreement() {
        for s in [1.5, 2.0, 3.0] {
            for t in [PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, PI] {
                let r = cusp_integral(c(s), t).unwrap();
                assert!(r.discrepancy() < 1e-8, "s={s} t={t}: {} vs {}", r.value, r.quadrature);
            }
        }
    }

    #[test]
    fn closed_forms_at_pi() {
        // tanh(x/2) = 1 - 2 Σ_{k≥1} (-1)^{k+1} e^{-kx}, integrated termwise.
        let s = 2.0;
        let beta: f64 = crate::specfun::euler_alternating(|k| c(1.0 / (s + 1.0 + k as f64)), 10, 40).re;
        let expected = 1.0 / s - 2.0 * beta;
        let r = cusp_integral(c(s), PI).unwrap();
        assert!((r.value.re - expected).abs() < 1e-12, "{} vs {expected}", r.value.re);
    }

    #[test]
    fn complex_argument() {
        let s = Complex64::new(1.7, 2.3);
        for t in [PI / 2.0, PI] {
            let r = cusp_integral(s, t).unwrap();
            assert!(r.discrepancy() < 1e-8, "t={t}: {} vs {}", r.value, r.quadrature);
        }
    }

    #[test]
    fn large_s_decay() {
        let t = PI / 2.0;
        let r = cusp_integral(c(50.0), t).unwrap();
        let approx = 1.0 / (2500.0 * (1.0 - t.cos()));
        assert!((r.value.re / approx - 1.0).abs() < 0.05, "{} vs {approx}", r.value.re);
    }

    #[test]
    fn domain_errors() {
        assert!(cusp_integral(c(-1.0), 1.0).is_err());
        assert!(cusp_integral(c(2.0), 0.0).is_err());
        assert!(cusp_integral(c(2.0), 3.5).is_err());
    }

    #[test]
    fn defect_angles() {
        assert!((angle_from_defect(4.0).unwrap() - PI).abs() < 1e-15);
        assert!((angle_from_defect(3.0).unwrap() - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!(angle_from_defect(0.0).is_err());
    }
}
