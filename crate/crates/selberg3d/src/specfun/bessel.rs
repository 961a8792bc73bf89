//! Modified Bessel functions of real order and positive argument.

use num_complex::Complex64;

use super::gamma::ln_gamma;
use super::quad::{integrate, QuadConfig};
use crate::error::{Error, Result};

/// `K_ν(x)` from `∫₀^∞ e^{-x cosh t} cosh(νt) dt` by adaptive quadrature.
///
/// The factor `e^{-x}` is pulled out so that the integrand stays O(1).
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_k requires x > 0, got {x}")));
    }
    let nu = nu.abs();
    // Integrand below e^{-745} beyond t_max: x (cosh t - 1) - ν t ≥ 745.
    let mut t_max = 1.0f64;
    while x * (t_max.cosh() - 1.0) - nu * t_max < 745.0 {
        t_max *= 1.25;
    }
    let cfg = QuadConfig { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 2000 };
    let f = |t: f64| {
        let e = -x * (t.cosh() - 1.0);
        let v = (e + nu * t).exp() + (e - nu * t).exp();
        Complex64::new(0.5 * v, 0.0)
    };
    let r = integrate(f, 0.0, t_max, &cfg)?;
    Ok(r.value.re * (-x).exp())
}

/// `I_ν(x)` from its power series `Σ (x/2)^{ν+2m} / (m! Γ(ν+m+1))`.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_i requires x > 0, got {x}")));
    }
    if nu < 0.0 {
        return Err(Error::Domain(format!("bessel_i requires nu >= 0, got {nu}")));
    }
    let half = 0.5 * x;
    let q = half * half;
    let mut term = (nu * half.ln() - ln_gamma(Complex64::new(nu + 1.0, 0.0)).re).exp();
    let mut sum = term;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= q / (m * (nu + m));
        sum += term;
        if term <= 1e-17 * sum && m > q.sqrt() {
            break;
        }
        if m > 10_000.0 {
            return Err(Error::ConvergenceFailure("bessel_i series".into()));
        }
    }
    Ok(sum)
}
