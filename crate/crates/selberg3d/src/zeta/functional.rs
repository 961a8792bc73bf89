//! The functional-equation factor `Ψ` and the logarithmic derivative of `Ξ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cusp::cusp_integral_series;
use super::geometric::{e_constant, ClassBundle, GroupData, Normalization};
use crate::error::{Error, Result};
use crate::specfun::{digamma, ln_gamma};

/// Inputs of `Ψ(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalEqParams {
    pub e: f64,
    pub vol: f64,
    pub dim_v: usize,
    pub k_inf: u32,
    pub l_inf: u32,
    pub index: u32,
    /// `exp(C) = ±1`.
    pub exp_c_positive: bool,
}

impl FunctionalEqParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.vol > 0.0) {
            return Err(Error::Domain(format!("covolume must be positive, got {}", self.vol)));
        }
        if self.l_inf < self.k_inf {
            return Err(Error::Domain("l_inf must be at least k_inf".into()));
        }
        Ok(())
    }

    /// Exponent of `Γ(1-s)/Γ(1+s)`.
    fn gamma_exponent(&self) -> Result<u32> {
        match self.index {
            1 => {
                if self.k_inf != self.l_inf {
                    return Err(Error::Domain("stabilizer index 1 forces l_inf = k_inf".into()));
                }
                Ok(self.k_inf)
            }
            2 if self.k_inf == self.l_inf => Ok(self.l_inf),
            2 => Err(Error::UnsupportedRegime(format!(
                "index 2 with k_inf = {} != l_inf = {}: the displayed infinite product does not converge",
                self.k_inf, self.l_inf
            ))),
            other => Err(Error::CaseUnsupported(other)),
        }
    }
}

/// `Ψ(s) = (Γ(1-s)/Γ(1+s))^κ · exp(-(vol·dim V/3π) s³ + E s + C)`.
pub fn psi_factor(s: Complex64, p: &FunctionalEqParams) -> Result<Complex64> {
    p.validate()?;
    let kappa = p.gamma_exponent()?;
    if kappa > 0 && s.im == 0.0 && s.re >= 1.0 && s.re.fract() == 0.0 {
        return Err(Error::Domain(format!("Γ(1-s) has a pole at s = {}", s.re)));
    }
    let log_ratio = if kappa == 0 { Complex64::new(0.0, 0.0) } else { ln_gamma(1.0 - s) - ln_gamma(1.0 + s) };
    let cubic = -(p.vol * p.dim_v as f64 / (3.0 * PI)) * s * s * s;
    let sign = if p.exp_c_positive { 1.0 } else { -1.0 };
    Ok((log_ratio * kappa as f64 + cubic + s * p.e).exp() * sign)
}

/// Which expression for `Ξ'/Ξ` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XiForm {
    /// Loxodromic series + parabolic digamma term + `(tr 𝔖(0) - l_∞/[Γ_∞:Γ'_∞])/2s`
    /// - cuspidal elliptic integrals weighted by `1/2s` - `E`.
    #[default]
    Displayed,
    /// `Z'/Z(s) - 2s F(s)` where `F` collects the non-spectral terms of the
    /// log-derivative identity at `s`; this form satisfies the spectral
    /// identity for `Ξ'/Ξ(s)/2s - Ξ'/Ξ(B)/2B`.
    Consistent,
}

/// Data entering `Ξ'/Ξ` besides the loxodromic series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiData {
    pub l_inf: u32,
    pub index: u32,
    pub tr_s0: f64,
    /// `(tr χ(g_i)/(|C(g_i)| |1-ε_i²|², t_i)` with `cos t_i = 1 - |1-ε_i²|²/2`.
    pub cusp: Vec<(Complex64, f64)>,
    pub e: Complex64,
    pub vol: f64,
    pub dim_v: usize,
}

impl XiData {
    pub fn new(data: &GroupData, bundle: &ClassBundle, tr_s0: f64, norm: Normalization) -> Result<Self> {
        let cusp = bundle
            .cusp
            .iter()
            .map(|c| Ok((c.coefficient().to_complex(), c.angle()?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            l_inf: data.l_inf,
            index: data.index,
            tr_s0,
            cusp,
            e: e_constant(bundle, data, norm),
            vol: data.vol,
            dim_v: data.dim_v,
        })
    }
}

/// `(1/2π) ∫ 2s/(s²+w²) ψ(1+iw) dw = ψ(1+s)` for `Re s > 0`.
pub fn digamma_poisson(s: Complex64) -> Complex64 {
    digamma(1.0 + s)
}

/// `Σ_i coef_i ∫₀^∞ e^{-sx} sinh x/(cosh x - cos t_i) dx`.
fn cusp_block(s: Complex64, d: &XiData) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (coef, t) in &d.cusp {
        acc += coef * cusp_integral_series(s, *t)?.0;
    }
    Ok(acc)
}

/// `Ξ'/Ξ(s)` from the loxodromic series value `lox` at `s`.
pub fn xi_logderiv(s: Complex64, lox: Complex64, d: &XiData, form: XiForm) -> Result<Complex64> {
    if !(s.re > 1.0) {
        return Err(Error::Domain(format!("Ξ'/Ξ needs Re s > 1, got {s}")));
    }
    let par_weight = d.l_inf as f64 / d.index as f64;
    let digamma_term = digamma_poisson(s) * par_weight;
    let trace_term = (d.tr_s0 - par_weight) / (2.0 * s);
    let ce = cusp_block(s, d)?;
    Ok(match form {
        XiForm::Displayed => lox + digamma_term + trace_term - ce / (2.0 * s) - d.e,
        XiForm::Consistent => {
            let identity = d.vol * d.dim_v as f64 / (2.0 * PI) * s * s;
            lox - (digamma_term + trace_term - ce - d.e + identity)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{gamma, integrate, QuadConfig};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn params(k: u32, l: u32, index: u32) -> FunctionalEqParams {
        FunctionalEqParams { e: 0.37, vol: 0.305, dim_v: 1, k_inf: k, l_inf: l, index, exp_c_positive: true }
    }

    #[test]
    fn psi_at_zero_is_a_sign() {
        assert!((psi_factor(c(0.0), &params(1, 1, 1)).unwrap() - 1.0).norm() < 1e-14);
        let mut p = params(2, 2, 2);
        p.exp_c_positive = false;
        assert!((psi_factor(c(0.0), &p).unwrap() + 1.0).norm() < 1e-14);
    }

    #[test]
    fn gamma_ratio_reflection() {
        let s = c(0.3);
        let ratio = gamma(1.0 - s) / gamma(1.0 + s);
        let back = gamma(1.0 + s) / gamma(1.0 - s);
        assert!((ratio * back - 1.0).norm() < 1e-14);
        // Ψ(s)Ψ(-s) = exp(2C) = 1: the Gamma ratios and odd exponents cancel
        let p = params(1, 1, 1);
        let prod = psi_factor(s, &p).unwrap() * psi_factor(-s, &p).unwrap();
        assert!((prod - 1.0).norm() < 1e-13);
    }

    #[test]
    fn cubic_term_dominates() {
        let mut p = params(0, 0, 1);
        p.vol = 50.0;
        let d = psi_factor(c(2.0), &p).unwrap().norm().ln() - psi_factor(c(1.0), &p).unwrap().norm().ln();
        let expected = -(50.0 / (3.0 * PI)) * 7.0 + p.e;
        assert!((d - expected).abs() < 1e-9);
        assert!(psi_factor(c(2.0), &params(1, 1, 1)).is_err());
    }

    #[test]
    fn regimes() {
        assert!(matches!(psi_factor(c(0.5), &params(1, 2, 2)), Err(Error::UnsupportedRegime(_))));
        assert!(matches!(psi_factor(c(0.5), &params(1, 1, 3)), Err(Error::CaseUnsupported(3))));
        assert!(psi_factor(c(0.5), &params(1, 2, 1)).is_err());
        let mut p = params(1, 1, 2);
        p.vol = 0.0;
        assert!(psi_factor(c(0.5), &p).is_err());
    }

    #[test]
    fn digamma_poisson_against_quadrature() {
        let s = 1.7;
        // (1/π) ∫₀^∞ 2s/(s²+w²) Re ψ(1+iw) dw after w = u/(1-u)
        let cfg = QuadConfig { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 20_000 };
        let f = |u: f64| {
            let w = u / (1.0 - u);
            c(2.0 * s / (s * s + w * w) * digamma(Complex64::new(1.0, w)).re / ((1.0 - u) * (1.0 - u)))
        };
        let v = integrate(f, 0.0, 1.0, &cfg).unwrap().value / PI;
        assert!((v - digamma_poisson(c(s))).norm() < 1e-10, "{v}");
        // ψ(1-s) - Σ_k (1/(s+k) + 1/(s-k)) = ψ(1+s); adding the sum instead does not match
        let x = 0.3;
        let sum: f64 = (1..200_000).map(|k| 1.0 / (x + k as f64) + 1.0 / (x - k as f64)).sum();
        let target = digamma_poisson(c(x));
        assert!((digamma(c(1.0 - x)) - sum - target).norm() < 1e-4);
        assert!((digamma(c(1.0 - x)) + sum - target).norm() > 0.1);
    }

    #[test]
    fn xi_reduces_without_classes() {
        let d = XiData { l_inf: 0, index: 2, tr_s0: 1.0, cusp: vec![], e: c(0.25), vol: 0.3, dim_v: 1 };
        let s = c(2.0);
        let v = xi_logderiv(s, c(0.0), &d, XiForm::Displayed).unwrap();
        assert!((v - (c(1.0) / (2.0 * s) - 0.25)).norm() < 1e-15);
        let d = XiData { l_inf: 1, index: 2, tr_s0: 1.0, cusp: vec![(c(0.125), PI)], e: c(0.1), vol: 0.3, dim_v: 1 };
        let v = xi_logderiv(c(2.5), c(0.01), &d, XiForm::Displayed).unwrap();
        assert!(v.im.abs() < 1e-14);
        assert!(xi_logderiv(c(0.5), c(0.0), &d, XiForm::Consistent).is_err());
    }
}
