//! The partial Euler product of the zeta function and its log-derivative series.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bianchi::{BianchiGroup, CharacterSum, LoxClass};
use crate::error::{Error, Result};

/// Default truncation of the `(l, k)` double product.
pub const DEFAULT_KL_TOL: f64 = 1e-16;
/// Largest admitted `k + l` before the product is refused.
pub const MAX_KL_SUM: u32 = 4000;

/// One eigenvalue pair of `χ(T₀)` and `χ(E_{T₀})` in a common eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepEig {
    /// `𝔱_j`, eigenvalue of `χ(T₀)`.
    pub t: Complex64,
    /// `p` with `𝔱'_j = e^{2πi p/m}`, eigenvalue of `χ(E_{T₀})`.
    pub t_prime_exp: u32,
}

/// A primitive loxodromic class with the data entering the Euler product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaClass {
    /// `a(T₀)` with `|a₀| > 1`.
    pub a0: Complex64,
    /// Order of the torsion part of the centralizer.
    pub m: u32,
    /// `q` with `ζ(T₀) = e^{iπq/m}`, coprime to `2m`.
    pub zeta_exp: u32,
    pub eigs: Vec<RepEig>,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ZetaClass {
    /// Class with trivial one-dimensional representation data.
    pub fn scalar(a0: Complex64, m: u32, zeta_exp: u32) -> Result<Self> {
        let c = Self { a0, m, zeta_exp, eigs: vec![RepEig { t: Complex64::new(1.0, 0.0), t_prime_exp: 0 }] };
        c.validate()?;
        Ok(c)
    }

    /// Data of a Bianchi class under a sum of characters.
    pub fn from_lox(g: &BianchiGroup, class: &LoxClass, chi: &CharacterSum) -> Result<Self> {
        let f = g.field;
        let t = chi.eigenvalues(&class.t0, f);
        let ep = chi.exponents(&class.torsion_gen, f);
        let eigs = t
            .into_iter()
            .zip(ep)
            .map(|(t, e)| {
                // e^{2πi e/12} = e^{2πi p/m}
                let num = e * class.m;
                if !num.is_multiple_of(12) {
                    return Err(Error::InexactInput(format!(
                        "χ(E) = ζ₁₂^{e} is not an {}-th root of unity",
                        class.m
                    )));
                }
                Ok(RepEig { t, t_prime_exp: (num / 12) % class.m })
            })
            .collect::<Result<Vec<_>>>()?;
        let c = Self { a0: class.a0, m: class.m, zeta_exp: class.zeta_exp, eigs };
        c.validate()?;
        Ok(c)
    }

    pub fn n0(&self) -> f64 {
        self.a0.norm_sqr()
    }

    pub fn zeta0(&self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::PI * self.zeta_exp as f64 / self.m as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a0.norm() > 1.0) {
            return Err(Error::Domain(format!("|a₀| must exceed 1, got {}", self.a0.norm())));
        }
        if self.m == 0 || gcd(self.zeta_exp, 2 * self.m) != 1 {
            return Err(Error::Domain(format!("ζ exponent {} is not primitive modulo {}", self.zeta_exp, 2 * self.m)));
        }
        if self.eigs.iter().any(|e| e.t_prime_exp >= self.m) {
            return Err(Error::Domain("𝔱' exponent must be reduced modulo m".into()));
        }
        Ok(())
    }

    /// `c(T, j, l, k) = 1`, tested on exponents: `p + q(l - k) ≡ 0 (mod m)`.
    pub fn admits(&self, j: usize, l: u32, k: u32) -> bool {
        let m = self.m as i64;
        let diff = l as i64 - k as i64;
        (self.eigs[j].t_prime_exp as i64 + self.zeta_exp as i64 * diff).rem_euclid(m) == 0
    }
}

/// A loxodromic class as it enters the log-derivative and the trace formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoxTerm {
    /// `tr χ(T)`.
    pub trace: Complex64,
    /// `a(T)` with `|a| > 1`.
    pub a: Complex64,
    /// `N(T₀)` of the associated primitive element.
    pub n0: f64,
    /// `m(T)`.
    pub m: u32,
}

impl LoxTerm {
    pub fn norm(&self) -> f64 {
        self.a.norm_sqr()
    }

    /// `log N(T₀) / (m |a - a⁻¹|²)`.
    pub fn weight(&self) -> Complex64 {
        self.trace * (self.n0.ln() / (self.m as f64 * (self.a - self.a.inv()).norm_sqr()))
    }

    pub fn from_lox(g: &BianchiGroup, class: &LoxClass, chi: &CharacterSum) -> Self {
        Self { trace: chi.trace(&class.rep, g.field).to_complex(), a: class.a, n0: class.n0, m: class.m }
    }
}

/// All classes `T₀ⁿ E^v` with `1 ≤ n ≤ n_max`, `0 ≤ v < m` generated by the
/// given primitive classes.
pub fn expand_classes(classes: &[ZetaClass], n_max: u32) -> Vec<LoxTerm> {
    let mut out = Vec::new();
    for c in classes {
        let z = c.zeta0();
        for n in 1..=n_max {
            let an = c.a0.powu(n);
            for v in 0..c.m {
                let trace = c
                    .eigs
                    .iter()
                    .map(|e| {
                        let tp = Complex64::from_polar(
                            1.0,
                            2.0 * std::f64::consts::PI * (e.t_prime_exp * v) as f64 / c.m as f64,
                        );
                        e.t.powu(n) * tp
                    })
                    .sum();
                out.push(LoxTerm { trace, a: z.powu(v) * an, n0: c.n0(), m: c.m });
            }
        }
    }
    out
}

fn check_half_plane(s: Complex64) -> Result<()> {
    if !(s.re > 1.0) {
        return Err(Error::Domain(format!("the product and series need Re s > 1, got {s}")));
    }
    Ok(())
}

/// `log Z(s)` over the supplied primitive classes, as a sum of principal
/// logarithms of the factors.
pub fn log_zeta_partial(s: Complex64, classes: &[ZetaClass], kl_tol: f64) -> Result<Complex64> {
    check_half_plane(s)?;
    if !(kl_tol > 0.0 && kl_tol < 1.0) {
        return Err(Error::Domain(format!("kl_tol must lie in (0, 1), got {kl_tol}")));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for c in classes {
        c.validate()?;
        let n0 = c.n0();
        // N₀^{-(k+l)} ≥ kl_tol
        let kl_max = (kl_tol.ln() / -n0.ln()).floor();
        if kl_max > MAX_KL_SUM as f64 {
            return Err(Error::BudgetExceeded(format!("N₀ = {n0} needs k + l up to {kl_max}")));
        }
        let kl_max = kl_max as u32;
        let base = (-(s + 1.0) * n0.ln()).exp();
        let ainv2 = c.a0.powi(-2);
        let ainv2_bar = ainv2.conj();
        for (j, e) in c.eigs.iter().enumerate() {
            let mut pk = Complex64::new(1.0, 0.0);
            for k in 0..=kl_max {
                let mut pl = Complex64::new(1.0, 0.0);
                for l in 0..=kl_max - k {
                    if c.admits(j, l, k) {
                        total += (1.0 - e.t * pk * pl * base).ln();
                    }
                    pl *= ainv2_bar;
                }
                pk *= ainv2;
            }
        }
    }
    Ok(total)
}

/// The Euler product `Z(s)` truncated at `N₀^{-(k+l)} < kl_tol`.
pub fn zeta_partial(s: Complex64, classes: &[ZetaClass], kl_tol: f64) -> Result<Complex64> {
    Ok(log_zeta_partial(s, classes, kl_tol)?.exp())
}

/// `Σ tr χ(T) log N(T₀) / (m(T) |a(T) - a(T)⁻¹|²) · N(T)^{-s}`.
pub fn zeta_logderiv_series(s: Complex64, terms: &[LoxTerm]) -> Result<Complex64> {
    check_half_plane(s)?;
    Ok(terms.iter().map(|t| t.weight() * (-s * t.norm().ln()).exp()).sum())
}

/// Central difference `(log Z(s+δ) - log Z(s-δ)) / 2δ`.
pub fn logderiv_central_difference(s: Complex64, classes: &[ZetaClass], kl_tol: f64, delta: f64) -> Result<Complex64> {
    let hi = log_zeta_partial(s + delta, classes, kl_tol)?;
    let lo = log_zeta_partial(s - delta, classes, kl_tol)?;
    Ok((hi - lo) / (2.0 * delta))
}
