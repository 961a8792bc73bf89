//! Test-function pairs `(h, g)` and the Selberg–Harish-Chandra transform.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::quad::{integrate, integrate_to_infinity, QuadConfig};
use crate::error::{Error, Result};

/// Spectral side function `h(w)`.
pub type SpectralFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
/// Geometric side function `g(x)`.
pub type GeometricFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Bound `|h(1+t²)| ≤ constant · (1+t²)^{-exponent}` valid for `t ≥ from`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayBound {
    pub constant: f64,
    pub exponent: f64,
    pub from: f64,
}

/// Known closed forms of a pair, used where a term has an exact value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairKind {
    /// `h(w) = 1/(s²+w-1) - 1/(B²+w-1)`.
    Resolvent { s: Complex64, b: Complex64 },
    Custom,
}

/// A Fourier pair `g(x) = (1/2π) ∫ h(1+t²) e^{-itx} dt`.
#[derive(Clone)]
pub struct TestFunctionPair {
    pub h: SpectralFn,
    pub g: GeometricFn,
    pub decay: DecayBound,
    pub kind: PairKind,
}

impl std::fmt::Debug for TestFunctionPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunctionPair").field("decay", &self.decay).field("kind", &self.kind).finish()
    }
}

impl TestFunctionPair {
    /// `h(1 + t²)`.
    pub fn h_line(&self, t: f64) -> Complex64 {
        (self.h)(Complex64::new(1.0 + t * t, 0.0))
    }

    /// Admissibility `|h(1+t²)| ≤ C (1+t²)^{-3/2-ε}` on sampled `t ≤ t_max`.
    pub fn is_admissible(&self, t_max: f64, samples: usize) -> bool {
        if self.decay.exponent <= 1.5 {
            return false;
        }
        (0..=samples).all(|i| {
            let t = t_max * i as f64 / samples as f64;
            if t < self.decay.from {
                return self.h_line(t).norm().is_finite();
            }
            self.h_line(t).norm() <= self.decay.constant * (1.0 + t * t).powf(-self.decay.exponent) * (1.0 + 1e-12)
        })
    }
}

/// The resolvent pair with parameters `1 < Re s < Re B`.
pub fn resolvent_pair(s: Complex64, b: Complex64) -> Result<TestFunctionPair> {
    if !(s.re > 1.0 && b.re > s.re) {
        return Err(Error::Domain(format!("resolvent pair needs 1 < Re s < Re B, got s={s}, B={b}")));
    }
    let (s2, b2) = (s * s, b * b);
    let h: SpectralFn = Arc::new(move |w: Complex64| (s2 + w - 1.0).inv() - (b2 + w - 1.0).inv());
    let g: GeometricFn = Arc::new(move |x: f64| {
        let x = x.abs();
        (-s * x).exp() / (2.0 * s) - (-b * x).exp() / (2.0 * b)
    });
    // |h(1+t²)| = |B²-s²| / (|s²+t²| |B²+t²|) ≤ 5 |B²-s²| (1+t²)^{-2} once t² ≥ 2 max(|s|², |B|², 1).
    let from = (2.0 * s.norm_sqr().max(b.norm_sqr()).max(1.0)).sqrt();
    let decay = DecayBound { constant: 5.0 * (b2 - s2).norm(), exponent: 2.0, from };
    Ok(TestFunctionPair { h, g, decay, kind: PairKind::Resolvent { s, b } })
}

/// `g(x) = (1/2π) ∫ h(1+t²) e^{-itx} dt` by panel quadrature up to a cutoff
/// where the decay bound puts the tail below `tol/10`.
pub fn g_from_h(pair: &TestFunctionPair, x: f64, tol: f64) -> Result<Complex64> {
    let DecayBound { constant, exponent, from } = pair.decay;
    if exponent <= 0.5 {
        return Err(Error::QuadratureFailure("decay exponent too small for truncation".into()));
    }
    let p2 = 2.0 * exponent - 1.0;
    // (1/π) ∫_T^∞ C t^{-2p} dt = C T^{1-2p} / (π (2p-1)) ≤ tol/10
    let cutoff = (10.0 * constant / (PI * p2 * tol)).powf(1.0 / p2).max(from).max(1.0);
    // h(1+t²) is even in t, so g(x) = (1/π) ∫₀^T h(1+t²) cos(tx) dt.
    let panel = if x.abs() > 1.0 { PI / x.abs() } else { PI };
    let n_panels = (cutoff / panel).ceil() as usize;
    let cfg = QuadConfig::with_tol(tol * 0.01 / n_panels as f64, 1e-13);
    let f = |t: f64| pair.h_line(t) * (t * x).cos();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n_panels {
        let lo = i as f64 * panel;
        let hi = ((i + 1) as f64 * panel).min(cutoff);
        total += integrate(f, lo, hi, &cfg)?.value;
    }
    Ok(total / PI)
}

/// Selberg–Harish-Chandra transform `h(1-s²)` of a radial kernel `k`:
/// `(π/s) ∫₁^∞ k((t+1/t)/2) (t^s - t^{-s}) (t - 1/t) dt/t`, computed after
/// `t = e^u` as `(4π/s) ∫₀^∞ k(cosh u) sinh(su) sinh u du`.
pub fn shc_forward<K: Fn(f64) -> Complex64>(k: K, s: Complex64) -> Result<Complex64> {
    if s.re == 0.0 {
        return Err(Error::Domain("shc_forward requires Re s != 0".into()));
    }
    let cfg = QuadConfig::with_tol(1e-14, 1e-11);
    let f = |u: f64| k(u.cosh()) * (s * u).sinh() * u.sinh();
    let r = integrate_to_infinity(f, 0.0, 0.5, 700.0, &cfg)?;
    Ok(r.value * (4.0 * PI) / s)
}
