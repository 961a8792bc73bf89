//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands.
//!
//! Finite intervals use global adaptive bisection with the 7/15-point
//! Gauss–Kronrod pair. Half-infinite intervals are covered by marching over
//! panels of growing width until two consecutive panels are negligible.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and budget of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 4000 }
    }
}

impl QuadConfig {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }
}

/// Value of an integral with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let k = kronrod * half;
    let g = gauss * half;
    (k, (k - g).norm())
}

/// Integrates `f` over `[a, b]` by global adaptive bisection.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0 });
    }
    let (v, e) = gk15(&f, a, b);
    let mut parts: Vec<(f64, f64, Complex64, f64)> = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    loop {
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::QuadratureFailure(format!("non-finite integrand on [{a}, {b}]")));
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * total.norm());
        if err <= target {
            return Ok(QuadResult { value: total, error: err });
        }
        if parts.len() >= cfg.max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "error {err:.3e} above target {target:.3e} after {} intervals",
                parts.len()
            )));
        }
        let worst = parts
            .iter()
            .enumerate()
            .fold((0usize, -1.0f64), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc })
            .0;
        let (lo, hi, pv, pe) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::QuadratureFailure("interval below machine resolution".into()));
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
        // Recompute totals periodically to avoid drift from incremental updates.
        if parts.len().is_multiple_of(64) {
            total = parts.iter().map(|p| p.2).sum();
            err = parts.iter().map(|p| p.3).sum();
        }
    }
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<(f64, f64)> {
    let r = integrate(|x| Complex64::new(f(x), 0.0), a, b, cfg)?;
    Ok((r.value.re, r.error))
}

/// Integrates `f` over `[a, inf)` by marching over panels of width
/// `w, w·1.5, w·1.5², …` until two consecutive panels fall below the
/// tolerance, or `x_max` is reached.
pub fn integrate_to_infinity<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    first_width: f64,
    x_max: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let mut lo = a;
    let mut width = first_width;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut quiet = 0;
    let panel_cfg = QuadConfig { abs_tol: cfg.abs_tol * 0.1, ..*cfg };
    while lo < x_max {
        let hi = (lo + width).min(x_max);
        let r = integrate(&f, lo, hi, &panel_cfg)?;
        total += r.value;
        err += r.error;
        let small = cfg.abs_tol.max(cfg.rel_tol * total.norm()) * 0.01;
        if r.value.norm() <= small {
            quiet += 1;
            if quiet >= 2 {
                return Ok(QuadResult { value: total, error: err + r.value.norm() });
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        width *= 1.5;
    }
    Err(Error::QuadratureFailure(format!("integrand not negligible before x = {x_max}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let (v, _) = integrate_real(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, &QuadConfig::default()).unwrap();
        assert_relative_eq!(v, (64.0 - 1.0) / 6.0 - 9.0, epsilon = 1e-13);
    }

    #[test]
    fn oscillatory_and_endpoint_singular() {
        let (v, _) = integrate_real(|x| (10.0 * x).cos(), 0.0, 3.0, &QuadConfig::default()).unwrap();
        assert_relative_eq!(v, (30.0f64).sin() / 10.0, epsilon = 1e-13);
        let (v, _) = integrate_real(|x| x.sqrt().recip(), 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn half_line() {
        let r = integrate_to_infinity(|x| Complex64::new((-0.5 * x).exp(), 0.0), 0.0, 1.0, 700.0, &QuadConfig::default())
            .unwrap();
        assert_relative_eq!(r.value.re, 2.0, epsilon = 1e-12);
        let r = integrate_to_infinity(
            |x| Complex64::new(0.0, x).exp() / (1.0 + x * x) / (1.0 + x * x),
            0.0,
            1.0,
            1e5,
            &QuadConfig::with_tol(1e-12, 1e-11),
        );
        assert!(r.is_ok());
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| Complex64::new((x * x).sin(), x.cos());
        let a = integrate(f, 0.0, 5.0, &QuadConfig::default()).unwrap();
        let b = integrate(f, 0.0, 5.0, &QuadConfig::default()).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadConfig { abs_tol: 1e-30, rel_tol: 1e-30, max_intervals: 8 };
        assert!(matches!(
            integrate_real(|x| x.sqrt(), 0.0, 1.0, &cfg),
            Err(Error::QuadratureFailure(_))
        ));
    }
}
