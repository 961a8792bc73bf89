//! Gamma and digamma functions of complex argument.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_4;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` on the principal branch away from the poles.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Reflection: Γ(z)Γ(1-z) = π / sin(πz).
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// `Γ(z)` for complex `z`.
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `Γ(x)` for real `x` (sign-correct for negative non-integers).
pub fn gamma_real(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma_real(1.0 - x))
    } else {
        ln_gamma(Complex64::new(x, 0.0)).exp().re
    }
}

/// Even-index Bernoulli numbers `B_2 … B_20`.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Digamma `ψ(z) = Γ'(z)/Γ(z)` by upward recurrence and the asymptotic series.
pub fn digamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // ψ(1-z) - ψ(z) = π cot(πz)
        let cot = (z * PI).cos() / (z * PI).sin();
        return digamma(1.0 - z) - cot * PI;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 16.0 {
        acc -= w.inv();
        w += 1.0;
    }
    let inv2 = (w * w).inv();
    let mut pow = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        series += pow * (*b / n);
        pow *= inv2;
    }
    acc + w.ln() - 0.5 * w.inv() - series
}

/// `ψ(1 + i t)`, the digamma function on the line `Re = 1`.
pub fn digamma_line(t: f64) -> Complex64 {
    digamma(Complex64::new(1.0, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_values() {
        assert_relative_eq!(gamma_real(5.0), 24.0, epsilon = 1e-12);
        assert_relative_eq!(gamma_real(0.5), PI.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(gamma_real(-0.5), -2.0 * PI.sqrt(), epsilon = 1e-13);
        // |Γ(iy)|^2 = π / (y sinh πy)
        let y = 1.3;
        let g = gamma(Complex64::new(0.0, y));
        assert_relative_eq!(g.norm_sqr(), PI / (y * (PI * y).sinh()), epsilon = 1e-13);
    }

    #[test]
    fn digamma_line_values() {
        let v = digamma_line(0.0);
        assert_relative_eq!(v.re, -EULER_GAMMA, epsilon = 1e-14);
        assert!(v.im.abs() < 1e-15);
        let v = digamma_line(1.0);
        assert_relative_eq!(v.re, 0.094_650_320_622_476_98, epsilon = 1e-12);
        assert_relative_eq!(v.im, 1.076_674_047_468_581_2, epsilon = 1e-12);
        let w = digamma_line(-1.0);
        assert_relative_eq!(w.re, v.re, epsilon = 1e-15);
        assert_relative_eq!(w.im, -v.im, epsilon = 1e-15);
    }

    #[test]
    fn digamma_line_oracle_series() {
        // Im ψ(1+it) = Σ_n t / (n² + t²)  (n ≥ 1), summed with an integral tail.
        // Re ψ(1+it) = -γ + Σ_n t² / (n (n² + t²)).
        for &t in &[0.3, 2.5, 7.0] {
            let n_max = 200_000;
            let mut re = -EULER_GAMMA;
            let mut im = 0.0;
            for n in (1..=n_max).rev() {
                let n = n as f64;
                re += t * t / (n * (n * n + t * t));
                im += t / (n * n + t * t);
            }
            let nm = n_max as f64 + 0.5;
            im += (t / nm).atan();
            re += 0.5 * (1.0 + t * t / (nm * nm)).ln();
            let v = digamma_line(t);
            assert_relative_eq!(v.re, re, epsilon = 1e-9);
            assert_relative_eq!(v.im, im, epsilon = 1e-9);
        }
    }

    #[test]
    fn digamma_recurrence_and_reflection() {
        let z = Complex64::new(-2.3, 0.7);
        let lhs = digamma(z + 1.0) - digamma(z);
        assert!((lhs - z.inv()).norm() < 1e-12);
        let z = Complex64::new(3.2, -1.1);
        let h = 1e-5;
        let fd = (ln_gamma(z + h) - ln_gamma(z - h)) / (2.0 * h);
        assert!((fd - digamma(z)).norm() < 1e-8);
    }
}
