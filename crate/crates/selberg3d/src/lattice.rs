//! Rank-2 lattice character sums.
//!
//! For `Λ = Z ⊕ Zτ` and the unitary character `ψ(n + mτ) = e^{2πi(nu + mv)}`
//! this module evaluates the partial sums `Z(x, Λ, ψ) = Σ_{0<|μ|²≤x} ψ(μ)/|μ|²`,
//! the constant `η_Λ` of the trivial-character asymptotics, the limit
//! `L(Λ, ψ)` by direct summation, and its closed form through the Siegel
//! function.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The lattice `Z ⊕ Zτ` with `Im τ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub tau: Complex64,
    pub covolume: f64,
    /// Dual basis `(μ₁, μ₂)` with `⟨μ₁,1⟩ = ⟨μ₂,τ⟩ = 1`, `⟨μ₁,τ⟩ = ⟨μ₂,1⟩ = 0`.
    pub dual_basis: (Complex64, Complex64),
}

/// Real inner product on `R² = C`.
pub fn inner(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

impl Lattice {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::Domain(format!("lattice needs Im tau > 0, got {tau}")));
        }
        let mu1 = Complex64::new(1.0, -tau.re / tau.im);
        let mu2 = Complex64::new(0.0, 1.0 / tau.im);
        Ok(Self { tau, covolume: tau.im, dual_basis: (mu1, mu2) })
    }

    /// Gaussian integers `Z[i]`.
    pub fn gaussian() -> Self {
        Self::new(Complex64::new(0.0, 1.0)).expect("valid tau")
    }

    /// Eisenstein integers `Z[ω]`, `ω = -1/2 + i√3/2`.
    pub fn eisenstein() -> Self {
        Self::new(Complex64::new(-0.5, 0.75f64.sqrt())).expect("valid tau")
    }

    /// The point `n + mτ`.
    pub fn point(&self, n: i64, m: i64) -> Complex64 {
        Complex64::new(n as f64, 0.0) + self.tau * m as f64
    }

    /// `|n + mτ|²` evaluated as a quadratic form in the integer coordinates.
    pub fn norm_sqr(&self, n: i64, m: i64) -> f64 {
        let (n, m) = (n as f64, m as f64);
        n * n + m * (2.0 * n * self.tau.re + m * self.tau.norm_sqr())
    }

    /// Dual lattice vector `a μ₁ + b μ₂`.
    pub fn dual_point(&self, a: i64, b: i64) -> Complex64 {
        self.dual_basis.0 * a as f64 + self.dual_basis.1 * b as f64
    }
}

/// The character `ψ(n + mτ) = e^{2πi(nu + mv)}` with phases in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeCharacter {
    pub u: f64,
    pub v: f64,
}

impl LatticeCharacter {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u: u.rem_euclid(1.0), v: v.rem_euclid(1.0) }
    }

    pub fn trivial() -> Self {
        Self { u: 0.0, v: 0.0 }
    }

    pub fn is_trivial(&self) -> bool {
        self.u == 0.0 && self.v == 0.0
    }

    pub fn conj(&self) -> Self {
        Self::new(-self.u, -self.v)
    }

    /// Phase of `ψ(n + mτ)` reduced to `[0, 1)` from integer coordinates.
    pub fn phase(&self, n: i64, m: i64) -> f64 {
        ((n as f64 * self.u).rem_euclid(1.0) + (m as f64 * self.v).rem_euclid(1.0)).rem_euclid(1.0)
    }

    pub fn value(&self, n: i64, m: i64) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.phase(n, m))
    }
}

/// Compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: Complex64,
    comp: Complex64,
}

impl Neumaier {
    fn add(&mut self, x: Complex64) {
        let t = self.sum + x;
        let fix = |s: f64, x: f64, t: f64| if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        self.comp += Complex64::new(fix(self.sum.re, x.re, t.re), fix(self.sum.im, x.im, t.im));
        self.sum = t;
    }

    fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// Cumulative sums `Σ_{0<|μ|²≤x_k} ψ(μ) |μ|^{-2s}` for ascending thresholds `x_k`.
///
/// Rows `m` are processed in parallel; each row's bins are summed in
/// ascending `n`, and rows are reduced in ascending `m`, so the result does
/// not depend on the number of worker threads.
pub fn ladder_sums(lat: &Lattice, psi: &LatticeCharacter, s: f64, thresholds: &[f64]) -> Vec<Complex64> {
    ladder_sums_and_counts(lat, psi, s, thresholds).0
}

/// [`ladder_sums`] together with the cumulative point counts `N(x_k)`.
fn ladder_sums_and_counts(
    lat: &Lattice,
    psi: &LatticeCharacter,
    s: f64,
    thresholds: &[f64],
) -> (Vec<Complex64>, Vec<u64>) {
    let nb = thresholds.len();
    if nb == 0 {
        return (Vec::new(), Vec::new());
    }
    debug_assert!(thresholds.windows(2).all(|w| w[0] <= w[1]));
    let x_max = thresholds[nb - 1];
    if !(x_max > 0.0) {
        return (vec![Complex64::new(0.0, 0.0); nb], vec![0; nb]);
    }
    let m_max = (x_max.sqrt() / lat.tau.im).floor() as i64 + 1;
    let rows: Vec<(Vec<Neumaier>, Vec<u64>)> = (-m_max..=m_max)
        .into_par_iter()
        .map(|m| {
            let mut bins = vec![Neumaier::default(); nb];
            let mut counts = vec![0u64; nb];
            let h2 = x_max - (m as f64 * lat.tau.im).powi(2);
            if h2 < 0.0 {
                return (bins, counts);
            }
            let center = -(m as f64) * lat.tau.re;
            let w = h2.sqrt();
            let lo = (center - w).floor() as i64 - 1;
            let hi = (center + w).ceil() as i64 + 1;
            for n in lo..=hi {
                if n == 0 && m == 0 {
                    continue;
                }
                let q = lat.norm_sqr(n, m);
                if q > x_max {
                    continue;
                }
                let k = thresholds.partition_point(|&x| x < q);
                let weight = if s == 1.0 { q.recip() } else { (-s * q.ln()).exp() };
                let term = if psi.is_trivial() { Complex64::new(weight, 0.0) } else { psi.value(n, m) * weight };
                bins[k].add(term);
                counts[k] += 1;
            }
            (bins, counts)
        })
        .collect();
    let mut out = Vec::with_capacity(nb);
    let mut out_counts = Vec::with_capacity(nb);
    let mut acc = Neumaier::default();
    let mut count = 0u64;
    for k in 0..nb {
        for (row, row_counts) in &rows {
            acc.add(row[k].total());
            count += row_counts[k];
        }
        out.push(acc.total());
        out_counts.push(count);
    }
    (out, out_counts)
}

/// `Z(x, Λ, ψ) = Σ_{0<|μ|²≤x} ψ(μ)/|μ|²`.
pub fn z_partial(x: f64, lat: &Lattice, psi: &LatticeCharacter) -> Complex64 {
    ladder_sums(lat, psi, 1.0, &[x])[0]
}

/// Number of non-zero lattice points with `|μ|² ≤ x`.
pub fn count_points(x: f64, lat: &Lattice) -> u64 {
    let m_max = (x.max(0.0).sqrt() / lat.tau.im).floor() as i64 + 1;
    let mut count = 0u64;
    for m in -m_max..=m_max {
        let h2 = x - (m as f64 * lat.tau.im).powi(2);
        if h2 < 0.0 {
            continue;
        }
        let center = -(m as f64) * lat.tau.re;
        let w = h2.sqrt();
        for n in (center - w).floor() as i64 - 1..=(center + w).ceil() as i64 + 1 {
            if (n, m) != (0, 0) && lat.norm_sqr(n, m) <= x {
                count += 1;
            }
        }
    }
    count
}

/// Result of a lattice-sum evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSumResult {
    pub value: Complex64,
    pub x_max: f64,
    pub tail_estimate: f64,
    pub eta: Option<f64>,
}

/// Estimate of `η_Λ` from the ladder `x = 2^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaEstimate {
    pub eta: f64,
    /// `max - min` of the per-rung estimates `(Z(x) - Δ(x)/x)/(π/|Λ|) - ln x`,
    /// where `Δ(x) = N(x) - πx/|Λ|` is the lattice-point discrepancy.
    pub spread: f64,
    /// Slope of a free least-squares fit `Z ≈ α ln x + β`.
    pub fitted_slope: f64,
    pub ladder: Vec<(f64, f64)>,
}

/// Default exponents of the `η_Λ` ladder.
pub const ETA_LADDER: std::ops::RangeInclusive<i32> = 14..=24;
/// Largest accepted ladder spread of `η_Λ`.
pub const ETA_SPREAD_MAX: f64 = 1e-3;

/// `η_Λ` with `Z(x, Λ, id) = (π/|Λ|)(ln x + η_Λ) + O(x^{-1/2})`.
pub fn eta_lambda(lat: &Lattice) -> Result<EtaEstimate> {
    eta_lambda_ladder(lat, ETA_LADDER)
}

/// [`eta_lambda`] on the ladder `x = 2^k`, `k ∈ ks`.
pub fn eta_lambda_ladder(lat: &Lattice, ks: std::ops::RangeInclusive<i32>) -> Result<EtaEstimate> {
    let xs: Vec<f64> = ks.map(|k| 2f64.powi(k)).collect();
    if xs.len() < 2 {
        return Err(Error::Domain("eta ladder needs at least two rungs".into()));
    }
    let (zs, counts) = ladder_sums_and_counts(lat, &LatticeCharacter::trivial(), 1.0, &xs);
    let main = PI / lat.covolume;
    // Z(x) - (N(x) - A x)/x = A(ln x + η) - ∫_x^∞ (N(t) - A t) t^{-2} dt with A = π/|Λ|:
    // removing the lattice-point discrepancy at the cut leaves only its average.
    let per: Vec<f64> = xs
        .iter()
        .zip(&zs)
        .zip(&counts)
        .map(|((x, z), &n)| (z.re - (n as f64 - main * x) / x) / main - x.ln())
        .collect();
    let eta = per.iter().sum::<f64>() / per.len() as f64;
    let spread = per.iter().cloned().fold(f64::MIN, f64::max) - per.iter().cloned().fold(f64::MAX, f64::min);
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let mz = zs.iter().map(|z| z.re).sum::<f64>() / n;
    let sxz: f64 = lx.iter().zip(&zs).map(|(l, z)| (l - mx) * (z.re - mz)).sum();
    let sxx: f64 = lx.iter().map(|l| (l - mx) * (l - mx)).sum();
    let est = EtaEstimate { eta, spread, fitted_slope: sxz / sxx, ladder: xs.into_iter().zip(per).collect() };
    if spread > ETA_SPREAD_MAX {
        return Err(Error::ConvergenceFailure(format!("eta ladder spread {spread:.3e}")));
    }
    Ok(est)
}

/// `L(Λ, ψ)` by direct summation up to `x_max`, with a measured tail constant.
pub fn l_direct(lat: &Lattice, psi: &LatticeCharacter, x_max: f64) -> Result<LatticeSumResult> {
    if psi.is_trivial() {
        return Err(Error::TrivialCharacter);
    }
    if !(x_max > 0.0) {
        return Err(Error::Domain("x_max must be positive".into()));
    }
    let xs: Vec<f64> = (0..5).rev().map(|j| x_max / 4f64.powi(j)).collect();
    let zs = ladder_sums(lat, psi, 1.0, &xs);
    let value = zs[4];
    let c_meas = (0..4).map(|j| (zs[j] - value).norm() * xs[j].sqrt()).fold(0.0, f64::max);
    Ok(LatticeSumResult { value, x_max, tail_estimate: c_meas / x_max.sqrt(), eta: None })
}

/// `B₂(X) = X² - X + 1/6`.
fn bernoulli2(x: f64) -> f64 {
    x * x - x + 1.0 / 6.0
}

/// The Siegel function
/// `g_{a₁,a₂}(τ) = -q_τ^{B₂(a₁)/2} e^{2πi a₂(a₁-1)/2} (1 - q_z) Π_{n≥1} (1 - q_τ^n q_z)(1 - q_τ^n / q_z)`
/// with `z = a₁τ + a₂`, truncated after `q_terms` factors of the product.
pub fn siegel_g(a1: f64, a2: f64, tau: Complex64, q_terms: usize) -> Result<Complex64> {
    if !(tau.im > 0.0) {
        return Err(Error::Domain("siegel_g needs Im tau > 0".into()));
    }
    let i = Complex64::new(0.0, 1.0);
    let q = (2.0 * PI * i * tau).exp();
    let qz = (2.0 * PI * i * (tau * a1 + a2)).exp();
    let mut g = -(PI * i * tau * bernoulli2(a1)).exp() * (PI * i * a2 * (a1 - 1.0)).exp() * (1.0 - qz);
    let mut qn = Complex64::new(1.0, 0.0);
    for _ in 0..q_terms {
        qn *= q;
        g *= (1.0 - qn * qz) * (1.0 - qn / qz);
    }
    Ok(g)
}

/// `log |g_{a₁,a₂}(τ)|`, with the product continued until factors are 1 to machine precision.
pub fn log_abs_siegel(a1: f64, a2: f64, tau: Complex64) -> Result<f64> {
    if !(tau.im > 0.0) {
        return Err(Error::Domain("siegel_g needs Im tau > 0".into()));
    }
    let i = Complex64::new(0.0, 1.0);
    let q = (2.0 * PI * i * tau).exp();
    let qz = (2.0 * PI * i * (tau * a1 + a2)).exp();
    let mut acc = -PI * tau.im * bernoulli2(a1) + (1.0 - qz).norm().ln();
    let mut qn = Complex64::new(1.0, 0.0);
    for _ in 0..10_000 {
        qn *= q;
        let f1 = (1.0 - qn * qz).norm();
        let f2 = (1.0 - qn / qz).norm();
        acc += f1.ln() + f2.ln();
        if (qn * qz).norm() < 1e-18 && (qn / qz).norm() < 1e-18 {
            return Ok(acc);
        }
    }
    Err(Error::ConvergenceFailure("Siegel product".into()))
}

/// Order of the Siegel-function arguments in the closed form of `L(Λ, ψ)`.
///
/// With `ψ(n + mτ) = e^{2πi(nu + mv)}` the direct sums agree with
/// `(-2π/Im τ) log|g_{-u,v}(τ)|`. On ℤ[i] and ℤ[ω] both orders give the same
/// value; a lattice without extra symmetry separates them.
pub const SIEGEL_ARGS_NEG_V_U: bool = false;

/// Siegel arguments `(a₁, a₂)` for the character `ψ`.
pub fn siegel_args(psi: &LatticeCharacter) -> (f64, f64) {
    if SIEGEL_ARGS_NEG_V_U {
        (-psi.v, psi.u)
    } else {
        (-psi.u, psi.v)
    }
}

/// `L(Λ, ψ) = (-2π/Im τ) log |g_{a₁,a₂}(τ)|` for non-trivial `ψ`.
pub fn l_kronecker(lat: &Lattice, psi: &LatticeCharacter) -> Result<f64> {
    if psi.is_trivial() {
        return Err(Error::TrivialCharacter);
    }
    let (a1, a2) = siegel_args(psi);
    Ok(-2.0 * PI / lat.covolume * log_abs_siegel(a1, a2, lat.tau)?)
}

/// Scaled tails `|Σ_{w<|μ|²≤p} ψ(μ)/|μ|^{2s}| · w^{s-1/2}` over a grid of `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub s: f64,
    pub p: f64,
    pub scaled: Vec<(f64, f64)>,
    pub max_scaled_tail: f64,
}

/// Evaluates the scaled tail statistic of a non-trivial character sum.
pub fn tail_check(lat: &Lattice, psi: &LatticeCharacter, s: f64, w_grid: &[f64], p: f64) -> Result<TailReport> {
    if psi.is_trivial() {
        return Err(Error::TrivialCharacter);
    }
    if w_grid.iter().any(|&w| !(w > 0.0 && w < p)) {
        return Err(Error::Domain("w_grid must lie in (0, p)".into()));
    }
    let mut xs: Vec<f64> = w_grid.to_vec();
    xs.push(p);
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
    let sums = ladder_sums(lat, psi, s, &sorted);
    let mut at = vec![Complex64::new(0.0, 0.0); xs.len()];
    for (k, &i) in order.iter().enumerate() {
        at[i] = sums[k];
    }
    let total = at[xs.len() - 1];
    let scaled: Vec<(f64, f64)> =
        w_grid.iter().enumerate().map(|(i, &w)| (w, (total - at[i]).norm() * w.powf(s - 0.5))).collect();
    let max_scaled_tail = scaled.iter().map(|x| x.1).fold(0.0, f64::max);
    Ok(TailReport { s, p, scaled, max_scaled_tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::EULER_GAMMA;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `E₁(x) = ∫_x^∞ e^{-t}/t dt`.
    fn exp_integral_e1(x: f64) -> f64 {
        if x < 2.0 {
            let mut sum = -EULER_GAMMA - x.ln();
            let mut term = 1.0;
            for k in 1..60 {
                term *= -x / k as f64;
                sum -= term / k as f64;
            }
            sum
        } else {
            // Continued fraction, modified Lentz.
            let mut b = x + 1.0;
            let mut cc = 1e300;
            let mut d = 1.0 / b;
            let mut h = d;
            for i in 1..200 {
                let an = -(i as f64) * (i as f64);
                b += 2.0;
                d = 1.0 / (an * d + b);
                cc = b + an / cc;
                let del = cc * d;
                h *= del;
                if (del - 1.0).abs() < 1e-16 {
                    break;
                }
            }
            h * (-x).exp()
        }
    }

    /// `η_Λ` from the Laurent constant of the Epstein zeta function at `s = 1`,
    /// evaluated with the theta-function splitting at `t = 1`.
    fn eta_epstein_oracle(lat: &Lattice) -> f64 {
        let mut g1 = 0.0;
        let r = 12;
        for m in -r..=r {
            for n in -r..=r {
                if (n, m) == (0, 0) {
                    continue;
                }
                let x = PI * lat.norm_sqr(n, m);
                g1 += (-x).exp() / x;
                let dual = lat.dual_point(n, m);
                g1 += exp_integral_e1(PI * dual.norm_sqr()) / lat.covolume;
            }
        }
        PI.ln() + EULER_GAMMA + lat.covolume * (g1 - 1.0)
    }

    /// Kronecker's first limit formula: `η = 2γ - 2 ln 2 - 2 ln y - 4 ln |η_D(τ)|`.
    fn eta_first_limit_oracle(tau: Complex64) -> f64 {
        let i = Complex64::new(0.0, 1.0);
        let q = (2.0 * PI * i * tau).exp();
        let mut log_eta = -PI * tau.im / 12.0;
        let mut qn = Complex64::new(1.0, 0.0);
        for _ in 0..200 {
            qn *= q;
            log_eta += (1.0 - qn).norm().ln();
        }
        2.0 * EULER_GAMMA - 2.0 * 2f64.ln() - 2.0 * tau.im.ln() - 4.0 * log_eta
    }

    #[test]
    fn dual_basis_pairs() {
        let lat = Lattice::new(c(0.3, 1.7)).unwrap();
        let (m1, m2) = lat.dual_basis;
        assert_relative_eq!(inner(m1, c(1.0, 0.0)), 1.0, epsilon = 1e-12);
        assert!(inner(m1, lat.tau).abs() < 1e-12);
        assert!(inner(m2, c(1.0, 0.0)).abs() < 1e-12);
        assert_relative_eq!(inner(m2, lat.tau), 1.0, epsilon = 1e-12);
        assert!(Lattice::new(c(0.0, -1.0)).is_err());
    }

    #[test]
    fn z_partial_hand_values() {
        let lat = Lattice::gaussian();
        assert_eq!(z_partial(0.5, &lat, &LatticeCharacter::trivial()), c(0.0, 0.0));
        assert_relative_eq!(z_partial(2.0, &lat, &LatticeCharacter::trivial()).re, 6.0, epsilon = 1e-14);
        let psi = LatticeCharacter::new(0.5, 0.0);
        assert!(z_partial(1.0, &lat, &psi).norm() < 1e-14);
    }

    #[test]
    fn character_is_multiplicative() {
        let psi = LatticeCharacter::new(1.0 / 3.0, 0.25);
        for &(n, m, n2, m2) in &[(3, -7, 11, 4), (-100, 250, 37, -19)] {
            let lhs = psi.value(n + n2, m + m2);
            let rhs = psi.value(n, m) * psi.value(n2, m2);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let taus = [c(0.0, 1.0), c(-0.5, 0.866), c(0.37, 0.61), c(0.12, 2.3), c(-0.41, 1.05)];
        for tau in taus {
            let lat = Lattice::new(tau).unwrap();
            for x in [10.0f64, 1234.5, 1e4] {
                let b = (f64::sqrt(x) / tau.im) as i64 + 3;
                let nb = (f64::sqrt(x) + b as f64 * tau.re.abs()) as i64 + 3;
                let mut brute = 0;
                for m in -b..=b {
                    for n in -nb..=nb {
                        if (n, m) != (0, 0) && lat.norm_sqr(n, m) <= x {
                            brute += 1;
                        }
                    }
                }
                assert_eq!(count_points(x, &lat), brute);
            }
        }
    }

    #[test]
    fn siegel_examples() {
        let tau = c(0.0, 1.0);
        let g0 = siegel_g(0.25, 0.3, tau, 0).unwrap();
        let i = c(0.0, 1.0);
        let qz = (2.0 * PI * i * (tau * 0.25 + 0.3)).exp();
        let pre = -(PI * i * tau * bernoulli2(0.25)).exp() * (PI * i * 0.3 * (0.25 - 1.0)).exp() * (1.0 - qz);
        assert!((g0 - pre).norm() < 1e-15);
        assert_relative_eq!((2.0 * PI * i * tau).exp().norm(), 0.001_867_442_731_707_988_8, epsilon = 1e-15);
        let g5 = siegel_g(0.25, 0.3, tau, 5).unwrap();
        let g40 = siegel_g(0.25, 0.3, tau, 40).unwrap();
        assert!((g5 - g40).norm() / g40.norm() < 1e-13);
        let shifted = siegel_g(0.25, 1.3, tau, 40).unwrap();
        assert_relative_eq!(shifted.norm(), g40.norm(), max_relative = 1e-13);
        assert_relative_eq!(log_abs_siegel(0.25, 0.3, tau).unwrap(), g40.norm().ln(), epsilon = 1e-13);
        assert!(siegel_g(0.1, 0.1, c(1.0, 0.0), 3).is_err());
    }

    #[test]
    fn kronecker_index_convention_is_the_validated_one() {
        let closed = |lat: &Lattice, a1: f64, a2: f64| -2.0 * PI / lat.covolume * log_abs_siegel(a1, a2, lat.tau).unwrap();
        // On ℤ[i] with (1/2, 0) the two orders coincide and both match.
        let lat = Lattice::gaussian();
        let psi = LatticeCharacter::new(0.5, 0.0);
        let direct = l_direct(&lat, &psi, 1e6).unwrap().value.re;
        assert!((direct - closed(&lat, -psi.u, psi.v)).abs() < 5e-3);
        assert!((direct - closed(&lat, -psi.v, psi.u)).abs() < 5e-3);
        // A generic lattice discriminates.
        let lat = Lattice::new(c(0.3, 1.4)).unwrap();
        let psi = LatticeCharacter::new(0.2, 0.7);
        let direct = l_direct(&lat, &psi, 1e6).unwrap().value.re;
        let chosen = closed(&lat, -psi.u, psi.v);
        let other = closed(&lat, -psi.v, psi.u);
        assert!((direct - chosen).abs() < 5e-3, "direct {direct} chosen {chosen}");
        assert!((direct - other).abs() > 0.1, "direct {direct} other {other}");
        const { assert!(!SIEGEL_ARGS_NEG_V_U) };
        assert_relative_eq!(l_kronecker(&lat, &psi).unwrap(), chosen);
    }

    #[test]
    fn kronecker_conjugate_and_relabel() {
        let lat = Lattice::eisenstein();
        let psi = LatticeCharacter::new(1.0 / 3.0, 0.25);
        let a = l_kronecker(&lat, &psi).unwrap();
        let b = l_kronecker(&lat, &psi.conj()).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-9);
        let shifted = LatticeCharacter::new(1.0 / 3.0 + 2.0, 0.25 - 1.0);
        assert_relative_eq!(l_kronecker(&lat, &shifted).unwrap(), a, epsilon = 1e-12);
        assert_eq!(l_kronecker(&lat, &LatticeCharacter::trivial()), Err(Error::TrivialCharacter));
    }

    #[test]
    fn direct_sum_converges_at_measured_rate() {
        let lat = Lattice::gaussian();
        let psi = LatticeCharacter::new(0.5, 0.0);
        let big = l_direct(&lat, &psi, 1e6).unwrap();
        let small = l_direct(&lat, &psi, 1e5).unwrap();
        assert!((big.value - small.value).norm() <= 3.0 * small.tail_estimate);
        let conj = l_direct(&lat, &psi.conj(), 1e5).unwrap();
        assert!((conj.value - small.value.conj()).norm() < 1e-12);
    }

    #[test]
    fn eta_matches_epstein_oracles() {
        for tau in [c(0.0, 1.0), c(-0.5, 0.75f64.sqrt())] {
            let lat = Lattice::new(tau).unwrap();
            let theta = eta_epstein_oracle(&lat);
            let first_limit = eta_first_limit_oracle(tau);
            assert_relative_eq!(theta, first_limit, epsilon = 1e-10);
            let est = eta_lambda(&lat).unwrap();
            assert!((est.eta - theta).abs() < 1e-3, "eta {} vs oracle {theta}", est.eta);
            assert_relative_eq!(est.fitted_slope, PI / lat.covolume, max_relative = 1e-4);
        }
    }

    #[test]
    fn eta_scaling_between_lattices() {
        // Z_{Z⊕2iZ}(x) and Z_{Z[i]}(x) have main terms π/2 and π; each estimator
        // must reproduce its own oracle.
        let lat2 = Lattice::new(c(0.0, 2.0)).unwrap();
        let est = eta_lambda(&lat2).unwrap();
        assert!((est.eta - eta_epstein_oracle(&lat2)).abs() < 1e-3);
    }

    #[test]
    fn tail_statistics() {
        let lat = Lattice::gaussian();
        let psi = LatticeCharacter::new(0.5, 0.0);
        let grid = [1e2, 3e2, 1e3, 3e3, 1e4];
        let r1 = tail_check(&lat, &psi, 1.0, &grid, 1e5).unwrap();
        let first = r1.scaled[0].1;
        assert!(r1.max_scaled_tail <= 10.0 * first);
        let r2 = tail_check(&lat, &psi, 2.0, &[1e3], 1e5).unwrap();
        let raw1 = r1.scaled[2].1 / 1e3f64.powf(0.5);
        let raw2 = r2.scaled[0].1 / 1e3f64.powf(1.5);
        assert!(raw2 < raw1);
        let r3 = tail_check(&lat, &psi, 1.0, &grid, 2e5).unwrap();
        assert!(r3.max_scaled_tail <= 2.0 * r1.max_scaled_tail && r1.max_scaled_tail <= 2.0 * r3.max_scaled_tail);
    }

    proptest! {
        #[test]
        fn thread_count_does_not_change_sums(x in 10.0f64..5e3, u in 0.0f64..1.0, v in 0.0f64..1.0) {
            let lat = Lattice::new(c(0.21, 1.13)).unwrap();
            let psi = LatticeCharacter::new(u, v);
            let a = z_partial(x, &lat, &psi);
            let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            let b = pool.install(|| z_partial(x, &lat, &psi));
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}
