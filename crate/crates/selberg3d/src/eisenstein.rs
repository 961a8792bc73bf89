//! The Eisenstein series `E(P, s, v) = Σ_{M ∈ Γ_∞\Γ} r(MP)^{1+s} χ(M)* v` of
//! `PSL(2, O_d)` for `Re s > 1`, with eigenfunction and Fourier diagnostics.
//!
//! Two truncations are provided. [`eisenstein_direct`] sums over cosets whose
//! bottom row has height at most `H`. [`EisensteinSeries::periodized`] sums,
//! for each bottom-left entry `c` of height at most `H`, over all `d` at once:
//! the inner sum over `d + cΛ` is evaluated by Poisson summation, so the
//! truncated function is exactly `Λ`-periodic.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bianchi::{BianchiGroup, CharacterSum, Field, IntMat, OElt};
use crate::error::{Error, Result};
use crate::h3geom::PointH3;
use crate::lattice::{inner, Lattice};
use crate::specfun::bessel_k;
use crate::specfun::gamma::gamma_real;

/// Components of `v` outside `V_∞` must vanish to this tolerance.
pub const SINGULAR_TOL: f64 = 1e-10;
/// Boundary mismatch tolerated by [`fourier_coefficients`].
pub const PERIODICITY_TOL: f64 = 1e-6;

/// A truncated Eisenstein series value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EisensteinEval {
    pub value: Vec<Complex64>,
    pub s: Complex64,
    pub coset_bound: i64,
    /// Size of the contribution of the outermost height shell.
    pub tail_indicator: f64,
    pub terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Cosets with bottom row of height at most `H`.
    Direct,
    /// Bottom-left entries of height at most `H`, all `d` summed by Poisson.
    Periodized,
}

/// `(c, d)` reduced modulo multiplication by units: the lexicographically
/// least multiple.
fn canonical_row(c: OElt, d: OElt, f: Field) -> (OElt, OElt) {
    f.units().into_iter().map(|u| (u.mul(c, f), u.mul(d, f))).min().expect("units are non-empty")
}

/// Completes a coprime bottom row to a matrix of `SL(2, O_d)`.
fn complete_row(c: OElt, d: OElt, f: Field) -> Option<IntMat> {
    let (g, u, v) = c.xgcd(d, f);
    if !g.is_unit(f) {
        return None;
    }
    // u c + v d = g, so (v/g) d - (-u/g) c = 1
    let a = v.div_exact(g, f)?;
    let b = u.neg().div_exact(g, f)?;
    Some(IntMat::new(a, b, c, d))
}

/// Coset representatives of `Γ_∞\Γ` with bottom row of height at most `h`,
/// ordered by height and then lexicographically by the row.
pub fn coset_representatives(g: &BianchiGroup, h: i64) -> Result<Vec<IntMat>> {
    if h < 1 {
        return Err(Error::Domain(format!("coset bound must be at least 1, got {h}")));
    }
    let f = g.field;
    let bx = g.ring_box(h);
    let mut rows = Vec::new();
    for &c in &bx {
        for &d in &bx {
            if (c, d) == canonical_row(c, d, f) && !(c.is_zero() && d.is_zero()) {
                if let Some(m) = complete_row(c, d, f) {
                    rows.push(m);
                }
            }
        }
    }
    rows.sort_by_key(|m| (m.c.height().max(m.d.height()), m.c, m.d));
    Ok(rows)
}

/// Pairs `(c, d)` with `c ≠ 0` of height at most `h` up to units and `d`
/// modulo `c`, representing `Γ_∞\Γ/Γ'_∞` without the identity double coset.
fn double_cosets(g: &BianchiGroup, h: i64) -> Vec<IntMat> {
    let f = g.field;
    let mut out = Vec::new();
    for c in g.ring_box(h) {
        if c.is_zero() || canonical_row(c, OElt::ZERO, f).0 != c {
            continue;
        }
        let n = c.norm(f);
        let reach = 2 * c.height() + 1;
        let mut residues: Vec<OElt> = Vec::new();
        for d in g.ring_box(reach) {
            if residues.len() as i64 == n {
                break;
            }
            if !residues.iter().any(|r| c.divides(d.sub(*r), f)) {
                residues.push(d);
            }
        }
        debug_assert_eq!(residues.len() as i64, n);
        out.extend(residues.into_iter().filter_map(|d| complete_row(c, d, f)));
    }
    out
}

/// A prepared truncated Eisenstein series that can be sampled repeatedly.
#[derive(Debug, Clone)]
pub struct EisensteinSeries {
    pub field: Field,
    pub s: Complex64,
    pub coset_bound: i64,
    pub truncation: Truncation,
    v: Vec<Complex64>,
    /// Direct: `(c, d, χ(M)* v, shell)` per coset.
    terms: Vec<(Complex64, Complex64, Vec<Complex64>, bool)>,
    /// Periodized: `(μ, |μ|, Σ χ(M)* v |c|^{-2-2s} e^{2πi⟨μ, d/c⟩})` per mode.
    modes: Vec<(Complex64, f64, Vec<Complex64>)>,
    lattice: Lattice,
}

fn check_singular(g: &BianchiGroup, chi: &CharacterSum, v: &[Complex64]) -> Result<()> {
    chi.check_field(g.field)?;
    if v.len() != chi.dim() {
        return Err(Error::Domain(format!("vector has {} components, representation {}", v.len(), chi.dim())));
    }
    let (e, r, s) = g.stabilizer_generators();
    for (c, x) in chi.summands.iter().zip(v) {
        let fixed = [&e, &r, &s].iter().all(|m| c.exponent(m, g.field) == 0);
        if !fixed && x.norm() > SINGULAR_TOL {
            return Err(Error::NotSingularVector);
        }
    }
    Ok(())
}

fn check_s(s: Complex64) -> Result<()> {
    if !(s.re > 1.0) {
        return Err(Error::Domain(format!("the Eisenstein series needs Re s > 1, got {s}")));
    }
    Ok(())
}

/// `χ(M)* v` for a diagonal representation.
fn apply_adjoint(chi: &CharacterSum, m: &IntMat, f: Field, v: &[Complex64]) -> Vec<Complex64> {
    chi.eigenvalues(m, f).iter().zip(v).map(|(x, y)| x.conj() * y).collect()
}

impl EisensteinSeries {
    /// Coset sum over bottom rows of height at most `h`.
    pub fn direct(g: &BianchiGroup, chi: &CharacterSum, v: &[Complex64], s: Complex64, h: i64) -> Result<Self> {
        check_s(s)?;
        check_singular(g, chi, v)?;
        let f = g.field;
        let terms = coset_representatives(g, h)?
            .into_iter()
            .map(|m| {
                let shell = m.c.height().max(m.d.height()) == h;
                (m.c.to_complex(f), m.d.to_complex(f), apply_adjoint(chi, &m, f, v), shell)
            })
            .collect();
        Ok(Self {
            field: f,
            s,
            coset_bound: h,
            truncation: Truncation::Direct,
            v: v.to_vec(),
            terms,
            modes: Vec::new(),
            lattice: g.cusp_lattice,
        })
    }

    /// Sum over bottom-left entries of height at most `h`, each summed over
    /// all `d` by Poisson summation, keeping Fourier modes with `|μ| ≤ mu_max`.
    /// Needs real `s` for the Bessel factors.
    pub fn periodized(
        g: &BianchiGroup,
        chi: &CharacterSum,
        v: &[Complex64],
        s: f64,
        h: i64,
        mu_max: f64,
    ) -> Result<Self> {
        check_s(Complex64::new(s, 0.0))?;
        check_singular(g, chi, v)?;
        if h < 1 {
            return Err(Error::Domain(format!("coset bound must be at least 1, got {h}")));
        }
        let f = g.field;
        let lat = g.cusp_lattice;
        let reach = (mu_max * 2.0).ceil() as i64 + 2;
        let mut mus: Vec<(Complex64, f64)> = Vec::new();
        for a in -reach..=reach {
            for b in -reach..=reach {
                let mu = lat.dual_point(a, b);
                if mu.norm() <= mu_max {
                    mus.push((mu, mu.norm()));
                }
            }
        }
        mus.sort_by(|p, q| p.1.total_cmp(&q.1).then(p.0.re.total_cmp(&q.0.re)).then(p.0.im.total_cmp(&q.0.im)));
        let cosets = double_cosets(g, h);
        let modes = mus
            .into_iter()
            .map(|(mu, norm)| {
                let mut acc = vec![Complex64::new(0.0, 0.0); v.len()];
                for m in &cosets {
                    let c = m.c.to_complex(f);
                    let w = m.d.to_complex(f) / c;
                    let scale = c.norm().powf(-2.0 - 2.0 * s);
                    let phase = Complex64::from_polar(scale, 2.0 * PI * inner(mu, w));
                    for (a, x) in acc.iter_mut().zip(apply_adjoint(chi, m, f, v)) {
                        *a += phase * x;
                    }
                }
                (mu, norm, acc)
            })
            .collect();
        Ok(Self {
            field: f,
            s: Complex64::new(s, 0.0),
            coset_bound: h,
            truncation: Truncation::Periodized,
            v: v.to_vec(),
            terms: Vec::new(),
            modes,
            lattice: lat,
        })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// Fourier transform of `x ↦ (r / (|x|² + r²))^{1+s}` on `R²` at `|μ|`.
    fn profile_transform(&self, mu: f64, r: f64) -> Result<f64> {
        let s = self.s.re;
        if mu == 0.0 {
            Ok(PI * r.powf(1.0 - s) / s)
        } else {
            Ok(2.0 * PI.powf(1.0 + s) * mu.powf(s) * r * bessel_k(s, 2.0 * PI * mu * r)? / gamma_real(1.0 + s))
        }
    }

    pub fn eval(&self, p: &PointH3) -> Result<EisensteinEval> {
        let one_s = Complex64::new(1.0, 0.0) + self.s;
        let mut value: Vec<Complex64> = self.v.iter().map(|x| x * Complex64::new(p.r, 0.0).powc(one_s)).collect();
        let mut tail = vec![Complex64::new(0.0, 0.0); self.dim()];
        let mut terms = 0;
        match self.truncation {
            Truncation::Direct => {
                for (c, d, w, shell) in &self.terms {
                    if *c == Complex64::new(0.0, 0.0) {
                        // identity coset, already included
                        continue;
                    }
                    let den = (c * p.z + d).norm_sqr() + c.norm_sqr() * p.r * p.r;
                    let t = Complex64::new(p.r / den, 0.0).powc(one_s);
                    for k in 0..value.len() {
                        value[k] += t * w[k];
                        if *shell {
                            tail[k] += t * w[k];
                        }
                    }
                    terms += 1;
                }
            }
            Truncation::Periodized => {
                let area = self.lattice.covolume;
                for (mu, norm, coef) in &self.modes {
                    let fhat = self.profile_transform(*norm, p.r)? / area;
                    let e = Complex64::from_polar(fhat, 2.0 * PI * inner(*mu, p.z));
                    for k in 0..value.len() {
                        value[k] += e * coef[k];
                    }
                    terms += 1;
                }
                // the outermost retained mode bounds the Fourier truncation
                if let Some((_, norm, coef)) = self.modes.last() {
                    let fhat = self.profile_transform(*norm, p.r)? / area;
                    for (t, c) in tail.iter_mut().zip(coef) {
                        *t = c * fhat;
                    }
                }
            }
        }
        Ok(EisensteinEval {
            value,
            s: self.s,
            coset_bound: self.coset_bound,
            tail_indicator: tail.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            terms,
        })
    }
}

/// `E(P, s, v)` summed over cosets with bottom row of height at most `h`.
pub fn eisenstein_direct(
    g: &BianchiGroup,
    chi: &CharacterSum,
    v: &[Complex64],
    p: &PointH3,
    s: Complex64,
    h: i64,
) -> Result<EisensteinEval> {
    EisensteinSeries::direct(g, chi, v, s, h)?.eval(p)
}

/// Sum over an explicit list of group elements, each coset counted once by
/// weighting every element with one over the number of listed elements
/// sharing its bottom row up to units.
pub fn eisenstein_from_elements(
    g: &BianchiGroup,
    chi: &CharacterSum,
    v: &[Complex64],
    p: &PointH3,
    s: Complex64,
    elements: &[IntMat],
) -> Result<Vec<Complex64>> {
    check_s(s)?;
    check_singular(g, chi, v)?;
    let f = g.field;
    let mut counts = std::collections::HashMap::new();
    for m in elements {
        *counts.entry(canonical_row(m.c, m.d, f)).or_insert(0usize) += 1;
    }
    let one_s = Complex64::new(1.0, 0.0) + s;
    let mut value = vec![Complex64::new(0.0, 0.0); v.len()];
    for m in elements {
        let (c, d) = (m.c.to_complex(f), m.d.to_complex(f));
        let den = (c * p.z + d).norm_sqr() + c.norm_sqr() * p.r * p.r;
        let w = 1.0 / counts[&canonical_row(m.c, m.d, f)] as f64;
        let t = Complex64::new(p.r / den, 0.0).powc(one_s) * w;
        for (a, x) in value.iter_mut().zip(apply_adjoint(chi, m, f, v)) {
            *a += t * x;
        }
    }
    Ok(value)
}

/// Relative residual `|Δ_h f - (1 - s²) f| / |f|` of the central-difference
/// Laplacian `-r²(∂²_x + ∂²_y + ∂²_r) + r ∂_r` at `p`.
pub fn laplace_eigen_check<F: Fn(&PointH3) -> Complex64>(f: F, s: Complex64, p: &PointH3, step: f64) -> Result<f64> {
    if !(step > 0.0) || step >= p.r {
        return Err(Error::Domain(format!("step must lie in (0, r), got {step}")));
    }
    let at = |dz: Complex64, dr: f64| f(&PointH3 { z: p.z + dz, r: p.r + dr });
    let f0 = at(Complex64::new(0.0, 0.0), 0.0);
    let h = step;
    let hx = Complex64::new(h, 0.0);
    let hy = Complex64::new(0.0, h);
    let zero = Complex64::new(0.0, 0.0);
    let fxx = (at(hx, 0.0) - 2.0 * f0 + at(-hx, 0.0)) / (h * h);
    let fyy = (at(hy, 0.0) - 2.0 * f0 + at(-hy, 0.0)) / (h * h);
    let frr = (at(zero, h) - 2.0 * f0 + at(zero, -h)) / (h * h);
    let fr = (at(zero, h) - at(zero, -h)) / (2.0 * h);
    let lap = -p.r * p.r * (fxx + fyy + frr) + p.r * fr;
    let lambda = Complex64::new(1.0, 0.0) - s * s;
    Ok((lap - lambda * f0).norm() / f0.norm())
}

/// `g_μ(r) = (1/|Λ|) ∫_𝒫 f(z + rj) e^{-2πi⟨μ,z⟩} dz` for `μ = aμ₁ + bμ₂`,
/// by the `n × n` trapezoid rule on the fundamental parallelogram.
pub fn fourier_coefficients<F: Fn(&PointH3) -> Complex64>(
    f: F,
    lat: &Lattice,
    r: f64,
    modes: &[(i64, i64)],
    n: usize,
) -> Result<Vec<Complex64>> {
    if n < 4 {
        return Err(Error::Domain(format!("need at least 4 nodes per side, got {n}")));
    }
    let pt = |t1: f64, t2: f64| PointH3 { z: lat.point(0, 0) + t1 + lat.tau * t2, r };
    let mut samples = vec![Complex64::new(0.0, 0.0); n * n];
    let mut scale: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = f(&pt(i as f64 / n as f64, j as f64 / n as f64));
            scale = scale.max(v.norm());
            samples[i * n + j] = v;
        }
    }
    let mut mismatch: f64 = 0.0;
    for k in 0..n {
        let t = k as f64 / n as f64;
        mismatch = mismatch.max((f(&pt(0.0, t)) - f(&pt(1.0, t))).norm());
        mismatch = mismatch.max((f(&pt(t, 0.0)) - f(&pt(t, 1.0))).norm());
    }
    let rel = mismatch / scale.max(f64::MIN_POSITIVE);
    if rel > PERIODICITY_TOL {
        return Err(Error::PeriodicityViolation(rel));
    }
    let w = 1.0 / (n * n) as f64;
    Ok(modes
        .iter()
        .map(|&(a, b)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    let ph = -2.0 * PI * (a as f64 * i as f64 + b as f64 * j as f64) / n as f64;
                    acc += samples[i * n + j] * Complex64::from_polar(1.0, ph);
                }
            }
            acc * w
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bianchi::{enumerate_elements, Character};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one() -> Vec<Complex64> {
        vec![c(1.0, 0.0)]
    }

    #[test]
    fn coset_rows_are_unimodular_and_distinct() {
        for g in [BianchiGroup::gaussian(), BianchiGroup::eisenstein()] {
            let reps = coset_representatives(&g, 3).unwrap();
            let mut rows: Vec<_> = reps.iter().map(|m| (m.c, m.d)).collect();
            assert!(reps.iter().all(|m| m.det(g.field) == OElt::ONE));
            rows.sort();
            rows.dedup();
            assert_eq!(rows.len(), reps.len());
        }
    }

    #[test]
    fn identity_coset_only() {
        // at r = 50 the non-identity cosets together stay below 1e-8 of r^{1+s}
        let g = BianchiGroup::gaussian();
        let p = PointH3::from_xyr(0.0, 0.0, 50.0).unwrap();
        let s = c(1.8, 0.0);
        let e = eisenstein_direct(&g, &CharacterSum::trivial(), &one(), &p, s, 1).unwrap();
        let lead = 50f64.powf(2.8);
        assert!((e.value[0].re / lead - 1.0).abs() < 1e-8);
    }

    #[test]
    fn leading_growth() {
        let g = BianchiGroup::gaussian();
        let p = PointH3::from_xyr(0.1, 0.3, 20.0).unwrap();
        let s = c(1.8, 0.0);
        for h in [4, 8] {
            let e = eisenstein_direct(&g, &CharacterSum::trivial(), &one(), &p, s, h).unwrap();
            assert!((e.value[0] / 20f64.powf(2.8) - 1.0).norm() < 1e-3);
        }
    }

    #[test]
    fn automorphy_under_generators() {
        let s = c(3.0, 0.5);
        for g in [BianchiGroup::gaussian(), BianchiGroup::eisenstein()] {
            let ser = EisensteinSeries::direct(&g, &CharacterSum::trivial(), &one(), s, 10).unwrap();
            let p = PointH3::from_xyr(0.13, 0.41, 0.93).unwrap();
            let base = ser.eval(&p).unwrap();
            let mut gens = g.generators();
            gens.push(gens[0].mul(&gens[2], g.field).mul(&gens[1], g.field));
            for gamma in gens {
                let q = crate::h3geom::apply(&gamma.to_moebius(g.field), &p);
                let moved = ser.eval(&q).unwrap();
                let tol = 20.0 * (base.tail_indicator + moved.tail_indicator);
                let err = (moved.value[0] - base.value[0]).norm();
                assert!(err <= tol, "d={} {gamma:?}: {err:.3e} > {tol:.3e}", g.d);
            }
        }
    }

    #[test]
    fn dedup_matches_weighted_raw_sum() {
        let g = BianchiGroup::gaussian();
        let elements = enumerate_elements(&g, 2).unwrap();
        let p = PointH3::from_xyr(0.2, -0.1, 1.1).unwrap();
        let s = c(2.2, 0.3);
        let raw = eisenstein_from_elements(&g, &CharacterSum::trivial(), &one(), &p, s, &elements).unwrap();
        let mut rows: Vec<IntMat> = Vec::new();
        for m in &elements {
            let key = canonical_row(m.c, m.d, g.field);
            if !rows.iter().any(|x| canonical_row(x.c, x.d, g.field) == key) {
                rows.push(*m);
            }
        }
        let dedup = eisenstein_from_elements(&g, &CharacterSum::trivial(), &one(), &p, s, &rows).unwrap();
        assert!((raw[0] - dedup[0]).norm() < 1e-9 * dedup[0].norm());
    }

    #[test]
    fn singular_vector_required() {
        let g = BianchiGroup::gaussian();
        let chi = CharacterSum { summands: vec![Character::Trivial, Character::SignModOnePlusI] };
        let p = PointH3::from_xyr(0.0, 0.0, 2.0).unwrap();
        let s = c(2.0, 0.0);
        let ok = eisenstein_direct(&g, &chi, &[c(1.0, 0.0), c(0.0, 0.0)], &p, s, 3).unwrap();
        assert_eq!(ok.value[1], c(0.0, 0.0));
        let bad = eisenstein_direct(&g, &chi, &[c(0.0, 0.0), c(1.0, 0.0)], &p, s, 3);
        assert!(matches!(bad, Err(Error::NotSingularVector)));
        assert!(eisenstein_direct(&g, &CharacterSum::trivial(), &one(), &p, c(1.0, 0.0), 3).is_err());
        // linear in v
        let a = eisenstein_direct(&g, &chi, &[c(2.0, -1.0), c(0.0, 0.0)], &p, s, 3).unwrap();
        assert!((a.value[0] - ok.value[0] * c(2.0, -1.0)).norm() < 1e-12 * a.value[0].norm());
    }

    #[test]
    fn power_function_is_eigenfunction() {
        let s = c(1.8, 0.0);
        let p = PointH3::from_xyr(0.0, 0.0, 2.0).unwrap();
        let res = laplace_eigen_check(|q: &PointH3| c(q.r, 0.0).powc(s + 1.0), s, &p, 1e-3).unwrap();
        assert!(res < 1e-6, "{res}");
        let res = laplace_eigen_check(|q: &PointH3| c(q.r * q.r, 0.0), s, &p, 1e-3).unwrap();
        assert!(res > 1.0);
    }

    #[test]
    fn bessel_mode_is_eigenfunction() {
        let s = 1.3;
        let mu = c(0.6, 0.8);
        let f = |q: &PointH3| {
            let k = bessel_k(s, 2.0 * PI * q.r).unwrap();
            Complex64::from_polar(q.r * k, 2.0 * PI * inner(mu, q.z))
        };
        let p = PointH3::from_xyr(0.3, 0.2, 0.7).unwrap();
        let res = laplace_eigen_check(f, c(s, 0.0), &p, 1e-3).unwrap();
        assert!(res < 1e-4, "{res}");
    }

    #[test]
    fn direct_sum_is_near_eigenfunction() {
        let g = BianchiGroup::gaussian();
        let s = c(1.8, 0.0);
        let ser = EisensteinSeries::direct(&g, &CharacterSum::trivial(), &one(), s, 6).unwrap();
        let p = PointH3::from_xyr(0.0, 0.0, 3.0).unwrap();
        let res = laplace_eigen_check(|q: &PointH3| ser.eval(q).unwrap().value[0], s, &p, 1e-3).unwrap();
        assert!(res < 1e-3, "{res}");
    }

    #[test]
    fn fourier_of_power_function() {
        let lat = Lattice::gaussian();
        let r: f64 = 1.5;
        let g = fourier_coefficients(|q: &PointH3| c(q.r.powf(2.8), 0.0), &lat, r, &[(0, 0), (1, 0), (1, 1)], 16).unwrap();
        assert!((g[0] - r.powf(2.8)).norm() < 1e-12);
        assert!(g[1].norm() < 1e-12 && g[2].norm() < 1e-12);
    }

    #[test]
    fn direct_truncation_is_not_periodic() {
        let g = BianchiGroup::gaussian();
        let ser = EisensteinSeries::direct(&g, &CharacterSum::trivial(), &one(), c(1.8, 0.0), 3).unwrap();
        let res = fourier_coefficients(|q: &PointH3| ser.eval(q).unwrap().value[0], &g.cusp_lattice, 0.8, &[(0, 0)], 8);
        assert!(matches!(res, Err(Error::PeriodicityViolation(_))));
    }

    /// Real-space sum over `Λ` with the continuum tail beyond radius `big`.
    fn real_space_profile(w: Complex64, r: f64, s: f64, lat: &Lattice, big: i64) -> f64 {
        let mut acc = 0.0;
        let radius = big as f64 * 0.5;
        for n in -big..=big {
            for m in -big..=big {
                let x = w + lat.point(n, m);
                if lat.point(n, m).norm() <= radius {
                    acc += (r / (x.norm_sqr() + r * r)).powf(1.0 + s);
                }
            }
        }
        acc + PI * r.powf(1.0 + s) / (s * lat.covolume) * (radius * radius + r * r).powf(-s)
    }

    #[test]
    fn periodized_matches_real_space_sum() {
        // one coset class c = 1 + i: compare the Poisson evaluation against the
        // lattice sum in real space for every residue d
        let g = BianchiGroup::gaussian();
        let s = 1.8;
        let ser = EisensteinSeries::periodized(&g, &CharacterSum::trivial(), &one(), s, 1, 8.0).unwrap();
        let p = PointH3::from_xyr(0.21, 0.37, 0.9).unwrap();
        let mut direct = p.r.powf(1.0 + s);
        for m in double_cosets(&g, 1) {
            let cc = m.c.to_complex(g.field);
            let w = p.z + m.d.to_complex(g.field) / cc;
            direct += cc.norm().powf(-2.0 - 2.0 * s) * real_space_profile(w, p.r, s, &g.cusp_lattice, 120);
        }
        let v = ser.eval(&p).unwrap().value[0];
        assert!((v.re - direct).abs() < 1e-7 * direct, "{} vs {direct}", v.re);
        assert!(v.im.abs() < 1e-10 * direct);
    }

    #[test]
    fn fourier_modes_follow_bessel_profile() {
        let g = BianchiGroup::gaussian();
        let s = 1.8;
        let ser = EisensteinSeries::periodized(&g, &CharacterSum::trivial(), &one(), s, 4, 6.0).unwrap();
        let sample = |q: &PointH3| ser.eval(q).unwrap().value[0];
        let modes = [(1, 0), (1, 1), (2, 0)];
        let (r1, r2) = (1.0, 1.5);
        let g1 = fourier_coefficients(sample, &g.cusp_lattice, r1, &modes, 24).unwrap();
        let g2 = fourier_coefficients(sample, &g.cusp_lattice, r2, &modes, 24).unwrap();
        for (k, &(a, b)) in modes.iter().enumerate() {
            let mu = g.cusp_lattice.dual_point(a, b).norm();
            let expect = r1 * bessel_k(s, 2.0 * PI * mu * r1).unwrap() / (r2 * bessel_k(s, 2.0 * PI * mu * r2).unwrap());
            let got = g1[k] / g2[k];
            assert!((got - expect).norm() < 1e-3 * expect, "mode {a},{b}: {got} vs {expect}");
        }
        // decay from r = 2 to r = 4 against the leading K_s asymptotics
        let g2 = fourier_coefficients(sample, &g.cusp_lattice, 2.0, &modes[..1], 24).unwrap();
        let g4 = fourier_coefficients(sample, &g.cusp_lattice, 4.0, &modes[..1], 24).unwrap();
        let x = |r: f64| 2.0 * PI * r;
        let asym = |r: f64| r * (PI / (2.0 * x(r))).sqrt() * (-x(r)).exp();
        let pred = asym(4.0) / asym(2.0);
        let ratio = g4[0].norm() / g2[0].norm();
        assert!((ratio / pred - 1.0).abs() < 0.2, "{ratio} vs {pred}");
    }
}
