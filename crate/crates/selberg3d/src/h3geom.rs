//! Hyperbolic 3-space in upper half-space coordinates.
//!
//! A point is `z + r j` with `z` complex and `r > 0`. Elements of
//! `PSL(2, C)` act by the quaternionic Möbius formula; the point-pair
//! invariant `delta` is the hyperbolic cosine of the distance.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the sign-invariant realness test of the trace.
const TRACE_REAL_TOL: f64 = 1e-10;
/// Tolerance for the determinant of user-supplied matrices.
const DET_TOL: f64 = 1e-12;

/// A point `z + r j` of upper half-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointH3 {
    pub z: Complex64,
    pub r: f64,
}

impl PointH3 {
    /// Builds a point, rejecting non-positive or non-finite heights.
    pub fn new(z: Complex64, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(format!("height must be positive and finite, got {r}")));
        }
        Ok(Self { z, r })
    }

    /// Point from real coordinates `(x, y, r)`.
    pub fn from_xyr(x: f64, y: f64, r: f64) -> Result<Self> {
        Self::new(Complex64::new(x, y), r)
    }
}

/// Classification tag of an element of `PSL(2, C)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementClass {
    Identity,
    Parabolic,
    Elliptic,
    Loxodromic,
}

/// A unimodular complex 2x2 matrix modulo sign.
///
/// The stored representative is canonical: the first non-zero entry among
/// `a, b, c, d` has argument in `(-pi/2, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusElt {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

fn sign_is_canonical(x: Complex64) -> bool {
    x.re > 0.0 || (x.re == 0.0 && x.im > 0.0)
}

impl MoebiusElt {
    /// Builds an element, rescaling by `sqrt(det)` so that `ad - bc = 1`.
    ///
    /// Fails if the determinant vanishes or entries are not finite.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.norm() > 0.0) || !det.re.is_finite() || !det.im.is_finite() {
            return Err(Error::Domain("singular or non-finite matrix".into()));
        }
        let s = det.sqrt().inv();
        Ok(Self::from_unimodular(a * s, b * s, c * s, d * s))
    }

    /// Builds an element from entries already satisfying `ad - bc = 1`.
    ///
    /// Fails if the determinant differs from one by more than `1e-12`.
    pub fn checked(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).norm() > DET_TOL * (1.0 + a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr()) {
            return Err(Error::Domain(format!("determinant {det} is not 1")));
        }
        Self::new(a, b, c, d)
    }

    /// Canonicalizes the sign without touching the determinant.
    pub(crate) fn from_unimodular(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        let lead = [a, b, c, d].into_iter().find(|x| *x != Complex64::new(0.0, 0.0));
        let flip = matches!(lead, Some(x) if !sign_is_canonical(x));
        if flip {
            Self { a: -a, b: -b, c: -c, d: -d }
        } else {
            Self { a, b, c, d }
        }
    }

    /// Element with real entries.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_unimodular(1.0.into(), 0.0.into(), 0.0.into(), 1.0.into())
    }

    /// Translation `z -> z + b`.
    pub fn translation(b: Complex64) -> Self {
        Self::from_unimodular(1.0.into(), b, 0.0.into(), 1.0.into())
    }

    /// Diagonal element `diag(a, 1/a)`.
    pub fn diagonal(a: Complex64) -> Result<Self> {
        Self::new(a, 0.0.into(), 0.0.into(), a.inv())
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::from_unimodular(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn inverse(&self) -> Self {
        Self::from_unimodular(self.d, -self.b, -self.c, self.a)
    }

    /// `g self g^{-1}`.
    pub fn conjugate_by(&self, g: &Self) -> Self {
        g.mul(self).mul(&g.inverse())
    }

    /// Entrywise comparison modulo sign.
    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        let same = [(self.a, o.a), (self.b, o.b), (self.c, o.c), (self.d, o.d)];
        same.iter().all(|(x, y)| (x - y).norm() <= tol) || same.iter().all(|(x, y)| (x + y).norm() <= tol)
    }

    /// Action on a point of upper half-space.
    pub fn apply(&self, p: &PointH3) -> PointH3 {
        apply(self, p)
    }
}

/// Möbius action `M(z + r j) = w + t j`.
pub fn apply(m: &MoebiusElt, p: &PointH3) -> PointH3 {
    let MoebiusElt { a, b, c, d } = *m;
    let cz_d = c * p.z + d;
    let r2 = p.r * p.r;
    let den = cz_d.norm_sqr() + c.norm_sqr() * r2;
    let w = ((a * p.z + b) * cz_d.conj() + a * c.conj() * r2) / den;
    PointH3 { z: w, r: p.r / den }
}

/// Point-pair invariant `(|z - z'|^2 + r^2 + r'^2) / (2 r r')`.
pub fn delta(p: &PointH3, q: &PointH3) -> f64 {
    ((p.z - q.z).norm_sqr() + p.r * p.r + q.r * q.r) / (2.0 * p.r * q.r)
}

/// Hyperbolic distance `acosh(delta)`.
pub fn distance(p: &PointH3, q: &PointH3) -> f64 {
    delta(p, q).max(1.0).acosh()
}

/// Classifies an element; the identity is tested before parabolicity.
pub fn classify(m: &MoebiusElt) -> ElementClass {
    let one = Complex64::new(1.0, 0.0);
    let scale = 1.0 + m.a.norm() + m.b.norm() + m.c.norm() + m.d.norm();
    let id_tol = TRACE_REAL_TOL * scale;
    let is_id = |s: f64| {
        (m.a - one * s).norm() <= id_tol
            && m.b.norm() <= id_tol
            && m.c.norm() <= id_tol
            && (m.d - one * s).norm() <= id_tol
    };
    if is_id(1.0) || is_id(-1.0) {
        return ElementClass::Identity;
    }
    let tr = m.trace();
    let tr2 = tr * tr;
    let tol = TRACE_REAL_TOL * (1.0 + tr.norm_sqr());
    let real_trace = tr2.im.abs() <= tol && tr2.re >= -tol;
    if !real_trace {
        return ElementClass::Loxodromic;
    }
    if (tr2.re - 4.0).abs() <= tol {
        ElementClass::Parabolic
    } else if tr2.re < 4.0 {
        ElementClass::Elliptic
    } else {
        ElementClass::Loxodromic
    }
}

/// Eigenvalue `a` with `|a| > 1` of a loxodromic element and its norm `|a|^2`.
pub fn normalize_loxodromic(m: &MoebiusElt) -> Result<(Complex64, f64)> {
    if classify(m) != ElementClass::Loxodromic {
        return Err(Error::NotLoxodromic);
    }
    let a = dominant_eigenvalue(m.trace());
    Ok((a, a.norm_sqr()))
}

/// Root of `x^2 - tr x + 1` of larger modulus, computed without cancellation.
pub(crate) fn dominant_eigenvalue(tr: Complex64) -> Complex64 {
    let disc = (tr * tr - 4.0).sqrt();
    let p = (tr + disc) * 0.5;
    let q = (tr - disc) * 0.5;
    if p.norm() >= q.norm() {
        p
    } else {
        q
    }
}

/// Matrix `P` of eigenvectors with `P^{-1} M P = diag(a, 1/a)`, where `a` is
/// the eigenvalue returned by [`normalize_loxodromic`].
pub fn loxodromic_eigenbasis(m: &MoebiusElt) -> Result<(Complex64, MoebiusElt)> {
    let (a, _) = normalize_loxodromic(m)?;
    let v1 = eigenvector(m, a);
    let v2 = eigenvector(m, a.inv());
    let p = MoebiusElt::new(v1.0, v2.0, v1.1, v2.1)?;
    Ok((a, p))
}

fn eigenvector(m: &MoebiusElt, lam: Complex64) -> (Complex64, Complex64) {
    let u = (m.b, lam - m.a);
    let w = (lam - m.d, m.c);
    if u.0.norm_sqr() + u.1.norm_sqr() >= w.0.norm_sqr() + w.1.norm_sqr() {
        u
    } else {
        w
    }
}

/// The resolvent point-pair function `(t + sqrt(t^2-1))^{-s} / sqrt(t^2-1)`.
pub fn phi_s(t: f64, s: Complex64) -> Result<Complex64> {
    if !(t > 1.0) {
        return Err(Error::Domain(format!("phi_s requires t > 1, got {t}")));
    }
    let root = ((t - 1.0) * (t + 1.0)).sqrt();
    let base = (t + root).ln();
    Ok((-s * base).exp() / root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(x: f64, y: f64, r: f64) -> PointH3 {
        PointH3::from_xyr(x, y, r).unwrap()
    }

    /// Fixed-point count and multiplier of `z -> (az+b)/(cz+d)` on the sphere.
    pub(crate) fn fixed_point_oracle(m: &MoebiusElt) -> ElementClass {
        let tol = 1e-9;
        let MoebiusElt { a, b, c, d } = *m;
        let fixed: Vec<Option<Complex64>> = if c.norm() <= tol {
            // infinity is fixed; finite fixed point solves (a-d) z = -b.
            if (a - d).norm() <= tol {
                if b.norm() <= tol {
                    return ElementClass::Identity;
                }
                vec![None]
            } else {
                vec![None, Some(b / (d - a))]
            }
        } else {
            let disc = ((d - a) * (d - a) + 4.0 * b * c).sqrt();
            if disc.norm() <= tol {
                vec![Some((a - d) / (2.0 * c))]
            } else {
                vec![Some((a - d + disc) / (2.0 * c)), Some((a - d - disc) / (2.0 * c))]
            }
        };
        if fixed.len() == 1 {
            return ElementClass::Parabolic;
        }
        let mult = match fixed[0] {
            None => a * a,
            Some(f) => (c * f + d).powi(-2),
        };
        if (mult.norm() - 1.0).abs() <= 1e-9 {
            ElementClass::Elliptic
        } else {
            ElementClass::Loxodromic
        }
    }

    #[test]
    fn apply_identity_and_translation() {
        let p = pt(1.0, 2.0, 3.0);
        assert_eq!(apply(&MoebiusElt::identity(), &p), p);
        let q = apply(&MoebiusElt::translation(c(0.5, -1.0)), &p);
        assert_relative_eq!(q.z.re, 1.5);
        assert_relative_eq!(q.z.im, 1.0);
        assert_relative_eq!(q.r, 3.0);
    }

    #[test]
    fn apply_diagonal_scales_by_four() {
        let m = MoebiusElt::real(2.0, 0.0, 0.0, 0.5).unwrap();
        let q = apply(&m, &pt(0.3, -0.2, 1.5));
        assert_relative_eq!(q.z.re, 1.2, epsilon = 1e-14);
        assert_relative_eq!(q.z.im, -0.8, epsilon = 1e-14);
        assert_relative_eq!(q.r, 6.0, epsilon = 1e-14);
    }

    #[test]
    fn delta_hand_values() {
        let p = pt(0.0, 0.0, 1.0);
        assert_eq!(delta(&p, &p), 1.0);
        assert_relative_eq!(delta(&p, &pt(0.0, 0.0, 2.0)), 1.25);
        assert_relative_eq!(delta(&p, &pt(1.0, 0.0, 1.0)), 1.5);
        assert_eq!(distance(&p, &p), 0.0);
        assert_relative_eq!(distance(&p, &pt(0.0, 0.0, std::f64::consts::E)), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_nonpositive_height() {
        assert!(PointH3::from_xyr(0.0, 0.0, 0.0).is_err());
        assert!(PointH3::from_xyr(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&MoebiusElt::real(1.0, 1.0, 0.0, 1.0).unwrap()), ElementClass::Parabolic);
        assert_eq!(classify(&MoebiusElt::real(0.0, -1.0, 1.0, 0.0).unwrap()), ElementClass::Elliptic);
        assert_eq!(classify(&MoebiusElt::real(2.0, 0.0, 0.0, 0.5).unwrap()), ElementClass::Loxodromic);
        assert_eq!(classify(&MoebiusElt::real(-1.0, 0.0, 0.0, -1.0).unwrap()), ElementClass::Identity);
        // trace 2i: real square but negative
        let m = MoebiusElt::new(c(0.0, 1.0), 1.0.into(), c(-2.0, 0.0), c(0.0, 1.0)).unwrap();
        assert_relative_eq!(m.trace().im, 2.0, epsilon = 1e-15);
        assert_eq!(classify(&m), ElementClass::Loxodromic);
    }

    #[test]
    fn normalize_examples() {
        let (a, n) = normalize_loxodromic(&MoebiusElt::real(2.0, 0.0, 0.0, 0.5).unwrap()).unwrap();
        assert_relative_eq!(a.re.abs(), 2.0);
        assert_relative_eq!(n, 4.0);
        let (a, n) = normalize_loxodromic(&MoebiusElt::real(2.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        assert_relative_eq!(a.re, 2.618_033_988_749_895, epsilon = 1e-12);
        assert_relative_eq!(n, 6.854_101_966_249_685, epsilon = 1e-11);
        assert_eq!(
            normalize_loxodromic(&MoebiusElt::real(1.0, 1.0, 0.0, 1.0).unwrap()),
            Err(Error::NotLoxodromic)
        );
    }

    #[test]
    fn phi_s_examples() {
        let t = 1.0_f64.cosh();
        assert_relative_eq!(phi_s(t, 0.0.into()).unwrap().re, 1.0 / 1.0_f64.sinh(), epsilon = 1e-14);
        assert_relative_eq!(phi_s(1.25, 2.0.into()).unwrap().re, 1.0 / 3.0, epsilon = 1e-14);
        let v = phi_s(1.7, c(0.0, 2.3)).unwrap();
        assert_relative_eq!(v.norm(), 1.0 / (1.7f64 * 1.7 - 1.0).sqrt(), epsilon = 1e-14);
        assert!(phi_s(1.0, 1.0.into()).is_err());
    }

    #[test]
    fn canonical_sign_is_deterministic() {
        let m = MoebiusElt::real(-2.0, 0.0, 0.0, -0.5).unwrap();
        assert!(m.a.re > 0.0);
        let n = MoebiusElt::new(0.0.into(), c(0.0, -1.0), c(0.0, -1.0), 0.0.into()).unwrap();
        assert!(n.b.im > 0.0);
    }

    #[test]
    fn integer_elements_match_fixed_point_oracle() {
        let h = 3i64;
        let mut checked = 0;
        for a in -h..=h {
            for b in -h..=h {
                for cc in -h..=h {
                    for d in -h..=h {
                        if a * d - b * cc != 1 {
                            continue;
                        }
                        let m = MoebiusElt::real(a as f64, b as f64, cc as f64, d as f64).unwrap();
                        assert_eq!(classify(&m), fixed_point_oracle(&m), "{m:?}");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 100);
    }

    fn arb_complex() -> impl Strategy<Value = Complex64> {
        (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y)| c(x, y))
    }

    fn arb_moebius() -> impl Strategy<Value = MoebiusElt> {
        (arb_complex(), arb_complex(), arb_complex(), arb_complex())
            .prop_filter_map("well-conditioned", |(a, b, cc, d)| {
                let det = a * d - b * cc;
                if det.norm() < 0.2 {
                    return None;
                }
                MoebiusElt::new(a, b, cc, d).ok()
            })
    }

    fn arb_point() -> impl Strategy<Value = PointH3> {
        (-2.0f64..2.0, -2.0f64..2.0, 0.2f64..3.0).prop_map(|(x, y, r)| pt(x, y, r))
    }

    proptest! {
        #[test]
        fn delta_is_invariant(m in arb_moebius(), p in arb_point(), q in arb_point()) {
            let d0 = delta(&p, &q);
            let d1 = delta(&apply(&m, &p), &apply(&m, &q));
            prop_assert!((d0 - d1).abs() <= 1e-10 * d0.max(1.0));
            prop_assert!(d0 >= 1.0);
        }

        #[test]
        fn inverse_undoes_action(m in arb_moebius(), p in arb_point()) {
            let back = apply(&m.inverse(), &apply(&m, &p));
            prop_assert!((back.z - p.z).norm() <= 1e-10 * (1.0 + p.z.norm()));
            prop_assert!((back.r - p.r).abs() <= 1e-10 * p.r);
        }

        #[test]
        fn classification_is_conjugation_invariant(
            m in prop_oneof![
                Just(MoebiusElt::real(1.0, 1.0, 0.0, 1.0).unwrap()),
                Just(MoebiusElt::real(0.0, -1.0, 1.0, 0.0).unwrap()),
                Just(MoebiusElt::real(1.0, -1.0, 1.0, 0.0).unwrap()),
                Just(MoebiusElt::real(2.0, 1.0, 1.0, 1.0).unwrap()),
                Just(MoebiusElt::new(c(1.0, 1.0), 1.0.into(), c(0.0, 1.0), 1.0.into()).unwrap()),
            ],
            g in arb_moebius(),
        ) {
            prop_assert_eq!(classify(&m), classify(&m.conjugate_by(&g)));
        }

        #[test]
        fn eigenbasis_diagonalizes(m in arb_moebius()) {
            prop_assume!(classify(&m) == ElementClass::Loxodromic);
            let (a, p) = loxodromic_eigenbasis(&m).unwrap();
            prop_assert!((a * a.inv() - 1.0).norm() < 1e-14);
            let d = p.inverse().mul(&m).mul(&p);
            let target = MoebiusElt::diagonal(a).unwrap();
            prop_assert!(d.approx_eq(&target, 1e-8 * (1.0 + a.norm())), "{:?} vs {:?}", d, target);
        }
    }
}
