//! Exact arithmetic in `O_d = Z[ω]` for `d ∈ {1, 3}` and in `SL(2, O_d)`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::h3geom::{ElementClass, MoebiusElt};

/// The two imaginary quadratic rings with class number one handled here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    /// `Z[i]`, `ω = i`, `ω² = -1`.
    Gaussian,
    /// `Z[ω]`, `ω = -1/2 + i√3/2`, `ω² = -1 - ω`.
    Eisenstein,
}

impl Field {
    pub fn from_d(d: u32) -> Option<Self> {
        match d {
            1 => Some(Self::Gaussian),
            3 => Some(Self::Eisenstein),
            _ => None,
        }
    }

    pub fn d(self) -> u32 {
        match self {
            Self::Gaussian => 1,
            Self::Eisenstein => 3,
        }
    }

    /// `ω` as a complex number.
    pub fn omega(self) -> Complex64 {
        match self {
            Self::Gaussian => Complex64::new(0.0, 1.0),
            Self::Eisenstein => Complex64::new(-0.5, 0.75f64.sqrt()),
        }
    }

    /// All units of `O_d`.
    pub fn units(self) -> Vec<OElt> {
        match self {
            Self::Gaussian => vec![OElt::new(1, 0), OElt::new(0, 1), OElt::new(-1, 0), OElt::new(0, -1)],
            Self::Eisenstein => vec![
                OElt::new(1, 0),
                OElt::new(1, 1),
                OElt::new(0, 1),
                OElt::new(-1, 0),
                OElt::new(-1, -1),
                OElt::new(0, -1),
            ],
        }
    }
}

/// The element `x + y ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OElt {
    pub x: i64,
    pub y: i64,
}

impl fmt::Display for OElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.x, self.y) {
            (x, 0) => write!(f, "{x}"),
            (0, y) => write!(f, "{y}w"),
            (x, y) if y < 0 => write!(f, "{x}{y}w"),
            (x, y) => write!(f, "{x}+{y}w"),
        }
    }
}

impl OElt {
    pub const ZERO: Self = Self { x: 0, y: 0 };
    pub const ONE: Self = Self { x: 1, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// `max(|x|, |y|)`.
    pub fn height(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }

    /// Sign normalization: `(x, y) > (0, 0)` lexicographically.
    pub fn is_positive(self) -> bool {
        self.x > 0 || (self.x == 0 && self.y > 0)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }

    pub fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }

    pub fn mul(self, o: Self, f: Field) -> Self {
        let xx = self.x * o.x;
        let xy = self.x * o.y + self.y * o.x;
        let yy = self.y * o.y;
        match f {
            Field::Gaussian => Self::new(xx - yy, xy),
            Field::Eisenstein => Self::new(xx - yy, xy - yy),
        }
    }

    /// Complex conjugate, again in `O_d`.
    pub fn conj(self, f: Field) -> Self {
        match f {
            Field::Gaussian => Self::new(self.x, -self.y),
            Field::Eisenstein => Self::new(self.x - self.y, -self.y),
        }
    }

    /// Field norm `|x + yω|²`.
    pub fn norm(self, f: Field) -> i64 {
        match f {
            Field::Gaussian => self.x * self.x + self.y * self.y,
            Field::Eisenstein => self.x * self.x - self.x * self.y + self.y * self.y,
        }
    }

    /// Exact quotient `self / o` if it lies in `O_d`.
    pub fn div_exact(self, o: Self, f: Field) -> Option<Self> {
        let n = o.norm(f);
        if n == 0 {
            return None;
        }
        let p = self.mul(o.conj(f), f);
        if p.x % n == 0 && p.y % n == 0 {
            Some(Self::new(p.x / n, p.y / n))
        } else {
            None
        }
    }

    /// Quotient `q` with `N(self - q·o) < N(o)`, rounding each coordinate of
    /// `self / o` to the nearest integer (both rings are norm-Euclidean).
    pub fn div_round(self, o: Self, f: Field) -> Option<Self> {
        let n = o.norm(f);
        if n == 0 {
            return None;
        }
        let p = self.mul(o.conj(f), f);
        let round = |a: i64| (2 * a + n).div_euclid(2 * n);
        Some(Self::new(round(p.x), round(p.y)))
    }

    /// `(g, u, v)` with `g = u·self + v·o` a greatest common divisor.
    pub fn xgcd(self, o: Self, f: Field) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self, o);
        let (mut u0, mut u1) = (Self::ONE, Self::ZERO);
        let (mut v0, mut v1) = (Self::ZERO, Self::ONE);
        while let Some(q) = r0.div_round(r1, f) {
            let r2 = r0.sub(q.mul(r1, f));
            let u2 = u0.sub(q.mul(u1, f));
            let v2 = v0.sub(q.mul(v1, f));
            (r0, r1, u0, u1, v0, v1) = (r1, r2, u1, u2, v1, v2);
        }
        (r0, u0, v0)
    }

    pub fn divides(self, o: Self, f: Field) -> bool {
        if self.is_zero() {
            return o.is_zero();
        }
        o.div_exact(self, f).is_some()
    }

    pub fn is_unit(self, f: Field) -> bool {
        self.norm(f) == 1
    }

    pub fn to_complex(self, f: Field) -> Complex64 {
        Complex64::new(self.x as f64, 0.0) + f.omega() * self.y as f64
    }

    /// Rational integer if `y = 0`.
    pub fn as_integer(self) -> Option<i64> {
        (self.y == 0).then_some(self.x)
    }
}

/// An element of `SL(2, O_d)` taken modulo sign, stored with canonical sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntMat {
    pub a: OElt,
    pub b: OElt,
    pub c: OElt,
    pub d: OElt,
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl IntMat {
    /// Builds the canonical representative of `±[[a, b], [c, d]]`.
    /// Callers guarantee `ad - bc = 1`.
    pub fn new(a: OElt, b: OElt, c: OElt, d: OElt) -> Self {
        let lead = [a, b, c, d].into_iter().find(|e| !e.is_zero());
        if matches!(lead, Some(e) if !e.is_positive()) {
            Self { a: a.neg(), b: b.neg(), c: c.neg(), d: d.neg() }
        } else {
            Self { a, b, c, d }
        }
    }

    /// Like [`IntMat::new`] but checks the determinant.
    pub fn checked(a: OElt, b: OElt, c: OElt, d: OElt, f: Field) -> Option<Self> {
        let m = Self { a, b, c, d };
        (m.det(f) == OElt::ONE).then(|| Self::new(a, b, c, d))
    }

    pub fn identity() -> Self {
        Self::new(OElt::ONE, OElt::ZERO, OElt::ZERO, OElt::ONE)
    }

    /// `[[1, β], [0, 1]]`.
    pub fn translation(beta: OElt) -> Self {
        Self::new(OElt::ONE, beta, OElt::ZERO, OElt::ONE)
    }

    /// `diag(u, u⁻¹)` for a unit `u`.
    pub fn diagonal(u: OElt, f: Field) -> Self {
        let inv = OElt::ONE.div_exact(u, f).expect("diagonal entry must be a unit");
        Self::new(u, OElt::ZERO, OElt::ZERO, inv)
    }

    /// `[[0, -1], [1, 0]]`.
    pub fn inversion() -> Self {
        Self::new(OElt::ZERO, OElt::new(-1, 0), OElt::ONE, OElt::ZERO)
    }

    pub fn entries(&self) -> [OElt; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn height(&self) -> i64 {
        self.entries().iter().map(|e| e.height()).max().unwrap_or(0)
    }

    pub fn det(&self, f: Field) -> OElt {
        self.a.mul(self.d, f).sub(self.b.mul(self.c, f))
    }

    pub fn trace(&self) -> OElt {
        self.a.add(self.d)
    }

    pub fn mul(&self, o: &Self, f: Field) -> Self {
        Self::new(
            self.a.mul(o.a, f).add(self.b.mul(o.c, f)),
            self.a.mul(o.b, f).add(self.b.mul(o.d, f)),
            self.c.mul(o.a, f).add(self.d.mul(o.c, f)),
            self.c.mul(o.b, f).add(self.d.mul(o.d, f)),
        )
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.d, self.b.neg(), self.c.neg(), self.a)
    }

    /// `g · self · g⁻¹`.
    pub fn conjugate_by(&self, g: &Self, f: Field) -> Self {
        g.mul(self, f).mul(&g.inverse(), f)
    }

    /// `self` and `o` commute in `PSL(2, O_d)`, i.e. `xy = ±yx` in `SL(2, O_d)`.
    pub fn commutes_with(&self, o: &Self, f: Field) -> bool {
        self.mul(o, f) == o.mul(self, f)
    }

    /// `xy = yx` in `SL(2, O_d)`. For non-parabolic `self` this holds exactly
    /// when `o` fixes both fixed points of `self`; `xy = -yx` instead means
    /// that `o` swaps them.
    pub fn commutes_in_sl2(&self, o: &Self, f: Field) -> bool {
        let raw = |x: &Self, y: &Self| {
            [
                x.a.mul(y.a, f).add(x.b.mul(y.c, f)),
                x.a.mul(y.b, f).add(x.b.mul(y.d, f)),
                x.c.mul(y.a, f).add(x.d.mul(y.c, f)),
                x.c.mul(y.b, f).add(x.d.mul(y.d, f)),
            ]
        };
        raw(self, o) == raw(o, self)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Exact classification from the trace: elliptic iff the trace is a
    /// rational integer of absolute value below 2, parabolic iff `tr = ±2`.
    pub fn classify(&self) -> ElementClass {
        if self.is_identity() {
            return ElementClass::Identity;
        }
        match self.trace().as_integer() {
            Some(2) | Some(-2) => ElementClass::Parabolic,
            Some(t) if t.abs() < 2 => ElementClass::Elliptic,
            _ => ElementClass::Loxodromic,
        }
    }

    pub fn to_moebius(&self, f: Field) -> MoebiusElt {
        let [a, b, c, d] = self.entries().map(|e| e.to_complex(f));
        MoebiusElt::new(a, b, c, d).expect("unimodular integer matrix")
    }

    /// Entries as integer pairs `[[ax, ay], [bx, by], ...]` for serialization.
    pub fn to_pairs(&self) -> [[i64; 2]; 4] {
        self.entries().map(|e| [e.x, e.y])
    }

    /// Sort key: height first, then entries lexicographically.
    pub fn order_key(&self) -> (i64, [OElt; 4]) {
        (self.height(), self.entries())
    }
}
