//! The Bianchi groups `PSL(2, O_d)` for `d ∈ {1, 3}`: enumeration of elements
//! by entry height, conjugacy classes found by bounded search, and the exact
//! cuspidal-elliptic identity.

mod character;
mod classes;
mod cyclo;
mod ring;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use character::{Character, CharacterSum};
pub use classes::{
    cuspidal_elliptic_classes, cuspidal_elliptic_classes_with, cusp_identity_residual, loxodromic_classes, nce_classes,
    verify_cusp_identity, ConjugacyWitness, CuspidalEllipticClass, LoxClass, LoxClassList, NceClass,
};
pub use cyclo::Cyclo12;
pub use ring::{Field, IntMat, OElt};

use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// Catalan's constant `L(2, χ₋₄)`.
pub const CATALAN: f64 = 0.915_965_594_177_219_015_054_603_514_932_384_1;
/// `L(2, χ₋₃)`.
pub const L2_CHI_MINUS3: f64 = 0.781_302_412_896_486_296_867_187_429_624_092_4;

/// Default cap on the number of enumerated elements.
pub const DEFAULT_ELEMENT_CAP: usize = 20_000_000;

/// `PSL(2, O_d)` with its cusp at `∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BianchiGroup {
    pub d: u32,
    pub field: Field,
    /// `(1, ω)` as complex numbers.
    pub ring_basis: (Complex64, Complex64),
    /// `Λ_∞ = O_d` as a lattice `Z ⊕ Zω`.
    pub cusp_lattice: Lattice,
    /// `[Γ_∞ : Γ'_∞]`, the number of units modulo `±1`.
    pub stabilizer_index: u32,
}

impl BianchiGroup {
    pub fn new(d: u32) -> Result<Self> {
        let field = Field::from_d(d).ok_or_else(|| Error::Domain(format!("only d = 1 and d = 3 are implemented, got {d}")))?;
        let omega = field.omega();
        let cusp_lattice = Lattice::new(omega)?;
        let stabilizer_index = (field.units().len() / 2) as u32;
        Ok(Self { d, field, ring_basis: (Complex64::new(1.0, 0.0), omega), cusp_lattice, stabilizer_index })
    }

    pub fn gaussian() -> Self {
        Self::new(1).expect("d = 1")
    }

    pub fn eisenstein() -> Self {
        Self::new(3).expect("d = 3")
    }

    /// The unit `ε` with `E = diag(ε, ε⁻¹)` generating `Γ_∞ / Γ'_∞`:
    /// `i` for `d = 1` and `1 + ω = e^{iπ/3}` for `d = 3`.
    pub fn torsion_unit(&self) -> OElt {
        match self.field {
            Field::Gaussian => OElt::new(0, 1),
            Field::Eisenstein => OElt::new(1, 1),
        }
    }

    /// Stabilizer generators `(E, R, S)`: the rotation `E` and the
    /// translations `R: z ↦ z + 1`, `S: z ↦ z + ω`.
    pub fn stabilizer_generators(&self) -> (IntMat, IntMat, IntMat) {
        (
            IntMat::diagonal(self.torsion_unit(), self.field),
            IntMat::translation(OElt::ONE),
            IntMat::translation(OElt::new(0, 1)),
        )
    }

    /// Generators `R, S, E` of `Γ_∞` together with the inversion `z ↦ -1/z`.
    pub fn generators(&self) -> Vec<IntMat> {
        let (e, r, s) = self.stabilizer_generators();
        vec![r, s, IntMat::inversion(), e]
    }

    /// Discriminant of `Q(√-d)`.
    pub fn discriminant(&self) -> i64 {
        match self.field {
            Field::Gaussian => -4,
            Field::Eisenstein => -3,
        }
    }

    /// `vol(PSL(2, O_d) \ H³) = |D|^{3/2} ζ_K(2) / (4π²)` with
    /// `ζ_K(2) = ζ(2) L(2, χ_D)`.
    pub fn covolume(&self) -> f64 {
        let l2 = match self.field {
            Field::Gaussian => CATALAN,
            Field::Eisenstein => L2_CHI_MINUS3,
        };
        let zeta_k = PI * PI / 6.0 * l2;
        (self.discriminant().abs() as f64).powf(1.5) * zeta_k / (4.0 * PI * PI)
    }

    /// Elements of `O_d` with height at most `h`, in `(height, x, y)` order.
    pub fn ring_box(&self, h: i64) -> Vec<OElt> {
        let mut v: Vec<OElt> = (-h..=h).flat_map(|x| (-h..=h).map(move |y| OElt::new(x, y))).collect();
        v.sort_by_key(|e| (e.height(), e.x, e.y));
        v
    }
}

/// All elements of `PSL(2, O_d)` with entry height at most `h`, one per sign
/// pair, sorted by height and then lexicographically by entries.
pub fn enumerate_elements(g: &BianchiGroup, h: i64) -> Result<Vec<IntMat>> {
    enumerate_elements_capped(g, h, DEFAULT_ELEMENT_CAP)
}

/// [`enumerate_elements`] failing with `BudgetExceeded` beyond `cap` elements.
pub fn enumerate_elements_capped(g: &BianchiGroup, h: i64, cap: usize) -> Result<Vec<IntMat>> {
    if h < 1 {
        return Err(Error::Domain(format!("height bound must be at least 1, got {h}")));
    }
    // Crude a-priori bound: a, b, c free and d determined.
    let side = (2 * h + 1) as f64;
    if side.powi(6) > 4e10 {
        return Err(Error::BudgetExceeded(format!("height {h} needs about {:.1e} candidate triples", side.powi(6))));
    }
    let f = g.field;
    let bx = g.ring_box(h);
    let units = f.units();
    // Only the canonical sign is generated: the leading non-zero entry is positive.
    let per_a: Vec<Vec<IntMat>> = bx
        .par_iter()
        .map(|&a| {
            let mut out = Vec::new();
            if a.is_zero() {
                for &b in &units {
                    if !b.is_positive() {
                        continue;
                    }
                    let c = OElt::ONE.div_exact(b, f).expect("unit").neg();
                    for &d in &bx {
                        out.push(IntMat { a, b, c, d });
                    }
                }
            } else if a.is_positive() {
                for &b in &bx {
                    for &c in &bx {
                        let num = OElt::ONE.add(b.mul(c, f));
                        if let Some(d) = num.div_exact(a, f) {
                            if d.height() <= h {
                                out.push(IntMat { a, b, c, d });
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    let total: usize = per_a.iter().map(Vec::len).sum();
    if total > cap {
        return Err(Error::BudgetExceeded(format!("{total} elements at height {h} exceed the cap {cap}")));
    }
    let mut all: Vec<IntMat> = per_a.into_iter().flatten().collect();
    all.sort_by_key(|m| m.order_key());
    Ok(all)
}
