//! One-dimensional characters of `PSL(2, O_d)` given by reduction modulo a
//! prime of small norm, and direct sums of them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cyclo::Cyclo12;
use super::ring::{Field, IntMat};
use crate::error::{Error, Result};

/// A character `PSL(2, O_d) → μ₁₂` with an explicit formula on matrix entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Character {
    Trivial,
    /// `d = 1`: reduction modulo `1 + i` onto `SL(2, F₂) ≅ S₃`, then the sign.
    SignModOnePlusI,
    /// `d = 3`: reduction modulo `1 - ω` onto `SL(2, F₃)`, then the quotient by
    /// its quaternion subgroup, `Z/3`, sending `[[1, 1], [0, 1]]` to `e^{2πi/3}`.
    CubicModOneMinusOmega,
}

type Mat2 = [[i64; 2]; 2];

fn mat_mul(p: i64, x: &Mat2, y: &Mat2) -> Mat2 {
    let mut r = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = (x[i][0] * y[0][j] + x[i][1] * y[1][j]).rem_euclid(p);
        }
    }
    r
}

const ID2: Mat2 = [[1, 0], [0, 1]];

impl Character {
    /// Characters available for the field.
    pub fn available(f: Field) -> Vec<Self> {
        match f {
            Field::Gaussian => vec![Self::Trivial, Self::SignModOnePlusI],
            Field::Eisenstein => vec![Self::Trivial, Self::CubicModOneMinusOmega],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Trivial => "trivial",
            Self::SignModOnePlusI => "sign_mod_1_plus_i",
            Self::CubicModOneMinusOmega => "cubic_mod_1_minus_omega",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(Self::Trivial),
            "sign_mod_1_plus_i" | "sign" => Ok(Self::SignModOnePlusI),
            "cubic_mod_1_minus_omega" | "cubic" => Ok(Self::CubicModOneMinusOmega),
            _ => Err(Error::Domain(format!("unknown character {s:?}"))),
        }
    }

    pub fn check_field(self, f: Field) -> Result<()> {
        match (self, f) {
            (Self::Trivial, _) | (Self::SignModOnePlusI, Field::Gaussian) | (Self::CubicModOneMinusOmega, Field::Eisenstein) => {
                Ok(())
            }
            _ => Err(Error::Domain(format!("character {} is not defined for d = {}", self.name(), f.d()))),
        }
    }

    /// `χ(M) = ζ₁₂^k`; returns `k mod 12`.
    pub fn exponent(self, m: &IntMat, f: Field) -> u32 {
        match self {
            Self::Trivial => 0,
            Self::SignModOnePlusI => {
                debug_assert_eq!(f, Field::Gaussian);
                // i ≡ 1 modulo 1 + i
                let r = m.entries().map(|e| (e.x + e.y).rem_euclid(2));
                let mm = [[r[0], r[1]], [r[2], r[3]]];
                // transpositions of S₃ are exactly the involutions
                if mm != ID2 && mat_mul(2, &mm, &mm) == ID2 {
                    6
                } else {
                    0
                }
            }
            Self::CubicModOneMinusOmega => {
                debug_assert_eq!(f, Field::Eisenstein);
                // ω ≡ 1 modulo 1 - ω
                let r = m.entries().map(|e| (e.x + e.y).rem_euclid(3));
                let mut g = [[r[0], r[1]], [r[2], r[3]]];
                let t_inv = [[1, 2], [0, 1]];
                for j in 0..3u32 {
                    let g2 = mat_mul(3, &g, &g);
                    if mat_mul(3, &g2, &g2) == ID2 {
                        return 4 * j;
                    }
                    g = mat_mul(3, &t_inv, &g);
                }
                unreachable!("SL(2, F3) is the union of three quaternion cosets")
            }
        }
    }

    pub fn value(self, m: &IntMat, f: Field) -> Cyclo12 {
        Cyclo12::root_of_unity(self.exponent(m, f) as i64)
    }

    pub fn value_complex(self, m: &IntMat, f: Field) -> Complex64 {
        Complex64::from_polar(1.0, self.exponent(m, f) as f64 * std::f64::consts::PI / 6.0)
    }
}

/// A unitary representation that is a direct sum of [`Character`]s.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterSum {
    pub summands: Vec<Character>,
}

impl CharacterSum {
    pub fn trivial() -> Self {
        Self { summands: vec![Character::Trivial] }
    }

    pub fn single(c: Character) -> Self {
        Self { summands: vec![c] }
    }

    pub fn dim(&self) -> usize {
        self.summands.len()
    }

    pub fn check_field(&self, f: Field) -> Result<()> {
        self.summands.iter().try_for_each(|c| c.check_field(f))
    }

    /// Exact trace `tr χ(M)`.
    pub fn trace(&self, m: &IntMat, f: Field) -> Cyclo12 {
        self.summands.iter().fold(Cyclo12::zero(), |s, c| s + c.value(m, f))
    }

    /// Diagonal entries of `χ(M)`.
    pub fn eigenvalues(&self, m: &IntMat, f: Field) -> Vec<Complex64> {
        self.summands.iter().map(|c| c.value_complex(m, f)).collect()
    }

    /// Diagonal entries of `χ(M)` as exponents of `ζ₁₂`.
    pub fn exponents(&self, m: &IntMat, f: Field) -> Vec<u32> {
        self.summands.iter().map(|c| c.exponent(m, f)).collect()
    }
}
