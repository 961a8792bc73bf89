//! Exact arithmetic in the cyclotomic field `Q(ζ₁₂)`, which contains `i`,
//! `ω = e^{2πi/3}` and every root of unity occurring in `PSL(2, O_d)`,
//! `d ∈ {1, 3}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::ring::{Field, OElt};
use crate::error::{Error, Result};

/// `c₀ + c₁ζ + c₂ζ² + c₃ζ³` with `ζ = e^{iπ/6}` and `ζ⁴ = ζ² - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cyclo12 {
    pub coeffs: [Rational64; 4],
}

impl fmt::Display for Cyclo12 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Cyclo12 {
    pub fn zero() -> Self {
        Self { coeffs: [Rational64::zero(); 4] }
    }

    pub fn one() -> Self {
        Self::rational(Rational64::one())
    }

    pub fn rational(q: Rational64) -> Self {
        let mut coeffs = [Rational64::zero(); 4];
        coeffs[0] = q;
        Self { coeffs }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(Rational64::from_integer(n))
    }

    /// `ζ₁₂^k`.
    pub fn root_of_unity(k: i64) -> Self {
        let k = k.rem_euclid(12) as usize;
        let (base, sign) = if k >= 6 { (k - 6, -1) } else { (k, 1) };
        let mut coeffs = [Rational64::zero(); 4];
        match base {
            0..=3 => coeffs[base] = Rational64::from_integer(sign),
            4 => {
                coeffs[2] = Rational64::from_integer(sign);
                coeffs[0] = Rational64::from_integer(-sign);
            }
            _ => {
                coeffs[3] = Rational64::from_integer(sign);
                coeffs[1] = Rational64::from_integer(-sign);
            }
        }
        Self { coeffs }
    }

    /// Image of `x + yω ∈ O_d`.
    pub fn from_oelt(e: OElt, f: Field) -> Self {
        let omega = match f {
            Field::Gaussian => Self::root_of_unity(3),
            Field::Eisenstein => Self::root_of_unity(4),
        };
        Self::integer(e.x) + omega * Self::integer(e.y)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The value as a rational number, if it is one.
    pub fn as_rational(&self) -> Option<Rational64> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then_some(self.coeffs[0])
    }

    pub fn scale(&self, q: Rational64) -> Self {
        Self { coeffs: self.coeffs.map(|c| c * q) }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.coeffs.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (k, c)| {
            let v = *c.numer() as f64 / *c.denom() as f64;
            acc + Complex64::from_polar(v, k as f64 * std::f64::consts::PI / 6.0)
        })
    }

    /// Identifies a complex number as a sum of at most `max_terms` twelfth
    /// roots of unity (the trace of a small unitary matrix of finite order).
    pub fn from_root_sum(z: Complex64, max_terms: usize, tol: f64) -> Result<Self> {
        // Greedy search over multisets is exponential; the traces we accept are
        // short sums, so a bounded depth-first search suffices.
        fn search(target: Complex64, left: usize, start: i64, tol: f64, acc: &mut Vec<i64>) -> bool {
            if target.norm() < tol {
                return true;
            }
            if left == 0 || target.norm() > left as f64 + tol {
                return false;
            }
            for k in start..12 {
                acc.push(k);
                let z = Complex64::from_polar(1.0, k as f64 * std::f64::consts::PI / 6.0);
                if search(target - z, left - 1, k, tol, acc) {
                    return true;
                }
                acc.pop();
            }
            false
        }
        let mut acc = Vec::new();
        if search(z, max_terms, 0, tol, &mut acc) {
            Ok(acc.into_iter().fold(Self::zero(), |s, k| s + Self::root_of_unity(k)))
        } else {
            Err(Error::InexactInput(format!("{z} is not a sum of at most {max_terms} twelfth roots of unity")))
        }
    }
}

impl Add for Cyclo12 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut coeffs = self.coeffs;
        for (c, d) in coeffs.iter_mut().zip(o.coeffs) {
            *c += d;
        }
        Self { coeffs }
    }
}

impl Sub for Cyclo12 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Cyclo12 {
    type Output = Self;
    fn neg(self) -> Self {
        Self { coeffs: self.coeffs.map(|c| -c) }
    }
}

impl Mul for Cyclo12 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut p = [Rational64::zero(); 7];
        for i in 0..4 {
            for j in 0..4 {
                p[i + j] += self.coeffs[i] * o.coeffs[j];
            }
        }
        // ζ⁶ = -1, ζ⁵ = ζ³ - ζ, ζ⁴ = ζ² - 1
        p[0] -= p[6];
        p[3] += p[5];
        p[1] -= p[5];
        p[2] += p[4];
        p[0] -= p[4];
        Self { coeffs: [p[0], p[1], p[2], p[3]] }
    }
}
