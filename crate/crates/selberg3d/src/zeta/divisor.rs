//! Topological residues of the zeta function for stabilizer index 1, 2, 3.

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for reading `tr 𝔖(0)` as an integer.
pub const TRACE_INTEGRALITY_TOL: f64 = 1e-9;

/// Externally supplied scattering data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringInput {
    /// `tr 𝔖(0)`.
    pub tr_s0: f64,
    pub notes: String,
}

impl ScatteringInput {
    pub fn new(tr_s0: f64, notes: impl Into<String>) -> Self {
        Self { tr_s0, notes: notes.into() }
    }

    /// `(tr 𝔖(0) - k)/2`, required to be an integer: `𝔖(0)` is a unitary
    /// involution of size `k`, so its trace is a sum of `k` signs.
    pub fn half_excess(&self, k_inf: u32) -> Result<i64> {
        let r = self.tr_s0.round();
        if (self.tr_s0 - r).abs() > TRACE_INTEGRALITY_TOL {
            return Err(Error::Domain(format!("tr 𝔖(0) = {} is not an integer", self.tr_s0)));
        }
        let tr = r as i64;
        let k = k_inf as i64;
        if tr.abs() > k || (tr - k) % 2 != 0 {
            return Err(Error::Domain(format!("tr 𝔖(0) = {tr} is not a sum of {k} signs")));
        }
        Ok((tr - k) / 2)
    }
}

/// Location of a topological pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleLocation {
    /// `s = n` with `n ≤ -1`.
    Negative(i64),
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisorEntry {
    pub location: PoleLocation,
    pub residue: Rational64,
}

/// Residues of the topological terms at `s = -1, …, n_min` and `s = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisorTable {
    pub case_index: u32,
    pub k_inf: u32,
    pub l_inf: u32,
    pub entries: Vec<DivisorEntry>,
}

impl DivisorTable {
    pub fn residue_at(&self, loc: PoleLocation) -> Option<Rational64> {
        self.entries.iter().find(|e| e.location == loc).map(|e| e.residue)
    }

    /// Least `N ≥ 1` with every `N · residue` an integer.
    pub fn minimal_root_order(&self) -> i64 {
        self.entries.iter().fold(1, |acc, e| acc.lcm(e.residue.denom()))
    }
}

/// Residue at `s = n ≤ -1` for the given stabilizer index.
pub fn negative_residue(case_index: u32, k_inf: u32, l_inf: u32, n: i64) -> Result<Rational64> {
    let (k, l) = (Rational64::from(k_inf as i64), Rational64::from(l_inf as i64));
    match case_index {
        1 => Ok(k),
        2 => Ok(if n.rem_euclid(2) == 1 { k } else { l - k }),
        3 => Ok(if n.rem_euclid(3) == 0 {
            Rational64::new(2, 3) * l - k
        } else {
            Rational64::new(1, 6) * l + Rational64::new(1, 2) * k
        }),
        4 | 6 => Err(Error::NotImplemented(format!("residues for stabilizer index {case_index}"))),
        other => Err(Error::CaseUnsupported(other)),
    }
}

/// The divisor table for stabilizer index `case_index`.
pub fn residue_table(
    case_index: u32,
    k_inf: u32,
    l_inf: u32,
    scat: &ScatteringInput,
    n_min: i64,
) -> Result<DivisorTable> {
    negative_residue(case_index, k_inf, l_inf, -1)?;
    if l_inf < k_inf {
        return Err(Error::Domain(format!("l_inf = {l_inf} is below k_inf = {k_inf}")));
    }
    if case_index == 1 && l_inf != k_inf {
        return Err(Error::Domain("stabilizer index 1 forces l_inf = k_inf".into()));
    }
    if n_min > -1 {
        return Err(Error::Domain(format!("n_min must be at most -1, got {n_min}")));
    }
    let mut entries = Vec::with_capacity((-n_min) as usize + 1);
    for n in (n_min..=-1).rev() {
        entries.push(DivisorEntry { location: PoleLocation::Negative(n), residue: negative_residue(case_index, k_inf, l_inf, n)? });
    }
    entries.push(DivisorEntry { location: PoleLocation::Zero, residue: Rational64::from(scat.half_excess(k_inf)?) });
    Ok(DivisorTable { case_index, k_inf, l_inf, entries })
}
