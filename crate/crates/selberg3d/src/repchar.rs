//! A finite-dimensional unitary representation restricted to the cusp
//! stabilizer `Γ_∞`: the singular, almost singular and regular parts and the
//! lattice characters of `Γ'_∞` it decomposes into.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bianchi::{BianchiGroup, CharacterSum, IntMat, OElt};
use crate::error::{Error, Result};
use crate::lattice::LatticeCharacter;

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for unitarity of the input matrices.
pub const UNITARY_TOL: f64 = 1e-12;
/// Tolerance for the stabilizer relations.
pub const RELATION_TOL: f64 = 1e-10;
/// `|λ - 1|` below which an eigenvalue counts as one.
pub const UNIT_EIGEN_TOL: f64 = 1e-9;

/// Images of the stabilizer generators `E, R, S` under a unitary representation.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryRepSpec {
    pub dim: usize,
    pub e: CMatrix,
    pub r: CMatrix,
    pub s: CMatrix,
    /// Images of further group generators, by label.
    pub extra: BTreeMap<String, CMatrix>,
}

/// Restriction data of a representation to `Γ_∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspRepData {
    pub dim: usize,
    /// `dim V_∞`, the degree of singularity.
    pub k_inf: usize,
    /// `dim V'_∞`.
    pub l_inf: usize,
    /// `[Γ_∞ : Γ'_∞]`.
    pub index: u32,
    /// Sizes of `(B_s, B_a, B_r)`.
    pub basis_partition: (usize, usize, usize),
    /// Eigenvalues of `χ(E)` on `B_a`.
    pub lambda_al: Vec<Complex64>,
    /// Phases `θ_R`, `θ_S` in `[0, 1)` on `B_r`.
    pub theta_r: Vec<f64>,
    pub theta_s: Vec<f64>,
    /// The `n` characters `ψ_l` with `tr χ|_{Γ'_∞} = Σ ψ_l`.
    pub parabolic_chars: Vec<LatticeCharacter>,
    /// `‖χ(E)P - Pχ(E)‖` for the projector `P` onto `V'_∞`.
    pub projector_residual: f64,
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn unitary_defect(m: &CMatrix) -> f64 {
    max_abs(&(m.adjoint() * m - CMatrix::identity(m.nrows(), m.ncols())))
}

/// `x^n` for a unitary `x` and any integer `n`.
fn upow(x: &CMatrix, n: i64) -> CMatrix {
    let base = if n < 0 { x.adjoint() } else { x.clone() };
    (0..n.unsigned_abs()).fold(CMatrix::identity(x.nrows(), x.ncols()), |acc, _| acc * &base)
}

/// Phase of a unit complex number in `[0, 1)`, snapping values within
/// `UNIT_EIGEN_TOL` of an integer to zero.
fn phase01(z: Complex64) -> f64 {
    let t = (z.arg() / (2.0 * PI)).rem_euclid(1.0);
    if t < UNIT_EIGEN_TOL || 1.0 - t < UNIT_EIGEN_TOL {
        0.0
    } else {
        t
    }
}

impl UnitaryRepSpec {
    pub fn new(e: CMatrix, r: CMatrix, s: CMatrix) -> Result<Self> {
        let dim = e.nrows();
        for (name, m) in [("E", &e), ("R", &r), ("S", &s)] {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Domain(format!("image of {name} is {}x{}, expected {dim}x{dim}", m.nrows(), m.ncols())));
            }
        }
        Ok(Self { dim, e, r, s, extra: BTreeMap::new() })
    }

    /// The diagonal representation given by a sum of characters.
    pub fn from_characters(g: &BianchiGroup, chi: &CharacterSum) -> Result<Self> {
        chi.check_field(g.field)?;
        let (e, r, s) = g.stabilizer_generators();
        let diag = |m: &IntMat| CMatrix::from_diagonal(&nalgebra::DVector::from_vec(chi.eigenvalues(m, g.field)));
        let mut spec = Self::new(diag(&e), diag(&r), diag(&s))?;
        spec.extra.insert("J".into(), diag(&IntMat::inversion()));
        Ok(spec)
    }

    /// `χ(T_β)` for `β = x + yω`.
    pub fn translation_image(&self, beta: OElt) -> CMatrix {
        upow(&self.r, beta.x) * upow(&self.s, beta.y)
    }

    /// Checks unitarity and the relations of `Γ_∞`:
    /// `[χ(R), χ(S)] = I`, `χ(E)^m = I` and `χ(E) χ(T_β) χ(E)⁻¹ = χ(T_{ε²β})`.
    pub fn validate(&self, g: &BianchiGroup) -> Result<()> {
        let mats = std::iter::once(("E", &self.e))
            .chain([("R", &self.r), ("S", &self.s)])
            .chain(self.extra.iter().map(|(k, v)| (k.as_str(), v)));
        for (name, m) in mats {
            let d = unitary_defect(m);
            if !(d <= UNITARY_TOL) {
                return Err(Error::NonUnitaryInput(format!("image of {name} has unitarity defect {d:.3e}")));
            }
        }
        let comm = max_abs(&(&self.r * &self.s - &self.s * &self.r));
        if comm > RELATION_TOL {
            return Err(Error::RelationViolation(format!("images of R and S do not commute ({comm:.3e})")));
        }
        let m = g.stabilizer_index as i64;
        let em = max_abs(&(upow(&self.e, m) - CMatrix::identity(self.dim, self.dim)));
        if em > RELATION_TOL {
            return Err(Error::RelationViolation(format!("image of E has E^{m} != I ({em:.3e})")));
        }
        let f = g.field;
        let eps = g.torsion_unit();
        let eps2 = eps.mul(eps, f);
        for (name, beta, img) in [("R", OElt::ONE, &self.r), ("S", OElt::new(0, 1), &self.s)] {
            let lhs = &self.e * img * self.e.adjoint();
            let rhs = self.translation_image(eps2.mul(beta, f));
            let d = max_abs(&(lhs - rhs));
            if d > RELATION_TOL {
                return Err(Error::RelationViolation(format!("E {name} E^-1 is not the expected translation ({d:.3e})")));
            }
        }
        Ok(())
    }
}

/// Orthonormal basis (as columns) of the joint kernel of `ms`.
fn joint_kernel(ms: &[CMatrix], n: usize) -> CMatrix {
    let rows = ms.len() * n;
    let mut stacked = CMatrix::zeros(rows, n);
    for (k, m) in ms.iter().enumerate() {
        stacked.view_mut((k * n, 0), (n, n)).copy_from(m);
    }
    // kernel of A = eigenvectors of A*A with eigenvalue ≈ 0
    let gram = stacked.adjoint() * &stacked;
    let (q, t) = Schur::new(gram).unpack();
    let cols: Vec<usize> = (0..n).filter(|&i| t[(i, i)].norm() < UNIT_EIGEN_TOL).collect();
    CMatrix::from_fn(n, cols.len(), |r, c| q[(r, cols[c])])
}

/// Orthonormal basis of the orthogonal complement of the columns of `q`.
fn complement(q: &CMatrix, n: usize) -> CMatrix {
    let proj = CMatrix::identity(n, n) - q * q.adjoint();
    let (v, t) = Schur::new(proj).unpack();
    let cols: Vec<usize> = (0..n).filter(|&i| (t[(i, i)] - 1.0).norm() < 1e-6).collect();
    CMatrix::from_fn(n, cols.len(), |r, c| v[(r, cols[c])])
}

/// Eigenvalues and orthonormal eigenvectors of a normal matrix.
fn normal_eigen(m: CMatrix) -> (Vec<Complex64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), m);
    }
    let (q, t) = Schur::new(m).unpack();
    ((0..n).map(|i| t[(i, i)]).collect(), q)
}

/// Splits `V` into `V_∞ ⊕ B_a ⊕ B_r` and reads off the eigen-data.
pub fn decompose_restriction(spec: &UnitaryRepSpec, g: &BianchiGroup) -> Result<CuspRepData> {
    spec.validate(g)?;
    let n = spec.dim;
    let id = CMatrix::identity(n, n);
    let fixed = joint_kernel(&[&spec.r - &id, &spec.s - &id], n);
    let l = fixed.ncols();
    let proj = &fixed * fixed.adjoint();
    let projector_residual = max_abs(&(&spec.e * &proj - &proj * &spec.e));
    let (lams, _) = normal_eigen(fixed.adjoint() * &spec.e * &fixed);
    let k = lams.iter().filter(|z| (*z - 1.0).norm() < UNIT_EIGEN_TOL).count();
    let lambda_al: Vec<Complex64> = lams.into_iter().filter(|z| (*z - 1.0).norm() >= UNIT_EIGEN_TOL).collect();
    let comp = complement(&fixed, n);
    // a generic combination of the commuting unitaries diagonalizes both
    let mix = Complex64::new(0.618_033_988_749_894_9, 0.302_775_637_731_994_6);
    let rr = comp.adjoint() * &spec.r * &comp;
    let ss = comp.adjoint() * &spec.s * &comp;
    let (_, w) = normal_eigen(&rr + &ss * mix);
    let (mut theta_r, mut theta_s) = (Vec::new(), Vec::new());
    for j in 0..comp.ncols() {
        let v = w.column(j);
        let er = (v.adjoint() * &rr * v)[(0, 0)];
        let es = (v.adjoint() * &ss * v)[(0, 0)];
        theta_r.push(phase01(er));
        theta_s.push(phase01(es));
    }
    if theta_r.iter().zip(&theta_s).any(|(a, b)| *a == 0.0 && *b == 0.0) {
        return Err(Error::RelationViolation("regular part contains a vector fixed by R and S".into()));
    }
    let mut parabolic_chars = vec![LatticeCharacter::trivial(); l];
    parabolic_chars.extend(theta_r.iter().zip(&theta_s).map(|(&u, &v)| LatticeCharacter::new(u, v)));
    Ok(CuspRepData {
        dim: n,
        k_inf: k,
        l_inf: l,
        index: g.stabilizer_index,
        basis_partition: (k, l - k, n - l),
        lambda_al,
        theta_r,
        theta_s,
        parabolic_chars,
        projector_residual,
    })
}

/// The characters `ψ_l` of `Γ'_∞` in `tr χ|_{Γ'_∞} = Σ ψ_l`.
pub fn parabolic_characters(spec: &UnitaryRepSpec, g: &BianchiGroup) -> Result<Vec<LatticeCharacter>> {
    Ok(decompose_restriction(spec, g)?.parabolic_chars)
}

impl CuspRepData {
    /// Exact restriction data of a sum of characters, from the `ζ₁₂`
    /// exponents on the stabilizer generators.
    pub fn from_characters(g: &BianchiGroup, chi: &CharacterSum) -> Result<Self> {
        chi.check_field(g.field)?;
        let f = g.field;
        let (e, r, s) = g.stabilizer_generators();
        let (mut k, mut lambda_al, mut theta_r, mut theta_s) = (0, Vec::new(), Vec::new(), Vec::new());
        for c in &chi.summands {
            let (xe, xr, xs) = (c.exponent(&e, f), c.exponent(&r, f), c.exponent(&s, f));
            if xr == 0 && xs == 0 {
                if xe == 0 {
                    k += 1;
                } else {
                    lambda_al.push(Complex64::from_polar(1.0, xe as f64 * PI / 6.0));
                }
            } else {
                theta_r.push(xr as f64 / 12.0);
                theta_s.push(xs as f64 / 12.0);
            }
        }
        let n = chi.dim();
        let l = k + lambda_al.len();
        let mut parabolic_chars = vec![LatticeCharacter::trivial(); l];
        parabolic_chars.extend(theta_r.iter().zip(&theta_s).map(|(&u, &v)| LatticeCharacter::new(u, v)));
        Ok(Self {
            dim: n,
            k_inf: k,
            l_inf: l,
            index: g.stabilizer_index,
            basis_partition: (k, l - k, n - l),
            lambda_al,
            theta_r,
            theta_s,
            parabolic_chars,
            projector_residual: 0.0,
        })
    }
}

/// Representation file: complex matrices as rows of `[re, im]` pairs, keyed
/// by generator label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepSpecFile {
    pub dim: usize,
    pub generators: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
}

impl RepSpecFile {
    pub fn from_spec(spec: &UnitaryRepSpec) -> Self {
        let enc = |m: &CMatrix| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        let mut generators = BTreeMap::new();
        generators.insert("E".to_string(), enc(&spec.e));
        generators.insert("R".to_string(), enc(&spec.r));
        generators.insert("S".to_string(), enc(&spec.s));
        for (k, v) in &spec.extra {
            generators.insert(k.clone(), enc(v));
        }
        Self { dim: spec.dim, generators }
    }

    pub fn to_spec(&self) -> Result<UnitaryRepSpec> {
        let n = self.dim;
        let dec = |label: &str, rows: &Vec<Vec<[f64; 2]>>| -> Result<CMatrix> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Domain(format!("generator {label} is not {n}x{n}")));
            }
            Ok(CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
        };
        let get = |label: &str| -> Result<CMatrix> {
            let rows = self.generators.get(label).ok_or_else(|| Error::Domain(format!("missing generator {label}")))?;
            dec(label, rows)
        };
        let mut spec = UnitaryRepSpec::new(get("E")?, get("R")?, get("S")?)?;
        for (k, v) in &self.generators {
            if !["E", "R", "S"].contains(&k.as_str()) {
                spec.extra.insert(k.clone(), dec(k, v)?);
            }
        }
        Ok(spec)
    }
}
