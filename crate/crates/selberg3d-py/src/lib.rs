//! Python bindings for `selberg3d`.
//!
//! Complex numbers cross the boundary as Python `complex`, exact rationals
//! as `(numerator, denominator)` tuples.

use std::cell::RefCell;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use selberg3d::bianchi::{self, BianchiGroup, Character, CharacterSum};
use selberg3d::eisenstein::{laplace_eigen_check, EisensteinSeries};
use selberg3d::h3geom::{self, ElementClass, MoebiusElt, PointH3};
use selberg3d::lattice::{self, Lattice, LatticeCharacter};
use selberg3d::specfun;
use selberg3d::zeta::{self, PoleLocation, ScatteringInput, ZetaClass};
use selberg3d::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::TrivialCharacter | Error::InexactInput(_) | Error::CaseUnsupported(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn class_name(c: ElementClass) -> &'static str {
    match c {
        ElementClass::Identity => "identity",
        ElementClass::Parabolic => "parabolic",
        ElementClass::Elliptic => "elliptic",
        ElementClass::Loxodromic => "loxodromic",
    }
}

/// A point `z + r j` of upper half-space.
#[pyclass(name = "Point", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyPoint(PointH3);

#[pymethods]
impl PyPoint {
    #[new]
    fn new(x: f64, y: f64, r: f64) -> PyResult<Self> {
        PointH3::from_xyr(x, y, r).map(Self).map_err(py_err)
    }

    #[getter]
    fn z(&self) -> Complex64 {
        self.0.z
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.r
    }

    fn __repr__(&self) -> String {
        format!("Point({}, {}, {})", self.0.z.re, self.0.z.im, self.0.r)
    }
}

/// An element of `PSL(2, C)`.
#[pyclass(name = "Moebius", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyMoebius(MoebiusElt);

#[pymethods]
impl PyMoebius {
    #[new]
    fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> PyResult<Self> {
        MoebiusElt::new(a, b, c, d).map(Self).map_err(py_err)
    }

    fn entries(&self) -> (Complex64, Complex64, Complex64, Complex64) {
        (self.0.a, self.0.b, self.0.c, self.0.d)
    }

    fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    fn apply(&self, p: &PyPoint) -> PyPoint {
        PyPoint(self.0.apply(&p.0))
    }

    fn __mul__(&self, o: &Self) -> Self {
        Self(self.0.mul(&o.0))
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    /// One of "identity", "parabolic", "elliptic", "loxodromic".
    fn classify(&self) -> &'static str {
        class_name(h3geom::classify(&self.0))
    }
}

/// Point-pair invariant `δ(P, Q)`.
#[pyfunction]
fn delta(p: &PyPoint, q: &PyPoint) -> f64 {
    h3geom::delta(&p.0, &q.0)
}

/// Hyperbolic distance.
#[pyfunction]
fn distance(p: &PyPoint, q: &PyPoint) -> f64 {
    h3geom::distance(&p.0, &q.0)
}

/// `PSL(2, O_d)` for `d = 1, 3`.
#[pyclass(name = "BianchiGroup", frozen)]
struct PyGroup(BianchiGroup);

fn characters(g: &BianchiGroup, names: &str) -> PyResult<CharacterSum> {
    let summands = names.split('+').map(|n| Character::parse(n.trim())).collect::<selberg3d::Result<Vec<_>>>().map_err(py_err)?;
    let chi = CharacterSum { summands };
    chi.check_field(g.field).map_err(py_err)?;
    Ok(chi)
}

#[pymethods]
impl PyGroup {
    #[new]
    fn new(d: u32) -> PyResult<Self> {
        BianchiGroup::new(d).map(Self).map_err(py_err)
    }

    #[getter]
    fn d(&self) -> u32 {
        self.0.d
    }

    fn covolume(&self) -> f64 {
        self.0.covolume()
    }

    /// Elements with entries of height at most `height`, as Möbius maps.
    fn enumerate(&self, height: i64) -> PyResult<Vec<PyMoebius>> {
        let elems = bianchi::enumerate_elements(&self.0, height).map_err(py_err)?;
        Ok(elems.iter().map(|m| PyMoebius(m.to_moebius(self.0.field))).collect())
    }

    /// Cusp identity residual as `(value, exactly_zero)`.
    ///
    /// `rep` joins character names with "+", e.g. "trivial+cubic".
    #[pyo3(signature = (rep = "trivial", height = 3))]
    fn cusp_identity_residual(&self, rep: &str, height: i64) -> PyResult<(Complex64, bool)> {
        let chi = characters(&self.0, rep)?;
        let classes = bianchi::cuspidal_elliptic_classes_with(&self.0, height).map_err(py_err)?;
        let r = bianchi::cusp_identity_residual(&self.0, &classes, &chi).map_err(py_err)?;
        Ok((r.to_complex(), r.is_zero()))
    }

    /// Reduced primitive loxodromic classes as `(a0, n0, m, zeta0)` tuples.
    #[pyo3(signature = (norm_bound = 40.0, height = 2))]
    fn loxodromic_classes(&self, norm_bound: f64, height: i64) -> PyResult<Vec<(Complex64, f64, u32, Complex64)>> {
        let list = bianchi::loxodromic_classes(&self.0, norm_bound, height).map_err(py_err)?;
        Ok(list.reduced_primitive().iter().map(|c| (c.a0, c.n0, c.m, c.zeta0)).collect())
    }

    /// Partial Euler product `Z(s)` over the classes within the bounds.
    #[pyo3(signature = (s, rep = "trivial", norm_bound = 40.0, height = 2, kl_tol = zeta::DEFAULT_KL_TOL))]
    fn zeta_partial(&self, s: Complex64, rep: &str, norm_bound: f64, height: i64, kl_tol: f64) -> PyResult<Complex64> {
        let zc = self.zeta_classes(rep, norm_bound, height)?;
        zeta::zeta_partial(s, &zc, kl_tol).map_err(py_err)
    }

    /// `Z'(s)/Z(s)` from the Dirichlet series over classes up to power `n_max`.
    #[pyo3(signature = (s, rep = "trivial", norm_bound = 40.0, height = 2, n_max = 40))]
    fn zeta_logderiv(&self, s: Complex64, rep: &str, norm_bound: f64, height: i64, n_max: u32) -> PyResult<Complex64> {
        let zc = self.zeta_classes(rep, norm_bound, height)?;
        zeta::zeta_logderiv_series(s, &zeta::expand_classes(&zc, n_max)).map_err(py_err)
    }

    /// Component of the truncated Eisenstein series for the trivial character.
    #[pyo3(signature = (s, p, coset_height = 6))]
    fn eisenstein(&self, s: Complex64, p: &PyPoint, coset_height: i64) -> PyResult<Complex64> {
        let ser = EisensteinSeries::direct(&self.0, &CharacterSum::trivial(), &[Complex64::new(1.0, 0.0)], s, coset_height)
            .map_err(py_err)?;
        Ok(ser.eval(&p.0).map_err(py_err)?.value[0])
    }

    /// Relative residual of `-Δ E = s(2 - s) E` by finite differences at `p`.
    #[pyo3(signature = (s, p, coset_height = 6, step = 1e-3))]
    fn eisenstein_eigen_residual(&self, s: Complex64, p: &PyPoint, coset_height: i64, step: f64) -> PyResult<f64> {
        let ser = EisensteinSeries::direct(&self.0, &CharacterSum::trivial(), &[Complex64::new(1.0, 0.0)], s, coset_height)
            .map_err(py_err)?;
        let err = RefCell::new(None);
        let f = |q: &PointH3| match ser.eval(q) {
            Ok(v) => v.value[0],
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                Complex64::new(f64::NAN, 0.0)
            }
        };
        let r = laplace_eigen_check(f, s, &p.0, step).map_err(py_err)?;
        match err.into_inner() {
            Some(e) => Err(py_err(e)),
            None => Ok(r),
        }
    }
}

impl PyGroup {
    fn zeta_classes(&self, rep: &str, norm_bound: f64, height: i64) -> PyResult<Vec<ZetaClass>> {
        let chi = characters(&self.0, rep)?;
        let list = bianchi::loxodromic_classes(&self.0, norm_bound, height).map_err(py_err)?;
        list.reduced_primitive().iter().map(|c| ZetaClass::from_lox(&self.0, c, &chi).map_err(py_err)).collect()
    }
}

fn lattice_of(tau: Complex64) -> PyResult<Lattice> {
    Lattice::new(tau).map_err(py_err)
}

/// `(value, tail_estimate)` of the lattice sum `Σ_{|μ|²≤x} ψ(μ)/|μ|²`.
#[pyfunction]
#[pyo3(signature = (tau, u, v, x_max = 1e6))]
fn lattice_sum(tau: Complex64, u: f64, v: f64, x_max: f64) -> PyResult<(Complex64, f64)> {
    let r = lattice::l_direct(&lattice_of(tau)?, &LatticeCharacter::new(u, v), x_max).map_err(py_err)?;
    Ok((r.value, r.tail_estimate))
}

/// Closed form of the lattice sum through the Siegel function.
#[pyfunction]
fn lattice_sum_kronecker(tau: Complex64, u: f64, v: f64) -> PyResult<f64> {
    lattice::l_kronecker(&lattice_of(tau)?, &LatticeCharacter::new(u, v)).map_err(py_err)
}

/// The constant `η_Λ` of the trivial-character lattice sum.
#[pyfunction]
fn lattice_eta(tau: Complex64) -> PyResult<f64> {
    Ok(lattice::eta_lambda(&lattice_of(tau)?).map_err(py_err)?.eta)
}

/// Residues at `s = -1, …, n_min` and `s = 0` as `(s, (num, den))` pairs.
#[pyfunction]
#[pyo3(signature = (case, k, l, tr_s0, n_min = -6))]
fn divisor_table(case: u32, k: u32, l: u32, tr_s0: f64, n_min: i64) -> PyResult<Vec<(i64, (i64, i64))>> {
    let t = zeta::residue_table(case, k, l, &ScatteringInput::new(tr_s0, "python"), n_min).map_err(py_err)?;
    Ok(t.entries
        .iter()
        .map(|e| {
            let s = match e.location {
                PoleLocation::Negative(n) => n,
                PoleLocation::Zero => 0,
            };
            (s, (*e.residue.numer(), *e.residue.denom()))
        })
        .collect())
}

/// Cusp integral at `(s, t)` as `(series value, quadrature value)`.
#[pyfunction]
fn cusp_integral(s: Complex64, t: f64) -> PyResult<(Complex64, Complex64)> {
    let c = zeta::cusp_integral(s, t).map_err(py_err)?;
    Ok((c.value, c.quadrature))
}

/// `g(x)` recovered from `h` for the resolvent pair with parameters `s, b`.
#[pyfunction]
#[pyo3(signature = (s, b, x, tol = 1e-8))]
fn resolvent_g(s: Complex64, b: Complex64, x: f64, tol: f64) -> PyResult<Complex64> {
    let pair = specfun::resolvent_pair(s, b).map_err(py_err)?;
    specfun::g_from_h(&pair, x, tol).map_err(py_err)
}

/// Selberg–Harish-Chandra transform of a point-pair kernel `k(δ)`.
#[pyfunction]
fn shc_forward(k: Bound<'_, PyAny>, s: Complex64) -> PyResult<Complex64> {
    let err = RefCell::new(None);
    let f = |t: f64| match k.call1((t,)).and_then(|v| v.extract::<Complex64>()) {
        Ok(v) => v,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            Complex64::new(f64::NAN, 0.0)
        }
    };
    let r = specfun::shc_forward(f, s);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    r.map_err(py_err)
}

/// Resolvent kernel `φ_s(δ)`.
#[pyfunction]
fn phi(t: f64, s: Complex64) -> PyResult<Complex64> {
    h3geom::phi_s(t, s).map_err(py_err)
}

#[pymodule]
#[pyo3(name = "selberg3d")]
fn selberg3d_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoint>()?;
    m.add_class::<PyMoebius>()?;
    m.add_class::<PyGroup>()?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_sum, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_sum_kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_eta, m)?)?;
    m.add_function(wrap_pyfunction!(divisor_table, m)?)?;
    m.add_function(wrap_pyfunction!(cusp_integral, m)?)?;
    m.add_function(wrap_pyfunction!(resolvent_g, m)?)?;
    m.add_function(wrap_pyfunction!(shc_forward, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    Ok(())
}
