//! Term-by-term evaluation of the geometric side of the trace formula.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::cusp::angle_from_defect;
use super::product::LoxTerm;
use crate::bianchi::{BianchiGroup, CharacterSum, CuspidalEllipticClass, Cyclo12, LoxClassList, NceClass};
use crate::error::{Error, Result};
use crate::repchar::CuspRepData;
use crate::specfun::{digamma_line, integrate, integrate_to_infinity, QuadConfig, TestFunctionPair, EULER_GAMMA};

/// Normalization of the loxodromic and non-cuspidal elliptic terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// The normalization used throughout this crate.
    #[default]
    Standard,
    /// Both terms multiplied by `4π`, matching the convention of Elstrodt,
    /// Grunewald and Mennicke, Theorem 6.5.1, where the `1/4π` is absent.
    Egm,
}

impl Normalization {
    pub fn factor(self) -> f64 {
        match self {
            Self::Standard => 1.0,
            Self::Egm => 4.0 * PI,
        }
    }
}

/// Group and representation constants entering the trace formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupData {
    pub vol: f64,
    pub dim_v: usize,
    pub index: u32,
    pub k_inf: u32,
    pub l_inf: u32,
    /// `η` of the cusp lattice.
    pub eta: f64,
    /// `L(Λ, ψ_l)` for the regular part, `l > l_∞`.
    pub lattice_sums: Vec<f64>,
}

impl GroupData {
    /// Data for a Bianchi group; `lattice_sums` holds one value per
    /// non-trivial parabolic character of `rep`.
    pub fn from_bianchi(g: &BianchiGroup, rep: &CuspRepData, eta: f64, lattice_sums: Vec<f64>) -> Result<Self> {
        if lattice_sums.len() != rep.dim - rep.l_inf {
            return Err(Error::Domain(format!(
                "{} lattice sums supplied for {} regular directions",
                lattice_sums.len(),
                rep.dim - rep.l_inf
            )));
        }
        Ok(Self {
            vol: g.covolume(),
            dim_v: rep.dim,
            index: g.stabilizer_index,
            k_inf: rep.k_inf as u32,
            l_inf: rep.l_inf as u32,
            eta,
            lattice_sums,
        })
    }
}

/// A non-cuspidal elliptic class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NceTerm {
    pub trace: Complex64,
    pub torsion_order: u32,
    /// `sin²(πk/m)`.
    pub sin2: f64,
    /// `N(T₀)`, absent when no loxodromic centralizer element was found.
    pub n0: Option<f64>,
}

/// A cuspidal elliptic class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspEllipticTerm {
    pub trace: Cyclo12,
    pub centralizer_order: u32,
    pub one_minus_eps2_sq: i64,
    pub c_abs: f64,
}

impl CuspEllipticTerm {
    /// `tr χ(g_i) / (|C(g_i)| |1-ε_i²|²)`, exactly.
    pub fn coefficient(&self) -> Cyclo12 {
        self.trace.scale(Rational64::new(1, self.centralizer_order as i64 * self.one_minus_eps2_sq))
    }

    pub fn angle(&self) -> Result<f64> {
        angle_from_defect(self.one_minus_eps2_sq as f64)
    }
}

/// Conjugacy-class data entering the geometric side.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassBundle {
    pub lox: Vec<LoxTerm>,
    pub nce: Vec<NceTerm>,
    pub cusp: Vec<CuspEllipticTerm>,
}

impl ClassBundle {
    pub fn from_bianchi(
        g: &BianchiGroup,
        chi: &CharacterSum,
        lox: &LoxClassList,
        nce: &[NceClass],
        cusp: &[CuspidalEllipticClass],
    ) -> Self {
        let f = g.field;
        Self {
            lox: lox.classes.iter().map(|c| LoxTerm::from_lox(g, c, chi)).collect(),
            nce: nce
                .iter()
                .map(|c| NceTerm {
                    trace: chi.trace(&c.rep, f).to_complex(),
                    torsion_order: c.torsion_order,
                    sin2: c.sin2,
                    n0: c.n0,
                })
                .collect(),
            cusp: cusp
                .iter()
                .map(|c| CuspEllipticTerm {
                    trace: chi.trace(&c.rep, f),
                    centralizer_order: c.centralizer_order,
                    one_minus_eps2_sq: c.one_minus_eps2_sq,
                    c_abs: c.c_abs,
                })
                .collect(),
        }
    }

    /// Exact coefficient of `g(0) log A`:
    /// `2 Σ tr χ(g_i)/(|C(g_i)| |1-ε_i²|²) + l_∞/[Γ_∞:Γ'_∞]`.
    pub fn log_a_coefficient(&self, data: &GroupData) -> Cyclo12 {
        let ce = self.cusp.iter().fold(Cyclo12::zero(), |acc, c| acc + c.coefficient().scale(Rational64::from(2)));
        ce + Cyclo12::rational(Rational64::new(data.l_inf as i64, data.index as i64))
    }

    /// `Σ tr χ(R) log N(T₀) / (4 |𝔈(R)| sin²(πk/m))` over classes with a known
    /// `N(T₀)`, and the number of classes skipped.
    pub fn nce_coefficient(&self, norm: Normalization) -> (Complex64, usize) {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut skipped = 0;
        for c in &self.nce {
            match c.n0 {
                Some(n0) => sum += c.trace * (n0.ln() / (4.0 * c.torsion_order as f64 * c.sin2)),
                None => skipped += 1,
            }
        }
        (sum * norm.factor(), skipped)
    }

    /// `Σ 2 tr χ(g_i) log|c_i| / (|C(g_i)| |1-ε_i²|²)`.
    pub fn cusp_log_c_coefficient(&self) -> Complex64 {
        self.cusp.iter().map(|c| c.coefficient().to_complex() * (2.0 * c.c_abs.ln())).sum()
    }
}

/// The constant `E` of the functional equation:
/// nce coefficient + `Σ 2 tr log|c_i| / (|C||1-ε²|²)` +
/// `(l_∞(η/2 - γ) + Σ L(Λ, ψ_l)) / [Γ_∞:Γ'_∞]`.
pub fn e_constant(bundle: &ClassBundle, data: &GroupData, norm: Normalization) -> Complex64 {
    let (nce, _) = bundle.nce_coefficient(norm);
    let par = data.l_inf as f64 * (data.eta / 2.0 - EULER_GAMMA) + data.lattice_sums.iter().sum::<f64>();
    nce + bundle.cusp_log_c_coefficient() + par / data.index as f64
}

/// Spectral-side inputs that are not computed here.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectralExternal {
    /// `tr 𝔖(0)`.
    pub tr_s0: Option<f64>,
    /// `(1/4π) ∫ h(1+t²) φ'/φ(it) dt`.
    pub phase_term: Option<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermStatus {
    Computed,
    /// Supplied by the caller.
    External,
    /// Missing input; the term is excluded from the total.
    Omitted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    pub label: String,
    pub value: Complex64,
    pub status: TermStatus,
    pub note: String,
}

/// Every geometric term of the trace formula for one test-function pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricReport {
    pub terms: Vec<TermEntry>,
    /// Sum of the computed and external terms.
    pub total: Complex64,
    /// Exact coefficient of `g(0) log A` collected from the parabolic and
    /// cuspidal elliptic contributions.
    pub log_a_coefficient: Cyclo12,
    /// Whether that coefficient equals `k_∞`, so that it cancels the
    /// spectral truncation term.
    pub log_a_balanced: bool,
    pub normalization: Normalization,
    /// Some term was omitted or some class lacked data.
    pub incomplete: bool,
}

impl GeometricReport {
    pub fn term(&self, label: &str) -> Option<&TermEntry> {
        self.terms.iter().find(|t| t.label == label)
    }
}

fn quad_cfg() -> QuadConfig {
    QuadConfig { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 20_000 }
}

/// `∫₀^∞ f(t) dt` after `t = u/(1-u)`.
fn half_line<F: Fn(f64) -> Complex64>(f: F) -> Result<Complex64> {
    let mapped = |u: f64| {
        let w = 1.0 - u;
        f(u / w) / (w * w)
    };
    Ok(integrate(mapped, 0.0, 1.0, &quad_cfg())?.value)
}

/// `∫_R h(1+t²) t² dt`.
pub fn identity_integral(pair: &TestFunctionPair) -> Result<Complex64> {
    Ok(half_line(|t| pair.h_line(t) * (t * t))? * 2.0)
}

/// `(1/2π) ∫_R h(1+t²) ψ(1+it) dt`; the odd part of `ψ(1+it)` integrates to zero.
pub fn digamma_integral(pair: &TestFunctionPair) -> Result<Complex64> {
    Ok(half_line(|t| pair.h_line(t) * digamma_line(t).re)? / PI)
}

/// `∫₀^∞ g(x) sinh x / (cosh x - cos t) dx`.
pub fn cusp_kernel_integral(pair: &TestFunctionPair, t: f64) -> Result<Complex64> {
    let cos_t = t.cos();
    let f = |x: f64| {
        let e = (-x).exp();
        (pair.g)(x) * ((1.0 - e * e) / (1.0 + e * e - 2.0 * cos_t * e))
    };
    Ok(integrate_to_infinity(f, 0.0, 0.25, 700.0, &quad_cfg())?.value)
}

/// The geometric side of the trace formula, term by term.
pub fn geometric_side(
    pair: &TestFunctionPair,
    data: &GroupData,
    bundle: &ClassBundle,
    ext: &SpectralExternal,
    norm: Normalization,
) -> Result<GeometricReport> {
    if !pair.is_admissible(1e4, 2000) {
        return Err(Error::Domain("test function pair is not admissible".into()));
    }
    let h1 = (pair.h)(Complex64::new(1.0, 0.0));
    let g0 = (pair.g)(0.0);
    let par_weight = data.l_inf as f64 / data.index as f64;
    let mut terms = Vec::new();
    let mut incomplete = false;
    let mut push = |label: &str, value: Complex64, status: TermStatus, note: String| {
        terms.push(TermEntry { label: label.into(), value, status, note });
    };

    let id = identity_integral(pair)? * (data.vol * data.dim_v as f64 / (4.0 * PI * PI));
    push("identity", id, TermStatus::Computed, String::new());

    let (nce_coef, skipped) = bundle.nce_coefficient(norm);
    let nce_note = if skipped > 0 {
        incomplete = true;
        format!("{skipped} classes without N(T0) skipped")
    } else {
        String::new()
    };
    push("nce", nce_coef * g0, TermStatus::Computed, nce_note);

    let lox: Complex64 = bundle
        .lox
        .iter()
        .map(|t| t.weight() * (pair.g)(t.norm().ln()) * norm.factor())
        .sum();
    push("loxodromic", lox, TermStatus::Computed, format!("{} classes", bundle.lox.len()));

    match ext.tr_s0 {
        Some(tr) => push("scattering_trace", -h1 * tr / 4.0, TermStatus::External, "tr S(0) supplied".into()),
        None => {
            incomplete = true;
            push("scattering_trace", Complex64::new(0.0, 0.0), TermStatus::Omitted, "tr S(0) not supplied".into());
        }
    }
    match ext.phase_term {
        Some(v) => push("scattering_phase", v, TermStatus::External, "phi'/phi integral supplied".into()),
        None => {
            incomplete = true;
            push("scattering_phase", Complex64::new(0.0, 0.0), TermStatus::Omitted, "phi'/phi integral not supplied".into());
        }
    }

    push("cuspidal_elliptic_log_c", bundle.cusp_log_c_coefficient() * g0, TermStatus::Computed, String::new());
    let mut ce = Complex64::new(0.0, 0.0);
    for c in &bundle.cusp {
        let q = c.one_minus_eps2_sq as f64;
        ce += c.trace.to_complex() / (c.centralizer_order as f64 * q) * cusp_kernel_integral(pair, c.angle()?)?;
    }
    push("cuspidal_elliptic_integral", ce, TermStatus::Computed, format!("{} classes", bundle.cusp.len()));

    push("parabolic_h1", h1 * (par_weight / 4.0), TermStatus::Computed, String::new());
    push("parabolic_eta", g0 * (par_weight * (data.eta / 2.0 - EULER_GAMMA)), TermStatus::Computed, String::new());
    push("parabolic_digamma", -digamma_integral(pair)? * par_weight, TermStatus::Computed, String::new());
    let lsum: f64 = data.lattice_sums.iter().sum();
    push(
        "lattice_sums",
        g0 * (lsum / data.index as f64),
        TermStatus::Computed,
        format!("{} characters", data.lattice_sums.len()),
    );

    let total = terms.iter().filter(|t| t.status != TermStatus::Omitted).map(|t| t.value).sum();
    let log_a_coefficient = bundle.log_a_coefficient(data);
    let log_a_balanced = log_a_coefficient == Cyclo12::integer(data.k_inf as i64);
    Ok(GeometricReport { terms, total, log_a_coefficient, log_a_balanced, normalization: norm, incomplete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bianchi::{cuspidal_elliptic_classes, loxodromic_classes, nce_classes, Character};
    use crate::specfun::{digamma, resolvent_pair};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn gaussian_inputs(chi: &CharacterSum) -> (GroupData, ClassBundle) {
        let g = BianchiGroup::gaussian();
        let rep = CuspRepData::from_characters(&g, chi).unwrap();
        let sums = vec![0.0; rep.dim - rep.l_inf];
        // η only shifts the parabolic term; finiteness is what is checked
        let data = GroupData::from_bianchi(&g, &rep, 1.0, sums).unwrap();
        let lox = loxodromic_classes(&g, 30.0, 2).unwrap();
        let nce = nce_classes(&g, 2).unwrap();
        let cusp = cuspidal_elliptic_classes(&g).unwrap();
        (data, ClassBundle::from_bianchi(&g, chi, &lox, &nce, &cusp))
    }

    #[test]
    fn gaussian_trivial_report_is_finite() {
        let pair = resolvent_pair(c(1.5), c(3.0)).unwrap();
        let (data, bundle) = gaussian_inputs(&CharacterSum::trivial());
        let ext = SpectralExternal { tr_s0: Some(1.0), phase_term: Some(c(0.0)) };
        let r = geometric_side(&pair, &data, &bundle, &ext, Normalization::Standard).unwrap();
        assert!(r.terms.iter().all(|t| t.value.re.is_finite() && t.value.im.is_finite()));
        assert!(r.total.re.is_finite());
        assert!(r.log_a_balanced);
        assert_eq!(r.log_a_coefficient, Cyclo12::integer(1));
        assert_eq!(r.terms.len(), 11);
        let missing = geometric_side(&pair, &data, &bundle, &SpectralExternal::default(), Normalization::Standard).unwrap();
        assert!(missing.incomplete);
        assert_eq!(missing.term("scattering_trace").unwrap().status, TermStatus::Omitted);
    }

    #[test]
    fn log_a_balance_for_both_groups_and_characters() {
        for g in [BianchiGroup::gaussian(), BianchiGroup::eisenstein()] {
            let cusp = cuspidal_elliptic_classes(&g).unwrap();
            for ch in Character::available(g.field) {
                let chi = CharacterSum::single(ch);
                let rep = CuspRepData::from_characters(&g, &chi).unwrap();
                let data = GroupData::from_bianchi(&g, &rep, 0.0, vec![0.0; rep.dim - rep.l_inf]).unwrap();
                let empty = LoxClassList { classes: vec![], norm_bound: 2.0, height: 1, complete: false };
                let bundle = ClassBundle::from_bianchi(&g, &chi, &empty, &[], &cusp);
                assert_eq!(bundle.log_a_coefficient(&data), Cyclo12::integer(data.k_inf as i64), "d={} {}", g.d, ch.name());
            }
        }
    }

    #[test]
    fn identity_integral_two_ways() {
        let (s, b) = (1.5, 3.0);
        let pair = resolvent_pair(c(s), c(b)).unwrap();
        let v = identity_integral(&pair).unwrap();
        // t² h(1+t²) = (B²-s²) t² / ((s²+t²)(B²+t²)) integrates to π(B - s)
        assert!((v.re - PI * (b - s)).abs() < 1e-8, "{v}");
        // independent scheme: direct panels plus the analytic tail (B²-s²)·2/T
        let cfg = QuadConfig::with_tol(1e-13, 1e-13);
        let cut = 2000.0;
        let head = integrate(|t| pair.h_line(t) * (t * t), 0.0, cut, &QuadConfig { max_intervals: 20_000, ..cfg }).unwrap().value * 2.0;
        let tail = 2.0 * (b * b - s * s) / cut;
        assert!((v.re - head.re - tail).abs() < 1e-6);
    }

    #[test]
    fn digamma_integral_closed_form() {
        // (1/2π) ∫ 2s/(s²+w²) ψ(1+iw) dw = ψ(1+s), so for the resolvent pair the
        // integral is ψ(1+s)/(2s) - ψ(1+B)/(2B)
        let (s, b) = (1.5, 3.0);
        let pair = resolvent_pair(c(s), c(b)).unwrap();
        let v = digamma_integral(&pair).unwrap();
        let exact = digamma(c(1.0 + s)) / (2.0 * s) - digamma(c(1.0 + b)) / (2.0 * b);
        assert!((v - exact).norm() < 1e-10, "{v} vs {exact}");
    }

    #[test]
    fn cusp_kernel_matches_series() {
        let (s, b) = (1.5, 3.0);
        let pair = resolvent_pair(c(s), c(b)).unwrap();
        for t in [PI, 2.0 * PI / 3.0] {
            let v = cusp_kernel_integral(&pair, t).unwrap();
            let a = super::super::cusp::cusp_integral_series(c(s), t).unwrap().0;
            let bb = super::super::cusp::cusp_integral_series(c(b), t).unwrap().0;
            assert!((v - (a / (2.0 * s) - bb / (2.0 * b))).norm() < 1e-9);
        }
    }

    #[test]
    fn normalization_scales_lox_and_nce() {
        let pair = resolvent_pair(c(1.5), c(3.0)).unwrap();
        let (data, bundle) = gaussian_inputs(&CharacterSum::trivial());
        let ext = SpectralExternal::default();
        let a = geometric_side(&pair, &data, &bundle, &ext, Normalization::Standard).unwrap();
        let b = geometric_side(&pair, &data, &bundle, &ext, Normalization::Egm).unwrap();
        for label in ["loxodromic", "nce"] {
            let (x, y) = (a.term(label).unwrap().value, b.term(label).unwrap().value);
            assert!((y - x * 4.0 * PI).norm() <= 1e-12 * y.norm().max(1e-300));
        }
        assert_eq!(a.term("identity"), b.term("identity"));
    }
}
