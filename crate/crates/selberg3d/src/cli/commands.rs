//! One function per subcommand, each returning a [`Report`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use super::config::{parse_complex, parse_real, RunConfig};
use super::report::{complex, num, rational, Provenance, Report, Table};
use super::*;
use crate::bianchi::{
    cusp_identity_residual, cuspidal_elliptic_classes, cuspidal_elliptic_classes_with, enumerate_elements_capped,
    loxodromic_classes, nce_classes, BianchiGroup, Character, CharacterSum,
};
use crate::eisenstein::{laplace_eigen_check, EisensteinSeries};
use crate::h3geom::{classify, normalize_loxodromic, phi_s, MoebiusElt, PointH3};
use crate::lattice::{eta_lambda_ladder, l_direct, l_kronecker, z_partial, Lattice, LatticeCharacter};
use crate::repchar::{decompose_restriction, CuspRepData, RepSpecFile};
use crate::specfun::{g_from_h, resolvent_pair, shc_forward};
use crate::zeta::{
    cusp_integral, expand_classes, geometric_side, log_zeta_partial, logderiv_central_difference, residue_table,
    zeta_logderiv_series, ClassBundle, GroupData, Normalization, PoleLocation, ScatteringInput, SpectralExternal,
    ZetaClass, DEFAULT_KL_TOL,
};

const DEFAULT_X_MAX: f64 = 1e6;
const DEFAULT_KRONECKER_TOL: f64 = 5e-3;
const DEFAULT_EIGEN_TOL: f64 = 1e-3;
const DEFAULT_LOGDERIV_TOL: f64 = 1e-6;
const DEFAULT_CUSP_TOL: f64 = 1e-8;
const DEFAULT_G_TOL: f64 = 1e-7;
const DEFAULT_SHC_TOL: f64 = 1e-6;
const DEFAULT_NORM_BOUND: f64 = 40.0;
const DEFAULT_HEIGHT: i64 = 2;
const DEFAULT_COSET_HEIGHT: i64 = 6;

pub(super) fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Report, CliError> {
    match cmd {
        Command::Run { .. } => Err(CliError::Config("`run` cannot be nested".into())),
        Command::Geom(GeomCmd::Classify(a)) => geom_classify(a, cfg),
        Command::Lattice(LatticeCmd::Lsum(a)) => lattice_lsum(a, cfg),
        Command::Lattice(LatticeCmd::Eta(a)) => lattice_eta(a),
        Command::Lattice(LatticeCmd::KroneckerCheck(a)) => lattice_kronecker(a, cfg),
        Command::Group(GroupCmd::Enumerate(a)) => group_enumerate(a, cfg),
        Command::Group(GroupCmd::Classes(a)) => group_classes(a, cfg),
        Command::Group(GroupCmd::VerifyIdentity(a)) => group_identity(a, cfg),
        Command::Eis(EisCmd::Eval(a)) => eis_eval(a, cfg),
        Command::Eis(EisCmd::Eigencheck(a)) => eis_eigencheck(a, cfg),
        Command::Zeta(ZetaCmd::Partial(a)) => zeta_partial_cmd(a, cfg),
        Command::Zeta(ZetaCmd::Logderiv(a)) => zeta_logderiv_cmd(a, cfg),
        Command::Zeta(ZetaCmd::Divisor(a)) => zeta_divisor(a),
        Command::Zeta(ZetaCmd::CuspIntegral(a)) => zeta_cusp(a, cfg),
        Command::Trace(TraceCmd::GeometricSide(a)) => trace_geometric(a, cfg),
        Command::Shc(ShcCmd::Check(a)) => shc_check(a, cfg),
    }
}

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

/// Representation file: characters, optionally with generator matrices that
/// must restrict to the same cusp data.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepFile {
    characters: Vec<String>,
    #[serde(default)]
    matrices: Option<RepSpecFile>,
}

fn parse_characters(names: &[&str]) -> Result<CharacterSum, CliError> {
    let summands = names.iter().map(|n| Character::parse(n.trim())).collect::<crate::Result<Vec<_>>>()?;
    if summands.is_empty() {
        return Err(CliError::Config("empty representation".into()));
    }
    Ok(CharacterSum { summands })
}

/// Resolves `--rep`: character names joined by `+`, or a JSON/TOML file.
fn load_rep(g: &BianchiGroup, text: &str) -> Result<CharacterSum, CliError> {
    let path = Path::new(text);
    if !path.is_file() {
        let chi = parse_characters(&text.split('+').collect::<Vec<_>>())?;
        chi.check_field(g.field)?;
        return Ok(chi);
    }
    let body = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let file: RepFile = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&body).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
    } else {
        serde_json::from_str(&body).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
    };
    let chi = parse_characters(&file.characters.iter().map(String::as_str).collect::<Vec<_>>())?;
    chi.check_field(g.field)?;
    if let Some(m) = &file.matrices {
        let from_matrices = decompose_restriction(&m.to_spec()?, g)?;
        let from_chars = CuspRepData::from_characters(g, &chi)?;
        let key = |r: &CuspRepData| (r.dim, r.k_inf, r.l_inf);
        if key(&from_matrices) != key(&from_chars) {
            return Err(CliError::Config(format!(
                "{}: matrices restrict to (dim, k, l) = {:?}, characters to {:?}",
                path.display(),
                key(&from_matrices),
                key(&from_chars)
            )));
        }
    }
    Ok(chi)
}

fn chi_names(chi: &CharacterSum) -> Vec<&'static str> {
    chi.summands.iter().map(|c| c.name()).collect()
}

fn group(cfg: &RunConfig, d: Option<u32>) -> Result<BianchiGroup, CliError> {
    Ok(BianchiGroup::new(cfg.d(d))?)
}

fn one_complex(text: &str) -> Result<Complex64, CliError> {
    parse_complex(text)
}

fn parse_point(text: &str) -> Result<PointH3, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!("point {text:?} is not x,y,r")));
    }
    let v = parts.iter().map(|p| parse_real(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(PointH3::from_xyr(v[0], v[1], v[2])?)
}

fn json_without_members(v: impl serde::Serialize) -> Value {
    let mut v = serde_json::to_value(v).expect("classes serialize");
    if let Some(o) = v.as_object_mut() {
        o.remove("members");
    }
    v
}

// ---------------------------------------------------------------------------
// geom
// ---------------------------------------------------------------------------

fn geom_classify(a: &ClassifyArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let name = "geom classify";
    if let Some(text) = &a.matrix {
        let e = text.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
        if e.len() != 4 {
            return Err(CliError::Config(format!("matrix {text:?} needs four entries")));
        }
        let m = MoebiusElt::new(e[0], e[1], e[2], e[3])?;
        let class = classify(&m);
        let lox = normalize_loxodromic(&m).ok().map(|(a, n)| json!({ "a": complex(a), "norm": n }));
        let result = json!({
            "matrix": [complex(m.a), complex(m.b), complex(m.c), complex(m.d)],
            "trace": complex(m.trace()),
            "class": class,
            "loxodromic": lox,
        });
        return Ok(Report::new(name, Provenance::new().input("matrix", text), result));
    }
    let g = group(cfg, a.d)?;
    let h = cfg.height(a.height, DEFAULT_HEIGHT)?;
    let elems = enumerate_elements_capped(&g, h, crate::bianchi::DEFAULT_ELEMENT_CAP)?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut disagreements = 0usize;
    for m in &elems {
        let exact = m.classify();
        if classify(&m.to_moebius(g.field)) != exact {
            disagreements += 1;
        }
        *counts.entry(format!("{exact:?}").to_lowercase()).or_default() += 1;
    }
    let result = json!({ "elements": elems.len(), "counts": counts, "float_exact_disagreements": disagreements });
    Ok(Report::new(name, Provenance::new().input("d", g.d).bound("height", h), result).with_passed(disagreements == 0))
}

// ---------------------------------------------------------------------------
// lattice
// ---------------------------------------------------------------------------

fn lattice_inputs(a: &LsumArgs) -> Result<(Lattice, LatticeCharacter), CliError> {
    Ok((Lattice::new(one_complex(&a.tau)?)?, LatticeCharacter::new(a.u, a.v)))
}

fn lattice_lsum(a: &LsumArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let (lat, psi) = lattice_inputs(a)?;
    if psi.is_trivial() {
        return Err(Error::TrivialCharacter.into());
    }
    let x_max = cfg.x_max(a.xmax, DEFAULT_X_MAX)?;
    // an empty ladder has no tail to measure
    let (value, tail) = if x_max == 0.0 {
        (z_partial(0.0, &lat, &psi), None)
    } else {
        let r = l_direct(&lat, &psi, x_max)?;
        (r.value, Some(r.tail_estimate))
    };
    let record = json!({
        "tau_re": lat.tau.re, "tau_im": lat.tau.im, "u": a.u, "v": a.v, "x_max": x_max,
        "value_re": value.re, "value_im": value.im, "tail_estimate": tail, "eta": Value::Null,
    });
    let mut t = Table::new(&["tau_re", "tau_im", "u", "v", "x_max", "value_re", "value_im", "tail_estimate", "eta"]);
    t.push(vec![
        num(lat.tau.re),
        num(lat.tau.im),
        num(a.u),
        num(a.v),
        num(x_max),
        num(value.re),
        num(value.im),
        tail.map(num).unwrap_or_default(),
        String::new(),
    ]);
    let prov = Provenance::new().input("tau", &a.tau).input("u", a.u).input("v", a.v).bound("x_max", x_max);
    Ok(Report::new("lattice lsum", prov, record).with_table(t))
}

fn lattice_eta(a: &EtaArgs) -> Result<Report, CliError> {
    let lat = Lattice::new(one_complex(&a.tau)?)?;
    if a.k_min >= a.k_max || a.k_min < 1 || a.k_max > 30 {
        return Err(CliError::Config(format!("ladder exponents must satisfy 1 <= k_min < k_max <= 30, got {}..{}", a.k_min, a.k_max)));
    }
    let est = eta_lambda_ladder(&lat, a.k_min..=a.k_max)?;
    let mut t = Table::new(&["x", "eta_estimate"]);
    for (x, e) in &est.ladder {
        t.push(vec![num(*x), num(*e)]);
    }
    let prov = Provenance::new()
        .input("tau", &a.tau)
        .bound("ladder_k_min", a.k_min)
        .bound("ladder_k_max", a.k_max)
        .tol("spread_max", crate::lattice::ETA_SPREAD_MAX);
    Ok(Report::new("lattice eta", prov, serde_json::to_value(&est).expect("eta")).with_table(t))
}

fn lattice_kronecker(a: &LsumArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let (lat, psi) = lattice_inputs(a)?;
    let x_max = cfg.x_max(a.xmax, DEFAULT_X_MAX)?;
    let tol = cfg.tol("agreement", a.tol, DEFAULT_KRONECKER_TOL)?;
    let direct = l_direct(&lat, &psi, x_max)?;
    let closed = l_kronecker(&lat, &psi)?;
    let diff = (direct.value - closed).norm();
    let result = json!({
        "direct": complex(direct.value),
        "kronecker": closed,
        "difference": diff,
        "tail_estimate": direct.tail_estimate,
    });
    let mut t = Table::new(&["tau_re", "tau_im", "u", "v", "x_max", "direct_re", "direct_im", "kronecker", "difference"]);
    t.push(vec![
        num(lat.tau.re),
        num(lat.tau.im),
        num(a.u),
        num(a.v),
        num(x_max),
        num(direct.value.re),
        num(direct.value.im),
        num(closed),
        num(diff),
    ]);
    let prov = Provenance::new().input("tau", &a.tau).input("u", a.u).input("v", a.v).bound("x_max", x_max).tol("agreement", tol);
    Ok(Report::new("lattice kronecker-check", prov, result).with_table(t).with_passed(diff <= tol))
}

// ---------------------------------------------------------------------------
// group
// ---------------------------------------------------------------------------

fn group_enumerate(a: &EnumerateArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let g = group(cfg, a.d)?;
    let h = cfg.height(a.height, DEFAULT_HEIGHT)?;
    let elems = enumerate_elements_capped(&g, h, a.max_elements)?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for m in &elems {
        *counts.entry(format!("{:?}", m.classify()).to_lowercase()).or_default() += 1;
    }
    let mut result = json!({ "count": elems.len(), "counts_by_class": counts });
    let mut t = Table::new(&["a_x", "a_y", "b_x", "b_y", "c_x", "c_y", "d_x", "d_y"]);
    for m in &elems {
        t.push(m.to_pairs().iter().flat_map(|p| [p[0].to_string(), p[1].to_string()]).collect());
    }
    if a.list {
        result["elements"] = json!(elems.iter().map(|m| m.to_pairs()).collect::<Vec<_>>());
    }
    let prov = Provenance::new().input("d", g.d).bound("height", h).bound("max_elements", a.max_elements);
    Ok(Report::new("group enumerate", prov, result).with_table(t))
}

fn group_classes(a: &ClassesArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let g = group(cfg, a.d)?;
    let h = cfg.height(a.height, DEFAULT_HEIGHT)?;
    let nb = cfg.norm_bound(a.norm_bound, DEFAULT_NORM_BOUND)?;
    let want = |k: ClassKind| a.kind == k || a.kind == ClassKind::All;
    let mut result = json!({});
    if want(ClassKind::Cusp) {
        let cl = cuspidal_elliptic_classes(&g)?;
        result["cuspidal_elliptic"] = json!(cl.iter().map(json_without_members).collect::<Vec<_>>());
    }
    if want(ClassKind::Lox) {
        let list = loxodromic_classes(&g, nb, h)?;
        result["loxodromic"] = json!(list.classes.iter().map(json_without_members).collect::<Vec<_>>());
        result["loxodromic_complete"] = json!(list.complete);
    }
    if want(ClassKind::Nce) {
        let cl = nce_classes(&g, h)?;
        result["non_cuspidal_elliptic"] = json!(cl.iter().map(json_without_members).collect::<Vec<_>>());
    }
    let prov = Provenance::new().input("d", g.d).input("kind", format!("{:?}", a.kind).to_lowercase()).bound("height", h).bound("norm_bound", nb);
    Ok(Report::new("group classes", prov, result))
}

fn group_identity(a: &IdentityArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let g = group(cfg, a.d)?;
    let chi = load_rep(&g, &cfg.rep(a.rep.as_deref()))?;
    let height = a.height.or(cfg.bounds.height);
    let classes = match height {
        Some(h) => cuspidal_elliptic_classes_with(&g, cfg.height(Some(h), h)?)?,
        None => cuspidal_elliptic_classes(&g)?,
    };
    let rep = CuspRepData::from_characters(&g, &chi)?;
    let residual = cusp_identity_residual(&g, &classes, &chi)?;
    let result = json!({
        "residual": residual.as_rational().map(rational),
        "residual_coefficients": residual.coeffs.iter().map(|q| rational(*q)).collect::<Vec<_>>(),
        "zero": residual.is_zero(),
        "k_inf": rep.k_inf,
        "l_inf": rep.l_inf,
        "index": g.stabilizer_index,
        "classes": classes.len(),
    });
    let mut prov = Provenance::new().input("d", g.d).input("rep", chi_names(&chi));
    if let Some(h) = height {
        prov = prov.bound("height", h);
    }
    Ok(Report::new("group verify-identity", prov, result).with_passed(residual.is_zero()))
}

// ---------------------------------------------------------------------------
// eis
// ---------------------------------------------------------------------------

/// Unit weight on every summand fixed by the stabilizer, zero elsewhere.
fn singular_vector(g: &BianchiGroup, chi: &CharacterSum) -> Result<Vec<Complex64>, CliError> {
    let (e, r, s) = g.stabilizer_generators();
    let v: Vec<Complex64> = chi
        .summands
        .iter()
        .map(|c| {
            let fixed = [&e, &r, &s].iter().all(|m| c.exponent(m, g.field) == 0);
            Complex64::new(if fixed { 1.0 } else { 0.0 }, 0.0)
        })
        .collect();
    if v.iter().all(|x| x.norm() == 0.0) {
        return Err(Error::NotSingularVector.into());
    }
    Ok(v)
}

fn eis_series(a: &EisArgs, cfg: &RunConfig) -> Result<(EisensteinSeries, CharacterSum, i64, Provenance), CliError> {
    let g = group(cfg, a.d)?;
    let chi = load_rep(&g, &cfg.rep(a.rep.as_deref()))?;
    let s = one_complex(&a.s)?;
    let h = cfg.coset_height(a.coset_height, DEFAULT_COSET_HEIGHT)?;
    let v = singular_vector(&g, &chi)?;
    let series = match a.truncation {
        TruncationArg::Direct => EisensteinSeries::direct(&g, &chi, &v, s, h)?,
        TruncationArg::Periodized => {
            if s.im != 0.0 {
                return Err(CliError::Config("the periodized sum needs real s".into()));
            }
            EisensteinSeries::periodized(&g, &chi, &v, s.re, h, a.mu_max)?
        }
    };
    let mut prov = Provenance::new()
        .input("d", g.d)
        .input("rep", chi_names(&chi))
        .input("s", complex(s))
        .input("truncation", format!("{:?}", a.truncation).to_lowercase())
        .bound("coset_height", h);
    if a.truncation == TruncationArg::Periodized {
        prov = prov.bound("mu_max", a.mu_max);
    }
    Ok((series, chi, h, prov))
}

fn points(a: &EisArgs) -> Result<Vec<PointH3>, CliError> {
    if a.points.is_empty() {
        return Ok(vec![PointH3::from_xyr(0.0, 0.0, 3.0)?]);
    }
    a.points.iter().map(|p| parse_point(p)).collect()
}

fn eis_eval(a: &EisArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let (series, chi, _, prov) = eis_series(a, cfg)?;
    let pts = points(a)?;
    let evals = pts.par_iter().map(|p| series.eval(p)).collect::<crate::Result<Vec<_>>>()?;
    let n = chi.dim();
    let mut cols: Vec<String> = vec!["x".into(), "y".into(), "r".into()];
    cols.extend((0..n).map(|k| format!("re_{k}")));
    cols.extend((0..n).map(|k| format!("im_{k}")));
    cols.push("tail_indicator".into());
    let mut t = Table { columns: cols, rows: Vec::new() };
    let mut samples = Vec::new();
    for (p, e) in pts.iter().zip(&evals) {
        let mut row = vec![num(p.z.re), num(p.z.im), num(p.r)];
        row.extend(e.value.iter().map(|z| num(z.re)));
        row.extend(e.value.iter().map(|z| num(z.im)));
        row.push(num(e.tail_indicator));
        t.push(row);
        samples.push(json!({
            "point": [p.z.re, p.z.im, p.r],
            "value": e.value.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
            "tail_indicator": e.tail_indicator,
            "terms": e.terms,
        }));
    }
    Ok(Report::new("eis eval", prov, json!({ "samples": samples })).with_table(t))
}

fn eis_eigencheck(a: &EisArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let (series, _, _, prov) = eis_series(a, cfg)?;
    let tol = cfg.tol("residual", a.tol, DEFAULT_EIGEN_TOL)?;
    let pts = points(a)?;
    let s = series.s;
    let residuals = pts
        .par_iter()
        .map(|p| {
            // scalar test on the first non-zero component
            let comp = series.eval(p)?.value.iter().position(|z| z.norm() > 0.0).unwrap_or(0);
            laplace_eigen_check(|q: &PointH3| series.eval(q).map(|e| e.value[comp]).unwrap_or(Complex64::new(f64::NAN, 0.0)), s, p, a.step)
        })
        .collect::<crate::Result<Vec<f64>>>()?;
    let mut t = Table::new(&["x", "y", "r", "residual"]);
    for (p, r) in pts.iter().zip(&residuals) {
        t.push(vec![num(p.z.re), num(p.z.im), num(p.r), num(*r)]);
    }
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    let result = json!({
        "points": pts.iter().map(|p| [p.z.re, p.z.im, p.r]).collect::<Vec<_>>(),
        "residuals": residuals,
        "max_residual": worst,
    });
    let passed = residuals.iter().all(|r| *r <= tol);
    Ok(Report::new("eis eigencheck", prov.bound("step", a.step).tol("residual", tol), result).with_table(t).with_passed(passed))
}

// ---------------------------------------------------------------------------
// zeta
// ---------------------------------------------------------------------------

struct ZetaInputs {
    classes: Vec<ZetaClass>,
    chi: CharacterSum,
    g: BianchiGroup,
    nb: f64,
    h: i64,
    kl_tol: f64,
    s: Vec<Complex64>,
}

fn zeta_inputs(a: &ZetaArgs, cfg: &RunConfig) -> Result<ZetaInputs, CliError> {
    let g = group(cfg, a.d)?;
    let chi = load_rep(&g, &cfg.rep(a.rep.as_deref()))?;
    let nb = cfg.norm_bound(a.norm_bound, DEFAULT_NORM_BOUND)?;
    let h = cfg.height(a.height, DEFAULT_HEIGHT)?;
    let kl_tol = cfg.tol("kl", a.kl_tol, DEFAULT_KL_TOL)?;
    let s = cfg.s_grid(&a.s, &[2.0, 2.5, 3.0])?;
    let list = loxodromic_classes(&g, nb, h)?;
    let classes = list.reduced_primitive().iter().map(|c| ZetaClass::from_lox(&g, c, &chi)).collect::<crate::Result<Vec<_>>>()?;
    Ok(ZetaInputs { classes, chi, g, nb, h, kl_tol, s })
}

fn zeta_prov(z: &ZetaInputs) -> Provenance {
    Provenance::new()
        .input("d", z.g.d)
        .input("rep", chi_names(&z.chi))
        .input("s", z.s.iter().map(|s| complex(*s)).collect::<Vec<_>>())
        .bound("norm_bound", z.nb)
        .bound("height", z.h)
        .tol("kl", z.kl_tol)
}

fn zeta_table(extra: &[&str]) -> Table {
    let mut cols = vec!["s_re", "s_im", "value_re", "value_im"];
    cols.extend_from_slice(extra);
    cols.extend_from_slice(&["norm_bound", "height", "classes", "kl_tol"]);
    Table::new(&cols)
}

fn zeta_partial_cmd(a: &ZetaArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let z = zeta_inputs(a, cfg)?;
    let logs = z.s.par_iter().map(|s| log_zeta_partial(*s, &z.classes, z.kl_tol)).collect::<crate::Result<Vec<_>>>()?;
    let mut t = zeta_table(&["log_re", "log_im"]);
    let mut values = Vec::new();
    for (s, l) in z.s.iter().zip(&logs) {
        let v = l.exp();
        t.push(vec![
            num(s.re),
            num(s.im),
            num(v.re),
            num(v.im),
            num(l.re),
            num(l.im),
            num(z.nb),
            z.h.to_string(),
            z.classes.len().to_string(),
            num(z.kl_tol),
        ]);
        values.push(json!({ "s": complex(*s), "value": complex(v), "log": complex(*l) }));
    }
    let result = json!({ "classes": z.classes.len(), "values": values });
    Ok(Report::new("zeta partial", zeta_prov(&z), result).with_table(t))
}

fn zeta_logderiv_cmd(a: &ZetaArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let z = zeta_inputs(a, cfg)?;
    let tol = cfg.tol("relative", a.tol, DEFAULT_LOGDERIV_TOL)?;
    if !(a.delta > 0.0 && a.delta < 0.5) {
        return Err(CliError::Config(format!("delta must lie in (0, 0.5), got {}", a.delta)));
    }
    let terms = expand_classes(&z.classes, a.n_max);
    let pairs = z
        .s
        .par_iter()
        .map(|s| Ok((zeta_logderiv_series(*s, &terms)?, logderiv_central_difference(*s, &z.classes, z.kl_tol, a.delta)?)))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut t = zeta_table(&["difference_re", "difference_im", "relative_error"]);
    let mut values = Vec::new();
    let mut passed = true;
    for (s, (series, fd)) in z.s.iter().zip(&pairs) {
        let rel = (series - fd).norm() / series.norm().max(f64::MIN_POSITIVE);
        passed &= rel <= tol;
        t.push(vec![
            num(s.re),
            num(s.im),
            num(series.re),
            num(series.im),
            num(fd.re),
            num(fd.im),
            num(rel),
            num(z.nb),
            z.h.to_string(),
            z.classes.len().to_string(),
            num(z.kl_tol),
        ]);
        values.push(json!({ "s": complex(*s), "series": complex(*series), "central_difference": complex(*fd), "relative_error": rel }));
    }
    let result = json!({ "classes": z.classes.len(), "terms": terms.len(), "values": values });
    let prov = zeta_prov(&z).bound("n_max", a.n_max).bound("delta", a.delta).tol("relative", tol);
    Ok(Report::new("zeta logderiv", prov, result).with_table(t).with_passed(passed))
}

fn zeta_divisor(a: &DivisorArgs) -> Result<Report, CliError> {
    let scat = ScatteringInput::new(a.tr_s0, "command line");
    let table = residue_table(a.case, a.k, a.l, &scat, a.n_min)?;
    let mut residues = serde_json::Map::new();
    let mut entries = Vec::new();
    let mut t = Table::new(&["s", "residue_num", "residue_den"]);
    for e in &table.entries {
        let s = match e.location {
            PoleLocation::Negative(n) => n,
            PoleLocation::Zero => 0,
        };
        residues.insert(s.to_string(), rational(e.residue));
        entries.push(json!({ "s": s, "residue": rational(e.residue) }));
        t.push(vec![s.to_string(), e.residue.numer().to_string(), e.residue.denom().to_string()]);
    }
    let result = json!({
        "case": a.case,
        "k_inf": a.k,
        "l_inf": a.l,
        "entries": entries,
        "residues": residues,
        "minimal_root_order": table.minimal_root_order(),
    });
    let prov = Provenance::new()
        .input("case", a.case)
        .input("k_inf", a.k)
        .input("l_inf", a.l)
        .input("trS0", a.tr_s0)
        .bound("n_min", a.n_min)
        .tol("trace_integrality", crate::zeta::TRACE_INTEGRALITY_TOL);
    Ok(Report::new("zeta divisor", prov, result).with_table(t))
}

fn zeta_cusp(a: &CuspArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let tol = cfg.tol("agreement", a.tol, DEFAULT_CUSP_TOL)?;
    let s = cfg.s_grid(&a.s, &[1.5, 2.0, 3.0])?;
    let t = cfg.real_grid("t", &a.t, &[PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, PI])?;
    let grid: Vec<(Complex64, f64)> = s.iter().flat_map(|s| t.iter().map(move |t| (*s, *t))).collect();
    let vals = grid.par_iter().map(|(s, t)| cusp_integral(*s, *t)).collect::<crate::Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "s_re",
        "s_im",
        "t",
        "value_re",
        "value_im",
        "quadrature_re",
        "quadrature_im",
        "discrepancy",
        "series_error",
        "quadrature_error",
    ]);
    let mut passed = true;
    let mut rows = Vec::new();
    for v in &vals {
        passed &= v.discrepancy() <= tol;
        table.push(vec![
            num(v.s.re),
            num(v.s.im),
            num(v.t),
            num(v.value.re),
            num(v.value.im),
            num(v.quadrature.re),
            num(v.quadrature.im),
            num(v.discrepancy()),
            num(v.series_error),
            num(v.quadrature_error),
        ]);
        rows.push(json!({
            "s": complex(v.s), "t": v.t, "series": complex(v.value), "quadrature": complex(v.quadrature),
            "discrepancy": v.discrepancy(), "series_error": v.series_error, "quadrature_error": v.quadrature_error,
        }));
    }
    let prov = Provenance::new()
        .input("s", s.iter().map(|x| complex(*x)).collect::<Vec<_>>())
        .input("t", &t)
        .tol("agreement", tol)
        .tol("series", crate::zeta::SERIES_TOL);
    Ok(Report::new("zeta cusp-integral", prov, json!({ "values": rows })).with_table(table).with_passed(passed))
}

// ---------------------------------------------------------------------------
// trace, shc
// ---------------------------------------------------------------------------

fn trace_geometric(a: &GeometricArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let g = group(cfg, a.d)?;
    let chi = load_rep(&g, &cfg.rep(a.rep.as_deref()))?;
    let (s, b) = (one_complex(&a.s)?, one_complex(&a.b)?);
    let nb = cfg.norm_bound(a.norm_bound, 30.0)?;
    let h = cfg.height(a.height, DEFAULT_HEIGHT)?;
    let rep = CuspRepData::from_characters(&g, &chi)?;
    let eta = match a.eta {
        Some(e) => e,
        None => crate::lattice::eta_lambda(&g.cusp_lattice)?.eta,
    };
    let sums = rep
        .parabolic_chars
        .iter()
        .filter(|p| !p.is_trivial())
        .map(|p| l_kronecker(&g.cusp_lattice, p))
        .collect::<crate::Result<Vec<_>>>()?;
    let data = GroupData::from_bianchi(&g, &rep, eta, sums)?;
    let lox = loxodromic_classes(&g, nb, h)?;
    let nce = nce_classes(&g, h)?;
    let cusp = cuspidal_elliptic_classes(&g)?;
    let bundle = ClassBundle::from_bianchi(&g, &chi, &lox, &nce, &cusp);
    let pair = resolvent_pair(s, b)?;
    let norm = match a.normalization {
        NormalizationArg::Standard => Normalization::Standard,
        NormalizationArg::Egm => Normalization::Egm,
    };
    let ext = SpectralExternal { tr_s0: a.tr_s0, phase_term: None };
    let rep_out = geometric_side(&pair, &data, &bundle, &ext, norm)?;
    let mut t = Table::new(&["label", "value_re", "value_im", "status"]);
    for e in &rep_out.terms {
        t.push(vec![e.label.clone(), num(e.value.re), num(e.value.im), format!("{:?}", e.status).to_lowercase()]);
    }
    let result = json!({
        "terms": rep_out.terms.iter().map(|e| json!({
            "label": e.label, "value": complex(e.value), "status": e.status, "note": e.note,
        })).collect::<Vec<_>>(),
        "total": complex(rep_out.total),
        "log_a_coefficient": rep_out.log_a_coefficient.coeffs.iter().map(|q| rational(*q)).collect::<Vec<_>>(),
        "log_a_balanced": rep_out.log_a_balanced,
        "incomplete": rep_out.incomplete,
        "eta": eta,
        "loxodromic_classes": lox.classes.len(),
        "nce_classes": nce.len(),
        "cuspidal_elliptic_classes": cusp.len(),
    });
    let prov = Provenance::new()
        .input("d", g.d)
        .input("rep", chi_names(&chi))
        .input("s", complex(s))
        .input("b", complex(b))
        .input("trS0", a.tr_s0)
        .input("eta_supplied", a.eta.is_some())
        .input("normalization", format!("{:?}", a.normalization).to_lowercase())
        .bound("norm_bound", nb)
        .bound("height", h);
    Ok(Report::new("trace geometric-side", prov, result).with_table(t).with_passed(rep_out.log_a_balanced))
}

fn shc_check(a: &ShcArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let s0 = one_complex(&a.s0)?;
    let b = one_complex(&a.b)?;
    let g_tol = cfg.tol("g", a.tol, DEFAULT_G_TOL)?;
    let shc_tol = cfg.tol("shc", a.tol, DEFAULT_SHC_TOL)?;
    let xs = cfg.real_grid("x", &a.x, &(0..=12).map(|k| k as f64 * 0.25).collect::<Vec<_>>())?;
    let ss = cfg.s_grid(&a.s, &[0.5, 1.0, 1.2, 1.5])?;
    let pair = resolvent_pair(s0, b)?;
    let g_rows = xs
        .par_iter()
        .map(|&x| {
            let q = g_from_h(&pair, x, g_tol * 0.1)?;
            Ok((x, q, (pair.g)(x)))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let k = |t: f64| phi_s(t, s0).map(|v| v / (4.0 * PI)).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let shc_rows = ss
        .par_iter()
        .map(|&s| Ok((s, shc_forward(k, s)?, (s0 * s0 - s * s).inv())))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut t = Table::new(&["kind", "point_re", "point_im", "value_re", "value_im", "closed_re", "closed_im", "error"]);
    let mut passed = true;
    let mut g_out = Vec::new();
    for (x, q, c) in &g_rows {
        let err = (q - c).norm();
        passed &= err <= g_tol;
        t.push(vec!["g".into(), num(*x), num(0.0), num(q.re), num(q.im), num(c.re), num(c.im), num(err)]);
        g_out.push(json!({ "x": x, "quadrature": complex(*q), "closed_form": complex(*c), "error": err }));
    }
    let mut shc_out = Vec::new();
    for (s, v, c) in &shc_rows {
        let err = (v - c).norm() / c.norm();
        passed &= err <= shc_tol;
        t.push(vec!["shc".into(), num(s.re), num(s.im), num(v.re), num(v.im), num(c.re), num(c.im), num(err)]);
        shc_out.push(json!({ "s": complex(*s), "transform": complex(*v), "closed_form": complex(*c), "relative_error": err }));
    }
    let prov = Provenance::new()
        .input("s0", complex(s0))
        .input("b", complex(b))
        .input("x", &xs)
        .input("s", ss.iter().map(|s| complex(*s)).collect::<Vec<_>>())
        .tol("g", g_tol)
        .tol("shc", shc_tol);
    Ok(Report::new("shc check", prov, json!({ "g": g_out, "shc": shc_out })).with_table(t).with_passed(passed))
}
