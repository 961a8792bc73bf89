//! Conjugacy classes of cuspidal elliptic, loxodromic and non-cuspidal
//! elliptic elements, found by bounded explicit search.
//!
//! Two elements are merged only when an explicit conjugator is found; every
//! class stores, for each merged member, a conjugator `G` with
//! `G · rep · G⁻¹ = member`.

use std::collections::{HashMap, VecDeque};

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::character::CharacterSum;
use super::cyclo::Cyclo12;
use super::ring::{Field, IntMat, OElt};
use super::{enumerate_elements, BianchiGroup};
use crate::error::{Error, Result};
use crate::h3geom::{loxodromic_eigenbasis, normalize_loxodromic, ElementClass};
use crate::repchar::CuspRepData;

/// Default conjugator height for the cuspidal elliptic classes.
pub const CUSP_CLASS_HEIGHT: i64 = 3;

/// `conjugator · rep · conjugator⁻¹ = target` in `PSL(2, O_d)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugacyWitness {
    pub target: IntMat,
    pub conjugator: IntMat,
}

impl ConjugacyWitness {
    pub fn holds(&self, rep: &IntMat, f: Field) -> bool {
        rep.conjugate_by(&self.conjugator, f) == self.target
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges and reports whether the sets were distinct.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Components of a union-find forest with conjugators along tree edges.
/// `reps[i]` is the node the component is rooted at; every other node gets a
/// conjugator from the root's matrix to its own.
fn witnesses_from_forest(
    n: usize,
    root_of: &[usize],
    edges: &[(usize, usize, IntMat)],
    f: Field,
) -> HashMap<usize, Vec<(usize, IntMat)>> {
    let mut adj: Vec<Vec<(usize, IntMat)>> = vec![Vec::new(); n];
    for &(a, b, g) in edges {
        adj[a].push((b, g));
        adj[b].push((a, g.inverse()));
    }
    let mut out: HashMap<usize, Vec<(usize, IntMat)>> = HashMap::new();
    let mut seen = vec![false; n];
    for root in 0..n {
        if root_of[root] != root {
            continue;
        }
        let mut list = vec![(root, IntMat::identity())];
        let mut queue = VecDeque::from([(root, IntMat::identity())]);
        seen[root] = true;
        while let Some((x, cx)) = queue.pop_front() {
            for &(y, g) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    let cy = g.mul(&cx, f);
                    list.push((y, cy));
                    queue.push_back((y, cy));
                }
            }
        }
        out.insert(root, list);
    }
    out
}

/// Union-find over `items` closed under conjugation: first by `small` on
/// every item, then by all of `pool` on one item per class. Returns the root
/// of each item and the spanning-forest edges with their conjugators.
fn merge_by_conjugation(items: &[IntMat], small: &[IntMat], pool: &[IntMat], f: Field) -> (Vec<usize>, Vec<(usize, usize, IntMat)>) {
    let index: HashMap<IntMat, usize> = items.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut uf = UnionFind::new(items.len());
    let mut edges = Vec::new();
    let mut sweep = |i: usize, conj: &[IntMat], uf: &mut UnionFind| {
        for gamma in conj {
            if let Some(&j) = index.get(&items[i].conjugate_by(gamma, f)) {
                if uf.union(i, j) {
                    edges.push((i, j, *gamma));
                }
            }
        }
    };
    for i in 0..items.len() {
        sweep(i, small, &mut uf);
    }
    let roots: Vec<usize> = (0..items.len()).filter(|&i| uf.find(i) == i).collect();
    for i in roots {
        sweep(i, pool, &mut uf);
    }
    let root_of = (0..items.len()).map(|i| uf.find(i)).collect();
    (root_of, edges)
}

// ---------------------------------------------------------------------------
// Cuspidal elliptic classes
// ---------------------------------------------------------------------------

/// A conjugacy class meeting `Γ_∞ \ Γ'_∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspidalEllipticClass {
    /// `[[ε, εω], [0, ε⁻¹]]` up to sign.
    pub rep: IntMat,
    pub epsilon: OElt,
    pub epsilon_value: Complex64,
    /// The lattice element `ω_i`.
    pub omega: OElt,
    /// `|1 - ε²|²`, exact.
    pub one_minus_eps2_sq: i64,
    /// Number of elements of `PSL(2, O_d)` commuting with `rep`.
    pub centralizer_order: u32,
    /// False when a centralizer element was found at the search height.
    pub centralizer_complete: bool,
    /// Lowest-height `γ` with `γ∞` the finite fixed point of `rep`.
    pub gamma: IntMat,
    /// `|c|` for the lower-left entry `c` of `gamma`.
    pub c_abs: f64,
    pub members: Vec<ConjugacyWitness>,
    pub search_height: i64,
}

struct CuspNodes {
    f: Field,
    eps: Vec<OElt>,
    moduli: Vec<OElt>,
    residues: Vec<Vec<OElt>>,
    /// (eps index, residue index) per node.
    nodes: Vec<(usize, usize)>,
}

impl CuspNodes {
    fn new(g: &BianchiGroup) -> Self {
        let f = g.field;
        let eps: Vec<OElt> = f.units().into_iter().filter(|u| u.is_positive() && *u != OElt::ONE).collect();
        let small = g.ring_box(2);
        let mut moduli = Vec::new();
        let mut residues = Vec::new();
        for &e in &eps {
            let inv = OElt::ONE.div_exact(e, f).expect("unit");
            let pi = inv.mul(inv, f).sub(OElt::ONE);
            let mut reps: Vec<OElt> = Vec::new();
            for &b in &small {
                if !reps.iter().any(|r| pi.divides(b.sub(*r), f)) {
                    reps.push(b);
                }
            }
            moduli.push(pi);
            residues.push(reps);
        }
        let nodes = residues.iter().enumerate().flat_map(|(i, r)| (0..r.len()).map(move |j| (i, j))).collect();
        Self { f, eps, moduli, residues, nodes }
    }

    fn matrix(&self, node: usize) -> IntMat {
        let (i, j) = self.nodes[node];
        let e = self.eps[i];
        let inv = OElt::ONE.div_exact(e, self.f).expect("unit");
        IntMat::new(e, e.mul(self.residues[i][j], self.f), OElt::ZERO, inv)
    }

    /// Node of an upper-triangular non-parabolic `h`, with the translation
    /// `T` such that `T h T⁻¹` is the node's matrix.
    fn lookup(&self, h: &IntMat) -> Option<(usize, IntMat)> {
        if !h.c.is_zero() {
            return None;
        }
        let f = self.f;
        let (i, b) = self.eps.iter().enumerate().find_map(|(i, &e)| {
            if h.a == e {
                Some((i, h.b))
            } else if h.a == e.neg() {
                Some((i, h.b.neg()))
            } else {
                None
            }
        })?;
        let beta = b.div_exact(self.eps[i], f)?;
        let pi = self.moduli[i];
        let j = self.residues[i].iter().position(|r| pi.divides(beta.sub(*r), f))?;
        let tau = self.residues[i][j].sub(beta).div_exact(pi, f)?;
        let node = self.nodes.iter().position(|&n| n == (i, j))?;
        Some((node, IntMat::translation(tau)))
    }
}

/// Cuspidal elliptic classes with conjugator search height [`CUSP_CLASS_HEIGHT`].
pub fn cuspidal_elliptic_classes(g: &BianchiGroup) -> Result<Vec<CuspidalEllipticClass>> {
    cuspidal_elliptic_classes_with(g, CUSP_CLASS_HEIGHT)
}

/// Cuspidal elliptic classes, merging `Γ_∞`-classes by conjugators of height
/// at most `h` and counting centralizers among elements of height at most `h`.
pub fn cuspidal_elliptic_classes_with(g: &BianchiGroup, h: i64) -> Result<Vec<CuspidalEllipticClass>> {
    let f = g.field;
    let pool = enumerate_elements(g, h)?;
    let nodes = CuspNodes::new(g);
    let n = nodes.nodes.len();
    let mats: Vec<IntMat> = (0..n).map(|k| nodes.matrix(k)).collect();
    let mut uf = UnionFind::new(n);
    let mut edges = Vec::new();
    for (k, m) in mats.iter().enumerate() {
        for gamma in &pool {
            let conj = m.conjugate_by(gamma, f);
            if let Some((target, t)) = nodes.lookup(&conj) {
                let full = t.mul(gamma, f);
                debug_assert_eq!(m.conjugate_by(&full, f), mats[target]);
                if uf.union(k, target) {
                    edges.push((k, target, full));
                }
            }
        }
    }
    let root_of: Vec<usize> = (0..n).map(|k| uf.find(k)).collect();
    let trees = witnesses_from_forest(n, &root_of, &edges, f);
    let mut roots: Vec<usize> = trees.keys().copied().collect();
    roots.sort_unstable();
    let mut out = Vec::with_capacity(roots.len());
    for root in roots {
        let rep = mats[root];
        let (ei, ri) = nodes.nodes[root];
        let epsilon = nodes.eps[ei];
        let eps2 = epsilon.mul(epsilon, f);
        let one_minus_eps2_sq = OElt::ONE.sub(eps2).norm(f);
        let central: Vec<&IntMat> = pool.iter().filter(|x| x.commutes_with(&rep, f)).collect();
        let centralizer_complete = central.iter().all(|x| x.height() < h);
        // finite fixed point p = b / (d - a); γ∞ = a_γ / c_γ = p
        let (num, den) = (rep.b, rep.d.sub(rep.a));
        let gamma = *pool
            .iter()
            .find(|x| !x.c.is_zero() && x.a.mul(den, f) == x.c.mul(num, f))
            .ok_or_else(|| Error::BudgetExceeded(format!("no element of height <= {h} maps infinity to the fixed point")))?;
        let members = trees[&root]
            .iter()
            .map(|&(node, conj)| ConjugacyWitness { target: mats[node], conjugator: conj })
            .collect();
        out.push(CuspidalEllipticClass {
            rep,
            epsilon,
            epsilon_value: epsilon.to_complex(f),
            omega: nodes.residues[ei][ri],
            one_minus_eps2_sq,
            centralizer_order: central.len() as u32,
            centralizer_complete,
            gamma,
            c_abs: (gamma.c.norm(f) as f64).sqrt(),
            members,
            search_height: h,
        });
    }
    Ok(out)
}

/// `2 Σ tr χ(g_i) / (|C(g_i)| |1-ε_i²|²) + l_∞/[Γ_∞:Γ'_∞] - k_∞` in exact
/// arithmetic, with the class traces supplied by the caller.
pub fn verify_cusp_identity(
    g: &BianchiGroup,
    rep: &CuspRepData,
    classes: &[CuspidalEllipticClass],
    traces: &[Cyclo12],
) -> Result<Cyclo12> {
    if traces.len() != classes.len() {
        return Err(Error::InexactInput(format!("{} traces for {} classes", traces.len(), classes.len())));
    }
    if rep.index != g.stabilizer_index {
        return Err(Error::Domain(format!("representation index {} differs from the group's {}", rep.index, g.stabilizer_index)));
    }
    let mut lhs = Cyclo12::zero();
    for (cl, tr) in classes.iter().zip(traces) {
        let den = cl.centralizer_order as i64 * cl.one_minus_eps2_sq;
        lhs = lhs + tr.scale(Rational64::new(2, den));
    }
    lhs = lhs + Cyclo12::rational(Rational64::new(rep.l_inf as i64, g.stabilizer_index as i64));
    Ok(lhs - Cyclo12::integer(rep.k_inf as i64))
}

/// [`verify_cusp_identity`] for a direct sum of characters, with exact traces
/// and exact `k_∞`, `l_∞`.
pub fn cusp_identity_residual(g: &BianchiGroup, classes: &[CuspidalEllipticClass], chi: &CharacterSum) -> Result<Cyclo12> {
    let rep = CuspRepData::from_characters(g, chi)?;
    let traces: Vec<Cyclo12> = classes.iter().map(|c| chi.trace(&c.rep, g.field)).collect();
    verify_cusp_identity(g, &rep, classes, &traces)
}

// ---------------------------------------------------------------------------
// Loxodromic classes
// ---------------------------------------------------------------------------

/// A loxodromic conjugacy class with its centralizer data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoxClass {
    pub rep: IntMat,
    pub trace: OElt,
    /// `a(T)` with `|a| > 1`, up to sign.
    pub a: Complex64,
    /// `N(T) = |a(T)|²`.
    pub norm: f64,
    /// Primitive `T₀` with `T = T₀ⁿ · E^v`.
    pub t0: IntMat,
    pub a0: Complex64,
    pub n0: f64,
    pub power: u32,
    pub torsion_power: u32,
    /// Order `m(T)` of the cyclic torsion part of the centralizer.
    pub m: u32,
    /// Generator `E_{T₀}` of the torsion part.
    pub torsion_gen: IntMat,
    /// `ζ(T₀) = e^{iπ q/m}` with `q = zeta_exp`, primitive of order `2m`.
    pub zeta0: Complex64,
    pub zeta_exp: u32,
    pub primitive: bool,
    /// Primitive and kept in the reduced system.
    pub reduced: bool,
    pub centralizer_complete: bool,
    pub members: Vec<ConjugacyWitness>,
}

/// Loxodromic classes found within a norm bound and a height bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoxClassList {
    pub classes: Vec<LoxClass>,
    pub norm_bound: f64,
    pub height: i64,
    /// Always false: bounded search does not certify completeness.
    pub complete: bool,
}

impl LoxClassList {
    /// The maximal reduced system of primitive classes found.
    pub fn reduced_primitive(&self) -> Vec<&LoxClass> {
        self.classes.iter().filter(|c| c.reduced).collect()
    }
}

fn elliptic_order(e: &IntMat, f: Field) -> u32 {
    let mut p = *e;
    for k in 1..=12 {
        if p.is_identity() {
            return k;
        }
        p = p.mul(e, f);
    }
    0
}

fn power(x: &IntMat, n: u32, f: Field) -> IntMat {
    (0..n).fold(IntMat::identity(), |acc, _| acc.mul(x, f))
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Conjugators used for merging: all elements of height at most one.
fn small_conjugators(pool: &[IntMat]) -> Vec<IntMat> {
    pool.iter().filter(|x| x.height() <= 1).copied().collect()
}

/// Loxodromic classes `T` with `N(T) ≤ norm_bound` among elements of height
/// at most `h`.
pub fn loxodromic_classes(g: &BianchiGroup, norm_bound: f64, h: i64) -> Result<LoxClassList> {
    if !(norm_bound > 1.0) {
        return Err(Error::Domain(format!("norm bound must exceed 1, got {norm_bound}")));
    }
    let f = g.field;
    let pool = enumerate_elements(g, h)?;
    let mut lox: Vec<(IntMat, Complex64, f64)> = Vec::new();
    for x in &pool {
        if x.classify() == ElementClass::Loxodromic {
            let (a, n) = normalize_loxodromic(&x.to_moebius(f))?;
            if n <= norm_bound * (1.0 + 1e-12) {
                lox.push((*x, a, n));
            }
        }
    }
    let mats: Vec<IntMat> = lox.iter().map(|e| e.0).collect();
    let (root_of, edges) = merge_by_conjugation(&mats, &small_conjugators(&pool), &pool, f);
    let trees = witnesses_from_forest(lox.len(), &root_of, &edges, f);
    let mut roots: Vec<usize> = trees.keys().copied().collect();
    // roots are the smallest index of each component, hence the lowest
    // (height, entries) member since the pool is sorted
    roots.sort_by(|&p, &q| lox[p].2.total_cmp(&lox[q].2).then(p.cmp(&q)));
    let mut classes = Vec::with_capacity(roots.len());
    for root in roots {
        let (rep, a, norm) = lox[root];
        let mut torsion = Vec::new();
        let mut axis_lox = Vec::new();
        for x in &pool {
            if x.is_identity() || !x.commutes_in_sl2(&rep, f) {
                continue;
            }
            match x.classify() {
                ElementClass::Elliptic => torsion.push(*x),
                ElementClass::Loxodromic => axis_lox.push(*x),
                _ => {}
            }
        }
        let centralizer_complete = torsion.iter().chain(&axis_lox).all(|x| x.height() < h);
        let m = torsion.len() as u32 + 1;
        let torsion_gen =
            torsion.iter().copied().find(|e| elliptic_order(e, f) == m).unwrap_or_else(IntMat::identity);
        // primitive element of least norm along the axis, oriented like rep
        let mut cands: Vec<(IntMat, f64)> =
            axis_lox.iter().map(|x| (*x, normalize_loxodromic(&x.to_moebius(f)).map(|p| p.1).unwrap_or(f64::INFINITY))).collect();
        cands.sort_by(|p, q| p.1.total_cmp(&q.1));
        let mut found = None;
        'search: for (c, nc) in &cands {
            let n = (norm.ln() / nc.ln()).round() as u32;
            if n == 0 {
                continue;
            }
            for t0 in [*c, c.inverse()] {
                let base = power(&t0, n, f);
                let mut e = IntMat::identity();
                for v in 0..m {
                    if base.mul(&e, f) == rep {
                        found = Some((t0, *nc, n, v));
                        break 'search;
                    }
                    e = e.mul(&torsion_gen, f);
                }
            }
        }
        let (t0, n0, pw, tv) = found.unwrap_or((rep, norm, 1, 0));
        let (a0, basis) = loxodromic_eigenbasis(&t0.to_moebius(f))?;
        let ev = torsion_gen.to_moebius(f);
        let (v0, v1) = (basis.a, basis.c);
        let w = if v0.norm() >= v1.norm() { (ev.a * v0 + ev.b * v1) / v0 } else { (ev.c * v0 + ev.d * v1) / v1 };
        let two_m = 2 * m;
        let mut q = ((w.arg() * m as f64 / std::f64::consts::PI).round() as i64).rem_euclid(two_m as i64) as u32;
        if gcd(q, two_m) != 1 {
            q = (q + m) % two_m;
        }
        let zeta0 = Complex64::from_polar(1.0, std::f64::consts::PI * q as f64 / m as f64);
        let members = trees[&root]
            .iter()
            .map(|&(i, conj)| ConjugacyWitness { target: lox[i].0, conjugator: conj })
            .collect();
        classes.push(LoxClass {
            rep,
            trace: rep.trace(),
            a,
            norm,
            t0,
            a0,
            n0,
            power: pw,
            torsion_power: tv,
            m,
            torsion_gen,
            zeta0,
            zeta_exp: q,
            primitive: pw == 1,
            reduced: false,
            centralizer_complete,
            members,
        });
    }
    // Reduced system: drop a primitive class if a member equals y·E^v for a kept y.
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..classes.len() {
        if !classes[i].primitive {
            continue;
        }
        let shares = kept.iter().any(|&k| {
            let y = &classes[k];
            let mut e = IntMat::identity();
            let coset: Vec<IntMat> = (0..y.m)
                .map(|_| {
                    let p = y.rep.mul(&e, f);
                    e = e.mul(&y.torsion_gen, f);
                    p
                })
                .collect();
            classes[i].members.iter().any(|w| coset.contains(&w.target))
        });
        if !shares {
            classes[i].reduced = true;
            kept.push(i);
        }
    }
    Ok(LoxClassList { classes, norm_bound, height: h, complete: false })
}

// ---------------------------------------------------------------------------
// Non-cuspidal elliptic classes
// ---------------------------------------------------------------------------

/// A class of elliptic elements whose fixed points are not cusps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NceClass {
    pub rep: IntMat,
    pub trace: OElt,
    /// Order of `rep` in `PSL(2, C)`.
    pub order: u32,
    /// `m(R)`: order of the rotation group about the axis of `rep`.
    pub m: u32,
    /// `rep = E₀^k` for the generator `E₀` of the rotation group.
    pub k: u32,
    /// `|𝔈(R)|`, equal to `m` for the cyclic rotation group.
    pub torsion_order: u32,
    /// `sin²(πk/m) = 1 - tr²/4`.
    pub sin2: f64,
    /// Least norm of a loxodromic element with the same axis, if found.
    pub n0: Option<f64>,
    pub t0: Option<IntMat>,
    pub complete: bool,
    pub members: Vec<ConjugacyWitness>,
}

/// Whether the rational integer `n` is a square in `Q(√-d)`.
fn is_square_in_field(n: i64, f: Field) -> bool {
    let is_sq = |m: i64| m >= 0 && ((m as f64).sqrt().round() as i64).pow(2) == m;
    let d = f.d() as i64;
    is_sq(n) || (n < 0 && (-n) % d == 0 && is_sq(-n / d))
}

/// Non-cuspidal elliptic classes among elements of height at most `h`.
pub fn nce_classes(g: &BianchiGroup, h: i64) -> Result<Vec<NceClass>> {
    let f = g.field;
    let pool = enumerate_elements(g, h)?;
    let ell: Vec<IntMat> = pool
        .iter()
        .filter(|x| {
            x.classify() == ElementClass::Elliptic && !x.c.is_zero() && {
                let t = x.trace().as_integer().expect("elliptic trace is an integer");
                !is_square_in_field(t * t - 4, f)
            }
        })
        .copied()
        .collect();
    let (root_of, edges) = merge_by_conjugation(&ell, &small_conjugators(&pool), &pool, f);
    let trees = witnesses_from_forest(ell.len(), &root_of, &edges, f);
    let mut roots: Vec<usize> = trees.keys().copied().collect();
    roots.sort_unstable();
    let mut out = Vec::with_capacity(roots.len());
    for root in roots {
        let rep = ell[root];
        let mut rotations = Vec::new();
        let mut best: Option<(f64, IntMat)> = None;
        for x in &pool {
            if x.is_identity() || !x.commutes_in_sl2(&rep, f) {
                continue;
            }
            match x.classify() {
                ElementClass::Elliptic => rotations.push(*x),
                ElementClass::Loxodromic => {
                    let (_, n) = normalize_loxodromic(&x.to_moebius(f))?;
                    if best.is_none_or(|(b, _)| n < b) {
                        best = Some((n, *x));
                    }
                }
                _ => {}
            }
        }
        let m = rotations.len() as u32 + 1;
        let gen = rotations.iter().copied().find(|e| elliptic_order(e, f) == m).unwrap_or(rep);
        let k = (1..m).find(|&k| power(&gen, k, f) == rep).unwrap_or(1);
        let t = rep.trace().as_integer().expect("elliptic trace is an integer") as f64;
        let members =
            trees[&root].iter().map(|&(i, conj)| ConjugacyWitness { target: ell[i], conjugator: conj }).collect();
        out.push(NceClass {
            rep,
            trace: rep.trace(),
            order: elliptic_order(&rep, f),
            m,
            k,
            torsion_order: m,
            sin2: 1.0 - t * t / 4.0,
            n0: best.map(|b| b.0),
            t0: best.map(|b| b.1),
            complete: best.is_some() && rotations.iter().all(|x| x.height() < h),
            members,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bianchi::character::Character;

    #[test]
    fn gaussian_cusp_classes() {
        let g = BianchiGroup::gaussian();
        let cl = cuspidal_elliptic_classes(&g).unwrap();
        assert_eq!(cl.len(), 4);
        for c in &cl {
            assert_eq!(c.epsilon, OElt::new(0, 1));
            assert_eq!(c.one_minus_eps2_sq, 4);
            assert_eq!(c.centralizer_order, 4);
            assert!(c.centralizer_complete);
            assert!(c.members.iter().all(|w| w.holds(&c.rep, g.field)));
        }
        let c_abs: Vec<f64> = cl.iter().map(|c| c.c_abs).collect();
        assert_eq!(c_abs.iter().filter(|&&x| x == 1.0).count(), 1);
    }

    #[test]
    fn eisenstein_cusp_classes() {
        let g = BianchiGroup::eisenstein();
        let cl = cuspidal_elliptic_classes(&g).unwrap();
        assert_eq!(cl.len(), 3);
        for c in &cl {
            assert_eq!(c.one_minus_eps2_sq, 3);
            assert_eq!(c.centralizer_order, 3);
            // ε and ε⁻¹ rotations are merged by an axis-reversing conjugator
            assert_eq!(c.members.len(), 2);
            assert!(c.members.iter().all(|w| w.holds(&c.rep, g.field)));
        }
    }

    #[test]
    fn cusp_identity_trivial_and_nontrivial() {
        for g in [BianchiGroup::gaussian(), BianchiGroup::eisenstein()] {
            let cl = cuspidal_elliptic_classes(&g).unwrap();
            for c in Character::available(g.field) {
                let r = cusp_identity_residual(&g, &cl, &CharacterSum::single(c)).unwrap();
                assert!(r.is_zero(), "d={} {}: residual {r}", g.d, c.name());
            }
            let both = CharacterSum { summands: Character::available(g.field) };
            assert!(cusp_identity_residual(&g, &cl, &both).unwrap().is_zero());
        }
    }

    #[test]
    fn cusp_identity_rejects_wrong_degrees() {
        let g = BianchiGroup::gaussian();
        let cl = cuspidal_elliptic_classes(&g).unwrap();
        let mut rep = CuspRepData::from_characters(&g, &CharacterSum::trivial()).unwrap();
        let traces = vec![Cyclo12::one(); cl.len()];
        assert!(verify_cusp_identity(&g, &rep, &cl, &traces).unwrap().is_zero());
        rep.k_inf = 0;
        let r = verify_cusp_identity(&g, &rep, &cl, &traces).unwrap();
        assert_eq!(r.as_rational(), Some(Rational64::from_integer(1)));
        assert!(verify_cusp_identity(&g, &rep, &cl, &traces[1..]).is_err());
    }

    #[test]
    fn cusp_classes_stable_in_height() {
        for g in [BianchiGroup::gaussian(), BianchiGroup::eisenstein()] {
            let a = cuspidal_elliptic_classes_with(&g, 2).unwrap();
            let b = cuspidal_elliptic_classes_with(&g, 4).unwrap();
            let key = |v: &[CuspidalEllipticClass]| v.iter().map(|c| (c.rep, c.centralizer_order)).collect::<Vec<_>>();
            assert_eq!(key(&a), key(&b));
        }
    }

    #[test]
    fn lox_classes_basic() {
        let g = BianchiGroup::gaussian();
        let list = loxodromic_classes(&g, 8.0, 2).unwrap();
        assert!(!list.classes.is_empty());
        assert!(!list.complete);
        for c in &list.classes {
            assert!(c.norm > 1.0 && c.norm <= 8.0 + 1e-9);
            assert!(c.members.iter().all(|w| w.holds(&c.rep, g.field)));
            // conjugation preserves the trace up to sign
            assert!(c.members.iter().all(|w| w.target.trace() == c.rep.trace() || w.target.trace() == c.rep.trace().neg()));
            assert!((c.n0.powi(c.power as i32) - c.norm).abs() < 1e-9 * c.norm);
            assert!((c.zeta0.powi(2 * c.m as i32) - 1.0).norm() < 1e-12);
            assert!(c.rep.commutes_in_sl2(&c.torsion_gen, g.field));
        }
        assert!(list.reduced_primitive().iter().all(|c| c.primitive));
    }

    #[test]
    fn nce_classes_basic() {
        for g in [BianchiGroup::gaussian(), BianchiGroup::eisenstein()] {
            let list = nce_classes(&g, 2).unwrap();
            assert!(!list.is_empty());
            for c in &list {
                assert!(!c.rep.c.is_zero());
                assert!([2, 3, 4, 6].contains(&c.order));
                assert!(c.sin2 > 0.0);
                assert!(c.members.iter().all(|w| w.holds(&c.rep, g.field)));
            }
        }
    }

    #[test]
    fn lox_classes_stable_in_height() {
        let canon = |t: OElt| if t.is_positive() { t } else { t.neg() };
        for g in [BianchiGroup::gaussian(), BianchiGroup::eisenstein()] {
            let key = |h| {
                let mut v: Vec<(i64, i64)> = loxodromic_classes(&g, 8.0, h)
                    .unwrap()
                    .classes
                    .iter()
                    .map(|c| canon(c.trace))
                    .map(|t| (t.x, t.y))
                    .collect();
                v.sort_unstable();
                v
            };
            let (small, large) = (key(2), key(4));
            let mut rest = large.clone();
            for k in &small {
                let pos = rest.iter().position(|x| x == k);
                assert!(pos.is_some(), "d={}: class {k:?} lost at larger height", g.d);
                rest.remove(pos.unwrap());
            }
        }
    }

    #[test]
    fn powers_have_multiplicative_norms() {
        let g = BianchiGroup::gaussian();
        let list = loxodromic_classes(&g, 8.0, 3).unwrap();
        let powers: Vec<&LoxClass> = list.classes.iter().filter(|c| c.power > 1).collect();
        assert!(!powers.is_empty());
        for c in powers {
            let expect = power(&c.t0, c.power, g.field).mul(&power(&c.torsion_gen, c.torsion_power, g.field), g.field);
            assert_eq!(expect, c.rep);
            assert!((c.n0.powi(c.power as i32) - c.norm).abs() < 1e-10 * c.norm);
        }
    }
}
