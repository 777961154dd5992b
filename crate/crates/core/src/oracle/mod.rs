//! Brute-force automorphism groups of small systems over finite rings,
//! subgroup closures of explicit generators, and set comparisons.

mod kernel;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::autfam::{
    go_to_pair_aut, hat_left, hat_right, left_mult, right_mult, tilde_left, tilde_right, transpose_twist,
    transpose_twist_pair, tti_map, tti_membership,
};
use crate::catalog::{NamedSystem, SystemTag};
use crate::error::{Error, Result};
use crate::jordan::{
    is_algebra_automorphism, is_pair_automorphism, is_triple_automorphism, pair_from_triple, triple_from_algebra,
    JordanAlgebra, JordanPair, JordanTriple, PairMap, Structure,
};
use crate::matrix::{enumerate_gl, enumerate_go, BilinearForm, Matrix};
use crate::ring::{Ring, RingElement};

pub const DEFAULT_BUDGET: u128 = 30_000_000;

/// Above this many elements a general linear group is replaced by elementary
/// and diagonal generators in generated mode.
const FULL_GL_LIMIT: u128 = 1000;

/// Which automorphisms are counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AutKind {
    Pair,
    Triple,
    Algebra,
}

impl AutKind {
    pub fn name(self) -> &'static str {
        match self {
            AutKind::Pair => "pair",
            AutKind::Triple => "triple",
            AutKind::Algebra => "algebra",
        }
    }

    /// The kind matching the structure's own category.
    pub fn natural(structure: &Structure) -> AutKind {
        match structure {
            Structure::Pair(_) => AutKind::Pair,
            Structure::Triple(_) => AutKind::Triple,
            Structure::Algebra(_) => AutKind::Algebra,
        }
    }
}

impl FromStr for AutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<AutKind> {
        match s {
            "pair" => Ok(AutKind::Pair),
            "triple" => Ok(AutKind::Triple),
            "algebra" => Ok(AutKind::Algebra),
            _ => Err(Error::Parse(format!("unknown automorphism kind '{s}'"))),
        }
    }
}

impl fmt::Display for AutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exhaustive,
    Generated,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Generated => "generated",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "generated" => Ok(Mode::Generated),
            _ => Err(Error::Parse(format!("unknown mode '{s}'"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Largest candidate count (exhaustive) or group order (generated) accepted.
    pub budget: u128,
    /// Worker threads; `0` uses all available cores.
    pub jobs: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { budget: DEFAULT_BUDGET, jobs: 0 }
    }
}

/// A finite set of automorphisms, sorted by [`PairMap::key`]. Triple and
/// algebra maps are stored as `(φ, φ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismSet {
    pub system: String,
    pub ring: Ring,
    pub kind: AutKind,
    pub mode: Mode,
    pub provenance: String,
    elements: Vec<PairMap>,
}

impl AutomorphismSet {
    pub fn new(system: String, ring: Ring, kind: AutKind, mode: Mode, provenance: String, mut elements: Vec<PairMap>) -> Self {
        elements.sort_by_cached_key(PairMap::key);
        elements.dedup();
        AutomorphismSet { system, ring, kind, mode, provenance, elements }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[PairMap] {
        &self.elements
    }

    pub fn contains(&self, f: &PairMap) -> bool {
        let key = f.key();
        self.elements.binary_search_by(|e| e.key().cmp(&key)).is_ok()
    }

    fn element_json(&self, f: &PairMap) -> Value {
        match self.kind {
            AutKind::Pair => json!({ "plus": f.plus, "minus": f.minus }),
            _ => json!(f.plus),
        }
    }

    /// `{system, ring, kind, mode, order, generator_provenance, elements?}`.
    pub fn to_json(&self, dump_elements: bool) -> Value {
        let mut v = json!({
            "system": self.system,
            "ring": self.ring.to_string(),
            "kind": self.kind.name(),
            "mode": self.mode.name(),
            "order": self.order(),
            "generator_provenance": self.provenance,
        });
        if dump_elements {
            v["elements"] = Value::Array(self.elements.iter().map(|f| self.element_json(f)).collect());
        }
        v
    }
}

fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::BadInput(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn gl_order(ring: &Ring, d: usize) -> Result<u128> {
    ring.gl_order(d as u32).ok_or_else(|| Error::NonEnumerableRing(ring.to_string()))
}

fn budget_check(candidates: u128, budget: u128) -> Result<()> {
    if candidates > budget {
        Err(Error::BudgetExceeded { candidates, budget })
    } else {
        Ok(())
    }
}

fn as_triple(structure: &Structure) -> Result<JordanTriple> {
    match structure {
        Structure::Triple(t) => Ok(t.clone()),
        Structure::Algebra(a) => triple_from_algebra(a),
        Structure::Pair(_) => Err(Error::BadInput("a pair has no triple automorphisms".into())),
    }
}

fn as_pair(structure: &Structure) -> Result<JordanPair> {
    match structure {
        Structure::Pair(p) => Ok(p.clone()),
        other => Ok(pair_from_triple(&as_triple(other)?)),
    }
}

fn as_algebra(structure: &Structure) -> Result<&JordanAlgebra> {
    match structure {
        Structure::Algebra(a) => Ok(a),
        _ => Err(Error::BadInput("only algebras have algebra automorphisms".into())),
    }
}

/// Every automorphism of `system` of the given kind.
///
/// Pair automorphisms of a system with a registered trace only range over
/// `φ+`, with `φ-` its dual inverse; otherwise both sides range freely.
pub fn enumerate_automorphisms(system: &NamedSystem, kind: AutKind, opts: &Options) -> Result<AutomorphismSet> {
    let ring = system.ring();
    if !ring.is_finite() {
        return Err(Error::NonEnumerableRing(ring.to_string()));
    }
    let elements = match kind {
        AutKind::Pair => {
            let pair = as_pair(&system.structure)?;
            let (dp, dm) = pair.dims();
            match &system.trace {
                Some(g) => {
                    budget_check(gl_order(ring, dp)?, opts.budget)?;
                    with_jobs(opts.jobs, || kernel::search(ring, &kernel::Problem::PairTrace(&pair, g)))??
                }
                None => {
                    let total = gl_order(ring, dp)?.saturating_mul(gl_order(ring, dm)?);
                    budget_check(total, opts.budget)?;
                    with_jobs(opts.jobs, || kernel::search(ring, &kernel::Problem::PairFree(&pair)))??
                }
            }
        }
        AutKind::Triple => {
            let triple = as_triple(&system.structure)?;
            budget_check(gl_order(ring, triple.dim())?, opts.budget)?;
            with_jobs(opts.jobs, || kernel::search(ring, &kernel::Problem::Triple(triple.product())))??
        }
        AutKind::Algebra => {
            let alg = as_algebra(&system.structure)?;
            budget_check(gl_order(ring, alg.dim())?, opts.budget)?;
            with_jobs(opts.jobs, || kernel::search(ring, &kernel::Problem::Algebra(alg)))??
        }
    };
    let provenance = match (kind, &system.trace) {
        (AutKind::Pair, Some(_)) => "exhaustive search over GL(V+), minus side the dual inverse for the trace",
        (AutKind::Pair, None) => "exhaustive search over GL(V+) x GL(V-)",
        _ => "exhaustive search over GL(V)",
    };
    Ok(AutomorphismSet::new(system.label(), ring.clone(), kind, Mode::Exhaustive, provenance.into(), elements))
}

fn flatten(f: &PairMap) -> Vec<u32> {
    f.key().into_iter().map(RingElement::index).collect()
}

fn unflatten(ring: &Ring, dims: (usize, usize), flat: &[u32]) -> PairMap {
    let (dp, dm) = dims;
    let split = dp * dp;
    let build = |d: usize, data: &[u32]| Matrix::from_fn(ring, d, d, |i, j| RingElement::Finite(data[i * d + j]));
    PairMap { plus: build(dp, &flat[..split]), minus: build(dm, &flat[split..]) }
}

/// The group generated by `generators`, by breadth-first multiplication from the identity.
pub fn generate_closure(
    system: String,
    ring: &Ring,
    kind: AutKind,
    generators: &[PairMap],
    provenance: String,
    budget: u128,
) -> Result<AutomorphismSet> {
    let elements = closure_elements(ring, generators, budget)?;
    Ok(AutomorphismSet::new(system, ring.clone(), kind, Mode::Generated, provenance, elements))
}

fn closure_elements(ring: &Ring, generators: &[PairMap], budget: u128) -> Result<Vec<PairMap>> {
    if !ring.is_finite() {
        return Err(Error::NonEnumerableRing(ring.to_string()));
    }
    let Some(first) = generators.first() else {
        return Err(Error::BadInput("closure of an empty generator list has no carrier".into()));
    };
    let dims = first.dims();
    if generators.iter().any(|g| g.dims() != dims) {
        return Err(Error::ShapeMismatch("generators act on different carriers".into()));
    }
    let fast = kernel::FastCompose::new(ring)?;
    let (dp, dm) = dims;
    let split = dp * dp;
    let gens: Vec<Vec<u32>> = generators.iter().map(flatten).collect();
    let start = flatten(&PairMap::identity(ring, dims));
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut order = vec![start.clone()];
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            fast.mul(&x[..split], &g[..split], dp, &mut plus);
            fast.mul(&x[split..], &g[split..], dm, &mut minus);
            let mut y = plus.clone();
            y.extend_from_slice(&minus);
            if seen.insert(y.clone()) {
                if seen.len() as u128 > budget {
                    return Err(Error::BudgetExceeded { candidates: seen.len() as u128, budget });
                }
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(order.iter().map(|f| unflatten(ring, dims, f)).collect())
}

/// Set comparison of two automorphism sets of the same system.
#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub equal: bool,
    pub order_a: usize,
    pub order_b: usize,
    pub a_minus_b: usize,
    pub b_minus_a: usize,
    /// Up to three elements of each difference.
    pub a_minus_b_sample: Vec<PairMap>,
    pub b_minus_a_sample: Vec<PairMap>,
}

pub fn compare(a: &AutomorphismSet, b: &AutomorphismSet) -> Result<Comparison> {
    if a.system != b.system || a.ring != b.ring || a.kind != b.kind {
        return Err(Error::MixedSystems(
            format!("{} ({})", a.system, a.kind),
            format!("{} ({})", b.system, b.kind),
        ));
    }
    let only = |x: &AutomorphismSet, y: &AutomorphismSet| -> Vec<PairMap> {
        x.elements.iter().filter(|f| !y.contains(f)).cloned().collect()
    };
    let ab = only(a, b);
    let ba = only(b, a);
    Ok(Comparison {
        equal: ab.is_empty() && ba.is_empty(),
        order_a: a.order(),
        order_b: b.order(),
        a_minus_b: ab.len(),
        b_minus_a: ba.len(),
        a_minus_b_sample: ab.into_iter().take(3).collect(),
        b_minus_a_sample: ba.into_iter().take(3).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub order: usize,
    pub has_identity: bool,
    /// Closed under composition, hence under inverses for a finite set.
    pub closed: bool,
    /// A generating subset picked greedily in sort order.
    pub generators: usize,
}

impl GroupReport {
    pub fn is_group(&self) -> bool {
        self.has_identity && self.closed
    }
}

/// Check that a set is a group: pick generators greedily and compare their
/// closure with the set.
pub fn verify_group(set: &AutomorphismSet) -> Result<GroupReport> {
    let order = set.order();
    let has_identity = set.elements.iter().any(PairMap::is_identity);
    let mut gens: Vec<PairMap> = Vec::new();
    let mut span: HashMap<Vec<RingElement>, ()> = HashMap::new();
    let mut closed = true;
    for f in &set.elements {
        if span.contains_key(&f.key()) {
            continue;
        }
        gens.push(f.clone());
        match closure_elements(&set.ring, &gens, order as u128) {
            Ok(elems) => span = elems.iter().map(|e| (e.key(), ())).collect(),
            Err(Error::BudgetExceeded { .. }) => {
                closed = false;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if closed {
        closed = span.len() == order && set.elements.iter().all(|f| span.contains_key(&f.key()));
    }
    Ok(GroupReport { order, has_identity, closed, generators: gens.len() })
}

/// Index of the first element failing the automorphism predicate of `kind`.
pub fn first_non_automorphism(system: &NamedSystem, kind: AutKind, set: &AutomorphismSet) -> Result<Option<usize>> {
    for (idx, f) in set.elements.iter().enumerate() {
        let ok = match kind {
            AutKind::Pair => is_pair_automorphism(&as_pair(&system.structure)?, f)?,
            AutKind::Triple => f.plus == f.minus && is_triple_automorphism(&as_triple(&system.structure)?, &f.plus)?,
            AutKind::Algebra => f.plus == f.minus && is_algebra_automorphism(as_algebra(&system.structure)?, &f.plus)?,
        };
        if !ok {
            return Ok(Some(idx));
        }
    }
    Ok(None)
}

/// All of `GL_n(R)` when small, else elementary transvections and `diag(u, 1, ..., 1)`.
pub fn gl_generators(ring: &Ring, n: usize) -> Result<(Vec<Matrix>, &'static str)> {
    if gl_order(ring, n)? <= FULL_GL_LIMIT {
        return Ok((enumerate_gl(n, ring)?, "all of GL"));
    }
    let mut out = Vec::new();
    for u in ring.units()? {
        if ring.is_one(u) {
            continue;
        }
        let mut d = Matrix::identity(ring, n);
        d.set(0, 0, u);
        out.push(d);
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for r in ring.elements()? {
                if ring.is_zero(r) {
                    continue;
                }
                let mut e = Matrix::identity(ring, n);
                e.set(i, j, r);
                out.push(e);
            }
        }
    }
    Ok((out, "elementary and diagonal generators of GL"))
}

fn system_form(system: &NamedSystem) -> Result<&BilinearForm> {
    system.params.form.as_ref().ok_or_else(|| Error::BadInput(format!("{} has no bilinear form", system.label())))
}

fn diag(phi: Matrix) -> PairMap {
    PairMap { plus: phi.clone(), minus: phi }
}

fn conjugation(g: &Matrix, n: usize) -> Result<Matrix> {
    Ok(left_mult(g, n).mul(&right_mult(&g.inverse()?, n)))
}

/// Generators of the automorphism group predicted for a catalog system in its
/// natural kind, with a description.
pub fn family_generators(system: &NamedSystem) -> Result<(Vec<PairMap>, String)> {
    let ring = system.ring();
    if !ring.is_finite() {
        return Err(Error::NonEnumerableRing(ring.to_string()));
    }
    let n = system.params.n;
    let m = system.params.m.unwrap_or(n);
    let idempotents = ring.idempotents()?;
    let mut gens = Vec::new();
    let desc: String = match system.tag {
        SystemTag::VIV => {
            let form = system_form(system)?;
            for (a, _) in enumerate_go(form)? {
                gens.push(go_to_pair_aut(&a, form)?);
            }
            "{(a, m_a^-1 a) : a in GO(b)}".into()
        }
        SystemTag::ThatIV => {
            let form = system_form(system)?;
            for (a, mult) in enumerate_go(form)? {
                if ring.is_one(mult) {
                    gens.push(diag(a));
                }
            }
            "{a : a in O(b)}".into()
        }
        SystemTag::TIV | SystemTag::Jbilin => {
            let form = system_form(system)?;
            let one = Matrix::identity(ring, 1);
            let ortho: Vec<Matrix> = if form.dim() == 0 {
                vec![Matrix::identity(ring, 0)]
            } else {
                enumerate_go(form)?.into_iter().filter(|(_, mu)| ring.is_one(*mu)).map(|(a, _)| a).collect()
            };
            let roots = if system.tag == SystemTag::TIV { ring.mu_n(2)? } else { vec![ring.one()] };
            for f in &ortho {
                for &r in &roots {
                    gens.push(diag(one.direct_sum(f).scale(r)));
                }
            }
            if system.tag == SystemTag::TIV {
                "{r (1 + f) : f in O(V, b), r in mu_2}".into()
            } else {
                "{1 + f : f in O(V, b)}".into()
            }
        }
        SystemTag::VhI | SystemTag::VtI => {
            let (ga, da) = gl_generators(ring, m)?;
            let (gb, db) = gl_generators(ring, n)?;
            let hat = system.tag == SystemTag::VhI;
            for a in &ga {
                gens.push(if hat { hat_left(a, n)? } else { tilde_left(a, n)? });
            }
            for b in &gb {
                gens.push(if hat { hat_right(b, m)? } else { tilde_right(b, m)? });
            }
            let name = if hat { "L^_a, R^_b" } else { "L~_a, R~_b" };
            let mut d = format!("{{{name}}} with a, b over {da} / {db}");
            if m == n && n > 1 {
                for &e in &idempotents {
                    gens.push(transpose_twist_pair(ring, n, e)?);
                }
                d.push_str(", transpose twists for every idempotent");
            }
            d
        }
        SystemTag::TtI => {
            let go_m = enumerate_go(&BilinearForm::standard(ring, m))?;
            let go_n = enumerate_go(&BilinearForm::standard(ring, n))?;
            for (a, _) in &go_m {
                for (b, _) in &go_n {
                    if tti_membership(a, b)? {
                        gens.push(diag(tti_map(a, b)?));
                    }
                }
            }
            let mut d = "{X -> aXb : a in GO_m, b in GO_n, m_a m_b = 1}".to_string();
            if m == n && n > 1 {
                for &e in &idempotents {
                    gens.push(diag(transpose_twist(ring, n, e)?));
                }
                d.push_str(", transpose twists for every idempotent");
            }
            d
        }
        SystemTag::ThI | SystemTag::Mplus => {
            let (gs, dg) = gl_generators(ring, n)?;
            for g in &gs {
                gens.push(diag(conjugation(g, n)?));
            }
            for &e in &idempotents {
                gens.push(diag(transpose_twist(ring, n, e)?));
            }
            let mut d = format!("{{X -> gXg^-1}} with g over {dg}, transpose twists for every idempotent");
            if system.tag == SystemTag::ThI {
                for r in ring.mu_n(2)? {
                    gens.push(diag(Matrix::identity(ring, n * n).scale(r)));
                }
                d.push_str(", r id for r in mu_2");
            }
            d
        }
        SystemTag::Custom => return Err(Error::BadInput("custom systems have no generator family".into())),
    };
    Ok((gens, desc))
}

/// The closure of [`family_generators`], in the natural kind of the system.
pub fn generated_automorphisms(system: &NamedSystem, opts: &Options) -> Result<AutomorphismSet> {
    let (gens, desc) = family_generators(system)?;
    let kind = AutKind::natural(&system.structure);
    generate_closure(system.label(), system.ring(), kind, &gens, desc, opts.budget)
}

/// Exhaustive or generated automorphisms. Generated mode only supports the natural kind.
pub fn automorphisms(system: &NamedSystem, kind: AutKind, mode: Mode, opts: &Options) -> Result<AutomorphismSet> {
    match mode {
        Mode::Exhaustive => enumerate_automorphisms(system, kind, opts),
        Mode::Generated => {
            if kind != AutKind::natural(&system.structure) {
                return Err(Error::BadInput(format!(
                    "generated mode for {} only supports {} automorphisms",
                    system.label(),
                    AutKind::natural(&system.structure)
                )));
            }
            generated_automorphisms(system, opts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_vhi, standard_system};

    fn f(p: u32) -> Ring {
        Ring::prime(p).unwrap()
    }

    fn opts(jobs: usize) -> Options {
        Options { budget: DEFAULT_BUDGET, jobs }
    }

    #[test]
    fn small_orders() {
        let v = standard_system(SystemTag::VIV, &f(3), None, 1).unwrap();
        assert_eq!(enumerate_automorphisms(&v, AutKind::Pair, &opts(1)).unwrap().order(), 2);
        let t = standard_system(SystemTag::ThatIV, &f(5), None, 1).unwrap();
        assert_eq!(enumerate_automorphisms(&t, AutKind::Triple, &opts(1)).unwrap().order(), 2);
        let h = make_vhi(&f(3), 1, 2).unwrap();
        let ex = enumerate_automorphisms(&h, AutKind::Pair, &opts(1)).unwrap();
        assert_eq!(ex.order(), 48);
        let gen = generated_automorphisms(&h, &opts(1)).unwrap();
        assert!(compare(&ex, &gen).unwrap().equal);
        assert!(verify_group(&ex).unwrap().is_group());
    }

    #[test]
    fn trace_pruning_matches_free_search() {
        let mut h = make_vhi(&f(3), 1, 2).unwrap();
        let with = enumerate_automorphisms(&h, AutKind::Pair, &opts(1)).unwrap();
        h.trace = None;
        let without = enumerate_automorphisms(&h, AutKind::Pair, &opts(1)).unwrap();
        assert_eq!(with.elements(), without.elements());
    }

    #[test]
    fn jobs_do_not_change_output() {
        let t = standard_system(SystemTag::ThatIV, &f(3), None, 2).unwrap();
        let a = enumerate_automorphisms(&t, AutKind::Triple, &opts(1)).unwrap();
        let b = enumerate_automorphisms(&t, AutKind::Triple, &opts(4)).unwrap();
        assert_eq!(a.to_json(true).to_string(), b.to_json(true).to_string());
    }

    #[test]
    fn errors() {
        let v = standard_system(SystemTag::VIV, &Ring::rationals(), None, 2).unwrap();
        assert!(matches!(enumerate_automorphisms(&v, AutKind::Pair, &opts(1)), Err(Error::NonEnumerableRing(_))));
        let h = make_vhi(&f(3), 2, 2).unwrap();
        let tight = Options { budget: 1000, jobs: 1 };
        assert!(matches!(enumerate_automorphisms(&h, AutKind::Pair, &tight), Err(Error::BudgetExceeded { .. })));
        let a = standard_system(SystemTag::VIV, &f(3), None, 1).unwrap();
        let b = standard_system(SystemTag::VIV, &f(5), None, 1).unwrap();
        let sa = enumerate_automorphisms(&a, AutKind::Pair, &opts(1)).unwrap();
        let sb = enumerate_automorphisms(&b, AutKind::Pair, &opts(1)).unwrap();
        assert!(matches!(compare(&sa, &sb), Err(Error::MixedSystems(..))));
    }

    #[test]
    fn identity_closure() {
        let r = f(3);
        let id = PairMap::identity(&r, (2, 2));
        let s = generate_closure("x".into(), &r, AutKind::Pair, &[id], String::new(), 10).unwrap();
        assert_eq!(s.order(), 1);
    }
}
