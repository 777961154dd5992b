//! Jordan pairs, triple systems and algebras as dense structure constants over
//! fixed ordered bases, with exhaustive axiom checks and automorphism tests.
//!
//! All identities checked here are multilinear (or, for the Jordan identity of
//! an algebra, reduced to monomial coefficients), so evaluating them on basis
//! tuples decides them over every scalar extension.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring::{Ring, RingDescriptor, RingElement};

/// Largest carrier dimension the axiom checker accepts.
pub const MAX_AXIOM_DIM: usize = 6;

pub type Vector = Vec<RingElement>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Structure constants of a trilinear map `V x W x V -> V`; `outer = dim V`,
/// `inner = dim W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleTensor {
    ring: Ring,
    outer: usize,
    inner: usize,
    coeffs: Vec<RingElement>,
}

impl TripleTensor {
    pub fn zeros(ring: &Ring, outer: usize, inner: usize) -> TripleTensor {
        TripleTensor { ring: ring.clone(), outer, inner, coeffs: vec![ring.zero(); outer * inner * outer * outer] }
    }

    /// Tensor whose value on basis vectors `(e_i, f_j, e_k)` is `f(i, j, k)`.
    pub fn from_fn(ring: &Ring, outer: usize, inner: usize, mut f: impl FnMut(usize, usize, usize) -> Vector) -> TripleTensor {
        let mut t = TripleTensor::zeros(ring, outer, inner);
        for i in 0..outer {
            for j in 0..inner {
                for k in 0..outer {
                    let v = f(i, j, k);
                    assert_eq!(v.len(), outer, "triple product value has the wrong length");
                    let base = t.offset(i, j, k);
                    t.coeffs[base..base + outer].copy_from_slice(&v);
                }
            }
        }
        t
    }

    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        ((i * self.inner + j) * self.outer + k) * self.outer
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn outer(&self) -> usize {
        self.outer
    }

    pub fn inner(&self) -> usize {
        self.inner
    }

    /// `{e_i, f_j, e_k}` as a coordinate slice.
    pub fn basis_value(&self, i: usize, j: usize, k: usize) -> &[RingElement] {
        let base = self.offset(i, j, k);
        &self.coeffs[base..base + self.outer]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, out: usize, x: RingElement) {
        let base = self.offset(i, j, k);
        self.coeffs[base + out] = x;
    }

    pub fn coefficients(&self) -> &[RingElement] {
        &self.coeffs
    }

    /// Nonzero constants as `(i, j, k, out, coeff)`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, usize, usize, RingElement)> + '_ {
        let (o, n) = (self.outer, self.inner);
        self.coeffs.iter().enumerate().filter(|(_, &c)| !self.ring.is_zero(c)).map(move |(idx, &c)| {
            let out = idx % o;
            let k = (idx / o) % o;
            let j = (idx / (o * o)) % n;
            let i = idx / (o * o * n);
            (i, j, k, out, c)
        })
    }

    pub fn eval(&self, x: &[RingElement], y: &[RingElement], z: &[RingElement]) -> Vector {
        assert_eq!((x.len(), y.len(), z.len()), (self.outer, self.inner, self.outer), "triple argument lengths");
        let r = &self.ring;
        let mut out = vec![r.zero(); self.outer];
        for (i, &xi) in x.iter().enumerate().filter(|(_, &v)| !r.is_zero(v)) {
            for (j, &yj) in y.iter().enumerate().filter(|(_, &v)| !r.is_zero(v)) {
                let xy = r.mul(xi, yj);
                for (k, &zk) in z.iter().enumerate().filter(|(_, &v)| !r.is_zero(v)) {
                    let s = r.mul(xy, zk);
                    for (o, &c) in self.basis_value(i, j, k).iter().enumerate() {
                        if !r.is_zero(c) {
                            out[o] = r.add(out[o], r.mul(s, c));
                        }
                    }
                }
            }
        }
        out
    }

    /// Matrix of `z -> {x, y, z}`.
    pub fn d_matrix(&self, x: &[RingElement], y: &[RingElement]) -> Matrix {
        let r = &self.ring;
        let cols: Vec<Vector> = (0..self.outer).map(|k| self.eval(x, y, &basis(r, self.outer, k))).collect();
        Matrix::from_fn(r, self.outer, self.outer, |i, j| cols[j][i])
    }

    fn basis_d_matrix(&self, i: usize, j: usize) -> Matrix {
        Matrix::from_fn(&self.ring, self.outer, self.outer, |o, k| self.basis_value(i, j, k)[o])
    }

    pub fn scale(&self, c: RingElement) -> TripleTensor {
        let r = &self.ring;
        TripleTensor { coeffs: self.coeffs.iter().map(|&x| r.mul(c, x)).collect(), ..self.clone() }
    }

    fn extend_to(&self, ring: &Ring) -> Result<TripleTensor> {
        let base = &self.ring;
        let coeffs = self.coeffs.iter().map(|&c| ring.embed(base, c)).collect::<Result<Vec<_>>>()?;
        Ok(TripleTensor { ring: ring.clone(), outer: self.outer, inner: self.inner, coeffs })
    }
}

/// The `k`-th standard basis vector of length `n`.
pub fn basis(ring: &Ring, n: usize, k: usize) -> Vector {
    let mut v = vec![ring.zero(); n];
    v[k] = ring.one();
    v
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanPair {
    ring: Ring,
    products: [TripleTensor; 2],
}

impl JordanPair {
    /// `plus: V+ x V- x V+ -> V+`, `minus: V- x V+ x V- -> V-`.
    pub fn new(plus: TripleTensor, minus: TripleTensor) -> Result<JordanPair> {
        if plus.outer != minus.inner || plus.inner != minus.outer {
            return Err(Error::ShapeMismatch("pair tensors disagree on carrier dimensions".into()));
        }
        if plus.ring != minus.ring {
            return Err(Error::IncompatibleRings { from: plus.ring.to_string(), to: minus.ring.to_string() });
        }
        Ok(JordanPair { ring: plus.ring.clone(), products: [plus, minus] })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dim(&self, sigma: Sign) -> usize {
        self.products[sigma.index()].outer
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim(Sign::Plus), self.dim(Sign::Minus))
    }

    pub fn product(&self, sigma: Sign) -> &TripleTensor {
        &self.products[sigma.index()]
    }

    pub fn triple(&self, sigma: Sign, x: &[RingElement], y: &[RingElement], z: &[RingElement]) -> Vector {
        self.product(sigma).eval(x, y, z)
    }

    pub fn extend_to(&self, ring: &Ring) -> Result<JordanPair> {
        JordanPair::new(self.products[0].extend_to(ring)?, self.products[1].extend_to(ring)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanTriple {
    product: TripleTensor,
}

impl JordanTriple {
    pub fn new(product: TripleTensor) -> Result<JordanTriple> {
        if product.outer != product.inner {
            return Err(Error::ShapeMismatch("triple system tensor must be square".into()));
        }
        Ok(JordanTriple { product })
    }

    pub fn ring(&self) -> &Ring {
        &self.product.ring
    }

    pub fn dim(&self) -> usize {
        self.product.outer
    }

    pub fn product(&self) -> &TripleTensor {
        &self.product
    }

    pub fn triple(&self, x: &[RingElement], y: &[RingElement], z: &[RingElement]) -> Vector {
        self.product.eval(x, y, z)
    }

    /// The same carrier with the product multiplied by `c`.
    pub fn scaled(&self, c: RingElement) -> JordanTriple {
        JordanTriple { product: self.product.scale(c) }
    }

    pub fn extend_to(&self, ring: &Ring) -> Result<JordanTriple> {
        JordanTriple::new(self.product.extend_to(ring)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanAlgebra {
    ring: Ring,
    dim: usize,
    coeffs: Vec<RingElement>,
    unit: Option<Vector>,
}

impl JordanAlgebra {
    /// Algebra whose product on basis vectors is `f(i, j)`.
    pub fn from_fn(ring: &Ring, dim: usize, unit: Option<Vector>, mut f: impl FnMut(usize, usize) -> Vector) -> JordanAlgebra {
        let mut coeffs = Vec::with_capacity(dim * dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = f(i, j);
                assert_eq!(v.len(), dim, "product value has the wrong length");
                coeffs.extend(v);
            }
        }
        JordanAlgebra { ring: ring.clone(), dim, coeffs, unit }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> Option<&[RingElement]> {
        self.unit.as_deref()
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &[RingElement] {
        let base = (i * self.dim + j) * self.dim;
        &self.coeffs[base..base + self.dim]
    }

    pub fn mul(&self, x: &[RingElement], y: &[RingElement]) -> Vector {
        let r = &self.ring;
        let mut out = vec![r.zero(); self.dim];
        for (i, &xi) in x.iter().enumerate().filter(|(_, &v)| !r.is_zero(v)) {
            for (j, &yj) in y.iter().enumerate().filter(|(_, &v)| !r.is_zero(v)) {
                let s = r.mul(xi, yj);
                for (o, &c) in self.basis_product(i, j).iter().enumerate() {
                    if !r.is_zero(c) {
                        out[o] = r.add(out[o], r.mul(s, c));
                    }
                }
            }
        }
        out
    }

    pub fn extend_to(&self, ring: &Ring) -> Result<JordanAlgebra> {
        let base = &self.ring;
        let map = |v: &[RingElement]| v.iter().map(|&c| ring.embed(base, c)).collect::<Result<Vec<_>>>();
        Ok(JordanAlgebra {
            ring: ring.clone(),
            dim: self.dim,
            coeffs: map(&self.coeffs)?,
            unit: self.unit.as_deref().map(map).transpose()?,
        })
    }
}

/// Any of the three structures, for code that treats them uniformly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Pair(JordanPair),
    Triple(JordanTriple),
    Algebra(JordanAlgebra),
}

impl Structure {
    pub fn ring(&self) -> &Ring {
        match self {
            Structure::Pair(p) => p.ring(),
            Structure::Triple(t) => t.ring(),
            Structure::Algebra(a) => a.ring(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Structure::Pair(_) => "pair",
            Structure::Triple(_) => "triple",
            Structure::Algebra(_) => "algebra",
        }
    }

    /// Carrier dimensions: `[d+, d-]` for pairs, `[d]` otherwise.
    pub fn dims(&self) -> Vec<usize> {
        match self {
            Structure::Pair(p) => vec![p.dim(Sign::Plus), p.dim(Sign::Minus)],
            Structure::Triple(t) => vec![t.dim()],
            Structure::Algebra(a) => vec![a.dim()],
        }
    }

    pub fn check_axioms(&self) -> AxiomReport {
        match self {
            Structure::Pair(p) => check_pair_axioms(p),
            Structure::Triple(t) => check_triple_axioms(t),
            Structure::Algebra(a) => check_algebra_axioms(a),
        }
    }

    pub fn extend_to(&self, ring: &Ring) -> Result<Structure> {
        scalar_extend(self, ring)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    OuterSymmetry,
    DCommutator,
    Commutativity,
    JordanIdentity,
    Unit,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::OuterSymmetry => "outer symmetry",
            Axiom::DCommutator => "D-commutator",
            Axiom::Commutativity => "commutativity",
            Axiom::JordanIdentity => "Jordan identity",
            Axiom::Unit => "unit",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<&'static str>,
    /// Basis indices of the failing tuple.
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum AxiomOutcome {
    Pass,
    Fail { violation: Violation },
    Refused { dim: usize, limit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub kind: &'static str,
    #[serde(flatten)]
    pub outcome: AxiomOutcome,
    /// Number of basis tuples evaluated.
    pub checked: u64,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.outcome == AxiomOutcome::Pass
    }
}

fn refuse_if_large(kind: &'static str, dims: &[usize]) -> Option<AxiomReport> {
    let dim = dims.iter().copied().max().unwrap_or(0);
    (dim > MAX_AXIOM_DIM).then_some(AxiomReport {
        kind,
        outcome: AxiomOutcome::Refused { dim, limit: MAX_AXIOM_DIM },
        checked: 0,
    })
}

fn check_pair_axioms(pair: &JordanPair) -> AxiomReport {
    let (dp, dm) = pair.dims();
    if let Some(report) = refuse_if_large("pair", &[dp, dm]) {
        return report;
    }
    let mut checked = 0u64;
    let fail = |axiom, sign: Sign, indices: Vec<usize>, checked| AxiomReport {
        kind: "pair",
        outcome: AxiomOutcome::Fail { violation: Violation { axiom, sign: Some(sign.symbol()), indices } },
        checked,
    };
    for sigma in Sign::BOTH {
        let t = pair.product(sigma);
        for i in 0..t.outer {
            for j in 0..t.inner {
                for k in 0..t.outer {
                    checked += 1;
                    if t.basis_value(i, j, k) != t.basis_value(k, j, i) {
                        return fail(Axiom::OuterSymmetry, sigma, vec![i, j, k], checked);
                    }
                }
            }
        }
    }
    let ring = pair.ring();
    // d[σ][a][b] = D^σ_{e_a, f_b}
    let d: Vec<Vec<Vec<Matrix>>> = Sign::BOTH
        .iter()
        .map(|&s| {
            let t = pair.product(s);
            (0..t.outer).map(|a| (0..t.inner).map(|b| t.basis_d_matrix(a, b)).collect()).collect()
        })
        .collect();
    for sigma in Sign::BOTH {
        let t = pair.product(sigma);
        let other = pair.product(sigma.flip());
        let ds = &d[sigma.index()];
        let combine = |coeffs: &[RingElement], pick: &dyn Fn(usize) -> Matrix| -> Matrix {
            let mut acc = Matrix::zeros(ring, t.outer, t.outer);
            for (idx, &c) in coeffs.iter().enumerate() {
                if !ring.is_zero(c) {
                    acc = acc.add(&pick(idx).scale(c));
                }
            }
            acc
        };
        for x in 0..t.outer {
            for y in 0..t.inner {
                for u in 0..t.outer {
                    for v in 0..t.inner {
                        checked += 1;
                        let dxy = &ds[x][y];
                        let duv = &ds[u][v];
                        let lhs = dxy.mul(duv).sub(&duv.mul(dxy));
                        // D_{D_{x,y} u, v}
                        let first = combine(t.basis_value(x, y, u), &|i| ds[i][v].clone());
                        // D_{u, D^{-σ}_{y,x} v}
                        let second = combine(other.basis_value(y, x, v), &|j| ds[u][j].clone());
                        if lhs != first.sub(&second) {
                            return fail(Axiom::DCommutator, sigma, vec![x, y, u, v], checked);
                        }
                    }
                }
            }
        }
    }
    AxiomReport { kind: "pair", outcome: AxiomOutcome::Pass, checked }
}

fn check_triple_axioms(triple: &JordanTriple) -> AxiomReport {
    if let Some(report) = refuse_if_large("triple", &[triple.dim()]) {
        return report;
    }
    let mut report = check_pair_axioms(&pair_from_triple(triple));
    report.kind = "triple";
    if let AxiomOutcome::Fail { violation } = &mut report.outcome {
        violation.sign = None;
    }
    report
}

fn check_algebra_axioms(alg: &JordanAlgebra) -> AxiomReport {
    let n = alg.dim;
    if let Some(report) = refuse_if_large("algebra", &[n]) {
        return report;
    }
    let r = &alg.ring;
    let mut checked = 0u64;
    let fail = |axiom, indices, checked| AxiomReport {
        kind: "algebra",
        outcome: AxiomOutcome::Fail { violation: Violation { axiom, sign: None, indices } },
        checked,
    };
    for i in 0..n {
        for j in 0..n {
            checked += 1;
            if alg.basis_product(i, j) != alg.basis_product(j, i) {
                return fail(Axiom::Commutativity, vec![i, j], checked);
            }
        }
    }
    if let Some(unit) = alg.unit() {
        for i in 0..n {
            checked += 1;
            let e = basis(r, n, i);
            if alg.mul(unit, &e) != e {
                return fail(Axiom::Unit, vec![i], checked);
            }
        }
    }
    // (x^2 y) x = x^2 (y x) is cubic in x. Writing x = sum t_a e_a, the identity
    // holds over every scalar extension iff each monomial coefficient vanishes:
    // the sum over distinct orderings (a, b, c) of the multiset {i, j, k} of
    // ((e_a e_b) y) e_c - (e_a e_b)(y e_c).
    let prods: Vec<Vec<Vector>> = (0..n).map(|a| (0..n).map(|b| alg.basis_product(a, b).to_vec()).collect()).collect();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let orders = distinct_orderings([i, j, k]);
                for l in 0..n {
                    checked += 1;
                    let y = basis(r, n, l);
                    let mut acc = vec![r.zero(); n];
                    for [a, b, c] in &orders {
                        let ab = &prods[*a][*b];
                        let ec = basis(r, n, *c);
                        let left = alg.mul(&alg.mul(ab, &y), &ec);
                        let right = alg.mul(ab, &alg.mul(&y, &ec));
                        for o in 0..n {
                            acc[o] = r.add(acc[o], r.sub(left[o], right[o]));
                        }
                    }
                    if acc.iter().any(|&c| !r.is_zero(c)) {
                        return fail(Axiom::JordanIdentity, vec![i, j, k, l], checked);
                    }
                }
            }
        }
    }
    AxiomReport { kind: "algebra", outcome: AxiomOutcome::Pass, checked }
}

fn distinct_orderings(m: [usize; 3]) -> Vec<[usize; 3]> {
    let [a, b, c] = m;
    let mut all = vec![[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]];
    all.sort();
    all.dedup();
    all
}

/// `{x, y, z} = (xy)z + (zy)x - (zx)y`, unscaled.
pub fn triple_from_algebra(alg: &JordanAlgebra) -> Result<JordanTriple> {
    let report = check_algebra_axioms(alg);
    if let AxiomOutcome::Fail { violation } = report.outcome {
        return Err(Error::AxiomFailure(violation.axiom.to_string()));
    }
    let r = &alg.ring;
    let n = alg.dim;
    let e: Vec<Vector> = (0..n).map(|i| basis(r, n, i)).collect();
    let product = TripleTensor::from_fn(r, n, n, |i, j, k| {
        let a = alg.mul(alg.basis_product(i, j), &e[k]);
        let b = alg.mul(alg.basis_product(k, j), &e[i]);
        let c = alg.mul(alg.basis_product(k, i), &e[j]);
        (0..n).map(|o| r.sub(r.add(a[o], b[o]), c[o])).collect()
    });
    JordanTriple::new(product)
}

/// The pair `(T, T)` with both products equal to the triple product.
pub fn pair_from_triple(triple: &JordanTriple) -> JordanPair {
    JordanPair::new(triple.product.clone(), triple.product.clone()).expect("square tensor")
}

pub fn scalar_extend(structure: &Structure, ring: &Ring) -> Result<Structure> {
    Ok(match structure {
        Structure::Pair(p) => Structure::Pair(p.extend_to(ring)?),
        Structure::Triple(t) => Structure::Triple(t.extend_to(ring)?),
        Structure::Algebra(a) => Structure::Algebra(a.extend_to(ring)?),
    })
}

fn check_len(v: &[RingElement], n: usize, what: &str) -> Result<()> {
    if v.len() == n {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("{what} has length {}, expected {n}", v.len())))
    }
}

/// Matrix of `z -> {x, y, z}^σ`.
pub fn d_operator(pair: &JordanPair, sigma: Sign, x: &[RingElement], y: &[RingElement]) -> Result<Matrix> {
    check_len(x, pair.dim(sigma), "x")?;
    check_len(y, pair.dim(sigma.flip()), "y")?;
    Ok(pair.product(sigma).d_matrix(x, y))
}

/// `Q_x(y) = {x, y, x} / 2`.
pub fn q_operator(pair: &JordanPair, sigma: Sign, x: &[RingElement], y: &[RingElement]) -> Result<Vector> {
    check_len(x, pair.dim(sigma), "x")?;
    check_len(y, pair.dim(sigma.flip()), "y")?;
    let r = pair.ring();
    Ok(pair.triple(sigma, x, y, x).into_iter().map(|c| r.mul(r.half(), c)).collect())
}

/// A pair of invertible linear maps on the two carriers of a pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PairMap {
    pub plus: Matrix,
    pub minus: Matrix,
}

impl PairMap {
    pub fn new(plus: Matrix, minus: Matrix) -> Result<PairMap> {
        for m in [&plus, &minus] {
            if !m.is_square() {
                return Err(Error::ShapeMismatch("pair map components must be square".into()));
            }
            if !m.is_invertible() {
                return Err(Error::NotInvertible);
            }
        }
        Ok(PairMap { plus, minus })
    }

    pub fn identity(ring: &Ring, dims: (usize, usize)) -> PairMap {
        PairMap { plus: Matrix::identity(ring, dims.0), minus: Matrix::identity(ring, dims.1) }
    }

    /// `(φ, φ)`, the pair map of a triple-system map.
    pub fn diagonal(phi: Matrix) -> Result<PairMap> {
        PairMap::new(phi.clone(), phi)
    }

    pub fn get(&self, sigma: Sign) -> &Matrix {
        match sigma {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        }
    }

    pub fn ring(&self) -> &Ring {
        self.plus.ring()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.plus.rows(), self.minus.rows())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PairMap) -> PairMap {
        PairMap { plus: self.plus.mul(&other.plus), minus: self.minus.mul(&other.minus) }
    }

    pub fn inverse(&self) -> Result<PairMap> {
        Ok(PairMap { plus: self.plus.inverse()?, minus: self.minus.inverse()? })
    }

    pub fn is_identity(&self) -> bool {
        self.plus.is_identity() && self.minus.is_identity()
    }

    /// Flattened entries; the canonical sort and hash key.
    pub fn key(&self) -> Vec<RingElement> {
        self.plus.entries().iter().chain(self.minus.entries()).copied().collect()
    }
}

/// Whether `outer(T_src(e_i, f_j, e_k)) = T_dst(outer e_i, inner f_j, outer e_k)` on all basis triples.
fn tensor_transports(src: &TripleTensor, dst: &TripleTensor, outer: &Matrix, inner: &Matrix) -> bool {
    let outer_cols: Vec<Vector> = (0..src.outer).map(|i| outer.col(i)).collect();
    let inner_cols: Vec<Vector> = (0..src.inner).map(|j| inner.col(j)).collect();
    for i in 0..src.outer {
        for j in 0..src.inner {
            for k in 0..src.outer {
                let lhs = outer.apply(src.basis_value(i, j, k));
                let rhs = dst.eval(&outer_cols[i], &inner_cols[j], &outer_cols[k]);
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

fn check_map_shape(m: &Matrix, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.rows() == rows && m.cols() == cols {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("{what} is {}x{}, expected {rows}x{cols}", m.rows(), m.cols())))
    }
}

/// Whether `f` is an isomorphism from `src` onto `dst`.
pub fn is_pair_isomorphism(src: &JordanPair, dst: &JordanPair, f: &PairMap) -> Result<bool> {
    for sigma in Sign::BOTH {
        check_map_shape(f.get(sigma), dst.dim(sigma), src.dim(sigma), "pair map component")?;
    }
    if !f.plus.is_invertible() || !f.minus.is_invertible() {
        return Ok(false);
    }
    Ok(Sign::BOTH.iter().all(|&s| {
        tensor_transports(src.product(s), dst.product(s), f.get(s), f.get(s.flip()))
    }))
}

pub fn is_pair_automorphism(pair: &JordanPair, f: &PairMap) -> Result<bool> {
    is_pair_isomorphism(pair, pair, f)
}

pub fn is_triple_automorphism(triple: &JordanTriple, phi: &Matrix) -> Result<bool> {
    let d = triple.dim();
    check_map_shape(phi, d, d, "triple map")?;
    if !phi.is_invertible() {
        return Ok(false);
    }
    Ok(tensor_transports(&triple.product, &triple.product, phi, phi))
}

pub fn is_algebra_automorphism(alg: &JordanAlgebra, phi: &Matrix) -> Result<bool> {
    let n = alg.dim;
    check_map_shape(phi, n, n, "algebra map")?;
    if !phi.is_invertible() {
        return Ok(false);
    }
    let cols: Vec<Vector> = (0..n).map(|i| phi.col(i)).collect();
    for i in 0..n {
        for j in 0..n {
            if phi.apply(alg.basis_product(i, j)) != alg.mul(&cols[i], &cols[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The unique `φ⁻` with `t(φ⁺x, φ⁻y) = t(x, y)`, where `t(x, y) = xᵀ G y`.
pub fn dual_inverse(gram: &Matrix, plus: &Matrix) -> Result<Matrix> {
    if !gram.is_square() || !plus.is_square() || gram.rows() != plus.rows() {
        return Err(Error::ShapeMismatch("trace Gram matrix and map disagree".into()));
    }
    let gram_inv = gram.inverse().map_err(|_| Error::DegenerateTrace)?;
    // φ⁺ᵀ G φ⁻ = G
    Ok(gram_inv.mul(&plus.transpose().inverse()?).mul(gram))
}

// JSON interchange.

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    pub i: usize,
    pub j: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub out: usize,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureJson {
    pub kind: String,
    pub ring: String,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Vec<String>>,
    pub entries: Vec<TensorEntry>,
}

fn tensor_entries(t: &TripleTensor, sigma: Option<Sign>) -> Vec<TensorEntry> {
    t.nonzero()
        .map(|(i, j, k, out, c)| TensorEntry {
            sigma: sigma.map(|s| s.symbol().to_string()),
            i,
            j,
            k: Some(k),
            out,
            coeff: t.ring.show(c),
        })
        .collect()
}

impl Structure {
    pub fn to_json(&self) -> StructureJson {
        let ring = self.ring().to_string();
        match self {
            Structure::Pair(p) => StructureJson {
                kind: "pair".into(),
                ring,
                dims: self.dims(),
                unit: None,
                entries: Sign::BOTH.iter().flat_map(|&s| tensor_entries(p.product(s), Some(s))).collect(),
            },
            Structure::Triple(t) => StructureJson {
                kind: "triple".into(),
                ring,
                dims: self.dims(),
                unit: None,
                entries: tensor_entries(&t.product, None),
            },
            Structure::Algebra(a) => {
                let r = &a.ring;
                let mut entries = Vec::new();
                for i in 0..a.dim {
                    for j in 0..a.dim {
                        for (out, &c) in a.basis_product(i, j).iter().enumerate() {
                            if !r.is_zero(c) {
                                entries.push(TensorEntry { sigma: None, i, j, k: None, out, coeff: r.show(c) });
                            }
                        }
                    }
                }
                StructureJson {
                    kind: "algebra".into(),
                    ring,
                    dims: self.dims(),
                    unit: a.unit.as_ref().map(|u| u.iter().map(|&c| r.show(c)).collect()),
                    entries,
                }
            }
        }
    }

    pub fn from_json(doc: &StructureJson) -> Result<Structure> {
        let ring = Ring::new(doc.ring.parse::<RingDescriptor>()?)?;
        let bad = |msg: &str| Error::Parse(format!("structure JSON: {msg}"));
        let in_range = |e: &TensorEntry, dims: [usize; 3]| {
            e.i < dims[0] && e.j < dims[1] && e.k.is_some_and(|k| k < dims[2]) && e.out < dims[0]
        };
        match (doc.kind.as_str(), doc.dims.as_slice()) {
            ("pair", &[dp, dm]) => {
                let mut t = [TripleTensor::zeros(&ring, dp, dm), TripleTensor::zeros(&ring, dm, dp)];
                for e in &doc.entries {
                    let sigma = match e.sigma.as_deref() {
                        Some("+") => Sign::Plus,
                        Some("-") => Sign::Minus,
                        _ => return Err(bad("pair entries need sigma + or -")),
                    };
                    let dims = if sigma == Sign::Plus { [dp, dm, dp] } else { [dm, dp, dm] };
                    if !in_range(e, dims) {
                        return Err(bad("entry index out of range"));
                    }
                    let c = ring.parse_element(&e.coeff)?;
                    t[sigma.index()].set(e.i, e.j, e.k.unwrap_or(0), e.out, c);
                }
                let [plus, minus] = t;
                Ok(Structure::Pair(JordanPair::new(plus, minus)?))
            }
            ("triple", &[d]) => {
                let mut t = TripleTensor::zeros(&ring, d, d);
                for e in &doc.entries {
                    if !in_range(e, [d, d, d]) {
                        return Err(bad("entry index out of range"));
                    }
                    t.set(e.i, e.j, e.k.unwrap_or(0), e.out, ring.parse_element(&e.coeff)?);
                }
                Ok(Structure::Triple(JordanTriple::new(t)?))
            }
            ("algebra", &[d]) => {
                let mut coeffs = vec![ring.zero(); d * d * d];
                for e in &doc.entries {
                    if e.i >= d || e.j >= d || e.out >= d {
                        return Err(bad("entry index out of range"));
                    }
                    coeffs[(e.i * d + e.j) * d + e.out] = ring.parse_element(&e.coeff)?;
                }
                let unit = match &doc.unit {
                    Some(u) if u.len() == d => Some(u.iter().map(|s| ring.parse_element(s)).collect::<Result<Vec<_>>>()?),
                    Some(_) => return Err(bad("unit has the wrong length")),
                    None => None,
                };
                Ok(Structure::Algebra(JordanAlgebra { ring, dim: d, coeffs, unit }))
            }
            _ => Err(bad("unknown kind or wrong number of dims")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> Ring {
        Ring::prime(p).unwrap()
    }

    /// Dimension-2 triple with `{e_a, e_b, e_a} = e_a` as its only constant.
    fn toy_triple(ring: &Ring, a: usize, b: usize) -> JordanTriple {
        let mut t = TripleTensor::zeros(ring, 2, 2);
        t.set(a, b, a, a, ring.one());
        JordanTriple::new(t).unwrap()
    }

    #[test]
    fn toy_tensors() {
        let r = f(3);
        let good = toy_triple(&r, 0, 0);
        assert!(check_triple_axioms(&good).passed());
        let bad = toy_triple(&r, 0, 1);
        let report = check_triple_axioms(&bad);
        match report.outcome {
            AxiomOutcome::Fail { violation } => assert_eq!(violation.axiom, Axiom::DCommutator),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn outer_symmetry_violation_is_reported() {
        let r = f(5);
        let mut t = TripleTensor::zeros(&r, 2, 2);
        t.set(0, 0, 1, 0, r.one());
        let report = check_triple_axioms(&JordanTriple::new(t).unwrap());
        assert!(matches!(
            report.outcome,
            AxiomOutcome::Fail { violation: Violation { axiom: Axiom::OuterSymmetry, .. } }
        ));
    }

    #[test]
    fn refuses_large_dimensions() {
        let r = f(3);
        let t = JordanTriple::new(TripleTensor::zeros(&r, 7, 7)).unwrap();
        assert!(matches!(check_triple_axioms(&t).outcome, AxiomOutcome::Refused { dim: 7, .. }));
    }

    #[test]
    fn one_dimensional_algebra() {
        let r = f(5);
        let j = JordanAlgebra::from_fn(&r, 1, Some(vec![r.one()]), |_, _| vec![r.one()]);
        assert!(check_algebra_axioms(&j).passed());
        let t = triple_from_algebra(&j).unwrap();
        assert_eq!(t.product().basis_value(0, 0, 0), &[r.one()]);
        let x = [r.from_int(2)];
        let y = [r.from_int(3)];
        let z = [r.from_int(4)];
        assert_eq!(t.triple(&x, &y, &z), vec![r.from_int(24)]);
    }

    #[test]
    fn noncommutative_algebra_fails() {
        let r = f(3);
        // Matrix algebra M_1 x "shifted": e0 e1 = e1, e1 e0 = 0.
        let j = JordanAlgebra::from_fn(&r, 2, None, |i, k| {
            if (i, k) == (0, 1) { vec![r.zero(), r.one()] } else { vec![r.zero(), r.zero()] }
        });
        assert!(matches!(
            check_algebra_axioms(&j).outcome,
            AxiomOutcome::Fail { violation: Violation { axiom: Axiom::Commutativity, .. } }
        ));
        assert!(matches!(triple_from_algebra(&j), Err(Error::AxiomFailure(_))));
    }

    #[test]
    fn identity_and_zero_operators() {
        let r = f(3);
        let t = toy_triple(&r, 0, 0);
        let p = pair_from_triple(&t);
        let zero = vec![r.zero(); 2];
        let y = vec![r.one(), r.one()];
        assert!(d_operator(&p, Sign::Plus, &zero, &y).unwrap().is_zero());
        assert_eq!(q_operator(&p, Sign::Minus, &zero, &y).unwrap(), zero);
        assert!(matches!(d_operator(&p, Sign::Plus, &[r.one()], &y), Err(Error::ShapeMismatch(_))));
        assert!(is_pair_automorphism(&p, &PairMap::identity(&r, (2, 2))).unwrap());
    }

    #[test]
    fn dual_inverse_of_identity() {
        let r = f(5);
        let g = Matrix::identity(&r, 3);
        assert!(dual_inverse(&g, &g).unwrap().is_identity());
        let degenerate = Matrix::zeros(&r, 3, 3);
        assert_eq!(dual_inverse(&degenerate, &g), Err(Error::DegenerateTrace));
    }

    #[test]
    fn json_round_trip() {
        let r = f(3);
        let s = Structure::Triple(toy_triple(&r, 0, 1));
        let doc = s.to_json();
        let text = serde_json::to_string(&doc).unwrap();
        let back: StructureJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Structure::from_json(&back).unwrap(), s);
    }
}
