//! Column-by-column exhaustive search for structure-preserving matrices over a
//! finite ring, on element indices instead of [`RingElement`] values.
//!
//! Every defining identity is split into basis checks. A check runs as soon
//! as all matrix columns it reads are assigned, so failing prefixes prune
//! whole subtrees of the candidate space.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jordan::{JordanAlgebra, JordanPair, PairMap, Sign, TripleTensor};
use crate::matrix::Matrix;
use crate::ring::{Ring, RingElement};

const MAX_DIM: usize = 32;

trait Arith: Sync {
    fn add(&self, a: u32, b: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
}

struct ModP(u32);

impl Arith for ModP {
    #[inline(always)]
    fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 { s - self.0 } else { s }
    }

    #[inline(always)]
    fn mul(&self, a: u32, b: u32) -> u32 {
        a * b % self.0
    }
}

struct Tables {
    size: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
}

impl Tables {
    fn new(ring: &Ring) -> Result<Tables> {
        let elems = ring.elements()?;
        let size = elems.len();
        let mut add = vec![0; size * size];
        let mut mul = vec![0; size * size];
        for &a in &elems {
            for &b in &elems {
                let slot = a.index() as usize * size + b.index() as usize;
                add[slot] = ring.add(a, b).index();
                mul[slot] = ring.mul(a, b).index();
            }
        }
        Ok(Tables { size, add, mul })
    }
}

impl Arith for Tables {
    #[inline(always)]
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.size + b as usize]
    }

    #[inline(always)]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.size + b as usize]
    }
}

fn idx(x: RingElement) -> u32 {
    x.index()
}

/// Trilinear map `V x W x V -> V` with nonzero constants only.
struct Sparse3 {
    outer: usize,
    inner: usize,
    /// `{e_i, f_j, e_k}` as `(out, coeff)`, indexed by `(i * inner + j) * outer + k`.
    slices: Vec<Vec<(usize, u32)>>,
    /// All constants `(a, b, c, out, coeff)`.
    entries: Vec<(usize, usize, usize, usize, u32)>,
    /// Constants grouped by the middle index: `(a, c, out, coeff)`.
    by_middle: Vec<Vec<(usize, usize, usize, u32)>>,
}

impl Sparse3 {
    fn new(t: &TripleTensor) -> Sparse3 {
        let (outer, inner) = (t.outer(), t.inner());
        let mut slices = vec![Vec::new(); outer * inner * outer];
        let mut entries = Vec::new();
        let mut by_middle = vec![Vec::new(); inner];
        for (i, j, k, o, c) in t.nonzero() {
            slices[(i * inner + j) * outer + k].push((o, idx(c)));
            entries.push((i, j, k, o, idx(c)));
            by_middle[j].push((i, k, o, idx(c)));
        }
        Sparse3 { outer, inner, slices, entries, by_middle }
    }

    fn slice(&self, i: usize, j: usize, k: usize) -> &[(usize, u32)] {
        &self.slices[(i * self.inner + j) * self.outer + k]
    }
}

struct Sparse2 {
    dim: usize,
    slices: Vec<Vec<(usize, u32)>>,
    entries: Vec<(usize, usize, usize, u32)>,
    unit: Option<Vec<u32>>,
}

/// Square matrix variables stored column-major in one buffer.
#[derive(Clone)]
struct Blocks {
    dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl Blocks {
    fn new(dims: Vec<usize>) -> Blocks {
        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for &d in &dims {
            offsets.push(acc);
            acc += d * d;
        }
        Blocks { dims, offsets }
    }

    fn len(&self) -> usize {
        self.dims.iter().map(|d| d * d).sum()
    }

    /// Global column number of column `c` of block `b`.
    fn column(&self, b: usize, c: usize) -> usize {
        self.dims[..b].iter().sum::<usize>() + c
    }

    fn columns(&self) -> Vec<(usize, usize)> {
        self.dims.iter().enumerate().flat_map(|(b, &d)| (0..d).map(move |c| (b, c))).collect()
    }

    #[inline(always)]
    fn get(&self, vals: &[u32], b: usize, r: usize, c: usize) -> u32 {
        vals[self.offsets[b] + c * self.dims[b] + r]
    }
}

/// Trace data for pairs: `ψ = G^{-1} φ^T G`, the inverse of the dual inverse of `φ`.
struct Trace {
    /// Nonzero `G[r][j]` by column: `(r, g)`.
    g_cols: Vec<Vec<(usize, u32)>>,
    /// Nonzero `G^{-1}[b][l]` by row: `(l, g)`.
    ginv_rows: Vec<Vec<(usize, u32)>>,
}

enum Check {
    /// `X T(e_i, f_j, e_k) = T(X e_i, Y f_j, X e_k)` for tensor `t`, blocks `x`, `y`.
    Transport { t: usize, x: usize, y: usize, i: usize, j: usize, k: usize },
    /// `φ T+(e_i, ψ f_j, e_k) = T+(φ e_i, f_j, φ e_k)`.
    TracePlus { i: usize, j: usize, k: usize },
    /// `T-(ψ f_a, e_b, ψ f_c) = ψ T-(f_a, φ e_b, f_c)`; needs all of `ψ`.
    TraceMinus { a: usize, b: usize, c: usize },
    /// `X (e_i e_j) = (X e_i)(X e_j)`.
    Product { i: usize, j: usize },
    /// `X 1 = 1`.
    Unit,
}

pub(crate) enum Problem<'a> {
    Triple(&'a TripleTensor),
    Algebra(&'a JordanAlgebra),
    /// Pair automorphisms with `φ-` the dual inverse of `φ+` for the Gram matrix.
    PairTrace(&'a JordanPair, &'a Matrix),
    /// Pair automorphisms with both sides free.
    PairFree(&'a JordanPair),
}

struct Search<'a, A: Arith> {
    arith: &'a A,
    tensors: Vec<Sparse3>,
    alg: Option<Sparse2>,
    trace: Option<Trace>,
    blocks: Blocks,
    columns: Vec<(usize, usize)>,
    /// Checks attached to the column after which they can run.
    at_level: Vec<Vec<Check>>,
    /// Candidate nonzero columns per block dimension.
    candidates: Vec<Vec<Vec<u32>>>,
    zero: u32,
}

fn nonzero_cols(m: &Matrix) -> Vec<Vec<(usize, u32)>> {
    let r = m.ring();
    (0..m.cols())
        .map(|j| (0..m.rows()).filter(|&i| !r.is_zero(m.get(i, j))).map(|i| (i, idx(m.get(i, j)))).collect())
        .collect()
}

fn nonzero_rows(m: &Matrix) -> Vec<Vec<(usize, u32)>> {
    let r = m.ring();
    (0..m.rows())
        .map(|i| (0..m.cols()).filter(|&j| !r.is_zero(m.get(i, j))).map(|j| (j, idx(m.get(i, j)))).collect())
        .collect()
}

fn all_vectors(ring: &Ring, d: usize) -> Result<Vec<Vec<u32>>> {
    let elems: Vec<u32> = ring.elements()?.into_iter().map(idx).collect();
    let s = elems.len();
    let zero = idx(ring.zero());
    let total = s.checked_pow(d as u32).ok_or_else(|| Error::RingTooLarge(ring.to_string()))?;
    let mut out = Vec::with_capacity(total.saturating_sub(1));
    for n in 0..total {
        let mut v = vec![0u32; d];
        let mut rest = n;
        for slot in (0..d).rev() {
            v[slot] = elems[rest % s];
            rest /= s;
        }
        if v.iter().any(|&x| x != zero) {
            out.push(v);
        }
    }
    Ok(out)
}

impl<'a, A: Arith> Search<'a, A> {
    fn build(arith: &'a A, ring: &Ring, problem: &Problem) -> Result<Self> {
        let mut tensors = Vec::new();
        let mut alg = None;
        let mut trace = None;
        let mut checks: Vec<(Vec<usize>, Check)> = Vec::new();
        let blocks;
        match problem {
            Problem::Triple(t) => {
                let s = Sparse3::new(t);
                let d = s.outer;
                blocks = Blocks::new(vec![d]);
                for i in 0..d {
                    for j in 0..d {
                        for k in 0..d {
                            let mut deps = vec![i, j, k];
                            deps.extend(s.slice(i, j, k).iter().map(|&(p, _)| p));
                            checks.push((deps, Check::Transport { t: 0, x: 0, y: 0, i, j, k }));
                        }
                    }
                }
                tensors.push(s);
            }
            Problem::Algebra(a) => {
                let d = a.dim();
                blocks = Blocks::new(vec![d]);
                let mut slices = Vec::with_capacity(d * d);
                let mut entries = Vec::new();
                for i in 0..d {
                    for j in 0..d {
                        let v: Vec<(usize, u32)> = a
                            .basis_product(i, j)
                            .iter()
                            .enumerate()
                            .filter(|(_, &c)| !ring.is_zero(c))
                            .map(|(o, &c)| (o, idx(c)))
                            .collect();
                        entries.extend(v.iter().map(|&(o, c)| (i, j, o, c)));
                        let mut deps = vec![i, j];
                        deps.extend(v.iter().map(|&(o, _)| o));
                        checks.push((deps, Check::Product { i, j }));
                        slices.push(v);
                    }
                }
                let unit = a.unit().map(|u| u.iter().map(|&c| idx(c)).collect::<Vec<_>>());
                if let Some(u) = a.unit() {
                    let deps = (0..d).filter(|&p| !ring.is_zero(u[p])).collect();
                    checks.push((deps, Check::Unit));
                }
                alg = Some(Sparse2 { dim: d, slices, entries, unit });
            }
            Problem::PairTrace(p, g) => {
                let (dp, dm) = p.dims();
                if dp != dm || g.rows() != dp || g.cols() != dm {
                    return Err(Error::ShapeMismatch("trace Gram matrix does not fit the pair".into()));
                }
                let ginv = g.inverse().map_err(|_| Error::DegenerateTrace)?;
                let t = Trace { g_cols: nonzero_cols(g), ginv_rows: nonzero_rows(&ginv) };
                let plus = Sparse3::new(p.product(Sign::Plus));
                let minus = Sparse3::new(p.product(Sign::Minus));
                blocks = Blocks::new(vec![dp]);
                for i in 0..dp {
                    for k in 0..dp {
                        for j in 0..dm {
                            let mut deps = vec![i, k];
                            for b in 0..dm {
                                let slice = plus.slice(i, b, k);
                                if !slice.is_empty() {
                                    deps.extend(slice.iter().map(|&(o, _)| o));
                                    deps.extend(t.ginv_rows[b].iter().map(|&(l, _)| l));
                                }
                            }
                            checks.push((deps, Check::TracePlus { i, j, k }));
                        }
                    }
                }
                for a in 0..dm {
                    for b in 0..dp {
                        for c in 0..dm {
                            checks.push(((0..dp).collect(), Check::TraceMinus { a, b, c }));
                        }
                    }
                }
                tensors.push(plus);
                tensors.push(minus);
                trace = Some(t);
            }
            Problem::PairFree(p) => {
                let (dp, dm) = p.dims();
                blocks = Blocks::new(vec![dp, dm]);
                for (t, s) in Sign::BOTH.iter().enumerate() {
                    let sp = Sparse3::new(p.product(*s));
                    let (x, y) = (t, 1 - t);
                    for i in 0..sp.outer {
                        for j in 0..sp.inner {
                            for k in 0..sp.outer {
                                let mut deps = vec![blocks.column(x, i), blocks.column(y, j), blocks.column(x, k)];
                                deps.extend(sp.slice(i, j, k).iter().map(|&(o, _)| blocks.column(x, o)));
                                checks.push((deps, Check::Transport { t, x, y, i, j, k }));
                            }
                        }
                    }
                    tensors.push(sp);
                }
            }
        }
        if blocks.dims.iter().any(|&d| d > MAX_DIM) {
            return Err(Error::BadDims(format!("carrier dimension above {MAX_DIM}")));
        }
        let columns = blocks.columns();
        let mut at_level: Vec<Vec<Check>> = (0..columns.len().max(1)).map(|_| Vec::new()).collect();
        for (deps, check) in checks {
            let level = deps.into_iter().max().unwrap_or(0);
            at_level[level].push(check);
        }
        let max_dim = blocks.dims.iter().copied().max().unwrap_or(0);
        let mut candidates = vec![Vec::new(); max_dim + 1];
        for &d in &blocks.dims {
            if candidates[d].is_empty() && d > 0 {
                candidates[d] = all_vectors(ring, d)?;
            }
        }
        Ok(Search { arith, tensors, alg, trace, blocks, columns, at_level, candidates, zero: idx(ring.zero()) })
    }

    #[inline(always)]
    fn x(&self, vals: &[u32], b: usize, r: usize, c: usize) -> u32 {
        self.blocks.get(vals, b, r, c)
    }

    /// `ψ[b][j]`, reading only the columns listed in row `b` of `G^{-1}`.
    fn psi(&self, vals: &[u32], b: usize, j: usize) -> u32 {
        let t = self.trace.as_ref().expect("trace problem");
        let a = self.arith;
        let mut acc = self.zero;
        for &(l, gi) in &t.ginv_rows[b] {
            let mut dot = self.zero;
            for &(r, g) in &t.g_cols[j] {
                dot = a.add(dot, a.mul(self.x(vals, 0, r, l), g));
            }
            acc = a.add(acc, a.mul(gi, dot));
        }
        acc
    }

    fn run(&self, check: &Check, vals: &[u32], psi: Option<&[u32]>) -> bool {
        let a = self.arith;
        let z = self.zero;
        let mut lhs = [z; MAX_DIM];
        let mut rhs = [z; MAX_DIM];
        let n;
        match *check {
            Check::Transport { t, x, y, i, j, k } => {
                let s = &self.tensors[t];
                n = s.outer;
                for &(p, c) in s.slice(i, j, k) {
                    for (o, slot) in lhs.iter_mut().enumerate().take(n) {
                        *slot = a.add(*slot, a.mul(c, self.x(vals, x, o, p)));
                    }
                }
                for &(p, q, r, o, c) in &s.entries {
                    let u = self.x(vals, x, p, i);
                    if u == z {
                        continue;
                    }
                    let v = self.x(vals, y, q, j);
                    if v == z {
                        continue;
                    }
                    let w = self.x(vals, x, r, k);
                    if w == z {
                        continue;
                    }
                    rhs[o] = a.add(rhs[o], a.mul(c, a.mul(u, a.mul(v, w))));
                }
            }
            Check::TracePlus { i, j, k } => {
                let s = &self.tensors[0];
                n = s.outer;
                let mut v = [z; MAX_DIM];
                for b in 0..s.inner {
                    let slice = s.slice(i, b, k);
                    if slice.is_empty() {
                        continue;
                    }
                    let pb = self.psi(vals, b, j);
                    if pb == z {
                        continue;
                    }
                    for &(o, c) in slice {
                        v[o] = a.add(v[o], a.mul(pb, c));
                    }
                }
                for (p, &vp) in v.iter().enumerate().take(n) {
                    if vp == z {
                        continue;
                    }
                    for (o, slot) in lhs.iter_mut().enumerate().take(n) {
                        *slot = a.add(*slot, a.mul(vp, self.x(vals, 0, o, p)));
                    }
                }
                for &(p, r, o, c) in &s.by_middle[j] {
                    let u = self.x(vals, 0, p, i);
                    if u == z {
                        continue;
                    }
                    let w = self.x(vals, 0, r, k);
                    rhs[o] = a.add(rhs[o], a.mul(c, a.mul(u, w)));
                }
            }
            Check::TraceMinus { a: fa, b, c: fc } => {
                let psi = psi.expect("ψ computed at the leaf");
                let s = &self.tensors[1];
                n = s.outer;
                let ps = |r: usize, col: usize| psi[col * n + r];
                for &(p, q, o, c) in &s.by_middle[b] {
                    let u = ps(p, fa);
                    if u == z {
                        continue;
                    }
                    rhs[o] = a.add(rhs[o], a.mul(c, a.mul(u, ps(q, fc))));
                }
                let mut w = [z; MAX_DIM];
                for r in 0..s.inner {
                    let phi = self.x(vals, 0, r, b);
                    if phi == z {
                        continue;
                    }
                    for &(o, c) in s.slice(fa, r, fc) {
                        w[o] = a.add(w[o], a.mul(phi, c));
                    }
                }
                for (l, &wl) in w.iter().enumerate().take(n) {
                    if wl == z {
                        continue;
                    }
                    for (o, slot) in lhs.iter_mut().enumerate().take(n) {
                        *slot = a.add(*slot, a.mul(ps(o, l), wl));
                    }
                }
            }
            Check::Product { i, j } => {
                let s = self.alg.as_ref().expect("algebra problem");
                n = s.dim;
                for &(p, c) in &s.slices[i * n + j] {
                    for (o, slot) in lhs.iter_mut().enumerate().take(n) {
                        *slot = a.add(*slot, a.mul(c, self.x(vals, 0, o, p)));
                    }
                }
                for &(p, q, o, c) in &s.entries {
                    let u = self.x(vals, 0, p, i);
                    if u == z {
                        continue;
                    }
                    let v = self.x(vals, 0, q, j);
                    rhs[o] = a.add(rhs[o], a.mul(c, a.mul(u, v)));
                }
            }
            Check::Unit => {
                let s = self.alg.as_ref().expect("algebra problem");
                let u = s.unit.as_ref().expect("unit");
                n = s.dim;
                for (p, &up) in u.iter().enumerate() {
                    if up == z {
                        continue;
                    }
                    for (o, slot) in lhs.iter_mut().enumerate().take(n) {
                        *slot = a.add(*slot, a.mul(up, self.x(vals, 0, o, p)));
                    }
                }
                rhs[..n].copy_from_slice(u);
            }
        }
        lhs[..n] == rhs[..n]
    }

    fn full_psi(&self, vals: &[u32]) -> Vec<u32> {
        let d = self.blocks.dims[0];
        let mut out = vec![self.zero; d * d];
        for j in 0..d {
            for b in 0..d {
                out[j * d + b] = self.psi(vals, b, j);
            }
        }
        out
    }

    fn passes_level(&self, level: usize, vals: &[u32]) -> bool {
        let leaf = level + 1 == self.columns.len();
        let psi = if leaf && self.trace.is_some() { Some(self.full_psi(vals)) } else { None };
        self.at_level[level].iter().all(|c| self.run(c, vals, psi.as_deref()))
    }

    fn assign(&self, level: usize, cand: &[u32], vals: &mut [u32]) {
        let (b, c) = self.columns[level];
        let d = self.blocks.dims[b];
        let start = self.blocks.offsets[b] + c * d;
        vals[start..start + d].copy_from_slice(cand);
    }

    fn descend(&self, level: usize, vals: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if level == self.columns.len() {
            out.push(vals.clone());
            return;
        }
        let d = self.blocks.dims[self.columns[level].0];
        for cand in &self.candidates[d] {
            self.assign(level, cand, vals);
            if self.passes_level(level, vals) {
                self.descend(level + 1, vals, out);
            }
        }
    }

    fn solve(&self) -> Vec<Vec<u32>> {
        if self.columns.is_empty() {
            return vec![Vec::new()];
        }
        let d0 = self.blocks.dims[self.columns[0].0];
        let per_root: Vec<Vec<Vec<u32>>> = self.candidates[d0]
            .par_iter()
            .map(|cand| {
                let mut vals = vec![self.zero; self.blocks.len()];
                let mut out = Vec::new();
                self.assign(0, cand, &mut vals);
                if self.passes_level(0, &vals) {
                    self.descend(1, &mut vals, &mut out);
                }
                out
            })
            .collect();
        per_root.into_iter().flatten().collect()
    }
}

fn to_matrix(ring: &Ring, blocks: &Blocks, vals: &[u32], b: usize) -> Matrix {
    let d = blocks.dims[b];
    Matrix::from_fn(ring, d, d, |r, c| RingElement::Finite(blocks.get(vals, b, r, c)))
}

fn finish<A: Arith>(search: &Search<A>, ring: &Ring, problem: &Problem, raw: Vec<Vec<u32>>) -> Result<Vec<PairMap>> {
    let mut out = Vec::with_capacity(raw.len());
    for vals in raw {
        let first = to_matrix(ring, &search.blocks, &vals, 0);
        if !first.is_invertible() {
            continue;
        }
        let map = match problem {
            Problem::Triple(_) | Problem::Algebra(_) => PairMap { plus: first.clone(), minus: first },
            Problem::PairTrace(..) => {
                let d = search.blocks.dims[0];
                let psi = search.full_psi(&vals);
                let psi = Matrix::from_fn(ring, d, d, |r, c| RingElement::Finite(psi[c * d + r]));
                PairMap { plus: first, minus: psi.inverse()? }
            }
            Problem::PairFree(_) => {
                let second = to_matrix(ring, &search.blocks, &vals, 1);
                if !second.is_invertible() {
                    continue;
                }
                PairMap { plus: first, minus: second }
            }
        };
        out.push(map);
    }
    Ok(out)
}

/// All invertible solutions of `problem`, in an order that depends only on the input.
pub(crate) fn search(ring: &Ring, problem: &Problem) -> Result<Vec<PairMap>> {
    if !ring.is_finite() {
        return Err(Error::NonEnumerableRing(ring.to_string()));
    }
    if let crate::ring::RingDescriptor::Prime(p) = ring.descriptor() {
        let arith = ModP(*p);
        let s = Search::build(&arith, ring, problem)?;
        let raw = s.solve();
        finish(&s, ring, problem, raw)
    } else {
        let arith = Tables::new(ring)?;
        let s = Search::build(&arith, ring, problem)?;
        let raw = s.solve();
        finish(&s, ring, problem, raw)
    }
}

/// `a ∘ b` on flattened row-major square blocks, for fast closure computations.
pub(crate) struct FastCompose {
    arith: Box<dyn Fn(u32, u32) -> u32 + Sync>,
    add: Box<dyn Fn(u32, u32) -> u32 + Sync>,
    zero: u32,
}

impl FastCompose {
    pub(crate) fn new(ring: &Ring) -> Result<FastCompose> {
        let zero = idx(ring.zero());
        if let crate::ring::RingDescriptor::Prime(p) = ring.descriptor() {
            let p = *p;
            Ok(FastCompose { arith: Box::new(move |a, b| a * b % p), add: Box::new(move |a, b| (a + b) % p), zero })
        } else {
            let t = std::sync::Arc::new(Tables::new(ring)?);
            let t2 = t.clone();
            Ok(FastCompose {
                arith: Box::new(move |a, b| t.mul(a, b)),
                add: Box::new(move |a, b| t2.add(a, b)),
                zero,
            })
        }
    }

    /// Product of two row-major `d x d` matrices.
    pub(crate) fn mul(&self, x: &[u32], y: &[u32], d: usize, out: &mut Vec<u32>) {
        out.clear();
        out.resize(d * d, self.zero);
        for i in 0..d {
            for k in 0..d {
                let a = x[i * d + k];
                if a == self.zero {
                    continue;
                }
                for j in 0..d {
                    let b = y[k * d + j];
                    if b != self.zero {
                        let slot = &mut out[i * d + j];
                        *slot = (self.add)(*slot, (self.arith)(a, b));
                    }
                }
            }
        }
    }
}
