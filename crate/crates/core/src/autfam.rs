//! Explicit automorphism families: similitude-induced maps of type IV, the
//! multiplication generators of type I, idempotent-twisted maps of `M_n`,
//! determinant similitudes, and the central products that parametrize them.
//!
//! Linear maps on `M_{m,n}` are matrices acting on row-major coordinates, so
//! `L_a = a ⊗ I` and `R_b = I ⊗ b^T`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::catalog::transpose_operator;
use crate::error::{Error, Result};
use crate::jordan::{is_algebra_automorphism, is_triple_automorphism, triple_from_algebra, JordanAlgebra, PairMap, Sign};
use crate::matrix::{similitude_multiplier, BilinearForm, Matrix};
use crate::ring::{Ring, RingElement};

/// `(a, m_a^{-1} a)` on `V_IV(W, b)` for a similitude `a` with multiplier `m_a`.
pub fn go_to_pair_aut(a: &Matrix, form: &BilinearForm) -> Result<PairMap> {
    let m = similitude_multiplier(a, form)?.ok_or(Error::NotSimilitude)?;
    let r = a.ring();
    let inv = r.inv(m).ok_or(Error::NotSimilitude)?;
    PairMap::new(a.clone(), a.scale(inv))
}

/// An isometry `a` as a triple automorphism of `T̂_IV(W, b)`.
pub fn ortho_to_triple_aut(a: &Matrix, form: &BilinearForm) -> Result<Matrix> {
    match similitude_multiplier(a, form)? {
        Some(m) if a.ring().is_one(m) => Ok(a.clone()),
        _ => Err(Error::NotIsometry),
    }
}

fn require_square(a: &Matrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("{}x{} is not square", a.rows(), a.cols())))
    }
}

/// `L_a: X -> aX` on `M_{k, cols}`, where `a` is `k x k`.
pub fn left_mult(a: &Matrix, cols: usize) -> Matrix {
    a.kron(&Matrix::identity(a.ring(), cols))
}

/// `R_b: X -> Xb` on `M_{rows, k}`, where `b` is `k x k`.
pub fn right_mult(b: &Matrix, rows: usize) -> Matrix {
    Matrix::identity(b.ring(), rows).kron(&b.transpose())
}

/// `L̂_a = (L_a, R_{a^{-1}})` on `VhI_{m,n}`, `a` in `GL_m`.
pub fn hat_left(a: &Matrix, n: usize) -> Result<PairMap> {
    require_square(a)?;
    PairMap::new(left_mult(a, n), right_mult(&a.inverse()?, n))
}

/// `R̂_b = (R_b, L_{b^{-1}})` on `VhI_{m,n}`, `b` in `GL_n`.
pub fn hat_right(b: &Matrix, m: usize) -> Result<PairMap> {
    require_square(b)?;
    PairMap::new(right_mult(b, m), left_mult(&b.inverse()?, m))
}

/// `L̂_a R̂_b`.
pub fn hat_generators(a: &Matrix, b: &Matrix) -> Result<PairMap> {
    Ok(hat_left(a, b.rows())?.compose(&hat_right(b, a.rows())?))
}

/// `L̃_a = (L_a, L_{a^T}^{-1})` on `VtI_{m,n}`.
pub fn tilde_left(a: &Matrix, n: usize) -> Result<PairMap> {
    require_square(a)?;
    PairMap::new(left_mult(a, n), left_mult(&a.transpose().inverse()?, n))
}

/// `R̃_b = (R_b, R_{b^T}^{-1})` on `VtI_{m,n}`.
pub fn tilde_right(b: &Matrix, m: usize) -> Result<PairMap> {
    require_square(b)?;
    PairMap::new(right_mult(b, m), right_mult(&b.transpose().inverse()?, m))
}

/// `L̃_a R̃_b`.
pub fn tilde_generators(a: &Matrix, b: &Matrix) -> Result<PairMap> {
    Ok(tilde_left(a, b.rows())?.compose(&tilde_right(b, a.rows())?))
}

/// `f_τ: X -> e1 X + e2 X^T` on `M_n` for the idempotent `e1`.
pub fn transpose_twist(ring: &Ring, n: usize, e1: RingElement) -> Result<Matrix> {
    let s = ring.splitting(e1)?;
    let id = Matrix::identity(ring, n * n);
    Ok(id.scale(s.e1).add(&transpose_operator(ring, n, n).scale(s.e2)))
}

/// `(f_τ, f_τ)` on `VhI_n`.
pub fn transpose_twist_pair(ring: &Ring, n: usize, e1: RingElement) -> Result<PairMap> {
    PairMap::diagonal(transpose_twist(ring, n, e1)?)
}

/// Scalar `s` that makes the first entry of `m` which is a unit in each local
/// component equal to `1` there. `None` if some component has no unit entry.
fn normalizer(m: &Matrix) -> Option<RingElement> {
    let r = m.ring();
    let mut s = r.zero();
    for e in r.local_idempotents() {
        let x = m.entries().iter().copied().find(|&x| r.is_unit_in_component(x, e))?;
        let lifted = r.add(r.mul(x, e), r.sub(r.one(), e));
        s = r.add(s, r.mul(e, r.inv(lifted)?));
    }
    Some(s)
}

/// `X -> e1 g X g^{-1} ± e2 g X^T g^{-1}` on `M_n(R)`.
///
/// `g` is only defined up to central units; it is stored normalized so that
/// equal maps have equal fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwistedMap {
    e1: RingElement,
    g: Matrix,
    sign: Sign,
}

impl TwistedMap {
    pub fn new(e1: RingElement, g: Matrix, sign: Sign) -> Result<TwistedMap> {
        require_square(&g)?;
        g.ring().splitting(e1)?;
        if !g.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let s = normalizer(&g).ok_or(Error::NotInvertible)?;
        Ok(TwistedMap { e1, g: g.scale(s), sign })
    }

    pub fn identity(ring: &Ring, n: usize) -> TwistedMap {
        TwistedMap::new(ring.one(), Matrix::identity(ring, n), Sign::Plus).expect("identity")
    }

    pub fn ring(&self) -> &Ring {
        self.g.ring()
    }

    pub fn n(&self) -> usize {
        self.g.rows()
    }

    pub fn e1(&self) -> RingElement {
        self.e1
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    fn e2_signed(&self) -> RingElement {
        let r = self.ring();
        let e2 = r.sub(r.one(), self.e1);
        match self.sign {
            Sign::Plus => e2,
            Sign::Minus => r.neg(e2),
        }
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.rows() != self.n() || x.cols() != self.n() {
            return Err(Error::ShapeMismatch("twisted map applied to a matrix of the wrong size".into()));
        }
        let gi = self.g.inverse()?;
        let direct = self.g.mul(x).mul(&gi);
        let twisted = self.g.mul(&x.transpose()).mul(&gi);
        Ok(direct.scale(self.e1).add(&twisted.scale(self.e2_signed())))
    }

    /// The map as an operator on row-major coordinates of `M_n`.
    pub fn to_matrix(&self) -> Matrix {
        let n = self.n();
        let r = self.ring();
        let conj = left_mult(&self.g, n).mul(&right_mult(&self.g.inverse().expect("invertible"), n));
        let t = transpose_operator(r, n, n);
        conj.scale(self.e1).add(&conj.mul(&t).scale(self.e2_signed()))
    }

    /// `self ∘ other`: idempotent `e' * e''`, conjugator `e'_1 g' g'' + e'_2 g' (g'')^{-T}`.
    pub fn compose(&self, other: &TwistedMap) -> Result<TwistedMap> {
        if self.sign != other.sign {
            return Err(Error::MixedSigns);
        }
        if self.ring() != other.ring() || self.n() != other.n() {
            return Err(Error::ShapeMismatch("twisted maps over different matrix algebras".into()));
        }
        let r = self.ring();
        let e1 = idempotent_product(r, self.e1, other.e1);
        let e2 = r.sub(r.one(), self.e1);
        let straight = self.g.mul(&other.g);
        let flipped = self.g.mul(&other.g.transpose().inverse()?);
        TwistedMap::new(e1, straight.scale(self.e1).add(&flipped.scale(e2)), self.sign)
    }

    pub fn inverse(&self) -> Result<TwistedMap> {
        // On the e2 component the map is Ad_g ∘ T up to sign, whose inverse is
        // Ad_{g^T} ∘ T.
        let r = self.ring();
        let e2 = r.sub(r.one(), self.e1);
        let g = self.g.inverse()?.scale(self.e1).add(&self.g.transpose().scale(e2));
        TwistedMap::new(self.e1, g, self.sign)
    }
}

/// `e' * e'' = e'e'' + (1 - e')(1 - e'')`.
pub fn idempotent_product(r: &Ring, a: RingElement, b: RingElement) -> RingElement {
    let one = r.one();
    r.add(r.mul(a, b), r.mul(r.sub(one, a), r.sub(one, b)))
}

#[derive(Serialize)]
struct TwistedJson {
    kind: &'static str,
    ring: String,
    e1: String,
    sign: &'static str,
    g: Matrix,
}

impl Serialize for TwistedMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TwistedJson {
            kind: "twisted",
            ring: self.ring().to_string(),
            e1: self.ring().show(self.e1),
            sign: self.sign.symbol(),
            g: self.g.clone(),
        }
        .serialize(s)
    }
}

// Determinant similitudes, checked as polynomial identities in the entries of X.

type Poly = BTreeMap<Vec<u8>, RingElement>;

fn poly_mul_linear(r: &Ring, p: &Poly, form: &[RingElement]) -> Poly {
    let mut out = Poly::new();
    for (mono, &c) in p {
        for (k, &a) in form.iter().enumerate() {
            if r.is_zero(a) {
                continue;
            }
            let mut m = mono.clone();
            m[k] += 1;
            let entry = out.entry(m).or_insert_with(|| r.zero());
            *entry = r.add(*entry, r.mul(c, a));
        }
    }
    out.retain(|_, c| !r.is_zero(*c));
    out
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, odd: bool, out: &mut Vec<(Vec<usize>, bool)>) {
        let n = used.len();
        if prefix.len() == n {
            out.push((prefix.clone(), odd));
            return;
        }
        for v in 0..n {
            if !used[v] {
                let inversions = prefix.iter().filter(|&&p| p > v).count();
                used[v] = true;
                prefix.push(v);
                go(prefix, used, odd ^ (inversions % 2 == 1), out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], false, &mut out);
    out
}

/// `det(f(X))` as a polynomial in the `n^2` entries of `X`.
fn det_polynomial(f: &Matrix, n: usize) -> Poly {
    let r = f.ring();
    let vars = n * n;
    let mut total = Poly::new();
    for (perm, odd) in permutations(n) {
        let mut p = Poly::new();
        p.insert(vec![0u8; vars], if odd { r.neg(r.one()) } else { r.one() });
        for (i, &j) in perm.iter().enumerate() {
            let row: Vec<RingElement> = (0..vars).map(|k| f.get(i * n + j, k)).collect();
            p = poly_mul_linear(r, &p, &row);
        }
        for (m, c) in p {
            let entry = total.entry(m).or_insert_with(|| r.zero());
            *entry = r.add(*entry, c);
        }
    }
    total.retain(|_, c| !r.is_zero(*c));
    total
}

fn check_operator(f: &Matrix, n: usize) -> Result<()> {
    if f.rows() != n * n || f.cols() != n * n {
        return Err(Error::ShapeMismatch(format!("expected an operator on {n}x{n} matrices")));
    }
    Ok(())
}

/// The unit `λ` with `det(f(X)) = λ det(X)` identically, if any.
pub fn det_multiplier(f: &Matrix, n: usize) -> Result<Option<RingElement>> {
    check_operator(f, n)?;
    let r = f.ring();
    let target = det_polynomial(&Matrix::identity(r, n * n), n);
    let got = det_polynomial(f, n);
    let diag: Vec<u8> = (0..n * n).map(|k| u8::from(k / n == k % n)).collect();
    let lambda = got.get(&diag).copied().unwrap_or_else(|| r.zero());
    if !r.is_unit(lambda) {
        return Ok(None);
    }
    let scaled: Poly = target.into_iter().map(|(m, c)| (m, r.mul(lambda, c))).collect();
    Ok((scaled == got).then_some(lambda))
}

/// Whether `det(f(X)) = det(X)` identically.
pub fn det_isometry_check(f: &Matrix, n: usize) -> Result<bool> {
    Ok(det_multiplier(f, n)?.is_some_and(|m| f.ring().is_one(m)))
}

/// Splitting of a determinant similitude `f` as `L_a ∘ φ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimilitudeFactor {
    /// `a = f(1)`.
    pub a: Matrix,
    /// `φ = L_a^{-1} f`, an isometry fixing `1`.
    pub isometry: Matrix,
    pub multiplier: String,
}

pub fn det_similitude_factor(f: &Matrix, n: usize) -> Result<SimilitudeFactor> {
    let r = f.ring();
    let lambda = det_multiplier(f, n)?.ok_or(Error::NotSimilitude)?;
    let a = Matrix::from_vec(r, n, n, f.apply(Matrix::identity(r, n).entries()));
    let isometry = left_mult(&a.inverse()?, n).mul(f);
    if !det_isometry_check(&isometry, n)? {
        return Err(Error::NotSimilitude);
    }
    Ok(SimilitudeFactor { a, isometry, multiplier: r.show(lambda) })
}

// The group GL_n^2 ⋊ μ_2 and its map onto the determinant similitudes.

fn check_root(r: &Ring, tau: RingElement) -> Result<RingElement> {
    if r.mul(tau, tau) != r.one() {
        return Err(Error::BadInput(format!("{} is not a square root of 1", r.show(tau))));
    }
    Ok(r.idempotent_of_root(tau))
}

/// `φ_τ(a, b) = (e1 a + e2 b, e1 b + e2 a)`.
pub fn phi_tau(tau: RingElement, a: &Matrix, b: &Matrix) -> Result<(Matrix, Matrix)> {
    let r = a.ring();
    let e1 = check_root(r, tau)?;
    let e2 = r.sub(r.one(), e1);
    Ok((a.scale(e1).add(&b.scale(e2)), b.scale(e1).add(&a.scale(e2))))
}

/// `Φ_n(a, b, τ) = L_a R_{b^T} f_τ`.
pub fn phi_n(a: &Matrix, b: &Matrix, tau: RingElement) -> Result<Matrix> {
    require_square(a)?;
    if b.rows() != a.rows() || !b.is_square() {
        return Err(Error::ShapeMismatch("a and b must have the same size".into()));
    }
    if !a.is_invertible() || !b.is_invertible() {
        return Err(Error::NotInvertible);
    }
    let r = a.ring();
    let n = a.rows();
    let e1 = check_root(r, tau)?;
    Ok(left_mult(a, n).mul(&right_mult(&b.transpose(), n)).mul(&transpose_twist(r, n, e1)?))
}

/// An element `(a, b, τ)` of `GL_n^2 ⋊ μ_2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemidirectElement {
    pub a: Matrix,
    pub b: Matrix,
    pub tau: RingElement,
}

impl SemidirectElement {
    /// `(a', b', τ')(a'', b'', τ'') = ((a', b') φ_τ'(a'', b''), τ' τ'')`.
    pub fn multiply(&self, other: &SemidirectElement) -> Result<SemidirectElement> {
        let (c, d) = phi_tau(self.tau, &other.a, &other.b)?;
        let r = self.a.ring();
        Ok(SemidirectElement { a: self.a.mul(&c), b: self.b.mul(&d), tau: r.mul(self.tau, other.tau) })
    }

    pub fn image(&self) -> Result<Matrix> {
        phi_n(&self.a, &self.b, self.tau)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub ring: String,
    pub n: usize,
    /// Size of `GL_n^2 × μ_2`.
    pub searched: u64,
    pub kernel_size: usize,
    pub torus_size: usize,
    pub kernel_is_torus: bool,
}

/// Enumerate `GL_n(R)^2 × μ_2(R)` and compare the kernel of `Φ_n` with `T(R)`.
pub fn phi_n_kernel_check(ring: &Ring, n: usize) -> Result<KernelReport> {
    let gl = crate::matrix::enumerate_gl(n, ring)?;
    let roots = ring.mu_n(2)?;
    let units = ring.units()?;
    let units_n: Vec<Matrix> = (0..n * n).map(|k| Matrix::unit(ring, n, n, k / n, k % n)).collect();
    let mut kernel = Vec::new();
    for &tau in &roots {
        let e1 = ring.idempotent_of_root(tau);
        let e2 = ring.sub(ring.one(), e1);
        let twisted: Vec<Matrix> = units_n.iter().map(|x| x.scale(e1).add(&x.transpose().scale(e2))).collect();
        for a in &gl {
            for b in &gl {
                let bt = b.transpose();
                if units_n.iter().zip(&twisted).all(|(x, fx)| a.mul(fx).mul(&bt) == *x) {
                    kernel.push((a.clone(), b.clone(), tau));
                }
            }
        }
    }
    let torus: Vec<(Matrix, Matrix, RingElement)> = units
        .iter()
        .map(|&u| (Matrix::scalar(ring, n, u), Matrix::scalar(ring, n, ring.inv(u).expect("unit")), ring.one()))
        .collect();
    let kernel_is_torus = kernel.len() == torus.len() && torus.iter().all(|t| kernel.contains(t));
    Ok(KernelReport {
        ring: ring.to_string(),
        n,
        searched: (gl.len() * gl.len() * roots.len()) as u64,
        kernel_size: kernel.len(),
        torus_size: torus.len(),
        kernel_is_torus,
    })
}

/// `f_τ (L_a R_{b^T}) f_τ^{-1} = L_{e1 a + e2 b} R_{(e1 b + e2 a)^T}` as operators.
pub fn semidirect_conjugation_holds(a: &Matrix, b: &Matrix, tau: RingElement) -> Result<bool> {
    let r = a.ring();
    let n = a.rows();
    let one = Matrix::identity(r, n);
    let f = phi_n(&one, &one, tau)?;
    let lhs = f.mul(&phi_n(a, b, r.one())?).mul(&f.inverse()?);
    let (c, d) = phi_tau(tau, a, b)?;
    Ok(lhs == phi_n(&c, &d, r.one())?)
}

/// Uniformly random invertible `n x n` matrix by rejection.
pub fn random_invertible<G: rand::Rng>(ring: &Ring, n: usize, rng: &mut G) -> Result<Matrix> {
    let elements = ring.elements()?;
    loop {
        let m = Matrix::from_fn(ring, n, n, |_, _| elements[rng.gen_range(0..elements.len())]);
        if m.is_invertible() {
            return Ok(m);
        }
    }
}

// Central products (GL_m × GL_n) / T, optionally extended by μ_2.

/// Canonical representative of the class of `(a, b)` modulo `(r1, r^{-1}1)`,
/// with the optional `μ_2` component of the square case.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CentralProductElement {
    a: Matrix,
    b: Matrix,
    tau: Option<RingElement>,
}

impl CentralProductElement {
    pub fn new(a: Matrix, b: Matrix, tau: Option<RingElement>) -> Result<CentralProductElement> {
        require_square(&a)?;
        require_square(&b)?;
        if a.ring() != b.ring() {
            return Err(Error::IncompatibleRings { from: a.ring().to_string(), to: b.ring().to_string() });
        }
        if !a.is_invertible() || !b.is_invertible() {
            return Err(Error::NotInvertible);
        }
        if let Some(t) = tau {
            if a.rows() != b.rows() {
                return Err(Error::ShapeMismatch("the μ_2 flag needs square blocks of equal size".into()));
            }
            check_root(a.ring(), t)?;
        }
        let r = a.ring().clone();
        let s = normalizer(&a).ok_or(Error::NotInvertible)?;
        let s_inv = r.inv(s).expect("normalizer is a unit");
        Ok(CentralProductElement { a: a.scale(s), b: b.scale(s_inv), tau })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn tau(&self) -> Option<RingElement> {
        self.tau
    }

    pub fn multiply(&self, other: &CentralProductElement) -> Result<CentralProductElement> {
        if self.tau.is_some() != other.tau.is_some() {
            return Err(Error::BadInput("cannot multiply elements with and without a μ_2 flag".into()));
        }
        let r = self.a.ring();
        match (self.tau, other.tau) {
            (Some(t1), Some(t2)) => {
                let (c, d) = phi_tau(t1, &other.a, &other.b)?;
                CentralProductElement::new(self.a.mul(&c), self.b.mul(&d), Some(r.mul(t1, t2)))
            }
            _ => CentralProductElement::new(self.a.mul(&other.a), self.b.mul(&other.b), None),
        }
    }

    pub fn inverse(&self) -> Result<CentralProductElement> {
        let (ai, bi) = (self.a.inverse()?, self.b.inverse()?);
        match self.tau {
            Some(t) => {
                let (c, d) = phi_tau(t, &ai, &bi)?;
                CentralProductElement::new(c, d, Some(t))
            }
            None => CentralProductElement::new(ai, bi, None),
        }
    }

    /// `L̂_a R̂_{b^T}`, followed by the transpose twist of `τ` when present, on
    /// `VhI_{m,n}`. This is a group homomorphism and its plus component is
    /// `Φ_n(a, b, τ)`.
    pub fn to_vhi_aut(&self) -> Result<PairMap> {
        let base = hat_generators(&self.a, &self.b.transpose())?;
        match self.tau {
            Some(t) => {
                let r = self.a.ring();
                Ok(base.compose(&transpose_twist_pair(r, self.a.rows(), r.idempotent_of_root(t))?))
            }
            None => Ok(base),
        }
    }
}

#[derive(Serialize)]
struct CentralJson {
    kind: &'static str,
    ring: String,
    a: Matrix,
    b: Matrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<String>,
}

impl Serialize for CentralProductElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let r = self.a.ring();
        CentralJson {
            kind: "central",
            ring: r.to_string(),
            a: self.a.clone(),
            b: self.b.clone(),
            tau: self.tau.map(|t| r.show(t)),
        }
        .serialize(s)
    }
}

// Triple automorphisms of a unital Jordan algebra.

/// Write a triple automorphism `φ` of the triple system of `J` as `r ψ` with
/// `r^2 = 1` and `ψ` an algebra automorphism.
pub fn factor_triple_aut(alg: &JordanAlgebra, phi: &Matrix) -> Result<(RingElement, Matrix)> {
    let r = alg.ring();
    let unit = alg.unit().ok_or_else(|| Error::BadInput("algebra has no registered unit".into()))?;
    let triple = triple_from_algebra(alg)?;
    if !is_triple_automorphism(&triple, phi)? {
        return Err(Error::BadInput("map is not a triple automorphism".into()));
    }
    let image = phi.apply(unit);
    let roots = if r.is_finite() { r.mu_n(2)? } else { vec![r.one(), r.neg(r.one())] };
    for root in roots {
        let scaled: Vec<RingElement> = unit.iter().map(|&c| r.mul(root, c)).collect();
        if scaled == image {
            let psi = phi.scale(root);
            if is_algebra_automorphism(alg, &psi)? {
                return Ok((root, psi));
            }
        }
    }
    let dump = serde_json::to_string(phi).unwrap_or_default();
    Err(Error::NotFactorable(format!("ring {r}, map {dump}")))
}

/// `a ∈ GO_m`, `b ∈ GO_n` for the standard forms and `m_a m_b = 1`.
pub fn tti_membership(a: &Matrix, b: &Matrix) -> Result<bool> {
    require_square(a)?;
    require_square(b)?;
    let r = a.ring();
    let ma = similitude_multiplier(a, &BilinearForm::standard(r, a.rows()))?;
    let mb = similitude_multiplier(b, &BilinearForm::standard(r, b.rows()))?;
    Ok(matches!((ma, mb), (Some(x), Some(y)) if r.is_one(r.mul(x, y))))
}

/// `X -> aXb` on `M_{m,n}`: the common component of `L̃_a R̃_b` when it is a
/// triple automorphism of `TtI_{m,n}`.
pub fn tti_map(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    require_square(a)?;
    require_square(b)?;
    Ok(left_mult(a, b.rows()).mul(&right_mult(b, a.rows())))
}

/// Whether the twisted map is an automorphism of `alg` (a copy of `M_n^(+)`).
pub fn twisted_preserves_algebra(alg: &JordanAlgebra, t: &TwistedMap) -> Result<bool> {
    is_algebra_automorphism(alg, &t.to_matrix())
}

/// Random determinant similitude `L_a R_b f_τ` on `M_n`.
pub fn random_similitude<G: rand::Rng>(ring: &Ring, n: usize, rng: &mut G) -> Result<Matrix> {
    let a = random_invertible(ring, n, rng)?;
    let b = random_invertible(ring, n, rng)?;
    let roots = ring.mu_n(2)?;
    let tau = roots[rng.gen_range(0..roots.len())];
    phi_n(&a, &b.transpose(), tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_mn_plus, make_type_iv_pair, make_type_iv_triple, make_vhi, make_vti, vti_to_vhi};
    use crate::jordan::is_pair_automorphism;

    fn f(p: u32) -> Ring {
        Ring::prime(p).unwrap()
    }

    fn ring(s: &str) -> Ring {
        s.parse().unwrap()
    }

    #[test]
    fn go_examples() {
        let r = f(5);
        let form = BilinearForm::standard(&r, 2);
        assert!(go_to_pair_aut(&Matrix::identity(&r, 2), &form).unwrap().is_identity());
        let p = go_to_pair_aut(&Matrix::scalar(&r, 2, r.from_int(2)), &form).unwrap();
        assert_eq!(p.minus, Matrix::scalar(&r, 2, r.from_int(3)));
        let r3 = f(3);
        let swap = Matrix::from_ints(&r3, &[&[0, 1], &[1, 0]]);
        let p = go_to_pair_aut(&swap, &BilinearForm::standard(&r3, 2)).unwrap();
        assert_eq!(p.plus, p.minus);
        let bad = Matrix::from_ints(&r, &[&[1, 1], &[0, 1]]);
        assert_eq!(go_to_pair_aut(&bad, &form), Err(Error::NotSimilitude));
    }

    #[test]
    fn ortho_examples() {
        let r = f(5);
        let form = BilinearForm::standard(&r, 2);
        let t = make_type_iv_triple(&form).unwrap();
        let minus = Matrix::scalar(&r, 2, r.from_int(-1));
        let phi = ortho_to_triple_aut(&minus, &form).unwrap();
        assert!(is_triple_automorphism(t.triple().unwrap(), &phi).unwrap());
        assert_eq!(ortho_to_triple_aut(&Matrix::scalar(&r, 2, r.from_int(2)), &form), Err(Error::NotIsometry));
    }

    #[test]
    fn hat_and_tilde_generators() {
        let r = f(5);
        let vhi = make_vhi(&r, 2, 2).unwrap();
        let a = Matrix::from_ints(&r, &[&[1, 0], &[0, 2]]);
        let b = Matrix::from_ints(&r, &[&[1, 3], &[2, 2]]);
        assert!(is_pair_automorphism(vhi.pair().unwrap(), &hat_left(&a, 2).unwrap()).unwrap());
        assert!(is_pair_automorphism(vhi.pair().unwrap(), &hat_generators(&a, &b).unwrap()).unwrap());
        let vti = make_vti(&r, 2, 2).unwrap();
        assert!(is_pair_automorphism(vti.pair().unwrap(), &tilde_generators(&a, &b).unwrap()).unwrap());
        // L̂_a R̂_{a^{-1}} is conjugation by a on both sides.
        let c = hat_generators(&a, &a.inverse().unwrap()).unwrap();
        let conj = left_mult(&a, 2).mul(&right_mult(&a.inverse().unwrap(), 2));
        assert_eq!((c.plus.clone(), c.minus.clone()), (conj.clone(), conj));
        // Conjugating tilde generators by vti_to_vhi gives hat generators.
        let iso = vti_to_vhi(&r, 2, 2).unwrap();
        let inv = iso.inverse().unwrap();
        assert_eq!(iso.compose(&tilde_left(&a, 2).unwrap()).compose(&inv), hat_left(&a, 2).unwrap());
        assert_eq!(iso.compose(&tilde_right(&b, 2).unwrap()).compose(&inv), hat_right(&b, 2).unwrap());
    }

    #[test]
    fn twisted_examples() {
        let r = f(3);
        let x = Matrix::from_ints(&r, &[&[1, 2], &[0, 1]]);
        let id = TwistedMap::identity(&r, 2);
        assert_eq!(id.apply(&x).unwrap(), x);
        let t = TwistedMap::new(r.zero(), Matrix::identity(&r, 2), Sign::Plus).unwrap();
        assert_eq!(t.apply(&x).unwrap(), x.transpose());

        let rr = ring("F3xF3");
        let e1 = rr.parse_element("(1,0)").unwrap();
        let t = TwistedMap::new(e1, Matrix::identity(&rr, 2), Sign::Plus).unwrap();
        let y = Matrix::from_strings(&rr, &[vec!["(1,1)".into(), "(2,1)".into()], vec!["(0,2)".into(), "(1,0)".into()]])
            .unwrap();
        let expected =
            Matrix::from_strings(&rr, &[vec!["(1,1)".into(), "(2,2)".into()], vec!["(0,1)".into(), "(1,0)".into()]])
                .unwrap();
        assert_eq!(t.apply(&y).unwrap(), expected);
        let mp = make_mn_plus(&rr, 2).unwrap();
        assert!(twisted_preserves_algebra(mp.algebra().unwrap(), &t).unwrap());
    }

    #[test]
    fn twisted_composition() {
        let rr = ring("F3xF3");
        let e = rr.idempotents().unwrap();
        let gl = [Matrix::from_ints(&rr, &[&[1, 1], &[0, 1]]), Matrix::from_ints(&rr, &[&[0, 2], &[1, 1]])];
        for sign in Sign::BOTH {
            for &e1 in &e {
                for &e2 in &e {
                    let t1 = TwistedMap::new(e1, gl[0].clone(), sign).unwrap();
                    let t2 = TwistedMap::new(e2, gl[1].clone(), sign).unwrap();
                    let c = t1.compose(&t2).unwrap();
                    assert_eq!(c.e1(), idempotent_product(&rr, e1, e2));
                    assert_eq!(c.to_matrix(), t1.to_matrix().mul(&t2.to_matrix()));
                    assert!(t1.compose(&t1.inverse().unwrap()).unwrap().to_matrix().is_identity());
                }
            }
        }
        let plus = TwistedMap::identity(&rr, 2);
        let minus = TwistedMap::new(rr.one(), Matrix::identity(&rr, 2), Sign::Minus).unwrap();
        assert_eq!(plus.compose(&minus), Err(Error::MixedSigns));
    }

    #[test]
    fn canonical_conjugator() {
        let r = f(5);
        let g = Matrix::from_ints(&r, &[&[0, 2], &[3, 1]]);
        let a = TwistedMap::new(r.one(), g.clone(), Sign::Plus).unwrap();
        let b = TwistedMap::new(r.one(), g.scale(r.from_int(4)), Sign::Plus).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.g().get(0, 1), r.one());
    }

    #[test]
    fn det_examples() {
        let r = f(5);
        let t = transpose_operator(&r, 2, 2);
        assert!(det_isometry_check(&t, 2).unwrap());
        let g = Matrix::from_ints(&r, &[&[1, 2], &[3, 4]]);
        let h = g.inverse().unwrap();
        let f_ = left_mult(&g, 2).mul(&right_mult(&h, 2));
        assert!(det_isometry_check(&f_, 2).unwrap());
        let l2 = left_mult(&Matrix::scalar(&r, 2, r.from_int(2)), 2);
        assert_eq!(det_multiplier(&l2, 2).unwrap(), Some(r.from_int(4)));
        let fac = det_similitude_factor(&l2, 2).unwrap();
        assert_eq!(fac.a, Matrix::scalar(&r, 2, r.from_int(2)));
        assert!(fac.isometry.is_identity());
        // A rank-changing map is not a similitude.
        let mut proj = Matrix::identity(&r, 4);
        proj.set(1, 1, r.zero());
        proj.set(1, 2, r.one());
        assert_eq!(det_similitude_factor(&proj, 2), Err(Error::NotSimilitude));
    }

    #[test]
    fn det_over_rationals() {
        let q = Ring::rationals();
        let a = Matrix::from_ints(&q, &[&[2, 1, 0], &[0, 1, 0], &[1, 0, 3]]);
        let f_ = left_mult(&a, 3);
        assert_eq!(det_multiplier(&f_, 3).unwrap(), Some(q.from_int(6)));
    }

    #[test]
    fn phi_n_examples() {
        let r = f(5);
        let one = Matrix::identity(&r, 2);
        assert!(phi_n(&one, &one, r.one()).unwrap().is_identity());
        let two = Matrix::scalar(&r, 2, r.from_int(2));
        let three = Matrix::scalar(&r, 2, r.from_int(3));
        assert!(phi_n(&two, &three, r.one()).unwrap().is_identity());
        let a = Matrix::from_ints(&r, &[&[1, 1], &[0, 1]]);
        let (c, d) = phi_tau(r.from_int(-1), &a, &one).unwrap();
        assert_eq!((c, d), (one.clone(), a.clone()));
        assert!(matches!(phi_n(&a, &one, r.from_int(2)), Err(Error::BadInput(_))));
    }

    #[test]
    fn phi_n_is_a_homomorphism() {
        let rr = ring("F3xF3");
        let g1 = SemidirectElement {
            a: Matrix::from_ints(&rr, &[&[1, 1], &[0, 1]]),
            b: Matrix::from_ints(&rr, &[&[2, 0], &[1, 1]]),
            tau: rr.parse_element("(1,2)").unwrap(),
        };
        let g2 = SemidirectElement {
            a: Matrix::from_ints(&rr, &[&[0, 1], &[1, 0]]),
            b: Matrix::from_ints(&rr, &[&[1, 2], &[0, 1]]),
            tau: rr.parse_element("(2,2)").unwrap(),
        };
        let prod = g1.multiply(&g2).unwrap();
        assert_eq!(prod.image().unwrap(), g1.image().unwrap().mul(&g2.image().unwrap()));
    }

    #[test]
    fn kernel_small() {
        let report = phi_n_kernel_check(&f(3), 2).unwrap();
        assert!(report.kernel_is_torus);
        assert_eq!(report.kernel_size, 2);
    }

    #[test]
    fn central_products() {
        let r = f(5);
        let two = Matrix::scalar(&r, 2, r.from_int(2));
        let three = Matrix::scalar(&r, 2, r.from_int(3));
        let c = CentralProductElement::new(two, three, None).unwrap();
        let one = Matrix::identity(&r, 2);
        assert_eq!(c, CentralProductElement::new(one.clone(), one.clone(), None).unwrap());

        let r3 = f(3);
        let gl = crate::matrix::enumerate_gl(2, &r3).unwrap();
        let mut classes = std::collections::HashSet::new();
        for a in &gl {
            for b in &gl {
                classes.insert(CentralProductElement::new(a.clone(), b.clone(), None).unwrap());
            }
        }
        assert_eq!(classes.len(), 1152);
    }

    #[test]
    fn central_product_with_flag() {
        let rr = ring("F3xF3");
        let x = CentralProductElement::new(
            Matrix::from_ints(&rr, &[&[1, 1], &[0, 1]]),
            Matrix::from_ints(&rr, &[&[2, 0], &[1, 1]]),
            Some(rr.parse_element("(1,2)").unwrap()),
        )
        .unwrap();
        let y = CentralProductElement::new(
            Matrix::from_ints(&rr, &[&[0, 1], &[1, 0]]),
            Matrix::from_ints(&rr, &[&[1, 2], &[0, 1]]),
            Some(rr.parse_element("(2,1)").unwrap()),
        )
        .unwrap();
        let xy = x.multiply(&y).unwrap();
        assert_eq!(xy.to_vhi_aut().unwrap(), x.to_vhi_aut().unwrap().compose(&y.to_vhi_aut().unwrap()));
        assert!(x.multiply(&x.inverse().unwrap()).unwrap().to_vhi_aut().unwrap().is_identity());
        let vhi = make_vhi(&rr, 2, 2).unwrap();
        assert!(is_pair_automorphism(vhi.pair().unwrap(), &xy.to_vhi_aut().unwrap()).unwrap());
        assert_eq!(xy.to_vhi_aut().unwrap().plus, phi_n(xy.a(), xy.b(), xy.tau().unwrap()).unwrap());
    }

    #[test]
    fn factor_examples() {
        let r = f(5);
        let j = crate::catalog::make_bilinear_form_algebra(&BilinearForm::standard(&r, 1)).unwrap();
        let alg = j.algebra().unwrap();
        let minus = Matrix::scalar(&r, 2, r.from_int(-1));
        let (root, psi) = factor_triple_aut(alg, &minus).unwrap();
        assert_eq!(root, r.from_int(-1));
        assert!(psi.is_identity());
        let (root, psi) = factor_triple_aut(alg, &Matrix::identity(&r, 2)).unwrap();
        assert_eq!(root, r.one());
        assert!(psi.is_identity());
    }

    #[test]
    fn tti_examples() {
        let r = f(5);
        let one1 = Matrix::identity(&r, 1);
        let one2 = Matrix::identity(&r, 2);
        assert!(tti_membership(&one1, &one2).unwrap());
        let a = Matrix::scalar(&r, 1, r.from_int(2));
        let c = Matrix::from_ints(&r, &[&[0, 1], &[1, 0]]);
        assert!(!tti_membership(&a, &c).unwrap());
        let b = c.scale(r.from_int(3));
        assert!(tti_membership(&a, &b).unwrap());
        let t = crate::catalog::make_tti(&r, 1, 2).unwrap();
        assert!(is_triple_automorphism(t.triple().unwrap(), &tti_map(&a, &b).unwrap()).unwrap());
        let pair = tilde_generators(&a, &b).unwrap();
        assert_eq!(pair.plus, pair.minus);
    }

    #[test]
    fn type_iv_pair_from_similitude_is_automorphism() {
        let r = f(5);
        let form = BilinearForm::standard(&r, 2);
        let v = make_type_iv_pair(&form).unwrap();
        for (a, _) in crate::matrix::enumerate_go(&form).unwrap() {
            assert!(is_pair_automorphism(v.pair().unwrap(), &go_to_pair_aut(&a, &form).unwrap()).unwrap());
        }
    }
}
