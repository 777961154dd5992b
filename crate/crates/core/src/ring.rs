//! Exact commutative unital rings of characteristic other than two.
//!
//! A ring is described by a [`RingDescriptor`] built from prime fields, the
//! rationals, binary products and dual numbers `R[t]/(t^2)`. Elements are small
//! `Copy` values; every operation goes through the [`Ring`] handle that owns the
//! arithmetic. Finite rings encode elements as mixed-radix indices:
//!
//! * `F_p`: the residue in `[0, p)`;
//! * `A x B`: `a * |B| + b`;
//! * `R[t]`: `a * |R| + b` for `a + b t`.
//!
//! The encoding is a bijection with the canonical payload, so structural
//! equality of indices is equality of elements.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Rings with at most this many elements get precomputed Cayley tables.
const TABLE_LIMIT: u64 = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingDescriptor {
    Prime(u32),
    Rationals,
    Product(Box<RingDescriptor>, Box<RingDescriptor>),
    Dual(Box<RingDescriptor>),
}

impl RingDescriptor {
    pub fn product(a: RingDescriptor, b: RingDescriptor) -> Self {
        RingDescriptor::Product(Box::new(a), Box::new(b))
    }

    pub fn dual(r: RingDescriptor) -> Self {
        RingDescriptor::Dual(Box::new(r))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RingDescriptor::Prime(p) => {
                if *p == 2 {
                    return Err(Error::InvalidRing("characteristic 2 is not supported".into()));
                }
                if !is_prime(*p) {
                    return Err(Error::InvalidRing(format!("{p} is not prime")));
                }
                if *p >= 1 << 31 {
                    return Err(Error::InvalidRing(format!("prime {p} is too large")));
                }
                Ok(())
            }
            RingDescriptor::Rationals => Ok(()),
            RingDescriptor::Product(a, b) => {
                for part in [a, b] {
                    if !part.is_finite() {
                        return Err(Error::InvalidRing(
                            "Q is only supported as a standalone ring".into(),
                        ));
                    }
                    part.validate()?;
                }
                Ok(())
            }
            RingDescriptor::Dual(r) => {
                if !r.is_finite() {
                    return Err(Error::InvalidRing(
                        "Q is only supported as a standalone ring".into(),
                    ));
                }
                r.validate()
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            RingDescriptor::Prime(_) => true,
            RingDescriptor::Rationals => false,
            RingDescriptor::Product(a, b) => a.is_finite() && b.is_finite(),
            RingDescriptor::Dual(r) => r.is_finite(),
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn size(&self) -> Option<u64> {
        match self {
            RingDescriptor::Prime(p) => Some(*p as u64),
            RingDescriptor::Rationals => None,
            RingDescriptor::Product(a, b) => a.size()?.checked_mul(b.size()?),
            RingDescriptor::Dual(r) => r.size()?.checked_mul(r.size()?),
        }
    }

    /// Zero for the rationals.
    pub fn characteristic(&self) -> u64 {
        match self {
            RingDescriptor::Prime(p) => *p as u64,
            RingDescriptor::Rationals => 0,
            RingDescriptor::Product(a, b) => a.characteristic().lcm(&b.characteristic()),
            RingDescriptor::Dual(r) => r.characteristic(),
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, RingDescriptor::Prime(_) | RingDescriptor::Rationals)
    }

    fn needs_parens(&self) -> bool {
        matches!(self, RingDescriptor::Product(..))
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::Prime(p) => write!(f, "F{p}"),
            RingDescriptor::Rationals => write!(f, "Q"),
            RingDescriptor::Product(a, b) => {
                // `x` is left associative, so a product on the right needs parens.
                if b.needs_parens() {
                    write!(f, "{a}x({b})")
                } else {
                    write!(f, "{a}x{b}")
                }
            }
            RingDescriptor::Dual(r) => {
                if r.needs_parens() {
                    write!(f, "({r})[t]")
                } else {
                    write!(f, "{r}[t]")
                }
            }
        }
    }
}

impl FromStr for RingDescriptor {
    type Err = Error;

    /// `ring := "Q" | "F"<p> | ring "x" ring | ring "[t]"`, with `[t]` binding
    /// tighter than `x` and `x` associating to the left. Parentheses group.
    fn from_str(s: &str) -> Result<Self> {
        let mut parser = DescriptorParser { text: s.trim().as_bytes(), pos: 0 };
        let desc = parser.product()?;
        if parser.pos != parser.text.len() {
            return Err(Error::Parse(format!("trailing input in ring {s:?}")));
        }
        desc.validate()?;
        Ok(desc)
    }
}

struct DescriptorParser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl DescriptorParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn product(&mut self) -> Result<RingDescriptor> {
        let mut left = self.postfix()?;
        while self.peek() == Some(b'x') {
            self.pos += 1;
            let right = self.postfix()?;
            left = RingDescriptor::product(left, right);
        }
        Ok(left)
    }

    fn postfix(&mut self) -> Result<RingDescriptor> {
        let mut base = self.atom()?;
        while self.text[self.pos..].starts_with(b"[t]") {
            self.pos += 3;
            base = RingDescriptor::dual(base);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RingDescriptor> {
        match self.peek() {
            Some(b'Q') => {
                self.pos += 1;
                Ok(RingDescriptor::Rationals)
            }
            Some(b'F') => {
                self.pos += 1;
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.text[start..self.pos]).unwrap_or("");
                let p: u32 = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("expected a prime after F, got {digits:?}")))?;
                Ok(RingDescriptor::Prime(p))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.product()?;
                if self.peek() != Some(b')') {
                    return Err(Error::Parse("unbalanced parenthesis in ring".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            other => Err(Error::Parse(format!(
                "unexpected {:?} at offset {} in ring",
                other.map(char::from),
                self.pos
            ))),
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of some [`Ring`]. Which variant is meaningful depends on the ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingElement {
    Finite(u32),
    Rational(Rational),
}

impl RingElement {
    /// Index of a finite-ring element. Panics on rationals.
    pub fn index(self) -> u32 {
        match self {
            RingElement::Finite(i) => i,
            RingElement::Rational(_) => panic!("rational element has no index"),
        }
    }
}

struct Tables {
    size: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

const NO_INVERSE: u32 = u32::MAX;

struct RingData {
    desc: RingDescriptor,
    tables: Option<Tables>,
}

/// Shared handle to a ring and its arithmetic.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.desc == other.0.desc
    }
}

impl Eq for Ring {}

impl Hash for Ring {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.desc.hash(state)
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({})", self.0.desc)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.desc.fmt(f)
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ring::new(s.parse()?)
    }
}

impl Ring {
    pub fn new(desc: RingDescriptor) -> Result<Ring> {
        desc.validate()?;
        let tables = match desc.size() {
            Some(size) if size <= TABLE_LIMIT => Some(build_tables(&desc, size as usize)),
            _ => None,
        };
        Ok(Ring(Arc::new(RingData { desc, tables })))
    }

    pub fn prime(p: u32) -> Result<Ring> {
        Ring::new(RingDescriptor::Prime(p))
    }

    pub fn rationals() -> Ring {
        Ring::new(RingDescriptor::Rationals).expect("Q is always valid")
    }

    pub fn descriptor(&self) -> &RingDescriptor {
        &self.0.desc
    }

    pub fn is_finite(&self) -> bool {
        self.0.desc.is_finite()
    }

    pub fn is_field(&self) -> bool {
        self.0.desc.is_field()
    }

    pub fn size(&self) -> Option<u64> {
        self.0.desc.size()
    }

    pub fn characteristic(&self) -> u64 {
        self.0.desc.characteristic()
    }

    pub fn zero(&self) -> RingElement {
        self.from_int(0)
    }

    pub fn one(&self) -> RingElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> RingElement {
        match &self.0.desc {
            RingDescriptor::Rationals => RingElement::Rational(Rational::from_integer(n as i128)),
            d => RingElement::Finite(fin_from_int(d, n)),
        }
    }

    pub fn rational(&self, num: i128, den: i128) -> Result<RingElement> {
        if den == 0 {
            return Err(Error::BadInput("zero denominator".into()));
        }
        match &self.0.desc {
            RingDescriptor::Rationals => Ok(RingElement::Rational(Rational::new(num, den))),
            _ => {
                let d = self
                    .inv(self.embed_int(den))
                    .ok_or_else(|| Error::BadInput(format!("{den} is not invertible in {self}")))?;
                Ok(self.mul(self.embed_int(num), d))
            }
        }
    }

    fn embed_int(&self, n: i128) -> RingElement {
        match &self.0.desc {
            RingDescriptor::Rationals => RingElement::Rational(Rational::from_integer(n)),
            d => {
                let c = d.characteristic() as i128;
                RingElement::Finite(fin_from_int(d, n.rem_euclid(c) as i64))
            }
        }
    }

    pub fn add(&self, a: RingElement, b: RingElement) -> RingElement {
        match (a, b) {
            (RingElement::Finite(x), RingElement::Finite(y)) => RingElement::Finite(match &self.0.tables {
                Some(t) => t.add[x as usize * t.size + y as usize],
                None => fin_add(&self.0.desc, x, y),
            }),
            (RingElement::Rational(x), RingElement::Rational(y)) => {
                RingElement::Rational(x.checked_add(&y).expect("rational overflow"))
            }
            _ => panic!("mixed element kinds in {}", self),
        }
    }

    pub fn sub(&self, a: RingElement, b: RingElement) -> RingElement {
        match (a, b) {
            (RingElement::Rational(x), RingElement::Rational(y)) => {
                RingElement::Rational(x.checked_sub(&y).expect("rational overflow"))
            }
            _ => self.add(a, self.neg(b)),
        }
    }

    pub fn neg(&self, a: RingElement) -> RingElement {
        match a {
            RingElement::Finite(x) => RingElement::Finite(match &self.0.tables {
                Some(t) => t.neg[x as usize],
                None => fin_neg(&self.0.desc, x),
            }),
            RingElement::Rational(x) => RingElement::Rational(-x),
        }
    }

    pub fn mul(&self, a: RingElement, b: RingElement) -> RingElement {
        match (a, b) {
            (RingElement::Finite(x), RingElement::Finite(y)) => RingElement::Finite(match &self.0.tables {
                Some(t) => t.mul[x as usize * t.size + y as usize],
                None => fin_mul(&self.0.desc, x, y),
            }),
            (RingElement::Rational(x), RingElement::Rational(y)) => {
                RingElement::Rational(x.checked_mul(&y).expect("rational overflow"))
            }
            _ => panic!("mixed element kinds in {}", self),
        }
    }

    /// Multiplicative inverse, `None` for non-units.
    pub fn inv(&self, a: RingElement) -> Option<RingElement> {
        match a {
            RingElement::Finite(x) => {
                let i = match &self.0.tables {
                    Some(t) => t.inv[x as usize],
                    None => fin_inv(&self.0.desc, x).unwrap_or(NO_INVERSE),
                };
                (i != NO_INVERSE).then_some(RingElement::Finite(i))
            }
            RingElement::Rational(x) => (!x.is_zero()).then(|| RingElement::Rational(x.recip())),
        }
    }

    pub fn is_unit(&self, a: RingElement) -> bool {
        self.inv(a).is_some()
    }

    pub fn is_zero(&self, a: RingElement) -> bool {
        a == self.zero()
    }

    pub fn is_one(&self, a: RingElement) -> bool {
        a == self.one()
    }

    /// The inverse of 2, which exists because the characteristic is never 2.
    pub fn half(&self) -> RingElement {
        self.inv(self.from_int(2)).expect("2 is a unit in every supported ring")
    }

    pub fn pow(&self, a: RingElement, mut n: u64) -> RingElement {
        let mut base = a;
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn sum<I: IntoIterator<Item = RingElement>>(&self, items: I) -> RingElement {
        items.into_iter().fold(self.zero(), |acc, x| self.add(acc, x))
    }

    /// All elements in index order.
    pub fn elements(&self) -> Result<Vec<RingElement>> {
        let size = self.size().ok_or_else(|| Error::NonEnumerableRing(self.to_string()))?;
        Ok((0..size as u32).map(RingElement::Finite).collect())
    }

    pub fn units(&self) -> Result<Vec<RingElement>> {
        Ok(self.elements()?.into_iter().filter(|&x| self.is_unit(x)).collect())
    }

    /// All `e` with `e^2 = e`.
    pub fn idempotents(&self) -> Result<Vec<RingElement>> {
        Ok(self
            .elements()?
            .into_iter()
            .filter(|&e| self.mul(e, e) == e)
            .collect())
    }

    /// The `n`-th roots of unity.
    pub fn mu_n(&self, n: u64) -> Result<Vec<RingElement>> {
        if n == 0 {
            return Err(Error::BadInput("mu_0 is not defined".into()));
        }
        let one = self.one();
        Ok(self
            .elements()?
            .into_iter()
            .filter(|&r| self.pow(r, n) == one)
            .collect())
    }

    /// `tau -> (1 + tau) / 2`, the bijection from `mu_2` onto the idempotents.
    pub fn idempotent_of_root(&self, tau: RingElement) -> RingElement {
        self.mul(self.half(), self.add(self.one(), tau))
    }

    /// `e -> 2e - 1`, inverse of [`Ring::idempotent_of_root`].
    pub fn root_of_idempotent(&self, e: RingElement) -> RingElement {
        self.sub(self.add(e, e), self.one())
    }

    pub fn splitting(&self, e1: RingElement) -> Result<Splitting> {
        if self.mul(e1, e1) != e1 {
            return Err(Error::NotIdempotent { ring: self.to_string(), element: self.show(e1) });
        }
        Ok(Splitting { ring: self.clone(), e1, e2: self.sub(self.one(), e1) })
    }

    /// Primitive idempotents splitting the ring into local factors.
    pub fn local_idempotents(&self) -> Vec<RingElement> {
        match &self.0.desc {
            RingDescriptor::Rationals => vec![self.one()],
            d => fin_local_idempotents(d).into_iter().map(RingElement::Finite).collect(),
        }
    }

    /// Whether `x` is a unit of the factor ring `eR`, for an idempotent `e`.
    pub fn is_unit_in_component(&self, x: RingElement, e: RingElement) -> bool {
        let shifted = self.add(self.mul(x, e), self.sub(self.one(), e));
        self.is_unit(shifted)
    }

    /// Some `i` with `i^2 = -1`, scanning elements in order; `None` if absent.
    /// On the rationals the answer is always `None`.
    pub fn sqrt_minus_one(&self) -> Option<RingElement> {
        let minus_one = self.neg(self.one());
        self.elements().ok()?.into_iter().find(|&x| self.mul(x, x) == minus_one)
    }

    /// `|GL_d(R)|` for finite rings, `None` if infinite or too large for `u128`.
    pub fn gl_order(&self, d: u32) -> Option<u128> {
        gl_order(&self.0.desc, d)
    }

    /// Image of `x` in `self` under the canonical map from `base`.
    ///
    /// Supported when the rings coincide or when `base` is the prime field of
    /// `self`'s characteristic.
    pub fn embed(&self, base: &Ring, x: RingElement) -> Result<RingElement> {
        if base == self {
            return Ok(x);
        }
        match (base.descriptor(), x) {
            (RingDescriptor::Prime(p), RingElement::Finite(r)) if self.characteristic() == *p as u64 => {
                Ok(self.from_int(r as i64))
            }
            _ => Err(Error::IncompatibleRings { from: base.to_string(), to: self.to_string() }),
        }
    }

    /// Canonical string of an element.
    pub fn show(&self, x: RingElement) -> String {
        match x {
            RingElement::Rational(q) => {
                if q.is_integer() {
                    q.numer().to_string()
                } else {
                    format!("{}/{}", q.numer(), q.denom())
                }
            }
            RingElement::Finite(i) => fin_show(&self.0.desc, i),
        }
    }

    pub fn parse_element(&self, text: &str) -> Result<RingElement> {
        let bad = || Error::BadElement { ring: self.to_string(), text: text.to_string() };
        match &self.0.desc {
            RingDescriptor::Rationals => {
                let t = text.trim();
                let q = match t.split_once('/') {
                    Some((n, d)) => {
                        let n: i128 = n.trim().parse().map_err(|_| bad())?;
                        let d: i128 = d.trim().parse().map_err(|_| bad())?;
                        if d == 0 {
                            return Err(bad());
                        }
                        Rational::new(n, d)
                    }
                    None => Rational::from_integer(t.parse().map_err(|_| bad())?),
                };
                Ok(RingElement::Rational(q))
            }
            d => fin_parse(d, text.trim()).map(RingElement::Finite).ok_or_else(bad),
        }
    }
}

/// The decomposition `R = e1 R x e2 R` attached to an idempotent.
#[derive(Clone, Debug)]
pub struct Splitting {
    ring: Ring,
    pub e1: RingElement,
    pub e2: RingElement,
}

impl Splitting {
    pub fn first(&self, x: RingElement) -> RingElement {
        self.ring.mul(self.e1, x)
    }

    pub fn second(&self, x: RingElement) -> RingElement {
        self.ring.mul(self.e2, x)
    }
}

// Structural arithmetic on finite index encodings.

fn fin_size(d: &RingDescriptor) -> u32 {
    d.size().expect("finite ring") as u32
}

fn fin_from_int(d: &RingDescriptor, n: i64) -> u32 {
    match d {
        RingDescriptor::Prime(p) => n.rem_euclid(*p as i64) as u32,
        RingDescriptor::Product(a, b) => fin_from_int(a, n) * fin_size(b) + fin_from_int(b, n),
        RingDescriptor::Dual(r) => fin_from_int(r, n) * fin_size(r),
        RingDescriptor::Rationals => unreachable!("Q has no index encoding"),
    }
}

fn split2(d: &RingDescriptor, x: u32) -> (u32, u32) {
    match d {
        RingDescriptor::Product(_, b) => (x / fin_size(b), x % fin_size(b)),
        RingDescriptor::Dual(r) => (x / fin_size(r), x % fin_size(r)),
        _ => unreachable!(),
    }
}

fn fin_add(d: &RingDescriptor, x: u32, y: u32) -> u32 {
    match d {
        RingDescriptor::Prime(p) => ((x as u64 + y as u64) % *p as u64) as u32,
        RingDescriptor::Product(a, b) => {
            let ((x1, x2), (y1, y2)) = (split2(d, x), split2(d, y));
            fin_add(a, x1, y1) * fin_size(b) + fin_add(b, x2, y2)
        }
        RingDescriptor::Dual(r) => {
            let ((x0, x1), (y0, y1)) = (split2(d, x), split2(d, y));
            fin_add(r, x0, y0) * fin_size(r) + fin_add(r, x1, y1)
        }
        RingDescriptor::Rationals => unreachable!(),
    }
}

fn fin_neg(d: &RingDescriptor, x: u32) -> u32 {
    match d {
        RingDescriptor::Prime(p) => (*p - x) % *p,
        RingDescriptor::Product(a, b) => {
            let (x1, x2) = split2(d, x);
            fin_neg(a, x1) * fin_size(b) + fin_neg(b, x2)
        }
        RingDescriptor::Dual(r) => {
            let (x0, x1) = split2(d, x);
            fin_neg(r, x0) * fin_size(r) + fin_neg(r, x1)
        }
        RingDescriptor::Rationals => unreachable!(),
    }
}

fn fin_mul(d: &RingDescriptor, x: u32, y: u32) -> u32 {
    match d {
        RingDescriptor::Prime(p) => ((x as u64 * y as u64) % *p as u64) as u32,
        RingDescriptor::Product(a, b) => {
            let ((x1, x2), (y1, y2)) = (split2(d, x), split2(d, y));
            fin_mul(a, x1, y1) * fin_size(b) + fin_mul(b, x2, y2)
        }
        RingDescriptor::Dual(r) => {
            // (x0 + x1 t)(y0 + y1 t) = x0 y0 + (x0 y1 + x1 y0) t
            let ((x0, x1), (y0, y1)) = (split2(d, x), split2(d, y));
            let lin = fin_add(r, fin_mul(r, x0, y1), fin_mul(r, x1, y0));
            fin_mul(r, x0, y0) * fin_size(r) + lin
        }
        RingDescriptor::Rationals => unreachable!(),
    }
}

fn fin_inv(d: &RingDescriptor, x: u32) -> Option<u32> {
    match d {
        RingDescriptor::Prime(p) => {
            if x == 0 {
                return None;
            }
            let e = (x as i64).extended_gcd(&(*p as i64));
            Some(e.x.rem_euclid(*p as i64) as u32)
        }
        RingDescriptor::Product(a, b) => {
            let (x1, x2) = split2(d, x);
            Some(fin_inv(a, x1)? * fin_size(b) + fin_inv(b, x2)?)
        }
        RingDescriptor::Dual(r) => {
            // (x0 + x1 t)^-1 = x0^-1 - x0^-2 x1 t
            let (x0, x1) = split2(d, x);
            let i0 = fin_inv(r, x0)?;
            let lin = fin_neg(r, fin_mul(r, fin_mul(r, i0, i0), x1));
            Some(i0 * fin_size(r) + lin)
        }
        RingDescriptor::Rationals => unreachable!(),
    }
}

fn fin_local_idempotents(d: &RingDescriptor) -> Vec<u32> {
    match d {
        RingDescriptor::Prime(_) => vec![1],
        RingDescriptor::Product(a, b) => {
            let nb = fin_size(b);
            let mut out: Vec<u32> = fin_local_idempotents(a).into_iter().map(|e| e * nb).collect();
            out.extend(fin_local_idempotents(b));
            out
        }
        RingDescriptor::Dual(r) => fin_local_idempotents(r).into_iter().map(|e| e * fin_size(r)).collect(),
        RingDescriptor::Rationals => unreachable!(),
    }
}

fn fin_show(d: &RingDescriptor, x: u32) -> String {
    match d {
        RingDescriptor::Prime(_) => x.to_string(),
        RingDescriptor::Product(a, b) => {
            let (x1, x2) = split2(d, x);
            format!("({},{})", fin_show(a, x1), fin_show(b, x2))
        }
        RingDescriptor::Dual(r) => {
            let (x0, x1) = split2(d, x);
            let wrap = |s: String| if matches!(**r, RingDescriptor::Dual(_)) { format!("({s})") } else { s };
            format!("{}+{}t", wrap(fin_show(r, x0)), wrap(fin_show(r, x1)))
        }
        RingDescriptor::Rationals => unreachable!(),
    }
}

/// Splits `text` at the first top-level occurrence of `sep`.
fn split_top_level(text: &str, sep: char) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => return Some((&text[..i], &text[i + 1..])),
            _ => {}
        }
    }
    None
}

fn strip_parens(text: &str) -> &str {
    let t = text.trim();
    if t.starts_with('(') && t.ends_with(')') && split_top_level(&t[1..t.len() - 1], ')').is_none() {
        &t[1..t.len() - 1]
    } else {
        t
    }
}

fn fin_parse(d: &RingDescriptor, text: &str) -> Option<u32> {
    match d {
        RingDescriptor::Prime(p) => {
            let n: i64 = text.trim().parse().ok()?;
            Some(n.rem_euclid(*p as i64) as u32)
        }
        RingDescriptor::Product(a, b) => {
            let inner = text.trim().strip_prefix('(')?.strip_suffix(')')?;
            let (l, r) = split_top_level(inner, ',')?;
            Some(fin_parse(a, l)? * fin_size(b) + fin_parse(b, r)?)
        }
        RingDescriptor::Dual(r) => {
            let body = text.trim().strip_suffix('t')?;
            let (c0, c1) = split_top_level(body, '+')?;
            Some(fin_parse(r, strip_parens(c0))? * fin_size(r) + fin_parse(r, strip_parens(c1))?)
        }
        RingDescriptor::Rationals => None,
    }
}

fn gl_order(d: &RingDescriptor, n: u32) -> Option<u128> {
    match d {
        RingDescriptor::Prime(p) => {
            let q = *p as u128;
            let qn = q.checked_pow(n)?;
            (0..n).try_fold(1u128, |acc, i| acc.checked_mul(qn - q.pow(i)))
        }
        RingDescriptor::Product(a, b) => gl_order(a, n)?.checked_mul(gl_order(b, n)?),
        RingDescriptor::Dual(r) => {
            // GL_n(R[t]) -> GL_n(R) is onto with kernel 1 + t M_n(R).
            let s = r.size()? as u128;
            s.checked_pow(n * n)?.checked_mul(gl_order(r, n)?)
        }
        RingDescriptor::Rationals => None,
    }
}

fn build_tables(d: &RingDescriptor, size: usize) -> Tables {
    let mut add = vec![0; size * size];
    let mut mul = vec![0; size * size];
    for x in 0..size as u32 {
        for y in 0..size as u32 {
            add[x as usize * size + y as usize] = fin_add(d, x, y);
            mul[x as usize * size + y as usize] = fin_mul(d, x, y);
        }
    }
    let neg = (0..size as u32).map(|x| fin_neg(d, x)).collect();
    let inv = (0..size as u32).map(|x| fin_inv(d, x).unwrap_or(NO_INVERSE)).collect();
    Tables { size, add, mul, neg, inv }
}
