//! Dense matrices over a [`Ring`], bilinear forms, and enumeration of the
//! classical groups `GL`, `GO` and `O` over finite rings.

use std::fmt;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<RingElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[{}]{:?}", self.ring, self.to_strings())
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows = self.to_strings();
        let mut seq = serializer.serialize_seq(Some(rows.len()))?;
        for row in &rows {
            seq.serialize_element(row)?;
        }
        seq.end()
    }
}

impl Matrix {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Matrix {
        Matrix { ring: ring.clone(), rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: &Ring, n: usize) -> Matrix {
        Matrix::scalar(ring, n, ring.one())
    }

    pub fn scalar(ring: &Ring, n: usize, r: RingElement) -> Matrix {
        let mut m = Matrix::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = r;
        }
        m
    }

    /// The matrix unit `E_{ij}`.
    pub fn unit(ring: &Ring, rows: usize, cols: usize, i: usize, j: usize) -> Matrix {
        let mut m = Matrix::zeros(ring, rows, cols);
        m.data[i * cols + j] = ring.one();
        m
    }

    pub fn from_fn(ring: &Ring, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RingElement) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { ring: ring.clone(), rows, cols, data }
    }

    pub fn from_vec(ring: &Ring, rows: usize, cols: usize, data: Vec<RingElement>) -> Matrix {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Matrix { ring: ring.clone(), rows, cols, data }
    }

    pub fn from_ints(ring: &Ring, rows: &[&[i64]]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_fn(ring, rows.len(), cols, |i, j| ring.from_int(rows[i][j]))
    }

    /// Builds a matrix from canonical element strings, row-major.
    pub fn from_strings(ring: &Ring, rows: &[Vec<String>]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::ShapeMismatch("ragged matrix rows".into()));
            }
            for text in row {
                data.push(ring.parse_element(text)?);
            }
        }
        Ok(Matrix { ring: ring.clone(), rows: rows.len(), cols, data })
    }

    /// Column matrix of a vector.
    pub fn column(ring: &Ring, v: &[RingElement]) -> Matrix {
        Matrix::from_vec(ring, v.len(), 1, v.to_vec())
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[RingElement] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> RingElement {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: RingElement) {
        self.data[i * self.cols + j] = x;
    }

    pub fn col(&self, j: usize) -> Vec<RingElement> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.ring.show(self.get(i, j))).collect())
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.ring, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let r = &self.ring;
        let mut out = Matrix::zeros(r, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if r.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = r.add(out.data[idx], r.mul(a, other.get(k, j)));
                }
            }
        }
        out
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul(other))
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape mismatch");
        let r = &self.ring;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| r.add(a, b)).collect();
        Matrix { ring: r.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(self.ring.neg(self.ring.one())))
    }

    pub fn scale(&self, s: RingElement) -> Matrix {
        let r = &self.ring;
        let data = self.data.iter().map(|&a| r.mul(s, a)).collect();
        Matrix { ring: r.clone(), rows: self.rows, cols: self.cols, data }
    }

    /// `self * v` for a coordinate vector `v`.
    pub fn apply(&self, v: &[RingElement]) -> Vec<RingElement> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let r = &self.ring;
        (0..self.rows)
            .map(|i| r.sum((0..self.cols).map(|j| r.mul(self.get(i, j), v[j]))))
            .collect()
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let r = &self.ring;
        Matrix::from_fn(r, self.rows * other.rows, self.cols * other.cols, |i, j| {
            r.mul(self.get(i / other.rows, j / other.cols), other.get(i % other.rows, j % other.cols))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| self.ring.is_zero(x))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Matrix::identity(&self.ring, self.rows)
    }

    /// `Some(r)` when the matrix is `r * I`.
    pub fn as_scalar(&self) -> Option<RingElement> {
        if !self.is_square() {
            return None;
        }
        let r = if self.rows == 0 { self.ring.one() } else { self.get(0, 0) };
        (*self == Matrix::scalar(&self.ring, self.rows, r)).then_some(r)
    }

    /// Entries mapped into another ring by `f`.
    pub fn map_into(&self, ring: &Ring, mut f: impl FnMut(RingElement) -> Result<RingElement>) -> Result<Matrix> {
        let data = self.data.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { ring: ring.clone(), rows: self.rows, cols: self.cols, data })
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let r = &self.ring;
        Matrix::from_fn(r, self.rows + other.rows, self.cols + other.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self.get(i, j),
                (false, false) => other.get(i - self.rows, j - self.cols),
                _ => r.zero(),
            }
        })
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!("{}x{} is not square", self.rows, self.cols)))
        }
    }

    pub fn det(&self) -> Result<RingElement> {
        self.require_square()?;
        Ok(if self.ring.is_field() { self.det_elimination() } else { self.det_expansion() })
    }

    /// Gaussian elimination; fields only.
    fn det_elimination(&self) -> RingElement {
        let r = &self.ring;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = r.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !r.is_zero(a[i * n + c])) else {
                return r.zero();
            };
            if p != c {
                for j in 0..n {
                    a.swap(p * n + j, c * n + j);
                }
                det = r.neg(det);
            }
            let pivot = a[c * n + c];
            det = r.mul(det, pivot);
            let pinv = r.inv(pivot).expect("nonzero element of a field");
            for i in c + 1..n {
                let f = r.mul(a[i * n + c], pinv);
                if r.is_zero(f) {
                    continue;
                }
                for j in c..n {
                    a[i * n + j] = r.sub(a[i * n + j], r.mul(f, a[c * n + j]));
                }
            }
        }
        det
    }

    /// Laplace expansion along the first row; valid over any commutative ring.
    fn det_expansion(&self) -> RingElement {
        let idx: Vec<usize> = (0..self.rows).collect();
        laplace(&self.ring, &self.data, self.cols, &idx, &idx)
    }

    pub fn adjugate(&self) -> Result<Matrix> {
        self.require_square()?;
        let r = &self.ring;
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let all: Vec<usize> = (0..n).collect();
        Ok(Matrix::from_fn(r, n, n, |i, j| {
            // adj[i][j] = (-1)^(i+j) det(minor with row j and column i removed)
            let rows: Vec<usize> = all.iter().copied().filter(|&k| k != j).collect();
            let cols: Vec<usize> = all.iter().copied().filter(|&k| k != i).collect();
            let m = laplace(r, &self.data, n, &rows, &cols);
            if (i + j) % 2 == 0 { m } else { r.neg(m) }
        }))
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.require_square()?;
        if self.ring.is_field() {
            self.inverse_elimination()
        } else {
            let d = self.det_expansion();
            let dinv = self.ring.inv(d).ok_or(Error::NotInvertible)?;
            Ok(self.adjugate()?.scale(dinv))
        }
    }

    fn inverse_elimination(&self) -> Result<Matrix> {
        let r = &self.ring;
        let n = self.rows;
        let w = 2 * n;
        let mut a = vec![r.zero(); n * w];
        for i in 0..n {
            for j in 0..n {
                a[i * w + j] = self.get(i, j);
            }
            a[i * w + n + i] = r.one();
        }
        for c in 0..n {
            let p = (c..n).find(|&i| !r.is_zero(a[i * w + c])).ok_or(Error::NotInvertible)?;
            if p != c {
                for j in 0..w {
                    a.swap(p * w + j, c * w + j);
                }
            }
            let pinv = r.inv(a[c * w + c]).expect("nonzero element of a field");
            for j in 0..w {
                a[c * w + j] = r.mul(pinv, a[c * w + j]);
            }
            for i in 0..n {
                if i == c || r.is_zero(a[i * w + c]) {
                    continue;
                }
                let f = a[i * w + c];
                for j in 0..w {
                    a[i * w + j] = r.sub(a[i * w + j], r.mul(f, a[c * w + j]));
                }
            }
        }
        Ok(Matrix::from_fn(r, n, n, |i, j| a[i * w + n + j]))
    }

    pub fn is_invertible(&self) -> bool {
        self.det().map(|d| self.ring.is_unit(d)).unwrap_or(false)
    }
}

fn laplace(r: &Ring, data: &[RingElement], stride: usize, rows: &[usize], cols: &[usize]) -> RingElement {
    match rows.len() {
        0 => r.one(),
        1 => data[rows[0] * stride + cols[0]],
        2 => {
            let a = r.mul(data[rows[0] * stride + cols[0]], data[rows[1] * stride + cols[1]]);
            let b = r.mul(data[rows[0] * stride + cols[1]], data[rows[1] * stride + cols[0]]);
            r.sub(a, b)
        }
        _ => {
            let mut acc = r.zero();
            let row = rows[0];
            for (k, &c) in cols.iter().enumerate() {
                let x = data[row * stride + c];
                if r.is_zero(x) {
                    continue;
                }
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&cc| cc != c).collect();
                let term = r.mul(x, laplace(r, data, stride, &rows[1..], &sub_cols));
                acc = if k % 2 == 0 { r.add(acc, term) } else { r.sub(acc, term) };
            }
            acc
        }
    }
}

/// A nondegenerate symmetric bilinear form, given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    gram: Matrix,
}

impl BilinearForm {
    pub fn new(gram: Matrix) -> Result<BilinearForm> {
        if !gram.is_square() {
            return Err(Error::ShapeMismatch("Gram matrix must be square".into()));
        }
        if gram != gram.transpose() {
            return Err(Error::NotSymmetric);
        }
        if !gram.is_invertible() {
            return Err(Error::DegenerateForm);
        }
        Ok(BilinearForm { gram })
    }

    /// The standard scalar product on `R^n`.
    pub fn standard(ring: &Ring, n: usize) -> BilinearForm {
        BilinearForm { gram: Matrix::identity(ring, n) }
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn ring(&self) -> &Ring {
        self.gram.ring()
    }

    pub fn eval(&self, x: &[RingElement], y: &[RingElement]) -> RingElement {
        let r = self.ring();
        let gy = self.gram.apply(y);
        r.sum(x.iter().zip(&gy).map(|(&a, &b)| r.mul(a, b)))
    }

    /// `q(x) = b(x, x) / 2`.
    pub fn quadratic(&self, x: &[RingElement]) -> RingElement {
        self.ring().mul(self.ring().half(), self.eval(x, x))
    }

    /// Same form after scalar extension.
    pub fn extend_to(&self, ring: &Ring) -> Result<BilinearForm> {
        let base = self.ring().clone();
        let gram = self.gram.map_into(ring, |x| ring.embed(&base, x))?;
        Ok(BilinearForm { gram })
    }
}

/// The multiplier `m` with `a^T G a = m G`, if `a` is a similitude with a unit multiplier.
pub fn similitude_multiplier(a: &Matrix, form: &BilinearForm) -> Result<Option<RingElement>> {
    if !a.is_square() || a.rows() != form.dim() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} matrix against a form of dimension {}",
            a.rows(),
            a.cols(),
            form.dim()
        )));
    }
    let ring = a.ring();
    let g = form.gram();
    let transported = a.transpose().mul(g).mul(a);
    let ratio = transported.mul(&g.inverse()?);
    Ok(ratio.as_scalar().filter(|&m| ring.is_unit(m)))
}

/// All `rows x cols` matrices over a finite ring, indexed lexicographically by
/// entry scan with the first entry most significant.
#[derive(Clone, Debug)]
pub struct MatrixSpace {
    ring: Ring,
    rows: usize,
    cols: usize,
    base: u64,
}

impl MatrixSpace {
    pub fn new(ring: &Ring, rows: usize, cols: usize) -> Result<MatrixSpace> {
        let base = ring.size().ok_or_else(|| Error::NonEnumerableRing(ring.to_string()))?;
        Ok(MatrixSpace { ring: ring.clone(), rows, cols, base })
    }

    /// Number of matrices, `None` on overflow.
    pub fn len(&self) -> Option<u64> {
        self.base.checked_pow((self.rows * self.cols) as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn at(&self, mut index: u64) -> Matrix {
        let n = self.rows * self.cols;
        let mut data = vec![RingElement::Finite(0); n];
        for slot in data.iter_mut().rev() {
            *slot = RingElement::Finite((index % self.base) as u32);
            index /= self.base;
        }
        Matrix::from_vec(&self.ring, self.rows, self.cols, data)
    }

    pub fn iter(&self) -> Result<impl Iterator<Item = Matrix> + '_> {
        let len = self
            .len()
            .ok_or(Error::BudgetExceeded { candidates: u128::MAX, budget: u64::MAX as u128 })?;
        Ok((0..len).map(move |i| self.at(i)))
    }
}

/// Invertible `n x n` matrices in lexicographic order.
pub fn enumerate_gl(n: usize, ring: &Ring) -> Result<Vec<Matrix>> {
    let space = MatrixSpace::new(ring, n, n)?;
    let gl = space.iter()?.filter(Matrix::is_invertible).collect();
    Ok(gl)
}

/// Similitudes of `form` with their multipliers, in lexicographic order.
pub fn enumerate_go(form: &BilinearForm) -> Result<Vec<(Matrix, RingElement)>> {
    let n = form.dim();
    let space = MatrixSpace::new(form.ring(), n, n)?;
    let mut out = Vec::new();
    for a in space.iter()? {
        if let Some(m) = similitude_multiplier(&a, form)? {
            if a.is_invertible() {
                out.push((a, m));
            }
        }
    }
    Ok(out)
}

/// Isometries of `form`, in lexicographic order.
pub fn enumerate_o(form: &BilinearForm) -> Result<Vec<Matrix>> {
    let one = form.ring().one();
    Ok(enumerate_go(form)?.into_iter().filter(|(_, m)| *m == one).map(|(a, _)| a).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> Ring {
        s.parse().unwrap()
    }

    #[test]
    fn det_and_inverse_examples() {
        let f5 = ring("F5");
        let i = Matrix::identity(&f5, 3);
        assert_eq!(i.det().unwrap(), f5.one());
        assert_eq!(i.inverse().unwrap(), i);

        let d = Matrix::from_ints(&f5, &[&[2, 0], &[0, 3]]);
        assert_eq!(d.det().unwrap(), f5.one());

        let q = Ring::rationals();
        let u = Matrix::from_ints(&q, &[&[1, 1], &[0, 1]]);
        assert_eq!(u.inverse().unwrap(), Matrix::from_ints(&q, &[&[1, -1], &[0, 1]]));

        let singular = Matrix::from_ints(&f5, &[&[1, 2], &[2, 4]]);
        assert_eq!(singular.inverse(), Err(Error::NotInvertible));
        assert!(matches!(Matrix::zeros(&f5, 2, 3).det(), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn inverse_over_product_ring_without_unit_entries() {
        let r = ring("F3xF3");
        let e = r.parse_element("(1,0)").unwrap();
        let f = r.parse_element("(0,1)").unwrap();
        let m = Matrix::from_vec(&r, 2, 2, vec![e, f, f, e]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
    }

    #[test]
    fn adjugate_identity_exhaustive_f3() {
        let f3 = ring("F3");
        let space = MatrixSpace::new(&f3, 2, 2).unwrap();
        for m in space.iter().unwrap() {
            let d = m.det().unwrap();
            assert_eq!(m.mul(&m.adjugate().unwrap()), Matrix::scalar(&f3, 2, d));
        }
    }

    #[test]
    fn elimination_matches_expansion() {
        let f5 = ring("F5");
        let space = MatrixSpace::new(&f5, 3, 3).unwrap();
        for idx in (0..space.len().unwrap()).step_by(997) {
            let m = space.at(idx);
            assert_eq!(m.det_elimination(), m.det_expansion());
        }
    }

    #[test]
    fn similitude_examples() {
        let f5 = ring("F5");
        let form = BilinearForm::standard(&f5, 2);
        assert_eq!(similitude_multiplier(&Matrix::identity(&f5, 2), &form).unwrap(), Some(f5.one()));
        let two = Matrix::scalar(&f5, 2, f5.from_int(2));
        assert_eq!(similitude_multiplier(&two, &form).unwrap(), Some(f5.from_int(4)));
        let f3 = ring("F3");
        let swap = Matrix::from_ints(&f3, &[&[0, 1], &[1, 0]]);
        assert_eq!(
            similitude_multiplier(&swap, &BilinearForm::standard(&f3, 2)).unwrap(),
            Some(f3.one())
        );
        let shear = Matrix::from_ints(&f3, &[&[1, 1], &[0, 1]]);
        assert_eq!(similitude_multiplier(&shear, &BilinearForm::standard(&f3, 2)).unwrap(), None);
        assert!(matches!(
            similitude_multiplier(&Matrix::identity(&f3, 3), &BilinearForm::standard(&f3, 2)),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn group_orders() {
        assert_eq!(enumerate_gl(2, &ring("F3")).unwrap().len(), 48);
        assert_eq!(enumerate_gl(2, &ring("F5")).unwrap().len(), 480);
        let f5 = ring("F5");
        assert_eq!(enumerate_o(&BilinearForm::standard(&f5, 1)).unwrap().len(), 2);
        assert!(matches!(enumerate_gl(1, &Ring::rationals()), Err(Error::NonEnumerableRing(_))));
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let f3 = ring("F3");
        let gl = enumerate_gl(2, &f3).unwrap();
        let keys: Vec<Vec<u32>> = gl.iter().map(|m| m.entries().iter().map(|e| e.index()).collect()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(gl[0].to_strings(), [["0", "1"], ["1", "0"]]);
    }

    #[test]
    fn forms_reject_bad_grams() {
        let f3 = ring("F3");
        assert_eq!(
            BilinearForm::new(Matrix::from_ints(&f3, &[&[1, 1], &[0, 1]])),
            Err(Error::NotSymmetric)
        );
        assert_eq!(
            BilinearForm::new(Matrix::from_ints(&f3, &[&[1, 1], &[1, 1]])),
            Err(Error::DegenerateForm)
        );
        let form = BilinearForm::standard(&f3, 3);
        let x = [f3.one(), f3.one(), f3.zero()];
        assert_eq!(form.quadratic(&x), f3.one());
    }

    #[test]
    fn json_rows() {
        let f3 = ring("F3");
        let m = Matrix::from_ints(&f3, &[&[1, 2], &[0, 1]]);
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"[["1","2"],["0","1"]]"#);
        let back = Matrix::from_strings(&f3, &m.to_strings()).unwrap();
        assert_eq!(back, m);
    }
}
