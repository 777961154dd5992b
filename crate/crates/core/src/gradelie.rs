//! The block `Z`-grading of `gl_{m+n}` and the Jordan pair `(L_1, L_{-1})`
//! read off from it with `{x, y, z} = [[x, y], z]`.
//!
//! `L_1` is identified with `M_{m,n}` through `E_{i, m+j} <-> E_ij` and
//! `L_{-1}` with `M_{n,m}` through `E_{m+i, j} <-> E_ij`.

use crate::error::{Error, Result};
use crate::jordan::{JordanPair, TripleTensor};
use crate::matrix::Matrix;
use crate::ring::Ring;

/// `M_k^(-)` with `k = m + n` and the degree of each matrix unit.
#[derive(Clone, Debug)]
pub struct GradedGL {
    ring: Ring,
    m: usize,
    n: usize,
}

impl GradedGL {
    pub fn k(&self) -> usize {
        self.m + self.n
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    /// Degree of `E_ij` in `gl_k`.
    pub fn degree(&self, i: usize, j: usize) -> i32 {
        match (i < self.m, j < self.m) {
            (true, false) => 1,
            (false, true) => -1,
            _ => 0,
        }
    }

    /// Flat indices `i * k + j` of the matrix units of degree `d`.
    pub fn piece(&self, d: i32) -> Vec<usize> {
        let k = self.k();
        (0..k * k).filter(|&idx| self.degree(idx / k, idx % k) == d).collect()
    }

    fn unit(&self, idx: usize) -> Matrix {
        let k = self.k();
        Matrix::unit(&self.ring, k, k, idx / k, idx % k)
    }

    pub fn bracket(&self, x: &Matrix, y: &Matrix) -> Matrix {
        x.mul(y).sub(&y.mul(x))
    }

    /// Degree of a homogeneous matrix, `None` for zero or mixed support.
    fn degree_of(&self, x: &Matrix) -> Option<Option<i32>> {
        let k = self.k();
        let mut found = None;
        for i in 0..k {
            for j in 0..k {
                if !self.ring.is_zero(x.get(i, j)) {
                    let d = self.degree(i, j);
                    match found {
                        None => found = Some(d),
                        Some(e) if e == d => {}
                        Some(_) => return None,
                    }
                }
            }
        }
        Some(found)
    }

    /// Check `[L_i, L_j] ⊆ L_{i+j}`, antisymmetry and the Jacobi identity on
    /// all basis tuples.
    pub fn check(&self) -> Result<()> {
        let k = self.k();
        let units: Vec<Matrix> = (0..k * k).map(|idx| self.unit(idx)).collect();
        let deg: Vec<i32> = (0..k * k).map(|idx| self.degree(idx / k, idx % k)).collect();
        for a in 0..k * k {
            for b in 0..k * k {
                let ab = self.bracket(&units[a], &units[b]);
                if !ab.add(&self.bracket(&units[b], &units[a])).is_zero() {
                    return Err(Error::GradingViolation(format!("bracket not antisymmetric on units {a}, {b}")));
                }
                let ok = match self.degree_of(&ab) {
                    Some(None) => true,
                    Some(Some(d)) => d == deg[a] + deg[b],
                    None => false,
                };
                if !ok {
                    return Err(Error::GradingViolation(format!("[L_{}, L_{}] leaves L_{}", deg[a], deg[b], deg[a] + deg[b])));
                }
            }
        }
        for a in 0..k * k {
            for b in 0..k * k {
                let ab = self.bracket(&units[a], &units[b]);
                for c in 0..k * k {
                    let bc = self.bracket(&units[b], &units[c]);
                    let ca = self.bracket(&units[c], &units[a]);
                    let sum = self
                        .bracket(&ab, &units[c])
                        .add(&self.bracket(&bc, &units[a]))
                        .add(&self.bracket(&ca, &units[b]));
                    if !sum.is_zero() {
                        return Err(Error::GradingViolation(format!("Jacobi fails on units {a}, {b}, {c}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Embedding of `x` in `M_{m,n}` (sign `+`) or `M_{n,m}` (sign `-`) as a block of `gl_k`.
    fn embed(&self, x: &[crate::ring::RingElement], plus: bool) -> Matrix {
        let (m, n, k) = (self.m, self.n, self.k());
        let mut out = Matrix::zeros(&self.ring, k, k);
        let (rows, cols, r0, c0) = if plus { (m, n, 0, m) } else { (n, m, m, 0) };
        for i in 0..rows {
            for j in 0..cols {
                out.set(r0 + i, c0 + j, x[i * cols + j]);
            }
        }
        out
    }

    fn extract(&self, x: &Matrix, plus: bool) -> Result<Vec<crate::ring::RingElement>> {
        let want = if plus { 1 } else { -1 };
        match self.degree_of(x) {
            Some(None) => {}
            Some(Some(d)) if d == want => {}
            _ => return Err(Error::GradingViolation("double bracket left its graded piece".into())),
        }
        let (m, n) = (self.m, self.n);
        let (rows, cols, r0, c0) = if plus { (m, n, 0, m) } else { (n, m, m, 0) };
        Ok((0..rows * cols).map(|idx| x.get(r0 + idx / cols, c0 + idx % cols)).collect())
    }
}

pub fn make_graded_gl(m: usize, n: usize, ring: &Ring) -> Result<GradedGL> {
    if m == 0 || n == 0 {
        return Err(Error::BadDims(format!("{m}x{n} has a zero dimension")));
    }
    Ok(GradedGL { ring: ring.clone(), m, n })
}

/// `(L_1, L_{-1})` with `{x, y, z}^± = [[x, y], z]`, in matrix-unit coordinates.
pub fn pair_from_grading(g: &GradedGL) -> Result<JordanPair> {
    let (m, n) = (g.m, g.n);
    let r = &g.ring;
    let mut tensors = Vec::with_capacity(2);
    for plus in [true, false] {
        let d = m * n;
        let mut t = TripleTensor::zeros(r, d, d);
        let basis = |i: usize| crate::jordan::basis(r, d, i);
        for i in 0..d {
            let x = g.embed(&basis(i), plus);
            for j in 0..d {
                let y = g.embed(&basis(j), !plus);
                let xy = g.bracket(&x, &y);
                for kk in 0..d {
                    let z = g.embed(&basis(kk), plus);
                    let v = g.extract(&g.bracket(&xy, &z), plus)?;
                    for (o, c) in v.into_iter().enumerate() {
                        t.set(i, j, kk, o, c);
                    }
                }
            }
        }
        tensors.push(t);
    }
    let minus = tensors.pop().expect("two tensors");
    let plus = tensors.pop().expect("two tensors");
    JordanPair::new(plus, minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make_vhi;

    #[test]
    fn pieces() {
        let r = Ring::prime(3).unwrap();
        let g = make_graded_gl(1, 1, &r).unwrap();
        assert_eq!(g.piece(0), vec![0, 3]);
        assert_eq!(g.piece(1), vec![1]);
        assert_eq!(g.piece(-1), vec![2]);
        let e12 = Matrix::unit(&r, 2, 2, 0, 1);
        let e21 = Matrix::unit(&r, 2, 2, 1, 0);
        assert_eq!(g.bracket(&e12, &e21), Matrix::from_ints(&r, &[&[1, 0], &[0, -1]]));
        assert!(g.check().is_ok());
        assert!(matches!(make_graded_gl(0, 2, &r), Err(Error::BadDims(_))));
    }

    #[test]
    fn scalar_case() {
        let r = Ring::prime(5).unwrap();
        let p = pair_from_grading(&make_graded_gl(1, 1, &r).unwrap()).unwrap();
        let x = [r.from_int(2)];
        let y = [r.from_int(3)];
        let z = [r.from_int(4)];
        assert_eq!(p.triple(crate::jordan::Sign::Plus, &x, &y, &z), vec![r.from_int(48)]);
    }

    #[test]
    fn recovers_vhi() {
        let r = Ring::prime(3).unwrap();
        let g = make_graded_gl(1, 2, &r).unwrap();
        g.check().unwrap();
        let p = pair_from_grading(&g).unwrap();
        assert_eq!(&p, make_vhi(&r, 1, 2).unwrap().pair().unwrap());
    }
}
