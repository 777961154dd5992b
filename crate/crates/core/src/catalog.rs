//! Named Jordan systems of types I and IV with their generic traces, the
//! isomorphisms between presentations, and the system-spec grammar used by
//! the command line.
//!
//! Type I carriers are matrix spaces with the matrix units `E_ij` in row-major
//! order as basis. Type IV carriers use the basis of the given form; the
//! algebra `J(V, b) = F1 + V` uses `[1, v_1, ..., v_{n-1}]`.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::jordan::{
    triple_from_algebra, JordanAlgebra, JordanPair, JordanTriple, PairMap, Structure, StructureJson, TripleTensor,
};
use crate::matrix::{BilinearForm, Matrix};
use crate::ring::{Ring, RingElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SystemTag {
    /// `V_IV(W, b)`, the pair `(W, W)`.
    VIV,
    /// `T̂_IV(W, b)`, the triple system on `W`.
    ThatIV,
    /// `T_IV(V, b)`, the triple system of `J(V, b)`.
    TIV,
    /// `J(V, b)`, the algebra of a bilinear form.
    Jbilin,
    VtI,
    VhI,
    TtI,
    ThI,
    /// `M_n^(+)`.
    Mplus,
    /// A structure loaded from a JSON file.
    Custom,
}

impl SystemTag {
    pub fn name(self) -> &'static str {
        match self {
            SystemTag::VIV => "VIV",
            SystemTag::ThatIV => "ThatIV",
            SystemTag::TIV => "TIV",
            SystemTag::Jbilin => "Jbilin",
            SystemTag::VtI => "VtI",
            SystemTag::VhI => "VhI",
            SystemTag::TtI => "TtI",
            SystemTag::ThI => "ThI",
            SystemTag::Mplus => "Mplus",
            SystemTag::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<SystemTag> {
        Some(match name {
            "VIV" => SystemTag::VIV,
            "ThatIV" => SystemTag::ThatIV,
            "TIV" => SystemTag::TIV,
            "Jbilin" => SystemTag::Jbilin,
            "VtI" => SystemTag::VtI,
            "VhI" => SystemTag::VhI,
            "TtI" => SystemTag::TtI,
            "ThI" => SystemTag::ThI,
            "Mplus" => SystemTag::Mplus,
            _ => return None,
        })
    }

    /// Whether the system is parametrized by a shape `m x n`.
    pub fn is_rectangular(self) -> bool {
        matches!(self, SystemTag::VtI | SystemTag::VhI | SystemTag::TtI)
    }
}

impl fmt::Display for SystemTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemParams {
    pub m: Option<usize>,
    pub n: usize,
    pub form: Option<BilinearForm>,
}

/// A catalog structure with its parameters and generic trace.
///
/// The trace Gram matrix `G` has rows indexed by the `+` carrier and columns by
/// the `-` carrier: `t(x, y) = x^T G y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedSystem {
    pub tag: SystemTag,
    pub params: SystemParams,
    pub structure: Structure,
    pub trace: Option<Matrix>,
}

impl NamedSystem {
    pub fn ring(&self) -> &Ring {
        self.structure.ring()
    }

    pub fn label(&self) -> String {
        let ring = self.ring();
        match (self.tag, self.params.m) {
            (SystemTag::Custom, _) => format!("custom({},{})", self.structure.kind(), ring),
            (tag, Some(m)) => format!("{tag}({m},{},{ring})", self.params.n),
            (tag, None) => format!("{tag}({},{ring})", self.params.n),
        }
    }

    pub fn pair(&self) -> Option<&JordanPair> {
        match &self.structure {
            Structure::Pair(p) => Some(p),
            _ => None,
        }
    }

    pub fn triple(&self) -> Option<&JordanTriple> {
        match &self.structure {
            Structure::Triple(t) => Some(t),
            _ => None,
        }
    }

    pub fn algebra(&self) -> Option<&JordanAlgebra> {
        match &self.structure {
            Structure::Algebra(a) => Some(a),
            _ => None,
        }
    }
}

fn type_iv_tensor(form: &BilinearForm) -> TripleTensor {
    let r = form.ring();
    let g = form.gram();
    let n = form.dim();
    TripleTensor::from_fn(r, n, n, |i, j, k| {
        let mut v = vec![r.zero(); n];
        v[k] = r.add(v[k], g.get(i, j));
        v[i] = r.add(v[i], g.get(k, j));
        v[j] = r.sub(v[j], g.get(i, k));
        v
    })
}

fn need_positive(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::BadDims("dimension must be positive".into()))
    } else {
        Ok(())
    }
}

/// `V_IV(W, b)` with `{x, y, z} = b(x, y)z + b(z, y)x - b(x, z)y` and trace `b`.
pub fn make_type_iv_pair(form: &BilinearForm) -> Result<NamedSystem> {
    need_positive(form.dim())?;
    let t = type_iv_tensor(form);
    Ok(NamedSystem {
        tag: SystemTag::VIV,
        params: SystemParams { m: None, n: form.dim(), form: Some(form.clone()) },
        structure: Structure::Pair(JordanPair::new(t.clone(), t)?),
        trace: Some(form.gram().clone()),
    })
}

/// `T̂_IV(W, b)`: the same product on the single carrier `W`.
pub fn make_type_iv_triple(form: &BilinearForm) -> Result<NamedSystem> {
    need_positive(form.dim())?;
    Ok(NamedSystem {
        tag: SystemTag::ThatIV,
        params: SystemParams { m: None, n: form.dim(), form: Some(form.clone()) },
        structure: Structure::Triple(JordanTriple::new(type_iv_tensor(form))?),
        trace: Some(form.gram().clone()),
    })
}

/// `b̃ = [1] + b` on `J = F1 + V`.
pub fn extended_form(form: &BilinearForm) -> BilinearForm {
    let one = Matrix::identity(form.ring(), 1);
    BilinearForm::new(one.direct_sum(form.gram())).expect("extension of a nondegenerate form")
}

fn bilinear_form_algebra(form: &BilinearForm) -> JordanAlgebra {
    let r = form.ring();
    let n = form.dim() + 1;
    let g = form.gram();
    let mut unit = vec![r.zero(); n];
    unit[0] = r.one();
    JordanAlgebra::from_fn(r, n, Some(unit), |i, j| {
        let mut v = vec![r.zero(); n];
        match (i, j) {
            (0, k) | (k, 0) => v[k] = r.one(),
            (a, b) => v[0] = g.get(a - 1, b - 1),
        }
        v
    })
}

/// `J(V, b)` with `1x = x` and `uv = b(u, v)1`; `form` lives on `V` of
/// dimension `n - 1` and may be empty, giving `J = F`.
pub fn make_bilinear_form_algebra(form: &BilinearForm) -> Result<NamedSystem> {
    Ok(NamedSystem {
        tag: SystemTag::Jbilin,
        params: SystemParams { m: None, n: form.dim() + 1, form: Some(form.clone()) },
        structure: Structure::Algebra(bilinear_form_algebra(form)),
        trace: Some(extended_form(form).gram().clone()),
    })
}

/// `T_IV(V, b)`, the triple system of `J(V, b)`. Its registered trace is `b̃`,
/// the trace of `V_IV(J, b̃)` pulled back along the isomorphism
/// [`lambda_isomorphism`]; the pullback does not depend on the choice of `i`.
pub fn make_t_iv(form: &BilinearForm) -> Result<NamedSystem> {
    let triple = triple_from_algebra(&bilinear_form_algebra(form))?;
    Ok(NamedSystem {
        tag: SystemTag::TIV,
        params: SystemParams { m: None, n: form.dim() + 1, form: Some(form.clone()) },
        structure: Structure::Triple(triple),
        trace: Some(extended_form(form).gram().clone()),
    })
}

fn check_shape(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::BadDims(format!("{m}x{n} has a zero dimension")));
    }
    if m > n {
        return Err(Error::BadDims(format!("expected m <= n, got {m}x{n}")));
    }
    Ok(())
}

fn matrix_units(ring: &Ring, rows: usize, cols: usize) -> Vec<Matrix> {
    (0..rows * cols).map(|k| Matrix::unit(ring, rows, cols, k / cols, k % cols)).collect()
}

/// Tensor of `f` on matrix units, outer carrier `M_{a,b}`, inner `M_{c,d}`.
fn matrix_tensor(
    ring: &Ring,
    outer: (usize, usize),
    inner: (usize, usize),
    f: impl Fn(&Matrix, &Matrix, &Matrix) -> Matrix,
) -> TripleTensor {
    let uo = matrix_units(ring, outer.0, outer.1);
    let ui = matrix_units(ring, inner.0, inner.1);
    TripleTensor::from_fn(ring, uo.len(), ui.len(), |i, j, k| f(&uo[i], &ui[j], &uo[k]).entries().to_vec())
}

fn transposed_product(x: &Matrix, y: &Matrix, z: &Matrix) -> Matrix {
    let yt = y.transpose();
    x.mul(&yt).mul(z).add(&z.mul(&yt).mul(x))
}

fn plain_product(x: &Matrix, y: &Matrix, z: &Matrix) -> Matrix {
    x.mul(y).mul(z).add(&z.mul(y).mul(x))
}

/// Gram matrix of `tr(xy)` for `x` in `M_{m,n}`, `y` in `M_{n,m}`.
pub fn trace_pairing_gram(ring: &Ring, m: usize, n: usize) -> Matrix {
    let mut g = Matrix::zeros(ring, m * n, m * n);
    for i in 0..m {
        for j in 0..n {
            g.set(i * n + j, j * m + i, ring.one());
        }
    }
    g
}

/// The map `X -> X^T` from `M_{m,n}` to `M_{n,m}`.
pub fn transpose_operator(ring: &Ring, m: usize, n: usize) -> Matrix {
    trace_pairing_gram(ring, m, n).transpose()
}

fn rect_params(m: usize, n: usize) -> SystemParams {
    SystemParams { m: Some(m), n, form: None }
}

/// `VtI_{m,n}`: `{x, y, z} = x y^T z + z y^T x` on `(M_{m,n}, M_{m,n})`, trace `tr(x y^T)`.
pub fn make_vti(ring: &Ring, m: usize, n: usize) -> Result<NamedSystem> {
    check_shape(m, n)?;
    let t = matrix_tensor(ring, (m, n), (m, n), transposed_product);
    Ok(NamedSystem {
        tag: SystemTag::VtI,
        params: rect_params(m, n),
        structure: Structure::Pair(JordanPair::new(t.clone(), t)?),
        trace: Some(Matrix::identity(ring, m * n)),
    })
}

/// `VhI_{m,n}`: `{x, y, z} = xyz + zyx` on `(M_{m,n}, M_{n,m})`, trace `tr(xy)`.
pub fn make_vhi(ring: &Ring, m: usize, n: usize) -> Result<NamedSystem> {
    check_shape(m, n)?;
    let plus = matrix_tensor(ring, (m, n), (n, m), plain_product);
    let minus = matrix_tensor(ring, (n, m), (m, n), plain_product);
    Ok(NamedSystem {
        tag: SystemTag::VhI,
        params: rect_params(m, n),
        structure: Structure::Pair(JordanPair::new(plus, minus)?),
        trace: Some(trace_pairing_gram(ring, m, n)),
    })
}

/// `TtI_{m,n}`: the triple system on `M_{m,n}` with `x y^T z + z y^T x`.
pub fn make_tti(ring: &Ring, m: usize, n: usize) -> Result<NamedSystem> {
    check_shape(m, n)?;
    let t = matrix_tensor(ring, (m, n), (m, n), transposed_product);
    Ok(NamedSystem {
        tag: SystemTag::TtI,
        params: rect_params(m, n),
        structure: Structure::Triple(JordanTriple::new(t)?),
        trace: Some(Matrix::identity(ring, m * n)),
    })
}

/// `ThI_n`: the triple system on `M_n` with `xyz + zyx`.
pub fn make_thi(ring: &Ring, n: usize) -> Result<NamedSystem> {
    need_positive(n)?;
    let t = matrix_tensor(ring, (n, n), (n, n), plain_product);
    Ok(NamedSystem {
        tag: SystemTag::ThI,
        params: SystemParams { m: None, n, form: None },
        structure: Structure::Triple(JordanTriple::new(t)?),
        trace: Some(trace_pairing_gram(ring, n, n)),
    })
}

/// `M_n^(+)` with `x ∘ y = (xy + yx) / 2`.
pub fn make_mn_plus(ring: &Ring, n: usize) -> Result<NamedSystem> {
    need_positive(n)?;
    let units = matrix_units(ring, n, n);
    let half = ring.half();
    let alg = JordanAlgebra::from_fn(ring, n * n, Some(Matrix::identity(ring, n).entries().to_vec()), |i, j| {
        let (x, y) = (&units[i], &units[j]);
        x.mul(y).add(&y.mul(x)).scale(half).entries().to_vec()
    });
    Ok(NamedSystem {
        tag: SystemTag::Mplus,
        params: SystemParams { m: None, n, form: None },
        structure: Structure::Algebra(alg),
        trace: Some(trace_pairing_gram(ring, n, n)),
    })
}

/// Standard-form instance of a catalog name. For `TIV` and `Jbilin`, `n` is
/// the dimension of the algebra; for rectangular names `m` defaults to `n`.
pub fn standard_system(tag: SystemTag, ring: &Ring, m: Option<usize>, n: usize) -> Result<NamedSystem> {
    if m.is_some() && !tag.is_rectangular() {
        return Err(Error::BadDims(format!("{tag} takes a single dimension")));
    }
    let m = m.unwrap_or(n);
    match tag {
        SystemTag::VIV => make_type_iv_pair(&BilinearForm::standard(ring, n)),
        SystemTag::ThatIV => make_type_iv_triple(&BilinearForm::standard(ring, n)),
        SystemTag::TIV | SystemTag::Jbilin => {
            need_positive(n)?;
            let form = BilinearForm::standard(ring, n - 1);
            if tag == SystemTag::TIV {
                make_t_iv(&form)
            } else {
                make_bilinear_form_algebra(&form)
            }
        }
        SystemTag::VtI => make_vti(ring, m, n),
        SystemTag::VhI => make_vhi(ring, m, n),
        SystemTag::TtI => make_tti(ring, m, n),
        SystemTag::ThI => make_thi(ring, n),
        SystemTag::Mplus => make_mn_plus(ring, n),
        SystemTag::Custom => Err(Error::BadInput("custom systems are loaded from JSON".into())),
    }
}

/// The isomorphism `Λ` from the pair of `J(V, b)` onto `V_IV(J, b̃)`: it fixes
/// each `v_i` and sends `σ i 1` to `1` on the `σ` side.
pub fn lambda_isomorphism(form: &BilinearForm, i: RingElement) -> Result<PairMap> {
    let r = form.ring();
    if r.mul(i, i) != r.neg(r.one()) {
        return Err(Error::NoSquareRootOfMinusOne(r.to_string()));
    }
    let n = form.dim() + 1;
    // 1 = (σ i)^{-1} (σ i 1) = -σ i (σ i 1)
    let side = |c: RingElement| {
        let mut m = Matrix::identity(r, n);
        m.set(0, 0, c);
        m
    };
    PairMap::new(side(r.neg(i)), side(i))
}

/// [`lambda_isomorphism`] with the first square root of `-1` in the ring.
pub fn lambda_isomorphism_auto(form: &BilinearForm) -> Result<PairMap> {
    let i = form.ring().sqrt_minus_one().ok_or_else(|| Error::NoSquareRootOfMinusOne(form.ring().to_string()))?;
    lambda_isomorphism(form, i)
}

/// The pair of `J(V, b)`, source of [`lambda_isomorphism`].
pub fn pair_of_bilinear_form_algebra(form: &BilinearForm) -> Result<JordanPair> {
    let t = triple_from_algebra(&bilinear_form_algebra(form))?;
    Ok(crate::jordan::pair_from_triple(&t))
}

/// `(id, X -> X^T)`, an isomorphism `VtI_{m,n} -> VhI_{m,n}`.
pub fn vti_to_vhi(ring: &Ring, m: usize, n: usize) -> Result<PairMap> {
    check_shape(m, n)?;
    PairMap::new(Matrix::identity(ring, m * n), transpose_operator(ring, m, n))
}

/// `σ̃(ψ)(X) = ψ(X^T)^T`, taking maps on `M_{m,n}` to maps on `M_{n,m}`.
pub fn sigma_tilde(psi: &Matrix, m: usize, n: usize) -> Result<Matrix> {
    if psi.rows() != m * n || psi.cols() != m * n {
        return Err(Error::ShapeMismatch(format!("map is not an operator on {m}x{n} matrices")));
    }
    let r = psi.ring();
    Ok(transpose_operator(r, m, n).mul(psi).mul(&transpose_operator(r, n, m)))
}

/// Parse a system spec such as `VIV(n=2,ring=F5)`, `VhI(1,2,F3)` or
/// `TIV(2,F5)`, or load a structure JSON file.
///
/// Positional arguments are the dimensions followed by the ring; a single
/// dimension for `VtI`, `VhI` or `TtI` means a square shape. `ring` falls
/// back to `default_ring` when omitted.
pub fn parse_system(text: &str, default_ring: Option<&Ring>) -> Result<NamedSystem> {
    let text = text.trim();
    let Some(open) = text.find('(') else {
        return load_system_file(Path::new(text));
    };
    let name = text[..open].trim();
    let tag = match SystemTag::from_name(name) {
        Some(tag) => tag,
        None if Path::new(text).exists() => return load_system_file(Path::new(text)),
        None => return Err(Error::Parse(format!("unknown system name {name:?}"))),
    };
    let body = text[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::Parse(format!("missing closing parenthesis in {text:?}")))?;
    let mut dims = Vec::new();
    let (mut m, mut n, mut ring) = (None, None, None);
    for arg in split_top_level(body) {
        let arg = arg.trim();
        if arg.is_empty() {
            continue;
        }
        match arg.split_once('=') {
            Some((key, value)) => {
                let value = value.trim();
                let dim = || value.parse::<usize>().map_err(|_| Error::Parse(format!("bad dimension {value:?}")));
                match key.trim() {
                    "m" => m = Some(dim()?),
                    "n" => n = Some(dim()?),
                    "ring" => ring = Some(value.parse::<Ring>()?),
                    other => return Err(Error::Parse(format!("unknown parameter {other:?}"))),
                }
            }
            None => match arg.parse::<usize>() {
                Ok(d) => dims.push(d),
                Err(_) if ring.is_none() => ring = Some(arg.parse::<Ring>()?),
                Err(_) => return Err(Error::Parse(format!("unexpected argument {arg:?}"))),
            },
        }
    }
    match dims.as_slice() {
        [] => {}
        [d] if n.is_none() => n = Some(*d),
        [a, b] if tag.is_rectangular() && m.is_none() && n.is_none() => {
            m = Some(*a);
            n = Some(*b);
        }
        _ => return Err(Error::Parse(format!("too many dimensions for {tag}"))),
    }
    let n = n.ok_or_else(|| Error::Parse(format!("{tag} needs a dimension")))?;
    let ring = match ring {
        Some(r) => r,
        None => default_ring.cloned().ok_or_else(|| Error::Parse("no ring given".into()))?,
    };
    standard_system(tag, &ring, m, n)
}

fn split_top_level(body: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (idx, c) in body.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&body[start..idx]);
                start = idx + 1;
            }
            _ => {}
        }
    }
    parts.push(&body[start..]);
    parts
}

pub fn load_system_file(path: &Path) -> Result<NamedSystem> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let doc: StructureJson =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let structure = Structure::from_json(&doc)?;
    let n = structure.dims()[0];
    Ok(NamedSystem { tag: SystemTag::Custom, params: SystemParams { m: None, n, form: None }, structure, trace: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::{d_operator, is_pair_automorphism, is_pair_isomorphism, q_operator, Sign};

    fn f(p: u32) -> Ring {
        Ring::prime(p).unwrap()
    }

    fn ints(r: &Ring, v: &[i64]) -> Vec<RingElement> {
        v.iter().map(|&x| r.from_int(x)).collect()
    }

    #[test]
    fn type_iv_product() {
        let r = f(3);
        let s = make_type_iv_pair(&BilinearForm::standard(&r, 2)).unwrap();
        let p = s.pair().unwrap();
        assert_eq!(p.triple(Sign::Plus, &ints(&r, &[1, 0]), &ints(&r, &[0, 1]), &ints(&r, &[1, 1])), ints(&r, &[1, 2]));

        let q = Ring::rationals();
        let s = make_type_iv_triple(&BilinearForm::standard(&q, 1)).unwrap();
        let x = [q.rational(2, 3).unwrap()];
        let y = [q.rational(-1, 5).unwrap()];
        let z = [q.from_int(7)];
        assert_eq!(s.triple().unwrap().triple(&x, &y, &z), vec![q.rational(-14, 15).unwrap()]);
    }

    #[test]
    fn type_iv_quadratic_operator() {
        let r = f(5);
        let form = BilinearForm::standard(&r, 3);
        let s = make_type_iv_pair(&form).unwrap();
        let p = s.pair().unwrap();
        let x = ints(&r, &[1, 2, 4]);
        let y = ints(&r, &[3, 0, 1]);
        let expected: Vec<_> = (0..3)
            .map(|i| r.sub(r.mul(form.eval(&x, &y), x[i]), r.mul(form.quadratic(&x), y[i])))
            .collect();
        assert_eq!(q_operator(p, Sign::Plus, &x, &y).unwrap(), expected);
        // isotropic x: q(x) = 0 in F5 for (1, 2, 0)
        let iso = ints(&r, &[1, 2, 0]);
        assert!(r.is_zero(form.quadratic(&iso)));
        let b = form.eval(&iso, &y);
        assert_eq!(q_operator(p, Sign::Minus, &iso, &y).unwrap(), iso.iter().map(|&c| r.mul(b, c)).collect::<Vec<_>>());
    }

    #[test]
    fn scalar_pair_maps_on_type_iv() {
        let r = f(5);
        let s = make_type_iv_pair(&BilinearForm::standard(&r, 2)).unwrap();
        let p = s.pair().unwrap();
        let two = Matrix::scalar(&r, 2, r.from_int(2));
        let three = Matrix::scalar(&r, 2, r.from_int(3));
        assert!(is_pair_automorphism(p, &PairMap::new(two.clone(), three).unwrap()).unwrap());
        assert!(!is_pair_automorphism(p, &PairMap::new(two, Matrix::identity(&r, 2)).unwrap()).unwrap());
    }

    #[test]
    fn bilinear_form_algebra_products() {
        let r = f(5);
        let s = make_bilinear_form_algebra(&BilinearForm::standard(&r, 1)).unwrap();
        let j = s.algebra().unwrap();
        let x = ints(&r, &[1, 1]);
        assert_eq!(j.mul(&x, &x), ints(&r, &[2, 2]));
        let one = ints(&r, &[1, 0]);
        assert_eq!(j.mul(&one, &one), one);

        let s = make_bilinear_form_algebra(&BilinearForm::standard(&r, 2)).unwrap();
        let j = s.algebra().unwrap();
        assert_eq!(j.mul(&ints(&r, &[0, 1, 0]), &ints(&r, &[0, 0, 1])), ints(&r, &[0, 0, 0]));

        let t = make_t_iv(&BilinearForm::standard(&r, 2)).unwrap();
        let v = ints(&r, &[0, 2, 3]);
        let one = ints(&r, &[1, 0, 0]);
        assert_eq!(t.triple().unwrap().triple(&one, &one, &v), v);

        let trivial = make_t_iv(&BilinearForm::standard(&r, 0)).unwrap();
        assert_eq!(trivial.params.n, 1);
        assert!(trivial.structure.check_axioms().passed());
    }

    #[test]
    fn type_i_products() {
        let r = f(3);
        let vhi = make_vhi(&r, 2, 2).unwrap();
        let id = Matrix::identity(&r, 2).entries().to_vec();
        let p = vhi.pair().unwrap();
        let two_id: Vec<_> = id.iter().map(|&c| r.mul(r.from_int(2), c)).collect();
        assert_eq!(p.triple(Sign::Plus, &id, &id, &id), two_id);
        // The unscaled product gives D_{1,1} = 2 id.
        let d = d_operator(p, Sign::Plus, &id, &id).unwrap();
        assert_eq!(d.as_scalar(), Some(r.from_int(2)));

        let vti = make_vti(&r, 1, 2).unwrap();
        let p = vti.pair().unwrap();
        assert_eq!(p.triple(Sign::Plus, &ints(&r, &[1, 0]), &ints(&r, &[1, 0]), &ints(&r, &[0, 1])), ints(&r, &[0, 1]));

        let mp = make_mn_plus(&r, 2).unwrap();
        let j = mp.algebra().unwrap();
        assert_eq!(j.mul(&ints(&r, &[1, 0, 0, 0]), &ints(&r, &[0, 0, 0, 1])), ints(&r, &[0, 0, 0, 0]));
    }

    #[test]
    fn mn_plus_triple_is_half_of_thi() {
        let r = f(3);
        let mp = make_mn_plus(&r, 2).unwrap();
        let t = triple_from_algebra(mp.algebra().unwrap()).unwrap();
        let thi = make_thi(&r, 2).unwrap();
        assert_eq!(t.scaled(r.from_int(2)), *thi.triple().unwrap());
    }

    #[test]
    fn bad_dims() {
        let r = f(3);
        assert!(matches!(make_vhi(&r, 3, 2), Err(Error::BadDims(_))));
        assert!(matches!(make_vti(&r, 0, 2), Err(Error::BadDims(_))));
        assert!(matches!(make_thi(&r, 0), Err(Error::BadDims(_))));
    }

    #[test]
    fn lambda() {
        let r = f(5);
        let form = BilinearForm::standard(&r, 2);
        let lam = lambda_isomorphism(&form, r.from_int(2)).unwrap();
        let src = pair_of_bilinear_form_algebra(&form).unwrap();
        let dst = make_type_iv_pair(&extended_form(&form)).unwrap();
        assert!(is_pair_isomorphism(&src, dst.pair().unwrap(), &lam).unwrap());
        for s in Sign::BOTH {
            for k in 1..3 {
                assert_eq!(lam.get(s).col(k), crate::jordan::basis(&r, 3, k));
            }
        }
        let r3 = f(3);
        assert_eq!(
            lambda_isomorphism_auto(&BilinearForm::standard(&r3, 1)),
            Err(Error::NoSquareRootOfMinusOne("F3".into()))
        );
        assert!(lambda_isomorphism(&form, r.from_int(1)).is_err());
    }

    #[test]
    fn lambda_pulls_back_the_extended_trace() {
        let r = f(5);
        let form = BilinearForm::standard(&r, 2);
        let g = extended_form(&form).gram().clone();
        for i in [r.from_int(2), r.from_int(3)] {
            let lam = lambda_isomorphism(&form, i).unwrap();
            assert_eq!(lam.plus.transpose().mul(&g).mul(&lam.minus), g);
        }
    }

    #[test]
    fn vti_vhi_isomorphism() {
        let r = f(3);
        for (m, n) in [(1, 1), (1, 2), (2, 2)] {
            let iso = vti_to_vhi(&r, m, n).unwrap();
            let vti = make_vti(&r, m, n).unwrap();
            let vhi = make_vhi(&r, m, n).unwrap();
            assert!(is_pair_isomorphism(vti.pair().unwrap(), vhi.pair().unwrap(), &iso).unwrap());
            if m * n == 1 {
                assert!(iso.is_identity());
            }
        }
    }

    #[test]
    fn parse_specs() {
        let s = parse_system("VIV(n=2,ring=F5)", None).unwrap();
        assert_eq!((s.tag, s.params.n, s.ring().to_string()), (SystemTag::VIV, 2, "F5".to_string()));
        let s = parse_system("VhI(1,2,F3)", None).unwrap();
        assert_eq!((s.params.m, s.params.n), (Some(1), 2));
        assert_eq!(s.label(), "VhI(1,2,F3)");
        let s = parse_system("TIV(2,F5)", None).unwrap();
        assert_eq!(s.structure.dims(), vec![2]);
        let s = parse_system("Mplus(2)", Some(&f(3))).unwrap();
        assert_eq!(s.label(), "Mplus(2,F3)");
        let s = parse_system("VhI(2,(F3xF3)[t])", None).unwrap();
        assert_eq!(s.ring().to_string(), "(F3xF3)[t]");
        assert!(matches!(parse_system("Foo(2,F3)", None), Err(Error::Parse(_))));
        assert!(matches!(parse_system("VIV(2)", None), Err(Error::Parse(_))));
        assert!(matches!(parse_system("VIV(1,2,F3)", None), Err(Error::Parse(_))));
    }
}
