use jordan_aut::autfam::{
    go_to_pair_aut, hat_generators, tilde_generators, tti_map, CentralProductElement, TwistedMap,
};
use jordan_aut::catalog::{parse_system, vti_to_vhi, NamedSystem};
use jordan_aut::jordan::{
    is_pair_automorphism, is_pair_isomorphism, is_triple_automorphism, PairMap, Sign, Structure, StructureJson,
};
use jordan_aut::matrix::enumerate_go;
use jordan_aut::oracle::{enumerate_automorphisms, AutKind, Options};
use jordan_aut::{BilinearForm, Matrix, Ring, RingElement};
use proptest::prelude::*;

const RINGS: &[&str] = &["F3", "F5", "F7", "F3xF3", "F5[t]", "F3x(F3xF5)"];

fn ring(text: &str) -> Ring {
    text.parse().unwrap()
}

fn elt(r: &Ring, seed: u64) -> RingElement {
    let all = r.elements().unwrap();
    all[(seed % all.len() as u64) as usize]
}

fn mat(r: &Ring, n: usize, seeds: &[u64]) -> Matrix {
    Matrix::from_fn(r, n, n, |i, j| elt(r, seeds[i * n + j]))
}

fn invertible(r: &Ring, n: usize, seeds: &[u64]) -> Option<Matrix> {
    let m = mat(r, n, seeds);
    m.is_invertible().then_some(m)
}

fn seeds(len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(any::<u64>(), len)
}

fn system(spec: &str) -> NamedSystem {
    parse_system(spec, None).unwrap()
}

fn preserves_trace(g: &Matrix, f: &PairMap) -> bool {
    f.plus.transpose().mul(g).mul(&f.minus) == *g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(ri in 0..RINGS.len(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let r = ring(RINGS[ri]);
        let (x, y, z) = (elt(&r, a), elt(&r, b), elt(&r, c));
        prop_assert_eq!(r.add(x, y), r.add(y, x));
        prop_assert_eq!(r.mul(x, y), r.mul(y, x));
        prop_assert_eq!(r.add(r.add(x, y), z), r.add(x, r.add(y, z)));
        prop_assert_eq!(r.mul(r.mul(x, y), z), r.mul(x, r.mul(y, z)));
        prop_assert_eq!(r.mul(x, r.add(y, z)), r.add(r.mul(x, y), r.mul(x, z)));
        prop_assert_eq!(r.add(x, r.neg(x)), r.zero());
        prop_assert_eq!(r.mul(x, r.one()), x);
        if let Some(xi) = r.inv(x) {
            prop_assert!(r.is_one(r.mul(x, xi)));
        } else {
            prop_assert!(!r.is_unit(x));
        }
    }

    #[test]
    fn det_is_multiplicative(ri in 0..RINGS.len(), n in 1usize..4, s in seeds(18)) {
        let r = ring(RINGS[ri]);
        let a = mat(&r, n, &s[..9]);
        let b = mat(&r, n, &s[9..]);
        let lhs = a.mul(&b).det().unwrap();
        prop_assert_eq!(lhs, r.mul(a.det().unwrap(), b.det().unwrap()));
        prop_assert_eq!(a.is_invertible(), r.is_unit(a.det().unwrap()));
        if let Ok(ai) = a.inverse() {
            prop_assert!(a.mul(&ai).is_identity());
            prop_assert!(ai.mul(&a).is_identity());
        }
    }

    #[test]
    fn twisted_compose_matches_matrices(ri in 0..RINGS.len(), s in seeds(8), e in any::<u64>(), f in any::<u64>(), minus in any::<bool>()) {
        let r = ring(RINGS[ri]);
        let (Some(g), Some(h)) = (invertible(&r, 2, &s[..4]), invertible(&r, 2, &s[4..])) else { return Ok(()) };
        let ids = r.idempotents().unwrap();
        let e1 = ids[(e % ids.len() as u64) as usize];
        let e2 = ids[(f % ids.len() as u64) as usize];
        let sign = if minus && r.characteristic() != 2 { Sign::Minus } else { Sign::Plus };
        let a = TwistedMap::new(e1, g, sign).unwrap();
        let b = TwistedMap::new(e2, h, sign).unwrap();
        let ab = a.compose(&b).unwrap();
        prop_assert_eq!(ab.to_matrix(), a.to_matrix().mul(&b.to_matrix()));
        prop_assert!(a.compose(&a.inverse().unwrap()).unwrap().to_matrix().is_identity());
    }

    #[test]
    fn central_product_is_a_homomorphism(ri in 0..RINGS.len(), s in seeds(16), t1 in any::<u64>(), t2 in any::<u64>(), flagged in any::<bool>()) {
        let r = ring(RINGS[ri]);
        let mats: Vec<Option<Matrix>> = s.chunks(4).map(|c| invertible(&r, 2, c)).collect();
        let [Some(a1), Some(b1), Some(a2), Some(b2)] = [&mats[0], &mats[1], &mats[2], &mats[3]] else { return Ok(()) };
        let roots = r.mu_n(2).unwrap();
        let pick = |t: u64| flagged.then(|| roots[(t % roots.len() as u64) as usize]);
        let x = CentralProductElement::new(a1.clone(), b1.clone(), pick(t1)).unwrap();
        let y = CentralProductElement::new(a2.clone(), b2.clone(), pick(t2)).unwrap();
        let xy = x.multiply(&y).unwrap();
        prop_assert_eq!(xy.to_vhi_aut().unwrap(), x.to_vhi_aut().unwrap().compose(&y.to_vhi_aut().unwrap()));
        prop_assert!(x.multiply(&x.inverse().unwrap()).unwrap().to_vhi_aut().unwrap().is_identity());
    }

    #[test]
    fn hat_and_tilde_generators_are_automorphisms(ri in 0..3usize, m in 1usize..3, n in 1usize..3, s in seeds(8)) {
        if m > n {
            return Ok(());
        }
        let name = RINGS[ri];
        let r = ring(name);
        let (Some(a), Some(b)) = (invertible(&r, m, &s[..4]), invertible(&r, n, &s[4..])) else { return Ok(()) };
        let vhi = system(&format!("VhI({m},{n},{name})"));
        let vti = system(&format!("VtI({m},{n},{name})"));
        let hat = hat_generators(&a, &b).unwrap();
        let tilde = tilde_generators(&a, &b).unwrap();
        prop_assert!(is_pair_automorphism(vhi.pair().unwrap(), &hat).unwrap());
        prop_assert!(is_pair_automorphism(vti.pair().unwrap(), &tilde).unwrap());
        prop_assert!(preserves_trace(vhi.trace.as_ref().unwrap(), &hat));
        prop_assert!(preserves_trace(vti.trace.as_ref().unwrap(), &tilde));
        let iso = vti_to_vhi(&r, m, n).unwrap();
        prop_assert!(is_pair_isomorphism(vti.pair().unwrap(), vhi.pair().unwrap(), &iso).unwrap());
        let moved = iso.compose(&tilde).compose(&iso.inverse().unwrap());
        prop_assert!(is_pair_automorphism(vhi.pair().unwrap(), &moved).unwrap());
    }

    #[test]
    fn similitudes_give_viv_automorphisms(n in 1usize..4, pi in 0..2usize, idx in any::<u64>()) {
        let name = ["F3", "F5"][pi];
        let r = ring(name);
        let form = BilinearForm::standard(&r, n);
        let go = enumerate_go(&form).unwrap();
        let (a, _) = &go[(idx % go.len() as u64) as usize];
        let viv = system(&format!("VIV({n},{name})"));
        let f = go_to_pair_aut(a, &form).unwrap();
        prop_assert!(is_pair_automorphism(viv.pair().unwrap(), &f).unwrap());
        prop_assert!(preserves_trace(viv.trace.as_ref().unwrap(), &f));
    }

    #[test]
    fn tti_maps_with_unit_multiplier(i in any::<u64>(), j in any::<u64>()) {
        let r = ring("F3");
        let go1 = enumerate_go(&BilinearForm::standard(&r, 1)).unwrap();
        let go2 = enumerate_go(&BilinearForm::standard(&r, 2)).unwrap();
        let (a, ma) = &go1[(i % go1.len() as u64) as usize];
        let (b, mb) = &go2[(j % go2.len() as u64) as usize];
        let tti = system("TtI(1,2,F3)");
        let phi = tti_map(a, b).unwrap();
        let unit = r.is_one(r.mul(*ma, *mb));
        prop_assert_eq!(is_triple_automorphism(tti.triple().unwrap(), &phi).unwrap(), unit);
    }

    #[test]
    fn structure_json_round_trip(ti in 0..8usize, ri in 0..4usize, n in 1usize..3) {
        let tag = ["VIV", "ThatIV", "TIV", "Jbilin", "VhI", "VtI", "ThI", "Mplus"][ti];
        let name = RINGS[ri];
        let sys = system(&format!("{tag}({n},{name})"));
        let text = serde_json::to_string(&sys.structure.to_json()).unwrap();
        let doc: StructureJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(Structure::from_json(&doc).unwrap(), sys.structure);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn enumerated_elements_are_automorphisms(ti in 0..4usize, n in 1usize..3, jobs in 1usize..4) {
        let spec = [format!("VIV({n},F3)"), format!("VhI(1,{n},F3)"), format!("VtI(1,{n},F5)"), format!("ThatIV({n},F5)")];
        let sys = system(&spec[ti]);
        let set = enumerate_automorphisms(&sys, AutKind::Pair, &Options { budget: 1 << 40, jobs }).unwrap();
        let serial = enumerate_automorphisms(&sys, AutKind::Pair, &Options { budget: 1 << 40, jobs: 1 }).unwrap();
        prop_assert_eq!(set.elements(), serial.elements());
        if let Some(pair) = sys.pair() {
            let g = sys.trace.as_ref().unwrap();
            for f in set.elements() {
                prop_assert!(is_pair_automorphism(pair, f).unwrap());
                prop_assert!(preserves_trace(g, f));
            }
        }
    }
}

#[test]
fn type_iv_orders_differ_at_three() {
    let opts = Options::default();
    let hat = enumerate_automorphisms(&system("ThatIV(3,F5)"), AutKind::Triple, &opts).unwrap();
    let t = enumerate_automorphisms(&system("TIV(3,F5)"), AutKind::Triple, &opts).unwrap();
    assert_eq!(hat.order(), 240);
    assert_eq!(t.order(), 16);
}

#[test]
fn type_iv_orders_coincide_at_two() {
    let opts = Options::default();
    let hat = enumerate_automorphisms(&system("ThatIV(2,F5)"), AutKind::Triple, &opts).unwrap();
    let t = enumerate_automorphisms(&system("TIV(2,F5)"), AutKind::Triple, &opts).unwrap();
    assert_eq!(hat.order(), 8);
    assert_eq!(t.order(), 8);
}
