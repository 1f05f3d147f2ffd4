use num_complex::{Complex, Complex64};
use num_rational::Rational64;
use proptest::prelude::*;
use scri::algebra::*;
use scri::boundary_state::BoundaryKernelConfig;
use scri::propagation::PropagationConfig;
use scri::sampling::{random_boundary, random_scalar, rng};
use scri::symplectic::sigma_bulk;

const K: GeneratorKind = GeneratorKind::BulkScalar;

fn q(a: i64, b: i64) -> ExactComplex {
    Complex::new(Rational64::from_integer(a), Rational64::from_integer(b))
}

fn exact_alg() -> FieldAlgebra<ExactComplex> {
    let s = [[0, 2, -1, 0], [-2, 0, 3, 1], [1, -3, 0, -4], [0, -1, 4, 0]];
    FieldAlgebra::symbolic(K, s.iter().map(|r| r.iter().map(|&v| q(v, 0)).collect()).collect()).unwrap()
}

fn element(alg: &FieldAlgebra<ExactComplex>, words: &[(Vec<usize>, (i64, i64))]) -> AlgebraElement<ExactComplex> {
    let mut e = AlgebraElement::zero(K);
    for (w, (a, b)) in words {
        e = e.plus(&alg.word(w).scaled(&q(*a, *b))).unwrap();
    }
    e
}

fn arb_element() -> impl Strategy<Value = Vec<(Vec<usize>, (i64, i64))>> {
    prop::collection::vec((prop::collection::vec(0usize..4, 0..4), (-3i64..4, -3i64..4)), 1..4)
}

fn exact_state() -> QuasiFreeState<ExactComplex> {
    // ω₂ = S + i σ / 2 with a symmetric part that keeps the matrix hermitian
    let alg = exact_alg();
    let n = alg.len();
    let mut w = vec![vec![q(0, 0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let sym = if i == j { q(4, 0) } else { q(1, 0) };
            let half = Complex::new(Rational64::from_integer(0), alg.pairing[i][j].re / Rational64::from_integer(2));
            w[i][j] = sym + half;
        }
    }
    QuasiFreeState { kind: K, two_point: w }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(a in arb_element(), b in arb_element(), c in arb_element()) {
        let alg = exact_alg();
        let (a, b, c) = (element(&alg, &a), element(&alg, &b), element(&alg, &c));
        let l = alg.multiply(&alg.multiply(&a, &b).unwrap(), &c).unwrap();
        let r = alg.multiply(&a, &alg.multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn star_is_an_antilinear_antimultiplicative_involution(a in arb_element(), b in arb_element()) {
        let alg = exact_alg();
        let (a, b) = (element(&alg, &a), element(&alg, &b));
        let a = alg.normalize(&a).unwrap();
        prop_assert_eq!(alg.star(&alg.star(&a).unwrap()).unwrap(), a.clone());
        let ab = alg.star(&alg.multiply(&a, &b).unwrap()).unwrap();
        let ba = alg.multiply(&alg.star(&b).unwrap(), &alg.star(&a).unwrap()).unwrap();
        prop_assert_eq!(ab, ba);
        let ia = alg.star(&a.scaled(&q(0, 1))).unwrap();
        prop_assert_eq!(ia, alg.star(&a).unwrap().scaled(&q(0, -1)));
    }

    #[test]
    fn normal_form_is_idempotent_and_unit_is_neutral(a in arb_element()) {
        let alg = exact_alg();
        let n = alg.normalize(&element(&alg, &a)).unwrap();
        prop_assert!(n.terms.keys().all(|w| w.windows(2).all(|p| p[0] <= p[1])));
        prop_assert_eq!(alg.normalize(&n).unwrap(), n.clone());
        prop_assert_eq!(alg.multiply(&n, &AlgebraElement::unit(K)).unwrap(), n.clone());
        prop_assert_eq!(alg.multiply(&AlgebraElement::unit(K), &n).unwrap(), n);
    }

    #[test]
    fn state_is_normal_order_independent(w in prop::collection::vec(0usize..4, 0..6)) {
        // ω(a) = ω(normal form of a)
        let alg = exact_alg();
        let st = exact_state();
        let raw = alg.word(&w);
        let norm = alg.normalize(&raw).unwrap();
        prop_assert_eq!(evaluate_state(&st, &raw).unwrap(), evaluate_state(&st, &norm).unwrap());
    }
}

#[test]
fn low_order_values() {
    let st = exact_state();
    let alg = exact_alg();
    assert_eq!(evaluate_state(&st, &AlgebraElement::unit(K)).unwrap(), q(1, 0));
    assert_eq!(npoint(&st, &[0, 1, 2]), q(0, 0));
    assert_eq!(npoint(&st, &[1, 2]), st.two_point[1][2]);
    let w = &st.two_point;
    let four = w[0][1] * w[2][3] + w[0][2] * w[1][3] + w[0][3] * w[1][2];
    assert_eq!(npoint(&st, &[0, 1, 2, 3]), four);
    // the commutator is i σ times the unit
    let c = alg.commutator(&alg.generator(2), &alg.generator(3)).unwrap();
    assert_eq!(c, AlgebraElement::scalar(K, q(0, -4)));
    assert_eq!(one_particle_inner(&st, 0, 1), w[0][1]);
}

#[test]
fn canonical_text_form() {
    let alg = exact_alg();
    let e = alg.multiply(&alg.generator(1), &alg.generator(0)).unwrap();
    assert_eq!(e.to_string(), "(0-2i)*[] + (1+0i)*[g0 g1]");
    assert_eq!(AlgebraElement::<ExactComplex>::zero(K).to_string(), "0");
}

#[test]
fn kinds_do_not_mix() {
    let alg = exact_alg();
    let other = AlgebraElement::<ExactComplex>::unit(GeneratorKind::BoundaryScalar);
    assert!(matches!(alg.multiply(&alg.generator(0), &other), Err(scri::error::Error::KindMismatch(..))));
    assert!(alg.generator(0).plus(&other).is_err());
    assert!(alg.normalize(&alg.word(&[7])).is_err());
    let asym = vec![vec![q(0, 0), q(1, 0)], vec![q(1, 0), q(0, 0)]];
    assert!(FieldAlgebra::symbolic(K, asym).is_err());
}

#[test]
fn perfect_matching_counts() {
    for (n, count) in [(0, 1), (2, 1), (4, 3), (6, 15), (8, 105)] {
        assert_eq!(perfect_matchings(n).len(), count);
    }
    assert!(perfect_matchings(5).is_empty());
}

#[test]
fn pulled_back_state_has_the_bulk_commutator() {
    let pcfg = PropagationConfig::default();
    let kcfg = BoundaryKernelConfig::default();
    let mut r = rng(31);
    let fs: Vec<_> = (0..4).map(|_| random_scalar(&mut r, 1)).collect();
    let bulk = FieldAlgebra::from_generators(fs.iter().cloned().map(Generator::BulkScalar).collect(), &pcfg).unwrap();
    let bdy = bulk.boundary_image(&pcfg).unwrap();
    let omega = QuasiFreeState::bms_invariant(&bdy, &kcfg).unwrap();
    let pulled = pullback_state(&omega, bulk.kind).unwrap();
    assert!(pullback_state(&omega, GeneratorKind::BoundaryScalar).is_err());
    for i in 0..fs.len() {
        assert!(pulled.two_point[i][i].re >= 0.0);
        for j in 0..fs.len() {
            let w = one_particle_inner(&pulled, i, j);
            assert!((w - pulled.two_point[j][i].conj()).norm() < 1e-8 * w.norm().max(1e-6));
            if i != j {
                let s = sigma_bulk(&fs[i], &fs[j], &pcfg).unwrap().value;
                assert!((w.im - s / 2.0).abs() < 1e-3 * s.abs().max(1e-3), "{w} vs σ = {s}");
                let bound = (pulled.two_point[i][i].re * pulled.two_point[j][j].re).sqrt();
                assert!(w.norm() <= bound * (1.0 + 1e-8));
            }
        }
    }
    // ω(a* a) >= 0 for a linear combination of generators
    let a = bulk.generator(0).plus(&bulk.generator(2).scaled(&Complex64::new(0.3, -0.8))).unwrap();
    let aa = bulk.multiply(&bulk.star(&a).unwrap(), &a).unwrap();
    let v = evaluate_state(&pulled, &aa).unwrap();
    assert!(v.re >= 0.0 && v.im.abs() < 1e-6 * v.re, "{v}");
}

#[test]
fn boundary_state_rejects_bulk_algebras() {
    let p = random_boundary(&mut rng(32), 1);
    let alg = FieldAlgebra::from_generators(vec![Generator::BoundaryScalar(p)], &PropagationConfig::default()).unwrap();
    assert_eq!(alg.kind, GeneratorKind::BoundaryScalar);
    let sym = FieldAlgebra::<Complex64>::symbolic(K, vec![vec![Complex64::new(0.0, 0.0)]]).unwrap();
    assert!(QuasiFreeState::bms_invariant(&sym, &BoundaryKernelConfig::default()).is_err());
}
