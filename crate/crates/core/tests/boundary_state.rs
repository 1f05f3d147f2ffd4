use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use scri::boundary_state::*;
use scri::fields::{l2_norms, BoundaryFunction, BoundaryTensor, UProfile, UTerm};
use scri::propagation::PropagationConfig;
use scri::sampling::{random_boundary, random_boundary_tensor, random_scalar, random_supertranslation, rng};
use scri::symplectic::{sigma_bulk, sigma_scri, tau_scri};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn gaussian_u(l: u32, p: u32) -> BoundaryFunction {
    BoundaryFunction::single(l, 0, UProfile::gaussian(vec![UTerm::new(1.0, 0.0, 1.0, p)]))
}

fn rel_l2(a: &BoundaryFunction, b: &BoundaryFunction) -> f64 {
    let (d, _) = l2_norms(&a.add(&b.scaled(-1.0))).unwrap();
    let (n, _) = l2_norms(b).unwrap();
    (d / n).sqrt()
}

fn constant_alpha(a: f64) -> BMSElement {
    // α = a, a constant shift of every generator
    BMSElement::supertranslation(BTreeMap::from([((0, 0), c(a * (4.0 * PI).sqrt()))])).unwrap()
}

#[test]
fn scalar_two_point_examples() {
    let cfg = BoundaryKernelConfig::default();
    let v = omega2_scri_scalar(&gaussian_u(0, 0), &gaussian_u(0, 0), &cfg).unwrap();
    assert!((v.value - 1.0).norm() < 1e-10);
    assert!(v.route_gap() < 1e-4);
    let z = omega2_scri_scalar(&gaussian_u(0, 0), &BoundaryFunction::zero(), &cfg).unwrap();
    assert_eq!(z.value, c(0.0));
}

#[test]
fn scalar_two_point_positivity_and_commutator() {
    let cfg = BoundaryKernelConfig::default();
    let mut r = rng(21);
    for _ in 0..20 {
        let (p, q) = (random_boundary(&mut r, 2), random_boundary(&mut r, 2));
        let pp = omega2_scri_scalar(&p, &p, &cfg).unwrap();
        assert!(pp.value.re >= 0.0 && pp.value.im.abs() < 1e-8 * pp.value.re);
        let pq = omega2_scri_scalar(&p, &q, &cfg).unwrap().value;
        let qp = omega2_scri_scalar(&q, &p, &cfg).unwrap().value;
        // hermitian, with antisymmetric part i σ
        assert!((qp - pq.conj()).norm() < 1e-8 * pq.norm().max(1e-3));
        let s = sigma_scri(&p, &q).unwrap().value;
        assert!((pq - qp - I * s).norm() < 1e-4 * s.abs().max(1e-3), "{pq} {qp} {s}");
        let qq = omega2_scri_scalar(&q, &q, &cfg).unwrap().value.re;
        assert!(pq.norm() <= (pp.value.re * qq).sqrt() * (1.0 + 1e-8));
    }
}

#[test]
fn tensor_two_point_examples() {
    let cfg = BoundaryKernelConfig::default();
    let plus = BoundaryTensor::new(gaussian_u(2, 0), BoundaryFunction::zero()).unwrap();
    let cross = BoundaryTensor::new(BoundaryFunction::zero(), gaussian_u(2, 0)).unwrap();
    let v = omega2_scri_tensor(&plus, &plus, &cfg).unwrap().value;
    assert!((v - 2.0).norm() < 1e-9, "{v}");
    assert_eq!(omega2_scri_tensor(&plus, &cross, &cfg).unwrap().value, c(0.0));
    let mut r = rng(22);
    for _ in 0..10 {
        let (l, m) = (random_boundary_tensor(&mut r), random_boundary_tensor(&mut r));
        let lm = omega2_scri_tensor(&l, &m, &cfg).unwrap().value;
        let ml = omega2_scri_tensor(&m, &l, &cfg).unwrap().value;
        let t = tau_scri(&l, &m).unwrap().value;
        assert!((lm - ml - I * t).norm() < 1e-4 * t.abs().max(1e-3), "{lm} {ml} {t}");
        assert!(omega2_scri_tensor(&l, &l, &cfg).unwrap().value.re >= 0.0);
    }
}

#[test]
fn route_disagreement_is_reported() {
    let cfg = BoundaryKernelConfig { epsilon: vec![0.4, 0.3], route_tolerance: 1e-12, ..Default::default() };
    let p = random_boundary(&mut rng(23), 1);
    assert!(matches!(omega2_scri_scalar(&p, &p, &cfg), Err(scri::error::Error::RouteDisagreement { .. })));
    let bad = BoundaryKernelConfig { epsilon: vec![0.01, 0.02], ..Default::default() };
    assert!(bad.validate().is_err());
}

#[test]
fn kappa_examples_and_cocycle() {
    let z = Complex64::new(0.3, -1.2);
    assert!((kappa_lambda(&Sl2c::identity(), z).unwrap() - 1.0).abs() < 1e-15);
    assert!((kappa_lambda(&Sl2c::boost(2.0), c(0.0)).unwrap() - 4.0).abs() < 1e-15);
    let l1 = Sl2c::new(c(1.0), Complex64::new(0.4, 0.2), c(0.0), c(1.0)).unwrap();
    let l2 = Sl2c::boost(1.3).mul(&Sl2c::new(c(1.0), c(0.0), Complex64::new(-0.5, 0.1), c(1.0)).unwrap());
    for &w in &[c(0.0), Complex64::new(0.7, -0.2), Complex64::new(-2.0, 3.0)] {
        // K_{Λ₁Λ₂}(z) = K_{Λ₁}(Λ₂ z) K_{Λ₂}(z)
        let lhs = kappa_lambda(&l1.mul(&l2), w).unwrap();
        let rhs = kappa_lambda(&l1, l2.mobius(w).unwrap()).unwrap() * kappa_lambda(&l2, w).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * lhs);
    }
    let pole = Sl2c::new(c(0.0), c(1.0), c(-1.0), c(0.0)).unwrap();
    assert!(pole.mobius(c(0.0)).is_err());
    assert!(Sl2c::new(c(1.0), c(1.0), c(1.0), c(1.0)).is_err());
}

#[test]
fn group_law() {
    let mut r = rng(24);
    let a = BMSElement::supertranslation(random_supertranslation(&mut r, 2, 0.15)).unwrap();
    let b = BMSElement::supertranslation(random_supertranslation(&mut r, 2, 0.15)).unwrap();
    let ab = bms_compose(&a, &b);
    // supertranslations add
    for &(th, ph) in &[(0.3, 0.2), (1.5, 4.0), (2.8, 1.0)] {
        assert!((ab.alpha_at(th, ph) - a.alpha_at(th, ph) - b.alpha_at(th, ph)).abs() < 1e-14);
    }
    assert!(bms_compose(&a, &bms_inverse(&a)).is_identity(1e-12));
    assert!(bms_compose(&BMSElement::identity(), &a) == a);
    let boost = BMSElement::lorentz(Sl2c::boost(0.8));
    let mixed = bms_compose(&boost, &a);
    assert!(bms_compose(&mixed, &bms_inverse(&mixed)).is_identity(1e-10));
    assert!(!mixed.is_pure_supertranslation());
    let bad = BTreeMap::from([((1, 1), c(0.2))]);
    assert!(BMSElement::supertranslation(bad).is_err());
}

#[test]
fn action_of_simple_supertranslations() {
    let opts = ActionOptions::default();
    let psi = random_boundary(&mut rng(25), 2);
    let same = bms_act(&BMSElement::identity(), &psi, &opts).unwrap();
    assert_eq!(same, psi);
    let tiny = bms_act(&constant_alpha(0.0), &psi, &opts).unwrap();
    assert!(rel_l2(&tiny, &psi) < 1e-6);
    // ψ(u + a)
    let moved = bms_act(&constant_alpha(0.4), &psi, &opts).unwrap();
    assert!(rel_l2(&moved, &psi.shifted(-0.4)) < 1e-6);
    assert!(rel_l2(&moved, &psi) > 0.05);
    // a dipole α mixes an l = 0 profile into l = 1
    let g = BMSElement::supertranslation(BTreeMap::from([((1, 0), c(0.3))])).unwrap();
    let out = bms_act(&g, &gaussian_u(0, 0), &opts).unwrap();
    assert!(out.modes.contains_key(&(1, 0)));
    assert!(bms_act(&BMSElement::lorentz(Sl2c::boost(1.0)), &psi, &ActionOptions { rotate: true, ..opts.clone() }).is_ok());
}

#[test]
fn action_round_trips() {
    let opts = ActionOptions::default();
    let mut r = rng(26);
    let psi = random_boundary(&mut r, 2);
    let g = BMSElement::supertranslation(random_supertranslation(&mut r, 2, 0.15)).unwrap();
    let there = bms_act(&g, &psi, &opts).unwrap();
    let back = bms_act(&bms_inverse(&g), &there, &opts).unwrap();
    assert!(rel_l2(&back, &psi) < 1e-6, "{}", rel_l2(&back, &psi));
}

#[test]
fn two_point_function_is_supertranslation_invariant() {
    let cfg = BoundaryKernelConfig::default();
    let opts = ActionOptions::default();
    let mut r = rng(27);
    let pairs: Vec<_> = (0..3).map(|_| (random_boundary(&mut r, 2), random_boundary(&mut r, 2))).collect();
    let id = check_bms_invariance(&BMSElement::identity(), InvarianceSuite::Scalar(&pairs), &cfg, &opts, 1e-6);
    assert!(id.passed());
    let shift = check_bms_invariance(&constant_alpha(-0.3), InvarianceSuite::Scalar(&pairs), &cfg, &opts, 1e-6);
    assert!(shift.passed(), "{:?}", shift.failures().collect::<Vec<_>>());
    let g = BMSElement::supertranslation(random_supertranslation(&mut r, 2, 0.15)).unwrap();
    let rep = check_bms_invariance(&g, InvarianceSuite::Scalar(&pairs), &cfg, &opts, 1e-6);
    assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
    // the data really moved
    let moved = bms_act(&g, &pairs[0].0, &opts).unwrap();
    assert!(rel_l2(&moved, &pairs[0].0) > 1e-2);
}

#[test]
fn vacuum_two_point_function() {
    let cfg = PropagationConfig::default();
    let mut r = rng(28);
    for _ in 0..3 {
        let (f, g) = (random_scalar(&mut r, 1), random_scalar(&mut r, 1));
        let w = minkowski_vacuum_two_point(&f, &g).unwrap();
        let s = sigma_bulk(&f, &g, &cfg).unwrap().value;
        assert!((w.im - s / 2.0).abs() < 1e-3 * s.abs().max(1e-3), "{w} vs σ = {s}");
        let ff = minkowski_vacuum_two_point(&f, &f).unwrap();
        assert!(ff.re > 0.0 && ff.im.abs() < 1e-8 * ff.re);
    }
    // spacelike separated sources commute
    let f = random_scalar(&mut r, 1);
    let mut g = random_scalar(&mut r, 1);
    for p in g.modes.values_mut() {
        for t in &mut p.terms {
            t.r0 += 12.0;
        }
    }
    let w = minkowski_vacuum_two_point(&f, &g).unwrap();
    assert!(w.im.abs() < 1e-8, "{w}");
}
