use proptest::prelude::*;
use scri::fields::{eta, GaussianPolynomial, TensorPoly};
use scri::lingrav::*;
use scri::sampling::{random_divfree_tensor, rng};
use scri::Error;

fn poly_from(coeffs: &[i32]) -> Polynomial {
    // all monomials of degree <= 3 in four variables, in a fixed order
    let mut out = Polynomial::default();
    let mut k = 0;
    for a in 0..4u32 {
        for b in 0..4u32 {
            for c in 0..4u32 {
                for d in 0..4u32 {
                    if a + b + c + d <= 3 {
                        out = out.plus(&Polynomial::monomial(coeffs[k % coeffs.len()] as f64, [a, b, c, d]));
                        k += 1;
                    }
                }
            }
        }
    }
    out
}

fn null_wave() -> ([f64; 4], Sym2<PlaneWaves>) {
    // k_a = (-ω, 0, 0, ω): travels along +z
    let k = [-1.3, 0.0, 0.0, 1.3];
    let h = Sym2::from_fn(|a, b| match (a, b) {
        (1, 1) => PlaneWaves::cos(k, 1.0),
        (2, 2) => PlaneWaves::cos(k, -1.0),
        (1, 2) => PlaneWaves::cos(k, 0.4),
        _ => PlaneWaves::default(),
    });
    (k, h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn einstein_operator_annihilates_pure_gauge(c in proptest::collection::vec(-5i32..5, 35..60)) {
        let chi = GaugeTransformation { chi: (0..4).map(|a| poly_from(&c[a..])).collect() };
        let k = linearized_einstein(&symmetrized_gradient(&chi)).unwrap();
        prop_assert_eq!(k.size(), 0.0);
    }

    #[test]
    fn trace_of_gradient_is_divergence(c in proptest::collection::vec(-5i32..5, 35..60)) {
        let chi = GaugeTransformation { chi: (0..4).map(|a| poly_from(&c[2 * a..])).collect() };
        let lhs = trace(&symmetrized_gradient(&chi));
        prop_assert_eq!(lhs, covector_divergence(&chi));
    }

    #[test]
    fn trace_reversal_is_an_involution(c in proptest::collection::vec(-5i32..5, 35..60)) {
        let h = Sym2::from_fn(|a, b| poly_from(&c[a + 3 * b..]));
        prop_assert_eq!(trace_reversal(&trace_reversal(&h)), h.clone());
        prop_assert_eq!(trace(&trace_reversal(&h)), trace(&h).scale(-1.0));
    }
}

#[test]
fn constant_gradient_vanishes() {
    let chi = GaugeTransformation { chi: (0..4).map(|a| Polynomial::constant(a as f64 + 1.0)).collect() };
    assert_eq!(symmetrized_gradient(&chi).size(), 0.0);
}

#[test]
fn traceless_tensor_is_unchanged_by_reversal() {
    let (_, h) = null_wave();
    assert_eq!(trace_reversal(&h), h);
}

#[test]
fn transverse_traceless_wave_solves_everything() {
    let (_, h) = null_wave();
    assert!(linearized_einstein(&h).unwrap().size() < 1e-10);
    let (p, d) = dedonder_residual(&h).unwrap();
    assert!(p.size() < 1e-10);
    assert!(d.iter().all(|c| c.size() < 1e-10));
}

#[test]
fn residual_gauge_solves_the_wave_operator() {
    let (k, _) = null_wave();
    let v = [0.3, -1.1, 0.7, 0.2];
    let chi = GaugeTransformation { chi: (0..4).map(|a| PlaneWaves::sin(k, v[a])).collect() };
    let h = symmetrized_gradient(&chi);
    let (p, _) = dedonder_residual(&h).unwrap();
    assert!(p.size() < 1e-10, "{}", p.size());
    assert!(linearized_einstein(&h).unwrap().size() < 1e-10);
}

#[test]
fn constant_perturbation_is_trivial() {
    let e = Sym2::pure_trace(&Polynomial::constant(1.0));
    let (p, d) = dedonder_residual(&e).unwrap();
    assert_eq!(p.size(), 0.0);
    assert!(d.iter().all(|c| c.size() == 0.0));
}

#[test]
fn dedonder_solutions_solve_the_einstein_operator() {
    // a TT wave plus residual gauge: de Donder holds, so K must vanish as well
    let (k, h) = null_wave();
    let chi = GaugeTransformation { chi: (0..4).map(|a| PlaneWaves::cos(k, 0.5 - a as f64)).collect() };
    let h = h.plus(&symmetrized_gradient(&chi));
    let (p, d) = dedonder_residual(&h).unwrap();
    assert!(p.size() < 1e-10 && d.iter().all(|c| c.size() < 1e-10));
    assert!(linearized_einstein(&h).unwrap().size() < 1e-10);
}

fn gaussian(c: f64, alpha: [u32; 3], p: u32) -> GaussianPolynomial {
    GaussianPolynomial::new(0.1, 0.6, 0.0, 0.7).with_term(c, p, alpha, 0)
}

fn gaussian_gauge() -> GaugeTransformation<GaussianPolynomial> {
    GaugeTransformation {
        chi: vec![gaussian(0.7, [1, 0, 0], 0), gaussian(-0.4, [0, 1, 1], 1), gaussian(1.1, [0, 0, 0], 2), gaussian(0.3, [2, 0, 0], 0)],
    }
}

#[test]
fn gaussian_gauge_is_annihilated() {
    let h = symmetrized_gradient(&gaussian_gauge());
    let k = linearized_einstein(&h).unwrap();
    assert!(k.size() < 1e-12 * h.size(), "{}", k.size());
}

#[test]
fn finite_difference_gauge_residual() {
    let g = gaussian_gauge();
    let n = [18; 4];
    let h = 0.15;
    let o = [0.1 - 1.3, -1.3, -1.3, -1.3];
    let chi = GaugeTransformation { chi: g.chi.iter().map(|c| GridField::sample(o, h, n, |x| c.eval(x))).collect() };
    let grad = symmetrized_gradient(&chi);
    let k = linearized_einstein(&grad).unwrap();
    assert!(k.size() < 1e-6, "{}", k.size());
    // and the stencil runs out of grid on a small box
    let small = GaugeTransformation { chi: g.chi.iter().map(|c| GridField::sample(o, h, [5; 4], |x| c.eval(x))).collect() };
    let err = linearized_einstein(&symmetrized_gradient(&small)).unwrap_err();
    assert!(matches!(err, Error::Refinement(_)));
}

#[test]
fn finite_differences_converge_to_the_exact_operator() {
    // a non-solution, so K h is nonzero; compare the grid result at the centre
    let h_exact = Sym2::from_fn(|a, b| gaussian(1.0 + (a + b) as f64 * 0.1, [(a == 1) as u32, 0, (b == 3) as u32], 0));
    let k_exact = linearized_einstein(&h_exact).unwrap();
    let centre = [0.1, 0.05, -0.05, 0.1];
    let mut errs = vec![];
    for step in [0.08, 0.04] {
        let n = [9; 4];
        let o: [f64; 4] = std::array::from_fn(|d| centre[d] - 4.0 * step);
        let grid = Sym2 { comps: h_exact.comps.iter().map(|c| GridField::sample(o, step, n, |x| c.eval(x))).collect() };
        let k = linearized_einstein(&grid).unwrap();
        let mut worst: f64 = 0.0;
        for (kg, ke) in k.comps.iter().zip(&k_exact.comps) {
            worst = worst.max((kg.data[kg.index([4; 4])] - ke.eval(centre)).abs());
        }
        errs.push(worst);
    }
    let ratio = errs[0] / errs[1];
    assert!(ratio > 3.5 && ratio < 4.5, "{errs:?}");
}

#[test]
fn obstruction_of_traceless_and_gauge_sources() {
    let t = TensorPoly::from(Sym2::<GaussianPolynomial>::from(&random_divfree_tensor(&mut rng(5), 0.0, 0.0)));
    let v = gx_obstruction(&t, 1e-8).unwrap();
    assert!(v.coexact, "{v:?}");

    // ε = K(α) for a compactly supported α, with indices raised
    let env = t.comps[0].zero_like();
    let alpha = Sym2::from_fn(|a, b| {
        env.clone().with_term(0.5 + 0.1 * (a * b) as f64, (a == 0) as u32, [(a == 2) as u32, (b == 1) as u32, 0], 0)
    });
    let ka = TensorPoly::from(linearized_einstein(&alpha).unwrap().raised());
    let v = gx_obstruction(&ka, 1e-8).unwrap();
    assert!(v.coexact && v.integral_value.abs() < 1e-8, "{v:?}");

    // gauge-class invariance
    let shifted = gx_obstruction(&t.add(&ka), 1e-8).unwrap();
    assert!((shifted.integral_value - gx_obstruction(&t, 1e-8).unwrap().integral_value).abs() < 1e-8);
}

#[test]
fn non_divergence_free_source_is_refused() {
    let (_, h) = null_wave();
    assert_eq!(trace(&h).size(), 0.0);
    let g = gaussian(1.0, [0, 0, 0], 0);
    let z = g.zero_like();
    let e = TensorPoly { comps: (0..10).map(|k| if k == 0 { g.clone() } else { z.clone() }).collect() };
    // ε^{00} alone is not divergence-free, so the criterion refuses it
    assert!(matches!(gx_obstruction(&e, 1e-8), Err(Error::Precondition(_))));
}

#[test]
fn positive_trace_has_nonzero_integral() {
    let bump = gaussian(1.0, [0, 0, 0], 0);
    let v = integrate_gaussian_polynomial(&bump);
    assert!(v > 0.1);
}

#[test]
fn compact_primitive_exists_iff_integral_vanishes() {
    let n = [10; 4];
    let h = 0.4;
    let o = [-1.8; 4];
    let g = gaussian(1.0, [1, 0, 0], 0).derivative(2);
    let f = GridField::sample(o, h, n, |x| g.eval(x));
    // the sampled function is odd in x, so its grid sum vanishes up to rounding
    let v = coexact_primitive(&f, 1e-10).unwrap();
    let div = backward_divergence(&v);
    let err = div.data.iter().zip(&f.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");
    for (axis, c) in v.iter().enumerate() {
        let mut edge: f64 = 0.0;
        c.for_each_valid(|i, x| {
            if i[axis] == n[axis] - 1 {
                edge = edge.max(x.abs());
            }
        })
        .unwrap();
        assert!(edge < 1e-10, "axis {axis}: {edge}");
    }
    let bump = GridField::sample(o, h, n, |x| gaussian(1.0, [0, 0, 0], 0).eval(x));
    assert!(coexact_primitive(&bump, 1e-10).is_err());
}

#[test]
fn bidistribution_trace_correction() {
    let l1 = |e: &Sym2<Polynomial>| e.get(0, 0).eval([0.0; 4]) + 2.0 * e.get(1, 1).eval([0.0; 4]);
    let l2 = |e: &Sym2<Polynomial>| e.get(2, 2).eval([0.0; 4]) - e.get(0, 3).eval([0.0; 4]);
    let omega = |a: &Sym2<Polynomial>, b: &Sym2<Polynomial>| {
        Ok(num_complex::Complex64::new(l1(a) * l2(b) + l2(a) * l1(b), 0.0))
    };
    // pure trace: ε = c η⁻¹ s, Tr ε = 4 c s, so the correction is 2 Ω₂(ε, ζ)
    let eps = Sym2::pure_trace(&Polynomial::constant(1.5));
    let zeta = Sym2::pure_trace(&Polynomial::constant(-0.5)).plus(&Sym2::from_fn(|a, b| {
        if (a, b) == (0, 3) {
            Polynomial::constant(0.0)
        } else {
            Polynomial::default()
        }
    }));
    let direct = omega(&eps, &zeta).unwrap();
    let v = trace_reversal_bidist(omega, &eps, &zeta).unwrap();
    assert!((v + direct).norm() < 1e-14, "{v} {direct}");

    // traceless arguments: no correction
    let tl = Sym2::from_fn(|a, b| if (a, b) == (0, 3) || (a, b) == (1, 2) { Polynomial::constant(1.0) } else { Polynomial::default() });
    let tl2 = Sym2::from_fn(|a, b| if (a, b) == (2, 2) || (a, b) == (1, 1) { Polynomial::constant(eta(a, a) * if a == 1 { 1.0 } else { -1.0 }) } else { Polynomial::default() });
    assert_eq!(trace_reversal_bidist(omega, &tl, &tl2).unwrap(), omega(&tl, &tl2).unwrap());

    // linearity in each slot
    let s = 0.7;
    let a = trace_reversal_bidist(omega, &eps.plus(&tl.scale(s)), &zeta).unwrap();
    let b = trace_reversal_bidist(omega, &eps, &zeta).unwrap() + trace_reversal_bidist(omega, &tl, &zeta).unwrap() * s;
    assert!((a - b).norm() < 1e-13);
}
