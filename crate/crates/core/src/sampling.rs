//! Seeded random draws of test functions, boundary data, tensors and supertranslations.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{
    BoundaryFunction, BoundaryTensor, GaussianPolynomial, GaussianTerm, ModeKey, ModeTestFunction, RadialProfile,
    TensorPoly, UProfile, UTerm,
};

pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn amp(rng: &mut SuiteRng, complex: bool) -> (f64, f64) {
    let a = rng.gen_range(-1.0..1.0);
    let b = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
    (a, b)
}

/// Real scalar with one Gaussian shell term per `(l, m >= 0)`, `l <= l_max`.
pub fn random_scalar(rng: &mut SuiteRng, l_max: u32) -> ModeTestFunction {
    let mut modes = BTreeMap::new();
    for l in 0..=l_max {
        for m in 0..=(l as i32) {
            let (a, ai) = amp(rng, m > 0);
            let mut t = GaussianTerm::new(
                a,
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.3..0.6),
                rng.gen_range(1.6..2.4),
                rng.gen_range(0.25..0.3),
            );
            t.ai = ai;
            modes.insert((l, m), RadialProfile::gaussian(vec![t]));
        }
    }
    ModeTestFunction::real_from_nonnegative(modes)
}

/// A random scalar whose support is shifted in time by `dt`.
pub fn random_scalar_at(rng: &mut SuiteRng, l_max: u32, dt: f64) -> ModeTestFunction {
    random_scalar(rng, l_max).shifted(dt)
}

fn random_uprofile(rng: &mut SuiteRng, complex: bool) -> UProfile {
    let n = rng.gen_range(1..=2);
    let terms = (0..n)
        .map(|_| {
            let (a, ai) = amp(rng, complex);
            let mut t = UTerm::new(a, rng.gen_range(-1.0..1.0), rng.gen_range(0.5..1.0), rng.gen_range(0..=1));
            t.ai = ai;
            t
        })
        .collect();
    UProfile::gaussian(terms)
}

/// Real boundary function with Gaussian `u`-profiles, `l <= l_max`.
pub fn random_boundary(rng: &mut SuiteRng, l_max: u32) -> BoundaryFunction {
    random_boundary_from(rng, 0, l_max)
}

fn random_boundary_from(rng: &mut SuiteRng, l_min: u32, l_max: u32) -> BoundaryFunction {
    let mut modes = BTreeMap::new();
    for l in l_min..=l_max {
        for m in 0..=(l as i32) {
            modes.insert((l, m), random_uprofile(rng, m > 0));
        }
    }
    BoundaryFunction::real_from_nonnegative(modes)
}

/// Boundary tensor with `l = 2` electric and magnetic channels.
pub fn random_boundary_tensor(rng: &mut SuiteRng) -> BoundaryTensor {
    let plus = random_boundary_from(rng, 2, 2);
    let cross = random_boundary_from(rng, 2, 2);
    BoundaryTensor::new(plus, cross).expect("l = 2 channels")
}

/// Real supertranslation `α` with `l <= l_max` harmonic coefficients of size `amplitude`.
pub fn random_supertranslation(rng: &mut SuiteRng, l_max: u32, amplitude: f64) -> BTreeMap<ModeKey, Complex64> {
    let mut out = BTreeMap::new();
    for l in 0..=l_max {
        for m in 0..=(l as i32) {
            let (a, b) = amp(rng, m > 0);
            let c = Complex64::new(a, b) * amplitude;
            out.insert((l, m), c);
            if m > 0 {
                let s = if m % 2 == 0 { 1.0 } else { -1.0 };
                out.insert((l, -m), c.conj() * s);
            }
        }
    }
    out
}

fn random_antisymmetric(rng: &mut SuiteRng) -> [[f64; 4]; 4] {
    let mut a = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in (i + 1)..4 {
            let v = rng.gen_range(-1.0..1.0);
            a[i][j] = v;
            a[j][i] = -v;
        }
    }
    a
}

/// Divergence-free `ε^{ab} = (M^{ac} N^{bd} + N^{ac} M^{bd}) ∂_c ∂_d φ` with antisymmetric
/// `M`, `N` and a Gaussian scalar `φ` centred at `(t0, origin)`, or on a shell of radius `r0`.
pub fn random_divfree_tensor(rng: &mut SuiteRng, t0: f64, r0: f64) -> TensorPoly {
    let m = random_antisymmetric(rng);
    let n = random_antisymmetric(rng);
    let wt = rng.gen_range(0.5..0.7);
    let wr = rng.gen_range(0.6..0.8);
    let phi = GaussianPolynomial::new(t0, wt, r0, wr)
        .with_term(1.0, 0, [0, 0, 0], 0)
        .with_term(rng.gen_range(-0.5..0.5), 0, [1, 0, 0], 0)
        .with_term(rng.gen_range(-0.5..0.5), 1, [0, 0, 0], 0);
    let d2: Vec<Vec<GaussianPolynomial>> =
        (0..4).map(|c| (0..4).map(|d| phi.derivative(c).derivative(d)).collect()).collect();
    let zero = phi.zero_like();
    let mut comps = vec![zero.clone(); 10];
    for a in 0..4 {
        for b in a..4 {
            let mut acc = zero.clone();
            for c in 0..4 {
                for d in 0..4 {
                    let k = m[a][c] * n[b][d] + n[a][c] * m[b][d];
                    if k != 0.0 {
                        acc = acc.add(&d2[c][d].scaled(k));
                    }
                }
            }
            comps[crate::fields::sym_index(a, b)] = acc;
        }
    }
    TensorPoly { comps }
}
