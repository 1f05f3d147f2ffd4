//! Linearized gravity on Minkowski space: the linearized Einstein operator, symmetrized
//! gradients, trace reversal, de Donder residuals, trace reversal of bi-distributions and the
//! obstruction criterion for the trace of a divergence-free source.
//!
//! Operators are generic over the component representation. Polynomials, plane-wave sums and
//! Gaussian polynomials differentiate exactly; [`GridField`] uses centred differences.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{eta, sym_index, GaussianPolynomial, TensorPoly};
use crate::quad::CompositeRule;
use crate::symplectic::divergence_residual;

/// A scalar function on Minkowski space closed under partial derivatives.
pub trait Smooth: Clone {
    /// `∂_μ`, `μ = 0` being time.
    fn partial(&self, mu: usize) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn scale(&self, c: f64) -> Self;
    fn zero_like(&self) -> Self;
    /// Size used for residuals: the largest coefficient, or the largest valid grid value.
    fn size(&self) -> f64;
    /// Fails when a finite-difference stencil has run out of grid.
    fn check(&self) -> Result<()> {
        Ok(())
    }
}

fn lin<F: Smooth>(terms: &[(f64, &F)]) -> F {
    let mut acc = terms[0].1.zero_like();
    for (c, f) in terms {
        if *c != 0.0 {
            acc = acc.plus(&f.scale(*c));
        }
    }
    acc
}

// ---------------------------------------------------------------------------------------------
// representations

/// Polynomial `Σ c x^α` in inertial coordinates.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: BTreeMap<[u32; 4], f64>,
}

impl Polynomial {
    pub fn constant(c: f64) -> Self {
        Self::monomial(c, [0; 4])
    }

    pub fn monomial(c: f64, alpha: [u32; 4]) -> Self {
        let mut p = Self::default();
        if c != 0.0 {
            p.coeffs.insert(alpha, c);
        }
        p
    }

    pub fn coordinate(mu: usize) -> Self {
        let mut a = [0; 4];
        a[mu] = 1;
        Self::monomial(1.0, a)
    }

    pub fn eval(&self, x: [f64; 4]) -> f64 {
        self.coeffs.iter().map(|(a, c)| c * (0..4).map(|i| x[i].powi(a[i] as i32)).product::<f64>()).sum()
    }
}

impl Smooth for Polynomial {
    fn partial(&self, mu: usize) -> Self {
        let mut out = Self::default();
        for (a, c) in &self.coeffs {
            if a[mu] > 0 {
                let mut b = *a;
                b[mu] -= 1;
                out = out.plus(&Self::monomial(c * a[mu] as f64, b));
            }
        }
        out
    }

    fn plus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (a, c) in &o.coeffs {
            let v = out.coeffs.get(a).copied().unwrap_or(0.0) + c;
            if v == 0.0 {
                out.coeffs.remove(a);
            } else {
                out.coeffs.insert(*a, v);
            }
        }
        out
    }

    fn scale(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self::default();
        }
        Self { coeffs: self.coeffs.iter().map(|(a, v)| (*a, v * c)).collect() }
    }

    fn zero_like(&self) -> Self {
        Self::default()
    }

    fn size(&self) -> f64 {
        self.coeffs.values().map(|c| c.abs()).fold(0.0, f64::max)
    }
}

/// `Σ_j (c_j cos(k_j·x) + s_j sin(k_j·x))` with `k·x = k_μ x^μ`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PlaneWaves {
    pub waves: Vec<([f64; 4], f64, f64)>,
}

impl PlaneWaves {
    pub fn cos(k: [f64; 4], c: f64) -> Self {
        Self { waves: vec![(k, c, 0.0)] }
    }

    pub fn sin(k: [f64; 4], s: f64) -> Self {
        Self { waves: vec![(k, 0.0, s)] }
    }

    pub fn eval(&self, x: [f64; 4]) -> f64 {
        self.waves
            .iter()
            .map(|(k, c, s)| {
                let ph: f64 = (0..4).map(|i| k[i] * x[i]).sum();
                c * ph.cos() + s * ph.sin()
            })
            .sum()
    }

    fn tidy(mut self) -> Self {
        self.waves.retain(|w| w.1 != 0.0 || w.2 != 0.0);
        self
    }
}

impl Smooth for PlaneWaves {
    fn partial(&self, mu: usize) -> Self {
        Self { waves: self.waves.iter().map(|&(k, c, s)| (k, s * k[mu], -c * k[mu])).collect() }.tidy()
    }

    fn plus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for &(k, c, s) in &o.waves {
            match out.waves.iter_mut().find(|w| w.0 == k) {
                Some(w) => {
                    w.1 += c;
                    w.2 += s;
                }
                None => out.waves.push((k, c, s)),
            }
        }
        out.tidy()
    }

    fn scale(&self, c: f64) -> Self {
        Self { waves: self.waves.iter().map(|&(k, a, b)| (k, a * c, b * c)).collect() }.tidy()
    }

    fn zero_like(&self) -> Self {
        Self::default()
    }

    fn size(&self) -> f64 {
        self.waves.iter().map(|w| w.1.hypot(w.2)).fold(0.0, f64::max)
    }
}

impl Smooth for GaussianPolynomial {
    fn partial(&self, mu: usize) -> Self {
        self.derivative(mu)
    }

    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }

    fn scale(&self, c: f64) -> Self {
        self.scaled(c)
    }

    fn zero_like(&self) -> Self {
        GaussianPolynomial::zero_like(self)
    }

    fn size(&self) -> f64 {
        self.terms.iter().map(|t| t.0.abs()).fold(0.0, f64::max)
    }
}

/// Samples on a uniform 4D grid. Each centred difference invalidates one more layer of
/// boundary cells; `margin` counts them.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub origin: [f64; 4],
    pub h: f64,
    pub n: [usize; 4],
    pub data: Vec<f64>,
    pub margin: usize,
}

impl GridField {
    pub fn sample<F: Fn([f64; 4]) -> f64>(origin: [f64; 4], h: f64, n: [usize; 4], f: F) -> Self {
        let mut data = Vec::with_capacity(n.iter().product());
        for i in 0..n[0] {
            for j in 0..n[1] {
                for k in 0..n[2] {
                    for l in 0..n[3] {
                        let x = [i, j, k, l];
                        data.push(f(std::array::from_fn(|d| origin[d] + x[d] as f64 * h)));
                    }
                }
            }
        }
        Self { origin, h, n, data, margin: 0 }
    }

    fn strides(&self) -> [usize; 4] {
        let n = self.n;
        [n[1] * n[2] * n[3], n[2] * n[3], n[3], 1]
    }

    pub fn index(&self, i: [usize; 4]) -> usize {
        let s = self.strides();
        (0..4).map(|d| i[d] * s[d]).sum()
    }

    pub fn point(&self, i: [usize; 4]) -> [f64; 4] {
        std::array::from_fn(|d| self.origin[d] + i[d] as f64 * self.h)
    }

    /// Valid index box `[margin, n - margin)` per axis.
    pub fn valid(&self) -> Result<[std::ops::Range<usize>; 4]> {
        if self.n.iter().any(|&n| 2 * self.margin >= n) {
            return Err(Error::Refinement(format!("grid {:?} has no cells left inside stencil margin {}", self.n, self.margin)));
        }
        Ok(std::array::from_fn(|d| self.margin..self.n[d] - self.margin))
    }

    pub fn for_each_valid(&self, mut f: impl FnMut([usize; 4], f64)) -> Result<()> {
        let v = self.valid()?;
        for i in v[0].clone() {
            for j in v[1].clone() {
                for k in v[2].clone() {
                    for l in v[3].clone() {
                        let x = [i, j, k, l];
                        f(x, self.data[self.index(x)]);
                    }
                }
            }
        }
        Ok(())
    }
}

impl Smooth for GridField {
    fn partial(&self, mu: usize) -> Self {
        let s = self.strides()[mu];
        let mut data = vec![0.0; self.data.len()];
        let inv = 0.5 / self.h;
        for (idx, out) in data.iter_mut().enumerate() {
            let c = (idx / s) % self.n[mu];
            if c >= 1 && c + 1 < self.n[mu] {
                *out = (self.data[idx + s] - self.data[idx - s]) * inv;
            }
        }
        Self { data, margin: self.margin + 1, ..self.clone() }
    }

    fn plus(&self, o: &Self) -> Self {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        Self { data, margin: self.margin.max(o.margin), ..self.clone() }
    }

    fn scale(&self, c: f64) -> Self {
        Self { data: self.data.iter().map(|a| a * c).collect(), ..self.clone() }
    }

    fn zero_like(&self) -> Self {
        Self { data: vec![0.0; self.data.len()], margin: 0, ..self.clone() }
    }

    fn size(&self) -> f64 {
        let mut m: f64 = 0.0;
        match self.for_each_valid(|_, v| m = m.max(v.abs())) {
            Ok(()) => m,
            Err(_) => f64::NAN,
        }
    }

    fn check(&self) -> Result<()> {
        self.valid().map(|_| ())
    }
}

// ---------------------------------------------------------------------------------------------
// tensors

/// Symmetric 2-tensor, ten components in `sym_index` order. Index position is up to the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct Sym2<F> {
    pub comps: Vec<F>,
}

/// A covector field `χ_a`, used as a gauge transformation `h ↦ h + ∇_S χ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransformation<F> {
    pub chi: Vec<F>,
}

impl<F: Smooth> Sym2<F> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut comps = Vec::with_capacity(10);
        for a in 0..4 {
            for b in a..4 {
                comps.push(f(a, b));
            }
        }
        Self { comps }
    }

    pub fn get(&self, a: usize, b: usize) -> &F {
        &self.comps[sym_index(a, b)]
    }

    /// `η^{ab} f` (or `η_ab f`; the components coincide).
    pub fn pure_trace(f: &F) -> Self {
        Self::from_fn(|a, b| if a == b { f.scale(eta(a, a)) } else { f.zero_like() })
    }

    pub fn plus(&self, o: &Self) -> Self {
        Self { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.plus(b)).collect() }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { comps: self.comps.iter().map(|a| a.scale(c)).collect() }
    }

    /// Raises (or lowers) both indices with `η`.
    pub fn raised(&self) -> Self {
        Self::from_fn(|a, b| self.get(a, b).scale(eta(a, a) * eta(b, b)))
    }

    pub fn size(&self) -> f64 {
        self.comps.iter().map(|c| c.size()).fold(0.0, f64::max)
    }

    fn checked(self) -> Result<Self> {
        for c in &self.comps {
            c.check()?;
        }
        Ok(self)
    }
}

impl From<&TensorPoly> for Sym2<GaussianPolynomial> {
    fn from(t: &TensorPoly) -> Self {
        Self { comps: t.comps.clone() }
    }
}

impl From<Sym2<GaussianPolynomial>> for TensorPoly {
    fn from(t: Sym2<GaussianPolynomial>) -> Self {
        TensorPoly { comps: t.comps }
    }
}

/// `Tr h = η^{ab} h_ab`.
pub fn trace<F: Smooth>(h: &Sym2<F>) -> F {
    lin(&[(-1.0, h.get(0, 0)), (1.0, h.get(1, 1)), (1.0, h.get(2, 2)), (1.0, h.get(3, 3))])
}

/// `(I h)_ab = h_ab - (η_ab / 2) Tr h`.
pub fn trace_reversal<F: Smooth>(h: &Sym2<F>) -> Sym2<F> {
    let tr = trace(h);
    Sym2::from_fn(|a, b| if a == b { h.get(a, a).plus(&tr.scale(-0.5 * eta(a, a))) } else { h.get(a, b).clone() })
}

/// `(∇_S χ)_ab = (∂_a χ_b + ∂_b χ_a) / 2`.
pub fn symmetrized_gradient<F: Smooth>(g: &GaugeTransformation<F>) -> Sym2<F> {
    Sym2::from_fn(|a, b| lin(&[(0.5, &g.chi[b].partial(a)), (0.5, &g.chi[a].partial(b))]))
}

/// `η^{ab} ∂_a χ_b`.
pub fn covector_divergence<F: Smooth>(g: &GaugeTransformation<F>) -> F {
    let d: Vec<F> = (0..4).map(|a| g.chi[a].partial(a)).collect();
    lin(&[(-1.0, &d[0]), (1.0, &d[1]), (1.0, &d[2]), (1.0, &d[3])])
}

/// `(div h)_b = η^{ac} ∂_c h_ab`.
pub fn divergence<F: Smooth>(h: &Sym2<F>) -> Vec<F> {
    (0..4)
        .map(|b| {
            let d: Vec<F> = (0..4).map(|a| h.get(a, b).partial(a)).collect();
            lin(&[(-1.0, &d[0]), (1.0, &d[1]), (1.0, &d[2]), (1.0, &d[3])])
        })
        .collect()
}

/// `□ = -∂_t² + Δ`.
pub fn box_op<F: Smooth>(f: &F) -> F {
    let d: Vec<F> = (0..4).map(|a| f.partial(a).partial(a)).collect();
    lin(&[(-1.0, &d[0]), (1.0, &d[1]), (1.0, &d[2]), (1.0, &d[3])])
}

/// `(K h)_ab = -(η_ab/2)(∂^c∂^d h_cd - □ Tr h) - □h_ab / 2 - ∂_a∂_b Tr h / 2 + ∂^c ∂_(a h_b)c`.
pub fn linearized_einstein<F: Smooth>(h: &Sym2<F>) -> Result<Sym2<F>> {
    let tr = trace(h);
    let box_tr = box_op(&tr);
    let div = divergence(h);
    // ∂^c ∂^d h_cd = η^{bb} ∂_b (div h)_b
    let ddh = lin(&[
        (-1.0, &div[0].partial(0)),
        (1.0, &div[1].partial(1)),
        (1.0, &div[2].partial(2)),
        (1.0, &div[3].partial(3)),
    ]);
    let scalar = ddh.plus(&box_tr.scale(-1.0));
    let dtr: Vec<F> = (0..4).map(|a| tr.partial(a)).collect();
    Sym2::from_fn(|a, b| {
        let mut k = box_op(h.get(a, b)).scale(-0.5);
        k = k.plus(&dtr[a].partial(b).scale(-0.5));
        // ∂^c ∂_(a h_b)c = (∂_a (div h)_b + ∂_b (div h)_a) / 2
        k = k.plus(&div[b].partial(a).scale(0.5)).plus(&div[a].partial(b).scale(0.5));
        if a == b {
            k = k.plus(&scalar.scale(-0.5 * eta(a, a)));
        }
        k
    })
    .checked()
}

/// `(P̃ h, div(I h))` with `P̃ h = □(I h)` on flat space.
pub fn dedonder_residual<F: Smooth>(h: &Sym2<F>) -> Result<(Sym2<F>, Vec<F>)> {
    let ih = trace_reversal(h);
    let p = Sym2 { comps: ih.comps.iter().map(box_op).collect() }.checked()?;
    let d = divergence(&ih);
    for c in &d {
        c.check()?;
    }
    Ok((p, d))
}

// ---------------------------------------------------------------------------------------------
// obstruction

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionVerdict {
    pub coexact: bool,
    pub integral_value: f64,
    pub tolerance: f64,
}

fn sphere_moment(a: [u32; 3]) -> f64 {
    if a.iter().any(|k| k % 2 == 1) {
        return 0.0;
    }
    let g = |x: f64| statrs_gamma(x);
    2.0 * g((a[0] as f64 + 1.0) / 2.0) * g((a[1] as f64 + 1.0) / 2.0) * g((a[2] as f64 + 1.0) / 2.0)
        / g((a[0] + a[1] + a[2]) as f64 / 2.0 + 1.5)
}

/// Gamma at positive half-integers and integers.
fn statrs_gamma(x: f64) -> f64 {
    let two_x = (2.0 * x).round() as i64;
    if two_x % 2 == 0 {
        (1..(two_x / 2)).map(|k| k as f64).product()
    } else {
        // Γ(n + 1/2) = (2n - 1)!! √π / 2^n
        let n = (two_x - 1) / 2;
        let mut v = std::f64::consts::PI.sqrt();
        for k in 0..n {
            v *= k as f64 + 0.5;
        }
        v
    }
}

/// `∫_{ℝ⁴} f d⁴x` for a Gaussian polynomial: exact in time and angle, Gauss-Legendre in `r`.
pub fn integrate_gaussian_polynomial(f: &GaussianPolynomial) -> f64 {
    let r_hi = f.r0 + 9.0 * f.wr;
    let r_lo = (f.r0 - 9.0 * f.wr).max(0.0);
    let rule = CompositeRule::new(r_lo, r_hi, 64, 8);
    let mut acc = 0.0;
    for &(c, p, a, q) in &f.terms {
        // ∫ s^p e^{-s²/wt²} ds
        let time = if p % 2 == 1 { 0.0 } else { statrs_gamma((p as f64 + 1.0) / 2.0) * f.wt.powi(p as i32 + 1) };
        let ang = sphere_moment(a);
        if time == 0.0 || ang == 0.0 {
            continue;
        }
        let deg = 2 + a.iter().sum::<u32>() as i32 + q;
        let radial = rule.integrate(|r| r.powi(deg) * (-((r - f.r0) / f.wr).powi(2)).exp());
        acc += c * time * ang * radial;
    }
    acc
}

/// `Tr ε` is the divergence of a compactly supported field exactly when `∫ Tr ε = 0`.
pub fn gx_obstruction(eps: &TensorPoly, tolerance: f64) -> Result<ObstructionVerdict> {
    let r = divergence_residual(eps);
    if r > 1e-6 {
        return Err(Error::Precondition(format!("source is not divergence-free: residual {r:e}")));
    }
    let integral_value = integrate_gaussian_polynomial(&eps.trace());
    Ok(ObstructionVerdict { coexact: integral_value.abs() < tolerance, integral_value, tolerance })
}

/// The same test applied to a scalar directly, for traces that need not come from a
/// divergence-free source.
pub fn classify_trace(tr: &GaussianPolynomial, tolerance: f64) -> ObstructionVerdict {
    let integral_value = integrate_gaussian_polynomial(tr);
    ObstructionVerdict { coexact: integral_value.abs() < tolerance, integral_value, tolerance }
}

/// A compactly supported field `v` with backward-difference divergence equal to `f`, built
/// axis by axis: `f = ∂_0 A + φ(t) F₁` with `F₁ = ∫ f dt`, then recursing on `F₁`.
/// Fails unless the total integral vanishes, which is what leaves the last layer zero.
pub fn coexact_primitive(f: &GridField, tolerance: f64) -> Result<[GridField; 4]> {
    let h = f.h;
    let mut out: [GridField; 4] = std::array::from_fn(|_| f.zero_like());
    let mut rest = f.data.clone();
    for axis in 0..4 {
        let s = f.strides()[axis];
        let len = f.n[axis];
        let mid = len / 2;
        let mut next = vec![0.0; rest.len()];
        for base in (0..rest.len()).filter(|i| (i / s) % len == 0) {
            let total: f64 = (0..len).map(|k| rest[base + k * s]).sum::<f64>() * h;
            let mut run = 0.0;
            for k in 0..len {
                let idx = base + k * s;
                let spike = if k == mid { total / h } else { 0.0 };
                run += (rest[idx] - spike) * h;
                out[axis].data[idx] = run;
            }
            next[base + mid * s] = total / h;
        }
        rest = next;
    }
    let integral = rest.iter().sum::<f64>() * h.powi(4);
    if integral.abs() > tolerance {
        return Err(Error::Precondition(format!("integral {integral:e} is not zero; no compact primitive")));
    }
    Ok(out)
}

/// Backward-difference divergence `Σ_a (v_a[i] - v_a[i - e_a]) / h`.
pub fn backward_divergence(v: &[GridField; 4]) -> GridField {
    let mut out = v[0].zero_like();
    for (axis, f) in v.iter().enumerate() {
        let s = f.strides()[axis];
        for idx in 0..f.data.len() {
            let k = (idx / s) % f.n[axis];
            let prev = if k == 0 { 0.0 } else { f.data[idx - s] };
            out.data[idx] += (f.data[idx] - prev) / f.h;
        }
    }
    out
}

/// Weak form of `div ∘ I ∘ G⁺_P̃ = G⁺_□ ∘ div` on a contravariant source `ε`, tested against a
/// covector `w`. With `G⁺_P̃ = I ∘ G⁺_□` componentwise, the left side is
/// `-Σ_ab ⟨I(I ∇_S w)_ab, G⁺ ε^{ab}⟩` and the right side `Σ_b ⟨w_b, G⁺ (∂_a ε^{ab})⟩`.
/// Returns both sides and the sum of the magnitudes of all pairings entering them.
pub fn divergence_intertwining(
    eps: &TensorPoly,
    w: &GaugeTransformation<GaussianPolynomial>,
    cfg: &crate::propagation::PropagationConfig,
) -> Result<(f64, f64, f64)> {
    use crate::propagation::pair_retarded;
    let mut scale = 0.0;
    let grad = trace_reversal(&trace_reversal(&symmetrized_gradient(w)));
    let mut lhs = 0.0;
    for a in 0..4 {
        for b in a..4 {
            let src = eps.get(a, b);
            let test = grad.get(a, b);
            if src.is_zero() || test.is_zero() {
                continue;
            }
            let mult = if a == b { 1.0 } else { 2.0 };
            let v = mult * pair_retarded(&src.to_modes(), &test.to_modes(), cfg)?.value.re;
            lhs -= v;
            scale += v.abs();
        }
    }
    let mut rhs = 0.0;
    for (b, d) in eps.divergence().iter().enumerate() {
        if d.is_zero() || w.chi[b].is_zero() {
            continue;
        }
        let v = pair_retarded(&d.to_modes(), &w.chi[b].to_modes(), cfg)?.value.re;
        rhs += v;
        scale += v.abs();
    }
    Ok((lhs, rhs, scale))
}

// ---------------------------------------------------------------------------------------------
// bi-distributions

/// `(I Ω₂)(ε, ζ) = Ω₂(ε, ζ) - (1/8) Ω₂(η⁻¹ Tr ε, η⁻¹ Tr ζ)`.
pub fn trace_reversal_bidist<F, W>(omega2: W, eps: &Sym2<F>, zeta: &Sym2<F>) -> Result<Complex64>
where
    F: Smooth,
    W: Fn(&Sym2<F>, &Sym2<F>) -> Result<Complex64>,
{
    let direct = omega2(eps, zeta)?;
    let te = Sym2::pure_trace(&trace(eps));
    let tz = Sym2::pure_trace(&trace(zeta));
    Ok(direct - omega2(&te, &tz)? / 8.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_is_reversed_to_minus_eta() {
        let e = Sym2::pure_trace(&Polynomial::constant(1.0));
        assert_eq!(trace_reversal(&e), e.scale(-1.0));
        assert!(linearized_einstein(&e).unwrap().size() == 0.0);
    }

    #[test]
    fn gradient_of_position_is_eta() {
        let chi = GaugeTransformation { chi: (0..4).map(|a| Polynomial::coordinate(a).scale(eta(a, a))).collect() };
        assert_eq!(symmetrized_gradient(&chi), Sym2::pure_trace(&Polynomial::constant(1.0)));
    }

    #[test]
    fn gaussian_moments() {
        let g = GaussianPolynomial::new(0.3, 0.5, 0.0, 0.7).with_term(1.0, 0, [0, 0, 0], 0);
        let exact = std::f64::consts::PI.sqrt() * 0.5 * (std::f64::consts::PI.sqrt() * 0.7).powi(3);
        assert!((integrate_gaussian_polynomial(&g) - exact).abs() < 1e-12 * exact);
        assert!((statrs_gamma(2.5) - 1.329_340_388_179_137).abs() < 1e-14);
    }
}
