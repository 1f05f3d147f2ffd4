//! The four bilinear pairings: bulk σ, boundary σ_ℐ, the gravity forms τ and τ_ℐ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{l2_norms, sym_index, BoundaryFunction, BoundaryTensor, ModeTestFunction, TensorField, TensorPoly, UProfile};
use crate::propagation::{retarded_run, Estimate, PropagationConfig};
use crate::quad::CompositeRule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingValue {
    pub value: f64,
    pub estimated_error: f64,
    pub method: String,
}

impl PairingValue {
    fn from_estimate(e: Estimate, method: &str) -> Self {
        Self { value: e.value.re, estimated_error: e.error + e.value.im.abs(), method: method.into() }
    }

    pub fn zero(method: &str) -> Self {
        Self { value: 0.0, estimated_error: 0.0, method: method.into() }
    }
}

/// `∫ E(f) g dμ` (bilinear), computed as `∫ f E⁺g - ∫ g E⁺f`.
pub fn sigma_bulk_complex(f: &ModeTestFunction, g: &ModeTestFunction, cfg: &PropagationConfig) -> Result<Estimate> {
    if f.is_zero() || g.is_zero() {
        return Ok(Estimate::zero());
    }
    let fg = retarded_run(g, false, &[f], cfg)?.pairings[0];
    let gf = retarded_run(f, false, &[g], cfg)?.pairings[0];
    Ok(fg - gf)
}

pub fn sigma_bulk(f: &ModeTestFunction, g: &ModeTestFunction, cfg: &PropagationConfig) -> Result<PairingValue> {
    Ok(PairingValue::from_estimate(sigma_bulk_complex(f, g, cfg)?, "bulk adjoint pairing, null lattice h and h/2"))
}

fn sign_m(m: i32) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `∫ du F(ψ_lm, χ_lm)` over the union of supports with an error estimate from panel doubling.
fn integrate_pair<F>(p: &UProfile, q: &UProfile, f: F) -> Estimate
where
    F: Fn(&UProfile, &UProfile, f64) -> Complex64,
{
    let (a0, a1) = p.support();
    let (b0, b1) = q.support();
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    if !(hi > lo) {
        return Estimate::zero();
    }
    let step = p.grids.iter().chain(&q.grids).map(|g| g.du).fold(0.1f64, f64::min);
    let panels = (((hi - lo) / step).ceil() as usize).max(16);
    let coarse = CompositeRule::new(lo, hi, panels, 6).integrate_c(|u| f(p, q, u));
    let fine = CompositeRule::new(lo, hi, 2 * panels, 6).integrate_c(|u| f(p, q, u));
    Estimate { value: fine, error: (fine - coarse).norm() }
}

/// Bilinear boundary form `∫ du dΩ (ψ ∂_u χ - χ ∂_u ψ)`, mode by mode.
pub fn sigma_scri_complex(psi: &BoundaryFunction, chi: &BoundaryFunction) -> Estimate {
    let mut acc = Estimate::zero();
    for (&(l, m), q) in &chi.modes {
        let Some(p) = psi.modes.get(&(l, -m)) else { continue };
        let e = integrate_pair(p, q, |p, q, u| p.eval(u) * q.derivative(u) - q.eval(u) * p.derivative(u));
        acc = acc + Estimate { value: e.value * sign_m(m), error: e.error };
    }
    acc
}

pub fn sigma_scri(psi: &BoundaryFunction, chi: &BoundaryFunction) -> Result<PairingValue> {
    if psi.is_zero() || chi.is_zero() {
        return Ok(PairingValue::zero("boundary mode sum"));
    }
    l2_norms(psi)?;
    l2_norms(chi)?;
    Ok(PairingValue::from_estimate(sigma_scri_complex(psi, chi), "boundary mode sum"))
}

/// `∫ (λ_ab ∂_u μ_cd - μ_ab ∂_u λ_cd) q^ac q^bd`, reduced to twice the sum of the channel forms.
pub fn tau_scri(lam: &BoundaryTensor, mu: &BoundaryTensor) -> Result<PairingValue> {
    if lam.is_zero() || mu.is_zero() {
        return Ok(PairingValue::zero("boundary spin-2 channels"));
    }
    for f in [&lam.plus, &lam.cross, &mu.plus, &mu.cross] {
        if !f.is_zero() {
            l2_norms(f)?;
        }
    }
    let e = sigma_scri_complex(&lam.plus, &mu.plus) + sigma_scri_complex(&lam.cross, &mu.cross);
    Ok(PairingValue::from_estimate(Estimate { value: e.value * 2.0, error: 2.0 * e.error }, "boundary spin-2 channels"))
}

/// `Σ_ab ∫ E((I ε♭)_ab) ζ^{ab} dμ` for contravariant mode-represented tensors.
pub fn tau_bulk_fields(eps: &TensorField, zeta: &TensorField, cfg: &PropagationConfig) -> Result<Estimate> {
    let src = eps.flat().trace_reversed();
    let mut acc = Estimate::zero();
    for a in 0..4 {
        for b in a..4 {
            let k = sym_index(a, b);
            let mult = if a == b { 1.0 } else { 2.0 };
            let e = sigma_bulk_complex(&src.comps[k], &zeta.comps[k], cfg)?;
            acc = acc + Estimate { value: e.value * mult, error: e.error * mult };
        }
    }
    Ok(acc)
}

/// Largest `|∂_a ε^{ab}|` relative to the largest component value, sampled on the support.
pub fn divergence_residual(eps: &TensorPoly) -> f64 {
    let div = eps.divergence();
    let env = &eps.comps[0];
    let reach = env.r0 + 5.5 * env.wr;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let n = 7;
    for it in 0..n {
        let t = env.t0 + env.wt * (-2.5 + 5.0 * it as f64 / (n - 1) as f64);
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..n {
                    let c = |k: usize| reach * (-1.0 + 2.0 * k as f64 / (n - 1) as f64) * 0.77;
                    let x = [t, c(ix), c(iy), c(iz)];
                    for d in &div {
                        worst = worst.max(d.eval(x).abs());
                    }
                    for comp in &eps.comps {
                        scale = scale.max(comp.eval(x).abs());
                    }
                }
            }
        }
    }
    worst / scale.max(1e-300)
}

/// Gravity form on divergence-free Gaussian-polynomial tensors.
pub fn tau_bulk(eps: &TensorPoly, zeta: &TensorPoly, cfg: &PropagationConfig) -> Result<PairingValue> {
    for (name, t) in [("first", eps), ("second", zeta)] {
        let r = divergence_residual(t);
        if r > 1e-6 {
            return Err(Error::Precondition(format!("{name} argument not divergence-free: residual {r:e}")));
        }
    }
    let e = tau_bulk_fields(&eps.to_field(), &zeta.to_field(), cfg)?;
    Ok(PairingValue::from_estimate(e, "bulk adjoint pairing of trace-reversed components"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::UTerm;

    fn gauss(p: u32) -> BoundaryFunction {
        BoundaryFunction::single(0, 0, UProfile::gaussian(vec![UTerm::new(1.0, 0.0, 1.0, p)]))
    }

    #[test]
    fn gaussian_example() {
        let v = sigma_scri(&gauss(0), &gauss(1)).unwrap();
        assert!((v.value - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-10);
        assert_eq!(sigma_scri(&gauss(1), &gauss(1)).unwrap().value, 0.0);
    }

    #[test]
    fn tensor_plus_example() {
        let lift = |p| BoundaryFunction::single(2, 0, UProfile::gaussian(vec![UTerm::new(1.0, 0.0, 1.0, p)]));
        let a = BoundaryTensor::new(lift(0), BoundaryFunction::zero()).unwrap();
        let b = BoundaryTensor::new(lift(1), BoundaryFunction::zero()).unwrap();
        let v = tau_scri(&a, &b).unwrap();
        assert!((v.value - 2.0 * (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-10);
        let c = BoundaryTensor::new(BoundaryFunction::zero(), lift(1)).unwrap();
        assert_eq!(tau_scri(&a, &c).unwrap().value, 0.0);
    }
}
