//! The BMS-invariant two-point functions on null infinity, the Minkowski vacuum as an
//! independent momentum-space oracle, and the BMS group with its action on boundary data.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{BoundaryFunction, BoundaryTensor, ModeKey, ModeTestFunction, RadialProfile, UProfile};
use crate::harmonics::{spherical_bessel, spin_ylm, ylm, SphereRule};
use crate::quad::{extrapolation_weights, CompositeRule};
use crate::report::{CheckRecord, VerificationReport};

const C0: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryKernelConfig {
    /// strictly decreasing regularization parameters
    pub epsilon: Vec<f64>,
    /// upper frequency; `None` picks it from the data
    pub omega_max: Option<f64>,
    /// Gauss-Legendre order per frequency panel
    pub order: usize,
    /// relative agreement required between the two routes
    pub route_tolerance: f64,
}

impl Default for BoundaryKernelConfig {
    fn default() -> Self {
        Self { epsilon: vec![0.04, 0.02, 0.01, 0.005], omega_max: None, order: 8, route_tolerance: 1e-4 }
    }
}

impl BoundaryKernelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon.len() < 2 {
            return Err(Error::Config("at least two regularization levels are needed".into()));
        }
        if self.epsilon.iter().any(|e| !(*e > 0.0)) || self.epsilon.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("epsilon levels must be positive and strictly decreasing".into()));
        }
        if self.order < 2 || !(self.route_tolerance > 0.0) {
            return Err(Error::Config("invalid quadrature order or route tolerance".into()));
        }
        Ok(())
    }
}

/// A two-point value with both routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointValue {
    pub value: Complex64,
    pub regularized: Complex64,
    pub frequency: Complex64,
    /// `sqrt(ω₂(ψ,ψ) ω₂(χ,χ))`, the Cauchy-Schwarz bound, used as the agreement scale
    pub scale: f64,
    /// observed convergence order in `ε` of the regularized sequence
    pub observed_order: f64,
}

impl TwoPointValue {
    pub fn route_gap(&self) -> f64 {
        (self.regularized - self.frequency).norm() / self.scale.max(1e-300)
    }
}

// ---------------------------------------------------------------------------------------------
// frequency route

fn bandwidth(p: &UProfile) -> f64 {
    let mut w: f64 = 0.0;
    for t in &p.terms {
        // |ψ̂| ~ ω^p e^{-ω² w² / 4}; e^{-x²/4} < 1e-16 beyond x = 12.2
        w = w.max((12.2 + 0.5 * t.p as f64) / t.w);
    }
    for g in &p.grids {
        w = w.max(std::f64::consts::PI / g.du);
    }
    w
}

fn pairs<'a>(psi: &'a BoundaryFunction, chi: &'a BoundaryFunction) -> Vec<(&'a UProfile, &'a UProfile)> {
    psi.modes.iter().filter_map(|(k, p)| chi.modes.get(k).map(|q| (p, q))).collect()
}

/// Spectrum-limited upper frequency for the grids: the largest ω where any transform is
/// still above `1e-9` of its peak, searched on a coarse grid.
fn effective_cutoff(profiles: &[&UProfile], cap: f64) -> f64 {
    let mut cut: f64 = 4.0;
    for p in profiles {
        if p.grids.is_empty() {
            cut = cut.max(bandwidth(p).min(cap));
            continue;
        }
        let n = 200;
        let vals: Vec<f64> = (0..=n).map(|k| p.fourier(cap * k as f64 / n as f64).norm()).collect();
        let peak = vals.iter().cloned().fold(0.0, f64::max);
        if let Some(k) = vals.iter().rposition(|v| *v > 1e-9 * peak) {
            cut = cut.max(cap * ((k + 1).min(n)) as f64 / n as f64);
        }
    }
    cut.min(cap)
}

/// `(1/π) Σ_lm ∫_0^Ω ω conj(ψ̂_lm) χ̂_lm dω` plus the two diagonal values.
pub fn omega2_frequency(psi: &BoundaryFunction, chi: &BoundaryFunction, cfg: &BoundaryKernelConfig) -> (Complex64, f64, f64) {
    let all: Vec<&UProfile> = psi.modes.values().chain(chi.modes.values()).collect();
    if all.is_empty() {
        return (C0, 0.0, 0.0);
    }
    let cap = all.iter().map(|p| bandwidth(p)).fold(0.0, f64::max);
    let omega = cfg.omega_max.unwrap_or_else(|| effective_cutoff(&all, cap));
    let panels = ((omega / 0.25).ceil() as usize).max(8);
    let rule = CompositeRule::new(0.0, omega, panels, cfg.order);
    let keys: Vec<ModeKey> = psi.modes.keys().chain(chi.modes.keys()).cloned().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let mut cross = C0;
    let mut dpsi = 0.0;
    let mut dchi = 0.0;
    for k in keys {
        let p = psi.modes.get(&k);
        let q = chi.modes.get(&k);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let a = p.map_or(C0, |p| p.fourier(*x));
            let b = q.map_or(C0, |q| q.fourier(*x));
            cross += a.conj() * b * (x * w);
            dpsi += a.norm_sqr() * x * w;
            dchi += b.norm_sqr() * x * w;
        }
    }
    let pi = std::f64::consts::PI;
    (cross / pi, dpsi / pi, dchi / pi)
}

// ---------------------------------------------------------------------------------------------
// regularized route

fn support_union(psi: &BoundaryFunction, chi: &BoundaryFunction) -> Option<(f64, f64)> {
    let (a, b) = psi.support();
    let (c, d) = chi.support();
    let lo = a.min(c);
    let hi = b.max(d);
    (hi > lo).then_some((lo, hi))
}

/// `-(1/π) ∫ ds C(s) / (s - iε)²` for each `ε`, with `C(s) = Σ_lm ∫ conj ψ_lm(u) χ_lm(u - s) du`.
pub fn omega2_regularized_levels(psi: &BoundaryFunction, chi: &BoundaryFunction, eps: &[f64]) -> Vec<Complex64> {
    let Some((lo, hi)) = support_union(psi, chi) else { return vec![C0; eps.len()] };
    let e_min = eps.iter().cloned().fold(f64::INFINITY, f64::min);
    // trapezoid error in s is ~ exp(-2π ε / Δ)
    let delta = e_min / 8.0;
    let n = ((hi - lo) / delta).ceil() as usize + 1;
    let size = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut acc = vec![C0; size];
    for (p, q) in pairs(psi, chi) {
        let mut a: Vec<Complex64> = (0..size).map(|k| if k < n { p.eval(lo + k as f64 * delta) } else { C0 }).collect();
        let mut b: Vec<Complex64> = (0..size).map(|k| if k < n { q.eval(lo + k as f64 * delta) } else { C0 }).collect();
        fwd.process(&mut a);
        fwd.process(&mut b);
        for k in 0..size {
            // correlation Σ_k conj(a_k) b_{k-j}: spectrum conj(A) B evaluated at the mirrored lag
            acc[k] += a[k].conj() * b[k];
        }
    }
    inv.process(&mut acc);
    // acc[j] = size · Σ_k conj(a_k) b_{k+j}; lag s = u - u' = -jΔ
    let norm = delta / size as f64;
    let mut c_of_s: Vec<(f64, Complex64)> = Vec::with_capacity(2 * n);
    for j in 0..size {
        let jj = if j < size / 2 { j as isize } else { j as isize - size as isize };
        if jj.unsigned_abs() >= n {
            continue;
        }
        c_of_s.push((-(jj as f64) * delta, acc[j] * norm));
    }
    let pi = std::f64::consts::PI;
    eps.iter()
        .map(|&e| {
            let mut s = C0;
            for &(x, c) in &c_of_s {
                let d = Complex64::new(x, -e);
                s += c / (d * d);
            }
            -s * delta / pi
        })
        .collect()
}

/// Richardson extrapolation of the regularized sequence to `ε = 0`, with the observed order.
pub fn omega2_regularized(psi: &BoundaryFunction, chi: &BoundaryFunction, cfg: &BoundaryKernelConfig) -> (Complex64, f64) {
    let levels = omega2_regularized_levels(psi, chi, &cfg.epsilon);
    let w = extrapolation_weights(&cfg.epsilon);
    let value: Complex64 = levels.iter().zip(&w).map(|(v, w)| v * *w).sum();
    let order = if levels.len() >= 3 {
        let d1 = (levels[0] - levels[1]).norm();
        let d2 = (levels[1] - levels[2]).norm();
        let ratio = cfg.epsilon[0] / cfg.epsilon[1];
        if d1 > 0.0 && d2 > 0.0 {
            (d1 / d2).ln() / ratio.ln()
        } else {
            f64::NAN
        }
    } else {
        f64::NAN
    };
    (value, order)
}

/// `ω_{2,ℐ}(ψ, χ)`, accepted only when both routes agree.
pub fn omega2_scri_scalar(psi: &BoundaryFunction, chi: &BoundaryFunction, cfg: &BoundaryKernelConfig) -> Result<TwoPointValue> {
    cfg.validate()?;
    if psi.is_zero() || chi.is_zero() {
        return Ok(TwoPointValue { value: C0, regularized: C0, frequency: C0, scale: 0.0, observed_order: f64::NAN });
    }
    let (freq, dp, dc) = omega2_frequency(psi, chi, cfg);
    let (reg, order) = omega2_regularized(psi, chi, cfg);
    let v = TwoPointValue { value: freq, regularized: reg, frequency: freq, scale: (dp * dc).sqrt(), observed_order: order };
    if v.route_gap() > cfg.route_tolerance {
        return Err(Error::RouteDisagreement { regularized: reg, frequency: freq });
    }
    Ok(v)
}

/// Tensor two-point function: twice the sum over the electric and magnetic channels.
pub fn omega2_scri_tensor(lam: &BoundaryTensor, mu: &BoundaryTensor, cfg: &BoundaryKernelConfig) -> Result<TwoPointValue> {
    let a = omega2_scri_scalar(&lam.plus, &mu.plus, cfg)?;
    let b = omega2_scri_scalar(&lam.cross, &mu.cross, cfg)?;
    let out = TwoPointValue {
        value: (a.value + b.value) * 2.0,
        regularized: (a.regularized + b.regularized) * 2.0,
        frequency: (a.frequency + b.frequency) * 2.0,
        scale: 2.0 * (a.scale + b.scale),
        observed_order: a.observed_order.min(b.observed_order),
    };
    Ok(out)
}

// ---------------------------------------------------------------------------------------------
// Minkowski vacuum

/// `F_lm(κ) = ∫ dt e^{iκt} ∫ r² dr j_l(κ r) f_lm(t, r)`.
fn on_shell_transform(p: &RadialProfile, l: u32, kappa: f64) -> Complex64 {
    let mut acc = C0;
    for t in &p.terms {
        let s = t.support();
        let rule = CompositeRule::new(s.r_min, s.r_max, 24, 8);
        let radial = rule.integrate(|r| r * r * spherical_bessel(l, kappa * r) * t.radial_factor(r));
        acc += t.amplitude() * t.time_transform(kappa) * radial;
    }
    for g in &p.grids {
        let s = g.support();
        let rt = CompositeRule::new(s.t_min, s.t_max, ((s.t_max - s.t_min) / g.dt).ceil() as usize, 4);
        let rr = CompositeRule::new(0.0, s.r_max, ((s.r_max) / g.dr).ceil() as usize, 4);
        acc += rt.integrate_c(|t| {
            Complex64::from_polar(1.0, kappa * t) * rr.integrate_c(|r| g.eval(t, r) * (r * r * spherical_bessel(l, kappa * r)))
        });
    }
    acc
}

fn vacuum_cutoff(f: &ModeTestFunction) -> f64 {
    let mut k: f64 = 4.0;
    for p in f.modes.values() {
        for t in &p.terms {
            k = k.max((12.2 + 0.5 * t.tp as f64) / t.wt);
        }
        for g in &p.grids {
            k = k.max(std::f64::consts::PI / g.dt.min(g.dr));
        }
    }
    k
}

/// Massless vacuum two-point function `(1/π) Σ_lm ∫ κ dκ conj(F_lm(κ)) G_lm(κ)`.
pub fn minkowski_vacuum_two_point(f: &ModeTestFunction, g: &ModeTestFunction) -> Result<Complex64> {
    let kmax = vacuum_cutoff(f).min(vacuum_cutoff(g));
    let compute = |panels: usize| -> Complex64 {
        let rule = CompositeRule::new(0.0, kmax, panels, 8);
        let mut acc = C0;
        for (&(l, m), p) in &f.modes {
            let Some(q) = g.modes.get(&(l, m)) else { continue };
            acc += rule.integrate_c(|k| on_shell_transform(p, l, k).conj() * on_shell_transform(q, l, k) * k);
        }
        acc / std::f64::consts::PI
    };
    let panels = ((kmax / 0.5).ceil() as usize).max(8);
    let a = compute(panels);
    let b = compute(2 * panels);
    if (a - b).norm() > 1e-6 * b.norm().max(1e-12) {
        return Err(Error::Quadrature(format!("vacuum momentum integral unstable: {a} vs {b}")));
    }
    Ok(b)
}

// ---------------------------------------------------------------------------------------------
// BMS group

/// `SL(2, C)` element acting on `z` by `(az + b)/(cz + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sl2c {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Sl2c {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self { a: one, b: C0, c: C0, d: one }
    }

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let m = Self { a, b, c, d };
        if (m.det() - 1.0).norm() > 1e-12 {
            return Err(Error::Precondition(format!("det = {} is not 1", m.det())));
        }
        Ok(m)
    }

    /// Rescales an arbitrary invertible matrix to unit determinant.
    pub fn normalized(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-14 {
            return Err(Error::Precondition("singular matrix".into()));
        }
        let s = det.sqrt().inv();
        Self::new(a * s, b * s, c * s, d * s)
    }

    pub fn boost(s: f64) -> Self {
        Self { a: Complex64::new(s, 0.0), b: C0, c: C0, d: Complex64::new(1.0 / s, 0.0) }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Sl2c) -> Sl2c {
        Sl2c {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Sl2c {
        Sl2c { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let one = Complex64::new(1.0, 0.0);
        let plus = (self.a - one).norm() + (self.d - one).norm();
        let minus = (self.a + one).norm() + (self.d + one).norm();
        plus.min(minus) + self.b.norm() + self.c.norm() < tol
    }

    pub fn mobius(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        if den.norm() < 1e-300 {
            return Err(Error::MobiusPole(z));
        }
        Ok((self.a * z + self.b) / den)
    }

    fn spinor(&self, s: [Complex64; 2]) -> [Complex64; 2] {
        [self.a * s[0] + self.b * s[1], self.c * s[0] + self.d * s[1]]
    }

    /// Image direction and `K_Λ` at a direction, through the spinor `(cos(θ/2) e^{iφ}, sin(θ/2))`
    /// of `z = e^{iφ} cot(θ/2)`; regular everywhere on the sphere.
    pub fn act_direction(&self, theta: f64, phi: f64) -> (f64, f64, f64) {
        let s = [Complex64::from_polar((0.5 * theta).cos(), phi), Complex64::new((0.5 * theta).sin(), 0.0)];
        let t = self.spinor(s);
        let n0 = s[0].norm_sqr() + s[1].norm_sqr();
        let n1 = t[0].norm_sqr() + t[1].norm_sqr();
        let th = 2.0 * t[1].norm().atan2(t[0].norm());
        let mut ph = t[0].arg() - t[1].arg();
        if ph < 0.0 {
            ph += 2.0 * std::f64::consts::PI;
        }
        (th, ph, n0 / n1)
    }
}

/// `K_Λ(z) = (1 + |z|²) / (|az + b|² + |cz + d|²)`.
pub fn kappa_lambda(lam: &Sl2c, z: Complex64) -> Result<f64> {
    if (lam.c * z + lam.d).norm() < 1e-300 {
        return Err(Error::MobiusPole(z));
    }
    Ok((1.0 + z.norm_sqr()) / ((lam.a * z + lam.b).norm_sqr() + (lam.c * z + lam.d).norm_sqr()))
}

/// One summand `c(M z) / K_M(z)` of a supertranslation, `c` given by harmonic coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaTerm {
    pub coeffs: BTreeMap<ModeKey, Complex64>,
    pub frame: Sl2c,
    pub sign: f64,
}

impl AlphaTerm {
    fn eval(&self, theta: f64, phi: f64) -> f64 {
        let (th, ph, k) = self.frame.act_direction(theta, phi);
        let v: Complex64 = self.coeffs.iter().map(|(&(l, m), c)| c * ylm(l, m, th, ph)).sum();
        self.sign * v.re / k
    }
}

/// `(Λ, α) ∈ SL(2, C) ⋉ C∞(S²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BMSElement {
    pub lambda: Sl2c,
    pub alpha: Vec<AlphaTerm>,
}

impl BMSElement {
    pub fn identity() -> Self {
        Self { lambda: Sl2c::identity(), alpha: vec![] }
    }

    /// Pure supertranslation; the coefficients must describe a real function.
    pub fn supertranslation(coeffs: BTreeMap<ModeKey, Complex64>) -> Result<Self> {
        let g = Self { lambda: Sl2c::identity(), alpha: vec![AlphaTerm { coeffs, frame: Sl2c::identity(), sign: 1.0 }] };
        g.validate()?;
        Ok(g)
    }

    pub fn lorentz(lambda: Sl2c) -> Self {
        Self { lambda, alpha: vec![] }
    }

    pub fn validate(&self) -> Result<()> {
        if (self.lambda.det() - 1.0).norm() > 1e-12 {
            return Err(Error::Precondition(format!("det Λ = {}", self.lambda.det())));
        }
        for t in &self.alpha {
            for (&(l, m), c) in &t.coeffs {
                let s = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let partner = t.coeffs.get(&(l, -m)).copied().unwrap_or(C0);
                if (partner - c.conj() * s).norm() > 1e-12 * (1.0 + c.norm()) {
                    return Err(Error::Precondition(format!("α coefficient ({l},{m}) violates reality")));
                }
            }
        }
        Ok(())
    }

    pub fn alpha_at(&self, theta: f64, phi: f64) -> f64 {
        self.alpha.iter().map(|t| t.eval(theta, phi)).sum()
    }

    /// Harmonic coefficients of `α` up to `l_max` by sphere quadrature.
    pub fn alpha_coefficients(&self, l_max: u32) -> BTreeMap<ModeKey, Complex64> {
        let rule = SphereRule::for_degree(2 * l_max as usize + 8);
        crate::fields::analyze_sphere(l_max, &rule, |th, ph| Complex64::new(self.alpha_at(th, ph), 0.0))
    }

    pub fn is_pure_supertranslation(&self) -> bool {
        self.lambda.is_identity(1e-14)
    }

    /// Checks `g ≈ identity` on a probe grid.
    pub fn is_identity(&self, tol: f64) -> bool {
        if !self.lambda.is_identity(tol) {
            return false;
        }
        SphereRule::new(6, 10).nodes().all(|(th, ph, _)| self.alpha_at(th, ph).abs() < tol)
    }
}

/// `(Λ₁, α₁)(Λ₂, α₂) = (Λ₁Λ₂, α₂ + (α₁ ∘ Λ₂) / K_{Λ₂})`.
pub fn bms_compose(g1: &BMSElement, g2: &BMSElement) -> BMSElement {
    let mut alpha = g2.alpha.clone();
    for t in &g1.alpha {
        alpha.push(AlphaTerm { coeffs: t.coeffs.clone(), frame: t.frame.mul(&g2.lambda), sign: t.sign });
    }
    BMSElement { lambda: g1.lambda.mul(&g2.lambda), alpha }
}

/// `(Λ, α)⁻¹ = (Λ⁻¹, -(α ∘ Λ⁻¹) K_Λ ∘ Λ⁻¹)`.
pub fn bms_inverse(g: &BMSElement) -> BMSElement {
    let inv = g.lambda.inverse();
    let alpha = g
        .alpha
        .iter()
        .map(|t| AlphaTerm { coeffs: t.coeffs.clone(), frame: t.frame.mul(&inv), sign: -t.sign })
        .collect();
    BMSElement { lambda: inv, alpha }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionOptions {
    /// power of `K_Λ` multiplying the data
    pub weight: f64,
    /// apply the Möbius motion of the sphere and the `u`-rescaling as well
    pub rotate: bool,
    /// harmonic cutoff of the re-projected data
    pub l_out: u32,
    /// output `u` spacing
    pub du: f64,
}

impl Default for ActionOptions {
    fn default() -> Self {
        Self { weight: -1.0, rotate: false, l_out: 12, du: 1.0 / 32.0 }
    }
}

/// Sample grid of the transformed data: nodes, per-node `(K, α, θ', φ')`, and the `u` grid.
struct ActionGrid {
    nodes: Vec<(f64, f64, f64)>,
    maps: Vec<(f64, f64, f64, f64)>,
    lo: f64,
    n: usize,
}

fn action_grid(g: &BMSElement, support: (f64, f64), opts: &ActionOptions) -> ActionGrid {
    let rule = SphereRule::for_degree(2 * opts.l_out as usize + 4);
    let nodes: Vec<(f64, f64, f64)> = rule.nodes().collect();
    let maps: Vec<(f64, f64, f64, f64)> = nodes
        .iter()
        .map(|&(th, ph, _)| {
            let a = g.alpha_at(th, ph);
            if opts.rotate {
                let (t2, p2, k) = g.lambda.act_direction(th, ph);
                (k, a, t2, p2)
            } else {
                let (_, _, k) = g.lambda.act_direction(th, ph);
                (k, a, th, ph)
            }
        })
        .collect();
    // preimage of the data support: K (u + α) ∈ [lo, hi] (K = 1 without rotation)
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(k, a, _, _) in &maps {
        let s = if opts.rotate { k } else { 1.0 };
        lo = lo.min(support.0 / s - a);
        hi = hi.max(support.1 / s - a);
    }
    let lo = (lo / opts.du).floor() * opts.du - opts.du;
    let n = ((hi - lo) / opts.du).ceil() as usize + 3;
    ActionGrid { nodes, maps, lo, n }
}

/// `Π_g ψ (u, z) = K_Λ(z)^w ψ(u + α(z), z)` (displayed action), or with `rotate`
/// `K_Λ(z)^w ψ(K_Λ(z)(u + α(z)), Λz)`; re-projected to `l <= l_out`.
pub fn bms_act(g: &BMSElement, psi: &BoundaryFunction, opts: &ActionOptions) -> Result<BoundaryFunction> {
    g.validate()?;
    if psi.is_zero() {
        return Ok(BoundaryFunction::zero());
    }
    if g.alpha.is_empty() && g.lambda == Sl2c::identity() {
        return Ok(psi.clone());
    }
    let grid = action_grid(g, psi.support(), opts);
    let keys_in: Vec<ModeKey> = psi.modes.keys().cloned().collect();
    let keys_out = crate::fields::mode_keys(opts.l_out);
    let mut out: Vec<Vec<Complex64>> = vec![vec![C0; grid.n]; keys_out.len()];
    for (&(th, ph, w), &(k, a, th2, ph2)) in grid.nodes.iter().zip(&grid.maps) {
        let y_in: Vec<Complex64> = keys_in.iter().map(|&(l, m)| ylm(l, m, th2, ph2)).collect();
        let y_out: Vec<Complex64> = keys_out.iter().map(|&(l, m)| ylm(l, m, th, ph).conj() * w).collect();
        let amp = k.powf(opts.weight);
        let scale_u = if opts.rotate { k } else { 1.0 };
        for iu in 0..grid.n {
            let u = grid.lo + iu as f64 * opts.du;
            let uu = scale_u * (u + a);
            let mut v = C0;
            for (key, y) in keys_in.iter().zip(&y_in) {
                v += psi.modes[key].eval(uu) * y;
            }
            let v = v * amp;
            if v == C0 {
                continue;
            }
            for (o, y) in out.iter_mut().zip(&y_out) {
                o[iu] += v * y;
            }
        }
    }
    let peak = out.iter().flat_map(|o| o.iter().map(|v| v.norm())).fold(0.0, f64::max);
    let mut modes = BTreeMap::new();
    for (key, vals) in keys_out.into_iter().zip(out) {
        if vals.iter().any(|v| v.norm() > 1e-15 * peak) {
            modes.insert(key, UProfile::sampled(grid.lo, opts.du, vals));
        }
    }
    Ok(BoundaryFunction { modes })
}

/// Action on the spin-2 field `m^a m^b λ_ab` with `K_Λ^w` and the displayed `u`-shift.
/// The Möbius motion of the sphere is not available for tensors: it needs a frame rotation.
pub fn bms_act_tensor(g: &BMSElement, lam: &BoundaryTensor, opts: &ActionOptions) -> Result<BoundaryTensor> {
    g.validate()?;
    if opts.rotate {
        return Err(Error::Precondition("the sphere motion is implemented for scalar data only".into()));
    }
    if lam.is_zero() {
        return Ok(BoundaryTensor::default());
    }
    let (a0, a1) = lam.plus.support();
    let (b0, b1) = lam.cross.support();
    let grid = action_grid(g, (a0.min(b0), a1.max(b1)), opts);
    let keys_out: Vec<ModeKey> = crate::fields::mode_keys(opts.l_out).into_iter().filter(|k| k.0 >= 2).collect();
    let mut out: BTreeMap<ModeKey, Vec<Complex64>> = keys_out.iter().map(|k| (*k, vec![C0; grid.n])).collect();
    for (&(th, ph, w), &(k, a, _, _)) in grid.nodes.iter().zip(&grid.maps) {
        let y_out: Vec<Complex64> = keys_out.iter().map(|&(l, m)| spin_ylm(2, l, m, th, ph).conj() * w).collect();
        let amp = k.powf(opts.weight);
        for iu in 0..grid.n {
            let u = grid.lo + iu as f64 * opts.du;
            let v = lam.spin2_value(u + a, th, ph) * amp;
            if v == C0 {
                continue;
            }
            for (key, y) in keys_out.iter().zip(&y_out) {
                out.get_mut(key).expect("key")[iu] += v * y;
            }
        }
    }
    BoundaryTensor::from_spin2_samples(grid.lo, opts.du, &out)
}

/// Which two-point function an invariance check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Scalar,
    Tensor,
}

/// Test pairs for [`check_bms_invariance`].
pub enum InvarianceSuite<'a> {
    Scalar(&'a [(BoundaryFunction, BoundaryFunction)]),
    Tensor(&'a [(BoundaryTensor, BoundaryTensor)]),
}

/// `|ω₂(Π_g ψ, Π_g χ) - ω₂(ψ, χ)| / |ω₂(ψ, χ)|` over a suite.
pub fn check_bms_invariance(
    g: &BMSElement,
    suite: InvarianceSuite,
    cfg: &BoundaryKernelConfig,
    opts: &ActionOptions,
    tolerance: f64,
) -> VerificationReport {
    let mut report = VerificationReport::new("bms-invariance");
    let anchor = "the unique BMS invariant state";
    let mut run = |idx: usize, f: &mut dyn FnMut() -> Result<(Complex64, Complex64, f64)>| {
        let start = std::time::Instant::now();
        let rec = CheckRecord::new(format!("pair {idx}"), anchor, tolerance);
        let rec = match f() {
            Ok((before, after, gap)) => {
                let dev = (after - before).norm() / before.norm().max(1e-300);
                rec.value("before_re", before.re)
                    .value("before_im", before.im)
                    .value("after_re", after.re)
                    .value("after_im", after.im)
                    .value("route_gap", gap)
                    .judge(dev)
            }
            Err(e) => rec.failed(e),
        };
        let mut rec = rec;
        rec.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        report.push(rec);
    };
    match suite {
        InvarianceSuite::Scalar(pairs) => {
            for (i, (p, q)) in pairs.iter().enumerate() {
                run(i, &mut || {
                    let before = omega2_scri_scalar(p, q, cfg)?;
                    let after = omega2_scri_scalar(&bms_act(g, p, opts)?, &bms_act(g, q, opts)?, cfg)?;
                    Ok((before.value, after.value, after.route_gap().max(before.route_gap())))
                });
            }
        }
        InvarianceSuite::Tensor(pairs) => {
            for (i, (p, q)) in pairs.iter().enumerate() {
                run(i, &mut || {
                    let before = omega2_scri_tensor(p, q, cfg)?;
                    let after = omega2_scri_tensor(&bms_act_tensor(g, p, opts)?, &bms_act_tensor(g, q, opts)?, cfg)?;
                    Ok((before.value, after.value, after.route_gap().max(before.route_gap())))
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::UTerm;

    fn gauss(p: u32) -> BoundaryFunction {
        BoundaryFunction::single(0, 0, UProfile::gaussian(vec![UTerm::new(1.0, 0.0, 1.0, p)]))
    }

    #[test]
    fn gaussian_two_point_is_one() {
        let v = omega2_scri_scalar(&gauss(0), &gauss(0), &BoundaryKernelConfig::default()).unwrap();
        assert!((v.value - 1.0).norm() < 1e-10, "{v:?}");
        assert!((v.regularized - 1.0).norm() < 1e-5, "{v:?}");
    }

    #[test]
    fn antisymmetric_part_is_boundary_form() {
        let cfg = BoundaryKernelConfig::default();
        let a = omega2_scri_scalar(&gauss(0), &gauss(1), &cfg).unwrap().value;
        let b = omega2_scri_scalar(&gauss(1), &gauss(0), &cfg).unwrap().value;
        let sigma = (std::f64::consts::PI / 2.0).sqrt();
        assert!(((a - b) - Complex64::new(0.0, sigma)).norm() < 1e-9, "{a} {b}");
    }

    #[test]
    fn kappa_examples() {
        let z = Complex64::new(0.3, -1.2);
        assert!((kappa_lambda(&Sl2c::identity(), z).unwrap() - 1.0).abs() < 1e-15);
        assert!((kappa_lambda(&Sl2c::boost(2.0), C0).unwrap() - 4.0).abs() < 1e-15);
        let pole = Sl2c::new(C0, Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), C0).unwrap();
        assert!(matches!(kappa_lambda(&pole, C0), Err(Error::MobiusPole(_))));
    }

    #[test]
    fn spinor_kappa_matches_formula() {
        let m = Sl2c::normalized(
            Complex64::new(1.1, 0.2),
            Complex64::new(0.3, -0.4),
            Complex64::new(-0.2, 0.1),
            Complex64::new(0.9, 0.5),
        )
        .unwrap();
        let (th, ph) = (1.1, 2.3);
        let z = crate::geometry::to_stereographic(th, ph).unwrap();
        let (t2, p2, k) = m.act_direction(th, ph);
        assert!((k - kappa_lambda(&m, z).unwrap()).abs() < 1e-13);
        let w = crate::geometry::to_stereographic(t2, p2).unwrap();
        assert!((w - m.mobius(z).unwrap()).norm() < 1e-12);
    }
}
