//! Bulk test functions and boundary data.
//!
//! Bulk scalars are stored as spherical-harmonic mode profiles `f_lm(t, r)`; boundary data on
//! null infinity as `u`-profiles `ψ_lm(u)`. Both are finite linear combinations of Gaussian
//! terms (closed-form transforms) and sampled grids (cubic interpolation).

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{ylm, SphereRule};
use crate::quad::{catmull_rom_weights, gaussian_moment_transform, CompositeRule, UniformSpline};

/// Relative tail level treated as numerical compactness.
pub const TAIL: f64 = 1e-12;

const C0: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub type ModeKey = (u32, i32);

/// All `(l, m)` with `l <= l_max`.
pub fn mode_keys(l_max: u32) -> Vec<ModeKey> {
    (0..=l_max).flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m))).collect()
}

fn sign_m(m: i32) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Half-width `X` (in units of the Gaussian width) beyond which `x^p exp(-x²)` stays below
/// `TAIL` times its maximum.
fn tail_extent(p: f64) -> f64 {
    let peak_x = (0.5 * p.max(0.0)).sqrt();
    let log_peak = if p > 0.0 { p * peak_x.ln() - peak_x * peak_x } else { 0.0 };
    let target = log_peak + TAIL.ln();
    let mut x = peak_x.max(1.0);
    while (if p > 0.0 { p * x.ln() } else { 0.0 }) - x * x > target {
        x += 0.01;
    }
    x
}

// ---------------------------------------------------------------------------------------------
// bulk profiles

/// `a (t-t0)^tp r^rp exp(-((t-t0)/wt)²) exp(-((r-r0)/wr)²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianTerm {
    pub a: f64,
    #[serde(default)]
    pub ai: f64,
    pub t0: f64,
    pub wt: f64,
    pub r0: f64,
    pub wr: f64,
    #[serde(default)]
    pub tp: u32,
    #[serde(default)]
    pub rp: i32,
}

impl GaussianTerm {
    pub fn new(a: f64, t0: f64, wt: f64, r0: f64, wr: f64) -> Self {
        Self { a, ai: 0.0, t0, wt, r0, wr, tp: 0, rp: 0 }
    }

    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.a, self.ai)
    }

    pub fn time_factor(&self, t: f64) -> f64 {
        let s = t - self.t0;
        s.powi(self.tp as i32) * (-(s / self.wt).powi(2)).exp()
    }

    pub fn radial_factor(&self, r: f64) -> f64 {
        r.powi(self.rp) * (-((r - self.r0) / self.wr).powi(2)).exp()
    }

    pub fn eval(&self, t: f64, r: f64) -> Complex64 {
        let x = (t - self.t0) / self.wt;
        let y = (r - self.r0) / self.wr;
        if x.abs() > 40.0 || y.abs() > 40.0 {
            return C0;
        }
        self.amplitude() * self.time_factor(t) * self.radial_factor(r)
    }

    /// `∫ dt e^{iωt} (time factor)` in closed form.
    pub fn time_transform(&self, omega: f64) -> Complex64 {
        Complex64::from_polar(self.wt.powi(self.tp as i32 + 1), omega * self.t0)
            * gaussian_moment_transform(self.tp, omega * self.wt)
    }

    pub fn support(&self) -> Support {
        let xt = tail_extent(self.tp as f64);
        // radial extent, searched directly because of the r^rp factor
        let peak = {
            let mut best: f64 = 0.0;
            let hi = self.r0 + 10.0 * self.wr + 10.0;
            let n = 4000;
            for k in 0..=n {
                let r = hi * k as f64 / n as f64;
                if r > 0.0 || self.rp >= 0 {
                    best = best.max(self.radial_factor(r).abs());
                }
            }
            best
        };
        let mut r_max = self.r0.max(0.0) + self.wr;
        while self.radial_factor(r_max).abs() > TAIL * peak {
            r_max += 0.01 * self.wr;
        }
        let mut r_min = self.r0.min(r_max);
        while r_min > 0.0 && self.radial_factor(r_min).abs() > TAIL * peak {
            r_min -= 0.01 * self.wr;
        }
        Support {
            t_min: self.t0 - xt * self.wt,
            t_max: self.t0 + xt * self.wt,
            r_min: r_min.max(0.0),
            r_max,
        }
    }
}

/// Rectangle in `(t, r)` outside of which a profile is numerically zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub t_min: f64,
    pub t_max: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl Support {
    pub fn empty() -> Self {
        Self { t_min: f64::INFINITY, t_max: f64::NEG_INFINITY, r_min: f64::INFINITY, r_max: 0.0 }
    }

    pub fn is_empty(&self) -> bool {
        self.t_min > self.t_max
    }

    pub fn union(&self, o: &Support) -> Support {
        Support {
            t_min: self.t_min.min(o.t_min),
            t_max: self.t_max.max(o.t_max),
            r_min: self.r_min.min(o.r_min),
            r_max: self.r_max.max(o.r_max),
        }
    }

    pub fn contains(&self, t: f64, r: f64) -> bool {
        t >= self.t_min && t <= self.t_max && r >= self.r_min && r <= self.r_max
    }

    /// True when no point of `self` can be joined to a point of `o` by a causal curve, both
    /// being spherical shells about the spatial origin.
    pub fn causally_disjoint_shells(&self, o: &Support) -> bool {
        let gap_r = (self.r_min - o.r_max).max(o.r_min - self.r_max);
        let max_dt = (self.t_max - o.t_min).abs().max((o.t_max - self.t_min).abs());
        gap_r > 0.0 && max_dt < gap_r
    }
}

/// Uniform `(t, r)` grid with bicubic interpolation; `r` starts at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledProfile {
    pub t_min: f64,
    pub dt: f64,
    pub nt: usize,
    pub dr: f64,
    pub nr: usize,
    /// row-major `[it * nr + ir]`
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// parity of the profile under `r -> -r`, used next to the axis
    pub parity: f64,
}

impl SampledProfile {
    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(
        t_min: f64,
        dt: f64,
        nt: usize,
        dr: f64,
        nr: usize,
        parity: f64,
        f: F,
    ) -> Self {
        let mut re = Vec::with_capacity(nt * nr);
        let mut im = Vec::with_capacity(nt * nr);
        for it in 0..nt {
            for ir in 0..nr {
                let v = f(t_min + it as f64 * dt, ir as f64 * dr);
                re.push(v.re);
                im.push(v.im);
            }
        }
        Self { t_min, dt, nt, dr, nr, re, im, parity }
    }

    fn at(&self, it: isize, ir: isize) -> Complex64 {
        if it < 0 || it >= self.nt as isize {
            return C0;
        }
        let (ir, sgn) = if ir < 0 { (-ir, self.parity) } else { (ir, 1.0) };
        if ir >= self.nr as isize {
            return C0;
        }
        let k = it as usize * self.nr + ir as usize;
        Complex64::new(self.re[k], self.im[k]) * sgn
    }

    pub fn eval(&self, t: f64, r: f64) -> Complex64 {
        let st = (t - self.t_min) / self.dt;
        let sr = r / self.dr;
        if st < -1.0 || st > self.nt as f64 || sr > self.nr as f64 {
            return C0;
        }
        let it = st.floor();
        let ir = sr.floor();
        let wt = catmull_rom_weights(st - it);
        let wr = catmull_rom_weights(sr - ir);
        let (it, ir) = (it as isize, ir as isize);
        let mut acc = C0;
        for (a, wa) in wt.iter().enumerate() {
            for (b, wb) in wr.iter().enumerate() {
                acc += self.at(it - 1 + a as isize, ir - 1 + b as isize) * (wa * wb);
            }
        }
        acc
    }

    pub fn support(&self) -> Support {
        Support {
            t_min: self.t_min - self.dt,
            t_max: self.t_min + self.nt as f64 * self.dt,
            r_min: 0.0,
            r_max: self.nr as f64 * self.dr,
        }
    }

    fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for k in 0..self.re.len() {
            let v = Complex64::new(self.re[k], self.im[k]) * c;
            out.re[k] = v.re;
            out.im[k] = v.im;
        }
        out
    }
}

/// Radial-temporal profile `f_lm(t, r)`: Gaussian terms plus sampled grids.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    #[serde(default)]
    pub terms: Vec<GaussianTerm>,
    #[serde(default)]
    pub grids: Vec<SampledProfile>,
}

impl RadialProfile {
    pub fn gaussian(terms: Vec<GaussianTerm>) -> Self {
        Self { terms, grids: vec![] }
    }

    pub fn sampled(grid: SampledProfile) -> Self {
        Self { terms: vec![], grids: vec![grid] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.a == 0.0 && t.ai == 0.0)
            && self.grids.iter().all(|g| g.re.iter().chain(&g.im).all(|v| *v == 0.0))
    }

    pub fn is_parametric(&self) -> bool {
        self.grids.is_empty()
    }

    pub fn eval(&self, t: f64, r: f64) -> Complex64 {
        let mut v: Complex64 = self.terms.iter().map(|g| g.eval(t, r)).sum();
        for g in &self.grids {
            v += g.eval(t, r);
        }
        v
    }

    pub fn support(&self) -> Support {
        let mut s = Support::empty();
        for t in &self.terms {
            if t.a != 0.0 || t.ai != 0.0 {
                s = s.union(&t.support());
            }
        }
        for g in &self.grids {
            s = s.union(&g.support());
        }
        s
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let a = t.amplitude() * c;
                    GaussianTerm { a: a.re, ai: a.im, ..t.clone() }
                })
                .collect(),
            grids: self.grids.iter().map(|g| g.scaled(c)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|t| GaussianTerm { ai: -t.ai, ..t.clone() }).collect(),
            grids: self
                .grids
                .iter()
                .map(|g| SampledProfile { im: g.im.iter().map(|v| -v).collect(), ..g.clone() })
                .collect(),
        }
    }

    pub fn shifted(&self, dt: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|t| GaussianTerm { t0: t.t0 + dt, ..t.clone() }).collect(),
            grids: self.grids.iter().map(|g| SampledProfile { t_min: g.t_min + dt, ..g.clone() }).collect(),
        }
    }

    /// Time reversal `t -> -t`.
    pub fn reversed(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let s = if t.tp % 2 == 0 { 1.0 } else { -1.0 };
                GaussianTerm { t0: -t.t0, a: s * t.a, ai: s * t.ai, ..t.clone() }
            })
            .collect();
        let grids = self
            .grids
            .iter()
            .map(|g| {
                let mut out = g.clone();
                out.t_min = -(g.t_min + (g.nt - 1) as f64 * g.dt);
                for it in 0..g.nt {
                    for ir in 0..g.nr {
                        let src = (g.nt - 1 - it) * g.nr + ir;
                        out.re[it * g.nr + ir] = g.re[src];
                        out.im[it * g.nr + ir] = g.im[src];
                    }
                }
                out
            })
            .collect();
        Self { terms, grids }
    }

    pub fn add(&self, o: &RadialProfile) -> Self {
        let mut terms: Vec<GaussianTerm> = Vec::with_capacity(self.terms.len() + o.terms.len());
        for t in self.terms.iter().chain(&o.terms) {
            let same = |u: &&mut GaussianTerm| {
                (u.t0, u.wt, u.r0, u.wr, u.tp, u.rp) == (t.t0, t.wt, t.r0, t.wr, t.tp, t.rp)
            };
            match terms.iter_mut().find(|u| same(u)) {
                Some(u) => {
                    u.a += t.a;
                    u.ai += t.ai;
                }
                None => terms.push(t.clone()),
            }
        }
        terms.retain(|t| t.a != 0.0 || t.ai != 0.0);
        let mut grids = self.grids.clone();
        grids.extend(o.grids.iter().cloned());
        Self { terms, grids }
    }
}

/// Bulk scalar test function `f = Σ f_lm(t, r) Y_lm`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeTestFunction {
    pub modes: BTreeMap<ModeKey, RadialProfile>,
    pub real: bool,
}

impl ModeTestFunction {
    pub fn zero() -> Self {
        Self { modes: BTreeMap::new(), real: true }
    }

    pub fn single(l: u32, m: i32, profile: RadialProfile) -> Self {
        let mut modes = BTreeMap::new();
        modes.insert((l, m), profile);
        Self { modes, real: m == 0 }
    }

    /// Builds a real function from the `m >= 0` profiles, filling `m < 0` by conjugation.
    pub fn real_from_nonnegative(modes: BTreeMap<ModeKey, RadialProfile>) -> Self {
        let mut out = BTreeMap::new();
        for ((l, m), p) in modes {
            if m < 0 {
                continue;
            }
            if m > 0 {
                out.insert((l, -m), p.conj().scaled(Complex64::new(sign_m(m), 0.0)));
            }
            out.insert((l, m), p);
        }
        Self { modes: out, real: true }
    }

    pub fn l_max(&self) -> u32 {
        self.modes.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.modes.values().all(|p| p.is_zero())
    }

    pub fn mode(&self, l: u32, m: i32) -> Option<&RadialProfile> {
        self.modes.get(&(l, m))
    }

    pub fn eval_mode(&self, l: u32, m: i32, t: f64, r: f64) -> Complex64 {
        self.modes.get(&(l, m)).map_or(C0, |p| p.eval(t, r))
    }

    /// `Σ f_lm(t, r) Y_lm(θ, φ)`.
    pub fn synthesize_complex(&self, t: f64, r: f64, theta: f64, phi: f64) -> Complex64 {
        self.modes.iter().map(|(&(l, m), p)| p.eval(t, r) * ylm(l, m, theta, phi)).sum()
    }

    /// Real part of the synthesis (the value itself for real test functions).
    pub fn synthesize(&self, t: f64, r: f64, theta: f64, phi: f64) -> f64 {
        self.synthesize_complex(t, r, theta, phi).re
    }

    /// Largest deviation from `c_{l,-m} = (-1)^m conj(c_lm)` at the given probe points.
    pub fn reality_violation(&self, probes: &[(f64, f64)]) -> f64 {
        let mut worst: f64 = 0.0;
        for (&(l, m), p) in &self.modes {
            for &(t, r) in probes {
                let mirror = self.eval_mode(l, -m, t, r).conj() * sign_m(m);
                worst = worst.max((p.eval(t, r) - mirror).norm());
            }
        }
        worst
    }

    pub fn support(&self) -> Support {
        self.modes.values().fold(Support::empty(), |s, p| s.union(&p.support()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            modes: self.modes.iter().map(|(k, p)| (*k, p.scaled(Complex64::new(c, 0.0)))).collect(),
            real: self.real,
        }
    }

    pub fn scaled_complex(&self, c: Complex64) -> Self {
        Self {
            modes: self.modes.iter().map(|(k, p)| (*k, p.scaled(c))).collect(),
            real: self.real && c.im == 0.0,
        }
    }

    pub fn add(&self, o: &ModeTestFunction) -> Self {
        let mut modes = self.modes.clone();
        for (k, p) in &o.modes {
            let e = modes.entry(*k).or_default();
            *e = e.add(p);
        }
        Self { modes, real: self.real && o.real }
    }

    /// `f(t - dt, x)`.
    pub fn shifted(&self, dt: f64) -> Self {
        Self { modes: self.modes.iter().map(|(k, p)| (*k, p.shifted(dt))).collect(), real: self.real }
    }

    /// `f(-t, x)`.
    pub fn reversed(&self) -> Self {
        Self { modes: self.modes.iter().map(|(k, p)| (*k, p.reversed())).collect(), real: self.real }
    }

    /// Integral of `|f|` over space-time, estimated on the support box; used as a scale.
    pub fn l2_norm(&self) -> f64 {
        let s = self.support();
        if s.is_empty() {
            return 0.0;
        }
        let rt = CompositeRule::new(s.t_min, s.t_max, 24, 6);
        let rr = CompositeRule::new(s.r_min, s.r_max, 24, 6);
        let mut acc = 0.0;
        for p in self.modes.values() {
            acc += rt.integrate(|t| rr.integrate(|r| r * r * p.eval(t, r).norm_sqr()));
        }
        acc.sqrt()
    }
}

/// Projects a function on the sphere onto `Y_lm`, `l <= l_max`.
pub fn analyze_sphere<F: Fn(f64, f64) -> Complex64>(
    l_max: u32,
    rule: &SphereRule,
    f: F,
) -> BTreeMap<ModeKey, Complex64> {
    let keys = mode_keys(l_max);
    let mut out: BTreeMap<ModeKey, Complex64> = keys.iter().map(|k| (*k, C0)).collect();
    for (theta, phi, w) in rule.nodes() {
        let v = f(theta, phi) * w;
        for &(l, m) in &keys {
            *out.get_mut(&(l, m)).unwrap() += ylm(l, m, theta, phi).conj() * v;
        }
    }
    out
}

// ---------------------------------------------------------------------------------------------
// boundary data

/// `a (u-u0)^p exp(-((u-u0)/w)²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UTerm {
    pub a: f64,
    #[serde(default)]
    pub ai: f64,
    pub u0: f64,
    pub w: f64,
    #[serde(default)]
    pub p: u32,
}

impl UTerm {
    pub fn new(a: f64, u0: f64, w: f64, p: u32) -> Self {
        Self { a, ai: 0.0, u0, w, p }
    }

    fn amplitude(&self) -> Complex64 {
        Complex64::new(self.a, self.ai)
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        let s = (u - self.u0) / self.w;
        if s.abs() > 40.0 {
            return C0;
        }
        self.amplitude() * (u - self.u0).powi(self.p as i32) * (-s * s).exp()
    }

    pub fn derivative(&self, u: f64) -> Complex64 {
        let d = u - self.u0;
        let s = d / self.w;
        if s.abs() > 40.0 {
            return C0;
        }
        let poly = if self.p == 0 { 0.0 } else { self.p as f64 * d.powi(self.p as i32 - 1) };
        self.amplitude() * (poly - 2.0 * d / (self.w * self.w) * d.powi(self.p as i32)) * (-s * s).exp()
    }

    pub fn fourier(&self, omega: f64) -> Complex64 {
        self.amplitude()
            * Complex64::from_polar(self.w.powi(self.p as i32 + 1), omega * self.u0)
            * gaussian_moment_transform(self.p, omega * self.w)
    }

    pub fn support(&self) -> (f64, f64) {
        let x = tail_extent(self.p as f64);
        (self.u0 - x * self.w, self.u0 + x * self.w)
    }
}

/// One `u`-profile: Gaussian terms plus sampled splines.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct UProfile {
    #[serde(default)]
    pub terms: Vec<UTerm>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grids: Vec<SampledU>,
}

/// Uniformly sampled `u`-profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampledU {
    pub u_min: f64,
    pub du: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    #[serde(skip)]
    spline: Option<UniformSpline>,
}

impl SampledU {
    pub fn new(u_min: f64, du: f64, values: Vec<Complex64>) -> Self {
        let re = values.iter().map(|v| v.re).collect();
        let im = values.iter().map(|v| v.im).collect();
        Self { u_min, du, re, im, spline: Some(UniformSpline::new(u_min, du, values)) }
    }

    fn spline(&self) -> UniformSpline {
        match &self.spline {
            Some(s) => s.clone(),
            None => UniformSpline::new(
                self.u_min,
                self.du,
                self.re.iter().zip(&self.im).map(|(a, b)| Complex64::new(*a, *b)).collect(),
            ),
        }
    }

    fn ensure(&mut self) {
        if self.spline.is_none() {
            self.spline = Some(self.spline());
        }
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        match &self.spline {
            Some(s) => s.eval(u),
            None => self.spline().eval(u),
        }
    }

    pub fn derivative(&self, u: f64) -> Complex64 {
        match &self.spline {
            Some(s) => s.derivative(u),
            None => self.spline().derivative(u),
        }
    }

    pub fn u_max(&self) -> f64 {
        self.u_min + self.du * (self.re.len().saturating_sub(1)) as f64
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.re.iter().zip(&self.im).map(|(a, b)| Complex64::new(*a, *b)).collect()
    }

    /// Exact transform of the interpolating spline.
    pub fn fourier(&self, omega: f64) -> Complex64 {
        match &self.spline {
            Some(s) => s.fourier(omega),
            None => self.spline().fourier(omega),
        }
    }
}

impl PartialEq for SampledU {
    fn eq(&self, o: &Self) -> bool {
        self.u_min == o.u_min && self.du == o.du && self.re == o.re && self.im == o.im
    }
}

impl PartialEq for UProfile {
    fn eq(&self, o: &Self) -> bool {
        self.terms == o.terms && self.grids == o.grids
    }
}

impl UProfile {
    pub fn gaussian(terms: Vec<UTerm>) -> Self {
        Self { terms, grids: vec![] }
    }

    pub fn sampled(u_min: f64, du: f64, values: Vec<Complex64>) -> Self {
        Self { terms: vec![], grids: vec![SampledU::new(u_min, du, values)] }
    }

    pub fn is_parametric(&self) -> bool {
        self.grids.is_empty()
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(u)).sum::<Complex64>()
            + self.grids.iter().map(|g| g.eval(u)).sum::<Complex64>()
    }

    pub fn derivative(&self, u: f64) -> Complex64 {
        self.terms.iter().map(|t| t.derivative(u)).sum::<Complex64>()
            + self.grids.iter().map(|g| g.derivative(u)).sum::<Complex64>()
    }

    /// `∫ du e^{iωu} ψ(u)`.
    pub fn fourier(&self, omega: f64) -> Complex64 {
        self.terms.iter().map(|t| t.fourier(omega)).sum::<Complex64>()
            + self.grids.iter().map(|g| g.fourier(omega)).sum::<Complex64>()
    }

    pub fn support(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for t in &self.terms {
            if t.a != 0.0 || t.ai != 0.0 {
                let (a, b) = t.support();
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        for g in &self.grids {
            lo = lo.min(g.u_min);
            hi = hi.max(g.u_max());
        }
        (lo, hi)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.a == 0.0 && t.ai == 0.0)
            && self.grids.iter().all(|g| g.re.iter().chain(&g.im).all(|v| *v == 0.0))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let a = t.amplitude() * c;
                    UTerm { a: a.re, ai: a.im, ..t.clone() }
                })
                .collect(),
            grids: self
                .grids
                .iter()
                .map(|g| SampledU::new(g.u_min, g.du, g.values().iter().map(|v| v * c).collect()))
                .collect(),
        }
    }

    pub fn shifted(&self, du: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|t| UTerm { u0: t.u0 + du, ..t.clone() }).collect(),
            grids: self
                .grids
                .iter()
                .map(|g| SampledU::new(g.u_min + du, g.du, g.values()))
                .collect(),
        }
    }

    pub fn add(&self, o: &UProfile) -> Self {
        let mut out = self.clone();
        out.terms.extend(o.terms.iter().cloned());
        out.grids.extend(o.grids.iter().cloned());
        out
    }

    /// Samples the profile on a uniform grid covering `[lo, hi]`.
    pub fn sample(&self, lo: f64, du: f64, n: usize) -> Vec<Complex64> {
        (0..n).map(|k| self.eval(lo + k as f64 * du)).collect()
    }

    pub(crate) fn prepare(&mut self) {
        for g in &mut self.grids {
            g.ensure();
        }
    }
}

/// Radiation data `ψ(u, θ, φ) = Σ ψ_lm(u) Y_lm(θ, φ)` on null infinity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFunction {
    pub modes: BTreeMap<ModeKey, UProfile>,
}

impl BoundaryFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(l: u32, m: i32, profile: UProfile) -> Self {
        let mut modes = BTreeMap::new();
        modes.insert((l, m), profile);
        Self { modes }
    }

    /// Builds a real function from the `m >= 0` profiles.
    pub fn real_from_nonnegative(modes: BTreeMap<ModeKey, UProfile>) -> Self {
        let mut out = BTreeMap::new();
        for ((l, m), p) in modes {
            if m < 0 {
                continue;
            }
            if m > 0 {
                let c = p.scaled(Complex64::new(sign_m(m), 0.0));
                let conj = UProfile {
                    terms: c.terms.iter().map(|t| UTerm { ai: -t.ai, ..t.clone() }).collect(),
                    grids: c
                        .grids
                        .iter()
                        .map(|g| SampledU::new(g.u_min, g.du, g.values().iter().map(|v| v.conj()).collect()))
                        .collect(),
                };
                out.insert((l, -m), conj);
            }
            out.insert((l, m), p);
        }
        Self { modes: out }
    }

    pub fn is_zero(&self) -> bool {
        self.modes.values().all(|p| p.is_zero())
    }

    pub fn l_max(&self) -> u32 {
        self.modes.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn eval(&self, u: f64, theta: f64, phi: f64) -> Complex64 {
        self.modes.iter().map(|(&(l, m), p)| p.eval(u) * ylm(l, m, theta, phi)).sum()
    }

    pub fn eval_mode(&self, l: u32, m: i32, u: f64) -> Complex64 {
        self.modes.get(&(l, m)).map_or(C0, |p| p.eval(u))
    }

    pub fn support(&self) -> (f64, f64) {
        self.modes.values().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            let (a, b) = p.support();
            (lo.min(a), hi.max(b))
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.scaled_complex(Complex64::new(c, 0.0))
    }

    pub fn scaled_complex(&self, c: Complex64) -> Self {
        Self { modes: self.modes.iter().map(|(k, p)| (*k, p.scaled(c))).collect() }
    }

    pub fn add(&self, o: &BoundaryFunction) -> Self {
        let mut modes = self.modes.clone();
        for (k, p) in &o.modes {
            let e = modes.entry(*k).or_default();
            *e = e.add(p);
        }
        Self { modes }
    }

    pub fn shifted(&self, du: f64) -> Self {
        Self { modes: self.modes.iter().map(|(k, p)| (*k, p.shifted(du))).collect() }
    }

    pub fn prepare(&mut self) {
        for p in self.modes.values_mut() {
            p.prepare();
        }
    }
}

/// `ψ̂_lm(ω) = ∫ du e^{iωu} ψ_lm(u)`; zero for an absent mode.
pub fn fourier_u(psi: &BoundaryFunction, omega: f64, l: u32, m: i32) -> Complex64 {
    psi.modes.get(&(l, m)).map_or(C0, |p| p.fourier(omega))
}

/// `(‖ψ‖², ‖∂_u ψ‖²)` with respect to `du dΩ`, checked for stability under refinement.
pub fn l2_norms(psi: &BoundaryFunction) -> Result<(f64, f64)> {
    let compute = |panels: usize| -> (f64, f64) {
        let mut a = 0.0;
        let mut b = 0.0;
        for p in psi.modes.values() {
            let (lo, hi) = p.support();
            if !(hi > lo) {
                continue;
            }
            // one panel per spline interval at least, so sampled data integrate exactly
            let per = p.grids.iter().map(|g| ((hi - lo) / g.du).ceil() as usize).max().unwrap_or(0);
            let rule = CompositeRule::new(lo, hi, panels * per.max(1), 8);
            a += rule.integrate(|u| p.eval(u).norm_sqr());
            b += rule.integrate(|u| p.derivative(u).norm_sqr());
        }
        (a, b)
    };
    let coarse = compute(32);
    let fine = compute(64);
    for (c, f) in [(coarse.0, fine.0), (coarse.1, fine.1)] {
        if !f.is_finite() || f > 1e200 {
            return Err(Error::Membership(format!("norm not finite: {f}")));
        }
        if (c - f).abs() > 1e-6 * f.max(1e-300) + 1e-300 {
            return Err(Error::Membership(format!("norm unstable under refinement: {c} vs {f}")));
        }
    }
    Ok(fine)
}

/// Two radiative polarizations of a transverse traceless tensor on null infinity, stored as
/// electric-parity (`plus`) and magnetic-parity (`cross`) spin-2 mode channels, `l >= 2`.
///
/// With `m = (θ̂ + iφ̂)/√2` the sphere components are recovered from
/// `m^a m^b λ_ab = -Σ (E_lm + i B_lm) ₂Y_lm`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTensor {
    pub plus: BoundaryFunction,
    pub cross: BoundaryFunction,
}

impl BoundaryTensor {
    pub fn new(plus: BoundaryFunction, cross: BoundaryFunction) -> Result<Self> {
        for (name, f) in [("plus", &plus), ("cross", &cross)] {
            if let Some((l, m)) = f.modes.keys().find(|k| k.0 < 2) {
                return Err(Error::Precondition(format!("{name} channel carries mode ({l},{m}) with l < 2")));
            }
        }
        Ok(Self { plus, cross })
    }

    pub fn is_zero(&self) -> bool {
        self.plus.is_zero() && self.cross.is_zero()
    }
    /// Channels from sampled spin-2 coefficients `a_lm(u) = ∫ conj(₂Y_lm) m^a m^b λ_ab dΩ`
    /// on the grid `lo + k du`.
    pub fn from_spin2_samples(lo: f64, du: f64, a: &BTreeMap<ModeKey, Vec<Complex64>>) -> Result<Self> {
        let mut plus = BTreeMap::new();
        let mut cross = BTreeMap::new();
        let empty = Vec::new();
        for (&(l, m), am) in a {
            let an = a.get(&(l, -m)).unwrap_or(&empty);
            let s = sign_m(m);
            let other = |k: usize| an.get(k).copied().unwrap_or(C0).conj() * s;
            let e: Vec<Complex64> = am.iter().enumerate().map(|(k, x)| -(x + other(k)) * 0.5).collect();
            let b: Vec<Complex64> =
                am.iter().enumerate().map(|(k, x)| -(x - other(k)) / Complex64::new(0.0, 2.0)).collect();
            if e.iter().any(|v| v.norm() > 0.0) {
                plus.insert((l, m), UProfile::sampled(lo, du, e));
            }
            if b.iter().any(|v| v.norm() > 0.0) {
                cross.insert((l, m), UProfile::sampled(lo, du, b));
            }
        }
        Self::new(BoundaryFunction { modes: plus }, BoundaryFunction { modes: cross })
    }

    /// `m^a m^b λ_ab = p + i x` at one point.
    pub fn spin2_value(&self, u: f64, theta: f64, phi: f64) -> Complex64 {
        let (p, x) = self.polarizations(u, theta, phi);
        Complex64::new(p, x)
    }

    /// Orthonormal-frame components `(p, x)`: `λ_θ̂θ̂ = -λ_φ̂φ̂ = p`, `λ_θ̂φ̂ = x`.
    pub fn polarizations(&self, u: f64, theta: f64, phi: f64) -> (f64, f64) {
        let mut s = C0;
        for (&(l, m), p) in &self.plus.modes {
            s -= p.eval(u) * crate::harmonics::spin_ylm(2, l, m, theta, phi);
        }
        for (&(l, m), p) in &self.cross.modes {
            s -= Complex64::i() * p.eval(u) * crate::harmonics::spin_ylm(2, l, m, theta, phi);
        }
        (s.re, s.im)
    }

    pub fn shifted(&self, du: f64) -> Self {
        Self { plus: self.plus.shifted(du), cross: self.cross.shifted(du) }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { plus: self.plus.scaled(c), cross: self.cross.scaled(c) }
    }

    pub fn add(&self, o: &BoundaryTensor) -> Self {
        Self { plus: self.plus.add(&o.plus), cross: self.cross.add(&o.cross) }
    }
}

// ---------------------------------------------------------------------------------------------
// Cartesian Gaussian polynomials and tensor fields

/// `Σ c s^p x^α r^q · exp(-(s/wt)²) exp(-((r-r0)/wr)²)` with `s = t - t0`; closed under
/// partial derivatives, exactly convertible to mode profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPolynomial {
    /// `(coefficient, p, [αx, αy, αz], q)`
    pub terms: Vec<(f64, u32, [u32; 3], i32)>,
    pub t0: f64,
    pub wt: f64,
    pub r0: f64,
    pub wr: f64,
}

impl GaussianPolynomial {
    pub fn new(t0: f64, wt: f64, r0: f64, wr: f64) -> Self {
        Self { terms: vec![], t0, wt, r0, wr }
    }

    pub fn with_term(mut self, c: f64, p: u32, alpha: [u32; 3], q: i32) -> Self {
        self.terms.push((c, p, alpha, q));
        self
    }

    pub fn zero_like(&self) -> Self {
        Self { terms: vec![], ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: [f64; 4]) -> f64 {
        let s = x[0] - self.t0;
        let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
        let g = (-(s / self.wt).powi(2) - ((r - self.r0) / self.wr).powi(2)).exp();
        if g == 0.0 {
            return 0.0;
        }
        let mut v = 0.0;
        for &(c, p, a, q) in &self.terms {
            v += c
                * s.powi(p as i32)
                * x[1].powi(a[0] as i32)
                * x[2].powi(a[1] as i32)
                * x[3].powi(a[2] as i32)
                * r.powi(q);
        }
        v * g
    }

    fn simplify(mut self) -> Self {
        self.terms.sort_by(|a, b| (a.1, a.2, a.3).cmp(&(b.1, b.2, b.3)));
        let mut out: Vec<(f64, u32, [u32; 3], i32)> = Vec::new();
        for t in self.terms {
            match out.last_mut() {
                Some(last) if (last.1, last.2, last.3) == (t.1, t.2, t.3) => last.0 += t.0,
                _ => out.push(t),
            }
        }
        out.retain(|t| t.0 != 0.0);
        self.terms = out;
        self
    }

    /// Sum of two polynomials on the same envelope.
    pub fn add(&self, o: &GaussianPolynomial) -> Self {
        if self.terms.is_empty() {
            return o.clone();
        }
        if o.terms.is_empty() {
            return self.clone();
        }
        assert!(
            (self.t0, self.wt, self.r0, self.wr) == (o.t0, o.wt, o.r0, o.wr),
            "Gaussian polynomials with different envelopes cannot be added"
        );
        let mut out = self.clone();
        out.terms.extend(o.terms.iter().cloned());
        out.simplify()
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.0 *= c;
        }
        out.simplify()
    }

    /// Partial derivative along inertial axis `mu` (0 = t).
    pub fn derivative(&self, mu: usize) -> Self {
        let mut out = self.zero_like();
        let inv_wt2 = 1.0 / (self.wt * self.wt);
        let inv_wr2 = 1.0 / (self.wr * self.wr);
        for &(c, p, a, q) in &self.terms {
            if mu == 0 {
                if p > 0 {
                    out.terms.push((c * p as f64, p - 1, a, q));
                }
                out.terms.push((-2.0 * c * inv_wt2, p + 1, a, q));
                continue;
            }
            let i = mu - 1;
            if a[i] > 0 {
                let mut b = a;
                b[i] -= 1;
                out.terms.push((c * a[i] as f64, p, b, q));
            }
            let mut b = a;
            b[i] += 1;
            if q != 0 {
                out.terms.push((c * q as f64, p, b, q - 2));
            }
            // ∂_i exp(-((r-r0)/wr)²) = -(2/wr²)(x_i - r0 x_i / r) exp(...)
            out.terms.push((-2.0 * c * inv_wr2, p, b, q));
            if self.r0 != 0.0 {
                out.terms.push((2.0 * c * inv_wr2 * self.r0, p, b, q - 1));
            }
        }
        out.simplify()
    }

    /// d'Alembertian `-∂_t² + Δ`.
    pub fn box_op(&self) -> Self {
        let mut out = self.derivative(0).derivative(0).scaled(-1.0);
        for i in 1..4 {
            out = out.add(&self.derivative(i).derivative(i));
        }
        out
    }

    /// Polynomial degree in the spatial variables, an upper bound on the harmonic content.
    pub fn angular_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.2.iter().sum::<u32>()).max().unwrap_or(0)
    }

    /// Exact mode decomposition.
    pub fn to_modes(&self) -> ModeTestFunction {
        let deg = self.angular_degree();
        let rule = SphereRule::for_degree(2 * deg as usize + 2);
        let mut acc: BTreeMap<ModeKey, BTreeMap<(u32, i32), Complex64>> = BTreeMap::new();
        let mut cache: BTreeMap<[u32; 3], BTreeMap<ModeKey, Complex64>> = BTreeMap::new();
        for &(c, p, a, q) in &self.terms {
            let coeffs = cache.entry(a).or_insert_with(|| {
                analyze_sphere(a.iter().sum(), &rule, |th, ph| {
                    let n = crate::harmonics::direction(th, ph);
                    Complex64::new(
                        n[0].powi(a[0] as i32) * n[1].powi(a[1] as i32) * n[2].powi(a[2] as i32),
                        0.0,
                    )
                })
            });
            let rp = q + a.iter().sum::<u32>() as i32;
            for (&k, &v) in coeffs.iter() {
                if v.norm() > 1e-14 {
                    *acc.entry(k).or_default().entry((p, rp)).or_insert(C0) += v * c;
                }
            }
        }
        let mut modes = BTreeMap::new();
        for (k, grouped) in acc {
            let scale = grouped.values().map(|v| v.norm()).fold(0.0, f64::max);
            let gterms: Vec<GaussianTerm> = grouped
                .into_iter()
                .filter(|(_, v)| v.norm() > 1e-13 * scale)
                .map(|((p, rp), v)| GaussianTerm {
                    a: v.re,
                    ai: v.im,
                    t0: self.t0,
                    wt: self.wt,
                    r0: self.r0,
                    wr: self.wr,
                    tp: p,
                    rp,
                })
                .collect();
            if !gterms.is_empty() {
                modes.insert(k, RadialProfile::gaussian(gterms));
            }
        }
        ModeTestFunction { modes, real: true }
    }
}

/// Index of the symmetric pair `(a, b)` in the 10-component storage.
pub fn sym_index(a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * 4 - a * (a + 1) / 2 + b
}

/// Minkowski metric `η = diag(-1, 1, 1, 1)`.
pub fn eta(a: usize, b: usize) -> f64 {
    if a != b {
        0.0
    } else if a == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Symmetric 2-tensor with inertial components stored as ten scalar test functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorField {
    pub comps: Vec<ModeTestFunction>,
}

impl TensorField {
    pub fn zero() -> Self {
        Self { comps: vec![ModeTestFunction::zero(); 10] }
    }

    pub fn get(&self, a: usize, b: usize) -> &ModeTestFunction {
        &self.comps[sym_index(a, b)]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn support(&self) -> Support {
        self.comps.iter().fold(Support::empty(), |s, c| s.union(&c.support()))
    }

    /// Index lowering (or raising) with `η`.
    pub fn flat(&self) -> Self {
        let mut out = self.clone();
        for a in 0..4 {
            for b in a..4 {
                out.comps[sym_index(a, b)] = self.get(a, b).scaled(eta(a, a) * eta(b, b));
            }
        }
        out
    }

    /// Trace reversal `h - (η/2) Tr h` for covariant components.
    pub fn trace_reversed(&self) -> Self {
        let tr = (0..4).fold(ModeTestFunction::zero(), |acc, a| acc.add(&self.get(a, a).scaled(eta(a, a))));
        let mut out = self.clone();
        for a in 0..4 {
            out.comps[sym_index(a, a)] = self.get(a, a).add(&tr.scaled(-0.5 * eta(a, a)));
        }
        out
    }

    pub fn shifted(&self, dt: f64) -> Self {
        Self { comps: self.comps.iter().map(|c| c.shifted(dt)).collect() }
    }

    pub fn add(&self, o: &TensorField) -> Self {
        Self { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { comps: self.comps.iter().map(|x| x.scaled(c)).collect() }
    }
}

/// Symmetric tensor whose components are Gaussian polynomials sharing one envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorPoly {
    pub comps: Vec<GaussianPolynomial>,
}

impl TensorPoly {
    pub fn get(&self, a: usize, b: usize) -> &GaussianPolynomial {
        &self.comps[sym_index(a, b)]
    }

    pub fn to_field(&self) -> TensorField {
        TensorField { comps: self.comps.iter().map(|c| c.to_modes()).collect() }
    }

    pub fn add(&self, o: &TensorPoly) -> Self {
        Self { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { comps: self.comps.iter().map(|x| x.scaled(c)).collect() }
    }

    pub fn trace(&self) -> GaussianPolynomial {
        (0..4).fold(self.comps[0].zero_like(), |acc, a| acc.add(&self.get(a, a).scaled(eta(a, a))))
    }

    /// `∂_a ε^{ab}` for contravariant components.
    pub fn divergence(&self) -> Vec<GaussianPolynomial> {
        (0..4)
            .map(|b| (0..4).fold(self.comps[0].zero_like(), |acc, a| acc.add(&self.get(a, b).derivative(a))))
            .collect()
    }
}

// ---------------------------------------------------------------------------------------------
// text format

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModeSpec {
    l: u32,
    m: i32,
    #[serde(default)]
    terms: Vec<GaussianTerm>,
    #[serde(default)]
    grid: Option<SampledProfile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FunctionSpec {
    kind: String,
    modes: Vec<ModeSpec>,
}

impl ModeTestFunction {
    /// Parses `{kind: gaussian|grid, modes: [{l, m, terms: [{a, t0, wt, r0, wr}]}]}`.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let spec: FunctionSpec = serde_json::from_value(v.clone())?;
        if spec.kind != "gaussian" && spec.kind != "grid" {
            return Err(Error::Parse(format!("unknown test-function kind '{}'", spec.kind)));
        }
        let mut modes = BTreeMap::new();
        for ms in spec.modes {
            if ms.m.unsigned_abs() > ms.l {
                return Err(Error::Parse(format!("invalid mode ({}, {})", ms.l, ms.m)));
            }
            if ms.l > 8 {
                return Err(Error::Parse(format!("l = {} exceeds 8", ms.l)));
            }
            let mut p = RadialProfile::gaussian(ms.terms);
            if let Some(g) = ms.grid {
                if g.re.len() != g.nt * g.nr || g.im.len() != g.nt * g.nr {
                    return Err(Error::Parse("grid payload does not match its shape".into()));
                }
                p.grids.push(g);
            }
            let e: &mut RadialProfile = modes.entry((ms.l, ms.m)).or_default();
            *e = e.add(&p);
        }
        let mut f = ModeTestFunction { modes, real: false };
        let probes: Vec<(f64, f64)> = {
            let s = f.support();
            if s.is_empty() {
                vec![]
            } else {
                (0..5)
                    .flat_map(|i| {
                        (0..5).map(move |j| {
                            (
                                s.t_min + (s.t_max - s.t_min) * (i as f64 + 0.5) / 5.0,
                                s.r_min + (s.r_max - s.r_min) * (j as f64 + 0.5) / 5.0,
                            )
                        })
                    })
                    .collect()
            }
        };
        f.real = f.reality_violation(&probes) < 1e-12;
        Ok(f)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let kind = if self.modes.values().all(|p| p.is_parametric()) { "gaussian" } else { "grid" };
        let modes: Vec<ModeSpec> = self
            .modes
            .iter()
            .map(|(&(l, m), p)| ModeSpec {
                l,
                m,
                terms: p.terms.clone(),
                grid: p.grids.first().cloned(),
            })
            .collect();
        serde_json::to_value(FunctionSpec { kind: kind.into(), modes }).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn synthesize_single_monopole() {
        let f = ModeTestFunction::single(0, 0, RadialProfile::gaussian(vec![GaussianTerm::new(1.0, 0.0, 1e9, 0.0, 1e9)]));
        let v = f.synthesize(0.0, 0.0, 0.4, 0.3);
        assert!((v - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-12);
        assert_eq!(ModeTestFunction::zero().synthesize(0.3, 1.0, 0.2, 0.1), 0.0);
    }

    #[test]
    fn gaussian_transform_examples() {
        let psi = BoundaryFunction::single(0, 0, UProfile::gaussian(vec![UTerm::new(1.0, 0.0, 1.0, 0)]));
        assert!((fourier_u(&psi, 1e-12, 0, 0).re - PI.sqrt()).abs() < 1e-12);
        assert!((fourier_u(&psi, 2.0, 0, 0).re - PI.sqrt() * (-1.0f64).exp()).abs() < 1e-12);
        let shifted = psi.shifted(1.0);
        let expect = fourier_u(&psi, 1.0, 0, 0) * Complex64::from_polar(1.0, 1.0);
        assert!((fourier_u(&shifted, 1.0, 0, 0) - expect).norm() < 1e-12);
        assert_eq!(fourier_u(&psi, 1.0, 1, 0), C0);
    }

    #[test]
    fn sampled_fourier_matches_closed_form() {
        let g = UProfile::gaussian(vec![UTerm::new(1.0, 0.3, 0.7, 1)]);
        let n = 400;
        let s = UProfile::sampled(-6.0, 0.03, g.sample(-6.0, 0.03, n));
        for w in [0.5, 2.0, 5.0] {
            assert!((s.fourier(w) - g.fourier(w)).norm() < 1e-6, "ω = {w}");
        }
    }

    #[test]
    fn norms_examples() {
        let psi = BoundaryFunction::single(0, 0, UProfile::gaussian(vec![UTerm::new(1.0, 0.0, 1.0, 0)]));
        let (a, _) = l2_norms(&psi).unwrap();
        assert!((a - (PI / 2.0).sqrt()).abs() < 1e-10);
        let chi = BoundaryFunction::single(0, 0, UProfile::gaussian(vec![UTerm::new(1.0, 0.0, 1.0, 1)]));
        let (a, _) = l2_norms(&chi).unwrap();
        assert!((a - 0.25 * (PI / 2.0).sqrt()).abs() < 1e-10);
        assert_eq!(l2_norms(&BoundaryFunction::zero()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn symmetric_index_is_a_bijection() {
        let mut seen = vec![false; 10];
        for a in 0..4 {
            for b in a..4 {
                let k = sym_index(a, b);
                assert!(!seen[k]);
                seen[k] = true;
                assert_eq!(k, sym_index(b, a));
            }
        }
    }

    #[test]
    fn polynomial_modes_reproduce_direct_evaluation() {
        let p = GaussianPolynomial::new(0.2, 0.6, 0.0, 0.8)
            .with_term(1.0, 1, [1, 0, 1], 0)
            .with_term(-0.5, 0, [0, 2, 0], 0)
            .with_term(0.3, 2, [0, 0, 0], 2);
        let f = p.to_modes();
        for &(t, x, y, z) in &[(0.1, 0.3, -0.2, 0.5), (0.5, -0.7, 0.4, 0.1), (-0.2, 0.0, 0.9, -0.3)] {
            let r = (x * x + y * y + z * z as f64).sqrt();
            let (th, ph) = crate::harmonics::angles([x, y, z]);
            let direct = p.eval([t, x, y, z]);
            assert!((f.synthesize(t, r, th, ph) - direct).abs() < 1e-12, "{direct}");
        }
    }

    #[test]
    fn polynomial_derivative_matches_finite_difference() {
        let p = GaussianPolynomial::new(0.1, 0.7, 1.5, 0.4).with_term(1.0, 1, [1, 1, 0], -1).with_term(0.4, 0, [0, 0, 2], 0);
        let x = [0.2, 0.9, -0.6, 0.8];
        for mu in 0..4 {
            let d = p.derivative(mu).eval(x);
            let h = 1e-5;
            let mut xp = x;
            let mut xm = x;
            xp[mu] += h;
            xm[mu] -= h;
            let fd = (p.eval(xp) - p.eval(xm)) / (2.0 * h);
            assert!((d - fd).abs() < 1e-7 * (1.0 + d.abs()), "mu = {mu}: {d} vs {fd}");
        }
    }

    #[test]
    fn json_round_trip() {
        let v = serde_json::json!({"kind": "gaussian", "modes": [{"l": 0, "m": 0, "terms": [{"a": 1.0, "t0": 0.0, "wt": 0.5, "r0": 2.0, "wr": 0.3}]}]});
        let f = ModeTestFunction::from_json(&v).unwrap();
        assert!(f.real);
        let g = ModeTestFunction::from_json(&f.to_json()).unwrap();
        assert_eq!(f, g);
        let bad = serde_json::json!({"kind": "spline", "modes": []});
        assert!(ModeTestFunction::from_json(&bad).is_err());
    }
}
