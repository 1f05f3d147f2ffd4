//! Green operators of `□ = -∂_t² + Δ`, the causal propagator, the radiation field at future
//! null infinity and the time-slice reduction.
//!
//! Each mode `χ = r φ_lm` obeys `(-∂_t² + ∂_r² - l(l+1)/r²) χ = r f_lm` with `χ(t, 0) = 0`. It is
//! marched on a null lattice `u = t - r`, `v = t + r` with the second-order diamond scheme,
//! at two resolutions combined by Richardson extrapolation.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{
    BoundaryFunction, BoundaryTensor, ModeKey, ModeTestFunction, RadialProfile, SampledProfile, Support, TensorField, UProfile,
};
use crate::harmonics::{legendre, spin_ylm, ylm, SphereRule};
use crate::quad::{extrapolation_weights, CompositeRule};

const C0: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    Retarded,
    Advanced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    /// coarse lattice step; the fine run uses `h / 2`
    pub h: f64,
    /// relative tolerance for the radius and resolution consistency checks
    pub tolerance: f64,
    /// distance between the source support and the innermost extraction radius
    pub extraction_margin: f64,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self { h: 1.0 / 16.0, tolerance: 1e-2, extraction_margin: 0.5 }
    }
}

/// A value with an error estimate from the resolution comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    pub fn zero() -> Self {
        Self { value: C0, error: 0.0 }
    }

    fn richardson(coarse: Complex64, fine: Complex64) -> Self {
        let value = (fine * 4.0 - coarse) / 3.0;
        Self { value, error: (value - fine).norm() }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate { value: self.value + o.value, error: self.error + o.error }
    }
}

impl std::ops::Sub for Estimate {
    type Output = Estimate;
    fn sub(self, o: Estimate) -> Estimate {
        Estimate { value: self.value - o.value, error: self.error + o.error }
    }
}

/// Null lattice `u_i = u0 + i h`, `v_j = u0 + j h`, nodes `j >= i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullLattice {
    pub u0: f64,
    pub h: f64,
    pub nu: usize,
    pub nv: usize,
}

impl NullLattice {
    pub fn t_r(&self, i: usize, j: usize) -> (f64, f64) {
        let u = self.u0 + i as f64 * self.h;
        let v = self.u0 + j as f64 * self.h;
        (0.5 * (u + v), 0.5 * (v - u))
    }

    /// Fractional lattice coordinates of `(t, r)`.
    pub fn locate(&self, t: f64, r: f64) -> (f64, f64) {
        ((t - r - self.u0) / self.h, (t + r - self.u0) / self.h)
    }

    pub fn refined(&self) -> Self {
        Self { u0: self.u0, h: 0.5 * self.h, nu: 2 * self.nu - 1, nv: 2 * self.nv - 1 }
    }
}

/// Marches one mode with the diamond stencil `χ_N + χ_S = ρ_k (χ_E + χ_W) - σ_k (h²/4) r_c f_c`,
/// a second-order discretisation of `-4 ∂_u ∂_v χ - V χ = r f`, handing every completed `u`-row to `visit`.
fn march<F: FnMut(usize, &[Complex64])>(lat: &NullLattice, l: u32, src: &RadialProfile, mut visit: F) {
    let sup = src.support();
    let h = lat.h;
    let ll = (l * (l + 1)) as f64;
    // c_k = h² V_c / 16 = l(l+1) / (4k²); ρ_k = e^{-2c_k} agrees with (1-c)/(1+c) to O(c²) and
    // stays positive next to the axis, which keeps diag(ρ)·(shift sum) similar to a symmetric
    // operator with spectrum in [-2, 2]
    let coef: Vec<(f64, f64)> = (0..lat.nv.max(1))
        .map(|k| {
            let c = if k == 0 { 0.0 } else { ll / (4.0 * (k * k) as f64) };
            let rho = (-2.0 * c).exp();
            (rho, 0.5 * (1.0 + rho))
        })
        .collect();
    let mut prev = vec![C0; lat.nv];
    let mut cur = vec![C0; lat.nv];
    visit(0, &prev);
    let q = 0.25 * h * h;
    for i in 0..lat.nu.saturating_sub(1) {
        for c in cur.iter_mut().take(i + 2) {
            *c = C0;
        }
        let u_c = lat.u0 + (i as f64 + 0.5) * h;
        for j in (i + 1)..lat.nv.saturating_sub(1) {
            let k = j - i;
            let r_c = 0.5 * k as f64 * h;
            let t_c = u_c + r_c;
            let mut s = C0;
            if sup.contains(t_c, r_c) {
                s = src.eval(t_c, r_c) * (r_c * q);
            }
            let e = prev[j + 1];
            let w = cur[j];
            let (rho, sigma) = coef[k];
            cur[j + 1] = (e + w) * rho - prev[j] - s * sigma;
        }
        std::mem::swap(&mut prev, &mut cur);
        visit(i + 1, &prev);
    }
}

/// Full lattice of one mode at one resolution (retarded).
#[derive(Debug, Clone)]
pub struct ModeLattice {
    pub lattice: NullLattice,
    pub l: u32,
    /// row-major `[i * nv + j]`
    pub chi: Vec<Complex64>,
}

impl ModeLattice {
    pub fn solve(lat: NullLattice, l: u32, src: &RadialProfile) -> Self {
        let mut chi = vec![C0; lat.nu * lat.nv];
        march(&lat, l, src, |i, row| chi[i * lat.nv..(i + 1) * lat.nv].copy_from_slice(row));
        Self { lattice: lat, l, chi }
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        if i >= self.lattice.nu || j >= self.lattice.nv || j < i {
            return C0;
        }
        self.chi[i * self.lattice.nv + j]
    }

    /// `χ(t, r)` by bilinear interpolation in `(u, v)`; zero before the first ray.
    pub fn chi_at(&self, t: f64, r: f64) -> Complex64 {
        let (a, b) = self.lattice.locate(t, r);
        if a < 0.0 {
            return C0;
        }
        let (i, j) = (a.floor() as usize, b.floor() as usize);
        let (fa, fb) = (a - i as f64, b - j as f64);
        self.at(i, j) * ((1.0 - fa) * (1.0 - fb))
            + self.at(i + 1, j) * (fa * (1.0 - fb))
            + self.at(i, j + 1) * ((1.0 - fa) * fb)
            + self.at(i + 1, j + 1) * (fa * fb)
    }

    /// Largest diamond-stencil residual relative to the largest `|χ|`.
    pub fn diamond_residual(&self, src: &RadialProfile) -> f64 {
        let lat = &self.lattice;
        let h = lat.h;
        let ll = (self.l * (self.l + 1)) as f64;
        let mut worst: f64 = 0.0;
        let scale = self.chi.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        for i in 0..lat.nu - 1 {
            for j in (i + 1)..lat.nv - 1 {
                let k = (j - i) as f64;
                let r_c = 0.5 * k * h;
                let t_c = lat.u0 + (i as f64 + 0.5) * h + r_c;
                let (s, e, w, n) = (self.at(i, j), self.at(i, j + 1), self.at(i + 1, j), self.at(i + 1, j + 1));
                let rho = (-ll / (2.0 * k * k)).exp();
                let res = n + s - (e + w) * rho + src.eval(t_c, r_c) * (0.125 * (1.0 + rho) * h * h * r_c);
                worst = worst.max(res.norm());
            }
        }
        worst / scale
    }

    /// Independent `(t, r)` cross-stencil residual of `(-∂_t² + ∂_r² - V) χ - r f` at a node.
    pub fn cross_residual(&self, src: &RadialProfile, i: usize, j: usize) -> Complex64 {
        let h = self.lattice.h;
        let (t, r) = self.lattice.t_r(i, j);
        let tt = self.at(i + 1, j + 1) + self.at(i - 1, j - 1);
        let rr = self.at(i - 1, j + 1) + self.at(i + 1, j - 1);
        let lap = (rr - tt) / (h * h);
        let v = (self.l * (self.l + 1)) as f64 / (r * r);
        lap - self.at(i, j) * v - src.eval(t, r) * r
    }
}

/// Lattice extents in physical coordinates; snapped to the coarse step.
#[derive(Debug, Clone, Copy)]
struct Extent {
    u0: f64,
    u_end: f64,
    v_end: f64,
}

impl Extent {
    fn lattice(&self, h: f64) -> NullLattice {
        let nu = ((self.u_end - self.u0) / h).ceil() as usize + 2;
        let nv = ((self.v_end - self.u0) / h).ceil() as usize + 2;
        NullLattice { u0: self.u0, h, nu, nv: nv.max(nu + 1) }
    }
}

fn snap_down(x: f64, h: f64) -> f64 {
    (x / h).floor() * h
}

/// Extraction radii as multiples of `r0`.
fn extraction_multiples(l: u32) -> Vec<f64> {
    let n = (l as usize + 2).max(3);
    let mut out = vec![1.0, 2.0, 4.0];
    let mut k = 3.0;
    while out.len() < n {
        if !out.contains(&k) {
            out.push(k);
        }
        k += 1.0;
    }
    out.truncate(n);
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Work attached to one retarded run of one mode.
struct ModeTask<'a> {
    l: u32,
    src: &'a RadialProfile,
    extract: bool,
    /// partner profiles (already the matching `(l, -m)` entry with its sign)
    partners: Vec<(usize, RadialProfile)>,
    /// probe points `(t, r)` on the coarse `(t, r)` grid
    probes: &'a [(f64, f64)],
}

#[derive(Default)]
struct ModeOutcome {
    psi: Vec<Complex64>,
    psi_spread: f64,
    pairings: Vec<(usize, Estimate)>,
    /// `(χ, ∂_t χ)` per probe
    probes: Vec<(Complex64, Complex64)>,
}

fn run_level(
    lat: &NullLattice,
    coarse_h: f64,
    task: &ModeTask,
    radii: &[f64],
    psi_rows: usize,
) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>, Vec<(Complex64, Complex64)>) {
    let ratio = (coarse_h / lat.h).round() as usize;
    let offsets: Vec<usize> = radii.iter().map(|r| (2.0 * r / lat.h).round() as usize).collect();
    let inv: Vec<f64> = radii.iter().map(|r| 1.0 / r).collect();
    let w_all = extrapolation_weights(&inv);
    let w_drop = extrapolation_weights(&inv[..inv.len() - 1]);
    let mut psi = vec![C0; psi_rows];
    let mut psi_alt = vec![C0; psi_rows];
    let mut pair = vec![C0; task.partners.len()];
    let partner_sup: Vec<Support> = task.partners.iter().map(|(_, p)| p.support()).collect();
    // probe bookkeeping: lattice node (i, j) for each probe
    let probe_nodes: Vec<(usize, usize)> = task
        .probes
        .iter()
        .map(|&(t, r)| {
            let (a, b) = lat.locate(t, r);
            (a.round().max(0.0) as usize, b.round().max(0.0) as usize)
        })
        .collect();
    let mut probe_vals = vec![(C0, C0); task.probes.len()];
    let mut prev_row: Vec<Complex64> = vec![C0; lat.nv];
    let mut prev2_row: Vec<Complex64> = vec![C0; lat.nv];
    let h = lat.h;
    let mut visit = |i: usize, row: &[Complex64]| {
        if task.extract && i % ratio == 0 && i / ratio < psi_rows {
            let k = i / ratio;
            let mut a = C0;
            let mut b = C0;
            for (n, off) in offsets.iter().enumerate() {
                let v = row.get(i + off).copied().unwrap_or(C0);
                a += v * w_all[n];
                if n < w_drop.len() {
                    b += v * w_drop[n];
                }
            }
            psi[k] = -a;
            psi_alt[k] = -b;
        }
        let u = lat.u0 + i as f64 * h;
        for (n, (_, g)) in task.partners.iter().enumerate() {
            let s = &partner_sup[n];
            if s.is_empty() {
                continue;
            }
            let vlo = (u + 2.0 * s.r_min).max(2.0 * s.t_min - u);
            let vhi = (u + 2.0 * s.r_max).min(2.0 * s.t_max - u);
            if vhi < vlo {
                continue;
            }
            let jlo = (((vlo - lat.u0) / h).floor().max(i as f64)) as usize;
            let jhi = (((vhi - lat.u0) / h).ceil() as usize).min(lat.nv - 1);
            let mut acc = C0;
            for (j, chi) in row.iter().enumerate().take(jhi + 1).skip(jlo) {
                let v = lat.u0 + j as f64 * h;
                let (t, r) = (0.5 * (u + v), 0.5 * (v - u));
                acc += g.eval(t, r) * *chi * r;
            }
            pair[n] += acc * (0.5 * h * h);
        }
        // probes use rows i - 1 (value) with neighbours on rows i - 2 and i
        if i >= 2 {
            for (p, &(pi, pj)) in probe_nodes.iter().enumerate() {
                if pi + 1 == i && pj >= 1 && pj + 1 < lat.nv {
                    let val = prev_row[pj];
                    let dt = (row[pj + 1] - prev2_row[pj - 1]) / (2.0 * h);
                    probe_vals[p] = (val, dt);
                }
            }
        }
        std::mem::swap(&mut prev2_row, &mut prev_row);
        prev_row.copy_from_slice(row);
    };
    march(lat, task.l, task.src, &mut visit);
    let psi_diff: Vec<Complex64> = psi.iter().zip(&psi_alt).map(|(a, b)| a - b).collect();
    (psi, psi_diff, pair, probe_vals)
}

fn run_mode(ext: &Extent, cfg: &PropagationConfig, task: &ModeTask, r0: f64) -> Result<ModeOutcome> {
    let radii: Vec<f64> = extraction_multiples(task.l).iter().map(|k| k * r0).collect();
    let coarse = ext.lattice(cfg.h);
    let fine = coarse.refined();
    let psi_rows = if task.extract { ((ext.u_end - ext.u0) / cfg.h).ceil() as usize + 1 } else { 0 };
    let (pc, _, qc, prc) = run_level(&coarse, cfg.h, task, &radii, psi_rows);
    let (pf, df, qf, prf) = run_level(&fine, cfg.h, task, &radii, psi_rows);
    let mut out = ModeOutcome::default();
    if task.extract {
        out.psi = pc.iter().zip(&pf).map(|(c, f)| (f * 4.0 - c) / 3.0).collect();
        let scale = out.psi.iter().map(|v| v.norm()).fold(0.0, f64::max);
        out.psi_spread = df.iter().map(|v| v.norm()).fold(0.0, f64::max) / scale.max(1e-300);
    }
    out.pairings = task
        .partners
        .iter()
        .enumerate()
        .map(|(n, (id, _))| (*id, Estimate::richardson(qc[n], qf[n])))
        .collect();
    out.probes = prc
        .iter()
        .zip(&prf)
        .map(|(c, f)| ((f.0 * 4.0 - c.0) / 3.0, (f.1 * 4.0 - c.1) / 3.0))
        .collect();
    Ok(out)
}

fn sign_m(m: i32) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Result of one retarded propagation of a test function.
#[derive(Debug, Clone, Default)]
pub struct RetardedRun {
    /// radiation data of `-E⁺f`, i.e. of `E f`, sampled on the coarse `u` grid
    pub radiation: Option<BoundaryFunction>,
    /// `∫ g E⁺(f) dμ` for each partner `g`
    pub pairings: Vec<Estimate>,
    pub max_spread: f64,
}

/// Propagates `f` with the retarded Green operator; optionally extracts the radiation field and
/// pairs the solution with `partners`.
pub fn retarded_run(
    f: &ModeTestFunction,
    extract: bool,
    partners: &[&ModeTestFunction],
    cfg: &PropagationConfig,
) -> Result<RetardedRun> {
    let mut out = RetardedRun { pairings: vec![Estimate::zero(); partners.len()], ..Default::default() };
    let sup = f.support();
    if sup.is_empty() || f.is_zero() {
        if extract {
            out.radiation = Some(BoundaryFunction::zero());
        }
        return Ok(out);
    }
    let h = cfg.h;
    let u0 = snap_down(sup.t_min - sup.r_max, h) - h;
    let r0 = ((sup.r_max + cfg.extraction_margin) / h).ceil() * h;
    let mut u_end = sup.t_max + sup.r_max + h;
    let mut v_end = sup.t_max + sup.r_max;
    for g in partners {
        let s = g.support();
        if !s.is_empty() {
            u_end = u_end.max(s.t_max - s.r_min + h);
            v_end = v_end.max(s.t_max + s.r_max + h);
        }
    }
    let mut modes = BTreeMap::new();
    for (&(l, m), prof) in &f.modes {
        if prof.is_zero() {
            continue;
        }
        let mult = extraction_multiples(l);
        let reach = if extract { u_end + 2.0 * r0 * mult.last().copied().unwrap_or(4.0) } else { 0.0 };
        let ext = Extent { u0, u_end, v_end: v_end.max(reach) + h };
        let partner_profiles: Vec<(usize, RadialProfile)> = partners
            .iter()
            .enumerate()
            .filter_map(|(n, g)| {
                g.mode(l, -m).map(|p| (n, p.scaled(Complex64::new(sign_m(m), 0.0))))
            })
            .collect();
        let task = ModeTask { l, src: prof, extract, partners: partner_profiles, probes: &[] };
        let res = run_mode(&ext, cfg, &task, r0)?;
        for (n, est) in res.pairings {
            out.pairings[n] = out.pairings[n] + est;
        }
        if extract {
            out.max_spread = out.max_spread.max(res.psi_spread);
            if res.psi_spread > cfg.tolerance {
                return Err(Error::Extrapolation { spread: res.psi_spread, tolerance: cfg.tolerance });
            }
            modes.insert((l, m), UProfile::sampled(u0, h, res.psi));
        }
    }
    if extract {
        out.radiation = Some(BoundaryFunction { modes });
    }
    Ok(out)
}

/// `∫ g E⁺(f) dμ` with an error estimate.
pub fn pair_retarded(f: &ModeTestFunction, g: &ModeTestFunction, cfg: &PropagationConfig) -> Result<Estimate> {
    Ok(retarded_run(f, false, &[g], cfg)?.pairings[0])
}

/// The radiation field `Υf(u, θ, φ) = lim r E(f)(u + r, r, θ, φ)`.
pub fn radiation_field(f: &ModeTestFunction, cfg: &PropagationConfig) -> Result<BoundaryFunction> {
    Ok(retarded_run(f, true, &[], cfg)?.radiation.unwrap_or_default())
}

/// Radiation field of one mode by direct quadrature over the source,
/// `ψ_lm(u) = ½ ∫ r² dr ∫_{-1}^{1} P_l(x) f_lm(u + r x, r) dx`.
pub fn radiation_field_kirchhoff(f: &ModeTestFunction, l: u32, m: i32, u: f64) -> Complex64 {
    let Some(p) = f.mode(l, m) else { return C0 };
    let s = p.support();
    if s.is_empty() {
        return C0;
    }
    let rr = CompositeRule::new(s.r_min, s.r_max, 48, 8);
    rr.integrate_c(|r| {
        // x-range where u + r x lies in the time support
        let lo = ((s.t_min - u) / r).max(-1.0);
        let hi = ((s.t_max - u) / r).min(1.0);
        if hi <= lo || r == 0.0 {
            return C0;
        }
        let rx = CompositeRule::new(lo, hi, 24, 8);
        rx.integrate_c(|x| p.eval(u + r * x, r) * legendre(l, x)) * (0.5 * r * r)
    })
}

/// `l = 0` retarded solution `χ = r φ_00` from the 1+1 d'Alembert formula on the half line
/// (odd extension in `r`), by direct quadrature.
pub fn dalembert_monopole(f: &ModeTestFunction, t: f64, r: f64) -> Complex64 {
    let Some(p) = f.mode(0, 0) else { return C0 };
    let s = p.support();
    let src = |tp: f64, rp: f64| -> Complex64 {
        if rp >= 0.0 {
            p.eval(tp, rp) * rp
        } else {
            p.eval(tp, -rp) * rp
        }
    };
    let t_hi = t.min(s.t_max);
    if t_hi <= s.t_min {
        return C0;
    }
    let rt = CompositeRule::new(s.t_min, t_hi, 64, 8);
    let val = rt.integrate_c(|tp| {
        let tau = t - tp;
        let (a, b) = (r - tau, r + tau);
        // integrate the odd source over [a, b] restricted to the support in |r'|
        let mut acc = C0;
        for (lo, hi) in [(a.max(s.r_min), b.min(s.r_max)), (a.max(-s.r_max), b.min(-s.r_min))] {
            if hi > lo {
                acc += CompositeRule::new(lo, hi, 16, 8).integrate_c(|rp| src(tp, rp));
            }
        }
        acc
    });
    -val * 0.5
}

// ---------------------------------------------------------------------------------------------
// full solutions

/// Green-operator solution stored mode by mode on full lattices.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    pub which: Which,
    pub modes: BTreeMap<ModeKey, ModeLattice>,
}

impl ModeSolution {
    /// `φ_lm(t, r)`.
    pub fn eval_mode(&self, l: u32, m: i32, t: f64, r: f64) -> Complex64 {
        let Some(ml) = self.modes.get(&(l, m)) else { return C0 };
        let t = if self.which == Which::Advanced { -t } else { t };
        if r <= 0.0 {
            return C0;
        }
        ml.chi_at(t, r) / r
    }

    pub fn eval(&self, t: f64, r: f64, theta: f64, phi: f64) -> Complex64 {
        self.modes
            .keys()
            .map(|&(l, m)| self.eval_mode(l, m, t, r) * crate::harmonics::ylm(l, m, theta, phi))
            .sum()
    }

    pub fn peak(&self) -> f64 {
        self.modes.values().flat_map(|ml| ml.chi.iter().map(|c| c.norm())).fold(0.0, f64::max)
    }
}

/// Solution lattice extents: covers `[t_min - r_max, t_max + reach]` in `u` and `v`.
fn solution_lattice(sup: &Support, reach: f64, h: f64) -> NullLattice {
    let u0 = snap_down(sup.t_min - sup.r_max, h) - h;
    let ext = Extent { u0, u_end: sup.t_max + reach, v_end: sup.t_max + sup.r_max + 2.0 * reach };
    ext.lattice(h)
}

/// `E^±(f)` on a lattice of step `cfg.h / 2` reaching `reach` beyond the source in time.
pub fn green(f: &ModeTestFunction, which: Which, reach: f64, cfg: &PropagationConfig) -> Result<ModeSolution> {
    let src = if which == Which::Advanced { f.reversed() } else { f.clone() };
    let sup = src.support();
    let mut modes = BTreeMap::new();
    if !sup.is_empty() {
        let h = 0.5 * cfg.h;
        let smallest = src
            .modes
            .values()
            .flat_map(|p| p.terms.iter().map(|t| t.wt.min(t.wr)))
            .fold(f64::INFINITY, f64::min);
        if smallest.is_finite() && smallest < 2.0 * h {
            return Err(Error::Refinement(format!("step {h} does not resolve width {smallest}")));
        }
        let lat = solution_lattice(&sup, reach, h);
        for (&(l, m), p) in &src.modes {
            modes.insert((l, m), ModeLattice::solve(lat, l, p));
        }
    }
    Ok(ModeSolution { which, modes })
}

/// `E = E⁻ - E⁺` as a pair of Green solutions.
#[derive(Debug, Clone)]
pub struct CausalSolution {
    pub advanced: ModeSolution,
    pub retarded: ModeSolution,
}

impl CausalSolution {
    pub fn eval_mode(&self, l: u32, m: i32, t: f64, r: f64) -> Complex64 {
        self.advanced.eval_mode(l, m, t, r) - self.retarded.eval_mode(l, m, t, r)
    }
}

pub fn causal_propagator(f: &ModeTestFunction, reach: f64, cfg: &PropagationConfig) -> Result<CausalSolution> {
    Ok(CausalSolution { advanced: green(f, Which::Advanced, reach, cfg)?, retarded: green(f, Which::Retarded, reach, cfg)? })
}

// ---------------------------------------------------------------------------------------------
// time slice

/// Smooth step equal to 1 for `x <= 0` and 0 for `x >= 1`, with its first two derivatives.
fn smooth_step(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (1.0, 0.0, 0.0);
    }
    if x >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    // ρ(x) = e^{-1/x}; χ = ρ(1-x) / (ρ(x) + ρ(1-x))
    let rho = |y: f64| (-1.0 / y).exp();
    let d1 = |y: f64| rho(y) / (y * y);
    let d2 = |y: f64| rho(y) * (1.0 - 2.0 * y) / y.powi(4);
    let (a, a1, a2) = (rho(1.0 - x), -d1(1.0 - x), d2(1.0 - x));
    let (b, b1, b2) = (rho(x), d1(x), d2(x));
    let s = a + b;
    let s1 = a1 + b1;
    let s2 = a2 + b2;
    let q = a / s;
    let q1 = (a1 * s - a * s1) / (s * s);
    let q2 = (a2 * s - a * s2) / (s * s) - 2.0 * s1 * (a1 * s - a * s1) / (s * s * s);
    (q, q1, q2)
}

/// Replaces `f` by `f' = P(χ E f)`, where `χ` switches smoothly from 1 to 0 across the slab, so
/// that `f'` is supported in `t0 <= t <= t1` and `E f' = E f`.
pub fn slab_reduce(f: &ModeTestFunction, slab: (f64, f64), cfg: &PropagationConfig) -> Result<ModeTestFunction> {
    let (t0, t1) = slab;
    if !(t1 > t0) {
        return Err(Error::Precondition(format!("empty slab ({t0}, {t1})")));
    }
    let h = cfg.h;
    if t1 - t0 < 4.0 * h {
        return Err(Error::Refinement(format!("slab thinner than four grid steps ({})", 4.0 * h)));
    }
    let sup = f.support();
    if sup.is_empty() || (sup.t_min >= t0 && sup.t_max <= t1) {
        return Ok(f.clone());
    }
    // solution support on the slab
    let dist = (t0 - sup.t_max).abs().max((t1 - sup.t_min).abs()).max((t1 - sup.t_max).abs()).max((t0 - sup.t_min).abs());
    let r_top = sup.r_max + dist + 2.0 * h;
    let width = t1 - t0;
    let nt = (width / h).round() as usize + 1;
    let dt = width / (nt - 1) as f64;
    // the probe grid must consist of lattice nodes: align to the coarse step
    let t_base = t0;
    let nr = (r_top / h).ceil() as usize + 1;
    let mut probes = Vec::with_capacity(nt * nr);
    for it in 0..nt {
        for ir in 0..nr {
            probes.push((t_base + it as f64 * dt, ir as f64 * h));
        }
    }
    let mut out_modes = BTreeMap::new();
    for (&(l, m), prof) in &f.modes {
        if prof.is_zero() {
            continue;
        }
        let single = ModeTestFunction::single(l, m, prof.clone());
        // retarded solution sampled on the slab
        let ret = probe_solution(&single, l, &probes, h, cfg)?;
        let rev_probes: Vec<(f64, f64)> = probes.iter().map(|&(t, r)| (-t, r)).collect();
        let adv = probe_solution(&single.reversed(), l, &rev_probes, h, cfg)?;
        // E f = E⁻f - E⁺f; advanced values come from the reversed run with ∂_t -> -∂_t
        let mut vals = vec![C0; nt * nr];
        for it in 0..nt {
            let t = t_base + it as f64 * dt;
            let (_, s1, s2) = smooth_step((t - t0) / width);
            let (c1, c2) = (s1 / width, s2 / (width * width));
            for ir in 1..nr {
                let k = it * nr + ir;
                let (cr, cr_t) = ret[k];
                let (ca, ca_t) = adv[k];
                let chi = ca - cr;
                let chi_t = -ca_t - cr_t;
                vals[k] = (-(chi * c2) - chi_t * (2.0 * c1)) / (ir as f64 * h);
            }
            if l == 0 && nr > 2 {
                vals[it * nr] = (vals[it * nr + 1] * 4.0 - vals[it * nr + 2]) / 3.0;
            }
        }
        let parity = if l % 2 == 0 { 1.0 } else { -1.0 };
        let grid = SampledProfile::from_fn(t_base, dt, nt, h, nr, parity, |t, r| {
            let it = ((t - t_base) / dt).round() as usize;
            let ir = (r / h).round() as usize;
            vals[it * nr + ir]
        });
        out_modes.insert((l, m), RadialProfile::sampled(grid));
    }
    Ok(ModeTestFunction { modes: out_modes, real: f.real })
}

/// `(χ, ∂_t χ)` of `E⁺f` at probe points lying on the `(t, r)` grid of spacing `h`.
fn probe_solution(
    f: &ModeTestFunction,
    l: u32,
    probes: &[(f64, f64)],
    h: f64,
    cfg: &PropagationConfig,
) -> Result<Vec<(Complex64, Complex64)>> {
    let sup = f.support();
    let (pt_min, pt_max, pr_max) = probes.iter().fold((f64::INFINITY, f64::NEG_INFINITY, 0.0f64), |a, p| {
        (a.0.min(p.0), a.1.max(p.0), a.2.max(p.1))
    });
    let _ = pt_min;
    // align the lattice origin so that probe points are lattice nodes
    let base = probes.first().map_or(0.0, |p| p.0);
    let start = sup.t_min - sup.r_max - 2.0 * h;
    let u0 = base - ((base - start) / h).ceil() * h;
    let ext = Extent { u0, u_end: pt_max + h, v_end: pt_max + pr_max + 2.0 * h };
    let (l_key, prof) = f.modes.iter().next().map(|(k, p)| (*k, p)).ok_or_else(|| Error::Precondition("empty".into()))?;
    debug_assert_eq!(l_key.0, l);
    let task = ModeTask { l, src: prof, extract: false, partners: vec![], probes };
    let res = run_mode(&ext, &PropagationConfig { h, ..cfg.clone() }, &task, 1.0)?;
    Ok(res.probes)
}

// ---------------------------------------------------------------------------------------------
// linearized gravity

/// `G^±_P̃ β = E^±(I β♭)` componentwise on Minkowski space.
#[derive(Debug, Clone)]
pub struct TensorSolution {
    pub comps: Vec<ModeSolution>,
}

pub fn gravity_propagator(
    beta: &TensorField,
    which: Which,
    reach: f64,
    cfg: &PropagationConfig,
) -> Result<TensorSolution> {
    let src = beta.flat().trace_reversed();
    let comps = src.comps.iter().map(|c| green(c, which, reach, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(TensorSolution { comps })
}

/// `Σ_ab ∫ w_ab E⁺(s_ab) dμ` over the ten stored components, counting off-diagonal pairs twice.
pub fn pair_retarded_tensor(s: &TensorField, w: &TensorField, cfg: &PropagationConfig) -> Result<Estimate> {
    let mut acc = Estimate::zero();
    for a in 0..4 {
        for b in a..4 {
            let k = crate::fields::sym_index(a, b);
            if s.comps[k].is_zero() || w.comps[k].is_zero() {
                continue;
            }
            let mult = if a == b { 1.0 } else { 2.0 };
            let e = pair_retarded(&s.comps[k], &w.comps[k], cfg)?;
            acc = acc + Estimate { value: e.value * mult, error: e.error * mult };
        }
    }
    Ok(acc)
}

/// Radiation field of linearized gravity: the transverse traceless part of the spatial
/// radiation fields of `E(I ε♭)`, returned as spin-2 electric and magnetic channels.
pub fn radiation_field_grav(eps: &TensorField, cfg: &PropagationConfig) -> Result<BoundaryTensor> {
    let src = eps.flat().trace_reversed();
    let mut psi: Vec<((usize, usize), BoundaryFunction)> = vec![];
    for i in 1..4 {
        for j in i..4 {
            let c = src.get(i, j);
            if !c.is_zero() {
                psi.push(((i, j), radiation_field(c, cfg)?));
            }
        }
    }
    if psi.is_empty() {
        return Ok(BoundaryTensor::default());
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut l_in = 0;
    for (_, b) in &psi {
        let (a, c) = b.support();
        lo = lo.min(a);
        hi = hi.max(c);
        l_in = l_in.max(b.l_max());
    }
    if !(hi > lo) {
        return Ok(BoundaryTensor::default());
    }
    let du = cfg.h;
    let lo = snap_down(lo, du);
    let n = ((hi - lo) / du).ceil() as usize + 1;
    let l_out = l_in + 2;
    let rule = SphereRule::for_degree(2 * l_out as usize + 4);
    // sampled scalar modes of each component
    let mut samples: Vec<((usize, usize), ModeKey, Vec<Complex64>)> = vec![];
    for ((i, j), b) in &psi {
        for (&k, p) in &b.modes {
            samples.push(((*i, *j), k, p.sample(lo, du, n)));
        }
    }
    let mut a: BTreeMap<ModeKey, Vec<Complex64>> = BTreeMap::new();
    for l in 2..=l_out {
        for m in -(l as i32)..=(l as i32) {
            a.insert((l, m), vec![C0; n]);
        }
    }
    let nodes: Vec<(f64, f64, f64)> = rule.nodes().collect();
    let frames: Vec<[Complex64; 3]> = nodes.iter().map(|&(th, ph, _)| frame_m(th, ph)).collect();
    let mut spin: BTreeMap<ModeKey, Vec<Complex64>> = BTreeMap::new();
    for &k in a.keys() {
        spin.insert(k, nodes.iter().map(|&(th, ph, w)| spin_ylm(2, k.0, k.1, th, ph).conj() * w).collect());
    }
    for ((i, j), (lp, mp), vals) in &samples {
        let mult = if i == j { 1.0 } else { 2.0 };
        let g: Vec<Complex64> = nodes
            .iter()
            .zip(&frames)
            .map(|(&(th, ph, _), mv)| mv[*i - 1] * mv[*j - 1] * ylm(*lp, *mp, th, ph) * mult)
            .collect();
        for l in 2..=(lp + 2) {
            for m in -(l as i32)..=(l as i32) {
                let c: Complex64 = spin[&(l, m)].iter().zip(&g).map(|(x, y)| x * y).sum();
                if c.norm() < 1e-13 {
                    continue;
                }
                let dst = a.get_mut(&(l, m)).expect("mode table");
                for (d, v) in dst.iter_mut().zip(vals) {
                    *d += v * c;
                }
            }
        }
    }
    BoundaryTensor::from_spin2_samples(lo, du, &a)
}

/// `m = (θ̂ + i φ̂)/√2` in Cartesian components.
pub fn frame_m(theta: f64, phi: f64) -> [Complex64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let th = [ct * cp, ct * sp, -st];
    let ph = [-sp, cp, 0.0];
    let k = std::f64::consts::FRAC_1_SQRT_2;
    [0, 1, 2].map(|n| Complex64::new(th[n] * k, ph[n] * k))
}
