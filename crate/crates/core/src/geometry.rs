//! Minkowski spacetime, its conformal embedding into the Einstein static universe and the
//! Bondi chart at future null infinity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::report::{CheckRecord, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// `(t, r, θ, φ)`
    Inertial,
    /// `(T, R, θ, φ)` on the Einstein static universe
    Unphysical,
    /// `(u, Ξ, θ, φ)` near null infinity
    Bondi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub chart: Chart,
    pub coords: [f64; 4],
}

impl SpacetimePoint {
    pub fn new(chart: Chart, coords: [f64; 4]) -> Result<Self> {
        let [_, b, theta, phi] = coords;
        if !(0.0..=PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::ChartDegeneracy(format!("angles out of range: θ = {theta}, φ = {phi}")));
        }
        match chart {
            Chart::Inertial if b < 0.0 => Err(Error::ChartDegeneracy(format!("negative radius {b}"))),
            Chart::Unphysical if !(0.0..=PI).contains(&b) => {
                Err(Error::ChartDegeneracy(format!("R = {b} outside [0, π]")))
            }
            Chart::Bondi if b < 0.0 => Err(Error::ChartDegeneracy(format!("negative Ξ = {b}"))),
            _ => Ok(Self { chart, coords }),
        }
    }

    pub fn inertial(t: f64, r: f64, theta: f64, phi: f64) -> Result<Self> {
        Self::new(Chart::Inertial, [t, r, theta, phi])
    }
}

/// Point of null infinity: retarded time and a direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub u: f64,
    pub theta: f64,
    pub phi: f64,
}

impl BoundaryPoint {
    pub fn new(u: f64, theta: f64, phi: f64) -> Self {
        Self { u, theta, phi }
    }

    /// Stereographic coordinate `z = e^{iφ} cot(θ/2)`; undefined at the north pole.
    pub fn stereographic(&self) -> Result<Complex64> {
        to_stereographic(self.theta, self.phi)
    }
}

pub fn to_stereographic(theta: f64, phi: f64) -> Result<Complex64> {
    if theta.abs() < 1e-300 {
        return Err(Error::ChartDegeneracy("stereographic map is singular at θ = 0".into()));
    }
    Ok(Complex64::from_polar(1.0 / (0.5 * theta).tan(), phi))
}

pub fn from_stereographic(z: Complex64) -> (f64, f64) {
    let theta = 2.0 * (1.0 / z.norm()).atan();
    let mut phi = z.arg();
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    (theta, phi)
}

/// The embedding of Minkowski space into the Einstein static universe with
/// `Ξ = 2[(1+(t+r)²)(1+(t-r)²)]^{-1/2} = cos T + cos R`.
///
/// `power` replaces `Ξ` by `Ξ^power`; values other than 1 break the boundary conditions and
/// exist to exercise the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalEmbedding {
    pub power: f64,
}

impl Default for ConformalEmbedding {
    fn default() -> Self {
        Self { power: 1.0 }
    }
}

impl ConformalEmbedding {
    pub fn minkowski() -> Self {
        Self::default()
    }

    pub fn squared() -> Self {
        Self { power: 2.0 }
    }

    pub fn xi_inertial(&self, t: f64, r: f64) -> f64 {
        let base = 2.0 / ((1.0 + (t + r).powi(2)) * (1.0 + (t - r).powi(2))).sqrt();
        base.powf(self.power)
    }

    pub fn xi_unphysical(&self, big_t: f64, big_r: f64) -> f64 {
        let base = big_t.cos() + big_r.cos();
        if self.power.fract() == 0.0 {
            base.powi(self.power as i32)
        } else {
            base.abs().powf(self.power)
        }
    }

    pub fn conformal_factor(&self, p: &SpacetimePoint) -> Result<f64> {
        match p.chart {
            Chart::Inertial => Ok(self.xi_inertial(p.coords[0], p.coords[1])),
            Chart::Unphysical => Ok(self.xi_unphysical(p.coords[0], p.coords[1])),
            Chart::Bondi => Ok(p.coords[1]),
        }
    }

    pub fn to_unphysical(&self, p: &SpacetimePoint) -> Result<SpacetimePoint> {
        if p.chart != Chart::Inertial {
            return Err(Error::ChartDegeneracy("to_unphysical expects an inertial point".into()));
        }
        let [t, r, th, ph] = p.coords;
        let a = (t + r).atan();
        let b = (t - r).atan();
        Ok(SpacetimePoint { chart: Chart::Unphysical, coords: [a + b, a - b, th, ph] })
    }

    pub fn from_unphysical(&self, p: &SpacetimePoint) -> Result<SpacetimePoint> {
        if p.chart != Chart::Unphysical {
            return Err(Error::ChartDegeneracy("from_unphysical expects an unphysical point".into()));
        }
        let [tt, rr, th, ph] = p.coords;
        if tt + rr >= PI || tt - rr <= -PI {
            return Err(Error::ChartDegeneracy(format!("(T, R) = ({tt}, {rr}) lies outside the image")));
        }
        let v = (0.5 * (tt + rr)).tan();
        let u = (0.5 * (tt - rr)).tan();
        Ok(SpacetimePoint { chart: Chart::Inertial, coords: [0.5 * (v + u), 0.5 * (v - u), th, ph] })
    }

    /// `n^μ = g̃^{μν} ∂_ν Ξ` in the unphysical chart.
    pub fn normal_field(&self, big_t: f64, big_r: f64) -> [f64; 4] {
        let d = self.gradient(big_t, big_r);
        [-d[0], d[1], 0.0, 0.0]
    }

    /// `(∂_T Ξ, ∂_R Ξ)` by fourth-order central differences.
    pub fn gradient(&self, big_t: f64, big_r: f64) -> [f64; 2] {
        let h = 1e-4;
        let d = |f: &dyn Fn(f64) -> f64| (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
        [
            d(&|e| self.xi_unphysical(big_t + e, big_r)),
            d(&|e| self.xi_unphysical(big_t, big_r + e)),
        ]
    }
}

/// Einstein-static-universe metric `-dT² + dR² + sin²R dΩ²`.
pub fn esu_metric(big_r: f64, theta: f64) -> [[f64; 4]; 4] {
    let s2 = big_r.sin().powi(2);
    let mut g = [[0.0; 4]; 4];
    g[0][0] = -1.0;
    g[1][1] = 1.0;
    g[2][2] = s2;
    g[3][3] = s2 * theta.sin().powi(2);
    g
}

/// Unphysical metric at a point of null infinity in `(u, Ξ, θ, φ)` order.
pub fn bondi_metric_at(q: &BoundaryPoint) -> Result<[[f64; 4]; 4]> {
    let s = q.theta.sin();
    if q.theta.abs() < 1e-12 || (q.theta - PI).abs() < 1e-12 || s.abs() < 1e-12 {
        return Err(Error::ChartDegeneracy(format!("θ = {} is a pole of the Bondi chart", q.theta)));
    }
    let mut g = [[0.0; 4]; 4];
    g[0][1] = -1.0;
    g[1][0] = -1.0;
    g[2][2] = 1.0;
    g[3][3] = s * s;
    Ok(g)
}

fn cart_to_unphysical(x: [f64; 4]) -> [f64; 4] {
    let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
    let a = (x[0] + r).atan();
    let b = (x[0] - r).atan();
    let theta = (x[3] / r).acos();
    let phi = x[2].atan2(x[1]);
    [a + b, a - b, theta, phi]
}

/// `max |Φ*(Ξ⁻² g̃) - η|` in Cartesian inertial components at `x = (t, x, y, z)`, with the
/// Jacobian of the chart map taken by fourth-order finite differences.
pub fn metric_recovery_residual(emb: &ConformalEmbedding, x: [f64; 4]) -> f64 {
    let h = 1e-3;
    let base = cart_to_unphysical(x);
    let mut jac = [[0.0; 4]; 4]; // jac[μ][a] = ∂X^μ / ∂x^a
    for a in 0..4 {
        let eval = |e: f64| {
            let mut y = x;
            y[a] += e;
            let mut v = cart_to_unphysical(y);
            // keep φ on the branch of the base point
            v[3] = base[3] + (v[3] - base[3] + PI).rem_euclid(2.0 * PI) - PI;
            v
        };
        let (p1, m1, p2, m2) = (eval(h), eval(-h), eval(2.0 * h), eval(-2.0 * h));
        for mu in 0..4 {
            jac[mu][a] = (8.0 * (p1[mu] - m1[mu]) - (p2[mu] - m2[mu])) / (12.0 * h);
        }
    }
    let g = esu_metric(base[1], base[2]);
    let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
    let xi = emb.xi_inertial(x[0], r);
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let mut s = 0.0;
            for mu in 0..4 {
                s += jac[mu][a] * g[mu][mu] * jac[mu][b];
            }
            let eta = if a != b { 0.0 } else if a == 0 { -1.0 } else { 1.0 };
            worst = worst.max((s / (xi * xi) - eta).abs());
        }
    }
    worst
}

/// Ratios `∇̃∇̃Ξ / g̃` for the `TT`, `RR` and `θθ` components at `(π - δ, δ)`, from one-sided
/// differences in `T`.
pub fn hessian_ratio_near_future_timelike_infinity(emb: &ConformalEmbedding, delta: f64) -> [f64; 3] {
    let (tt, rr) = (PI - delta, delta);
    let h = 1e-3;
    let f = |a: f64, b: f64| emb.xi_unphysical(a, b);
    // one-sided second difference, second order accurate
    let d2t = (2.0 * f(tt, rr) - 5.0 * f(tt - h, rr) + 4.0 * f(tt - 2.0 * h, rr) - f(tt - 3.0 * h, rr)) / (h * h);
    let d2r = (f(tt, rr + h) - 2.0 * f(tt, rr) + f(tt, rr - h)) / (h * h);
    let dr = (f(tt, rr + h) - f(tt, rr - h)) / (2.0 * h);
    // ∇̃_θ∇̃_θ Ξ = -Γ^R_θθ ∂_R Ξ with Γ^R_θθ = -sin R cos R
    let hess_thth = rr.sin() * rr.cos() * dr;
    [-d2t, d2r, hess_thth / rr.sin().powi(2)]
}

/// Checks of the asymptotic-flatness conditions on boundary samples and interior points.
pub fn verify_af_conditions(
    emb: &ConformalEmbedding,
    samples: &[BoundaryPoint],
    interior: &[[f64; 4]],
) -> VerificationReport {
    let mut rep = VerificationReport::new("geometry-embedding");
    for (k, q) in samples.iter().enumerate() {
        // null infinity at retarded time u: T + R = π, T - R = 2 arctan u
        let tt = 0.5 * PI + q.u.atan();
        let rr = 0.5 * PI - q.u.atan();
        let xi = emb.xi_unphysical(tt, rr);
        let d = emb.gradient(tt, rr);
        let dn = d[0].abs().max(d[1].abs());
        rep.push(
            CheckRecord::new(format!("scri sample {k}: Ξ = 0, dΞ ≠ 0"), "dΞ ≠ 0 on ℐ⁺", 1e-6)
                .value("xi", xi.abs())
                .value("grad_norm", dn)
                .value("u", q.u)
                .verdict(xi.abs() < 1e-12 && dn > 1e-6),
        );
    }
    for (k, x) in interior.iter().enumerate() {
        let res = metric_recovery_residual(emb, *x);
        rep.push(
            CheckRecord::new(format!("interior point {k}: metric recovery"), "Φ*(Ξ⁻²g̃) = g", 1e-8)
                .value("t", x[0])
                .judge(res),
        );
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_value_and_decay() {
        let e = ConformalEmbedding::minkowski();
        assert!((e.xi_inertial(0.0, 0.0) - 2.0).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let v = e.xi_inertial(0.0, 2f64.powi(k));
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-10);
    }

    #[test]
    fn closed_forms_agree_between_charts() {
        let e = ConformalEmbedding::minkowski();
        for &(t, r) in &[(0.0, 1.0), (2.0, 0.5), (-1.3, 4.0)] {
            let p = SpacetimePoint::inertial(t, r, 1.0, 2.0).unwrap();
            let q = e.to_unphysical(&p).unwrap();
            assert!((e.xi_inertial(t, r) - e.xi_unphysical(q.coords[0], q.coords[1])).abs() < 1e-14);
            let back = e.from_unphysical(&q).unwrap();
            for i in 0..4 {
                assert!((back.coords[i] - p.coords[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn radiation_rescaling_limit() {
        // r Ξ -> 1 / sqrt(1 + u²) along u = const
        let e = ConformalEmbedding::minkowski();
        let u: f64 = 0.7;
        let r = 1e7;
        assert!((r * e.xi_inertial(u + r, r) - 1.0 / (1.0 + u * u).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn bondi_line_element() {
        let g = bondi_metric_at(&BoundaryPoint::new(0.0, PI / 3.0, 0.0)).unwrap();
        assert!((g[3][3] - 0.75).abs() < 1e-15);
        assert_eq!(g[0][1], -1.0);
        assert!(bondi_metric_at(&BoundaryPoint::new(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn stereographic_round_trip() {
        let z = to_stereographic(1.2, 4.0).unwrap();
        let (t, p) = from_stereographic(z);
        assert!((t - 1.2).abs() < 1e-14 && (p - 4.0).abs() < 1e-14);
    }

    #[test]
    fn squared_factor_has_vanishing_gradient_on_scri() {
        let e = ConformalEmbedding::squared();
        let rep = verify_af_conditions(&e, &[BoundaryPoint::new(0.3, 1.0, 1.0)], &[]);
        assert!(!rep.passed());
    }

    #[test]
    fn hessian_is_proportional_to_metric_at_future_timelike_infinity() {
        let k = hessian_ratio_near_future_timelike_infinity(&ConformalEmbedding::minkowski(), 1e-4);
        for v in k {
            assert!((v + 1.0).abs() < 1e-4, "{k:?}");
        }
    }
}
