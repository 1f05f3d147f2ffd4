//! Spherical harmonics (orthonormal, Condon-Shortley phase), spin-weighted harmonics,
//! product quadrature on the unit sphere and spherical Bessel functions.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::quad::gauss_legendre;

/// Orthonormal spherical harmonic `Y_lm(θ, φ)` with the Condon-Shortley phase.
pub fn ylm(l: u32, m: i32, theta: f64, phi: f64) -> Complex64 {
    if m.unsigned_abs() > l {
        return Complex64::new(0.0, 0.0);
    }
    let ma = m.unsigned_abs();
    let p = normalized_legendre(l, ma, theta.cos(), theta.sin());
    let y = Complex64::from_polar(p, ma as f64 * phi);
    if m >= 0 {
        y
    } else if ma % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    }
}

/// `sqrt((2l+1)/4π (l-m)!/(l+m)!) P_l^m(x)` including the Condon-Shortley phase, `m >= 0`.
fn normalized_legendre(l: u32, m: u32, x: f64, s: f64) -> f64 {
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for k in 1..=m {
        let kf = k as f64;
        pmm *= -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * s;
    }
    if l == m {
        return pmm;
    }
    let mf = m as f64;
    let mut p_prev = pmm;
    let mut p = x * (2.0 * mf + 3.0).sqrt() * pmm;
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (x * p - b * p_prev);
        p_prev = p;
        p = next;
    }
    p
}

/// Legendre polynomial `P_l(x)`.
pub fn legendre(l: u32, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if l == 0 {
        return 1.0;
    }
    for k in 2..=l {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn factorial(n: i64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || k > n || n < 0 {
        return 0.0;
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Spin-weighted spherical harmonic `sY_lm`; reduces to [`ylm`] for `s = 0` and satisfies
/// `conj(sY_lm) = (-1)^(s+m) (-s)Y_l(-m)`.
pub fn spin_ylm(s: i32, l: u32, m: i32, theta: f64, phi: f64) -> Complex64 {
    let (li, si, mi) = (l as i64, s as i64, m as i64);
    if si.abs() > li || mi.abs() > li {
        return Complex64::new(0.0, 0.0);
    }
    let norm = (factorial(li + mi) * factorial(li - mi) * (2 * li + 1) as f64
        / (4.0 * PI * factorial(li + si) * factorial(li - si)))
        .sqrt();
    let (sh, ch) = ((0.5 * theta).sin(), (0.5 * theta).cos());
    let mut sum = 0.0;
    for r in 0..=(li - si) {
        let c = binomial(li - si, r) * binomial(li + si, r + si - mi);
        if c == 0.0 {
            continue;
        }
        let sign = if (li - r - si).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let k = 2 * r + si - mi;
        sum += sign * c * sh.powi((2 * li - k) as i32) * ch.powi(k as i32);
    }
    let phase = if mi.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Complex64::from_polar(phase * norm * sum, m as f64 * phi)
}

/// Product rule on the unit sphere: Gauss-Legendre in `cos θ` times uniform `φ`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// weight per theta node, including the `2π / n_φ` factor
    pub weight: Vec<f64>,
}

impl SphereRule {
    /// Exact for band-limited integrands up to total degree `degree`.
    pub fn for_degree(degree: usize) -> Self {
        let n_theta = degree / 2 + 2;
        let n_phi = degree + 2;
        Self::new(n_theta, n_phi)
    }

    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let (x, w) = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        Self {
            theta: x.iter().map(|c| c.acos()).collect(),
            phi: (0..n_phi).map(|j| j as f64 * dphi).collect(),
            weight: w.iter().map(|w| w * dphi).collect(),
        }
    }

    /// Iterate `(θ, φ, weight)` over all nodes.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.theta
            .iter()
            .zip(&self.weight)
            .flat_map(move |(&t, &w)| self.phi.iter().map(move |&p| (t, p, w)))
    }

    pub fn len(&self) -> usize {
        self.theta.len() * self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Unit vector for direction `(θ, φ)`.
pub fn direction(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// `(θ, φ)` of a nonzero vector.
pub fn angles(x: [f64; 3]) -> (f64, f64) {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
    let mut phi = x[1].atan2(x[0]);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    (theta, phi)
}

/// Spherical Bessel function of the first kind `j_l(x)`, `x >= 0`.
pub fn spherical_bessel(l: u32, x: f64) -> f64 {
    if x < (l as f64 + 1.0).max(2.0) {
        // power series, prefactor x^l / (2l+1)!!
        let mut pref = 1.0;
        for k in 0..l {
            pref *= x / (2.0 * k as f64 + 3.0);
        }
        let z = -0.5 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= z / (k as f64 * (2.0 * (l as f64 + k as f64) + 1.0));
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return pref * sum;
    }
    let j0 = x.sin() / x;
    if l == 0 {
        return j0;
    }
    let mut jm = j0;
    let mut j = x.sin() / (x * x) - x.cos() / x;
    for k in 1..l {
        let next = (2.0 * k as f64 + 1.0) / x * j - jm;
        jm = j;
        j = next;
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y00_normalization() {
        let y = ylm(0, 0, 0.3, 1.2);
        assert!((y.re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn explicit_low_order_harmonics() {
        let (t, p) = (0.7f64, 2.1);
        let y10 = (3.0 / (4.0 * PI)).sqrt() * t.cos();
        assert!((ylm(1, 0, t, p).re - y10).abs() < 1e-14);
        let y11 = -(3.0 / (8.0 * PI)).sqrt() * t.sin() * Complex64::from_polar(1.0, p);
        assert!((ylm(1, 1, t, p) - y11).norm() < 1e-14);
        let y22 = 0.25 * (15.0 / (2.0 * PI)).sqrt() * t.sin().powi(2) * Complex64::from_polar(1.0, 2.0 * p);
        assert!((ylm(2, 2, t, p) - y22).norm() < 1e-14);
    }

    #[test]
    fn orthonormality_on_product_rule() {
        let rule = SphereRule::for_degree(12);
        let modes: Vec<(u32, i32)> =
            (0..=5u32).flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m))).collect();
        for &(l1, m1) in &modes {
            for &(l2, m2) in &modes {
                let s: Complex64 = rule
                    .nodes()
                    .map(|(t, p, w)| ylm(l1, m1, t, p).conj() * ylm(l2, m2, t, p) * w)
                    .sum();
                let expect = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
                assert!((s - expect).norm() < 1e-12, "({l1},{m1}) ({l2},{m2}) {s}");
            }
        }
    }

    #[test]
    fn spin_zero_matches_scalar_harmonics() {
        for l in 0..5u32 {
            for m in -(l as i32)..=l as i32 {
                let (t, p) = (1.1, 0.4);
                assert!((spin_ylm(0, l, m, t, p) - ylm(l, m, t, p)).norm() < 1e-13, "({l},{m})");
            }
        }
    }

    #[test]
    fn spin_two_orthonormal_and_conjugation() {
        let rule = SphereRule::for_degree(16);
        for l in 2..=4u32 {
            for m in -(l as i32)..=l as i32 {
                let s: Complex64 =
                    rule.nodes().map(|(t, p, w)| spin_ylm(2, l, m, t, p).norm_sqr() * w).sum::<f64>().into();
                assert!((s.re - 1.0).abs() < 1e-12);
                let (t, p) = (0.9, 2.5);
                let sign = if (m + 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                assert!((spin_ylm(2, l, m, t, p).conj() - spin_ylm(-2, l, -m, t, p) * sign).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn bessel_against_closed_forms() {
        for &x in &[0.01f64, 0.5, 1.9, 2.5, 7.3, 20.0] {
            let j0 = if x == 0.0 { 1.0 } else { x.sin() / x };
            let j1 = x.sin() / (x * x) - x.cos() / x;
            let j2 = (3.0 / (x * x) - 1.0) * x.sin() / x - 3.0 * x.cos() / (x * x);
            assert!((spherical_bessel(0, x) - j0).abs() < 1e-13);
            assert!((spherical_bessel(1, x) - j1).abs() < 1e-12, "x={x}");
            if x > 0.1 {
                assert!((spherical_bessel(2, x) - j2).abs() < 1e-11, "x={x}");
            }
        }
    }
}
