//! Quadrature, interpolation and extrapolation helpers shared by the numerical modules.

use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule: `panels` equal panels of `order` nodes on [a, b].
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn integrate_c<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }
}

/// Weights `w_k` such that `sum_k w_k y(x_k)` is the value at `x = 0` of the polynomial through
/// the points `(x_k, y_k)`.
pub fn extrapolation_weights(xs: &[f64]) -> Vec<f64> {
    (0..xs.len())
        .map(|k| {
            xs.iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, &xj)| xj / (xj - xs[k]))
                .product()
        })
        .collect()
}

/// Natural cubic spline through uniformly spaced complex samples.
#[derive(Debug, Clone)]
pub struct UniformSpline {
    pub x0: f64,
    pub dx: f64,
    values: Vec<Complex64>,
    second: Vec<Complex64>,
}

impl UniformSpline {
    pub fn new(x0: f64, dx: f64, values: Vec<Complex64>) -> Self {
        let n = values.len();
        let mut second = vec![Complex64::new(0.0, 0.0); n];
        if n >= 3 {
            // tridiagonal (1, 4, 1) system for interior second derivatives
            let m = n - 2;
            let mut c = vec![0.0; m];
            let mut d = vec![Complex64::new(0.0, 0.0); m];
            for i in 0..m {
                let rhs = (values[i] - values[i + 1] * 2.0 + values[i + 2]) * (6.0 / (dx * dx));
                if i == 0 {
                    c[i] = 1.0 / 4.0;
                    d[i] = rhs / 4.0;
                } else {
                    let denom = 4.0 - c[i - 1];
                    c[i] = 1.0 / denom;
                    d[i] = (rhs - d[i - 1]) / denom;
                }
            }
            for i in (0..m).rev() {
                let next = if i + 1 < m { second[i + 2] } else { Complex64::new(0.0, 0.0) };
                second[i + 1] = d[i] - next * c[i];
            }
        }
        Self { x0, dx, values, second }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.dx * (self.values.len().saturating_sub(1)) as f64
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let n = self.values.len();
        if n < 2 {
            return None;
        }
        let s = (x - self.x0) / self.dx;
        if s < 0.0 || s > (n - 1) as f64 {
            return None;
        }
        let i = (s.floor() as usize).min(n - 2);
        Some((i, s - i as f64))
    }

    /// Value; zero outside the sampled interval.
    pub fn eval(&self, x: f64) -> Complex64 {
        match self.locate(x) {
            None => Complex64::new(0.0, 0.0),
            Some((i, t)) => {
                let a = 1.0 - t;
                let h2 = self.dx * self.dx / 6.0;
                self.values[i] * a
                    + self.values[i + 1] * t
                    + (self.second[i] * (a * a * a - a) + self.second[i + 1] * (t * t * t - t)) * h2
            }
        }
    }

    pub fn derivative(&self, x: f64) -> Complex64 {
        match self.locate(x) {
            None => Complex64::new(0.0, 0.0),
            Some((i, t)) => {
                let a = 1.0 - t;
                (self.values[i + 1] - self.values[i]) / self.dx
                    + (self.second[i + 1] * (3.0 * t * t - 1.0) - self.second[i] * (3.0 * a * a - 1.0))
                        * (self.dx / 6.0)
            }
        }
    }
}

impl UniformSpline {
    /// `∫ S(x) e^{iωx} dx` of the spline over its interval, exactly.
    ///
    /// Integrating by parts three times leaves the piecewise-constant third derivative; below
    /// `ω dx = 0.3` the cancellation in that form is avoided with per-interval Gauss-Legendre.
    pub fn fourier(&self, omega: f64) -> Complex64 {
        let n = self.values.len();
        if n < 2 {
            return Complex64::new(0.0, 0.0);
        }
        if (omega * self.dx).abs() < 0.3 {
            let (x, w) = gauss_legendre(4);
            let step = Complex64::from_polar(1.0, omega * self.dx);
            let mut acc = Complex64::new(0.0, 0.0);
            for (xi, wi) in x.iter().zip(&w) {
                let t = 0.5 * (xi + 1.0);
                let mut phase = Complex64::from_polar(0.5 * self.dx * wi, omega * (self.x0 + t * self.dx));
                let (a, h2) = (1.0 - t, self.dx * self.dx / 6.0);
                let (ca, ct) = ((a * a * a - a) * h2, (t * t * t - t) * h2);
                for i in 0..n - 1 {
                    let v = self.values[i] * a + self.values[i + 1] * t + self.second[i] * ca + self.second[i + 1] * ct;
                    acc += v * phase;
                    phase *= step;
                }
            }
            return acc;
        }
        let z = Complex64::new(0.0, omega);
        let e = |x: f64| Complex64::from_polar(1.0, omega * x);
        let (a, b) = (self.x0, self.x_max());
        let ends = |x: f64, s: Complex64, d1: Complex64, d2: Complex64| e(x) * (s / z - d1 / (z * z) + d2 / (z * z * z));
        let mut out = ends(b, self.values[n - 1], self.derivative(b), self.second[n - 1])
            - ends(a, self.values[0], self.derivative(a), self.second[0]);
        // Σ_k d3_k (e(x_{k+1}) - e(x_k)) regrouped by node, phases by recurrence
        let d3 = |k: usize| (self.second[k + 1] - self.second[k]) / self.dx;
        let step = e(self.dx);
        let mut phase = e(a);
        let mut tail = Complex64::new(0.0, 0.0);
        let mut prev = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let cur = if j + 1 < n { d3(j) } else { Complex64::new(0.0, 0.0) };
            tail += phase * (prev - cur);
            prev = cur;
            phase *= step;
        }
        out -= tail / (z * z * z * z);
        out
    }
}

/// Cubic convolution (Catmull-Rom) weights for fractional offset `t` in [0, 1).
pub fn catmull_rom_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Physicists' Hermite polynomial H_n(x).
pub fn hermite(n: u32, x: f64) -> f64 {
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * x;
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `∫ s^p exp(-s²) exp(i q s) ds` over the real line.
pub fn gaussian_moment_transform(p: u32, q: f64) -> Complex64 {
    let base = std::f64::consts::PI.sqrt() * (-0.25 * q * q).exp() * hermite(p, 0.5 * q);
    Complex64::new(0.0, 0.5).powu(p) * base
}
