use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=m {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[m - 1 - i] = -x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Polar quadrature rule for a disc: Gauss-Legendre in the radius,
/// trapezoid in the angle.
#[derive(Clone, Debug)]
pub struct DiscRule {
    radial: (Vec<f64>, Vec<f64>),
    angular: usize,
}

impl DiscRule {
    pub fn new(radial: usize, angular: usize) -> Self {
        Self { radial: gauss_legendre(radial.max(1)), angular: angular.max(1) }
    }

    /// `∫_{B(center, radius)} f`.
    pub fn integrate(&self, center: Complex64, radius: f64, f: impl Fn(Complex64) -> f64) -> f64 {
        let (xs, ws) = &self.radial;
        let dtheta = TAU / self.angular as f64;
        let mut total = 0.0;
        for (x, w) in xs.iter().zip(ws) {
            let r = 0.5 * radius * (1.0 + x);
            let ring: f64 =
                (0..self.angular).map(|j| f(center + Complex64::from_polar(r, j as f64 * dtheta))).sum::<f64>() * dtheta;
            total += w * 0.5 * radius * r * ring;
        }
        total
    }

    /// Mean of `f` over the disc.
    pub fn average(&self, center: Complex64, radius: f64, f: impl Fn(Complex64) -> f64) -> f64 {
        self.integrate(center, radius, f) / (PI * radius * radius)
    }
}

impl Default for DiscRule {
    fn default() -> Self {
        Self::new(24, 96)
    }
}
