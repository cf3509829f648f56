use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{BoundaryFunction, ContinuumError, DiscRule};

/// `H(re^{iθ}) = a₀ + Σ_k r^k (a_k cos kθ + b_k sin kθ)`, with `a[k-1]` and
/// `b[k-1]` holding the degree-k coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicField {
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl HarmonicField {
    pub fn new(a0: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self, ContinuumError> {
        if a.len() != b.len() {
            return Err(ContinuumError::InvalidArgument("cosine and sine coefficient lists differ in length".into()));
        }
        if std::iter::once(&a0).chain(&a).chain(&b).any(|x| !x.is_finite()) {
            return Err(ContinuumError::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self { a0, a, b })
    }

    pub fn constant(c: f64) -> Self {
        Self { a0: c, a: Vec::new(), b: Vec::new() }
    }

    /// `Re z^k`.
    pub fn real_power(k: usize) -> Self {
        let mut a = vec![0.0; k];
        if k > 0 {
            a[k - 1] = 1.0;
        }
        Self { a0: if k == 0 { 1.0 } else { 0.0 }, b: vec![0.0; k], a }
    }

    pub fn k_max(&self) -> usize {
        self.a.len()
    }

    fn analytic_coefficients(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.a.iter().zip(&self.b).map(|(a, b)| Complex64::new(*a, -*b))
    }

    /// `H = Re F` with `F(z) = a₀ + Σ (a_k − i b_k) z^k`.
    pub fn eval(&self, z: Complex64) -> f64 {
        let mut power = Complex64::new(1.0, 0.0);
        let mut sum = self.a0;
        for c in self.analytic_coefficients() {
            power *= z;
            sum += (c * power).re;
        }
        sum
    }

    /// `(∂ₓH, ∂ᵧH) = (Re F′, −Im F′)`.
    pub fn gradient(&self, z: Complex64) -> (f64, f64) {
        let mut power = Complex64::new(1.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for (k, c) in self.analytic_coefficients().enumerate() {
            d += c * (k + 1) as f64 * power;
            power *= z;
        }
        (d.re, -d.im)
    }

    /// Dirichlet energy over the centered disc of radius `rho`.
    pub fn energy(&self, rho: f64) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as f64;
                k * PI * (a * a + b * b) * rho.powf(2.0 * k)
            })
            .sum()
    }

    /// `∫_𝔻 ∇H·∇G`.
    pub fn energy_form(&self, other: &Self) -> f64 {
        let k = self.k_max().min(other.k_max());
        (0..k).map(|i| (i + 1) as f64 * PI * (self.a[i] * other.a[i] + self.b[i] * other.b[i])).sum()
    }

    /// `∫_{B(center, radius)} ‖∇H‖²` by polar quadrature.
    pub fn local_energy(&self, center: Complex64, radius: f64, rule: &DiscRule) -> f64 {
        rule.integrate(center, radius, |z| {
            let (gx, gy) = self.gradient(z);
            gx * gx + gy * gy
        })
    }

    /// `λ·self + μ·other`.
    pub fn combine(&self, lambda: f64, other: &Self, mu: f64) -> Self {
        let k = self.k_max().max(other.k_max());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        Self {
            a0: lambda * self.a0 + mu * other.a0,
            a: (0..k).map(|i| lambda * get(&self.a, i) + mu * get(&other.a, i)).collect(),
            b: (0..k).map(|i| lambda * get(&self.b, i) + mu * get(&other.b, i)).collect(),
        }
    }
}

/// Harmonic extension of the degree-`k_max` Fourier truncation of
/// `boundary`, with coefficients from `n_theta` equispaced samples.
pub fn poisson_extend(
    boundary: &BoundaryFunction,
    n_theta: usize,
    k_max: usize,
) -> Result<HarmonicField, ContinuumError> {
    let native = boundary.table_len().unwrap_or(usize::MAX);
    if n_theta < 4 * k_max || native < 4 * k_max || n_theta == 0 {
        return Err(ContinuumError::Undersampled { samples: n_theta.min(native), k_max });
    }
    let values = boundary.sample(n_theta);
    let n = n_theta as f64;
    let a0 = values.iter().sum::<f64>() / n;
    let (mut a, mut b) = (Vec::with_capacity(k_max), Vec::with_capacity(k_max));
    for k in 1..=k_max {
        let (mut ca, mut cb) = (0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let t = TAU * (k * j % n_theta) as f64 / n;
            ca += v * t.cos();
            cb += v * t.sin();
        }
        a.push(2.0 * ca / n);
        b.push(2.0 * cb / n);
    }
    HarmonicField::new(a0, a, b)
}

/// Douglas integral `(1/2π) ∬ |φ(ξ) − φ(ζ)|² / |ξ − ζ|² |dξ| |dζ|` by the
/// trapezoid rule on `n_theta` angles. The diagonal carries the limit
/// `φ′(θ)²`, estimated by a symmetric difference quotient.
pub fn douglas_energy(boundary: &BoundaryFunction, n_theta: usize) -> Result<f64, ContinuumError> {
    if n_theta < 64 || n_theta % 2 == 1 {
        return Err(ContinuumError::InvalidArgument(format!("n_theta must be even and at least 64, got {n_theta}")));
    }
    let phi = boundary.sample(n_theta);
    let n = n_theta;
    let h = TAU / n as f64;
    // 1 / |e^{iθ} − 1|² on the grid offsets
    let kernel: Vec<f64> =
        (0..n).map(|d| if d == 0 { 0.0 } else { 1.0 / (4.0 * (0.5 * h * d as f64).sin().powi(2)) }).collect();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for (d, k) in kernel.iter().enumerate().skip(1) {
                let diff = phi[i] - phi[(i + d) % n];
                s += diff * diff * k;
            }
            let slope = (phi[(i + 1) % n] - phi[(i + n - 1) % n]) / (2.0 * h);
            s + slope * slope
        })
        .collect();
    Ok(rows.iter().sum::<f64>() * h * h / TAU)
}
