use serde::Serialize;

use super::TransferError;
use crate::map::Truncation;
use crate::packing::DoublePacking;

/// Ball radii tried around each center, as fractions of its distance to
/// the unit circle.
const RADIUS_FRACTIONS: [f64; 3] = [1.0, 0.5, 0.25];

/// Fewest pairs with a positive ratio needed for a fit.
const MIN_PAIRS: usize = 10;

/// Smallest standard deviation of `log x` over the pairs that still
/// determines a slope.
const MIN_LOG_SPREAD: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct HarnackFit {
    /// Least-squares slope of log ratio against log scaled distance;
    /// `None` when every ratio vanishes.
    pub beta_hat: Option<f64>,
    /// Smallest `C` with `ratio ≤ C·x^β̂` on all pairs.
    pub c_hat: Option<f64>,
    pub alpha: f64,
    /// `(|z(u) − z(v)| / r, |h(u) − h(v)| / osc)` pairs.
    pub pairs: Vec<(f64, f64)>,
}

/// Fits `|h(u) − h(v)| ≤ C (|z(u) − z(v)|/r)^β · osc_{B(z(v), r)} h` over
/// balls about interior vertex centers and vertices `u` with `z(u)` in
/// `B(z(v), αr)`.
pub fn harnack_fit(
    trunc: &Truncation,
    packing: &DoublePacking,
    h_samples: &[Vec<f64>],
    alpha: f64,
) -> Result<HarnackFit, TransferError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(TransferError::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let n = packing.vertex_count();
    if let Some(h) = h_samples.iter().find(|h| h.len() != n) {
        return Err(TransferError::DomainMismatch { expected: n, got: h.len() });
    }
    let centers = packing.vertex_centers();
    let mut pairs = Vec::new();
    for &v in trunc.interior() {
        let d = 1.0 - centers[v].norm();
        for frac in RADIUS_FRACTIONS {
            let r = frac * d;
            let ball: Vec<usize> = (0..n).filter(|&u| (centers[u] - centers[v]).norm() < r).collect();
            let inner: Vec<(usize, f64)> = ball
                .iter()
                .filter(|&&u| u != v)
                .map(|&u| (u, (centers[u] - centers[v]).norm() / r))
                .filter(|&(_, x)| x < alpha)
                .collect();
            if inner.is_empty() {
                continue;
            }
            for h in h_samples {
                let (lo, hi) = ball.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), &w| (l.min(h[w]), u.max(h[w])));
                let osc = hi - lo;
                let scale = h.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
                for &(u, x) in &inner {
                    let y = if osc > 1e-14 * scale { (h[u] - h[v]).abs() / osc } else { 0.0 };
                    pairs.push((x, y));
                }
            }
        }
    }
    let positive: Vec<(f64, f64)> = pairs.iter().copied().filter(|&(_, y)| y > 0.0).collect();
    if positive.is_empty() {
        return Ok(HarnackFit { beta_hat: None, c_hat: None, alpha, pairs });
    }
    if positive.len() < MIN_PAIRS {
        return Err(TransferError::TooFewPairs { found: positive.len() });
    }
    let m = positive.len() as f64;
    let (sx, sy) = positive.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / m, sy / m);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in &positive {
        sxy += (x.ln() - mx) * (y.ln() - my);
        sxx += (x.ln() - mx).powi(2);
    }
    if sxx < MIN_LOG_SPREAD * MIN_LOG_SPREAD * m {
        return Err(TransferError::DegenerateFit { pairs: positive.len() });
    }
    let beta = sxy / sxx;
    let c = positive.iter().map(|&(x, y)| y / x.powf(beta)).fold(0.0, f64::max);
    Ok(HarnackFit { beta_hat: Some(beta), c_hat: Some(c), alpha, pairs })
}
