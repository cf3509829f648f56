use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::{AffineExtension, TransferError};
use crate::continuum::{poisson_extend, BoundaryFunction, DiscField, DiscRule, HarmonicField};
use crate::map::Truncation;
use crate::packing::DoublePacking;
use crate::potential::{energy, solve_dirichlet, VertexFunction};

/// Anything that can be evaluated at points of the plane.
pub trait Field {
    fn value_at(&self, z: Complex64) -> Option<f64>;
}

impl Field for DiscField {
    fn value_at(&self, z: Complex64) -> Option<f64> {
        self.eval(z)
    }
}

impl Field for HarmonicField {
    fn value_at(&self, z: Complex64) -> Option<f64> {
        (z.norm_sqr() <= 1.0 + 1e-12).then(|| self.eval(z))
    }
}

impl Field for AffineExtension {
    fn value_at(&self, z: Complex64) -> Option<f64> {
        self.eval(z)
    }
}

/// Mean of `field` over `P_δ₀(v)`, the disc about `z(v)` of radius
/// `δ₀·r(v)`.
pub fn disc_average(packing: &DoublePacking, field: &impl Field, v: usize) -> Result<f64, TransferError> {
    if v >= packing.vertex_count() {
        return Err(TransferError::InvalidArgument(format!("vertex {v} is out of range")));
    }
    let (c, r) = (packing.vertex_center(v), packing.delta0() * packing.vertex_radius(v));
    let rule = DiscRule::default();
    let escaped = std::cell::Cell::new(false);
    let total = rule.average(c, r, |z| {
        field.value_at(z).unwrap_or_else(|| {
            escaped.set(true);
            0.0
        })
    });
    if escaped.get() {
        return Err(TransferError::OutsideDomain { vertex: v });
    }
    Ok(total)
}

/// `H∘z` on every vertex.
pub fn pullback(packing: &DoublePacking, field: &HarmonicField) -> Result<Vec<f64>, TransferError> {
    (0..packing.vertex_count())
        .map(|v| field.value_at(packing.vertex_center(v)).ok_or(TransferError::OutsideDomain { vertex: v }))
        .collect()
}

fn check_sizes(trunc: &Truncation, packing: &DoublePacking) -> Result<(), TransferError> {
    if trunc.vertex_count() != packing.vertex_count() {
        return Err(TransferError::DomainMismatch { expected: trunc.vertex_count(), got: packing.vertex_count() });
    }
    Ok(())
}

/// Harmonic part of `H∘z`: the discrete harmonic function with the
/// boundary values of `H∘z`.
pub fn disc_operator(
    trunc: &Truncation,
    packing: &DoublePacking,
    field: &HarmonicField,
) -> Result<VertexFunction, TransferError> {
    check_sizes(trunc, packing)?;
    let values = pullback(packing, field)?;
    let b: Vec<f64> = trunc.boundary().iter().map(|&v| values[v]).collect();
    Ok(solve_dirichlet(trunc, &b)?)
}

/// Trace circle offset used when none is given: twice the thickness of
/// the outermost layer of circles.
pub fn default_trace_offset(packing: &DoublePacking) -> f64 {
    4.0 * packing.max_boundary_radius()
}

/// Samples per unit of `K_max` taken on the trace circle.
const TRACE_OVERSAMPLING: usize = 8;

/// Largest factor `(1 − ε_trace)^{-k}` by which a trace coefficient may be
/// scaled up when continued to the unit circle.
pub const MAX_TRACE_GAIN: f64 = 10.0;

/// Highest degree `cont_operator` keeps for a trace offset: `k_max`, cut
/// down so that the continuation gain stays within [`MAX_TRACE_GAIN`].
pub fn effective_degree(eps_trace: f64, k_max: usize) -> usize {
    let rate = -(1.0 - eps_trace).ln();
    let cap = (MAX_TRACE_GAIN.ln() / rate).floor();
    if cap.is_finite() { k_max.min(cap as usize).max(1) } else { k_max }
}

/// Harmonic field agreeing with the Fourier truncation of `A[h]` on the
/// circle of radius `1 − ε_trace`, up to degree
/// [`effective_degree`]`(ε_trace, k_max)`.
pub fn cont_operator(
    trunc: &Truncation,
    packing: &DoublePacking,
    h: &[f64],
    eps_trace: f64,
    k_max: usize,
) -> Result<HarmonicField, TransferError> {
    check_sizes(trunc, packing)?;
    if !packing.is_disc() {
        return Err(TransferError::NotDiscMode);
    }
    if !(eps_trace > 0.0 && eps_trace < 1.0) || k_max == 0 {
        return Err(TransferError::InvalidArgument(format!("need 0 < ε_trace < 1 and K_max ≥ 1, got {eps_trace}, {k_max}")));
    }
    let k_max = effective_degree(eps_trace, k_max);
    let ext = AffineExtension::new(packing, h)?;
    let rho = 1.0 - eps_trace;
    let n = (TRACE_OVERSAMPLING * k_max).max(64);
    let mut samples = Vec::with_capacity(n);
    for j in 0..n {
        let theta = TAU * j as f64 / n as f64;
        let x = ext.eval(Complex64::from_polar(rho, theta)).ok_or(TransferError::TraceOutsideCarrier { theta })?;
        samples.push(x);
    }
    let trace = poisson_extend(&BoundaryFunction::from_samples(samples)?, n, k_max)?;
    let scale = |i: usize, c: f64| c / rho.powi(i as i32 + 1);
    Ok(HarmonicField {
        a0: trace.a0,
        a: trace.a.iter().enumerate().map(|(i, &c)| scale(i, c)).collect(),
        b: trace.b.iter().enumerate().map(|(i, &c)| scale(i, c)).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferReport {
    /// `E(A[h]) / E(h)`.
    pub energy_ratio_a: f64,
    /// `E(Disc[H]) / E(H)` for `H = Cont[h]`.
    pub energy_ratio_r: f64,
    /// `‖h − Disc[Cont[h]]‖ / ‖h‖` in the energy seminorm.
    pub roundtrip_residual: f64,
    /// Largest `|h − H∘z|` over interior vertices adjacent to the boundary.
    pub asymptotic_gap: f64,
    /// `max h − min h`.
    pub oscillation: f64,
    pub eps_trace: f64,
    /// Degree actually kept by `Cont`.
    pub k_max: usize,
}

/// Sends `h` through `Cont` and back through `Disc`.
pub fn roundtrip(
    trunc: &Truncation,
    packing: &DoublePacking,
    h: &[f64],
    eps_trace: f64,
    k_max: usize,
) -> Result<TransferReport, TransferError> {
    let big_h = cont_operator(trunc, packing, h, eps_trace, k_max)?;
    let back = disc_operator(trunc, packing, &big_h)?;
    let map = trunc.map();
    let e_h = energy(map, h)?;
    let diff: Vec<f64> = h.iter().zip(back.iter()).map(|(a, b)| a - b).collect();
    let e_diff = energy(map, &diff)?;
    let e_field = big_h.energy(1.0);
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let on_z = pullback(packing, &big_h)?;
    let rim = trunc.interior().iter().filter(|&&v| map.neighbors(v).any(|u| trunc.is_boundary(u)));
    let asymptotic_gap = rim.map(|&v| (h[v] - on_z[v]).abs()).fold(0.0, f64::max);
    let (lo, hi) = h.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), &x| (l.min(x), u.max(x)));
    Ok(TransferReport {
        energy_ratio_a: ratio(AffineExtension::new(packing, h)?.energy(), e_h),
        energy_ratio_r: ratio(energy(map, &back)?, e_field),
        roundtrip_residual: ratio(e_diff, e_h).sqrt(),
        asymptotic_gap,
        oscillation: hi - lo,
        eps_trace,
        k_max: big_h.k_max(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::map::{generate_tiling, truncate};
    use crate::packing::{pack, BoundaryMode};

    fn heptagonal() -> (Truncation, DoublePacking) {
        let t = truncate(Arc::new(generate_tiling(7, 3, 3).unwrap()), 0, 3).unwrap();
        let p = pack(&t, &BoundaryMode::Disc, 1e-10).unwrap();
        (t, p)
    }

    #[test]
    fn degree_cap_bounds_the_continuation_gain() {
        for eps in [0.01, 0.1, 0.3, 0.6] {
            let k = effective_degree(eps, 64);
            assert!((1.0 - eps).powi(-(k as i32)) <= MAX_TRACE_GAIN + 1e-9);
        }
        assert_eq!(effective_degree(0.01, 8), 8);
        assert_eq!(effective_degree(0.99, 8), 1);
    }

    #[test]
    fn constants_pass_through_both_operators() {
        let (t, p) = heptagonal();
        let h = vec![2.5; t.vertex_count()];
        let field = cont_operator(&t, &p, &h, default_trace_offset(&p), 8).unwrap();
        assert!((field.a0 - 2.5).abs() < 1e-12);
        assert!(field.a.iter().chain(&field.b).all(|c| c.abs() < 1e-12));
        let back = disc_operator(&t, &p, &HarmonicField::constant(-1.0)).unwrap();
        assert!(back.iter().all(|x| (x + 1.0).abs() < 1e-10));
        let report = roundtrip(&t, &p, &h, default_trace_offset(&p), 8).unwrap();
        assert_eq!(report.roundtrip_residual, 0.0);
        assert!(report.asymptotic_gap < 1e-12);
    }

    #[test]
    fn disc_average_of_squared_modulus() {
        let (_, p) = heptagonal();
        let field = DiscField::Harmonic(HarmonicField::real_power(1));
        let quadratic = |z: Complex64| Some(z.norm_sqr());
        struct Closure<F>(F);
        impl<F: Fn(Complex64) -> Option<f64>> Field for Closure<F> {
            fn value_at(&self, z: Complex64) -> Option<f64> {
                (self.0)(z)
            }
        }
        for v in [0, 3, 10] {
            let (c, r) = (p.vertex_center(v), p.delta0() * p.vertex_radius(v));
            assert!((disc_average(&p, &field, v).unwrap() - c.re).abs() < 1e-12);
            let expected = c.norm_sqr() + r * r / 2.0;
            assert!((disc_average(&p, &Closure(quadratic), v).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_packing_cannot_be_continued() {
        let t = truncate(Arc::new(generate_tiling(7, 3, 2).unwrap()), 0, 2).unwrap();
        let p = pack(&t, &BoundaryMode::Uniform(1.0), 1e-10).unwrap();
        let h = vec![0.0; t.vertex_count()];
        assert_eq!(cont_operator(&t, &p, &h, 0.1, 4).unwrap_err(), TransferError::NotDiscMode);
    }
}
