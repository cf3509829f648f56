//! Operators between discrete harmonic functions on a packed map and
//! harmonic functions on the disc, with the diagnostics that measure how
//! close they come to being mutually inverse.

mod affine;
mod harnack;
mod operators;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::continuum::{grid_capacity, ContinuumError, HarmonicField, TargetDisc};
use crate::map::{generate_tiling, truncate, MapError, Truncation};
use crate::packing::{pack, BoundaryMode, DoublePacking, PackingError};
use crate::potential::{capacity, energy, solve_dirichlet, PotentialError, VertexFunction};

pub use affine::{continuity_bound_check, energy_of_extension, AffineExtension, ContinuityCheck};
pub use harnack::{harnack_fit, HarnackFit};
pub use operators::{
    cont_operator, default_trace_offset, disc_average, effective_degree, MAX_TRACE_GAIN, disc_operator, pullback, roundtrip, Field, TransferReport,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransferError {
    #[error("triangle {index} of the carrier is degenerate (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("function has {got} values, expected {expected}")]
    DomainMismatch { expected: usize, got: usize },
    #[error("disc of vertex {vertex} leaves the field's domain")]
    OutsideDomain { vertex: usize },
    #[error("packing was not computed in disc mode")]
    NotDiscMode,
    #[error("trace circle leaves the carrier at angle {theta}")]
    TraceOutsideCarrier { theta: f64 },
    #[error("only {found} usable pairs for the Harnack fit")]
    TooFewPairs { found: usize },
    #[error("scaled distances of the {pairs} pairs are too concentrated to fit a slope")]
    DegenerateFit { pairs: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Continuum(#[from] ContinuumError),
}

#[derive(Clone, Debug, Serialize)]
pub struct CapacityComparison {
    pub delta: f64,
    pub discrete: f64,
    pub continuum: f64,
    /// `continuum / discrete`, or 0 for an empty set.
    pub ratio: f64,
}

/// Capacity of a vertex set against the grid capacity of the union of
/// its shrunken discs `P_δ(v)`.
pub fn capacity_comparison(
    trunc: &Truncation,
    packing: &DoublePacking,
    set: &[usize],
    delta: f64,
    grid_h: f64,
) -> Result<CapacityComparison, TransferError> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(TransferError::InvalidArgument(format!("delta must lie in (0, 1/2], got {delta}")));
    }
    let discrete = capacity(trunc, set)?.value;
    let targets: Vec<TargetDisc> = set
        .iter()
        .map(|&v| TargetDisc::new(packing.vertex_center(v), delta * packing.vertex_radius(v)))
        .collect();
    let continuum = grid_capacity(&targets, grid_h)?.value;
    let ratio = if discrete > 0.0 { continuum / discrete } else { 0.0 };
    Ok(CapacityComparison { delta, discrete, continuum, ratio })
}

/// Discrete harmonic function with boundary values `g(arg z(v))`.
pub fn boundary_sourced(
    trunc: &Truncation,
    packing: &DoublePacking,
    g: impl Fn(f64) -> f64,
) -> Result<VertexFunction, TransferError> {
    let b: Vec<f64> = trunc.boundary().iter().map(|&v| g(packing.vertex_center(v).arg())).collect();
    Ok(solve_dirichlet(trunc, &b)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub radius: usize,
    pub vertices: usize,
    pub eps_trace: f64,
    pub report: TransferReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    pub p: usize,
    pub q: usize,
    pub radii: Vec<usize>,
    pub pack_tol: f64,
    pub k_max: usize,
    /// Fixed trace offset; the packing's default when `None`.
    pub eps_trace: Option<f64>,
}

/// Roundtrip reports for nested disc-mode truncations of one tiling, with
/// `h` the discrete harmonic function of boundary data `g(θ)`. Radii run
/// in parallel; rows come back in the order given.
pub fn roundtrip_sweep(
    config: &SweepConfig,
    g: impl Fn(f64) -> f64 + Sync,
) -> Result<Vec<SweepRow>, TransferError> {
    let layers = config.radii.iter().copied().max().ok_or_else(|| TransferError::InvalidArgument("no radii".into()))?;
    let map = Arc::new(generate_tiling(config.p, config.q, layers)?);
    config
        .radii
        .par_iter()
        .map(|&radius| {
            let trunc = truncate(map.clone(), 0, radius)?;
            let packing = pack(&trunc, &BoundaryMode::Disc, config.pack_tol)?;
            let h = boundary_sourced(&trunc, &packing, &g)?;
            let eps = config.eps_trace.unwrap_or_else(|| default_trace_offset(&packing));
            let report = roundtrip(&trunc, &packing, &h, eps, config.k_max)?;
            Ok(SweepRow { radius, vertices: trunc.vertex_count(), eps_trace: eps, report })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparabilityScan {
    pub samples: usize,
    /// Extremes of `E(A[φ]) / E(φ)` over random vertex functions.
    pub max_ratio_a: f64,
    pub min_ratio_a: f64,
    /// Extremes of `E(Disc[H]) / E(H)` over random harmonic fields.
    pub max_ratio_r: f64,
    pub min_ratio_r: f64,
}

/// Degree of the random harmonic fields in [`energy_comparability`].
const SCAN_DEGREE: usize = 8;

/// Energy ratios of `A` on i.i.d. uniform vertex functions and of `Disc`
/// on random harmonic fields whose degree-`k` coefficients are uniform on
/// `[-1/k, 1/k]`.
pub fn energy_comparability(
    trunc: &Truncation,
    packing: &DoublePacking,
    samples: usize,
    seed: u64,
) -> Result<ComparabilityScan, TransferError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = packing.vertex_count();
    let mut scan = ComparabilityScan {
        samples,
        max_ratio_a: 0.0,
        min_ratio_a: f64::INFINITY,
        max_ratio_r: 0.0,
        min_ratio_r: f64::INFINITY,
    };
    for _ in 0..samples {
        let phi: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ra = energy_of_extension(packing, &phi)? / energy(trunc.map(), &phi)?;
        let coef = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (1..=SCAN_DEGREE).map(|k| rng.gen_range(-1.0..1.0) / k as f64).collect()
        };
        let (a, b) = (coef(&mut rng), coef(&mut rng));
        let field = HarmonicField::new(0.0, a, b)?;
        let rr = energy(trunc.map(), &disc_operator(trunc, packing, &field)?)? / field.energy(1.0);
        scan.max_ratio_a = scan.max_ratio_a.max(ra);
        scan.min_ratio_a = scan.min_ratio_a.min(ra);
        scan.max_ratio_r = scan.max_ratio_r.max(rr);
        scan.min_ratio_r = scan.min_ratio_r.min(rr);
    }
    Ok(scan)
}
