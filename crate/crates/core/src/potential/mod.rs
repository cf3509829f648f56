//! Discrete Dirichlet space on weighted maps.
//!
//! Functions live on the kept vertices of a [`Truncation`]. The boundary
//! sphere is grounded, so "vanishes on the boundary" stands in for D₀ and
//! harmonic extension of boundary data gives the harmonic part.

mod dirichlet;
mod profile;
mod walk;

use std::fmt::Write;
use std::ops::Deref;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::SolveError;
use crate::map::{PlanarMap, Truncation};

pub(crate) use dirichlet::Reduced;
pub use profile::{quasi_asymptotic_profile, Profile, ProfileRow, ProfileTrend};
pub use walk::{walk_escape_capacity, walk_limit_estimate, WalkEstimate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("function has {got} values, domain has {expected} vertices")]
    DomainMismatch { expected: usize, got: usize },
    #[error("value at vertex {0} is not finite")]
    NonFinite(usize),
    #[error("vertex {0} is out of range")]
    UnknownVertex(usize),
    #[error("target vertex {0} lies on the boundary")]
    TargetOnBoundary(usize),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("linear solve failed: {0}")]
    Solve(#[from] SolveError),
}

/// Real values on the kept vertices of a truncation, in local numbering.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct VertexFunction(Vec<f64>);

impl VertexFunction {
    pub fn new(values: Vec<f64>) -> Result<Self, PotentialError> {
        if let Some(v) = values.iter().position(|x| !x.is_finite()) {
            return Err(PotentialError::NonFinite(v));
        }
        Ok(Self(values))
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self(vec![value; n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Result<Self, PotentialError> {
        Self::new((0..n).map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// `vertex_id,value` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("vertex_id,value\n");
        for (v, x) in self.0.iter().enumerate() {
            writeln!(s, "{v},{x:e}").unwrap();
        }
        s
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| f(*a, *b)).collect())
    }
}

impl Deref for VertexFunction {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

fn check_domain(map: &PlanarMap, phi: &[f64]) -> Result<(), PotentialError> {
    if phi.len() != map.vertex_count() {
        return Err(PotentialError::DomainMismatch { expected: map.vertex_count(), got: phi.len() });
    }
    Ok(())
}

/// Bilinear energy form `½ Σ_e c(e) dφ(e) dψ(e)` over oriented edges.
pub fn energy_form(map: &PlanarMap, phi: &[f64], psi: &[f64]) -> Result<f64, PotentialError> {
    check_domain(map, phi)?;
    check_domain(map, psi)?;
    let mut sum = 0.0;
    for e in (0..map.dart_count()).step_by(2) {
        let (u, v) = (map.origin(e), map.head(e));
        sum += map.conductance(e) * (phi[u] - phi[v]) * (psi[u] - psi[v]);
    }
    Ok(sum)
}

/// Dirichlet energy `½ Σ_e c(e)(φ(e⁻) − φ(e⁺))²`.
pub fn energy(map: &PlanarMap, phi: &[f64]) -> Result<f64, PotentialError> {
    energy_form(map, phi, phi)
}

/// `φ(o)ψ(o)` plus the energy form.
pub fn inner_product(map: &PlanarMap, phi: &[f64], psi: &[f64], o: usize) -> Result<f64, PotentialError> {
    if o >= map.vertex_count() {
        return Err(PotentialError::UnknownVertex(o));
    }
    Ok(phi[o] * psi[o] + energy_form(map, phi, psi)?)
}

/// Largest `|c(v)φ(v) − Σ c(vu)φ(u)|` over interior vertices, relative to
/// the largest `|φ|`.
pub fn harmonic_defect(trunc: &Truncation, phi: &[f64]) -> f64 {
    let map = trunc.map();
    let scale = phi.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    trunc
        .interior()
        .iter()
        .map(|&v| {
            let (mut total, mut weighted) = (0.0, 0.0);
            for e in map.darts_from(v) {
                let c = map.conductance(e);
                total += c;
                weighted += c * phi[map.head(e)];
            }
            (total * phi[v] - weighted).abs() / (total * scale)
        })
        .fold(0.0, f64::max)
}

/// Harmonic extension of `boundary_values`, given in ascending boundary
/// vertex order.
pub fn solve_dirichlet(trunc: &Truncation, boundary_values: &[f64]) -> Result<VertexFunction, PotentialError> {
    let b = trunc.boundary();
    if boundary_values.len() != b.len() {
        return Err(PotentialError::DomainMismatch { expected: b.len(), got: boundary_values.len() });
    }
    let mut values = vec![0.0; trunc.vertex_count()];
    for (&v, &x) in b.iter().zip(boundary_values) {
        values[v] = x;
    }
    if let Some(i) = boundary_values.iter().position(|x| !x.is_finite()) {
        return Err(PotentialError::NonFinite(b[i]));
    }
    let system = Reduced::interior(trunc)?;
    Ok(VertexFunction(system.extend(trunc.map(), &values)?))
}

/// Harmonic function agreeing with `phi` on the boundary.
pub fn harmonic_extension(trunc: &Truncation, phi: &[f64]) -> Result<VertexFunction, PotentialError> {
    check_domain(trunc.map(), phi)?;
    let b: Vec<f64> = trunc.boundary().iter().map(|&v| phi[v]).collect();
    solve_dirichlet(trunc, &b)
}

#[derive(Clone, Debug, Serialize)]
pub struct RoydenSplit {
    pub harmonic_part: VertexFunction,
    pub d0_part: VertexFunction,
}

/// Splits `phi` into a harmonic part with the same boundary values and a
/// remainder vanishing on the boundary.
pub fn royden_project(trunc: &Truncation, phi: &VertexFunction) -> Result<RoydenSplit, PotentialError> {
    let harmonic_part = harmonic_extension(trunc, phi)?;
    let mut d0_part = phi.zip_with(&harmonic_part, |a, b| a - b);
    for &v in trunc.boundary() {
        d0_part.0[v] = 0.0;
    }
    Ok(RoydenSplit { harmonic_part, d0_part })
}

#[derive(Clone, Debug, Serialize)]
pub struct CapacityEstimate {
    pub value: f64,
    pub equilibrium_potential: VertexFunction,
}

fn check_target(trunc: &Truncation, set: &[usize]) -> Result<Vec<bool>, PotentialError> {
    let mut in_set = vec![false; trunc.vertex_count()];
    for &v in set {
        if v >= trunc.vertex_count() {
            return Err(PotentialError::UnknownVertex(v));
        }
        if trunc.is_boundary(v) {
            return Err(PotentialError::TargetOnBoundary(v));
        }
        in_set[v] = true;
    }
    Ok(in_set)
}

/// Capacity of `set` relative to the grounded boundary, as the energy of
/// its equilibrium potential.
pub fn capacity(trunc: &Truncation, set: &[usize]) -> Result<CapacityEstimate, PotentialError> {
    let in_set = check_target(trunc, set)?;
    let map = trunc.map();
    let free: Vec<usize> = trunc.interior().iter().copied().filter(|&v| !in_set[v]).collect();
    let values: Vec<f64> = in_set.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
    let potential = Reduced::new(map, free)?.extend(map, &values)?;
    let value = energy(map, &potential)?;
    Ok(CapacityEstimate { value, equilibrium_potential: VertexFunction(potential) })
}

/// Capacity as `Σ_{v∈A} c(v)·P_v(reach the boundary before returning to
/// A)`, with the escape probabilities from their own linear solve.
pub fn escape_capacity(trunc: &Truncation, set: &[usize]) -> Result<f64, PotentialError> {
    let in_set = check_target(trunc, set)?;
    let map = trunc.map();
    let free: Vec<usize> = trunc.interior().iter().copied().filter(|&v| !in_set[v]).collect();
    let values: Vec<f64> = (0..trunc.vertex_count()).map(|v| if trunc.is_boundary(v) { 1.0 } else { 0.0 }).collect();
    let escape = Reduced::new(map, free)?.extend(map, &values)?;
    let mut total = 0.0;
    for v in (0..trunc.vertex_count()).filter(|&v| in_set[v]) {
        for e in map.darts_from(v) {
            total += map.conductance(e) * escape[map.head(e)];
        }
    }
    Ok(total)
}
