//! Dirichlet space of the unit disc.
//!
//! Harmonic fields are carried as Fourier coefficients of their boundary
//! values, so energies and gradients are exact. General fields are
//! sampled on a Cartesian grid.

mod boundary;
mod grid;
mod harmonic;
mod quadrature;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::SolveError;

pub use boundary::BoundaryFunction;
pub use grid::{grid_capacity, GridCapacity, GridField, TargetDisc};
pub use harmonic::{douglas_energy, poisson_extend, HarmonicField};
pub use quadrature::{gauss_legendre, DiscRule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContinuumError {
    #[error("{samples} boundary samples cannot resolve degree {k_max}; need at least {}", 4 * k_max)]
    Undersampled { samples: usize, k_max: usize },
    #[error("region is not contained in the unit disc")]
    RegionOutsideDisc,
    #[error("target reaches the unit circle")]
    TargetTouchesBoundary,
    #[error("grid fields have different spacings")]
    GridMismatch,
    #[error("{0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("linear solve failed: {0}")]
    Solve(#[from] SolveError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum DiscField {
    Harmonic(HarmonicField),
    Grid(GridField),
}

impl From<HarmonicField> for DiscField {
    fn from(h: HarmonicField) -> Self {
        DiscField::Harmonic(h)
    }
}

impl From<GridField> for DiscField {
    fn from(g: GridField) -> Self {
        DiscField::Grid(g)
    }
}

impl DiscField {
    /// Value at `z`; `None` outside the closed disc or the grid mask.
    pub fn eval(&self, z: Complex64) -> Option<f64> {
        match self {
            DiscField::Harmonic(h) => (z.norm_sqr() <= 1.0 + 1e-12).then(|| h.eval(z)),
            DiscField::Grid(g) => g.eval(z),
        }
    }

    pub fn as_harmonic(&self) -> Option<&HarmonicField> {
        match self {
            DiscField::Harmonic(h) => Some(h),
            DiscField::Grid(_) => None,
        }
    }

    fn to_grid(&self, h: f64) -> Result<GridField, ContinuumError> {
        match self {
            DiscField::Harmonic(f) => GridField::sample(h, |z| f.eval(z)),
            DiscField::Grid(g) => Ok(g.clone()),
        }
    }
}

/// A disc `{|z − center| < radius}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub center: Complex64,
    pub radius: f64,
}

impl Region {
    pub fn centered(radius: f64) -> Self {
        Self { center: Complex64::new(0.0, 0.0), radius }
    }
}

/// Dirichlet energy over the centered disc of radius `rho`.
pub fn energy_continuous(field: &DiscField, rho: f64) -> Result<f64, ContinuumError> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(ContinuumError::InvalidArgument(format!("inner radius must lie in (0, 1], got {rho}")));
    }
    Ok(match field {
        DiscField::Harmonic(h) => h.energy(rho),
        DiscField::Grid(g) => g.energy(rho),
    })
}

/// `∫_O ΦΨ + ∫_𝔻 ∇Φ·∇Ψ`.
pub fn inner_product_continuous(a: &DiscField, b: &DiscField, region: Region) -> Result<f64, ContinuumError> {
    if !(region.radius > 0.0) || region.center.norm() + region.radius > 1.0 + 1e-12 {
        return Err(ContinuumError::RegionOutsideDisc);
    }
    let gradient = match (a, b) {
        (DiscField::Harmonic(x), DiscField::Harmonic(y)) => x.energy_form(y),
        (DiscField::Grid(g), other) | (other, DiscField::Grid(g)) => g.energy_form(&other.to_grid(g.spacing())?, 1.0)?,
    };
    let rule = DiscRule::default();
    let mass = rule.integrate(region.center, region.radius, |z| {
        a.eval(z).unwrap_or(0.0) * b.eval(z).unwrap_or(0.0)
    });
    Ok(mass + gradient)
}
