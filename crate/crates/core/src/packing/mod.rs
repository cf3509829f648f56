//! Double circle packings of finite polyhedral patches.
//!
//! A patch comes from a [`Truncation`]: its vertices carry primal circles,
//! its packed faces carry dual circles, adjacent primal circles are
//! tangent, and each dual circle crosses the circles of its vertices at
//! right angles.

mod geometry;
mod layout;
mod output;
mod patch;
mod solve;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::map::{MapError, Truncation};

pub use geometry::{compute_delta0, edge_condition_holds, geometry_report, sausages_disjoint, GeometryReport};
pub use layout::Residuals;
pub use output::{circle_records, packing_json, packing_svg, CircleRecord};
pub use patch::{Kite, Patch, Spoke};
pub use solve::{angle_sums, solve_radii, BoundaryMode, Radii};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PackingError {
    #[error("patch is not polyhedral: {0}")]
    NotPolyhedral(String),
    #[error("radius solver stopped at defect {defect:e} after {iterations} iterations")]
    NoConvergence { defect: f64, iterations: usize },
    #[error("layout residual {residual:e} exceeds {limit:e}")]
    PlacementInconsistent { residual: f64, limit: f64 },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("linear solve failed: {0}")]
    Numerical(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A laid-out double circle packing of a patch.
#[derive(Clone, Debug)]
pub struct DoublePacking {
    patch: Patch,
    radii: Radii,
    vertex_center: Vec<Complex64>,
    vertex_radius: Vec<f64>,
    face_center: Vec<Complex64>,
    face_radius: Vec<f64>,
    residuals: Residuals,
    delta0: f64,
}

/// Summary of a packing run.
#[derive(Clone, Debug, Serialize)]
pub struct PackingStats {
    pub vertices: usize,
    pub faces: usize,
    pub max_defect: f64,
    pub sweeps: usize,
    pub newton_steps: usize,
}

/// Builds the patch, solves radii, lays out and normalizes.
pub fn pack(trunc: &Truncation, mode: &BoundaryMode, tol: f64) -> Result<DoublePacking, PackingError> {
    let patch = Patch::new(trunc)?;
    let radii = solve_radii(&patch, mode, tol)?;
    layout(patch, radii, tol)
}

/// Lays out solved radii. Euclidean packings are translated so the root is
/// at the origin and scaled into the closed unit disc; disc packings are
/// already there. Fails when any tangency, orthogonality or boundary
/// residual exceeds `10·√tol`.
pub fn layout(patch: Patch, radii: Radii, tol: f64) -> Result<DoublePacking, PackingError> {
    let mut placement = layout::place(&patch, &radii)?;
    if !radii.disc {
        layout::normalize(&patch, &mut placement);
    }
    let residuals = layout::residuals(&patch, &placement, radii.disc);
    let limit = 10.0 * tol.sqrt();
    if !(residuals.max() <= limit) {
        return Err(PackingError::PlacementInconsistent { residual: residuals.max(), limit });
    }
    let mut packing = DoublePacking {
        patch,
        radii,
        vertex_center: placement.vertex_center,
        vertex_radius: placement.vertex_radius,
        face_center: placement.face_center,
        face_radius: placement.face_radius,
        residuals,
        delta0: 0.5,
    };
    packing.delta0 = compute_delta0(&packing);
    Ok(packing)
}

/// Circle positions without normalization, for checking how the layout
/// responds to rescaled radii.
pub fn raw_centers(patch: &Patch, radii: &Radii) -> Result<(Vec<Complex64>, Vec<Complex64>), PackingError> {
    let p = layout::place(patch, radii)?;
    Ok((p.vertex_center, p.face_center))
}

impl DoublePacking {
    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn radii(&self) -> &Radii {
        &self.radii
    }

    pub fn is_disc(&self) -> bool {
        self.radii.disc
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_center.len()
    }

    pub fn face_count(&self) -> usize {
        self.face_center.len()
    }

    pub fn vertex_center(&self, v: usize) -> Complex64 {
        self.vertex_center[v]
    }

    pub fn vertex_radius(&self, v: usize) -> f64 {
        self.vertex_radius[v]
    }

    pub fn face_center(&self, f: usize) -> Complex64 {
        self.face_center[f]
    }

    pub fn face_radius(&self, f: usize) -> f64 {
        self.face_radius[f]
    }

    pub fn vertex_centers(&self) -> &[Complex64] {
        &self.vertex_center
    }

    pub fn vertex_radii(&self) -> &[f64] {
        &self.vertex_radius
    }

    pub fn face_centers(&self) -> &[Complex64] {
        &self.face_center
    }

    pub fn face_radii(&self) -> &[f64] {
        &self.face_radius
    }

    pub fn residuals(&self) -> Residuals {
        self.residuals
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn stats(&self) -> PackingStats {
        PackingStats {
            vertices: self.vertex_count(),
            faces: self.face_count(),
            max_defect: self.radii.max_defect,
            sweeps: self.radii.sweeps,
            newton_steps: self.radii.newton_steps,
        }
    }

    /// Largest boundary vertex radius.
    pub fn max_boundary_radius(&self) -> f64 {
        (0..self.vertex_count())
            .filter(|&v| self.patch.is_boundary(v))
            .map(|v| self.vertex_radius[v])
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::map::{generate_tiling, grid_patch, truncate, Truncation};

    #[test]
    fn grid_centers_on_scaled_lattice() {
        let m = Arc::new(grid_patch(11, 11).unwrap());
        let t = Truncation::from_outer_face(m, 60).unwrap();
        let p = pack(&t, &BoundaryMode::Uniform(1.0), 1e-12).unwrap();
        let r = p.vertex_radius(0);
        for v in 0..p.vertex_count() {
            let z = p.vertex_center(v) / (2.0 * r);
            assert!((z.re - z.re.round()).abs() < 1e-9 && (z.im - z.im.round()).abs() < 1e-9);
            assert!((p.vertex_radius(v) - r).abs() < 1e-12);
        }
        assert_eq!(p.delta0(), 0.5);
    }

    #[test]
    fn flower_neighbors_on_common_circle() {
        let m = Arc::new(generate_tiling(7, 3, 2).unwrap());
        let t = truncate(m, 0, 1).unwrap();
        for mode in [BoundaryMode::Uniform(1.0), BoundaryMode::Disc] {
            let p = pack(&t, &mode, 1e-12).unwrap();
            let root = p.patch().root();
            assert!(p.vertex_center(root).norm() < 1e-12);
            let d: Vec<f64> = t.boundary().iter().map(|&v| p.vertex_center(v).norm()).collect();
            assert!(d.iter().all(|x| (x - d[0]).abs() < 1e-9), "{mode:?}");
        }
    }

    #[test]
    fn disc_packing_boundary_touches_unit_circle() {
        let m = Arc::new(generate_tiling(7, 3, 4).unwrap());
        let t = truncate(m, 0, 4).unwrap();
        let p = pack(&t, &BoundaryMode::Disc, 1e-10).unwrap();
        for &b in t.boundary() {
            assert!((p.vertex_center(b).norm() + p.vertex_radius(b) - 1.0).abs() < 1e-6);
        }
        assert!(p.residuals().max() < 1e-6);
    }
}
