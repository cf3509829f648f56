use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use super::TransferError;
use crate::packing::DoublePacking;

/// Piecewise-affine extension of a vertex function over the triangles
/// `(z(u), z(w), z(f))`, one per edge `uw` of each packed face `f`. The
/// value at `z(f)` is the mean of the values on the vertices of `f`.
#[derive(Clone, Debug)]
pub struct AffineExtension {
    nodes: Vec<Complex64>,
    values: Vec<f64>,
    triangles: Vec<[usize; 3]>,
    locator: Locator,
    vertex_count: usize,
}

#[derive(Clone, Debug)]
struct Locator {
    origin: Complex64,
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl Locator {
    fn key(&self, z: Complex64) -> (i64, i64) {
        (((z.re - self.origin.re) / self.cell).floor() as i64, ((z.im - self.origin.im) / self.cell).floor() as i64)
    }
}

const INSIDE_SLACK: f64 = 1e-12;

impl AffineExtension {
    pub fn new(packing: &DoublePacking, phi: &[f64]) -> Result<Self, TransferError> {
        let patch = packing.patch();
        let nv = packing.vertex_count();
        if phi.len() != nv {
            return Err(TransferError::DomainMismatch { expected: nv, got: phi.len() });
        }
        let mut nodes: Vec<Complex64> = packing.vertex_centers().to_vec();
        nodes.extend_from_slice(packing.face_centers());
        let mut values = phi.to_vec();
        let mut triangles = Vec::new();
        for (f, verts) in patch.faces().iter().enumerate() {
            values.push(verts.iter().map(|&v| phi[v]).sum::<f64>() / verts.len() as f64);
            for i in 0..verts.len() {
                let (u, w) = (verts[i], verts[(i + 1) % verts.len()]);
                let tri = [u, w, nv + f];
                let area = signed_area(&nodes, tri);
                let scale = (nodes[u] - nodes[w]).norm_sqr().max((nodes[u] - nodes[nv + f]).norm_sqr());
                if !(area.abs() > 1e-14 * scale) {
                    return Err(TransferError::DegenerateTriangle { index: triangles.len(), area });
                }
                triangles.push(if area > 0.0 { tri } else { [w, u, nv + f] });
            }
        }
        let locator = build_locator(&nodes, &triangles);
        Ok(Self { nodes, values, triangles, locator, vertex_count: nv })
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangles(&self) -> impl Iterator<Item = [Complex64; 3]> + '_ {
        self.triangles.iter().map(|t| [self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]])
    }

    /// Value at the center of face `f`.
    pub fn face_value(&self, f: usize) -> f64 {
        self.values[self.vertex_count + f]
    }

    fn barycentric(&self, t: usize, z: Complex64) -> [f64; 3] {
        let [a, b, c] = self.triangles[t].map(|i| self.nodes[i]);
        let cross = |p: Complex64, q: Complex64| p.re * q.im - p.im * q.re;
        let area = cross(b - a, c - a);
        let l1 = cross(c - b, z - b) / area;
        let l2 = cross(a - c, z - c) / area;
        [l1, l2, 1.0 - l1 - l2]
    }

    fn interpolate(&self, t: usize, l: [f64; 3]) -> f64 {
        let [i, j, k] = self.triangles[t];
        l[0] * self.values[i] + l[1] * self.values[j] + l[2] * self.values[k]
    }

    /// Value at `z`, or `None` outside the carrier.
    pub fn eval(&self, z: Complex64) -> Option<f64> {
        let candidates = self.locator.buckets.get(&self.locator.key(z))?;
        let mut best: Option<(f64, usize, [f64; 3])> = None;
        for &t in candidates {
            let l = self.barycentric(t, z);
            let worst = l.iter().fold(f64::INFINITY, |m, &x| m.min(x));
            if worst >= 0.0 {
                return Some(self.interpolate(t, l));
            }
            if worst >= -INSIDE_SLACK && best.is_none_or(|b| worst > b.0) {
                best = Some((worst, t, l));
            }
        }
        best.map(|(_, t, l)| self.interpolate(t, l))
    }

    /// Value at `z` computed from triangle `t` alone, clamped or not.
    pub fn eval_in_triangle(&self, t: usize, z: Complex64) -> f64 {
        self.interpolate(t, self.barycentric(t, z))
    }

    /// Gradient of the interpolant on triangle `t`.
    pub fn gradient(&self, t: usize) -> (f64, f64) {
        let [i, j, k] = self.triangles[t];
        let (p0, p1, p2) = (self.nodes[i], self.nodes[j], self.nodes[k]);
        let (d1, d2) = (p1 - p0, p2 - p0);
        let (f1, f2) = (self.values[j] - self.values[i], self.values[k] - self.values[i]);
        let det = d1.re * d2.im - d1.im * d2.re;
        ((f1 * d2.im - f2 * d1.im) / det, (d1.re * f2 - d2.re * f1) / det)
    }

    /// Sum over triangles of area times squared gradient.
    pub fn energy(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let (gx, gy) = self.gradient(t);
                signed_area(&self.nodes, self.triangles[t]) * (gx * gx + gy * gy)
            })
            .sum()
    }

    /// Total area of the triangles.
    pub fn carrier_area(&self) -> f64 {
        self.triangles.iter().map(|&t| signed_area(&self.nodes, t)).sum()
    }
}

fn signed_area(nodes: &[Complex64], t: [usize; 3]) -> f64 {
    let (a, b, c) = (nodes[t[0]], nodes[t[1]], nodes[t[2]]);
    0.5 * ((b - a).re * (c - a).im - (b - a).im * (c - a).re)
}

fn build_locator(nodes: &[Complex64], triangles: &[[usize; 3]]) -> Locator {
    let (mut lo, mut hi) = (Complex64::new(f64::INFINITY, f64::INFINITY), Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for z in nodes {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let extent = (hi.re - lo.re).max(hi.im - lo.im).max(1e-300);
    let cells_per_side = (triangles.len() as f64).sqrt().ceil().max(1.0);
    let mut locator = Locator { origin: lo, cell: extent / cells_per_side, buckets: HashMap::new() };
    let pad = extent * 1e-12;
    for (i, t) in triangles.iter().enumerate() {
        let pts = t.map(|k| nodes[k]);
        let min = Complex64::new(pts.iter().map(|p| p.re).fold(f64::INFINITY, f64::min) - pad, pts.iter().map(|p| p.im).fold(f64::INFINITY, f64::min) - pad);
        let max = Complex64::new(pts.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max) + pad, pts.iter().map(|p| p.im).fold(f64::NEG_INFINITY, f64::max) + pad);
        let (k0, k1) = (locator.key(min), locator.key(max));
        for x in k0.0..=k1.0 {
            for y in k0.1..=k1.1 {
                locator.buckets.entry((x, y)).or_default().push(i);
            }
        }
    }
    locator
}

/// Energy of the affine extension of `phi`.
pub fn energy_of_extension(packing: &DoublePacking, phi: &[f64]) -> Result<f64, TransferError> {
    Ok(AffineExtension::new(packing, phi)?.energy())
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuityCheck {
    /// `δ·sup{|φ(u) − φ(w)| : u, w share a face}`.
    pub bound: f64,
    /// Largest `|A[φ](z) − φ(v)|` seen at a probe in some `P_δ(v)`.
    pub max_deviation: f64,
    /// `max_deviation − bound`; positive values are violations.
    pub worst_slack: f64,
    pub probes: usize,
}

/// Probes `A[φ]` on rings inside each shrunken disc `P_δ(v)` and compares
/// the deviation from `φ(v)` against the face-oscillation bound.
pub fn continuity_bound_check(
    packing: &DoublePacking,
    phi: &[f64],
    delta: f64,
) -> Result<ContinuityCheck, TransferError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(TransferError::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
    }
    let ext = AffineExtension::new(packing, phi)?;
    let face_osc = packing
        .patch()
        .faces()
        .iter()
        .map(|f| {
            let (lo, hi) = f.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(phi[v]), h.max(phi[v])));
            hi - lo
        })
        .fold(0.0, f64::max);
    let bound = delta * face_osc;
    let (mut max_deviation, mut probes) = (0.0f64, 0usize);
    for v in 0..packing.vertex_count() {
        let (c, r) = (packing.vertex_center(v), delta * packing.vertex_radius(v));
        for ring in [0.25, 0.5, 0.75, 1.0] {
            for j in 0..16 {
                let z = c + Complex64::from_polar(ring * r, std::f64::consts::TAU * j as f64 / 16.0);
                if let Some(x) = ext.eval(z) {
                    max_deviation = max_deviation.max((x - phi[v]).abs());
                    probes += 1;
                }
            }
        }
    }
    Ok(ContinuityCheck { bound, max_deviation, worst_slack: max_deviation - bound, probes })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::map::{grid_patch, Truncation};
    use crate::packing::{pack, BoundaryMode};

    fn square_grid() -> DoublePacking {
        let t = Truncation::from_outer_face(Arc::new(grid_patch(5, 5).unwrap()), 12).unwrap();
        pack(&t, &BoundaryMode::Uniform(1.0), 1e-12).unwrap()
    }

    #[test]
    fn linear_data_is_reproduced_on_the_lattice() {
        let p = square_grid();
        let phi: Vec<f64> = p.vertex_centers().iter().map(|z| 2.0 * z.re - 0.5 * z.im + 1.0).collect();
        let ext = AffineExtension::new(&p, &phi).unwrap();
        for t in 0..ext.triangle_count() {
            let (gx, gy) = ext.gradient(t);
            assert!((gx - 2.0).abs() < 1e-8 && (gy + 0.5).abs() < 1e-8);
        }
        let z = Complex64::new(0.05, -0.1);
        assert!((ext.eval(z).unwrap() - (2.0 * z.re - 0.5 * z.im + 1.0)).abs() < 1e-8);
        assert!((ext.energy() - 4.25 * ext.carrier_area()).abs() < 1e-8);
    }

    #[test]
    fn points_off_the_carrier_have_no_value() {
        let p = square_grid();
        let ext = AffineExtension::new(&p, &vec![1.0; p.vertex_count()]).unwrap();
        assert_eq!(ext.eval(Complex64::new(0.99, 0.99)), None);
        assert_eq!(ext.eval(Complex64::new(0.0, 0.0)), Some(1.0));
    }

    #[test]
    fn wrong_length_is_rejected() {
        let p = square_grid();
        assert!(matches!(AffineExtension::new(&p, &[0.0]), Err(TransferError::DomainMismatch { .. })));
    }
}
