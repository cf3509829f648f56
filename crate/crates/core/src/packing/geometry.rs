use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use super::DoublePacking;

/// Residuals, ring ratios and sausage separation of a packing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryReport {
    pub max_tangency_residual: f64,
    pub max_orthogonality_residual: f64,
    pub max_boundary_residual: f64,
    pub ring_ratio_max: f64,
    pub ring_ratio_min: f64,
    pub sausage_ok: bool,
    pub delta0: f64,
}

const DYADIC_STEPS: usize = 40;

/// Largest `δ = 2^-k ≤ 1/2` passing both the edge-length condition and
/// pairwise sausage disjointness.
pub fn compute_delta0(packing: &DoublePacking) -> f64 {
    let mut delta = 0.5;
    for _ in 0..DYADIC_STEPS {
        if edge_condition_holds(packing, delta) && sausages_disjoint(packing, delta) {
            return delta;
        }
        delta *= 0.5;
    }
    delta
}

/// Relative slack for comparisons that hold with equality in exact
/// arithmetic, such as equal radii at `δ = 1/2`.
const ROUNDING: f64 = 1e-9;

/// `¼|z(u) − z(v)| ≥ δ·r(v)` for every edge in both orientations, up to
/// rounding.
pub fn edge_condition_holds(packing: &DoublePacking, delta: f64) -> bool {
    packing.patch().edges().iter().all(|&(u, v)| {
        let d = (packing.vertex_center(u) - packing.vertex_center(v)).norm();
        let rmax = packing.vertex_radius(u).max(packing.vertex_radius(v));
        0.25 * d >= delta * rmax * (1.0 - ROUNDING)
    })
}

#[derive(Clone, Copy)]
struct Sausage {
    a: Complex64,
    b: Complex64,
    ra: f64,
    rb: f64,
    ends: (usize, usize),
}

impl Sausage {
    fn bbox(&self) -> (f64, f64, f64, f64) {
        (
            (self.a.re - self.ra).min(self.b.re - self.rb),
            (self.a.im - self.ra).min(self.b.im - self.rb),
            (self.a.re + self.ra).max(self.b.re + self.rb),
            (self.a.im + self.ra).max(self.b.im + self.rb),
        )
    }

    fn at(&self, s: f64) -> (Complex64, f64) {
        (self.a + (self.b - self.a) * s, self.ra + (self.rb - self.ra) * s)
    }
}

fn segment_distance(p0: Complex64, p1: Complex64, q0: Complex64, q1: Complex64) -> f64 {
    let point_seg = |p: Complex64, a: Complex64, b: Complex64| {
        let ab = b - a;
        let t = if ab.norm_sqr() == 0.0 { 0.0 } else { ((p - a) * ab.conj()).re / ab.norm_sqr() };
        (p - (a + ab * t.clamp(0.0, 1.0))).norm()
    };
    let cross = |u: Complex64, v: Complex64| u.re * v.im - u.im * v.re;
    let (d1, d2) = (p1 - p0, q1 - q0);
    let denom = cross(d1, d2);
    if denom != 0.0 {
        let t = cross(q0 - p0, d2) / denom;
        let u = cross(q0 - p0, d1) / denom;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
            return 0.0;
        }
    }
    point_seg(p0, q0, q1).min(point_seg(p1, q0, q1)).min(point_seg(q0, p0, p1)).min(point_seg(q1, p0, p1))
}

fn ternary_min(f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    f(0.5 * (lo + hi)).min(f(0.0)).min(f(1.0))
}

/// Signed gap between two sausages; positive means disjoint. The hull of
/// two discs is the union of the discs interpolated between them, so the
/// gap is the minimum of a convex function on the unit square.
fn sausage_gap(x: &Sausage, y: &Sausage) -> f64 {
    ternary_min(|s| {
        let (c1, r1) = x.at(s);
        ternary_min(|t| {
            let (c2, r2) = y.at(t);
            (c1 - c2).norm() - r1 - r2
        })
    })
}

/// Sausages of edges that share no endpoint have disjoint interiors.
pub fn sausages_disjoint(packing: &DoublePacking, delta: f64) -> bool {
    let sausages: Vec<Sausage> = packing
        .patch()
        .edges()
        .iter()
        .map(|&(u, v)| Sausage {
            a: packing.vertex_center(u),
            b: packing.vertex_center(v),
            ra: delta * packing.vertex_radius(u),
            rb: delta * packing.vertex_radius(v),
            ends: (u, v),
        })
        .collect();
    if sausages.is_empty() {
        return true;
    }
    let boxes: Vec<_> = sausages.iter().map(Sausage::bbox).collect();
    let cell = boxes.iter().map(|b| (b.2 - b.0).max(b.3 - b.1)).fold(0.0f64, f64::max).max(1e-300);
    let key = |x: f64, y: f64| ((x / cell).floor() as i64, (y / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, b) in boxes.iter().enumerate() {
        let (x0, y0) = key(b.0, b.1);
        let (x1, y1) = key(b.2, b.3);
        for gx in x0..=x1 {
            for gy in y0..=y1 {
                grid.entry((gx, gy)).or_default().push(i);
            }
        }
    }
    let mut keys: Vec<_> = grid.keys().copied().collect();
    keys.sort_unstable();
    for k in keys {
        let members = &grid[&k];
        for (p, &i) in members.iter().enumerate() {
            for &j in &members[p + 1..] {
                let (x, y) = (&sausages[i], &sausages[j]);
                let shared = [x.ends.0, x.ends.1].iter().any(|e| *e == y.ends.0 || *e == y.ends.1);
                if shared {
                    continue;
                }
                let (bi, bj) = (boxes[i], boxes[j]);
                if bi.2 < bj.0 || bj.2 < bi.0 || bi.3 < bj.1 || bj.3 < bi.1 {
                    continue;
                }
                let reach = x.ra.max(x.rb) + y.ra.max(y.rb);
                if segment_distance(x.a, x.b, y.a, y.b) > reach {
                    continue;
                }
                if sausage_gap(x, y) <= 0.0 {
                    return false;
                }
            }
        }
    }
    true
}

pub fn geometry_report(packing: &DoublePacking) -> GeometryReport {
    let res = packing.residuals();
    let (mut hi, mut lo) = (0.0f64, f64::INFINITY);
    for k in packing.patch().kites() {
        let ratio = packing.vertex_radius(k.vertex) / packing.face_radius(k.face);
        hi = hi.max(ratio);
        lo = lo.min(ratio);
    }
    GeometryReport {
        max_tangency_residual: res.tangency,
        max_orthogonality_residual: res.orthogonality,
        max_boundary_residual: res.boundary,
        ring_ratio_max: hi,
        ring_ratio_min: lo,
        sausage_ok: sausages_disjoint(packing, packing.delta0()),
        delta0: packing.delta0(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sausage(a: (f64, f64), b: (f64, f64), ra: f64, rb: f64) -> Sausage {
        Sausage { a: Complex64::new(a.0, a.1), b: Complex64::new(b.0, b.1), ra, rb, ends: (0, 1) }
    }

    #[test]
    fn parallel_sausages_gap() {
        let x = sausage((0.0, 0.0), (1.0, 0.0), 0.1, 0.1);
        let y = sausage((0.0, 1.0), (1.0, 1.0), 0.2, 0.2);
        assert!((sausage_gap(&x, &y) - 0.7).abs() < 1e-9);
    }

    #[test]
    fn crossing_sausages_overlap() {
        let x = sausage((0.0, 0.0), (1.0, 1.0), 0.01, 0.01);
        let y = sausage((0.0, 1.0), (1.0, 0.0), 0.01, 0.01);
        assert!(sausage_gap(&x, &y) < 0.0);
        assert_eq!(segment_distance(x.a, x.b, y.a, y.b), 0.0);
    }

    #[test]
    fn tapered_sausage_gap_against_sampling() {
        let x = sausage((0.0, 0.0), (2.0, 0.3), 0.5, 0.05);
        let y = sausage((1.0, 1.5), (2.5, 0.9), 0.1, 0.4);
        let mut best = f64::INFINITY;
        for i in 0..=400 {
            for j in 0..=400 {
                let (c1, r1) = x.at(i as f64 / 400.0);
                let (c2, r2) = y.at(j as f64 / 400.0);
                best = best.min((c1 - c2).norm() - r1 - r2);
            }
        }
        assert!((sausage_gap(&x, &y) - best).abs() < 1e-4);
    }
}
