use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::patch::Patch;
use super::PackingError;
use crate::linalg::{SpdSolver, SymmetricMatrix};

/// How boundary vertex circles are fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "radii")]
pub enum BoundaryMode {
    /// Euclidean packing with the given radius for each boundary vertex,
    /// listed in increasing vertex order.
    Prescribed(Vec<f64>),
    /// Euclidean packing with every boundary radius equal.
    Uniform(f64),
    /// Packing in the unit disc: boundary circles are internally tangent
    /// to the unit circle, interior circles are hyperbolic circles.
    Disc,
}

impl BoundaryMode {
    pub fn is_disc(&self) -> bool {
        matches!(self, BoundaryMode::Disc)
    }
}

/// Solved radii.
///
/// In Euclidean modes these are Euclidean radii. In disc mode each value is
/// `tanh(R/2)` for the hyperbolic radius `R`, which is the Euclidean radius
/// of that circle when centered at the origin; boundary vertices carry 1.
#[derive(Clone, Debug, Serialize)]
pub struct Radii {
    pub vertex: Vec<f64>,
    pub face: Vec<f64>,
    pub disc: bool,
    pub max_defect: f64,
    pub sweeps: usize,
    pub newton_steps: usize,
}

const SWEEP_CAP: usize = 400;
const SWEEP_HANDOFF: f64 = 1e-3;
const NEWTON_CAP: usize = 100;

/// Kite half-angle at the node with value `a` opposite the node with value
/// `b`, together with its log-derivatives in `a` and `b`.
fn kite(disc: bool, a: f64, b: f64) -> (f64, f64, f64) {
    if disc {
        let tan = b * (1.0 - a * a) / (a * (1.0 + b * b));
        let alpha = tan.atan();
        let sc = tan / (1.0 + tan * tan);
        let da = -sc * (1.0 + a * a) / (1.0 - a * a);
        let db = sc * (1.0 - b * b) / (1.0 + b * b);
        (alpha, da, db)
    } else {
        let alpha = (b / a).atan();
        let sc = a * b / (a * a + b * b);
        (alpha, -sc, sc)
    }
}

struct System<'a> {
    patch: &'a Patch,
    disc: bool,
    // unknown index for each vertex (interior only), then faces follow
    var_of_vertex: Vec<Option<usize>>,
    nv: usize,
}

impl System<'_> {
    fn n(&self) -> usize {
        self.nv + self.patch.face_count()
    }

    fn face_var(&self, f: usize) -> usize {
        self.nv + f
    }

    /// Angle sums at every unknown.
    fn angle_sums(&self, vr: &[f64], fr: &[f64]) -> Vec<f64> {
        let mut sums = vec![0.0; self.n()];
        for k in self.patch.kites() {
            let (rv, rf) = (vr[k.vertex], fr[k.face]);
            if let Some(i) = self.var_of_vertex[k.vertex] {
                sums[i] += 2.0 * kite(self.disc, rv, rf).0;
            }
            sums[self.face_var(k.face)] += 2.0 * kite(self.disc, rf, rv).0;
        }
        sums
    }

    fn defect(&self, vr: &[f64], fr: &[f64]) -> (Vec<f64>, f64) {
        let f: Vec<f64> = self.angle_sums(vr, fr).iter().map(|s| s - 2.0 * PI).collect();
        let max = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        (f, max)
    }

    fn kite_count(&self) -> Vec<usize> {
        let mut c = vec![0; self.n()];
        for k in self.patch.kites() {
            if let Some(i) = self.var_of_vertex[k.vertex] {
                c[i] += 1;
            }
            c[self.face_var(k.face)] += 1;
        }
        c
    }

    /// One Gauss–Seidel style pass of the uniform-neighbor update.
    fn sweep(&self, vr: &mut [f64], fr: &mut [f64], counts: &[usize]) {
        let update = |value: f64, theta: f64, k: usize| -> f64 {
            let kf = k as f64;
            let half = (theta / (2.0 * kf)).clamp(1e-12, PI / 2.0 - 1e-12);
            let target = (PI / kf).tan();
            if self.disc {
                let beta = half.tan() * value / (1.0 - value * value);
                let t = (-target + (target * target + 4.0 * beta * beta).sqrt()) / (2.0 * beta);
                t.clamp(1e-300, 1.0 - 1e-15)
            } else {
                value * half.tan() / target
            }
        };
        for v in 0..self.patch.vertex_count() {
            let Some(i) = self.var_of_vertex[v] else { continue };
            let theta: f64 = self
                .patch
                .vertex_kites(v)
                .iter()
                .map(|&k| 2.0 * kite(self.disc, vr[v], fr[self.patch.kites()[k].face]).0)
                .sum();
            vr[v] = update(vr[v], theta, counts[i]);
        }
        for f in 0..self.patch.face_count() {
            let theta: f64 = self
                .patch
                .face_kites(f)
                .iter()
                .map(|&k| 2.0 * kite(self.disc, fr[f], vr[self.patch.kites()[k].vertex]).0)
                .sum();
            fr[f] = update(fr[f], theta, counts[self.face_var(f)]);
        }
    }

    /// Negated Jacobian of the angle sums in log variables; symmetric
    /// positive definite.
    fn jacobian(&self, vr: &[f64], fr: &[f64]) -> SymmetricMatrix {
        let mut trip = Vec::with_capacity(4 * self.patch.kites().len());
        for k in self.patch.kites() {
            let (rv, rf) = (vr[k.vertex], fr[k.face]);
            let j = self.face_var(k.face);
            let (_, dvv, dvf) = kite(self.disc, rv, rf);
            let (_, dff, dfv) = kite(self.disc, rf, rv);
            trip.push((j, j, -2.0 * dff));
            if let Some(i) = self.var_of_vertex[k.vertex] {
                trip.push((i, i, -2.0 * dvv));
                trip.push((i, j, -2.0 * dvf));
                trip.push((j, i, -2.0 * dfv));
            }
        }
        SymmetricMatrix::from_triplets(self.n(), &trip)
    }
}

/// Solves for radii whose angle sums are `2π` at every interior vertex and
/// every packed face, to within `tol`.
pub fn solve_radii(patch: &Patch, mode: &BoundaryMode, tol: f64) -> Result<Radii, PackingError> {
    if !(tol > 0.0) {
        return Err(PackingError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let nvert = patch.vertex_count();
    let boundary: Vec<usize> = (0..nvert).filter(|&v| patch.is_boundary(v)).collect();
    let disc = mode.is_disc();
    let mut vr = vec![if disc { 0.5 } else { 1.0 }; nvert];
    match mode {
        BoundaryMode::Prescribed(radii) => {
            if radii.len() != boundary.len() {
                return Err(PackingError::InvalidArgument(format!(
                    "{} boundary radii given for {} boundary vertices",
                    radii.len(),
                    boundary.len()
                )));
            }
            for (&v, &r) in boundary.iter().zip(radii) {
                if !(r > 0.0) || !r.is_finite() {
                    return Err(PackingError::InvalidArgument(format!("boundary radius {r} is not positive")));
                }
                vr[v] = r;
            }
            let mean = radii.iter().sum::<f64>() / radii.len() as f64;
            for v in 0..nvert {
                if !patch.is_boundary(v) {
                    vr[v] = mean;
                }
            }
        }
        BoundaryMode::Uniform(r) => {
            if !(*r > 0.0) || !r.is_finite() {
                return Err(PackingError::InvalidArgument(format!("boundary radius {r} is not positive")));
            }
            vr.iter_mut().for_each(|x| *x = *r);
        }
        BoundaryMode::Disc => {
            for &v in &boundary {
                vr[v] = 1.0;
            }
            for v in 0..nvert {
                if !patch.is_boundary(v) {
                    vr[v] = 0.3;
                }
            }
        }
    }
    let mut var_of_vertex = vec![None; nvert];
    let mut nv = 0;
    for v in 0..nvert {
        if !patch.is_boundary(v) {
            var_of_vertex[v] = Some(nv);
            nv += 1;
        }
    }
    let sys = System { patch, disc, var_of_vertex, nv };
    let mut fr: Vec<f64> = (0..patch.face_count())
        .map(|f| {
            let verts = patch.face(f);
            let mean = verts.iter().map(|&v| vr[v].min(if disc { 0.3 } else { f64::INFINITY })).sum::<f64>()
                / verts.len() as f64;
            mean * (PI / verts.len() as f64).tan()
        })
        .collect();

    let counts = sys.kite_count();
    let mut sweeps = 0;
    let (_, mut worst) = sys.defect(&vr, &fr);
    while worst > SWEEP_HANDOFF.max(tol) && sweeps < SWEEP_CAP {
        sys.sweep(&mut vr, &mut fr, &counts);
        sweeps += 1;
        worst = sys.defect(&vr, &fr).1;
    }

    let mut newton_steps = 0;
    let to_log = |x: f64| x.ln();
    while worst > tol {
        if newton_steps == NEWTON_CAP {
            return Err(PackingError::NoConvergence { defect: worst, iterations: sweeps + newton_steps });
        }
        newton_steps += 1;
        let (f, _) = sys.defect(&vr, &fr);
        let jac = sys.jacobian(&vr, &fr);
        let step = SpdSolver::new(jac)
            .and_then(|s| s.solve(&f))
            .map_err(|e| PackingError::Numerical(e.to_string()))?;
        let merit = |vr: &[f64], fr: &[f64]| sys.defect(vr, fr).0.iter().map(|x| x * x).sum::<f64>();
        let m0 = merit(&vr, &fr);
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-10 {
            let mut vt = vr.clone();
            let mut ft = fr.clone();
            let mut ok = true;
            for v in 0..nvert {
                if let Some(i) = sys.var_of_vertex[v] {
                    vt[v] = (to_log(vr[v]) + lambda * step[i]).exp();
                    ok &= !disc || vt[v] < 1.0;
                }
            }
            for fi in 0..fr.len() {
                ft[fi] = (to_log(fr[fi]) + lambda * step[sys.face_var(fi)]).exp();
                ok &= !disc || ft[fi] < 1.0;
            }
            if ok && merit(&vt, &ft) < m0 {
                vr = vt;
                fr = ft;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            // the merit cannot drop further; fall back to more sweeps
            for _ in 0..50 {
                sys.sweep(&mut vr, &mut fr, &counts);
            }
            sweeps += 50;
        }
        worst = sys.defect(&vr, &fr).1;
    }
    Ok(Radii { vertex: vr, face: fr, disc, max_defect: worst, sweeps, newton_steps })
}

/// Angle sum at each interior vertex and each face, for diagnostics.
pub fn angle_sums(patch: &Patch, radii: &Radii) -> (Vec<(usize, f64)>, Vec<f64>) {
    let mut vsum = vec![0.0; patch.vertex_count()];
    let mut fsum = vec![0.0; patch.face_count()];
    for k in patch.kites() {
        let (rv, rf) = (radii.vertex[k.vertex], radii.face[k.face]);
        vsum[k.vertex] += 2.0 * kite(radii.disc, rv, rf).0;
        fsum[k.face] += 2.0 * kite(radii.disc, rf, rv).0;
    }
    let interior = (0..patch.vertex_count()).filter(|&v| !patch.is_boundary(v)).map(|v| (v, vsum[v])).collect();
    (interior, fsum)
}

/// Half-angle of the kite at the first node, exposed for layout.
pub(crate) fn kite_angle(disc: bool, a: f64, b: f64) -> f64 {
    kite(disc, a, b).0
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::map::{generate_tiling, grid_patch, truncate, Truncation};

    fn flower() -> Patch {
        let m = Arc::new(generate_tiling(7, 3, 2).unwrap());
        Patch::new(&truncate(m, 0, 1).unwrap()).unwrap()
    }

    #[test]
    fn kite_derivatives_match_finite_differences() {
        for disc in [false, true] {
            let (a, b) = (0.37, 0.61);
            let h: f64 = 1e-6;
            let (_, da, db) = kite(disc, a, b);
            let fa = (kite(disc, a * h.exp(), b).0 - kite(disc, a * (-h).exp(), b).0) / (2.0 * h);
            let fb = (kite(disc, a, b * h.exp()).0 - kite(disc, a, b * (-h).exp()).0) / (2.0 * h);
            assert!((da - fa).abs() < 1e-8 && (db - fb).abs() < 1e-8, "disc={disc}");
        }
    }

    #[test]
    fn jacobian_is_symmetric() {
        for disc in [false, true] {
            let (a, b) = (0.22, 0.71);
            let (_, _, dab) = kite(disc, a, b);
            let (_, _, dba) = kite(disc, b, a);
            assert!((dab - dba).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_with_uniform_boundary_has_equal_radii() {
        let m = Arc::new(grid_patch(11, 11).unwrap());
        let patch = Patch::new(&Truncation::from_outer_face(m, 60).unwrap()).unwrap();
        let r = solve_radii(&patch, &BoundaryMode::Uniform(1.0), 1e-12).unwrap();
        for x in r.vertex.iter().chain(&r.face) {
            assert!((x - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn flower_center_matches_bisection() {
        let patch = flower();
        let r = solve_radii(&patch, &BoundaryMode::Uniform(1.0), 1e-13).unwrap();
        let center = r.vertex[patch.root()];
        // symmetric flower: solve for face radius s and centre radius c
        // with 7 * 2 atan(s/c) = 2pi and 2 atan(c/s) + 4 atan(1/s) = 2pi
        let ratio = (PI / 7.0).tan();
        let g = |s: f64| 2.0 * (1.0 / ratio).atan() + 4.0 * (1.0 / s).atan() - 2.0 * PI;
        let (mut lo, mut hi) = (1e-6, 1e3);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        assert!((center - s / ratio).abs() < 1e-9, "{center} vs {}", s / ratio);
        assert!(r.face.iter().all(|&f| (f - s).abs() < 1e-9));
    }

    #[test]
    fn disc_mode_converges_on_heptagonal_ball() {
        let m = Arc::new(generate_tiling(7, 3, 4).unwrap());
        let patch = Patch::new(&truncate(m, 0, 4).unwrap()).unwrap();
        let r = solve_radii(&patch, &BoundaryMode::Disc, 1e-10).unwrap();
        assert!(r.max_defect <= 1e-10);
        assert!(r.vertex.iter().chain(&r.face).all(|&t| t > 0.0 && t <= 1.0));
    }

    #[test]
    fn bad_arguments_are_rejected() {
        let patch = flower();
        assert!(solve_radii(&patch, &BoundaryMode::Uniform(1.0), 0.0).is_err());
        assert!(solve_radii(&patch, &BoundaryMode::Prescribed(vec![1.0; 3]), 1e-8).is_err());
        assert!(solve_radii(&patch, &BoundaryMode::Uniform(-1.0), 1e-8).is_err());
    }
}
