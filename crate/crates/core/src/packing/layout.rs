use std::collections::VecDeque;

use num_complex::Complex64;
use serde::Serialize;

use super::patch::Patch;
use super::solve::{kite_angle, Radii};
use super::PackingError;

/// Circle centers and Euclidean radii from a layout.
#[derive(Clone, Debug)]
pub struct Placement {
    pub vertex_center: Vec<Complex64>,
    pub vertex_radius: Vec<f64>,
    pub face_center: Vec<Complex64>,
    pub face_radius: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
struct Mobius {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Mobius {
    fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self { a: one, b: zero, c: zero, d: one }
    }

    fn rotation(theta: f64) -> Self {
        Self { a: Complex64::from_polar(1.0, theta), ..Self::identity() }
    }

    /// Disc automorphism taking 0 to `t` on the positive real axis.
    fn shift(t: f64) -> Self {
        let (one, t) = (Complex64::new(1.0, 0.0), Complex64::new(t, 0.0));
        Self { a: one, b: t, c: t, d: one }
    }

    fn then(self, o: Self) -> Self {
        let m = Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        };
        let s = (m.a * m.d - m.b * m.c).sqrt();
        Self { a: m.a / s, b: m.b / s, c: m.c / s, d: m.d / s }
    }

    fn apply(self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }
}

/// Local coordinate frame of a placed node. Local direction 0 points back
/// at the node it was placed from.
#[derive(Clone, Copy, Debug)]
enum Frame {
    Euclid { z: Complex64, theta: f64 },
    Hyper(Mobius),
}

impl Frame {
    fn origin(disc: bool) -> Self {
        if disc {
            Frame::Hyper(Mobius::identity())
        } else {
            Frame::Euclid { z: Complex64::new(0.0, 0.0), theta: 0.0 }
        }
    }

    /// Frame of a node at local distance `dist` in local direction `psi`.
    fn child(self, psi: f64, dist: f64) -> Self {
        match self {
            Frame::Euclid { z, theta } => Frame::Euclid {
                z: z + Complex64::from_polar(dist, theta + psi),
                theta: theta + psi + std::f64::consts::PI,
            },
            Frame::Hyper(m) => Frame::Hyper(
                m.then(Mobius::rotation(psi))
                    .then(Mobius::shift(dist))
                    .then(Mobius::rotation(std::f64::consts::PI)),
            ),
        }
    }

    /// Euclidean circle of the node's own circle with radius value `r`.
    fn circle(self, r: f64) -> (Complex64, f64) {
        match self {
            Frame::Euclid { z, .. } => (z, r),
            Frame::Hyper(m) => {
                let a = m.apply(Complex64::new(0.0, 0.0));
                let aa = a.norm_sqr();
                let den = 1.0 - aa * r * r;
                (a * (1.0 - r * r) / den, r * (1.0 - aa) / den)
            }
        }
    }

    /// Horocycle touching the unit circle in local direction `psi`, passing
    /// through the local point at distance `inner` from the origin.
    fn horocycle(self, psi: f64, inner: f64) -> (Complex64, f64) {
        let Frame::Hyper(m) = self else { unreachable!("horocycles only exist in disc mode") };
        let eta_local = Complex64::from_polar(1.0, psi);
        let eta = m.apply(eta_local);
        let eta = eta / eta.norm();
        let w = m.apply(eta_local * inner);
        let s = (w - eta).norm_sqr() / (2.0 * (1.0 - (w * eta.conj()).re));
        (eta * (1.0 - s), s)
    }
}

fn orthogonal_distance(disc: bool, a: f64, b: f64) -> f64 {
    if disc {
        ((a * a + b * b) / (1.0 + a * a * b * b)).sqrt()
    } else {
        (a * a + b * b).sqrt()
    }
}

/// Places every circle by breadth-first search from the root. Interior
/// vertices and faces are expanded; boundary vertices are placed from the
/// first face that reaches them. The result is not normalized.
pub fn place(patch: &Patch, radii: &Radii) -> Result<Placement, PackingError> {
    let disc = radii.disc;
    let (vr, fr) = (&radii.vertex, &radii.face);
    let kites = patch.kites();
    // cumulative spoke directions at each vertex, relative to spoke 0
    let vertex_dirs: Vec<Vec<f64>> = (0..patch.vertex_count())
        .map(|v| {
            if patch.is_boundary(v) {
                return Vec::new();
            }
            let mut dirs = Vec::with_capacity(patch.spokes(v).len());
            let mut acc = 0.0;
            for s in patch.spokes(v) {
                dirs.push(acc);
                let f = s.face.expect("interior vertices are surrounded by packed faces");
                acc += 2.0 * kite_angle(disc, vr[v], fr[f]);
            }
            dirs
        })
        .collect();
    let face_dirs: Vec<Vec<f64>> = (0..patch.face_count())
        .map(|f| {
            let fk = patch.face_kites(f);
            let alphas: Vec<f64> = fk.iter().map(|&k| kite_angle(disc, fr[f], vr[kites[k].vertex])).collect();
            let mut dirs = Vec::with_capacity(fk.len());
            let mut acc = 0.0;
            for j in 0..fk.len() {
                dirs.push(acc);
                acc += alphas[j] + alphas[(j + 1) % fk.len()];
            }
            dirs
        })
        .collect();

    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut out = Placement {
        vertex_center: vec![nan; patch.vertex_count()],
        vertex_radius: vec![f64::NAN; patch.vertex_count()],
        face_center: vec![nan; patch.face_count()],
        face_radius: vec![f64::NAN; patch.face_count()],
    };
    let mut vframe: Vec<Option<(Frame, f64)>> = vec![None; patch.vertex_count()];
    let mut fframe: Vec<Option<(Frame, f64)>> = vec![None; patch.face_count()];
    let root = patch.root();
    vframe[root] = Some((Frame::origin(disc), 0.0));
    let (c, r) = Frame::origin(disc).circle(vr[root]);
    out.vertex_center[root] = c;
    out.vertex_radius[root] = r;

    #[derive(Clone, Copy)]
    enum Node {
        Vertex(usize),
        Face(usize),
    }
    let mut queue = VecDeque::from([Node::Vertex(root)]);
    while let Some(node) = queue.pop_front() {
        match node {
            Node::Vertex(v) => {
                let (frame, base) = vframe[v].unwrap();
                for &k in patch.vertex_kites(v) {
                    let kite = kites[k];
                    let f = kite.face;
                    if fframe[f].is_some() {
                        continue;
                    }
                    let alpha = kite_angle(disc, vr[v], fr[f]);
                    let psi = base + vertex_dirs[v][kite.spoke] + alpha;
                    let child = frame.child(psi, orthogonal_distance(disc, vr[v], fr[f]));
                    // in the child frame, slot `kite.slot` points back at v
                    fframe[f] = Some((child, -face_dirs[f][kite.slot]));
                    let (c, r) = child.circle(fr[f]);
                    out.face_center[f] = c;
                    out.face_radius[f] = r;
                    queue.push_back(Node::Face(f));
                }
            }
            Node::Face(f) => {
                let (frame, base) = fframe[f].unwrap();
                for (j, &k) in patch.face_kites(f).iter().enumerate() {
                    let kite = kites[k];
                    let w = kite.vertex;
                    if vframe[w].is_some() || !out.vertex_radius[w].is_nan() {
                        continue;
                    }
                    let psi = base + face_dirs[f][j];
                    if patch.is_boundary(w) {
                        let (c, r) = if disc {
                            frame.horocycle(psi, fr[f] * fr[f])
                        } else {
                            frame.child(psi, orthogonal_distance(false, vr[w], fr[f])).circle(vr[w])
                        };
                        out.vertex_center[w] = c;
                        out.vertex_radius[w] = r;
                        continue;
                    }
                    let child = frame.child(psi, orthogonal_distance(disc, vr[w], fr[f]));
                    let alpha = kite_angle(disc, vr[w], fr[f]);
                    vframe[w] = Some((child, -alpha - vertex_dirs[w][kite.spoke]));
                    let (c, r) = child.circle(vr[w]);
                    out.vertex_center[w] = c;
                    out.vertex_radius[w] = r;
                    queue.push_back(Node::Vertex(w));
                }
            }
        }
    }
    if out.vertex_radius.iter().chain(&out.face_radius).any(|r| r.is_nan()) {
        return Err(PackingError::NotPolyhedral("layout did not reach every circle".into()));
    }
    Ok(out)
}

/// Residuals of a placement, relative to the local scale.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Residuals {
    pub tangency: f64,
    pub orthogonality: f64,
    pub boundary: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.tangency.max(self.orthogonality).max(self.boundary)
    }
}

pub fn residuals(patch: &Patch, p: &Placement, disc: bool) -> Residuals {
    let mut res = Residuals::default();
    for &(u, v) in patch.edges() {
        let d = (p.vertex_center[u] - p.vertex_center[v]).norm();
        let s = p.vertex_radius[u] + p.vertex_radius[v];
        res.tangency = res.tangency.max((d - s).abs() / s);
    }
    for k in patch.kites() {
        let d2 = (p.vertex_center[k.vertex] - p.face_center[k.face]).norm_sqr();
        let s2 = p.vertex_radius[k.vertex].powi(2) + p.face_radius[k.face].powi(2);
        res.orthogonality = res.orthogonality.max((d2 - s2).abs() / s2);
    }
    if disc {
        for v in (0..patch.vertex_count()).filter(|&v| patch.is_boundary(v)) {
            let gap = 1.0 - p.vertex_center[v].norm() - p.vertex_radius[v];
            res.boundary = res.boundary.max(gap.abs() / p.vertex_radius[v]);
        }
    }
    res
}

/// Translates the root to the origin and scales so every circle lies in
/// the closed unit disc.
pub fn normalize(patch: &Patch, p: &mut Placement) {
    let shift = p.vertex_center[patch.root()];
    let extent = p
        .vertex_center
        .iter()
        .zip(&p.vertex_radius)
        .chain(p.face_center.iter().zip(&p.face_radius))
        .map(|(c, r)| (c - shift).norm() + r)
        .fold(0.0f64, f64::max);
    let scale = 1.0 / extent;
    for (c, r) in p
        .vertex_center
        .iter_mut()
        .zip(p.vertex_radius.iter_mut())
        .chain(p.face_center.iter_mut().zip(p.face_radius.iter_mut()))
    {
        *c = (*c - shift) * scale;
        *r *= scale;
    }
}
