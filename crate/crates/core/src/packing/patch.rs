use crate::map::{is_polyhedral, PlanarMap, Truncation};

use super::PackingError;

/// Dart leaving a vertex, with the packed face on its left if there is one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Spoke {
    pub to: usize,
    pub face: Option<usize>,
}

/// Vertex–face incidence of the patch. `spoke` indexes the spoke of
/// `vertex` whose left face is `face`; `slot` is the position of `vertex`
/// in the face cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Kite {
    pub vertex: usize,
    pub face: usize,
    pub spoke: usize,
    pub slot: usize,
}

/// Combinatorial disc carried by a truncation: the kept vertices, the
/// parent faces all of whose vertices are kept, and the boundary cycle.
#[derive(Clone, Debug)]
pub struct Patch {
    is_boundary: Vec<bool>,
    root: usize,
    spokes: Vec<Vec<Spoke>>,
    faces: Vec<Vec<usize>>,
    kites: Vec<Kite>,
    vertex_kites: Vec<Vec<usize>>,
    face_kites: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    outer_cycle: Vec<usize>,
}

impl Patch {
    pub fn new(trunc: &Truncation) -> Result<Self, PackingError> {
        let map = trunc.map();
        let parent = trunc.parent();
        let parent_outer = parent.outer_face();
        let sub_faces = map.faces();
        let mut packed_id = vec![None; sub_faces.count()];
        let mut faces = Vec::new();
        let mut unpacked = Vec::new();
        for f in 0..sub_faces.count() {
            let darts = sub_faces.darts(f);
            let pf = parent.faces().face_of(trunc.dart_to_parent(darts[0]));
            let whole = Some(pf) != parent_outer
                && darts.len() == parent.faces().degree(pf)
                && darts.iter().all(|&e| parent.faces().face_of(trunc.dart_to_parent(e)) == pf);
            if whole {
                packed_id[f] = Some(faces.len());
                faces.push(map.face_vertices(f));
            } else {
                unpacked.push(f);
            }
        }
        if unpacked.len() != 1 {
            return Err(PackingError::NotPolyhedral(format!(
                "truncation leaves {} unpacked regions, expected exactly one",
                unpacked.len()
            )));
        }
        let outer_cycle = map.face_vertices(unpacked[0]);
        let mut on_cycle = vec![false; map.vertex_count()];
        for &v in &outer_cycle {
            if on_cycle[v] {
                return Err(PackingError::NotPolyhedral(format!("boundary cycle passes vertex {v} twice")));
            }
            on_cycle[v] = true;
        }
        for v in 0..map.vertex_count() {
            if on_cycle[v] != trunc.is_boundary(v) {
                let what = if on_cycle[v] { "interior vertex" } else { "boundary vertex" };
                return Err(PackingError::NotPolyhedral(format!(
                    "{what} {v} {} the outer boundary cycle",
                    if on_cycle[v] { "lies on" } else { "is off" }
                )));
            }
        }
        let spokes: Vec<Vec<Spoke>> = (0..map.vertex_count())
            .map(|v| {
                map.darts_from(v)
                    .map(|e| Spoke { to: map.head(e), face: packed_id[sub_faces.face_of(e)] })
                    .collect()
            })
            .collect();
        for (f, verts) in faces.iter().enumerate() {
            if verts.iter().all(|&v| trunc.is_boundary(v)) {
                return Err(PackingError::NotPolyhedral(format!("face {f} has no interior vertex")));
            }
        }
        let coned = cone(map, &spokes, &outer_cycle)?;
        if !is_polyhedral(&coned) {
            return Err(PackingError::NotPolyhedral("coned patch is not simple and 3-connected".into()));
        }
        let mut kites = Vec::new();
        let mut vertex_kites = vec![Vec::new(); map.vertex_count()];
        let mut face_kites = vec![Vec::new(); faces.len()];
        for (v, sp) in spokes.iter().enumerate() {
            for (i, s) in sp.iter().enumerate() {
                if let Some(f) = s.face {
                    let slot = faces[f].iter().position(|&w| w == v).expect("vertex lies on its face");
                    vertex_kites[v].push(kites.len());
                    face_kites[f].push(kites.len());
                    kites.push(Kite { vertex: v, face: f, spoke: i, slot });
                }
            }
        }
        for fk in &mut face_kites {
            fk.sort_by_key(|&k| kites[k].slot);
        }
        let mut edges: Vec<(usize, usize)> = (0..map.dart_count())
            .step_by(2)
            .map(|e| {
                let (a, b) = (map.origin(e), map.head(e));
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        Ok(Self {
            is_boundary: (0..map.vertex_count()).map(|v| trunc.is_boundary(v)).collect(),
            root: trunc.root(),
            spokes,
            faces,
            kites,
            vertex_kites,
            face_kites,
            edges,
            outer_cycle,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.spokes.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.is_boundary[v]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Spokes of `v` in counter-clockwise order.
    pub fn spokes(&self, v: usize) -> &[Spoke] {
        &self.spokes[v]
    }

    /// Vertices of face `f` in counter-clockwise order.
    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn kites(&self) -> &[Kite] {
        &self.kites
    }

    /// Kites at `v`, in spoke order.
    pub fn vertex_kites(&self, v: usize) -> &[usize] {
        &self.vertex_kites[v]
    }

    /// Kites at `f`, in face-cycle order.
    pub fn face_kites(&self, f: usize) -> &[usize] {
        &self.face_kites[f]
    }

    /// Undirected edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Boundary vertices in the order the unpacked region traverses them.
    pub fn outer_cycle(&self) -> &[usize] {
        &self.outer_cycle
    }
}

/// The patch with one extra vertex joined to every boundary vertex inside
/// the unpacked region.
fn cone(map: &PlanarMap, spokes: &[Vec<Spoke>], outer_cycle: &[usize]) -> Result<PlanarMap, PackingError> {
    let apex = map.vertex_count();
    let mut rot: Vec<Vec<usize>> = Vec::with_capacity(apex + 1);
    for sp in spokes {
        let mut r = Vec::with_capacity(sp.len() + 1);
        for s in sp {
            r.push(s.to);
            if s.face.is_none() {
                r.push(apex);
            }
        }
        rot.push(r);
    }
    rot.push(outer_cycle.to_vec());
    PlanarMap::from_rotations(&rot, &[]).map_err(|e| PackingError::NotPolyhedral(format!("coning failed: {e}")))
}
