use std::collections::VecDeque;
use std::sync::{Arc, OnceLock};

use super::{Dart, MapError, PlanarMap};
use crate::linalg::SpdSolver;

/// Finite piece of a map with a grounded boundary.
///
/// Kept vertices are renumbered `0..n` in increasing parent order. The
/// induced map on them is stored alongside the index translations.
#[derive(Debug)]
pub struct Truncation {
    parent: Arc<PlanarMap>,
    map: PlanarMap,
    to_parent: Vec<usize>,
    from_parent: Vec<Option<usize>>,
    dart_to_parent: Vec<Dart>,
    is_boundary: Vec<bool>,
    boundary: Vec<usize>,
    interior: Vec<usize>,
    root: usize,
    radius: Option<usize>,
    dirichlet: OnceLock<Arc<SpdSolver>>,
}

/// Graph ball of `radius` around `root`, grounded on the sphere of that
/// radius.
pub fn truncate(map: Arc<PlanarMap>, root: usize, radius: usize) -> Result<Truncation, MapError> {
    if radius == 0 {
        return Err(MapError::ZeroRadius);
    }
    if root >= map.vertex_count() {
        return Err(MapError::OutOfRange { what: "root", value: root });
    }
    let dist = bfs_distances(&map, root);
    let kept: Vec<usize> = (0..map.vertex_count()).filter(|&v| dist[v] <= radius).collect();
    let on_sphere = |v: usize| dist[v] == radius;
    if !kept.iter().any(|&v| on_sphere(v)) {
        return Err(MapError::EmptyBoundary);
    }
    Truncation::build(map, &kept, on_sphere, root, Some(radius))
}

fn bfs_distances(map: &PlanarMap, root: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; map.vertex_count()];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for u in map.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

impl Truncation {
    /// Keeps the whole map and grounds the vertices of its marked outer
    /// face. Used for patches such as square-lattice rectangles whose
    /// natural boundary is not a graph sphere.
    pub fn from_outer_face(map: Arc<PlanarMap>, root: usize) -> Result<Self, MapError> {
        let f = map.outer_face().ok_or(MapError::NoOuterFace)?;
        if root >= map.vertex_count() {
            return Err(MapError::OutOfRange { what: "root", value: root });
        }
        let mut on_outer = vec![false; map.vertex_count()];
        for v in map.face_vertices(f) {
            on_outer[v] = true;
        }
        if on_outer[root] {
            return Err(MapError::RootOnBoundary(root));
        }
        let kept: Vec<usize> = (0..map.vertex_count()).collect();
        Self::build(map, &kept, |v| on_outer[v], root, None)
    }

    fn build(
        parent: Arc<PlanarMap>,
        kept: &[usize],
        on_boundary: impl Fn(usize) -> bool,
        root: usize,
        radius: Option<usize>,
    ) -> Result<Self, MapError> {
        let mut from_parent = vec![None; parent.vertex_count()];
        for (i, &v) in kept.iter().enumerate() {
            from_parent[v] = Some(i);
        }
        // local darts come in reverse pairs, in parent dart order
        let mut local_of = vec![usize::MAX; parent.dart_count()];
        let mut dart_to_parent = Vec::new();
        for e in (0..parent.dart_count()).step_by(2) {
            if from_parent[parent.origin(e)].is_some() && from_parent[parent.head(e)].is_some() {
                local_of[e] = dart_to_parent.len();
                local_of[e + 1] = dart_to_parent.len() + 1;
                dart_to_parent.push(e);
                dart_to_parent.push(e + 1);
            }
        }
        let mut origin = Vec::with_capacity(dart_to_parent.len());
        let mut next = Vec::with_capacity(dart_to_parent.len());
        let mut conductance = Vec::with_capacity(dart_to_parent.len());
        for &e in &dart_to_parent {
            origin.push(from_parent[parent.origin(e)].unwrap());
            let mut s = parent.next(e);
            while local_of[s] == usize::MAX {
                s = parent.next(s);
            }
            next.push(local_of[s]);
            conductance.push(parent.conductance(e));
        }
        let map = PlanarMap::from_darts(kept.len(), origin, next, conductance, None)?;
        let is_boundary: Vec<bool> = kept.iter().map(|&v| on_boundary(v)).collect();
        let boundary: Vec<usize> = (0..kept.len()).filter(|&i| is_boundary[i]).collect();
        let interior: Vec<usize> = (0..kept.len()).filter(|&i| !is_boundary[i]).collect();
        if boundary.is_empty() {
            return Err(MapError::EmptyBoundary);
        }
        Ok(Self {
            root: from_parent[root].expect("root is kept"),
            parent,
            map,
            to_parent: kept.to_vec(),
            from_parent,
            dart_to_parent,
            is_boundary,
            boundary,
            interior,
            radius,
            dirichlet: OnceLock::new(),
        })
    }

    pub fn parent(&self) -> &Arc<PlanarMap> {
        &self.parent
    }

    /// Induced map on the kept vertices, in local numbering.
    pub fn map(&self) -> &PlanarMap {
        &self.map
    }

    pub fn vertex_count(&self) -> usize {
        self.to_parent.len()
    }

    pub fn to_parent(&self, v: usize) -> usize {
        self.to_parent[v]
    }

    pub fn from_parent(&self, v: usize) -> Option<usize> {
        self.from_parent.get(v).copied().flatten()
    }

    pub fn dart_to_parent(&self, e: Dart) -> Dart {
        self.dart_to_parent[e]
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.is_boundary[v]
    }

    /// Boundary vertices, ascending.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Interior vertices, ascending.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn radius(&self) -> Option<usize> {
        self.radius
    }

    pub(crate) fn dirichlet_cache(&self) -> &OnceLock<Arc<SpdSolver>> {
        &self.dirichlet
    }
}
