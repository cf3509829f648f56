//! Planar maps stored as rotation systems over darts.
//!
//! Every undirected edge is a pair of darts `e` and `e ^ 1`. Each dart has an
//! origin and a counter-clockwise successor around that origin. Faces are
//! traced with the successor `prev(rev e)`, which keeps each face on the left
//! of its darts.

mod canonical;
mod json;
mod polyhedral;
mod tiling;
mod truncation;

use serde::Serialize;
use thiserror::Error;

pub use canonical::canonical_code;
pub use json::{map_from_json, map_to_json, MapFile};
pub use polyhedral::is_polyhedral;
pub use tiling::{generate_tiling, grid_patch};
pub use truncation::{truncate, Truncation};

pub type Dart = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("vertex {vertex} lists neighbor {neighbor}, which does not exist")]
    UnknownVertex { vertex: usize, neighbor: usize },
    #[error("half-edge {from} -> {to} has no matching reverse half-edge")]
    DanglingHalfEdge { from: usize, to: usize },
    #[error("conductance on edge {u}-{v} must be positive and finite, got {value}")]
    BadConductance { u: usize, v: usize, value: f64 },
    #[error("conductance given for {u}-{v}, which is not an edge")]
    ConductanceOnMissingEdge { u: usize, v: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("map has no edges")]
    Empty,
    #[error("rotation system has genus {genus}, expected a sphere")]
    NotPlanar { genus: i64 },
    #[error("rotation successor array is not a permutation of the darts")]
    BadPermutation,
    #[error("{what} {value} out of range")]
    OutOfRange { what: &'static str, value: usize },
    #[error("tiling parameters ({p}, {q}) rejected: {reason}")]
    BadTiling { p: usize, q: usize, reason: String },
    #[error("truncation radius must be at least 1")]
    ZeroRadius,
    #[error("truncation keeps the whole map, so it has no boundary")]
    EmptyBoundary,
    #[error("map has no outer face marked")]
    NoOuterFace,
    #[error("root {0} lies on the outer face")]
    RootOnBoundary(usize),
    #[error("invalid map file: {0}")]
    Parse(String),
}

/// A connected map on the sphere, optionally with a marked outer face.
#[derive(Clone, Debug)]
pub struct PlanarMap {
    vertex_count: usize,
    origin: Vec<usize>,
    next: Vec<Dart>,
    prev: Vec<Dart>,
    conductance: Vec<f64>,
    first_dart: Vec<Dart>,
    degree: Vec<usize>,
    outer: Option<Dart>,
    faces: Faces,
}

/// Face structure traced from a rotation system.
#[derive(Clone, Debug, Default)]
pub struct Faces {
    face_of: Vec<usize>,
    darts: Vec<Vec<Dart>>,
}

impl Faces {
    pub fn count(&self) -> usize {
        self.darts.len()
    }

    /// Face to the left of dart `e`.
    pub fn face_of(&self, e: Dart) -> usize {
        self.face_of[e]
    }

    /// Darts bounding face `f` in traversal order.
    pub fn darts(&self, f: usize) -> &[Dart] {
        &self.darts[f]
    }

    pub fn degree(&self, f: usize) -> usize {
        self.darts[f].len()
    }
}

/// Degree and conductance bounds of a map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MapData {
    pub max_degree: usize,
    pub max_codegree: usize,
    pub min_conductance: f64,
    pub max_conductance: f64,
}

impl PlanarMap {
    /// Builds a map from counter-clockwise neighbor lists.
    ///
    /// The k-th occurrence of `u` in the list of `v` is paired with the k-th
    /// occurrence of `v` in the list of `u`. Consecutive occurrences of `v`
    /// in its own list form a loop. Edges not named in `conductances` get
    /// conductance 1.
    pub fn from_rotations(
        rotations: &[Vec<usize>],
        conductances: &[(usize, usize, f64)],
    ) -> Result<Self, MapError> {
        let n = rotations.len();
        let mut slot_dart: Vec<Vec<Dart>> = rotations.iter().map(|r| vec![usize::MAX; r.len()]).collect();
        let mut origin = Vec::new();
        for (v, rot) in rotations.iter().enumerate() {
            for &u in rot {
                if u >= n {
                    return Err(MapError::UnknownVertex { vertex: v, neighbor: u });
                }
            }
        }
        // occurrence lists per ordered pair
        let mut occurrences: std::collections::BTreeMap<(usize, usize), Vec<usize>> = Default::default();
        for (v, rot) in rotations.iter().enumerate() {
            for (i, &u) in rot.iter().enumerate() {
                occurrences.entry((v, u)).or_default().push(i);
            }
        }
        for (&(v, u), slots) in &occurrences {
            if v < u {
                let back = occurrences.get(&(u, v)).map_or(&[][..], Vec::as_slice);
                if back.len() != slots.len() {
                    let (from, to) = if slots.len() > back.len() { (v, u) } else { (u, v) };
                    return Err(MapError::DanglingHalfEdge { from, to });
                }
                for (&i, &j) in slots.iter().zip(back) {
                    let e = origin.len();
                    origin.push(v);
                    origin.push(u);
                    slot_dart[v][i] = e;
                    slot_dart[u][j] = e + 1;
                }
            } else if v == u {
                if slots.len() % 2 == 1 {
                    return Err(MapError::DanglingHalfEdge { from: v, to: v });
                }
                for pair in slots.chunks(2) {
                    let e = origin.len();
                    origin.push(v);
                    origin.push(v);
                    slot_dart[v][pair[0]] = e;
                    slot_dart[v][pair[1]] = e + 1;
                }
            } else if !occurrences.contains_key(&(u, v)) {
                return Err(MapError::DanglingHalfEdge { from: v, to: u });
            }
        }
        let m = origin.len();
        let mut next = vec![0; m];
        for darts in &slot_dart {
            for (i, &e) in darts.iter().enumerate() {
                next[e] = darts[(i + 1) % darts.len()];
            }
        }
        let mut conductance = vec![1.0; m];
        if !conductances.is_empty() {
            let mut by_pair: std::collections::HashMap<(usize, usize), Vec<Dart>> = Default::default();
            for e in 0..m {
                by_pair.entry((origin[e], origin[e ^ 1])).or_default().push(e);
            }
            for &(u, v, c) in conductances {
                if u >= n || v >= n {
                    return Err(MapError::OutOfRange { what: "vertex", value: u.max(v) });
                }
                let Some(darts) = by_pair.get(&(u, v)) else {
                    return Err(MapError::ConductanceOnMissingEdge { u, v });
                };
                for &e in darts {
                    conductance[e] = c;
                    conductance[e ^ 1] = c;
                }
            }
        }
        Self::from_darts(n, origin, next, conductance, None)
    }

    /// Builds a map directly from dart arrays. `origin[e]` is the tail of
    /// dart `e`, `next[e]` its counter-clockwise successor at that tail.
    pub fn from_darts(
        vertex_count: usize,
        origin: Vec<usize>,
        next: Vec<Dart>,
        conductance: Vec<f64>,
        outer: Option<Dart>,
    ) -> Result<Self, MapError> {
        let m = origin.len();
        if m == 0 {
            return Err(MapError::Empty);
        }
        if m % 2 == 1 || next.len() != m || conductance.len() != m {
            return Err(MapError::BadPermutation);
        }
        if let Some(&v) = origin.iter().find(|&&v| v >= vertex_count) {
            return Err(MapError::OutOfRange { what: "vertex", value: v });
        }
        let mut prev = vec![usize::MAX; m];
        for (e, &s) in next.iter().enumerate() {
            if s >= m || prev[s] != usize::MAX || origin[s] != origin[e] {
                return Err(MapError::BadPermutation);
            }
            prev[s] = e;
        }
        for e in (0..m).step_by(2) {
            let c = conductance[e];
            if !(c > 0.0) || !c.is_finite() || conductance[e + 1] != c {
                return Err(MapError::BadConductance { u: origin[e], v: origin[e + 1], value: c });
            }
        }
        let mut first_dart = vec![usize::MAX; vertex_count];
        let mut degree = vec![0; vertex_count];
        for e in 0..m {
            degree[origin[e]] += 1;
            if first_dart[origin[e]] == usize::MAX {
                first_dart[origin[e]] = e;
            }
        }
        if first_dart.contains(&usize::MAX) {
            return Err(MapError::Disconnected);
        }
        // each vertex's darts must form a single rotation orbit
        for v in 0..vertex_count {
            let mut len = 1;
            let mut e = next[first_dart[v]];
            while e != first_dart[v] {
                len += 1;
                e = next[e];
            }
            if len != degree[v] {
                return Err(MapError::BadPermutation);
            }
        }
        if let Some(o) = outer {
            if o >= m {
                return Err(MapError::OutOfRange { what: "dart", value: o });
            }
        }
        let mut map = Self {
            vertex_count,
            origin,
            next,
            prev,
            conductance,
            first_dart,
            degree,
            outer,
            faces: Faces::default(),
        };
        if !map.is_connected() {
            return Err(MapError::Disconnected);
        }
        map.faces = map.trace_faces();
        let genus = map.genus();
        if genus != 0 {
            return Err(MapError::NotPlanar { genus });
        }
        Ok(map)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for e in self.darts_from(v) {
                let u = self.head(e);
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.vertex_count
    }

    fn trace_faces(&self) -> Faces {
        let m = self.origin.len();
        let mut face_of = vec![usize::MAX; m];
        let mut darts = Vec::new();
        for start in 0..m {
            if face_of[start] != usize::MAX {
                continue;
            }
            let f = darts.len();
            let mut cycle = Vec::new();
            let mut e = start;
            loop {
                face_of[e] = f;
                cycle.push(e);
                e = self.face_successor(e);
                if e == start {
                    break;
                }
            }
            darts.push(cycle);
        }
        Faces { face_of, darts }
    }

    fn genus(&self) -> i64 {
        let chi = self.vertex_count as i64 - self.edge_count() as i64 + self.faces.count() as i64;
        (2 - chi) / 2
    }

    /// Marks the face to the left of `dart` as the outer face.
    pub fn with_outer_dart(mut self, dart: Dart) -> Result<Self, MapError> {
        if dart >= self.dart_count() {
            return Err(MapError::OutOfRange { what: "dart", value: dart });
        }
        self.outer = Some(dart);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.origin.len() / 2
    }

    pub fn dart_count(&self) -> usize {
        self.origin.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.count()
    }

    pub fn origin(&self, e: Dart) -> usize {
        self.origin[e]
    }

    pub fn head(&self, e: Dart) -> usize {
        self.origin[e ^ 1]
    }

    pub fn rev(&self, e: Dart) -> Dart {
        e ^ 1
    }

    /// Counter-clockwise successor of `e` around its origin.
    pub fn next(&self, e: Dart) -> Dart {
        self.next[e]
    }

    pub fn prev(&self, e: Dart) -> Dart {
        self.prev[e]
    }

    /// Next dart along the face to the left of `e`.
    pub fn face_successor(&self, e: Dart) -> Dart {
        self.prev[e ^ 1]
    }

    pub fn conductance(&self, e: Dart) -> f64 {
        self.conductance[e]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v]
    }

    pub fn first_dart(&self, v: usize) -> Dart {
        self.first_dart[v]
    }

    /// Darts leaving `v` in counter-clockwise order.
    pub fn darts_from(&self, v: usize) -> impl Iterator<Item = Dart> + '_ {
        let start = self.first_dart[v];
        let mut cur = Some(start);
        std::iter::from_fn(move || {
            let e = cur?;
            let n = self.next[e];
            cur = (n != start).then_some(n);
            Some(e)
        })
    }

    /// Neighbors of `v` in counter-clockwise order, with repetition for
    /// multiple edges.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.darts_from(v).map(move |e| self.head(e))
    }

    /// First dart from `u` to `v` in the rotation at `u`.
    pub fn find_dart(&self, u: usize, v: usize) -> Option<Dart> {
        if u >= self.vertex_count {
            return None;
        }
        self.darts_from(u).find(|&e| self.head(e) == v)
    }

    pub fn faces(&self) -> &Faces {
        &self.faces
    }

    pub fn outer_dart(&self) -> Option<Dart> {
        self.outer
    }

    pub fn outer_face(&self) -> Option<usize> {
        self.outer.map(|e| self.faces.face_of(e))
    }

    /// Vertices of face `f` in traversal order.
    pub fn face_vertices(&self, f: usize) -> Vec<usize> {
        self.faces.darts(f).iter().map(|&e| self.origin[e]).collect()
    }

    /// Rotation lists, the inverse of [`PlanarMap::from_rotations`] up to
    /// the starting dart at each vertex.
    pub fn rotations(&self) -> Vec<Vec<usize>> {
        (0..self.vertex_count).map(|v| self.neighbors(v).collect()).collect()
    }

    /// Degree and conductance bounds. The outer face, if marked, is left out
    /// of the codegree.
    pub fn map_data(&self) -> MapData {
        let outer = self.outer_face();
        let max_codegree = (0..self.faces.count())
            .filter(|&f| Some(f) != outer)
            .map(|f| self.faces.degree(f))
            .max()
            .unwrap_or(0);
        let (lo, hi) = self
            .conductance
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &c| (lo.min(c), hi.max(c)));
        MapData {
            max_degree: self.degree.iter().copied().max().unwrap_or(0),
            max_codegree,
            min_conductance: lo,
            max_conductance: hi,
        }
    }

    /// The dual map. Dual vertex `f` is face `f`; dual dart `e` crosses
    /// primal dart `e` from its left face to its right face, and carries the
    /// reciprocal conductance.
    pub fn dual(&self) -> PlanarMap {
        let m = self.dart_count();
        let origin: Vec<usize> = (0..m).map(|e| self.faces.face_of(e)).collect();
        let next: Vec<Dart> = (0..m).map(|e| self.face_successor(e)).collect();
        let conductance: Vec<f64> = self.conductance.iter().map(|c| 1.0 / c).collect();
        PlanarMap::from_darts(self.faces.count(), origin, next, conductance, None)
            .expect("dual of a planar map is a planar map")
    }
}
