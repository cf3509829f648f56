use super::{MapError, PlanarMap};

/// Combinatorial ball of the regular tiling with vertex degree `p` and
/// `q`-gonal faces.
///
/// `layers = 1` is a single vertex with its `p` faces. Each further layer
/// completes every vertex of the current boundary cycle. Spherical
/// parameters close up into the corresponding Platonic solid once enough
/// layers are requested. The outer face of an open patch is marked.
pub fn generate_tiling(p: usize, q: usize, layers: usize) -> Result<PlanarMap, MapError> {
    if p < 3 || q < 3 {
        return Err(MapError::BadTiling { p, q, reason: "p and q must be at least 3".into() });
    }
    if layers == 0 {
        return Err(MapError::BadTiling { p, q, reason: "layers must be at least 1".into() });
    }
    let mut g = Growth { p, q, rot: vec![Vec::new()] };
    let mut ring = g.flower();
    for _ in 1..layers {
        match g.grow(&ring)? {
            Some(next) => ring = next,
            None => return PlanarMap::from_rotations(&g.rot, &[]),
        }
    }
    let map = PlanarMap::from_rotations(&g.rot, &[])?;
    let outer = map.find_dart(ring[1], ring[0]).expect("ring vertices are adjacent");
    map.with_outer_dart(outer)
}

/// Rectangular patch of the square lattice with `cols × rows` vertices.
/// Vertex `(x, y)` has index `y * cols + x`. The outer face is marked.
pub fn grid_patch(cols: usize, rows: usize) -> Result<PlanarMap, MapError> {
    if cols < 2 || rows < 2 {
        return Err(MapError::OutOfRange { what: "grid side", value: cols.min(rows) });
    }
    let idx = |x: usize, y: usize| y * cols + x;
    let mut rot = Vec::with_capacity(cols * rows);
    for y in 0..rows {
        for x in 0..cols {
            let mut r = Vec::with_capacity(4);
            if x + 1 < cols {
                r.push(idx(x + 1, y));
            }
            if y + 1 < rows {
                r.push(idx(x, y + 1));
            }
            if x > 0 {
                r.push(idx(x - 1, y));
            }
            if y > 0 {
                r.push(idx(x, y - 1));
            }
            rot.push(r);
        }
    }
    let map = PlanarMap::from_rotations(&rot, &[])?;
    let outer = map.find_dart(idx(1, 0), idx(0, 0)).expect("bottom edge exists");
    map.with_outer_dart(outer)
}

struct Growth {
    p: usize,
    q: usize,
    // rotation lists; boundary vertices hold an open fan
    // [next on ring, interior neighbors..., previous on ring]
    rot: Vec<Vec<usize>>,
}

impl Growth {
    fn add_vertex(&mut self) -> usize {
        self.rot.push(Vec::new());
        self.rot.len() - 1
    }

    /// Center vertex 0 with its `p` faces. Returns the boundary cycle in
    /// counter-clockwise order.
    fn flower(&mut self) -> Vec<usize> {
        let spokes: Vec<usize> = (0..self.p).map(|_| self.add_vertex()).collect();
        self.rot[0] = spokes.clone();
        let mut ring = Vec::new();
        let mut attached: Vec<Vec<usize>> = Vec::new();
        for &s in &spokes {
            ring.push(s);
            attached.push(vec![0]);
            for _ in 0..self.q - 3 {
                ring.push(self.add_vertex());
                attached.push(Vec::new());
            }
        }
        self.set_fans(&ring, &attached);
        ring
    }

    fn set_fans(&mut self, ring: &[usize], attached: &[Vec<usize>]) {
        let m = ring.len();
        for i in 0..m {
            let mut r = vec![ring[(i + 1) % m]];
            r.extend(attached[i].iter().rev());
            r.push(ring[(i + m - 1) % m]);
            self.rot[ring[i]] = r;
        }
    }

    /// Adds one layer around `ring`. Returns the new boundary cycle, or
    /// `None` when the surface closed up.
    fn grow(&mut self, ring: &[usize]) -> Result<Option<Vec<usize>>, MapError> {
        let (p, q) = (self.p, self.q);
        let m = ring.len();
        let bad = |reason: String| MapError::BadTiling { p, q, reason };
        // outward edge slots, in counter-clockwise order along the ring
        let mut slots: Vec<usize> = Vec::new();
        for (i, &v) in ring.iter().enumerate() {
            let faces = self.rot[v].len() - 1;
            if faces >= p {
                return Err(bad(format!("vertex {v} already has {faces} faces")));
            }
            slots.extend(std::iter::repeat_n(i, p - faces - 1));
        }
        if slots.is_empty() {
            // one face closes the remaining cycle
            if m != q {
                return Err(bad(format!("closing face would have {m} sides")));
            }
            return Ok(None);
        }
        let n = slots.len();
        // private vertex count of the face between slot j and slot j+1
        let mut private = Vec::with_capacity(n);
        for j in 0..n {
            let (a, b) = (slots[j], slots[(j + 1) % n]);
            let span = if j + 1 < n { b - a } else { b + m - a };
            let chain = span + 1;
            let k = q as isize - chain as isize - 2;
            if k < -1 {
                return Err(bad(format!("face spanning {chain} boundary vertices exceeds {q} sides")));
            }
            private.push(k);
        }
        // endpoints of consecutive slots merge when the face between has no room
        let mut endpoint: Vec<usize> = (0..n).collect();
        for j in 0..n {
            if private[j] == -1 {
                let (a, b) = (find(&mut endpoint, j), find(&mut endpoint, (j + 1) % n));
                endpoint[b.max(a)] = a.min(b);
            }
        }
        if private.iter().all(|&k| k == -1) {
            // every outward edge meets one apex, closing the sphere
            let apex = self.add_vertex();
            let mut fan = Vec::with_capacity(n);
            for &i in &slots {
                self.rot[ring[i]].push(apex);
                fan.push(ring[i]);
            }
            fan.reverse();
            self.rot[apex] = fan;
            return Ok(None);
        }
        let start = (0..n).find(|&j| private[(j + n - 1) % n] >= 0).expect("some face has room");
        let mut class_vertex: Vec<Option<usize>> = vec![None; n];
        let mut new_ring = Vec::new();
        let mut attached: Vec<Vec<usize>> = Vec::new();
        let mut slot_target = vec![0usize; n];
        for step in 0..n {
            let j = (start + step) % n;
            let c = find(&mut endpoint, j);
            let w = match class_vertex[c] {
                Some(w) => w,
                None => {
                    let w = self.add_vertex();
                    class_vertex[c] = Some(w);
                    new_ring.push(w);
                    attached.push(Vec::new());
                    w
                }
            };
            slot_target[j] = w;
            attached.last_mut().unwrap().push(ring[slots[j]]);
            for _ in 0..private[j].max(0) {
                new_ring.push(self.add_vertex());
                attached.push(Vec::new());
            }
        }
        // slot order along the ring is counter-clockwise at each vertex
        for j in 0..n {
            self.rot[ring[slots[j]]].push(slot_target[j]);
        }
        self.set_fans(&new_ring, &attached);
        Ok(Some(new_ring))
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heptagonal_flower_has_eight_vertices() {
        let m = generate_tiling(7, 3, 1).unwrap();
        assert_eq!(m.vertex_count(), 8);
        assert_eq!(m.degree(0), 7);
        assert_eq!(m.face_count(), 8);
    }

    #[test]
    fn layer_sizes_of_degree_seven_triangulation() {
        let counts: Vec<usize> = (1..=4).map(|l| generate_tiling(7, 3, l).unwrap().vertex_count()).collect();
        // rings of 7, 21, 56 around the center
        assert_eq!(counts, vec![8, 29, 85, 232]);
    }

    #[test]
    fn triangular_lattice_interior_degrees() {
        let m = generate_tiling(6, 3, 3).unwrap();
        let outer: std::collections::HashSet<usize> =
            m.face_vertices(m.outer_face().unwrap()).into_iter().collect();
        for v in 0..m.vertex_count() {
            if !outer.contains(&v) {
                assert_eq!(m.degree(v), 6);
            }
        }
        // hexagonal numbers 3l(l+1)+1
        assert_eq!(m.vertex_count(), 37);
    }

    #[test]
    fn interior_faces_have_q_sides() {
        for (p, q) in [(3, 7), (4, 5), (5, 4), (4, 4), (3, 6)] {
            let m = generate_tiling(p, q, 3).unwrap();
            let outer = m.outer_face().unwrap();
            for f in 0..m.face_count() {
                if f != outer {
                    assert_eq!(m.faces().degree(f), q, "({p},{q})");
                }
            }
        }
    }

    #[test]
    fn spherical_parameters_close_up() {
        let expect = [((3, 3), 4), ((3, 4), 8), ((4, 3), 6), ((3, 5), 20), ((5, 3), 12)];
        for ((p, q), v) in expect {
            let m = generate_tiling(p, q, 20).unwrap();
            assert_eq!(m.vertex_count(), v, "({p},{q})");
            assert!(m.outer_face().is_none());
            assert!((0..v).all(|x| m.degree(x) == p));
        }
    }

    #[test]
    fn grid_patch_counts() {
        let m = grid_patch(4, 4).unwrap();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count()), (16, 24, 10));
        assert_eq!(m.faces().degree(m.outer_face().unwrap()), 12);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(generate_tiling(2, 3, 2).is_err());
        assert!(generate_tiling(7, 3, 0).is_err());
    }
}
