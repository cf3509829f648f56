use super::PlanarMap;

/// True when the underlying graph is simple, has at least four vertices and
/// stays connected after deleting any two vertices.
pub fn is_polyhedral(map: &PlanarMap) -> bool {
    let n = map.vertex_count();
    if n < 4 || !is_simple(map) {
        return false;
    }
    let adj: Vec<Vec<usize>> = (0..n).map(|v| map.neighbors(v).collect()).collect();
    (0..n).all(|removed| biconnected_without(&adj, removed))
}

fn is_simple(map: &PlanarMap) -> bool {
    let mut mark = vec![usize::MAX; map.vertex_count()];
    for v in 0..map.vertex_count() {
        for u in map.neighbors(v) {
            if u == v || mark[u] == v {
                return false;
            }
            mark[u] = v;
        }
    }
    true
}

/// Whether the graph minus `removed` is connected and has no cut vertex.
fn biconnected_without(adj: &[Vec<usize>], removed: usize) -> bool {
    let n = adj.len();
    let root = if removed == 0 { 1 } else { 0 };
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    disc[removed] = usize::MAX - 1;
    let mut time = 0;
    let mut root_children = 0;
    // iterative DFS: (vertex, parent, next neighbor index)
    let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
    disc[root] = time;
    low[root] = time;
    time += 1;
    while let Some(&mut (v, parent, ref mut idx)) = stack.last_mut() {
        if *idx < adj[v].len() {
            let u = adj[v][*idx];
            *idx += 1;
            if u == removed || u == parent {
                continue;
            }
            if disc[u] == usize::MAX {
                disc[u] = time;
                low[u] = time;
                time += 1;
                if v == root {
                    root_children += 1;
                }
                stack.push((u, v, 0));
            } else {
                low[v] = low[v].min(disc[u]);
            }
        } else {
            stack.pop();
            if parent != usize::MAX {
                low[parent] = low[parent].min(low[v]);
                if parent != root && low[v] >= disc[parent] {
                    return false;
                }
            }
        }
    }
    time == n - 1 && root_children <= 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::generate_tiling;

    #[test]
    fn platonic_solids_are_polyhedral() {
        for (p, q) in [(3, 3), (3, 4), (4, 3), (3, 5), (5, 3)] {
            let m = generate_tiling(p, q, 10).unwrap();
            assert!(is_polyhedral(&m), "({p},{q})");
        }
    }

    #[test]
    fn triangle_and_square_are_not() {
        let tri = PlanarMap::from_rotations(&[vec![1, 2], vec![2, 0], vec![0, 1]], &[]).unwrap();
        assert!(!is_polyhedral(&tri));
        let sq = PlanarMap::from_rotations(&[vec![1, 3], vec![2, 0], vec![3, 1], vec![0, 2]], &[]).unwrap();
        assert!(!is_polyhedral(&sq));
    }

    #[test]
    fn doubled_edge_is_not_polyhedral() {
        // K4 with a second copy of edge 1-2 drawn next to the first
        let m = PlanarMap::from_rotations(
            &[vec![1, 2, 3], vec![2, 2, 0, 3], vec![1, 3, 0, 1], vec![1, 0, 2]],
            &[],
        );
        let m = m.unwrap();
        assert!(!is_polyhedral(&m));
    }
}
