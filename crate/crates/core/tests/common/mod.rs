//! Random small maps and a brute-force 3-connectivity oracle shared by
//! the integration tests.

use std::collections::HashSet;

use hdpack::map::{generate_tiling, PlanarMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn stack_triangulation(rng: &mut ChaCha8Rng, extra: usize) -> Vec<Vec<usize>> {
    let mut rot = vec![vec![1, 2], vec![2, 0], vec![0, 1]];
    for _ in 0..extra {
        let map = PlanarMap::from_rotations(&rot, &[]).unwrap();
        let f = rng.gen_range(0..map.face_count());
        let verts = map.face_vertices(f);
        let w = rot.len();
        rot.push(verts.clone());
        for i in 0..3 {
            let (a, b) = (verts[i], verts[(i + 1) % 3]);
            let pos = rot[a].iter().position(|&x| x == b).unwrap();
            rot[a].insert(pos + 1, w);
        }
    }
    rot
}

fn delete_random_edges(rng: &mut ChaCha8Rng, rot: &mut [Vec<usize>], count: usize) {
    for _ in 0..count {
        let v = rng.gen_range(0..rot.len());
        if rot[v].len() <= 1 {
            continue;
        }
        let i = rng.gen_range(0..rot[v].len());
        let u = rot[v][i];
        let mut trial = rot.to_vec();
        trial[v].remove(i);
        let j = trial[u].iter().position(|&x| x == v).unwrap();
        trial[u].remove(j);
        if PlanarMap::from_rotations(&trial, &[]).is_ok() {
            rot.clone_from_slice(&trial);
        }
    }
}

fn double_random_edge(rng: &mut ChaCha8Rng, rot: &mut [Vec<usize>]) {
    let v = rng.gen_range(0..rot.len());
    let i = rng.gen_range(0..rot[v].len());
    let u = rot[v][i];
    rot[v].insert(i, u);
    let j = rot[u].iter().position(|&x| x == v).unwrap();
    rot[u].insert(j + 1, v);
    rot[u].rotate_left(j + 1);
}

pub fn random_small_map(seed: u64) -> PlanarMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = rng.gen_range(0..4);
    let mut rot = match kind {
        0 => generate_tiling(3, [3, 4, 5][rng.gen_range(0..3)], 10).unwrap().rotations(),
        1 => {
            // wheel with n spokes
            let n = rng.gen_range(3..10);
            let mut r = vec![(1..=n).collect::<Vec<_>>()];
            for i in 0..n {
                let (next, prev) = (1 + (i + 1) % n, 1 + (i + n - 1) % n);
                r.push(vec![next, 0, prev]);
            }
            r
        }
        _ => {
            let extra = rng.gen_range(1..10);
            stack_triangulation(&mut rng, extra)
        }
    };
    if rng.gen_bool(0.5) {
        let count = rng.gen_range(1..4);
        delete_random_edges(&mut rng, &mut rot, count);
    }
    if rng.gen_bool(0.2) {
        double_random_edge(&mut rng, &mut rot);
    }
    PlanarMap::from_rotations(&rot, &[]).unwrap()
}

pub fn brute_force_polyhedral(map: &PlanarMap) -> bool {
    let n = map.vertex_count();
    if n < 4 {
        return false;
    }
    let mut seen_pairs = HashSet::new();
    for v in 0..n {
        for u in map.neighbors(v) {
            if u == v || !seen_pairs.insert((v, u)) {
                return false;
            }
        }
    }
    let connected_without = |a: usize, b: usize| {
        let start = (0..n).find(|&x| x != a && x != b).unwrap();
        let mut seen = vec![false; n];
        seen[a] = true;
        seen[b] = true;
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for y in map.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == n - if a == b { 1 } else { 2 }
    };
    (0..n).all(|a| (a..n).all(|b| connected_without(a, b)))
}
