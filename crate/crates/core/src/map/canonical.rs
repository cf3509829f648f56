use super::PlanarMap;

/// Relabeling-invariant code of a map.
///
/// Two maps get equal codes exactly when an orientation-preserving
/// isomorphism takes one to the other. The cost is quadratic in the number
/// of darts, which is fine for test-sized maps.
pub fn canonical_code(map: &PlanarMap) -> Vec<usize> {
    (0..map.dart_count())
        .map(|root| code_from(map, root))
        .min()
        .unwrap_or_default()
}

fn code_from(map: &PlanarMap, root: usize) -> Vec<usize> {
    let m = map.dart_count();
    let mut label = vec![usize::MAX; m];
    let mut order = Vec::with_capacity(m);
    label[root] = 0;
    order.push(root);
    let mut i = 0;
    let mut code = Vec::with_capacity(2 * m);
    while i < order.len() {
        let e = order[i];
        for f in [map.next(e), map.rev(e)] {
            if label[f] == usize::MAX {
                label[f] = order.len();
                order.push(f);
            }
            code.push(label[f]);
        }
        i += 1;
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabeled_maps_share_a_code() {
        let rot = vec![vec![1, 2, 3], vec![2, 0, 3], vec![3, 0, 1], vec![1, 0, 2]];
        let a = PlanarMap::from_rotations(&rot, &[]).unwrap();
        let sigma = [2, 3, 0, 1];
        let mut relabeled = vec![Vec::new(); 4];
        for (v, r) in rot.iter().enumerate() {
            // also rotate each list so it starts elsewhere
            let mut r: Vec<usize> = r.iter().map(|&u| sigma[u]).collect();
            r.rotate_left(v % 3);
            relabeled[sigma[v]] = r;
        }
        let b = PlanarMap::from_rotations(&relabeled, &[]).unwrap();
        assert_eq!(canonical_code(&a), canonical_code(&b));
    }

    #[test]
    fn different_maps_differ() {
        let tri = PlanarMap::from_rotations(&[vec![1, 2], vec![2, 0], vec![0, 1]], &[]).unwrap();
        let path = PlanarMap::from_rotations(&[vec![1], vec![0, 2], vec![1]], &[]).unwrap();
        assert_ne!(canonical_code(&tri), canonical_code(&path));
    }
}
