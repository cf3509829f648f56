use std::sync::Arc;
use std::time::{Duration, Instant};

use hdpack::map::{generate_tiling, grid_patch, truncate, PlanarMap, Truncation};
use hdpack::packing::{
    angle_sums, compute_delta0, edge_condition_holds, geometry_report, pack, packing_json, packing_svg, raw_centers,
    sausages_disjoint, solve_radii, BoundaryMode, DoublePacking, Patch,
};
use proptest::prelude::*;

fn heptagonal(layers: usize) -> Truncation {
    let m = Arc::new(generate_tiling(7, 3, layers).unwrap());
    truncate(m, 0, layers).unwrap()
}

fn grid() -> Truncation {
    Truncation::from_outer_face(Arc::new(grid_patch(11, 11).unwrap()), 60).unwrap()
}

fn max_defect(p: &DoublePacking) -> f64 {
    let (vs, fs) = angle_sums(p.patch(), p.radii());
    let tau = std::f64::consts::TAU;
    vs.iter().map(|&(_, s)| (s - tau).abs()).chain(fs.iter().map(|s| (s - tau).abs())).fold(0.0, f64::max)
}

#[test]
fn desk_scale_instances_converge() {
    let mut cases: Vec<(String, Truncation)> = (3..=5).map(|l| (format!("(7,3,{l})"), heptagonal(l))).collect();
    cases.push(("grid 11x11".into(), grid()));
    for (name, t) in &cases {
        for mode in [BoundaryMode::Disc, BoundaryMode::Uniform(1.0)] {
            let start = Instant::now();
            let p = pack(t, &mode, 1e-10).unwrap();
            assert!(start.elapsed() < Duration::from_secs(60), "{name}");
            assert!(max_defect(&p) <= 1e-8, "{name} {mode:?}");
            let r = p.residuals();
            assert!(r.tangency <= 1e-4 && r.orthogonality <= 1e-4, "{name} {mode:?} {r:?}");
        }
    }
}

#[test]
fn rescaled_radii_rescale_centers() {
    let t = heptagonal(3);
    let patch = Patch::new(&t).unwrap();
    let radii = solve_radii(&patch, &BoundaryMode::Uniform(1.0), 1e-12).unwrap();
    let (zv, zf) = raw_centers(&patch, &radii).unwrap();
    for lambda in [0.3, 2.0, 17.5] {
        let mut scaled = radii.clone();
        scaled.vertex.iter_mut().for_each(|r| *r *= lambda);
        scaled.face.iter_mut().for_each(|r| *r *= lambda);
        let (sv, sf) = raw_centers(&patch, &scaled).unwrap();
        for (a, b) in zv.iter().zip(&sv).chain(zf.iter().zip(&sf)) {
            assert!((a * lambda - b).norm() <= 1e-9 * lambda.max(1.0) * (1.0 + a.norm()));
        }
    }
}

#[test]
fn hexagonal_patch_is_flat() {
    let m = Arc::new(generate_tiling(6, 3, 5).unwrap());
    let t = truncate(m, 0, 5).unwrap();
    let p = pack(&t, &BoundaryMode::Uniform(1.0), 1e-12).unwrap();
    let inner: Vec<f64> = t
        .interior()
        .iter()
        .filter(|&&v| !t.map().neighbors(v).any(|u| t.is_boundary(u)))
        .map(|&v| p.vertex_radius(v))
        .collect();
    assert!(!inner.is_empty());
    let mean = inner.iter().sum::<f64>() / inner.len() as f64;
    assert!(inner.iter().all(|r| (r - mean).abs() <= 0.01 * mean));
}

#[test]
fn delta0_satisfies_both_predicates() {
    for t in [heptagonal(3), heptagonal(4), grid()] {
        for mode in [BoundaryMode::Disc, BoundaryMode::Uniform(1.0)] {
            let p = pack(&t, &mode, 1e-10).unwrap();
            let d = p.delta0();
            assert!(d > 0.0 && d <= 0.5);
            assert!(edge_condition_holds(&p, d) && sausages_disjoint(&p, d));
            assert_eq!(compute_delta0(&p), d);
            if d < 0.5 {
                let up = 2.0 * d;
                assert!(!(edge_condition_holds(&p, up) && sausages_disjoint(&p, up)));
            }
        }
    }
}

fn relabeled(map: &PlanarMap, perm: &[usize]) -> PlanarMap {
    let mut rot = vec![Vec::new(); map.vertex_count()];
    for (v, r) in map.rotations().into_iter().enumerate() {
        let mut r: Vec<usize> = r.into_iter().map(|u| perm[u]).collect();
        let shift = v % r.len().max(1);
        r.rotate_left(shift);
        rot[perm[v]] = r;
    }
    let out = PlanarMap::from_rotations(&rot, &[]).unwrap();
    match map.outer_dart() {
        Some(e) => {
            let d = out.find_dart(perm[map.origin(e)], perm[map.head(e)]).unwrap();
            out.with_outer_dart(d).unwrap()
        }
        None => out,
    }
}

#[test]
fn delta0_does_not_depend_on_traversal_order() {
    let m = generate_tiling(7, 3, 4).unwrap();
    let n = m.vertex_count();
    let perm: Vec<usize> = (0..n).map(|v| (v * 37 + 11) % n).collect();
    let a = truncate(Arc::new(m.clone()), 0, 4).unwrap();
    let b = truncate(Arc::new(relabeled(&m, &perm)), perm[0], 4).unwrap();
    for mode in [BoundaryMode::Disc, BoundaryMode::Uniform(1.0)] {
        let pa = pack(&a, &mode, 1e-10).unwrap();
        let pb = pack(&b, &mode, 1e-10).unwrap();
        assert_eq!(pa.vertex_count(), pb.vertex_count());
        assert_eq!(pa.delta0(), pb.delta0());
    }
}

#[test]
fn ring_ratio_stays_bounded_as_layers_grow() {
    let ratios: Vec<f64> = (2..=6)
        .map(|l| {
            let p = pack(&heptagonal(l), &BoundaryMode::Disc, 1e-10).unwrap();
            let g = geometry_report(&p);
            assert!(g.sausage_ok);
            g.ring_ratio_max
        })
        .collect();
    let steps: Vec<f64> = ratios.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(steps.windows(2).all(|s| s[1] < s[0]), "{ratios:?}");
    assert!(ratios.iter().all(|r| r.is_finite() && *r < 5.0), "{ratios:?}");
}

#[test]
fn grid_report_has_unit_ring_ratio() {
    let p = pack(&grid(), &BoundaryMode::Uniform(1.0), 1e-12).unwrap();
    let g = geometry_report(&p);
    assert!((g.ring_ratio_max - 1.0).abs() < 1e-9 && (g.ring_ratio_min - 1.0).abs() < 1e-9);
    assert_eq!(g.delta0, 0.5);
    assert!(g.sausage_ok);
}

#[test]
fn json_and_svg_output() {
    let p = pack(&heptagonal(3), &BoundaryMode::Disc, 1e-10).unwrap();
    let json = packing_json(&p);
    let arr = json.as_array().unwrap();
    assert_eq!(arr.len(), p.vertex_count() + p.face_count());
    assert_eq!(arr[0]["kind"], "vertex");
    assert_eq!(arr[p.vertex_count()]["kind"], "face");
    assert_eq!(arr[0]["center"].as_array().unwrap().len(), 2);
    let svg = packing_svg(&p);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches(r#"class="primal""#).count(), p.vertex_count());
    assert_eq!(svg.matches("stroke-dasharray").count(), p.face_count());
    assert_eq!(svg, packing_svg(&p));
}

#[test]
fn non_polyhedral_patch_is_rejected() {
    let tri = PlanarMap::from_rotations(&[vec![1, 2], vec![2, 0], vec![0, 1]], &[]).unwrap();
    let t = truncate(Arc::new(tri), 0, 1).unwrap();
    assert!(pack(&t, &BoundaryMode::Disc, 1e-10).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn prescribed_boundaries_pack(seed in proptest::collection::vec(0.5f64..2.0, 21)) {
        let t = heptagonal(2);
        let nb = t.boundary().len();
        let values: Vec<f64> = (0..nb).map(|i| seed[i % seed.len()]).collect();
        let p = pack(&t, &BoundaryMode::Prescribed(values.clone()), 1e-10).unwrap();
        prop_assert!(max_defect(&p) <= 1e-8);
        prop_assert!(p.residuals().max() <= 1e-4);
        let scale = p.vertex_radius(t.boundary()[0]) / values[0];
        for (i, &b) in t.boundary().iter().enumerate() {
            prop_assert!((p.vertex_radius(b) - scale * values[i]).abs() <= 1e-8 * scale);
        }
    }
}
