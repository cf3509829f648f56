use std::sync::Arc;

use hdpack::map::{generate_tiling, grid_patch, truncate, PlanarMap, Truncation};
use hdpack::potential::{
    capacity, energy, energy_form, escape_capacity, harmonic_defect, inner_product, quasi_asymptotic_profile,
    royden_project, solve_dirichlet, walk_escape_capacity, walk_limit_estimate, ProfileTrend, VertexFunction,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid(n: usize) -> Truncation {
    Truncation::from_outer_face(Arc::new(grid_patch(n, n).unwrap()), (n / 2) * n + n / 2).unwrap()
}

fn heptagonal(radius: usize) -> Truncation {
    truncate(Arc::new(generate_tiling(7, 3, radius).unwrap()), 0, radius).unwrap()
}

fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn k4(c: [f64; 6]) -> PlanarMap {
    let rot = [vec![1, 2, 3], vec![0, 3, 2], vec![0, 1, 3], vec![0, 2, 1]];
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let cond: Vec<_> = pairs.iter().zip(c).map(|(&(u, v), c)| (u, v, c)).collect();
    PlanarMap::from_rotations(&rot, &cond).unwrap()
}

proptest! {
    #[test]
    fn k4_energy_matches_edge_sum(
        c in proptest::array::uniform6(0.1f64..5.0),
        phi in proptest::array::uniform4(-3.0f64..3.0),
    ) {
        let map = k4(c);
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let direct: f64 = pairs.iter().zip(c).map(|(&(u, v), c)| c * (phi[u] - phi[v]).powi(2)).sum();
        let e = energy(&map, &phi).unwrap();
        prop_assert!((e - direct).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn energy_vanishes_only_on_constants(seed in any::<u64>(), a in -5.0f64..5.0) {
        let t = grid(6);
        let n = t.vertex_count();
        prop_assert!(energy(t.map(), &vec![a; n]).unwrap() == 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut phi = vec![a; n];
        let v = rng.gen_range(0..n);
        phi[v] += 1e-3;
        prop_assert!(energy(t.map(), &phi).unwrap() > 0.0);
    }

    #[test]
    fn inner_product_is_symmetric_and_positive(seed in any::<u64>()) {
        let t = heptagonal(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (phi, psi) = (random_values(&mut rng, t.vertex_count()), random_values(&mut rng, t.vertex_count()));
        let o = t.root();
        let ab = inner_product(t.map(), &phi, &psi, o).unwrap();
        let ba = inner_product(t.map(), &psi, &phi, o).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12 * ab.abs().max(1.0));
        prop_assert!(inner_product(t.map(), &phi, &phi, o).unwrap() > 0.0);
    }

    #[test]
    fn dirichlet_solve_is_linear_and_obeys_maximum_principle(seed in any::<u64>(), a in -2.0f64..2.0) {
        let t = heptagonal(4);
        let nb = t.boundary().len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g) = (random_values(&mut rng, nb), random_values(&mut rng, nb));
        let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + y).collect();
        let (hf, hg, hc) = (
            solve_dirichlet(&t, &f).unwrap(),
            solve_dirichlet(&t, &g).unwrap(),
            solve_dirichlet(&t, &combo).unwrap(),
        );
        for v in 0..t.vertex_count() {
            prop_assert!((a * hf[v] + hg[v] - hc[v]).abs() <= 1e-10);
        }
        let (lo, hi) = f.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
        prop_assert!(hf.iter().all(|&x| x >= lo - 1e-12 && x <= hi + 1e-12));
        prop_assert!(harmonic_defect(&t, &hf) <= 1e-10);
    }

    #[test]
    fn royden_split_is_orthogonal_and_idempotent(seed in any::<u64>()) {
        let t = heptagonal(4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = VertexFunction::new(random_values(&mut rng, t.vertex_count())).unwrap();
        let split = royden_project(&t, &phi).unwrap();
        for v in 0..t.vertex_count() {
            prop_assert!((split.harmonic_part[v] + split.d0_part[v] - phi[v]).abs() <= 1e-12);
        }
        prop_assert!(t.boundary().iter().all(|&v| split.d0_part[v] == 0.0));
        let (e, eh, ed) = (
            energy(t.map(), &phi).unwrap(),
            energy(t.map(), &split.harmonic_part).unwrap(),
            energy(t.map(), &split.d0_part).unwrap(),
        );
        prop_assert!((e - eh - ed).abs() <= 1e-8 * e);
        prop_assert!(energy_form(t.map(), &split.harmonic_part, &split.d0_part).unwrap().abs() <= 1e-8 * e);
        let again = royden_project(&t, &split.harmonic_part).unwrap();
        prop_assert!(again.d0_part.iter().all(|x| x.abs() <= 1e-10));
        let d0 = royden_project(&t, &split.d0_part).unwrap();
        prop_assert!(d0.harmonic_part.iter().all(|x| x.abs() <= 1e-12));
    }

    #[test]
    fn capacity_is_monotone_and_matches_escape_route(seed in any::<u64>()) {
        let t = heptagonal(4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let interior = t.interior();
        let small: Vec<usize> = interior.iter().copied().filter(|_| rng.gen_bool(0.1)).collect();
        let mut big = small.clone();
        big.extend(interior.iter().copied().filter(|_| rng.gen_bool(0.2)));
        let (cs, cb) = (capacity(&t, &small).unwrap(), capacity(&t, &big).unwrap());
        prop_assert!(cs.value <= cb.value * (1.0 + 1e-12));
        for (set, cap) in [(&small, &cs), (&big, &cb)] {
            let escape = escape_capacity(&t, set).unwrap();
            prop_assert!((cap.value - escape).abs() <= 1e-6 * cap.value.max(1e-300));
            prop_assert!(set.iter().all(|&v| cap.equilibrium_potential[v] == 1.0));
            prop_assert!(t.boundary().iter().all(|&v| cap.equilibrium_potential[v] == 0.0));
        }
    }
}

#[test]
fn norms_under_two_roots_are_comparable() {
    let t = heptagonal(4);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (o1, o2) = (t.root(), t.interior()[t.interior().len() - 1]);
    let mut worst = 1.0f64;
    for _ in 0..200 {
        let mut phi = random_values(&mut rng, t.vertex_count());
        let shift = rng.gen_range(-10.0..10.0);
        phi.iter_mut().for_each(|x| *x += shift);
        let a = inner_product(t.map(), &phi, &phi, o1).unwrap();
        let b = inner_product(t.map(), &phi, &phi, o2).unwrap();
        worst = worst.max(a / b).max(b / a);
    }
    assert!(worst < 10.0, "norm ratio {worst}");
}

#[test]
fn escape_capacity_of_grid_center_matches_walks() {
    let t = grid(7);
    let exact = capacity(&t, &[t.root()]).unwrap().value;
    let mc = walk_escape_capacity(&t, &[t.root()], 100_000, 2024).unwrap();
    assert!((mc.mean - exact).abs() <= 3.0 * mc.stderr, "{exact} vs {mc:?}");
}

#[test]
fn walks_recover_harmonic_part() {
    let t = grid(7);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let phi = VertexFunction::new(random_values(&mut rng, t.vertex_count())).unwrap();
    let h = royden_project(&t, &phi).unwrap().harmonic_part;
    let mut hits = 0;
    let probes: Vec<usize> = t.interior().iter().copied().step_by(5).collect();
    for (i, &v) in probes.iter().enumerate() {
        let est = walk_limit_estimate(&t, &phi, v, 20_000, 500 + i as u64).unwrap();
        if (est.mean - h[v]).abs() <= 3.0 * est.stderr {
            hits += 1;
        }
    }
    assert!(hits * 10 >= probes.len() * 8, "{hits} of {}", probes.len());
}

#[test]
fn equilibrium_profile_is_bounded() {
    let m = Arc::new(generate_tiling(7, 3, 6).unwrap());
    let family: Vec<Truncation> = (3..=6).map(|r| truncate(m.clone(), 0, r).unwrap()).collect();
    let big = family.last().unwrap();
    let eq = capacity(big, &[big.root()]).unwrap();
    let phi = |parent: usize| big.from_parent(parent).map_or(0.0, |v| eq.equilibrium_potential[v]);
    let eps = 0.2;
    let profile = quasi_asymptotic_profile(&family, phi, eps).unwrap();
    assert_eq!(profile.trend, ProfileTrend::Bounded);
    let bound = energy(big.map(), &eq.equilibrium_potential).unwrap() / (eps * eps);
    assert!(profile.rows.last().unwrap().capacity <= bound);
    let ones = quasi_asymptotic_profile(&family, |_| 1.0, 0.5).unwrap();
    assert_eq!(ones.trend, ProfileTrend::Growing);
}
