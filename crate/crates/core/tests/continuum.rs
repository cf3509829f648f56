use std::f64::consts::{PI, TAU};

use hdpack::continuum::{
    douglas_energy, energy_continuous, grid_capacity, inner_product_continuous, poisson_extend, BoundaryFunction,
    DiscField, DiscRule, GridField, HarmonicField, Region, TargetDisc,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn coefficients(k: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (proptest::collection::vec(-1.0f64..1.0, k), proptest::collection::vec(-1.0f64..1.0, k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn douglas_matches_fourier_energy((a, b) in (1usize..=8).prop_flat_map(coefficients), a0 in -2.0f64..2.0) {
        let field = HarmonicField::new(a0, a.clone(), b.clone()).unwrap();
        let expected = field.energy(1.0);
        prop_assume!(expected > 1e-6);
        let d = douglas_energy(&BoundaryFunction::trigonometric(a0, a, b), 1024).unwrap();
        prop_assert!((d - expected).abs() <= 1e-2 * expected, "{} vs {}", d, expected);
    }

    #[test]
    fn energy_splits_over_frequencies((a, b) in coefficients(6), rho in 0.1f64..1.0) {
        let whole = HarmonicField::new(0.0, a.clone(), b.clone()).unwrap();
        let parts: f64 = (0..6)
            .map(|k| {
                let mut ak = vec![0.0; 6];
                let mut bk = vec![0.0; 6];
                ak[k] = a[k];
                bk[k] = b[k];
                HarmonicField::new(0.0, ak, bk).unwrap().energy(rho)
            })
            .sum();
        prop_assert!((whole.energy(rho) - parts).abs() <= 1e-12 * (1.0 + parts));
    }

    #[test]
    fn harmonic_fields_have_the_mean_value_property(
        (a, b) in coefficients(5),
        cr in 0.0f64..0.5,
        ct in 0.0f64..TAU,
        frac in 0.05f64..0.95,
    ) {
        let field = HarmonicField::new(0.3, a, b).unwrap();
        let center = Complex64::from_polar(cr, ct);
        let radius = frac * (1.0 - cr);
        let avg = DiscRule::default().average(center, radius, |z| field.eval(z));
        prop_assert!((avg - field.eval(center)).abs() < 1e-10);
    }

    #[test]
    fn oscillation_is_bounded_by_local_energy(
        (a, b) in coefficients(4),
        cr in 0.0f64..0.4,
        ct in 0.0f64..TAU,
        alpha in prop::sample::select(vec![2.0f64, 4.0]),
    ) {
        let field = HarmonicField::new(0.0, a, b).unwrap();
        let z0 = Complex64::from_polar(cr, ct);
        let r = 0.95 * (1.0 - cr) / alpha;
        let sup = (0..256)
            .map(|j| (field.eval(z0 + Complex64::from_polar(r, TAU * j as f64 / 256.0)) - field.eval(z0)).powi(2))
            .fold(0.0, f64::max);
        let local = field.local_energy(z0, alpha * r, &DiscRule::new(32, 128));
        let bound = (alpha * alpha / (alpha * alpha - 1.0)).ln() / PI * local;
        prop_assert!(sup <= bound * (1.0 + 1e-9) + 1e-14, "{} > {}", sup, bound);
    }
}

#[test]
fn douglas_of_single_modes() {
    for k in 1..=5 {
        let d = douglas_energy(&BoundaryFunction::from_fn(move |t| (k as f64 * t).cos()), 2048).unwrap();
        assert!((d / (k as f64 * PI) - 1.0).abs() < 1e-3, "k = {k}");
    }
}

#[test]
fn poisson_extension_recovers_a_sampled_trace() {
    let g = BoundaryFunction::from_fn(|t| 1.0 + t.cos() - 0.25 * (3.0 * t).sin());
    let field = poisson_extend(&g, 128, 6).unwrap();
    assert!((field.a0 - 1.0).abs() < 1e-12);
    assert!((field.a[0] - 1.0).abs() < 1e-12 && (field.b[2] + 0.25).abs() < 1e-12);
    assert!((energy_continuous(&field.clone().into(), 1.0).unwrap() - (PI + 3.0 * PI / 16.0)).abs() < 1e-10);
}

#[test]
fn grid_inner_product_converges_to_the_harmonic_one() {
    let f = HarmonicField::new(0.5, vec![1.0, 0.2], vec![0.0, -0.4]).unwrap();
    let g = HarmonicField::new(-0.2, vec![0.3], vec![0.6]).unwrap();
    let region = Region { center: Complex64::new(0.1, 0.0), radius: 0.5 };
    let exact = inner_product_continuous(&f.clone().into(), &g.clone().into(), region).unwrap();
    let errors: Vec<f64> = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0]
        .iter()
        .map(|&h| {
            let gf = DiscField::from(GridField::sample(h, |z| f.eval(z)).unwrap());
            (inner_product_continuous(&gf, &g.clone().into(), region).unwrap() - exact).abs()
        })
        .collect();
    assert!(errors[2] < errors[0], "{errors:?}");
    assert!(errors[2] < 0.05 * exact.abs(), "{errors:?}");
}

#[test]
fn grid_capacity_grows_with_the_target() {
    let h = 1.0 / 64.0;
    let caps: Vec<f64> = [0.1, 0.2, 0.3]
        .iter()
        .map(|&r| grid_capacity(&[TargetDisc::new(Complex64::new(0.0, 0.0), r)], h).unwrap().value)
        .collect();
    assert!(caps[0] < caps[1] && caps[1] < caps[2], "{caps:?}");
    let pair = [TargetDisc::new(Complex64::new(-0.3, 0.0), 0.1), TargetDisc::new(Complex64::new(0.3, 0.0), 0.1)];
    let one = grid_capacity(&pair[..1], h).unwrap().value;
    let both = grid_capacity(&pair, h).unwrap().value;
    assert!(one < both && both < 2.0 * one);
    let quarter = grid_capacity(&[TargetDisc::new(Complex64::new(0.0, 0.0), 0.25)], h).unwrap().value;
    assert!((quarter / (TAU / 4f64.ln()) - 1.0).abs() < 0.05);
}
