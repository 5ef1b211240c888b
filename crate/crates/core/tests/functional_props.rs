use proptest::prelude::*;
use std::f64::consts::PI;

use yamalab_core::functional::laplacian_values;
use yamalab_core::verify::{random_field, trial_rng};
use yamalab_core::{
    conformal_exponents, el_residual, energy, grad_lp_norm, laplacian, lp_norm, mass_profile,
    sphere_volume, yamabe_quotient, yamabe_sphere_constant, EuclideanFactor, Field,
    ManifoldFactor, ProductGrid, RadialGrid,
};

fn weighted_pairing(u: &Field, lap: &[f64]) -> f64 {
    lap.iter()
        .zip(u.values())
        .zip(u.grid().weights())
        .map(|((l, x), w)| l * x * w)
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lp_norm_is_homogeneous(seed in any::<u64>(), c in 0.0..50.0f64, s in 1.0..8.0f64) {
        let u = random_field(&mut trial_rng(seed, 10)).unwrap();
        let n = lp_norm(&u, s).unwrap();
        let nc = lp_norm(&u.scaled(c).unwrap(), s).unwrap();
        prop_assert!((nc - c * n).abs() <= 1e-13 * c * n + f64::MIN_POSITIVE);
    }

    #[test]
    fn summation_by_parts(seed in any::<u64>()) {
        let u = random_field(&mut trial_rng(seed, 11)).unwrap();
        let g = grad_lp_norm(&u, 2.0).unwrap();
        let pairing = weighted_pairing(&u, &laplacian(&u));
        prop_assert!((pairing - g * g).abs() <= 1e-12 * g * g);
    }

    #[test]
    fn quotient_is_scale_invariant(seed in any::<u64>(), c in 1e-3..1e3f64, t in 0.0..1.0f64) {
        let u = random_field(&mut trial_rng(seed, 12)).unwrap();
        let ce = conformal_exponents(2, 1).unwrap();
        let s = 2.0 + 1e-3 + t * (ce.p() - 2.0 - 1e-3);
        let q = yamabe_quotient(&u, s, &ce).unwrap().value;
        let qc = yamabe_quotient(&u.scaled(c).unwrap(), s, &ce).unwrap().value;
        prop_assert!((q - qc).abs() <= 1e-13 * q.abs());
    }

    #[test]
    fn laplacian_kills_constants(seed in any::<u64>(), c in 0.0..10.0f64) {
        let u = random_field(&mut trial_rng(seed, 13)).unwrap();
        let k = Field::from_fn(u.grid().clone(), |_, _| c).unwrap();
        prop_assert!(laplacian(&k).iter().all(|x| x.abs() <= 1e-13 * c.max(1.0)));
    }

    #[test]
    fn gradient_vanishes_only_on_constants(seed in any::<u64>()) {
        let u = random_field(&mut trial_rng(seed, 14)).unwrap();
        prop_assert!(grad_lp_norm(&u, 2.0).unwrap() > 0.0);
        let k = Field::from_fn(u.grid().clone(), |_, _| 0.7).unwrap();
        prop_assert_eq!(grad_lp_norm(&k, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn operations_are_pure(seed in any::<u64>()) {
        let u = random_field(&mut trial_rng(seed, 15)).unwrap();
        let ce = conformal_exponents(2, 1).unwrap();
        let a = yamabe_quotient(&u, 4.0, &ce).unwrap();
        let b = yamabe_quotient(&u.clone(), 4.0, &ce).unwrap();
        prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        prop_assert_eq!(energy(&u, &ce).to_bits(), energy(&u, &ce).to_bits());
    }

    #[test]
    fn mass_profile_is_monotone(k in 4usize..40, decay in 0.1..3.0f64, s in 2.5..6.0f64) {
        let m = ManifoldFactor::homogeneous(2.0, 1.0).unwrap();
        let grid = ProductGrid::new(m, EuclideanFactor::Radial(RadialGrid::cell_centered(2, 5.0, k).unwrap()));
        let u = Field::from_fn(grid, |_, c| (-decay * c as f64).exp()).unwrap();
        let radii: Vec<f64> = (1..=10).map(|i| 0.5 * i as f64).collect();
        let prof = mass_profile(&u, s, &radii).unwrap();
        prop_assert!(prof.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((prof.last().unwrap() - 1.0).abs() <= 1e-14);
    }
}

#[test]
fn conformal_constants() {
    let ce = conformal_exponents(2, 1).unwrap();
    assert_eq!((ce.d(), ce.a(), ce.p()), (3, 8.0, 6.0));
    let ce = conformal_exponents(3, 2).unwrap();
    assert_eq!(ce.d(), 5);
    assert!((ce.a() - 16.0 / 3.0).abs() < 1e-15);
    assert!((ce.p() - 10.0 / 3.0).abs() < 1e-15);
    assert!(conformal_exponents(1, 2).is_err());
    assert!(conformal_exponents(2, 0).is_err());
}

#[test]
fn sphere_constants_match_closed_forms() {
    // Vol(S^3) = 2π², Vol(S^4) = 8π²/3, Vol(S^5) = π³
    let closed = [(3, 2.0 * PI * PI), (4, 8.0 * PI * PI / 3.0), (5, PI.powi(3))];
    for (d, vol) in closed {
        assert!((sphere_volume(d).unwrap() - vol).abs() < 1e-13 * vol);
        let y = f64::from(d * (d - 1)) * vol.powf(2.0 / f64::from(d));
        assert!((yamabe_sphere_constant(d).unwrap() - y).abs() < 1e-13 * y);
    }
    let y3 = yamabe_sphere_constant(3).unwrap();
    assert!((y3 - 43.823).abs() < 1e-3, "{y3}");
    assert!(yamabe_sphere_constant(2).is_err());
}

#[test]
fn constant_fields_and_the_equation() {
    let ce = conformal_exponents(2, 1).unwrap();
    let (vol, curv, s) = (3.0, 1.5, 4.5);
    let grid = ProductGrid::new(
        ManifoldFactor::homogeneous(vol, curv).unwrap(),
        EuclideanFactor::line(3, 0.5).unwrap(),
    );
    let len = 7.0 * 0.5 * vol;
    // S·c = λ·c^{s-1} with λ = Q_s(c) holds iff ‖c‖_s = 1, i.e. c = len^{-1/s}
    let c = len.powf(-1.0 / s);
    let unit = Field::from_fn(grid.clone(), |_, _| c).unwrap();
    let q = yamabe_quotient(&unit, s, &ce).unwrap().value;
    assert!((q - curv * len.powf(1.0 - 2.0 / s)).abs() < 1e-12 * q);
    assert!(el_residual(&unit, s, q, &ce) < 1e-12);
    let off = Field::from_fn(grid, |_, _| 2.0 * c).unwrap();
    let q = yamabe_quotient(&off, s, &ce).unwrap().value;
    assert!(el_residual(&off, s, q, &ce) > 1e-3);
}

#[test]
fn laplacian_on_a_line_matches_second_differences() {
    let grid = ProductGrid::new(
        ManifoldFactor::homogeneous(1.0, 0.0).unwrap(),
        EuclideanFactor::line(3, 0.5).unwrap(),
    );
    let vals = vec![0.0, 1.0, 4.0, 2.0, 3.0, 1.0, 0.0];
    let lap = laplacian_values(&grid, &vals);
    let h2 = 0.25;
    for k in 1..6 {
        let expect = (2.0 * vals[k] - vals[k - 1] - vals[k + 1]) / h2;
        assert!((lap[k] - expect).abs() < 1e-12, "{k}: {} vs {expect}", lap[k]);
    }
    // end cells only see their single interior edge
    assert!((lap[0] - (vals[0] - vals[1]) / h2).abs() < 1e-12);
}
