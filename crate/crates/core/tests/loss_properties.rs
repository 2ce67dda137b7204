use proptest::prelude::*;
use scoresmooth_core::regloss::*;
use scoresmooth_core::rng::{derive_seed, seeded, Rng};
use scoresmooth_core::scorefield::*;

proptest! {
    #[test]
    fn f_kappa_inverse_round_trips(k in 0.1f64..4.0) {
        let back = f_inverse(f_kappa(k)).unwrap();
        prop_assert!((back - k).abs() <= 1e-8);
    }

    #[test]
    fn r_ignores_added_affine_terms(
        n in 2usize..8,
        frac in 0.05f64..0.95,
        slope in -50.0f64..50.0,
        icpt in -50.0f64..50.0,
    ) {
        let ts = TrainingSet::uniform(n, 1.0, 1).unwrap();
        let t = 0.01;
        let f = PiecewiseLinear1D::smoothed_score(&ts, t, frac * ts.half_spacing()).unwrap();
        let g = f.add_affine(slope, icpt);
        let (a, b) = (nonsmoothness_r(&f), nonsmoothness_r(&g));
        prop_assert!((a - b).abs() <= 1e-9 * a);
    }
}

#[test]
fn f_kappa_decreases_strictly() {
    let values: Vec<f64> = (0..=50).map(|i| f_kappa(0.1 * i as f64)).collect();
    assert!((values[0] - 1.0).abs() <= 1e-10);
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    assert!(values[50] < 1e-5);
}

#[test]
fn r_matches_closed_form_on_random_configurations() {
    let mut rng = seeded(20);
    for _ in 0..20 {
        let n = rng.random_range(2..10usize);
        let t = 10f64.powf(rng.random_range(-6.0..-3.0));
        let ts = TrainingSet::uniform(n, 1.0, 1).unwrap();
        let kappa = rng.random_range(0.1..3.0);
        let delta = kappa * t.sqrt();
        let f = PiecewiseLinear1D::smoothed_score(&ts, t, delta).unwrap();
        let direct = nonsmoothness_r(&f);
        let closed = 2.0 * (n - 1) as f64 * ts.half_spacing() / (t * (ts.half_spacing() - delta));
        assert!(
            (direct - closed).abs() <= 1e-9 * closed,
            "n = {n}, t = {t}: {direct} vs {closed}"
        );
        assert!((smoothed_r_closed_form(&ts, t, delta) - closed).abs() <= 1e-9 * closed);
    }
}

#[test]
fn monte_carlo_loss_agrees_with_quadrature() {
    let mut rng = seeded(5);
    for i in 0..5 {
        let n = rng.random_range(2..6usize);
        let t = 10f64.powf(rng.random_range(-3.0..-1.5));
        let kappa = rng.random_range(0.5..2.0);
        let ts = TrainingSet::uniform(n, 1.0, 1).unwrap();
        let sp = SmoothingParams::new(kappa).unwrap();
        let f = PiecewiseLinear1D::smoothed_score(&ts, t, sp.delta_at(t)).unwrap();
        let quad = score_matching_loss_quad(&f, t, &ts, DEFAULT_NODES).unwrap();
        let field = SmoothedScore::new(ts.clone(), sp);
        let mc = score_matching_loss_mc(&field, t, &ts, 1_000_000, derive_seed(9, i)).unwrap();
        assert!(
            (mc.value - quad).abs() <= 4.0 * mc.std_error,
            "n = {n}, t = {t}, κ = {kappa}: mc {} ± {} vs quad {quad}",
            mc.value,
            mc.std_error
        );
    }
}

#[test]
fn dense_interpolation_of_the_esf_has_negligible_loss() {
    let ts = TrainingSet::uniform(2, 1.0, 1).unwrap();
    let t = 1e-3;
    let esf = EsfCurve { ts: &ts, t };
    let f = PiecewiseLinear1D::interpolate(|x| esf.value(x), -2.0, 2.0, 10_000, -1.0 / t, -1.0 / t)
        .unwrap();
    let loss = score_matching_loss_quad(&f, t, &ts, DEFAULT_NODES).unwrap();
    assert!((0.0..1e-10).contains(&loss), "loss = {loss}");
}

#[test]
fn smoothed_loss_is_positive_and_esf_loss_is_zero() {
    let ts = TrainingSet::uniform(3, 1.0, 1).unwrap();
    let t = 1e-3;
    let esf = EsfCurve { ts: &ts, t };
    assert!(
        score_matching_loss_quad(&esf, t, &ts, DEFAULT_NODES)
            .unwrap()
            .abs()
            < 1e-20
    );
    let f = PiecewiseLinear1D::smoothed_score(&ts, t, t.sqrt()).unwrap();
    assert!(score_matching_loss_quad(&f, t, &ts, DEFAULT_NODES).unwrap() > 0.0);
}
