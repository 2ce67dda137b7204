use proptest::prelude::*;
use scoresmooth_core::scorefield::*;

fn pair() -> TrainingSet {
    TrainingSet::uniform(2, 1.0, 1).unwrap()
}

proptest! {
    #[test]
    fn two_point_posterior_mean_is_tanh(x in -3.0f64..3.0, lt in -6.0f64..0.0) {
        let t = 10f64.powf(lt);
        let m = posterior_mean(x, t, &pair()).unwrap();
        prop_assert!((m - (x / t).tanh()).abs() <= 1e-12);
    }

    #[test]
    fn esf_is_odd_for_symmetric_sets(x in -3.0f64..3.0, lt in -4.0f64..0.0, n in 2usize..7) {
        let t = 10f64.powf(lt);
        let ts = TrainingSet::uniform(n, 1.0, 1).unwrap();
        let a = esf_1d(x, t, &ts).unwrap();
        let b = esf_1d(-x, t, &ts).unwrap();
        prop_assert!((a + b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn smoothed_score_is_continuous_at_band_edges(n in 2usize..8, frac in 0.05f64..0.95, lt in -5.0f64..-1.0) {
        let t = 10f64.powf(lt);
        let ts = TrainingSet::uniform(n, 1.0, 1).unwrap();
        let delta = frac * ts.half_spacing();
        for &y in ts.points() {
            for edge in [y - delta, y + delta] {
                let inside = -(edge - y) / t;
                let k = ts.nearest(edge);
                let gap = if edge > y { k } else { k.wrapping_sub(1) };
                if gap >= ts.midpoints().len() {
                    continue;
                }
                let z = ts.midpoints()[gap];
                let outside = delta / ((ts.half_gap(gap) - delta) * t) * (edge - z);
                prop_assert!((inside - outside).abs() <= 1e-12 * inside.abs().max(1.0));
                let v = smoothed_pl_esf(edge, t, delta, &ts).unwrap();
                prop_assert!((v - inside).abs() <= 1e-12 * inside.abs().max(1.0));
            }
        }
    }

    #[test]
    fn multi_and_smoothed_share_normal_coordinates(
        x in prop::collection::vec(-2.0f64..2.0, 3),
        lt in -4.0f64..-1.0,
    ) {
        let t = 10f64.powf(lt);
        let ts = TrainingSet::uniform(4, 1.0, 3).unwrap();
        let sp = SmoothingParams::new(1.0).unwrap();
        let a = esf_multi(&x, t, &ts).unwrap();
        let b = smoothed_multi(&x, t, &sp, &ts).unwrap();
        prop_assert_eq!(&a[1..], &b[1..]);
    }
}

#[test]
fn smoothed_tends_to_pl_as_delta_fills_the_gap() {
    let ts = TrainingSet::uniform(4, 1.0, 1).unwrap();
    let t = 0.01;
    let delta = ts.half_spacing() * (1.0 - 1e-6);
    for i in 0..=400 {
        let x = -1.5 + 3.0 * i as f64 / 400.0;
        if ts.midpoints().iter().any(|z| (x - z).abs() < 1e-2) {
            continue;
        }
        let pl = pl_esf(x, t, &ts).unwrap();
        let sm = smoothed_pl_esf(x, t, delta, &ts).unwrap();
        assert!(
            (pl - sm).abs() <= 1e-4 * pl.abs().max(1.0),
            "x = {x}: {pl} vs {sm}"
        );
    }
}

#[test]
fn esf_approaches_pl_near_anchors_as_t_shrinks() {
    let ts = TrainingSet::uniform(3, 1.0, 1).unwrap();
    let gap = |t: f64| {
        let mut worst = 0.0f64;
        for &y in ts.points() {
            for i in 0..=100 {
                let x = y - 0.25 + 0.5 * i as f64 / 100.0;
                worst = worst.max((esf_1d(x, t, &ts).unwrap() - pl_esf(x, t, &ts).unwrap()).abs());
            }
        }
        worst
    };
    let mut t = 1e-2;
    while t > 1e-3 {
        let (a, b) = (gap(t), gap(t / 2.0));
        assert!(b * 10.0 <= a || a < 1e-300, "t = {t}: {a} -> {b}");
        t /= 2.0;
    }
}

#[test]
fn evaluators_are_finite_at_tiny_times() {
    let t = 1e-6;
    let ts = TrainingSet::uniform(5, 1.0, 2).unwrap();
    let sp = SmoothingParams::new(1.0).unwrap();
    let delta = sp.delta_at(t);
    for i in 0..=2000 {
        let x = -2.0 + 4.0 * i as f64 / 2000.0;
        assert!(posterior_mean(x, t, &ts).unwrap().is_finite());
        assert!(esf_1d(x, t, &ts).unwrap().is_finite());
        assert!(pl_esf(x, t, &ts).unwrap().is_finite());
        assert!(smoothed_pl_esf(x, t, delta, &ts).unwrap().is_finite());
        assert!(esf_multi(&[x, 0.3], t, &ts)
            .unwrap()
            .iter()
            .all(|v| v.is_finite()));
    }
}
