use crate::error::{check_time, Error, Result};
use crate::rng::{seeded, standard_normal, Rng};
use crate::scorefield::TrainingSet;
use crate::PointCloud;
#[allow(unused_imports)]
use num_traits::Float;

/// `count` draws from the noised empirical distribution in ℝᵈ: a uniformly
/// chosen anchor plus `N(0, t·I)` noise.
pub fn sample_noised_empirical(
    t: f64,
    ts: &TrainingSet,
    count: usize,
    seed: u64,
) -> Result<PointCloud> {
    check_time(t)?;
    if count == 0 {
        return Err(Error::param("count", "must be at least 1"));
    }
    let d = ts.ambient_dim();
    let sd = t.sqrt();
    let mut rng = seeded(seed);
    let mut out = PointCloud::with_capacity(d, count);
    let mut p = alloc::vec![0.0; d];
    for _ in 0..count {
        let k = rng.random_range(0..ts.len());
        for (i, v) in p.iter_mut().enumerate() {
            let base = if i == 0 { ts.points()[k] } else { 0.0 };
            *v = base + sd * standard_normal(&mut rng);
        }
        out.push(&p);
    }
    Ok(out)
}

/// `count` draws of a uniformly chosen point of `anchors` plus `N(0, t·I)` noise.
pub fn sample_noised_points(
    t: f64,
    anchors: &PointCloud,
    count: usize,
    seed: u64,
) -> Result<PointCloud> {
    check_time(t)?;
    if count == 0 || anchors.is_empty() {
        return Err(Error::param(
            "count",
            "need at least one draw and one anchor",
        ));
    }
    let d = anchors.dim();
    let sd = t.sqrt();
    let mut rng = seeded(seed);
    let mut out = PointCloud::with_capacity(d, count);
    let mut p = alloc::vec![0.0; d];
    for _ in 0..count {
        let a = anchors.point(rng.random_range(0..anchors.len()));
        for (v, c) in p.iter_mut().zip(a) {
            *v = c + sd * standard_normal(&mut rng);
        }
        out.push(&p);
    }
    Ok(out)
}
