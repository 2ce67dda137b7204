use crate::error::{Error, Result};
use crate::rng::{seeded, Rng};
use crate::scorefield::TrainingSet;
use crate::PointCloud;
#[allow(unused_imports)]
use num_traits::Float;

/// `n` equally spaced points on the circle of radius `radius` about the origin,
/// starting at angle 0.
pub fn make_circle_set(n: usize, radius: f64) -> Result<PointCloud> {
    if n < 3 {
        return Err(Error::param(
            "n",
            "a circle set needs at least three points",
        ));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::param("radius", "must be positive"));
    }
    let step = core::f64::consts::TAU / n as f64;
    Ok(PointCloud::from_rows(
        2,
        (0..n).map(|k| {
            let a = step * k as f64;
            [radius * a.cos(), radius * a.sin()]
        }),
    ))
}

/// Uniform grid on `[−1, 1]` with each point moved by `U(−jitter, jitter)`.
///
/// `jitter` must stay below the half gap of the grid so the order is kept.
pub fn make_nonuniform_set(n: usize, jitter: f64, seed: u64) -> Result<TrainingSet> {
    let grid = TrainingSet::uniform(n, 1.0, 1)?;
    if !(jitter >= 0.0 && jitter < grid.half_spacing()) {
        return Err(Error::param(
            "jitter",
            alloc::format!("must lie in [0, {}), got {jitter}", grid.half_spacing()),
        ));
    }
    if jitter == 0.0 {
        return Ok(grid);
    }
    let mut rng = seeded(seed);
    let points = grid
        .points()
        .iter()
        .map(|y| y + rng.random_range(-jitter..jitter))
        .collect();
    TrainingSet::from_points(points, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_circle() {
        let c = make_circle_set(4, 1.0).unwrap();
        let want = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (p, w) in c.iter().zip(want) {
            assert!((p[0] - w[0]).abs() < 1e-15 && (p[1] - w[1]).abs() < 1e-15);
        }
        let c8 = make_circle_set(8, 1.0).unwrap();
        assert!(c8
            .iter()
            .all(|p| ((p[0] * p[0] + p[1] * p[1]).sqrt() - 1.0).abs() < 1e-12));
        assert!(make_circle_set(2, 1.0).is_err());
    }

    #[test]
    fn jittered_grid() {
        let s = make_nonuniform_set(6, 0.19, 4).unwrap();
        assert!(s.points().windows(2).all(|w| w[1] > w[0]));
        assert!(!s.is_uniform());
        assert!(make_nonuniform_set(6, 0.2, 4).is_err());
    }
}
