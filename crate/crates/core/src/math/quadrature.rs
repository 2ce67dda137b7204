use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::special::normal_pdf;

/// Gauss–Legendre rule on `[-1, 1]`, nodes found by Newton iteration on `P_n`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            let mut z = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, 0.0);
                for j in 0..n {
                    let p2 = p1;
                    p1 = p0;
                    let jf = j as f64;
                    p0 = ((2.0 * jf + 1.0) * z * p1 - jf * p2) / (jf + 1.0);
                }
                dp = nf * (z * p0 - p1) / (z * z - 1.0);
                let dz = p0 / dp;
                z -= dz;
                if dz.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// Integrates `g(x) · N(x; mean, sd²)` over `mean ± half_width·sd`.
///
/// The window is cut at every `split` inside it and further into pieces no
/// longer than `max_piece` standard deviations, then each piece gets the
/// Gauss–Legendre rule. Splits should sit on the kinks of `g` so that each
/// piece is smooth.
#[derive(Debug, Clone)]
pub struct GaussianWindow {
    pub half_width: f64,
    pub max_piece: f64,
}

impl Default for GaussianWindow {
    fn default() -> Self {
        Self {
            half_width: 14.0,
            max_piece: 1.0,
        }
    }
}

impl GaussianWindow {
    pub fn expectation(
        &self,
        rule: &GaussLegendre,
        mean: f64,
        sd: f64,
        splits: &[f64],
        mut g: impl FnMut(f64) -> f64,
    ) -> f64 {
        let lo = -self.half_width;
        let hi = self.half_width;
        let mut cuts: Vec<f64> = splits
            .iter()
            .map(|s| (s - mean) / sd)
            .filter(|u| u.is_finite() && *u > lo && *u < hi)
            .collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(|a, b| a.total_cmp(b));
        cuts.dedup();

        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let pieces = ((b - a) / self.max_piece).ceil().max(1.0) as usize;
            let h = (b - a) / pieces as f64;
            for p in 0..pieces {
                let ua = a + h * p as f64;
                let ub = if p + 1 == pieces { b } else { ua + h };
                total += rule.integrate(|u| g(mean + sd * u) * normal_pdf(u), ua, ub);
            }
        }
        total
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol || !diff.is_finite() {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson over `[a, b]` split at `breaks`; the tolerance is shared
/// across the pieces in proportion to their length.
pub fn integrate_with_breaks(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> f64 {
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|x| *x > a && *x < b)
        .collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.dedup();
    let span = b - a;
    cuts.windows(2)
        .map(|w| adaptive_simpson(&mut f, w[0], w[1], tol * (w[1] - w[0]) / span))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(8);
        // degree 15 is the limit for 8 nodes
        let v = rule.integrate(|x| x.powi(14) + 3.0 * x.powi(3), -1.0, 1.0);
        assert_relative_eq!(v, 2.0 / 15.0, epsilon = 1e-14);
        let w: f64 = rule.weights.iter().sum();
        assert_relative_eq!(w, 2.0, epsilon = 1e-14);
        let odd = GaussLegendre::new(7);
        assert_relative_eq!(odd.integrate(|x| x * x, 0.0, 3.0), 9.0, epsilon = 1e-13);
    }

    #[test]
    fn gaussian_window_moments() {
        let rule = GaussLegendre::new(16);
        let win = GaussianWindow::default();
        let m0 = win.expectation(&rule, 0.3, 0.2, &[], |_| 1.0);
        let m2 = win.expectation(&rule, 0.3, 0.2, &[0.35, 1.0], |x| (x - 0.3).powi(2));
        assert_relative_eq!(m0, 1.0, epsilon = 1e-13);
        assert_relative_eq!(m2, 0.04, epsilon = 1e-14);
        // |x| has a kink at 0: splitting there keeps the rule exact
        let abs = win.expectation(&rule, 0.0, 1.0, &[0.0], f64::abs);
        assert_relative_eq!(abs, (2.0 / core::f64::consts::PI).sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn simpson_handles_kinks_with_breaks() {
        let v = integrate_with_breaks(|x| (x - 0.2).abs(), -1.0, 1.0, &[0.2], 1e-10);
        assert_relative_eq!(v, 0.5 * 1.2 * 1.2 + 0.5 * 0.8 * 0.8, epsilon = 1e-10);
        let s = adaptive_simpson(&mut |x: f64| x.sin(), 0.0, core::f64::consts::PI, 1e-10);
        assert_relative_eq!(s, 2.0, epsilon = 1e-9);
    }
}
