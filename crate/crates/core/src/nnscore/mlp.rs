use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{check_time, Error, Result};
use crate::regloss::{PiecewiseLinear1D, Score1D};
use crate::rng::{seeded, Rng};
use crate::scorefield::{FieldKind, ScoreField};

/// Centre and scale of the `log t` feature of the time-conditioned model.
const LOG_T_CENTER: f64 = -7.0;
const LOG_T_SCALE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "variant", rename_all = "kebab-case"))]
pub enum Architecture {
    /// `x ↦ Sx + c + W₂ relu(W₁x + b₁) + b₂` on ℝᵈ.
    FixedTime { dim: usize, hidden: usize },
    /// `(x, t) ↦ o(x, e(t)) ⊙ (1 + m(t)) / √t`.
    TimeConditioned {
        dim: usize,
        hidden: usize,
        embed: usize,
    },
}

/// A named, contiguous slice of the parameter vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamGroup {
    pub name: &'static str,
    pub offset: usize,
    pub len: usize,
}

impl Architecture {
    pub fn fixed_time(dim: usize) -> Self {
        Architecture::FixedTime { dim, hidden: 256 }
    }

    pub fn time_conditioned(dim: usize) -> Self {
        Architecture::TimeConditioned {
            dim,
            hidden: 128,
            embed: 16,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Architecture::FixedTime { dim, .. } | Architecture::TimeConditioned { dim, .. } => dim,
        }
    }

    pub fn is_time_conditioned(&self) -> bool {
        matches!(self, Architecture::TimeConditioned { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Architecture::FixedTime { dim, hidden } => dim > 0 && hidden > 0,
            Architecture::TimeConditioned { dim, hidden, embed } => {
                dim > 0 && hidden > 0 && embed > 0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param("architecture", "all sizes must be positive"))
        }
    }

    /// Parameter groups in storage order. Weight matrices are row-major `out × in`.
    pub fn groups(&self) -> Vec<ParamGroup> {
        let shapes: Vec<(&'static str, usize)> = match *self {
            Architecture::FixedTime { dim: d, hidden: h } => alloc::vec![
                ("hidden.weight", h * d),
                ("hidden.bias", h),
                ("out.weight", d * h),
                ("out.bias", d),
                ("skip.weight", d * d),
                ("skip.bias", d),
            ],
            Architecture::TimeConditioned {
                dim: d,
                hidden: h,
                embed: e,
            } => alloc::vec![
                ("time.weight", h),
                ("time.bias", h),
                ("embed.weight", e * h),
                ("embed.bias", e),
                ("mod.weight", d * h),
                ("mod.bias", d),
                ("body.in.weight", h * (d + e)),
                ("body.in.bias", h),
                ("body.out.weight", d * h),
                ("body.out.bias", d),
            ],
        };
        let mut offset = 0;
        shapes
            .into_iter()
            .map(|(name, len)| {
                let g = ParamGroup { name, offset, len };
                offset += len;
                g
            })
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.groups().iter().map(|g| g.len).sum()
    }

    /// Groups decayed by default: the MLP for the fixed-time model, the body block otherwise.
    pub fn default_decay_groups(&self) -> Vec<String> {
        match self {
            Architecture::FixedTime { .. } => alloc::vec!["hidden".into(), "out".into()],
            Architecture::TimeConditioned { .. } => alloc::vec!["body".into()],
        }
    }
}

/// A batch of `(x_j, t_j, g_j)` with `g_j` the regression target for the score.
#[derive(Debug, Clone, Default)]
pub struct TrainBatch {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub targets: Vec<f64>,
}

impl TrainBatch {
    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MlpScoreModel {
    arch: Architecture,
    params: Vec<f64>,
    /// Constant factor on the fixed-time model's output (1 when unused).
    #[cfg_attr(feature = "serde", serde(default = "unit_scale"))]
    output_scale: f64,
}

#[cfg(feature = "serde")]
fn unit_scale() -> f64 {
    1.0
}

fn relu(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// `out = W x + b` for row-major `W`.
fn affine(w: &[f64], b: &[f64], x: &[f64], out: &mut [f64]) {
    let n_in = x.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &w[i * n_in..(i + 1) * n_in];
        *o = b[i] + row.iter().zip(x).map(|(a, c)| a * c).sum::<f64>();
    }
}

/// Accumulates `dW += g xᵀ`, `db += g`, and when given, `dx = Wᵀ g`.
fn affine_back(
    w: &[f64],
    x: &[f64],
    g: &[f64],
    dw: &mut [f64],
    db: &mut [f64],
    dx: Option<&mut [f64]>,
) {
    let n_in = x.len();
    for (i, gi) in g.iter().enumerate() {
        if *gi == 0.0 {
            continue;
        }
        db[i] += gi;
        let row = &mut dw[i * n_in..(i + 1) * n_in];
        for (r, xv) in row.iter_mut().zip(x) {
            *r += gi * xv;
        }
    }
    if let Some(dx) = dx {
        dx.iter_mut().for_each(|v| *v = 0.0);
        for (i, gi) in g.iter().enumerate() {
            if *gi == 0.0 {
                continue;
            }
            let row = &w[i * n_in..(i + 1) * n_in];
            for (d, wv) in dx.iter_mut().zip(row) {
                *d += gi * wv;
            }
        }
    }
}

/// Splits a buffer laid out like the architecture's groups.
struct Parts<T> {
    p: [T; 10],
}

fn bounds(arch: &Architecture) -> [usize; 11] {
    let mut b = [0usize; 11];
    let lens: [usize; 10] = match *arch {
        Architecture::FixedTime { dim: d, hidden: h } => [h * d, h, d * h, d, d * d, d, 0, 0, 0, 0],
        Architecture::TimeConditioned {
            dim: d,
            hidden: h,
            embed: e,
        } => [h, h, e * h, e, d * h, d, h * (d + e), h, d * h, d],
    };
    for i in 0..10 {
        b[i + 1] = b[i] + lens[i];
    }
    b
}

fn split<'a>(arch: &Architecture, buf: &'a [f64]) -> Parts<&'a [f64]> {
    let b = bounds(arch);
    Parts {
        p: core::array::from_fn(|i| &buf[b[i]..b[i + 1]]),
    }
}

fn split_mut<'a>(arch: &Architecture, mut buf: &'a mut [f64]) -> Parts<&'a mut [f64]> {
    let b = bounds(arch);
    let mut p: [&mut [f64]; 10] = Default::default();
    for (i, slot) in p.iter_mut().enumerate() {
        let (head, tail) = core::mem::take(&mut buf).split_at_mut(b[i + 1] - b[i]);
        *slot = head;
        buf = tail;
    }
    Parts { p }
}

/// Time branch of the conditioned model: first-layer activations, embedding, modulation.
struct TimeBranch {
    tau: f64,
    pre: Vec<f64>,
    act: Vec<f64>,
    embed: Vec<f64>,
    modulation: Vec<f64>,
}

impl MlpScoreModel {
    /// Fan-in uniform initialization `U(−1/√fan_in, 1/√fan_in)` for weights and
    /// biases; the modulation head starts at zero so `1 + m ≡ 1`.
    pub fn init(arch: Architecture, seed: u64) -> Result<Self> {
        arch.validate()?;
        let mut rng = seeded(seed);
        let mut params = alloc::vec![0.0; arch.param_count()];
        let fan_in = |name: &str| -> usize {
            match (arch, name) {
                (Architecture::FixedTime { dim, .. }, n)
                    if n.starts_with("hidden") || n.starts_with("skip") =>
                {
                    dim
                }
                (Architecture::FixedTime { hidden, .. }, _) => hidden,
                (Architecture::TimeConditioned { .. }, n) if n.starts_with("time") => 1,
                (Architecture::TimeConditioned { dim, embed, .. }, n)
                    if n.starts_with("body.in") =>
                {
                    dim + embed
                }
                (Architecture::TimeConditioned { hidden, .. }, _) => hidden,
            }
        };
        for g in arch.groups() {
            if g.name.starts_with("mod.") {
                continue;
            }
            let bound = 1.0 / (fan_in(g.name) as f64).sqrt();
            for p in &mut params[g.offset..g.offset + g.len] {
                *p = rng.random_range(-bound..bound);
            }
        }
        Ok(Self {
            arch,
            params,
            output_scale: 1.0,
        })
    }

    pub fn from_params(arch: Architecture, params: Vec<f64>) -> Result<Self> {
        arch.validate()?;
        if params.len() != arch.param_count() {
            return Err(Error::param(
                "params",
                alloc::format!(
                    "expected {} values, got {}",
                    arch.param_count(),
                    params.len()
                ),
            ));
        }
        Ok(Self {
            arch,
            params,
            output_scale: 1.0,
        })
    }

    /// Multiplies the fixed-time model's whole output by `scale`.
    pub fn with_output_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::param("output_scale", "must be positive"));
        }
        if self.arch.is_time_conditioned() && scale != 1.0 {
            return Err(Error::param(
                "output_scale",
                "the conditioned model already scales by 1/√t",
            ));
        }
        self.output_scale = scale;
        Ok(self)
    }

    pub fn output_scale(&self) -> f64 {
        self.output_scale
    }

    pub fn architecture(&self) -> Architecture {
        self.arch
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    fn check_input(&self, x: &[f64], t: Option<f64>) -> Result<()> {
        if x.len() != self.arch.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.arch.dim(),
                found: x.len(),
            });
        }
        match (self.arch.is_time_conditioned(), t) {
            (true, Some(t)) => check_time(t),
            (true, None) => Err(Error::param("t", "the time-conditioned model needs a time")),
            (false, None) => Ok(()),
            (false, Some(_)) => Err(Error::param(
                "t",
                "the fixed-time model takes no time input",
            )),
        }
    }

    /// Score at `x` (and `t` for the time-conditioned model).
    pub fn forward(&self, x: &[f64], t: Option<f64>) -> Result<Vec<f64>> {
        self.check_input(x, t)?;
        let mut out = alloc::vec![0.0; self.arch.dim()];
        match t {
            None => self.fixed_value(x, &mut out),
            Some(t) => {
                let tb = self.time_branch(t);
                self.body_forward(x, &tb, &mut out, None);
                let scale = 1.0 / t.sqrt();
                out.iter_mut().for_each(|v| *v *= scale);
            }
        }
        Ok(out)
    }

    /// Time-conditioned output before the `1/√t` factor, `o ⊙ (1 + m)`.
    pub fn raw_output(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        self.check_input(x, Some(t))?;
        let mut out = alloc::vec![0.0; self.arch.dim()];
        let tb = self.time_branch(t);
        self.body_forward(x, &tb, &mut out, None);
        Ok(out)
    }

    /// Fixed-time forward pass; `pre` receives the hidden pre-activations.
    fn fixed_forward(&self, x: &[f64], out: &mut [f64], pre: &mut [f64]) {
        let p = split(&self.arch, &self.params).p;
        let (w1, b1, w2, b2, sw, sb) = (p[0], p[1], p[2], p[3], p[4], p[5]);
        let d = x.len();
        for (i, a) in pre.iter_mut().enumerate() {
            let row = &w1[i * d..(i + 1) * d];
            *a = b1[i] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
        let h = pre.len();
        for (k, o) in out.iter_mut().enumerate() {
            let row = &w2[k * h..(k + 1) * h];
            let mlp: f64 = row.iter().zip(pre.iter()).map(|(w, a)| w * relu(*a)).sum();
            let srow = &sw[k * d..(k + 1) * d];
            let skip: f64 = srow.iter().zip(x).map(|(w, v)| w * v).sum();
            *o = (mlp + b2[k] + skip + sb[k]) * self.output_scale;
        }
    }

    fn fixed_value(&self, x: &[f64], out: &mut [f64]) {
        let Architecture::FixedTime { hidden, .. } = self.arch else {
            unreachable!()
        };
        let mut pre = alloc::vec![0.0; hidden];
        self.fixed_forward(x, out, &mut pre);
    }

    fn time_branch(&self, t: f64) -> TimeBranch {
        let Architecture::TimeConditioned { dim, hidden, embed } = self.arch else {
            unreachable!()
        };
        let p = split(&self.arch, &self.params).p;
        let tau = (t.ln() - LOG_T_CENTER) / LOG_T_SCALE;
        let pre: Vec<f64> = (0..hidden).map(|i| p[0][i] * tau + p[1][i]).collect();
        let act: Vec<f64> = pre.iter().map(|v| relu(*v)).collect();
        let mut e = alloc::vec![0.0; embed];
        affine(p[2], p[3], &act, &mut e);
        let mut m = alloc::vec![0.0; dim];
        affine(p[4], p[5], &act, &mut m);
        TimeBranch {
            tau,
            pre,
            act,
            embed: e,
            modulation: m,
        }
    }

    /// `o ⊙ (1 + m)` for one point; optionally keeps the body activations.
    fn body_forward(
        &self,
        x: &[f64],
        tb: &TimeBranch,
        out: &mut [f64],
        cache: Option<&mut BodyCache>,
    ) {
        let Architecture::TimeConditioned { hidden, .. } = self.arch else {
            unreachable!()
        };
        let p = split(&self.arch, &self.params).p;
        let mut u = Vec::with_capacity(x.len() + tb.embed.len());
        u.extend_from_slice(x);
        u.extend_from_slice(&tb.embed);
        let mut a = alloc::vec![0.0; hidden];
        affine(p[6], p[7], &u, &mut a);
        let r: Vec<f64> = a.iter().map(|v| relu(*v)).collect();
        let mut o = alloc::vec![0.0; out.len()];
        affine(p[8], p[9], &r, &mut o);
        for ((y, ov), m) in out.iter_mut().zip(&o).zip(&tb.modulation) {
            *y = ov * (1.0 + m);
        }
        if let Some(c) = cache {
            c.u = u;
            c.pre = a;
            c.act = r;
            c.o = o;
        }
    }

    /// Batch loss `mean_j t_j ‖f(x_j, t_j) − g_j‖²` and its gradient (overwrites `grad`).
    pub fn batch_loss_grad(&self, batch: &TrainBatch, grad: &mut [f64]) -> Result<f64> {
        let d = self.arch.dim();
        let b = batch.len();
        if b == 0 || batch.xs.len() != b * d || batch.targets.len() != b * d {
            return Err(Error::param("batch", "inconsistent batch shapes"));
        }
        if grad.len() != self.params.len() {
            return Err(Error::DimensionMismatch {
                expected: self.params.len(),
                found: grad.len(),
            });
        }
        grad.iter_mut().for_each(|g| *g = 0.0);
        let inv_b = 1.0 / b as f64;
        let mut loss = 0.0;
        let mut f = alloc::vec![0.0; d];
        let mut df = alloc::vec![0.0; d];
        match self.arch {
            Architecture::FixedTime { hidden, .. } => {
                let p = split(&self.arch, &self.params).p;
                let [gw1, gb1, gw2, gb2, gs, gc, ..] = split_mut(&self.arch, grad).p;
                let mut a = alloc::vec![0.0; hidden];
                for j in 0..b {
                    let x = &batch.xs[j * d..(j + 1) * d];
                    let g = &batch.targets[j * d..(j + 1) * d];
                    let t = batch.ts[j];
                    self.fixed_forward(x, &mut f, &mut a);
                    for i in 0..d {
                        let diff = f[i] - g[i];
                        loss += t * diff * diff * inv_b;
                        df[i] = 2.0 * t * diff * inv_b * self.output_scale;
                    }
                    for (k, dk) in df.iter().enumerate() {
                        gb2[k] += dk;
                        gc[k] += dk;
                        for (gsv, xv) in gs[k * d..(k + 1) * d].iter_mut().zip(x) {
                            *gsv += dk * xv;
                        }
                    }
                    for (u, au) in a.iter().enumerate() {
                        if *au <= 0.0 {
                            continue;
                        }
                        let mut dr = 0.0;
                        for (k, dk) in df.iter().enumerate() {
                            gw2[k * hidden + u] += dk * au;
                            dr += dk * p[2][k * hidden + u];
                        }
                        gb1[u] += dr;
                        for (gw, xv) in gw1[u * d..(u + 1) * d].iter_mut().zip(x) {
                            *gw += dr * xv;
                        }
                    }
                }
            }
            Architecture::TimeConditioned { hidden, embed, .. } => {
                let p = split(&self.arch, &self.params).p;
                let mut cache = BodyCache::default();
                let mut d_o = alloc::vec![0.0; d];
                let mut dm = alloc::vec![0.0; d];
                let mut drb = alloc::vec![0.0; hidden];
                let mut du = alloc::vec![0.0; d + embed];
                let mut dr_m = alloc::vec![0.0; hidden];
                let mut dr_e = alloc::vec![0.0; hidden];
                for j in 0..b {
                    let x = &batch.xs[j * d..(j + 1) * d];
                    let g = &batch.targets[j * d..(j + 1) * d];
                    let t = batch.ts[j];
                    let st = t.sqrt();
                    let tb = self.time_branch(t);
                    self.body_forward(x, &tb, &mut f, Some(&mut cache));
                    // f holds y = o(1 + m); the score is y/√t and t‖y/√t − g‖² = ‖y − √t g‖²
                    for i in 0..d {
                        let diff = f[i] - st * g[i];
                        loss += diff * diff * inv_b;
                        df[i] = 2.0 * diff * inv_b;
                        d_o[i] = df[i] * (1.0 + tb.modulation[i]);
                        dm[i] = df[i] * cache.o[i];
                    }
                    let gp = split_mut(&self.arch, grad).p;
                    let [gtw, gtb, gew, geb, gmw, gmb, giw, gib, gow, gob] = gp;
                    affine_back(p[8], &cache.act, &d_o, gow, gob, Some(&mut drb));
                    for (dv, av) in drb.iter_mut().zip(&cache.pre) {
                        if *av <= 0.0 {
                            *dv = 0.0;
                        }
                    }
                    affine_back(p[6], &cache.u, &drb, giw, gib, Some(&mut du));
                    affine_back(p[4], &tb.act, &dm, gmw, gmb, Some(&mut dr_m));
                    affine_back(p[2], &tb.act, &du[d..], gew, geb, Some(&mut dr_e));
                    for i in 0..hidden {
                        if tb.pre[i] > 0.0 {
                            let da = dr_m[i] + dr_e[i];
                            gtw[i] += da * tb.tau;
                            gtb[i] += da;
                        }
                    }
                }
            }
        }
        Ok(loss)
    }

    /// Exact piecewise-linear form of a one-dimensional fixed-time model.
    pub fn to_piecewise_linear(&self) -> Result<PiecewiseLinear1D> {
        let Architecture::FixedTime { dim: 1, .. } = self.arch else {
            return Err(Error::param(
                "architecture",
                "needs the one-dimensional fixed-time model",
            ));
        };
        let p = split(&self.arch, &self.params).p;
        let (w1, b1, w2) = (p[0], p[1], p[2]);
        let base_slope = p[4][0];
        let base_icpt = p[5][0] + p[3][0];
        let mut kinks: Vec<(f64, usize)> = Vec::new();
        // slope and intercept at x → −∞
        let (mut slope, mut icpt) = (base_slope, base_icpt);
        for i in 0..w1.len() {
            if w1[i] == 0.0 {
                icpt += w2[i] * relu(b1[i]);
            } else {
                kinks.push((-b1[i] / w1[i], i));
                if w1[i] < 0.0 {
                    slope += w2[i] * w1[i];
                    icpt += w2[i] * b1[i];
                }
            }
        }
        kinks.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut breaks = Vec::new();
        let mut slopes = alloc::vec![slope];
        let mut intercepts = alloc::vec![icpt];
        for (x, i) in kinks {
            // unit i turns on (w > 0) or off (w < 0) when crossing x
            let sign = if w1[i] > 0.0 { 1.0 } else { -1.0 };
            slope += sign * w2[i] * w1[i];
            icpt += sign * w2[i] * b1[i];
            if breaks.last() == Some(&x) {
                *slopes.last_mut().unwrap() = slope;
                *intercepts.last_mut().unwrap() = icpt;
            } else {
                breaks.push(x);
                slopes.push(slope);
                intercepts.push(icpt);
            }
        }
        let c = self.output_scale;
        slopes
            .iter_mut()
            .chain(intercepts.iter_mut())
            .for_each(|v| *v *= c);
        PiecewiseLinear1D::new(breaks, slopes, intercepts)
    }
}

#[derive(Debug, Default)]
struct BodyCache {
    u: Vec<f64>,
    pre: Vec<f64>,
    act: Vec<f64>,
    o: Vec<f64>,
}

impl ScoreField for MlpScoreModel {
    fn dim(&self) -> usize {
        self.arch.dim()
    }

    fn kind(&self) -> FieldKind {
        FieldKind::Nn
    }

    /// The fixed-time model ignores `t`.
    fn eval_into(&self, x: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        check_time(t)?;
        let v = if self.arch.is_time_conditioned() {
            self.forward(x, Some(t))?
        } else {
            self.forward(x, None)?
        };
        out.copy_from_slice(&v);
        Ok(())
    }

    fn eval_batch(&self, xs: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        let d = self.arch.dim();
        if xs.len() != out.len() || xs.len() % d != 0 {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                found: out.len(),
            });
        }
        check_time(t)?;
        if !self.arch.is_time_conditioned() {
            let Architecture::FixedTime { hidden, .. } = self.arch else {
                unreachable!()
            };
            let mut pre = alloc::vec![0.0; hidden];
            for (x, o) in xs.chunks_exact(d).zip(out.chunks_exact_mut(d)) {
                self.fixed_forward(x, o, &mut pre);
            }
            return Ok(());
        }
        let tb = self.time_branch(t);
        let scale = 1.0 / t.sqrt();
        for (x, o) in xs.chunks_exact(d).zip(out.chunks_exact_mut(d)) {
            self.body_forward(x, &tb, o, None);
            o.iter_mut().for_each(|v| *v *= scale);
        }
        Ok(())
    }
}

/// Only the one-dimensional fixed-time model is a meaningful tangent score;
/// the kinks are the unit activation boundaries.
impl Score1D for MlpScoreModel {
    fn value(&self, x: f64) -> f64 {
        let mut out = [0.0];
        self.fixed_value(&[x], &mut out);
        out[0]
    }

    fn breakpoints(&self) -> Vec<f64> {
        let p = split(&self.arch, &self.params).p;
        p[0].iter()
            .zip(p[1])
            .filter(|(w, _)| **w != 0.0)
            .map(|(w, b)| -b / w)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_weights_give_zero_output() {
        let arch = Architecture::fixed_time(1);
        let m = MlpScoreModel::from_params(arch, alloc::vec![0.0; arch.param_count()]).unwrap();
        for x in [-2.0, 0.0, 3.0] {
            assert_eq!(m.forward(&[x], None).unwrap(), [0.0]);
        }
        assert!(m.forward(&[0.0], Some(0.1)).is_err());
        assert!(m.forward(&[0.0, 1.0], None).is_err());
    }

    #[test]
    fn piecewise_form_is_exact() {
        let m = MlpScoreModel::init(Architecture::FixedTime { dim: 1, hidden: 64 }, 3).unwrap();
        let pl = m.to_piecewise_linear().unwrap();
        for i in 0..500 {
            let x = -5.0 + 0.02 * i as f64;
            assert_relative_eq!(
                pl.eval(x),
                m.value(x),
                epsilon = 1e-12,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn continuous_across_kinks() {
        let m = MlpScoreModel::init(Architecture::FixedTime { dim: 1, hidden: 8 }, 9).unwrap();
        for b in m.breakpoints() {
            let l = m.value(b - 1e-9);
            let r = m.value(b + 1e-9);
            assert!((l - r).abs() < 1e-6);
        }
    }

    #[test]
    fn output_scales_with_inverse_root_time() {
        let m = MlpScoreModel::init(Architecture::time_conditioned(2), 1).unwrap();
        let x = [0.3, -0.2];
        let raw = m.raw_output(&x, 0.01).unwrap();
        let s = m.forward(&x, Some(0.01)).unwrap();
        for (a, b) in raw.iter().zip(&s) {
            assert_relative_eq!(b * 0.1, *a, max_relative = 1e-12);
        }
        let mut batch = [0.0; 2];
        m.eval_batch(&x, 0.01, &mut batch).unwrap();
        assert_eq!(batch.to_vec(), s);
    }

    #[test]
    fn group_layout() {
        let a = Architecture::time_conditioned(2);
        let groups = a.groups();
        assert_eq!(groups.len(), 10);
        assert_eq!(
            groups.last().unwrap().offset + groups.last().unwrap().len,
            a.param_count()
        );
        assert_eq!(Architecture::fixed_time(1).param_count(), 256 * 3 + 1 + 2);
    }
}
