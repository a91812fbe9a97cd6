//! Box-constrained limited-memory quasi-Newton minimization with basin hopping.
//!
//! The local solver is a projected L-BFGS: variables pinned at a bound with
//! the gradient pointing outward are frozen for the step, the two-loop
//! recursion runs on the remaining free variables, and a backtracking Armijo
//! search follows the projected path `P(x + alpha d)`.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

use super::ansatz::CostKind;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Quasi-Newton iterations per local minimization.
    pub max_iterations: usize,
    pub n_hops: usize,
    /// Half-width of the uniform per-parameter kick, radians.
    pub hop_scale: f64,
    /// Stop when the projected gradient's max-norm falls below this.
    pub gradient_tolerance: f64,
    /// Stop when a step lowers the cost by less than this relative amount.
    pub cost_tolerance: f64,
    /// Stop everything once the cost is below this value.
    pub stop_below: f64,
    /// Central finite-difference step.
    pub fd_step: f64,
    /// Number of stored curvature pairs.
    pub memory: usize,
    pub seed: u64,
    pub cost_kind: CostKind,
    pub gradient: GradientMethod,
}

/// How objectives with an analytic gradient are differentiated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    /// Exact reverse-mode gradient at the cost of about three evaluations.
    #[default]
    Adjoint,
    /// Central differences with step `fd_step`.
    FiniteDifference,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iterations: 200,
            n_hops: 10,
            hop_scale: 0.3,
            gradient_tolerance: 1e-9,
            cost_tolerance: 1e-13,
            stop_below: 1e-10,
            fd_step: 1e-6,
            memory: 10,
            seed: 0,
            cost_kind: CostKind::RealOverlap,
            gradient: GradientMethod::Adjoint,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hop_scale >= 0.0 && self.hop_scale.is_finite()) {
            return Err(invalid("hop_scale", "must be finite and non-negative"));
        }
        if !(self.fd_step > 0.0) {
            return Err(invalid("fd_step", "must be positive"));
        }
        if self.memory == 0 {
            return Err(invalid("memory", "need at least one curvature pair"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Gradient,
    CostBelowTarget,
    Stalled,
    LineSearch,
    MaxIterations,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub stop: StopReason,
}

/// A cost or gradient evaluated to NaN or infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonFinite;

#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn uniform(n: usize, lower: f64, upper: f64) -> Self {
        Bounds {
            lower: vec![lower; n],
            upper: vec![upper; n],
        }
    }

    pub fn project(&self, x: &mut [f64]) {
        for ((v, &lo), &hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(lo, hi);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((v, lo), hi)| (lo..=hi).contains(&v))
    }
}

/// A cost with a gradient.
pub trait Objective: Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Cost evaluations one gradient is counted as.
    fn gradient_evaluations(&self, n: usize) -> usize;
}

/// A plain cost function differentiated by central differences.
pub struct FiniteDifference<'a, F> {
    pub f: &'a F,
    pub step: f64,
}

impl<F> Objective for FiniteDifference<'_, F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        fd_gradient(self.f, x, self.step)
    }

    fn gradient_evaluations(&self, n: usize) -> usize {
        2 * n
    }
}

/// Central differences, evaluated in parallel over coordinates.
pub fn fd_gradient<F>(f: &F, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut xp = x.to_vec();
            xp[i] = x[i] + h;
            let fp = f(&xp);
            xp[i] = x[i] - h;
            let fm = f(&xp);
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn free_mask(x: &[f64], g: &[f64], b: &Bounds) -> Vec<bool> {
    x.iter()
        .zip(g)
        .zip(b.lower.iter().zip(&b.upper))
        .map(|((&xi, &gi), (&lo, &hi))| !((xi <= lo && gi > 0.0) || (xi >= hi && gi < 0.0)))
        .collect()
}

fn projected_gradient_norm(x: &[f64], g: &[f64], b: &Bounds) -> f64 {
    x.iter()
        .zip(g)
        .zip(b.lower.iter().zip(&b.upper))
        .map(|((&xi, &gi), (&lo, &hi))| ((xi - gi).clamp(lo, hi) - xi).abs())
        .fold(0.0, f64::max)
}

/// `-H g` on the free variables from the stored pairs; zero on frozen ones.
fn two_loop(g: &[f64], free: &[bool], pairs: &VecDeque<(Vec<f64>, Vec<f64>)>) -> Vec<f64> {
    let mask = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .zip(free)
            .map(|(x, &m)| if m { *x } else { 0.0 })
            .collect()
    };
    let mut q = mask(g);
    let masked: Vec<(Vec<f64>, Vec<f64>)> = pairs.iter().map(|(s, y)| (mask(s), mask(y))).collect();
    let mut alphas = Vec::with_capacity(masked.len());
    for (s, y) in masked.iter().rev() {
        let sy = dot(s, y);
        if sy <= 0.0 {
            alphas.push(0.0);
            continue;
        }
        let a = dot(s, &q) / sy;
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    let gamma = masked
        .last()
        .map(|(s, y)| {
            let (sy, yy) = (dot(s, y), dot(y, y));
            if sy > 0.0 && yy > 0.0 {
                sy / yy
            } else {
                1.0
            }
        })
        .unwrap_or(1.0);
    q.iter_mut().for_each(|v| *v *= gamma);
    for ((s, y), a) in masked.iter().zip(alphas.iter().rev()) {
        let sy = dot(s, y);
        if sy <= 0.0 {
            continue;
        }
        let beta = dot(y, &q) / sy;
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - beta) * si);
    }
    q.iter().map(|v| -v).collect()
}

/// Local box-constrained minimization of `f` with finite-difference gradients.
pub fn minimize_box<F>(
    f: &F,
    x0: &[f64],
    bounds: &Bounds,
    cfg: &OptimizerConfig,
) -> std::result::Result<LocalResult, NonFinite>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    minimize_objective(&FiniteDifference { f, step: cfg.fd_step }, x0, bounds, cfg)
}

/// Local box-constrained minimization from `x0` (projected into the box first).
pub fn minimize_objective<O: Objective>(
    obj: &O,
    x0: &[f64],
    bounds: &Bounds,
    cfg: &OptimizerConfig,
) -> std::result::Result<LocalResult, NonFinite> {
    let n = x0.len();
    let mut x = x0.to_vec();
    bounds.project(&mut x);
    let mut fx = obj.value(&x);
    let mut evals = 1usize;
    if !fx.is_finite() {
        return Err(NonFinite);
    }
    let mut g = obj.gradient(&x);
    evals += obj.gradient_evaluations(n);
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::with_capacity(cfg.memory);
    let mut iterations = 0usize;

    let stop = loop {
        if g.iter().any(|v| !v.is_finite()) {
            return Err(NonFinite);
        }
        if fx < cfg.stop_below {
            break StopReason::CostBelowTarget;
        }
        if projected_gradient_norm(&x, &g, bounds) < cfg.gradient_tolerance {
            break StopReason::Gradient;
        }
        if iterations >= cfg.max_iterations {
            break StopReason::MaxIterations;
        }
        iterations += 1;

        let free = free_mask(&x, &g, bounds);
        let mut d = two_loop(&g, &free, &pairs);
        let mut gd = dot(&g, &d);
        if pairs.is_empty() || gd >= 0.0 {
            pairs.clear();
            let gnorm = g
                .iter()
                .zip(&free)
                .filter(|(_, &m)| m)
                .map(|(v, _)| v * v)
                .sum::<f64>()
                .sqrt();
            let scale = if gnorm > 0.0 { 1.0 / gnorm.max(1.0) } else { 0.0 };
            d = g
                .iter()
                .zip(&free)
                .map(|(v, &m)| if m { -v * scale } else { 0.0 })
                .collect();
            gd = dot(&g, &d);
            if gd >= 0.0 {
                break StopReason::Gradient;
            }
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            bounds.project(&mut trial);
            let ft = obj.value(&trial);
            evals += 1;
            let decrease: f64 = g
                .iter()
                .zip(trial.iter().zip(&x))
                .map(|(gi, (t, xi))| gi * (t - xi))
                .sum();
            if ft.is_finite() && ft <= fx + 1e-4 * decrease.min(0.0) && ft <= fx {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            if pairs.is_empty() {
                break StopReason::LineSearch;
            }
            pairs.clear();
            continue;
        };
        let g_new = obj.gradient(&x_new);
        evals += obj.gradient_evaluations(n);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if pairs.len() == cfg.memory {
                pairs.pop_front();
            }
            pairs.push_back((s, y));
        }
        let stalled = fx - f_new <= cfg.cost_tolerance * fx.abs().max(f_new.abs()).max(1.0);
        x = x_new;
        fx = f_new;
        g = g_new;
        if stalled {
            break StopReason::Stalled;
        }
    };
    Ok(LocalResult {
        x,
        f: fx,
        iterations,
        evaluations: evals,
        stop,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HoppingResult {
    pub x: Vec<f64>,
    pub f: f64,
    /// Quasi-Newton iterations summed over all local minimizations.
    pub iterations: usize,
    /// Hops attempted.
    pub hops: usize,
    pub evaluations: usize,
    /// Best cost after the initial minimization and after each hop.
    pub trace: Vec<f64>,
}

/// [`basin_hopping_objective`] with finite-difference gradients.
pub fn basin_hopping<F>(
    f: &F,
    x0: &[f64],
    bounds: &Bounds,
    cfg: &OptimizerConfig,
    stream: u64,
) -> Result<HoppingResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    basin_hopping_objective(
        &FiniteDifference { f, step: cfg.fd_step },
        x0,
        bounds,
        cfg,
        stream,
    )
}

/// Basin hopping: kick the best point uniformly by `+-hop_scale`, re-minimize, keep improvements.
///
/// Hop kicks draw from ChaCha8 seeded with `cfg.seed` on stream `stream`.
pub fn basin_hopping_objective<O: Objective>(
    obj: &O,
    x0: &[f64],
    bounds: &Bounds,
    cfg: &OptimizerConfig,
    stream: u64,
) -> Result<HoppingResult> {
    cfg.validate()?;
    if bounds.lower.len() != x0.len() || bounds.upper.len() != x0.len() {
        return Err(crate::Error::DimensionMismatch {
            expected: x0.len(),
            found: bounds.lower.len(),
        });
    }
    let first = minimize_objective(obj, x0, bounds, cfg)
        .map_err(|_| invalid("initial parameters", "cost is not finite at the starting point"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut best = (first.x, first.f);
    let mut iterations = first.iterations;
    let mut evaluations = first.evaluations;
    let mut trace = vec![best.1];
    let mut hops = 0usize;
    for _ in 0..cfg.n_hops {
        if best.1 < cfg.stop_below {
            break;
        }
        hops += 1;
        let mut start: Vec<f64> = best
            .0
            .iter()
            .map(|&v| v + cfg.hop_scale * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        bounds.project(&mut start);
        if let Ok(local) = minimize_objective(obj, &start, bounds, cfg) {
            iterations += local.iterations;
            evaluations += local.evaluations;
            if local.f < best.1 {
                best = (local.x, local.f);
            }
        }
        trace.push(best.1);
    }
    Ok(HoppingResult {
        x: best.0,
        f: best.1,
        iterations,
        hops,
        evaluations,
        trace,
    })
}
