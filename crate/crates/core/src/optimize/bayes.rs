//! Bayesian optimization with a GP surrogate and expected improvement.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::{gp_fit, EvaluationRecord, Method, OptimizationResult, Point, SearchSpace};
use crate::montecarlo::ReplicationSummary;
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Exploration margin for expected improvement, in standardized units.
pub const DEFAULT_XI: f64 = 0.01;
/// Cap on the coarse candidate lattice scored per round.
pub const DEFAULT_MAX_CANDIDATES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesOptions {
    /// Total objective evaluations, including the initial design.
    pub budget: usize,
    pub init_count: usize,
    pub seed: u64,
    pub xi: f64,
    pub max_candidates: usize,
}

impl BayesOptions {
    pub fn new(budget: usize, init_count: usize, seed: u64) -> Self {
        BayesOptions {
            budget,
            init_count,
            seed,
            xi: DEFAULT_XI,
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }
}

/// Expected improvement over `best` for a maximization problem, given the
/// posterior mean `mean` and standard deviation `std`.
pub fn expected_improvement(mean: f64, std: f64, best: f64, xi: f64) -> f64 {
    let gain = mean - best - xi;
    if !(std > 0.0) {
        return gain.max(0.0);
    }
    let n = Normal::standard();
    let u = gain / std;
    (gain * n.cdf(u) + std * n.pdf(u)).max(0.0)
}

/// Natural log of [`expected_improvement`], accurate far into the tail
/// where the improvement itself underflows. Returns `-inf` when no
/// improvement is possible.
pub fn log_expected_improvement(mean: f64, std: f64, best: f64, xi: f64) -> f64 {
    let gain = mean - best - xi;
    if !(std > 0.0) {
        return if gain > 0.0 { gain.ln() } else { f64::NEG_INFINITY };
    }
    let u = gain / std;
    if u > -20.0 {
        let n = Normal::standard();
        std.ln() + (u * n.cdf(u) + n.pdf(u)).ln()
    } else {
        // u·Φ(u) + φ(u) ~ φ(u) / u² as u → −∞.
        std.ln() - 0.5 * u * u - 0.5 * (2.0 * std::f64::consts::PI).ln() - 2.0 * (-u).ln()
    }
}

/// Latin hypercube sample of `count` lattice points in `space`.
pub fn latin_hypercube<R: Rng + ?Sized>(space: &SearchSpace, count: usize, rng: &mut R) -> Vec<Point> {
    use rand::seq::SliceRandom;
    let mut column = |lo: u64, hi: u64| -> Vec<u64> {
        let mut strata: Vec<usize> = (0..count).collect();
        strata.shuffle(rng);
        strata
            .into_iter()
            .map(|s| {
                let u = (s as f64 + rng.random::<f64>()) / count as f64;
                lo + (u * (hi - lo) as f64).round() as u64
            })
            .collect()
    };
    let rs = column(space.r_range.0, space.r_range.1);
    let qs = column(space.q_range.0, space.q_range.1);
    rs.into_iter().zip(qs).map(|(r, q)| Point { r, q }).collect()
}

fn lattice_size(space: &SearchSpace) -> u128 {
    (space.r_range.1 - space.r_range.0 + 1) as u128 * (space.q_range.1 - space.q_range.0 + 1) as u128
}

/// Closest lattice point to `p` (unit step) that has not been evaluated.
fn nearest_unevaluated(space: &SearchSpace, p: Point, seen: &HashSet<Point>) -> Option<Point> {
    if !seen.contains(&p) {
        return Some(p);
    }
    let (w, h) = space.widths();
    let max_radius = w.max(h) as i64;
    for radius in 1..=max_radius {
        let mut best: Option<(f64, Point)> = None;
        for dr in -radius..=radius {
            for dq in -radius..=radius {
                if dr.abs() != radius && dq.abs() != radius {
                    continue;
                }
                let (r, q) = (p.r as i64 + dr, p.q as i64 + dq);
                if r < 0 || q < 0 {
                    continue;
                }
                let cand = Point { r: r as u64, q: q as u64 };
                if !space.contains(cand) || seen.contains(&cand) {
                    continue;
                }
                let [x0, y0] = space.normalize(p);
                let [x1, y1] = space.normalize(cand);
                let d = (x1 - x0).powi(2) + (y1 - y0).powi(2);
                let better = match best {
                    None => true,
                    Some((bd, bp)) => d < bd || (d == bd && (cand.q, cand.r) < (bp.q, bp.r)),
                };
                if better {
                    best = Some((d, cand));
                }
            }
        }
        if let Some((_, cand)) = best {
            return Some(cand);
        }
    }
    None
}

/// Maximizes the objective over the integer lattice of `space`.
///
/// Starts from a Latin hypercube design of `init_count` points, then for each
/// remaining evaluation fits a GP to every observed mean profit and evaluates
/// the point of maximal expected improvement. The GP noise variance is the
/// average squared standard error of the observations.
pub fn bayesian_optimize<F>(space: &SearchSpace, objective: F, opts: &BayesOptions) -> Result<OptimizationResult>
where
    F: Fn(Point) -> Result<ReplicationSummary> + Sync,
{
    space.validate()?;
    if opts.init_count < 2 {
        return Err(Error::invalid("init_count must be >= 2"));
    }
    if opts.budget < opts.init_count {
        return Err(Error::invalid("budget must be >= init_count"));
    }
    if !(opts.xi >= 0.0) {
        return Err(Error::invalid("xi must be >= 0"));
    }
    let total = lattice_size(space);
    let budget = (opts.budget as u128).min(total) as usize;
    let init_count = opts.init_count.min(budget);

    let mut rng = stream_rng(opts.seed);
    let mut seen = HashSet::new();
    let mut initial = Vec::with_capacity(init_count);
    for p in latin_hypercube(space, init_count, &mut rng) {
        if let Some(p) = nearest_unevaluated(space, p, &seen) {
            seen.insert(p);
            initial.push(p);
        }
    }
    let mut history = initial
        .into_par_iter()
        .map(|point| Ok(EvaluationRecord { point, summary: objective(point)? }))
        .collect::<Result<Vec<_>>>()?;

    let candidates = coarse_candidates(space, opts.max_candidates);
    let stride = candidate_stride(space, opts.max_candidates);

    while history.len() < budget {
        let xs: Vec<[f64; 2]> = history.iter().map(|e| space.normalize(e.point)).collect();
        let ys: Vec<f64> = history.iter().map(|e| e.summary.mean_profit).collect();
        let noise = history
            .iter()
            .map(|e| e.summary.standard_error().powi(2))
            .sum::<f64>()
            / history.len() as f64;
        let gp = gp_fit(&xs, &ys, noise)?;
        let best = gp.standardize(ys.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        let score = |p: &Point| {
            let (m, v) = gp.predict_standardized(space.normalize(*p));
            log_expected_improvement(m, v.sqrt(), best, opts.xi)
        };
        let posterior_mean = |p: &Point| gp.predict_standardized(space.normalize(*p)).0;

        let (coarse, coarse_score) = argmax(&candidates, &score).expect("non-empty lattice");
        // No candidate can improve: exploit the posterior mean instead.
        let score: &(dyn Fn(&Point) -> f64 + Sync) = if coarse_score == f64::NEG_INFINITY {
            &posterior_mean
        } else {
            &score
        };
        let coarse = if coarse_score == f64::NEG_INFINITY {
            argmax(&candidates, score).map_or(coarse, |(p, _)| p)
        } else {
            coarse
        };
        let refine = window(space, coarse, stride);
        let pick = argmax(&refine, score).map_or(coarse, |(p, _)| p);

        let Some(next) = nearest_unevaluated(space, pick, &seen) else {
            break;
        };
        seen.insert(next);
        history.push(EvaluationRecord {
            point: next,
            summary: objective(next)?,
        });
    }
    OptimizationResult::from_history(Method::Bayesian, history)
}

fn candidate_stride(space: &SearchSpace, max_candidates: usize) -> u64 {
    let total = lattice_size(space) as f64;
    let max = max_candidates.max(1) as f64;
    if total <= max {
        1
    } else {
        let mut s = (total / max).sqrt().ceil() as u64;
        let count = |s: u64| {
            (((space.r_range.1 - space.r_range.0) / s + 1) * ((space.q_range.1 - space.q_range.0) / s + 1)) as f64
        };
        while count(s) > max {
            s += 1;
        }
        s
    }
}

fn coarse_candidates(space: &SearchSpace, max_candidates: usize) -> Vec<Point> {
    let stride = candidate_stride(space, max_candidates);
    SearchSpace { step: stride, ..*space }.lattice()
}

/// Unit-step lattice points within `radius` of `center`.
fn window(space: &SearchSpace, center: Point, radius: u64) -> Vec<Point> {
    let r_lo = center.r.saturating_sub(radius).max(space.r_range.0);
    let r_hi = (center.r + radius).min(space.r_range.1);
    let q_lo = center.q.saturating_sub(radius).max(space.q_range.0);
    let q_hi = (center.q + radius).min(space.q_range.1);
    (r_lo..=r_hi)
        .flat_map(|r| (q_lo..=q_hi).map(move |q| Point { r, q }))
        .collect()
}

/// Index-stable argmax with its score; the earliest maximal element wins.
fn argmax<S>(points: &[Point], score: &S) -> Option<(Point, f64)>
where
    S: Fn(&Point) -> f64 + Sync + ?Sized,
{
    let scores: Vec<f64> = points.par_iter().map(score).collect();
    let mut best: Option<(f64, Point)> = None;
    for (p, s) in points.iter().zip(scores) {
        if best.is_none_or(|(bs, _)| s > bs) {
            best = Some((s, *p));
        }
    }
    best.map(|(s, p)| (p, s))
}
