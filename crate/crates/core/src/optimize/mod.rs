//! Maximizing expected profit over reorder point `r` and order quantity `Q`.
//!
//! Both optimizers take an objective `Fn(Point) -> Result<ReplicationSummary>`
//! and maximize its `mean_profit`. For inventory objectives the caller should
//! evaluate every point under one common-random-number plan so candidate
//! comparisons are deterministic.

mod bayes;
mod gp;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bayes::{
    bayesian_optimize, expected_improvement, latin_hypercube, log_expected_improvement,
    BayesOptions, DEFAULT_MAX_CANDIDATES, DEFAULT_XI,
};
pub use gp::{gp_fit, GpSurrogate, Kernel};

use crate::montecarlo::ReplicationSummary;
use crate::{Error, Result};

/// Default lattice step for grid search.
pub const DEFAULT_GRID_STEP: u64 = 10;

/// A candidate `(r, Q)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub r: u64,
    pub q: u64,
}

impl Point {
    pub fn new(r: u64, q: u64) -> Self {
        Point { r, q }
    }
}

/// Inclusive bounds on `r` and `Q` plus the grid step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub r_range: (u64, u64),
    pub q_range: (u64, u64),
    pub step: u64,
}

impl SearchSpace {
    pub fn new(r_range: (u64, u64), q_range: (u64, u64), step: u64) -> Result<Self> {
        let space = SearchSpace { r_range, q_range, step };
        space.validate()?;
        Ok(space)
    }

    /// Bounds centred on the policy anchors: `r ∈ [rop/2, 2·rop]` and
    /// `Q ∈ [annual/48, annual/6]`.
    pub fn around(reorder_point: u64, annual_demand: f64, step: u64) -> Result<Self> {
        let monthly = annual_demand / 12.0;
        let r_lo = reorder_point / 2;
        let r_hi = (reorder_point * 2).max(r_lo);
        let q_lo = (0.25 * monthly).floor() as u64;
        let q_hi = ((2.0 * monthly).ceil() as u64).max(q_lo);
        Self::new((r_lo, r_hi), (q_lo, q_hi), step)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_range.0 > self.r_range.1 || self.q_range.0 > self.q_range.1 {
            return Err(Error::invalid("search bounds are inverted (min > max)"));
        }
        if self.step == 0 {
            return Err(Error::invalid("step must be >= 1"));
        }
        Ok(())
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.r_range.0..=self.r_range.1).contains(&p.r) && (self.q_range.0..=self.q_range.1).contains(&p.q)
    }

    /// Width of each range, at least 1.
    pub fn widths(&self) -> (u64, u64) {
        (
            (self.r_range.1 - self.r_range.0).max(1),
            (self.q_range.1 - self.q_range.0).max(1),
        )
    }

    /// Lattice points at `step` spacing, `r` varying slowest.
    pub fn lattice(&self) -> Vec<Point> {
        let rs = (self.r_range.0..=self.r_range.1).step_by(self.step as usize);
        rs.flat_map(|r| {
            (self.q_range.0..=self.q_range.1)
                .step_by(self.step as usize)
                .map(move |q| Point { r, q })
        })
        .collect()
    }

    /// Maps a point into the unit square.
    pub fn normalize(&self, p: Point) -> [f64; 2] {
        let (w, h) = self.widths();
        [
            (p.r - self.r_range.0) as f64 / w as f64,
            (p.q - self.q_range.0) as f64 / h as f64,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub point: Point,
    pub summary: ReplicationSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Grid,
    Bayesian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub method: Method,
    pub best_point: Point,
    pub best_summary: ReplicationSummary,
    pub history: Vec<EvaluationRecord>,
}

impl OptimizationResult {
    fn from_history(method: Method, history: Vec<EvaluationRecord>) -> Result<Self> {
        let best = best_record(&history).ok_or(Error::EmptySearchSpace)?.clone();
        Ok(OptimizationResult {
            method,
            best_point: best.point,
            best_summary: best.summary,
            history,
        })
    }

    /// Best mean profit seen after each evaluation.
    pub fn incumbent_trace(&self) -> Vec<f64> {
        let mut best = f64::NEG_INFINITY;
        self.history
            .iter()
            .map(|e| {
                best = best.max(e.summary.mean_profit);
                best
            })
            .collect()
    }
}

/// Highest `mean_profit`; ties go to the smaller `Q`, then the smaller `r`.
pub fn best_record(history: &[EvaluationRecord]) -> Option<&EvaluationRecord> {
    history.iter().reduce(|best, e| {
        let (a, b) = (e.summary.mean_profit, best.summary.mean_profit);
        if a > b || (a == b && (e.point.q, e.point.r) < (best.point.q, best.point.r)) {
            e
        } else {
            best
        }
    })
}

/// Evaluates every lattice point of `space` and returns the best.
pub fn grid_search<F>(space: &SearchSpace, objective: F) -> Result<OptimizationResult>
where
    F: Fn(Point) -> Result<ReplicationSummary> + Sync,
{
    space.validate()?;
    let points = space.lattice();
    if points.is_empty() {
        return Err(Error::EmptySearchSpace);
    }
    let history = points
        .into_par_iter()
        .map(|point| Ok(EvaluationRecord { point, summary: objective(point)? }))
        .collect::<Result<Vec<_>>>()?;
    OptimizationResult::from_history(Method::Grid, history)
}

/// Deterministic concave test objective with its maximum (value 0) at
/// fractions `(fr, fq)` of the range widths.
pub fn quadratic_objective(space: &SearchSpace, fr: f64, fq: f64) -> impl Fn(Point) -> Result<ReplicationSummary> + Sync {
    let space = *space;
    move |p: Point| {
        let [x, y] = space.normalize(p);
        Ok(ReplicationSummary::exact(-((x - fr).powi(2) + (y - fq).powi(2))))
    }
}
