//! Seeded, parallel replication of simulated years.
//!
//! Replication `i` draws its demand from `replication_seed(base_seed, i)`.
//! With common random numbers (`crn`), that seed is the same for every policy
//! evaluated under the plan; without it, the policy's fingerprint is mixed in
//! so different policies see independent streams. Results are gathered in
//! replication order, so summaries do not depend on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::demand::DemandModel;
use crate::domain::{Policy, ProductSpec};
use crate::engine::{run_conditional, run_untraced, SimulationResult};
use crate::policy::ReplenishmentParams;
use crate::{mix_seed, replication_seed, Error, Result};

/// Replication count used when none is given.
pub const DEFAULT_REPLICATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicationPlan {
    pub n_replications: usize,
    pub base_seed: u64,
    pub crn: bool,
    /// Worker threads; `None` uses all available cores.
    pub workers: Option<usize>,
}

impl ReplicationPlan {
    pub fn new(n_replications: usize, base_seed: u64) -> Self {
        ReplicationPlan {
            n_replications,
            base_seed,
            crn: true,
            workers: None,
        }
    }

    pub fn with_crn(mut self, crn: bool) -> Self {
        self.crn = crn;
        self
    }

    pub fn with_workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_replications == 0 {
            return Err(Error::invalid("n_replications must be >= 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("workers must be >= 1"));
        }
        Ok(())
    }

    /// Demand seed of replication `index` when evaluating `policy`.
    pub fn seed_for(&self, policy: &Policy, index: usize) -> u64 {
        let root = if self.crn {
            self.base_seed
        } else {
            mix_seed(self.base_seed, policy.fingerprint())
        };
        replication_seed(root, index as u64)
    }

    /// Runs `f` inside a pool sized to `workers`. Calls made from a rayon
    /// worker run in the caller's pool.
    pub(crate) fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(f()),
            Some(_) if rayon::current_thread_index().is_some() => Ok(f()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::invalid(e.to_string()))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// Aggregate statistics over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub n: usize,
    pub mean_profit: f64,
    pub std_profit: f64,
    pub mean_lost_fraction: f64,
    /// Average end-of-day on-hand stock; stands in for mean safety stock.
    pub mean_end_inventory: f64,
    #[serde(skip)]
    pub profits: Vec<f64>,
}

impl ReplicationSummary {
    pub fn from_results(results: &[SimulationResult]) -> Self {
        let n = results.len();
        let profits: Vec<f64> = results.iter().map(|r| r.costs.profit).collect();
        let (mean_profit, std_profit) = mean_and_std(&profits);
        let nf = n.max(1) as f64;
        ReplicationSummary {
            n,
            mean_profit,
            std_profit,
            mean_lost_fraction: results.iter().map(|r| r.lost_fraction()).sum::<f64>() / nf,
            mean_end_inventory: results.iter().map(|r| r.mean_end_inventory).sum::<f64>() / nf,
            profits,
        }
    }

    /// A single exact observation, for deterministic objectives.
    pub fn exact(value: f64) -> Self {
        ReplicationSummary {
            n: 1,
            mean_profit: value,
            std_profit: 0.0,
            mean_lost_fraction: 0.0,
            mean_end_inventory: 0.0,
            profits: vec![value],
        }
    }

    /// `std_profit / √n`.
    pub fn standard_error(&self) -> f64 {
        self.std_profit / (self.n.max(1) as f64).sqrt()
    }
}

/// Arithmetic mean and sample standard deviation (0 for a single value),
/// accumulated in slice order.
pub fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Simulates every replication of `plan`, in replication order.
pub fn replicate(
    spec: &ProductSpec,
    policy: &Policy,
    model: &DemandModel,
    params: &ReplenishmentParams,
    plan: &ReplicationPlan,
) -> Result<Vec<SimulationResult>> {
    plan.validate()?;
    spec.validate()?;
    policy.validate()?;
    let run_one = |i: usize| -> Result<SimulationResult> {
        let seed = plan.seed_for(policy, i);
        if model.is_conditional() {
            run_conditional(spec, policy, model, seed, params, false)
        } else {
            let stream = model.generate_year(seed);
            run_untraced(spec, policy, &stream.demands, params)
        }
    };
    plan.install(|| {
        (0..plan.n_replications)
            .into_par_iter()
            .map(run_one)
            .collect::<Result<Vec<_>>>()
    })?
}

/// Expected profit of `policy`, estimated over the plan's replications.
pub fn evaluate_policy(
    spec: &ProductSpec,
    policy: &Policy,
    model: &DemandModel,
    params: &ReplenishmentParams,
    plan: &ReplicationPlan,
) -> Result<ReplicationSummary> {
    let results = replicate(spec, policy, model, params, plan)?;
    Ok(ReplicationSummary::from_results(&results))
}

/// Per-replication profit differences between two policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedDifference {
    pub n: usize,
    pub mean_difference: f64,
    pub std_difference: f64,
    #[serde(skip)]
    pub differences: Vec<f64>,
}

impl PairedDifference {
    pub fn from_profits(a: &[f64], b: &[f64]) -> Self {
        let differences: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let (mean_difference, std_difference) = mean_and_std(&differences);
        PairedDifference {
            n: differences.len(),
            mean_difference,
            std_difference,
            differences,
        }
    }

    pub fn standard_error(&self) -> f64 {
        self.std_difference / (self.n.max(1) as f64).sqrt()
    }
}

/// Compares `policy_a` against `policy_b` on shared demand streams.
pub fn compare_policies(
    spec: &ProductSpec,
    policy_a: &Policy,
    policy_b: &Policy,
    model: &DemandModel,
    params: &ReplenishmentParams,
    plan: &ReplicationPlan,
) -> Result<PairedDifference> {
    if !plan.crn {
        return Err(Error::PairingRequiresCrn);
    }
    let a = evaluate_policy(spec, policy_a, model, params, plan)?;
    let b = evaluate_policy(spec, policy_b, model, params, plan)?;
    Ok(PairedDifference::from_profits(&a.profits, &b.profits))
}
