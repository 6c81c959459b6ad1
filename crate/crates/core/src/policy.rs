//! Closed-form replenishment quantities.
//!
//! Lead-time demand is a sum of independent gated daily demands, so its
//! per-day variance is the compound form `p·σ² + p(1−p)·μ²`.

use serde::{Deserialize, Serialize};

use crate::domain::DemandStats;
use crate::{Error, Result};

/// Safety factor used when none is configured (≈95% cycle service level).
pub const DEFAULT_SAFETY_FACTOR: f64 = 1.645;

/// Mean and standard deviation of demand over the replenishment lead time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadTimeDemand {
    pub expected: f64,
    pub std: f64,
}

/// Variance of a single gated day's demand.
pub fn daily_demand_variance(stats: &DemandStats) -> f64 {
    let p = stats.demand_probability;
    p * stats.std_daily.powi(2) + p * (1.0 - p) * stats.mean_daily.powi(2)
}

pub fn lead_time_demand(stats: &DemandStats, lead_time: u32) -> LeadTimeDemand {
    let lt = lead_time as f64;
    LeadTimeDemand {
        expected: lt * stats.expected_daily(),
        std: (lt * daily_demand_variance(stats)).sqrt(),
    }
}

/// `z × σ_LT`.
pub fn safety_stock(safety_factor: f64, stats: &DemandStats, lead_time: u32) -> f64 {
    safety_factor * lead_time_demand(stats, lead_time).std
}

/// Expected review-period demand plus safety stock.
pub fn order_up_to(review_period: u32, stats: &DemandStats, safety_factor: f64, lead_time: u32) -> f64 {
    review_period as f64 * stats.expected_daily() + safety_stock(safety_factor, stats, lead_time)
}

/// `max(0, ⌈oup⌉ − inventory)`.
pub fn periodic_order_quantity(oup: f64, current_inventory: u64) -> u64 {
    ceil_units(oup).saturating_sub(current_inventory)
}

/// Safety stock plus expected lead-time demand, rounded up.
pub fn reorder_point(stats: &DemandStats, safety_factor: f64, lead_time: u32) -> u64 {
    let ltd = lead_time_demand(stats, lead_time);
    ceil_units(safety_factor * ltd.std + ltd.expected)
}

/// Rounds up to whole units, ignoring float noise just above an integer.
pub(crate) fn ceil_units(x: f64) -> u64 {
    if !(x > 0.0) {
        return 0;
    }
    (x - 1e-9 * x.max(1.0)).ceil().max(0.0) as u64
}

/// Policy targets derived from demand statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplenishmentParams {
    pub safety_stock: f64,
    pub order_up_to: f64,
    pub reorder_point: u64,
    pub safety_factor: f64,
}

impl ReplenishmentParams {
    pub fn compute(
        stats: &DemandStats,
        safety_factor: f64,
        lead_time: u32,
        review_period: u32,
    ) -> Result<Self> {
        if !(safety_factor >= 0.0 && safety_factor.is_finite()) {
            return Err(Error::invalid("safety_factor must be >= 0"));
        }
        if review_period == 0 {
            return Err(Error::invalid("review_period must be >= 1"));
        }
        Ok(ReplenishmentParams {
            safety_stock: safety_stock(safety_factor, stats, lead_time),
            order_up_to: order_up_to(review_period, stats, safety_factor, lead_time),
            reorder_point: reorder_point(stats, safety_factor, lead_time),
            safety_factor,
        })
    }

    /// Quantity that restores `position` to the reorder level
    /// (safety stock plus expected lead-time demand).
    pub fn restore_order_quantity(&self, position: u64) -> u64 {
        self.reorder_point.saturating_sub(position)
    }
}
