//! Value types shared across the simulator.
//!
//! Money is `f64` euros at full precision; units of stock and demand are
//! whole numbers (`u64`).

use serde::{Deserialize, Serialize};

use crate::{Error, Result, DAYS_PER_YEAR};

/// Economic and physical parameters of one product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSpec {
    pub id: String,
    /// Unit purchase cost.
    pub purchase_cost: f64,
    /// Unit selling price.
    pub selling_price: f64,
    /// Fixed cost per order placed.
    pub ordering_cost: f64,
    /// Annual holding cost as a fraction of unit cost, e.g. `0.20`.
    pub holding_rate: f64,
    /// Dimensionless volume factor applied to holding cost.
    pub size: f64,
    /// Replenishment lead time in days.
    pub lead_time: u32,
    pub starting_stock: u64,
}

impl ProductSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::invalid(format!("product {}: {what}", self.id)));
        if !(self.selling_price > 0.0 && self.selling_price.is_finite()) {
            return bad("selling_price must be > 0");
        }
        if !(self.purchase_cost > 0.0 && self.purchase_cost.is_finite()) {
            return bad("purchase_cost must be > 0");
        }
        if !(self.ordering_cost >= 0.0 && self.ordering_cost.is_finite()) {
            return bad("ordering_cost must be >= 0");
        }
        if !(self.holding_rate > 0.0 && self.holding_rate <= 1.0) {
            return bad("holding_rate must be in (0, 1]");
        }
        if !(self.size > 0.0 && self.size.is_finite()) {
            return bad("size must be > 0");
        }
        Ok(())
    }

    /// Holding cost of one unit kept on hand for one day.
    pub fn daily_holding_cost_per_unit(&self) -> f64 {
        daily_holding_cost_per_unit(self.holding_rate, self.purchase_cost, self.size)
    }
}

/// `holding_rate × purchase_cost × size / 365`.
pub fn daily_holding_cost_per_unit(holding_rate: f64, purchase_cost: f64, size: f64) -> f64 {
    holding_rate * purchase_cost * size / DAYS_PER_YEAR as f64
}

/// Demand statistics estimated from history.
///
/// `mean_daily` and `std_daily` describe demand on days where demand occurs;
/// `demand_probability` is the chance that a given day has any demand at all.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemandStats {
    pub mean_daily: f64,
    pub std_daily: f64,
    pub demand_probability: f64,
    #[serde(default)]
    pub n_observations: usize,
}

impl DemandStats {
    pub fn new(
        mean_daily: f64,
        std_daily: f64,
        demand_probability: f64,
        n_observations: usize,
    ) -> Result<Self> {
        let stats = DemandStats {
            mean_daily,
            std_daily,
            demand_probability,
            n_observations,
        };
        stats.validate()?;
        Ok(stats)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_daily >= 0.0 && self.mean_daily.is_finite()) {
            return Err(Error::invalid("mean_daily must be >= 0"));
        }
        if !(self.std_daily >= 0.0 && self.std_daily.is_finite()) {
            return Err(Error::invalid("std_daily must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.demand_probability) {
            return Err(Error::invalid("demand_probability must be in [0, 1]"));
        }
        if self.demand_probability == 0.0 && self.mean_daily != 0.0 {
            return Err(Error::invalid(
                "mean_daily must be 0 when demand_probability is 0",
            ));
        }
        Ok(())
    }

    /// Unconditional expected demand per day, `p × μ`.
    pub fn expected_daily(&self) -> f64 {
        self.demand_probability * self.mean_daily
    }

    /// Expected demand over a 365-day year.
    pub fn expected_annual(&self) -> f64 {
        DAYS_PER_YEAR as f64 * self.expected_daily()
    }
}

/// A replenishment rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Policy {
    /// Order a fixed `order_quantity` every `review_period` days.
    PeriodicFixedQ {
        review_period: u32,
        order_quantity: u64,
    },
    /// Every `review_period` days, order up to the order-up-to level.
    PeriodicUpTo { review_period: u32, safety_factor: f64 },
    /// Order `order_quantity` when inventory position falls to `reorder_point`
    /// and nothing is outstanding.
    ContinuousFixedQ {
        reorder_point: u64,
        order_quantity: u64,
    },
    /// Like [`Policy::ContinuousFixedQ`], but the quantity restores the
    /// position to safety stock plus expected lead-time demand.
    ContinuousRestore { reorder_point: u64 },
}

impl Policy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Policy::PeriodicFixedQ { review_period: 0, .. } => {
                Err(Error::invalid("review_period must be >= 1"))
            }
            Policy::PeriodicUpTo {
                review_period,
                safety_factor,
            } => {
                if review_period == 0 {
                    Err(Error::invalid("review_period must be >= 1"))
                } else if !(safety_factor >= 0.0 && safety_factor.is_finite()) {
                    Err(Error::invalid("safety_factor must be >= 0"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Stable 64-bit digest of the variant and its parameters.
    pub fn fingerprint(&self) -> u64 {
        use crate::mix_seed;
        match *self {
            Policy::PeriodicFixedQ {
                review_period,
                order_quantity,
            } => mix_seed(mix_seed(1, review_period as u64), order_quantity),
            Policy::PeriodicUpTo {
                review_period,
                safety_factor,
            } => mix_seed(mix_seed(2, review_period as u64), safety_factor.to_bits()),
            Policy::ContinuousFixedQ {
                reorder_point,
                order_quantity,
            } => mix_seed(mix_seed(3, reorder_point), order_quantity),
            Policy::ContinuousRestore { reorder_point } => mix_seed(4, reorder_point),
        }
    }
}

/// Annual revenue, costs and profit of one simulated year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub revenue: f64,
    pub holding_cost: f64,
    pub ordering_cost: f64,
    pub purchase_cost: f64,
    pub profit: f64,
}

impl CostBreakdown {
    /// Builds a breakdown; profit is derived so the accounting identity holds.
    pub fn new(revenue: f64, holding_cost: f64, ordering_cost: f64, purchase_cost: f64) -> Self {
        debug_assert!(revenue >= 0.0 && holding_cost >= 0.0);
        debug_assert!(ordering_cost >= 0.0 && purchase_cost >= 0.0);
        CostBreakdown {
            revenue,
            holding_cost,
            ordering_cost,
            purchase_cost,
            profit: revenue - (holding_cost + ordering_cost + purchase_cost),
        }
    }

    pub fn total_costs(&self) -> f64 {
        self.holding_cost + self.ordering_cost + self.purchase_cost
    }
}
