//! One simulated year of daily inventory dynamics.
//!
//! Each day runs in a fixed order: orders due today arrive, demand is served
//! from on-hand stock (unmet demand is lost), then the policy may place an
//! order. Orders whose arrival would fall after the horizon are still paid for
//! but never arrive; they stay outstanding until the end of the run.

use serde::Serialize;

use crate::demand::{DemandModel, DemandStream};
use crate::domain::{CostBreakdown, Policy, ProductSpec};
use crate::policy::{periodic_order_quantity, ReplenishmentParams};
use crate::{Error, Result, DAYS_PER_YEAR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PendingOrder {
    pub placed_day: u32,
    pub arrival_day: u32,
    pub quantity: u64,
}

/// State of one day after demand and the policy check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DayRecord {
    pub day: u32,
    pub demand: u64,
    pub sold: u64,
    pub lost: u64,
    pub end_inventory: u64,
    pub order_placed: Option<u64>,
    pub arrival: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub trace: Vec<DayRecord>,
    pub costs: CostBreakdown,
    pub orders_placed: usize,
    pub units_ordered: u64,
    pub units_arrived: u64,
    pub total_demand: u64,
    pub total_sold: u64,
    pub total_lost: u64,
    pub mean_end_inventory: f64,
}

impl SimulationResult {
    /// Share of demand that went unmet; zero when there was no demand.
    pub fn lost_fraction(&self) -> f64 {
        if self.total_demand == 0 {
            0.0
        } else {
            self.total_lost as f64 / self.total_demand as f64
        }
    }
}

/// Simulates a 365-day year against a pre-generated demand stream.
pub fn simulate_year(
    spec: &ProductSpec,
    policy: &Policy,
    demand: &DemandStream,
    params: &ReplenishmentParams,
) -> Result<SimulationResult> {
    if demand.len() != DAYS_PER_YEAR {
        return Err(Error::HorizonMismatch {
            expected: DAYS_PER_YEAR,
            actual: demand.len(),
        });
    }
    simulate(spec, policy, &demand.demands, params)
}

/// Simulates as many days as `demands` holds.
pub fn simulate(
    spec: &ProductSpec,
    policy: &Policy,
    demands: &[u64],
    params: &ReplenishmentParams,
) -> Result<SimulationResult> {
    if demands.is_empty() {
        return Err(Error::invalid("demand stream is empty"));
    }
    let mut sim = Simulator::new(spec, policy, params, demands.len(), true)?;
    for &d in demands {
        sim.step(d);
    }
    Ok(sim.finish())
}

/// Simulates a year with conditional sampling: the day after an order is
/// triggered repeats the demand observed on the trigger day.
///
/// Uses the same random stream as [`DemandModel::generate_stream`] for `seed`,
/// so a run that never triggers an order matches [`simulate_year`] exactly.
pub fn simulate_year_conditional(
    spec: &ProductSpec,
    policy: &Policy,
    model: &DemandModel,
    seed: u64,
    params: &ReplenishmentParams,
) -> Result<SimulationResult> {
    run_conditional(spec, policy, model, seed, params, true)
}

pub(crate) fn run_conditional(
    spec: &ProductSpec,
    policy: &Policy,
    model: &DemandModel,
    seed: u64,
    params: &ReplenishmentParams,
    record_trace: bool,
) -> Result<SimulationResult> {
    let mut sim = Simulator::new(spec, policy, params, DAYS_PER_YEAR, record_trace)?;
    let mut rng = DemandModel::stream_rng(seed);
    let (mut triggered, mut previous) = (false, 0);
    for _ in 0..DAYS_PER_YEAR {
        let demand = model.sample_day_conditional(&mut rng, triggered, previous);
        triggered = sim.step(demand);
        previous = demand;
    }
    Ok(sim.finish())
}

pub(crate) fn run_untraced(
    spec: &ProductSpec,
    policy: &Policy,
    demands: &[u64],
    params: &ReplenishmentParams,
) -> Result<SimulationResult> {
    let mut sim = Simulator::new(spec, policy, params, demands.len(), false)?;
    for &d in demands {
        sim.step(d);
    }
    Ok(sim.finish())
}

struct Simulator<'a> {
    spec: &'a ProductSpec,
    policy: Policy,
    params: &'a ReplenishmentParams,
    horizon: u32,
    day: u32,
    on_hand: u64,
    on_order: u64,
    pending: Vec<PendingOrder>,
    inventory_days: u128,
    orders_placed: usize,
    units_ordered: u64,
    units_arrived: u64,
    total_demand: u64,
    total_sold: u64,
    record_trace: bool,
    trace: Vec<DayRecord>,
}

impl<'a> Simulator<'a> {
    fn new(
        spec: &'a ProductSpec,
        policy: &Policy,
        params: &'a ReplenishmentParams,
        horizon: usize,
        record_trace: bool,
    ) -> Result<Self> {
        spec.validate()?;
        policy.validate()?;
        let horizon = u32::try_from(horizon).map_err(|_| Error::invalid("horizon too long"))?;
        Ok(Simulator {
            spec,
            policy: *policy,
            params,
            horizon,
            day: 0,
            on_hand: spec.starting_stock,
            on_order: 0,
            pending: Vec::with_capacity(4),
            inventory_days: 0,
            orders_placed: 0,
            units_ordered: 0,
            units_arrived: 0,
            total_demand: 0,
            total_sold: 0,
            record_trace,
            trace: Vec::with_capacity(if record_trace { horizon as usize } else { 0 }),
        })
    }

    /// Advances one day. Returns whether an order was placed.
    fn step(&mut self, demand: u64) -> bool {
        self.day += 1;
        let day = self.day;

        let mut arrived = 0;
        self.pending.retain(|o| {
            if o.arrival_day == day {
                arrived += o.quantity;
                false
            } else {
                true
            }
        });
        self.on_hand += arrived;
        self.on_order -= arrived;

        let sold = self.on_hand.min(demand);
        self.on_hand -= sold;

        let order = self.order_quantity().filter(|&q| q > 0);
        if let Some(q) = order {
            self.orders_placed += 1;
            self.units_ordered += q;
            let lead_time = self.spec.lead_time;
            if lead_time == 0 {
                self.on_hand += q;
                arrived += q;
            } else {
                self.pending.push(PendingOrder {
                    placed_day: day,
                    arrival_day: day + lead_time,
                    quantity: q,
                });
                self.on_order += q;
            }
        }
        self.units_arrived += arrived;

        self.total_demand += demand;
        self.total_sold += sold;
        self.inventory_days += self.on_hand as u128;

        if self.record_trace {
            self.trace.push(DayRecord {
                day,
                demand,
                sold,
                lost: demand - sold,
                end_inventory: self.on_hand,
                order_placed: order,
                arrival: (arrived > 0).then_some(arrived),
            });
        }
        order.is_some()
    }

    fn order_quantity(&self) -> Option<u64> {
        let position = self.on_hand + self.on_order;
        match self.policy {
            Policy::PeriodicFixedQ {
                review_period,
                order_quantity,
            } => self.day.is_multiple_of(review_period).then_some(order_quantity),
            Policy::PeriodicUpTo { review_period, .. } => self.day.is_multiple_of(review_period)
                .then(|| periodic_order_quantity(self.params.order_up_to, position)),
            Policy::ContinuousFixedQ {
                reorder_point,
                order_quantity,
            } => (position <= reorder_point && self.pending.is_empty()).then_some(order_quantity),
            Policy::ContinuousRestore { reorder_point } => (position <= reorder_point
                && self.pending.is_empty())
            .then(|| self.params.restore_order_quantity(position)),
        }
    }

    fn finish(self) -> SimulationResult {
        let spec = self.spec;
        let costs = CostBreakdown::new(
            spec.selling_price * self.total_sold as f64,
            spec.daily_holding_cost_per_unit() * self.inventory_days as f64,
            spec.ordering_cost * self.orders_placed as f64,
            spec.purchase_cost * self.units_ordered as f64,
        );
        debug_assert_eq!(self.day, self.horizon);
        SimulationResult {
            trace: self.trace,
            costs,
            orders_placed: self.orders_placed,
            units_ordered: self.units_ordered,
            units_arrived: self.units_arrived,
            total_demand: self.total_demand,
            total_sold: self.total_sold,
            total_lost: self.total_demand - self.total_sold,
            mean_end_inventory: self.inventory_days as f64 / self.horizon as f64,
        }
    }
}
