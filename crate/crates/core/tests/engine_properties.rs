use inventory_sim::domain::{DemandStats, Policy, ProductSpec};
use inventory_sim::engine::{simulate, SimulationResult};
use inventory_sim::policy::ReplenishmentParams;
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = ProductSpec> {
    (1.0..50.0f64, 1.0..3.0f64, 0.0..2000.0f64, 0.01..1.0f64, 0.01..2.0f64, 0u32..20, 0u64..5000).prop_map(
        |(cost, markup, order_cost, rate, size, lt, stock)| ProductSpec {
            id: "X".into(),
            purchase_cost: cost,
            selling_price: cost * markup,
            ordering_cost: order_cost,
            holding_rate: rate,
            size,
            lead_time: lt,
            starting_stock: stock,
        },
    )
}

fn policy_strategy() -> impl Strategy<Value = Policy> {
    prop_oneof![
        (1u32..30, 0u64..3000).prop_map(|(r, q)| Policy::PeriodicFixedQ { review_period: r, order_quantity: q }),
        (1u32..30, 0.0..3.0f64).prop_map(|(r, z)| Policy::PeriodicUpTo { review_period: r, safety_factor: z }),
        (0u64..3000, 1u64..3000).prop_map(|(r, q)| Policy::ContinuousFixedQ { reorder_point: r, order_quantity: q }),
        (0u64..3000).prop_map(|r| Policy::ContinuousRestore { reorder_point: r }),
    ]
}

fn params_for(policy: &Policy, lead_time: u32) -> ReplenishmentParams {
    let stats = DemandStats::new(100.0, 30.0, 0.8, 365).unwrap();
    let (z, period) = match *policy {
        Policy::PeriodicUpTo { review_period, safety_factor } => (safety_factor, review_period),
        _ => (1.645, 1),
    };
    ReplenishmentParams::compute(&stats, z, lead_time, period).unwrap()
}

fn run(spec: &ProductSpec, policy: &Policy, demands: &[u64]) -> SimulationResult {
    simulate(spec, policy, demands, &params_for(policy, spec.lead_time)).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn inventory_flows_balance(
        spec in spec_strategy(),
        policy in policy_strategy(),
        demands in prop::collection::vec(0u64..400, 1..120),
    ) {
        let r = run(&spec, &policy, &demands);
        let mut inv = spec.starting_stock;
        for d in &r.trace {
            // With zero lead time the day's own order lands after sales.
            let same_day = if spec.lead_time == 0 { d.order_placed.unwrap_or(0) } else { 0 };
            inv += d.arrival.unwrap_or(0) - same_day;
            prop_assert_eq!(d.sold, d.demand.min(inv));
            prop_assert_eq!(d.sold + d.lost, d.demand);
            inv = inv - d.sold + same_day;
            prop_assert_eq!(d.end_inventory, inv);
        }
        prop_assert_eq!(r.total_sold + r.total_lost, r.total_demand);
        prop_assert_eq!(spec.starting_stock + r.units_arrived, r.total_sold + inv);
        prop_assert!(r.units_arrived <= r.units_ordered);
    }

    #[test]
    fn money_identity_holds(
        spec in spec_strategy(),
        policy in policy_strategy(),
        demands in prop::collection::vec(0u64..400, 1..120),
    ) {
        let r = run(&spec, &policy, &demands);
        let c = r.costs;
        prop_assert!(close(c.revenue, spec.selling_price * r.total_sold as f64));
        prop_assert!(close(c.ordering_cost, spec.ordering_cost * r.orders_placed as f64));
        prop_assert!(close(c.purchase_cost, spec.purchase_cost * r.units_ordered as f64));
        let held: u64 = r.trace.iter().map(|d| d.end_inventory).sum();
        prop_assert!(close(c.holding_cost, spec.daily_holding_cost_per_unit() * held as f64));
        prop_assert!(close(c.profit, c.revenue - c.holding_cost - c.ordering_cost - c.purchase_cost));
    }

    #[test]
    fn continuous_review_keeps_at_most_one_order_outstanding(
        spec in spec_strategy(),
        r in 0u64..3000,
        q in 1u64..3000,
        demands in prop::collection::vec(0u64..400, 1..200),
    ) {
        let policy = Policy::ContinuousFixedQ { reorder_point: r, order_quantity: q };
        let res = run(&spec, &policy, &demands);
        let lt = spec.lead_time;
        let placed: Vec<u32> = res.trace.iter().filter(|d| d.order_placed.is_some()).map(|d| d.day).collect();
        for w in placed.windows(2) {
            prop_assert!(w[1] >= w[0] + lt, "orders on days {} and {} with lead time {}", w[0], w[1], lt);
        }
    }

    #[test]
    fn periodic_orders_only_on_review_days(
        spec in spec_strategy(),
        period in 1u32..30,
        q in 1u64..3000,
        demands in prop::collection::vec(0u64..400, 1..200),
    ) {
        let policy = Policy::PeriodicFixedQ { review_period: period, order_quantity: q };
        let res = run(&spec, &policy, &demands);
        for d in &res.trace {
            prop_assert_eq!(d.order_placed.is_some(), d.day % period == 0, "day {}", d.day);
        }
    }

    #[test]
    fn profit_increases_with_price(
        spec in spec_strategy(),
        policy in policy_strategy(),
        demands in prop::collection::vec(0u64..400, 1..120),
        bump in 0.01..5.0f64,
    ) {
        let low = run(&spec, &policy, &demands);
        let mut dearer = spec.clone();
        dearer.selling_price += bump;
        let high = run(&dearer, &policy, &demands);
        prop_assert_eq!(low.total_sold, high.total_sold);
        prop_assert!(high.costs.profit >= low.costs.profit);
    }
}
