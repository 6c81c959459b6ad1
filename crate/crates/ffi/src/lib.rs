//! C ABI for the inventory simulator.
//!
//! Every entry point returns an [`InvStatus`]. On failure a message is kept
//! per thread and can be read with [`inv_last_error`]. Handles are opaque and
//! must be released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use inventory_sim::config::matched_review_period;
use inventory_sim::demand::{estimate_stats, DemandModel, SizeDistribution};
use inventory_sim::domain::{DemandStats, Policy, ProductSpec};
use inventory_sim::engine::simulate_year_conditional;
use inventory_sim::montecarlo::{evaluate_policy, ReplicationPlan, ReplicationSummary};
use inventory_sim::optimize::{bayesian_optimize, grid_search, BayesOptions, Point, SearchSpace};
use inventory_sim::policy::ReplenishmentParams;
use inventory_sim::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NoObservations = 3,
    Numerical = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvPolicyKind {
    PeriodicFixedQ = 0,
    PeriodicUpTo = 1,
    ContinuousFixedQ = 2,
    ContinuousRestore = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvSizeDistribution {
    Lognormal = 0,
    Normal = 1,
    MixtureTail = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct InvDemandStats {
    pub mean_daily: f64,
    pub std_daily: f64,
    pub demand_probability: f64,
    pub n_observations: usize,
}

/// Product economics plus demand statistics. A `review_period` of 0 selects
/// the period whose fixed order quantity matches expected demand.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct InvProductParams {
    pub purchase_cost: f64,
    pub selling_price: f64,
    pub ordering_cost: f64,
    pub holding_rate: f64,
    pub size: f64,
    pub lead_time: u32,
    pub starting_stock: u64,
    pub stats: InvDemandStats,
    pub safety_factor: f64,
    pub review_period: u32,
    pub order_quantity: u64,
}

/// Fields not used by `kind` are ignored.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct InvPolicy {
    pub kind: InvPolicyKind,
    pub review_period: u32,
    pub order_quantity: u64,
    pub reorder_point: u64,
    pub safety_factor: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct InvYearResult {
    pub revenue: f64,
    pub holding_cost: f64,
    pub ordering_cost: f64,
    pub purchase_cost: f64,
    pub profit: f64,
    pub orders_placed: usize,
    pub total_demand: u64,
    pub total_lost: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct InvOptimum {
    pub reorder_point: u64,
    pub order_quantity: u64,
    pub mean_profit: f64,
    pub std_profit: f64,
    pub evaluations: usize,
}

/// Rectangular `(r, Q)` search region with lattice `step`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct InvBounds {
    pub r_min: u64,
    pub r_max: u64,
    pub q_min: u64,
    pub q_max: u64,
    pub step: u64,
}

/// Opaque product handle.
pub struct InvProduct {
    spec: ProductSpec,
    params: ReplenishmentParams,
    model: DemandModel,
    review_period: u32,
}

/// Opaque demand-model handle.
pub struct InvDemandModel {
    model: DemandModel,
}

/// Opaque Monte Carlo summary handle.
pub struct InvSummary {
    summary: ReplicationSummary,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn inv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

struct Failure(InvStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::NoObservations => InvStatus::NoObservations,
            Error::SingularKernel(_) | Error::DegenerateSeries => InvStatus::Numerical,
            _ => InvStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(InvStatus::NullPointer, format!("{what} is NULL"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> InvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => InvStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            InvStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn stats_from(s: &InvDemandStats) -> Result<DemandStats, Failure> {
    Ok(DemandStats::new(s.mean_daily, s.std_daily, s.demand_probability, s.n_observations)?)
}

fn distribution_from(kind: InvSizeDistribution, tail_weight: f64, tail_shift: f64) -> SizeDistribution {
    match kind {
        InvSizeDistribution::Lognormal => SizeDistribution::Lognormal,
        InvSizeDistribution::Normal => SizeDistribution::Normal,
        InvSizeDistribution::MixtureTail => SizeDistribution::MixtureTail { tail_weight, tail_shift },
    }
}

fn policy_from(p: &InvPolicy) -> Policy {
    match p.kind {
        InvPolicyKind::PeriodicFixedQ => Policy::PeriodicFixedQ {
            review_period: p.review_period,
            order_quantity: p.order_quantity,
        },
        InvPolicyKind::PeriodicUpTo => Policy::PeriodicUpTo {
            review_period: p.review_period,
            safety_factor: p.safety_factor,
        },
        InvPolicyKind::ContinuousFixedQ => Policy::ContinuousFixedQ {
            reorder_point: p.reorder_point,
            order_quantity: p.order_quantity,
        },
        InvPolicyKind::ContinuousRestore => Policy::ContinuousRestore { reorder_point: p.reorder_point },
    }
}

/// Creates a product with lognormal demand sizes.
///
/// # Safety
/// `params` must point to a valid `InvProductParams`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inv_product_new(params: *const InvProductParams, out_product: *mut *mut InvProduct) -> InvStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let slot = out(out_product, "out_product")?;
        let spec = ProductSpec {
            id: String::new(),
            purchase_cost: p.purchase_cost,
            selling_price: p.selling_price,
            ordering_cost: p.ordering_cost,
            holding_rate: p.holding_rate,
            size: p.size,
            lead_time: p.lead_time,
            starting_stock: p.starting_stock,
        };
        spec.validate()?;
        let stats = stats_from(&p.stats)?;
        let review_period = match p.review_period {
            0 => matched_review_period(p.order_quantity.max(1), &stats),
            n => n,
        };
        let params = ReplenishmentParams::compute(&stats, p.safety_factor, p.lead_time, review_period)?;
        let model = DemandModel::lognormal(stats)?;
        *slot = Box::into_raw(Box::new(InvProduct { spec, params, model, review_period }));
        Ok(())
    })
}

/// # Safety
/// `product` must be NULL or a handle from [`inv_product_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn inv_product_free(product: *mut InvProduct) {
    if !product.is_null() {
        drop(Box::from_raw(product));
    }
}

/// Reorder point, safety stock and resolved review period of a product.
///
/// # Safety
/// `product` must be a live handle; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn inv_product_reorder_point(
    product: *const InvProduct,
    out_reorder_point: *mut u64,
    out_safety_stock: *mut f64,
    out_review_period: *mut u32,
) -> InvStatus {
    guard(|| {
        let p = deref(product, "product")?;
        *out(out_reorder_point, "out_reorder_point")? = p.params.reorder_point;
        *out(out_safety_stock, "out_safety_stock")? = p.params.safety_stock;
        *out(out_review_period, "out_review_period")? = p.review_period;
        Ok(())
    })
}

/// Estimates demand statistics from `len` daily demands.
///
/// # Safety
/// `demands` must point to `len` readable values; `out_stats` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inv_estimate_stats(demands: *const u64, len: usize, out_stats: *mut InvDemandStats) -> InvStatus {
    guard(|| {
        if demands.is_null() && len > 0 {
            return Err(null("demands"));
        }
        let slot = out(out_stats, "out_stats")?;
        let history = if len == 0 { &[][..] } else { std::slice::from_raw_parts(demands, len) };
        let s = estimate_stats(history)?;
        *slot = InvDemandStats {
            mean_daily: s.mean_daily,
            std_daily: s.std_daily,
            demand_probability: s.demand_probability,
            n_observations: s.n_observations,
        };
        Ok(())
    })
}

/// Creates a demand model. Tail parameters apply only to
/// `INV_SIZE_DISTRIBUTION_MIXTURE_TAIL`.
///
/// # Safety
/// `stats` must be valid; `out_model` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inv_demand_model_new(
    stats: *const InvDemandStats,
    distribution: InvSizeDistribution,
    tail_weight: f64,
    tail_shift: f64,
    out_model: *mut *mut InvDemandModel,
) -> InvStatus {
    guard(|| {
        let s = stats_from(deref(stats, "stats")?)?;
        let slot = out(out_model, "out_model")?;
        let model = DemandModel::new(s, distribution_from(distribution, tail_weight, tail_shift))?;
        *slot = Box::into_raw(Box::new(InvDemandModel { model }));
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a handle from [`inv_demand_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn inv_demand_model_free(model: *mut InvDemandModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Fills `buf` with `len` days of demand generated from `seed`.
///
/// # Safety
/// `model` must be a live handle; `buf` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn inv_demand_model_generate(model: *const InvDemandModel, seed: u64, buf: *mut u64, len: usize) -> InvStatus {
    guard(|| {
        let m = deref(model, "model")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let stream = m.model.generate_stream(seed, len)?;
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(&stream.demands);
        Ok(())
    })
}

/// Simulates one year. With `conditional` non-zero the day after an order
/// repeats the trigger day's demand.
///
/// # Safety
/// `product` and `policy` must be valid; `out_result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inv_simulate_year(
    product: *const InvProduct,
    policy: *const InvPolicy,
    seed: u64,
    conditional: bool,
    out_result: *mut InvYearResult,
) -> InvStatus {
    guard(|| {
        let p = deref(product, "product")?;
        let policy = policy_from(deref(policy, "policy")?);
        let slot = out(out_result, "out_result")?;
        let model = p.model.clone().conditional(conditional);
        let r = simulate_year_conditional(&p.spec, &policy, &model, seed, &p.params)?;
        *slot = InvYearResult {
            revenue: r.costs.revenue,
            holding_cost: r.costs.holding_cost,
            ordering_cost: r.costs.ordering_cost,
            purchase_cost: r.costs.purchase_cost,
            profit: r.costs.profit,
            orders_placed: r.orders_placed,
            total_demand: r.total_demand,
            total_lost: r.total_lost,
        };
        Ok(())
    })
}

/// Runs `n_replications` years under common random numbers.
/// `workers` of 0 uses every core.
///
/// # Safety
/// `product` and `policy` must be valid; `out_summary` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inv_evaluate_policy(
    product: *const InvProduct,
    policy: *const InvPolicy,
    n_replications: usize,
    seed: u64,
    workers: usize,
    conditional: bool,
    out_summary: *mut *mut InvSummary,
) -> InvStatus {
    guard(|| {
        let p = deref(product, "product")?;
        let policy = policy_from(deref(policy, "policy")?);
        let slot = out(out_summary, "out_summary")?;
        let model = p.model.clone().conditional(conditional);
        let plan = ReplicationPlan::new(n_replications, seed).with_workers((workers > 0).then_some(workers));
        let summary = evaluate_policy(&p.spec, &policy, &model, &p.params, &plan)?;
        *slot = Box::into_raw(Box::new(InvSummary { summary }));
        Ok(())
    })
}

/// # Safety
/// `summary` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn inv_summary_free(summary: *mut InvSummary) {
    if !summary.is_null() {
        drop(Box::from_raw(summary));
    }
}

/// Returns NaN for a NULL handle.
///
/// # Safety
/// `summary` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn inv_summary_mean_profit(summary: *const InvSummary) -> f64 {
    summary.as_ref().map_or(f64::NAN, |s| s.summary.mean_profit)
}

/// # Safety
/// `summary` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn inv_summary_std_profit(summary: *const InvSummary) -> f64 {
    summary.as_ref().map_or(f64::NAN, |s| s.summary.std_profit)
}

/// # Safety
/// `summary` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn inv_summary_mean_lost_fraction(summary: *const InvSummary) -> f64 {
    summary.as_ref().map_or(f64::NAN, |s| s.summary.mean_lost_fraction)
}

/// # Safety
/// `summary` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn inv_summary_mean_end_inventory(summary: *const InvSummary) -> f64 {
    summary.as_ref().map_or(f64::NAN, |s| s.summary.mean_end_inventory)
}

/// Number of replications; 0 for a NULL handle.
///
/// # Safety
/// `summary` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn inv_summary_len(summary: *const InvSummary) -> usize {
    summary.as_ref().map_or(0, |s| s.summary.profits.len())
}

/// Copies up to `len` per-replication profits into `buf` and returns the
/// number copied.
///
/// # Safety
/// `summary` must be NULL or a live handle; `buf` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn inv_summary_profits(summary: *const InvSummary, buf: *mut f64, len: usize) -> usize {
    let (Some(s), false) = (summary.as_ref(), buf.is_null()) else {
        return 0;
    };
    let n = len.min(s.summary.profits.len());
    std::slice::from_raw_parts_mut(buf, n).copy_from_slice(&s.summary.profits[..n]);
    n
}

fn optimum(best: Point, summary: &ReplicationSummary, evaluations: usize) -> InvOptimum {
    InvOptimum {
        reorder_point: best.r,
        order_quantity: best.q,
        mean_profit: summary.mean_profit,
        std_profit: summary.std_profit,
        evaluations,
    }
}

unsafe fn search_inputs<'a>(
    product: *const InvProduct,
    bounds: *const InvBounds,
) -> Result<(&'a InvProduct, SearchSpace), Failure> {
    let p = deref(product, "product")?;
    let b = deref(bounds, "bounds")?;
    let space = SearchSpace::new((b.r_min, b.r_max), (b.q_min, b.q_max), b.step)?;
    Ok((p, space))
}

fn profit_at<'a>(p: &'a InvProduct, plan: &'a ReplicationPlan) -> impl Fn(Point) -> inventory_sim::Result<ReplicationSummary> + Sync + 'a {
    move |pt: Point| {
        let policy = Policy::ContinuousFixedQ { reorder_point: pt.r, order_quantity: pt.q };
        evaluate_policy(&p.spec, &policy, &p.model, &p.params, plan)
    }
}

/// Exhaustive `(r, Q)` search for the continuous-review policy.
///
/// # Safety
/// `product` and `bounds` must be valid; `out_optimum` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inv_optimize_grid(
    product: *const InvProduct,
    bounds: *const InvBounds,
    n_replications: usize,
    seed: u64,
    out_optimum: *mut InvOptimum,
) -> InvStatus {
    guard(|| {
        let (p, space) = search_inputs(product, bounds)?;
        let slot = out(out_optimum, "out_optimum")?;
        let plan = ReplicationPlan::new(n_replications, seed);
        let r = grid_search(&space, profit_at(p, &plan))?;
        *slot = optimum(r.best_point, &r.best_summary, r.history.len());
        Ok(())
    })
}

/// Gaussian-process Bayesian `(r, Q)` search for the continuous-review policy.
///
/// # Safety
/// `product` and `bounds` must be valid; `out_optimum` must be writable.
#[no_mangle]
pub unsafe extern "C" fn inv_optimize_bayes(
    product: *const InvProduct,
    bounds: *const InvBounds,
    budget: usize,
    init_count: usize,
    n_replications: usize,
    seed: u64,
    out_optimum: *mut InvOptimum,
) -> InvStatus {
    guard(|| {
        let (p, space) = search_inputs(product, bounds)?;
        let slot = out(out_optimum, "out_optimum")?;
        let plan = ReplicationPlan::new(n_replications, seed);
        let r = bayesian_optimize(&space, profit_at(p, &plan), &BayesOptions::new(budget, init_count, seed))?;
        *slot = optimum(r.best_point, &r.best_summary, r.history.len());
        Ok(())
    })
}
