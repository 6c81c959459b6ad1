#ifndef INVENTORY_SIM_H
#define INVENTORY_SIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum InvStatus {
  INV_STATUS_OK = 0,
  INV_STATUS_NULL_POINTER = 1,
  INV_STATUS_INVALID_ARGUMENT = 2,
  INV_STATUS_NO_OBSERVATIONS = 3,
  INV_STATUS_NUMERICAL = 4,
  INV_STATUS_PANIC = 5,
} InvStatus;

typedef enum InvSizeDistribution {
  INV_SIZE_DISTRIBUTION_LOGNORMAL = 0,
  INV_SIZE_DISTRIBUTION_NORMAL = 1,
  INV_SIZE_DISTRIBUTION_MIXTURE_TAIL = 2,
} InvSizeDistribution;

typedef enum InvPolicyKind {
  INV_POLICY_KIND_PERIODIC_FIXED_Q = 0,
  INV_POLICY_KIND_PERIODIC_UP_TO = 1,
  INV_POLICY_KIND_CONTINUOUS_FIXED_Q = 2,
  INV_POLICY_KIND_CONTINUOUS_RESTORE = 3,
} InvPolicyKind;

/*
 Opaque demand-model handle.
 */
typedef struct InvDemandModel InvDemandModel;

/*
 Opaque product handle.
 */
typedef struct InvProduct InvProduct;

/*
 Opaque Monte Carlo summary handle.
 */
typedef struct InvSummary InvSummary;

typedef struct InvDemandStats {
  double mean_daily;
  double std_daily;
  double demand_probability;
  size_t n_observations;
} InvDemandStats;

/*
 Product economics plus demand statistics. A `review_period` of 0 selects
 the period whose fixed order quantity matches expected demand.
 */
typedef struct InvProductParams {
  double purchase_cost;
  double selling_price;
  double ordering_cost;
  double holding_rate;
  double size;
  uint32_t lead_time;
  uint64_t starting_stock;
  struct InvDemandStats stats;
  double safety_factor;
  uint32_t review_period;
  uint64_t order_quantity;
} InvProductParams;

/*
 Fields not used by `kind` are ignored.
 */
typedef struct InvPolicy {
  enum InvPolicyKind kind;
  uint32_t review_period;
  uint64_t order_quantity;
  uint64_t reorder_point;
  double safety_factor;
} InvPolicy;

typedef struct InvYearResult {
  double revenue;
  double holding_cost;
  double ordering_cost;
  double purchase_cost;
  double profit;
  size_t orders_placed;
  uint64_t total_demand;
  uint64_t total_lost;
} InvYearResult;

/*
 Rectangular `(r, Q)` search region with lattice `step`.
 */
typedef struct InvBounds {
  uint64_t r_min;
  uint64_t r_max;
  uint64_t q_min;
  uint64_t q_max;
  uint64_t step;
} InvBounds;

typedef struct InvOptimum {
  uint64_t reorder_point;
  uint64_t order_quantity;
  double mean_profit;
  double std_profit;
  size_t evaluations;
} InvOptimum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *inv_last_error(void);

/*
 Creates a product with lognormal demand sizes.

 # Safety
 `params` must point to a valid `InvProductParams`; `out` must be writable.
 */
enum InvStatus inv_product_new(const struct InvProductParams *params,
                               struct InvProduct **out_product);

/*
 # Safety
 `product` must be NULL or a handle from [`inv_product_new`] not yet freed.
 */
void inv_product_free(struct InvProduct *product);

/*
 Reorder point, safety stock and resolved review period of a product.

 # Safety
 `product` must be a live handle; output pointers must be writable.
 */
enum InvStatus inv_product_reorder_point(const struct InvProduct *product,
                                         uint64_t *out_reorder_point,
                                         double *out_safety_stock,
                                         uint32_t *out_review_period);

/*
 Estimates demand statistics from `len` daily demands.

 # Safety
 `demands` must point to `len` readable values; `out_stats` must be writable.
 */
enum InvStatus inv_estimate_stats(const uint64_t *demands,
                                  size_t len,
                                  struct InvDemandStats *out_stats);

/*
 Creates a demand model. Tail parameters apply only to
 `INV_SIZE_DISTRIBUTION_MIXTURE_TAIL`.

 # Safety
 `stats` must be valid; `out_model` must be writable.
 */
enum InvStatus inv_demand_model_new(const struct InvDemandStats *stats,
                                    enum InvSizeDistribution distribution,
                                    double tail_weight,
                                    double tail_shift,
                                    struct InvDemandModel **out_model);

/*
 # Safety
 `model` must be NULL or a handle from [`inv_demand_model_new`] not yet freed.
 */
void inv_demand_model_free(struct InvDemandModel *model);

/*
 Fills `buf` with `len` days of demand generated from `seed`.

 # Safety
 `model` must be a live handle; `buf` must have room for `len` values.
 */
enum InvStatus inv_demand_model_generate(const struct InvDemandModel *model,
                                         uint64_t seed,
                                         uint64_t *buf,
                                         size_t len);

/*
 Simulates one year. With `conditional` non-zero the day after an order
 repeats the trigger day's demand.

 # Safety
 `product` and `policy` must be valid; `out_result` must be writable.
 */
enum InvStatus inv_simulate_year(const struct InvProduct *product,
                                 const struct InvPolicy *policy,
                                 uint64_t seed,
                                 bool conditional,
                                 struct InvYearResult *out_result);

/*
 Runs `n_replications` years under common random numbers.
 `workers` of 0 uses every core.

 # Safety
 `product` and `policy` must be valid; `out_summary` must be writable.
 */
enum InvStatus inv_evaluate_policy(const struct InvProduct *product,
                                   const struct InvPolicy *policy,
                                   size_t n_replications,
                                   uint64_t seed,
                                   size_t workers,
                                   bool conditional,
                                   struct InvSummary **out_summary);

/*
 # Safety
 `summary` must be NULL or a handle from this library not yet freed.
 */
void inv_summary_free(struct InvSummary *summary);

/*
 Returns NaN for a NULL handle.

 # Safety
 `summary` must be NULL or a live handle.
 */
double inv_summary_mean_profit(const struct InvSummary *summary);

/*
 # Safety
 `summary` must be NULL or a live handle.
 */
double inv_summary_std_profit(const struct InvSummary *summary);

/*
 # Safety
 `summary` must be NULL or a live handle.
 */
double inv_summary_mean_lost_fraction(const struct InvSummary *summary);

/*
 # Safety
 `summary` must be NULL or a live handle.
 */
double inv_summary_mean_end_inventory(const struct InvSummary *summary);

/*
 Number of replications; 0 for a NULL handle.

 # Safety
 `summary` must be NULL or a live handle.
 */
size_t inv_summary_len(const struct InvSummary *summary);

/*
 Copies up to `len` per-replication profits into `buf` and returns the
 number copied.

 # Safety
 `summary` must be NULL or a live handle; `buf` must have room for `len` values.
 */
size_t inv_summary_profits(const struct InvSummary *summary, double *buf, size_t len);

/*
 Exhaustive `(r, Q)` search for the continuous-review policy.

 # Safety
 `product` and `bounds` must be valid; `out_optimum` must be writable.
 */
enum InvStatus inv_optimize_grid(const struct InvProduct *product,
                                 const struct InvBounds *bounds,
                                 size_t n_replications,
                                 uint64_t seed,
                                 struct InvOptimum *out_optimum);

/*
 Gaussian-process Bayesian `(r, Q)` search for the continuous-review policy.

 # Safety
 `product` and `bounds` must be valid; `out_optimum` must be writable.
 */
enum InvStatus inv_optimize_bayes(const struct InvProduct *product,
                                  const struct InvBounds *bounds,
                                  size_t budget,
                                  size_t init_count,
                                  size_t n_replications,
                                  uint64_t seed,
                                  struct InvOptimum *out_optimum);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INVENTORY_SIM_H */
