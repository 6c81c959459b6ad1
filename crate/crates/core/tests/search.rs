use inventory_sim::montecarlo::ReplicationSummary;
use inventory_sim::optimize::{
    bayesian_optimize, grid_search, quadratic_objective, BayesOptions, Point, SearchSpace,
};
use inventory_sim::Result;
use proptest::prelude::*;

fn space() -> SearchSpace {
    SearchSpace::new((0, 1000), (0, 1000), 1).unwrap()
}

#[test]
fn bayes_is_deterministic_for_a_seed() {
    let s = space();
    let opts = BayesOptions::new(25, 8, 11);
    let a = bayesian_optimize(&s, quadratic_objective(&s, 0.37, 0.62), &opts).unwrap();
    let b = bayesian_optimize(&s, quadratic_objective(&s, 0.37, 0.62), &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bayes_never_repeats_a_point() {
    let s = SearchSpace::new((0, 40), (0, 40), 10).unwrap();
    let r = bayesian_optimize(&s, quadratic_objective(&s, 0.5, 0.5), &BayesOptions::new(25, 5, 3)).unwrap();
    let mut seen: Vec<Point> = r.history.iter().map(|e| e.point).collect();
    let n = seen.len();
    seen.sort();
    seen.dedup();
    assert_eq!(seen.len(), n);
    assert_eq!(n, 25, "5x5 lattice has 25 points");
}

#[test]
fn bayes_on_monotone_objective_heads_for_the_corner() {
    let s = space();
    let f = |p: Point| -> Result<ReplicationSummary> { Ok(ReplicationSummary::exact((p.r + p.q) as f64)) };
    let r = bayesian_optimize(&s, f, &BayesOptions::new(30, 10, 5)).unwrap();
    assert!(r.best_point.r + r.best_point.q >= 1900, "{:?}", r.best_point);
}

#[test]
fn single_point_bounds_return_that_point() {
    let s = SearchSpace::new((500, 500), (3200, 3200), 10).unwrap();
    let r = grid_search(&s, quadratic_objective(&s, 0.3, 0.7)).unwrap();
    assert_eq!(r.best_point, Point::new(500, 3200));
    assert_eq!(r.history.len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// With a budget of at least the coarse lattice size, Bayesian search is
    /// never worse than a coarse grid on a smooth objective.
    #[test]
    fn bayes_matches_or_beats_coarse_grid(seed in any::<u64>()) {
        let s = SearchSpace::new((0, 100), (0, 100), 1).unwrap();
        let coarse = SearchSpace::new((0, 100), (0, 100), 20).unwrap();
        let f = quadratic_objective(&s, 0.37, 0.62);
        let grid = grid_search(&coarse, &f).unwrap();
        let bo = bayesian_optimize(&s, &f, &BayesOptions::new(36, 10, seed)).unwrap();
        prop_assert!(bo.best_summary.mean_profit >= grid.best_summary.mean_profit);
    }

    #[test]
    fn incumbent_never_decreases(seed in any::<u64>()) {
        let s = space();
        let r = bayesian_optimize(&s, quadratic_objective(&s, 0.2, 0.9), &BayesOptions::new(20, 6, seed)).unwrap();
        let trace = r.incumbent_trace();
        prop_assert!(trace.windows(2).all(|w| w[1] >= w[0]));
        prop_assert_eq!(*trace.last().unwrap(), r.best_summary.mean_profit);
    }
}
