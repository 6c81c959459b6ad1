use inventory_sim::demand::{estimate_stats, DemandModel, SizeDistribution};
use inventory_sim::domain::DemandStats;
use inventory_sim::policy::lead_time_demand;

const DRAWS: usize = 1_000_000;

fn draws(model: &DemandModel, seed: u64, n: usize) -> Vec<u64> {
    model.generate_stream(seed, n).unwrap().demands
}

fn moments(xs: &[u64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().map(|&x| x as f64).sum::<f64>() / n;
    let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn lognormal_sizes_reproduce_target_moments() {
    for (mean, std) in [(103.5, 37.32), (648.55, 26.45)] {
        let model = DemandModel::lognormal(DemandStats::new(mean, std, 1.0, 0).unwrap()).unwrap();
        let (m, s) = moments(&draws(&model, 5, DRAWS));
        assert!(rel(m, mean) < 0.005, "mean {m} vs {mean}");
        assert!(rel(s, std) < 0.01, "std {s} vs {std}");
    }
}

#[test]
fn gate_frequency_matches_probability() {
    for p in [0.23, 0.70, 0.76] {
        let model = DemandModel::lognormal(DemandStats::new(150.0, 3.0, p, 0).unwrap()).unwrap();
        let xs = draws(&model, 17, DRAWS);
        let freq = xs.iter().filter(|&&x| x > 0).count() as f64 / DRAWS as f64;
        let tol = 4.0 * (p * (1.0 - p) / DRAWS as f64).sqrt();
        assert!((freq - p).abs() < tol, "p={p} freq={freq}");
    }
}

#[test]
fn gated_mean_is_probability_times_size_mean() {
    let model = DemandModel::lognormal(DemandStats::new(103.5, 37.32, 0.76, 0).unwrap()).unwrap();
    let (m, _) = moments(&draws(&model, 23, DRAWS));
    assert!(rel(m, 78.66) < 0.01, "{m}");
}

#[test]
fn mixture_mean_includes_tail_shift() {
    let stats = DemandStats::new(200.0, 30.0, 1.0, 0).unwrap();
    let dist = SizeDistribution::MixtureTail { tail_weight: 0.1, tail_shift: 3.0 };
    let model = DemandModel::new(stats, dist).unwrap();
    let (m, _) = moments(&draws(&model, 29, DRAWS));
    assert!(rel(m, 200.0 + 0.1 * 3.0 * 30.0) < 0.005, "{m}");
}

#[test]
fn normal_sizes_are_clamped_at_zero() {
    let model = DemandModel::new(
        DemandStats::new(5.0, 10.0, 1.0, 0).unwrap(),
        SizeDistribution::Normal,
    )
    .unwrap();
    let xs = draws(&model, 31, 100_000);
    assert!(xs.contains(&0));
}

#[test]
fn estimate_inverts_generation() {
    let target = DemandStats::new(201.68, 31.08, 0.70, 0).unwrap();
    let model = DemandModel::lognormal(target).unwrap();
    let est = estimate_stats(&draws(&model, 37, DRAWS)).unwrap();
    assert!((est.demand_probability - 0.70).abs() < 0.005);
    assert!(rel(est.mean_daily, 201.68) < 0.005);
    assert!(rel(est.std_daily, 31.08) < 0.01);
}

/// Brute-force lead-time windows of gated demand against the closed form.
#[test]
fn lead_time_moments_match_simulated_windows() {
    let products = [
        (103.50, 37.32, 0.76, 9),
        (648.55, 26.45, 1.00, 6),
        (201.68, 31.08, 0.70, 15),
        (150.06, 3.21, 0.23, 12),
    ];
    let windows = 1_000_000;
    for (i, &(mean, std, p, lt)) in products.iter().enumerate() {
        let stats = DemandStats::new(mean, std, p, 0).unwrap();
        let model = DemandModel::lognormal(stats).unwrap();
        let days = draws(&model, 100 + i as u64, windows * lt as usize);
        let totals: Vec<u64> = days.chunks(lt as usize).map(|c| c.iter().sum()).collect();
        let (m, s) = moments(&totals);
        let ltd = lead_time_demand(&stats, lt);
        assert!(rel(m, ltd.expected) < 0.005, "mean {m} vs {}", ltd.expected);
        assert!(rel(s, ltd.std) < 0.005, "std {s} vs {}", ltd.std);
    }
}
