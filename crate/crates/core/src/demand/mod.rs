//! Demand estimation and stochastic daily demand.
//!
//! Daily demand is *gated*: a uniform draw decides whether the day sees any
//! demand at all (probability `demand_probability`), and only then is a size
//! drawn from the positive-demand distribution. Sizes are rounded to the
//! nearest whole unit and clamped at zero.

mod history;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

pub use history::{parse_history, read_history, write_history, ProductHistory};

use crate::domain::DemandStats;
use crate::rng::stream_rng;
use crate::{Error, Result, DAYS_PER_YEAR};

/// Default weight of the high-demand component of [`SizeDistribution::MixtureTail`].
pub const DEFAULT_TAIL_WEIGHT: f64 = 0.1;
/// Default shift, in standard deviations, of the high-demand component.
pub const DEFAULT_TAIL_SHIFT: f64 = 3.0;

/// Estimates demand statistics from a daily history.
///
/// Mean and sample standard deviation are taken over days with nonzero
/// demand; the fraction of such days is the demand probability.
pub fn estimate_stats(history: &[u64]) -> Result<DemandStats> {
    if history.is_empty() {
        return Err(Error::NoObservations);
    }
    let nonzero: Vec<f64> = history.iter().filter(|&&d| d > 0).map(|&d| d as f64).collect();
    let k = nonzero.len();
    if k == 0 {
        return DemandStats::new(0.0, 0.0, 0.0, history.len());
    }
    let mean = nonzero.iter().sum::<f64>() / k as f64;
    let std = if k > 1 {
        let ss: f64 = nonzero.iter().map(|x| (x - mean).powi(2)).sum();
        (ss / (k - 1) as f64).sqrt()
    } else {
        0.0
    };
    DemandStats::new(mean, std, k as f64 / history.len() as f64, history.len())
}

/// Moment-matched lognormal parameters `(mu_ln, sigma_ln)` for a given mean
/// and standard deviation.
pub fn lognormal_params(mean: f64, std: f64) -> Result<(f64, f64)> {
    if !(mean > 0.0) {
        return Err(Error::NonPositiveMean);
    }
    if !(std >= 0.0) {
        return Err(Error::invalid("std must be >= 0"));
    }
    let cv = std / mean;
    let sigma2 = (1.0 + cv * cv).ln();
    Ok((mean.ln() - sigma2 / 2.0, sigma2.sqrt()))
}

/// Distribution of demand size on days that have demand.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SizeDistribution {
    #[default]
    Lognormal,
    Normal,
    /// Normal(μ, σ) with probability `1 − tail_weight`, otherwise
    /// Normal(μ + tail_shift·σ, σ).
    MixtureTail { tail_weight: f64, tail_shift: f64 },
}

#[derive(Debug, Clone, Copy)]
enum Sampler {
    Never,
    Lognormal(LogNormal<f64>),
    Normal(Normal<f64>),
    Mixture {
        base: Normal<f64>,
        tail: Normal<f64>,
        weight: f64,
    },
}

/// Stochastic daily demand generator.
#[derive(Debug, Clone)]
pub struct DemandModel {
    stats: DemandStats,
    distribution: SizeDistribution,
    conditional: bool,
    sampler: Sampler,
}

impl DemandModel {
    pub fn new(stats: DemandStats, distribution: SizeDistribution) -> Result<Self> {
        stats.validate()?;
        let (mean, std) = (stats.mean_daily, stats.std_daily);
        let sampler = if stats.demand_probability == 0.0 {
            Sampler::Never
        } else {
            match distribution {
                SizeDistribution::Lognormal => {
                    let (mu, sigma) = lognormal_params(mean, std)?;
                    Sampler::Lognormal(
                        LogNormal::new(mu, sigma).map_err(|e| Error::invalid(e.to_string()))?,
                    )
                }
                SizeDistribution::Normal => Sampler::Normal(normal(mean, std)?),
                SizeDistribution::MixtureTail {
                    tail_weight,
                    tail_shift,
                } => {
                    if !(tail_weight > 0.0 && tail_weight < 1.0) {
                        return Err(Error::invalid("tail_weight must be in (0, 1)"));
                    }
                    if !(tail_shift > 0.0 && tail_shift.is_finite()) {
                        return Err(Error::invalid("tail_shift must be > 0"));
                    }
                    Sampler::Mixture {
                        base: normal(mean, std)?,
                        tail: normal(mean + tail_shift * std, std)?,
                        weight: tail_weight,
                    }
                }
            }
        };
        Ok(DemandModel {
            stats,
            distribution,
            conditional: false,
            sampler,
        })
    }

    pub fn lognormal(stats: DemandStats) -> Result<Self> {
        Self::new(stats, SizeDistribution::Lognormal)
    }

    /// Switches the model to conditional sampling: the day after an order
    /// is triggered repeats the trigger day's demand.
    pub fn conditional(mut self, on: bool) -> Self {
        self.conditional = on;
        self
    }

    pub fn is_conditional(&self) -> bool {
        self.conditional
    }

    pub fn stats(&self) -> &DemandStats {
        &self.stats
    }

    pub fn distribution(&self) -> SizeDistribution {
        self.distribution
    }

    /// Draws one day's demand.
    pub fn sample_day<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        if u >= self.stats.demand_probability {
            return 0;
        }
        let x = match &self.sampler {
            Sampler::Never => 0.0,
            Sampler::Lognormal(d) => d.sample(rng),
            Sampler::Normal(d) => d.sample(rng),
            Sampler::Mixture { base, tail, weight } => {
                let v: f64 = rng.random();
                if v < *weight {
                    tail.sample(rng)
                } else {
                    base.sample(rng)
                }
            }
        };
        round_units(x)
    }

    /// Draws one day's demand given whether an order was triggered the
    /// previous day. When triggered, the previous demand is returned exactly.
    ///
    /// The underlying draw is consumed either way so that the random stream
    /// stays aligned with [`DemandModel::sample_day`].
    pub fn sample_day_conditional<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        order_triggered_previously: bool,
        previous_demand: u64,
    ) -> u64 {
        let fresh = self.sample_day(rng);
        if order_triggered_previously {
            previous_demand
        } else {
            fresh
        }
    }

    /// Random generator positioned at the start of the stream for `seed`.
    pub fn stream_rng(seed: u64) -> ChaCha8Rng {
        stream_rng(seed)
    }

    /// Generates `horizon` days of demand from `seed`.
    pub fn generate_stream(&self, seed: u64, horizon: usize) -> Result<DemandStream> {
        if horizon == 0 {
            return Err(Error::invalid("horizon must be >= 1"));
        }
        let mut rng = stream_rng(seed);
        let demands = (0..horizon).map(|_| self.sample_day(&mut rng)).collect();
        Ok(DemandStream { demands, seed })
    }

    /// Generates one 365-day year of demand.
    pub fn generate_year(&self, seed: u64) -> DemandStream {
        self.generate_stream(seed, DAYS_PER_YEAR)
            .expect("non-zero horizon")
    }
}

fn normal(mean: f64, std: f64) -> Result<Normal<f64>> {
    Normal::new(mean, std).map_err(|e| Error::invalid(e.to_string()))
}

fn round_units(x: f64) -> u64 {
    if x.is_nan() || x <= 0.0 {
        0
    } else {
        x.round() as u64
    }
}

/// A seeded sequence of daily demands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandStream {
    pub demands: Vec<u64>,
    pub seed: u64,
}

impl DemandStream {
    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }
}

/// Synthesizes a history whose estimated statistics reproduce `stats`.
///
/// The number of demand days is fixed at `round(p × days)`; sizes are
/// lognormal draws rescaled to the exact target mean and standard deviation
/// before rounding to whole units (minimum 1).
pub fn synthesize_history(stats: &DemandStats, days: usize, seed: u64) -> Result<Vec<u64>> {
    stats.validate()?;
    if days == 0 {
        return Err(Error::invalid("days must be >= 1"));
    }
    let k = ((stats.demand_probability * days as f64).round() as usize).min(days);
    let mut rng = stream_rng(seed);
    let mut history = vec![0u64; days];
    if k == 0 {
        return Ok(history);
    }
    let mut positions: Vec<usize> = (0..days).collect();
    positions.shuffle(&mut rng);
    positions.truncate(k);
    positions.sort_unstable();

    let sizes: Vec<f64> = if k == 1 || stats.std_daily == 0.0 {
        vec![stats.mean_daily; k]
    } else {
        let (mu, sigma) = lognormal_params(stats.mean_daily, stats.std_daily)?;
        let d = LogNormal::new(mu, sigma).map_err(|e| Error::invalid(e.to_string()))?;
        let raw: Vec<f64> = (0..k).map(|_| d.sample(&mut rng)).collect();
        let m = raw.iter().sum::<f64>() / k as f64;
        let s = (raw.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt();
        raw.iter()
            .map(|x| stats.mean_daily + stats.std_daily * (x - m) / s)
            .collect()
    };
    for (&pos, size) in positions.iter().zip(sizes) {
        history[pos] = round_units(size).max(1);
    }
    Ok(history)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(mean: f64, std: f64, p: f64) -> DemandStats {
        DemandStats::new(mean, std, p, 365).unwrap()
    }

    const TABLE1_PR4: [u64; 30] = [
        153, 147, 0, 0, 0, 156, 0, 0, 0, 0, 0, 0, 0, 0, 156, 0, 0, 0, 144, 0, 0, 156, 0, 0, 147,
        0, 0, 0, 150, 147,
    ];

    #[test]
    fn estimate_table1_pr4_glimpse() {
        let s = estimate_stats(&TABLE1_PR4).unwrap();
        assert!((s.demand_probability - 0.30).abs() < 1e-12);
        assert!((s.mean_daily - 1356.0 / 9.0).abs() < 1e-12);
        assert_eq!(s.n_observations, 30);
    }

    #[test]
    fn estimate_all_zero_and_empty() {
        let s = estimate_stats(&[0; 10]).unwrap();
        assert_eq!((s.demand_probability, s.mean_daily, s.std_daily), (0.0, 0.0, 0.0));
        assert!(matches!(estimate_stats(&[]), Err(Error::NoObservations)));
    }

    #[test]
    fn estimate_uses_sample_std_over_nonzero_days() {
        let s = estimate_stats(&[0, 1, 2, 3, 0]).unwrap();
        assert_eq!(s.mean_daily, 2.0);
        assert_eq!(s.std_daily, 1.0);
        assert!((s.demand_probability - 0.6).abs() < 1e-15);
    }

    #[test]
    fn lognormal_zero_variance_limit() {
        let (mu, sigma) = lognormal_params(50.0, 0.0).unwrap();
        assert_eq!(sigma, 0.0);
        assert!((mu - 50f64.ln()).abs() < 1e-15);
        assert!(matches!(lognormal_params(0.0, 1.0), Err(Error::NonPositiveMean)));
        assert!(matches!(lognormal_params(-1.0, 1.0), Err(Error::NonPositiveMean)));
    }

    #[test]
    fn lognormal_moments_match_by_closed_form() {
        // E = exp(mu + s²/2), Var = (exp(s²) - 1) E².
        for (m, s) in [(103.5, 37.32), (648.55, 26.45)] {
            let (mu, sigma) = lognormal_params(m, s).unwrap();
            let mean = (mu + sigma * sigma / 2.0).exp();
            let sd = (((sigma * sigma).exp() - 1.0) * mean * mean).sqrt();
            assert!((mean - m).abs() < 1e-9 * m);
            assert!((sd - s).abs() < 1e-9 * s);
        }
    }

    #[test]
    fn closed_gate_gives_zero() {
        let model = DemandModel::lognormal(stats(0.0, 0.0, 0.0)).unwrap();
        let stream = model.generate_stream(3, 365).unwrap();
        assert!(stream.demands.iter().all(|&d| d == 0));
    }

    #[test]
    fn deterministic_limit() {
        for dist in [SizeDistribution::Lognormal, SizeDistribution::Normal] {
            let model = DemandModel::new(stats(42.4, 0.0, 1.0), dist).unwrap();
            let stream = model.generate_stream(9, 1000).unwrap();
            assert!(stream.demands.iter().all(|&d| d == 42));
        }
    }

    #[test]
    fn streams_are_deterministic_per_seed() {
        let model = DemandModel::lognormal(stats(103.5, 37.32, 0.76)).unwrap();
        assert_eq!(model.generate_year(5), model.generate_year(5));
        assert_ne!(model.generate_year(5).demands, model.generate_year(6).demands);
        assert_eq!(model.generate_year(5).len(), 365);
    }

    #[test]
    fn normal_draws_are_clamped() {
        let model = DemandModel::new(stats(1.0, 50.0, 1.0), SizeDistribution::Normal).unwrap();
        let mut rng = DemandModel::stream_rng(1);
        let zeros = (0..10_000).filter(|_| model.sample_day(&mut rng) == 0).count();
        assert!(zeros > 4000, "expected many clamped draws, got {zeros}");
    }

    #[test]
    fn mixture_validation() {
        let bad = SizeDistribution::MixtureTail { tail_weight: 1.0, tail_shift: 3.0 };
        assert!(DemandModel::new(stats(10.0, 2.0, 1.0), bad).is_err());
        let bad = SizeDistribution::MixtureTail { tail_weight: 0.1, tail_shift: 0.0 };
        assert!(DemandModel::new(stats(10.0, 2.0, 1.0), bad).is_err());
    }

    #[test]
    fn conditional_repeats_previous_demand() {
        let model = DemandModel::lognormal(stats(103.5, 37.32, 0.76)).unwrap();
        let mut rng = DemandModel::stream_rng(0);
        assert_eq!(model.sample_day_conditional(&mut rng, true, 260), 260);
        assert_eq!(model.sample_day_conditional(&mut rng, true, 0), 0);
    }

    #[test]
    fn conditional_without_trigger_matches_base_stream() {
        let model = DemandModel::lognormal(stats(103.5, 37.32, 0.76)).unwrap();
        let mut a = DemandModel::stream_rng(77);
        let mut b = DemandModel::stream_rng(77);
        for _ in 0..2000 {
            assert_eq!(model.sample_day(&mut a), model.sample_day_conditional(&mut b, false, 999));
        }
    }

    #[test]
    fn synthesized_history_matches_targets() {
        let target = stats(103.5, 37.32, 0.76);
        let h = synthesize_history(&target, 365, 1).unwrap();
        let s = estimate_stats(&h).unwrap();
        assert!((s.demand_probability - 0.76).abs() < 0.01);
        assert!((s.mean_daily / 103.5 - 1.0).abs() < 0.01);
        assert!((s.std_daily / 37.32 - 1.0).abs() < 0.02);
    }
}
