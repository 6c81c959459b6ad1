//! Convergence checks for a vector of replication profits.

use serde::Serialize;

use crate::montecarlo::mean_and_std;
use crate::{Error, Result};

/// Minimum series length accepted by [`assess_convergence`].
pub const MIN_CONVERGENCE_SAMPLES: usize = 100;

/// Element `i` is the mean of `x[0..=i]`.
pub fn running_mean(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::SeriesTooShort { required: 1, actual: 0 });
    }
    let mut sum = 0.0;
    Ok(x.iter()
        .enumerate()
        .map(|(i, v)| {
            sum += v;
            sum / (i + 1) as f64
        })
        .collect())
}

/// Means of consecutive disjoint batches; a trailing partial batch is dropped.
pub fn batch_means(x: &[f64], batch_size: usize) -> Result<Vec<f64>> {
    if batch_size == 0 {
        return Err(Error::invalid("batch size must be >= 1"));
    }
    if batch_size > x.len() {
        return Err(Error::BatchTooLarge);
    }
    Ok(x.chunks_exact(batch_size)
        .map(|c| c.iter().sum::<f64>() / batch_size as f64)
        .collect())
}

/// Element `i` is the standard error of the mean of `x[0..=i]`; element 0 is 0.
pub fn standard_error_series(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::SeriesTooShort { required: 2, actual: x.len() });
    }
    // Welford's update keeps the prefix variances stable for long series.
    let mut out = Vec::with_capacity(x.len());
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let n = (i + 1) as f64;
        let delta = v - mean;
        mean += delta / n;
        m2 += delta * (v - mean);
        if i == 0 {
            out.push(0.0);
        } else {
            let var = (m2 / (n - 1.0)).max(0.0);
            out.push((var / n).sqrt());
        }
    }
    Ok(out)
}

/// Biased-estimator autocorrelation at lags `1..=max_lag`.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if n < max_lag + 2 {
        return Err(Error::SeriesTooShort { required: max_lag + 2, actual: n });
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let denom: f64 = centered.iter().map(|c| c * c).sum();
    if !(denom > 0.0) || denom <= 1e-24 * mean.abs().max(1.0).powi(2) * n as f64 {
        return Err(Error::DegenerateSeries);
    }
    Ok((1..=max_lag)
        .map(|k| {
            let num: f64 = centered.iter().zip(&centered[k..]).map(|(a, b)| a * b).sum();
            (num / denom).clamp(-1.0, 1.0)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceOptions {
    /// Defaults to `n / 20`.
    pub batch_size: Option<usize>,
    /// Defaults to `min(50, n / 4)`.
    pub max_lag: Option<usize>,
    /// Relative standard-error threshold.
    pub rel_tolerance: f64,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        ConvergenceOptions {
            batch_size: None,
            max_lag: None,
            rel_tolerance: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub running_mean: Vec<f64>,
    pub batch_size: usize,
    pub batch_means: Vec<f64>,
    pub standard_error: Vec<f64>,
    pub autocorrelation: Vec<f64>,
    pub final_mean: f64,
    pub final_standard_error: f64,
    /// Share of autocorrelations inside `±1.96/√n`.
    pub autocorrelation_in_band: f64,
    pub converged: bool,
}

pub fn assess_convergence(x: &[f64]) -> Result<ConvergenceReport> {
    assess_convergence_with(x, &ConvergenceOptions::default())
}

/// Converged when the final relative standard error is below the tolerance
/// and at least 90% of autocorrelations fall inside the white-noise band.
pub fn assess_convergence_with(x: &[f64], opts: &ConvergenceOptions) -> Result<ConvergenceReport> {
    let n = x.len();
    if n < MIN_CONVERGENCE_SAMPLES {
        return Err(Error::SeriesTooShort {
            required: MIN_CONVERGENCE_SAMPLES,
            actual: n,
        });
    }
    let batch_size = opts.batch_size.unwrap_or(n / 20).max(1);
    let max_lag = opts.max_lag.unwrap_or_else(|| 50.min(n / 4));

    let running = running_mean(x)?;
    let batches = batch_means(x, batch_size)?;
    let se = standard_error_series(x)?;
    let acf = autocorrelation(x, max_lag)?;

    let (final_mean, _) = mean_and_std(x);
    let final_se = *se.last().expect("n >= 2");
    let band = 1.96 / (n as f64).sqrt();
    let in_band = acf.iter().filter(|r| r.abs() <= band).count() as f64 / acf.len().max(1) as f64;
    let rel_ok = final_mean != 0.0 && final_se / final_mean.abs() < opts.rel_tolerance;

    Ok(ConvergenceReport {
        running_mean: running,
        batch_size,
        batch_means: batches,
        standard_error: se,
        autocorrelation: acf,
        final_mean,
        final_standard_error: final_se,
        autocorrelation_in_band: in_band,
        converged: rel_ok && in_band >= 0.9,
    })
}
