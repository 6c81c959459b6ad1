//! Exact Gaussian-process regression on the unit square.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::{Error, Result};

const LENGTH_SCALES: [f64; 8] = [0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.2, 2.0];
const SIGNAL_VARIANCES: [f64; 3] = [0.5, 1.0, 2.0];
const NOISE_FLOOR: f64 = 1e-8;
const MAX_JITTER: f64 = 1e-4;

/// Squared-exponential kernel with one length-scale per input dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kernel {
    pub length_scales: [f64; 2],
    pub signal_variance: f64,
}

impl Kernel {
    pub fn eval(&self, a: &[f64; 2], b: &[f64; 2]) -> f64 {
        let d0 = (a[0] - b[0]) / self.length_scales[0];
        let d1 = (a[1] - b[1]) / self.length_scales[1];
        self.signal_variance * (-0.5 * (d0 * d0 + d1 * d1)).exp()
    }
}

/// A fitted GP posterior over standardized values.
#[derive(Debug, Clone)]
pub struct GpSurrogate {
    inputs: Vec<[f64; 2]>,
    y_mean: f64,
    y_scale: f64,
    kernel: Kernel,
    noise: f64,
    jitter: f64,
    /// Row-major lower Cholesky factor of `K + (noise + jitter)·I`.
    lower: Vec<f64>,
    alpha: Vec<f64>,
    log_marginal_likelihood: f64,
}

/// Fits a GP, choosing kernel hyperparameters by maximum log marginal
/// likelihood over a fixed grid of length-scales and signal variances.
///
/// `noise` is the observation-noise variance in the units of `values`.
pub fn gp_fit(points: &[[f64; 2]], values: &[f64], noise: f64) -> Result<GpSurrogate> {
    let mut best: Option<GpSurrogate> = None;
    let mut last_err = None;
    for &l0 in &LENGTH_SCALES {
        for &l1 in &LENGTH_SCALES {
            for &sv in &SIGNAL_VARIANCES {
                let kernel = Kernel {
                    length_scales: [l0, l1],
                    signal_variance: sv,
                };
                match gp_fit_with_kernel(points, values, noise, kernel) {
                    Ok(gp) => {
                        if best
                            .as_ref()
                            .is_none_or(|b| gp.log_marginal_likelihood > b.log_marginal_likelihood)
                        {
                            best = Some(gp);
                        }
                    }
                    Err(e) => last_err = Some(e),
                }
            }
        }
    }
    best.ok_or_else(|| last_err.unwrap_or(Error::SingularKernel(MAX_JITTER)))
}

/// Fits a GP with fixed kernel hyperparameters.
pub fn gp_fit_with_kernel(
    points: &[[f64; 2]],
    values: &[f64],
    noise: f64,
    kernel: Kernel,
) -> Result<GpSurrogate> {
    let n = points.len();
    if n < 2 || values.len() != n {
        return Err(Error::invalid("gp_fit needs at least two points with one value each"));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::invalid("noise variance must be >= 0"));
    }
    let y_mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let y_scale = if var > 0.0 { var.sqrt() } else { 1.0 };
    let y: Vec<f64> = values.iter().map(|v| (v - y_mean) / y_scale).collect();
    let noise = (noise / (y_scale * y_scale)).max(NOISE_FLOOR);

    let gram = DMatrix::from_fn(n, n, |i, j| kernel.eval(&points[i], &points[j]));
    let mut jitter = 0.0;
    let chol = loop {
        let m = &gram + DMatrix::identity(n, n) * (noise + jitter);
        if let Some(c) = m.cholesky() {
            break c;
        }
        jitter = if jitter == 0.0 { 1e-10 } else { jitter * 10.0 };
        if jitter > MAX_JITTER {
            return Err(Error::SingularKernel(jitter));
        }
    };
    let alpha = chol.solve(&DVector::from_column_slice(&y));
    let l = chol.l();
    let log_det_half: f64 = (0..n).map(|i| l[(i, i)].ln()).sum();
    let fit: f64 = y.iter().zip(alpha.iter()).map(|(a, b)| a * b).sum();
    let log_marginal_likelihood =
        -0.5 * fit - log_det_half - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();

    let mut lower = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            lower[i * n + j] = l[(i, j)];
        }
    }
    Ok(GpSurrogate {
        inputs: points.to_vec(),
        y_mean,
        y_scale,
        kernel,
        noise,
        jitter,
        lower,
        alpha: alpha.iter().copied().collect(),
        log_marginal_likelihood,
    })
}

impl GpSurrogate {
    /// Posterior mean and variance in standardized units.
    pub fn predict_standardized(&self, x: [f64; 2]) -> (f64, f64) {
        let n = self.inputs.len();
        let k: Vec<f64> = self.inputs.iter().map(|p| self.kernel.eval(p, &x)).collect();
        let mean = k.iter().zip(&self.alpha).map(|(a, b)| a * b).sum();
        // v = L⁻¹ k by forward substitution; var = k(x,x) − vᵀv.
        let mut v = vec![0.0; n];
        for i in 0..n {
            let row = &self.lower[i * n..i * n + i];
            let s: f64 = row.iter().zip(&v[..i]).map(|(a, b)| a * b).sum();
            v[i] = (k[i] - s) / self.lower[i * n + i];
        }
        let var = self.kernel.signal_variance - v.iter().map(|a| a * a).sum::<f64>();
        (mean, var.max(0.0))
    }

    /// Posterior mean and standard deviation in the units of the training values.
    pub fn predict(&self, x: [f64; 2]) -> (f64, f64) {
        let (m, v) = self.predict_standardized(x);
        (self.y_mean + self.y_scale * m, self.y_scale * v.sqrt())
    }

    /// Converts a value from training units to standardized units.
    pub fn standardize(&self, value: f64) -> f64 {
        (value - self.y_mean) / self.y_scale
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// Observation noise plus any jitter, in standardized units.
    pub fn noise(&self) -> f64 {
        self.noise + self.jitter
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        self.log_marginal_likelihood
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}
