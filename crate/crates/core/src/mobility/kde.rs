//! Gaussian kernel density estimation with leave-one-out likelihood
//! cross-validated bandwidth.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_KDE_SAMPLES: usize = 5;
pub const DEFAULT_GRID_SIZE: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianKde {
    samples: Vec<f64>,
    bandwidth: f64,
}

impl GaussianKde {
    pub fn new(samples: Vec<f64>, bandwidth: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("no KDE samples".into()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("KDE samples must be finite"));
        }
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::invalid(format!("bandwidth {bandwidth} must be positive")));
        }
        Ok(GaussianKde { samples, bandwidth })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn density(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let norm = 1.0 / (self.samples.len() as f64 * h * (2.0 * PI).sqrt());
        norm * self
            .samples
            .iter()
            .map(|s| (-0.5 * ((x - s) / h).powi(2)).exp())
            .sum::<f64>()
    }

    /// Density on `n` evenly spaced points covering the sample range
    /// padded by `pad_bandwidths` bandwidths on each side.
    pub fn evaluate_grid(&self, n: usize, pad_bandwidths: f64) -> Vec<(f64, f64)> {
        let lo = self.samples.iter().copied().fold(f64::INFINITY, f64::min)
            - pad_bandwidths * self.bandwidth;
        let hi = self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            + pad_bandwidths * self.bandwidth;
        let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
        (0..n)
            .map(|i| {
                let x = lo + step * i as f64;
                (x, self.density(x))
            })
            .collect()
    }
}

/// Mean leave-one-out log-likelihood of `samples` at bandwidth `h`.
pub fn loo_log_likelihood(samples: &[f64], h: f64) -> f64 {
    let n = samples.len();
    let norm = ((n - 1) as f64 * h * (2.0 * PI).sqrt()).ln();
    samples
        .iter()
        .enumerate()
        .map(|(i, xi)| {
            let s: f64 = samples
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, xj)| (-0.5 * ((xi - xj) / h).powi(2)).exp())
                .sum();
            s.ln() - norm
        })
        .sum::<f64>()
        / n as f64
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Candidate bandwidths spanning 1/100 to 2 times the sample spread
/// (the smaller of the standard deviation and IQR/1.34).
pub fn default_bandwidth_grid(samples: &[f64]) -> Vec<f64> {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (sorted.len() - 1) as f64;
        let (i, f) = (pos.floor() as usize, pos.fract());
        sorted[i] + f * (sorted[(i + 1).min(sorted.len() - 1)] - sorted[i])
    };
    let iqr = (q(0.75) - q(0.25)) / 1.34;
    let spread = [sd, iqr]
        .into_iter()
        .filter(|v| *v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let spread = if spread.is_finite() { spread } else { 1e-3 };
    log_spaced(spread / 100.0, spread * 2.0, DEFAULT_GRID_SIZE)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub kde: GaussianKde,
    /// `(bandwidth, mean LOO log-likelihood)` per candidate.
    pub scores: Vec<(f64, f64)>,
}

/// Fit a Gaussian KDE whose bandwidth maximises the mean leave-one-out
/// log-likelihood over `candidates` (ties go to the smaller bandwidth).
pub fn kde_cross_validated(samples: &[f64], candidates: &[f64]) -> Result<CvResult> {
    if samples.len() < MIN_KDE_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_KDE_SAMPLES,
            got: samples.len(),
        });
    }
    if candidates.is_empty() || candidates.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        return Err(Error::invalid("bandwidth candidates must be positive and finite"));
    }
    let scores: Vec<(f64, f64)> = candidates
        .par_iter()
        .map(|&h| (h, loo_log_likelihood(samples, h)))
        .collect();
    let mut best: Option<(f64, f64)> = None;
    for &(h, ll) in &scores {
        let better = match best {
            None => true,
            Some((bh, bll)) => ll > bll || (ll == bll && h < bh) || bll.is_nan(),
        };
        if better && !ll.is_nan() {
            best = Some((h, ll));
        }
    }
    let (h, _) = best.ok_or_else(|| Error::invalid("no bandwidth produced a finite likelihood"))?;
    Ok(CvResult {
        kde: GaussianKde::new(samples.to_vec(), h)?,
        scores,
    })
}

/// KDE of radius-of-gyration values (km). In log space the density is over
/// `log10(r_g)`; non-positive radii are dropped there.
pub fn rg_kde(rg_km: &[f64], log_space: bool) -> Result<CvResult> {
    let values: Vec<f64> = if log_space {
        rg_km.iter().filter(|v| **v > 0.0).map(|v| v.log10()).collect()
    } else {
        rg_km.to_vec()
    };
    if values.len() < MIN_KDE_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_KDE_SAMPLES,
            got: values.len(),
        });
    }
    kde_cross_validated(&values, &default_bandwidth_grid(&values))
}
