//! Invariant-measure tail analysis from a single long ergodic trajectory.
//!
//! After a burn-in the trajectory samples ‖X_t‖² at a fixed thinning
//! interval; the empirical log survival log P̂(‖X‖² > r) is fitted linearly
//! in r over a threshold window defined by sample quantiles. An exponential
//! tail shows up as a strictly negative slope with high R².

use serde::{Deserialize, Serialize};

use super::stats::linear_fit;
use crate::dynamics::{simulate_visit, SimConfig, Stepper};
use crate::error::SimError;
use crate::noise::NoisePath;
use crate::Field;

/// Steps per noise segment of the long run (segments are indexed as path
/// indices of the same master seed).
const SEGMENT_STEPS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailConfig {
    /// Model-time burn-in; must be at least 10 (the relaxation rate is at
    /// least π², so this is generous).
    pub burn_in: f64,
    /// Model time over which samples are collected after burn-in.
    pub sample_horizon: f64,
    /// Sampling interval (a multiple of dt).
    pub thinning: f64,
    /// Lower quantile of the threshold window.
    pub q_lo: f64,
    /// Upper quantile of the threshold window.
    pub q_hi: f64,
    /// Number of thresholds, uniform in r across the window.
    pub thresholds: usize,
}

impl TailConfig {
    /// Window covering the central 99% of samples, 40 thresholds.
    pub fn central99(burn_in: f64, sample_horizon: f64, thinning: f64) -> Self {
        Self { burn_in, sample_horizon, thinning, q_lo: 0.005, q_hi: 0.995, thresholds: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFit {
    pub thresholds: Vec<f64>,
    /// log P̂(‖X‖² > r_i); survival estimates are monotone non-increasing.
    pub log_survival: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub samples: usize,
}

impl TailFit {
    /// Exponential-tail verdict: strictly negative slope with R² ≥ 0.9.
    pub fn exponential_tail(&self) -> bool {
        self.slope < 0.0 && self.r2 >= 0.9
    }
}

/// Samples ‖X_t‖² along a single trajectory from x₀ = 0 and fits the tail.
///
/// Rejects burn-in below 10 model-time units and runs yielding fewer than
/// 200 post-burn-in samples.
pub fn invariant_tail(cfg: &SimConfig, tail: &TailConfig, seed: u64) -> Result<TailFit, SimError> {
    if tail.burn_in < 10.0 {
        return Err(SimError::Estimator(format!(
            "burn-in must be at least 10 model-time units, got {}",
            tail.burn_in
        )));
    }
    if !(0.0 < tail.q_lo && tail.q_lo < tail.q_hi && tail.q_hi < 1.0) {
        return Err(SimError::Estimator("quantile window must satisfy 0 < q_lo < q_hi < 1".into()));
    }
    if tail.thresholds < 2 {
        return Err(SimError::Estimator("need at least two thresholds".into()));
    }
    let thin_every = (tail.thinning / cfg.dt).round() as usize;
    if thin_every == 0 || (tail.thinning - thin_every as f64 * cfg.dt).abs() > 1e-9 * cfg.dt {
        return Err(SimError::Estimator(format!(
            "thinning = {} must be a multiple of dt = {}",
            tail.thinning, cfg.dt
        )));
    }
    let expected = (tail.sample_horizon / tail.thinning).floor() as usize;
    if expected < 200 {
        return Err(SimError::Estimator(format!(
            "fewer than 200 post-burn-in samples ({expected}); extend the horizon or thin less"
        )));
    }

    let total_steps = ((tail.burn_in + tail.sample_horizon) / cfg.dt).round() as usize;
    let burn_steps = (tail.burn_in / cfg.dt).round() as usize;
    let mut samples = Vec::with_capacity(expected + 1);
    let mut state = Field::zeros(cfg.n());
    let mut global_step = 0usize;
    let mut segment = 0u64;
    while global_step < total_steps {
        let steps = SEGMENT_STEPS.min(total_steps - global_step);
        let seg_cfg = SimConfig { horizon: steps as f64 * cfg.dt, ..*cfg };
        let stepper = Stepper::new(&seg_cfg);
        let noise = NoisePath::generate(seed, segment, cfg.dt, steps, cfg.n());
        let start = global_step;
        let mut last = state.clone();
        simulate_visit(&stepper, &state, &noise, None, |m, _, x| {
            if m == 0 {
                return;
            }
            let step = start + m;
            if step > burn_steps && (step - burn_steps) % thin_every == 0 {
                samples.push(x.l2_norm().powi(2));
            }
            if m == steps {
                last = x.clone();
            }
        })?;
        state = last;
        global_step += steps;
        segment += 1;
    }
    if samples.len() < 200 {
        return Err(SimError::Estimator(format!(
            "fewer than 200 post-burn-in samples realized ({})",
            samples.len()
        )));
    }

    let mut sorted = samples.clone();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let quantile = |q: f64| -> f64 {
        let idx = ((sorted.len() as f64 - 1.0) * q).round() as usize;
        sorted[idx]
    };
    let lo = quantile(tail.q_lo);
    let hi = quantile(tail.q_hi);
    if !(hi > lo) {
        return Err(SimError::Estimator("degenerate threshold window".into()));
    }
    let nf = sorted.len() as f64;
    let mut thresholds = Vec::with_capacity(tail.thresholds);
    let mut log_survival = Vec::with_capacity(tail.thresholds);
    for i in 0..tail.thresholds {
        let r = lo + (hi - lo) * i as f64 / (tail.thresholds - 1) as f64;
        // Count of samples strictly above r via binary search on the sorted copy.
        let above = sorted.len() - sorted.partition_point(|&v| v <= r);
        if above == 0 {
            continue;
        }
        thresholds.push(r);
        log_survival.push((above as f64 / nf).ln());
    }
    let (slope, intercept, r2) = linear_fit(&thresholds, &log_survival);
    Ok(TailFit { thresholds, log_survival, slope, intercept, r2, samples: samples.len() })
}
