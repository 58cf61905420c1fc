//! Streaming, overflow-safe accumulator for log E[exp(G)].
//!
//! Values are stored relative to the running maximum, so exp never overflows
//! and merging two aggregates reproduces the aggregate of the union up to
//! round-off.

/// Number of batches used for batch-means standard errors.
pub const BATCH_COUNT: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct LogMeanExpAggregate {
    count: u64,
    running_max: f64,
    /// Σ exp(g_i − running_max).
    shifted_sum: f64,
    sum_g: f64,
    sum_g_sq: f64,
}

impl Default for LogMeanExpAggregate {
    fn default() -> Self {
        Self::new()
    }
}

impl LogMeanExpAggregate {
    pub fn new() -> Self {
        Self {
            count: 0,
            running_max: f64::NEG_INFINITY,
            shifted_sum: 0.0,
            sum_g: 0.0,
            sum_g_sq: 0.0,
        }
    }

    pub fn push(&mut self, g: f64) {
        assert!(g.is_finite(), "aggregate values must be finite");
        self.count += 1;
        self.sum_g += g;
        self.sum_g_sq += g * g;
        if g > self.running_max {
            self.shifted_sum = self.shifted_sum * (self.running_max - g).exp() + 1.0;
            self.running_max = g;
        } else {
            self.shifted_sum += (g - self.running_max).exp();
        }
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let m = self.running_max.max(other.running_max);
        self.shifted_sum = self.shifted_sum * (self.running_max - m).exp()
            + other.shifted_sum * (other.running_max - m).exp();
        self.running_max = m;
        self.count += other.count;
        self.sum_g += other.sum_g;
        self.sum_g_sq += other.sum_g_sq;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// log( (1/N) Σ exp g_i ), computed in the shifted representation.
    pub fn log_mean_exp(&self) -> f64 {
        assert!(self.count > 0, "empty aggregate");
        self.running_max + (self.shifted_sum / self.count as f64).ln()
    }

    pub fn mean(&self) -> f64 {
        assert!(self.count > 0, "empty aggregate");
        self.sum_g / self.count as f64
    }

    pub fn variance(&self) -> f64 {
        assert!(self.count > 1, "variance needs at least two values");
        let n = self.count as f64;
        ((self.sum_g_sq - self.sum_g * self.sum_g / n) / (n - 1.0)).max(0.0)
    }

    /// log-mean-exp minus the mean; nonnegative by Jensen.
    pub fn jensen_gap(&self) -> f64 {
        self.log_mean_exp() - self.mean()
    }
}

/// Point estimate and batch-means standard error of log-mean-exp over a
/// sample, with `batches` contiguous batches (robust to the heavy right tail
/// of exp(G)).
pub fn batch_log_mean_exp(gs: &[f64], batches: usize) -> (f64, f64) {
    assert!(!gs.is_empty(), "empty sample");
    let mut total = LogMeanExpAggregate::new();
    for &g in gs {
        total.push(g);
    }
    let estimate = total.log_mean_exp();
    let b = batches.min(gs.len()).max(1);
    if b < 2 {
        return (estimate, 0.0);
    }
    let mut batch_estimates = Vec::with_capacity(b);
    let base = gs.len() / b;
    let extra = gs.len() % b;
    let mut start = 0;
    for i in 0..b {
        let len = base + usize::from(i < extra);
        let mut agg = LogMeanExpAggregate::new();
        for &g in &gs[start..start + len] {
            agg.push(g);
        }
        batch_estimates.push(agg.log_mean_exp());
        start += len;
    }
    let mean: f64 = batch_estimates.iter().sum::<f64>() / b as f64;
    let var: f64 =
        batch_estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (b as f64 - 1.0);
    (estimate, (var / b as f64).sqrt())
}

/// Fraction of the Σ exp mass carried by the top `frac` of paths
/// (the standard instability diagnostic for exponential-moment Monte Carlo).
pub fn heaviness_top_share(gs: &[f64], frac: f64) -> f64 {
    assert!(!gs.is_empty() && frac > 0.0 && frac <= 1.0);
    let max = gs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut weights: Vec<f64> = gs.iter().map(|&g| (g - max).exp()).collect();
    weights.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let top = ((gs.len() as f64 * frac).ceil() as usize).max(1);
    let top_sum: f64 = weights[..top].iter().sum();
    let total: f64 = weights.iter().sum();
    top_sum / total
}
