//! Monte Carlo estimation layer: overflow-safe exponential moments,
//! variational (Boué–Dupuis) checks, Bismut–Elworthy–Li gradients,
//! Lipschitz-regularization probes, and invariant-measure tail analysis.

mod aggregate;
mod gradient;
mod lipschitz;
mod moments;
mod stats;
mod tail;
mod variational;

pub use aggregate::{batch_log_mean_exp, heaviness_top_share, LogMeanExpAggregate, BATCH_COUNT};
pub use gradient::{bel_gradient, fd_semigroup_gradient, GradientEstimate, GradientQuery, TestFunctional};
pub use lipschitz::{lipschitz_probe, LipschitzReport, LipschitzRow};
pub use moments::{critical_lambda, exp_moment, lambda_scan, linear_oracle_moment, ExpMomentResult, LambdaScanRow};
pub use stats::{linear_fit, mean_and_se};
pub use tail::{invariant_tail, TailConfig, TailFit};
pub use variational::{lq_oracle, variational_check, ControlOutcome, ControlSpec, LqControl, VariationalReport};

use serde::{Deserialize, Serialize};

use crate::dynamics::{decompose_y, simulate_path_with, simulate_visit, SimConfig, Stepper};
use crate::error::SimError;
use crate::exec::Workers;
use crate::noise::NoisePath;
use crate::Field;

/// Path functionals G whose exponential moments are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FunctionalKind {
    /// sup over the time grid of ‖X_t‖²_{L²}.
    SupL2Sq,
    /// ‖X_T‖²_{L²} at the terminal time.
    TerminalL2Sq,
    /// ∫₀ᵀ ‖∇Y^α_s‖²_{L²} ds for the remainder Y = X − z_α, α ≥ 1.
    YDissipation { alpha: f64 },
    /// A constant (bounded test functional for the variational machinery).
    Constant { value: f64 },
}

/// A scaled path functional λ·G.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathFunctional {
    pub kind: FunctionalKind,
    pub lambda: f64,
}

impl PathFunctional {
    pub fn new(kind: FunctionalKind, lambda: f64) -> Self {
        assert!(lambda.is_finite(), "scale must be finite");
        if let FunctionalKind::YDissipation { alpha } = kind {
            assert!(alpha >= 1.0, "the dissipation functional requires alpha >= 1");
        }
        Self { kind, lambda }
    }

    /// The unscaled value G on one realized path.
    pub fn raw(&self, stepper: &Stepper, x0: &Field, noise: &NoisePath) -> Result<f64, SimError> {
        let cfg = &stepper.cfg;
        match self.kind {
            FunctionalKind::Constant { value } => Ok(value),
            FunctionalKind::SupL2Sq => {
                let mut sup = 0.0f64;
                simulate_visit(stepper, x0, noise, None, |_, _, x| {
                    sup = sup.max(x.l2_norm().powi(2));
                })?;
                Ok(sup)
            }
            FunctionalKind::TerminalL2Sq => {
                let mut last = 0.0;
                simulate_visit(stepper, x0, noise, None, |_, _, x| {
                    last = x.l2_norm().powi(2);
                })?;
                Ok(last)
            }
            FunctionalKind::YDissipation { alpha } => {
                let path = simulate_path_with(stepper, x0, noise, None)?;
                Ok(decompose_y(&path, alpha, noise, cfg)?.dissipation)
            }
        }
    }

    /// λ·G on one realized path.
    pub fn value(&self, stepper: &Stepper, x0: &Field, noise: &NoisePath) -> Result<f64, SimError> {
        Ok(self.lambda * self.raw(stepper, x0, noise)?)
    }
}

/// Unscaled per-path functional values for paths 0..paths (index order).
pub(crate) fn path_raws(
    cfg: &SimConfig,
    x0: &Field,
    kind: FunctionalKind,
    paths: u64,
    seed: u64,
    workers: &Workers,
) -> Result<Vec<f64>, SimError> {
    let stepper = Stepper::new(cfg);
    let functional = PathFunctional::new(kind, 1.0);
    let results = workers.run(paths, |i| {
        let noise = cfg.noise(seed, i);
        functional.raw(&stepper, x0, &noise)
    });
    results.into_iter().collect()
}
