//! Semigroup gradient estimators.
//!
//! The Bismut–Elworthy–Li representation for the Galerkin semigroup,
//!
//! ```text
//! D_h P_t φ(x) = (1/t) E[ φ(X_t) ∫₀ᵗ ⟨(−A)^{−γ} η_s, dW_s⟩ ],
//! ```
//!
//! needs no smoothness of φ; the stochastic integral is discretized with the
//! left-point (Itô-adapted) rule over the same increments that drive X, which
//! keeps the discrete integral a martingale. A CRN central finite difference
//! of P_tφ doubles as the independent oracle.

use serde::{Deserialize, Serialize};

use super::stats::mean_and_se;
use crate::dynamics::{derivative_flow_with, simulate_path_with, SimConfig, Stepper};
use crate::error::SimError;
use crate::exec::Workers;
use crate::spectral::eigenvalue;
use crate::Field;

/// Bounded test functionals with ‖φ‖_∞ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phi", rename_all = "kebab-case")]
pub enum TestFunctional {
    /// φ(x) = exp(−‖x‖²_{L²}).
    ExpNegL2Sq,
    /// φ ≡ 1.
    One,
    /// Smooth cylindrical functional of the first j modes: cos(x_1 + … + x_j).
    FirstModesCos { j: usize },
}

impl TestFunctional {
    pub fn eval(&self, x: &Field) -> f64 {
        match self {
            TestFunctional::ExpNegL2Sq => (-x.l2_norm().powi(2)).exp(),
            TestFunctional::One => 1.0,
            TestFunctional::FirstModesCos { j } => {
                x.coeffs().iter().take(*j).sum::<f64>().cos()
            }
        }
    }
}

/// A gradient evaluation request: direction h must be L²-normalized and the
/// evaluation time must lie on the grid within (0, horizon].
#[derive(Debug, Clone, PartialEq)]
pub struct GradientQuery {
    pub x: Field,
    pub h: Field,
    pub t: f64,
    pub phi: TestFunctional,
}

impl GradientQuery {
    fn validate(&self, cfg: &SimConfig) -> Result<usize, SimError> {
        if self.t <= 0.0 {
            return Err(SimError::Estimator("gradient evaluation needs t > 0".into()));
        }
        if self.t > cfg.horizon * (1.0 + 1e-12) {
            return Err(SimError::Estimator(format!(
                "t = {} beyond the horizon {}",
                self.t, cfg.horizon
            )));
        }
        let m = (self.t / cfg.dt).round() as usize;
        if (self.t - m as f64 * cfg.dt).abs() > 1e-9 * cfg.dt || m == 0 {
            return Err(SimError::Estimator(format!(
                "t = {} does not lie on the time grid (dt = {})",
                self.t, cfg.dt
            )));
        }
        let norm = self.h.l2_norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(SimError::Estimator(format!(
                "direction must be L²-normalized, got ‖h‖ = {norm}"
            )));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientEstimate {
    pub value: f64,
    pub std_error: f64,
    pub paths: u64,
}

impl GradientEstimate {
    /// Half-width 1.96·SE of the 95% confidence interval.
    pub fn ci_half_width(&self) -> f64 {
        1.96 * self.std_error
    }

    pub fn overlaps(&self, other: &GradientEstimate) -> bool {
        (self.value - other.value).abs() <= self.ci_half_width() + other.ci_half_width()
    }
}

/// Bismut–Elworthy–Li estimator of D_h P_tφ(x).
///
/// Per path the derivative flow η is integrated along X and the stochastic
/// integral Σ_m ⟨(−A)^{−γ} η_{t_m}, Δβ_m⟩ accumulated with the left-point
/// rule; the estimator value is φ(X_t)·integral/t. Exactly linear in h at
/// the per-path level.
pub fn bel_gradient(
    query: &GradientQuery,
    cfg: &SimConfig,
    paths: u64,
    seed: u64,
    workers: &Workers,
) -> Result<GradientEstimate, SimError> {
    let m_t = query.validate(cfg)?;
    let stepper = Stepper::new(cfg);
    let n = cfg.n();
    let inv_pow: Vec<f64> = (1..=n).map(|k| eigenvalue::<f64>(k).powf(-cfg.gamma)).collect();
    let values: Result<Vec<f64>, SimError> = workers
        .run(paths, |i| {
            let noise = cfg.noise(seed, i);
            let path = simulate_path_with(&stepper, &query.x, &noise, None)?;
            let eta = derivative_flow_with(&stepper, &path, &query.h)?;
            let mut integral = 0.0;
            for m in 0..m_t {
                let db = noise.step_increments(m);
                let coeffs = eta.path[m].coeffs();
                let mut dot = 0.0;
                for k in 0..n {
                    dot += inv_pow[k] * coeffs[k] * db[k];
                }
                integral += dot;
            }
            Ok(query.phi.eval(&path.fields[m_t]) * integral / query.t)
        })
        .into_iter()
        .collect();
    let values = values?;
    let (value, std_error) = mean_and_se(&values);
    Ok(GradientEstimate { value, std_error, paths })
}

/// CRN central finite difference (P_tφ(x+εh) − P_tφ(x−εh))/(2ε): both
/// trajectories consume the identical noise path.
pub fn fd_semigroup_gradient(
    query: &GradientQuery,
    cfg: &SimConfig,
    eps: f64,
    paths: u64,
    seed: u64,
    workers: &Workers,
) -> Result<GradientEstimate, SimError> {
    assert!(eps > 0.0, "finite-difference step must be positive");
    let m_t = query.validate(cfg)?;
    let stepper = Stepper::new(cfg);
    let plus = query.x.add_scaled(&query.h, eps);
    let minus = query.x.add_scaled(&query.h, -eps);
    let values: Result<Vec<f64>, SimError> = workers
        .run(paths, |i| {
            let noise = cfg.noise(seed, i);
            let up = simulate_path_with(&stepper, &plus, &noise, None)?;
            let down = simulate_path_with(&stepper, &minus, &noise, None)?;
            Ok((query.phi.eval(&up.fields[m_t]) - query.phi.eval(&down.fields[m_t])) / (2.0 * eps))
        })
        .into_iter()
        .collect();
    let values = values?;
    let (value, std_error) = mean_and_se(&values);
    Ok(GradientEstimate { value, std_error, paths })
}
