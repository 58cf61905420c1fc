//! Variational (Boué–Dupuis) checks: for every admissible control u,
//!
//! ```text
//! E[G(X^u) − ½‖u‖²_{L²_t L²_ξ}]  ≤  log E[exp G(X⁰)],
//! ```
//!
//! with equality attained over the full predictable class. Deterministic
//! open-loop controls certify the inequality direction; for the quadratic
//! terminal functional on the linear system the optimizer is a linear state
//! feedback computed from a per-mode Riccati equation in closed form, which
//! closes the duality gap and serves as the quantitative oracle.

use serde::Serialize;

use super::aggregate::{batch_log_mean_exp, BATCH_COUNT};
use super::stats::mean_and_se;
use super::{FunctionalKind, PathFunctional};
use crate::dynamics::{simulate_path_with, ControlFunction, ControlLaw, Nonlinearity, SimConfig, Stepper};
use crate::error::SimError;
use crate::exec::Workers;
use crate::spectral::eigenvalue;
use crate::Field;

/// Linear state feedback u_k(t, x) = gain[m][k] · x_k on the time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LqControl {
    gains: Vec<Vec<f64>>,
}

impl ControlLaw for LqControl {
    fn value(&self, step: usize, _t: f64, x: &Field) -> Field {
        let g = &self.gains[step];
        Field::from_coeffs(x.coeffs().iter().zip(g).map(|(&xk, &gk)| gk * xk).collect())
    }
}

/// Riccati solution for sup_u E[λ‖X_T‖² − ½‖u‖²] on the linear system
/// dX_k = (−α_k X_k + c_k u_k) dt + c_k dβ_k with c_k = α_k^γ.
///
/// Per mode, p_k(t) = 1/q_k(t) with
/// q_k(t) = e^{2α_k(T−t)}/λ − (c_k²/α_k)(e^{2α_k(T−t)} − 1), the optimal
/// feedback is u*_k = 2 c_k p_k(t) X_k, and the value at x₀ is
/// Σ p_k(0) x₀_k² + ∫₀ᵀ Σ c_k² p_k(t) dt.
///
/// Returns the feedback law on the grid and the value at x₀ = 0. λ at or
/// beyond the terminal-time critical value is rejected.
pub fn lq_oracle(cfg: &SimConfig, lambda: f64) -> Result<(LqControl, f64), SimError> {
    if lambda <= 0.0 {
        return Err(SimError::Estimator("the LQ oracle needs lambda > 0".into()));
    }
    let n = cfg.n();
    let horizon = cfg.horizon;
    let critical = super::critical_lambda(cfg.gamma, 0.0, n, horizon);
    if lambda >= critical {
        return Err(SimError::LambdaBeyondCritical { lambda, critical });
    }
    let steps = cfg.steps();
    // p_k(t) = d/(A + βd) with d = e^{−2α_k(T−t)} and A = 1/λ − β; the
    // denominator equals (1 − 2λσ_k²(T−t))/λ > 0 below the critical λ, and
    // d ≤ 1 keeps everything finite for stiff modes.
    let p_at = |k: usize, t: f64| -> f64 {
        let ak = eigenvalue::<f64>(k);
        let beta = ak.powf(2.0 * cfg.gamma) / ak;
        let a = 1.0 / lambda - beta;
        let d = (-2.0 * ak * (horizon - t)).exp();
        let q = a + beta * d;
        debug_assert!(q > 0.0, "Riccati solution left the admissible region");
        d / q
    };
    let mut gains = Vec::with_capacity(steps);
    for m in 0..steps {
        let t = m as f64 * cfg.dt;
        gains.push(
            (1..=n)
                .map(|k| 2.0 * eigenvalue::<f64>(k).powf(cfg.gamma) * p_at(k, t))
                .collect(),
        );
    }
    // ∫₀ᵀ c_k² p_k dt: substituting d = e^{−2α_k(T−t)} gives
    // (c²/2α_k) ∫_{d_T}^{1} dd/(A+βd) = ½ ln((A+β)/(A+β d_T)).
    let mut value_at_zero = 0.0;
    for k in 1..=n {
        let ak = eigenvalue::<f64>(k);
        let beta = ak.powf(2.0 * cfg.gamma) / ak;
        let a = 1.0 / lambda - beta;
        let d_t = (-2.0 * ak * horizon).exp();
        value_at_zero += 0.5 * ((a + beta) / (a + beta * d_t)).ln();
    }
    Ok((LqControl { gains }, value_at_zero))
}

/// A control to test against the variational inequality.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlSpec {
    Zero,
    OpenLoop { label: String, control: ControlFunction },
    /// The Riccati feedback for the configured functional scale (linear
    /// dynamics only).
    LqOracle,
}

impl ControlSpec {
    fn label(&self) -> String {
        match self {
            ControlSpec::Zero => "zero".into(),
            ControlSpec::OpenLoop { label, .. } => label.clone(),
            ControlSpec::LqOracle => "lq-oracle".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlOutcome {
    pub label: String,
    /// Monte Carlo estimate of E[G(X^u) − ½‖u‖²].
    pub mean: f64,
    pub std_error: f64,
    /// mean ≤ baseline + 3 combined SE.
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationalReport {
    /// log-mean-exp estimate of G(X⁰) and its batch-means SE.
    pub baseline_estimate: f64,
    pub baseline_std_error: f64,
    pub outcomes: Vec<ControlOutcome>,
    pub best_label: String,
    pub best_bound: f64,
    /// baseline − best lower bound (≥ 0 up to noise).
    pub duality_gap: f64,
    /// Gap and combined SE for the LQ-oracle entry, when present.
    pub lq_gap: Option<(f64, f64)>,
    pub all_satisfied: bool,
}

/// Runs the Boué–Dupuis inequality check for a family of controls, all
/// coupled to the same driving noise (CRN across controls and baseline).
pub fn variational_check(
    cfg: &SimConfig,
    x0: &Field,
    functional: &PathFunctional,
    controls: &[ControlSpec],
    paths: u64,
    seed: u64,
    workers: &Workers,
) -> Result<VariationalReport, SimError> {
    assert!(
        !matches!(functional.kind, FunctionalKind::YDissipation { .. }),
        "the variational check drives X functionals"
    );
    if controls
        .iter()
        .any(|c| matches!(c, ControlSpec::LqOracle))
        && cfg.nonlinearity != Nonlinearity::Disabled
    {
        return Err(SimError::Estimator(
            "the LQ oracle control applies to the linear (nonlinearity-disabled) system".into(),
        ));
    }
    let stepper = Stepper::new(cfg);
    // Baseline: uncontrolled exponential moment.
    let base_values: Result<Vec<f64>, SimError> = workers
        .run(paths, |i| functional.value(&stepper, x0, &cfg.noise(seed, i)))
        .into_iter()
        .collect();
    let base_values = base_values?;
    let (baseline_estimate, baseline_std_error) = batch_log_mean_exp(&base_values, BATCH_COUNT);

    let mut outcomes = Vec::with_capacity(controls.len());
    let mut lq_gap = None;
    for spec in controls {
        let law: Box<dyn ControlLaw + Sync> = match spec {
            ControlSpec::Zero => Box::new(ControlFunction::zero(cfg)),
            ControlSpec::OpenLoop { control, .. } => Box::new(control.clone()),
            ControlSpec::LqOracle => Box::new(lq_oracle(cfg, functional.lambda)?.0),
        };
        let law_ref: &(dyn ControlLaw + Sync) = law.as_ref();
        let values: Result<Vec<f64>, SimError> = workers
            .run(paths, |i| {
                let noise = cfg.noise(seed, i);
                let path = simulate_path_with(&stepper, x0, &noise, Some(law_ref as &dyn ControlLaw))?;
                let mut cost = 0.0;
                for m in 0..cfg.steps() {
                    let u = law_ref.value(m, m as f64 * cfg.dt, &path.fields[m]);
                    cost += u.l2_norm().powi(2) * cfg.dt;
                }
                let raw = match functional.kind {
                    FunctionalKind::SupL2Sq => path.sup_l2_sq(),
                    FunctionalKind::TerminalL2Sq => path.terminal_l2_sq(),
                    FunctionalKind::Constant { value } => value,
                    FunctionalKind::YDissipation { .. } => unreachable!(),
                };
                Ok(functional.lambda * raw - 0.5 * cost)
            })
            .into_iter()
            .collect();
        let values = values?;
        let (mean, std_error) = mean_and_se(&values);
        let combined = (std_error.powi(2) + baseline_std_error.powi(2)).sqrt();
        let satisfied = mean <= baseline_estimate + 3.0 * combined;
        if matches!(spec, ControlSpec::LqOracle) {
            lq_gap = Some((baseline_estimate - mean, combined));
        }
        outcomes.push(ControlOutcome { label: spec.label(), mean, std_error, satisfied });
    }
    let best = outcomes
        .iter()
        .max_by(|a, b| a.mean.partial_cmp(&b.mean).unwrap())
        .expect("at least one control");
    Ok(VariationalReport {
        baseline_estimate,
        baseline_std_error,
        best_label: best.label.clone(),
        best_bound: best.mean,
        duality_gap: baseline_estimate - best.mean,
        all_satisfied: outcomes.iter().all(|o| o.satisfied),
        outcomes,
        lq_gap,
    })
}
