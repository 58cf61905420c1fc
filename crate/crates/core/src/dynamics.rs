//! Time integration of the Galerkin Burgers system, its shifted remainder
//! Y = X − z_α, the controlled system, and the derivative flow.
//!
//! One exponential-Euler step of
//! dX = (AX + B_n(X) + π_n(−A)^γ u) dt + π_n(−A)^γ dW reads, per mode,
//!
//! ```text
//! X⁺_k = e^{−α_k dt} X_k + φ₁(α_k dt) dt (B_n(X)_k + α_k^γ u_k)
//!        + α_k^γ e^{−α_k dt/2} Δβ_k,
//! ```
//!
//! with φ₁(z) = (1−e^{−z})/z. The linear flow is exact, the drift carries the
//! φ₁ weight, and the noise carries the midpoint weight shared with the
//! z_α update in [`crate::noise`], so X − z is the exact discrete remainder
//! driven by the same Wiener path.

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, SimError};
use crate::noise::{midpoint_noise_weight, ou_decay, ou_path, NoisePath, OuState};
use crate::spectral::{eigenvalue, BasisSpec, SineBasis};
use crate::Field;

/// Time stepping scheme (exponential Euler is the only implemented member).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    ExponentialEuler,
}

/// Whether the quadratic drift is active; `Disabled` gives the linear
/// stochastic heat equation used by the analytic oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Nonlinearity {
    #[default]
    Full,
    Disabled,
}

/// Full experiment parameterization of one trajectory family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Noise color γ ∈ [0, 1/4).
    pub gamma: f64,
    pub basis: BasisSpec,
    pub dt: f64,
    /// Horizon T; dt must divide it into an integer number of steps.
    pub horizon: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
}

impl SimConfig {
    pub fn new(gamma: f64, basis: BasisSpec, dt: f64, horizon: f64) -> Result<Self, ConfigError> {
        let cfg = Self { gamma, basis, dt, horizon, scheme: Scheme::default(), nonlinearity: Nonlinearity::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..0.25).contains(&self.gamma) {
            return Err(ConfigError::GammaOutOfRange(self.gamma));
        }
        if !(self.dt > 0.0 && self.horizon > 0.0) {
            return Err(ConfigError::Invalid("dt and horizon must be positive".into()));
        }
        let steps = self.horizon / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) || steps.round() < 1.0 {
            return Err(ConfigError::NonIntegerSteps { dt: self.dt, horizon: self.horizon });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// Fresh noise for this grid.
    pub fn noise(&self, seed: u64, path_index: u64) -> NoisePath {
        NoisePath::generate(seed, path_index, self.dt, self.steps(), self.n())
    }

    pub fn zero_noise(&self) -> NoisePath {
        NoisePath::zeros(self.dt, self.steps(), self.n())
    }
}

/// Named initial conditions expanded analytically to n modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case")]
pub enum InitialCondition {
    Zero,
    /// The basis vector e_k.
    Mode { k: usize },
    /// f(ξ) = ξ, whose sine coefficients are √2 (−1)^{k+1}/(kπ).
    Sawtooth,
    /// Explicit coefficients (padded or truncated to n).
    Coeffs { coeffs: Vec<f64> },
}

impl InitialCondition {
    pub fn realize(&self, n: usize) -> Field {
        match self {
            InitialCondition::Zero => Field::zeros(n),
            InitialCondition::Mode { k } => Field::basis_vector(n, *k),
            InitialCondition::Sawtooth => Field::from_coeffs(
                (1..=n)
                    .map(|k| {
                        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                        2.0f64.sqrt() * sign / (k as f64 * std::f64::consts::PI)
                    })
                    .collect(),
            ),
            InitialCondition::Coeffs { coeffs } => Field::from_coeffs(coeffs.clone()).resized(n),
        }
    }
}

/// A control u(t, x) with values in the first n modes, evaluated on the time
/// grid. Deterministic open-loop controls ignore the state.
pub trait ControlLaw {
    fn value(&self, step: usize, t: f64, x: &Field) -> Field;
}

/// Deterministic open-loop control: one field per grid step (value on
/// [t_m, t_{m+1})).
#[derive(Debug, Clone, PartialEq)]
pub struct ControlFunction {
    pub values: Vec<Field>,
}

impl ControlFunction {
    pub fn zero(cfg: &SimConfig) -> Self {
        Self { values: vec![Field::zeros(cfg.n()); cfg.steps()] }
    }

    /// ‖u‖²_{L²_t L²_ξ} = Σ_m ‖u(t_m)‖² dt.
    pub fn l2t_l2x_sq(&self, dt: f64) -> f64 {
        self.values.iter().map(|u| u.l2_norm().powi(2) * dt).sum()
    }
}

impl ControlLaw for ControlFunction {
    fn value(&self, step: usize, _t: f64, _x: &Field) -> Field {
        self.values[step].clone()
    }
}

/// Precomputed per-mode factors for one exponential-Euler configuration.
pub struct Stepper {
    pub cfg: SimConfig,
    basis: SineBasis<f64>,
    decay: Vec<f64>,
    phi_dt: Vec<f64>,
    noise_weight: Vec<f64>,
    pow_gamma: Vec<f64>,
    nonlinear: bool,
}

impl Stepper {
    pub fn new(cfg: &SimConfig) -> Self {
        cfg.validate().expect("invalid simulation config");
        let n = cfg.n();
        let dt = cfg.dt;
        let decay: Vec<f64> = (1..=n).map(|k| ou_decay(k, 0.0, dt)).collect();
        // φ₁(α_k dt)·dt = (1 − e^{−α_k dt})/α_k.
        let phi_dt: Vec<f64> = (1..=n)
            .map(|k| (1.0 - decay[k - 1]) / eigenvalue::<f64>(k))
            .collect();
        let noise_weight: Vec<f64> = (1..=n)
            .map(|k| midpoint_noise_weight(k, 0.0, cfg.gamma, dt))
            .collect();
        let pow_gamma: Vec<f64> = (1..=n).map(|k| eigenvalue::<f64>(k).powf(cfg.gamma)).collect();
        Self {
            cfg: *cfg,
            basis: SineBasis::new(cfg.basis),
            decay,
            phi_dt,
            noise_weight,
            pow_gamma,
            nonlinear: cfg.nonlinearity == Nonlinearity::Full,
        }
    }

    pub fn basis(&self) -> &SineBasis<f64> {
        &self.basis
    }

    /// One exponential-Euler step of the (optionally controlled) system.
    pub fn step(&self, x: &Field, dbeta: &[f64], u: Option<&Field>) -> Field {
        let n = self.cfg.n();
        assert_eq!(x.n(), n, "state length mismatch");
        assert_eq!(dbeta.len(), n, "increment length mismatch");
        let drift = if self.nonlinear {
            self.basis.burgers_nonlinearity(x)
        } else {
            Field::zeros(n)
        };
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            let mut d = drift.coeffs()[k];
            if let Some(u) = u {
                d += self.pow_gamma[k] * u.coeffs()[k];
            }
            coeffs.push(
                self.decay[k] * x.coeffs()[k] + self.phi_dt[k] * d + self.noise_weight[k] * dbeta[k],
            );
        }
        Field::from_coeffs(coeffs)
    }

    /// Jacobian of [`Stepper::step`] with respect to the state, applied to a
    /// direction: one exponential-Euler step of the linearized drift
    /// dη = (Aη + π_n ∂_ξ(X η)) dt.
    pub fn step_derivative(&self, x: &Field, eta: &Field) -> Field {
        let n = self.cfg.n();
        let bilinear = if self.nonlinear {
            self.basis.deriv_of_product(x, eta)
        } else {
            Field::zeros(n)
        };
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.decay[k] * eta.coeffs()[k] + self.phi_dt[k] * bilinear.coeffs()[k]);
        }
        Field::from_coeffs(coeffs)
    }
}

/// One step of the Galerkin Burgers system (convenience wrapper; estimator
/// loops hold a [`Stepper`] to reuse the mode tables).
pub fn step_burgers(x: &Field, dbeta: &[f64], u: Option<&Field>, cfg: &SimConfig) -> Field {
    Stepper::new(cfg).step(x, dbeta, u)
}

/// A realized trajectory on the time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePath {
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
}

impl StatePath {
    pub fn terminal(&self) -> &Field {
        self.fields.last().expect("paths are never empty")
    }

    pub fn sup_l2_sq(&self) -> f64 {
        self.fields
            .iter()
            .map(|f| f.l2_norm().powi(2))
            .fold(0.0, f64::max)
    }

    pub fn terminal_l2_sq(&self) -> f64 {
        self.terminal().l2_norm().powi(2)
    }

    /// Index of the grid time closest to t (t must lie on the grid).
    pub fn step_of(&self, t: f64, dt: f64) -> usize {
        let m = (t / dt).round() as usize;
        assert!(
            (t - m as f64 * dt).abs() <= 1e-9 * dt.max(t.abs()),
            "t = {t} does not lie on the grid (dt = {dt})"
        );
        assert!(m < self.times.len(), "t = {t} beyond the horizon");
        m
    }
}

/// Streams a trajectory without storing it; `visit` sees every grid state
/// including the initial one.
pub fn simulate_visit<F: FnMut(usize, f64, &Field)>(
    stepper: &Stepper,
    x0: &Field,
    noise: &NoisePath,
    control: Option<&dyn ControlLaw>,
    mut visit: F,
) -> Result<(), SimError> {
    let cfg = &stepper.cfg;
    if noise.n_modes < cfg.n() {
        return Err(SimError::GridMismatch(format!(
            "noise holds {} modes, config needs {}",
            noise.n_modes,
            cfg.n()
        )));
    }
    if (noise.dt - cfg.dt).abs() > 1e-12 * cfg.dt || noise.steps != cfg.steps() {
        return Err(SimError::GridMismatch(format!(
            "noise grid (dt = {}, steps = {}) vs config (dt = {}, steps = {})",
            noise.dt,
            noise.steps,
            cfg.dt,
            cfg.steps()
        )));
    }
    let mut x = x0.resized(cfg.n());
    visit(0, 0.0, &x);
    for m in 0..cfg.steps() {
        let t = m as f64 * cfg.dt;
        let u = control.map(|c| c.value(m, t, &x));
        x = stepper.step(&x, &noise.step_increments(m)[..cfg.n()], u.as_ref());
        if !x.is_finite() {
            return Err(SimError::BlowUp { step: m + 1, t: t + cfg.dt });
        }
        visit(m + 1, t + cfg.dt, &x);
    }
    Ok(())
}

/// Full trajectory from π_n x0; with `control` absent this is the
/// uncontrolled system.
pub fn simulate_path(
    cfg: &SimConfig,
    x0: &Field,
    noise: &NoisePath,
    control: Option<&dyn ControlLaw>,
) -> Result<StatePath, SimError> {
    let stepper = Stepper::new(cfg);
    simulate_path_with(&stepper, x0, noise, control)
}

/// Same as [`simulate_path`] but reusing a prebuilt stepper.
pub fn simulate_path_with(
    stepper: &Stepper,
    x0: &Field,
    noise: &NoisePath,
    control: Option<&dyn ControlLaw>,
) -> Result<StatePath, SimError> {
    let steps = stepper.cfg.steps();
    let mut times = Vec::with_capacity(steps + 1);
    let mut fields = Vec::with_capacity(steps + 1);
    simulate_visit(stepper, x0, noise, control, |_, t, x| {
        times.push(t);
        fields.push(x.clone());
    })?;
    Ok(StatePath { times, fields })
}

/// The remainder decomposition Y = X − z_α on the shared noise grid, plus the
/// dissipation functional ∫₀ᵀ ‖∇Y_s‖² ds (left-point rule).
pub struct YDecomposition {
    pub alpha: f64,
    pub y: Vec<Field>,
    pub z: Vec<OuState>,
    pub dissipation: f64,
}

pub fn decompose_y(
    path: &StatePath,
    alpha: f64,
    noise: &NoisePath,
    cfg: &SimConfig,
) -> Result<YDecomposition, SimError> {
    if noise.steps + 1 != path.fields.len() || (noise.dt - cfg.dt).abs() > 1e-12 * cfg.dt {
        return Err(SimError::GridMismatch(
            "decomposition needs the same grid the trajectory was simulated on".into(),
        ));
    }
    let z = ou_path(noise, alpha, cfg.gamma, cfg.n());
    let y: Vec<Field> = path
        .fields
        .iter()
        .zip(&z)
        .map(|(x, zs)| x.sub(&zs.as_field()))
        .collect();
    let dissipation = y[..y.len() - 1]
        .iter()
        .map(|f| f.h_norm(1.0).powi(2) * cfg.dt)
        .sum();
    Ok(YDecomposition { alpha, y, z, dissipation })
}

/// Direction h and the linearized trajectory η along a realized path.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeState {
    pub direction: Field,
    pub path: Vec<Field>,
}

impl DerivativeState {
    pub fn terminal(&self) -> &Field {
        self.path.last().expect("paths are never empty")
    }
}

/// Derivative flow dη/dt = Aη + π_n ∂_ξ(X_t η), η_0 = π_n h, integrated with
/// the same exponential-Euler weights as the trajectory itself, so η is
/// exactly the Jacobian of the discrete flow map applied to h. Exactly
/// linear in h.
pub fn derivative_flow(path: &StatePath, h: &Field, cfg: &SimConfig) -> Result<DerivativeState, SimError> {
    let stepper = Stepper::new(cfg);
    derivative_flow_with(&stepper, path, h)
}

pub fn derivative_flow_with(
    stepper: &Stepper,
    path: &StatePath,
    h: &Field,
) -> Result<DerivativeState, SimError> {
    let n = stepper.cfg.n();
    let direction = h.resized(n);
    let mut eta = direction.clone();
    let mut out = Vec::with_capacity(path.fields.len());
    out.push(eta.clone());
    for (m, x) in path.fields[..path.fields.len() - 1].iter().enumerate() {
        eta = stepper.step_derivative(x, &eta);
        if !eta.is_finite() {
            return Err(SimError::BlowUp { step: m + 1, t: path.times[m + 1] });
        }
        out.push(eta.clone());
    }
    Ok(DerivativeState { direction, path: out })
}

/// Per-step evaluation of the energy balance
/// ½ d‖Y‖²/dt = −‖∇Y‖² + α⟨Y, z_α⟩ + ⟨(−A)^γ Y, u⟩ − ½∫(Y+z_α)² ∂_ξY dξ.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRow {
    pub t: f64,
    /// (‖Y_{m+1}‖² − ‖Y_m‖²)/(2 dt).
    pub de_dt: f64,
    pub neg_grad_sq: f64,
    pub alpha_cross: f64,
    pub control_term: f64,
    pub nonlinear_term: f64,
    /// de_dt minus the sum of the right-hand terms; shrinks at first order in dt.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub rows: Vec<EnergyRow>,
    pub max_abs_residual: f64,
}

pub fn energy_diagnostic(
    y: &[Field],
    z: &[OuState],
    u: Option<&ControlFunction>,
    alpha: f64,
    cfg: &SimConfig,
) -> EnergyReport {
    assert_eq!(y.len(), z.len(), "Y and z must share the grid");
    if let Some(u) = u {
        assert_eq!(u.values.len() + 1, y.len(), "control grid mismatch");
    }
    let basis = SineBasis::new(cfg.basis);
    let n = cfg.n();
    let pow_gamma: Vec<f64> = (1..=n).map(|k| eigenvalue::<f64>(k).powf(cfg.gamma)).collect();
    let quad_w = 1.0 / (cfg.basis.m_quad() + 1) as f64;
    let mut rows = Vec::with_capacity(y.len().saturating_sub(1));
    let mut max_abs = 0.0f64;
    for m in 0..y.len() - 1 {
        let ym = &y[m];
        let t = m as f64 * cfg.dt;
        let de_dt =
            (y[m + 1].l2_norm().powi(2) - ym.l2_norm().powi(2)) / (2.0 * cfg.dt);
        let neg_grad_sq = -ym.h_norm(1.0).powi(2);
        let zf = z[m].as_field();
        let alpha_cross = alpha * ym.dot(&zf);
        let control_term = match u {
            Some(u) => ym
                .coeffs()
                .iter()
                .zip(u.values[m].coeffs())
                .enumerate()
                .map(|(k, (&yk, &uk))| pow_gamma[k] * yk * uk)
                .sum(),
            None => 0.0,
        };
        // −½ ∫ (Y+z)² ∂_ξY dξ by collocation quadrature (alias-free under the
        // basis invariant; the integrand vanishes at the boundary).
        let w_grid = basis.to_grid(&ym.add(&zf));
        let dy_grid = basis.deriv_to_grid(ym);
        let nonlinear_term = -0.5
            * quad_w
            * w_grid
                .values()
                .iter()
                .zip(dy_grid.values())
                .map(|(&w, &d)| w * w * d)
                .sum::<f64>();
        let residual = de_dt - (neg_grad_sq + alpha_cross + control_term + nonlinear_term);
        max_abs = max_abs.max(residual.abs());
        rows.push(EnergyRow { t, de_dt, neg_grad_sq, alpha_cross, control_term, nonlinear_term, residual });
    }
    EnergyReport { rows, max_abs_residual: max_abs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn cfg(n: usize, dt: f64, horizon: f64) -> SimConfig {
        SimConfig::new(0.0, BasisSpec::dealiased(n), dt, horizon).unwrap()
    }

    fn random_unit_field(n: usize, rng: &mut SmallRng) -> Field {
        let f = Field::from_coeffs((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let norm = f.l2_norm();
        f.scale(1.0 / norm)
    }

    #[test]
    fn rest_state_stays_at_rest() {
        let cfg = cfg(8, 0.01, 0.1);
        let x = step_burgers(&Field::zeros(8), &vec![0.0; 8], None, &cfg);
        assert!(x.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn single_step_closed_form_from_e1() {
        let cfg = cfg(8, 0.01, 0.1);
        let x = step_burgers(&Field::basis_vector(8, 1), &vec![0.0; 8], None, &cfg);
        let e1 = (-0.01 * PI * PI).exp();
        assert!((x.coeff(1) - e1).abs() < 1e-14, "mode 1: {} vs {e1}", x.coeff(1));
        let a2 = 4.0 * PI * PI;
        let phi2 = (1.0 - (-0.01 * a2).exp()) / (0.01 * a2);
        let expected2 = phi2 * (PI / 2.0f64.sqrt()) * 0.01;
        assert!((x.coeff(2) - expected2).abs() < 1e-13, "mode 2: {} vs {expected2}", x.coeff(2));
        for k in [3, 4, 5, 6, 7, 8] {
            assert!(x.coeff(k).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_control_is_bitwise_identical_to_no_control() {
        let cfg = cfg(16, 0.005, 0.2);
        let mut rng = SmallRng::seed_from_u64(15);
        let x0 = random_unit_field(16, &mut rng);
        let noise = cfg.noise(123, 0);
        let plain = simulate_path(&cfg, &x0, &noise, None).unwrap();
        let zero = ControlFunction::zero(&cfg);
        let controlled = simulate_path(&cfg, &x0, &noise, Some(&zero)).unwrap();
        for (a, b) in plain.fields.iter().zip(&controlled.fields) {
            for (ca, cb) in a.coeffs().iter().zip(b.coeffs()) {
                assert_eq!(ca.to_bits(), cb.to_bits());
            }
        }
    }

    #[test]
    fn same_seed_gives_bit_identical_paths() {
        let cfg = cfg(8, 0.01, 0.3);
        let x0 = InitialCondition::Sawtooth.realize(8);
        let a = simulate_path(&cfg, &x0, &cfg.noise(7, 11), None).unwrap();
        let b = simulate_path(&cfg, &x0, &cfg.noise(7, 11), None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_initial_zero_noise_is_zero_path() {
        let cfg = cfg(8, 0.01, 0.2);
        let path = simulate_path(&cfg, &Field::zeros(8), &cfg.zero_noise(), None).unwrap();
        assert!(path.fields.iter().all(|f| f.coeffs().iter().all(|&c| c == 0.0)));
    }

    #[test]
    fn deterministic_l2_contraction() {
        let mut rng = SmallRng::seed_from_u64(99);
        let cfg = cfg(32, 1e-3, 0.5);
        let noise = cfg.zero_noise();
        for _ in 0..5 {
            let x0 = random_unit_field(32, &mut rng);
            let path = simulate_path(&cfg, &x0, &noise, None).unwrap();
            for (t, f) in path.times.iter().zip(&path.fields) {
                let bound = (-PI * PI * t).exp() * x0.l2_norm() * (1.0 + 1e-6);
                assert!(f.l2_norm() <= bound, "t={t}: {} > {bound}", f.l2_norm());
            }
        }
    }

    #[test]
    fn linear_dynamics_from_zero_reproduces_z_bitwise() {
        // With the nonlinearity disabled and x0 = 0, the trajectory is the
        // shared-noise z path at alpha = 0 on the same increments.
        let mut cfg = cfg(16, 0.002, 0.2);
        cfg.nonlinearity = Nonlinearity::Disabled;
        let noise = cfg.noise(21, 5);
        let path = simulate_path(&cfg, &Field::zeros(16), &noise, None).unwrap();
        let z = ou_path(&noise, 0.0, cfg.gamma, 16);
        for (x, zs) in path.fields.iter().zip(&z) {
            for (a, b) in x.coeffs().iter().zip(&zs.coeffs) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn decompose_matches_linear_mild_solution_without_noise() {
        // Zero noise ⇒ z ≡ 0 and Y = X exactly; with the nonlinearity off the
        // discrete path is the exact heat flow of x0.
        let mut c = cfg(8, 0.01, 0.2);
        c.nonlinearity = Nonlinearity::Disabled;
        let x0 = InitialCondition::Sawtooth.realize(8);
        let noise = c.zero_noise();
        let path = simulate_path(&c, &x0, &noise, None).unwrap();
        let dec = decompose_y(&path, 0.0, &noise, &c).unwrap();
        for (m, y) in dec.y.iter().enumerate() {
            assert_eq!(y, &path.fields[m]);
            let exact = crate::spectral::apply_shifted_heat(&x0, path.times[m], 0.0);
            let err = y.sub(&exact).l2_norm();
            assert!(err < 1e-12, "heat flow mismatch at step {m}: {err}");
        }
        assert!(dec.dissipation > 0.0);
    }

    #[test]
    fn y_moves_continuously_with_alpha() {
        let c = cfg(16, 0.005, 0.25);
        let noise = c.noise(3, 9);
        let x0 = InitialCondition::Mode { k: 1 }.realize(16);
        let path = simulate_path(&c, &x0, &noise, None).unwrap();
        let y1 = decompose_y(&path, 2.0, &noise, &c).unwrap();
        let y2 = decompose_y(&path, 2.5, &noise, &c).unwrap();
        let sup: f64 = y1
            .y
            .iter()
            .zip(&y2.y)
            .map(|(a, b)| a.sub(b).l2_norm())
            .fold(0.0, f64::max);
        assert!(sup > 0.0 && sup < 1.0, "sup diff {sup} should be small but nonzero");
    }

    #[test]
    fn derivative_flow_is_heat_flow_on_zero_path() {
        let c = cfg(8, 0.01, 0.2);
        let noise = c.zero_noise();
        let path = simulate_path(&c, &Field::zeros(8), &noise, None).unwrap();
        let h = InitialCondition::Sawtooth.realize(8);
        let eta = derivative_flow(&path, &h, &c).unwrap();
        for (m, e) in eta.path.iter().enumerate() {
            let exact = crate::spectral::apply_shifted_heat(&h, path.times[m], 0.0);
            assert!(e.sub(&exact).l2_norm() < 1e-12);
        }
        let zero = derivative_flow(&path, &Field::zeros(8), &c).unwrap();
        assert!(zero.path.iter().all(|f| f.l2_norm() == 0.0));
    }

    #[test]
    fn derivative_flow_linear_in_direction() {
        let mut rng = SmallRng::seed_from_u64(31);
        let c = cfg(16, 0.005, 0.2);
        let noise = c.noise(17, 0);
        let x0 = random_unit_field(16, &mut rng);
        let path = simulate_path(&c, &x0, &noise, None).unwrap();
        let h = random_unit_field(16, &mut rng);
        let g = random_unit_field(16, &mut rng);
        let (a, b) = (0.7, -1.3);
        let combo = derivative_flow(&path, &h.scale(a).add_scaled(&g, b), &c).unwrap();
        let eh = derivative_flow(&path, &h, &c).unwrap();
        let eg = derivative_flow(&path, &g, &c).unwrap();
        for m in 0..combo.path.len() {
            let lin = eh.path[m].scale(a).add_scaled(&eg.path[m], b);
            let err = combo.path[m].sub(&lin).l2_norm();
            let scale = lin.l2_norm().max(1e-30);
            assert!(err <= 1e-10 * scale, "step {m}: relative error {}", err / scale);
        }
    }

    #[test]
    fn derivative_flow_matches_finite_difference_crn() {
        let mut rng = SmallRng::seed_from_u64(8);
        let c = cfg(32, 1e-3, 0.5);
        let mut mean_err = 0.0;
        let paths = 4;
        for p in 0..paths {
            let noise = c.noise(500, p);
            let x0 = random_unit_field(32, &mut rng);
            let h = random_unit_field(32, &mut rng);
            let base = simulate_path(&c, &x0, &noise, None).unwrap();
            let eta = derivative_flow(&base, &h, &c).unwrap();
            let eps = 1e-4;
            let bumped = simulate_path(&c, &x0.add_scaled(&h, eps), &noise, None).unwrap();
            let fd = bumped.terminal().sub(base.terminal()).scale(1.0 / eps);
            let rel = fd.sub(eta.terminal()).l2_norm() / eta.terminal().l2_norm();
            mean_err += rel / paths as f64;
        }
        assert!(mean_err <= 0.02, "mean relative FD error {mean_err}");
    }

    #[test]
    fn energy_residual_shrinks_with_dt() {
        // Zero noise, zero control: the balance reduces to
        // d‖Y‖²/dt = −2‖∇Y‖² − ∫Y² ∂_ξY with the last integral vanishing, and
        // the discrete residual is O(dt). The initial condition must be
        // resolved on the time grid (α_k dt small for its active modes) for
        // the first-order scaling to show.
        let mut coeffs = vec![0.0; 16];
        coeffs[0] = 0.8;
        coeffs[1] = 0.3;
        coeffs[2] = -0.15;
        let x0 = Field::from_coeffs(coeffs);
        let mut max_res = Vec::new();
        for &dt in &[4e-3, 2e-3, 1e-3] {
            let c = cfg(16, dt, 0.128);
            let noise = c.zero_noise();
            let path = simulate_path(&c, &x0, &noise, None).unwrap();
            let dec = decompose_y(&path, 0.0, &noise, &c).unwrap();
            let report = energy_diagnostic(&dec.y, &dec.z, None, 0.0, &c);
            max_res.push(report.max_abs_residual);
        }
        // Order fit over the three levels: slope of log(res) vs log(dt) ≥ 0.8.
        let order = (max_res[0] / max_res[2]).ln() / 4.0f64.ln();
        assert!(order >= 0.8, "energy residual order {order}, residuals {max_res:?}");
        // Y ≡ 0 gives an all-zero report.
        let c = cfg(8, 0.01, 0.1);
        let noise = c.zero_noise();
        let path = simulate_path(&c, &Field::zeros(8), &noise, None).unwrap();
        let dec = decompose_y(&path, 0.0, &noise, &c).unwrap();
        let report = energy_diagnostic(&dec.y, &dec.z, None, 0.0, &c);
        assert!(report.max_abs_residual == 0.0);
    }

    #[test]
    fn blow_up_is_reported_with_step_index() {
        // A huge state with a large dt forces overflow through the quadratic
        // drift; the path must abort rather than emit non-finite values.
        let c = SimConfig::new(0.0, BasisSpec::dealiased(8), 0.5, 2.0).unwrap();
        let x0 = Field::from_coeffs(vec![1e154; 8]);
        match simulate_path(&c, &x0, &c.zero_noise(), None) {
            Err(SimError::BlowUp { step, .. }) => assert!(step >= 1),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn config_rejections() {
        assert!(SimConfig::new(0.3, BasisSpec::dealiased(8), 0.01, 1.0).is_err());
        assert!(SimConfig::new(0.0, BasisSpec::dealiased(8), 0.3, 1.0).is_err());
        let c = cfg(8, 0.01, 0.1);
        let bad_noise = NoisePath::zeros(0.02, 5, 8);
        assert!(matches!(
            simulate_path(&c, &Field::zeros(8), &bad_noise, None),
            Err(SimError::GridMismatch(_))
        ));
    }
}
