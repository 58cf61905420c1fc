//! Experiment configuration: one human-readable TOML file per experiment,
//! losslessly round-trippable through serde.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use burgers_spde::dynamics::{InitialCondition, Nonlinearity, Scheme, SimConfig};
use burgers_spde::estimators::{FunctionalKind, TestFunctional};
use burgers_spde::spectral::{min_quad_points, BasisSpec};
use burgers_spde::Field;

/// Full parameterization of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub master_seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub out_dir: Option<String>,
    pub sim: SimSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub ou_check: OuCheckSection,
    #[serde(default)]
    pub alpha_scaling: AlphaScalingSection,
    #[serde(default)]
    pub expmoment: ExpMomentSection,
    #[serde(default)]
    pub lambda_scan: LambdaScanSection,
    #[serde(default)]
    pub variational: VariationalSection,
    #[serde(default)]
    pub gradient: GradientSection,
    #[serde(default)]
    pub lipschitz: LipschitzSection,
    #[serde(default)]
    pub invariant: InvariantSection,
    #[serde(default)]
    pub convergence: ConvergenceSection,
}

fn default_workers() -> usize {
    1
}

/// Physical and numerical parameters of the trajectory family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub gamma: f64,
    pub n: usize,
    /// Collocation points; defaults to the minimal alias-free count.
    #[serde(default)]
    pub m_quad: Option<usize>,
    pub dt: f64,
    pub horizon: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
    #[serde(default = "default_x0")]
    pub x0: InitialCondition,
}

fn default_x0() -> InitialCondition {
    InitialCondition::Zero
}

impl SimSection {
    pub fn build(&self) -> Result<(SimConfig, Field)> {
        let m_quad = self.m_quad.unwrap_or_else(|| min_quad_points(self.n));
        let basis = BasisSpec::new(self.n, m_quad).context("sim.n / sim.m_quad")?;
        let mut cfg = SimConfig::new(self.gamma, basis, self.dt, self.horizon)
            .context("sim.gamma / sim.dt / sim.horizon")?;
        cfg.scheme = self.scheme;
        cfg.nonlinearity = self.nonlinearity;
        Ok((cfg, self.x0.realize(self.n)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryDump {
    Coeffs,
    Norms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub paths: u64,
    pub dump: Option<TrajectoryDump>,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self { paths: 1, dump: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct OuCheckSection {
    pub alpha: f64,
    pub paths: u64,
    pub step_reps: u64,
}

impl Default for OuCheckSection {
    fn default() -> Self {
        Self { alpha: 0.0, paths: 2000, step_reps: 50_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct AlphaScalingSection {
    pub gammas: Vec<f64>,
    pub paths: u64,
    /// Allowed slack above the theoretical decay exponent −(1/4−γ).
    pub slope_margin: f64,
}

impl Default for AlphaScalingSection {
    fn default() -> Self {
        Self { gammas: vec![0.0, 0.1], paths: 500, slope_margin: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct ExpMomentSection {
    pub functional: FunctionalKind,
    pub lambda: f64,
    pub paths: u64,
}

impl Default for ExpMomentSection {
    fn default() -> Self {
        Self { functional: FunctionalKind::SupL2Sq, lambda: 1.0, paths: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct LambdaScanSection {
    pub functional: FunctionalKind,
    pub lambdas: Vec<f64>,
    pub paths: u64,
}

impl Default for LambdaScanSection {
    fn default() -> Self {
        Self {
            functional: FunctionalKind::TerminalL2Sq,
            lambdas: vec![0.0, 0.5, 1.0, 2.0],
            paths: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct VariationalSection {
    pub lambda: f64,
    pub paths: u64,
    /// Include the Riccati feedback oracle (linear dynamics only).
    pub lq_oracle: bool,
}

impl Default for VariationalSection {
    fn default() -> Self {
        Self { lambda: 1.0, paths: 2000, lq_oracle: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct GradientSection {
    /// Evaluation time; defaults to the horizon.
    pub t: Option<f64>,
    pub phi: TestFunctional,
    pub direction: InitialCondition,
    pub eps: f64,
    pub paths: u64,
}

impl Default for GradientSection {
    fn default() -> Self {
        Self {
            t: None,
            phi: TestFunctional::ExpNegL2Sq,
            direction: InitialCondition::Mode { k: 1 },
            eps: 1e-2,
            paths: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct LipschitzSection {
    pub x_prime: InitialCondition,
    pub x_prime_scale: f64,
    pub phi: TestFunctional,
    pub t_grid: Vec<f64>,
    pub paths: u64,
}

impl Default for LipschitzSection {
    fn default() -> Self {
        Self {
            x_prime: InitialCondition::Mode { k: 1 },
            x_prime_scale: 0.1,
            phi: TestFunctional::ExpNegL2Sq,
            t_grid: vec![0.05, 0.1, 0.2, 0.5, 1.0],
            paths: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct InvariantSection {
    pub burn_in: f64,
    pub sample_horizon: f64,
    pub thinning: f64,
    pub q_lo: f64,
    pub q_hi: f64,
    pub thresholds: usize,
}

impl Default for InvariantSection {
    fn default() -> Self {
        Self { burn_in: 10.0, sample_horizon: 190.0, thinning: 0.05, q_lo: 0.005, q_hi: 0.995, thresholds: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    pub mode_counts: Vec<usize>,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        Self { mode_counts: vec![8, 16, 32, 64] }
    }
}

impl ExperimentSpec {
    /// A complete default experiment (small enough for a smoke run).
    pub fn example(name: &str) -> Self {
        Self {
            name: name.to_string(),
            master_seed: 42,
            workers: 1,
            out_dir: None,
            sim: SimSection {
                gamma: 0.0,
                n: 16,
                m_quad: None,
                dt: 2e-3,
                horizon: 1.0,
                scheme: Scheme::default(),
                nonlinearity: Nonlinearity::default(),
                x0: InitialCondition::Zero,
            },
            simulate: SimulateSection::default(),
            ou_check: OuCheckSection::default(),
            alpha_scaling: AlphaScalingSection::default(),
            expmoment: ExpMomentSection::default(),
            lambda_scan: LambdaScanSection::default(),
            variational: VariationalSection::default(),
            gradient: GradientSection::default(),
            lipschitz: LipschitzSection::default(),
            invariant: InvariantSection::default(),
            convergence: ConvergenceSection::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).context("malformed experiment config")?;
        if spec.workers == 0 {
            bail!("workers must be at least 1");
        }
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).context("serializing experiment config")
    }

    /// SHA-256 of the canonical TOML serialization, hex-encoded.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let text = self.to_toml().unwrap_or_default();
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
