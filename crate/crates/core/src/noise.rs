//! Cylindrical Wiener increments and the shifted stochastic convolution.
//!
//! The driving noise is W_t = Σ_k β_k(t) e_k with independent scalar Brownian
//! motions β_k; the equation sees (−A)^γ dW, i.e. mode k is forced with
//! intensity α_k^γ. A [`NoisePath`] stores the per-mode increments of β_k on
//! a uniform time grid, regenerated deterministically from
//! (seed, path_index): mode k draws from its own counter-based stream, so the
//! same physical Brownian path is recovered regardless of how many modes a
//! consumer retains or how many paths run concurrently.
//!
//! The shifted convolution z_α(t) = ∫₀ᵗ e^{(A−α)(t−s)}(−A)^γ dW_s is the
//! mild solution of dz = (A−α)z dt + (−A)^γ dW, z(0) = 0, i.e. per mode an
//! OU process with rate α_k + α and intensity α_k^γ. Two discretizations are
//! provided: an exact-in-distribution single step ([`ou_exact_step`], fresh
//! Gaussians) and the shared-noise path update ([`ou_path`]) that reuses the
//! stored increments with a midpoint exponential weight so that every α is
//! driven by the identical Wiener path.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spectral::{apply_frac_laplacian, eigenvalue, SineBasis, SpectralField};

const SM64_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; a bijection on u64.
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(SM64_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Injective stream key for (master seed, path index).
///
/// For a fixed master seed the map path_index → key is a composition of
/// bijections on u64, so distinct path indices can never collide. The mapping
/// is part of the reproducibility contract and must stay stable.
pub fn stream_key(master_seed: u64, path_index: u64) -> u64 {
    splitmix64(master_seed) ^ splitmix64(path_index.wrapping_mul(SM64_GAMMA) ^ 0xD1B5_4A32_D192_ED03)
}

/// 256-bit generator seed for one (master seed, path, mode) stream.
fn mode_seed(master_seed: u64, path_index: u64, mode: usize) -> [u8; 32] {
    let base = stream_key(master_seed, path_index) ^ splitmix64((mode as u64) ^ 0xA0761D6478BD642F);
    let mut seed = [0u8; 32];
    let mut word = base;
    for chunk in seed.chunks_exact_mut(8) {
        word = splitmix64(word);
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    seed
}

/// Seeded, time-gridded per-mode Brownian increments, shared across all
/// processes driven by the same W.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    pub seed: u64,
    pub path_index: u64,
    pub dt: f64,
    pub steps: usize,
    pub n_modes: usize,
    /// Step-major layout: `increments[m * n_modes + k]` is Δβ_{k+1} over step m.
    increments: Vec<f64>,
}

impl NoisePath {
    /// Draws the full increment matrix, each entry i.i.d. Normal(0, dt).
    ///
    /// Mode k uses its own ChaCha8 stream keyed by (seed, path_index, k), so
    /// the first n columns are identical for any retained mode count n.
    pub fn generate(seed: u64, path_index: u64, dt: f64, steps: usize, n_modes: usize) -> Self {
        assert!(dt > 0.0 && steps > 0 && n_modes > 0);
        let sqrt_dt = dt.sqrt();
        let mut increments = vec![0.0; steps * n_modes];
        for k in 0..n_modes {
            let mut rng = ChaCha8Rng::from_seed(mode_seed(seed, path_index, k));
            for m in 0..steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                increments[m * n_modes + k] = sqrt_dt * z;
            }
        }
        Self { seed, path_index, dt, steps, n_modes, increments }
    }

    /// All-zero increments (deterministic dynamics on the same grid).
    pub fn zeros(dt: f64, steps: usize, n_modes: usize) -> Self {
        assert!(dt > 0.0 && steps > 0 && n_modes > 0);
        Self {
            seed: 0,
            path_index: 0,
            dt,
            steps,
            n_modes,
            increments: vec![0.0; steps * n_modes],
        }
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps as f64
    }

    /// Increments of all modes over step m.
    pub fn step_increments(&self, m: usize) -> &[f64] {
        &self.increments[m * self.n_modes..(m + 1) * self.n_modes]
    }

    /// The same Brownian path on a grid coarsened by an integer factor:
    /// consecutive increments are summed.
    pub fn coarsen(&self, factor: usize) -> NoisePath {
        assert!(factor >= 1 && self.steps % factor == 0, "coarsening factor must divide steps");
        let steps = self.steps / factor;
        let n = self.n_modes;
        let mut increments = vec![0.0; steps * n];
        for m in 0..steps {
            for sub in 0..factor {
                let row = self.step_increments(m * factor + sub);
                for k in 0..n {
                    increments[m * n + k] += row[k];
                }
            }
        }
        NoisePath {
            seed: self.seed,
            path_index: self.path_index,
            dt: self.dt * factor as f64,
            steps,
            n_modes: n,
            increments,
        }
    }
}

/// Validates γ ∈ [0, 1/4) (the noise-color range with function-valued state).
pub fn check_gamma(gamma: f64) -> f64 {
    assert!((0.0..0.25).contains(&gamma), "gamma must lie in [0, 1/4), got {gamma}");
    gamma
}

/// One-step decay factor e^{−(α_k+α)h} of the shifted mode-k convolution.
pub fn ou_decay(k: usize, alpha: f64, h: f64) -> f64 {
    (-(eigenvalue::<f64>(k) + alpha) * h).exp()
}

/// Exact conditional variance of one step of length h:
/// σ_k(h)² = α_k^{2γ} (1 − e^{−2(α_k+α)h}) / (2(α_k+α)).
pub fn ou_sigma_sq(k: usize, alpha: f64, gamma: f64, h: f64) -> f64 {
    let rate = eigenvalue::<f64>(k) + alpha;
    eigenvalue::<f64>(k).powf(2.0 * gamma) * (1.0 - (-2.0 * rate * h).exp()) / (2.0 * rate)
}

/// Midpoint exponential noise weight e^{−(α_k+α)h/2} α_k^γ used by the
/// shared-noise update (single-step weak bias O(h²)).
pub fn midpoint_noise_weight(k: usize, alpha: f64, gamma: f64, h: f64) -> f64 {
    eigenvalue::<f64>(k).powf(gamma) * (-(eigenvalue::<f64>(k) + alpha) * (0.5 * h)).exp()
}

/// Per-mode state of the shifted convolution z_α.
#[derive(Debug, Clone, PartialEq)]
pub struct OuState {
    pub t: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub coeffs: Vec<f64>,
}

impl OuState {
    /// The convolution starts from zero.
    pub fn initial(n: usize, alpha: f64, gamma: f64) -> Self {
        assert!(alpha >= 0.0, "shift must be nonnegative");
        check_gamma(gamma);
        Self { t: 0.0, alpha, gamma, coeffs: vec![0.0; n] }
    }

    pub fn as_field(&self) -> SpectralField<f64> {
        SpectralField::from_coeffs(self.coeffs.clone())
    }
}

/// Exact-in-distribution single step of the linear SDE
/// dz_k = −(α_k+α) z_k dt + α_k^γ dβ_k over a step of length h, driven by
/// fresh standard normal draws (one per mode).
pub fn ou_exact_step(state: &OuState, h: f64, normals: &[f64]) -> OuState {
    assert!(h > 0.0, "step size must be positive");
    assert_eq!(normals.len(), state.coeffs.len(), "one normal draw per mode");
    let coeffs = state
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let k = i + 1;
            ou_decay(k, state.alpha, h) * c + ou_sigma_sq(k, state.alpha, state.gamma, h).sqrt() * normals[i]
        })
        .collect();
    OuState { t: state.t + h, alpha: state.alpha, gamma: state.gamma, coeffs }
}

/// Streams the shared-noise approximation of z_α over the noise grid.
///
/// Every step applies the exact decay e^{−(α_k+α)h} and injects the stored
/// Brownian increment with the midpoint weight, so all α values ride the
/// identical Wiener path. `visit` is called at every grid time including
/// t = 0.
pub fn ou_evolve<F: FnMut(usize, f64, &[f64])>(
    noise: &NoisePath,
    alpha: f64,
    gamma: f64,
    n: usize,
    mut visit: F,
) {
    assert!(n <= noise.n_modes, "noise path holds fewer modes than requested");
    assert!(alpha >= 0.0, "shift must be nonnegative");
    check_gamma(gamma);
    let h = noise.dt;
    let decay: Vec<f64> = (1..=n).map(|k| ou_decay(k, alpha, h)).collect();
    let weight: Vec<f64> = (1..=n).map(|k| midpoint_noise_weight(k, alpha, gamma, h)).collect();
    let mut z = vec![0.0; n];
    visit(0, 0.0, &z);
    for m in 0..noise.steps {
        let db = noise.step_increments(m);
        for k in 0..n {
            z[k] = decay[k] * z[k] + weight[k] * db[k];
        }
        visit(m + 1, (m + 1) as f64 * h, &z);
    }
}

/// Shared-noise path of z_α at every grid time (t = 0 included).
pub fn ou_path(noise: &NoisePath, alpha: f64, gamma: f64, n: usize) -> Vec<OuState> {
    let mut states = Vec::with_capacity(noise.steps + 1);
    ou_evolve(noise, alpha, gamma, n, |_, t, z| {
        states.push(OuState { t, alpha, gamma, coeffs: z.to_vec() });
    });
    states
}

/// Stationary second moment of z_α truncated to n modes:
/// Σ_{k=1}^{n} α_k^{2γ} / (2(α_k + α)).
///
/// (α_k^{2γ} = (πk)^{4γ}; the full series converges exactly when γ < 1/4.)
pub fn stationary_second_moment(alpha: f64, gamma: f64, n: usize) -> f64 {
    (1..=n)
        .map(|k| {
            let ak = eigenvalue::<f64>(k);
            ak.powf(2.0 * gamma) / (2.0 * (ak + alpha))
        })
        .sum()
}

/// Supremum over the time grid of ‖(−A)^κ z_α(t)‖_{L⁴}, the empirical proxy
/// for the decay bound ‖(−A)^κ z̄_α(t)‖_{L⁴} ≲ α^{−1/4+ε+γ+κ}.
///
/// `horizon` may stop before the end of the noise grid. κ + γ ≥ 1/4 (the
/// summability boundary) is rejected.
pub fn sup_l4_statistic(
    noise: &NoisePath,
    alpha: f64,
    gamma: f64,
    kappa: f64,
    basis: &SineBasis<f64>,
    horizon: f64,
) -> f64 {
    assert!(alpha >= 1.0, "the decay statistic is defined for alpha >= 1");
    assert!(kappa >= 0.0, "kappa must be nonnegative");
    assert!(kappa + gamma < 0.25, "kappa + gamma must stay below 1/4");
    assert!(horizon > 0.0 && horizon <= noise.horizon() + 1e-12 * noise.horizon());
    let n = basis.n();
    let last_step = (horizon / noise.dt).round() as usize;
    let mut sup = 0.0f64;
    ou_evolve(noise, alpha, gamma, n, |m, _, z| {
        if m > last_step {
            return;
        }
        let field = SpectralField::from_coeffs(z.to_vec());
        let field = if kappa == 0.0 { field } else { apply_frac_laplacian(&field, kappa) };
        sup = sup.max(basis.lp_norm(&field, 4.0));
    });
    sup
}

/// Random-α selection data: the empirical proxy k̂ of the path constant and
/// the resulting shift.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSelection {
    pub eps1: f64,
    pub eps_prime: f64,
    pub k_hat: f64,
    pub alpha: f64,
}

/// α(ω) = (1/ε′)(k̂^{1/(1/4−ε₁−γ)} + 1), always ≥ 1 and monotone in k̂.
///
/// Requires 0 < ε₁ < 1/4 − γ and 0 < ε′ ≤ 1.
pub fn select_alpha(k_hat: f64, gamma: f64, eps1: f64, eps_prime: f64) -> AlphaSelection {
    check_gamma(gamma);
    assert!(eps1 > 0.0 && eps1 < 0.25 - gamma, "need 0 < eps1 < 1/4 - gamma");
    assert!(eps_prime > 0.0 && eps_prime <= 1.0, "need 0 < eps' <= 1");
    assert!(k_hat >= 0.0 && k_hat.is_finite());
    let exponent = 1.0 / (0.25 - eps1 - gamma);
    let alpha = (k_hat.powf(exponent) + 1.0) / eps_prime;
    AlphaSelection { eps1, eps_prime, k_hat, alpha }
}

/// α grid used by the empirical proxy of the path constant: {1, 2, 4, …, 64}.
pub const K_HAT_ALPHA_GRID: [f64; 7] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

/// Empirical proxy of the path constant: the smallest constant making
/// ‖z_α(t)‖_{L⁴} ≤ α^{−(1/4−ε₁−γ)} (1+√T) k̂ hold on the realized path over
/// the α grid.
pub fn estimate_k_hat(
    noise: &NoisePath,
    gamma: f64,
    eps1: f64,
    basis: &SineBasis<f64>,
    horizon: f64,
) -> f64 {
    check_gamma(gamma);
    assert!(eps1 > 0.0 && eps1 < 0.25 - gamma);
    let ct = 1.0 + horizon.sqrt();
    K_HAT_ALPHA_GRID
        .iter()
        .map(|&alpha| {
            let sup = sup_l4_statistic(noise, alpha, gamma, 0.0, basis, horizon);
            alpha.powf(0.25 - eps1 - gamma) * sup / ct
        })
        .fold(0.0, f64::max)
}
