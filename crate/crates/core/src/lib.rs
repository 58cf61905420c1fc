//! Spectral Galerkin simulation and Monte Carlo estimation toolkit for the
//! 1-D stochastic Burgers equation
//!
//! ```text
//! dX_t = ΔX_t dt + ½ ∂_ξ(X_t²) dt + (−Δ)^γ dW_t,   ξ ∈ (0,1),   X|_{∂Λ} = 0,
//! ```
//!
//! with γ ∈ [0, 1/4) and W a cylindrical Wiener process on L²(0,1). The state
//! lives in the Dirichlet sine basis e_k(ξ) = √2 sin(kπξ); truncation to the
//! first n modes turns the SPDE into an n-dimensional SDE which is integrated
//! with an exponential Euler scheme.
//!
//! Layout:
//! - [`spectral`]: sine-basis fields, transforms, fractional Laplacian powers,
//!   heat semigroup, norms, and the dealiased Burgers nonlinearity.
//! - [`noise`]: reproducible per-mode Brownian increments, the shifted
//!   stochastic convolution z_α with shared noise across α, and OU oracles.
//! - [`dynamics`]: time integration of the Galerkin system, the remainder
//!   Y = X − z_α, the controlled system, and the derivative flow.
//! - [`estimators`]: overflow-safe exponential moments, variational
//!   (Boué–Dupuis) checks, Bismut–Elworthy–Li gradients, Lipschitz probes,
//!   and invariant-measure tail fits.
//! - [`exec`]: deterministic parallel execution over Monte Carlo paths.
//!
//! The spectral core is generic over the scalar type (f32 or f64, see
//! [`scalar::Real`]); the simulation and estimation layers use the concrete
//! aliases below.

pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod noise;
pub mod report;
pub mod scalar;
pub mod spectral;

/// Scalar type used by the simulation and estimation layers.
pub type Scalar = f64;
/// Spectral field over the default scalar.
pub type Field = spectral::SpectralField<Scalar>;
/// Physical-space field over the default scalar.
pub type Grid = spectral::GridField<Scalar>;
/// Realized sine basis (transform tables) over the default scalar.
pub type Basis = spectral::SineBasis<Scalar>;

pub use error::{ConfigError, SimError};
pub use spectral::BasisSpec;
