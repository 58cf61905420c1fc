//! Sine-basis spectral representation on Λ = (0,1) with Dirichlet boundary
//! conditions.
//!
//! The Laplacian A = ∂²_ξ with Dirichlet conditions has eigensystem
//! A e_k = −α_k e_k with α_k = π²k² and e_k(ξ) = √2 sin(kπξ), k ≥ 1.
//! A field is stored by its coefficients x_k = ⟨x, e_k⟩ against this
//! orthonormal basis, so ‖x‖²_{L²} = Σ x_k² (Parseval).
//!
//! Physical-space work (Lᵖ norms, the quadratic nonlinearity) happens on the
//! interior collocation grid ξ_j = j/(m_quad+1), j = 1..m_quad. With
//! m_quad ≥ ⌈3n/2⌉+1 the equal-weight quadrature on that grid integrates
//! products of two n-mode fields against any retained mode exactly, so the
//! pseudo-spectral nonlinearity is alias-free and ⟨B_n(x), x⟩ = 0 holds to
//! round-off.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::scalar::Real;

/// Smallest admissible number of collocation points for `n` retained modes:
/// ⌈3n/2⌉ + 1, enough to integrate cubic sine products without aliasing.
pub fn min_quad_points(n: usize) -> usize {
    (3 * n).div_ceil(2) + 1
}

/// Eigenvalue α_k = (πk)² of −A on (0,1) with Dirichlet conditions.
///
/// Mode indices start at 1; k = 0 is rejected.
pub fn eigenvalue<T: Real>(k: usize) -> T {
    assert!(k >= 1, "mode index k starts at 1, got 0");
    let kpi = T::PI() * T::of_usize(k);
    kpi * kpi
}

/// Basis function e_k(ξ) = √2 sin(kπξ), ξ ∈ [0,1].
pub fn eval_basis<T: Real>(k: usize, xi: T) -> T {
    assert!(k >= 1, "mode index k starts at 1, got 0");
    assert!(
        xi >= T::zero() && xi <= T::one(),
        "collocation point must lie in [0,1]"
    );
    T::SQRT_2() * (T::of_usize(k) * T::PI() * xi).sin()
}

/// Number of retained sine modes and collocation points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSpec {
    n: usize,
    m_quad: usize,
}

impl BasisSpec {
    /// Validates n ≥ 1 and m_quad ≥ ⌈3n/2⌉+1.
    pub fn new(n: usize, m_quad: usize) -> Result<Self, ConfigError> {
        if n == 0 {
            return Err(ConfigError::ZeroModes(n));
        }
        let min = min_quad_points(n);
        if m_quad < min {
            return Err(ConfigError::InsufficientQuadrature { n, m_quad, min });
        }
        Ok(Self { n, m_quad })
    }

    /// Basis with the smallest alias-free quadrature for `n` modes.
    pub fn dealiased(n: usize) -> Self {
        Self::new(n, min_quad_points(n)).expect("minimal quadrature is always admissible")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m_quad(&self) -> usize {
        self.m_quad
    }

    /// Collocation point ξ_j = (j+1)/(m_quad+1) for the 0-based index j.
    pub fn collocation_point<T: Real>(&self, j: usize) -> T {
        debug_assert!(j < self.m_quad);
        T::of_usize(j + 1) / T::of_usize(self.m_quad + 1)
    }
}

/// Coefficient vector of a function in the Dirichlet sine basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField<T> {
    coeffs: Vec<T>,
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(n: usize) -> Self {
        Self { coeffs: vec![T::zero(); n] }
    }

    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    /// The basis vector e_k embedded in an n-mode field (1-based k ≤ n).
    pub fn basis_vector(n: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= n, "basis vector index out of range");
        let mut f = Self::zeros(n);
        f.coeffs[k - 1] = T::one();
        f
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    /// Coefficient of mode k (1-based).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs[k - 1]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// L² norm, equal to the Euclidean norm of the coefficients.
    pub fn l2_norm(&self) -> T {
        self.coeffs.iter().map(|&c| c * c).sum::<T>().sqrt()
    }

    /// Hˢ norm: Euclidean norm of α_k^{s/2} x_k.
    pub fn h_norm(&self, s: T) -> T {
        let half = s / T::lit(2.0);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let w = eigenvalue::<T>(i + 1).powf(half);
                let wc = w * c;
                wc * wc
            })
            .sum::<T>()
            .sqrt()
    }

    pub fn scale(&self, a: T) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * a).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n(), other.n(), "field length mismatch");
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n(), other.n(), "field length mismatch");
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// self + a·other.
    pub fn add_scaled(&self, other: &Self, a: T) -> Self {
        assert_eq!(self.n(), other.n(), "field length mismatch");
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&x, &y)| x + a * y)
                .collect(),
        }
    }

    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.n(), other.n(), "field length mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a * b)
            .sum()
    }

    /// Re-expands the field in an m-mode basis, truncating or zero-padding.
    pub fn resized(&self, m: usize) -> Self {
        let mut coeffs = vec![T::zero(); m];
        for (i, &c) in self.coeffs.iter().take(m).enumerate() {
            coeffs[i] = c;
        }
        Self { coeffs }
    }
}

/// Orthogonal projection π_m: zeroes all coefficients above mode m.
///
/// Idempotent and L²-contractive; m > n is rejected.
pub fn project<T: Real>(x: &SpectralField<T>, m: usize) -> SpectralField<T> {
    assert!(m >= 1 && m <= x.n(), "projection level must satisfy 1 <= m <= n");
    let mut out = x.clone();
    for c in out.coeffs_mut().iter_mut().skip(m) {
        *c = T::zero();
    }
    out
}

/// Shifted heat semigroup e^{(A−α)t}: multiplies mode k by e^{−(α_k+α)t}.
///
/// Negative t is rejected; t = 0 is the identity.
pub fn apply_shifted_heat<T: Real>(x: &SpectralField<T>, t: T, alpha: T) -> SpectralField<T> {
    assert!(t >= T::zero(), "heat semigroup time must be nonnegative");
    assert!(alpha >= T::zero(), "shift must be nonnegative");
    let coeffs = x
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, &c)| c * (-(eigenvalue::<T>(i + 1) + alpha) * t).exp())
        .collect();
    SpectralField::from_coeffs(coeffs)
}

/// Fractional Laplacian power (−A)^p: multiplies mode k by α_k^p.
///
/// Any real power is defined on a finite-dimensional field; negative powers
/// are smoothing.
pub fn apply_frac_laplacian<T: Real>(x: &SpectralField<T>, power: T) -> SpectralField<T> {
    let coeffs = x
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, &c)| c * eigenvalue::<T>(i + 1).powf(power))
        .collect();
    SpectralField::from_coeffs(coeffs)
}

/// Point values at the collocation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T> {
    values: Vec<T>,
}

impl<T: Real> GridField<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Which norm to evaluate in [`SineBasis::norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    L2,
    /// Hˢ with the given s (any real).
    Hs(f64),
    /// Lᵖ by collocation quadrature, p ≥ 1.
    Lp(f64),
}

/// A realized basis: precomputed sine/cosine tables for the collocation grid.
///
/// Tables are layout `[k * m_quad + j]` with k the 0-based mode index and j
/// the 0-based grid index.
#[derive(Debug, Clone)]
pub struct SineBasis<T> {
    spec: BasisSpec,
    sin_kj: Vec<T>,
    cos_kj: Vec<T>,
}

impl<T: Real> SineBasis<T> {
    pub fn new(spec: BasisSpec) -> Self {
        let (n, m) = (spec.n(), spec.m_quad());
        let big_n = (m + 1) as f64;
        let mut sin_kj = vec![T::zero(); n * m];
        let mut cos_kj = vec![T::zero(); n * m];
        for k in 0..n {
            for j in 0..m {
                let arg = (k + 1) as f64 * std::f64::consts::PI * (j + 1) as f64 / big_n;
                sin_kj[k * m + j] = T::lit(arg.sin());
                cos_kj[k * m + j] = T::lit(arg.cos());
            }
        }
        Self { spec, sin_kj, cos_kj }
    }

    pub fn spec(&self) -> BasisSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn m_quad(&self) -> usize {
        self.spec.m_quad()
    }

    /// Synthesis: g(ξ_j) = Σ_k x_k √2 sin(kπξ_j).
    pub fn to_grid(&self, x: &SpectralField<T>) -> GridField<T> {
        assert_eq!(x.n(), self.n(), "field/basis length mismatch");
        let m = self.m_quad();
        let sqrt2 = T::SQRT_2();
        let mut values = vec![T::zero(); m];
        for (k, &c) in x.coeffs().iter().enumerate() {
            if c == T::zero() {
                continue;
            }
            let row = &self.sin_kj[k * m..(k + 1) * m];
            for (v, &s) in values.iter_mut().zip(row) {
                *v += c * s;
            }
        }
        for v in &mut values {
            *v *= sqrt2;
        }
        GridField { values }
    }

    /// Analysis: x_k = ⟨g, e_k⟩ by the collocation quadrature
    /// (√2/(m_quad+1)) Σ_j g(ξ_j) sin(kπξ_j), exact for sine polynomials
    /// resolved by the grid.
    pub fn to_spectral(&self, g: &GridField<T>) -> SpectralField<T> {
        assert_eq!(g.values.len(), self.m_quad(), "grid/basis length mismatch");
        let m = self.m_quad();
        let w = T::SQRT_2() / T::of_usize(m + 1);
        let coeffs = (0..self.n())
            .map(|k| {
                let row = &self.sin_kj[k * m..(k + 1) * m];
                let s: T = row.iter().zip(&g.values).map(|(&s, &v)| s * v).sum();
                s * w
            })
            .collect();
        SpectralField::from_coeffs(coeffs)
    }

    /// Synthesis of the spatial derivative: x'(ξ_j) = Σ_k x_k √2 kπ cos(kπξ_j).
    pub fn deriv_to_grid(&self, x: &SpectralField<T>) -> GridField<T> {
        assert_eq!(x.n(), self.n(), "field/basis length mismatch");
        let m = self.m_quad();
        let sqrt2 = T::SQRT_2();
        let pi = T::PI();
        let mut values = vec![T::zero(); m];
        for (k, &c) in x.coeffs().iter().enumerate() {
            if c == T::zero() {
                continue;
            }
            let kc = c * T::of_usize(k + 1) * pi;
            let row = &self.cos_kj[k * m..(k + 1) * m];
            for (v, &s) in values.iter_mut().zip(row) {
                *v += kc * s;
            }
        }
        for v in &mut values {
            *v *= sqrt2;
        }
        GridField { values }
    }

    /// π_n ∂_ξ(f·g) for two n-mode fields.
    ///
    /// The product f·g is a cosine polynomial of degree ≤ 2n vanishing at the
    /// boundary, so its cosine moments are integrated exactly by the
    /// collocation quadrature under the dealias invariant, and
    /// ⟨∂_ξ(fg), e_k⟩ = −kπ√2 ∫ fg cos(kπξ) dξ by parts. No grid
    /// differencing is involved; the derivative acts on coefficients.
    pub fn deriv_of_product(&self, f: &SpectralField<T>, g: &SpectralField<T>) -> SpectralField<T> {
        let m = self.m_quad();
        let fg_grid: Vec<T> = self
            .to_grid(f)
            .values
            .iter()
            .zip(&self.to_grid(g).values)
            .map(|(&a, &b)| a * b)
            .collect();
        let w = T::one() / T::of_usize(m + 1);
        let pi = T::PI();
        let sqrt2 = T::SQRT_2();
        let coeffs = (0..self.n())
            .map(|k| {
                let row = &self.cos_kj[k * m..(k + 1) * m];
                let q: T = row.iter().zip(&fg_grid).map(|(&c, &v)| c * v).sum();
                -sqrt2 * T::of_usize(k + 1) * pi * w * q
            })
            .collect();
        SpectralField::from_coeffs(coeffs)
    }

    /// Dealiased Burgers nonlinearity B_n(x) = π_n(½ ∂_ξ(x²)).
    ///
    /// Satisfies the skew identity ⟨B_n(x), x⟩ = 0 to round-off.
    pub fn burgers_nonlinearity(&self, x: &SpectralField<T>) -> SpectralField<T> {
        self.deriv_of_product(x, x).scale(T::lit(0.5))
    }

    /// Lᵖ norm by equal-weight quadrature at the interior collocation points
    /// (the integrand vanishes at the boundary). p < 1 is rejected.
    pub fn lp_norm(&self, x: &SpectralField<T>, p: T) -> T {
        assert!(p >= T::one(), "Lp norm needs p >= 1");
        let g = self.to_grid(x);
        let w = T::one() / T::of_usize(self.m_quad() + 1);
        let s: T = g.values.iter().map(|&v| v.abs().powf(p)).sum();
        (w * s).powf(T::one() / p)
    }

    /// Supremum of |x| over the collocation grid (a C(Λ̄) proxy).
    pub fn sup_norm_grid(&self, x: &SpectralField<T>) -> T {
        self.to_grid(x)
            .values
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn norm(&self, x: &SpectralField<T>, kind: NormKind) -> T {
        match kind {
            NormKind::L2 => x.l2_norm(),
            NormKind::Hs(s) => x.h_norm(T::lit(s)),
            NormKind::Lp(p) => self.lp_norm(x, T::lit(p)),
        }
    }
}
