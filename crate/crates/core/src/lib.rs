//! Elliptic and degree-2 Siegel Poincaré series built from products of
//! Fourier-series terms, the covariant differential operators acting on them,
//! and the K-type lattice combinatorics used to argue almost-holomorphy.
//!
//! Module map:
//!
//! - [`exact_terms`]: exact algebra of elliptic Fourier terms and the operators
//!   `L_k`, `R_k`, `ξ_k`.
//! - [`specfun`] and [`quadrature`]: gamma, incomplete gamma, Whittaker `W`,
//!   double-exponential and Gauss rules.
//! - [`elliptic_poincare`]: `SL₂(ℤ)` cosets, truncated elliptic Poincaré series,
//!   spectral pairing identity.
//! - [`gk_support`]: weight supports of graded `ℂ[L,R]`-modules and U(2) K-type
//!   supports with walls.
//! - [`siegel_kernel`]: degree-2 matrices, slash actions, the matrix integral
//!   `h_{α,β}(T;Y)`, the terms `Ψ_k`, `Φ_ℓ` and the operators `L⁽²⁾`, `Ω_{α,β}`.
//! - [`sp2_cosets`]: representatives of `Δ\Sp₂(ℤ)` by height.
//! - [`poincare2`]: the degree-2 Poincaré series and its diagnostics.
//! - [`verify`]: the acceptance checks shared by the CLI and the test suite.

pub mod elliptic_poincare;
pub mod error;
pub mod exact_terms;
pub mod gk_support;
pub mod intmat;
pub mod oracle;
pub mod poincare2;
pub mod quadrature;
pub mod siegel_kernel;
pub mod sp2_cosets;
pub mod specfun;
pub mod summation;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
