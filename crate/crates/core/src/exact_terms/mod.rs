//! Exact algebra of elliptic Fourier terms
//! `c · y^a · e^{2πi n x} · e^{−2π m y} · [Γ(s, 4πg y)]` with coefficients in
//! `ℚ(i)·π^ℤ`, closed under `∂_x`, `∂_y`, multiplication by `y^{±1}` and
//! products, so that the operators `L_k`, `R_k`, `ξ_k` act exactly and zero is
//! decidable.

mod coefficient;
mod numeric;
mod operators;
mod term;

pub use coefficient::{rational_pow, rational_to_f64, Coefficient};
pub use numeric::{
    central_gradient, evaluate, evaluate_expr, evaluate_term, numeric_lower, numeric_raise,
    NumExpr, NumTerm,
};
pub use operators::{
    almost_holomorphic_depth, conj_expr, lower, lower_expr, lower_n, lowering_constant_psi_tilde,
    make_phi, make_phi_tilde, make_psi, make_psi_tilde, multiply, raise, raise_expr, xi,
    WeightedFunction,
};
pub use term::{ExactTerm, GammaFactor, TermKey, TermSum};
