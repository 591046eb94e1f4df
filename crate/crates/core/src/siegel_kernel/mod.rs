//! Degree-2 building blocks: slash actions, the matrix integral
//! `h_{α,β}(T;Y)`, the Fourier terms
//!
//! `Ψ_k(T;Z) = det(TY) h_{k+1,1}(T;Y) e^{2πi tr(TX)}`, `Φ_ℓ(T;Z) = e^{2πi tr(TZ)}`,
//!
//! and the operators `L = Y ᵀ(Y ∂/∂Z̄)` and `Ω_{α,β}`.

mod diffops;
mod hint;
mod jet;
mod matrix;

pub use diffops::{apply_lowering, apply_lowering_vec, apply_omega, fd_lowering_tensor, wirtinger_matrix, DiffResult};
pub use hint::{
    cone_moments_adaptive, cone_moments_fixed, cone_moments_refine, fit_shimura_bound, h_integral,
    h_integral_estimate, h_integral_fixed, h_integral_loose, monomial_index, monomials, ConeMoments, HRule, HValue, QuadratureSpec, ShimuraFit,
};
pub use jet::{holomorphic_exponential, Jet, PsiJets};
pub use matrix::{mat_mul, CMat2, Eigen2, Mat2, SiegelPoint, SymMat2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sp2_cosets::SymplecticRep;

/// `(F|_k M)(Z) = det(CZ+D)^{−k} F(M•Z)`.
pub fn slash<F>(f: &F, k: i64, g: &SymplecticRep, z: &SiegelPoint) -> Result<Complex64>
where
    F: Fn(&SiegelPoint) -> Result<Complex64>,
{
    let p = z.automorphy(g).det();
    Ok(p.powi(-(k as i32)) * f(&z.act(g)?)?)
}

/// `det(CZ+D)^{−α} det(CZ̄+D)^{−β} F(M•Z)` for `α − β ∈ ℤ`, evaluated as
/// `p^{−(α−β)} |p|^{−2β}` with `p = det(CZ+D)`, which fixes the branch.
pub fn slash_general<F>(
    f: &F,
    alpha: Complex64,
    beta: Complex64,
    g: &SymplecticRep,
    z: &SiegelPoint,
) -> Result<Complex64>
where
    F: Fn(&SiegelPoint) -> Result<Complex64>,
{
    let n = alpha - beta;
    if n.im != 0.0 || n.re.fract() != 0.0 {
        return Err(Error::Domain(format!("alpha - beta must be an integer, got {n}")));
    }
    let p = z.automorphy(g).det();
    let factor = p.powi(-(n.re as i32)) * (-2.0 * beta * p.norm().ln()).exp();
    Ok(factor * f(&z.act(g)?)?)
}

fn check_index(t: &SymMat2) -> Result<()> {
    if !t.is_positive_definite() {
        return Err(Error::Domain(format!("T must be positive definite, got {t:?}")));
    }
    if !t.is_half_integral() {
        return Err(Error::Domain(format!("T must be half-integral, got {t:?}")));
    }
    Ok(())
}

fn check_weight(k: i64, what: &str) -> Result<()> {
    if k <= 0 || k % 2 != 0 {
        return Err(Error::Domain(format!("{what} needs a positive even weight, got {k}")));
    }
    Ok(())
}

/// `Φ_ℓ(T;Z) = e^{2πi tr(TZ)}`; exact, the weight only labels the term.
pub fn phi(l: i64, t: &SymMat2, z: &SiegelPoint) -> Result<Complex64> {
    check_weight(l, "phi")?;
    if !t.is_positive_definite() {
        return Err(Error::Domain(format!("T must be positive definite, got {t:?}")));
    }
    Ok(holomorphic_exponential(t, z))
}

/// `Ψ_k(T;Z)` with an adaptively chosen rule.
pub fn psi(k: i64, t: &SymMat2, z: &SiegelPoint, q: &QuadratureSpec) -> Result<Complex64> {
    check_weight(k, "psi")?;
    check_index(t)?;
    let h = h_integral((k + 1) as f64, 1.0, t, &z.y, q)?;
    Ok(psi_from_h(t, z, h.value))
}

fn psi_from_h(t: &SymMat2, z: &SiegelPoint, h: f64) -> Complex64 {
    let phase = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t.trace_prod(&z.x));
    t.det() * z.y.det() * h * phase
}

/// `Ψ_k(T;·)` with a frozen rule, so that finite differences see one smooth
/// function rather than a rule that changes between stencil points.
#[derive(Debug, Clone, Copy)]
pub struct PsiEvaluator {
    pub k: i64,
    pub t: SymMat2,
    pub rule: HRule,
}

impl PsiEvaluator {
    /// Chooses the rule adaptively at `z`.
    pub fn at(k: i64, t: SymMat2, z: &SiegelPoint, q: &QuadratureSpec) -> Result<Self> {
        check_weight(k, "psi")?;
        check_index(&t)?;
        let h = h_integral((k + 1) as f64, 1.0, &t, &z.y, q)?;
        Ok(Self { k, t, rule: h.rule })
    }

    pub fn eval(&self, z: &SiegelPoint) -> Result<Complex64> {
        let h = h_integral_fixed((self.k + 1) as f64, 1.0, &self.t, &z.y, self.rule)?;
        Ok(psi_from_h(&self.t, z, h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_at_scalar_point() {
        let z = SiegelPoint::scalar_imaginary(1.0).unwrap();
        let v = phi(4, &SymMat2::identity(), &z).unwrap();
        assert!((v.re - (-4.0 * std::f64::consts::PI).exp()).abs() < 1e-18);
    }
}
