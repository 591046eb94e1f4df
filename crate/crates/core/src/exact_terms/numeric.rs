//! Floating-point evaluation of exact expressions, finite-difference versions
//! of the operators, and the numeric-only path for complex exponents `y^s`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::operators::WeightedFunction;
use super::term::{ExactTerm, TermSum};
use crate::error::{Error, Result};
use crate::specfun::{upper_incomplete_gamma, upper_incomplete_gamma_scaled, Precision};

fn check_tau(tau: Complex64) -> Result<()> {
    if tau.im > 0.0 && tau.re.is_finite() && tau.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tau must lie in the upper half plane, got {tau}")))
    }
}

/// `e^{−2π m y} Γ(s, 4πg y)` evaluated without intermediate under/overflow.
fn decay_times_gamma(term: &ExactTerm, y: f64, prec: &Precision) -> Result<f64> {
    let decay = -2.0 * PI * term.decay as f64 * y;
    match term.gamma {
        None => Ok(decay.exp()),
        Some(gf) => {
            let x = 4.0 * PI * gf.g as f64 * y;
            let scaled = upper_incomplete_gamma_scaled(gf.s as f64, x, prec)?;
            if scaled == 0.0 {
                return Ok(upper_incomplete_gamma(gf.s as f64, x, prec)? * decay.exp());
            }
            Ok(scaled * (decay - x).exp())
        }
    }
}

pub fn evaluate_term(t: &ExactTerm, tau: Complex64, prec: &Precision) -> Result<Complex64> {
    let (x, y) = (tau.re, tau.im);
    let phase = Complex64::from_polar(1.0, 2.0 * PI * t.freq as f64 * x);
    let radial = y.powi(t.y_exp as i32) * decay_times_gamma(t, y, prec)?;
    Ok(t.coeff.to_complex() * phase * radial)
}

pub fn evaluate_expr(e: &TermSum, tau: Complex64, prec: &Precision) -> Result<Complex64> {
    check_tau(tau)?;
    let mut acc = crate::summation::ComplexSum::new();
    for t in e.terms() {
        acc.add(evaluate_term(t, tau, prec)?);
    }
    let v = acc.value();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("evaluate at {tau}")))
    }
}

pub fn evaluate(f: &WeightedFunction, tau: Complex64) -> Result<Complex64> {
    evaluate_expr(&f.expr, tau, &Precision::default())
}

/// Central-difference partial derivatives `(∂_x F, ∂_y F)` at `τ`.
pub fn central_gradient<F>(f: &F, tau: Complex64, h: f64) -> Result<(Complex64, Complex64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let dx = (f(tau + h)? - f(tau - h)?) / (2.0 * h);
    let iy = Complex64::new(0.0, h);
    let dy = (f(tau + iy)? - f(tau - iy)?) / (2.0 * h);
    Ok((dx, dy))
}

/// `L_k F = −i y² ∂_x F + y² ∂_y F` by central differences.
pub fn numeric_lower<F>(f: &F, tau: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let (dx, dy) = central_gradient(f, tau, h)?;
    let y2 = tau.im * tau.im;
    Ok(Complex64::new(0.0, -y2) * dx + y2 * dy)
}

/// `R_k F = i ∂_x F + ∂_y F + k y^{−1} F` by central differences.
pub fn numeric_raise<F>(f: &F, k: i64, tau: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let (dx, dy) = central_gradient(f, tau, h)?;
    Ok(Complex64::i() * dx + dy + k as f64 / tau.im * f(tau)?)
}

/// `coeff · y^s · e^{2πi n x} · e^{−2π m y}` with complex exponent `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumTerm {
    pub coeff: Complex64,
    pub y_exp: Complex64,
    pub freq: f64,
    pub decay: f64,
}

/// A sum of [`NumTerm`]s; supports the operators but no exact zero test.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NumExpr {
    pub terms: Vec<NumTerm>,
}

impl NumExpr {
    /// `y^s`.
    pub fn y_power(s: Complex64) -> Self {
        Self {
            terms: vec![NumTerm {
                coeff: Complex64::new(1.0, 0.0),
                y_exp: s,
                freq: 0.0,
                decay: 0.0,
            }],
        }
    }

    fn d_dx(t: &NumTerm) -> Option<NumTerm> {
        (t.freq != 0.0).then(|| NumTerm {
            coeff: t.coeff * Complex64::new(0.0, 2.0 * PI * t.freq),
            ..*t
        })
    }

    fn d_dy(t: &NumTerm) -> Vec<NumTerm> {
        let mut out = Vec::new();
        if t.y_exp != Complex64::new(0.0, 0.0) {
            out.push(NumTerm {
                coeff: t.coeff * t.y_exp,
                y_exp: t.y_exp - 1.0,
                ..*t
            });
        }
        if t.decay != 0.0 {
            out.push(NumTerm {
                coeff: t.coeff * (-2.0 * PI * t.decay),
                ..*t
            });
        }
        out
    }

    /// `L_k = −i y² ∂_x + y² ∂_y`.
    pub fn lower(&self) -> Self {
        let mut terms = Vec::new();
        for t in &self.terms {
            if let Some(d) = Self::d_dx(t) {
                terms.push(NumTerm {
                    coeff: d.coeff * Complex64::new(0.0, -1.0),
                    y_exp: d.y_exp + 2.0,
                    ..d
                });
            }
            for d in Self::d_dy(t) {
                terms.push(NumTerm {
                    y_exp: d.y_exp + 2.0,
                    ..d
                });
            }
        }
        Self { terms }
    }

    /// `R_k = i ∂_x + ∂_y + k y^{−1}`.
    pub fn raise(&self, k: f64) -> Self {
        let mut terms = Vec::new();
        for t in &self.terms {
            if let Some(d) = Self::d_dx(t) {
                terms.push(NumTerm {
                    coeff: d.coeff * Complex64::i(),
                    ..d
                });
            }
            terms.extend(Self::d_dy(t));
            if k != 0.0 {
                terms.push(NumTerm {
                    coeff: t.coeff * k,
                    y_exp: t.y_exp - 1.0,
                    ..*t
                });
            }
        }
        Self { terms }
    }

    pub fn evaluate(&self, tau: Complex64) -> Result<Complex64> {
        check_tau(tau)?;
        let y = Complex64::new(tau.im, 0.0);
        Ok(self
            .terms
            .iter()
            .map(|t| {
                t.coeff
                    * y.powc(t.y_exp)
                    * Complex64::from_polar(1.0, 2.0 * PI * t.freq * tau.re)
                    * (-2.0 * PI * t.decay * tau.im).exp()
            })
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_terms::make_phi;

    #[test]
    fn phi_at_i() {
        let v = evaluate(&make_phi(4, 0, 1).unwrap(), Complex64::i()).unwrap();
        assert!((v.re - (-2.0 * PI).exp()).abs() < 1e-17 && v.im.abs() < 1e-17);
    }

    #[test]
    fn selberg_power_lowering() {
        // L(y^s) = s y^{s+1}
        let s = Complex64::new(0.5, 3.0);
        let tau = Complex64::new(0.2, 1.3);
        let got = NumExpr::y_power(s).lower().evaluate(tau).unwrap();
        let want = s * Complex64::new(1.3, 0.0).powc(s + 1.0);
        assert!((got - want).norm() < 1e-12 * want.norm());
    }
}
