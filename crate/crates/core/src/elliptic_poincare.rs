//! Cosets of `Γ∞\SL₂(ℤ)`, truncated elliptic Poincaré series and the spectral
//! pairing identity for Whittaker functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_terms::{evaluate_expr, TermSum, WeightedFunction};
use crate::quadrature::exp_sinh;
use crate::specfun::{gamma_real, whittaker_w_scaled, Precision};
use crate::summation::{ComplexSum, NeumaierSum};

/// A coset representative `(a b; c d)` with `c > 0`, or `(c,d) = (0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sl2CosetRep {
    pub c: i64,
    pub d: i64,
    pub a: i64,
    pub b: i64,
}

impl Sl2CosetRep {
    pub fn identity() -> Self {
        Self { c: 0, d: 1, a: 1, b: 0 }
    }

    /// Completes a coprime bottom row with the extended Euclidean algorithm.
    pub fn complete(c: i64, d: i64) -> Option<Self> {
        let g = c.extended_gcd(&d);
        if g.gcd != 1 {
            return None;
        }
        // x c + y d = 1, so a = y, b = −x gives a d − b c = 1
        Some(Self { c, d, a: g.y, b: -g.x })
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn height(&self) -> i64 {
        self.c.abs().max(self.d.abs())
    }

    /// `cτ + d`.
    pub fn j(&self, tau: Complex64) -> Complex64 {
        self.c as f64 * tau + self.d as f64
    }

    /// `(aτ + b)/(cτ + d)`.
    pub fn act(&self, tau: Complex64) -> Complex64 {
        (self.a as f64 * tau + self.b as f64) / self.j(tau)
    }
}

/// All normalized coprime `(c,d)` with `max(|c|,|d|) ≤ height`, sorted by
/// `(c,d)`.
pub fn enumerate_sl2_cosets(height: i64) -> Result<Vec<Sl2CosetRep>> {
    if height < 1 {
        return Err(Error::Domain(format!("height must be positive, got {height}")));
    }
    let mut out = vec![Sl2CosetRep::identity()];
    for c in 1..=height {
        for d in -height..=height {
            if let Some(rep) = Sl2CosetRep::complete(c, d) {
                out.push(rep);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `(f |_k γ)(τ) = (cτ+d)^{−k} f(γτ)`.
pub fn slash_eval(
    expr: &TermSum,
    weight: i64,
    gamma: &Sl2CosetRep,
    tau: Complex64,
    prec: &Precision,
) -> Result<Complex64> {
    let j = gamma.j(tau);
    Ok(j.powi(-(weight as i32)) * evaluate_expr(expr, gamma.act(tau), prec)?)
}

/// Exponent `σ` such that the summands are `O(|cτ+d|^{−σ})`; the series
/// converges absolutely iff `σ > 2`.
///
/// A term `y^a` contributes `|cτ+d|^{−k−2a}`; a factor `Γ(s, c y)` behaves like
/// `y^{min(s,0)}` as `y → 0`.
pub fn decay_exponent(f: &WeightedFunction) -> f64 {
    let min_a = f
        .expr
        .terms()
        .iter()
        .map(|t| t.y_exp + t.gamma.map_or(0, |g| g.s.min(0)))
        .min()
        .unwrap_or(0);
    (f.weight + 2 * min_a) as f64
}

/// The four seed shapes whose convergence thresholds are stated in closed
/// form, with that threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesKind {
    /// `φ_{k[d]} · φ_ℓ`: converges when `k + ℓ > 2 + 2d`.
    PhiKdPhi,
    /// `ψ̃_k · φ_ℓ` and `φ̃_k · φ_ℓ`: converge when `k + ℓ > 2`.
    TildePhi,
    /// `ψ_k · φ_ℓ`: converges when `ℓ − k > 2`.
    PsiPhi,
    Other,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EllipticValue {
    pub value: Complex64,
    /// Heuristic tail estimate from the last shell; never added to `value`.
    pub tail: f64,
    pub tail_is_heuristic: bool,
    /// `Σ |summand|` over the included cosets.
    pub abs_sum: f64,
    pub n_cosets: usize,
    pub decay_exponent: f64,
    pub height: i64,
}

fn summands(
    f: &WeightedFunction,
    reps: &[Sl2CosetRep],
    tau: Complex64,
    prec: &Precision,
) -> Result<Vec<Complex64>> {
    reps.par_iter()
        .map(|g| slash_eval(&f.expr, f.weight, g, tau, prec))
        .collect()
}

/// Partial sum over a given list of representatives, in that order.
pub fn sum_over(
    f: &WeightedFunction,
    reps: &[Sl2CosetRep],
    tau: Complex64,
    prec: &Precision,
) -> Result<Complex64> {
    let vals = summands(f, reps, tau, prec)?;
    let mut acc = ComplexSum::new();
    vals.into_iter().for_each(|v| acc.add(v));
    Ok(acc.value())
}

/// Truncated Poincaré series `Σ_{γ ∈ Γ∞\SL₂(ℤ), height ≤ H} f|_k γ` without the
/// convergence precondition. Useful to exhibit divergence below threshold.
pub fn eval_elliptic_poincare_unchecked(
    f: &WeightedFunction,
    tau: Complex64,
    height: i64,
    prec: &Precision,
) -> Result<EllipticValue> {
    if !(tau.im > 0.0) {
        return Err(Error::Domain(format!("tau must lie in the upper half plane, got {tau}")));
    }
    let reps = enumerate_sl2_cosets(height)?;
    let vals = summands(f, &reps, tau, prec)?;
    let mut acc = ComplexSum::new();
    let mut abs = NeumaierSum::new();
    let mut shell = NeumaierSum::new();
    for (g, v) in reps.iter().zip(&vals) {
        acc.add(*v);
        abs.add(v.norm());
        if g.height() == height {
            shell.add(v.norm());
        }
    }
    let sigma = decay_exponent(f);
    // shell H contributes ~ C H^{1−σ}, so Σ_{h>H} ≈ shell · H / (σ − 2)
    let tail = if sigma > 2.0 {
        shell.value() * height as f64 / (sigma - 2.0)
    } else {
        f64::INFINITY
    };
    let value = acc.value();
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonFinite("elliptic Poincaré partial sum".into()));
    }
    Ok(EllipticValue {
        value,
        tail,
        tail_is_heuristic: true,
        abs_sum: abs.value(),
        n_cosets: reps.len(),
        decay_exponent: sigma,
        height,
    })
}

/// As [`eval_elliptic_poincare_unchecked`], rejecting seeds whose series does
/// not converge absolutely.
pub fn eval_elliptic_poincare(
    f: &WeightedFunction,
    tau: Complex64,
    height: i64,
    prec: &Precision,
) -> Result<EllipticValue> {
    let sigma = decay_exponent(f);
    if sigma <= 2.0 {
        return Err(Error::Convergence(format!(
            "summands decay like |cτ+d|^-{sigma}, need exponent > 2"
        )));
    }
    eval_elliptic_poincare_unchecked(f, tau, height, prec)
}

/// Nominal convergence threshold for the recognized seed shapes.
pub fn nominal_convergence_condition(kind: SeriesKind, k: i64, l: i64, d: i64) -> bool {
    match kind {
        SeriesKind::PhiKdPhi => k + l > 2 + 2 * d,
        SeriesKind::TildePhi => k + l > 2,
        SeriesKind::PsiPhi => l - k > 2,
        SeriesKind::Other => true,
    }
}

/// Finite-difference stencil for the numeric operators on functions of `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdSpec {
    /// Step is `step_scale · min(1, y)`.
    pub step_scale: f64,
    /// 2 or 8 (order of the central difference).
    pub order: u32,
}

impl Default for FdSpec {
    fn default() -> Self {
        Self {
            step_scale: 1e-5,
            order: 2,
        }
    }
}

impl FdSpec {
    /// Eighth-order stencil suited to nested application.
    pub fn nested() -> Self {
        Self {
            step_scale: 2e-2,
            order: 8,
        }
    }
}

const C8: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

fn directional<F>(f: &F, tau: Complex64, dir: Complex64, h: f64, order: u32) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    match order {
        2 => Ok((f(tau + dir * h)? - f(tau - dir * h)?) / (2.0 * h)),
        8 => {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, c) in C8.iter().enumerate() {
                let s = (j + 1) as f64 * h;
                acc += *c * (f(tau + dir * s)? - f(tau - dir * s)?);
            }
            Ok(acc / h)
        }
        o => Err(Error::Domain(format!("unsupported stencil order {o}"))),
    }
}

/// `L F(τ) = −i y² ∂_x F + y² ∂_y F` by central differences.
pub fn fd_lower<F>(f: &F, tau: Complex64, spec: FdSpec) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    let h = spec.step_scale * tau.im.min(1.0);
    let dx = directional(f, tau, Complex64::new(1.0, 0.0), h, spec.order)?;
    let dy = directional(f, tau, Complex64::new(0.0, 1.0), h, spec.order)?;
    let y2 = tau.im * tau.im;
    Ok(Complex64::new(0.0, -y2) * dx + y2 * dy)
}

/// `R_k F(τ) = i ∂_x F + ∂_y F + k y^{−1} F` by central differences.
pub fn fd_raise<F>(f: &F, k: i64, tau: Complex64, spec: FdSpec) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    let h = spec.step_scale * tau.im.min(1.0);
    let dx = directional(f, tau, Complex64::new(1.0, 0.0), h, spec.order)?;
    let dy = directional(f, tau, Complex64::new(0.0, 1.0), h, spec.order)?;
    Ok(Complex64::i() * dx + dy + k as f64 / tau.im * f(tau)?)
}

/// `L^n F(τ)` by nesting the numeric operator `n` times.
pub fn fd_lower_n<'a>(
    f: Box<dyn Fn(Complex64) -> Result<Complex64> + Sync + 'a>,
    n: u32,
    tau: Complex64,
    spec: FdSpec,
) -> Result<Complex64> {
    if n == 0 {
        return f(tau);
    }
    let inner: Box<dyn Fn(Complex64) -> Result<Complex64> + Sync + 'a> =
        Box::new(move |t| fd_lower(&*f, t, spec));
    fd_lower_n(inner, n - 1, tau, spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    pub lhs_est_error: f64,
}

/// Compares the quadrature of
/// `∫₀^∞ y^{−k} e^{−2π(m−n)y} (4π(m−n)y)^{−(k+ℓ)/2} W_{(k+ℓ)/2, s−1/2}(4π(m−n)y) y^{k+ℓ−2} dy`
/// with `(4π(m−n))^{1−ℓ} Γ((ℓ−k)/2 + s − 1) Γ((ℓ−k)/2 − s) / Γ(−k)`.
pub fn spectral_pairing_check(
    k: i64,
    l: i64,
    s: f64,
    n: i64,
    m: i64,
    prec: &Precision,
) -> Result<SpectralCheck> {
    if k >= 0 || k % 2 != 0 {
        return Err(Error::Domain(format!("k must be a negative even integer, got {k}")));
    }
    if m <= n {
        return Err(Error::Domain("need m > n".into()));
    }
    if k + l <= 2 {
        return Err(Error::Domain("need k + l > 2".into()));
    }
    if !(s > 0.5) || !((l - k) as f64 / 2.0 > s) {
        return Err(Error::Domain("need 1/2 < s < (l − k)/2".into()));
    }
    let diff = (m - n) as f64;
    let c = 4.0 * PI * diff;
    let kappa = (k + l) as f64 / 2.0;
    let mu = s - 0.5;
    let kf = k as f64;
    let lf = l as f64;
    let a_exp = (lf - kf) / 2.0 - 1.5 - mu.abs();
    let integrand = |y: f64| -> f64 {
        let u = c * y;
        let log_mag = -kf * y.ln() - 2.0 * PI * diff * y - kappa * u.ln() + (kf + lf - 2.0) * y.ln();
        // near 0 the integrand is O(u^{(ℓ−k)/2 − 3/2 − |s−1/2|}); once that
        // power has underflowed its contribution is nil
        let near_zero = a_exp * u.ln();
        // for large u, W_{κ,μ}(u) ~ u^κ e^{−u/2}
        let far = log_mag + kappa * u.ln() - 0.5 * u;
        if near_zero < -700.0 || far < -745.0 {
            return 0.0;
        }
        match whittaker_w_scaled(kappa, mu, u, prec) {
            Ok(w) => (log_mag + (0.5 - mu.abs()) * u.ln()).exp() * w,
            Err(_) => f64::NAN,
        }
    };
    let q = exp_sinh(integrand, 0.0, prec.de_options())?;
    let a = (lf - kf) / 2.0;
    let rhs = c.powf(1.0 - lf) * gamma_real(a + s - 1.0)? * gamma_real(a - s)? / gamma_real(-kf)?;
    Ok(SpectralCheck {
        lhs: q.value,
        rhs,
        rel_err: ((q.value - rhs) / rhs).abs(),
        lhs_est_error: q.est_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_heights() {
        let h1 = enumerate_sl2_cosets(1).unwrap();
        let pairs: Vec<(i64, i64)> = h1.iter().map(|g| (g.c, g.d)).collect();
        assert_eq!(pairs, vec![(0, 1), (1, -1), (1, 0), (1, 1)]);
        assert_eq!(enumerate_sl2_cosets(2).unwrap().len(), 8);
        for g in enumerate_sl2_cosets(9).unwrap() {
            assert_eq!(g.det(), 1);
        }
    }
}
