use super::coefficient::{rational_pow, Coefficient};
use super::term::{rat, ExactTerm, GammaFactor, TermSum};
use crate::error::{Error, Result};

/// A function expression together with the weight it is acted on at.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedFunction {
    pub expr: TermSum,
    pub weight: i64,
}

impl WeightedFunction {
    pub fn new(expr: TermSum, weight: i64) -> Self {
        Self { expr, weight }
    }

    /// `(y^a, k)`.
    pub fn y_power(a: i64, weight: i64) -> Self {
        Self::new(TermSum::single(ExactTerm::y_power(a)), weight)
    }

    /// `(1, 0)`, the unit for [`multiply`].
    pub fn unit() -> Self {
        Self::y_power(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.expr.is_zero()
    }
}

/// `φ_{k[d]}(n;τ) = y^{−d} e^{2πi nτ}`.
pub fn make_phi(k: i64, d: i64, n: i64) -> Result<WeightedFunction> {
    if n <= 0 {
        return Err(Error::Domain(format!("phi needs n > 0, got {n}")));
    }
    if d < 0 {
        return Err(Error::Domain(format!("phi needs d >= 0, got {d}")));
    }
    let t = ExactTerm::new(Coefficient::one(), -d, n, n, None)?;
    Ok(WeightedFunction::new(TermSum::single(t), k))
}

/// `ψ̃_k(n;τ) = Γ(1−k, 4π|n|y) e^{2πi nτ}` for even `k ≤ 0`, `n < 0`.
pub fn make_psi_tilde(k: i64, n: i64) -> Result<WeightedFunction> {
    if k > 0 || k % 2 != 0 {
        return Err(Error::Domain(format!("psi_tilde needs even k <= 0, got {k}")));
    }
    if n >= 0 {
        return Err(Error::Domain(format!("psi_tilde needs n < 0, got {n}")));
    }
    let gf = GammaFactor { s: 1 - k, g: -n };
    let t = ExactTerm::new(Coefficient::one(), 0, n, n, Some(gf))?;
    Ok(WeightedFunction::new(TermSum::single(t), k))
}

/// `φ̃_k(n;τ) = y^{−k} e^{−2πi n τ̄}`.
///
/// Both signs of `n` are accepted: the image of `ψ̃_k(n)` under lowering is
/// `φ̃_{k−2}(−n)` with `−n > 0`.
pub fn make_phi_tilde(k: i64, n: i64) -> Result<WeightedFunction> {
    if k >= 0 {
        return Err(Error::Domain(format!("phi_tilde needs k < 0, got {k}")));
    }
    if n == 0 {
        return Err(Error::Domain("phi_tilde needs n != 0".into()));
    }
    // e^{−2πi n τ̄} = e^{−2πi n x} e^{−2π n y}
    let t = ExactTerm::new(Coefficient::one(), -k, -n, n, None)?;
    Ok(WeightedFunction::new(TermSum::single(t), k))
}

/// `ψ_k(n;τ) = y^{−k} Γ(1+k, 4πn y) e^{−2πi n τ̄}` for `k ≥ 0`, `n > 0`.
pub fn make_psi(k: i64, n: i64) -> Result<WeightedFunction> {
    if k < 0 {
        return Err(Error::Domain(format!("psi needs k >= 0, got {k}")));
    }
    if n <= 0 {
        return Err(Error::Domain(format!("psi needs n > 0, got {n}")));
    }
    let gf = GammaFactor { s: 1 + k, g: n };
    let t = ExactTerm::new(Coefficient::one(), -k, n, -n, Some(gf))?;
    Ok(WeightedFunction::new(TermSum::single(t), k))
}

/// `∂/∂x` of a single term: multiplies by `2πi n`.
fn d_dx(t: &ExactTerm) -> Vec<ExactTerm> {
    if t.freq == 0 {
        return Vec::new();
    }
    let c = &t.coeff * &Coefficient::gaussian(0, 2 * t.freq);
    vec![t.with_coeff(c.times_pi(1))]
}

/// `∂/∂y` of a single term, using `∂_y Γ(s, c y) = −c^s y^{s−1} e^{−c y}`.
fn d_dy(t: &ExactTerm) -> Vec<ExactTerm> {
    let mut out = Vec::with_capacity(3);
    if t.y_exp != 0 {
        out.push(ExactTerm {
            coeff: t.coeff.scale(&rat(t.y_exp)),
            y_exp: t.y_exp - 1,
            ..t.clone()
        });
    }
    if t.decay != 0 {
        out.push(t.with_coeff(t.coeff.scale(&rat(-2 * t.decay)).times_pi(1)));
    }
    if let Some(gf) = t.gamma {
        let c = -rational_pow(&rat(4 * gf.g), gf.s);
        out.push(ExactTerm {
            coeff: t.coeff.scale(&c).times_pi(gf.s as i32),
            y_exp: t.y_exp + gf.s - 1,
            freq: t.freq,
            decay: t.decay + 2 * gf.g,
            gamma: None,
        });
    }
    out
}

fn times_y(ts: Vec<ExactTerm>, a: i64) -> impl Iterator<Item = ExactTerm> {
    ts.into_iter().map(move |t| ExactTerm {
        y_exp: t.y_exp + a,
        ..t
    })
}

fn scaled(ts: Vec<ExactTerm>, c: Coefficient) -> impl Iterator<Item = ExactTerm> {
    ts.into_iter().map(move |t| t.with_coeff(&t.coeff * &c))
}

/// `L_k = −2i y² ∂/∂τ̄ = −i y² ∂_x + y² ∂_y`, as an expression map.
pub fn lower_expr(e: &TermSum) -> TermSum {
    let mut out = Vec::new();
    for t in e.terms() {
        out.extend(times_y(
            scaled(d_dx(t), Coefficient::gaussian(0, -1)).collect(),
            2,
        ));
        out.extend(times_y(d_dy(t), 2));
    }
    TermSum::from_terms(out)
}

/// `R_k = 2i ∂/∂τ + k y^{−1} = i ∂_x + ∂_y + k y^{−1}`.
pub fn raise_expr(e: &TermSum, k: i64) -> TermSum {
    let mut out = Vec::new();
    for t in e.terms() {
        out.extend(scaled(d_dx(t), Coefficient::imag_unit()));
        out.extend(d_dy(t));
        if k != 0 {
            out.push(ExactTerm {
                coeff: t.coeff.scale(&rat(k)),
                y_exp: t.y_exp - 1,
                ..t.clone()
            });
        }
    }
    TermSum::from_terms(out)
}

pub fn lower(f: &WeightedFunction) -> WeightedFunction {
    WeightedFunction::new(lower_expr(&f.expr), f.weight - 2)
}

pub fn raise(f: &WeightedFunction) -> WeightedFunction {
    WeightedFunction::new(raise_expr(&f.expr, f.weight), f.weight + 2)
}

/// Complex conjugation: conjugates coefficients and negates frequencies.
pub fn conj_expr(e: &TermSum) -> TermSum {
    TermSum::from_terms(e.terms().iter().map(|t| ExactTerm {
        coeff: t.coeff.conj(),
        freq: -t.freq,
        ..t.clone()
    }))
}

/// `ξ_k f = 2i y^k conj(∂f/∂τ̄) = y^{k−2} conj(L_k f)`, of weight `2 − k`.
pub fn xi(f: &WeightedFunction) -> WeightedFunction {
    let lowered = lower_expr(&f.expr);
    WeightedFunction::new(conj_expr(&lowered).times_y_power(f.weight - 2), 2 - f.weight)
}

/// Termwise product at weight `k + ℓ`. Gamma factors with integer `s ≥ 1`
/// are expanded into their finite form first, which keeps products such as
/// `ψ_k · φ_ℓ` in the shape `p(y^{−1}) e^{2πi N τ}`.
pub fn multiply(f: &WeightedFunction, g: &WeightedFunction) -> Result<WeightedFunction> {
    let a = f.expr.expand_gammas();
    let b = g.expr.expand_gammas();
    let mut out = Vec::with_capacity(a.len() * b.len());
    for s in a.terms() {
        for t in b.terms() {
            out.push(s.mul(t)?);
        }
    }
    Ok(WeightedFunction::new(
        TermSum::from_terms(out),
        f.weight + g.weight,
    ))
}

/// Smallest `d ≤ d_max` with `L^{d+1} f = 0`.
pub fn almost_holomorphic_depth(f: &WeightedFunction, d_max: u32) -> Option<u32> {
    let mut g = f.clone();
    for d in 0..=d_max {
        g = lower(&g);
        if g.is_zero() {
            return Some(d);
        }
    }
    None
}

pub fn lower_n(f: &WeightedFunction, n: u32) -> WeightedFunction {
    (0..n).fold(f.clone(), |g, _| lower(&g))
}

/// `(4π|n|)^{1−k}` as an exact coefficient.
pub fn lowering_constant_psi_tilde(k: i64, n: i64) -> Coefficient {
    let e = 1 - k;
    Coefficient::real_pi(rational_pow(&rat(4 * n.abs()), e), e as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowering_y_power() {
        let f = WeightedFunction::y_power(3, 0);
        let g = lower(&f);
        assert_eq!(g.weight, -2);
        let want = TermSum::single(ExactTerm::y_power(4)).scale_rational(&rat(3));
        assert_eq!(g.expr, want);
    }

    #[test]
    fn raising_y_power_at_weight_zero() {
        let g = raise(&WeightedFunction::y_power(3, 0));
        assert_eq!(g.weight, 2);
        assert_eq!(g.expr, TermSum::single(ExactTerm::y_power(2)).scale_rational(&rat(3)));
    }

    #[test]
    fn psi_zero_reduces_to_exponential() {
        let p = make_psi(0, 1).unwrap();
        let e = p.expr.expand_gammas();
        assert_eq!(e.len(), 1);
        let t = &e.terms()[0];
        assert_eq!((t.y_exp, t.freq, t.decay, t.gamma), (0, 1, 1, None));
    }
}
