//! The matrix integral
//!
//! `h_{α,β}(T;Y) = ∫_{U±T>0} det(U+T)^{α−3/2} det(U−T)^{β−3/2} e^{−2π tr(YU)} dU`
//!
//! and its moments. With `U = T^{1/2}(I+S)T^{1/2}`, `T^{1/2} Y T^{1/2} =
//! O diag(λ₁,λ₂) ᵀO` and, in the rotated frame, `S = (s, √(st)w; √(st)w, t)`,
//!
//! `h = det(T)^{α+β−3/2} e^{−2π tr TY} ∫∫∫ (st)^{β−1} (1−w²)^{β−3/2}
//!      ((2+s)(2+t) − st w²)^{α−3/2} e^{−2π(λ₁s+λ₂t)} ds dt dw`.
//!
//! The `(1−w²)^{β−3/2}` boundary singularity and the `(st)^{β−1}` factors are
//! absorbed into Gauss–Gegenbauer and generalized Gauss–Laguerre weights.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::matrix::{mat_mul, Mat2, SymMat2};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_gegenbauer, gauss_laguerre};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of rule refinements after the initial rule.
    pub max_depth: u32,
    /// Parameters need `β − 1/2 ≥ guard` and `α − 1/2 ≥ guard`.
    pub boundary_exponent_guard: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-300,
            max_depth: 6,
            boundary_exponent_guard: 1e-3,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !pos(self.rel_tol) || !pos(self.abs_tol) || !pos(self.boundary_exponent_guard) {
            return Err(Error::Domain(format!("quadrature tolerances must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// Number of Laguerre nodes per radial axis and Gegenbauer nodes in `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HRule {
    pub laguerre: usize,
    pub gegenbauer: usize,
}

impl HRule {
    pub const START: HRule = HRule { laguerre: 16, gegenbauer: 8 };

    /// Next rung of a ladder growing by about √2 per step. Both directions
    /// lose accuracy together when `T^{1/2} Y T^{1/2}` is small, so they are
    /// refined together.
    pub fn refined(&self) -> Self {
        let laguerre = if self.laguerre.is_power_of_two() {
            self.laguerre * 3 / 2
        } else {
            self.laguerre * 4 / 3
        }
        .max(self.laguerre + 1);
        Self {
            laguerre,
            gegenbauer: (laguerre / 2).max(self.gegenbauer + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HValue {
    pub value: f64,
    pub est_error: f64,
    pub rule: HRule,
    pub converged: bool,
}

/// Exponents `(p, q, r)` of `v11^p v12^q v22^r`, all with `p+q+r ≤ degree`,
/// in a fixed order.
pub fn monomials(degree: u8) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for total in 0..=degree {
        for p in (0..=total).rev() {
            for q in (0..=total - p).rev() {
                out.push([p, q, total - p - q]);
            }
        }
    }
    out
}

/// Position of `mu` in [`monomials`].
pub fn monomial_index(mu: [u8; 3]) -> usize {
    let total = (mu[0] + mu[1] + mu[2]) as usize;
    let before = total * (total + 1) * (total + 2) / 6;
    // within a degree: p descending, then q descending
    let p = mu[0] as usize;
    let q = mu[1] as usize;
    let skipped_p: usize = (p + 1..=total).map(|pp| total - pp + 1).sum();
    before + skipped_p + (total - p - q)
}

/// `∫_{V>0} det(V+2T)^{α−3/2} det(V)^{β−3/2} V^μ e^{−2π tr(YV)} dV` for
/// every monomial `μ` up to a degree, where `V = U − T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeMoments {
    pub degree: u8,
    pub values: Vec<f64>,
    /// `∫ |integrand · V^μ|`, the scale used for convergence tests.
    pub magnitudes: Vec<f64>,
    /// `|value − value at the previous rule|` after refinement; zero for a
    /// single fixed rule.
    pub diffs: Vec<f64>,
    pub rule: HRule,
}

impl ConeMoments {
    pub fn get(&self, mu: [u8; 3]) -> f64 {
        self.values[monomial_index(mu)]
    }
}

fn check_params(alpha: f64, beta: f64, t: &SymMat2, y: &SymMat2, guard: f64) -> Result<()> {
    if !(alpha - 0.5 >= guard && beta - 0.5 >= guard) {
        return Err(Error::Convergence(format!(
            "h needs alpha, beta > 1/2 (guard {guard}), got ({alpha}, {beta})"
        )));
    }
    if !t.is_positive_definite() || !y.is_positive_definite() {
        return Err(Error::Domain("h needs positive definite T and Y".into()));
    }
    Ok(())
}

/// `x^e`, with a fast path for integer and half-integer `e`.
#[derive(Debug, Clone, Copy)]
struct Power {
    e: f64,
    half: Option<i32>,
}

impl Power {
    fn new(e: f64) -> Self {
        let twice = 2.0 * e;
        let half = (twice.fract() == 0.0 && twice.abs() < 200.0).then_some(twice as i32);
        Self { e, half }
    }

    #[inline]
    fn apply(&self, x: f64) -> f64 {
        match self.half {
            Some(t) if t % 2 == 0 => x.powi(t / 2),
            Some(t) => x.powi(t.div_euclid(2)) * x.sqrt(),
            None => x.powf(self.e),
        }
    }
}

/// Moments with a fixed rule.
pub fn cone_moments_fixed(
    alpha: f64,
    beta: f64,
    t: &SymMat2,
    y: &SymMat2,
    rule: HRule,
    degree: u8,
) -> Result<ConeMoments> {
    check_params(alpha, beta, t, y, 0.0)?;
    let r = t.sqrt()?;
    let ty = y.congruence(&r.to_mat());
    let eig = ty.eigen();
    let (l1, l2) = (eig.lambda[0], eig.lambda[1]);
    let b: Mat2 = mat_mul(&r.to_mat(), &eig.o);
    let lag = gauss_laguerre(rule.laguerre, beta - 1.0);
    let geg = gauss_gegenbauer(rule.gegenbauer, beta - 1.5);
    let pw = Power::new(alpha - 1.5);
    let c1 = 2.0 * PI * l1;
    let c2 = 2.0 * PI * l2;
    let mons = monomials(degree);
    let mut values = vec![0.0; mons.len()];
    let mut mags = vec![0.0; mons.len()];
    let d = degree as usize;
    if degree > 15 {
        return Err(Error::Domain(format!("moment degree {degree} exceeds 15")));
    }
    let mut pow = [[0.0f64; 16]; 3];
    // Gegenbauer nodes are symmetric; pair ±w when no odd moments are needed
    let half = degree == 0 && rule.gegenbauer % 2 == 0;
    let nw = if half { rule.gegenbauer / 2 } else { rule.gegenbauer };
    for (u, wu) in lag.nodes.iter().zip(&lag.weights) {
        let s = u / c1;
        for (v, wv) in lag.nodes.iter().zip(&lag.weights) {
            let tt = v / c2;
            let a = (2.0 + s) * (2.0 + tt);
            let bst = s * tt;
            let root = bst.sqrt();
            for k in 0..nw {
                let (w, ww) = (geg.nodes[k], geg.weights[k]);
                let mut f = wu * wv * ww * pw.apply(a - bst * w * w);
                if half {
                    f *= 2.0;
                }
                if degree == 0 {
                    values[0] += f;
                    continue;
                }
                // V = B S ᵀB
                let s12 = root * w;
                let sm = [[s, s12], [s12, tt]];
                let mut vm = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in i..2 {
                        vm[i][j] = (0..2)
                            .map(|p| (0..2).map(|q| b[i][p] * sm[p][q] * b[j][q]).sum::<f64>())
                            .sum();
                    }
                }
                let vs = [vm[0][0], vm[0][1], vm[1][1]];
                for (c, pv) in pow.iter_mut().enumerate() {
                    pv[0] = 1.0;
                    for e in 1..=d {
                        pv[e] = pv[e - 1] * vs[c];
                    }
                }
                for (idx, mu) in mons.iter().enumerate() {
                    let m = pow[0][mu[0] as usize] * pow[1][mu[1] as usize] * pow[2][mu[2] as usize];
                    values[idx] += f * m;
                    mags[idx] += (f * m).abs();
                }
            }
        }
    }
    let pref = t.det().powf(alpha + beta - 1.5) * c1.powf(-beta) * c2.powf(-beta);
    for v in values.iter_mut() {
        *v *= pref;
    }
    for m in mags.iter_mut() {
        *m *= pref;
    }
    if degree == 0 {
        mags[0] = values[0].abs();
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("cone moments".into()));
    }
    let n = values.len();
    Ok(ConeMoments {
        degree,
        values,
        magnitudes: mags,
        diffs: vec![0.0; n],
        rule,
    })
}

/// Rule refinement from `start` until consecutive moment vectors agree.
/// Returns the finer result, the largest scaled discrepancy and whether the
/// tolerance was met.
pub fn cone_moments_adaptive(
    alpha: f64,
    beta: f64,
    t: &SymMat2,
    y: &SymMat2,
    degree: u8,
    start: HRule,
    q: &QuadratureSpec,
) -> Result<(ConeMoments, f64, bool)> {
    cone_moments_refine(alpha, beta, t, y, degree, start, q, 1.0)
}

/// As [`cone_moments_adaptive`] with the relative tolerance multiplied by
/// `loosen ≥ 1`. Series evaluations use this for terms that are small
/// against the sum, with the reported discrepancy still relative to the
/// term itself.
#[allow(clippy::too_many_arguments)]
pub fn cone_moments_refine(
    alpha: f64,
    beta: f64,
    t: &SymMat2,
    y: &SymMat2,
    degree: u8,
    start: HRule,
    q: &QuadratureSpec,
    loosen: f64,
) -> Result<(ConeMoments, f64, bool)> {
    q.validate()?;
    check_params(alpha, beta, t, y, q.boundary_exponent_guard)?;
    let target = q.rel_tol * loosen.max(1.0);
    let mut rule = start;
    let mut prev = cone_moments_fixed(alpha, beta, t, y, rule, degree)?;
    let mut last_err = f64::INFINITY;
    for _ in 0..q.max_depth {
        rule = rule.refined();
        let mut cur = cone_moments_fixed(alpha, beta, t, y, rule, degree)?;
        let mut worst: f64 = 0.0;
        for i in 0..cur.values.len() {
            let scale = cur.values[i].abs().max(cur.magnitudes[i]);
            let diff = (cur.values[i] - prev.values[i]).abs();
            cur.diffs[i] = diff;
            worst = worst.max(diff / scale.max(q.abs_tol));
        }
        last_err = worst;
        prev = cur;
        if worst <= target {
            return Ok((prev, worst, true));
        }
    }
    Ok((prev, last_err, false))
}

/// `h_{α,β}(T;Y)` with a fixed rule.
pub fn h_integral_fixed(alpha: f64, beta: f64, t: &SymMat2, y: &SymMat2, rule: HRule) -> Result<f64> {
    let m = cone_moments_fixed(alpha, beta, t, y, rule, 0)?;
    Ok((-2.0 * PI * t.trace_prod(y)).exp() * m.values[0])
}

/// `h_{α,β}(T;Y)` by rule refinement, reporting non-convergence in the result.
pub fn h_integral_estimate(
    alpha: f64,
    beta: f64,
    t: &SymMat2,
    y: &SymMat2,
    q: &QuadratureSpec,
) -> Result<HValue> {
    h_integral_loose(alpha, beta, t, y, q, 1.0)
}

/// [`h_integral_estimate`] with the tolerance multiplied by `loosen`.
pub fn h_integral_loose(
    alpha: f64,
    beta: f64,
    t: &SymMat2,
    y: &SymMat2,
    q: &QuadratureSpec,
    loosen: f64,
) -> Result<HValue> {
    let (m, err, converged) = cone_moments_refine(alpha, beta, t, y, 0, HRule::START, q, loosen)?;
    let value = (-2.0 * PI * t.trace_prod(y)).exp() * m.values[0];
    Ok(HValue {
        value,
        est_error: err * value.abs(),
        rule: m.rule,
        converged,
    })
}

/// `h_{α,β}(T;Y)`; fails if the tolerance is not reached within
/// `max_depth` refinements.
pub fn h_integral(alpha: f64, beta: f64, t: &SymMat2, y: &SymMat2, q: &QuadratureSpec) -> Result<HValue> {
    let v = h_integral_estimate(alpha, beta, t, y, q)?;
    if !v.converged {
        return Err(Error::Tolerance {
            what: "h integral".into(),
            estimate: v.est_error / v.value.abs(),
            target: q.rel_tol,
        });
    }
    Ok(v)
}

/// Fitted constants of `det(TY) h_{k+1,1}(T;Y) ≤ C (1 + det(Y)^{−b}) e^{−π tr(TY)}`
/// over a grid of diagonal `Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShimuraFit {
    pub k: i64,
    /// With `r = det(TY) h e^{π tr TY}` and `C₀` its maximum over grid
    /// points with `det Y ≥ δ = 0.1`: the least `b ≥ 0` such that
    /// `r ≤ C₀ det(Y)^{−b}` on the rest of the grid. Splitting at `δ` rather
    /// than 1 keeps `ln(1/det Y) ≥ ln 10`, so points just below the split
    /// cannot inflate the slope.
    pub b: f64,
    /// Smallest `C` making the bound hold on the grid for this `b`.
    pub c: f64,
    pub grid_points: usize,
    /// Always `"fitted"`: the constants are empirical.
    pub provenance: String,
}

impl ShimuraFit {
    /// `C (1 + det(Y)^{−b}) e^{−π tr(TY)}`.
    pub fn bound(&self, t: &SymMat2, y: &SymMat2) -> f64 {
        self.c * (1.0 + y.det().powf(-self.b)) * (-PI * t.trace_prod(y)).exp()
    }
}

/// Fits `b` and `C` on the grid `Y = T^{−1/2} diag(y₁, y₂) T^{−1/2}`,
/// `y₁, y₂ ∈ ys`. `h(T;Y)` depends on `Y` only through the eigenvalues of
/// `T^{1/2} Y T^{1/2}`, so the grid samples every `Y` with eigenvalues in
/// the range of `ys`; for `T = I` it is the diagonal grid.
pub fn fit_shimura_bound(k: i64, t: &SymMat2, ys: &[f64], q: &QuadratureSpec) -> Result<ShimuraFit> {
    if ys.len() < 2 {
        return Err(Error::Domain("need at least two grid values".into()));
    }
    let alpha = (k + 1) as f64;
    let r_inv = t.sqrt()?.inverse()?.to_mat();
    let mut pts = Vec::new();
    for &y1 in ys {
        for &y2 in ys {
            let y = SymMat2::diag(y1, y2).congruence(&r_inv);
            let h = h_integral_estimate(alpha, 1.0, t, &y, q)?;
            let r = t.det() * y.det() * h.value * (PI * t.trace_prod(&y)).exp();
            pts.push((y.det(), r));
        }
    }
    // C₀ = max r over det Y ≥ δ; b is the least exponent with
    // r ≤ C₀ det(Y)^{−b} at every grid point with det Y < δ
    const SPLIT: f64 = 0.1;
    let c0 = pts.iter().filter(|p| p.0 >= SPLIT).map(|p| p.1).fold(0.0, f64::max);
    if c0 <= 0.0 || pts.iter().all(|p| p.0 >= SPLIT) {
        return Err(Error::Domain(format!("grid needs points on both sides of det(Y) = {SPLIT}")));
    }
    let b = pts
        .iter()
        .filter(|p| p.0 < SPLIT)
        .map(|&(d, r)| (r / c0).ln() / (1.0 / d).ln())
        .fold(0.0, f64::max);
    let c = pts
        .iter()
        .map(|&(d, r)| r / (1.0 + d.powf(-b)))
        .fold(0.0, f64::max);
    Ok(ShimuraFit {
        k,
        b,
        c,
        grid_points: pts.len(),
        provenance: "fitted".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_indexing() {
        for (i, mu) in monomials(5).into_iter().enumerate() {
            assert_eq!(monomial_index(mu), i);
        }
    }
}
