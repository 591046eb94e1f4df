//! Closed-form iterated lowering of `Ψ_k(T;·)`.
//!
//! Writing `U = T + V`,
//!
//! `Ψ_k(T;Z) = e^{2πi tr TZ} det(T) det(Y) K(Y)`,
//! `K(Y) = ∫_{V>0} det(V+2T)^{k−1/2} det(V)^{−1/2} e^{−2π tr YV} dV`.
//!
//! `∂/∂Z̄` kills the holomorphic exponential and acts on functions of `Y` as
//! `(i/2) ∂/∂Y`, so every entry of `L^d Ψ` is `e^{2πi tr TZ}` times a
//! polynomial in `y11, y12, y22` and the moments `K_μ = ∫ … V^μ …`, with
//! `∂_{ab} K_μ = −2π K_{μ + e_ab}` in the symmetric convention.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::diffops::sym_index;
use super::hint::{cone_moments_adaptive, cone_moments_fixed, monomial_index, ConeMoments, HRule, QuadratureSpec};
use super::matrix::{SiegelPoint, SymMat2};
use crate::error::Result;

/// `(exponents of y11, y12, y22; exponents of v11, v12, v22)`.
type Key = ([u8; 3], [u8; 3]);

/// A scalar function `Σ c · y^p · K_μ(Y)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Jet {
    terms: BTreeMap<Key, Complex64>,
}

impl Jet {
    fn add(&mut self, key: Key, c: Complex64) {
        let e = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `det(Y)·K_0`, up to the constant `det T`.
    pub fn seed() -> Self {
        let mut j = Self::default();
        j.add(([1, 0, 1], [0, 0, 0]), Complex64::new(1.0, 0.0));
        j.add(([0, 2, 0], [0, 0, 0]), Complex64::new(-1.0, 0.0));
        j
    }

    pub fn max_moment_degree(&self) -> u8 {
        self.terms.keys().map(|(_, m)| m[0] + m[1] + m[2]).max().unwrap_or(0)
    }

    /// `∂_{ab}` in the symmetric convention.
    fn partial(&self, v: usize) -> Self {
        let fac = if v == 1 { 0.5 } else { 1.0 };
        let mut out = Self::default();
        for (&(p, mu), &c) in &self.terms {
            if p[v] > 0 {
                let mut q = p;
                q[v] -= 1;
                out.add((q, mu), c * (fac * p[v] as f64));
            }
            let mut nu = mu;
            nu[v] += 1;
            out.add((p, nu), c * (-2.0 * PI));
        }
        out
    }

    fn times_y(&self, v1: usize, v2: usize, c0: Complex64) -> Self {
        let mut out = Self::default();
        for (&(p, mu), &c) in &self.terms {
            let mut q = p;
            q[v1] += 1;
            q[v2] += 1;
            out.add((q, mu), c * c0);
        }
        out
    }

    fn extend(&mut self, o: Self) {
        for (k, c) in o.terms {
            self.add(k, c);
        }
    }

    /// The four entries of `L` applied to this scalar function:
    /// `(LG)_{ij} = (i/2) Σ_{k,m} Y_ik Y_jm ∂_{mk} G`.
    pub fn lower(&self) -> [Jet; 4] {
        let half_i = Complex64::new(0.0, 0.5);
        let partials = [self.partial(0), self.partial(1), self.partial(2)];
        let mut out: [Jet; 4] = Default::default();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Jet::default();
                for k in 0..2 {
                    for m in 0..2 {
                        let d = &partials[sym_index(m, k)];
                        acc.extend(d.times_y(sym_index(i, k), sym_index(j, m), half_i));
                    }
                }
                acc.terms.retain(|_, c| c.norm() != 0.0);
                out[2 * i + j] = acc;
            }
        }
        out
    }

    pub fn evaluate(&self, y: &SymMat2, moments: &ConeMoments) -> Complex64 {
        let ys = [y.m11, y.m12, y.m22];
        self.terms
            .iter()
            .map(|(&(p, mu), &c)| {
                let poly: f64 = (0..3).map(|v| ys[v].powi(p[v] as i32)).product();
                c * poly * moments.get(mu)
            })
            .sum()
    }
}

/// A jet flattened for repeated evaluation: `(coefficient, y exponents,
/// moment index)`.
type Compiled = Vec<(Complex64, [u8; 3], usize)>;

fn compile(j: &Jet) -> Compiled {
    j.terms.iter().map(|(&(p, mu), &c)| (c, p, monomial_index(mu))).collect()
}

/// `L^d Ψ` for `d = 0..=d_max` as symbolic jets.
#[derive(Debug, Clone)]
pub struct PsiJets {
    pub k: i64,
    levels: Vec<Vec<Jet>>,
    compiled: Vec<Vec<Compiled>>,
    max_y_exp: usize,
}

impl PsiJets {
    pub fn new(k: i64, d_max: u32) -> Self {
        let mut levels = vec![vec![Jet::seed()]];
        for _ in 0..d_max {
            let prev = levels.last().expect("nonempty");
            let next: Vec<Jet> = prev.iter().flat_map(|g| g.lower()).collect();
            levels.push(next);
        }
        let compiled: Vec<Vec<Compiled>> = levels.iter().map(|l| l.iter().map(compile).collect()).collect();
        let max_y_exp = levels
            .iter()
            .flatten()
            .flat_map(|j| j.terms.keys())
            .flat_map(|(p, _)| p.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        Self {
            k,
            levels,
            compiled,
            max_y_exp,
        }
    }

    pub fn d_max(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn level(&self, d: u32) -> &[Jet] {
        &self.levels[d as usize]
    }

    /// Moments needed to evaluate levels up to `d_max`.
    pub fn moment_degree(&self) -> u8 {
        self.levels.last().map_or(0, |l| l.iter().map(Jet::max_moment_degree).max().unwrap_or(0))
    }

    pub fn moments_fixed(&self, t: &SymMat2, y: &SymMat2, rule: HRule) -> Result<ConeMoments> {
        cone_moments_fixed((self.k + 1) as f64, 1.0, t, y, rule, self.moment_degree())
    }

    pub fn moments_adaptive(
        &self,
        t: &SymMat2,
        y: &SymMat2,
        start: HRule,
        q: &QuadratureSpec,
    ) -> Result<(ConeMoments, f64, bool)> {
        cone_moments_adaptive((self.k + 1) as f64, 1.0, t, y, self.moment_degree(), start, q)
    }

    fn y_powers(&self, y: &SymMat2) -> [Vec<f64>; 3] {
        let ys = [y.m11, y.m12, y.m22];
        std::array::from_fn(|v| {
            let mut p = vec![1.0; self.max_y_exp + 1];
            for e in 1..p.len() {
                p[e] = p[e - 1] * ys[v];
            }
            p
        })
    }

    /// `L^d Ψ_k(T;Z)` as a flat tensor (see
    /// [`super::diffops::fd_lowering_tensor`] for the index order).
    pub fn evaluate(&self, d: u32, t: &SymMat2, z: &SiegelPoint, moments: &ConeMoments) -> Vec<Complex64> {
        let c = holomorphic_exponential(t, z) * t.det();
        let pw = self.y_powers(&z.y);
        self.compiled[d as usize]
            .iter()
            .map(|jet| {
                let s: Complex64 = jet
                    .iter()
                    .map(|&(coef, p, mu)| {
                        coef * (pw[0][p[0] as usize] * pw[1][p[1] as usize] * pw[2][p[2] as usize] * moments.values[mu])
                    })
                    .sum();
                c * s
            })
            .collect()
    }

    /// Entrywise error bound `Σ |c y^p| (δK_μ + ε |K_μ|)` with the modulus of
    /// the prefactor, where `δK_μ` are the refinement differences of the
    /// moments and the `ε` term covers cancellation among the terms.
    pub fn evaluate_error(&self, d: u32, t: &SymMat2, z: &SiegelPoint, moments: &ConeMoments) -> Vec<f64> {
        const EPS: f64 = 1e-15;
        let c = holomorphic_exponential(t, z).norm() * t.det();
        let pw = self.y_powers(&z.y);
        self.compiled[d as usize]
            .iter()
            .map(|jet| {
                let s: f64 = jet
                    .iter()
                    .map(|&(coef, p, mu)| {
                        coef.norm()
                            * (pw[0][p[0] as usize] * pw[1][p[1] as usize] * pw[2][p[2] as usize]).abs()
                            * (moments.diffs[mu] + EPS * moments.values[mu].abs())
                    })
                    .sum();
                c * s
            })
            .collect()
    }
}

/// `e^{2πi tr(TZ)}`.
pub fn holomorphic_exponential(t: &SymMat2, z: &SiegelPoint) -> Complex64 {
    let tr = Complex64::new(t.trace_prod(&z.x), t.trace_prod(&z.y));
    (Complex64::new(0.0, 2.0 * PI) * tr).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowering_det_power() {
        // L(det Y) = Y (i/2)(det Y · Y^{-1}) Y = (i/2) det(Y) Y
        let mut g = Jet::default();
        g.add(([1, 0, 1], [0, 0, 0]), Complex64::new(1.0, 0.0));
        g.add(([0, 2, 0], [0, 0, 0]), Complex64::new(-1.0, 0.0));
        let l = g.lower();
        let y = SymMat2::new(1.3, 0.4, 0.9);
        let m = ConeMoments {
            degree: 1,
            values: vec![1.0, 0.0, 0.0, 0.0],
            magnitudes: vec![1.0; 4],
            diffs: vec![0.0; 4],
            rule: HRule::START,
        };
        for i in 0..2 {
            for j in 0..2 {
                let want = Complex64::new(0.0, 0.5) * y.det() * y.entry(i, j);
                assert!((l[2 * i + j].evaluate(&y, &m) - want).norm() < 1e-14);
            }
        }
    }
}
