//! One-dimensional quadrature: double-exponential rules for integrals with
//! endpoint singularities and Gauss rules (Golub–Welsch) for the fixed-node
//! tensor-product integrals of the degree-2 kernel.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::ln_gamma;
use crate::summation::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub est_error: f64,
    /// Number of step halvings performed.
    pub levels: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_level: u32,
}

impl Default for DeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            abs_tol: 1e-300,
            max_level: 9,
        }
    }
}

const T_LIMIT: f64 = 7.0;

/// Sum of `f` over the exp-sinh abscissae `a + exp(π/2 sinh t)` at step `h`.
fn exp_sinh_level<F: Fn(f64) -> f64>(f: &F, a: f64, h: f64) -> Result<f64> {
    let mut acc = NeumaierSum::new();
    let n = (T_LIMIT / h).ceil() as i64;
    for k in -n..=n {
        let t = k as f64 * h;
        let e = FRAC_PI_2 * t.sinh();
        if e > 700.0 {
            continue;
        }
        let dist = e.exp();
        if dist == 0.0 {
            continue;
        }
        let x = a + dist;
        if x == a {
            continue;
        }
        let w = FRAC_PI_2 * t.cosh() * dist;
        let fx = f(x);
        if !fx.is_finite() {
            if w < 1e-250 || dist > 1e250 {
                continue;
            }
            return Err(Error::NonFinite(format!("exp-sinh integrand at x = {x:e}")));
        }
        acc.add(fx * w);
    }
    Ok(acc.value() * h)
}

/// `∫_a^∞ f(x) dx` for integrands that decay at least exponentially and may
/// carry an integrable algebraic singularity at `a`.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, opts: DeOptions) -> Result<QuadResult> {
    let mut h = 0.5;
    let mut last_diff = 0.0;
    let mut prev = exp_sinh_level(&f, a, h)?;
    for level in 1..=opts.max_level {
        h *= 0.5;
        let cur = exp_sinh_level(&f, a, h)?;
        let diff = (cur - prev).abs();
        // the error roughly squares from one level to the next
        let err = if last_diff > 0.0 {
            diff.min(diff * diff / last_diff)
        } else {
            diff
        };
        last_diff = diff;
        if level >= 2 && err <= opts.abs_tol.max(opts.rel_tol * cur.abs()) {
            return Ok(QuadResult {
                value: cur,
                est_error: err,
                levels: level,
            });
        }
        prev = cur;
    }
    let est = (prev.abs() * opts.rel_tol).max(opts.abs_tol);
    Err(Error::Tolerance {
        what: "exp-sinh quadrature".into(),
        estimate: est,
        target: opts.rel_tol,
    })
}

fn tanh_sinh_level<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, h: f64) -> Result<f64> {
    let half = 0.5 * (b - a);
    let mut acc = NeumaierSum::new();
    let n = (T_LIMIT / h).ceil() as i64;
    for k in -n..=n {
        let t = k as f64 * h;
        let u = FRAC_PI_2 * t.sinh();
        if u.abs() > 350.0 {
            continue;
        }
        // distance to the nearer endpoint, computed without cancellation
        let edge = 1.0 / (1.0 + (2.0 * u.abs()).exp());
        let dist = 2.0 * half * edge;
        if dist == 0.0 {
            continue;
        }
        let x = if u < 0.0 { a + dist } else { b - dist };
        if x <= a || x >= b {
            continue;
        }
        let ch = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (ch * ch);
        let fx = f(x);
        if !fx.is_finite() {
            if w < 1e-250 {
                continue;
            }
            return Err(Error::NonFinite(format!("tanh-sinh integrand at x = {x:e}")));
        }
        acc.add(fx * w);
    }
    Ok(acc.value() * h)
}

/// `∫_a^b f(x) dx` with possible integrable endpoint singularities.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: DeOptions) -> Result<QuadResult> {
    if !(a < b) {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    let mut h = 0.5;
    let mut last_diff = 0.0;
    let mut prev = tanh_sinh_level(&f, a, b, h)?;
    for level in 1..=opts.max_level {
        h *= 0.5;
        let cur = tanh_sinh_level(&f, a, b, h)?;
        let diff = (cur - prev).abs();
        // the error roughly squares from one level to the next
        let err = if last_diff > 0.0 {
            diff.min(diff * diff / last_diff)
        } else {
            diff
        };
        last_diff = diff;
        if level >= 2 && err <= opts.abs_tol.max(opts.rel_tol * cur.abs()) {
            return Ok(QuadResult {
                value: cur,
                est_error: err,
                levels: level,
            });
        }
        prev = cur;
    }
    Err(Error::Tolerance {
        what: "tanh-sinh quadrature".into(),
        estimate: (prev.abs() * opts.rel_tol).max(opts.abs_tol),
        target: opts.rel_tol,
    })
}

/// Nodes and weights of an `n`-point Gauss rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = NeumaierSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(*x));
        }
        acc.value()
    }
}

/// Orthonormal recurrence `b_{j+1} p_{j+1} = (x − a_j) p_j − b_j p_{j−1}`:
/// returns `(p_n(x), p_n′(x), Σ_{j<n} p_j(x)²)`.
fn recurrence(diag: &[f64], offdiag: &[f64], x: f64) -> (f64, f64, f64) {
    let n = diag.len();
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    let mut sum = 0.0;
    for j in 0..n {
        sum += p * p;
        let b_j = if j == 0 { 0.0 } else { offdiag[j - 1] };
        let b_next = if j + 1 < n { offdiag[j] } else { 1.0 };
        let p_next = ((x - diag[j]) * p - b_j * p_prev) / b_next;
        let d_next = (p + (x - diag[j]) * d - b_j * d_prev) / b_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d, sum)
}

/// Golub–Welsch for the starting nodes, then Newton refinement of each node
/// on the three-term recurrence and Christoffel weights
/// `μ₀ / Σ_{j<n} p_j(x)²`. The eigenvector route alone loses accuracy for
/// some sizes.
fn golub_welsch(diag: &[f64], offdiag: &[f64], mu0: f64) -> GaussRule {
    let n = diag.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = offdiag[i];
            m[(i + 1, i)] = offdiag[i];
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let (p, d, _) = recurrence(diag, offdiag, *x);
            if d == 0.0 || !d.is_finite() {
                break;
            }
            let dx = p / d;
            *x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-300) {
                break;
            }
        }
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let (_, _, s) = recurrence(diag, offdiag, x);
            if s.is_finite() {
                mu0 / s
            } else {
                0.0
            }
        })
        .collect();
    GaussRule { nodes, weights }
}

type RuleKey = (u8, usize, u64);

fn rule_cache() -> &'static Mutex<HashMap<RuleKey, Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached<F: FnOnce() -> GaussRule>(key: RuleKey, build: F) -> Arc<GaussRule> {
    if let Some(r) = rule_cache().lock().expect("rule cache poisoned").get(&key) {
        return r.clone();
    }
    let rule = Arc::new(build());
    rule_cache()
        .lock()
        .expect("rule cache poisoned")
        .entry(key)
        .or_insert(rule)
        .clone()
}

/// Generalized Gauss–Laguerre rule for the weight `x^α e^{−x}` on `(0, ∞)`.
pub fn gauss_laguerre(n: usize, alpha: f64) -> Arc<GaussRule> {
    assert!(n >= 1 && alpha > -1.0);
    cached((0, n, alpha.to_bits()), || {
        let diag: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + alpha + 1.0).collect();
        let off: Vec<f64> = (1..n)
            .map(|i| (i as f64 * (i as f64 + alpha)).sqrt())
            .collect();
        golub_welsch(&diag, &off, ln_gamma(alpha + 1.0).exp())
    })
}

/// Gauss rule for the symmetric Jacobi weight `(1 − x²)^a` on `(−1, 1)`.
/// The Chebyshev case `a = −1/2` uses the closed form.
pub fn gauss_gegenbauer(n: usize, a: f64) -> Arc<GaussRule> {
    assert!(n >= 1 && a > -1.0);
    cached((1, n, a.to_bits()), || {
        if a == -0.5 {
            let nodes = (1..=n)
                .rev()
                .map(|j| ((2 * j - 1) as f64 * PI / (2 * n) as f64).cos())
                .collect();
            return GaussRule {
                nodes,
                weights: vec![PI / n as f64; n],
            };
        }
        let diag = vec![0.0; n];
        let off: Vec<f64> = (1..n)
            .map(|i| {
                let i = i as f64;
                let s = 2.0 * i + 2.0 * a;
                (i * (i + 2.0 * a) / ((s + 1.0) * (s - 1.0))).sqrt()
            })
            .collect();
        let mu0 = PI.sqrt() * (ln_gamma(a + 1.0) - ln_gamma(a + 1.5)).exp();
        golub_welsch(&diag, &off, mu0)
    })
}

pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    gauss_gegenbauer(n, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_sinh_handles_sqrt_singularity() {
        // ∫₀^∞ x^{-1/2} e^{-x} dx = √π
        let r = exp_sinh(|x| x.powf(-0.5) * (-x).exp(), 0.0, DeOptions::default()).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn tanh_sinh_inverse_sqrt() {
        let r = tanh_sinh(|x| 1.0 / x.sqrt(), 0.0, 1.0, DeOptions::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13, "{}", r.value);
    }

    #[test]
    fn laguerre_integrates_moments_exactly() {
        let rule = gauss_laguerre(20, 0.5);
        // ∫ x^{1/2} x^3 e^{-x} = Γ(4.5)
        let v = rule.integrate(|x| x.powi(3));
        let exact = ln_gamma(4.5).exp();
        assert!((v / exact - 1.0).abs() < 1e-13);
    }

    #[test]
    fn gegenbauer_matches_closed_moment() {
        // ∫ (1-x²)^{1/2} x² dx = π/8
        let rule = gauss_gegenbauer(8, 0.5);
        assert!((rule.integrate(|x| x * x) - PI / 8.0).abs() < 1e-14);
        let cheb = gauss_gegenbauer(8, -0.5);
        assert!((cheb.integrate(|x| x * x) - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn laguerre_low_moments_every_size() {
        for n in 2..=128 {
            let rule = gauss_laguerre(n, 0.0);
            for j in 0..4.min(2 * n - 1) {
                let v = rule.integrate(|x| x.powi(j as i32));
                let exact = ln_gamma(j as f64 + 1.0).exp();
                assert!((v / exact - 1.0).abs() < 1e-12, "n={n} j={j} {v}");
            }
        }
    }
}
