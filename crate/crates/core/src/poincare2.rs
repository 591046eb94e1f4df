//! Truncated degree-2 Poincaré series
//!
//! `P(Z) = Σ_{M ∈ Δ\Γ, height(M) ≤ H} (Ψ_k(T;·) Φ_ℓ(T′;·))|_{k+ℓ} M (Z)`
//!
//! split into the `C = 0` and `C ≠ 0` strata, with a majorant tail report,
//! the `y₀` search, the non-vanishing scan and the lowering depth probe.
//!
//! Cost is one `h` integral per coset. Terms are first estimated with a
//! fixed cheap rule; each is then refined until its error is below
//! `rel_tol · max(|term|, Σ|terms|/N)`, so the tolerance on the sum is met
//! without resolving negligible terms to full relative precision.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::siegel_kernel::{
    apply_lowering_vec, cone_moments_refine, fit_shimura_bound, h_integral_fixed,
    h_integral_loose, holomorphic_exponential, CMat2, ConeMoments, HRule, HValue, PsiJets, QuadratureSpec,
    ShimuraFit, SiegelPoint, SymMat2,
};
use crate::sp2_cosets::{enumerate_delta_cosets, SymplecticRep};
use crate::summation::ComplexSum;

/// Tag carried by every depth-probe report: almost-holomorphy of the series
/// is only known under the generalized Ramanujan conjecture.
pub const ASSUMPTION: &str = "GRC-conditional";

const CHUNK: usize = 256;
const MAX_LOOSEN: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P2Params {
    pub k: i64,
    pub l: i64,
    pub t: SymMat2,
    pub t_prime: SymMat2,
    pub height: i64,
    pub quadrature: QuadratureSpec,
}

impl P2Params {
    /// Parameters with the series tolerance `1e−9`.
    pub fn new(k: i64, l: i64, t: SymMat2, t_prime: SymMat2, height: i64) -> Self {
        Self {
            k,
            l,
            t,
            t_prime,
            height,
            quadrature: QuadratureSpec {
                rel_tol: 1e-9,
                ..QuadratureSpec::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (w, name) in [(self.k, "k"), (self.l, "l")] {
            if w <= 0 || w % 2 != 0 {
                return Err(Error::Domain(format!("{name} must be a positive even integer, got {w}")));
            }
        }
        for (m, name) in [(&self.t, "T"), (&self.t_prime, "T'")] {
            if !m.is_positive_definite() || !m.is_half_integral() {
                return Err(Error::Domain(format!(
                    "{name} must be positive definite and half-integral, got {m:?}"
                )));
            }
        }
        if self.height < 1 {
            return Err(Error::Domain(format!("height must be at least 1, got {}", self.height)));
        }
        self.quadrature.validate()
    }

    fn kappa(&self) -> i32 {
        (self.k + self.l) as i32
    }

    fn alpha(&self) -> f64 {
        (self.k + 1) as f64
    }
}

/// A coset representative pulled back to `Z`.
#[derive(Debug, Clone, Copy)]
struct Pulled {
    c_zero: bool,
    shell: bool,
    p: CMat2,
    p_det: Complex64,
    z: SiegelPoint,
    /// Eigenvalues of `T^{1/2} Y′ T^{1/2}`.
    lambda: [f64; 2],
}

fn pull_back(reps: &[SymplecticRep], z: &SiegelPoint, t: &SymMat2, height: i64) -> Result<Vec<Pulled>> {
    let r = t.sqrt()?.to_mat();
    reps.par_iter()
        .map(|g| {
            let p = z.automorphy(g);
            let zp = z.act(g)?;
            Ok(Pulled {
                c_zero: g.c_is_zero(),
                shell: g.height() == height,
                p,
                p_det: p.det(),
                z: zp,
                lambda: zp.y.congruence(&r).eigen().lambda,
            })
        })
        .collect()
}

/// `|det P|^{−κ} det(T) det(Y′) e^{−2π tr T′Y′}`: the factor turning `h`
/// into the modulus of a term.
fn h_weight(p: &P2Params, c: &Pulled, kappa: i32) -> f64 {
    c.p_det.norm().powi(-kappa) * p.t.det() * c.z.y.det() * (-2.0 * PI * p.t_prime.trace_prod(&c.z.y)).exp()
}

/// `h` values keyed by `(det T, λ₁, λ₂)`, which determine `h(T;Y)`; the low
/// mantissa bits are dropped so that congruent arguments share an entry.
#[derive(Default)]
struct HCache {
    map: Mutex<HashMap<[u64; 3], HValue>>,
}

impl HCache {
    fn key(t: &SymMat2, lambda: [f64; 2]) -> [u64; 3] {
        [t.det().to_bits() >> 8, lambda[0].to_bits() >> 8, lambda[1].to_bits() >> 8]
    }

    fn get(&self, key: &[u64; 3], needed: f64) -> Option<HValue> {
        let m = self.map.lock().expect("cache lock");
        m.get(key).copied().filter(|v| v.converged && v.est_error <= needed)
    }

    fn put(&self, key: [u64; 3], v: HValue) {
        self.map.lock().expect("cache lock").insert(key, v);
    }
}

/// Per-term loosening factors `(Σ m)/(N m_i)`, clamped to `[1, 10⁶]`, from
/// cheap magnitudes.
fn loosening(mags: &[f64]) -> Vec<f64> {
    let n = mags.len().max(1) as f64;
    let mean = mags.iter().sum::<f64>() / n;
    mags.iter()
        .map(|&m| if m > 0.0 { (mean / m).clamp(1.0, MAX_LOOSEN) } else { MAX_LOOSEN })
        .collect()
}

/// Two-stage `h_{k+1,1}(T;Y′)` for every coset; `kappa` sets the weights
/// used to decide how far each term needs refining.
fn coset_h(p: &P2Params, pulled: &[Pulled], kappa: i32, cache: &HCache) -> Result<Vec<HValue>> {
    let alpha = p.alpha();
    let cheap: Vec<f64> = pulled
        .par_iter()
        .map(|c| h_integral_fixed(alpha, 1.0, &p.t, &c.z.y, HRule::START))
        .collect::<Result<_>>()?;
    let mags: Vec<f64> = pulled.iter().zip(&cheap).map(|(c, h)| h_weight(p, c, kappa) * h.abs()).collect();
    let loosen = loosening(&mags);
    pulled
        .par_iter()
        .zip(loosen)
        .zip(cheap)
        .map(|((c, lo), h1)| {
            let key = HCache::key(&p.t, c.lambda);
            if let Some(v) = cache.get(&key, p.quadrature.rel_tol * lo * h1.abs()) {
                return Ok(v);
            }
            let v = h_integral_loose(alpha, 1.0, &p.t, &c.z.y, &p.quadrature, lo)?;
            if !v.converged {
                return Err(Error::Tolerance {
                    what: format!("h integral at Y' = {:?}", c.z.y),
                    estimate: v.est_error / v.value.abs(),
                    target: p.quadrature.rel_tol * lo,
                });
            }
            cache.put(key, v);
            Ok(v)
        })
        .collect()
}

/// Log-spaced eigenvalue grid covering the pulled-back points.
fn fit_grid(t: &SymMat2, pulled: &[Pulled]) -> Vec<f64> {
    // the fit needs grid points on both sides of its det(Y) split, even when
    // every coset has a large Y′
    let lo = (pulled.iter().map(|c| c.lambda[0]).fold(f64::INFINITY, f64::min) / 1.5).min(0.1 / (1.0 + t.det()));
    let hi = pulled
        .iter()
        .map(|c| c.lambda[1])
        .fold(4.0f64, f64::max)
        .max(2.0 * t.det().sqrt())
        * 1.5;
    let n = ((hi / lo).log10() * 6.0).ceil().max(6.0) as usize;
    (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect()
}

/// The fitted `(C, b)` for `Ψ_k(T;·)` over the range of the cosets.
fn fit_for(p: &P2Params, pulled: &[Pulled]) -> Result<ShimuraFit> {
    let q = QuadratureSpec {
        rel_tol: p.quadrature.rel_tol.max(1e-8),
        ..p.quadrature
    };
    fit_shimura_bound(p.k, &p.t, &fit_grid(&p.t, pulled), &q)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub shell_height: i64,
    /// `Σ |term|` over the cosets of height exactly `H`.
    pub shell_abs_sum: f64,
    /// Sum of the majorant `|det P|^{−k−ℓ} C (1 + det(Y′)^{−b}) e^{−π tr(T̃Y′)}`,
    /// `T̃ = T + T′`, over the same shell: the reported truncation estimate.
    pub shell_majorant: f64,
    /// Cosets whose term exceeds its majorant.
    pub majorant_violations: usize,
    pub max_majorant_ratio: f64,
    pub fit: ShimuraFit,
    /// `ℓ + k − 2b`; absolute convergence is only known when this is `≥ 6`.
    pub convergence_margin: f64,
    pub advisory: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct P2Value {
    pub k: i64,
    pub l: i64,
    pub height: i64,
    pub z: SiegelPoint,
    /// `c_zero + c_nonzero`.
    pub total: Complex64,
    pub c_zero: Complex64,
    pub c_nonzero: Complex64,
    pub cosets: usize,
    pub c_zero_cosets: usize,
    /// Sum of the per-term quadrature error estimates.
    pub quadrature_error: f64,
    pub tail: TailReport,
}

/// Cosets pulled back to one point together with their `h` values.
struct Prepared {
    pulled: Vec<Pulled>,
    h: Vec<HValue>,
    fit: ShimuraFit,
}

fn prepare(p: &P2Params, l_min: i64, z: &SiegelPoint, reps: &[SymplecticRep], cache: &HCache) -> Result<Prepared> {
    let pulled = pull_back(reps, z, &p.t, p.height)?;
    let kappa = (p.k + l_min) as i32;
    let h = coset_h(p, &pulled, kappa, cache)?;
    let fit = fit_for(p, &pulled)?;
    Ok(Prepared { pulled, h, fit })
}

/// `Ψ_k(T;Z′) Φ_ℓ(T′;Z′)` from a known `h`.
fn product_at(t: &SymMat2, t_prime: &SymMat2, z: &SiegelPoint, h: f64) -> Complex64 {
    let phase = Complex64::from_polar(1.0, 2.0 * PI * t.trace_prod(&z.x));
    t.det() * z.y.det() * h * phase * holomorphic_exponential(t_prime, z)
}

fn summarize(p: &P2Params, l: i64, z: &SiegelPoint, prep: &Prepared) -> P2Value {
    let kappa = (p.k + l) as i32;
    let tt = p.t + p.t_prime;
    let fit = &prep.fit;
    let (mut c0, mut cn) = (ComplexSum::new(), ComplexSum::new());
    let mut qerr = 0.0;
    let (mut shell_abs, mut shell_maj) = (0.0, 0.0);
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    let mut n0 = 0;
    for (c, h) in prep.pulled.iter().zip(&prep.h) {
        let auto = c.p_det.powi(-kappa);
        let term = auto * product_at(&p.t, &p.t_prime, &c.z, h.value);
        let scale = auto.norm();
        let major = scale * fit.c * (1.0 + c.z.y.det().powf(-fit.b)) * (-PI * tt.trace_prod(&c.z.y)).exp();
        let ratio = term.norm() / major;
        worst_ratio = worst_ratio.max(ratio);
        if ratio > 1.0 + 1e-6 {
            violations += 1;
        }
        qerr += h_weight(p, c, kappa) * h.est_error;
        if c.shell {
            shell_abs += term.norm();
            shell_maj += major;
        }
        if c.c_zero {
            n0 += 1;
            c0.add(term);
        } else {
            cn.add(term);
        }
    }
    let (c_zero, c_nonzero) = (c0.value(), cn.value());
    let margin = (l + p.k) as f64 - 2.0 * fit.b;
    let advisory = (margin < 6.0).then(|| {
        format!(
            "l + k - 2b = {margin:.3} < 6 with fitted b = {:.4}: absolute convergence is not covered by the majorant",
            fit.b
        )
    });
    P2Value {
        k: p.k,
        l,
        height: p.height,
        z: *z,
        total: c_zero + c_nonzero,
        c_zero,
        c_nonzero,
        cosets: prep.pulled.len(),
        c_zero_cosets: n0,
        quadrature_error: qerr,
        tail: TailReport {
            shell_height: p.height,
            shell_abs_sum: shell_abs,
            shell_majorant: shell_maj,
            majorant_violations: violations,
            max_majorant_ratio: worst_ratio,
            fit: fit.clone(),
            convergence_margin: margin,
            advisory,
        },
    }
}

/// `P⁽²⁾_{k,ℓ;T,T′}(Z)` truncated at `p.height`.
pub fn eval_p2(p: &P2Params, z: &SiegelPoint) -> Result<P2Value> {
    p.validate()?;
    let reps = enumerate_delta_cosets(p.height)?;
    eval_p2_with(p, z, &reps)
}

/// As [`eval_p2`] over a given set of representatives of height at most
/// `p.height`.
pub fn eval_p2_with(p: &P2Params, z: &SiegelPoint, reps: &[SymplecticRep]) -> Result<P2Value> {
    Ok(eval_p2_levels(p, &[p.l], z, reps)?.remove(0))
}

/// The series for several `ℓ` at once. `h` does not depend on `ℓ`, so every
/// coset integral is shared.
pub fn eval_p2_levels(p: &P2Params, ls: &[i64], z: &SiegelPoint, reps: &[SymplecticRep]) -> Result<Vec<P2Value>> {
    for &l in ls {
        P2Params { l, ..*p }.validate()?;
    }
    let l_min = *ls.iter().min().ok_or_else(|| Error::Domain("empty list of weights".into()))?;
    let cache = HCache::default();
    let prep = prepare(p, l_min, z, reps, &cache)?;
    Ok(ls.iter().map(|&l| summarize(p, l, z, &prep)).collect())
}

/// The shortcut closed form for the `C = 0` stratum at `Z = i y₀ I`,
///
/// `y₀² Σ_A det(A)^{−k−ℓ} h(T; y₀I) e^{−2π y₀ tr(T̃ A ᵀA)}`,
///
/// next to the stratum computed from the slash action. Its `h` is read as
/// the integral without the `e^{−2π tr TY}` factor; otherwise the identity
/// coset alone would not match. The two differ by `det T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CZeroDisplay {
    pub y0: f64,
    pub closed_form: f64,
    pub closed_form_times_det_t: f64,
    pub from_slash: Complex64,
}

pub fn c_zero_display(p: &P2Params, y0: f64) -> Result<CZeroDisplay> {
    p.validate()?;
    let z = SiegelPoint::scalar_imaginary(y0)?;
    let reps: Vec<SymplecticRep> = enumerate_delta_cosets(p.height)?
        .into_iter()
        .filter(SymplecticRep::c_is_zero)
        .collect();
    let from_slash = eval_p2_with(p, &z, &reps)?.c_zero;
    let y = SymMat2::scalar(y0);
    let h = h_integral_loose(p.alpha(), 1.0, &p.t, &y, &p.quadrature, 1.0)?.value;
    let k0 = h * (2.0 * PI * p.t.trace_prod(&y)).exp();
    let tt = p.t + p.t_prime;
    let kappa = p.kappa();
    let closed_form: f64 = y0
        * y0
        * reps
            .iter()
            .map(|g| {
                let det_a = (g.a[0][0] * g.a[1][1] - g.a[0][1] * g.a[1][0]) as f64;
                let aat = SymMat2::identity().congruence_int(&[[g.a[0][0], g.a[1][0]], [g.a[0][1], g.a[1][1]]]);
                det_a.powi(-kappa) * k0 * (-2.0 * PI * y0 * tt.trace_prod(&aat)).exp()
            })
            .sum::<f64>();
    Ok(CZeroDisplay {
        y0,
        closed_form,
        closed_form_times_det_t: closed_form * p.t.det(),
        from_slash,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KstCertificate {
    pub height: i64,
    pub y0: f64,
    /// `min |det(C·iy₀I + D)| − 1` over the `C ≠ 0` representatives.
    pub margin: f64,
    pub tightest: SymplecticRep,
    pub checked: usize,
    /// `(y, min |det|)` for every grid value tried, in increasing `y`.
    pub scan: Vec<(f64, f64)>,
}

fn min_det_at(reps: &[SymplecticRep], y: f64) -> Result<(f64, SymplecticRep)> {
    let z = SiegelPoint::scalar_imaginary(y)?;
    reps.iter()
        .map(|g| (z.automorphy(g).det().norm(), *g))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .ok_or_else(|| Error::Domain("no representatives with C != 0".into()))
}

/// Smallest grid `y₀` with `|det(C·iy₀I + D)| > 1` for every enumerated
/// representative with `C ≠ 0`. A finite certificate on the enumerated set,
/// not a proof of the general statement.
pub fn kst_y0_search(height: i64, y_grid: &[f64]) -> Result<KstCertificate> {
    let mut grid = y_grid.to_vec();
    if grid.iter().any(|&y| !(y > 1.0) || !y.is_finite()) {
        return Err(Error::Domain(format!("grid values must exceed 1, got {grid:?}")));
    }
    grid.sort_by(f64::total_cmp);
    let reps: Vec<SymplecticRep> = enumerate_delta_cosets(height)?
        .into_iter()
        .filter(|g| !g.c_is_zero())
        .collect();
    let mut scan = Vec::new();
    let mut last = None;
    for &y in &grid {
        let (m, g) = min_det_at(&reps, y)?;
        scan.push((y, m));
        if m > 1.0 {
            return Ok(KstCertificate {
                height,
                y0: y,
                margin: m - 1.0,
                tightest: g,
                checked: reps.len(),
                scan,
            });
        }
        last = Some((y, m, g));
    }
    let (y, m, g) = last.ok_or_else(|| Error::Domain("empty grid".into()))?;
    Err(Error::Certificate(format!(
        "at y = {y}, |det(C iyI + D)| = {m:.6} for C = {:?}, D = {:?}",
        g.c, g.d
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonvanishingRow {
    pub l: i64,
    pub c_zero: Complex64,
    pub c_nonzero: Complex64,
    pub total: Complex64,
    pub quadrature_error: f64,
    pub shell_majorant: f64,
    pub advisory: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonvanishingTable {
    pub k: i64,
    pub t: SymMat2,
    pub t_prime: SymMat2,
    pub height: i64,
    pub y0: f64,
    pub rows: Vec<NonvanishingRow>,
    /// `|c_nonzero|` strictly decreasing along the rows.
    pub c_nonzero_decreasing: bool,
    /// Every `c_zero` real (to `1e−9` relative) and positive.
    pub c_zero_positive: bool,
    /// Smallest `ℓ` from which every total is real and positive.
    pub crossover: Option<i64>,
}

fn real_positive(z: Complex64) -> bool {
    z.re > 0.0 && z.im.abs() <= 1e-9 * z.re
}

/// `P⁽²⁾(iy₀I)` and its strata for each `ℓ` in increasing order.
pub fn nonvanishing_scan(
    k: i64,
    t: SymMat2,
    t_prime: SymMat2,
    y0: f64,
    ls: &[i64],
    height: i64,
    q: &QuadratureSpec,
) -> Result<NonvanishingTable> {
    let mut ls = ls.to_vec();
    ls.sort_unstable();
    ls.dedup();
    let first = *ls.first().ok_or_else(|| Error::Domain("empty list of weights".into()))?;
    let p = P2Params {
        quadrature: *q,
        ..P2Params::new(k, first, t, t_prime, height)
    };
    p.validate()?;
    let z = SiegelPoint::scalar_imaginary(y0)?;
    let reps = enumerate_delta_cosets(height)?;
    let vals = eval_p2_levels(&p, &ls, &z, &reps)?;
    let rows: Vec<NonvanishingRow> = vals
        .into_iter()
        .map(|v| NonvanishingRow {
            l: v.l,
            c_zero: v.c_zero,
            c_nonzero: v.c_nonzero,
            total: v.total,
            quadrature_error: v.quadrature_error,
            shell_majorant: v.tail.shell_majorant,
            advisory: v.tail.advisory,
        })
        .collect();
    let c_nonzero_decreasing = rows.windows(2).all(|w| w[1].c_nonzero.norm() < w[0].c_nonzero.norm());
    let c_zero_positive = rows.iter().all(|r| real_positive(r.c_zero));
    let crossover = rows
        .iter()
        .rposition(|r| !real_positive(r.total))
        .map_or(Some(0), |i| (i + 1 < rows.len()).then_some(i + 1))
        .map(|i| rows[i].l);
    Ok(NonvanishingTable {
        k,
        t,
        t_prime,
        height,
        y0,
        rows,
        c_nonzero_decreasing,
        c_zero_positive,
        crossover,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeTarget {
    /// The truncated series.
    Series,
    /// The single seed `Ψ_k(T;·) Φ_ℓ(T′;·)`.
    BareProduct,
    /// The truncated series with `Ψ_k(T;·)` replaced by `Φ_k(T;·)`,
    /// differentiated by nested finite differences (`d ≤ 2`).
    HolomorphicSeries,
}

/// Ratios `‖L^d F‖ / |F|` averaged over a grid of points, with the Frobenius
/// norm of the `4^d` components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthProbe {
    pub target: ProbeTarget,
    pub assumption: String,
    pub k: i64,
    pub l: i64,
    pub height: i64,
    pub z_grid: Vec<SiegelPoint>,
    pub d: Vec<u32>,
    pub ratios: Vec<f64>,
    /// Relative size of the outermost shell of `L^d F`, standing in for the
    /// omitted tail.
    pub tail: Vec<f64>,
    /// Relative quadrature or differencing error of `L^d F`.
    pub quadrature: Vec<f64>,
    /// `max(tail, 10 × quadrature)`.
    pub noise_floor: Vec<f64>,
    /// First `d` whose ratio is at or below the noise floor.
    pub floor_reached_at: Option<u32>,
}

impl DepthProbe {
    pub fn strictly_decreasing(&self) -> bool {
        self.ratios.windows(2).all(|w| w[1] < w[0])
    }

    /// Every ratio exceeds `factor` times its noise floor.
    pub fn stays_above(&self, factor: f64) -> bool {
        self.ratios.iter().zip(&self.noise_floor).all(|(r, f)| *r > factor * f)
    }
}

/// Applies `X ↦ ᵀP X P` to every index pair of a flat `4^d` tensor.
fn transform_pairs(v: &mut [Complex64], d: u32, p: &CMat2) {
    let pm = &p.0;
    for r in 0..d {
        let stride = 4usize.pow(d - 1 - r);
        let block = 4 * stride;
        for base in (0..v.len()).step_by(block) {
            for off in 0..stride {
                let x = |a: usize, b: usize| v[base + (2 * a + b) * stride + off];
                let mut out = [Complex64::new(0.0, 0.0); 4];
                for i in 0..2 {
                    for j in 0..2 {
                        let mut s = Complex64::new(0.0, 0.0);
                        for a in 0..2 {
                            for b in 0..2 {
                                s += pm[a][i] * x(a, b) * pm[b][j];
                            }
                        }
                        out[2 * i + j] = s;
                    }
                }
                for (e, o) in out.into_iter().enumerate() {
                    v[base + e * stride + off] = o;
                }
            }
        }
    }
}

fn frob(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `L^d` of one slashed seed for `d = 0..=d_max`, and a bound on the
/// quadrature error of each level.
struct TermJets {
    levels: Vec<Vec<Complex64>>,
    errors: Vec<f64>,
}

fn term_jets(p: &P2Params, jets: &PsiJets, c: &Pulled, moments: &ConeMoments) -> TermJets {
    let kappa = p.kappa();
    let auto = c.p_det.powi(-kappa) * holomorphic_exponential(&p.t_prime, &c.z);
    let pn = c.p.norm();
    let mut levels = Vec::new();
    let mut errors = Vec::new();
    for d in 0..=jets.d_max() {
        let mut v = jets.evaluate(d, &p.t, &c.z, moments);
        for x in v.iter_mut() {
            *x *= auto;
        }
        transform_pairs(&mut v, d, &c.p);
        let err = jets.evaluate_error(d, &p.t, &c.z, moments);
        errors.push(err.iter().map(|a| a * a).sum::<f64>().sqrt() * auto.norm() * pn.powi(2 * d as i32));
        levels.push(v);
    }
    TermJets { levels, errors }
}

/// `L^d P` at one point: the full sum, the outermost shell and the summed
/// error bounds, per level.
struct LevelSums {
    total: Vec<Vec<Complex64>>,
    shell: Vec<Vec<Complex64>>,
    errors: Vec<f64>,
}

fn series_levels(p: &P2Params, jets: &PsiJets, pulled: &[Pulled]) -> Result<LevelSums> {
    let alpha = p.alpha();
    let degree = jets.moment_degree();
    let kappa = p.kappa();
    let cheap: Vec<f64> = pulled
        .par_iter()
        .map(|c| {
            let h = h_integral_fixed(alpha, 1.0, &p.t, &c.z.y, HRule::START)?;
            Ok(h_weight(p, c, kappa) * h.abs())
        })
        .collect::<Result<_>>()?;
    let loosen = loosening(&cheap);
    let sizes: Vec<usize> = (0..=jets.d_max()).map(|d| 4usize.pow(d)).collect();
    let zero = |s: &[usize]| -> Vec<Vec<Complex64>> { s.iter().map(|&n| vec![Complex64::new(0.0, 0.0); n]).collect() };
    let items: Vec<(&Pulled, f64)> = pulled.iter().zip(loosen).collect();
    let chunks: Vec<LevelSums> = items
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = LevelSums {
                total: zero(&sizes),
                shell: zero(&sizes),
                errors: vec![0.0; sizes.len()],
            };
            for &(c, lo) in chunk {
                let (m, err, ok) = cone_moments_refine(alpha, 1.0, &p.t, &c.z.y, degree, HRule::START, &p.quadrature, lo)?;
                if !ok {
                    return Err(Error::Tolerance {
                        what: format!("cone moments at Y' = {:?}", c.z.y),
                        estimate: err,
                        target: p.quadrature.rel_tol * lo,
                    });
                }
                let tj = term_jets(p, jets, c, &m);
                for (d, v) in tj.levels.iter().enumerate() {
                    for (a, x) in acc.total[d].iter_mut().zip(v) {
                        *a += x;
                    }
                    if c.shell {
                        for (a, x) in acc.shell[d].iter_mut().zip(v) {
                            *a += x;
                        }
                    }
                    acc.errors[d] += tj.errors[d];
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut out = LevelSums {
        total: zero(&sizes),
        shell: zero(&sizes),
        errors: vec![0.0; sizes.len()],
    };
    for ch in chunks {
        for d in 0..sizes.len() {
            for (a, x) in out.total[d].iter_mut().zip(&ch.total[d]) {
                *a += x;
            }
            for (a, x) in out.shell[d].iter_mut().zip(&ch.shell[d]) {
                *a += x;
            }
            out.errors[d] += ch.errors[d];
        }
    }
    Ok(out)
}

fn product_levels(p: &P2Params, jets: &PsiJets, z: &SiegelPoint) -> Result<LevelSums> {
    let c = pull_back(&[SymplecticRep::identity()], z, &p.t, 0)?[0];
    let (m, err, ok) = jets.moments_adaptive(&p.t, &z.y, HRule::START, &p.quadrature)?;
    if !ok {
        return Err(Error::Tolerance {
            what: "cone moments".into(),
            estimate: err,
            target: p.quadrature.rel_tol,
        });
    }
    let tj = term_jets(p, jets, &c, &m);
    let shell = tj.levels.iter().map(|v| vec![Complex64::new(0.0, 0.0); v.len()]).collect();
    Ok(LevelSums {
        total: tj.levels,
        shell,
        errors: tj.errors,
    })
}

/// The holomorphic series `Σ (Φ_k(T;·) Φ_ℓ(T′;·))|_{k+ℓ} M` at `z`.
fn holomorphic_series(p: &P2Params, reps: &[SymplecticRep], z: &SiegelPoint) -> Result<Complex64> {
    let tt = p.t + p.t_prime;
    let kappa = p.kappa();
    let mut s = ComplexSum::new();
    for g in reps {
        let det = z.automorphy(g).det();
        s.add(det.powi(-kappa) * holomorphic_exponential(&tt, &z.act(g)?));
    }
    Ok(s.value())
}

fn holomorphic_levels(p: &P2Params, reps: &[SymplecticRep], z: &SiegelPoint, d_max: u32) -> Result<LevelSums> {
    if d_max > 2 {
        return Err(Error::Differencing(format!(
            "nested differences beyond d = 2 lose all digits, requested {d_max}"
        )));
    }
    const STEP: f64 = 1e-3;
    let f0 = holomorphic_series(p, reps, z)?;
    let mut total = vec![vec![f0]];
    let mut errors = vec![0.0];
    if d_max >= 1 {
        let f = |w: &SiegelPoint| Ok(vec![holomorphic_series(p, reps, w)?]);
        let (v, e) = apply_lowering_vec(&f, z, STEP)?;
        total.push(v);
        errors.push(e);
    }
    if d_max >= 2 {
        let inner = |w: &SiegelPoint| {
            let f = |u: &SiegelPoint| Ok(vec![holomorphic_series(p, reps, u)?]);
            Ok(apply_lowering_vec(&f, w, STEP)?.0)
        };
        let (v, e) = apply_lowering_vec(&inner, z, STEP)?;
        total.push(v);
        errors.push(e);
    }
    let shell = total.iter().map(|v| vec![Complex64::new(0.0, 0.0); v.len()]).collect();
    Ok(LevelSums { total, shell, errors })
}

/// Relative size of `L^d F` for `d = 1..=d_max`, averaged over `z_grid`.
/// Evidence only: the annihilation of the full series by a power of `L` is
/// conditional, which the report records in its `assumption` field.
pub fn lowering_depth_probe(
    p: &P2Params,
    z_grid: &[SiegelPoint],
    d_max: u32,
    target: ProbeTarget,
) -> Result<DepthProbe> {
    p.validate()?;
    if d_max < 1 {
        return Err(Error::Domain("d_max must be at least 1".into()));
    }
    if z_grid.is_empty() {
        return Err(Error::Domain("empty grid of points".into()));
    }
    let reps = match target {
        ProbeTarget::BareProduct => Vec::new(),
        _ => enumerate_delta_cosets(p.height)?,
    };
    let jets = PsiJets::new(p.k, d_max);
    let n = d_max as usize;
    let (mut ratios, mut tail, mut quad) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for z in z_grid {
        let sums = match target {
            ProbeTarget::Series => series_levels(p, &jets, &pull_back(&reps, z, &p.t, p.height)?)?,
            ProbeTarget::BareProduct => product_levels(p, &jets, z)?,
            ProbeTarget::HolomorphicSeries => holomorphic_levels(p, &reps, z, d_max)?,
        };
        let base = frob(&sums.total[0]);
        if base == 0.0 {
            return Err(Error::Domain(format!("the probed function vanishes at {z:?}")));
        }
        for d in 1..=n {
            ratios[d - 1] += frob(&sums.total[d]) / base;
            tail[d - 1] += frob(&sums.shell[d]) / base;
            quad[d - 1] += sums.errors[d] / base;
        }
    }
    let m = z_grid.len() as f64;
    for v in [&mut ratios, &mut tail, &mut quad] {
        for x in v.iter_mut() {
            *x /= m;
        }
    }
    let noise_floor: Vec<f64> = tail.iter().zip(&quad).map(|(t, q)| t.max(10.0 * q)).collect();
    let floor_reached_at = ratios
        .iter()
        .zip(&noise_floor)
        .position(|(r, f)| r <= f)
        .map(|i| i as u32 + 1);
    Ok(DepthProbe {
        target,
        assumption: ASSUMPTION.into(),
        k: p.k,
        l: p.l,
        height: p.height,
        z_grid: z_grid.to_vec(),
        d: (1..=d_max).collect(),
        ratios,
        tail,
        quadrature: quad,
        noise_floor,
        floor_reached_at,
    })
}

/// `L^d` of one slashed seed `(Ψ_k Φ_ℓ)|_{k+ℓ} M` at `z` by the closed form,
/// for cross-checking against finite differences.
pub fn slashed_seed_lowering(p: &P2Params, g: &SymplecticRep, z: &SiegelPoint, d: u32) -> Result<Vec<Complex64>> {
    p.validate()?;
    let jets = PsiJets::new(p.k, d);
    let c = pull_back(&[*g], z, &p.t, p.height)?[0];
    let (m, err, ok) = jets.moments_adaptive(&p.t, &c.z.y, HRule::START, &QuadratureSpec::default())?;
    if !ok {
        return Err(Error::Tolerance {
            what: "cone moments".into(),
            estimate: err,
            target: QuadratureSpec::default().rel_tol,
        });
    }
    Ok(term_jets(p, &jets, &c, &m).levels.pop().expect("level d"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_transform_is_congruence() {
        let p = CMat2::from_fn(|i, j| Complex64::new((i + 2 * j) as f64 + 0.5, i as f64 - j as f64));
        let x = CMat2::from_fn(|i, j| Complex64::new(1.0 + i as f64, 0.3 * j as f64));
        let mut v: Vec<Complex64> = x.0.iter().flatten().copied().collect();
        transform_pairs(&mut v, 1, &p);
        let want = p.transpose() * x * p;
        for i in 0..2 {
            for j in 0..2 {
                assert!((v[2 * i + j] - want.0[i][j]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn loosening_is_at_least_one() {
        let l = loosening(&[1.0, 1e-6, 0.0]);
        assert_eq!(l[0], 1.0);
        assert!(l[1] > 1e5);
        assert_eq!(l[2], MAX_LOOSEN);
    }
}
