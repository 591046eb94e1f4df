//! Independent brute-force oracles used by the tests and acceptance checks.
//! Each one avoids the code path it checks.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::gk_support::KType;
use crate::siegel_kernel::SymMat2;
use crate::sp2_cosets::Mat2i;
use crate::specfun::ln_gamma;
use crate::{Error, Result};

/// Formal character of `(a,b)`: the torus weights `(a−i, b+i)`, `0 ≤ i ≤ a−b`.
pub fn ktype_weights(t: KType) -> Vec<(i64, i64)> {
    (0..=t.a - t.b).map(|i| (t.a - i, t.b + i)).collect()
}

/// Decomposes a weight multiset into irreducible U(2) characters by peeling
/// off the dominant weight with the largest `a`.
pub fn decompose_character(mut weights: BTreeMap<(i64, i64), i64>) -> BTreeMap<KType, i64> {
    let mut out = BTreeMap::new();
    loop {
        weights.retain(|_, m| *m != 0);
        let top = weights
            .iter()
            .filter(|(&(a, b), _)| a >= b)
            .max_by_key(|(&(a, b), _)| (a - b, a));
        let Some((&(a, b), &m)) = top else {
            assert!(weights.is_empty(), "not a character: {weights:?}");
            return out;
        };
        let t = KType { a, b };
        *out.entry(t).or_default() += m;
        for w in ktype_weights(t) {
            *weights.entry(w).or_default() -= m;
        }
    }
}

/// `t1 ⊗ t2` from the product of formal characters.
pub fn tensor_by_characters(t1: KType, t2: KType) -> BTreeMap<KType, i64> {
    let mut w = BTreeMap::new();
    for (a1, b1) in ktype_weights(t1) {
        for (a2, b2) in ktype_weights(t2) {
            *w.entry((a1 + a2, b1 + b2)).or_default() += 1;
        }
    }
    decompose_character(w)
}

/// Every integral 4×4 matrix with entries in `[−1, 1]` satisfying
/// `ᵀg J g = J`, grouped by `Δ`-equivalence. The quotient key is the bottom
/// block row; the caller can confirm this against
/// [`crate::sp2_cosets::delta_equivalent`]. Returns the distinct bottom rows
/// and the number of symplectic matrices found.
pub fn exhaustive_unit_cosets() -> (BTreeSet<(Mat2i, Mat2i)>, u64) {
    const N: usize = 6561; // 3^8
    let half = |code: usize| -> [i64; 8] {
        let mut v = [0i64; 8];
        let mut c = code;
        for x in v.iter_mut() {
            *x = (c % 3) as i64 - 1;
            c /= 3;
        }
        v
    };
    // A block row (P Q) as 2×4. Symplectic: top·J·ᵀtop = 0, bottom·J·ᵀbottom = 0,
    // top·J·ᵀbottom = I.
    let form = |u: &[i64; 8], v: &[i64; 8], i: usize, j: usize| -> i64 {
        // row i of u against row j of v: u_P·v_Q − u_Q·v_P
        let (up, uq) = (&u[4 * i..4 * i + 2], &u[4 * i + 2..4 * i + 4]);
        let (vp, vq) = (&v[4 * j..4 * j + 2], &v[4 * j + 2..4 * j + 4]);
        up[0] * vq[0] + up[1] * vq[1] - uq[0] * vp[0] - uq[1] * vp[1]
    };
    let isotropic: Vec<[i64; 8]> = (0..N)
        .map(half)
        .filter(|u| form(u, u, 0, 1) == 0)
        .collect();
    let results: Vec<(Vec<(Mat2i, Mat2i)>, u64)> = isotropic
        .par_iter()
        .map(|bot| {
            let mut hits = 0;
            for top in &isotropic {
                if form(top, bot, 0, 0) == 1
                    && form(top, bot, 0, 1) == 0
                    && form(top, bot, 1, 0) == 0
                    && form(top, bot, 1, 1) == 1
                {
                    hits += 1;
                }
            }
            let key = (
                [[bot[0], bot[1]], [bot[4], bot[5]]],
                [[bot[2], bot[3]], [bot[6], bot[7]]],
            );
            if hits > 0 {
                (vec![key], hits)
            } else {
                (Vec::new(), 0)
            }
        })
        .collect();
    let mut keys = BTreeSet::new();
    let mut total = 0;
    for (k, h) in results {
        keys.extend(k);
        total += h;
    }
    (keys, total)
}

fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

/// Bottom rows `(C, D)` with entries in `[−h, h]`, `C ᵀD` symmetric and the
/// six 2×2 minors of `(C D)` coprime.
pub fn minors_gcd_pairs(h: i64) -> BTreeSet<(Mat2i, Mat2i)> {
    let r: Vec<i64> = (-h..=h).collect();
    let mut rows = Vec::new();
    for &a in &r {
        for &b in &r {
            for &c in &r {
                for &d in &r {
                    rows.push([a, b, c, d]);
                }
            }
        }
    }
    rows.par_iter()
        .flat_map_iter(|r1| {
            rows.iter().filter_map(move |r2| {
                let m = [r1, r2];
                let mut g = 0;
                for i in 0..4 {
                    for j in i + 1..4 {
                        g = gcd(g, m[0][i] * m[1][j] - m[0][j] * m[1][i]);
                    }
                }
                // C ᵀD symmetric: row1_C · row2_D = row2_C · row1_D
                let sym = r1[0] * r2[2] + r1[1] * r2[3] == r2[0] * r1[2] + r2[1] * r1[3];
                (g == 1 && sym).then(|| {
                    ([[r1[0], r1[1]], [r2[0], r2[1]]], [[r1[2], r1[3]], [r2[2], r2[3]]])
                })
            })
        })
        .collect()
}

/// Monte-Carlo estimate of the cone integral `h_{α,β}(T;Y)` with its standard
/// error.
///
/// With `U = T + W`, the weight `det(W)^{β−3/2} e^{−2π tr(YW)}` is a matrix
/// gamma density, sampled by the Bartlett decomposition, so
/// `h = e^{−2π tr(TY)} Γ₂(β) det(2πY)^{−β} E[det(2T + W)^{α−3/2}]`.
/// Samples are drawn in fixed-size blocks, each with its own ChaCha stream, so
/// the result does not depend on the worker count.
pub fn h_monte_carlo(alpha: f64, beta: f64, t: &SymMat2, y: &SymMat2, samples: u64, seed: u64) -> Result<(f64, f64)> {
    const BLOCK: u64 = 1 << 16;
    if !(alpha > 0.5 && beta > 0.5) || !t.is_positive_definite() || !y.is_positive_definite() {
        return Err(Error::Domain("Monte-Carlo h needs α, β > 1/2 and positive definite T, Y".into()));
    }
    if samples < 2 {
        return Err(Error::Domain("at least two samples are needed".into()));
    }
    // W = L A ᵀA ᵀL with L the Cholesky factor of (2πY)^{-1}
    let sigma = y.scale(2.0 * std::f64::consts::PI).inverse()?;
    let l11 = sigma.m11.sqrt();
    let l21 = sigma.m12 / l11;
    let l22 = (sigma.m22 - l21 * l21).sqrt();
    let g1 = Gamma::new(beta, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
    let g2 = Gamma::new(beta - 0.5, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
    let e = alpha - 1.5;
    let blocks = samples.div_ceil(BLOCK);
    let (sum, sq) = (0..blocks)
        .into_par_iter()
        .map(|blk| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(blk);
            let n = BLOCK.min(samples - blk * BLOCK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let a11 = g1.sample(&mut rng).sqrt();
                let a22 = g2.sample(&mut rng).sqrt();
                let z: f64 = StandardNormal.sample(&mut rng);
                let a21 = z * std::f64::consts::FRAC_1_SQRT_2;
                // B = L A, W = B ᵀB
                let (b11, b21, b22) = (l11 * a11, l21 * a11 + l22 * a21, l22 * a22);
                let w11 = b11 * b11;
                let w12 = b11 * b21;
                let w22 = b21 * b21 + b22 * b22;
                let d = (2.0 * t.m11 + w11) * (2.0 * t.m22 + w22) - (2.0 * t.m12 + w12).powi(2);
                let f = d.powf(e);
                s += f;
                s2 += f * f;
            }
            (s, s2)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
    let n = samples as f64;
    let mean = sum / n;
    let var = (sq / n - mean * mean).max(0.0) / (n - 1.0);
    let ln_gamma2 = 0.5 * std::f64::consts::PI.ln() + ln_gamma(beta) + ln_gamma(beta - 0.5);
    let det2piy = (2.0 * std::f64::consts::PI).powi(2) * y.det();
    let c = (-2.0 * std::f64::consts::PI * t.trace_prod(y) + ln_gamma2 - beta * det2piy.ln()).exp();
    Ok((c * mean, c * var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_of_square() {
        let t = KType { a: 1, b: 0 };
        let got = tensor_by_characters(t, t);
        assert_eq!(got.len(), 2);
        assert_eq!(got[&KType { a: 2, b: 0 }], 1);
        assert_eq!(got[&KType { a: 1, b: 1 }], 1);
    }
}
