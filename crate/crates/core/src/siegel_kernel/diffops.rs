//! `L = Y ᵀ(Y ∂/∂Z̄)` and `Ω_{α,β}` by central differences in the six real
//! coordinates, with the symmetric convention `∂/∂Z = (½(1+δᵢⱼ) ∂/∂zᵢⱼ)`.
//!
//! Every routine evaluates at step `h` and `h/2` and returns the Richardson
//! combination `(4D(h/2) − D(h))/3` with `|D(h/2) − D(h)|/3` as its error
//! estimate. Nested central differences have an even expansion in `h`, so the
//! combination is fourth order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{CMat2, SiegelPoint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffResult {
    pub value: CMat2,
    pub est_error: f64,
}

/// Index of `z_ij` among `(z11, z12, z22)`.
pub(crate) fn sym_index(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => 0,
        (1, 1) => 2,
        _ => 1,
    }
}

fn shifted(z: &SiegelPoint, coord: usize, delta: f64) -> Result<SiegelPoint> {
    let mut c = z.coords();
    c[coord] += delta;
    SiegelPoint::from_coords(&c)
}

fn step(z: &SiegelPoint, coord: usize, h: f64) -> f64 {
    h * (1.0 + z.coords()[coord].abs())
}

/// Matrix of `∂F/∂z_ab` (`conj = false`) or `∂F/∂z̄_ab` (`conj = true`) at a
/// single step size.
pub fn wirtinger_matrix<F>(f: &F, z: &SiegelPoint, h: f64, conj: bool) -> Result<CMat2>
where
    F: Fn(&SiegelPoint) -> Result<Complex64>,
{
    let mut d = [Complex64::new(0.0, 0.0); 3];
    for (c, slot) in d.iter_mut().enumerate() {
        let hx = step(z, c, h);
        let hy = step(z, c + 3, h);
        let dx = (f(&shifted(z, c, hx)?)? - f(&shifted(z, c, -hx)?)?) / (2.0 * hx);
        let dy = (f(&shifted(z, c + 3, hy)?)? - f(&shifted(z, c + 3, -hy)?)?) / (2.0 * hy);
        let i = Complex64::i();
        let w = if conj { dx + i * dy } else { dx - i * dy };
        let fac = if c == 1 { 0.25 } else { 0.5 };
        *slot = w * fac;
    }
    Ok(CMat2::from_fn(|i, j| d[sym_index(i, j)]))
}

fn y_matrix(z: &SiegelPoint) -> CMat2 {
    CMat2::from_real(&z.y.to_mat())
}

fn lowering_at<F>(f: &F, z: &SiegelPoint, h: f64) -> Result<CMat2>
where
    F: Fn(&SiegelPoint) -> Result<Complex64>,
{
    let y = y_matrix(z);
    Ok(y * wirtinger_matrix(f, z, h, true)? * y)
}

fn richardson(coarse: CMat2, fine: CMat2, what: &str) -> Result<DiffResult> {
    let value = CMat2::from_fn(|i, j| (4.0 * fine.0[i][j] - coarse.0[i][j]) / 3.0);
    let est_error = (fine - coarse).norm() / 3.0;
    if !est_error.is_finite() || value.0.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Differencing(format!("{what}: non-finite difference quotient")));
    }
    Ok(DiffResult { value, est_error })
}

/// `L F = Y (∂F/∂Z̄) Y`.
pub fn apply_lowering<F>(f: &F, z: &SiegelPoint, h_step: f64) -> Result<DiffResult>
where
    F: Fn(&SiegelPoint) -> Result<Complex64>,
{
    let coarse = lowering_at(f, z, h_step)?;
    let fine = lowering_at(f, z, 0.5 * h_step)?;
    richardson(coarse, fine, "lowering")
}

fn omega_at<F>(alpha: f64, beta: f64, f: &F, z: &SiegelPoint, h: f64) -> Result<CMat2>
where
    F: Fn(&SiegelPoint) -> Result<Complex64>,
{
    let y = y_matrix(z);
    let dz = wirtinger_matrix(f, z, h, false)?;
    let dzb = wirtinger_matrix(f, z, h, true)?;
    // ∂̄_{mk} ∂_{lj} F for all (l,j), (m,k)
    let mut second = [[CMat2::zero(); 2]; 2];
    for l in 0..2 {
        for j in l..2 {
            let g = |p: &SiegelPoint| -> Result<Complex64> {
                Ok(wirtinger_matrix(f, p, h, false)?.0[l][j])
            };
            second[l][j] = wirtinger_matrix(&g, z, h, true)?;
            second[j][l] = second[l][j];
        }
    }
    let two_i = Complex64::new(0.0, 2.0);
    Ok(CMat2::from_fn(|i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..2 {
            for l in 0..2 {
                for m in 0..2 {
                    acc += y.0[i][k] * y.0[l][m] * second[l][j].0[m][k];
                }
            }
        }
        acc *= -4.0;
        for k in 0..2 {
            acc += -two_i * beta * y.0[i][k] * dz.0[k][j] + two_i * alpha * y.0[i][k] * dzb.0[k][j];
        }
        acc
    }))
}

/// `Ω_{α,β} = −4 Y ᵀ(Y ∂/∂Z̄) ∂/∂Z − 2iβ Y ∂/∂Z + 2iα Y ∂/∂Z̄`.
pub fn apply_omega<F>(alpha: f64, beta: f64, f: &F, z: &SiegelPoint, h_step: f64) -> Result<DiffResult>
where
    F: Fn(&SiegelPoint) -> Result<Complex64>,
{
    let coarse = omega_at(alpha, beta, f, z, h_step)?;
    let fine = omega_at(alpha, beta, f, z, 0.5 * h_step)?;
    richardson(coarse, fine, "omega")
}

/// `L` applied entrywise to a vector-valued function; the new index pair is
/// appended as the fastest-varying position.
pub fn apply_lowering_vec<F>(f: &F, z: &SiegelPoint, h_step: f64) -> Result<(Vec<Complex64>, f64)>
where
    F: Fn(&SiegelPoint) -> Result<Vec<Complex64>>,
{
    let y = y_matrix(z);
    let at = |h: f64| -> Result<Vec<CMat2>> {
        // ∂̄ matrices of every entry at step h
        let mut d: Vec<[Complex64; 3]> = Vec::new();
        for c in 0..3 {
            let hx = step(z, c, h);
            let hy = step(z, c + 3, h);
            let xp = f(&shifted(z, c, hx)?)?;
            let xm = f(&shifted(z, c, -hx)?)?;
            let yp = f(&shifted(z, c + 3, hy)?)?;
            let ym = f(&shifted(z, c + 3, -hy)?)?;
            if d.is_empty() {
                d = vec![[Complex64::new(0.0, 0.0); 3]; xp.len()];
            }
            let fac = if c == 1 { 0.25 } else { 0.5 };
            for e in 0..xp.len() {
                let dx = (xp[e] - xm[e]) / (2.0 * hx);
                let dy = (yp[e] - ym[e]) / (2.0 * hy);
                d[e][c] = (dx + Complex64::i() * dy) * fac;
            }
        }
        Ok(d.iter()
            .map(|de| y * CMat2::from_fn(|i, j| de[sym_index(i, j)]) * y)
            .collect())
    };
    let coarse = at(h_step)?;
    let fine = at(0.5 * h_step)?;
    let mut out = Vec::with_capacity(4 * coarse.len());
    let mut err: f64 = 0.0;
    for (c, f) in coarse.into_iter().zip(fine) {
        let r = richardson(c, f, "lowering")?;
        err = err.max(r.est_error);
        out.extend(r.value.0.iter().flatten().copied());
    }
    Ok((out, err))
}

/// `L^d F` as a flat tensor of `4^d` entries, by nested differences. Entry
/// `Σ_r (2 i_r + j_r) 4^{d−1−r}` holds the component where the `r`-th
/// application of `L` contributed the index pair `(i_r, j_r)`. Costs `24^d`
/// evaluations; intended for `d ≤ 2` cross-checks.
pub fn fd_lowering_tensor<F>(f: &F, z: &SiegelPoint, d: u32, h_step: f64) -> Result<Vec<Complex64>>
where
    F: Fn(&SiegelPoint) -> Result<Complex64>,
{
    if d == 0 {
        return Ok(vec![f(z)?]);
    }
    let inner = |p: &SiegelPoint| fd_lowering_tensor(f, p, d - 1, h_step);
    Ok(apply_lowering_vec(&inner, z, h_step)?.0)
}
