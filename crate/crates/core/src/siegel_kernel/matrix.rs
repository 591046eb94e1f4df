//! Real symmetric and complex 2×2 matrices and points of the Siegel upper
//! half space of degree 2.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sp2_cosets::{Mat2i, SymplecticRep};

pub type Mat2 = [[f64; 2]; 2];

/// `(m11 m12; m12 m22)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymMat2 {
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
}

/// Spectral data `S = O diag(λ₁, λ₂) ᵀO`, `λ₁ ≤ λ₂`, `O` a rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub lambda: [f64; 2],
    pub o: Mat2,
}

impl SymMat2 {
    pub const fn new(m11: f64, m12: f64, m22: f64) -> Self {
        Self { m11, m12, m22 }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 1.0)
    }

    pub const fn diag(a: f64, b: f64) -> Self {
        Self::new(a, 0.0, b)
    }

    pub fn scalar(c: f64) -> Self {
        Self::new(c, 0.0, c)
    }

    /// The symmetric part of a general real matrix.
    pub fn from_mat(m: &Mat2) -> Self {
        Self::new(m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1])
    }

    pub fn to_mat(&self) -> Mat2 {
        [[self.m11, self.m12], [self.m12, self.m22]]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => self.m11,
            (1, 1) => self.m22,
            _ => self.m12,
        }
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m12
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    /// `tr(S·O)` for symmetric `O`.
    pub fn trace_prod(&self, o: &Self) -> f64 {
        self.m11 * o.m11 + 2.0 * self.m12 * o.m12 + self.m22 * o.m22
    }

    pub fn is_positive_definite(&self) -> bool {
        self.m11 > 0.0 && self.det() > 0.0
    }

    /// `m11`, `m22` integers and `2·m12` an integer.
    pub fn is_half_integral(&self) -> bool {
        let int = |x: f64| x.fract() == 0.0 && x.is_finite();
        int(self.m11) && int(self.m22) && int(2.0 * self.m12)
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Domain("singular symmetric matrix".into()));
        }
        Ok(Self::new(self.m22 / d, -self.m12 / d, self.m11 / d))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(c * self.m11, c * self.m12, c * self.m22)
    }

    /// `ᵀU S U`.
    pub fn congruence(&self, u: &Mat2) -> Self {
        let s = self.to_mat();
        let mut r = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        r[i][j] += u[k][i] * s[k][l] * u[l][j];
                    }
                }
            }
        }
        Self::from_mat(&r)
    }

    pub fn congruence_int(&self, u: &Mat2i) -> Self {
        let uf = [[u[0][0] as f64, u[0][1] as f64], [u[1][0] as f64, u[1][1] as f64]];
        self.congruence(&uf)
    }

    /// Closed-form eigendecomposition.
    pub fn eigen(&self) -> Eigen2 {
        let m = 0.5 * (self.m11 + self.m22);
        let h = 0.5 * (self.m11 - self.m22);
        let r = h.hypot(self.m12);
        let lambda = [m - r, m + r];
        // eigenvector of λ₂ is (cos θ, sin θ) with tan 2θ = 2 m12 / (m11 − m22)
        let theta = 0.5 * self.m12.atan2(h);
        let (s, c) = theta.sin_cos();
        // columns: λ₁ ↦ (−s, c), λ₂ ↦ (c, s)
        Eigen2 {
            lambda,
            o: [[-s, c], [c, s]],
        }
    }

    /// Principal square root of a positive semidefinite matrix.
    pub fn sqrt(&self) -> Result<Self> {
        let e = self.eigen();
        if e.lambda[0] < 0.0 {
            return Err(Error::Domain("square root of an indefinite matrix".into()));
        }
        let r = [e.lambda[0].sqrt(), e.lambda[1].sqrt()];
        let o = e.o;
        let entry = |i: usize, j: usize| o[i][0] * r[0] * o[j][0] + o[i][1] * r[1] * o[j][1];
        Ok(Self::new(entry(0, 0), entry(0, 1), entry(1, 1)))
    }

    pub fn matmul(&self, o: &Mat2) -> Mat2 {
        mat_mul(&self.to_mat(), o)
    }
}

impl Add for SymMat2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.m11 + o.m11, self.m12 + o.m12, self.m22 + o.m22)
    }
}

impl Sub for SymMat2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.m11 - o.m11, self.m12 - o.m12, self.m22 - o.m22)
    }
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Complex 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CMat2(pub [[Complex64; 2]; 2]);

impl CMat2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Self([[one, z], [z, one]])
    }

    pub fn from_real(m: &Mat2) -> Self {
        Self::from_fn(|i, j| Complex64::new(m[i][j], 0.0))
    }

    pub fn from_int(m: &Mat2i) -> Self {
        Self::from_fn(|i, j| Complex64::new(m[i][j] as f64, 0.0))
    }

    /// `X + iY`.
    pub fn from_parts(x: &SymMat2, y: &SymMat2) -> Self {
        Self::from_fn(|i, j| Complex64::new(x.entry(i, j), y.entry(i, j)))
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> Complex64) -> Self {
        Self([[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_fn(|i, j| c * self.0[i][j])
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::Domain("singular complex matrix".into()));
        }
        let m = &self.0;
        Ok(Self([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Add for CMat2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + o.0[i][j])
    }
}

impl Sub for CMat2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - o.0[i][j])
    }
}

impl Neg for CMat2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.0[i][j])
    }
}

impl Mul for CMat2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j])
    }
}

/// `Z = X + iY` with `Y > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiegelPoint {
    pub x: SymMat2,
    pub y: SymMat2,
}

impl SiegelPoint {
    pub fn new(x: SymMat2, y: SymMat2) -> Result<Self> {
        let finite = [x.m11, x.m12, x.m22, y.m11, y.m12, y.m22].iter().all(|v| v.is_finite());
        if !finite || !y.is_positive_definite() {
            return Err(Error::Domain(format!(
                "imaginary part must be positive definite, got {y:?}"
            )));
        }
        Ok(Self { x, y })
    }

    /// `i·y₀·I`.
    pub fn scalar_imaginary(y0: f64) -> Result<Self> {
        Self::new(SymMat2::default(), SymMat2::scalar(y0))
    }

    /// Coordinates `(x11, x12, x22, y11, y12, y22)`.
    pub fn coords(&self) -> [f64; 6] {
        [self.x.m11, self.x.m12, self.x.m22, self.y.m11, self.y.m12, self.y.m22]
    }

    pub fn from_coords(c: &[f64; 6]) -> Result<Self> {
        Self::new(SymMat2::new(c[0], c[1], c[2]), SymMat2::new(c[3], c[4], c[5]))
    }

    pub fn z(&self) -> CMat2 {
        CMat2::from_parts(&self.x, &self.y)
    }

    /// Point from a complex matrix, symmetrizing away rounding.
    pub fn from_z(z: &CMat2) -> Result<Self> {
        let m = &z.0;
        let off = 0.5 * (m[0][1] + m[1][0]);
        Self::new(
            SymMat2::new(m[0][0].re, off.re, m[1][1].re),
            SymMat2::new(m[0][0].im, off.im, m[1][1].im),
        )
    }

    /// `CZ + D`.
    pub fn automorphy(&self, g: &SymplecticRep) -> CMat2 {
        CMat2::from_int(&g.c) * self.z() + CMat2::from_int(&g.d)
    }

    /// `M•Z = (AZ + B)(CZ + D)^{−1}`.
    pub fn act(&self, g: &SymplecticRep) -> Result<Self> {
        let z = self.z();
        let num = CMat2::from_int(&g.a) * z + CMat2::from_int(&g.b);
        let den = self.automorphy(g);
        Self::from_z(&(num * den.inverse()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_reconstructs() {
        let s = SymMat2::new(2.0, 0.7, 0.5);
        let e = s.eigen();
        let back = SymMat2::diag(e.lambda[0], e.lambda[1]).congruence(&[
            [e.o[0][0], e.o[1][0]],
            [e.o[0][1], e.o[1][1]],
        ]);
        assert!((back - s).trace_prod(&(back - s)) < 1e-28);
        let r = s.sqrt().unwrap();
        let rr = SymMat2::from_mat(&r.matmul(&r.to_mat()));
        assert!((rr - s).trace_prod(&(rr - s)) < 1e-28);
    }
}
