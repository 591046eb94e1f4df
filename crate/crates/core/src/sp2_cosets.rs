//! Representatives of `Δ\Sp₂(ℤ)`, `Δ = {(I S; 0 I) : S = ᵀS integral}`.
//!
//! Two integral symplectic matrices lie in the same `Δ`-coset iff they share
//! the bottom block row `(C D)`: if `M₂ M₁^{−1}` has bottom row `(0 I)` then it
//! is `(I S; 0 I)` with `S` symmetric. Cosets therefore correspond to the
//! coprime symmetric pairs, and a representative is any symplectic
//! completion. The A-block is normalized modulo `{A + SC}` so the output is
//! canonical.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat::{hermite_normal_form, reduce_mod_lattice, smith_normal_form, IMat};

pub type Mat2i = [[i64; 2]; 2];

pub const I2: Mat2i = [[1, 0], [0, 1]];
pub const Z2: Mat2i = [[0, 0], [0, 0]];

pub fn mul2(a: &Mat2i, b: &Mat2i) -> Mat2i {
    let mut c = Z2;
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn transpose2(a: &Mat2i) -> Mat2i {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

pub fn det2(a: &Mat2i) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn add2(a: &Mat2i, b: &Mat2i) -> Mat2i {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

fn sub2(a: &Mat2i, b: &Mat2i) -> Mat2i {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

fn is_sym2(a: &Mat2i) -> bool {
    a[0][1] == a[1][0]
}

fn max_abs2(a: &Mat2i) -> i64 {
    a.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
}

/// `g = (A B; C D)` in `Sp₂(ℤ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymplecticRep {
    pub c: Mat2i,
    pub d: Mat2i,
    pub a: Mat2i,
    pub b: Mat2i,
}

impl SymplecticRep {
    pub fn new(a: Mat2i, b: Mat2i, c: Mat2i, d: Mat2i) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(I2, Z2, Z2, I2)
    }

    /// `(I S; 0 I)`.
    pub fn translation(s: Mat2i) -> Self {
        Self::new(I2, s, Z2, I2)
    }

    /// `(A 0; 0 ᵀA^{−1})` for `det A = ±1`.
    pub fn rotation(a: Mat2i) -> Option<Self> {
        let det = det2(&a);
        if det.abs() != 1 {
            return None;
        }
        // ᵀA^{−1} = det · (a₂₂ −a₂₁; −a₁₂ a₁₁)
        let d = [[det * a[1][1], -det * a[1][0]], [-det * a[0][1], det * a[0][0]]];
        Some(Self::new(a, Z2, Z2, d))
    }

    /// `J = (0 I; −I 0)`.
    pub fn j() -> Self {
        Self::new(Z2, I2, [[-1, 0], [0, -1]], Z2)
    }

    pub fn to_rows(&self) -> [[i64; 4]; 4] {
        let mut m = [[0; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = self.a[i][j];
                m[i][j + 2] = self.b[i][j];
                m[i + 2][j] = self.c[i][j];
                m[i + 2][j + 2] = self.d[i][j];
            }
        }
        m
    }

    pub fn from_rows(m: &[[i64; 4]; 4]) -> Self {
        let blk = |r: usize, c: usize| [[m[r][c], m[r][c + 1]], [m[r + 1][c], m[r + 1][c + 1]]];
        Self::new(blk(0, 0), blk(0, 2), blk(2, 0), blk(2, 2))
    }

    /// `ᵀA C`, `ᵀB D` symmetric and `ᵀA D − ᵀC B = I`, i.e. `ᵀg J g = J`.
    pub fn is_symplectic(&self) -> bool {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        is_sym2(&mul2(&transpose2(a), c))
            && is_sym2(&mul2(&transpose2(b), d))
            && sub2(&mul2(&transpose2(a), d), &mul2(&transpose2(c), b)) == I2
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            add2(&mul2(&self.a, &o.a), &mul2(&self.b, &o.c)),
            add2(&mul2(&self.a, &o.b), &mul2(&self.b, &o.d)),
            add2(&mul2(&self.c, &o.a), &mul2(&self.d, &o.c)),
            add2(&mul2(&self.c, &o.b), &mul2(&self.d, &o.d)),
        )
    }

    /// Inverse of a symplectic matrix: `(ᵀD −ᵀB; −ᵀC ᵀA)`.
    pub fn inverse(&self) -> Self {
        let neg = |m: &Mat2i| [[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]];
        Self::new(
            transpose2(&self.d),
            neg(&transpose2(&self.b)),
            neg(&transpose2(&self.c)),
            transpose2(&self.a),
        )
    }

    /// Largest absolute entry of the bottom block row.
    pub fn height(&self) -> i64 {
        max_abs2(&self.c).max(max_abs2(&self.d))
    }

    pub fn c_is_zero(&self) -> bool {
        self.c == Z2
    }
}

/// `g₁ g₂^{−1} ∈ Δ`, checked by forming the product.
pub fn delta_equivalent(g1: &SymplecticRep, g2: &SymplecticRep) -> bool {
    let n = g1.mul(&g2.inverse());
    n.a == I2 && n.c == Z2 && n.d == I2 && is_sym2(&n.b)
}

fn bottom_row(c: &Mat2i, d: &Mat2i) -> IMat {
    IMat::from_fn(2, 4, |i, j| if j < 2 { c[i][j] } else { d[i][j - 2] })
}

/// `C ᵀD` symmetric and the 2×4 block `(C D)` has elementary divisors 1, 1.
pub fn is_coprime_symmetric_pair(c: &Mat2i, d: &Mat2i) -> bool {
    if !is_sym2(&mul2(c, &transpose2(d))) {
        return false;
    }
    smith_normal_form(&bottom_row(c, d)).divisors() == vec![1, 1]
}

/// Completes a coprime symmetric pair to an integral symplectic matrix.
pub fn complete_pair(c: &Mat2i, d: &Mat2i) -> Result<SymplecticRep> {
    if !is_coprime_symmetric_pair(c, d) {
        return Err(Error::Domain(format!("({c:?},{d:?}) is not a coprime symmetric pair")));
    }
    // P (C D) Q = (I 0): (C D) = P^{−1} R₁ where R₁, R₂ are the row blocks
    // of Q^{−1}, so (R₂; C D) is unimodular.
    let sm = smith_normal_form(&bottom_row(c, d));
    let qinv = inverse_unimodular(&sm.q);
    let x = qinv.block(2, 4, 0, 4);
    let y = bottom_row(c, d);
    let jm = IMat::from_rows(&[&[0, 0, 1, 0], &[0, 0, 0, 1], &[-1, 0, 0, 0], &[0, -1, 0, 0]]);
    // G = X J ᵀY is unimodular because Y J ᵀY = 0; replace X by G^{−1} X
    let g = &(&x * &jm) * &y.transpose();
    let ginv = inverse_unimodular(&g);
    let x1 = &ginv * &x;
    // X₁ J ᵀX₁ = (0 κ; −κ 0); X₁ + S Y with S = (0 κ; 0 0) clears it
    let kmat = &(&x1 * &jm) * &x1.transpose();
    let kappa = kmat[(0, 1)];
    let s = IMat::from_rows(&[&[0, kappa], &[0, 0]]);
    let x2 = &x1 + &(&s * &y);
    let top = |r: usize, c0: usize| [[x2[(r, c0)], x2[(r, c0 + 1)]], [x2[(r + 1, c0)], x2[(r + 1, c0 + 1)]]];
    let g = SymplecticRep::new(top(0, 0), top(0, 2), *c, *d);
    if !g.is_symplectic() {
        return Err(Error::Domain(format!("completion of ({c:?},{d:?}) failed")));
    }
    Ok(canonicalize(&g))
}

/// Inverse of a unimodular matrix via the adjugate.
fn inverse_unimodular(m: &IMat) -> IMat {
    let n = m.nrows();
    let det = m.det();
    assert!(det.abs() == 1, "matrix is not unimodular");
    IMat::from_fn(n, n, |i, j| {
        let minor = IMat::from_fn(n - 1, n - 1, |r, c| {
            m[(if r < j { r } else { r + 1 }, if c < i { c } else { c + 1 })]
        });
        let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
        sign * det * if n == 1 { 1 } else { minor.det() }
    })
}

/// The representative of `Δ g` whose top row `(A B)` is reduced modulo the
/// lattice `{S (C D) : S = ᵀS}` (Hermite reduction of the flattened row).
/// `(C D)` has rank 2, so the lattice has rank 3 and the form is unique on
/// each coset, singular `C` included.
pub fn canonicalize(g: &SymplecticRep) -> SymplecticRep {
    let basis = [[[1, 0], [0, 0]], [[0, 1], [1, 0]], [[0, 0], [0, 1]]];
    let flat = |x: &Mat2i, y: &Mat2i| [x[0][0], x[0][1], x[1][0], x[1][1], y[0][0], y[0][1], y[1][0], y[1][1]];
    let rows: Vec<[i64; 8]> = basis.iter().map(|s| flat(&mul2(s, &g.c), &mul2(s, &g.d))).collect();
    let gm = IMat::from_fn(3, 8, |i, j| rows[i][j]);
    let (h, u) = hermite_normal_form(&gm);
    if h.nrows() == 0 {
        return *g;
    }
    let (_, x) = reduce_mod_lattice(&flat(&g.a, &g.b), &h);
    // v − x·H = v − (x·U)·G, i.e. S = −Σ (xU)_i basis_i
    let mut s = Z2;
    for (i, &xi) in x.iter().enumerate() {
        for (k, bk) in basis.iter().enumerate() {
            let coef = xi * u[(i, k)];
            for r in 0..2 {
                for c in 0..2 {
                    s[r][c] -= coef * bk[r][c];
                }
            }
        }
    }
    let t = SymplecticRep::translation(s);
    t.mul(g)
}

/// All `A ∈ GL₂(ℤ)` with entries bounded by `height`.
pub fn gl2_elements(height: i64) -> Vec<Mat2i> {
    let r = -height..=height;
    let mut out = Vec::new();
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    if (a * d - b * c).abs() == 1 {
                        out.push([[a, b], [c, d]]);
                    }
                }
            }
        }
    }
    out
}

/// One representative per `Δ`-coset among symplectic matrices whose `C`, `D`
/// entries are bounded by `height`, sorted by `(C, D, A)`. The `C = 0`
/// stratum consists of the matrices `(A 0; 0 ᵀA^{−1})`.
pub fn enumerate_delta_cosets(height: i64) -> Result<Vec<SymplecticRep>> {
    if height < 1 {
        return Err(Error::Domain(format!("height must be positive, got {height}")));
    }
    let mut out: Vec<SymplecticRep> = gl2_elements(height)
        .into_iter()
        .filter_map(SymplecticRep::rotation)
        .collect();
    let cs: Vec<Mat2i> = all_mat2(height).into_iter().filter(|c| *c != Z2).collect();
    let ds = all_mat2(height);
    let rest: Result<Vec<Vec<SymplecticRep>>> = cs
        .par_iter()
        .map(|c| {
            ds.iter()
                .filter(|d| is_coprime_symmetric_pair(c, d))
                .map(|d| complete_pair(c, d))
                .collect()
        })
        .collect();
    out.extend(rest?.into_iter().flatten());
    out.sort();
    Ok(out)
}

fn all_mat2(height: i64) -> Vec<Mat2i> {
    let r = -height..=height;
    let mut out = Vec::new();
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    out.push([[a, b], [c, d]]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_predicate_examples() {
        assert!(is_coprime_symmetric_pair(&Z2, &I2));
        assert!(is_coprime_symmetric_pair(&I2, &I2));
        assert!(!is_coprime_symmetric_pair(&[[2, 0], [0, 2]], &[[2, 0], [0, 2]]));
    }

    #[test]
    fn completion_is_symplectic() {
        let c = [[1, 1], [0, 2]];
        let d = [[1, 0], [0, 1]];
        assert!(!is_coprime_symmetric_pair(&c, &d));
        let c = [[1, 0], [0, 0]];
        let d = [[0, 0], [0, 1]];
        let g = complete_pair(&c, &d).unwrap();
        assert!(g.is_symplectic());
        assert!(delta_equivalent(&g, &canonicalize(&g)));
    }

    #[test]
    fn j_is_symplectic() {
        assert!(SymplecticRep::j().is_symplectic());
        let j = SymplecticRep::j();
        assert_eq!(j.mul(&j.inverse()), SymplecticRep::identity());
    }
}
