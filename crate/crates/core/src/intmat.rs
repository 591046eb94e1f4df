//! Small dense integer matrices: Smith normal form with transforms and row
//! Hermite normal form. Entries are `i64`; the sizes used here (at most 4×4
//! with small entries) stay far from overflow.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Submatrix of rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> i64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                    return 0;
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
                }
            }
            prev = a[k * n + k];
        }
        (sign * a[n * n - 1]) as i64
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// `row_i += k · row_j`.
    fn add_row(&mut self, i: usize, j: usize, k: i64) {
        for c in 0..self.cols {
            let v = self[(j, c)];
            self[(i, c)] += k * v;
        }
    }

    /// `col_i += k · col_j`.
    fn add_col(&mut self, i: usize, j: usize, k: i64) {
        for r in 0..self.rows {
            let v = self[(r, j)];
            self[(r, i)] += k * v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            self[(i, c)] = -self[(i, c)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IMat {
    type Output = IMat;
    fn mul(self, rhs: &IMat) -> IMat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        IMat::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * rhs[(k, j)]).sum()
        })
    }
}

impl Add for &IMat {
    type Output = IMat;
    fn add(self, rhs: &IMat) -> IMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl Sub for &IMat {
    type Output = IMat;
    fn sub(self, rhs: &IMat) -> IMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl fmt::Display for IMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", r.join(" "))?;
        }
        Ok(())
    }
}

/// `P · M · Q = S` with `P`, `Q` unimodular and `S` diagonal, `s₁ | s₂ | …`,
/// nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smith {
    pub p: IMat,
    pub s: IMat,
    pub q: IMat,
}

impl Smith {
    pub fn divisors(&self) -> Vec<i64> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s[(i, i)]).collect()
    }
}

pub fn smith_normal_form(m: &IMat) -> Smith {
    let (r, c) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut p = IMat::identity(r);
    let mut q = IMat::identity(c);
    for t in 0..r.min(c) {
        // pivot: smallest nonzero entry in the trailing block
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    if s[(i, j)] != 0 && best.map_or(true, |(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return Smith { p, s, q };
            };
            s.swap_rows(t, bi);
            p.swap_rows(t, bi);
            s.swap_cols(t, bj);
            q.swap_cols(t, bj);
            let piv = s[(t, t)];
            let mut clean = true;
            for i in t + 1..r {
                let k = Integer::div_floor(&s[(i, t)], &piv);
                s.add_row(i, t, -k);
                p.add_row(i, t, -k);
                clean &= s[(i, t)] == 0;
            }
            for j in t + 1..c {
                let k = Integer::div_floor(&s[(t, j)], &piv);
                s.add_col(j, t, -k);
                q.add_col(j, t, -k);
                clean &= s[(t, j)] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility of the rest of the block by the pivot
            let bad = (t + 1..r).flat_map(|i| (t + 1..c).map(move |j| (i, j))).find(|&(i, j)| s[(i, j)] % piv != 0);
            match bad {
                Some((i, _)) => {
                    s.add_row(t, i, 1);
                    p.add_row(t, i, 1);
                }
                None => break,
            }
        }
        if s[(t, t)] < 0 {
            s.negate_row(t);
            p.negate_row(t);
        }
    }
    Smith { p, s, q }
}

/// Row Hermite normal form `H = U · M`: echelon, positive pivots, entries
/// above each pivot reduced into `[0, pivot)`, zero rows removed from `H`.
/// `U` is unimodular and has one row per row of `M`; its first `H.nrows()`
/// rows produce `H`.
pub fn hermite_normal_form(m: &IMat) -> (IMat, IMat) {
    let (r, c) = (m.rows, m.cols);
    let mut h = m.clone();
    let mut u = IMat::identity(r);
    let mut row = 0;
    for col in 0..c {
        if row == r {
            break;
        }
        loop {
            let nz: Vec<usize> = (row..r).filter(|&i| h[(i, col)] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let &piv = nz.iter().min_by_key(|&&i| h[(i, col)].abs()).unwrap();
            h.swap_rows(row, piv);
            u.swap_rows(row, piv);
            let mut done = true;
            for i in row + 1..r {
                let k = Integer::div_floor(&h[(i, col)], &h[(row, col)]);
                h.add_row(i, row, -k);
                u.add_row(i, row, -k);
                done &= h[(i, col)] == 0;
            }
            if done {
                break;
            }
        }
        if h[(row, col)] == 0 {
            continue;
        }
        if h[(row, col)] < 0 {
            h.negate_row(row);
            u.negate_row(row);
        }
        let pv = h[(row, col)];
        for i in 0..row {
            let k = Integer::div_floor(&h[(i, col)], &pv);
            h.add_row(i, row, -k);
            u.add_row(i, row, -k);
        }
        row += 1;
    }
    (h.block(0, row, 0, c), u)
}

/// Pivot column of each row of a Hermite form.
pub fn pivots(h: &IMat) -> Vec<usize> {
    (0..h.rows)
        .map(|i| (0..h.cols).find(|&j| h[(i, j)] != 0).expect("zero row in Hermite form"))
        .collect()
}

/// Reduces `v` modulo the row lattice of the Hermite form `h`. Returns the
/// canonical representative and the coefficients `x` with `v − x·h` equal to
/// it.
pub fn reduce_mod_lattice(v: &[i64], h: &IMat) -> (Vec<i64>, Vec<i64>) {
    let mut out = v.to_vec();
    let mut coeffs = vec![0; h.rows];
    for (i, &pc) in pivots(h).iter().enumerate() {
        let k = Integer::div_floor(&out[pc], &h[(i, pc)]);
        coeffs[i] = k;
        for j in 0..h.cols {
            out[j] -= k * h[(i, j)];
        }
    }
    (out, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_of_known_matrix() {
        let m = IMat::from_rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let sm = smith_normal_form(&m);
        assert_eq!(sm.divisors(), vec![2, 6, 12]);
        assert_eq!(&(&sm.p * &m) * &sm.q, sm.s);
        assert_eq!(sm.p.det().abs(), 1);
        assert_eq!(sm.q.det().abs(), 1);
    }

    #[test]
    fn hermite_reduces() {
        let m = IMat::from_rows(&[&[3, 1, 0, 2], &[6, 2, 1, 0], &[0, 0, 3, 3]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(u.det().abs(), 1);
        assert_eq!((&u * &m).block(0, h.nrows(), 0, 4), h);
        let (r, _) = reduce_mod_lattice(&[7, 5, 9, 1], &h);
        let (r2, _) = reduce_mod_lattice(&[7 + 3 * 3, 5 + 3, 9, 1 + 6], &h);
        assert_eq!(r, r2);
    }

    #[test]
    fn bareiss_det() {
        let m = IMat::from_rows(&[&[0, 2, 1], &[3, 1, 4], &[1, 5, 9]]);
        assert_eq!(m.det(), -32);
    }
}
