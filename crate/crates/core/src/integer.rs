//! Exact integer routines: Pfaffian, Smith normal form, fraction-free
//! determinant and rank.
//!
//! All arithmetic is checked; anything that leaves the `i64` range (or `i128`
//! for intermediates) is reported as [`Error::Overflow`] instead of wrapping.

use crate::error::{domain, Error, Result};
use crate::matrix::{Mat, Mat4};
use crate::scalar::{Real, Tolerance};

/// A 4×4 antisymmetric integer matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntAltMat4([[i64; 4]; 4]);

impl IntAltMat4 {
    pub fn new(entries: [[i64; 4]; 4]) -> Result<Self> {
        for i in 0..4 {
            if entries[i][i] != 0 {
                return domain(format!("alternating matrix has nonzero diagonal entry at {i}"));
            }
            for j in 0..i {
                if entries[i][j].checked_neg() != Some(entries[j][i]) {
                    return domain(format!("matrix is not antisymmetric at ({i}, {j})"));
                }
            }
        }
        Ok(Self(entries))
    }

    /// Rounds a real alternating matrix to integers, rejecting entries that
    /// are farther than the tolerance from an integer.
    pub fn from_real<T: Real>(m: &Mat4<T>, tol: &Tolerance<T>) -> Result<Self> {
        let mut out = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let x = m[(i, j)];
                let r = x.round();
                if !tol.close(x, r) {
                    return domain(format!("entry ({i}, {j}) = {x} is not integral"));
                }
                out[i][j] = r.to_i64().ok_or(Error::Overflow("rounding an alternating form"))?;
            }
        }
        Self::new(out)
    }

    pub fn standard() -> Self {
        Self([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    }

    pub fn zero() -> Self {
        Self([[0; 4]; 4])
    }

    pub fn entries(&self) -> &[[i64; 4]; 4] {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.0[i][j]
    }

    pub fn as_mat(&self) -> Mat4<i64> {
        Mat(self.0)
    }

    /// The bilinear form `ᵗn E m` on integer coordinate vectors.
    pub fn pair(&self, n: &[i64; 4], m: &[i64; 4]) -> Result<i64> {
        let mut acc: i64 = 0;
        for i in 0..4 {
            for j in 0..4 {
                let t = n[i]
                    .checked_mul(self.0[i][j])
                    .and_then(|x| x.checked_mul(m[j]))
                    .ok_or(Error::Overflow("alternating pairing"))?;
                acc = acc.checked_add(t).ok_or(Error::Overflow("alternating pairing"))?;
            }
        }
        Ok(acc)
    }
}

impl TryFrom<[[i64; 4]; 4]> for IntAltMat4 {
    type Error = Error;
    fn try_from(entries: [[i64; 4]; 4]) -> Result<Self> {
        Self::new(entries)
    }
}

/// `Pf(e) = e₁₂e₃₄ − e₁₃e₂₄ + e₁₄e₂₃` (1-based indices).
pub fn pfaffian4(e: &IntAltMat4) -> Result<i64> {
    let m = &e.0;
    let prod = |a: i64, b: i64| a.checked_mul(b).ok_or(Error::Overflow("pfaffian"));
    let t1 = prod(m[0][1], m[2][3])?;
    let t2 = prod(m[0][2], m[1][3])?;
    let t3 = prod(m[0][3], m[1][2])?;
    t1.checked_sub(t2).and_then(|x| x.checked_add(t3)).ok_or(Error::Overflow("pfaffian"))
}

/// Exact determinant and rank by Bareiss fraction-free elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BareissOutcome {
    pub det: i128,
    pub rank: usize,
}

pub fn bareiss<const N: usize>(m: &Mat<i64, N, N>) -> Result<BareissOutcome> {
    let mut a = [[0i128; N]; N];
    for i in 0..N {
        for j in 0..N {
            a[i][j] = m[(i, j)] as i128;
        }
    }
    let overflow = || Error::Overflow("bareiss elimination");
    let mut sign: i128 = 1;
    let mut prev: i128 = 1;
    let mut rank = 0usize;
    let mut row = 0usize;
    for col in 0..N {
        if row == N {
            break;
        }
        let Some(p) = (row..N).find(|&i| a[i][col] != 0) else {
            continue;
        };
        if p != row {
            a.swap(p, row);
            sign = -sign;
        }
        for i in row + 1..N {
            for j in col + 1..N {
                let num = a[i][j]
                    .checked_mul(a[row][col])
                    .and_then(|x| a[i][col].checked_mul(a[row][j]).and_then(|y| x.checked_sub(y)))
                    .ok_or_else(overflow)?;
                a[i][j] = num / prev;
            }
            a[i][col] = 0;
        }
        prev = a[row][col];
        row += 1;
        rank += 1;
    }
    let det = if rank == N { sign * a[N - 1][N - 1] } else { 0 };
    Ok(BareissOutcome { det, rank })
}

/// Smith normal form of a square integer matrix.
///
/// `left * m * right = diag(divisors)` with `left`, `right` unimodular and
/// `divisors[0] | divisors[1] | ...`, all nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmithForm<const N: usize> {
    pub divisors: [i64; N],
    pub left: Mat<i64, N, N>,
    pub right: Mat<i64, N, N>,
}

impl<const N: usize> SmithForm<N> {
    /// Product of the nonzero divisors.
    pub fn nonzero_product(&self) -> Result<i64> {
        self.divisors
            .iter()
            .filter(|&&d| d != 0)
            .try_fold(1i64, |acc, &d| acc.checked_mul(d))
            .ok_or(Error::Overflow("divisor product"))
    }
}

struct Tracked<const N: usize> {
    a: [[i64; N]; N],
    left: [[i64; N]; N],
    right: [[i64; N]; N],
}

fn axpy_row<const N: usize>(m: &mut [[i64; N]; N], dst: usize, src: usize, q: i64) -> Result<()> {
    for k in 0..N {
        m[dst][k] = m[src][k]
            .checked_mul(q)
            .and_then(|x| m[dst][k].checked_sub(x))
            .ok_or(Error::Overflow("smith normal form"))?;
    }
    Ok(())
}

fn axpy_col<const N: usize>(m: &mut [[i64; N]; N], dst: usize, src: usize, q: i64) -> Result<()> {
    for row in m.iter_mut() {
        row[dst] = row[src]
            .checked_mul(q)
            .and_then(|x| row[dst].checked_sub(x))
            .ok_or(Error::Overflow("smith normal form"))?;
    }
    Ok(())
}

impl<const N: usize> Tracked<N> {
    // row_dst -= q * row_src
    fn row_op(&mut self, dst: usize, src: usize, q: i64) -> Result<()> {
        axpy_row(&mut self.a, dst, src, q)?;
        axpy_row(&mut self.left, dst, src, q)
    }

    // col_dst -= q * col_src
    fn col_op(&mut self, dst: usize, src: usize, q: i64) -> Result<()> {
        axpy_col(&mut self.a, dst, src, q)?;
        axpy_col(&mut self.right, dst, src, q)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.left.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut().chain(self.right.iter_mut()) {
            row.swap(i, j);
        }
    }

    fn negate_row(&mut self, i: usize) -> Result<()> {
        for k in 0..N {
            self.a[i][k] = self.a[i][k].checked_neg().ok_or(Error::Overflow("smith normal form"))?;
            self.left[i][k] = self.left[i][k].checked_neg().ok_or(Error::Overflow("smith normal form"))?;
        }
        Ok(())
    }
}

pub fn smith_normal_form<const N: usize>(m: &Mat<i64, N, N>) -> Result<SmithForm<N>> {
    let mut ident = [[0i64; N]; N];
    for (i, row) in ident.iter_mut().enumerate() {
        row[i] = 1;
    }
    let mut t = Tracked { a: m.0, left: ident, right: ident };

    for step in 0..N {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in step..N {
                for j in step..N {
                    let v = t.a[i][j];
                    if v != 0 && best.is_none_or(|(bi, bj)| v.unsigned_abs() < t.a[bi][bj].unsigned_abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(t);
            };
            t.swap_rows(step, pi);
            t.swap_cols(step, pj);
            let p = t.a[step][step];

            let mut clean = true;
            for i in step + 1..N {
                let q = t.a[i][step] / p;
                if q != 0 {
                    t.row_op(i, step, q)?;
                }
                clean &= t.a[i][step] == 0;
            }
            for j in step + 1..N {
                let q = t.a[step][j] / p;
                if q != 0 {
                    t.col_op(j, step, q)?;
                }
                clean &= t.a[step][j] == 0;
            }
            if !clean {
                continue;
            }
            let offender = (step + 1..N).find(|&i| (step + 1..N).any(|j| t.a[i][j] % p != 0));
            match offender {
                // pulling the offending row up makes a remainder appear in the pivot row
                Some(i) => t.row_op(step, i, -1)?,
                None => break,
            }
        }
        if t.a[step][step] < 0 {
            t.negate_row(step)?;
        }
    }
    finish(t)
}

fn finish<const N: usize>(mut t: Tracked<N>) -> Result<SmithForm<N>> {
    for i in 0..N {
        if t.a[i][i] < 0 {
            t.negate_row(i)?;
        }
    }
    let mut divisors = [0i64; N];
    for (i, d) in divisors.iter_mut().enumerate() {
        *d = t.a[i][i];
    }
    Ok(SmithForm { divisors, left: Mat(t.left), right: Mat(t.right) })
}

pub fn smith_normal_form4(e: &IntAltMat4) -> Result<SmithForm<4>> {
    smith_normal_form(&e.as_mat())
}
