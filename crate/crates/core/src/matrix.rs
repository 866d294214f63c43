//! Small fixed-size dense matrices.
//!
//! Everything here is sized at compile time (2×2, 4×4, 6×6 in practice), so
//! the storage is a plain row-major array and all products are unrolled loops.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{Float, Num, Zero};

use crate::error::{domain, numeric, Result};
use crate::scalar::{Real, Scalar};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mat<S, const R: usize, const C: usize>(pub [[S; C]; R]);

pub type Mat2<S> = Mat<S, 2, 2>;
pub type Mat4<S> = Mat<S, 4, 4>;

impl<S: Copy + Num, const R: usize, const C: usize> Mat<S, R, C> {
    pub fn zeros() -> Self {
        Mat([[S::zero(); C]; R])
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut out = Self::zeros();
        for i in 0..R {
            for j in 0..C {
                out.0[i][j] = f(i, j);
            }
        }
        out
    }

    pub fn map<U: Copy + Num>(&self, mut f: impl FnMut(S) -> U) -> Mat<U, R, C> {
        Mat::from_fn(|i, j| f(self.0[i][j]))
    }

    pub fn transpose(&self) -> Mat<S, C, R> {
        Mat::from_fn(|i, j| self.0[j][i])
    }

    pub fn scale(&self, s: S) -> Self {
        self.map(|x| x * s)
    }

    pub fn rows(&self) -> &[[S; C]; R] {
        &self.0
    }
}

impl<S: Copy + Num, const N: usize> Mat<S, N, N> {
    pub fn identity() -> Self {
        Mat::from_fn(|i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn trace(&self) -> S {
        (0..N).fold(S::zero(), |acc, i| acc + self.0[i][i])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_zero())
    }
}

impl<S: Scalar, const R: usize, const C: usize> Mat<S, R, C> {
    /// Entrywise conjugate.
    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat<S, C, R> {
        self.transpose().conj()
    }

    /// Max-norm.
    pub fn max_abs(&self) -> S::Real {
        self.0.iter().flatten().fold(S::Real::zero(), |m, x| m.max(x.modulus()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> S::Real {
        (*self - *other).max_abs()
    }

    pub fn all_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.finite())
    }

    /// Induced 1-norm (max column sum).
    pub fn norm_one(&self) -> S::Real {
        (0..C)
            .map(|j| (0..R).fold(S::Real::zero(), |acc, i| acc + self.0[i][j].modulus()))
            .fold(S::Real::zero(), |m, x| m.max(x))
    }
}

impl<S, const R: usize, const C: usize> Index<(usize, usize)> for Mat<S, R, C> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.0[i][j]
    }
}

impl<S, const R: usize, const C: usize> IndexMut<(usize, usize)> for Mat<S, R, C> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.0[i][j]
    }
}

impl<S: Copy + Num, const R: usize, const C: usize> Add for Mat<S, R, C> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Mat::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<S: Copy + Num, const R: usize, const C: usize> Sub for Mat<S, R, C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Mat::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<S: Copy + Num + Neg<Output = S>, const R: usize, const C: usize> Neg for Mat<S, R, C> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x)
    }
}

impl<S: Copy + Num, const R: usize, const K: usize, const C: usize> Mul<Mat<S, K, C>> for Mat<S, R, K> {
    type Output = Mat<S, R, C>;
    fn mul(self, rhs: Mat<S, K, C>) -> Mat<S, R, C> {
        Mat::from_fn(|i, j| (0..K).fold(S::zero(), |acc, k| acc + self.0[i][k] * rhs.0[k][j]))
    }
}

impl<S: Copy + Num> Mat2<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Self {
        Mat([[a, b], [c, d]])
    }

    pub fn det(&self) -> S {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
}

impl<S: Copy + Num + Neg<Output = S>> Mat2<S> {
    /// Classical adjugate, `adj(m) * m = det(m) * I`.
    pub fn adjugate(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Mat([[d, -b], [-c, a]])
    }
}

impl<S: Scalar> Mat2<S> {
    /// Inverse via the adjugate. Fails when `|det| <= threshold`.
    pub fn inverse(&self, threshold: S::Real) -> Result<Self> {
        let det = self.det();
        if !(det.modulus() > threshold) {
            return numeric(format!("2x2 matrix is singular (|det| = {:?})", det.modulus()));
        }
        let inv = S::one() / det;
        Ok(self.adjugate().scale(inv))
    }
}

impl<S: Copy + Num> Mat4<S> {
    /// Upper-left, upper-right, lower-left, lower-right 2×2 blocks.
    pub fn blocks(&self) -> [Mat2<S>; 4] {
        let b = |r: usize, c: usize| Mat2::from_fn(|i, j| self.0[r + i][c + j]);
        [b(0, 0), b(0, 2), b(2, 0), b(2, 2)]
    }

    pub fn from_blocks(a: Mat2<S>, b: Mat2<S>, c: Mat2<S>, d: Mat2<S>) -> Self {
        Mat::from_fn(|i, j| match (i < 2, j < 2) {
            (true, true) => a.0[i][j],
            (true, false) => b.0[i][j - 2],
            (false, true) => c.0[i - 2][j],
            (false, false) => d.0[i - 2][j - 2],
        })
    }
}

/// Determinant by cofactor expansion along the first row.
///
/// Works over any commutative ring; for 4×4 this is 24 triple products, which
/// is exact for integers and accurate enough for the small float matrices here.
pub fn det4<S: Copy + Num>(m: &Mat4<S>) -> S {
    let minor = |skip_col: usize| -> S {
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip_col).collect();
        let e = |r: usize, k: usize| m.0[r][cols[k]];
        e(1, 0) * (e(2, 1) * e(3, 2) - e(2, 2) * e(3, 1)) - e(1, 1) * (e(2, 0) * e(3, 2) - e(2, 2) * e(3, 0))
            + e(1, 2) * (e(2, 0) * e(3, 1) - e(2, 1) * e(3, 0))
    };
    let mut acc = S::zero();
    for (j, &entry) in m.0[0].iter().enumerate() {
        let term = entry * minor(j);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Solves `m x = b` column by column with partial pivoting.
pub fn solve<S: Scalar, const N: usize, const K: usize>(m: &Mat<S, N, N>, b: &Mat<S, N, K>) -> Result<Mat<S, N, K>> {
    let mut a = *m;
    let mut x = *b;
    let scale = m.max_abs();
    let tiny = scale * S::Real::epsilon() * S::Real::lit(N as f64);
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| {
                a.0[i][col].modulus().partial_cmp(&a.0[j][col].modulus()).unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if !(a.0[pivot][col].modulus() > tiny) {
            return numeric("linear system is singular");
        }
        a.0.swap(col, pivot);
        x.0.swap(col, pivot);
        let p = a.0[col][col];
        for row in col + 1..N {
            let f = a.0[row][col] / p;
            if f.is_zero() {
                continue;
            }
            for k in col..N {
                let v = a.0[col][k];
                a.0[row][k] = a.0[row][k] - f * v;
            }
            for k in 0..K {
                let v = x.0[col][k];
                x.0[row][k] = x.0[row][k] - f * v;
            }
        }
    }
    for col in (0..N).rev() {
        let p = a.0[col][col];
        for k in 0..K {
            let mut acc = x.0[col][k];
            for j in col + 1..N {
                acc = acc - a.0[col][j] * x.0[j][k];
            }
            x.0[col][k] = acc / p;
        }
    }
    Ok(x)
}

pub fn inverse<S: Scalar, const N: usize>(m: &Mat<S, N, N>) -> Result<Mat<S, N, N>> {
    solve(m, &Mat::identity())
}

/// Numerical rank by Gaussian elimination with complete pivoting.
///
/// A pivot counts when it exceeds `rel_tol * max|entry|`.
pub fn rank<S: Scalar, const R: usize, const C: usize>(m: &Mat<S, R, C>, rel_tol: S::Real) -> usize {
    let mut a = *m;
    let threshold = rel_tol * m.max_abs();
    let mut rank = 0;
    for step in 0..R.min(C) {
        let mut best = (step, step);
        let mut best_val = S::Real::zero();
        for i in step..R {
            for j in step..C {
                let v = a.0[i][j].modulus();
                if v > best_val {
                    best_val = v;
                    best = (i, j);
                }
            }
        }
        if !(best_val > threshold) || best_val.is_zero() {
            break;
        }
        a.0.swap(step, best.0);
        for row in a.0.iter_mut() {
            row.swap(step, best.1);
        }
        let p = a.0[step][step];
        for i in step + 1..R {
            let f = a.0[i][step] / p;
            for j in step..C {
                let v = a.0[step][j];
                a.0[i][j] = a.0[i][j] - f * v;
            }
        }
        rank += 1;
    }
    rank
}

/// Matrix exponential by scaling and squaring.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2, the
/// exponential of the scaled matrix is summed as a Taylor series until the
/// terms drop below machine precision (never more than 40 terms), and the
/// result is squared `s` times. Inputs with 1-norm above 700 are rejected,
/// since their exponential is not representable in `f64` anyway.
pub fn mat_exp<S: Scalar, const N: usize>(x: &Mat<S, N, N>) -> Result<Mat<S, N, N>> {
    if !x.all_finite() {
        return domain("matrix exponential of a non-finite matrix");
    }
    let norm = x.norm_one();
    if norm > S::Real::lit(700.0) {
        return domain(format!("matrix exponential argument too large (norm {norm:?})"));
    }
    let half = S::Real::lit(0.5);
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > half {
        scaled_norm *= half;
        squarings += 1;
    }
    let factor = S::from_real(S::Real::lit(2.0).powi(-(squarings as i32)));
    let a = x.scale(factor);

    let mut sum = Mat::<S, N, N>::identity();
    let mut term = Mat::<S, N, N>::identity();
    for k in 1..=40 {
        term = (term * a).scale(S::from_real(S::Real::lit(1.0 / k as f64)));
        sum = sum + term;
        if term.max_abs() <= S::Real::epsilon() * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    if !sum.all_finite() {
        return numeric("matrix exponential overflowed");
    }
    Ok(sum)
}

/// Standard symplectic form `[[0, I], [-I, 0]]`.
pub fn j4<T: Real>() -> Mat4<T> {
    let mut j = Mat4::zeros();
    j[(0, 2)] = T::one();
    j[(1, 3)] = T::one();
    j[(2, 0)] = -T::one();
    j[(3, 1)] = -T::one();
    j
}

/// `q = [[0, 1], [1, 0]]`.
pub fn q2<S: Copy + Num>() -> Mat2<S> {
    Mat2::new(S::zero(), S::one(), S::one(), S::zero())
}

/// `Q = diag(q, q)`.
pub fn q4<S: Copy + Num>() -> Mat4<S> {
    Mat4::from_blocks(q2(), Mat2::zeros(), Mat2::zeros(), q2())
}

/// Max-norm residual of `ᵗm J m - J`.
pub fn symplectic_residual<S: Scalar>(m: &Mat4<S>) -> S::Real {
    let j: Mat4<S> = j4::<S::Real>().map(S::from_real);
    (m.transpose() * j * *m).max_abs_diff(&j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn product_and_identity() {
        let a = Mat2::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(a * Mat2::identity(), a);
        assert_eq!(a * a, Mat2::new(7.0, 10.0, 15.0, 22.0));
        assert_eq!(a.det(), -2.0);
    }

    #[test]
    fn adjugate_inverse() {
        let a = Mat2::new(
            Complex64::new(1.0, 1.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 3.0),
            Complex64::new(4.0, -1.0),
        );
        let inv = a.inverse(1e-10).unwrap();
        assert!((a * inv).max_abs_diff(&Mat2::identity()) < 1e-14);
        assert!(Mat2::new(1.0, 2.0, 2.0, 4.0).inverse(1e-10).is_err());
    }

    #[test]
    fn det4_matches_block_diagonal() {
        let m = Mat4::from_blocks(Mat2::new(2_i64, 1, 1, 3), Mat2::zeros(), Mat2::zeros(), Mat2::new(0, 1, -1, 0));
        assert_eq!(det4(&m), 5);
        assert_eq!(det4(&j4::<f64>()), 1.0);
    }

    #[test]
    fn solve_recovers_solution() {
        let m = Mat::<f64, 4, 4>::from_fn(|i, j| 1.0 / (1 + i + j) as f64 + if i == j { 2.0 } else { 0.0 });
        let x = Mat::<f64, 4, 1>::from_fn(|i, _| i as f64 - 1.5);
        let b = m * x;
        let got = solve(&m, &b).unwrap();
        assert!(got.max_abs_diff(&x) < 1e-13);
        assert!(inverse(&Mat4::<f64>::zeros()).is_err());
    }

    #[test]
    fn rank_counts_independent_rows() {
        let m = Mat::<f64, 3, 3>([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]]);
        assert_eq!(rank(&m, 1e-12), 2);
        assert_eq!(rank(&Mat::<f64, 3, 3>::zeros(), 1e-12), 0);
        assert_eq!(rank(&Mat::<f64, 6, 6>::identity(), 1e-12), 6);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let e = mat_exp(&Mat4::<Complex64>::zeros()).unwrap();
        assert_eq!(e, Mat4::identity());
    }

    #[test]
    fn exp_of_rotation_generator() {
        // exp([[0, -t], [t, 0]]) is the rotation by t.
        let t = 2.5_f64;
        let e = mat_exp(&Mat2::new(0.0, -t, t, 0.0)).unwrap();
        let want = Mat2::new(t.cos(), -t.sin(), t.sin(), t.cos());
        assert!(e.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn exp_times_exp_of_negative_is_identity() {
        let x =
            Mat4::<Complex64>::from_fn(|i, j| Complex64::new((i as f64 - j as f64) * 0.7, 0.3 * (i * j) as f64 - 0.5));
        let p = mat_exp(&x).unwrap() * mat_exp(&-x).unwrap();
        assert!(p.max_abs_diff(&Mat4::identity()) < 1e-9);
    }

    #[test]
    fn exp_rejects_huge_argument() {
        let x = Mat2::new(1e4, 0.0, 0.0, 0.0);
        assert!(mat_exp(&x).is_err());
        assert!(mat_exp(&Mat2::new(f64::NAN, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn q_is_symplectic_involution() {
        let q: Mat4<f64> = q4();
        assert_eq!(q * q, Mat4::identity());
        assert_eq!(symplectic_residual(&q), 0.0);
    }
}
