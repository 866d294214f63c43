//! The group Ĝ of symplectic matrices normalizing `Q = diag(q, q)`.
//!
//! Every `M ∈ Ĝ` satisfies `MQ = εQM` for a sign ε. Elements with ε = +1 form
//! the subgroup Ĝ₊, which is isomorphic to SL(2,ℝ) × SL(2,ℝ) through the
//! change of basis that diagonalizes `q`. The sign is read off the matrix,
//! never supplied by callers.

use std::ops::Mul;

use num_complex::Complex;

use crate::error::{domain, Result};
use crate::halfspace::{is_symplectic, symplectic_act, HatPoint};
use crate::integer::{bareiss, BareissOutcome};
use crate::matrix::{inverse, j4, q4, rank, solve, Mat, Mat2, Mat4};
use crate::sampling::{self, SeededRng};
use crate::scalar::{Real, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    fn apply<T: Real>(self, x: T) -> T {
        match self {
            Sign::Plus => x,
            Sign::Minus => -x,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Residual of the block pattern forced by `MQ = εQM`: each 2×2 block is
/// `[[p, r], [r, p]]` for ε = +1 and `[[p, r], [−r, −p]]` for ε = −1.
fn pattern_residual<T: Real>(m: &Mat4<T>, sign: Sign) -> T {
    m.blocks().iter().fold(T::zero(), |acc, b| {
        let d1 = (b[(1, 1)] - sign.apply(b[(0, 0)])).abs();
        let d2 = (b[(1, 0)] - sign.apply(b[(0, 1)])).abs();
        acc.max(d1).max(d2)
    })
}

/// Returns the sign ε when `m` is symplectic and `MQ = εQM`, else `None`.
pub fn in_g_hat<T: Real>(m: &Mat4<T>, tol: &Tolerance<T>) -> Option<Sign> {
    if !is_symplectic(m, tol) {
        return None;
    }
    let bound = tol.abs_tol + tol.rel_tol * m.max_abs();
    [Sign::Plus, Sign::Minus].into_iter().find(|&s| pattern_residual(m, s) <= bound)
}

/// An element of Ĝ together with its detected sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GHatElement<T> {
    matrix: Mat4<T>,
    epsilon: Sign,
}

impl<T: Real> GHatElement<T> {
    pub fn new(matrix: Mat4<T>, tol: &Tolerance<T>) -> Result<Self> {
        match in_g_hat(&matrix, tol) {
            Some(epsilon) => Ok(Self { matrix, epsilon }),
            None => domain("matrix is not in the normalizer of Q in Sp(4,R)"),
        }
    }

    /// Checks that the stated sign matches the detected one.
    pub fn with_sign(matrix: Mat4<T>, epsilon: Sign, tol: &Tolerance<T>) -> Result<Self> {
        let el = Self::new(matrix, tol)?;
        if el.epsilon != epsilon {
            return domain("stated epsilon does not match the matrix pattern");
        }
        Ok(el)
    }

    pub fn identity() -> Self {
        Self { matrix: Mat4::identity(), epsilon: Sign::Plus }
    }

    pub fn q() -> Self {
        Self { matrix: q4(), epsilon: Sign::Plus }
    }

    /// `R = diag(1, −1, 1, −1)`, the representative of Ĝ₋ acting by `z ↦ −z`.
    pub fn reflection() -> Self {
        let mut m = Mat4::identity();
        m[(1, 1)] = -T::one();
        m[(3, 3)] = -T::one();
        Self { matrix: m, epsilon: Sign::Minus }
    }

    pub fn matrix(&self) -> &Mat4<T> {
        &self.matrix
    }

    pub fn epsilon(&self) -> Sign {
        self.epsilon
    }

    /// `[a₁, a₂, b₁, b₂, c₁, c₂, d₁, d₂]`, the first rows of the four blocks.
    pub fn coefficients(&self) -> [T; 8] {
        let [a, b, c, d] = self.matrix.blocks();
        [a[(0, 0)], a[(0, 1)], b[(0, 0)], b[(0, 1)], c[(0, 0)], c[(0, 1)], d[(0, 0)], d[(0, 1)]]
    }

    /// The two scalar identities satisfied by the coefficients of any element:
    /// `a₁d₁ + a₂d₂ − b₁c₁ − b₂c₂ − 1` and `a₁d₂ + a₂d₁ − b₂c₁ − b₁c₂`.
    pub fn coefficient_residuals(&self) -> [T; 2] {
        let [a1, a2, b1, b2, c1, c2, d1, d2] = self.coefficients();
        [a1 * d1 + a2 * d2 - b1 * c1 - b2 * c2 - T::one(), a1 * d2 + a2 * d1 - b2 * c1 - b1 * c2]
    }

    /// `M⁻¹ = −J ᵗM J`.
    pub fn inverse(&self) -> Self {
        let j = j4::<T>();
        Self { matrix: -(j * self.matrix.transpose() * j), epsilon: self.epsilon }
    }

    pub fn neg(&self) -> Self {
        Self { matrix: -self.matrix, epsilon: self.epsilon }
    }

    pub fn act(&self, p: &HatPoint<T>, tol: &Tolerance<T>) -> Result<HatPoint<T>> {
        crate::halfspace::act_on_point(&self.matrix, p, tol)
    }

    /// The SL(2,ℝ) pair and sign with `M = R^k · compose(pair)`, where k = 0
    /// for ε = +1 and k = 1 for ε = −1.
    pub fn split(&self, tol: &Tolerance<T>) -> Result<(Sl2Pair<T>, Sign)> {
        let plus = match self.epsilon {
            Sign::Plus => *self,
            Sign::Minus => Self::reflection() * *self,
        };
        Ok((decompose_sl2_pair(&plus, tol)?, self.epsilon))
    }
}

impl<T: Real> Mul for GHatElement<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self { matrix: self.matrix * rhs.matrix, epsilon: self.epsilon * rhs.epsilon }
    }
}

/// A pair of SL(2,ℝ) matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl2Pair<T> {
    pub m1: Mat2<T>,
    pub m2: Mat2<T>,
}

impl<T: Real> Sl2Pair<T> {
    pub fn new(m1: Mat2<T>, m2: Mat2<T>, tol: &Tolerance<T>) -> Result<Self> {
        let p = Self { m1, m2 };
        p.check(tol)?;
        Ok(p)
    }

    pub fn identity() -> Self {
        Self { m1: Mat2::identity(), m2: Mat2::identity() }
    }

    fn check(&self, tol: &Tolerance<T>) -> Result<()> {
        for (name, m) in [("m1", &self.m1), ("m2", &self.m2)] {
            if !m.all_finite() || !tol.close(m.det(), T::one()) {
                return domain(format!("{name} must have determinant 1 (got {})", m.det()));
            }
        }
        Ok(())
    }
}

impl<T: Real> Mul for Sl2Pair<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self { m1: self.m1 * rhs.m1, m2: self.m2 * rhs.m2 }
    }
}

/// `M₁ = [[a₁+a₂, b₁+b₂], [c₁+c₂, d₁+d₂]]`, `M₂` the same with minus signs.
pub fn decompose_sl2_pair<T: Real>(m: &GHatElement<T>, tol: &Tolerance<T>) -> Result<Sl2Pair<T>> {
    if m.epsilon != Sign::Plus {
        return domain("the SL2 splitting is defined on the epsilon = +1 component");
    }
    let [a1, a2, b1, b2, c1, c2, d1, d2] = m.coefficients();
    let pair = Sl2Pair {
        m1: Mat2::new(a1 + a2, b1 + b2, c1 + c2, d1 + d2),
        m2: Mat2::new(a1 - a2, b1 - b2, c1 - c2, d1 - d2),
    };
    pair.check(tol)?;
    Ok(pair)
}

pub fn compose_sl2_pair<T: Real>(p: &Sl2Pair<T>, tol: &Tolerance<T>) -> Result<GHatElement<T>> {
    p.check(tol)?;
    Ok(compose_unchecked(p))
}

fn compose_unchecked<T: Real>(p: &Sl2Pair<T>) -> GHatElement<T> {
    let half = T::lit(0.5);
    let block = |i: usize, j: usize| {
        let s = (p.m1[(i, j)] + p.m2[(i, j)]) * half;
        let d = (p.m1[(i, j)] - p.m2[(i, j)]) * half;
        Mat2::new(s, d, d, s)
    };
    GHatElement { matrix: Mat4::from_blocks(block(0, 0), block(0, 1), block(1, 0), block(1, 1)), epsilon: Sign::Plus }
}

/// Möbius action of a real 2×2 matrix on the upper half-plane.
pub fn mobius<T: Real>(m: &Mat2<T>, w: Complex<T>) -> Complex<T> {
    (w * m[(0, 0)] + m[(0, 1)]) / (w * m[(1, 0)] + m[(1, 1)])
}

/// `τ* = (M₁⟨τ+z⟩ + M₂⟨τ−z⟩)/2`, `z* = ε(M₁⟨τ+z⟩ − M₂⟨τ−z⟩)/2`.
pub fn act_via_split<T: Real>(
    p: &Sl2Pair<T>,
    pt: &HatPoint<T>,
    epsilon: Sign,
    tol: &Tolerance<T>,
) -> Result<HatPoint<T>> {
    if !pt.is_inside(tol) {
        return domain("point is not in the special half-space");
    }
    let (w1, w2) = pt.factors();
    let (v1, v2) = (mobius(&p.m1, w1), mobius(&p.m2, w2));
    let half = T::lit(0.5);
    let z = (v1 - v2) * half;
    let z = match epsilon {
        Sign::Plus => z,
        Sign::Minus => -z,
    };
    HatPoint::new((v1 + v2) * half, z, tol)
}

/// `[[x₁, x₂], [x₂, x₁]]`.
fn pattern_block<T: Real>(p: T, q: T) -> Mat2<T> {
    Mat2::new(p, q, q, p)
}

/// An element `[[X, Y], [Z, −ᵗX]]` of the Lie algebra ĝ, each block of the
/// form `[[p, q], [q, p]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LieHatElement<T> {
    pub x: Mat2<T>,
    pub y: Mat2<T>,
    pub z: Mat2<T>,
}

impl<T: Real> LieHatElement<T> {
    /// From coordinates `[a₁, a₂, b₁, b₂, c₁, c₂]` for the blocks X, Y, Z.
    pub fn from_coords(c: [T; 6]) -> Self {
        Self { x: pattern_block(c[0], c[1]), y: pattern_block(c[2], c[3]), z: pattern_block(c[4], c[5]) }
    }

    pub fn coords(&self) -> [T; 6] {
        [self.x[(0, 0)], self.x[(0, 1)], self.y[(0, 0)], self.y[(0, 1)], self.z[(0, 0)], self.z[(0, 1)]]
    }

    pub fn to_matrix(&self) -> Mat4<T> {
        Mat4::from_blocks(self.x, self.y, self.z, -self.x.transpose())
    }

    pub fn from_matrix(m: &Mat4<T>, tol: &Tolerance<T>) -> Result<Self> {
        if !in_lie_hat(m, tol) {
            return domain("matrix is not in the Lie algebra of the special group");
        }
        let [x, y, z, _] = m.blocks();
        Ok(Self { x, y, z })
    }

    /// The canonical basis: one unit coordinate each.
    pub fn canonical_basis() -> [Self; 6] {
        std::array::from_fn(|k| {
            let mut c = [T::zero(); 6];
            c[k] = T::one();
            Self::from_coords(c)
        })
    }

    pub fn bracket(&self, other: &Self) -> Self {
        let (a, b) = (self.to_matrix(), other.to_matrix());
        let [x, y, z, _] = (a * b - b * a).blocks();
        Self { x, y, z }
    }

    pub fn exp(&self, tol: &Tolerance<T>) -> Result<GHatElement<T>> {
        GHatElement::new(crate::matrix::mat_exp(&self.to_matrix())?, tol)
    }
}

/// Membership in ĝ: block form `[[X, Y], [Z, −ᵗX]]` with X, Y, Z patterned.
pub fn in_lie_hat<T: Real>(m: &Mat4<T>, tol: &Tolerance<T>) -> bool {
    if !m.all_finite() {
        return false;
    }
    let [x, y, z, w] = m.blocks();
    let bound = tol.abs_tol + tol.rel_tol * m.max_abs();
    let patterned = |b: &Mat2<T>| (b[(0, 0)] - b[(1, 1)]).abs() <= bound && (b[(0, 1)] - b[(1, 0)]).abs() <= bound;
    patterned(&x) && patterned(&y) && patterned(&z) && (w + x.transpose()).max_abs() <= bound
}

/// The Killing form of ĝ in a chosen basis, with diagnostics.
#[derive(Debug, Clone)]
pub struct KillingForm<T> {
    basis: [LieHatElement<T>; 6],
    /// Columns are the coordinates of the basis elements.
    coord_matrix: Mat<T, 6, 6>,
    pub gram: Mat<T, 6, 6>,
}

/// Summary of the computed Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KillingReport<T> {
    pub symmetry_residual: T,
    pub numeric_rank: usize,
    /// Rank from fraction-free elimination, when the Gram matrix is integral.
    pub exact: Option<BareissOutcome>,
    /// Least-squares constant `c` against the pattern
    /// `2c(2a₁p₁ + 2a₂p₂ + b₁r₁ + b₂r₂ + c₁q₁ + c₂q₂)`.
    pub fitted_c: T,
    pub fit_residual: T,
}

impl<T: Real> KillingForm<T> {
    pub fn new(basis: [LieHatElement<T>; 6], tol: &Tolerance<T>) -> Result<Self> {
        let coord_matrix = Mat::from_fn(|i, j| basis[j].coords()[i]);
        if rank(&coord_matrix, tol.rel_tol) < 6 {
            return domain("basis does not span the Lie algebra");
        }
        let mut kf = Self { basis, coord_matrix, gram: Mat::zeros() };
        let ads = basis.map(|b| kf.ad_matrix(&b));
        let ads = ads.into_iter().collect::<Result<Vec<_>>>()?;
        kf.gram = Mat::from_fn(|i, j| (ads[i] * ads[j]).trace());
        Ok(kf)
    }

    pub fn basis(&self) -> &[LieHatElement<T>; 6] {
        &self.basis
    }

    /// Coordinates of `u` with respect to the basis.
    pub fn coords_in_basis(&self, u: &LieHatElement<T>) -> Result<[T; 6]> {
        let rhs = Mat::<T, 6, 1>::from_fn(|i, _| u.coords()[i]);
        let sol = solve(&self.coord_matrix, &rhs)?;
        Ok(std::array::from_fn(|i| sol[(i, 0)]))
    }

    /// Matrix of `ad(u)` in the basis.
    pub fn ad_matrix(&self, u: &LieHatElement<T>) -> Result<Mat<T, 6, 6>> {
        let mut ad = Mat::zeros();
        for (j, b) in self.basis.iter().enumerate() {
            let col = self.coords_in_basis(&u.bracket(b))?;
            for (i, v) in col.into_iter().enumerate() {
                ad[(i, j)] = v;
            }
        }
        Ok(ad)
    }

    pub fn eval(&self, u: &LieHatElement<T>, v: &LieHatElement<T>) -> Result<T> {
        let (cu, cv) = (self.coords_in_basis(u)?, self.coords_in_basis(v)?);
        let mut acc = T::zero();
        for i in 0..6 {
            for j in 0..6 {
                acc += cu[i] * self.gram[(i, j)] * cv[j];
            }
        }
        Ok(acc)
    }

    /// `|B([X,Y],Z) + B(Y,[X,Z])|`.
    pub fn ad_invariance_residual(
        &self,
        x: &LieHatElement<T>,
        y: &LieHatElement<T>,
        z: &LieHatElement<T>,
    ) -> Result<T> {
        Ok((self.eval(&x.bracket(y), z)? + self.eval(y, &x.bracket(z))?).abs())
    }

    pub fn report(&self, tol: &Tolerance<T>) -> KillingReport<T> {
        let g = &self.gram;
        let symmetry_residual = g.max_abs_diff(&g.transpose());
        let numeric_rank = rank(g, tol.rel_tol);
        let rounded = g.map(|v| v.round());
        let integral = rounded.max_abs_diff(g) <= tol.abs_tol + tol.rel_tol * g.max_abs();
        let exact = if integral {
            rounded
                .0
                .iter()
                .flatten()
                .all(|v| v.abs() < T::lit(1e15))
                .then(|| bareiss(&rounded.map(|v| v.to_f64_lossy() as i64)).ok())
                .flatten()
        } else {
            None
        };
        let pattern = Mat::<T, 6, 6>::from_fn(|i, j| {
            let (u, v) = (self.basis[i].coords(), self.basis[j].coords());
            let two = T::lit(2.0);
            two * (two * u[0] * v[0] + two * u[1] * v[1] + u[2] * v[4] + u[3] * v[5] + u[4] * v[2] + u[5] * v[3])
        });
        let mut num = T::zero();
        let mut den = T::zero();
        for i in 0..6 {
            for j in 0..6 {
                num += g[(i, j)] * pattern[(i, j)];
                den += pattern[(i, j)] * pattern[(i, j)];
            }
        }
        let fitted_c = if den > T::zero() { num / den } else { T::zero() };
        let fit_residual = g.max_abs_diff(&pattern.scale(fitted_c));
        KillingReport { symmetry_residual, numeric_rank, exact, fitted_c, fit_residual }
    }
}

/// Membership in the stabilizer K̂ of `iI₂`: `M = [[A, B], [−B, A]]` in Ĝ with
/// `a₁² + a₂² + b₁² + b₂² = 1` and `a₁a₂ + b₁b₂ = 0`.
pub fn in_stabilizer<T: Real>(m: &GHatElement<T>, tol: &Tolerance<T>) -> bool {
    let [a, b, c, d] = m.matrix.blocks();
    let bound = tol.abs_tol + tol.rel_tol * m.matrix.max_abs();
    if (d - a).max_abs() > bound || (c + b).max_abs() > bound {
        return false;
    }
    let [a1, a2, b1, b2, ..] = m.coefficients();
    (a1 * a1 + a2 * a2 + b1 * b1 + b2 * b2 - T::one()).abs() <= bound && (a1 * a2 + b1 * b2).abs() <= bound
}

/// Max coordinate displacement `max_p |M⟨p⟩ − p|` over probe points.
pub fn fixed_point_residual<T: Real>(m: &Mat4<T>, probes: &[HatPoint<T>], tol: &Tolerance<T>) -> Result<T> {
    let mut worst = T::zero();
    for p in probes {
        let om = p.to_matrix();
        let img = symplectic_act(m, &om, tol)?;
        worst = worst.max(img.max_abs_diff(&om));
    }
    Ok(worst)
}

pub fn sample_sl2_pair<T: Real>(rng: &mut SeededRng) -> Sl2Pair<T> {
    Sl2Pair { m1: sampling::sl2(rng), m2: sampling::sl2(rng) }
}

pub fn sample_g_hat_plus_with<T: Real>(rng: &mut SeededRng) -> GHatElement<T> {
    compose_unchecked(&sample_sl2_pair(rng))
}

/// Deterministic element of Ĝ₊ built from two Iwasawa-sampled SL(2,ℝ) factors.
pub fn sample_g_hat_plus<T: Real>(seed: u64) -> GHatElement<T> {
    sample_g_hat_plus_with(&mut sampling::rng(seed))
}

/// Element of Ĝ with either sign, each with probability 1/2.
pub fn sample_g_hat_with<T: Real>(rng: &mut SeededRng) -> GHatElement<T> {
    use rand::Rng;
    let plus = sample_g_hat_plus_with(rng);
    if rng.gen_bool(0.5) {
        plus
    } else {
        GHatElement::reflection() * plus
    }
}

/// Seeded sample of `n ≥ 8` elements of Ĝ: the four central-looking elements
/// `±I₄, ±Q` and the four reflections `±R, ±QR` at seed-chosen positions,
/// random elements of both signs everywhere else.
pub fn kernel_candidates<T: Real>(seed: u64, n: usize) -> Result<Vec<GHatElement<T>>> {
    use rand::seq::index::sample;
    if n < 8 {
        return domain("kernel sample needs at least 8 elements");
    }
    let mut rng = sampling::rng(seed);
    let mut out: Vec<GHatElement<T>> = (0..n).map(|_| sample_g_hat_with(&mut rng)).collect();
    let (id, q, r) = (GHatElement::identity(), GHatElement::q(), GHatElement::reflection());
    let special = [id, id.neg(), q, q.neg(), r, r.neg(), q * r, (q * r).neg()];
    for (slot, el) in sample(&mut rng, n, special.len()).into_iter().zip(special) {
        out[slot] = el;
    }
    Ok(out)
}

/// Inverse of the coordinate matrix of a basis, exposed for diagnostics.
pub fn basis_coordinate_inverse<T: Real>(basis: &[LieHatElement<T>; 6]) -> Result<Mat<T, 6, 6>> {
    inverse(&Mat::from_fn(|i, j| basis[j].coords()[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn s_mat() -> Mat2<f64> {
        Mat2::new(0.0, -1.0, 1.0, 0.0)
    }

    #[test]
    fn membership_examples() {
        let t = tol();
        assert_eq!(in_g_hat(&Mat4::<f64>::identity(), &t), Some(Sign::Plus));
        assert_eq!(in_g_hat(&q4::<f64>(), &t), Some(Sign::Plus));
        assert_eq!(in_g_hat(GHatElement::<f64>::reflection().matrix(), &t), Some(Sign::Minus));

        // symplectic shear [[I, Y], [0, I]] with Y symmetric but not patterned
        let mut m = Mat4::<f64>::identity();
        m[(0, 2)] = 1.0;
        assert!(crate::matrix::symplectic_residual(&m) < 1e-15);
        assert_eq!(in_g_hat(&m, &t), None);
        // non-symplectic patterned matrix
        let mut m = Mat4::<f64>::identity();
        m[(0, 0)] = 2.0;
        m[(1, 1)] = 2.0;
        assert_eq!(in_g_hat(&m, &t), None);
    }

    #[test]
    fn sign_table() {
        use Sign::*;
        assert_eq!(Plus * Plus, Plus);
        assert_eq!(Plus * Minus, Minus);
        assert_eq!(Minus * Plus, Minus);
        assert_eq!(Minus * Minus, Plus);
        let t = tol();
        let mut r = sampling::rng(8);
        for _ in 0..100 {
            let a: GHatElement<f64> = sample_g_hat_with(&mut r);
            let b: GHatElement<f64> = sample_g_hat_with(&mut r);
            let prod = *a.matrix() * *b.matrix();
            assert_eq!(in_g_hat(&prod, &t), Some(a.epsilon() * b.epsilon()));
        }
    }

    #[test]
    fn coefficient_identities_hold_for_both_signs() {
        let mut r = sampling::rng(12);
        for _ in 0..100 {
            let m: GHatElement<f64> = sample_g_hat_with(&mut r);
            let [r1, r2] = m.coefficient_residuals();
            if m.epsilon() == Sign::Plus {
                assert!(r1.abs() < 1e-12 && r2.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn split_examples() {
        let t = tol();
        let p = decompose_sl2_pair(&GHatElement::<f64>::identity(), &t).unwrap();
        assert_eq!(p, Sl2Pair::identity());
        let m = compose_sl2_pair(&Sl2Pair { m1: s_mat(), m2: Mat2::identity() }, &t).unwrap();
        assert_eq!(m.epsilon(), Sign::Plus);
        let back = decompose_sl2_pair(&m, &t).unwrap();
        assert_eq!(back.m1, s_mat());
        assert_eq!(back.m2, Mat2::identity());
        assert!(decompose_sl2_pair(&GHatElement::<f64>::reflection(), &t).is_err());
        let bad = Sl2Pair { m1: Mat2::new(2.0, 0.0, 0.0, 1.0), m2: Mat2::identity() };
        assert!(compose_sl2_pair(&bad, &t).is_err());
    }

    #[test]
    fn compose_is_a_homomorphism() {
        let t = tol();
        let mut r = sampling::rng(21);
        for _ in 0..100 {
            let p = sample_sl2_pair::<f64>(&mut r);
            let q = sample_sl2_pair::<f64>(&mut r);
            let lhs = compose_sl2_pair(&(p * q), &t).unwrap();
            let rhs = compose_sl2_pair(&p, &t).unwrap() * compose_sl2_pair(&q, &t).unwrap();
            assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-11);
            let rt = decompose_sl2_pair(&compose_sl2_pair(&p, &t).unwrap(), &t).unwrap();
            assert!(rt.m1.max_abs_diff(&p.m1) < 1e-12 && rt.m2.max_abs_diff(&p.m2) < 1e-12);
        }
    }

    #[test]
    fn rotation_pairs_fix_the_center() {
        let t = tol();
        let rot = |th: f64| Mat2::new(th.cos(), -th.sin(), th.sin(), th.cos());
        let m = compose_sl2_pair(&Sl2Pair { m1: rot(0.7), m2: rot(-1.9) }, &t).unwrap();
        assert!(in_stabilizer(&m, &t));
        let c = HatPoint::scaled_identity(1.0);
        assert!(m.act(&c, &t).unwrap().max_diff(&c) < 1e-14);
    }

    #[test]
    fn stabilizer_examples() {
        let t = tol();
        assert!(in_stabilizer(&GHatElement::<f64>::identity(), &t));
        assert!(in_stabilizer(&GHatElement::<f64>::q(), &t));
        assert!(in_stabilizer(&GHatElement::<f64>::reflection(), &t));
        let shear = Mat2::new(1.0, 1.0, 0.0, 1.0);
        let m = compose_sl2_pair(&Sl2Pair { m1: shear, m2: shear }, &t).unwrap();
        assert!(!in_stabilizer(&m, &t));
    }

    #[test]
    fn stabilizer_matches_fixed_point_condition() {
        let t = tol();
        let c = HatPoint::scaled_identity(1.0);
        let mut r = sampling::rng(77);
        for _ in 0..200 {
            let m: GHatElement<f64> = sample_g_hat_with(&mut r);
            let fixes = m.act(&c, &t).unwrap().max_diff(&c) < 1e-9;
            assert_eq!(in_stabilizer(&m, &t), fixes);
        }
    }

    #[test]
    fn split_action_example() {
        let t = tol();
        let shear = Mat2::new(1.0, 1.0, 0.0, 1.0);
        let p = Sl2Pair { m1: shear, m2: shear };
        let img = act_via_split(&p, &HatPoint::scaled_identity(1.0), Sign::Plus, &t).unwrap();
        assert!((img.tau - cplx(1.0, 1.0)).norm() < 1e-15);
        assert!(img.z.norm() < 1e-15);
    }

    #[test]
    fn split_action_matches_matrix_action_for_both_signs() {
        let t = tol();
        let mut r = sampling::rng(31);
        for _ in 0..200 {
            let m: GHatElement<f64> = sample_g_hat_with(&mut r);
            let p = sampling::hat_point(&mut r);
            let (pair, sign) = m.split(&t).unwrap();
            let a = act_via_split(&pair, &p, sign, &t).unwrap();
            let b = m.act(&p, &t).unwrap();
            assert!(a.max_diff(&b) < 1e-10);
        }
    }

    #[test]
    fn lie_algebra_examples() {
        let t = tol();
        assert!(in_lie_hat(&Mat4::<f64>::zeros(), &t));
        for b in LieHatElement::<f64>::canonical_basis() {
            assert!(in_lie_hat(&b.to_matrix(), &t));
            let jm = j4::<f64>();
            let x = b.to_matrix();
            assert!((x.transpose() * jm + jm * x).max_abs() < 1e-15);
        }
        let mut m = Mat4::<f64>::zeros();
        m[(0, 2)] = 1.0;
        assert!(!in_lie_hat(&m, &t));
    }

    #[test]
    fn exponentials_land_in_the_plus_component() {
        let t = tol();
        let mut r = sampling::rng(4);
        for _ in 0..50 {
            let c: [f64; 6] = std::array::from_fn(|_| sampling::uniform(&mut r, -1.0, 1.0));
            let x = LieHatElement::from_coords(c);
            let g = x.exp(&t).unwrap();
            assert_eq!(g.epsilon(), Sign::Plus);
            let back = LieHatElement::from_coords(c.map(|v| -v)).exp(&t).unwrap();
            assert!((g * back).matrix().max_abs_diff(&Mat4::identity()) < 1e-9);
        }
    }

    #[test]
    fn killing_form_canonical_basis() {
        let t = tol();
        let kf = KillingForm::new(LieHatElement::<f64>::canonical_basis(), &t).unwrap();
        let rep = kf.report(&t);
        assert!(rep.symmetry_residual < 1e-12);
        assert_eq!(rep.numeric_rank, 6);
        assert_eq!(rep.exact.map(|e| e.rank), Some(6));
        assert!((rep.fitted_c - 4.0).abs() < 1e-12);
        assert!(rep.fit_residual < 1e-12);
        // B(X, X) for X = diag-block generator [[1,0],[0,1]] in X: 16
        assert!((kf.gram[(0, 0)] - 16.0).abs() < 1e-12);
    }

    #[test]
    fn killing_form_rejects_dependent_basis() {
        let mut b = LieHatElement::<f64>::canonical_basis();
        b[5] = b[4];
        assert!(KillingForm::new(b, &tol()).is_err());
    }

    #[test]
    fn kernel_candidates_contain_the_special_elements() {
        let t = tol();
        let s: Vec<GHatElement<f64>> = kernel_candidates(3, 64).unwrap();
        assert_eq!(s.len(), 64);
        let count = |m: &Mat4<f64>| s.iter().filter(|e| e.matrix() == m).count();
        assert_eq!(count(&Mat4::identity()), 1);
        assert_eq!(count(&-q4::<f64>()), 1);
        assert!(s.iter().all(|e| in_g_hat(e.matrix(), &t) == Some(e.epsilon())));
    }

    #[test]
    fn inverse_is_group_inverse() {
        let mut r = sampling::rng(19);
        for _ in 0..20 {
            let m: GHatElement<f64> = sample_g_hat_with(&mut r);
            assert!((m * m.inverse()).matrix().max_abs_diff(&Mat4::identity()) < 1e-12);
        }
    }
}
