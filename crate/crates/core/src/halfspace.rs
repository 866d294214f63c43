//! The special Siegel half-space and its bounded model.
//!
//! Ĥ₂ is the locus of Siegel points `Ω = [[τ, z], [z, τ]]` with
//! `Im τ > |Im z|`, i.e. the fixed points of `Q = diag(q, q)` acting on ℍ₂.
//! Under the Cayley transform it corresponds to the symmetric matrices `W`
//! in the unit ball 𝔻₂ that commute with `q`.

use num_complex::Complex;

use crate::error::{domain, numeric, Result};
use crate::matrix::{j4, q2, symplectic_residual, Mat2, Mat4};
use crate::scalar::{cplx, i_unit, Real, Scalar, Tolerance};

pub type CMat2<T> = Mat2<Complex<T>>;
pub type CMat4<T> = Mat4<Complex<T>>;

/// `true` iff `m` is Hermitian within tolerance and both leading principal
/// minors exceed `abs_tol`.
pub fn is_hermitian_pd<T: Real>(m: &CMat2<T>, tol: &Tolerance<T>) -> bool {
    let herm = tol.close(m[(0, 1)], m[(1, 0)].conj())
        && tol.is_zero(cplx(m[(0, 0)].im, T::zero()))
        && tol.is_zero(cplx(m[(1, 1)].im, T::zero()));
    herm && m[(0, 0)].re > tol.abs_tol && m.det().re > tol.abs_tol
}

/// Real part of a complex matrix.
pub fn re_part<T: Real, const R: usize, const C: usize>(
    m: &crate::matrix::Mat<Complex<T>, R, C>,
) -> crate::matrix::Mat<T, R, C> {
    crate::matrix::Mat::from_fn(|i, j| m[(i, j)].re)
}

/// Imaginary part of a complex matrix.
pub fn im_part<T: Real, const R: usize, const C: usize>(
    m: &crate::matrix::Mat<Complex<T>, R, C>,
) -> crate::matrix::Mat<T, R, C> {
    crate::matrix::Mat::from_fn(|i, j| m[(i, j)].im)
}

pub fn complexify<T: Real, const R: usize, const C: usize>(
    m: &crate::matrix::Mat<T, R, C>,
) -> crate::matrix::Mat<Complex<T>, R, C> {
    m.map(|x| cplx(x, T::zero()))
}

/// A point `[[τ, z], [z, τ]]` of the special half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatPoint<T> {
    pub tau: Complex<T>,
    pub z: Complex<T>,
}

impl<T: Real> HatPoint<T> {
    /// Validating constructor: requires `Im τ − |Im z| > abs_tol`.
    pub fn new(tau: Complex<T>, z: Complex<T>, tol: &Tolerance<T>) -> Result<Self> {
        let p = Self { tau, z };
        if !(tau.finite() && z.finite()) {
            return domain("point has non-finite coordinates");
        }
        if !p.is_inside(tol) {
            return domain(format!("Im tau = {} must exceed |Im z| = {}", tau.im, z.im.abs()));
        }
        Ok(p)
    }

    pub fn new_unchecked(tau: Complex<T>, z: Complex<T>) -> Self {
        Self { tau, z }
    }

    /// `τ = i·scale`, `z = 0`.
    pub fn scaled_identity(scale: T) -> Self {
        Self { tau: cplx(T::zero(), scale), z: Complex::new(T::zero(), T::zero()) }
    }

    pub fn is_inside(&self, tol: &Tolerance<T>) -> bool {
        self.tau.im - self.z.im.abs() > tol.abs_tol
    }

    pub fn to_matrix(&self) -> CMat2<T> {
        Mat2::new(self.tau, self.z, self.z, self.tau)
    }

    pub fn from_matrix(omega: &CMat2<T>, tol: &Tolerance<T>) -> Result<Self> {
        if !has_hat_pattern(omega, tol) {
            return domain("matrix is not of the form [[tau, z], [z, tau]]");
        }
        Self::new(omega[(0, 0)], omega[(0, 1)], tol)
    }

    /// Real coordinates `(x, y, u, v)` with `τ = x + iy`, `z = u + iv`.
    pub fn coords(&self) -> [T; 4] {
        [self.tau.re, self.tau.im, self.z.re, self.z.im]
    }

    pub fn from_coords(c: [T; 4]) -> Self {
        Self { tau: cplx(c[0], c[1]), z: cplx(c[2], c[3]) }
    }

    /// The two upper half-plane factors `τ + z` and `τ − z`.
    pub fn factors(&self) -> (Complex<T>, Complex<T>) {
        (self.tau + self.z, self.tau - self.z)
    }

    pub fn from_factors(w1: Complex<T>, w2: Complex<T>) -> Self {
        let half = T::lit(0.5);
        Self { tau: (w1 + w2) * half, z: (w1 - w2) * half }
    }

    /// `Im Ω = [[y, v], [v, y]]`.
    pub fn im_matrix(&self) -> Mat2<T> {
        Mat2::new(self.tau.im, self.z.im, self.z.im, self.tau.im)
    }

    /// Max-modulus distance between coordinates.
    pub fn max_diff(&self, other: &Self) -> T {
        (self.tau - other.tau).norm().max((self.z - other.z).norm())
    }
}

fn has_hat_pattern<T: Real>(omega: &CMat2<T>, tol: &Tolerance<T>) -> bool {
    omega.all_finite() && tol.close(omega[(0, 1)], omega[(1, 0)]) && tol.close(omega[(0, 0)], omega[(1, 1)])
}

/// Membership in Ĥ₂: symmetric, equal diagonal, equal off-diagonal, and
/// `Im τ > |Im z|` strictly (gap above `abs_tol`).
pub fn in_hat_h2<T: Real>(omega: &CMat2<T>, tol: &Tolerance<T>) -> bool {
    has_hat_pattern(omega, tol) && omega[(0, 0)].im - omega[(0, 1)].im.abs() > tol.abs_tol
}

/// Membership in the full Siegel half-space ℍ₂.
pub fn in_siegel_h2<T: Real>(omega: &CMat2<T>, tol: &Tolerance<T>) -> bool {
    omega.all_finite() && tol.close(omega[(0, 1)], omega[(1, 0)]) && is_hermitian_pd(&complexify(&im_part(omega)), tol)
}

pub fn is_symplectic<S: Scalar>(m: &Mat4<S>, tol: &Tolerance<S::Real>) -> bool {
    let scale = m.max_abs();
    m.all_finite() && symplectic_residual(m) <= tol.abs_tol + tol.rel_tol * scale * scale
}

/// `M⟨Ω⟩ = (AΩ + B)(CΩ + D)⁻¹`.
pub fn symplectic_act<T: Real>(m: &Mat4<T>, omega: &CMat2<T>, tol: &Tolerance<T>) -> Result<CMat2<T>> {
    if !is_symplectic(m, tol) {
        return domain("acting matrix is not symplectic");
    }
    if !in_siegel_h2(omega, tol) {
        return domain("point is not in the Siegel half-space");
    }
    linear_fractional(&complexify(m), omega, tol)
}

/// `(AW + B)(CW + D)⁻¹` for a 4×4 block matrix, no structural checks.
fn linear_fractional<T: Real>(m: &CMat4<T>, w: &CMat2<T>, tol: &Tolerance<T>) -> Result<CMat2<T>> {
    let [a, b, c, d] = m.blocks();
    let num = a * *w + b;
    let den = c * *w + d;
    let inv = den.inverse(tol.abs_tol).or_else(|_| numeric("denominator CW + D is singular"))?;
    Ok(num * inv)
}

/// Action on a point of Ĥ₂; the image must again lie in Ĥ₂.
pub fn act_on_point<T: Real>(m: &Mat4<T>, p: &HatPoint<T>, tol: &Tolerance<T>) -> Result<HatPoint<T>> {
    let img = symplectic_act(m, &p.to_matrix(), tol)?;
    HatPoint::from_matrix(&img, tol)
}

/// A point of the bounded domain 𝔻₂ = {W = ᵗW, I − W W̄ > 0}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint<T> {
    pub w: CMat2<T>,
}

impl<T: Real> DiskPoint<T> {
    pub fn new(w: CMat2<T>, tol: &Tolerance<T>) -> Result<Self> {
        if !w.all_finite() || !tol.close(w[(0, 1)], w[(1, 0)]) {
            return domain("disk point must be a finite symmetric matrix");
        }
        let gap = Mat2::identity() - w * w.conj();
        if !is_hermitian_pd(&gap, tol) {
            return domain("I - W conj(W) is not positive definite");
        }
        Ok(Self { w })
    }

    pub fn new_unchecked(w: CMat2<T>) -> Self {
        Self { w }
    }

    pub fn origin() -> Self {
        Self { w: Mat2::zeros() }
    }

    /// The special locus: `qW = Wq`.
    pub fn commutes_with_q(&self, tol: &Tolerance<T>) -> bool {
        let q: CMat2<T> = q2();
        (q * self.w).max_abs_diff(&(self.w * q)) <= tol.abs_tol + tol.rel_tol * self.w.max_abs()
    }
}

/// Membership in the special disk D̂₂.
pub fn in_hat_d2<T: Real>(w: &CMat2<T>, tol: &Tolerance<T>) -> bool {
    DiskPoint::new(*w, tol).is_ok_and(|d| d.commutes_with_q(tol))
}

/// `Ψ(Ω) = (Ω − iI)(Ω + iI)⁻¹`.
pub fn cayley_to_disk<T: Real>(omega: &CMat2<T>, tol: &Tolerance<T>) -> Result<DiskPoint<T>> {
    if !in_siegel_h2(omega, tol) {
        return domain("point is not in the Siegel half-space");
    }
    let ii: CMat2<T> = Mat2::identity().scale(i_unit());
    let inv = (*omega + ii).inverse(tol.abs_tol)?;
    Ok(DiskPoint { w: (*omega - ii) * inv })
}

/// `Φ(W) = i(I + W)(I − W)⁻¹`.
pub fn cayley_to_halfspace<T: Real>(w: &DiskPoint<T>, tol: &Tolerance<T>) -> Result<CMat2<T>> {
    let id: CMat2<T> = Mat2::identity();
    let inv = (id - w.w).inverse(tol.abs_tol).or_else(|_| domain("I - W is singular (boundary point)"))?;
    Ok(((id + w.w) * inv).scale(i_unit()))
}

/// `T⁻¹ M T = [[α, β], [β̄, ᾱ]]` with `α = ½((A + D) + i(B − C))` and
/// `β = ½((A − D) − i(B + C))`.
pub fn conjugate_by_t<T: Real>(m: &Mat4<T>) -> CMat4<T> {
    let [a, b, c, d] = m.blocks().map(|x| complexify(&x));
    let half = cplx(T::lit(0.5), T::zero());
    let i = i_unit();
    let alpha = ((a + d) + (b - c).scale(i)).scale(half);
    let beta = ((a - d) - (b + c).scale(i)).scale(half);
    Mat4::from_blocks(alpha, beta, beta.conj(), alpha.conj())
}

/// The Cayley matrix `T = (1/√2)[[I, I], [iI, −iI]]`.
pub fn cayley_matrix<T: Real>() -> CMat4<T> {
    let s = cplx(T::FRAC_1_SQRT_2(), T::zero());
    let id: CMat2<T> = Mat2::identity();
    Mat4::from_blocks(id, id, id.scale(i_unit()), id.scale(-i_unit())).scale(s)
}

/// Residuals of the defining identities of `G* = SU(2,2) ∩ Sp(4,ℂ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GStarResiduals<T> {
    /// `ᵗα ᾱ − ᵗβ̄ β − I`
    pub unitary_block: T,
    /// `ᵗα β̄ − ᵗβ̄ α`
    pub symmetric_block: T,
    /// `ᵗh I₂,₂ h̄ − I₂,₂`
    pub su22: T,
    /// `ᵗh J h − J`
    pub sp4: T,
    /// lower blocks equal the conjugates of the upper ones
    pub conjugate_pattern: T,
}

impl<T: Real> GStarResiduals<T> {
    pub fn max(&self) -> T {
        self.unitary_block.max(self.symmetric_block).max(self.su22).max(self.sp4).max(self.conjugate_pattern)
    }
}

pub fn g_star_residuals<T: Real>(h: &CMat4<T>) -> GStarResiduals<T> {
    let [alpha, beta, c, d] = h.blocks();
    let id: CMat2<T> = Mat2::identity();
    let unitary = alpha.transpose() * alpha.conj() - beta.conj().transpose() * beta;
    let sym = alpha.transpose() * beta.conj() - beta.conj().transpose() * alpha;
    let i22: CMat4<T> = Mat4::from_blocks(id, Mat2::zeros(), Mat2::zeros(), -id);
    let j: CMat4<T> = complexify(&j4());
    GStarResiduals {
        unitary_block: unitary.max_abs_diff(&id),
        symmetric_block: sym.max_abs(),
        su22: (h.transpose() * i22 * h.conj()).max_abs_diff(&i22),
        sp4: (h.transpose() * j * *h).max_abs_diff(&j),
        conjugate_pattern: c.max_abs_diff(&beta.conj()).max(d.max_abs_diff(&alpha.conj())),
    }
}

/// `h⟨W⟩ = (αW + β)(β̄W + ᾱ)⁻¹`.
pub fn disk_act<T: Real>(h: &CMat4<T>, w: &DiskPoint<T>, tol: &Tolerance<T>) -> Result<DiskPoint<T>> {
    let res = g_star_residuals(h);
    let scale = h.max_abs();
    if res.max() > tol.abs_tol + tol.rel_tol * scale * scale {
        return domain("matrix is not an element of G*");
    }
    let img = linear_fractional(h, &w.w, tol)?;
    DiskPoint::new(img, tol).or_else(|_| numeric("image left the disk; input is not a domain point"))
}

/// Harish-Chandra point `β ᾱ⁻¹`, the image of the origin.
pub fn harish_chandra_point<T: Real>(h: &CMat4<T>, tol: &Tolerance<T>) -> Result<CMat2<T>> {
    let [_, beta, _, d] = h.blocks();
    Ok(beta * d.inverse(tol.abs_tol)?)
}
