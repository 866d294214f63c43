//! Riemann forms, semi-characters and automorphic factors on `A_Ω = ℂ²/L_Ω`.
//!
//! The lattice `L_Ω` has basis `e₁ = (τ, z)`, `e₂ = (z, τ)`, `e₃ = (1, 0)`,
//! `e₄ = (0, 1)`. A Hermitian form `H(u, w) = u h w̄ᵗ` is a Riemann form when
//! `E = Im H` is integral on `L_Ω × L_Ω`; the pair `(H, χ)` with a
//! semi-character χ then defines the line bundle with factor
//! `J(α, z) = χ(α) exp(πH(z, α) + (π/2)H(α, α))`.

use std::fmt;

use num_complex::Complex;

use crate::error::{domain, Result};
use crate::halfspace::{complexify, is_hermitian_pd, CMat2, HatPoint};
use crate::integer::{pfaffian4, IntAltMat4};
use crate::matrix::{solve, Mat, Mat2, Mat4};
use crate::sampling;
use crate::scalar::{cplx, Real, Tolerance};

/// A vector of ℂ².
pub type CVec2<T> = [Complex<T>; 2];

/// Lattice coordinates `(n₁, n₂, n₃, n₄)` with respect to `e₁..e₄`.
pub type LatticeVec = [i64; 4];

/// The period lattice of a point of Ĥ₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeBasis<T> {
    omega: HatPoint<T>,
}

impl<T: Real> LatticeBasis<T> {
    pub fn new(omega: HatPoint<T>, tol: &Tolerance<T>) -> Result<Self> {
        HatPoint::new(omega.tau, omega.z, tol)?;
        Ok(Self { omega })
    }

    pub fn omega(&self) -> &HatPoint<T> {
        &self.omega
    }

    pub fn vectors(&self) -> [CVec2<T>; 4] {
        let (t, z) = (self.omega.tau, self.omega.z);
        let (one, zero) = (cplx(T::one(), T::zero()), cplx(T::zero(), T::zero()));
        [[t, z], [z, t], [one, zero], [zero, one]]
    }

    pub fn point(&self, n: &LatticeVec) -> CVec2<T> {
        let e = self.vectors();
        let mut out = [cplx(T::zero(), T::zero()); 2];
        for (k, &nk) in n.iter().enumerate() {
            let c = T::lit(nk as f64);
            out[0] += e[k][0] * c;
            out[1] += e[k][1] * c;
        }
        out
    }

    /// Real 4×4 matrix whose column `j` is `(Re eⱼ, Im eⱼ)`.
    pub fn period_matrix(&self) -> Mat4<T> {
        let e = self.vectors();
        Mat::from_fn(|i, j| if i < 2 { e[j][i].re } else { e[j][i - 2].im })
    }

    /// Real coordinates `r` with `a = Σ rⱼ eⱼ`.
    pub fn real_coords(&self, a: &CVec2<T>) -> Result<[T; 4]> {
        let rhs = Mat::<T, 4, 1>::from_fn(|i, _| if i < 2 { a[i].re } else { a[i - 2].im });
        let sol = solve(&self.period_matrix(), &rhs)?;
        Ok(std::array::from_fn(|i| sol[(i, 0)]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormKind {
    /// `h = I₂`
    Omega,
    /// `h = I₂/Im τ`, for `Ω` with `Im z = 0`
    Tau,
    /// `h = [[2, 1], [1, 2]]`
    Star,
    Custom,
}

impl FormKind {
    pub fn name(self) -> &'static str {
        match self {
            FormKind::Omega => "omega",
            FormKind::Tau => "tau",
            FormKind::Star => "star",
            FormKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "omega" => Some(FormKind::Omega),
            "tau" => Some(FormKind::Tau),
            "star" => Some(FormKind::Star),
            "custom" => Some(FormKind::Custom),
            _ => None,
        }
    }
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A Hermitian form on ℂ² together with the lattice it is tested against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannFormSpec<T> {
    pub kind: FormKind,
    pub h: CMat2<T>,
    pub lattice: LatticeBasis<T>,
}

impl<T: Real> RiemannFormSpec<T> {
    pub fn omega_form(lattice: LatticeBasis<T>) -> Self {
        Self { kind: FormKind::Omega, h: Mat2::identity(), lattice }
    }

    /// The principal form `I₂/Im τ`; requires `Im z = 0`, where its
    /// alternating part is the standard form.
    pub fn tau_form(lattice: LatticeBasis<T>, tol: &Tolerance<T>) -> Result<Self> {
        if !tol.is_zero(lattice.omega.z.im) {
            return domain("the tau form needs Im z = 0");
        }
        let y = lattice.omega.tau.im;
        Ok(Self { kind: FormKind::Tau, h: Mat2::identity().scale(cplx(T::one() / y, T::zero())), lattice })
    }

    pub fn star_form(lattice: LatticeBasis<T>) -> Self {
        let h = complexify(&Mat2::new(T::lit(2.0), T::one(), T::one(), T::lit(2.0)));
        Self { kind: FormKind::Star, h, lattice }
    }

    pub fn custom(h: CMat2<T>, lattice: LatticeBasis<T>, tol: &Tolerance<T>) -> Result<Self> {
        let herm = tol.close(h[(0, 1)], h[(1, 0)].conj()) && tol.is_zero(h[(0, 0)].im) && tol.is_zero(h[(1, 1)].im);
        if !h.all_finite() || !herm {
            return domain("coefficient matrix is not Hermitian");
        }
        Ok(Self { kind: FormKind::Custom, h, lattice })
    }

    /// `Y⁻¹` for `Y = Im Ω`: principal for every `Ω`, equal to the tau form
    /// when `Im z = 0`.
    pub fn principal(lattice: LatticeBasis<T>, tol: &Tolerance<T>) -> Result<Self> {
        let yinv = lattice.omega.im_matrix().inverse(tol.abs_tol)?;
        Self::custom(complexify(&yinv), lattice, tol)
    }

    pub fn of_kind(kind: FormKind, lattice: LatticeBasis<T>, tol: &Tolerance<T>) -> Result<Self> {
        match kind {
            FormKind::Omega => Ok(Self::omega_form(lattice)),
            FormKind::Tau => Self::tau_form(lattice, tol),
            FormKind::Star => Ok(Self::star_form(lattice)),
            FormKind::Custom => domain("a custom form needs an explicit coefficient matrix"),
        }
    }

    /// `H(u, w) = u h w̄ᵗ`.
    pub fn hermitian(&self, u: &CVec2<T>, w: &CVec2<T>) -> Complex<T> {
        let mut acc = cplx(T::zero(), T::zero());
        for i in 0..2 {
            for j in 0..2 {
                acc += u[i] * self.h[(i, j)] * w[j].conj();
            }
        }
        acc
    }

    /// The ℂ-bilinear form `B(u, w) = u h wᵗ`, equal to `H` on ℝ² × ℝ².
    pub fn bilinear(&self, u: &CVec2<T>, w: &CVec2<T>) -> Complex<T> {
        let mut acc = cplx(T::zero(), T::zero());
        for i in 0..2 {
            for j in 0..2 {
                acc += u[i] * self.h[(i, j)] * w[j];
            }
        }
        acc
    }

    /// `E(u, w) = Im H(u, w)`.
    pub fn alternating(&self, u: &CVec2<T>, w: &CVec2<T>) -> T {
        self.hermitian(u, w).im
    }

    /// Sum of forms, as for the tensor product of bundles.
    pub fn add(&self, other: &Self) -> Self {
        Self { kind: FormKind::Custom, h: self.h + other.h, lattice: self.lattice }
    }

    pub fn integral_form(&self, tol: &Tolerance<T>) -> Result<IntAltMat4> {
        IntAltMat4::from_real(&gram_matrices(self).1, tol)
    }
}

/// `S[i][j] = Re H(eᵢ, eⱼ)` and `E[i][j] = Im H(eᵢ, eⱼ)`.
pub fn gram_matrices<T: Real>(spec: &RiemannFormSpec<T>) -> (Mat4<T>, Mat4<T>) {
    let e = spec.lattice.vectors();
    let hm = Mat4::<Complex<T>>::from_fn(|i, j| spec.hermitian(&e[i], &e[j]));
    let mut s = Mat4::from_fn(|i, j| hm[(i, j)].re);
    let mut a = Mat4::from_fn(|i, j| hm[(i, j)].im);
    // symmetrize away rounding so the exact symmetries hold bit for bit
    let half = T::lit(0.5);
    for i in 0..4 {
        a[(i, i)] = T::zero();
        for j in 0..i {
            let sym = (s[(i, j)] + s[(j, i)]) * half;
            s[(i, j)] = sym;
            s[(j, i)] = sym;
            let alt = (a[(i, j)] - a[(j, i)]) * half;
            a[(i, j)] = alt;
            a[(j, i)] = -alt;
        }
    }
    (s, a)
}

/// Outcome of the Riemann form test, with the individual conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannCheck<T> {
    pub nondegenerate: bool,
    pub integral: bool,
    pub positive_definite: bool,
    /// Largest distance of an entry of E from the nearest integer.
    pub integrality_gap: T,
}

impl<T: Real> RiemannCheck<T> {
    pub fn is_riemann_form(&self) -> bool {
        self.nondegenerate && self.integral
    }

    pub fn reasons(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.nondegenerate {
            out.push("H is degenerate");
        }
        if !self.integral {
            out.push("E = Im H is not integral on the lattice");
        }
        out
    }
}

pub fn is_riemann_form<T: Real>(spec: &RiemannFormSpec<T>, tol: &Tolerance<T>) -> RiemannCheck<T> {
    let (_, e) = gram_matrices(spec);
    let integrality_gap = e.0.iter().flatten().fold(T::zero(), |m, &x| m.max((x - x.round()).abs()));
    let scale = e.max_abs();
    RiemannCheck {
        nondegenerate: spec.h.det().norm() > tol.abs_tol,
        integral: integrality_gap <= tol.abs_tol + tol.rel_tol * scale,
        positive_definite: is_hermitian_pd(&spec.h, tol),
        integrality_gap,
    }
}

/// `dim H⁰ = |Pf(E)|` for a positive definite Riemann form.
pub fn section_dimension<T: Real>(spec: &RiemannFormSpec<T>, tol: &Tolerance<T>) -> Result<i64> {
    let check = is_riemann_form(spec, tol);
    if !check.integral {
        return domain(format!("E is not integral (gap {})", check.integrality_gap));
    }
    if !check.positive_definite {
        return domain("the form is not positive definite");
    }
    Ok(pfaffian4(&spec.integral_form(tol)?)?.abs())
}

/// A semi-character of `L_Ω` for an integral alternating form `E`:
/// `χ(n) = Π base_i^{nᵢ} · (−1)^{Σ_{i<j} nᵢnⱼ C_ij}` with correction matrix
/// `C`. The law `χ(α + β) = χ(α)χ(β) exp(iπE(α, β))` holds whenever
/// `C ≡ E mod 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiCharacter<T> {
    base: [Complex<T>; 4],
    e: IntAltMat4,
    correction: IntAltMat4,
}

impl<T: Real> SemiCharacter<T> {
    /// The normalization `χ(eᵢ) = 1`.
    pub fn canonical(e: IntAltMat4) -> Self {
        Self::with_base([cplx(T::one(), T::zero()); 4], e, &Tolerance::default()).expect("unit base values")
    }

    /// Any semi-character for `E`, given its values on the basis.
    pub fn with_base(base: [Complex<T>; 4], e: IntAltMat4, tol: &Tolerance<T>) -> Result<Self> {
        if base.iter().any(|b| !tol.close(b.norm(), T::one())) {
            return domain("semi-character values must have modulus 1");
        }
        Ok(Self { base, e, correction: e })
    }

    /// A character-valued function with an arbitrary parity correction. It
    /// satisfies the semi-character law only when `correction ≡ E mod 2`;
    /// used to build negative controls.
    pub fn with_correction(base: [Complex<T>; 4], e: IntAltMat4, correction: IntAltMat4) -> Self {
        Self { base, e, correction }
    }

    /// The canonical semi-character with every correction term that
    /// involves basis vector `k` removed.
    pub fn corrupted(e: IntAltMat4, k: usize) -> Self {
        let mut c = *e.entries();
        for i in 0..4 {
            c[i][k] = 0;
            c[k][i] = 0;
        }
        let correction = IntAltMat4::new(c).expect("zeroing a row and column keeps antisymmetry");
        Self::with_correction([cplx(T::one(), T::zero()); 4], e, correction)
    }

    pub fn form(&self) -> &IntAltMat4 {
        &self.e
    }

    pub fn base_values(&self) -> &[Complex<T>; 4] {
        &self.base
    }

    /// `Σ_{i<j} nᵢnⱼ C_ij mod 2`.
    pub fn parity(&self, n: &LatticeVec) -> Result<i64> {
        let mut acc: i64 = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                // only parities matter, so reduce each factor first
                let t = (n[i].rem_euclid(2)) * (n[j].rem_euclid(2)) * self.correction.get(i, j).rem_euclid(2);
                acc = (acc + t) % 2;
            }
        }
        Ok(acc)
    }

    /// `log χ(n)` as a complex number with imaginary part in radians.
    pub fn log_value(&self, n: &LatticeVec) -> Result<Complex<T>> {
        let mut acc = cplx(T::zero(), T::PI() * T::lit(self.parity(n)? as f64));
        for (b, &k) in self.base.iter().zip(n) {
            acc += cplx(T::zero(), b.arg() * T::lit(k as f64));
        }
        Ok(acc)
    }

    pub fn value(&self, n: &LatticeVec) -> Result<Complex<T>> {
        Ok(self.log_value(n)?.exp())
    }

    /// Exact check of the law for unit base values: the parities must agree
    /// modulo 2.
    pub fn law_holds_exactly(&self, n: &LatticeVec, m: &LatticeVec) -> Result<bool> {
        let sum: LatticeVec = std::array::from_fn(|i| n[i] + m[i]);
        let lhs = self.parity(&sum)?;
        let rhs = self.parity(n)? + self.parity(m)? + self.e.pair(n, m)?.rem_euclid(2);
        Ok((lhs - rhs).rem_euclid(2) == 0)
    }

    /// `|χ(n + m) − χ(n)χ(m) exp(iπE(n, m))|`.
    pub fn law_residual(&self, n: &LatticeVec, m: &LatticeVec) -> Result<T> {
        let sum: LatticeVec = std::array::from_fn(|i| n[i] + m[i]);
        let e = T::lit(self.e.pair(n, m)?.rem_euclid(2) as f64);
        let delta = self.log_value(&sum)? - self.log_value(n)? - self.log_value(m)? - cplx(T::zero(), T::PI() * e);
        Ok((delta.exp() - cplx(T::one(), T::zero())).norm())
    }

    /// Semi-character of the tensor product: base values multiply, forms add.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let add = |a: &IntAltMat4, b: &IntAltMat4| -> Result<IntAltMat4> {
            let mut c = [[0i64; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    c[i][j] =
                        a.get(i, j).checked_add(b.get(i, j)).ok_or(crate::Error::Overflow("semi-character product"))?;
                }
            }
            IntAltMat4::new(c)
        };
        Ok(Self {
            base: std::array::from_fn(|i| self.base[i] * other.base[i]),
            e: add(&self.e, &other.e)?,
            correction: add(&self.correction, &other.correction)?,
        })
    }
}

/// `log J(α, z) = log χ(α) + πH(z, α) + (π/2)H(α, α)`.
///
/// The real part can be large; callers compare factors through differences
/// of logarithms to avoid overflow.
pub fn log_automorphic_factor<T: Real>(
    spec: &RiemannFormSpec<T>,
    chi: &SemiCharacter<T>,
    alpha: &LatticeVec,
    z: &CVec2<T>,
) -> Result<Complex<T>> {
    let a = spec.lattice.point(alpha);
    let pi = T::PI();
    Ok(chi.log_value(alpha)? + spec.hermitian(z, &a) * pi + spec.hermitian(&a, &a) * (pi * T::lit(0.5)))
}

pub fn automorphic_factor<T: Real>(
    spec: &RiemannFormSpec<T>,
    chi: &SemiCharacter<T>,
    alpha: &LatticeVec,
    z: &CVec2<T>,
) -> Result<Complex<T>> {
    let v = log_automorphic_factor(spec, chi, alpha, z)?.exp();
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(crate::Error::Overflow("automorphic factor"));
    }
    Ok(v)
}

pub(crate) fn add_vec<T: Real>(a: &CVec2<T>, b: &CVec2<T>) -> CVec2<T> {
    [a[0] + b[0], a[1] + b[1]]
}

/// `|J(α+β, z) / (J(α, β+z) J(β, z)) − 1|` for one triple.
pub fn cocycle_residual<T: Real>(
    spec: &RiemannFormSpec<T>,
    chi: &SemiCharacter<T>,
    alpha: &LatticeVec,
    beta: &LatticeVec,
    z: &CVec2<T>,
) -> Result<T> {
    let sum: LatticeVec = std::array::from_fn(|i| alpha[i] + beta[i]);
    let shifted = add_vec(z, &spec.lattice.point(beta));
    let delta = log_automorphic_factor(spec, chi, &sum, z)?
        - log_automorphic_factor(spec, chi, alpha, &shifted)?
        - log_automorphic_factor(spec, chi, beta, z)?;
    Ok((delta.exp() - cplx(T::one(), T::zero())).norm())
}

/// Max cocycle residual over seeded triples with `|αᵢ|, |βᵢ| ≤ 3` and `z` in
/// the unit box.
pub fn factor_cocycle_residual<T: Real>(
    spec: &RiemannFormSpec<T>,
    chi: &SemiCharacter<T>,
    trials: usize,
    seed: u64,
) -> Result<T> {
    let mut rng = sampling::rng(seed);
    let mut worst = T::zero();
    for _ in 0..trials {
        let a = sampling::int4(&mut rng, 3);
        let b = sampling::int4(&mut rng, 3);
        let z = sampling::cvec2(&mut rng);
        worst = worst.max(cocycle_residual(spec, chi, &a, &b, &z)?);
    }
    Ok(worst)
}
