//! The dual torus, the Poincaré bundle, translations and `K(F)`.
//!
//! A point of `V̄* = Hom_{ℂ̄}(ℂ², ℂ)` is stored as `c ∈ ℂ²` with
//! `ℓ(z) = c₁z̄₁ + c₂z̄₂`. The dual lattice `L̂` consists of the `ℓ` with
//! `Im ℓ(L) ⊂ ℤ`. On `ℂ² × V̄*` the Poincaré bundle has Hermitian form
//! `H((z₁, ℓ₁), (z₂, ℓ₂)) = ℓ₁(z₂) + conj(ℓ₂(z₁))` and semi-character
//! `χ(α, ℓ) = exp(−iπ Im ℓ(α))` on `L × L̂`.
//!
//! Curvature uses the weight `exp(−πH(z, z))`: `Θ = π Σ h_ij dz_i ∧ dz̄_j`.

use num_complex::Complex;

use crate::error::{domain, Result};
use crate::integer::smith_normal_form4;
use crate::matrix::{solve, Mat, Mat2, Mat4};
use crate::polarization::{
    add_vec, log_automorphic_factor, CVec2, LatticeBasis, LatticeVec, RiemannFormSpec, SemiCharacter,
};
use crate::sampling;
use crate::scalar::{cplx, Real, Tolerance};

/// A conjugate-linear functional `ℓ(z) = c₁z̄₁ + c₂z̄₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPoint<T> {
    pub c: CVec2<T>,
}

impl<T: Real> DualPoint<T> {
    pub fn new(c: CVec2<T>) -> Self {
        Self { c }
    }

    pub fn zero() -> Self {
        Self { c: [cplx(T::zero(), T::zero()); 2] }
    }

    pub fn eval(&self, z: &CVec2<T>) -> Complex<T> {
        self.c[0] * z[0].conj() + self.c[1] * z[1].conj()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { c: add_vec(&self.c, &other.c) }
    }

    pub fn scale(&self, k: T) -> Self {
        Self { c: [self.c[0] * k, self.c[1] * k] }
    }

    /// Largest distance of `Im ℓ(eᵢ)` from an integer.
    pub fn dual_lattice_gap(&self, lat: &LatticeBasis<T>) -> T {
        lat.vectors().iter().fold(T::zero(), |m, e| {
            let x = self.eval(e).im;
            m.max((x - x.round()).abs())
        })
    }

    pub fn in_dual_lattice(&self, lat: &LatticeBasis<T>, tol: &Tolerance<T>) -> bool {
        self.dual_lattice_gap(lat) <= tol.abs_tol
    }
}

/// `ℓ₁..ℓ₄` with `Im ℓᵢ(eⱼ) = δᵢⱼ`.
pub fn dual_basis<T: Real>(lat: &LatticeBasis<T>) -> Result<[DualPoint<T>; 4]> {
    let e = lat.vectors();
    // Im(c z̄) = Im c · Re z − Re c · Im z, unknowns (Re c₁, Re c₂, Im c₁, Im c₂)
    let m = Mat4::from_fn(|j, k| {
        let idx = k % 2;
        if k < 2 {
            -e[j][idx].im
        } else {
            e[j][idx].re
        }
    });
    let x = solve(&m, &Mat4::identity())?;
    Ok(std::array::from_fn(|i| DualPoint::new([cplx(x[(0, i)], x[(2, i)]), cplx(x[(1, i)], x[(3, i)])])))
}

/// `Im ℓᵢ(eⱼ)`.
pub fn pairing_matrix<T: Real>(lat: &LatticeBasis<T>, duals: &[DualPoint<T>; 4]) -> Mat4<T> {
    let e = lat.vectors();
    Mat::from_fn(|i, j| duals[i].eval(&e[j]).im)
}

/// `Σ kᵢ ℓᵢ` for the dual basis.
pub fn dual_lattice_point<T: Real>(duals: &[DualPoint<T>; 4], k: &LatticeVec) -> DualPoint<T> {
    duals.iter().zip(k).fold(DualPoint::zero(), |acc, (d, &ki)| acc.add(&d.scale(T::lit(ki as f64))))
}

/// A point `(z, ℓ)` of `ℂ² × V̄*`.
pub type ProductPoint<T> = (CVec2<T>, DualPoint<T>);

/// A lattice point `(α, ℓ̂)` of `L × L̂` in the bases `e` and `ℓ`.
pub type ProductLatticeVec = (LatticeVec, LatticeVec);

/// The Poincaré data for a lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poincare<T> {
    pub lattice: LatticeBasis<T>,
    pub duals: [DualPoint<T>; 4],
}

impl<T: Real> Poincare<T> {
    pub fn new(lattice: LatticeBasis<T>) -> Result<Self> {
        Ok(Self { duals: dual_basis(&lattice)?, lattice })
    }

    pub fn point(&self, a: &ProductLatticeVec) -> ProductPoint<T> {
        (self.lattice.point(&a.0), dual_lattice_point(&self.duals, &a.1))
    }

    pub fn hermitian(&self, u: &ProductPoint<T>, w: &ProductPoint<T>) -> Complex<T> {
        u.1.eval(&w.0) + w.1.eval(&u.0).conj()
    }

    pub fn alternating(&self, u: &ProductPoint<T>, w: &ProductPoint<T>) -> T {
        self.hermitian(u, w).im
    }

    /// `log χ(α, ℓ̂) = −iπ Im ℓ̂(α)`.
    pub fn log_semicharacter(&self, a: &ProductLatticeVec) -> Complex<T> {
        let (alpha, ell) = self.point(a);
        cplx(T::zero(), -T::PI() * ell.eval(&alpha).im)
    }

    /// `|χ(a + b) − χ(a)χ(b) exp(iπE(a, b))|`.
    pub fn semicharacter_law_residual(&self, a: &ProductLatticeVec, b: &ProductLatticeVec) -> T {
        let sum = (add4(&a.0, &b.0), add4(&a.1, &b.1));
        let e = self.alternating(&self.point(a), &self.point(b));
        let delta = self.log_semicharacter(&sum)
            - self.log_semicharacter(a)
            - self.log_semicharacter(b)
            - cplx(T::zero(), T::PI() * e);
        (delta.exp() - cplx(T::one(), T::zero())).norm()
    }

    pub fn log_factor(&self, a: &ProductLatticeVec, at: &ProductPoint<T>) -> Complex<T> {
        let p = self.point(a);
        let pi = T::PI();
        self.log_semicharacter(a) + self.hermitian(at, &p) * pi + self.hermitian(&p, &p) * (pi * T::lit(0.5))
    }

    pub fn factor(&self, a: &ProductLatticeVec, at: &ProductPoint<T>) -> Complex<T> {
        self.log_factor(a, at).exp()
    }

    pub fn cocycle_residual(&self, a: &ProductLatticeVec, b: &ProductLatticeVec, at: &ProductPoint<T>) -> T {
        let sum = (add4(&a.0, &b.0), add4(&a.1, &b.1));
        let pb = self.point(b);
        let shifted = (add_vec(&at.0, &pb.0), at.1.add(&pb.1));
        let delta = self.log_factor(&sum, at) - self.log_factor(a, &shifted) - self.log_factor(b, at);
        (delta.exp() - cplx(T::one(), T::zero())).norm()
    }

    /// Max of the semi-character law and cocycle residuals over seeded
    /// product-lattice pairs with coordinates in `[−3, 3]`.
    pub fn residuals(&self, trials: usize, seed: u64) -> (T, T) {
        let mut rng = sampling::rng(seed);
        let (mut law, mut cocycle) = (T::zero(), T::zero());
        for _ in 0..trials {
            let a = (sampling::int4(&mut rng, 3), sampling::int4(&mut rng, 3));
            let b = (sampling::int4(&mut rng, 3), sampling::int4(&mut rng, 3));
            let at = (sampling::cvec2(&mut rng), DualPoint::new(sampling::cvec2(&mut rng)));
            law = law.max(self.semicharacter_law_residual(&a, &b));
            cocycle = cocycle.max(self.cocycle_residual(&a, &b, &at));
        }
        (law, cocycle)
    }

    /// Largest deviation from 1 of the factor restricted to `L × {0}` at
    /// `ℓ = 0` and to `{0} × L̂` at `z = 0`.
    pub fn restriction_residual(&self, trials: usize, seed: u64) -> T {
        let mut rng = sampling::rng(seed);
        let one = cplx(T::one(), T::zero());
        let mut worst = T::zero();
        for _ in 0..trials {
            let k = sampling::int4(&mut rng, 3);
            let z = sampling::cvec2(&mut rng);
            let ell = DualPoint::new(sampling::cvec2(&mut rng));
            let on_a = self.factor(&(k, [0; 4]), &(z, DualPoint::zero()));
            let on_dual = self.factor(&([0; 4], k), &([cplx(T::zero(), T::zero()); 2], ell));
            worst = worst.max((on_a - one).norm()).max((on_dual - one).norm());
        }
        worst
    }
}

fn add4(a: &LatticeVec, b: &LatticeVec) -> LatticeVec {
    std::array::from_fn(|i| a[i] + b[i])
}

/// The relation `h_ℓ(z + α) J_ℓ(α, z) = exp(2πi Im ℓ(α)) h_ℓ(z)` with
/// `h_ℓ(z) = exp(−π conj(ℓ(z)))` and `J_ℓ(α, z) = exp(πℓ(α))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberCheck<T> {
    pub residual: T,
    /// `exp(2πi Im ℓ(α))`, equal to 1 for `ℓ ∈ L̂`.
    pub unit_factor: Complex<T>,
}

pub fn fiber_triviality_residual<T: Real>(
    lat: &LatticeBasis<T>,
    ell: &DualPoint<T>,
    alpha: &LatticeVec,
    zpt: &CVec2<T>,
) -> FiberCheck<T> {
    let a = lat.point(alpha);
    let pi = T::PI();
    let log_h = |z: &CVec2<T>| -ell.eval(z).conj() * pi;
    let la = ell.eval(&a);
    let log_unit = cplx(T::zero(), T::lit(2.0) * pi * la.im);
    let delta = log_h(&add_vec(zpt, &a)) + la * pi - log_unit - log_h(zpt);
    FiberCheck { residual: (delta.exp() - cplx(T::one(), T::zero())).norm(), unit_factor: log_unit.exp() }
}

/// `log J_x(α, z) = log J(α, z + a)`.
pub fn log_translate_factor<T: Real>(
    spec: &RiemannFormSpec<T>,
    chi: &SemiCharacter<T>,
    a: &CVec2<T>,
    alpha: &LatticeVec,
    zpt: &CVec2<T>,
) -> Result<Complex<T>> {
    log_automorphic_factor(spec, chi, alpha, &add_vec(zpt, a))
}

pub fn translate_factor<T: Real>(
    spec: &RiemannFormSpec<T>,
    chi: &SemiCharacter<T>,
    a: &CVec2<T>,
    alpha: &LatticeVec,
    zpt: &CVec2<T>,
) -> Result<Complex<T>> {
    Ok(log_translate_factor(spec, chi, a, alpha, zpt)?.exp())
}

/// The character `α ↦ exp(2πi E(a, α))` of `φ_F(a)`, stored through its
/// exponents `E(a, eᵢ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationCharacter<T> {
    pub exponents: [T; 4],
}

impl<T: Real> TranslationCharacter<T> {
    pub fn values(&self) -> [Complex<T>; 4] {
        let two_pi = T::lit(2.0) * T::PI();
        self.exponents.map(|x| Complex::from_polar(T::one(), two_pi * x))
    }

    pub fn log_value(&self, alpha: &LatticeVec) -> Complex<T> {
        let x = self.exponents.iter().zip(alpha).fold(T::zero(), |acc, (&e, &k)| acc + e * T::lit(k as f64));
        cplx(T::zero(), T::lit(2.0) * T::PI() * x)
    }

    /// Largest distance of an exponent from an integer.
    pub fn triviality_gap(&self) -> T {
        self.exponents.iter().fold(T::zero(), |m, &x| m.max((x - x.round()).abs()))
    }

    pub fn is_trivial(&self, tol: &Tolerance<T>) -> bool {
        self.triviality_gap() <= tol.abs_tol
    }
}

pub fn translation_character<T: Real>(spec: &RiemannFormSpec<T>, a: &CVec2<T>) -> TranslationCharacter<T> {
    let e = spec.lattice.vectors();
    TranslationCharacter { exponents: std::array::from_fn(|i| spec.alternating(a, &e[i])) }
}

/// `|J_x(α, z) / (J(α, z) · g(z + α)/g(z) · φ(a)(α)) − 1|` with the
/// coboundary `g(z) = exp(πH(z, a))`.
pub fn translation_ratio_residual<T: Real>(
    spec: &RiemannFormSpec<T>,
    chi: &SemiCharacter<T>,
    a: &CVec2<T>,
    alpha: &LatticeVec,
    zpt: &CVec2<T>,
) -> Result<T> {
    let p = spec.lattice.point(alpha);
    let coboundary = spec.hermitian(&p, a) * T::PI();
    let delta = log_translate_factor(spec, chi, a, alpha, zpt)?
        - log_automorphic_factor(spec, chi, alpha, zpt)?
        - coboundary
        - translation_character(spec, a).log_value(alpha);
    Ok((delta.exp() - cplx(T::one(), T::zero())).norm())
}

/// `K(F) ≅ ⊕ ℤ/dᵢ` from the Smith normal form of `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelGroup {
    pub divisors: [i64; 4],
    pub order: i64,
}

impl KernelGroup {
    /// The cyclic factors of order greater than one.
    pub fn structure(&self) -> Vec<i64> {
        self.divisors.iter().copied().filter(|&d| d > 1).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }
}

pub fn kernel_subgroup<T: Real>(spec: &RiemannFormSpec<T>, tol: &Tolerance<T>) -> Result<KernelGroup> {
    let e = spec.integral_form(tol)?;
    if !crate::halfspace::is_hermitian_pd(&spec.h, tol) {
        return domain("K(F) needs a positive definite form");
    }
    let snf = smith_normal_form4(&e)?;
    let divisors = snf.divisors;
    if divisors.contains(&0) {
        return domain("E is degenerate");
    }
    Ok(KernelGroup { divisors, order: snf.nonzero_product()? })
}

/// Numerators `k` in `[0, D)⁴` of the points `Σ (kᵢ/D) eᵢ` whose translation
/// character is trivial, for `D` the largest elementary divisor.
pub fn kernel_points<T: Real>(spec: &RiemannFormSpec<T>, tol: &Tolerance<T>) -> Result<(i64, Vec<LatticeVec>)> {
    let kg = kernel_subgroup(spec, tol)?;
    let d = kg.divisors.iter().copied().max().unwrap_or(1);
    if d > 64 {
        return domain("largest elementary divisor too big to enumerate");
    }
    let e = spec.lattice.vectors();
    let inv = T::one() / T::lit(d as f64);
    let mut out = Vec::new();
    for idx in 0..d.pow(4) {
        let k: LatticeVec = std::array::from_fn(|i| (idx / d.pow(i as u32)) % d);
        let mut a = [cplx(T::zero(), T::zero()); 2];
        for i in 0..4 {
            let w = T::lit(k[i] as f64) * inv;
            a[0] += e[i][0] * w;
            a[1] += e[i][1] * w;
        }
        if translation_character(spec, &a).is_trivial(tol) {
            out.push(k);
        }
    }
    Ok((d, out))
}

/// Theorem of the square at the level of factors: the character of `a + b`
/// against the product of characters, and the spread over `α` of
/// `J(α, z+a+b) J(α, z) / (J(α, z+a) J(α, z+b))`.
pub fn square_theorem_residual<T: Real>(
    spec: &RiemannFormSpec<T>,
    chi: &SemiCharacter<T>,
    a: &CVec2<T>,
    b: &CVec2<T>,
    trials: usize,
    seed: u64,
) -> Result<T> {
    let (ca, cb, cab) =
        (translation_character(spec, a), translation_character(spec, b), translation_character(spec, &add_vec(a, b)));
    let mut worst = (0..4).fold(T::zero(), |m, i| {
        let d = cab.exponents[i] - ca.exponents[i] - cb.exponents[i];
        m.max((d - d.round()).abs())
    });
    let mut rng = sampling::rng(seed);
    let mut first: Option<Complex<T>> = None;
    for _ in 0..trials {
        let alpha = sampling::int4(&mut rng, 3);
        let z = sampling::cvec2(&mut rng);
        let ln = log_translate_factor(spec, chi, &add_vec(a, b), &alpha, &z)?
            + log_automorphic_factor(spec, chi, &alpha, &z)?
            - log_translate_factor(spec, chi, a, &alpha, &z)?
            - log_translate_factor(spec, chi, b, &alpha, &z)?;
        let r = ln.exp();
        match first {
            None => first = Some(r),
            Some(f) => worst = worst.max((r - f).norm() / f.norm()),
        }
    }
    Ok(worst)
}

/// Curvature constants with a numerical constancy check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvature<T> {
    /// `c = π h`
    pub c: Mat2<Complex<T>>,
    /// Largest deviation of the finite-difference `∂ᵢ∂̄ⱼ (πH(z, z))` from `c`.
    pub constancy_residual: T,
}

pub fn curvature_matrix<T: Real>(spec: &RiemannFormSpec<T>, points: usize, seed: u64) -> Curvature<T> {
    let c = spec.h.scale(cplx(T::PI(), T::zero()));
    let phi = |z: &CVec2<T>| T::PI() * spec.hermitian(z, z).re;
    let step = T::lit(1e-2);
    let unit = |i: usize, imag: bool| -> CVec2<T> {
        let mut v = [cplx(T::zero(), T::zero()); 2];
        v[i] = if imag { cplx(T::zero(), step) } else { cplx(step, T::zero()) };
        v
    };
    // second derivative along real directions u, w
    let d2 = |z: &CVec2<T>, u: &CVec2<T>, w: &CVec2<T>| -> T {
        let at = |su: T, sw: T| phi(&[z[0] + u[0] * su + w[0] * sw, z[1] + u[1] * su + w[1] * sw]);
        let (one, m) = (T::one(), -T::one());
        (at(one, one) - at(one, m) - at(m, one) + at(m, m)) / (T::lit(4.0) * step * step)
    };
    let quarter = T::lit(0.25);
    let mut rng = sampling::rng(seed);
    let mut worst = T::zero();
    for _ in 0..points {
        let z = sampling::cvec2(&mut rng);
        for i in 0..2 {
            for j in 0..2 {
                let (xi, yi, xj, yj) = (unit(i, false), unit(i, true), unit(j, false), unit(j, true));
                // ∂ᵢ∂̄ⱼ = ¼(∂xᵢ − i∂yᵢ)(∂xⱼ + i∂yⱼ)
                let re = d2(&z, &xi, &xj) + d2(&z, &yi, &yj);
                let im = d2(&z, &xi, &yj) - d2(&z, &yi, &xj);
                let fd = cplx(re * quarter, im * quarter);
                worst = worst.max((fd - c[(i, j)]).norm());
            }
        }
    }
    Curvature { c, constancy_residual: worst }
}

/// `E(eᵢ, eⱼ)` recovered from the multipliers: the antisymmetrized
/// variation `log J(eⱼ, z + eᵢ) − log J(eⱼ, z) − log J(eᵢ, z + eⱼ) + log J(eᵢ, z)`
/// equals `2πi E(eᵢ, eⱼ)`.
pub fn recovered_alternating_form<T: Real>(
    log_j: impl Fn(&LatticeVec, &CVec2<T>) -> Result<Complex<T>>,
    lat: &LatticeBasis<T>,
    zpt: &CVec2<T>,
) -> Result<Mat4<T>> {
    let e = lat.vectors();
    let unit = |i: usize| -> LatticeVec { std::array::from_fn(|k| (k == i) as i64) };
    let two_pi = T::lit(2.0) * T::PI();
    let mut out = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let d =
                log_j(&unit(j), &add_vec(zpt, &e[i]))? - log_j(&unit(j), zpt)? - log_j(&unit(i), &add_vec(zpt, &e[j]))?
                    + log_j(&unit(i), zpt)?;
            out[(i, j)] = d.im / two_pi;
        }
    }
    Ok(out)
}

/// Hodge numbers and Betti numbers of a complex 2-torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HodgeTable {
    /// `h[p][q] = C(2, p) C(2, q)`
    pub h: [[u64; 3]; 3],
    /// `b[k] = C(4, k)`
    pub betti: [u64; 5],
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn hodge_numbers() -> HodgeTable {
    HodgeTable {
        h: std::array::from_fn(|p| std::array::from_fn(|q| binomial(2, p as u64) * binomial(2, q as u64))),
        betti: std::array::from_fn(|k| binomial(4, k as u64)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfspace::HatPoint;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn lattice(tau: Complex64, z: Complex64) -> LatticeBasis<f64> {
        LatticeBasis::new(HatPoint::new_unchecked(tau, z), &tol()).unwrap()
    }

    #[test]
    fn dual_basis_of_identity_period() {
        let d = dual_basis(&lattice(c(0.0, 1.0), c(0.0, 0.0))).unwrap();
        // e₁ = (i, 0): Im(c̄-pairing) gives ℓ₁ = (−1, 0); e₃ = (1, 0): ℓ₃ = (i, 0)
        let want = [
            [c(-1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(-1.0, 0.0)],
            [c(0.0, 1.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 1.0)],
        ];
        for i in 0..4 {
            for k in 0..2 {
                assert!((d[i].c[k] - want[i][k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dual_pairing_is_identity() {
        let mut r = sampling::rng(2);
        for _ in 0..50 {
            let lat = LatticeBasis::new(sampling::hat_point(&mut r), &tol()).unwrap();
            let d = dual_basis(&lat).unwrap();
            assert!(pairing_matrix(&lat, &d).max_abs_diff(&Mat4::identity()) < 1e-11);
            let z = sampling::cvec2(&mut r);
            let iz = [z[0] * c(0.0, 1.0), z[1] * c(0.0, 1.0)];
            assert!((d[0].eval(&iz) - d[0].eval(&z) * c(0.0, -1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn poincare_law_cocycle_and_restrictions() {
        let p = Poincare::new(lattice(c(0.3, 1.2), c(-0.1, 0.5))).unwrap();
        assert_eq!(
            p.factor(&([0; 4], [0; 4]), &([c(0.4, 0.1), c(0.2, 0.3)], DualPoint::new([c(0.1, 0.0), c(0.0, 0.2)]))),
            c(1.0, 0.0)
        );
        let (law, cocycle) = p.residuals(300, 4);
        assert!(law < 1e-10, "{law}");
        assert!(cocycle < 1e-9, "{cocycle}");
        assert!(p.restriction_residual(100, 5) < 1e-10);
        assert!(p.duals.iter().all(|d| d.in_dual_lattice(&p.lattice, &tol())));
    }

    #[test]
    fn fiber_relation() {
        let lat = lattice(c(0.2, 1.4), c(0.1, -0.3));
        let z = [c(0.3, 0.1), c(-0.2, 0.4)];
        let zero = fiber_triviality_residual(&lat, &DualPoint::zero(), &[1, 2, 0, -1], &z);
        assert_eq!(zero.residual, 0.0);
        let mut r = sampling::rng(8);
        let duals = dual_basis(&lat).unwrap();
        for _ in 0..100 {
            let ell = DualPoint::new(sampling::cvec2(&mut r));
            let alpha = sampling::int4(&mut r, 3);
            assert!(fiber_triviality_residual(&lat, &ell, &alpha, &z).residual < 1e-10);
            let hat = dual_lattice_point(&duals, &sampling::int4(&mut r, 3));
            let f = fiber_triviality_residual(&lat, &hat, &alpha, &z);
            assert!((f.unit_factor - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn translations() {
        let t = tol();
        let spec = RiemannFormSpec::omega_form(lattice(c(0.2, 2.0), c(0.1, 1.0)));
        let chi = SemiCharacter::canonical(spec.integral_form(&t).unwrap());
        let z = [c(0.3, 0.1), c(-0.2, 0.4)];
        let zero = [c(0.0, 0.0); 2];
        let alpha = [1, 0, -1, 2];
        assert_eq!(
            translate_factor(&spec, &chi, &zero, &alpha, &z).unwrap(),
            crate::polarization::automorphic_factor(&spec, &chi, &alpha, &z).unwrap()
        );
        assert!(translation_character(&spec, &zero).is_trivial(&t));
        let mut r = sampling::rng(9);
        for _ in 0..200 {
            let (a, b) = (sampling::cvec2(&mut r), sampling::cvec2(&mut r));
            let (ca, cb, cab) = (
                translation_character(&spec, &a),
                translation_character(&spec, &b),
                translation_character(&spec, &add_vec(&a, &b)),
            );
            for i in 0..4 {
                assert!((cab.exponents[i] - ca.exponents[i] - cb.exponents[i]).abs() < 1e-12);
            }
            let al = sampling::int4(&mut r, 3);
            assert!(translation_ratio_residual(&spec, &chi, &a, &al, &z).unwrap() < 1e-9);
            let lattice_shift = spec.lattice.point(&sampling::int4(&mut r, 3));
            assert!(translation_character(&spec, &lattice_shift).is_trivial(&t));
        }
    }

    #[test]
    fn translated_factor_keeps_chern_data() {
        let t = tol();
        let spec = RiemannFormSpec::star_form(lattice(c(0.1, 4.0 / 3.0), c(0.2, 1.0 / 3.0)));
        let chi = SemiCharacter::canonical(spec.integral_form(&t).unwrap());
        let a = [c(0.37, -0.2), c(0.11, 0.05)];
        let z = [c(0.1, 0.2), c(0.0, -0.1)];
        let (_, e) = crate::polarization::gram_matrices(&spec);
        let plain =
            recovered_alternating_form(|al, w| log_automorphic_factor(&spec, &chi, al, w), &spec.lattice, &z).unwrap();
        let moved = recovered_alternating_form(|al, w| log_translate_factor(&spec, &chi, &a, al, w), &spec.lattice, &z)
            .unwrap();
        assert!(plain.max_abs_diff(&e) < 1e-9);
        assert!(moved.max_abs_diff(&e) < 1e-9);
        let ones = crate::integer::IntAltMat4::from_real(&moved, &t).unwrap();
        assert_eq!(ones, spec.integral_form(&t).unwrap());
    }

    #[test]
    fn kernel_examples() {
        let t = tol();
        let tau = RiemannFormSpec::tau_form(lattice(c(0.3, 1.5), c(0.0, 0.0)), &t).unwrap();
        assert!(kernel_subgroup(&tau, &t).unwrap().is_trivial());
        let om = RiemannFormSpec::omega_form(lattice(c(0.3, 2.0), c(0.1, 1.0)));
        let k = kernel_subgroup(&om, &t).unwrap();
        assert_eq!(k.divisors, [1, 1, 3, 3]);
        assert_eq!(k.structure(), vec![3, 3]);
        assert_eq!(k.order, 9);
        let (d, pts) = kernel_points(&om, &t).unwrap();
        assert_eq!(d, 3);
        assert_eq!(pts.len(), 9);
        let indefinite = RiemannFormSpec::custom(
            crate::halfspace::complexify(&Mat2::new(1.0, 0.0, 0.0, -1.0)),
            lattice(c(0.0, 1.0), c(0.0, 0.0)),
            &t,
        )
        .unwrap();
        assert!(kernel_subgroup(&indefinite, &t).is_err());
    }

    #[test]
    fn square_theorem() {
        let t = tol();
        let zero = [c(0.0, 0.0); 2];
        let mut r = sampling::rng(10);
        let specs = [
            RiemannFormSpec::tau_form(lattice(c(0.3, 1.1), c(0.2, 0.0)), &t).unwrap(),
            RiemannFormSpec::star_form(lattice(c(0.0, 1.0), c(0.0, 0.0))),
        ];
        for spec in specs {
            let chi = SemiCharacter::canonical(spec.integral_form(&t).unwrap());
            assert!(square_theorem_residual(&spec, &chi, &zero, &zero, 20, 1).unwrap() < 1e-15);
            let (a, b) = (sampling::cvec2(&mut r), sampling::cvec2(&mut r));
            assert!(square_theorem_residual(&spec, &chi, &a, &b, 100, 2).unwrap() < 1e-9);
        }
    }

    #[test]
    fn curvature_examples() {
        let t = tol();
        let tau = RiemannFormSpec::tau_form(lattice(c(0.0, 2.0), c(0.0, 0.0)), &t).unwrap();
        let cv = curvature_matrix(&tau, 10, 3);
        let pi = std::f64::consts::PI;
        assert!((cv.c[(0, 0)] - c(pi / 2.0, 0.0)).norm() < 1e-15);
        assert_eq!(cv.c[(0, 1)], c(0.0, 0.0));
        assert!(cv.constancy_residual < 1e-8);
        let star = curvature_matrix(&RiemannFormSpec::star_form(lattice(c(0.0, 1.0), c(0.0, 0.0))), 10, 3);
        assert!((star.c[(0, 1)] - c(pi, 0.0)).norm() < 1e-15);
        assert!(star.constancy_residual < 1e-8);
        let herm = RiemannFormSpec::custom(
            Mat2::new(c(1.0, 0.0), c(0.3, 0.4), c(0.3, -0.4), c(2.0, 0.0)),
            lattice(c(0.0, 1.0), c(0.0, 0.0)),
            &t,
        )
        .unwrap();
        assert!(curvature_matrix(&herm, 10, 3).constancy_residual < 1e-8);
    }

    #[test]
    fn hodge_table() {
        let h = hodge_numbers();
        assert_eq!(h.h[1][1], 4);
        assert_eq!(h.h, [[1, 2, 1], [2, 4, 2], [1, 2, 1]]);
        assert_eq!(h.betti, [1, 4, 6, 4, 1]);
        assert_eq!(h.betti[2], h.h[2][0] + h.h[1][1] + h.h[0][2]);
        assert_eq!(h.betti.iter().sum::<u64>(), 16);
    }
}
