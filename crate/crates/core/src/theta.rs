//! The Riemann theta series on ℂ² × Ĥ₂ and its functional equations.
//!
//! `θ(z, Ω) = Σ_{n∈ℤ²} exp(iπ nΩnᵗ + 2πi n·z)`. With `b = Im z` and
//! `Y = Im Ω` the modulus of a term is `exp(π bY⁻¹b) exp(−π (n−n₀)Y(n−n₀))`
//! for `n₀ = −Y⁻¹b`, so the sum is taken over a box centred at the integer
//! point nearest `n₀` and carried as `exp(log_scale) · normalized` with
//! `log_scale = π bY⁻¹b`.

use num_complex::Complex;

use crate::error::{domain, numeric, Result};
use crate::halfspace::HatPoint;
use crate::integer::IntAltMat4;
use crate::polarization::{add_vec, log_automorphic_factor, CVec2, LatticeVec, RiemannFormSpec, SemiCharacter};
use crate::scalar::{cplx, Real, Tolerance};

/// Radius used when an accuracy target cannot be met sooner.
pub const MAX_RADIUS: u32 = 400;

/// How far to sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation<T> {
    /// Fixed box half-width.
    Radius(u32),
    /// Smallest radius whose relative tail bound is at most the target.
    Accuracy(T),
}

/// A truncation together with its a posteriori tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaTruncation<T> {
    pub radius: u32,
    /// Bound on the omitted terms relative to the largest term.
    pub tail_bound: T,
}

/// Smallest eigenvalue of `Im Ω`.
fn lambda_min<T: Real>(omega: &HatPoint<T>) -> T {
    omega.tau.im - omega.z.im.abs()
}

/// `Σ_{s>R} 8s exp(−πλ(s − ½)²)`.
pub fn tail_bound<T: Real>(lambda: T, radius: u32) -> T {
    let (pi, half, eight) = (T::PI(), T::lit(0.5), T::lit(8.0));
    let mut total = T::zero();
    let mut s = radius as u64 + 1;
    loop {
        let r = T::lit(s as f64) - half;
        let term = eight * T::lit(s as f64) * (-pi * lambda * r * r).exp();
        total += term;
        // terms decay faster than geometrically once r·λ ≳ 1
        if term <= total * T::epsilon() * T::lit(1e-3) || term == T::zero() {
            break;
        }
        s += 1;
    }
    total
}

impl<T: Real> ThetaTruncation<T> {
    pub fn new(omega: &HatPoint<T>, radius: u32) -> Result<Self> {
        if radius == 0 {
            return domain("theta radius must be at least 1");
        }
        Ok(Self { radius, tail_bound: tail_bound(lambda_min(omega), radius) })
    }

    /// Smallest radius in `1..=MAX_RADIUS` meeting the target; `MAX_RADIUS`
    /// when none does (the tail bound then exceeds the target).
    pub fn for_accuracy(omega: &HatPoint<T>, target: T) -> Self {
        let lambda = lambda_min(omega);
        let mut r = 1;
        while r < MAX_RADIUS && tail_bound(lambda, r) > target {
            r += 1;
        }
        Self { radius: r, tail_bound: tail_bound(lambda, r) }
    }

    pub fn resolve(omega: &HatPoint<T>, rule: Truncation<T>) -> Result<Self> {
        match rule {
            Truncation::Radius(r) => Self::new(omega, r),
            Truncation::Accuracy(t) if t > T::zero() => Ok(Self::for_accuracy(omega, t)),
            Truncation::Accuracy(_) => domain("theta accuracy target must be positive"),
        }
    }
}

/// A theta value `exp(log_scale) · normalized`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue<T> {
    pub log_scale: T,
    pub normalized: Complex<T>,
    pub truncation: ThetaTruncation<T>,
}

impl<T: Real> ThetaValue<T> {
    pub fn value(&self) -> Result<Complex<T>> {
        let v = self.normalized * self.log_scale.exp();
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(crate::Error::Overflow("theta value"));
        }
        Ok(v)
    }

    /// Complex logarithm of the value, finite whenever `normalized ≠ 0`.
    pub fn ln(&self) -> Complex<T> {
        self.normalized.ln() + cplx(self.log_scale, T::zero())
    }

    pub fn meets(&self, target: T) -> bool {
        self.truncation.tail_bound <= target
    }

    pub fn warning(&self, target: T) -> Option<String> {
        (!self.meets(target)).then(|| {
            format!(
                "tail bound {} at radius {} exceeds the requested {}",
                self.truncation.tail_bound, self.truncation.radius, target
            )
        })
    }
}

pub fn theta_series<T: Real>(omega: &HatPoint<T>, zpt: &CVec2<T>, rule: Truncation<T>) -> Result<ThetaValue<T>> {
    if !omega.is_inside(&Tolerance::default()) {
        return domain("Ω is not in Ĥ₂");
    }
    if !(zpt[0].re.is_finite() && zpt[0].im.is_finite() && zpt[1].re.is_finite() && zpt[1].im.is_finite()) {
        return domain("z has non-finite entries");
    }
    let truncation = ThetaTruncation::resolve(omega, rule)?;
    let (tau, zz) = (omega.tau, omega.z);
    let (y, v) = (tau.im, zz.im);
    let det = y * y - v * v;
    let b = [zpt[0].im, zpt[1].im];
    // Y⁻¹b
    let yb = [(y * b[0] - v * b[1]) / det, (y * b[1] - v * b[0]) / det];
    let log_scale = T::PI() * (b[0] * yb[0] + b[1] * yb[1]);
    let centre = [(-yb[0]).round(), (-yb[1]).round()];
    let (c0, c1) = (
        centre[0].to_i64().ok_or(crate::Error::Overflow("theta centre"))?,
        centre[1].to_i64().ok_or(crate::Error::Overflow("theta centre"))?,
    );
    let r = truncation.radius as i64;
    let (pi, two) = (T::PI(), T::lit(2.0));
    let ipi = cplx(T::zero(), pi);
    let mut acc = cplx(T::zero(), T::zero());
    for n0 in c0 - r..=c0 + r {
        for n1 in c1 - r..=c1 + r {
            let (a, c) = (T::lit(n0 as f64), T::lit(n1 as f64));
            let quad = tau * (a * a + c * c) + zz * (two * a * c);
            let lin = zpt[0] * a + zpt[1] * c;
            let e = ipi * (quad + lin * two) - cplx(log_scale, T::zero());
            acc += e.exp();
        }
    }
    Ok(ThetaValue { log_scale, normalized: acc, truncation })
}

/// Offset applied when `z` is close to a zero of θ.
fn null_shift<T: Real>() -> CVec2<T> {
    [cplx(T::lit(0.1), T::zero()), cplx(T::zero(), T::lit(0.07))]
}

/// Retries allowed at shifted points before a theta-null is reported.
pub const NULL_RETRIES: usize = 3;

/// Outcome of a functional-equation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalResidual<T> {
    pub residual: T,
    /// Point at which the check was made, after any theta-null retries.
    pub z_used: CVec2<T>,
    pub retries: usize,
    /// Largest tail bound among the series evaluated.
    pub tail_bound: T,
}

/// `|θ(z)| / exp(log_scale)` below this counts as a theta-null.
fn null_threshold<T: Real>() -> T {
    T::lit(1e-6)
}

fn with_null_retry<T: Real>(
    zpt: &CVec2<T>,
    mut check: impl FnMut(&CVec2<T>) -> Result<Option<(T, T)>>,
) -> Result<FunctionalResidual<T>> {
    let mut z = *zpt;
    for retries in 0..=NULL_RETRIES {
        if let Some((residual, tail_bound)) = check(&z)? {
            return Ok(FunctionalResidual { residual, z_used: z, retries, tail_bound });
        }
        z = add_vec(&z, &null_shift());
    }
    numeric("inconclusive: θ vanishes to working accuracy at every retry point")
}

fn ln_unit_residual<T: Real>(delta: Complex<T>) -> T {
    (delta.exp() - cplx(T::one(), T::zero())).norm()
}

/// Relative residual of `θ(z + mΩ + k) = exp(−iπ mΩmᵗ − 2πi m·z) θ(z)`,
/// measured against the modulus of the right-hand side.
pub fn quasi_periodicity_residual<T: Real>(
    omega: &HatPoint<T>,
    zpt: &CVec2<T>,
    m: [i64; 2],
    k: [i64; 2],
    rule: Truncation<T>,
) -> Result<FunctionalResidual<T>> {
    let (tau, zz) = (omega.tau, omega.z);
    let (m0, m1) = (T::lit(m[0] as f64), T::lit(m[1] as f64));
    let alpha = [tau * m0 + zz * m1 + T::lit(k[0] as f64), zz * m0 + tau * m1 + T::lit(k[1] as f64)];
    let mom = tau * (m0 * m0 + m1 * m1) + zz * (T::lit(2.0) * m0 * m1);
    let ipi = cplx(T::zero(), T::PI());
    with_null_retry(zpt, |z| {
        let base = theta_series(omega, z, rule)?;
        if base.normalized.norm() < null_threshold() {
            return Ok(None);
        }
        let shifted = theta_series(omega, &add_vec(z, &alpha), rule)?;
        let log_factor = -ipi * mom - ipi * (z[0] * m0 + z[1] * m1) * T::lit(2.0);
        let delta = shifted.ln() - log_factor - base.ln();
        let tail = base.truncation.tail_bound.max(shifted.truncation.tail_bound);
        Ok(Some((ln_unit_residual(delta), tail)))
    })
}

/// `log θ̃(z)` for `θ̃(z) = exp((π/2)B(z, z)) θ(z)`, `B(u, w) = u h wᵗ`.
pub fn log_bridged_theta<T: Real>(
    spec: &RiemannFormSpec<T>,
    zpt: &CVec2<T>,
    rule: Truncation<T>,
) -> Result<(Complex<T>, ThetaValue<T>)> {
    let th = theta_series(spec.lattice.omega(), zpt, rule)?;
    Ok((spec.bilinear(zpt, zpt) * (T::PI() * T::lit(0.5)) + th.ln(), th))
}

/// Result of the principal-case bridge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeOutcome<T> {
    pub residual: T,
    /// The ±1 character on `e₁..e₄` separating the classical factor from the
    /// canonical semi-character.
    pub twist: [i8; 4],
    /// Distance of the measured basis ratios from ±1.
    pub twist_fit_residual: T,
    pub z_used: CVec2<T>,
    pub retries: usize,
    pub tail_bound: T,
}

/// `θ̃(z + α) / (J(α, z) θ̃(z))` as a logarithm.
fn bridge_log_ratio<T: Real>(
    spec: &RiemannFormSpec<T>,
    chi: &SemiCharacter<T>,
    alpha: &LatticeVec,
    z: &CVec2<T>,
    rule: Truncation<T>,
) -> Result<(Complex<T>, T)> {
    let (lz, tz) = log_bridged_theta(spec, z, rule)?;
    let (ls, ts) = log_bridged_theta(spec, &add_vec(z, &spec.lattice.point(alpha)), rule)?;
    let lj = log_automorphic_factor(spec, chi, alpha, z)?;
    Ok((ls - lj - lz, tz.truncation.tail_bound.max(ts.truncation.tail_bound)))
}

/// Checks `θ̃(z + α) = J(α, z) θ̃(z)` for a principal form (integral `E`
/// equal to the standard form) with the canonical semi-character, after
/// fitting a ±1 twist on the basis vectors.
pub fn principal_bridge_residual<T: Real>(
    spec: &RiemannFormSpec<T>,
    zpt: &CVec2<T>,
    alpha: &LatticeVec,
    rule: Truncation<T>,
    tol: &Tolerance<T>,
) -> Result<BridgeOutcome<T>> {
    let e = spec.integral_form(tol)?;
    if e != IntAltMat4::standard() {
        return domain("the bridge needs a principal form (E equal to the standard form)");
    }
    let chi = SemiCharacter::canonical(e);
    let one = cplx(T::one(), T::zero());
    let mut twist = [1i8; 4];
    let mut fit = T::zero();
    let out = with_null_retry(zpt, |z| {
        if theta_series(spec.lattice.omega(), z, rule)?.normalized.norm() < null_threshold() {
            return Ok(None);
        }
        fit = T::zero();
        let mut tail = T::zero();
        for (i, t) in twist.iter_mut().enumerate() {
            let mut unit = [0i64; 4];
            unit[i] = 1;
            let (ln, tb) = bridge_log_ratio(spec, &chi, &unit, z, rule)?;
            tail = tail.max(tb);
            let r = ln.exp();
            *t = if r.re >= T::zero() { 1 } else { -1 };
            fit = fit.max((r - one * T::lit(*t as f64)).norm());
        }
        let odd = alpha.iter().zip(&twist).filter(|(&a, &t)| t < 0 && a.rem_euclid(2) == 1).count();
        let sign = if odd % 2 == 0 { T::zero() } else { T::PI() };
        let (ln, tb) = bridge_log_ratio(spec, &chi, alpha, z, rule)?;
        Ok(Some((ln_unit_residual(ln - cplx(T::zero(), sign)), tail.max(tb))))
    })?;
    Ok(BridgeOutcome {
        residual: out.residual,
        twist,
        twist_fit_residual: fit,
        z_used: out.z_used,
        retries: out.retries,
        tail_bound: out.tail_bound,
    })
}

/// Logarithms of the Fourier coefficients `a_n` of a solution of the
/// classical functional equation, obtained from `a₀ = 1` by the recursion
/// `a_{n+eⱼ} = a_n exp(2πi(½Ωⱼⱼ + (nΩ)ⱼ))`.
fn recursion_coefficient<T: Real>(omega: &HatPoint<T>, n: [i64; 2]) -> Complex<T> {
    let (tau, zz) = (omega.tau, omega.z);
    let two_pi_i = cplx(T::zero(), T::lit(2.0) * T::PI());
    let half = T::lit(0.5);
    let step = |cur: [i64; 2], j: usize| -> Complex<T> {
        let (a, b) = (T::lit(cur[0] as f64), T::lit(cur[1] as f64));
        let row = if j == 0 { tau * a + zz * b } else { zz * a + tau * b };
        two_pi_i * (tau * half + row)
    };
    let mut acc = cplx(T::zero(), T::zero());
    let mut cur = [0i64; 2];
    for j in 0..2 {
        while cur[j] != n[j] {
            if n[j] > cur[j] {
                acc += step(cur, j);
                cur[j] += 1;
            } else {
                cur[j] -= 1;
                acc -= step(cur, j);
            }
        }
    }
    acc
}

/// Spread of `f(z)/θ(z)` over the given points, where `f` is the solution of
/// the classical functional equation built from its coefficient recursion.
/// A solution space of dimension one forces the ratio to be constant.
pub fn solution_ratio_spread<T: Real>(omega: &HatPoint<T>, points: &[CVec2<T>], radius: u32) -> Result<T> {
    let r = radius as i64;
    let two_pi_i = cplx(T::zero(), T::lit(2.0) * T::PI());
    let mut coeffs = Vec::with_capacity(((2 * r + 1) * (2 * r + 1)) as usize);
    for n0 in -r..=r {
        for n1 in -r..=r {
            coeffs.push(([T::lit(n0 as f64), T::lit(n1 as f64)], recursion_coefficient(omega, [n0, n1])));
        }
    }
    let mut ratios = Vec::with_capacity(points.len());
    for z in points {
        let th = theta_series(omega, z, Truncation::Radius(radius))?;
        let mut f = cplx(T::zero(), T::zero());
        for (n, la) in &coeffs {
            f += (*la + two_pi_i * (z[0] * n[0] + z[1] * n[1])).exp();
        }
        ratios.push(f / th.value()?);
    }
    let first = *ratios.first().ok_or(crate::Error::Domain("no probe points".into()))?;
    Ok(ratios.iter().fold(T::zero(), |m, r| m.max((*r - first).norm() / first.norm())))
}
