//! Invariant Riemannian geometry of Ĥ₂.
//!
//! In the factor coordinates `w₁ = τ + z`, `w₂ = τ − z` the metric
//! `Tr(Y⁻¹ dΩ Y⁻¹ dΩ̄)` is the sum of two hyperbolic metrics
//! `|dw₁|²/(Im w₁)² + |dw₂|²/(Im w₂)²`, so distances, geodesics and the
//! Laplacian all split into upper half-plane pieces.

use num_complex::Complex;

use crate::error::{domain, Result};
use crate::halfspace::{act_on_point, HatPoint};
use crate::matrix::{det4, Mat4};
use crate::scalar::{Real, Tolerance};

/// Coefficients of `ds²` in the real coordinates `(x, y, u, v)`, with
/// `τ = x + iy` and `z = u + iv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricAtPoint<T> {
    pub g_xx: T,
    pub g_yy: T,
    pub g_uu: T,
    pub g_vv: T,
    pub g_xu: T,
    pub g_yv: T,
}

impl<T: Real> MetricAtPoint<T> {
    /// Symmetric 4×4 Gram matrix in the order `(x, y, u, v)`.
    pub fn as_matrix(&self) -> Mat4<T> {
        let mut g = Mat4::zeros();
        g[(0, 0)] = self.g_xx;
        g[(1, 1)] = self.g_yy;
        g[(2, 2)] = self.g_uu;
        g[(3, 3)] = self.g_vv;
        g[(0, 2)] = self.g_xu;
        g[(2, 0)] = self.g_xu;
        g[(1, 3)] = self.g_yv;
        g[(3, 1)] = self.g_yv;
        g
    }

    /// `ds²` evaluated on a tangent vector `(dx, dy, du, dv)`.
    pub fn quadratic_form(&self, d: [T; 4]) -> T {
        let two = T::lit(2.0);
        self.g_xx * d[0] * d[0]
            + self.g_yy * d[1] * d[1]
            + self.g_uu * d[2] * d[2]
            + self.g_vv * d[3] * d[3]
            + two * self.g_xu * d[0] * d[2]
            + two * self.g_yv * d[1] * d[3]
    }

    pub fn is_positive_definite(&self) -> bool {
        // the form splits into the (x,u) and (y,v) planes
        self.g_xx > T::zero()
            && self.g_xx * self.g_uu - self.g_xu * self.g_xu > T::zero()
            && self.g_yy * self.g_vv - self.g_yv * self.g_yv > T::zero()
    }
}

fn require_inside<T: Real>(p: &HatPoint<T>, tol: &Tolerance<T>) -> Result<()> {
    if !p.is_inside(tol) {
        return domain(format!(
            "point with Im tau = {} and Im z = {} is not in the special half-space",
            p.tau.im, p.z.im
        ));
    }
    Ok(())
}

/// `g_xx = … = 2(y² + v²)/(y² − v²)²`, `g_xu = g_yv = −4yv/(y² − v²)²`.
pub fn metric_at<T: Real>(p: &HatPoint<T>, tol: &Tolerance<T>) -> Result<MetricAtPoint<T>> {
    require_inside(p, tol)?;
    let (y, v) = (p.tau.im, p.z.im);
    // (y² − v²)² computed as a product of factors to keep precision near the boundary
    let d2 = ((y + v) * (y - v)).powi(2);
    let diag = T::lit(2.0) * (y * y + v * v) / d2;
    let cross = T::lit(-4.0) * y * v / d2;
    Ok(MetricAtPoint { g_xx: diag, g_yy: diag, g_uu: diag, g_vv: diag, g_xu: cross, g_yv: cross })
}

/// Intermediate quantities of the distance formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceBreakdown<T> {
    pub a: T,
    pub b: T,
    pub lambda: T,
    pub mu: T,
    pub log_lambda: T,
    pub log_mu: T,
    pub rho: T,
}

/// `log((A + √(A² − 4))/2)` for `A = 2 + δ` with
/// `δ = |w − w'|²/(Im w · Im w')`, the hyperbolic distance between `w` and `w'`.
///
/// Working with δ instead of `A` avoids the cancellation in `A² − 4` for
/// nearby points.
fn factor_log<T: Real>(w: Complex<T>, w2: Complex<T>) -> (T, T) {
    let delta = (w - w2).norm_sqr() / (w.im * w2.im);
    let half = T::lit(0.5);
    let log = (delta * half + (delta * (delta + T::lit(4.0))).sqrt() * half).ln_1p();
    (T::lit(2.0) + delta, log)
}

/// `ρ(Ω₁, Ω₂) = √((log λ)² + (log μ)²)`.
pub fn distance<T: Real>(p1: &HatPoint<T>, p2: &HatPoint<T>, tol: &Tolerance<T>) -> Result<DistanceBreakdown<T>> {
    require_inside(p1, tol)?;
    require_inside(p2, tol)?;
    let (f1, g1) = p1.factors();
    let (f2, g2) = p2.factors();
    let (a, log_lambda) = factor_log(f1, f2);
    let (b, log_mu) = factor_log(g1, g2);
    Ok(DistanceBreakdown {
        a,
        b,
        lambda: log_lambda.exp(),
        mu: log_mu.exp(),
        log_lambda,
        log_mu,
        rho: log_lambda.hypot(log_mu),
    })
}

/// The geodesic arc from `p1` to `p2`, parametrized by arc length on
/// `[0, s₀]` with `s₀ = ρ(p1, p2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic<T> {
    start: HatPoint<T>,
    end: HatPoint<T>,
    dist: DistanceBreakdown<T>,
}

impl<T: Real> Geodesic<T> {
    pub fn new(p1: &HatPoint<T>, p2: &HatPoint<T>, tol: &Tolerance<T>) -> Result<Self> {
        let dist = distance(p1, p2, tol)?;
        if dist.rho <= tol.abs_tol {
            return domain("geodesic endpoints coincide");
        }
        Ok(Self { start: *p1, end: *p2, dist })
    }

    pub fn length(&self) -> T {
        self.dist.rho
    }

    pub fn breakdown(&self) -> &DistanceBreakdown<T> {
        &self.dist
    }

    /// `γ(s)` for `s ∈ [0, s₀]`; `γ(0)` is the start point exactly.
    pub fn at(&self, s: T, tol: &Tolerance<T>) -> Result<HatPoint<T>> {
        let s0 = self.dist.rho;
        if !(s >= T::zero() && s <= s0 + tol.abs_tol + tol.rel_tol * s0) {
            return domain(format!("arc length {s} outside [0, {s0}]"));
        }
        if s == T::zero() {
            return Ok(self.start);
        }
        Ok(self.eval(s.min(s0)))
    }

    /// Evaluates the closed form at any real `s`, without range checks.
    pub fn eval(&self, s: T) -> HatPoint<T> {
        let t = s / self.dist.rho;
        let (w1, w2) = self.start.factors();
        let (e1, e2) = self.end.factors();
        let r = factor_curve(w1, e1, self.dist.log_lambda, t);
        let q = factor_curve(w2, e2, self.dist.log_mu, t);
        // τ = (x₁ + x₂)/2 + (y₁R + y₂T)/2, z = (x₁ − x₂)/2 + (y₁R − y₂T)/2
        let half = T::lit(0.5);
        let a = r * w1.im + w1.re;
        let b = q * w2.im + w2.re;
        HatPoint::new_unchecked((a + b) * half, (a - b) * half)
    }

    /// Composite Simpson estimate of `∫ √(ds²(γ'(s))) ds` over `[0, s₀]`,
    /// with `γ'` from central differences of the closed form.
    pub fn numeric_length(&self, panels: usize, tol: &Tolerance<T>) -> Result<T> {
        let n = panels.max(2) + panels % 2;
        let s0 = self.dist.rho;
        let step = s0 / T::lit(n as f64);
        let h = s0 * T::lit(1e-6);
        let speed = |s: T| -> Result<T> {
            let (a, b) = (self.eval(s + h).coords(), self.eval(s - h).coords());
            let d: [T; 4] = std::array::from_fn(|i| (a[i] - b[i]) / (h + h));
            Ok(metric_at(&self.eval(s), tol)?.quadratic_form(d).sqrt())
        };
        let mut acc = speed(T::zero())? + speed(s0)?;
        for k in 1..n {
            let w = if k % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
            acc += w * speed(step * T::lit(k as f64))?;
        }
        Ok(acc * step / T::lit(3.0))
    }
}

/// `R(t)` for one factor: the unit-speed hyperbolic geodesic from `w` to `e`
/// at fraction `t` of the way, rescaled as `(w(t) − Re w)/Im w`.
///
/// With `k = (λ^{2t} − 1)c(λ)` and `c(λ) = 1/(λ² − 1)`,
/// `R = (λ(u − x)k + i v λᵗ)/((λy − v)k + v)`. The factor `k` is computed as
/// `expm1(2t log λ)/expm1(2 log λ)`, which tends to `t` as `λ → 1`; for a
/// stationary factor `y = v` and `u = x`, so `R ≡ i` either way.
fn factor_curve<T: Real>(w: Complex<T>, e: Complex<T>, log_lambda: T, t: T) -> Complex<T> {
    let (x, y, u, v) = (w.re, w.im, e.re, e.im);
    let k = if log_lambda > T::zero() {
        (T::lit(2.0) * t * log_lambda).exp_m1() / (T::lit(2.0) * log_lambda).exp_m1()
    } else {
        t
    };
    let lambda = log_lambda.exp();
    let lt = (t * log_lambda).exp();
    let num = Complex::new(lambda * (u - x) * k, v * lt);
    let den = (lambda * y - v) * k + v;
    num / den
}

/// `γ(s)` for a single arc-length value.
pub fn geodesic_point<T: Real>(p1: &HatPoint<T>, p2: &HatPoint<T>, s: T, tol: &Tolerance<T>) -> Result<HatPoint<T>> {
    Geodesic::new(p1, p2, tol)?.at(s, tol)
}

/// `4/((y + v)²(y − v)²)`.
pub fn volume_density<T: Real>(p: &HatPoint<T>, tol: &Tolerance<T>) -> Result<T> {
    require_inside(p, tol)?;
    let (y, v) = (p.tau.im, p.z.im);
    Ok(T::lit(4.0) / ((y + v) * (y - v)).powi(2))
}

/// Real Jacobian of `Ω ↦ M⟨Ω⟩` in `(x, y, u, v)` by central differences.
pub fn action_jacobian<T: Real>(m: &Mat4<T>, p: &HatPoint<T>, h: T, tol: &Tolerance<T>) -> Result<Mat4<T>> {
    let base = p.coords();
    let mut jac = Mat4::zeros();
    for j in 0..4 {
        let mut plus = base;
        let mut minus = base;
        plus[j] += h;
        minus[j] -= h;
        let a = act_on_point(m, &HatPoint::from_coords(plus), tol)?.coords();
        let b = act_on_point(m, &HatPoint::from_coords(minus), tol)?.coords();
        for i in 0..4 {
            jac[(i, j)] = (a[i] - b[i]) / (h + h);
        }
    }
    Ok(jac)
}

/// `|density(M⟨Ω⟩)·|det J| − density(Ω)| / density(Ω)`.
pub fn volume_change_residual<T: Real>(m: &Mat4<T>, p: &HatPoint<T>, h: T, tol: &Tolerance<T>) -> Result<T> {
    let jac = det4(&action_jacobian(m, p, h, tol)?).abs();
    let before = volume_density(p, tol)?;
    let after = volume_density(&act_on_point(m, p, tol)?, tol)?;
    Ok((after * jac - before).abs() / before)
}

/// Second partial derivatives of `f` at `p` by central differences:
/// `[∂xx, ∂yy, ∂uu, ∂vv, ∂xu, ∂yv]`.
fn second_partials<T: Real>(
    f: &impl Fn(&HatPoint<T>) -> Result<T>,
    p: &HatPoint<T>,
    h: T,
    tol: &Tolerance<T>,
) -> Result<[T; 6]> {
    if !(h > T::zero() && h <= T::lit(0.1)) {
        return domain(format!("finite-difference step {h} must lie in (0, 0.1]"));
    }
    let base = p.coords();
    let at = |shift: [(usize, T); 2]| -> Result<T> {
        let mut c = base;
        for (i, d) in shift {
            c[i] += d;
        }
        let q = HatPoint::from_coords(c);
        if !q.is_inside(tol) {
            return domain("finite-difference stencil leaves the special half-space");
        }
        f(&q)
    };
    let zero = T::zero();
    let f0 = at([(0, zero), (0, zero)])?;
    let h2 = h * h;
    let pure = |i: usize| -> Result<T> { Ok((at([(i, h), (i, zero)])? - f0 - f0 + at([(i, -h), (i, zero)])?) / h2) };
    let mixed = |i: usize, j: usize| -> Result<T> {
        let pp = at([(i, h), (j, h)])?;
        let pm = at([(i, h), (j, -h)])?;
        let mp = at([(i, -h), (j, h)])?;
        let mm = at([(i, -h), (j, -h)])?;
        Ok((pp - pm - mp + mm) / (T::lit(4.0) * h2))
    };
    Ok([pure(0)?, pure(1)?, pure(2)?, pure(3)?, mixed(0, 2)?, mixed(1, 3)?])
}

/// Laplace-Beltrami operator of `ds²`:
/// `½(y² + v²)(∂x² + ∂y² + ∂u² + ∂v²) + 2yv(∂x∂u + ∂y∂v)`.
///
/// This is `Y₁²(∂a₁² + ∂b₁²) + Y₂²(∂a₂² + ∂b₂²)` in the factor coordinates
/// `τ ± z = aₖ + ibₖ`, `Yₖ = y ± v`; the first-order terms cancel. It is
/// evaluated in those coordinates with the step `h·Yₖ` in factor `k`, so `h`
/// is a step measured in the invariant metric and the stencil stays inside
/// Ĥ₂ for every `h < 1`.
pub fn laplacian_apply<T: Real>(
    f: impl Fn(&HatPoint<T>) -> Result<T>,
    p: &HatPoint<T>,
    h: T,
    tol: &Tolerance<T>,
) -> Result<T> {
    require_inside(p, tol)?;
    if !(h > T::zero() && h <= T::lit(0.1)) {
        return domain(format!("finite-difference step {h} must lie in (0, 0.1]"));
    }
    let (w1, w2) = p.factors();
    let f0 = f(p)?;
    let mut acc = T::zero();
    for k in 0..2 {
        let w = if k == 0 { w1 } else { w2 };
        let d = h * w.im;
        for dir in [Complex::new(d, T::zero()), Complex::new(T::zero(), d)] {
            let at = |s: Complex<T>| {
                let (a, b) = if k == 0 { (w1 + s, w2) } else { (w1, w2 + s) };
                f(&HatPoint::from_factors(a, b))
            };
            acc += (at(dir)? - f0 - f0 + at(-dir)?) / (h * h);
        }
    }
    Ok(acc)
}

/// The operator `(y² + v²)(∂x² + ∂y²) + ¼(y² + v²)(∂u² + ∂v²) + yv(∂x∂u + ∂y∂v)`
/// in its literal displayed form. It is not invariant under Ĝ; kept for
/// comparison with [`laplacian_apply`].
pub fn maass_displayed_apply<T: Real>(
    f: impl Fn(&HatPoint<T>) -> Result<T>,
    p: &HatPoint<T>,
    h: T,
    tol: &Tolerance<T>,
) -> Result<T> {
    require_inside(p, tol)?;
    let [xx, yy, uu, vv, xu, yv] = second_partials(&f, p, h, tol)?;
    let (y, v) = (p.tau.im, p.z.im);
    let s = y * y + v * v;
    Ok(s * (xx + yy) + T::lit(0.25) * s * (uu + vv) + y * v * (xu + yv))
}
