//! Deterministic pseudo-random generators for test and verification inputs.
//!
//! Every sampler is a pure function of a `ChaCha8Rng` state, itself seeded
//! from a `u64`, so the same seed reproduces the same inputs on any platform.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::halfspace::HatPoint;
use crate::matrix::Mat2;
use crate::scalar::Real;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform<T: Real>(rng: &mut SeededRng, lo: f64, hi: f64) -> T {
    T::lit(rng.gen_range(lo..hi))
}

/// Random SL(2,ℝ) element `k(θ) · diag(eᵗ, e⁻ᵗ) · n(s)` with θ uniform on
/// [0, 2π), t and s uniform on [−1, 1].
pub fn sl2<T: Real>(rng: &mut SeededRng) -> Mat2<T> {
    let theta: T = uniform(rng, 0.0, std::f64::consts::TAU);
    let t: T = uniform(rng, -1.0, 1.0);
    let s: T = uniform(rng, -1.0, 1.0);
    let (sn, cs) = theta.sin_cos();
    let rot = Mat2::new(cs, -sn, sn, cs);
    let diag = Mat2::new(t.exp(), T::zero(), T::zero(), (-t).exp());
    let shear = Mat2::new(T::one(), s, T::zero(), T::one());
    rot * diag * shear
}

/// Random point of the special half-space with Re τ, Re z ∈ [−2, 2],
/// Im τ ∈ [0.3, 3] and |Im z| ≤ 0.9 Im τ.
pub fn hat_point<T: Real>(rng: &mut SeededRng) -> HatPoint<T> {
    let x: T = uniform(rng, -2.0, 2.0);
    let u: T = uniform(rng, -2.0, 2.0);
    let y: T = uniform(rng, 0.3, 3.0);
    let frac: T = uniform(rng, -0.9, 0.9);
    HatPoint::new_unchecked(Complex::new(x, y), Complex::new(u, frac * y))
}

/// Random complex 2-vector with components in the box [−1, 1] + i[−1, 1].
pub fn cvec2<T: Real>(rng: &mut SeededRng) -> [Complex<T>; 2] {
    let mut c = || Complex::new(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
    [c(), c()]
}

/// Random integer 4-vector with entries in [−bound, bound].
pub fn int4(rng: &mut SeededRng, bound: i64) -> [i64; 4] {
    let mut v = [0i64; 4];
    for x in v.iter_mut() {
        *x = rng.gen_range(-bound..=bound);
    }
    v
}
