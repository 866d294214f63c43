//! Computations on the special Siegel half-space of degree two.
//!
//! The special half-space Ĥ₂ consists of the period matrices
//! `[[τ, z], [z, τ]]` with `Im τ > |Im z|`. This crate covers its
//! automorphism group Ĝ, the invariant metric, distance, geodesics and volume,
//! and the Appell-Humbert description of line bundles on the abelian surface
//! `ℂ²/L_Ω`: Riemann forms, semi-characters, automorphic factors, theta
//! functions, the Poincaré bundle, translation kernels, curvature and Hodge
//! numbers.
//!
//! All floating-point code is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix it to `f64`. Exact lattice invariants use checked `i64`.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod group;
pub mod halfspace;
pub mod integer;
pub mod matrix;
pub mod picard;
pub mod polarization;
pub mod sampling;
pub mod scalar;
pub mod theta;
pub mod verify;
pub mod wire;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar, Tolerance};

pub use num_complex::Complex64;

pub type CMat2 = matrix::Mat2<Complex64>;
pub type CMat4 = matrix::Mat4<Complex64>;
pub type RMat2 = matrix::Mat2<f64>;
pub type RMat4 = matrix::Mat4<f64>;
pub type Point = halfspace::HatPoint<f64>;
pub type Disk = halfspace::DiskPoint<f64>;
pub type Element = group::GHatElement<f64>;
pub type Pair = group::Sl2Pair<f64>;
