//! Numerical iteration theory of analytic self-maps of the unit disk, the
//! upper half-plane and the unit ball in C^N.
//!
//! - [`geometry`]: invariant distances, disk automorphisms, the Cayley
//!   transform and horodisks.
//! - [`maps`]: symbolic map descriptors with evaluation, differentiation,
//!   self-map validation and a JSON wire format.
//! - [`dynamics`]: orbits, Denjoy-Wolff points, the coefficient of
//!   dilatation and the elliptic/hyperbolic/parabolic classification.
//! - [`valiron`]: the renormalized-iteration intertwining map sigma with
//!   sigma . Phi = A sigma + b_inf, its residual certificates,
//!   semi-conformality, the angular derivative at infinity, growth-bound
//!   checks, Koenigs linearization and the Heins curve.
//! - [`ball`], [`siegel`], [`koranyi`]: the several-variable layer with the
//!   Siegel automorphism algebra and the Koranyi confinement check at the
//!   threshold 3 - sqrt(8).
//! - [`suite`]: the sampled invariant suite behind `verify-all`.
//!
//! Numeric kernels are generic over the scalar type through
//! [`scalar::Real`] (`f32` or `f64`); the aliases below fix `f64` for the
//! CLI and the acceptance suites.

pub mod accel;
pub mod ball;
pub mod corpus;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod koranyi;
pub mod linalg;
pub mod maps;
pub mod sample;
pub mod scalar;
pub mod siegel;
pub mod suite;
pub mod valiron;

pub use error::{Error, Result};

/// Concrete complex scalar used by the CLI.
pub type Cx = num_complex::Complex64;

pub type DiskPoint64 = geometry::DiskPoint<f64>;
pub type HalfPlanePoint64 = geometry::HalfPlanePoint<f64>;
pub type Horodisk64 = geometry::Horodisk<f64>;
pub type MapDescriptor64 = maps::MapDescriptor<f64>;
pub type OrbitTrace64 = dynamics::OrbitTrace<f64>;
pub type Classification64 = dynamics::Classification<f64>;
pub type ValironModel64 = valiron::ValironModel<f64>;
pub type ValironOptions64 = valiron::ValironOptions<f64>;
pub type BallPoint64 = ball::BallPoint<f64>;
pub type SiegelPoint64 = ball::SiegelPoint<f64>;
pub type KoranyiTrace64 = koranyi::KoranyiTrace<f64>;
