//! Numerical spectral laboratory for Schrödinger operators whose potential is
//! concentrated in a thin layer along the boundary.
//!
//! The crate covers the zero-energy resonance theory of compactly supported
//! half-line potentials, the Šeba half-line model, boundary geometry in the
//! plane, and fibre-by-fibre studies of the unit disk. All numerical code is
//! generic over the scalar type ([`Real`]); the `*64` aliases below fix it to
//! `f64`, which is what the studies and the CLI use.

pub mod config;
pub mod disk;
pub mod error;
pub mod geometry;
pub mod halfline;
pub mod potential;
pub mod report;
pub mod resonance;
pub mod scalar;
pub mod spline;
pub mod tridiag;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use potential::{Potential, PotentialSpec, Theorem2Check};
pub use scalar::Real;
pub use tridiag::{EigenPair, TridiagonalOperator};

pub type Potential64 = potential::Potential<f64>;
pub type Operator64 = tridiag::TridiagonalOperator<f64>;
pub type EigenPair64 = tridiag::EigenPair<f64>;
pub type ShootingResult64 = resonance::ShootingResult<f64>;
pub type CanonicalSolution64 = resonance::CanonicalSolution<f64>;
pub type HalflineModel64 = halfline::HalflineModel<f64>;
pub type BoundaryCurve64 = geometry::BoundaryCurve<f64>;
pub type FibreSpec64 = disk::FibreSpec<f64>;
