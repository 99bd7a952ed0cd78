//! Numerics for variable exponent Bergman spaces over the unit ball.
//!
//! The crate makes the standard objects of the theory computable at desk
//! scale: Luxemburg-Nakano norms of holomorphic expressions, pseudo-
//! hyperbolic and Bergman geometry (including constructive r-lattices),
//! reproducing kernels and Bergman projections, Toeplitz and weighted
//! composition operators with their pull-back measures, and the Carleson
//! ratio diagnostics that characterize boundedness and compactness.
//!
//! The numerical core is generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); concrete `f64` aliases are exported at the crate root
//! and are what the CLI and the diagnostic suites use.

pub mod analysis;
pub mod carleson;
pub mod cli;
pub mod error;
pub mod exponent;
pub mod geometry;
pub mod kernels;
pub mod operators;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Concrete f64 aliases, the working precision of the CLI and test suites.
pub type Point64 = geometry::Point<f64>;
pub type Lattice64 = geometry::Lattice<f64>;
pub type C64 = num_complex::Complex<f64>;

/// f32 aliases for cheap exploratory work.
pub type Point32 = geometry::Point<f32>;
