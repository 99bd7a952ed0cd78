//! Function expressions, quadrature measures, modulars, and norms.

pub mod expr;
pub mod measure;
pub mod norm;

pub use expr::{Expr, HoloFunction, SelfMap};
pub use measure::{gauss_legendre, PolarGrid, Provenance, QuadMeasure};
pub use norm::{check_norm_modular_bound, luxemburg_norm, modular, Modular, SampledFunction};
