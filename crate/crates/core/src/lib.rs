//! Exact computations for the n = 2 semi-Lie arithmetic fundamental lemma:
//! orbital integrals and their derivatives, Gross–Keating intersection numbers,
//! Satake and base-change tables, kernel matrices and finite-ring volume oracles.

pub mod algebra;
pub mod intersection;
pub mod kernel;
pub mod orbital;
pub mod padic;
pub mod satake;
pub mod verify;

pub use algebra::{LaurentSeries, QPoly};
pub use orbital::{HeckeVector, OrbitalParams, ParamError, Valuation};
