//! Numerical laboratory for the parabolic Calderón commutator
//!
//! ```text
//! T f(x) = p.v. ∫ [A(x) − A(x − γ(t))] f(x − γ(t)) dt / t²,   γ(t) = (t, t²)
//! ```
//!
//! on periodic grids, together with the auxiliary objects its `L²` theory
//! runs through: parabolic geometry, dyadic cutoffs, symbol-class checks,
//! the oscillatory multiplier of a single dyadic piece, the explicit kernel
//! of `T̃₀ T̃₀*` and its regularity, and operator-norm experiments.
//!
//! Every routine is generic over [`Real`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below fix the scalar.

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod grid;
pub mod operators;
pub mod oscillatory;
pub mod quadrature;
pub mod regularity;
pub mod scalar;
pub mod symbols;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ParaPoint64 = geometry::ParaPoint<f64>;
pub type ParaPoint32 = geometry::ParaPoint<f32>;
pub type ParaCube64 = geometry::ParaCube<f64>;
pub type Direction64 = geometry::Direction<f64>;
pub type TorusGrid64 = grid::TorusGrid<f64>;
pub type TorusGrid32 = grid::TorusGrid<f32>;
pub type Field64 = grid::Field2D<f64>;
pub type Field32 = grid::Field2D<f32>;
pub type SymbolA64 = symbols::SymbolA<f64>;
pub type SymbolA32 = symbols::SymbolA<f32>;
pub type CurveOpSpec64 = operators::CurveOpSpec<f64>;
