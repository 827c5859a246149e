//! Piecewise-smooth warping profiles for double warped product metrics.
//!
//! A profile is a chain of closed-form pieces (sine caps, quartics, shifted
//! powers, affine rays, Hermite bridges, scaled composites) tiling a radial
//! interval, with exact derivatives up to order 2, per-piece second-derivative
//! Lipschitz budgets, and analytic axis limits for the ratio expressions the
//! curvature formulas need. All types are immutable after construction.

mod dwp;
mod error;
pub mod form;
mod function;
pub mod json;
pub mod ratio;

pub use dwp::{BoundaryKind, DoubleWarpProfile};
pub use error::{ProfileError, Result};
pub use form::{build_form, Envelope, PieceForm, FORM_KINDS};
pub use function::{ProfileFunction, ProfilePiece, Side, KNOT_TOL};
pub use ratio::{eval_ratio, RatioKind};
