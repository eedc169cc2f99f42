//! Spectral and dynamical toolkit for the magnetic Schrödinger operator
//!
//! ```text
//! H = -∂²_y + (-i∂_x + By)² + ω²y² + W(x, y)
//! ```
//!
//! on a straight channel that is `2π`-periodic in `x`. Derived constants are
//! `α = sqrt(B² + ω²)`, `β = ω²/α²` and `μ = B/α²`.

pub mod bands;
pub mod cli;
pub mod basis;
pub mod classical;
pub mod commutator;
pub mod error;
pub mod fiber;
pub mod hill;
pub mod linalg;
pub mod mourre;
pub mod model;

pub use error::{Error, Result};
pub use model::{ChannelParams, PotentialKind, PotentialSpec};
