//! Oscillator eigenfunctions, Gauss–Hermite quadrature and the transverse
//! projections of the potential.

mod hermite;
mod projection;

pub use hermite::{
    hermite_eval, hermite_values, normalization, GaussHermite, HermiteBasis, MAX_HERMITE_INDEX,
};
pub use projection::{
    project_potential, project_potential_with_order, ProjectedPotential, ALIASING_THRESHOLD,
    DEFAULT_FOURIER_CUTOFF,
};
