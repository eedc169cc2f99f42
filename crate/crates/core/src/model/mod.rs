//! Physical parameters and potential descriptors shared by every module.

mod norms;
mod params;
mod potential;

pub use norms::{NormBound, NormEstimates};
pub use params::{derive_params, ChannelParams};
pub use potential::{
    evaluate_potential, Bump, FourierSeries, PotentialKind, PotentialSpec, SampledGrid, Sample,
    YProfile, MAX_POLY_DEGREE, PERIOD,
};

/// Sup-norm metadata of `spec`; see [`NormEstimates`].
pub fn potential_norm_estimates(spec: &PotentialSpec) -> NormEstimates {
    *spec.norms()
}
