//! BESQ(mu) and Bessel transition densities, exact samplers, grid paths and
//! the geometric Brownian motion clock.

pub(crate) mod density;
mod gbm;
mod params;
pub(crate) mod path;
mod sampler;

pub use density::{
    bessel_transition_density, besq_density_time_derivative, besq_transition_density,
    log_besq_transition_density,
};
pub use gbm::{clock_decomposition_error, simulate_gbm_clock, GbmClockPath};
pub use params::BesqParams;
pub use path::{first_hitting_on_path, simulate_path, PathGrid};
pub use sampler::{sample_besq_transition, scan_for_hit, HitScan};
pub(crate) use sampler::transition;
