//! Squared Bessel processes with stochastic time.
//!
//! The crate evaluates BESQ(mu) and Bessel transition densities, samples them
//! exactly, builds the Bessel time process `X(t, a) = R(t + a R(t)) / R(t)`
//! and its relatives, solves the first-kind Volterra equation for the
//! first-hitting-time density, and checks the distributional identities of
//! the theory by Monte Carlo.

pub mod bessel_time;
pub mod error;
pub mod hitting;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod mc;
pub mod process;
pub mod special;
pub mod stats;
pub mod suite;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use scalar::Scalar;
pub use special::{bessel_i_scaled, log_bessel_i, log_gamma, BesselOrder};
pub use process::{BesqParams, GbmClockPath, PathGrid};
pub use hitting::{HittingDensity, Method};
pub use suite::{run_identity_suite, SuiteConfig};

/// Concrete `f64` instantiations.
pub type Params = BesqParams<f64>;
pub type Path = PathGrid<f64>;
pub type GbmClock = GbmClockPath<f64>;
pub type Order = BesselOrder<f64>;
pub type TimeSample = bessel_time::BesselTimeSample<f64>;
pub type PairSample = bessel_time::CorrelatedPairSample<f64>;
