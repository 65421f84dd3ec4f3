//! Stochastic channel models for the RF and optical hops.

pub mod ew;
pub mod pointing;
pub mod shadowed_rician;

pub use ew::{ew_fit, ew_moment, ew_moment_series, ew_quantile, EwChannel, EwParams, MeijerRoute};
pub use pointing::{PointingError, PointingParams};
pub use shadowed_rician::{ShadowedRicianChannel, Shadowing, SrConstants};
