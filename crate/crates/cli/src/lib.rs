//! Batch sweeps over relay-chain metrics driven by TOML configuration files.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod sweep;

pub use config::Config;
