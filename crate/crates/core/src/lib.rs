//! Network-wide peak-age-of-information analysis for cell-free massive MIMO
//! with sensing/communication coexistence.
//!
//! The library evaluates closed-form sensing and communication coverage, the
//! MGF-based PAVP upper bound, and the optimal sensing/communication AP
//! partition, and cross-validates each formula against an independent
//! packet-level Monte Carlo simulator:
//!
//! - [`params`]: unit-normalized system parameters (conversion happens once,
//!   at the config boundary)
//! - [`numerics`]: Q-function and inverse, the interference hypergeometric
//!   family, adaptive quadrature
//! - [`sensing`]: radar detection, network sensing coverage, inter-arrival MGF
//! - [`comm`]: LMMSE statistics, deterministic-equivalent SINR, coverage
//!   bound, decoding error, service-time MGF
//! - [`snc`]: stability, conditional and network-wide PAVP bounds,
//!   Chernoff-parameter optimization
//! - [`optimizer`]: the partition-factor line search
//! - [`montecarlo`]: reproducible packet-level simulation
//! - [`cli`]: experiment front end with CSV + JSON-sidecar output

pub mod cli;
pub mod comm;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod optimizer;
pub mod params;
pub mod sensing;
pub mod snc;

pub use error::{Error, Result};
pub use params::SystemParameters;
