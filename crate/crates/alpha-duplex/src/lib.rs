//! Analysis and simulation of the partially overlapped uplink/downlink
//! ("alpha-duplex") scheme in multi-tier cellular networks.
//!
//! The crate has two independent evaluation paths for the same performance
//! metrics (outage probability and transmission rate):
//!
//! * [`analytics`] — stochastic-geometry expressions built on Laplace
//!   transforms of the aggregate interference, with closed forms where they
//!   exist and adaptive quadrature elsewhere.
//! * [`mcsim`] — a seeded Monte Carlo simulator that realizes Poisson point
//!   process networks, performs association, power control and scheduling,
//!   and measures SINR directly from the baseband interference model.
//!
//! Supporting modules: [`specfun`] (special functions and quadrature),
//! [`spectral`] (band geometry and pulse-shape overlap factors),
//! [`params`] (configuration types), and [`cli`] (sweeps, CSV emission and
//! comparison reports used by the `alpha-duplex` binary).
//!
//! See the crate `examples/` directory for one runnable example per major
//! capability.

pub mod analytics;
pub mod cli;
pub mod error;
pub mod mcsim;
pub mod params;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
