//! Panels of random-coefficient AR(1) series: simulation, estimation of
//! the coefficient distribution, and goodness-of-fit tests for it.
//!
//! Each series in a panel follows `X(t) = a X(t-1) + e(t)` with its own
//! coefficient `a` drawn once from a law G, and innovations that mix a
//! panel-wide common shock with per-series noise. The library simulates
//! such panels ([`sim`]), recovers each `a` by the lag-1 sample
//! autocorrelation and aggregates the estimates into an empirical
//! distribution or a kernel density ([`estimators`]), and tests G
//! against fully specified laws, the Beta family, or a sqrt-Beta law
//! with given parameters ([`gof`]). The [`study`] module wraps the
//! size/power Monte Carlo experiment around those pieces, and [`cli`]
//! exposes everything as the `rcar` binary.
//!
//! Every random quantity derives from one `u64` seed through counter
//! splitting ([`rng`]), so any panel, test, or study reruns
//! byte-identically, regardless of thread count.
//!
//! Runnable walkthroughs live in `examples/`:
//!
//! - `simulate_panel`: generate a panel, compare pooled autocovariances
//!   with their stationary values.
//! - `estimate_distribution`: per-series estimates, their ECDF and
//!   moments against the true law.
//! - `kernel_density`: smoothed coefficient densities for each kernel.
//! - `simple_ks_test`: Kolmogorov-Smirnov test of a fully specified law.
//! - `composite_ks_test`: bootstrap-calibrated test of "some Beta law".
//! - `parametric_test`: truncated MLE plus the chi-square quadratic-form
//!   test of a specific sqrt-Beta law.
//! - `study_desk`: a small size/power study with CSV artifacts.

pub mod cli;
pub mod error;
pub mod estimators;
pub(crate) mod fmtio;
pub mod gof;
pub mod quad;
pub mod rng;
pub mod sim;
pub mod special;
pub mod study;

pub use error::{Error, Result};
pub use special::BetaParams;
