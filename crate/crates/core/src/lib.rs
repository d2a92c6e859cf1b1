//! Joint antenna selection for MIMO cognitive-radio NOMA downlinks.
//!
//! A BS with `N` antennas serves a primary user (`M` antennas) and a
//! secondary user (`K` antennas) through one RF chain each. The crate covers:
//!
//! - [`channel`]: configuration, link budget and Rayleigh gain sampling;
//! - [`noma`]: the PU-protecting power split and link SINRs;
//! - [`selection`]: subset-based, exhaustive, max-min and random selection;
//! - [`analytic`]: closed-form and high-SNR outage expressions with
//!   quadrature cross-checks;
//! - [`montecarlo`]: reproducible parallel outage and power-split estimates;
//! - [`cli`]: config files, CSV tables, run manifests and plot scripts behind
//!   the `crnoma` binary.

pub mod analytic;
pub mod channel;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod noma;
pub mod numeric;
pub mod quadrature;
pub mod selection;

pub use channel::{Antennas, ChannelRealization, LinkBudget, SystemConfig, Thresholds};
pub use error::{Error, Result};
pub use selection::{Scheme, SelectionOutcome};
