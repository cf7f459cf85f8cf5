//! Entanglement-based clock synchronization over a retroreflector-array optical link.
//!
//! A hub emits photon pairs, keeps one photon on a local reference detector and
//! sends the twin to a corner-cube array on the target; the returned photons give
//! the round-trip delay. The crate provides
//!
//! * scenario configuration and link geometry ([`config`], [`geometry`]),
//! * the random models and a seeding contract ([`random`]),
//! * the spatially resolved reception model ([`channel`]),
//! * closed-form predictions of detection counts, timing error and outage ([`analytic`]),
//! * a slot-level Monte Carlo of the whole protocol ([`sim`]),
//! * sweeps, CSV reports and an oracle validation suite ([`experiments`]).
//!
//! ```
//! use qsync::{analytic, Scenario, SystemConfig};
//!
//! let scn = Scenario::new(SystemConfig::default()).unwrap();
//! let report = analytic::analyze(&scn, &analytic::QuadratureSpec::default()).unwrap();
//! assert!(report.sync.std < 20e-12);
//! ```

pub mod analytic;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod random;
pub mod sim;
pub mod special;
pub mod stats;

pub use config::SystemConfig;
pub use error::{ConfigError, Error, Result};
pub use geometry::{DerivedConstants, Point, Scenario};
pub use random::RngStream;
pub use sim::{run_campaign, run_trial, CampaignSpec, CampaignStats, TrialResult};
