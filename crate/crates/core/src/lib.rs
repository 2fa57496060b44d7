//! Generative simulation and statistical estimation for participatory
//! community dynamics.
//!
//! Users arrive at a community site, create content items ("resolves"),
//! vote on them, and link to other users in three networks. This crate
//! provides:
//!
//! * [`event_log`] — the validated event-log data model and its CSV format;
//! * [`counts`] / [`profiles`] — interval vote bookkeeping and per-user
//!   activity profiles;
//! * [`sim`] — a seeded discrete-event simulator with planted parameters;
//! * [`mle`] — alternating fixed-point maximum-likelihood estimation of
//!   per-item interestingness and the visibility aging function;
//! * [`fit`] — maximum-likelihood fits for the long-tail distribution
//!   families used throughout (Zipf, lognormal, exponential, truncated
//!   power law, double Pareto lognormal);
//! * [`net`] — network observables: degree distributions, common votes,
//!   link types, transitivity, and the no-links prediction;
//! * [`online`] — bounded-memory incremental estimation over event streams.

pub mod aging;
pub mod counts;
pub mod event_log;
pub mod fit;
pub mod mle;
pub mod net;
pub mod numeric;
pub mod online;
pub mod profiles;
pub mod sim;
pub mod types;

pub use aging::AgingFunction;
pub use counts::{compute_interval_counts, IntervalCounts};
pub use event_log::{ingest_event_log, EventLog, IngestError, ValidationError};
pub use fit::{DistributionFit, FitError, FitFamily};
pub use mle::{estimate, EstimationResult, FixedPointConfig};
pub use net::LinkSet;
pub use online::{OnlineConfig, OnlineState};
pub use profiles::{compute_user_profiles, UserProfile};
pub use sim::{simulate, SimConfig, SimOutput};
pub use types::{Event, EventKind, NetworkKind, ResolveId, UserId};
