//! Deterministic simulator for mmWave train-to-ground downlink scheduling
//! with rooftop mobile relays (MRs) and a hovering UAV relay.
//!
//! The pipeline for one superframe is:
//!
//! 1. [`scenario`] places the base station, the UAV and the MRs and samples
//!    flow demands and blocked nodes from a seed.
//! 2. [`channel`] evaluates the link budget of every transmission mode
//!    (direct, left-MR relay, right-MR relay, UAV relay).
//! 3. [`blockage`] builds the directed blockage graph that records which
//!    modes the blocked nodes rule out.
//! 4. [`relay`] picks one mode per flow (or abandons it).
//! 5. [`scheduler`] serves the assigned flows serially over the slot budget.
//!
//! [`baselines`] holds the exhaustive optimum and the two comparison schemes,
//! and [`harness`] runs seeded parameter sweeps and writes CSV results.

pub mod baselines;
pub mod blockage;
pub mod channel;
pub mod error;
pub mod harness;
pub mod mode;
pub mod pipeline;
pub mod relay;
pub mod scenario;
pub mod scheduler;
pub mod units;

pub use error::{Error, Result};
pub use mode::Mode;
