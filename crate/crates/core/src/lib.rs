//! Assessment of human cooperation in head-on corridor crossings.
//!
//! The pieces, bottom-up:
//!
//! - [`geometry`]: poses, time-stamped bands, the wall model and distances.
//! - [`planner`]: a dual elastic-band optimizer producing the robot band and
//!   the anticipated (minimally contributing) human band.
//! - [`assessor`]: crossing information, the three situation predicates and
//!   the discounted contribution metric.
//! - [`decision`]: the two-checkpoint cue pipeline.
//! - [`sim`]: fixed-step simulation of the corridor scenarios.
//! - [`cli`]: config files, traces, the scenario suite and the γ sweep.

pub mod assessor;
pub mod cli;
pub mod decision;
pub mod error;
pub mod geometry;
pub mod planner;
pub mod sim;

pub use error::{Error, Result};
