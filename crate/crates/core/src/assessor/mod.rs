//! Situation assessment (crossing point, three predicates) and human path
//! assessment (signed contribution series and its discounted mean).

mod path;
mod situation;

pub use path::{
    contribution_metric, discounted_mean, is_contributing, record_contribution, reset_recorder,
    signed_contribution, still_needs_to_contribute, ContributionRecord,
};
pub use situation::{assess_situation, compute_crossing, CrossingInfo, Direction, SituationPredicates};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decision thresholds. Distances in meters; `tau_cm` applies to the
/// contribution metric, which is also in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub tau_h: f64,
    pub tau_oh: f64,
    pub tau_or: f64,
    pub tau_hr: f64,
    pub gamma: f64,
    pub tau_cm: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            tau_h: 0.15,
            tau_oh: 1.0,
            tau_or: 0.3,
            tau_hr: 1.2,
            gamma: 0.98,
            tau_cm: 0.4,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("thresholds.tau_h", self.tau_h),
            ("thresholds.tau_oh", self.tau_oh),
            ("thresholds.tau_or", self.tau_or),
            ("thresholds.tau_hr", self.tau_hr),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(field, "must be finite and >= 0"));
            }
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::invalid("thresholds.gamma", "must lie in (0, 1)"));
        }
        if !self.tau_cm.is_finite() {
            return Err(Error::invalid("thresholds.tau_cm", "must be finite"));
        }
        Ok(())
    }
}
