use serde::{Deserialize, Serialize};

use super::Thresholds;
use crate::error::{Error, Result};
use crate::geometry::{deviation_from_path, side_of_path, Band, Pose, Vec2};

/// The observed contribution series. Append-only between resets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionRecord {
    pub ca: Vec<f64>,
    pub gamma: f64,
    /// Robot position used to sign the latest entry.
    pub robot_side_reference: Option<Vec2>,
}

impl ContributionRecord {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::invalid("gamma", "discount factor must lie in (0, 1)"));
        }
        Ok(Self {
            ca: Vec::new(),
            gamma,
            robot_side_reference: None,
        })
    }

    pub fn len(&self) -> usize {
        self.ca.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ca.is_empty()
    }

    pub fn push(&mut self, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::invalid("ca", "entries must be finite"));
        }
        self.ca.push(value);
        Ok(())
    }

    /// Discounted mean of the series; zero when nothing was observed.
    pub fn metric_or_zero(&self) -> f64 {
        contribution_metric(self).unwrap_or(0.0)
    }
}

/// Deviation of the human from its shortest path, positive when the human
/// is on the other side of the path from the robot (or the robot is on the
/// path), negative when both are on the same side.
pub fn signed_contribution(human: Vec2, human_shortest: &Band, robot: Vec2) -> f64 {
    let d = deviation_from_path(human_shortest, human);
    let robot_side = side_of_path(human_shortest, robot);
    let human_side = side_of_path(human_shortest, human);
    if robot_side != 0.0 && human_side == robot_side {
        -d
    } else {
        d
    }
}

pub fn record_contribution(
    rec: &ContributionRecord,
    human_pose: &Pose,
    human_shortest: &Band,
    robot_pose: &Pose,
) -> ContributionRecord {
    let robot = robot_pose.position();
    let mut next = rec.clone();
    next.ca.push(signed_contribution(human_pose.position(), human_shortest, robot));
    next.robot_side_reference = Some(robot);
    next
}

/// `sum gamma^(N-i) x_i / sum gamma^(N-i)` over 1-based `i`. Accepts any
/// positive `gamma` so sweeps can step past the formula's own domain.
pub fn discounted_mean(values: &[f64], gamma: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::NoObservations);
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma", "must be > 0"));
    }
    let mut weight = 1.0;
    let mut num = 0.0;
    let mut den = 0.0;
    for v in values.iter().rev() {
        num += weight * v;
        den += weight;
        weight *= gamma;
    }
    Ok(num / den)
}

pub fn contribution_metric(rec: &ContributionRecord) -> Result<f64> {
    if !(rec.gamma > 0.0 && rec.gamma < 1.0) {
        return Err(Error::invalid("gamma", "discount factor must lie in (0, 1)"));
    }
    discounted_mean(&rec.ca, rec.gamma)
}

pub fn is_contributing(cm: f64, th: &Thresholds) -> bool {
    cm > th.tau_cm
}

pub fn still_needs_to_contribute(cm: f64, d_h: f64) -> bool {
    cm < d_h
}

pub fn reset_recorder(rec: &ContributionRecord) -> ContributionRecord {
    ContributionRecord {
        ca: Vec::new(),
        gamma: rec.gamma,
        robot_side_reference: rec.robot_side_reference,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_y2() -> Band {
        let poses = (0..=10).map(|i| Pose::new(i as f64, 2.0, 0.0)).collect();
        Band::new(poses, 0.25, 0.0).unwrap()
    }

    fn rec() -> ContributionRecord {
        ContributionRecord::new(0.98).unwrap()
    }

    #[test]
    fn on_path_records_zero() {
        let r = record_contribution(&rec(), &Pose::new(5.0, 2.0, 0.0), &path_y2(), &Pose::new(8.0, 1.0, 0.0));
        assert_eq!(r.ca, vec![0.0]);
    }

    #[test]
    fn opposite_side_is_positive() {
        let r = record_contribution(&rec(), &Pose::new(5.0, 2.5, 0.0), &path_y2(), &Pose::new(8.0, 1.0, 0.0));
        assert!((r.ca[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn same_side_is_negative() {
        let r = record_contribution(&rec(), &Pose::new(5.0, 1.5, 0.0), &path_y2(), &Pose::new(8.0, 1.0, 0.0));
        assert!((r.ca[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_entry_metric() {
        let r = ContributionRecord {
            ca: vec![0.0, 1.0],
            gamma: 0.5,
            robot_side_reference: None,
        };
        assert!((contribution_metric(&r).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_record_has_no_metric() {
        assert!(matches!(contribution_metric(&rec()), Err(Error::NoObservations)));
        assert_eq!(rec().metric_or_zero(), 0.0);
    }

    #[test]
    fn gamma_domain_is_enforced() {
        assert!(ContributionRecord::new(1.0).is_err());
        assert!(ContributionRecord::new(0.0).is_err());
        let r = ContributionRecord {
            ca: vec![1.0],
            gamma: 1.02,
            robot_side_reference: None,
        };
        assert!(contribution_metric(&r).is_err());
        assert_eq!(discounted_mean(&r.ca, 1.02).unwrap(), 1.0);
    }

    #[test]
    fn strict_thresholds() {
        let th = Thresholds::default();
        assert!(is_contributing(0.94, &th));
        assert!(!is_contributing(0.05, &th));
        assert!(!is_contributing(0.4, &th));
        assert!(still_needs_to_contribute(0.1, 0.5));
        assert!(!still_needs_to_contribute(0.6, 0.5));
        assert!(!still_needs_to_contribute(0.5, 0.5));
    }

    #[test]
    fn reset_semantics() {
        let mut r = rec();
        for i in 0..10 {
            r.push(i as f64).unwrap();
        }
        let cleared = reset_recorder(&r);
        assert!(cleared.is_empty());
        assert_eq!(cleared.gamma, r.gamma);
        assert_eq!(reset_recorder(&cleared), cleared);
        let mut once = cleared.clone();
        once.push(0.37).unwrap();
        assert_eq!(contribution_metric(&once).unwrap(), 0.37);
    }
}
