use serde::{Deserialize, Serialize};

use super::Thresholds;
use crate::error::{Error, Result};
use crate::geometry::{project_onto_polyline, deviation_from_path, Band, CorridorWorld, Vec2};
use crate::planner::DualBands;

/// Side on which the robot passes, as seen by the human.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Left,
    Right,
}

/// Where and when the planned bands come closest, and the clearances there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingInfo {
    pub i_star: usize,
    pub t_cross: f64,
    pub cp_h: Vec2,
    pub cp_r: Vec2,
    pub dir: Direction,
    /// Deviation of `cp_h` from the human's shortest path.
    pub d_h: f64,
    /// Human to nearest wall on the side away from the robot.
    pub d_oh: f64,
    /// Robot to nearest wall on the side away from the human.
    pub d_or: f64,
    pub d_hr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SituationPredicates {
    pub human_needs_to_contribute: bool,
    pub human_is_constrained: bool,
    pub robot_is_constrained: bool,
}

/// Finds the shared time index where the bands are closest (earliest on
/// ties) and measures the crossing geometry there.
pub fn compute_crossing(bands: &DualBands, world: &CorridorWorld, human_shortest: &Band) -> Result<CrossingInfo> {
    let (robot, human) = (&bands.robot, &bands.human);
    if !robot.is_synchronized_with(human) {
        return Err(Error::UnsynchronizedBands);
    }
    let mut i_star = 0;
    let mut best = f64::INFINITY;
    for (i, (r, h)) in robot.poses().iter().zip(human.poses()).enumerate() {
        let d = r.position().distance(h.position());
        if d < best {
            best = d;
            i_star = i;
        }
    }
    let cp_r = robot.poses()[i_star].position();
    let cp_h = human.poses()[i_star].position();

    let proj = project_onto_polyline(&human_shortest.positions(), cp_h, human_shortest.first().heading());
    let dir = if proj.tangent.cross(cp_r - cp_h) > 0.0 {
        Direction::Left
    } else {
        Direction::Right
    };

    Ok(CrossingInfo {
        i_star,
        t_cross: robot.time_at(i_star),
        cp_h,
        cp_r,
        dir,
        d_h: deviation_from_path(human_shortest, cp_h),
        d_oh: world.distance_to_nearest_obstacle_on_side(cp_h, cp_r)?,
        d_or: world.distance_to_nearest_obstacle_on_side(cp_r, cp_h)?,
        d_hr: cp_r.distance(cp_h),
    })
}

pub fn assess_situation(info: &CrossingInfo, th: &Thresholds) -> SituationPredicates {
    SituationPredicates {
        human_needs_to_contribute: info.d_h > th.tau_h,
        human_is_constrained: info.d_oh < th.tau_oh,
        robot_is_constrained: info.d_hr < th.tau_hr && info.d_or < th.tau_or,
    }
}
