//! Human policies: a facilitating human that plans its own dual bands with
//! symmetric weights, and a minimally contributing human that walks its
//! shortest path and sidesteps only when the robot is close.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{project_onto_polyline, AgentState, Band, CorridorWorld, Pose, Vec2};
use crate::planner::{DualBandProblem, PlannerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HumanPolicy {
    Facilitating,
    MinimallyContributing,
}

impl HumanPolicy {
    pub fn label(&self) -> &'static str {
        match self {
            HumanPolicy::Facilitating => "Facilitating",
            HumanPolicy::MinimallyContributing => "Minimally Contributing",
        }
    }
}

/// Parameters of both human policies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HumanModelConfig {
    /// Center distance to the robot below which the minimal human reacts, m.
    pub activation_radius: f64,
    /// Center distance the minimal human keeps from the robot when it can, m.
    pub clearance: f64,
    /// Lateral sidestep per meter of intrusion into the activation radius.
    pub avoidance_gain: f64,
    /// The soft sidestep never brings the human closer than this to a wall, m.
    pub wall_comfort: f64,
    /// Upper bound on either human's lateral speed, m/s.
    pub lateral_speed: f64,
}

impl Default for HumanModelConfig {
    fn default() -> Self {
        Self {
            activation_radius: 1.5,
            clearance: 0.6,
            avoidance_gain: 0.5,
            wall_comfort: 1.0,
            lateral_speed: 0.3,
        }
    }
}

impl HumanModelConfig {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("human_model.activation_radius", self.activation_radius),
            ("human_model.clearance", self.clearance),
            ("human_model.avoidance_gain", self.avoidance_gain),
            ("human_model.wall_comfort", self.wall_comfort),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(field, "must be finite and >= 0"));
            }
        }
        if !(self.lateral_speed > 0.0 && self.lateral_speed.is_finite()) {
            return Err(Error::invalid("human_model.lateral_speed", "must be > 0"));
        }
        Ok(())
    }
}

/// What a human policy step needs besides the agents themselves.
#[derive(Debug, Clone, Copy)]
pub struct HumanStepContext<'a> {
    pub world: &'a CorridorWorld,
    pub model: &'a HumanModelConfig,
    pub speed: f64,
    pub dt: f64,
}

fn point_at_arc_length(points: &[Vec2], s: f64) -> (Vec2, Vec2) {
    let mut walked = 0.0;
    let mut last_dir = Vec2::new(1.0, 0.0);
    for w in points.windows(2) {
        let len = w[0].distance(w[1]);
        if len < 1e-12 {
            continue;
        }
        let dir = (w[1] - w[0]) * (1.0 / len);
        if walked + len >= s {
            return (w[0] + dir * (s - walked).max(0.0), dir);
        }
        walked += len;
        last_dir = dir;
    }
    (*points.last().unwrap(), last_dir)
}

/// Lateral offset from the nominal point `q` (direction `away`) that keeps
/// `clearance` from `robot`, bounded by `room`.
fn hard_offset(q: Vec2, away: Vec2, robot: Vec2, clearance: f64, room: f64) -> f64 {
    let rel = robot - q;
    let a = rel.dot(away);
    let l2 = rel.norm_squared() - a * a;
    let c2 = clearance * clearance;
    if c2 <= l2 {
        return 0.0;
    }
    (a + (c2 - l2).sqrt()).clamp(0.0, room.max(0.0))
}

/// One tick of the minimally contributing human along `path`, its shortest
/// path from where it started. The sidestep target is zero while the robot
/// is outside the activation radius of the nominal (on-path) position;
/// inside it the human moves away from the robot by whichever is larger of
/// a soft sidestep growing with the intrusion (limited to the room left
/// before `wall_comfort`) and the offset needed to keep `clearance`.
pub fn step_minimal_human(
    state: &AgentState,
    robot: &AgentState,
    goal: &Pose,
    path: &Band,
    ctx: &HumanStepContext,
) -> AgentState {
    let m = ctx.model;
    let here = state.position();
    let pts = path.positions();
    let total = path.length();
    let proj = project_onto_polyline(&pts, here, path.first().heading());
    let normal = proj.tangent.perp();
    let current = normal.dot(here - proj.point);
    let max_move = ctx.speed * ctx.dt;

    let lateral_cap = (m.lateral_speed * ctx.dt).min(max_move);
    // lateral target at the next nominal point, estimated with a full longitudinal step
    let (q_est, dir_est) = point_at_arc_length(&pts, (proj.arc_length + max_move).min(total));
    let n_est = dir_est.perp();
    let rel = robot.position() - q_est;
    let d0 = rel.norm();
    let target = if d0 < m.activation_radius {
        let robot_side = n_est.dot(rel);
        let away_sign = if robot_side > 0.0 { -1.0 } else { 1.0 };
        let away = n_est * away_sign;
        let wall = ctx
            .world
            .distance_to_nearest_obstacle_on_side(q_est, q_est - away)
            .unwrap_or(0.0);
        let room = wall - state.radius;
        let comfort = (wall - m.wall_comfort).clamp(0.0, room.max(0.0));
        let soft = (m.avoidance_gain * (m.activation_radius - d0)).min(comfort);
        let hard = hard_offset(q_est, away, robot.position(), m.clearance, room);
        away_sign * soft.max(hard)
    } else {
        0.0
    };
    let lateral = (target - current).clamp(-lateral_cap, lateral_cap);
    let along = (max_move * max_move - lateral * lateral).max(0.0).sqrt();

    let s_next = (proj.arc_length + along).min(total);
    let (q, dir) = point_at_arc_length(&pts, s_next);
    let mut next = q + dir.perp() * (current + lateral);
    if s_next >= total && (current + lateral).abs() < 1e-12 {
        next = goal.position();
    }
    let theta = (next - here)
        .normalized()
        .map(|d| d.y.atan2(d.x))
        .unwrap_or(state.pose.theta);
    AgentState {
        pose: Pose::new(next.x, next.y, theta),
        velocity: here.distance(next) / ctx.dt,
        radius: state.radius,
    }
}

/// One tick of the facilitating human. It plans dual bands with itself as
/// the ego agent, then commits early to the lateral offset its own band has
/// at the planned crossing: it moves sideways towards that offset as fast as
/// `lateral_speed` allows and spends the rest of a nominal-speed step
/// walking parallel to `path`, its shortest path from where it started.
/// Once the robot is behind it, it walks straight to its goal. On a
/// planning failure it holds position and
/// the second return value is false.
pub fn step_facilitating_human(
    state: &AgentState,
    robot: &AgentState,
    robot_goal: &Pose,
    goal: &Pose,
    path: &Band,
    planner: &PlannerConfig,
    ctx: &HumanStepContext,
) -> (AgentState, bool) {
    let cfg = planner.symmetric();
    let planned = DualBandProblem::new(ctx.world, state, goal, robot, robot_goal, &cfg).and_then(|p| p.solve());
    let Ok((bands, _)) = planned else {
        let held = AgentState {
            velocity: 0.0,
            ..*state
        };
        return (held, false);
    };
    let (own, other) = (&bands.robot, &bands.human);
    let mut i_star = 0;
    let mut best = f64::INFINITY;
    for (i, (a, b)) in own.poses().iter().zip(other.poses()).enumerate() {
        let d = a.position().distance(b.position());
        if d < best {
            best = d;
            i_star = i;
        }
    }
    let here = state.position();
    let max_move = ctx.speed * ctx.dt;
    let to_goal = goal.position() - here;
    let tangent = project_onto_polyline(&path.positions(), here, path.first().heading()).tangent;
    let passed = (robot.position() - here).dot(tangent) <= 0.0;
    let next = if to_goal.norm() <= max_move {
        goal.position()
    } else if passed {
        here + to_goal * (max_move / to_goal.norm())
    } else {
        let n = tangent.perp();
        let cap = (ctx.model.lateral_speed * ctx.dt).min(max_move);
        let lateral = n.dot(own.poses()[i_star].position() - here).clamp(-cap, cap);
        let along = (max_move * max_move - lateral * lateral).max(0.0).sqrt();
        here + tangent * along + n * lateral
    };
    let next = keep_off_walls(ctx.world, next, state.radius);
    let theta = (next - here)
        .normalized()
        .map(|d| d.y.atan2(d.x))
        .unwrap_or(state.pose.theta);
    (
        AgentState {
            pose: Pose::new(next.x, next.y, theta),
            velocity: here.distance(next) / ctx.dt,
            radius: state.radius,
        },
        true,
    )
}

/// Pushes a disc center out of wall contact along the clearance gradient.
fn keep_off_walls(world: &CorridorWorld, p: Vec2, radius: f64) -> Vec2 {
    let (c, grad) = world.clearance(p);
    if c < radius {
        p + grad * (radius - c)
    } else {
        p
    }
}

pub(crate) fn step_towards(from: Vec2, to: Vec2, max_step: f64) -> Vec2 {
    let d = to - from;
    let len = d.norm();
    if len <= max_step {
        to
    } else {
        from + d * (max_step / len)
    }
}
