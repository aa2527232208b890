//! Fixed-timestep corridor simulation.
//!
//! Each tick the robot replans its dual bands, the crossing point is
//! recomputed against the human's initial shortest path, the decision
//! pipeline runs, and then both agents move. The robot tracks the second
//! pose of its band (or drives to its dock pose); the human follows one of
//! the two policies in [`human`].

pub mod human;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use human::{
    step_facilitating_human, step_minimal_human, HumanModelConfig, HumanPolicy,
    HumanStepContext,
};

use crate::assessor::{
    assess_situation, compute_crossing, contribution_metric, record_contribution, ContributionRecord,
    CrossingInfo, SituationPredicates, Thresholds,
};
use crate::decision::{
    dock_target, longitudinal_order, CueEvent, CueKind, DecisionPipeline, FIRST_CHECKPOINT_T_CROSS,
    SECOND_CHECKPOINT_T_CROSS,
};
use crate::error::{Error, Result};
use crate::geometry::{shortest_path, AgentState, Band, CorridorWorld, Pose};
use crate::planner::{DualBandProblem, DualBands, PlannerConfig};

/// Everything one run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub world: CorridorWorld,
    pub robot_start: Pose,
    pub robot_goal: Pose,
    pub human_start: Pose,
    pub human_goal: Pose,
    pub robot_radius: f64,
    pub human_radius: f64,
    pub robot_speed: f64,
    pub human_speed: f64,
    pub human_policy: HumanPolicy,
    pub thresholds: Thresholds,
    pub planner: PlannerConfig,
    pub human_model: HumanModelConfig,
    pub tick_dt: f64,
    pub max_ticks: usize,
    /// Distance to the goal counted as arrived, m.
    pub goal_tolerance: f64,
    pub seed: u64,
    /// Standard deviation of the jitter added to the observed human
    /// position, m. Zero disables it.
    pub noise_std: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.thresholds.validate()?;
        self.planner.validate()?;
        self.human_model.validate()?;
        for (field, v) in [
            ("scenario.tick_dt", self.tick_dt),
            ("robot.radius", self.robot_radius),
            ("human.radius", self.human_radius),
            ("robot.speed", self.robot_speed),
            ("human.speed", self.human_speed),
            ("scenario.goal_tolerance", self.goal_tolerance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(field, "must be > 0"));
            }
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::invalid("scenario.noise_std", "must be finite and >= 0"));
        }
        if self.max_ticks == 0 {
            return Err(Error::invalid("scenario.max_ticks", "must be >= 1"));
        }
        for (field, p) in [
            ("robot.start", self.robot_start),
            ("robot.goal", self.robot_goal),
            ("human.start", self.human_start),
            ("human.goal", self.human_goal),
        ] {
            p.validate().map_err(|_| Error::invalid(field, "pose must be finite"))?;
            if !self.world.contains(p.position()) {
                return Err(Error::invalid(field, "must lie inside the world"));
            }
        }
        let axis = (self.robot_goal.position() - self.robot_start.position())
            .normalized()
            .ok_or_else(|| Error::invalid("robot.goal", "must differ from the start"))?;
        let beyond_human = (self.robot_goal.position() - self.human_start.position()).dot(axis) > 0.0;
        let behind_robot = (self.human_goal.position() - self.robot_start.position()).dot(axis) < 0.0;
        if !beyond_human {
            return Err(Error::invalid("robot.goal", "must lie beyond the human start"));
        }
        if !behind_robot {
            return Err(Error::invalid("human.goal", "must lie behind the robot start"));
        }
        Ok(())
    }
}

/// State of one tick, recorded before the agents move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: usize,
    pub time: f64,
    pub robot: AgentState,
    pub human: AgentState,
    pub t_cross: Option<f64>,
    pub crossing: Option<CrossingInfo>,
    pub predicates: Option<SituationPredicates>,
    /// Entry appended to the contribution record this tick.
    pub ca: Option<f64>,
    /// Metric of the contribution record after this tick's updates.
    pub cm: Option<f64>,
    pub docking: bool,
    pub planner_ok: bool,
    pub human_plan_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub config: ScenarioConfig,
    pub ticks: Vec<TickRecord>,
    pub events: Vec<CueEvent>,
    /// Every contribution entry recorded during the run, resets ignored.
    pub ca_full: Vec<f64>,
    /// The contribution record as it stood at the crossing (or at the end).
    pub ca_final: Vec<f64>,
    pub final_cm: f64,
    pub is_contributing: bool,
    pub crossing_time: Option<f64>,
    pub timed_out: bool,
    pub reached_goals: bool,
    /// Smallest center distance between the agents over all ticks.
    pub min_separation: f64,
}

impl RunTrace {
    pub fn event_at(&self, checkpoint: crate::decision::Checkpoint) -> Option<&CueEvent> {
        self.events.iter().find(|e| e.checkpoint == checkpoint)
    }

    pub fn collided(&self) -> bool {
        self.min_separation < self.config.robot_radius + self.config.human_radius
    }
}

fn heading_of(from: &Pose, to: crate::geometry::Vec2) -> f64 {
    (to - from.position())
        .normalized()
        .map(|d| d.y.atan2(d.x))
        .unwrap_or(from.theta)
}

fn within(state: &AgentState, goal: &Pose, tol: f64) -> bool {
    state.position().distance(goal.position()) <= tol
}

/// Runs one scenario to completion. Deterministic for a given config.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunTrace> {
    cfg.validate()?;
    let th = &cfg.thresholds;
    let world = &cfg.world;
    let mut robot = AgentState::new(cfg.robot_start, 0.0, cfg.robot_radius)?;
    let mut human = AgentState::new(cfg.human_start, 0.0, cfg.human_radius)?;
    let human_path: Band = shortest_path(
        world,
        &cfg.human_start,
        &cfg.human_goal,
        cfg.human_radius,
        cfg.planner.nominal_speed,
        cfg.planner.dt,
    )?;
    let human_ctx = HumanStepContext {
        world,
        model: &cfg.human_model,
        speed: cfg.human_speed,
        dt: cfg.tick_dt,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = if cfg.noise_std > 0.0 {
        Some(Normal::new(0.0, cfg.noise_std).map_err(|e| Error::invalid("scenario.noise_std", e.to_string()))?)
    } else {
        None
    };

    let mut pipeline = DecisionPipeline::new();
    let mut rec = ContributionRecord::new(th.gamma)?;
    let mut ca_full = Vec::new();
    let mut ca_final: Option<Vec<f64>> = None;
    let mut events = Vec::new();
    let mut ticks = Vec::new();
    let mut bands: Option<DualBands> = None;
    let mut dock: Option<Pose> = None;
    let mut first_fired_at: Option<usize> = None;
    let mut crossing_time = None;
    let mut min_separation = f64::INFINITY;
    let mut human_plan_ok = true;
    let mut reached_goals = false;

    for tick in 0..cfg.max_ticks {
        let time = tick as f64 * cfg.tick_dt;
        min_separation = min_separation.min(robot.position().distance(human.position()));

        if within(&robot, &cfg.robot_goal, cfg.goal_tolerance) && within(&human, &cfg.human_goal, cfg.goal_tolerance) {
            reached_goals = true;
            ticks.push(TickRecord {
                tick,
                time,
                robot,
                human,
                t_cross: None,
                crossing: None,
                predicates: None,
                ca: None,
                cm: Some(rec.metric_or_zero()),
                docking: dock.is_some(),
                planner_ok: true,
                human_plan_ok,
            });
            break;
        }

        let observed_human = match &noise {
            Some(n) => {
                let mut h = human;
                h.pose.x += n.sample(&mut rng);
                h.pose.y += n.sample(&mut rng);
                h
            }
            None => human,
        };

        let problem = DualBandProblem::new(world, &robot, &cfg.robot_goal, &observed_human, &cfg.human_goal, &cfg.planner)?;
        let planned = match &bands {
            Some(prev) => problem.solve_from(prev),
            None => problem.solve(),
        };
        let (current, planner_ok) = match planned {
            Ok((b, _)) => (b, true),
            Err(Error::PlanningFailed { bands, .. }) => (*bands, false),
            Err(e) => return Err(e),
        };

        let crossed_now = crossing_time.is_none()
            && longitudinal_order(robot.position(), observed_human.position(), &human_path) <= 0.0;

        let mut info: Option<CrossingInfo> = None;
        let mut preds: Option<SituationPredicates> = None;
        let mut ca = None;
        if crossing_time.is_none() && !crossed_now {
            let i = compute_crossing(&current, world, &human_path)?;
            preds = Some(assess_situation(&i, th));
            info = Some(i);
        }

        if crossed_now {
            crossing_time = Some(time);
            let final_rec = rec.clone();
            events.push(pipeline.post_cross(time, &final_rec, th)?);
            ca_final = Some(final_rec.ca);
            dock = None;
        } else if let (Some(i), Some(p)) = (&info, &preds) {
            if !pipeline.state().first_checkpoint_fired && i.t_cross <= FIRST_CHECKPOINT_T_CROSS {
                events.push(pipeline.first_checkpoint(time, p, i)?);
                first_fired_at = Some(tick);
            }
            if pipeline.is_recording() {
                rec = record_contribution(&rec, &observed_human.pose, &human_path, &robot.pose);
                let v = *rec.ca.last().expect("just pushed");
                ca_full.push(v);
                ca = Some(v);
            }
            if first_fired_at.is_some_and(|t| t < tick)
                && !pipeline.state().second_checkpoint_fired
                && i.t_cross <= SECOND_CHECKPOINT_T_CROSS
            {
                let cm = rec.metric_or_zero();
                let (ev, next) = pipeline.second_checkpoint(time, cm, i.d_h, p, i, &rec, th)?;
                if ev.kind == CueKind::DockToWall {
                    dock = Some(dock_target(world, &robot, &observed_human.pose)?);
                }
                rec = next;
                events.push(ev);
            }
        }

        ticks.push(TickRecord {
            tick,
            time,
            robot,
            human,
            t_cross: info.map(|i| i.t_cross),
            crossing: info,
            predicates: preds,
            ca,
            cm: contribution_metric(&rec).ok(),
            docking: dock.is_some(),
            planner_ok,
            human_plan_ok,
        });

        // move the robot
        let step = cfg.robot_speed * cfg.tick_dt;
        let target = match dock {
            Some(d) => d.position(),
            None => current.robot.poses()[1.min(current.len() - 1)].position(),
        };
        let next = human::step_towards(robot.position(), target, step);
        let theta = if dock.is_some() {
            robot.pose.theta
        } else {
            heading_of(&robot.pose, next)
        };
        let next_robot = AgentState {
            pose: Pose::new(next.x, next.y, theta),
            velocity: robot.position().distance(next) / cfg.tick_dt,
            radius: robot.radius,
        };

        // move the human
        human = match cfg.human_policy {
            HumanPolicy::MinimallyContributing => step_minimal_human(&human, &robot, &cfg.human_goal, &human_path, &human_ctx),
            HumanPolicy::Facilitating => {
                let (h, ok) = step_facilitating_human(
                    &human,
                    &robot,
                    &cfg.robot_goal,
                    &cfg.human_goal,
                    &human_path,
                    &cfg.planner,
                    &human_ctx,
                );
                human_plan_ok = ok;
                h
            }
        };
        robot = next_robot;
        bands = Some(current);
    }

    let timed_out = crossing_time.is_none() && !reached_goals;
    let ca_final = ca_final.unwrap_or_else(|| rec.ca.clone());
    let final_cm = if ca_final.is_empty() {
        0.0
    } else {
        crate::assessor::discounted_mean(&ca_final, th.gamma)?
    };
    Ok(RunTrace {
        config: cfg.clone(),
        ticks,
        events,
        ca_full,
        is_contributing: crate::assessor::is_contributing(final_cm, th),
        ca_final,
        final_cm,
        crossing_time,
        timed_out,
        reached_goals,
        min_separation,
    })
}
