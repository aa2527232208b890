//! Dual elastic-band planner.
//!
//! Both agents start from their shortest paths, timed at the nominal speed.
//! Waypoints then slide along the lateral normal of their anchor point on
//! that path (the timing never changes) while a damped, preconditioned
//! gradient descent minimizes
//!
//! ```text
//!   sum_agents  k_a * w_length * sum |p[i+1] - p[i]|^2          elastic length
//!             + k_a * w_dev    * sum |p[i] - anchor[i]|^2        deviation
//!             + w_obstacle     * sum hinge(r_a + margin - sd(p[i]))^2
//! + w_separation * sum_i hinge(min_sep + sep_margin - |R[i] - H[i]|)^2
//! ```
//!
//! `k_a` is 1 for the robot and `w_human_deviation / w_robot_deviation` for
//! the human, so every deformation of the human band costs that many times
//! more than the same deformation of the robot band.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{shortest_path, AgentState, Band, CorridorWorld, Pose, Vec2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    /// Minimum band length; bands grow beyond it when a goal is further away.
    pub n_waypoints: usize,
    pub dt: f64,
    /// Speed used to time both shortest paths, m/s.
    pub nominal_speed: f64,
    pub w_length: f64,
    pub w_obstacle: f64,
    pub w_separation: f64,
    pub w_robot_deviation: f64,
    pub w_human_deviation: f64,
    pub min_separation: f64,
    /// Extra distance added to `min_separation` inside the hinge, so that the
    /// soft penalty settles at or above `min_separation` when there is room.
    pub separation_margin: f64,
    /// Wall clearance beyond the agent radius below which the hinge acts.
    pub obstacle_margin: f64,
    pub max_iterations: usize,
    /// Initial damping of the descent step, in (0, 1].
    pub step_size: f64,
    pub convergence_tol: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            n_waypoints: 60,
            dt: 0.25,
            nominal_speed: 0.5,
            w_length: 1.0,
            w_obstacle: 200.0,
            w_separation: 1.0,
            w_robot_deviation: 1.0 / 64.0,
            w_human_deviation: 20.0 / 64.0,
            min_separation: 1.2,
            separation_margin: 0.2,
            obstacle_margin: 0.05,
            max_iterations: 500,
            step_size: 0.05,
            convergence_tol: 1e-3,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("planner.dt", self.dt),
            ("planner.nominal_speed", self.nominal_speed),
            ("planner.min_separation", self.min_separation),
            ("planner.convergence_tol", self.convergence_tol),
            ("planner.w_robot_deviation", self.w_robot_deviation),
        ];
        for (field, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(field, "must be > 0"));
            }
        }
        let non_negative = [
            ("planner.w_length", self.w_length),
            ("planner.w_obstacle", self.w_obstacle),
            ("planner.w_separation", self.w_separation),
            ("planner.w_human_deviation", self.w_human_deviation),
            ("planner.separation_margin", self.separation_margin),
            ("planner.obstacle_margin", self.obstacle_margin),
        ];
        for (field, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(field, "must be >= 0"));
            }
        }
        if !(self.step_size > 0.0 && self.step_size <= 1.0) {
            return Err(Error::invalid("planner.step_size", "must lie in (0, 1]"));
        }
        if self.n_waypoints < 2 {
            return Err(Error::invalid("planner.n_waypoints", "must be >= 2"));
        }
        Ok(())
    }

    /// Same config with the human band as cheap to deform as the robot band.
    pub fn symmetric(&self) -> Self {
        Self {
            w_human_deviation: self.w_robot_deviation,
            ..self.clone()
        }
    }

    fn human_effort(&self) -> f64 {
        self.w_human_deviation / self.w_robot_deviation
    }

    fn separation_target(&self) -> f64 {
        self.min_separation + self.separation_margin
    }
}

/// Robot band and anticipated human band on a shared time index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualBands {
    pub robot: Band,
    pub human: Band,
}

impl DualBands {
    pub fn new(robot: Band, human: Band) -> Result<Self> {
        if !robot.is_synchronized_with(&human) {
            return Err(Error::UnsynchronizedBands);
        }
        Ok(Self { robot, human })
    }

    pub fn len(&self) -> usize {
        self.robot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robot.is_empty()
    }
}

/// Diagnostics of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStats {
    pub iterations: usize,
    pub converged: bool,
    /// Total cost before the first iteration and after each accepted one.
    pub cost_history: Vec<f64>,
}

impl PlanStats {
    pub fn final_cost(&self) -> f64 {
        *self.cost_history.last().expect("history holds the initial cost")
    }
}

/// One agent's part of the problem: fixed anchors and lateral normals.
#[derive(Debug, Clone)]
struct AgentTrack {
    anchors: Vec<Vec2>,
    normals: Vec<Vec2>,
    /// Indices `1..free_end` move; the rest are pinned to their anchors.
    free_end: usize,
    radius: f64,
    effort: f64,
    start_heading: f64,
}

impl AgentTrack {
    fn new(path: &Band, n: usize, radius: f64, effort: f64) -> Self {
        let mut anchors = path.positions();
        let goal = *anchors.last().unwrap();
        let arrival = anchors.len() - 1;
        anchors.resize(n, goal);
        let fallback = path.first().heading();
        let normals = (0..n)
            .map(|i| {
                let a = anchors[i.saturating_sub(1)];
                let b = anchors[(i + 1).min(arrival.max(1)).min(n - 1)];
                (b - a).normalized().unwrap_or(fallback).perp()
            })
            .collect();
        Self {
            anchors,
            normals,
            free_end: arrival,
            radius,
            effort,
            start_heading: path.first().theta,
        }
    }

    fn len(&self) -> usize {
        self.anchors.len()
    }

    fn position(&self, offsets: &[f64], i: usize) -> Vec2 {
        self.anchors[i] + self.normals[i] * offsets[i]
    }

    fn positions(&self, offsets: &[f64]) -> Vec<Vec2> {
        (0..self.len()).map(|i| self.position(offsets, i)).collect()
    }

    /// Lateral offsets reproducing `band` as closely as the parameterization allows.
    fn offsets_from(&self, band: &Band, shift: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        let last = band.len() - 1;
        for (i, o) in out.iter_mut().enumerate().take(self.free_end).skip(1) {
            let p = band.poses()[(i + shift).min(last)].position();
            *o = (p - self.anchors[i]).dot(self.normals[i]);
        }
        out
    }

    fn band(&self, offsets: &[f64], dt: f64) -> Result<Band> {
        let pts = self.positions(offsets);
        let mut band = Band::from_positions(&pts, self.start_heading, dt, 0.0)?;
        let mut poses = band.poses().to_vec();
        poses[0].theta = self.start_heading;
        band = Band::new(poses, dt, 0.0)?;
        Ok(band)
    }
}

/// The optimization problem for one planning call. Exposed so that tests
/// and tools can evaluate the exact objective on arbitrary bands.
#[derive(Debug, Clone)]
pub struct DualBandProblem<'w> {
    world: &'w CorridorWorld,
    cfg: PlannerConfig,
    robot: AgentTrack,
    human: AgentTrack,
}

fn hinge(x: f64) -> f64 {
    x.max(0.0)
}

impl<'w> DualBandProblem<'w> {
    pub fn new(
        world: &'w CorridorWorld,
        robot: &AgentState,
        robot_goal: &Pose,
        human: &AgentState,
        human_goal: &Pose,
        cfg: &PlannerConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        robot.validate()?;
        human.validate()?;
        let speed = cfg.nominal_speed;
        let r_path = shortest_path(world, &robot.pose, robot_goal, robot.radius, speed, cfg.dt)?;
        let h_path = shortest_path(world, &human.pose, human_goal, human.radius, speed, cfg.dt)?;
        let n = cfg.n_waypoints.max(r_path.len()).max(h_path.len());
        Ok(Self {
            world,
            cfg: cfg.clone(),
            robot: AgentTrack::new(&r_path, n, robot.radius, 1.0),
            human: AgentTrack::new(&h_path, n, human.radius, cfg.human_effort()),
        })
    }

    pub fn len(&self) -> usize {
        self.robot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robot.len() == 0
    }

    /// The initial (shortest-path) bands, padded to the shared length.
    pub fn shortest_bands(&self) -> Result<DualBands> {
        let zeros = vec![0.0; self.len()];
        self.bands_from(&zeros, &zeros)
    }

    fn bands_from(&self, r: &[f64], h: &[f64]) -> Result<DualBands> {
        DualBands::new(self.robot.band(r, self.cfg.dt)?, self.human.band(h, self.cfg.dt)?)
    }

    fn agent_cost(&self, track: &AgentTrack, pts: &[Vec2]) -> f64 {
        let cfg = &self.cfg;
        let length: f64 = pts.windows(2).map(|w| (w[1] - w[0]).norm_squared()).sum();
        let deviation: f64 = pts
            .iter()
            .zip(&track.anchors)
            .map(|(p, a)| (*p - *a).norm_squared())
            .sum();
        let reach = track.radius + cfg.obstacle_margin;
        let obstacle: f64 = pts
            .iter()
            .map(|p| {
                self.world
                    .walls
                    .iter()
                    .map(|w| hinge(reach - w.signed_distance(*p).0).powi(2))
                    .sum::<f64>()
            })
            .sum();
        track.effort * (cfg.w_length * length + cfg.w_robot_deviation * deviation)
            + cfg.w_obstacle * obstacle
    }

    fn separation_cost(&self, r: &[Vec2], h: &[Vec2]) -> f64 {
        let target = self.cfg.separation_target();
        r.iter()
            .zip(h)
            .map(|(a, b)| hinge(target - a.distance(*b)).powi(2))
            .sum::<f64>()
            * self.cfg.w_separation
    }

    /// Total objective of arbitrary synchronized bands of this problem's length.
    pub fn cost(&self, bands: &DualBands) -> Result<f64> {
        if bands.len() != self.len() || !bands.robot.is_synchronized_with(&bands.human) {
            return Err(Error::UnsynchronizedBands);
        }
        let r = bands.robot.positions();
        let h = bands.human.positions();
        Ok(self.agent_cost(&self.robot, &r) + self.agent_cost(&self.human, &h) + self.separation_cost(&r, &h))
    }

    fn cost_offsets(&self, ro: &[f64], ho: &[f64]) -> f64 {
        let r = self.robot.positions(ro);
        let h = self.human.positions(ho);
        self.agent_cost(&self.robot, &r) + self.agent_cost(&self.human, &h) + self.separation_cost(&r, &h)
    }

    /// Positional gradient of one agent's own terms plus the curvature
    /// diagonal used by the preconditioner.
    fn agent_gradient(&self, track: &AgentTrack, pts: &[Vec2]) -> (Vec<Vec2>, Vec<f64>) {
        let cfg = &self.cfg;
        let n = pts.len();
        let mut grad = vec![Vec2::ZERO; n];
        let mut curv = vec![0.0; n];
        let kl = track.effort * cfg.w_length;
        let kd = track.effort * cfg.w_robot_deviation;
        let reach = track.radius + cfg.obstacle_margin;
        for i in 0..n {
            let mut g = (pts[i] - track.anchors[i]) * (2.0 * kd);
            if i > 0 {
                g = g + (pts[i] - pts[i - 1]) * (2.0 * kl);
            }
            if i + 1 < n {
                g = g - (pts[i + 1] - pts[i]) * (2.0 * kl);
            }
            for w in &self.world.walls {
                let (sd, normal) = w.signed_distance(pts[i]);
                let v = reach - sd;
                if v > 0.0 {
                    g = g - normal * (2.0 * cfg.w_obstacle * v);
                    let along = normal.dot(track.normals[i]);
                    curv[i] += 2.0 * cfg.w_obstacle * along * along;
                }
            }
            grad[i] = g;
        }
        (grad, curv)
    }

    /// Lateral gradients for both agents and the preconditioner diagonals.
    fn gradients(&self, ro: &[f64], ho: &[f64]) -> [(Vec<f64>, Vec<f64>); 2] {
        let r = self.robot.positions(ro);
        let h = self.human.positions(ho);
        let (mut gr, mut cr) = self.agent_gradient(&self.robot, &r);
        let (mut gh, mut ch) = self.agent_gradient(&self.human, &h);
        let target = self.cfg.separation_target();
        let ws = self.cfg.w_separation;
        for i in 0..r.len() {
            let diff = r[i] - h[i];
            let d = diff.norm();
            let v = target - d;
            if v > 0.0 && d > 1e-12 {
                let u = diff * (1.0 / d);
                gr[i] = gr[i] - u * (2.0 * ws * v);
                gh[i] = gh[i] + u * (2.0 * ws * v);
                let ar = u.dot(self.robot.normals[i]);
                let ah = u.dot(self.human.normals[i]);
                cr[i] += 2.0 * ws * ar * ar;
                ch[i] += 2.0 * ws * ah * ah;
            }
        }
        let project = |track: &AgentTrack, g: Vec<Vec2>, c: Vec<f64>| {
            let lat = g.iter().zip(&track.normals).map(|(g, n)| g.dot(*n)).collect();
            (lat, c)
        };
        [project(&self.robot, gr, cr), project(&self.human, gh, ch)]
    }

    /// Solves the tridiagonal (elastic + deviation + hinge curvature) system
    /// on the free indices; pinned indices get a zero direction.
    fn precondition(&self, track: &AgentTrack, grad: &[f64], curv: &[f64]) -> Vec<f64> {
        let n = track.len();
        let mut dir = vec![0.0; n];
        let free: Vec<usize> = (1..track.free_end).collect();
        if free.is_empty() {
            return dir;
        }
        let kl = track.effort * self.cfg.w_length;
        let kd = track.effort * self.cfg.w_robot_deviation;
        let m = free.len();
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for (j, &i) in free.iter().enumerate() {
            let nn = track.normals[i];
            diag[j] = 2.0 * kd + curv[i] + 4.0 * kl + 1e-9;
            if j + 1 < m {
                off[j] = -2.0 * kl * nn.dot(track.normals[i + 1]);
            }
            rhs[j] = grad[i];
        }
        // Thomas algorithm
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        c[0] = off[0] / diag[0];
        d[0] = rhs[0] / diag[0];
        for j in 1..m {
            let denom = diag[j] - off[j - 1] * c[j - 1];
            c[j] = off[j] / denom;
            d[j] = (rhs[j] - off[j - 1] * d[j - 1]) / denom;
        }
        let mut x = vec![0.0; m];
        x[m - 1] = d[m - 1];
        for j in (0..m - 1).rev() {
            x[j] = d[j] - c[j] * x[j + 1];
        }
        for (j, &i) in free.iter().enumerate() {
            dir[i] = x[j];
        }
        dir
    }

    /// Symmetric head-on starts give the separation hinge no lateral
    /// gradient. Nudge the bands apart: the robot keeps the side it is
    /// already on, or passes on its own right.
    fn seed(&self, ro: &mut [f64], ho: &mut [f64]) {
        let r = self.robot.positions(ro);
        let h = self.human.positions(ho);
        let target = self.cfg.separation_target();
        if r.iter().zip(&h).all(|(a, b)| a.distance(*b) >= target) {
            return;
        }
        let h0 = self.human.anchors[0];
        let h_dir = (self.human.anchors[self.human.free_end] - h0)
            .normalized()
            .unwrap_or_else(|| Vec2::new(-1.0, 0.0));
        let r0 = self.robot.anchors[0];
        let lateral = h_dir.cross(r0 - h0);
        let side = if lateral.abs() > 0.01 {
            h_dir.perp() * lateral.signum()
        } else {
            let r_dir = (self.robot.anchors[self.robot.free_end] - r0)
                .normalized()
                .unwrap_or_else(|| Vec2::new(1.0, 0.0));
            -r_dir.perp()
        };
        const NUDGE: f64 = 0.01;
        for i in 1..self.robot.free_end {
            ro[i] += NUDGE * side.dot(self.robot.normals[i]);
        }
        for i in 1..self.human.free_end {
            ho[i] -= NUDGE * side.dot(self.human.normals[i]);
        }
    }

    fn optimize(&self, mut ro: Vec<f64>, mut ho: Vec<f64>) -> (Vec<f64>, Vec<f64>, PlanStats) {
        let cfg = &self.cfg;
        let mut cost = self.cost_offsets(&ro, &ho);
        let mut history = vec![cost];
        let mut step = cfg.step_size;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < cfg.max_iterations {
            let [(gr, cr), (gh, ch)] = self.gradients(&ro, &ho);
            let dr = self.precondition(&self.robot, &gr, &cr);
            let dh = self.precondition(&self.human, &gh, &ch);
            let full_step = dr.iter().chain(&dh).fold(0.0_f64, |m, v| m.max(v.abs()));
            if full_step < cfg.convergence_tol {
                converged = true;
                break;
            }
            let slope: f64 = gr.iter().zip(&dr).chain(gh.iter().zip(&dh)).map(|(g, d)| g * d).sum();
            let mut accepted = None;
            while step > 1e-12 {
                let cand_r: Vec<f64> = ro.iter().zip(&dr).map(|(o, d)| o - step * d).collect();
                let cand_h: Vec<f64> = ho.iter().zip(&dh).map(|(o, d)| o - step * d).collect();
                let c = self.cost_offsets(&cand_r, &cand_h);
                if c <= cost - 1e-4 * step * slope {
                    accepted = Some((cand_r, cand_h, c));
                    break;
                }
                step *= 0.5;
            }
            iterations += 1;
            let Some((nr, nh, c)) = accepted else {
                // no further decrease possible along the descent direction
                converged = true;
                break;
            };
            ro = nr;
            ho = nh;
            cost = c;
            history.push(cost);
            step = (step * 2.0).min(1.0);
        }
        (
            ro,
            ho,
            PlanStats {
                iterations,
                converged,
                cost_history: history,
            },
        )
    }

    fn finish(&self, ro: &[f64], ho: &[f64], stats: PlanStats) -> Result<(DualBands, PlanStats)> {
        let bands = self.bands_from(ro, ho)?;
        if let Some(reason) = self.collision(&bands) {
            return Err(Error::PlanningFailed {
                reason,
                bands: Box::new(bands),
            });
        }
        Ok((bands, stats))
    }

    /// Describes the first residual collision, if any.
    pub fn collision(&self, bands: &DualBands) -> Option<String> {
        let tol = 1e-9;
        for (track, band, who) in [(&self.robot, &bands.robot, "robot"), (&self.human, &bands.human, "human")] {
            for (i, p) in band.poses().iter().enumerate() {
                let c = self.world.clearance(p.position()).0;
                if c < track.radius - tol {
                    return Some(format!("{who} waypoint {i} has wall clearance {c:.4} m"));
                }
            }
        }
        let contact = self.robot.radius + self.human.radius;
        for (i, (a, b)) in bands.robot.poses().iter().zip(bands.human.poses()).enumerate() {
            let d = a.position().distance(b.position());
            if d < contact - tol {
                return Some(format!("agents overlap at index {i} ({d:.4} m)"));
            }
        }
        None
    }

    /// Cold start from the shortest paths.
    pub fn solve(&self) -> Result<(DualBands, PlanStats)> {
        let mut ro = vec![0.0; self.len()];
        let mut ho = vec![0.0; self.len()];
        self.seed(&mut ro, &mut ho);
        let (ro, ho, stats) = self.optimize(ro, ho);
        self.finish(&ro, &ho, stats)
    }

    /// Index on `previous` whose robot pose is nearest the robot's current
    /// position (first on ties).
    fn warm_shift(&self, previous: &DualBands) -> usize {
        let here = self.robot.anchors[0];
        let mut best = (0, f64::INFINITY);
        for (i, p) in previous.robot.poses().iter().enumerate() {
            let d = p.position().distance(here);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// Warm start: `previous` re-indexed so that the pose nearest the robot's
    /// current position becomes index 0.
    pub fn solve_from(&self, previous: &DualBands) -> Result<(DualBands, PlanStats)> {
        let shift = self.warm_shift(previous);
        let ro = self.robot.offsets_from(&previous.robot, shift);
        let ho = self.human.offsets_from(&previous.human, shift);
        let (ro, ho, stats) = self.optimize(ro, ho);
        self.finish(&ro, &ho, stats)
    }

    /// The bands [`Self::solve_from`] starts its descent from.
    pub fn warm_start_bands(&self, previous: &DualBands) -> Result<DualBands> {
        let shift = self.warm_shift(previous);
        let ro = self.robot.offsets_from(&previous.robot, shift);
        let ho = self.human.offsets_from(&previous.human, shift);
        self.bands_from(&ro, &ho)
    }
}

/// Plans the robot band and the anticipated human band from scratch.
pub fn plan_dual_bands(
    world: &CorridorWorld,
    robot: &AgentState,
    robot_goal: &Pose,
    human: &AgentState,
    human_goal: &Pose,
    cfg: &PlannerConfig,
) -> Result<DualBands> {
    plan_dual_bands_with_stats(world, robot, robot_goal, human, human_goal, cfg).map(|(b, _)| b)
}

pub fn plan_dual_bands_with_stats(
    world: &CorridorWorld,
    robot: &AgentState,
    robot_goal: &Pose,
    human: &AgentState,
    human_goal: &Pose,
    cfg: &PlannerConfig,
) -> Result<(DualBands, PlanStats)> {
    DualBandProblem::new(world, robot, robot_goal, human, human_goal, cfg)?.solve()
}

/// Replans from the agents' current states, warm-started from `previous`.
pub fn replan(
    previous: &DualBands,
    world: &CorridorWorld,
    robot: &AgentState,
    human: &AgentState,
    robot_goal: &Pose,
    human_goal: &Pose,
    cfg: &PlannerConfig,
) -> Result<DualBands> {
    replan_with_stats(previous, world, robot, human, robot_goal, human_goal, cfg).map(|(b, _)| b)
}

pub fn replan_with_stats(
    previous: &DualBands,
    world: &CorridorWorld,
    robot: &AgentState,
    human: &AgentState,
    robot_goal: &Pose,
    human_goal: &Pose,
    cfg: &PlannerConfig,
) -> Result<(DualBands, PlanStats)> {
    DualBandProblem::new(world, robot, robot_goal, human, human_goal, cfg)?.solve_from(previous)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::deviation_from_path;

    fn agent(x: f64, y: f64, theta: f64, r: f64) -> AgentState {
        AgentState::new(Pose::new(x, y, theta), 0.5, r).unwrap()
    }

    fn max_dev(band: &Band, reference: &Band) -> f64 {
        band.poses()
            .iter()
            .map(|p| deviation_from_path(reference, p.position()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = PlannerConfig::default();
        cfg.validate().unwrap();
        assert!(cfg.w_human_deviation >= 10.0 * cfg.w_robot_deviation - 1e-12);
    }

    #[test]
    fn far_apart_agents_keep_their_shortest_paths() {
        let world = CorridorWorld::straight(10.0, 8.0, 0.2).unwrap();
        let cfg = PlannerConfig::default();
        let r = agent(0.5, 1.0, 0.0, 0.2);
        let h = agent(9.5, 7.0, std::f64::consts::PI, 0.25);
        let problem = DualBandProblem::new(&world, &r, &Pose::new(9.5, 1.0, 0.0), &h, &Pose::new(0.5, 7.0, std::f64::consts::PI), &cfg).unwrap();
        let (bands, stats) = problem.solve().unwrap();
        let sp = problem.shortest_bands().unwrap();
        assert!(stats.converged);
        assert!(max_dev(&bands.robot, &sp.robot) <= cfg.convergence_tol);
        assert!(max_dev(&bands.human, &sp.human) <= cfg.convergence_tol);
    }

    #[test]
    fn descent_never_increases_cost() {
        let world = CorridorWorld::straight(10.0, 4.0, 0.2).unwrap();
        let cfg = PlannerConfig::default();
        let (_, stats) = plan_dual_bands_with_stats(
            &world,
            &agent(0.5, 2.0, 0.0, 0.2),
            &Pose::new(9.5, 2.0, 0.0),
            &agent(9.5, 2.0, std::f64::consts::PI, 0.25),
            &Pose::new(0.5, 2.0, std::f64::consts::PI),
            &cfg,
        )
        .unwrap();
        assert!(stats.cost_history.len() > 1);
        for w in stats.cost_history.windows(2) {
            assert!(w[1] <= w[0], "cost rose from {} to {}", w[0], w[1]);
        }
    }

    #[test]
    fn mismatched_bands_are_rejected() {
        let a = Band::new(vec![Pose::new(0.0, 0.0, 0.0); 3], 0.25, 0.0).unwrap();
        let b = Band::new(vec![Pose::new(0.0, 0.0, 0.0); 4], 0.25, 0.0).unwrap();
        assert!(matches!(DualBands::new(a, b), Err(Error::UnsynchronizedBands)));
    }
}
