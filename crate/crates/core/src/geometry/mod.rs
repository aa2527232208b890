//! Planar geometry shared by every other module: points, poses, time-stamped
//! bands, the corridor wall model and the distance primitives built on it.

mod polyline;
mod visibility;
mod world;

pub use polyline::{deviation_from_path, project_onto_polyline, side_of_path, Projection};
pub use visibility::shortest_path;
pub use world::{CorridorWorld, Rect, NO_OBSTACLE_DISTANCE};

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or displacement in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product; positive when `other` is
    /// counter-clockwise from `self`.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        if n > 1e-12 {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Vec2, t: f64) -> Vec2 {
        self + (other - self) * t
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut a = theta.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Planar position plus heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    /// Builds a pose, wrapping the heading into (-π, π].
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    pub fn from_position(p: Vec2, theta: f64) -> Self {
        Self::new(p.x, p.y, theta)
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn heading(&self) -> Vec2 {
        Vec2::new(self.theta.cos(), self.theta.sin())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x.is_finite() && self.y.is_finite()) {
            return Err(Error::invalid("pose", "position must be finite"));
        }
        if !(self.theta > -PI && self.theta <= PI) {
            return Err(Error::invalid("pose", "heading must lie in (-pi, pi]"));
        }
        Ok(())
    }
}

/// A uniformly time-stamped pose sequence: pose `i` is reached at `t0 + i * dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    poses: Vec<Pose>,
    dt: f64,
    t0: f64,
}

impl Band {
    pub fn new(poses: Vec<Pose>, dt: f64, t0: f64) -> Result<Self> {
        if poses.is_empty() {
            return Err(Error::invalid("band", "a band needs at least one pose"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("band.dt", "time step must be positive"));
        }
        if !t0.is_finite() {
            return Err(Error::invalid("band.t0", "start time must be finite"));
        }
        for p in &poses {
            p.validate()?;
        }
        Ok(Self { poses, dt, t0 })
    }

    pub fn poses(&self) -> &[Pose] {
        &self.poses
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.t0 + index as f64 * self.dt
    }

    pub fn first(&self) -> &Pose {
        &self.poses[0]
    }

    pub fn last(&self) -> &Pose {
        &self.poses[self.poses.len() - 1]
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.poses.iter().map(Pose::position).collect()
    }

    /// Polyline length through the poses.
    pub fn length(&self) -> f64 {
        self.poses
            .windows(2)
            .map(|w| w[0].position().distance(w[1].position()))
            .sum()
    }

    /// True when both bands can be indexed by the same time index.
    pub fn is_synchronized_with(&self, other: &Band) -> bool {
        self.len() == other.len() && self.dt == other.dt && self.t0 == other.t0
    }

    /// Rebuilds the band from positions, recomputing headings from the
    /// direction of travel. Stationary tails keep the last moving heading.
    pub fn from_positions(points: &[Vec2], fallback_heading: f64, dt: f64, t0: f64) -> Result<Self> {
        let mut poses = Vec::with_capacity(points.len());
        let mut heading = fallback_heading;
        for (i, p) in points.iter().enumerate() {
            let ahead = points.get(i + 1).map(|q| *q - *p);
            let behind = (i > 0).then(|| *p - points[i - 1]);
            let dir = ahead
                .and_then(Vec2::normalized)
                .or_else(|| behind.and_then(Vec2::normalized));
            if let Some(d) = dir {
                heading = d.y.atan2(d.x);
            }
            poses.push(Pose::from_position(*p, heading));
        }
        Band::new(poses, dt, t0)
    }
}

/// Kinematic state of one agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub pose: Pose,
    /// Scalar forward speed, m/s.
    pub velocity: f64,
    /// Footprint radius, m.
    pub radius: f64,
}

impl AgentState {
    pub fn new(pose: Pose, velocity: f64, radius: f64) -> Result<Self> {
        let s = Self {
            pose,
            velocity,
            radius,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.pose.validate()?;
        if !(self.velocity >= 0.0 && self.velocity.is_finite()) {
            return Err(Error::invalid("agent.velocity", "must be finite and >= 0"));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid("agent.radius", "must be > 0"));
        }
        Ok(())
    }

    pub fn position(&self) -> Vec2 {
        self.pose.position()
    }
}
