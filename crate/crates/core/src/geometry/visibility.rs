//! Shortest collision-free paths through the wall model.
//!
//! Straight segment when the start sees the goal, otherwise Dijkstra over a
//! visibility graph built on the corners of the walls inflated by the agent
//! radius.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Band, CorridorWorld, Pose, Rect, Vec2};
use crate::error::{Error, Result};

const CORNER_NUDGE: f64 = 1e-6;

fn blocked(obstacles: &[Rect], p: Vec2) -> bool {
    obstacles
        .iter()
        .any(|r| p.x > r.min.x && p.x < r.max.x && p.y > r.min.y && p.y < r.max.y)
}

/// True when the open segment `a`-`b` enters the interior of `r`
/// (Liang-Barsky clip against a slightly shrunk rectangle).
fn segment_hits(r: &Rect, a: Vec2, b: Vec2) -> bool {
    let shrunk = r.inflate(-1e-9);
    let d = b - a;
    let mut t0 = 0.0_f64;
    let mut t1 = 1.0_f64;
    let checks = [
        (-d.x, a.x - shrunk.min.x),
        (d.x, shrunk.max.x - a.x),
        (-d.y, a.y - shrunk.min.y),
        (d.y, shrunk.max.y - a.y),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q <= 0.0 {
                return false;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 >= t1 {
                return false;
            }
        }
    }
    true
}

fn visible(obstacles: &[Rect], a: Vec2, b: Vec2) -> bool {
    !obstacles.iter().any(|r| segment_hits(r, a, b))
}

#[derive(PartialEq)]
struct Frontier {
    cost: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn polyline_route(world: &CorridorWorld, start: Vec2, goal: Vec2, radius: f64) -> Result<Vec<Vec2>> {
    let obstacles: Vec<Rect> = world.walls.iter().map(|w| w.inflate(radius)).collect();
    if blocked(&obstacles, start) || blocked(&obstacles, goal) {
        return Err(Error::UnreachableGoal);
    }
    if visible(&obstacles, start, goal) {
        return Ok(vec![start, goal]);
    }

    let mut nodes = vec![start, goal];
    for r in &obstacles {
        let c = r.corners();
        let nudges = [
            Vec2::new(-1.0, -1.0),
            Vec2::new(1.0, -1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(-1.0, 1.0),
        ];
        for (corner, n) in c.iter().zip(nudges) {
            let p = *corner + n * CORNER_NUDGE;
            if world.contains(p) && !blocked(&obstacles, p) {
                nodes.push(p);
            }
        }
    }

    let n = nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[0] = 0.0;
    heap.push(Frontier { cost: 0.0, node: 0 });
    while let Some(Frontier { cost, node }) = heap.pop() {
        if node == 1 {
            break;
        }
        if cost > dist[node] {
            continue;
        }
        for next in 0..n {
            if next == node {
                continue;
            }
            let c = cost + nodes[node].distance(nodes[next]);
            if c < dist[next] && visible(&obstacles, nodes[node], nodes[next]) {
                dist[next] = c;
                prev[next] = node;
                heap.push(Frontier { cost: c, node: next });
            }
        }
    }
    if !dist[1].is_finite() {
        return Err(Error::UnreachableGoal);
    }
    let mut route = vec![goal];
    let mut at = 1;
    while prev[at] != usize::MAX {
        at = prev[at];
        route.push(nodes[at]);
    }
    route.reverse();
    Ok(route)
}

/// Resamples a polyline at constant speed: vertex `i` of the output sits at
/// arc length `min(i * speed * dt, L)`; the final vertex is the goal.
fn resample(route: &[Vec2], speed: f64, dt: f64) -> Vec<Vec2> {
    let step = speed * dt;
    let total: f64 = route.windows(2).map(|w| w[0].distance(w[1])).sum();
    if total < 1e-12 {
        return vec![route[0]];
    }
    let count = (total / step - 1e-9).ceil().max(1.0) as usize;
    let mut out = Vec::with_capacity(count + 1);
    let mut seg = 0;
    let mut seg_start = 0.0;
    for i in 0..count {
        let s = i as f64 * step;
        while seg + 1 < route.len() - 1 && seg_start + route[seg].distance(route[seg + 1]) < s {
            seg_start += route[seg].distance(route[seg + 1]);
            seg += 1;
        }
        let len = route[seg].distance(route[seg + 1]);
        let t = if len > 0.0 { ((s - seg_start) / len).clamp(0.0, 1.0) } else { 0.0 };
        out.push(route[seg].lerp(route[seg + 1], t));
    }
    out.push(*route.last().unwrap());
    out
}

/// Shortest collision-free band from `start` to `goal` for a disc of
/// `radius`, timed at constant `speed` with step `dt` (starting at t = 0).
pub fn shortest_path(
    world: &CorridorWorld,
    start: &Pose,
    goal: &Pose,
    radius: f64,
    speed: f64,
    dt: f64,
) -> Result<Band> {
    if !(speed > 0.0) {
        return Err(Error::invalid("speed", "nominal speed must be > 0"));
    }
    let (a, b) = (start.position(), goal.position());
    if !world.contains(a) {
        return Err(Error::OutsideWorld { x: a.x, y: a.y });
    }
    if !world.contains(b) {
        return Err(Error::UnreachableGoal);
    }
    if a.distance(b) < 1e-9 {
        return Band::new(vec![*start], dt, 0.0);
    }
    let route = polyline_route(world, a, b, radius)?;
    let points = resample(&route, speed, dt);
    let mut band = Band::from_positions(&points, start.theta, dt, 0.0)?;
    let mut poses = band.poses().to_vec();
    let last = poses.len() - 1;
    poses[0].theta = start.theta;
    poses[last].theta = goal.theta;
    band = Band::new(poses, dt, 0.0)?;
    Ok(band)
}
