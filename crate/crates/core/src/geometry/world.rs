use serde::{Deserialize, Serialize};

use super::Vec2;
use crate::error::{Error, Result};

/// Stand-in for "no obstacle on that side". Finite so that every threshold
/// comparison stays an ordinary float comparison.
pub const NO_OBSTACLE_DISTANCE: f64 = 1e6;

/// Axis-aligned rectangle, `min` is the lower-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub fn new(min: Vec2, max: Vec2) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::invalid("rect", "corners must be finite"));
        }
        if !(max.x > min.x && max.y > min.y) {
            return Err(Error::invalid("rect", "max corner must exceed min corner"));
        }
        Ok(Self { min, max })
    }

    pub fn from_coords(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(Vec2::new(x0, y0), Vec2::new(x1, y1))
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Nearest point of the (closed) rectangle to `p`.
    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        Vec2::new(p.x.clamp(self.min.x, self.max.x), p.y.clamp(self.min.y, self.max.y))
    }

    pub fn distance(&self, p: Vec2) -> f64 {
        p.distance(self.closest_point(p))
    }

    /// Signed distance: positive outside, negative (depth) inside.
    /// Returns the value together with the outward unit gradient.
    pub fn signed_distance(&self, p: Vec2) -> (f64, Vec2) {
        if !self.contains(p) {
            let c = self.closest_point(p);
            let d = p - c;
            let n = d.norm();
            return (n, d * (1.0 / n));
        }
        let candidates = [
            (p.x - self.min.x, Vec2::new(-1.0, 0.0)),
            (self.max.x - p.x, Vec2::new(1.0, 0.0)),
            (p.y - self.min.y, Vec2::new(0.0, -1.0)),
            (self.max.y - p.y, Vec2::new(0.0, 1.0)),
        ];
        let (depth, normal) = candidates
            .into_iter()
            .fold((f64::INFINITY, Vec2::ZERO), |best, c| if c.0 < best.0 { c } else { best });
        (-depth, normal)
    }

    pub fn corners(&self) -> [Vec2; 4] {
        [
            self.min,
            Vec2::new(self.max.x, self.min.y),
            self.max,
            Vec2::new(self.min.x, self.max.y),
        ]
    }

    pub fn inflate(&self, margin: f64) -> Rect {
        let m = Vec2::new(margin, margin);
        Rect {
            min: self.min - m,
            max: self.max + m,
        }
    }

    /// Distance from `p` to the part of the rectangle inside the closed
    /// half-plane `{q : (q - p) . dir >= 0}`; `None` when that part is empty.
    pub fn distance_in_half_plane(&self, p: Vec2, dir: Vec2) -> Option<f64> {
        let clipped = clip_polygon(&self.corners(), p, dir);
        if clipped.is_empty() {
            return None;
        }
        if clipped.len() >= 3 && convex_contains(&clipped, p) {
            return Some(0.0);
        }
        let n = clipped.len();
        let best = (0..n)
            .map(|i| point_segment_distance(p, clipped[i], clipped[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min);
        Some(best)
    }
}

/// Sutherland-Hodgman clip of a convex polygon against one half-plane.
fn clip_polygon(poly: &[Vec2], origin: Vec2, dir: Vec2) -> Vec<Vec2> {
    let side = |q: Vec2| (q - origin).dot(dir);
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (sa, sb) = (side(a), side(b));
        if sa >= 0.0 {
            out.push(a);
        }
        if (sa >= 0.0) != (sb >= 0.0) {
            let t = sa / (sa - sb);
            out.push(a.lerp(b, t));
        }
    }
    out
}

fn convex_contains(poly: &[Vec2], p: Vec2) -> bool {
    let n = poly.len();
    let mut sign = 0.0_f64;
    for i in 0..n {
        let c = (poly[(i + 1) % n] - poly[i]).cross(p - poly[i]);
        if c.abs() < 1e-15 {
            continue;
        }
        if sign == 0.0 {
            sign = c.signum();
        } else if c.signum() != sign {
            return false;
        }
    }
    true
}

pub(crate) fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// The corridor environment: rectangular walls inside a bounding rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorridorWorld {
    pub walls: Vec<Rect>,
    /// Free-space gap between the two long walls.
    pub corridor_width: f64,
    pub bounds: Rect,
}

impl CorridorWorld {
    pub fn new(walls: Vec<Rect>, corridor_width: f64, bounds: Rect) -> Result<Self> {
        if !(corridor_width > 0.0 && corridor_width.is_finite()) {
            return Err(Error::invalid("world.corridor_width", "must be > 0"));
        }
        Ok(Self {
            walls,
            corridor_width,
            bounds,
        })
    }

    /// A straight corridor along +x: long walls occupy `y <= 0` and
    /// `y >= width`, each `wall_thickness` deep. The ends are open.
    pub fn straight(length: f64, width: f64, wall_thickness: f64) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::invalid("world.length", "must be > 0"));
        }
        if !(width > 0.0) {
            return Err(Error::invalid("world.corridor_width", "must be > 0"));
        }
        if !(wall_thickness > 0.0) {
            return Err(Error::invalid("world.wall_thickness", "must be > 0"));
        }
        let walls = vec![
            Rect::from_coords(0.0, -wall_thickness, length, 0.0)?,
            Rect::from_coords(0.0, width, length, width + wall_thickness)?,
        ];
        let bounds = Rect::from_coords(0.0, -wall_thickness, length, width + wall_thickness)?;
        Self::new(walls, width, bounds)
    }

    /// Wider than 3 m.
    pub fn is_open(&self) -> bool {
        self.corridor_width > 3.0
    }

    /// Narrower than 3 m.
    pub fn is_narrow(&self) -> bool {
        self.corridor_width < 3.0
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.bounds.contains(p)
    }

    fn check_inside(&self, p: Vec2) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutsideWorld { x: p.x, y: p.y })
        }
    }

    /// Distance from `p` to the nearest wall, in any direction.
    pub fn distance_to_nearest_obstacle(&self, p: Vec2) -> Result<f64> {
        self.check_inside(p)?;
        Ok(self
            .walls
            .iter()
            .map(|w| w.distance(p))
            .fold(NO_OBSTACLE_DISTANCE, f64::min))
    }

    /// Distance from `p` to the nearest wall point lying on the far side of
    /// `p` as seen from `away_from`: only wall points `q` with
    /// `(q - p) . (p - away_from) >= 0` count. When `away_from == p` there is
    /// no side to prefer and the unsided distance is returned.
    pub fn distance_to_nearest_obstacle_on_side(&self, p: Vec2, away_from: Vec2) -> Result<f64> {
        self.check_inside(p)?;
        let Some(dir) = (p - away_from).normalized() else {
            return self.distance_to_nearest_obstacle(p);
        };
        Ok(self
            .walls
            .iter()
            .filter_map(|w| w.distance_in_half_plane(p, dir))
            .fold(NO_OBSTACLE_DISTANCE, f64::min))
    }

    /// Smallest signed distance to any wall and its outward gradient.
    pub fn clearance(&self, p: Vec2) -> (f64, Vec2) {
        self.walls
            .iter()
            .map(|w| w.signed_distance(p))
            .fold((NO_OBSTACLE_DISTANCE, Vec2::ZERO), |best, c| if c.0 < best.0 { c } else { best })
    }

    /// Nearest wall on the far side of `p` from `away_from` and the foot
    /// point on it.
    pub fn nearest_wall_point_on_side(&self, p: Vec2, away_from: Vec2) -> Option<(usize, Vec2)> {
        let dir = (p - away_from).normalized()?;
        let mut best: Option<(usize, Vec2, f64)> = None;
        for (i, w) in self.walls.iter().enumerate() {
            let c = w.closest_point(p);
            if (c - p).dot(dir) < 0.0 {
                continue;
            }
            let d = c.distance(p);
            if best.is_none_or(|b| d < b.2) {
                best = Some((i, c, d));
            }
        }
        best.map(|(i, c, _)| (i, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_meter() -> CorridorWorld {
        CorridorWorld::straight(10.0, 4.0, 0.2).unwrap()
    }

    #[test]
    fn sided_distance_center_of_corridor() {
        let w = four_meter();
        let d = w
            .distance_to_nearest_obstacle_on_side(Vec2::new(5.0, 2.0), Vec2::new(5.0, 0.0))
            .unwrap();
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sided_distance_near_far_wall() {
        let w = four_meter();
        let d = w
            .distance_to_nearest_obstacle_on_side(Vec2::new(5.0, 3.5), Vec2::new(5.0, 0.0))
            .unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sided_distance_outside_bounds_errors() {
        let w = four_meter();
        let e = w
            .distance_to_nearest_obstacle_on_side(Vec2::new(50.0, 2.0), Vec2::new(5.0, 0.0))
            .unwrap_err();
        assert!(e.to_string().contains("point outside world"));
    }

    #[test]
    fn sided_distance_without_wall_returns_cap() {
        // single wall below; looking upward finds nothing
        let bounds = Rect::from_coords(0.0, -1.0, 10.0, 10.0).unwrap();
        let w = CorridorWorld::new(vec![Rect::from_coords(0.0, -1.0, 10.0, 0.0).unwrap()], 4.0, bounds).unwrap();
        let d = w
            .distance_to_nearest_obstacle_on_side(Vec2::new(5.0, 2.0), Vec2::new(5.0, 1.0))
            .unwrap();
        assert_eq!(d, NO_OBSTACLE_DISTANCE);
    }

    #[test]
    fn oblique_side_clips_wall_to_half_plane() {
        // looking along +x from (5,2); the lower wall only counts for x >= 5
        let w = four_meter();
        let d = w
            .distance_to_nearest_obstacle_on_side(Vec2::new(5.0, 1.0), Vec2::new(4.0, 1.0))
            .unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn signed_distance_inside_is_negative() {
        let r = Rect::from_coords(0.0, 0.0, 2.0, 1.0).unwrap();
        let (d, n) = r.signed_distance(Vec2::new(1.0, 0.9));
        assert!((d + 0.1).abs() < 1e-12);
        assert_eq!(n, Vec2::new(0.0, 1.0));
        let (d, n) = r.signed_distance(Vec2::new(3.0, 0.5));
        assert!((d - 1.0).abs() < 1e-12);
        assert_eq!(n, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn corridor_classes() {
        assert!(four_meter().is_open());
        let narrow = CorridorWorld::straight(10.0, 2.0, 0.2).unwrap();
        assert!(narrow.is_narrow() && !narrow.is_open());
        assert!(CorridorWorld::straight(10.0, -1.0, 0.2).is_err());
    }
}
