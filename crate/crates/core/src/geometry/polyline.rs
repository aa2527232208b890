use super::{Band, Vec2};

/// Closest point on a polyline to a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub point: Vec2,
    /// Index of the segment holding `point` (0 for single-vertex paths).
    pub segment: usize,
    /// Arc length from the start of the polyline to `point`.
    pub arc_length: f64,
    pub distance: f64,
    /// Unit direction of travel at `point`.
    pub tangent: Vec2,
}

/// Projects `p` onto the polyline through `points`. Ties between segments go
/// to the earliest one. `fallback_tangent` is used when the polyline has no
/// non-degenerate segment.
pub fn project_onto_polyline(points: &[Vec2], p: Vec2, fallback_tangent: Vec2) -> Projection {
    assert!(!points.is_empty(), "projection onto an empty polyline");
    let mut best = Projection {
        point: points[0],
        segment: 0,
        arc_length: 0.0,
        distance: p.distance(points[0]),
        tangent: fallback_tangent,
    };
    let mut walked = 0.0;
    let mut have_segment = false;
    for (i, w) in points.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let ab = b - a;
        let len = ab.norm();
        if len < 1e-12 {
            continue;
        }
        let dir = ab * (1.0 / len);
        let t = ((p - a).dot(dir)).clamp(0.0, len);
        let q = a + dir * t;
        let d = p.distance(q);
        if !have_segment || d < best.distance {
            best = Projection {
                point: q,
                segment: i,
                arc_length: walked + t,
                distance: d,
                tangent: dir,
            };
            have_segment = true;
        }
        walked += len;
    }
    best
}

fn band_projection(path: &Band, p: Vec2) -> Projection {
    let first = path.first();
    project_onto_polyline(&path.positions(), p, first.heading())
}

/// Unsigned distance from `p` to the polyline through the band's poses.
pub fn deviation_from_path(path: &Band, p: Vec2) -> f64 {
    band_projection(path, p).distance
}

/// Which side of the path `p` lies on: `+1` left of the direction of travel,
/// `-1` right, `0` on the path.
pub fn side_of_path(path: &Band, p: Vec2) -> f64 {
    let proj = band_projection(path, p);
    let c = proj.tangent.cross(p - proj.point);
    if c.abs() < 1e-12 {
        0.0
    } else {
        c.signum()
    }
}
