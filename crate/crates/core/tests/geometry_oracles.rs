use std::cmp::Ordering;
use std::collections::BinaryHeap;

use coopnav::geometry::{deviation_from_path, shortest_path, Band, CorridorWorld, Pose, Rect, Vec2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn blocky_world(rng: &mut ChaCha8Rng) -> CorridorWorld {
    let mut w = CorridorWorld::straight(10.0, 4.0, 0.2).unwrap();
    for _ in 0..rng.gen_range(1..=3) {
        let x = rng.gen_range(1.0..8.0);
        let y = rng.gen_range(0.5..3.0);
        let wx = rng.gen_range(0.2..1.5);
        let wy = rng.gen_range(0.2..1.0);
        w.walls.push(Rect::from_coords(x, y, x + wx, (y + wy).min(4.0)).unwrap());
    }
    w
}

fn inside_any_wall(w: &CorridorWorld, p: Vec2) -> bool {
    w.walls.iter().any(|r| r.contains(p))
}

/// Minimum over a 1 cm lattice covering every wall, keeping only lattice
/// points on the far side of `p` from `away`.
fn sampled_sided_distance(w: &CorridorWorld, p: Vec2, away: Vec2) -> f64 {
    let u = (p - away).normalized().unwrap();
    let h = 0.01;
    let mut best = f64::INFINITY;
    for r in &w.walls {
        let nx = ((r.max.x - r.min.x) / h).ceil() as usize;
        let ny = ((r.max.y - r.min.y) / h).ceil() as usize;
        for i in 0..=nx {
            let x = (r.min.x + i as f64 * h).min(r.max.x);
            for j in 0..=ny {
                let y = (r.min.y + j as f64 * h).min(r.max.y);
                let q = Vec2::new(x, y);
                if (q - p).dot(u) >= 0.0 {
                    best = best.min(q.distance(p));
                }
            }
        }
    }
    best
}

#[test]
fn sided_distance_matches_lattice_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 40 {
        let w = blocky_world(&mut rng);
        let p = Vec2::new(rng.gen_range(0.1..9.9), rng.gen_range(0.05..3.95));
        let away = Vec2::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..4.0));
        if inside_any_wall(&w, p) || p.distance(away) < 0.1 {
            continue;
        }
        let got = w.distance_to_nearest_obstacle_on_side(p, away).unwrap();
        let want = sampled_sided_distance(&w, p, away);
        assert!((got - want).abs() <= 0.02, "p={p:?} away={away:?}: {got} vs {want}");
        checked += 1;
    }
}

#[test]
fn sided_distance_in_symmetric_corridor() {
    let w = CorridorWorld::straight(10.0, 4.0, 0.2).unwrap();
    let d = w.distance_to_nearest_obstacle_on_side(Vec2::new(5.0, 2.0), Vec2::new(5.0, 0.0)).unwrap();
    assert!((d - 2.0).abs() < 1e-12);
    let d = w.distance_to_nearest_obstacle_on_side(Vec2::new(5.0, 3.5), Vec2::new(5.0, 0.0)).unwrap();
    assert!((d - 0.5).abs() < 1e-12);
    assert!(w.distance_to_nearest_obstacle_on_side(Vec2::new(50.0, 2.0), Vec2::new(5.0, 0.0)).is_err());
}

#[derive(PartialEq)]
struct Node(f64, usize);
impl Eq for Node {}
impl Ord for Node {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// A* over a 5 cm lattice with 16-neighbour moves; a move is allowed when
/// both ends and its midpoint keep `radius` clearance.
fn grid_path_length(w: &CorridorWorld, a: Vec2, b: Vec2, radius: f64) -> Option<f64> {
    let h = 0.05;
    let (x0, y0) = (w.bounds.min.x, w.bounds.min.y);
    let nx = ((w.bounds.max.x - x0) / h).round() as i64 + 1;
    let ny = ((w.bounds.max.y - y0) / h).round() as i64 + 1;
    let at = |i: i64, j: i64| Vec2::new(x0 + i as f64 * h, y0 + j as f64 * h);
    let free = |p: Vec2| w.contains(p) && w.clearance(p).0 >= radius;
    let snap = |p: Vec2| (((p.x - x0) / h).round() as i64, ((p.y - y0) / h).round() as i64);
    let (si, sj) = snap(a);
    let (gi, gj) = snap(b);
    let goal = at(gi, gj);
    let idx = |i: i64, j: i64| (i * ny + j) as usize;
    let mut dist = vec![f64::INFINITY; (nx * ny) as usize];
    let mut heap = BinaryHeap::new();
    dist[idx(si, sj)] = 0.0;
    heap.push(Node(at(si, sj).distance(goal), idx(si, sj)));
    let mut moves = Vec::new();
    for di in -2i64..=2 {
        for dj in -2i64..=2 {
            let g = num_gcd(di.abs(), dj.abs());
            if (di, dj) != (0, 0) && g == 1 {
                moves.push((di, dj));
            }
        }
    }
    while let Some(Node(f, k)) = heap.pop() {
        let (i, j) = (k as i64 / ny, k as i64 % ny);
        let g = dist[k];
        if f > g + at(i, j).distance(goal) + 1e-12 {
            continue;
        }
        if (i, j) == (gi, gj) {
            return Some(g + at(si, sj).distance(a) + goal.distance(b));
        }
        for &(di, dj) in &moves {
            let (ni, nj) = (i + di, j + dj);
            if ni < 0 || nj < 0 || ni >= nx || nj >= ny {
                continue;
            }
            let (p, q) = (at(i, j), at(ni, nj));
            if !free(q) || !free(p.lerp(q, 0.5)) {
                continue;
            }
            let c = g + p.distance(q);
            let nk = idx(ni, nj);
            if c < dist[nk] {
                dist[nk] = c;
                heap.push(Node(c + q.distance(goal), nk));
            }
        }
    }
    None
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

#[test]
fn detour_length_matches_grid_search() {
    let radius = 0.2;
    let cases = [
        (Rect::from_coords(4.0, 1.0, 6.0, 3.0).unwrap(), (1.0, 2.0), (9.0, 2.0)),
        (Rect::from_coords(4.5, 0.0, 5.5, 2.8).unwrap(), (1.0, 1.0), (9.0, 1.0)),
        (Rect::from_coords(3.0, 1.5, 3.5, 4.0).unwrap(), (1.0, 3.0), (8.0, 2.5)),
    ];
    for (block, s, g) in cases {
        let mut w = CorridorWorld::straight(10.0, 4.0, 0.2).unwrap();
        w.walls.push(block);
        let band = shortest_path(&w, &Pose::new(s.0, s.1, 0.0), &Pose::new(g.0, g.1, 0.0), radius, 0.5, 0.25).unwrap();
        let oracle = grid_path_length(&w, Vec2::new(s.0, s.1), Vec2::new(g.0, g.1), radius).unwrap();
        let rel = (band.length() - oracle).abs() / oracle;
        assert!(rel <= 0.05, "block {block:?}: band {} grid {oracle}", band.length());
        for p in band.poses() {
            assert!(w.clearance(p.position()).0 >= radius - 1e-6);
        }
    }
}

#[test]
fn straight_corridor_path_and_identity() {
    let w = CorridorWorld::straight(10.0, 4.0, 0.2).unwrap();
    let b = shortest_path(&w, &Pose::new(0.0, 2.0, 0.0), &Pose::new(10.0, 2.0, 0.0), 0.2, 0.5, 0.25).unwrap();
    assert!((b.length() - 10.0).abs() < 1e-9);
    assert!(b.poses().iter().all(|p| p.y == 2.0));
    let p = Pose::new(4.0, 2.0, 0.0);
    let b = shortest_path(&w, &p, &p, 0.2, 0.5, 0.25).unwrap();
    assert_eq!((b.len(), b.length()), (1, 0.0));
}

fn polyline(points: &[Vec2]) -> Band {
    Band::from_positions(points, 0.0, 0.25, 0.0).unwrap()
}

fn sampled_deviation(points: &[Vec2], p: Vec2) -> f64 {
    let mut best = f64::INFINITY;
    for s in points.windows(2) {
        let n = (s[0].distance(s[1]) / 0.001).ceil().max(1.0) as usize;
        for k in 0..=n {
            best = best.min(s[0].lerp(s[1], k as f64 / n as f64).distance(p));
        }
    }
    best
}

#[test]
fn deviation_matches_dense_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let n = rng.gen_range(2..6);
        let pts: Vec<Vec2> = (0..n)
            .map(|_| Vec2::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..4.0)))
            .collect();
        let q = Vec2::new(rng.gen_range(-1.0..11.0), rng.gen_range(-1.0..5.0));
        let got = deviation_from_path(&polyline(&pts), q);
        let want = sampled_deviation(&pts, q);
        assert!((got - want).abs() <= 0.002, "{got} vs {want}");
    }
}

#[test]
fn perpendicular_deviation_from_straight_path() {
    let path = polyline(&[Vec2::new(0.0, 2.0), Vec2::new(10.0, 2.0)]);
    assert!((deviation_from_path(&path, Vec2::new(5.0, 3.2)) - 1.2).abs() < 1e-12);
    assert_eq!(deviation_from_path(&path, Vec2::new(5.0, 2.0)), 0.0);
}

fn coord() -> impl Strategy<Value = Vec2> {
    (0.05f64..9.95, 0.05f64..3.95).prop_map(|(x, y)| Vec2::new(x, y))
}

proptest! {
    #[test]
    fn sided_distance_never_below_unsided(p in coord(), away in coord()) {
        prop_assume!(p.distance(away) > 1e-6);
        let w = CorridorWorld::straight(10.0, 4.0, 0.2).unwrap();
        let sided = w.distance_to_nearest_obstacle_on_side(p, away).unwrap();
        let unsided = w.distance_to_nearest_obstacle(p).unwrap();
        prop_assert!(sided >= unsided);
    }

    #[test]
    fn deviation_is_zero_on_the_polyline(a in coord(), b in coord(), c in coord(), t in 0.0f64..1.0) {
        let path = polyline(&[a, b, c]);
        prop_assert!(deviation_from_path(&path, a.lerp(b, t)) <= 1e-9);
        prop_assert!(deviation_from_path(&path, b.lerp(c, t)) <= 1e-9);
    }

    #[test]
    fn deviation_is_non_negative(a in coord(), b in coord(), q in coord()) {
        prop_assert!(deviation_from_path(&polyline(&[a, b]), q) >= 0.0);
    }
}
