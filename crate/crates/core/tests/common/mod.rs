#![allow(dead_code)]

use coopnav::geometry::{Band, Pose, Vec2};
use num_bigint::BigInt;
use num_rational::BigRational;

pub fn band(points: &[Vec2]) -> Band {
    let poses = points.iter().map(|p| Pose::new(p.x, p.y, 0.0)).collect();
    Band::new(poses, 0.25, 0.0).unwrap()
}

/// Earliest index of the smallest pairwise distance.
pub fn first_argmin(r: &[Vec2], h: &[Vec2]) -> usize {
    let d: Vec<f64> = r.iter().zip(h).map(|(a, b)| a.distance(*b)).collect();
    let min = d.iter().cloned().fold(f64::INFINITY, f64::min);
    d.iter().position(|&x| x == min).unwrap()
}

pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

/// The discounted mean in exact arithmetic. Every float is a dyadic
/// rational, so both sums are kept as integers over a shared power of two
/// and a single rational is formed at the end.
pub fn exact_metric(ca: &[f64], gamma: f64) -> BigRational {
    let g = rational(gamma);
    let (a, two_s) = (g.numer().clone(), g.denom().clone());
    let parts: Vec<BigRational> = ca.iter().map(|&c| rational(c)).collect();
    let scale = parts.iter().map(|r| r.denom().clone()).max().unwrap();
    let mut w = BigInt::from(1);
    for _ in 1..ca.len() {
        w *= &two_s;
    }
    let mut num = BigInt::from(0);
    let mut den = BigInt::from(0);
    for r in parts.iter().rev() {
        num += &w * r.numer() * (&scale / r.denom());
        den += &w;
        w = w * &a / &two_s;
    }
    BigRational::new(num, den * scale)
}

/// True when `x` is within `tol` of the exact value.
pub fn agrees(x: f64, exact: &BigRational, tol: f64) -> bool {
    let diff = rational(x) - exact;
    let tol = rational(tol);
    diff < tol && diff > -tol
}
