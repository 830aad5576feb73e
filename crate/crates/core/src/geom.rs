//! Space-time points, straight-line trajectories and affine maps.
//!
//! A signal is a point particle moving at constant speed, so its life is
//! a line segment in the space-time plane. The engine only ever needs one
//! geometric primitive: the exact intersection of two such lines, strictly
//! after both birth events. Affine maps state (and let tests check) the
//! translation and scaling equivalences produced by freezing and scaling.

use crate::rational::{Rational, RationalError};
use std::fmt;

/// A point of the space-time diagram: space coordinate `x`, time `t`.
/// Time never runs backwards, so `t >= 0` everywhere in a diagram.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: Rational,
    pub t: Rational,
}

impl Point {
    pub fn new(x: Rational, t: Rational) -> Point {
        Point { x, t }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.t)
    }
}

/// A signal's worldline: born at `origin`, moving at `speed` = dx/dt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub origin: Point,
    pub speed: Rational,
}

impl Trajectory {
    pub fn new(origin: Point, speed: Rational) -> Trajectory {
        Trajectory { origin, speed }
    }

    /// Exact position at time `t`; meaningful for `t >= origin.t`.
    pub fn position_at(&self, t: &Rational) -> Rational {
        &self.origin.x + &(&self.speed * &(t - &self.origin.t))
    }
}

/// The unique meeting point of two trajectories strictly after both
/// births, if there is one. Parallel trajectories (equal speeds) never
/// meet; a meeting at or before a birth time does not count. Absence is
/// a routine answer, not an error: frozen bundles are parallel by
/// construction.
pub fn intersect(a: &Trajectory, b: &Trajectory) -> Option<Point> {
    if a.speed == b.speed {
        return None;
    }
    // origin_a.x + va (t - ta) = origin_b.x + vb (t - tb)
    let num = (&b.origin.x - &a.origin.x) + &(&a.speed * &a.origin.t) - &(&b.speed * &b.origin.t);
    let den = &a.speed - &b.speed;
    let t = num.checked_div(&den).expect("speeds differ");
    if t <= a.origin.t || t <= b.origin.t {
        return None;
    }
    let x = a.position_at(&t);
    Some(Point::new(x, t))
}

/// A uniform scaling plus translation of the space-time plane:
/// `(x, t) -> (scale*x + dx, scale*t + dt)`. The same factor applies to
/// both axes, so speeds are preserved; this is exactly the family of
/// maps that freezing (scale 1) and scaling reproduce a computation
/// under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub scale: Rational,
    pub dx: Rational,
    pub dt: Rational,
}

impl AffineMap {
    /// Panics if `scale` is zero: a degenerate map has no inverse and
    /// nothing in this crate produces one.
    pub fn new(scale: Rational, dx: Rational, dt: Rational) -> AffineMap {
        assert!(!scale.is_zero(), "affine map with zero scale");
        AffineMap { scale, dx, dt }
    }

    pub fn identity() -> AffineMap {
        AffineMap::new(Rational::one(), Rational::zero(), Rational::zero())
    }

    pub fn translation(dx: Rational, dt: Rational) -> AffineMap {
        AffineMap::new(Rational::one(), dx, dt)
    }

    pub fn apply(&self, p: &Point) -> Point {
        Point::new(
            &(&self.scale * &p.x) + &self.dx,
            &(&self.scale * &p.t) + &self.dt,
        )
    }

    pub fn inverse(&self) -> Result<AffineMap, RationalError> {
        let inv = self.scale.recip()?;
        Ok(AffineMap {
            scale: inv.clone(),
            dx: -(&inv * &self.dx),
            dt: -(&inv * &self.dt),
        })
    }
}

/// Named form of [`AffineMap::apply`].
pub fn apply_affine(m: &AffineMap, p: &Point) -> Point {
    m.apply(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn pt(x: i64, t: i64) -> Point {
        Point::new(Rational::int(x), Rational::int(t))
    }

    #[test]
    fn head_on_collision() {
        // Solved by hand: -1 + t = 1 - t gives t = 1, x = 0.
        let a = Trajectory::new(pt(-1, 0), Rational::int(1));
        let b = Trajectory::new(pt(1, 0), Rational::int(-1));
        assert_eq!(intersect(&a, &b), Some(pt(0, 1)));
        assert_eq!(intersect(&b, &a), Some(pt(0, 1)));
    }

    #[test]
    fn parallel_never_meet() {
        let a = Trajectory::new(pt(0, 0), Rational::int(1));
        let b = Trajectory::new(pt(5, 0), Rational::int(1));
        assert_eq!(intersect(&a, &b), None);
    }

    #[test]
    fn fast_probe_catches_standing_signal() {
        // 3t = 6 gives t = 2 at x = 6.
        let a = Trajectory::new(pt(0, 0), Rational::int(3));
        let b = Trajectory::new(pt(6, 0), Rational::int(0));
        assert_eq!(intersect(&a, &b), Some(pt(6, 2)));
    }

    #[test]
    fn meeting_before_birth_is_none() {
        // Lines cross at t = 1, but b is born later.
        let a = Trajectory::new(pt(-1, 0), Rational::int(1));
        let b = Trajectory::new(Point::new(rat(0, 1), rat(2, 1)), Rational::int(-1));
        assert_eq!(intersect(&a, &b), None);
    }

    #[test]
    fn affine_examples() {
        let p = pt(3, 3);
        assert_eq!(AffineMap::identity().apply(&p), p);
        let scale = AffineMap::new(rat(3, 4), Rational::zero(), Rational::zero());
        assert_eq!(scale.apply(&pt(4, 8)), pt(3, 6));
        let shift = AffineMap::translation(Rational::int(2), Rational::int(5));
        assert_eq!(shift.apply(&pt(0, 0)), pt(2, 5));
    }

    #[test]
    fn affine_inverse_round_trip() {
        let m = AffineMap::new(rat(3, 4), rat(7, 5), rat(-2, 3));
        let inv = m.inverse().unwrap();
        let p = Point::new(rat(13, 11), rat(4, 9));
        assert_eq!(m.apply(&inv.apply(&p)), p);
        assert_eq!(inv.apply(&m.apply(&p)), p);
    }
}
