//! Planar primitives shared by every other module.
//!
//! A tuple with positive attributes maps to a line with negative slope and
//! positive intercepts. Along any ray from the origin into the first
//! quadrant, the order in which those lines are met is exactly the score
//! order of the tuples for the query direction of that ray: nearer line,
//! higher score. Everything else in this crate is built on that fact.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use thiserror::Error;

/// Absolute tolerance for slope/turn predicates.
pub const GEOM_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("attributes must be positive and finite, got ({a1}, {a2})")]
    NonPositiveAttribute { a1: f64, a2: f64 },
    #[error("tau must be positive and finite, got {0}")]
    NonPositiveTau(f64),
    #[error("point ({x}, {y}) is not in the closed positive quadrant minus the origin")]
    DirectionDomain { x: f64, y: f64 },
    #[error("interval endpoints out of order: {lo} > {hi}")]
    IntervalOrder { lo: f64, hi: f64 },
    #[error("closed endpoint flag set on interior angle {0}")]
    InteriorClosed(f64),
}

/// Dense row identifier of a tuple within its dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TupleId(pub u64);

impl fmt::Display for TupleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Cross product of (b - a) and (c - b); positive for a left turn.
pub fn turn(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x)
}

/// One relation row: a strictly positive 2-D point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataTuple {
    pub id: TupleId,
    pub a1: f64,
    pub a2: f64,
}

impl DataTuple {
    pub fn new(id: TupleId, a1: f64, a2: f64) -> Result<Self, GeomError> {
        if !(a1.is_finite() && a2.is_finite() && a1 > 0.0 && a2 > 0.0) {
            return Err(GeomError::NonPositiveAttribute { a1, a2 });
        }
        Ok(DataTuple { id, a1, a2 })
    }

    /// Weighted score under the (1, tan θ) normalization; at θ = π/2 the
    /// comparison degenerates to the second attribute alone.
    pub fn score(&self, dir: Direction) -> f64 {
        if dir.tan().is_finite() {
            self.a1 + self.a2 * dir.tan()
        } else {
            self.a2
        }
    }

    /// Strict pareto dominance: larger in both attributes.
    pub fn dominates(&self, other: &DataTuple) -> bool {
        self.a1 > other.a1 && self.a2 > other.a2
    }
}

/// The line { u : u·v = τ } of a tuple v, stored in slope/intercept form.
///
/// Slope is always negative, both intercepts always positive. The
/// x-intercept is kept around because it is the sort key for index builds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualLine {
    pub slope: f64,
    pub y_intercept: f64,
    pub x_intercept: f64,
    pub source: TupleId,
}

impl DualLine {
    pub fn y_at(&self, x: f64) -> f64 {
        self.y_intercept + self.slope * x
    }

    /// True iff the line's y-value at p.x strictly exceeds p.y.
    ///
    /// For the dual of a tuple q this is equivalent to q·p < τ: the point p
    /// lies strictly on the origin side of the line.
    pub fn passes_above(&self, p: Point) -> bool {
        self.y_at(p.x) > p.y
    }

    /// True iff the line's y-value at p.x is strictly below p.y.
    pub fn passes_below(&self, p: Point) -> bool {
        self.y_at(p.x) < p.y
    }
}

/// Map a tuple to its dual line for threshold `tau`.
pub fn dual_transform(v: &DataTuple, tau: f64) -> Result<DualLine, GeomError> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(GeomError::NonPositiveTau(tau));
    }
    if !(v.a1 > 0.0 && v.a2 > 0.0) {
        return Err(GeomError::NonPositiveAttribute { a1: v.a1, a2: v.a2 });
    }
    Ok(DualLine {
        slope: -v.a1 / v.a2,
        y_intercept: tau / v.a2,
        x_intercept: tau / v.a1,
        source: v.id,
    })
}

/// Crossing point of two lines, or `None` when their slopes agree within
/// `GEOM_EPS` (parallel).
pub fn line_intersection(l1: &DualLine, l2: &DualLine) -> Option<Point> {
    let dm = l1.slope - l2.slope;
    if dm.abs() <= GEOM_EPS {
        return None;
    }
    let x = (l2.y_intercept - l1.y_intercept) / dm;
    let y = l1.y_at(x);
    Some(Point::new(x, y))
}

/// A query direction in the closed quarter-turn [0, π/2].
///
/// Stored both as the angle and as its tangent so score comparisons never
/// have to evaluate `tan` near the pole; θ = π/2 carries t = +∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    t: f64,
}

impl Direction {
    pub const AXIS_X: Direction = Direction { theta: 0.0, t: 0.0 };
    pub const AXIS_Y: Direction = Direction {
        theta: FRAC_PI_2,
        t: f64::INFINITY,
    };

    /// From a tangent value t ≥ 0; `f64::INFINITY` selects θ = π/2.
    pub fn from_tan(t: f64) -> Self {
        assert!(t >= 0.0, "tangent must be non-negative, got {t}");
        Direction { theta: t.atan(), t }
    }

    /// From an angle in [0, π/2].
    pub fn from_theta(theta: f64) -> Self {
        assert!(
            (0.0..=FRAC_PI_2).contains(&theta),
            "angle {theta} outside [0, pi/2]"
        );
        let t = if theta == FRAC_PI_2 {
            f64::INFINITY
        } else {
            theta.tan()
        };
        Direction { theta, t }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn tan(&self) -> f64 {
        self.t
    }
}

impl PartialOrd for Direction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.theta.partial_cmp(&other.theta)
    }
}

/// Direction of a quadrant point as seen from the origin.
pub fn direction_of(p: Point) -> Result<Direction, GeomError> {
    if !(p.x >= 0.0 && p.y >= 0.0) || (p.x == 0.0 && p.y == 0.0) {
        return Err(GeomError::DirectionDomain { x: p.x, y: p.y });
    }
    let t = if p.x == 0.0 { f64::INFINITY } else { p.y / p.x };
    Ok(Direction {
        theta: p.y.atan2(p.x),
        t,
    })
}

/// Number of tuples in `d` scoring strictly higher than `v` at `dir`.
///
/// `v` is in the top-k for that direction iff the result is < k. A copy of
/// `v` inside `d` never counts against it (ties are not strict).
pub fn rank(d: &[DataTuple], v: &DataTuple, dir: Direction) -> usize {
    let sv = v.score(dir);
    d.iter().filter(|u| u.score(dir) > sv).count()
}

/// A directional interval within [0, π/2].
///
/// Interior endpoints are always open; a closed flag is only meaningful at
/// exactly 0 or π/2, where the query domain itself ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularInterval {
    pub lo: Direction,
    pub hi: Direction,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl AngularInterval {
    pub fn new(
        lo: Direction,
        hi: Direction,
        lo_closed: bool,
        hi_closed: bool,
    ) -> Result<Self, GeomError> {
        if lo.theta > hi.theta {
            return Err(GeomError::IntervalOrder {
                lo: lo.theta,
                hi: hi.theta,
            });
        }
        if lo_closed && lo.theta != 0.0 && lo.theta != FRAC_PI_2 {
            return Err(GeomError::InteriorClosed(lo.theta));
        }
        if hi_closed && hi.theta != 0.0 && hi.theta != FRAC_PI_2 {
            return Err(GeomError::InteriorClosed(hi.theta));
        }
        Ok(AngularInterval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn width(&self) -> f64 {
        self.hi.theta - self.lo.theta
    }
}
