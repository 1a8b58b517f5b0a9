//! The k-polygon index: an ordered convex-hull vertex array plus one
//! concavity list per hull edge holding the polygon vertices the hull edge
//! shortcuts. Built by a radial plane sweep over the dual lines, queried by
//! binary search on the hull followed by short sequential pocket scans.

mod io;
mod sweep;

pub use io::{deserialize_index, serialize_index, IndexIoError, FORMAT_VERSION};
pub use sweep::{build_polygon, sort_by_x_intercept, SortedLines};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::geom::{direction_of, turn, DualLine, Point, TupleId, GEOM_EPS};

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("need at least k = {need} lines, got {have}")]
    TooFewLines { have: usize, need: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("duplicate x-intercept {x} for lines {a} and {b}: input is not in general position")]
    DuplicateXIntercept { a: TupleId, b: TupleId, x: f64 },
    #[error(
        "coincident crossing angles near {angle} involving lines {a}, {b}, {c}: \
         input is not in general position"
    )]
    ConcurrentCrossings {
        a: TupleId,
        b: TupleId,
        c: TupleId,
        angle: f64,
    },
}

/// Which geometry bounds a polygon edge at a vertex: another dual line, or
/// one of the two coordinate axes at the ends of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineRef {
    Line(TupleId),
    XAxis,
    YAxis,
}

/// A polygon vertex with the identities of the edges meeting there.
/// `right_line` bounds the edge on the smaller-angle side (toward the
/// x-axis), `left_line` the larger-angle side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygonVertex {
    pub point: Point,
    pub right_line: LineRef,
    pub left_line: LineRef,
}

impl PolygonVertex {
    pub fn angle(&self) -> f64 {
        self.point.y.atan2(self.point.x)
    }
}

/// Dual-array representation of the k-th depth contour restricted to
/// directions in [0, π/2].
#[derive(Debug, Clone, PartialEq)]
pub struct KPolygonIndex {
    pub k: usize,
    pub tau: f64,
    /// Hull vertices ordered by increasing direction angle; the first lies
    /// on the positive x-axis, the last on the positive y-axis.
    pub hull: Vec<PolygonVertex>,
    /// `concavities[i]` holds the polygon vertices strictly between
    /// `hull[i]` and `hull[i+1]`, in increasing angle.
    pub concavities: Vec<Vec<PolygonVertex>>,
    /// Every line contributing at least one polygon edge.
    pub line_table: BTreeMap<TupleId, DualLine>,
}

#[derive(Debug, Error, PartialEq)]
pub enum IndexInvariantError {
    #[error("hull must have at least 2 vertices, got {0}")]
    HullTooSmall(usize),
    #[error("expected {expected} concavity lists for {hull} hull vertices, got {got}")]
    ConcavityCount {
        hull: usize,
        expected: usize,
        got: usize,
    },
    #[error("hull is not strictly convex at vertex {0}")]
    NotConvex(usize),
    #[error("vertex angles do not strictly increase at chain position {0}")]
    AnglesNotIncreasing(usize),
    #[error("chain endpoint is not on the expected axis")]
    BadAxisEndpoint,
    #[error("vertex references line {0} missing from the line table")]
    MissingLine(TupleId),
    #[error("tau must be positive, got {0}")]
    BadTau(f64),
    #[error("k must be at least 1")]
    BadK,
}

impl KPolygonIndex {
    /// Total number of stored polygon vertices (hull plus concavities).
    pub fn vertex_count(&self) -> usize {
        self.hull.len() + self.concavities.iter().map(Vec::len).sum::<usize>()
    }

    /// Number of polygon edges in the chain.
    pub fn edge_count(&self) -> usize {
        self.vertex_count() - 1
    }

    /// All polygon vertices in increasing angle: hull and concavity
    /// vertices interleaved.
    pub fn chain(&self) -> Vec<&PolygonVertex> {
        let mut out = Vec::with_capacity(self.vertex_count());
        for (i, h) in self.hull.iter().enumerate() {
            out.push(h);
            if i < self.concavities.len() {
                out.extend(self.concavities[i].iter());
            }
        }
        out
    }

    /// The polygon chain restricted to hull edge `i`: hull[i], the pocket
    /// vertices, hull[i+1].
    pub fn pocket_chain(&self, i: usize) -> Vec<&PolygonVertex> {
        let mut out = Vec::with_capacity(self.concavities[i].len() + 2);
        out.push(&self.hull[i]);
        out.extend(self.concavities[i].iter());
        out.push(&self.hull[i + 1]);
        out
    }

    /// Point where the polygon crosses the ray at angle `theta`.
    ///
    /// Linear scan over the chain; meant for diagnostics, rendering, and
    /// test oracles rather than the query path.
    pub fn point_at(&self, theta: f64) -> Point {
        let chain = self.chain();
        let (c, s) = (theta.cos(), theta.sin());
        let mut prev = chain[0];
        for v in chain.iter().skip(1) {
            if v.angle() >= theta {
                return ray_segment_point(c, s, prev.point, v.point);
            }
            prev = v;
        }
        chain[chain.len() - 1].point
    }

    /// Human-readable dump of the full structure, for debugging and for
    /// eyeballing what the renderer draws.
    pub fn export_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "k-polygon index: k={} tau={} hull={} vertices={} lines={}",
            self.k,
            self.tau,
            self.hull.len(),
            self.vertex_count(),
            self.line_table.len()
        );
        let fmt_ref = |r: LineRef| match r {
            LineRef::XAxis => "x-axis".to_string(),
            LineRef::YAxis => "y-axis".to_string(),
            LineRef::Line(id) => id.to_string(),
        };
        for (i, v) in self.hull.iter().enumerate() {
            let _ = writeln!(
                out,
                "hull[{i}] ({:.12}, {:.12}) right={} left={}",
                v.point.x,
                v.point.y,
                fmt_ref(v.right_line),
                fmt_ref(v.left_line)
            );
            if i < self.concavities.len() {
                for (j, c) in self.concavities[i].iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "  pocket[{i}][{j}] ({:.12}, {:.12}) right={} left={}",
                        c.point.x,
                        c.point.y,
                        fmt_ref(c.right_line),
                        fmt_ref(c.left_line)
                    );
                }
            }
        }
        for (id, line) in &self.line_table {
            let _ = writeln!(
                out,
                "line {id}: slope={:.12} y_intercept={:.12} x_intercept={:.12}",
                line.slope, line.y_intercept, line.x_intercept
            );
        }
        out
    }

    /// Check all structural invariants. Cheap enough to run on every load.
    pub fn validate(&self) -> Result<(), IndexInvariantError> {
        if self.k < 1 {
            return Err(IndexInvariantError::BadK);
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(IndexInvariantError::BadTau(self.tau));
        }
        if self.hull.len() < 2 {
            return Err(IndexInvariantError::HullTooSmall(self.hull.len()));
        }
        if self.concavities.len() != self.hull.len() - 1 {
            return Err(IndexInvariantError::ConcavityCount {
                hull: self.hull.len(),
                expected: self.hull.len() - 1,
                got: self.concavities.len(),
            });
        }
        for i in 2..self.hull.len() {
            let t = turn(
                self.hull[i - 2].point,
                self.hull[i - 1].point,
                self.hull[i].point,
            );
            if t <= GEOM_EPS {
                return Err(IndexInvariantError::NotConvex(i - 1));
            }
        }
        let chain = self.chain();
        for (i, w) in chain.windows(2).enumerate() {
            if w[0].angle() >= w[1].angle() {
                return Err(IndexInvariantError::AnglesNotIncreasing(i + 1));
            }
        }
        let first = &self.hull[0];
        let last = &self.hull[self.hull.len() - 1];
        if first.point.y != 0.0 || first.point.x <= 0.0 || first.right_line != LineRef::XAxis {
            return Err(IndexInvariantError::BadAxisEndpoint);
        }
        if last.point.x != 0.0 || last.point.y <= 0.0 || last.left_line != LineRef::YAxis {
            return Err(IndexInvariantError::BadAxisEndpoint);
        }
        for v in chain {
            for r in [v.right_line, v.left_line] {
                if let LineRef::Line(id) = r {
                    if !self.line_table.contains_key(&id) {
                        return Err(IndexInvariantError::MissingLine(id));
                    }
                }
            }
        }
        // angles must be valid for direction_of (inside the quadrant)
        debug_assert!(self
            .chain()
            .iter()
            .all(|v| direction_of(v.point).is_ok()));
        Ok(())
    }
}

fn ray_segment_point(c: f64, s: f64, a: Point, b: Point) -> Point {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let denom = c * dy - s * dx;
    if denom.abs() <= f64::MIN_POSITIVE {
        return a;
    }
    let u = (s * a.x - c * a.y) / denom;
    Point::new(a.x + u * dx, a.y + u * dy)
}
