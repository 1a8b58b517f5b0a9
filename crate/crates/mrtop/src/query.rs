//! Answering maximal reverse top-k queries against a built index.
//!
//! The query tuple is mapped to its dual line; the answer is the set of
//! directions where that line runs strictly inside the polygon. A binary
//! search over the convex hull finds the (at most two) hull edges the line
//! crosses, short scans over the concavity pockets find the exact polygon
//! boundary crossings, and the crossings are folded into maximal angular
//! intervals.

use thiserror::Error;

use crate::geom::{
    direction_of, dual_transform, AngularInterval, DataTuple, Direction, DualLine, GeomError,
    Point,
};
use crate::index::KPolygonIndex;

/// Angular gap below which two intervals are considered adjacent.
pub const MERGE_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("concavity position {pos} out of range, index has {edges} hull edges")]
    EdgeOutOfRange { pos: usize, edges: usize },
    #[error("intervals must be sorted by ascending lower endpoint")]
    Unsorted,
    #[error("query tau {query} does not match index tau {index}")]
    TauMismatch { query: f64, index: f64 },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// How much of the polygon boundary a query inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QueryMode {
    /// Scan only the pockets of hull edges the query line crosses. Misses
    /// boundary crossings in pockets the line dips into without crossing
    /// their hull edge, so it can under-report; kept for comparison.
    HullCrossingsOnly,
    /// Scan every pocket in the span where the query line runs inside the
    /// hull. Always agrees with the brute-force reference.
    #[default]
    Strict,
}

/// Result of a maximal reverse top-k query.
#[derive(Debug, Clone, PartialEq)]
pub struct MrtopResult {
    /// Disjoint, ascending, non-mergeable intervals of query directions.
    pub intervals: Vec<AngularInterval>,
    /// The polygon boundary points generating the interior endpoints.
    pub crossings: Vec<Point>,
}

impl MrtopResult {
    pub fn empty() -> Self {
        MrtopResult {
            intervals: Vec::new(),
            crossings: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Outcome of the hull binary search.
#[derive(Debug, Clone, PartialEq)]
pub struct HullCrossings {
    /// Hull edge positions crossed by the query line, ascending; at most
    /// two for a convex chain.
    pub edges: Vec<usize>,
    /// Query line passes strictly below the x-axis hull endpoint, i.e. the
    /// query starts inside at θ = 0.
    pub inside_start: bool,
    /// Query line passes strictly below the y-axis hull endpoint.
    pub inside_end: bool,
    /// Number of hull vertices probed; grows logarithmically.
    pub probes: usize,
}

struct HullSearch<'a> {
    hull: &'a [crate::index::PolygonVertex],
    lq: &'a DualLine,
    probes: usize,
    found: Vec<usize>,
}

impl<'a> HullSearch<'a> {
    fn above(&mut self, i: usize) -> bool {
        self.probes += 1;
        self.lq.passes_above(self.hull[i].point)
    }

    fn chord_slope(&self, i: usize) -> f64 {
        let a = self.hull[i].point;
        let b = self.hull[i + 1].point;
        (b.y - a.y) / (b.x - a.x)
    }

    /// Find crossed edges within vertex range [lo, hi], given the
    /// above-flags of both endpoints.
    fn run(&mut self, lo: usize, hi: usize, above_lo: bool, above_hi: bool) {
        if hi - lo == 1 {
            if above_lo != above_hi {
                self.found.push(lo);
            }
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let above_mid = self.above(mid);
        if above_mid {
            // The chain is strictly below the line at mid. Any crossing
            // lies where the chain out-climbs the line, which the slope
            // comparison localizes to at most one side.
            let sq = self.lq.slope;
            if sq < self.chord_slope(mid - 1) {
                self.run(lo, mid, above_lo, above_mid);
            } else if sq > self.chord_slope(mid) {
                self.run(mid, hi, above_mid, above_hi);
            }
        } else {
            // Chain at or above the line at mid: one crossing on each side
            // whose far endpoint sits below the line.
            if above_lo {
                self.run(lo, mid, above_lo, above_mid);
            }
            if above_hi {
                self.run(mid, hi, above_mid, above_hi);
            }
        }
    }
}

/// Locate the hull edges crossed by `lq` and report on which side of the
/// two axis endpoints the line passes.
pub fn hull_search(idx: &KPolygonIndex, lq: &DualLine) -> HullCrossings {
    let hull = &idx.hull;
    let last = hull.len() - 1;
    let mut search = HullSearch {
        hull,
        lq,
        probes: 2,
        found: Vec::new(),
    };
    let above_first = lq.passes_above(hull[0].point);
    let above_last = lq.passes_above(hull[last].point);
    search.run(0, last, above_first, above_last);
    HullCrossings {
        edges: search.found,
        inside_start: lq.passes_below(hull[0].point),
        inside_end: lq.passes_below(hull[last].point),
        probes: search.probes,
    }
}

/// Crossings of `lq` with the polygon chain spanned by the concavity at
/// `edge_pos`, including the partial edges touching the two bounding hull
/// vertices, in ascending direction angle.
///
/// Crossing detection is by strict side flags at the chain vertices, so a
/// crossing landing exactly on a shared vertex is counted exactly once.
pub fn concavity_scan(
    idx: &KPolygonIndex,
    edge_pos: usize,
    lq: &DualLine,
) -> Result<Vec<Point>, QueryError> {
    let edges = idx.hull.len() - 1;
    if edge_pos >= edges {
        return Err(QueryError::EdgeOutOfRange {
            pos: edge_pos,
            edges,
        });
    }
    let chain = idx.pocket_chain(edge_pos);
    let mut out = Vec::new();
    let mut prev = chain[0];
    let mut prev_above = lq.passes_above(prev.point);
    for v in chain.iter().skip(1) {
        let above = lq.passes_above(v.point);
        if above != prev_above {
            out.push(segment_line_crossing(prev.point, v.point, lq));
        }
        prev = v;
        prev_above = above;
    }
    Ok(out)
}

/// Crossing point of the line with the segment [a, b]; callers guarantee a
/// sign change of the line across the segment.
fn segment_line_crossing(a: Point, b: Point, lq: &DualLine) -> Point {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let denom = dy - lq.slope * dx;
    let u = (lq.y_at(a.x) - a.y) / denom;
    Point::new(a.x + u * dx, a.y + u * dy)
}

/// Answer a maximal reverse top-k query in the default (strict) mode.
pub fn mrtop_query(idx: &KPolygonIndex, q: &DataTuple) -> Result<MrtopResult, QueryError> {
    mrtop_query_mode(idx, q, QueryMode::default())
}

pub fn mrtop_query_mode(
    idx: &KPolygonIndex,
    q: &DataTuple,
    mode: QueryMode,
) -> Result<MrtopResult, QueryError> {
    let lq = dual_transform(q, idx.tau)?;
    mrtop_query_line(idx, &lq, mode)
}

/// Query with an already transformed line; used by the skyband pruning
/// stage, which probes many candidate lines against one small index.
pub fn mrtop_query_line(
    idx: &KPolygonIndex,
    lq: &DualLine,
    mode: QueryMode,
) -> Result<MrtopResult, QueryError> {
    let hull = hull_search(idx, lq);
    let last_edge = idx.hull.len() - 2;

    let mut crossings: Vec<Point> = Vec::new();
    match mode {
        QueryMode::HullCrossingsOnly => {
            for &e in &hull.edges {
                crossings.extend(concavity_scan(idx, e, lq)?);
            }
        }
        QueryMode::Strict => {
            let lo = if hull.inside_start {
                Some(0)
            } else {
                hull.edges.first().copied()
            };
            let hi = if hull.inside_end {
                Some(last_edge)
            } else {
                hull.edges.last().copied()
            };
            match (lo, hi) {
                (None, None) => {}
                (lo, hi) => {
                    let lo = lo.unwrap_or(0);
                    let hi = hi.unwrap_or(last_edge);
                    for e in lo..=hi {
                        crossings.extend(concavity_scan(idx, e, lq)?);
                    }
                }
            }
        }
    }

    Ok(assemble(idx, lq, crossings))
}

/// Fold boundary crossings into maximal intervals, seeding the
/// inside/outside state at θ = 0 from the x-axis hull endpoint.
fn assemble(idx: &KPolygonIndex, lq: &DualLine, crossings: Vec<Point>) -> MrtopResult {
    let mut dirs: Vec<Direction> = crossings
        .iter()
        .map(|p| direction_of(*p).expect("crossings lie in the quadrant"))
        .collect();
    dirs.sort_by(|a, b| a.theta().partial_cmp(&b.theta()).unwrap());

    let mut inside = lq.passes_below(idx.hull[0].point);
    let mut open_lo: Option<Direction> = inside.then_some(Direction::AXIS_X);
    let mut intervals = Vec::new();
    for d in &dirs {
        if inside {
            let lo = open_lo.take().expect("open interval while inside");
            intervals.push(AngularInterval {
                lo,
                hi: *d,
                lo_closed: lo.theta() == 0.0,
                hi_closed: false,
            });
        } else {
            open_lo = Some(*d);
        }
        inside = !inside;
    }
    if inside {
        let lo = open_lo.expect("open interval while inside");
        intervals.push(AngularInterval {
            lo,
            hi: Direction::AXIS_Y,
            lo_closed: lo.theta() == 0.0,
            hi_closed: true,
        });
    }
    MrtopResult {
        intervals,
        crossings,
    }
}

/// Coalesce overlapping intervals and intervals whose endpoints meet within
/// `MERGE_EPS`. Input must be sorted by ascending lower endpoint.
pub fn merge_adjacent(
    intervals: &[AngularInterval],
) -> Result<Vec<AngularInterval>, QueryError> {
    for w in intervals.windows(2) {
        if w[0].lo.theta() > w[1].lo.theta() {
            return Err(QueryError::Unsorted);
        }
    }
    let mut out: Vec<AngularInterval> = Vec::new();
    for iv in intervals {
        match out.last_mut() {
            Some(prev) if iv.lo.theta() <= prev.hi.theta() + MERGE_EPS => {
                if iv.hi.theta() > prev.hi.theta() {
                    prev.hi = iv.hi;
                    prev.hi_closed = iv.hi_closed;
                }
            }
            _ => out.push(*iv),
        }
    }
    Ok(out)
}

/// Convenience wrapper asserting the query's threshold matches the index.
pub fn check_tau(idx: &KPolygonIndex, tau: f64) -> Result<(), QueryError> {
    if (tau - idx.tau).abs() > 1e-15 * idx.tau.max(1.0) {
        return Err(QueryError::TauMismatch {
            query: tau,
            index: idx.tau,
        });
    }
    Ok(())
}
