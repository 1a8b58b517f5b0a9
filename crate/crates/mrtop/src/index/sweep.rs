//! Radial plane sweep construction of the k-polygon.
//!
//! The sweep rotates a ray from the positive x-axis to the positive y-axis,
//! maintaining the lines in order of distance from the origin along the
//! ray. Adjacent lines swap exactly at their crossing angle; every swap that
//! touches position k-1 moves the k-th nearest line and therefore emits a
//! polygon vertex. Convexity of the hull chain is maintained incrementally,
//! demoted vertices fall into the concavity list of the surviving hull edge.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::geom::{line_intersection, turn, DualLine, Point, GEOM_EPS};

use super::{BuildError, KPolygonIndex, LineRef, PolygonVertex};

/// Crossing angles closer than this that share a line are treated as a
/// concurrency, i.e. a general-position violation.
const ANGLE_TIE_EPS: f64 = 1e-12;

/// Lines ordered by ascending x-intercept: the order in which a ray
/// infinitesimally above the x-axis meets them, nearest first.
#[derive(Debug, Clone)]
pub struct SortedLines(Vec<DualLine>);

impl SortedLines {
    pub fn as_slice(&self) -> &[DualLine] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Sort lines by ascending x-intercept, rejecting exact duplicates (a
/// duplicate means two tuples share an attribute value, i.e. the input was
/// not perturbed into general position).
pub fn sort_by_x_intercept(mut lines: Vec<DualLine>) -> Result<SortedLines, BuildError> {
    lines.sort_unstable_by(|a, b| {
        a.x_intercept
            .partial_cmp(&b.x_intercept)
            .expect("finite x-intercepts")
    });
    for w in lines.windows(2) {
        if w[0].x_intercept == w[1].x_intercept {
            return Err(BuildError::DuplicateXIntercept {
                a: w[0].source,
                b: w[1].source,
                x: w[0].x_intercept,
            });
        }
    }
    Ok(SortedLines(lines))
}

#[derive(Debug, Clone, Copy)]
struct SweepEvent {
    angle: f64,
    point: Point,
    /// Indexes into the line array, normalized a < b.
    a: usize,
    b: usize,
}

impl PartialEq for SweepEvent {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for SweepEvent {}

impl PartialOrd for SweepEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SweepEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap + reverse-on-angle = pop smallest angle first; the index
        // pair breaks exact ties deterministically.
        other
            .angle
            .partial_cmp(&self.angle)
            .expect("finite event angles")
            .then_with(|| other.a.cmp(&self.a))
            .then_with(|| other.b.cmp(&self.b))
    }
}

struct EventQueue {
    heap: BinaryHeap<SweepEvent>,
    queued: HashSet<(usize, usize)>,
    processed: HashSet<(usize, usize)>,
}

impl EventQueue {
    fn new() -> Self {
        EventQueue {
            heap: BinaryHeap::new(),
            queued: HashSet::new(),
            processed: HashSet::new(),
        }
    }

    /// Queue the crossing of two lines if it exists, lies in the closed
    /// positive quadrant, and is ahead of the sweep. A pair may become
    /// adjacent again after its crossing was already handled; that crossing
    /// is legitimately behind the sweep and is skipped. A crossing behind
    /// the sweep for a pair that never swapped can only mean
    /// near-concurrency.
    fn push_crossing(
        &mut self,
        lines: &[DualLine],
        i: usize,
        j: usize,
        current_angle: f64,
        witness: Option<&SweepEvent>,
    ) -> Result<(), BuildError> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if self.processed.contains(&(a, b)) {
            return Ok(());
        }
        let Some(point) = line_intersection(&lines[a], &lines[b]) else {
            return Ok(());
        };
        if point.x < 0.0 || point.y < 0.0 {
            return Ok(());
        }
        let angle = point.y.atan2(point.x);
        if angle <= current_angle {
            let w = witness.expect("past-crossing check only applies mid-sweep");
            let third = if w.a == a || w.b == a { b } else { a };
            return Err(BuildError::ConcurrentCrossings {
                a: lines[w.a].source,
                b: lines[w.b].source,
                c: lines[third].source,
                angle,
            });
        }
        if self.queued.insert((a, b)) {
            self.heap.push(SweepEvent { angle, point, a, b });
        }
        Ok(())
    }

    fn mark_processed(&mut self, a: usize, b: usize) {
        let key = if a < b { (a, b) } else { (b, a) };
        self.processed.insert(key);
    }

    fn pop(&mut self) -> Option<SweepEvent> {
        let ev = self.heap.pop()?;
        self.queued.remove(&(ev.a, ev.b));
        Some(ev)
    }
}

/// Incremental hull with pocket bookkeeping. Pushing a vertex that makes a
/// non-left turn demotes the previous hull vertex (and the pockets either
/// side of it) into the pocket of the surviving edge.
struct ChainBuilder {
    hull: Vec<PolygonVertex>,
    pockets: Vec<Vec<PolygonVertex>>,
}

impl ChainBuilder {
    fn new() -> Self {
        ChainBuilder {
            hull: Vec::new(),
            pockets: Vec::new(),
        }
    }

    fn push(&mut self, v: PolygonVertex) {
        debug_assert!(
            self.hull.is_empty() || chain_tail_angle(self) < v.angle(),
            "polygon vertices must arrive in increasing angle"
        );
        if !self.hull.is_empty() {
            self.pockets.push(Vec::new());
        }
        self.hull.push(v);
        while self.hull.len() >= 3 {
            let n = self.hull.len();
            let t = turn(
                self.hull[n - 3].point,
                self.hull[n - 2].point,
                self.hull[n - 1].point,
            );
            if t > GEOM_EPS {
                break;
            }
            let newest = self.hull.pop().expect("len >= 3");
            let demoted = self.hull.pop().expect("len >= 3");
            self.hull.push(newest);
            let tail_pocket = self.pockets.pop().expect("pocket per edge");
            let mut anchor_pocket = self.pockets.pop().expect("pocket per edge");
            anchor_pocket.push(demoted);
            anchor_pocket.extend(tail_pocket);
            self.pockets.push(anchor_pocket);
        }
    }

    fn finish(self) -> (Vec<PolygonVertex>, Vec<Vec<PolygonVertex>>) {
        debug_assert_eq!(self.pockets.len() + 1, self.hull.len());
        (self.hull, self.pockets)
    }
}

fn chain_tail_angle(c: &ChainBuilder) -> f64 {
    c.pockets
        .last()
        .and_then(|p| p.last())
        .map(PolygonVertex::angle)
        .unwrap_or_else(|| c.hull.last().expect("nonempty").angle())
}

/// Build the dual-array representation of the k-th depth contour over the
/// given lines for directions in [0, π/2].
pub fn build_polygon(lines: &SortedLines, k: usize, tau: f64) -> Result<KPolygonIndex, BuildError> {
    if k == 0 {
        return Err(BuildError::ZeroK);
    }
    let ls = lines.as_slice();
    let m = ls.len();
    if m < k {
        return Err(BuildError::TooFewLines { have: m, need: k });
    }

    // order[p] = line at distance position p (nearest first); pos inverts it
    let mut order: Vec<usize> = (0..m).collect();
    let mut pos: Vec<usize> = (0..m).collect();

    let mut queue = EventQueue::new();
    for p in 0..m.saturating_sub(1) {
        queue.push_crossing(ls, order[p], order[p + 1], f64::NEG_INFINITY, None)?;
    }

    let mut chain = ChainBuilder::new();
    let first = &ls[order[k - 1]];
    chain.push(PolygonVertex {
        point: Point::new(first.x_intercept, 0.0),
        right_line: LineRef::XAxis,
        left_line: LineRef::Line(first.source),
    });

    let mut prev_event: Option<SweepEvent> = None;
    while let Some(ev) = queue.pop() {
        let (pa, pb) = (pos[ev.a], pos[ev.b]);
        if pa.abs_diff(pb) != 1 {
            continue; // stale: the pair is no longer adjacent
        }
        if let Some(pv) = &prev_event {
            let shares = pv.a == ev.a || pv.a == ev.b || pv.b == ev.a || pv.b == ev.b;
            if shares && (ev.angle - pv.angle).abs() <= ANGLE_TIE_EPS {
                let third = if pv.a == ev.a || pv.b == ev.a { ev.b } else { ev.a };
                return Err(BuildError::ConcurrentCrossings {
                    a: ls[pv.a].source,
                    b: ls[pv.b].source,
                    c: ls[third].source,
                    angle: ev.angle,
                });
            }
        }

        let lo = pa.min(pb);
        let hi = lo + 1;
        let touches_k = lo == k - 1 || hi == k - 1;
        let owner_before = order[k - 1];

        queue.mark_processed(ev.a, ev.b);
        order.swap(lo, hi);
        pos[order[lo]] = lo;
        pos[order[hi]] = hi;

        if touches_k {
            let owner_after = order[k - 1];
            chain.push(PolygonVertex {
                point: ev.point,
                right_line: LineRef::Line(ls[owner_before].source),
                left_line: LineRef::Line(ls[owner_after].source),
            });
        }

        if lo > 0 {
            queue.push_crossing(ls, order[lo - 1], order[lo], ev.angle, Some(&ev))?;
        }
        if hi + 1 < m {
            queue.push_crossing(ls, order[hi], order[hi + 1], ev.angle, Some(&ev))?;
        }

        #[cfg(debug_assertions)]
        assert_queue_sound(&queue, ls, &order, ev.angle);

        prev_event = Some(ev);
    }

    let last = &ls[order[k - 1]];
    chain.push(PolygonVertex {
        point: Point::new(0.0, last.y_intercept),
        right_line: LineRef::Line(last.source),
        left_line: LineRef::YAxis,
    });

    let (hull, concavities) = chain.finish();

    let mut line_table = std::collections::BTreeMap::new();
    for v in hull.iter().chain(concavities.iter().flatten()) {
        for r in [v.right_line, v.left_line] {
            if let LineRef::Line(id) = r {
                line_table.entry(id).or_insert_with(|| {
                    *ls.iter()
                        .find(|l| l.source == id)
                        .expect("vertex references a swept line")
                });
            }
        }
    }

    Ok(KPolygonIndex {
        k,
        tau,
        hull,
        concavities,
        line_table,
    })
}

/// Exhaustive event-queue soundness check: every adjacent pair whose
/// crossing is ahead of the sweep and inside the quadrant must be queued.
/// Quadratic, so only run on small inputs in debug builds.
#[cfg(debug_assertions)]
fn assert_queue_sound(queue: &EventQueue, ls: &[DualLine], order: &[usize], angle: f64) {
    if order.len() > 96 {
        return;
    }
    for w in order.windows(2) {
        let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
        if let Some(p) = line_intersection(&ls[a], &ls[b]) {
            if p.x >= 0.0 && p.y >= 0.0 && p.y.atan2(p.x) > angle {
                assert!(
                    queue.queued.contains(&(a, b)),
                    "missing forward crossing for adjacent pair {:?} {:?}",
                    ls[a].source,
                    ls[b].source
                );
            }
        }
    }
}
