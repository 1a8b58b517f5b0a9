//! Exact and approximate k-skyband computation.
//!
//! A tuple belongs to the k-skyband when fewer than k others dominate it in
//! both attributes. Only skyband tuples can ever contribute an edge to the
//! k-polygon, so the index builder prunes its input to an approximation of
//! the skyband that is guaranteed not to miss a member.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::geom::{dual_transform, DataTuple, GeomError, TupleId};
use crate::index::{build_polygon, sort_by_x_intercept, BuildError};
use crate::query::{mrtop_query_line, QueryError, QueryMode};

#[derive(Debug, Error)]
pub enum SkybandError {
    #[error("need at least k = {need} tuples, got {have}")]
    TooFewTuples { have: usize, need: usize },
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// A set of skyband member ids, flagged by whether it is exact or a
/// perfect-recall superset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkybandSet {
    pub members: BTreeSet<TupleId>,
    pub exact: bool,
}

impl SkybandSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: TupleId) -> bool {
        self.members.contains(&id)
    }

    /// Materialize the member tuples in input order.
    pub fn select(&self, d: &[DataTuple]) -> Vec<DataTuple> {
        d.iter().filter(|t| self.contains(t.id)).copied().collect()
    }
}

/// Exact k-skyband by pairwise dominance counting. Quadratic; this is the
/// test oracle, not the production path.
pub fn exact_skyband(d: &[DataTuple], k: usize) -> SkybandSet {
    assert!(k >= 1, "k must be at least 1");
    let members = d
        .iter()
        .filter(|t| d.iter().filter(|u| u.dominates(t)).count() < k)
        .map(|t| t.id)
        .collect();
    SkybandSet {
        members,
        exact: true,
    }
}

/// Perfect-recall skyband approximation.
///
/// The k highest tuples per attribute span a small polygon; any tuple whose
/// dual reaches that polygon's interior can rank inside the top k somewhere
/// and is kept, as are the extreme tuples themselves. A dominance sweep
/// over the full input backstops recall: every true skyband member is kept
/// even when the small polygon already walls it out everywhere.
pub fn approximate_skyband(
    d: &[DataTuple],
    k: usize,
    tau: f64,
) -> Result<SkybandSet, SkybandError> {
    assert!(k >= 1, "k must be at least 1");
    if d.len() < k {
        return Err(SkybandError::TooFewTuples {
            have: d.len(),
            need: k,
        });
    }

    let extremes = extreme_union(d, k);
    let lines = extremes
        .iter()
        .map(|id| {
            let t = d.iter().find(|t| t.id == *id).expect("extreme id from d");
            dual_transform(t, tau)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let small_index = build_polygon(&sort_by_x_intercept(lines)?, k, tau)?;

    let skyband_guard = skyband_by_sweep(d, k);

    let mut members = BTreeSet::new();
    for t in d {
        let keep = extremes.contains(&t.id) || skyband_guard.contains(&t.id) || {
            let lt = dual_transform(t, tau)?;
            !mrtop_query_line(&small_index, &lt, QueryMode::Strict)?.is_empty()
        };
        if keep {
            members.insert(t.id);
        }
    }
    Ok(SkybandSet {
        members,
        exact: false,
    })
}

/// Union of the k tuples highest in each attribute. Ties broken by the
/// other attribute descending, then by id, for deterministic builds.
fn extreme_union(d: &[DataTuple], k: usize) -> BTreeSet<TupleId> {
    let mut by_a1: Vec<&DataTuple> = d.iter().collect();
    by_a1.sort_by(|a, b| {
        b.a1.partial_cmp(&a.a1)
            .unwrap()
            .then(b.a2.partial_cmp(&a.a2).unwrap())
            .then(a.id.cmp(&b.id))
    });
    let mut by_a2: Vec<&DataTuple> = d.iter().collect();
    by_a2.sort_by(|a, b| {
        b.a2.partial_cmp(&a.a2)
            .unwrap()
            .then(b.a1.partial_cmp(&a.a1).unwrap())
            .then(a.id.cmp(&b.id))
    });
    by_a1
        .iter()
        .take(k)
        .chain(by_a2.iter().take(k))
        .map(|t| t.id)
        .collect()
}

/// Exact skyband membership via a sort and a running top-k of the second
/// attribute: a tuple is dominated by at least k others iff, among tuples
/// with a strictly larger first attribute, the k-th largest second
/// attribute still exceeds its own. O(n log n), independent of the
/// pairwise-counting oracle.
fn skyband_by_sweep(d: &[DataTuple], k: usize) -> BTreeSet<TupleId> {
    let mut sorted: Vec<&DataTuple> = d.iter().collect();
    sorted.sort_by(|a, b| b.a1.partial_cmp(&a.a1).unwrap());

    let mut members = BTreeSet::new();
    // smallest of the k largest a2 values seen so far sits at the front
    let mut top_a2: Vec<f64> = Vec::with_capacity(k);
    let mut i = 0;
    while i < sorted.len() {
        // tuples tying on a1 cannot dominate each other: batch them
        let mut j = i;
        while j < sorted.len() && sorted[j].a1 == sorted[i].a1 {
            j += 1;
        }
        for t in &sorted[i..j] {
            let dominated = top_a2.len() == k && top_a2[0] > t.a2;
            if !dominated {
                members.insert(t.id);
            }
        }
        for t in &sorted[i..j] {
            if top_a2.len() < k {
                top_a2.push(t.a2);
                top_a2.sort_by(|a, b| a.partial_cmp(b).unwrap());
            } else if t.a2 > top_a2[0] {
                top_a2[0] = t.a2;
                let mut m = 0;
                while m + 1 < top_a2.len() && top_a2[m] > top_a2[m + 1] {
                    top_a2.swap(m, m + 1);
                    m += 1;
                }
            }
        }
        i = j;
    }
    members
}
