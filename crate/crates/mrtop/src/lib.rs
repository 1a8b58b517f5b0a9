//! Maximal reverse top-k (MRTOP) queries over two-dimensional numeric
//! relations.
//!
//! Given a dataset and a new tuple q, an MRTOP query reports every maximal
//! angular interval of linear scoring directions under which q ranks among
//! the top k. The index here represents the k-th depth contour of the
//! dataset's dual-line arrangement as a convex hull array plus per-edge
//! concavity lists; queries intersect the query tuple's dual line with that
//! polygon in logarithmic time plus short pocket scans.
//!
//! Modules:
//! - [`geom`]: dual transform, directions, rank, and line predicates
//! - [`ingest`]: CSV loading, unit scaling, perturbation, generators
//! - [`skyband`]: exact and perfect-recall approximate k-skybands
//! - [`index`]: radial-sweep construction and the on-disk format
//! - [`query`]: hull search, concavity scans, interval assembly
//! - [`baselines`]: brute-force oracle and segment-splitting reference
//! - [`cli`]: the command layer used by the `mrtop` binary

pub mod baselines;
pub mod cli;
pub mod geom;
pub mod index;
pub mod ingest;
pub mod query;
pub mod skyband;
pub mod svg;

pub use geom::{AngularInterval, DataTuple, Direction, DualLine, Point, TupleId};
pub use index::KPolygonIndex;
pub use query::{mrtop_query, MrtopResult, QueryMode};
