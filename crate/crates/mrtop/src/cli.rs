//! Command implementations behind the binary: build, batch, stats,
//! contours, gen, prep. Everything here is a thin orchestration layer over
//! the library modules so the commands stay directly testable.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::baselines::{oracle_mrtop, wang_mrtop};
use crate::geom::{dual_transform, DataTuple, GeomError};
use crate::index::{
    build_polygon, deserialize_index, serialize_index, sort_by_x_intercept, BuildError,
    IndexIoError, KPolygonIndex,
};
use crate::ingest::{gen_synthetic, load_csv, preprocess, write_csv, Dataset, Distribution, IngestError};
use crate::query::{check_tau, mrtop_query_mode, MrtopResult, QueryError, QueryMode};
use crate::skyband::{approximate_skyband, SkybandError};
use crate::svg::render_contours;

pub const DEFAULT_TAU: f64 = 0.5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("ingest: {0}")]
    Ingest(#[from] IngestError),
    #[error("build: {0}")]
    Build(#[from] BuildError),
    #[error("build: {0}")]
    Skyband(#[from] SkybandError),
    #[error("query: {0}")]
    Query(#[from] QueryError),
    #[error("{0}")]
    Geom(#[from] GeomError),
    #[error("index file: {0}")]
    IndexIo(#[from] IndexIoError),
    #[error("empty k range")]
    EmptyKRange,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Stable process exit codes: 3 ingest, 4 build, 5 query, 1 other.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Ingest(_) => 3,
            CliError::Build(_) | CliError::Skyband(_) | CliError::EmptyKRange => 4,
            CliError::Query(_) | CliError::IndexIo(_) | CliError::Geom(_) => 5,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildReport {
    pub n: usize,
    pub pruned: usize,
    pub hull: usize,
    pub vertices: usize,
    pub wall: Duration,
}

/// Build the index over a dataset file and write it to `out`.
///
/// With `prune` set (the default), construction runs on the skyband
/// approximation; otherwise every dual line is swept, which is only useful
/// for testing that the pruning does not change the polygon.
pub fn cmd_build(
    input: &Path,
    k: usize,
    tau: f64,
    out: &Path,
    prune: bool,
) -> Result<BuildReport, CliError> {
    let start = Instant::now();
    let data = load_csv(input)?;
    let (index, pruned) = build_index(&data, k, tau, prune)?;
    let wall = start.elapsed();
    let file = File::create(out)?;
    serialize_index(&index, BufWriter::new(file))?;
    Ok(BuildReport {
        n: data.len(),
        pruned,
        hull: index.hull.len(),
        vertices: index.vertex_count(),
        wall,
    })
}

/// Shared build pipeline; returns the index and the pruned input size.
pub fn build_index(
    data: &Dataset,
    k: usize,
    tau: f64,
    prune: bool,
) -> Result<(KPolygonIndex, usize), CliError> {
    let kept: Vec<DataTuple> = if prune {
        let band = approximate_skyband(&data.tuples, k, tau)?;
        band.select(&data.tuples)
    } else {
        data.tuples.clone()
    };
    let lines = kept
        .iter()
        .map(|t| dual_transform(t, tau))
        .collect::<Result<Vec<_>, _>>()?;
    let index = build_polygon(&sort_by_x_intercept(lines)?, k, tau)?;
    Ok((index, kept.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchMode {
    Index,
    Wang,
    Oracle,
}

#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub mode: BatchMode,
    pub queries: PathBuf,
    /// Index file; required for `BatchMode::Index`.
    pub index: Option<PathBuf>,
    /// Dataset file; required for the non-indexed modes.
    pub input: Option<PathBuf>,
    pub k: usize,
    pub tau: Option<f64>,
    pub strict: bool,
    /// Shuffle the dataset rows with this seed before querying; the
    /// baselines are sensitive to input order.
    pub shuffle: Option<u64>,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BatchTiming {
    pub load: Duration,
    pub build: Duration,
    pub query_wall: Duration,
    pub query_cpu: Duration,
    pub queries: usize,
}

#[derive(Debug, Error)]
#[error("mode requires {0}")]
pub struct MissingInput(&'static str);

/// Run a batch of queries, returning per-query results in input order plus
/// the timing breakdown. Result serialization is up to the caller and is
/// deliberately outside the timed region; input reading is inside it.
pub fn cmd_batch(cfg: &BatchConfig) -> Result<(Vec<(String, MrtopResult)>, BatchTiming), CliError> {
    let mut timing = BatchTiming::default();

    let t0 = Instant::now();
    let queries = load_csv(&cfg.queries)?;
    let mut dataset = match cfg.mode {
        BatchMode::Index => None,
        _ => {
            let path = cfg.input.as_ref().ok_or_else(|| {
                CliError::Io(std::io::Error::new(
                    std::io::ErrorKind::InvalidInput,
                    "wang/oracle modes need --input",
                ))
            })?;
            Some(load_csv(path)?)
        }
    };
    let index = match cfg.mode {
        BatchMode::Index => {
            let path = cfg.index.as_ref().ok_or_else(|| {
                CliError::Io(std::io::Error::new(
                    std::io::ErrorKind::InvalidInput,
                    "index mode needs --index",
                ))
            })?;
            let idx = deserialize_index(File::open(path)?)?;
            if let Some(tau) = cfg.tau {
                check_tau(&idx, tau)?;
            }
            Some(idx)
        }
        _ => None,
    };
    timing.load = t0.elapsed();

    if let (Some(ds), Some(seed)) = (dataset.as_mut(), cfg.shuffle) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ds.tuples.shuffle(&mut rng);
    }

    let tau = cfg.tau.unwrap_or(DEFAULT_TAU);
    let mode = if cfg.strict {
        QueryMode::Strict
    } else {
        QueryMode::HullCrossingsOnly
    };

    let t1 = Instant::now();
    let answers: Vec<MrtopResult> = match cfg.mode {
        BatchMode::Index => {
            let idx = index.as_ref().expect("checked above");
            run_parallel(&queries.tuples, cfg.workers, &mut timing, |q| {
                mrtop_query_mode(idx, q, mode).map_err(CliError::from)
            })?
        }
        BatchMode::Oracle => {
            let d = &dataset.as_ref().expect("checked above").tuples;
            run_parallel(&queries.tuples, cfg.workers, &mut timing, |q| {
                Ok(oracle_mrtop(d, q, cfg.k))
            })?
        }
        BatchMode::Wang => {
            let d = &dataset.as_ref().expect("checked above").tuples;
            run_parallel(&queries.tuples, cfg.workers, &mut timing, |q| {
                wang_mrtop(d, q, cfg.k, tau).map_err(CliError::from)
            })?
        }
    };
    timing.query_wall = t1.elapsed();
    timing.queries = queries.len();

    let labeled = answers
        .into_iter()
        .enumerate()
        .map(|(i, r)| (queries.ids[i].clone(), r))
        .collect();
    Ok((labeled, timing))
}

/// Fan a pure per-query function out over worker threads, reassembling
/// results in input order and accumulating per-worker busy time.
fn run_parallel<F>(
    queries: &[DataTuple],
    workers: usize,
    timing: &mut BatchTiming,
    f: F,
) -> Result<Vec<MrtopResult>, CliError>
where
    F: Fn(&DataTuple) -> Result<MrtopResult, CliError> + Sync,
{
    let workers = workers.max(1);
    if workers == 1 || queries.len() < 2 * workers {
        let t = Instant::now();
        let out = queries.iter().map(&f).collect::<Result<Vec<_>, _>>()?;
        timing.query_cpu += t.elapsed();
        return Ok(out);
    }
    let chunk = queries.len().div_ceil(workers);
    let results = std::thread::scope(|scope| {
        let handles: Vec<_> = queries
            .chunks(chunk)
            .map(|part| {
                scope.spawn(|| {
                    let t = Instant::now();
                    let out: Result<Vec<MrtopResult>, CliError> = part.iter().map(&f).collect();
                    (out, t.elapsed())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect::<Vec<_>>()
    });
    let mut out = Vec::with_capacity(queries.len());
    for (part, busy) in results {
        out.extend(part?);
        timing.query_cpu += busy;
    }
    Ok(out)
}

/// Render one result line: `id;lo,hi[,flags];...` with angles in radians at
/// 12 significant digits; `c`/`o` flags appear only when an endpoint is
/// closed. Empty results render as `id;`.
pub fn format_result_line(id: &str, res: &MrtopResult) -> String {
    let mut line = format!("{id};");
    let parts: Vec<String> = res
        .intervals
        .iter()
        .map(|iv| {
            let mut s = format!("{},{}", sig12(iv.lo.theta()), sig12(iv.hi.theta()));
            if iv.lo_closed || iv.hi_closed {
                s.push(',');
                s.push(if iv.lo_closed { 'c' } else { 'o' });
                s.push(if iv.hi_closed { 'c' } else { 'o' });
            }
            s
        })
        .collect();
    line.push_str(&parts.join(";"));
    line
}

/// Format with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (11 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_result_stream<W: Write>(
    results: &[(String, MrtopResult)],
    mut w: W,
) -> std::io::Result<()> {
    for (id, res) in results {
        writeln!(w, "{}", format_result_line(id, res))?;
    }
    Ok(())
}

/// Per-k structure sizes: (k, hull vertices, total stored vertices).
pub fn cmd_stats(
    input: &Path,
    k_range: (usize, usize),
    tau: f64,
    out: &Path,
) -> Result<Vec<(usize, usize, usize)>, CliError> {
    let data = load_csv(input)?;
    let rows = stats_rows(&data, k_range, tau)?;
    let mut w = BufWriter::new(File::create(out)?);
    writeln!(w, "k,ch,ds")?;
    for (k, ch, ds) in &rows {
        writeln!(w, "{k},{ch},{ds}")?;
    }
    Ok(rows)
}

pub fn stats_rows(
    data: &Dataset,
    (k_lo, k_hi): (usize, usize),
    tau: f64,
) -> Result<Vec<(usize, usize, usize)>, CliError> {
    if k_lo > k_hi || k_lo == 0 {
        return Err(CliError::EmptyKRange);
    }
    let mut rows = Vec::new();
    for k in k_lo..=k_hi {
        let (index, _) = build_index(data, k, tau, true)?;
        rows.push((k, index.hull.len(), index.vertex_count()));
    }
    Ok(rows)
}

/// Render the contours for each k in the range into one SVG document.
pub fn cmd_contours(
    input: &Path,
    k_range: (usize, usize),
    tau: f64,
    out: &Path,
    draw_hulls: bool,
) -> Result<String, CliError> {
    let data = load_csv(input)?;
    let svg = contours_svg(&data, k_range, tau, draw_hulls)?;
    std::fs::write(out, &svg)?;
    Ok(svg)
}

pub fn contours_svg(
    data: &Dataset,
    (k_lo, k_hi): (usize, usize),
    tau: f64,
    draw_hulls: bool,
) -> Result<String, CliError> {
    if k_lo > k_hi || k_lo == 0 {
        return Err(CliError::EmptyKRange);
    }
    let mut indexes = Vec::new();
    for k in k_lo..=k_hi {
        let (index, _) = build_index(data, k, tau, true)?;
        indexes.push((k, index));
    }
    Ok(render_contours(&indexes, draw_hulls))
}

/// Generate a synthetic dataset CSV.
pub fn cmd_gen(n: usize, dist: Distribution, seed: u64, out: &Path) -> Result<(), CliError> {
    let d = gen_synthetic(n, dist, seed)?;
    write_csv(&d, out)?;
    Ok(())
}

/// Scale a raw dataset into (0,1] and nudge duplicate values apart, writing
/// the result as a new CSV ready for building and querying.
pub fn cmd_prep(input: &Path, out: &Path) -> Result<(), CliError> {
    let d = load_csv(input)?;
    let p = preprocess(&d)?;
    write_csv(&p, out)?;
    Ok(())
}

/// Human-readable dump of an index file.
pub fn cmd_dump(index: &Path) -> Result<String, CliError> {
    let idx = deserialize_index(File::open(index)?)?;
    Ok(idx.export_text())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formats_significant_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12((1.0f64 / 7.0).atan()), "0.141897054604");
        assert_eq!(sig12(7.0f64.atan()), "1.42889927219");
        assert_eq!(sig12(std::f64::consts::FRAC_PI_2), "1.57079632679");
    }

    #[test]
    fn result_line_format() {
        use crate::geom::{AngularInterval, Direction};
        let res = MrtopResult {
            intervals: vec![AngularInterval {
                lo: Direction::from_tan(1.0 / 7.0),
                hi: Direction::from_tan(7.0),
                lo_closed: false,
                hi_closed: false,
            }],
            crossings: vec![],
        };
        assert_eq!(
            format_result_line("q0", &res),
            "q0;0.141897054604,1.42889927219"
        );
        assert_eq!(format_result_line("q1", &MrtopResult::empty()), "q1;");

        let closed = MrtopResult {
            intervals: vec![AngularInterval {
                lo: Direction::AXIS_X,
                hi: Direction::from_tan(1.0),
                lo_closed: true,
                hi_closed: false,
            }],
            crossings: vec![],
        };
        assert_eq!(
            format_result_line("q2", &closed),
            "q2;0,0.785398163397,co"
        );
    }
}
