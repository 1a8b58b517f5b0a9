//! Dataset loading, preprocessing, and synthetic generation.
//!
//! Input CSVs are rows of `id,a1,a2` with an optional header. Preprocessing
//! scales every attribute into (0,1] and then nudges duplicated values apart
//! so that the sweep's general-position assumption holds.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geom::{DataTuple, TupleId};

/// Default perturbation step for duplicated values.
pub const DEFAULT_PERTURBATION: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("row {row}: expected 3 comma-separated fields, got {got}")]
    MalformedRow { row: usize, got: usize },
    #[error("row {row}: field {field} is not a number: {text:?}")]
    NonNumeric {
        row: usize,
        field: usize,
        text: String,
    },
    #[error("row {row}: attribute values must be positive and finite ({a1}, {a2})")]
    NonPositive { row: usize, a1: f64, a2: f64 },
    #[error("dataset is empty")]
    Empty,
    #[error("perturbation step must be positive, got {0}")]
    BadPerturbation(f64),
    #[error("generator size must be at least 1")]
    EmptyGenerator,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    Uniform,
    Correlated,
    Anticorrelated,
}

impl Distribution {
    pub fn name(&self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::Correlated => "correlated",
            Distribution::Anticorrelated => "anticorrelated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    File(String),
    Synthetic {
        n: usize,
        dist: Distribution,
        seed: u64,
    },
    Derived(String),
}

/// A loaded relation: tuples plus their external row ids.
///
/// `ids` is indexed by `TupleId`, so reordering `tuples` (e.g. for the
/// shuffled-input benchmarks) never detaches a tuple from its id.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub tuples: Vec<DataTuple>,
    pub ids: Vec<String>,
    pub provenance: Provenance,
    pub preprocessed: bool,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn id_of(&self, id: TupleId) -> &str {
        &self.ids[id.0 as usize]
    }
}

/// Parse `id,a1,a2` rows. A first row whose numeric fields do not parse is
/// treated as a header and skipped. Row numbers in errors are 1-based
/// physical line numbers.
pub fn load_csv_reader<R: BufRead>(reader: R, source: &str) -> Result<Dataset, IngestError> {
    let mut tuples = Vec::new();
    let mut ids = Vec::new();
    let mut first_content_row = true;
    for (lineno, line) in reader.lines().enumerate() {
        let row = lineno + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != 3 {
            return Err(IngestError::MalformedRow {
                row,
                got: fields.len(),
            });
        }
        let a1 = fields[1].trim().parse::<f64>();
        let a2 = fields[2].trim().parse::<f64>();
        match (a1, a2) {
            (Ok(a1), Ok(a2)) => {
                if !(a1.is_finite() && a2.is_finite() && a1 > 0.0 && a2 > 0.0) {
                    return Err(IngestError::NonPositive { row, a1, a2 });
                }
                let id = TupleId(tuples.len() as u64);
                tuples.push(DataTuple { id, a1, a2 });
                ids.push(fields[0].trim().to_string());
            }
            _ if first_content_row => {} // header row
            (res1, _) => {
                let field = if res1.is_err() { 2 } else { 3 };
                return Err(IngestError::NonNumeric {
                    row,
                    field,
                    text: fields[field - 1].to_string(),
                });
            }
        }
        first_content_row = false;
    }
    Ok(Dataset {
        tuples,
        ids,
        provenance: Provenance::File(source.to_string()),
        preprocessed: false,
    })
}

pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<Dataset, IngestError> {
    let file = File::open(path.as_ref())?;
    load_csv_reader(
        BufReader::new(file),
        &path.as_ref().display().to_string(),
    )
}

/// Write a dataset back out as `id,a1,a2` with a header. Floats use Rust's
/// shortest round-trip formatting, so load ∘ write is the identity.
pub fn write_csv_writer<W: Write>(d: &Dataset, mut w: W) -> Result<(), IngestError> {
    writeln!(w, "id,a1,a2")?;
    for t in &d.tuples {
        writeln!(w, "{},{},{}", d.id_of(t.id), t.a1, t.a2)?;
    }
    Ok(())
}

pub fn write_csv<P: AsRef<Path>>(d: &Dataset, path: P) -> Result<(), IngestError> {
    let file = File::create(path)?;
    write_csv_writer(d, std::io::BufWriter::new(file))
}

/// Scale every attribute value a to (a+1)/(max+1), mapping each attribute's
/// maximum to exactly 1 and everything into (0,1]. Order-preserving.
pub fn scale_unit(d: &Dataset) -> Result<Dataset, IngestError> {
    if d.is_empty() {
        return Err(IngestError::Empty);
    }
    let max1 = d.tuples.iter().map(|t| t.a1).fold(f64::MIN, f64::max);
    let max2 = d.tuples.iter().map(|t| t.a2).fold(f64::MIN, f64::max);
    let tuples = d
        .tuples
        .iter()
        .map(|t| DataTuple {
            id: t.id,
            a1: (t.a1 + 1.0) / (max1 + 1.0),
            a2: (t.a2 + 1.0) / (max2 + 1.0),
        })
        .collect();
    Ok(Dataset {
        tuples,
        ids: d.ids.clone(),
        provenance: d.provenance.clone(),
        preprocessed: false,
    })
}

/// Bump duplicated values by `eps` (repeatedly) until each attribute's
/// values are pairwise distinct. Earlier rows keep their original value;
/// later duplicates accumulate bumps. Values may end up marginally above 1.
pub fn perturb_general_position(d: &Dataset, eps: f64) -> Result<Dataset, IngestError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(IngestError::BadPerturbation(eps));
    }
    let a1 = perturb_column(d.tuples.iter().map(|t| t.a1), eps);
    let a2 = perturb_column(d.tuples.iter().map(|t| t.a2), eps);
    let tuples = d
        .tuples
        .iter()
        .zip(a1.into_iter().zip(a2))
        .map(|(t, (a1, a2))| DataTuple { id: t.id, a1, a2 })
        .collect();
    Ok(Dataset {
        tuples,
        ids: d.ids.clone(),
        provenance: d.provenance.clone(),
        preprocessed: true,
    })
}

fn perturb_column<I: Iterator<Item = f64>>(values: I, eps: f64) -> Vec<f64> {
    let mut used: HashSet<u64> = HashSet::new();
    values
        .map(|v| {
            let mut v = v;
            while !used.insert(v.to_bits()) {
                v += eps;
            }
            v
        })
        .collect()
}

/// scale_unit followed by perturb_general_position with the default step.
pub fn preprocess(d: &Dataset) -> Result<Dataset, IngestError> {
    perturb_general_position(&scale_unit(d)?, DEFAULT_PERTURBATION)
}

/// Deterministic synthetic dataset in (0,1], already in general position.
pub fn gen_synthetic(n: usize, dist: Distribution, seed: u64) -> Result<Dataset, IngestError> {
    if n < 1 {
        return Err(IngestError::EmptyGenerator);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tuples = Vec::with_capacity(n);
    let mut ids = Vec::with_capacity(n);
    const BAND: f64 = 0.12;
    for i in 0..n {
        let (a1, a2) = match dist {
            Distribution::Uniform => (unit_open(&mut rng), unit_open(&mut rng)),
            Distribution::Correlated => {
                let u = rng.random::<f64>();
                (
                    banded(&mut rng, u, BAND),
                    banded(&mut rng, u, BAND),
                )
            }
            Distribution::Anticorrelated => {
                let u = rng.random::<f64>();
                (
                    banded(&mut rng, u, BAND),
                    banded(&mut rng, 1.0 - u, BAND),
                )
            }
        };
        tuples.push(DataTuple {
            id: TupleId(i as u64),
            a1,
            a2,
        });
        ids.push(format!("t{i}"));
    }
    let raw = Dataset {
        tuples,
        ids,
        provenance: Provenance::Synthetic { n, dist, seed },
        preprocessed: false,
    };
    perturb_general_position(&raw, DEFAULT_PERTURBATION)
}

fn unit_open<R: Rng>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Gaussian band sample around `center`, redrawn until inside the unit
/// range. Plain clamping would pile mass onto the exact boundary values,
/// and identical boundary atoms across independently generated files break
/// the general-position assumption between datasets and query sets. The
/// floor stays well above zero: values arbitrarily close to zero give duals
/// with unbounded slopes, which no (0,1]-scaled real dataset produces.
fn banded<R: Rng>(rng: &mut R, center: f64, band: f64) -> f64 {
    const LO: f64 = 1e-3;
    for _ in 0..200 {
        let v = center + band * gaussian(rng);
        if (LO..=1.0).contains(&v) {
            return v;
        }
    }
    center.clamp(LO, 1.0)
}

/// Box-Muller standard normal.
fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
