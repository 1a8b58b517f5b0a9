//! Versioned binary container for the k-polygon index.
//!
//! Layout, all integers and reals little-endian:
//!   magic "KPGN" | version u32 | k u32 | tau f64 | hull count u64 |
//!   line count u64 | hull vertex records | per hull edge: length-prefixed
//!   concavity records | line table entries (id u64, slope f64, y f64, x f64)
//!
//! A vertex record is x f64, y f64, right ref i64, left ref i64 where the
//! refs are a tuple id or the sentinels -1 (x-axis) and -2 (y-axis).

use std::collections::BTreeMap;
use std::io::{Read, Write};

use thiserror::Error;

use crate::geom::{DualLine, Point, TupleId};

use super::{IndexInvariantError, KPolygonIndex, LineRef, PolygonVertex};

pub const FORMAT_MAGIC: [u8; 4] = *b"KPGN";
pub const FORMAT_VERSION: u32 = 1;

/// Upper bound on any stored count; larger values mean a corrupt stream.
const SANE_COUNT: u64 = 1 << 33;

#[derive(Debug, Error)]
pub enum IndexIoError {
    #[error("truncated index stream")]
    Truncated,
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("unsupported index format version {0}, expected {FORMAT_VERSION}")]
    VersionMismatch(u32),
    #[error("corrupt index stream: {0}")]
    Corrupt(String),
    #[error("index violates a structural invariant: {0}")]
    Invariant(#[from] IndexInvariantError),
    #[error("io: {0}")]
    Io(std::io::Error),
}

impl From<std::io::Error> for IndexIoError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            IndexIoError::Truncated
        } else {
            IndexIoError::Io(e)
        }
    }
}

pub fn serialize_index<W: Write>(idx: &KPolygonIndex, mut w: W) -> std::io::Result<()> {
    w.write_all(&FORMAT_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(idx.k as u32).to_le_bytes())?;
    w.write_all(&idx.tau.to_le_bytes())?;
    w.write_all(&(idx.hull.len() as u64).to_le_bytes())?;
    w.write_all(&(idx.line_table.len() as u64).to_le_bytes())?;
    for v in &idx.hull {
        write_vertex(&mut w, v)?;
    }
    for pocket in &idx.concavities {
        w.write_all(&(pocket.len() as u64).to_le_bytes())?;
        for v in pocket {
            write_vertex(&mut w, v)?;
        }
    }
    for (id, line) in &idx.line_table {
        w.write_all(&id.0.to_le_bytes())?;
        w.write_all(&line.slope.to_le_bytes())?;
        w.write_all(&line.y_intercept.to_le_bytes())?;
        w.write_all(&line.x_intercept.to_le_bytes())?;
    }
    Ok(())
}

pub fn deserialize_index<R: Read>(mut r: R) -> Result<KPolygonIndex, IndexIoError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != FORMAT_MAGIC {
        return Err(IndexIoError::BadMagic);
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(IndexIoError::VersionMismatch(version));
    }
    let k = read_u32(&mut r)? as usize;
    let tau = read_f64(&mut r)?;
    let hull_len = read_count(&mut r, "hull count")?;
    let line_count = read_count(&mut r, "line count")?;
    if hull_len < 2 {
        return Err(IndexInvariantError::HullTooSmall(hull_len).into());
    }

    let mut hull = Vec::with_capacity(hull_len);
    for _ in 0..hull_len {
        hull.push(read_vertex(&mut r)?);
    }
    let mut concavities = Vec::with_capacity(hull_len - 1);
    for _ in 0..hull_len - 1 {
        let len = read_count(&mut r, "concavity length")?;
        let mut pocket = Vec::with_capacity(len);
        for _ in 0..len {
            pocket.push(read_vertex(&mut r)?);
        }
        concavities.push(pocket);
    }
    let mut line_table = BTreeMap::new();
    for _ in 0..line_count {
        let id = TupleId(read_u64(&mut r)?);
        let slope = read_f64(&mut r)?;
        let y_intercept = read_f64(&mut r)?;
        let x_intercept = read_f64(&mut r)?;
        line_table.insert(
            id,
            DualLine {
                slope,
                y_intercept,
                x_intercept,
                source: id,
            },
        );
    }

    let idx = KPolygonIndex {
        k,
        tau,
        hull,
        concavities,
        line_table,
    };
    idx.validate()?;
    Ok(idx)
}

fn write_vertex<W: Write>(w: &mut W, v: &PolygonVertex) -> std::io::Result<()> {
    w.write_all(&v.point.x.to_le_bytes())?;
    w.write_all(&v.point.y.to_le_bytes())?;
    w.write_all(&encode_ref(v.right_line).to_le_bytes())?;
    w.write_all(&encode_ref(v.left_line).to_le_bytes())?;
    Ok(())
}

fn read_vertex<R: Read>(r: &mut R) -> Result<PolygonVertex, IndexIoError> {
    let x = read_f64(r)?;
    let y = read_f64(r)?;
    let right_line = decode_ref(read_i64(r)?)?;
    let left_line = decode_ref(read_i64(r)?)?;
    Ok(PolygonVertex {
        point: Point::new(x, y),
        right_line,
        left_line,
    })
}

fn encode_ref(r: LineRef) -> i64 {
    match r {
        LineRef::XAxis => -1,
        LineRef::YAxis => -2,
        LineRef::Line(id) => id.0 as i64,
    }
}

fn decode_ref(v: i64) -> Result<LineRef, IndexIoError> {
    match v {
        -1 => Ok(LineRef::XAxis),
        -2 => Ok(LineRef::YAxis),
        id if id >= 0 => Ok(LineRef::Line(TupleId(id as u64))),
        bad => Err(IndexIoError::Corrupt(format!("invalid line ref {bad}"))),
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, IndexIoError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, IndexIoError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_i64<R: Read>(r: &mut R) -> Result<i64, IndexIoError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(i64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, IndexIoError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_count<R: Read>(r: &mut R, what: &str) -> Result<usize, IndexIoError> {
    let v = read_u64(r)?;
    if v > SANE_COUNT {
        return Err(IndexIoError::Corrupt(format!("{what} {v} is implausible")));
    }
    Ok(v as usize)
}
