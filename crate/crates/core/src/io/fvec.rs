//! FVEC: dense float feature matrices exchanged between pipeline stages.
//!
//! ```text
//! "FVEC1\n"              6 bytes
//! count                  u32 little-endian
//! dim                    u32 little-endian
//! payload                count * dim f32 little-endian, row-major
//! footer                 UTF-8 JSON {"ids": [...], "source": "..."} to EOF
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureSource, FeatureTable};

pub const MAGIC: &[u8; 6] = b"FVEC1\n";
pub const HEADER_LEN: usize = 14;

#[derive(Serialize, Deserialize)]
struct Footer {
    ids: Vec<String>,
    source: FeatureSource,
}

/// Checks that `count · dim` fits the 32-bit header fields.
pub fn check_extent(count: usize, dim: usize) -> Result<(u32, u32)> {
    let count32 = u32::try_from(count)
        .map_err(|_| Error::Range(format!("count {count} does not fit in 32 bits")))?;
    let dim32 =
        u32::try_from(dim).map_err(|_| Error::Range(format!("dim {dim} does not fit in 32 bits")))?;
    if count32.checked_mul(dim32).is_none() {
        return Err(Error::Range(format!(
            "count * dim = {count} * {dim} overflows 32 bits"
        )));
    }
    Ok((count32, dim32))
}

/// Serializes `table`; values are rounded to `f32`.
pub fn encode_fvec(table: &FeatureTable) -> Result<Vec<u8>> {
    let (count, dim) = check_extent(table.len(), table.dim())?;
    let footer = serde_json::to_vec(&Footer {
        ids: table.ids().to_vec(),
        source: table.source().clone(),
    })
    .map_err(|e| Error::Value(format!("footer: {e}")))?;
    let payload = 4 * table.len() * table.dim();
    let mut out = Vec::with_capacity(HEADER_LEN + payload + footer.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&count.to_le_bytes());
    out.extend_from_slice(&dim.to_le_bytes());
    for (id, row) in table.ids().iter().zip(table.rows()) {
        for (j, &v) in row.iter().enumerate() {
            let f = v as f32;
            if !f.is_finite() {
                return Err(Error::Value(format!(
                    "sample {id:?} feature {j} ({v}) is not representable as a finite f32"
                )));
            }
            out.extend_from_slice(&f.to_le_bytes());
        }
    }
    out.extend_from_slice(&footer);
    Ok(out)
}

pub fn decode_fvec(bytes: &[u8]) -> Result<FeatureTable> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "truncated header: expected {HEADER_LEN} bytes, got {}",
            bytes.len()
        )));
    }
    if &bytes[..6] != MAGIC {
        return Err(Error::Format("bad magic, not an FVEC1 file".into()));
    }
    let count = u32::from_le_bytes(bytes[6..10].try_into().expect("4 bytes")) as usize;
    let dim = u32::from_le_bytes(bytes[10..14].try_into().expect("4 bytes")) as usize;
    check_extent(count, dim)?;
    let payload = 4 * count * dim;
    let available = bytes.len() - HEADER_LEN;
    if available < payload {
        return Err(Error::Format(format!(
            "truncated payload: expected {payload} bytes, got {available}"
        )));
    }
    let footer: Footer = serde_json::from_slice(&bytes[HEADER_LEN + payload..])
        .map_err(|e| Error::Format(format!("footer: {e}")))?;
    if footer.ids.len() != count {
        return Err(Error::Format(format!(
            "footer lists {} ids for {count} vectors",
            footer.ids.len()
        )));
    }
    let mut floats = bytes[HEADER_LEN..HEADER_LEN + payload]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")));
    let rows: Vec<Vec<f64>> = (0..count)
        .map(|_| floats.by_ref().take(dim).map(f64::from).collect())
        .collect();
    FeatureTable::new(footer.source, dim, footer.ids, rows).map_err(|e| match e {
        Error::Value(msg) | Error::Parse(msg) => Error::Format(msg),
        other => other,
    })
}

/// Writes `table` to `path`, returning the number of bytes written.
pub fn write_fvec(table: &FeatureTable, path: impl AsRef<Path>) -> Result<u64> {
    let path = path.as_ref();
    let bytes = encode_fvec(table)?;
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    Ok(bytes.len() as u64)
}

pub fn read_fvec(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_fvec(&bytes)
}
