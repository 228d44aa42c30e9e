//! fvecs descriptor files: each record is a little-endian 32-bit dimension
//! followed by that many little-endian 32-bit floats.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::math::VectorSet;

/// Reads an fvecs file, optionally capped at `max_vectors` records.
///
/// All records must share one dimension; a zero or inconsistent dimension is
/// a format error, as is a trailing partial record.
pub fn load_fvecs(path: &Path, max_vectors: Option<usize>) -> Result<VectorSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let cap = max_vectors.unwrap_or(usize::MAX);

    let mut dim: Option<usize> = None;
    let mut data: Vec<f64> = Vec::new();
    let mut count = 0usize;
    let mut record = Vec::new();

    while count < cap {
        let mut dim_buf = [0u8; 4];
        match reader.read_exact(&mut dim_buf) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(Error::io(path, e)),
        }
        let d = u32::from_le_bytes(dim_buf) as usize;
        if d == 0 {
            return Err(Error::format(path, format!("record {count} declares dimension 0")));
        }
        match dim {
            None => dim = Some(d),
            Some(expected) if expected != d => {
                return Err(Error::format(
                    path,
                    format!("record {count} has dimension {d}, expected {expected}"),
                ));
            }
            _ => {}
        }
        record.resize(d * 4, 0u8);
        reader.read_exact(&mut record).map_err(|_| {
            Error::format(path, format!("record {count} truncated (needs {} bytes)", d * 4))
        })?;
        data.extend(
            record
                .chunks_exact(4)
                .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]]))),
        );
        count += 1;
    }

    let dim = dim.ok_or_else(|| Error::format(path, "file holds no records"))?;
    VectorSet::from_columns(dim, data)
}

/// Writes a vector set as fvecs (values narrowed to f32 per the format).
pub fn write_fvecs(path: &Path, set: &VectorSet) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    let dim = set.dim() as u32;
    for col in set.iter_cols() {
        writer
            .write_all(&dim.to_le_bytes())
            .map_err(|e| Error::io(path, e))?;
        for &v in col {
            writer
                .write_all(&(v as f32).to_le_bytes())
                .map_err(|e| Error::io(path, e))?;
        }
    }
    writer.flush().map_err(|e| Error::io(path, e))
}
