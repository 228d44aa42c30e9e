//! Loader for the big-endian idx container used by the MNIST image files.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};
use crate::math::VectorSet;

const IMAGE_MAGIC: u32 = 0x0000_0803;
const LABEL_MAGIC: u32 = 0x0000_0801;

/// Loads an idx3 image file into a `(rows*cols) x N` set with pixel values
/// scaled to `[0, 1]`.
///
/// Header fields are big-endian 32-bit integers; the declared sizes are
/// validated against the actual payload before any bulk allocation.
pub fn load_idx_images(path: &Path) -> Result<VectorSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let expected_payload = file
        .metadata()
        .map_err(|e| Error::io(path, e))?
        .len()
        .saturating_sub(16);
    let mut reader = BufReader::new(file);

    let magic = read_u32_be(&mut reader, path)?;
    if magic != IMAGE_MAGIC {
        return Err(Error::format(
            path,
            format!("bad idx image magic {magic:#010x}, expected {IMAGE_MAGIC:#010x}"),
        ));
    }
    let count = read_u32_be(&mut reader, path)? as usize;
    let rows = read_u32_be(&mut reader, path)? as usize;
    let cols = read_u32_be(&mut reader, path)? as usize;
    let dim = rows * cols;
    if dim == 0 || count == 0 {
        return Err(Error::format(path, "idx header declares an empty tensor"));
    }
    let declared = dim * count;
    if declared as u64 != expected_payload {
        return Err(Error::format(
            path,
            format!("expected {declared} payload bytes, file holds {expected_payload}"),
        ));
    }

    let mut bytes = vec![0u8; declared];
    reader
        .read_exact(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    let data: Vec<f64> = bytes.iter().map(|&b| f64::from(b) / 255.0).collect();
    VectorSet::from_columns(dim, data)
}

/// Loads an idx1 label file.
pub fn load_idx_labels(path: &Path) -> Result<Vec<u8>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let expected_payload = file
        .metadata()
        .map_err(|e| Error::io(path, e))?
        .len()
        .saturating_sub(8);
    let mut reader = BufReader::new(file);
    let magic = read_u32_be(&mut reader, path)?;
    if magic != LABEL_MAGIC {
        return Err(Error::format(
            path,
            format!("bad idx label magic {magic:#010x}, expected {LABEL_MAGIC:#010x}"),
        ));
    }
    let count = read_u32_be(&mut reader, path)? as usize;
    if count as u64 != expected_payload {
        return Err(Error::format(
            path,
            format!("expected {count} label bytes, file holds {expected_payload}"),
        ));
    }
    let mut labels = vec![0u8; count];
    reader
        .read_exact(&mut labels)
        .map_err(|e| Error::io(path, e))?;
    Ok(labels)
}

fn read_u32_be(reader: &mut impl Read, path: &Path) -> Result<u32> {
    let mut buf = [0u8; 4];
    reader
        .read_exact(&mut buf)
        .map_err(|_| Error::format(path, "truncated header"))?;
    Ok(u32::from_be_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_idx3(path: &Path, count: u32, rows: u32, cols: u32, payload: &[u8]) {
        let mut f = File::create(path).unwrap();
        f.write_all(&IMAGE_MAGIC.to_be_bytes()).unwrap();
        f.write_all(&count.to_be_bytes()).unwrap();
        f.write_all(&rows.to_be_bytes()).unwrap();
        f.write_all(&cols.to_be_bytes()).unwrap();
        f.write_all(payload).unwrap();
    }

    #[test]
    fn roundtrip_and_scaling() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.idx3");
        write_idx3(&path, 2, 2, 2, &[0, 255, 128, 64, 1, 2, 3, 4]);
        let set = load_idx_images(&path).unwrap();
        assert_eq!(set.dim(), 4);
        assert_eq!(set.len(), 2);
        assert_eq!(set.col(0)[0], 0.0);
        assert_eq!(set.col(0)[1], 1.0);
        assert!((set.col(0)[2] - 128.0 / 255.0).abs() < 1e-15);
    }

    #[test]
    fn truncation_names_byte_counts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("short.idx3");
        write_idx3(&path, 3, 2, 2, &[0u8; 7]); // needs 12 bytes
        let err = load_idx_images(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("12") && msg.contains('7'), "unhelpful: {msg}");
    }

    #[test]
    fn bad_magic_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.idx3");
        let mut f = File::create(&path).unwrap();
        f.write_all(&0xdead_beefu32.to_be_bytes()).unwrap();
        f.write_all(&[0u8; 12]).unwrap();
        assert!(matches!(
            load_idx_images(&path),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn labels_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.idx1");
        let mut f = File::create(&path).unwrap();
        f.write_all(&LABEL_MAGIC.to_be_bytes()).unwrap();
        f.write_all(&3u32.to_be_bytes()).unwrap();
        f.write_all(&[7, 1, 9]).unwrap();
        drop(f);
        assert_eq!(load_idx_labels(&path).unwrap(), vec![7, 1, 9]);
    }
}
