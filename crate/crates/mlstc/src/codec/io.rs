//! Binary containers for trained models and code sets.
//!
//! All integers and floats are little-endian. The model layout is:
//!
//! ```text
//! magic "MLSTC1" | n: u32 | L: u32
//! layer 1:   mean (n f64) | A (n*n f64, row-major) | lambda f64
//!            | beta (n f64) | sigma (n f64) | alpha (n f64)
//! layer 2..: A | lambda | beta | sigma | alpha
//! ```
//!
//! Codes serialize per record as `(layer_id: u32, count: u32,
//! count x (index: u32, sign: i8))`; a code-set file prefixes the records
//! with `magic "MLSTCC" | n_vectors: u32 | layers_per_vector: u32`.

use std::io::{Read, Write};

use crate::codec::{LayerParams, MLModel, TernaryCode};
use crate::error::{Error, Result};
use crate::math::Mat;

pub const MODEL_MAGIC: &[u8; 6] = b"MLSTC1";
pub const CODES_MAGIC: &[u8; 6] = b"MLSTCC";

pub fn write_ml_model(model: &MLModel, w: &mut impl Write) -> std::io::Result<()> {
    w.write_all(MODEL_MAGIC)?;
    w.write_all(&(model.dim() as u32).to_le_bytes())?;
    w.write_all(&(model.num_layers() as u32).to_le_bytes())?;
    for (l, layer) in model.layers().iter().enumerate() {
        if l == 0 {
            write_f64s(w, layer.mean())?;
        }
        write_f64s(w, layer.projection().as_slice())?;
        w.write_all(&layer.lambda().to_le_bytes())?;
        write_f64s(w, layer.beta())?;
        write_f64s(w, layer.sigma())?;
        write_f64s(w, layer.alpha())?;
    }
    Ok(())
}

pub fn read_ml_model(r: &mut impl Read) -> Result<MLModel> {
    expect_magic(r, MODEL_MAGIC)?;
    let n = read_u32(r)? as usize;
    let layer_count = read_u32(r)? as usize;
    if n == 0 || layer_count == 0 {
        return Err(corrupt("model header declares an empty model"));
    }
    let mut layers = Vec::with_capacity(layer_count);
    let mut mean = read_f64s(r, n)?;
    for _ in 0..layer_count {
        let a = Mat::from_vec(n, n, read_f64s(r, n * n)?)?;
        let lambda = read_f64(r)?;
        let beta = read_f64s(r, n)?;
        let sigma = read_f64s(r, n)?;
        let alpha = read_f64s(r, n)?;
        layers.push(LayerParams::new(a, mean, lambda, beta, sigma, alpha)?);
        mean = vec![0.0; n];
    }
    MLModel::from_layers(layers)
}

pub fn write_code(code: &TernaryCode, w: &mut impl Write) -> std::io::Result<()> {
    w.write_all(&code.layer_id().to_le_bytes())?;
    w.write_all(&(code.weight() as u32).to_le_bytes())?;
    for &(idx, sign) in code.support() {
        w.write_all(&idx.to_le_bytes())?;
        w.write_all(&sign.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_code(r: &mut impl Read) -> Result<TernaryCode> {
    let layer_id = read_u32(r)?;
    let count = read_u32(r)? as usize;
    let mut support = Vec::with_capacity(count);
    for _ in 0..count {
        let idx = read_u32(r)?;
        let mut sign = [0u8; 1];
        r.read_exact(&mut sign).map_err(|_| corrupt("truncated code record"))?;
        support.push((idx, sign[0] as i8));
    }
    TernaryCode::new(layer_id, support)
}

/// Writes the per-vector code stacks produced by [`MLModel::encode_set`].
pub fn write_code_set(codes: &[Vec<TernaryCode>], w: &mut impl Write) -> std::io::Result<()> {
    let layers = codes.first().map_or(0, Vec::len);
    w.write_all(CODES_MAGIC)?;
    w.write_all(&(codes.len() as u32).to_le_bytes())?;
    w.write_all(&(layers as u32).to_le_bytes())?;
    for stack in codes {
        for code in stack {
            write_code(code, w)?;
        }
    }
    Ok(())
}

pub fn read_code_set(r: &mut impl Read) -> Result<Vec<Vec<TernaryCode>>> {
    expect_magic(r, CODES_MAGIC)?;
    let vectors = read_u32(r)? as usize;
    let layers = read_u32(r)? as usize;
    let mut out = Vec::with_capacity(vectors);
    for _ in 0..vectors {
        let mut stack = Vec::with_capacity(layers);
        for _ in 0..layers {
            stack.push(read_code(r)?);
        }
        out.push(stack);
    }
    Ok(out)
}

pub(crate) fn write_f64s(w: &mut impl Write, values: &[f64]) -> std::io::Result<()> {
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub(crate) fn read_f64s(r: &mut impl Read, count: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; count * 8];
    r.read_exact(&mut buf).map_err(|_| corrupt("truncated float block"))?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub(crate) fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf).map_err(|_| corrupt("truncated float"))?;
    Ok(f64::from_le_bytes(buf))
}

pub(crate) fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(|_| corrupt("truncated integer"))?;
    Ok(u32::from_le_bytes(buf))
}

pub(crate) fn expect_magic(r: &mut impl Read, magic: &[u8]) -> Result<()> {
    let mut buf = vec![0u8; magic.len()];
    r.read_exact(&mut buf).map_err(|_| corrupt("missing magic"))?;
    if buf != magic {
        return Err(corrupt(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&buf),
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

pub(crate) fn corrupt(reason: impl Into<String>) -> Error {
    Error::Format {
        path: "<stream>".into(),
        reason: reason.into(),
    }
}
