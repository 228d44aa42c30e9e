//! File-level model persistence across all codec families.
//!
//! Ternary models use the `MLSTC1` container (see [`crate::codec::io`]);
//! the binary baselines use the same little-endian layout under their own
//! magic strings:
//!
//! ```text
//! "PCAH1" | n: u32 | k: u32 | mean (n f64) | projector (k*n f64) | beta (k f64)
//! "LSH1"  | n: u32 | k: u32 | mean (n f64) | projector (k*n f64)
//!         | decoder (n*k f64) | global_beta: f64
//! "BINC1" | n_vectors: u32 | k: u32 | n_vectors * k sign bytes
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::baselines::{LshModel, PcaHashModel};
use crate::codec::io::{self, expect_magic, read_f64, read_f64s, read_u32, write_f64s, MODEL_MAGIC};
use crate::codec::{MLModel, TernaryCode};
use crate::error::{Error, Result};
use crate::math::Mat;

pub const PCA_MAGIC: &[u8; 5] = b"PCAH1";
pub const LSH_MAGIC: &[u8; 4] = b"LSH1";
pub const BINARY_CODES_MAGIC: &[u8; 5] = b"BINC1";

/// Any trained model the tools can persist.
#[derive(Debug, Clone)]
pub enum ModelFile {
    Stc(MLModel),
    Pca(PcaHashModel),
    Lsh(LshModel),
}

impl ModelFile {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelFile::Stc(_) => "ml-stc",
            ModelFile::Pca(_) => "pca-hash",
            ModelFile::Lsh(_) => "lsh",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelFile::Stc(m) => m.dim(),
            ModelFile::Pca(m) => m.dim(),
            ModelFile::Lsh(m) => m.dim(),
        }
    }
}

/// Writes any model to a path, picking the container from its family.
pub fn save_model(path: &Path, model: &ModelFile) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let res = match model {
        ModelFile::Stc(m) => io::write_ml_model(m, &mut w),
        ModelFile::Pca(m) => write_pca(m, &mut w),
        ModelFile::Lsh(m) => write_lsh(m, &mut w),
    };
    res.and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Reads any model, sniffing the magic string.
pub fn load_model(path: &Path) -> Result<ModelFile> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)
        .map_err(|_| Error::format(path, "file too short for a model magic"))?;

    let with_path = |e: Error| match e {
        Error::Format { reason, .. } => Error::format(path, reason),
        other => other,
    };

    if &magic == MODEL_MAGIC {
        return read_model_body(&mut r).map(ModelFile::Stc).map_err(with_path);
    }
    if &magic[..5] == PCA_MAGIC {
        // One byte of the body was consumed by the 6-byte sniff.
        let first = magic[5];
        return read_pca_body(&mut Prepend::new(first, r))
            .map(ModelFile::Pca)
            .map_err(with_path);
    }
    if &magic[..4] == LSH_MAGIC {
        let rest: [u8; 2] = [magic[4], magic[5]];
        return read_lsh_body(&mut PrependSlice::new(&rest, r))
            .map(ModelFile::Lsh)
            .map_err(with_path);
    }
    Err(Error::format(
        path,
        format!("unknown model magic {:?}", String::from_utf8_lossy(&magic)),
    ))
}

fn read_model_body(r: &mut impl Read) -> Result<MLModel> {
    // Magic already consumed; re-parse the remainder of the MLSTC1 layout.
    let n = read_u32(r)? as usize;
    let layer_count = read_u32(r)? as usize;
    if n == 0 || layer_count == 0 {
        return Err(io::corrupt("model header declares an empty model"));
    }
    let mut layers = Vec::with_capacity(layer_count);
    let mut mean = read_f64s(r, n)?;
    for _ in 0..layer_count {
        let a = Mat::from_vec(n, n, read_f64s(r, n * n)?)?;
        let lambda = read_f64(r)?;
        let beta = read_f64s(r, n)?;
        let sigma = read_f64s(r, n)?;
        let alpha = read_f64s(r, n)?;
        layers.push(crate::codec::LayerParams::new(
            a, mean, lambda, beta, sigma, alpha,
        )?);
        mean = vec![0.0; n];
    }
    MLModel::from_layers(layers)
}

fn write_pca(m: &PcaHashModel, w: &mut impl Write) -> std::io::Result<()> {
    w.write_all(PCA_MAGIC)?;
    w.write_all(&(m.dim() as u32).to_le_bytes())?;
    w.write_all(&(m.bits() as u32).to_le_bytes())?;
    write_f64s(w, m.mean())?;
    write_f64s(w, m.projector().as_slice())?;
    write_f64s(w, m.beta())
}

fn read_pca_body(r: &mut impl Read) -> Result<PcaHashModel> {
    let n = read_u32(r)? as usize;
    let k = read_u32(r)? as usize;
    let mean = read_f64s(r, n)?;
    let projector = Mat::from_vec(k, n, read_f64s(r, k * n)?)?;
    let beta = read_f64s(r, k)?;
    PcaHashModel::from_parts(mean, projector, beta)
}

fn write_lsh(m: &LshModel, w: &mut impl Write) -> std::io::Result<()> {
    w.write_all(LSH_MAGIC)?;
    w.write_all(&(m.dim() as u32).to_le_bytes())?;
    w.write_all(&(m.bits() as u32).to_le_bytes())?;
    write_f64s(w, m.mean())?;
    write_f64s(w, m.projector().as_slice())?;
    write_f64s(w, m.decoder().as_slice())?;
    w.write_all(&m.global_beta().to_le_bytes())
}

fn read_lsh_body(r: &mut impl Read) -> Result<LshModel> {
    let n = read_u32(r)? as usize;
    let k = read_u32(r)? as usize;
    let mean = read_f64s(r, n)?;
    let projector = Mat::from_vec(k, n, read_f64s(r, k * n)?)?;
    let decoder = Mat::from_vec(n, k, read_f64s(r, n * k)?)?;
    let global_beta = read_f64(r)?;
    LshModel::from_parts(mean, projector, decoder, global_beta)
}

/// Persists ternary code stacks.
pub fn save_ternary_codes(path: &Path, codes: &[Vec<TernaryCode>]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    io::write_code_set(codes, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn load_ternary_codes(path: &Path) -> Result<Vec<Vec<TernaryCode>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    io::read_code_set(&mut r).map_err(|e| match e {
        Error::Format { reason, .. } => Error::format(path, reason),
        other => other,
    })
}

/// Persists dense sign codes from the binary baselines.
pub fn save_binary_codes(path: &Path, codes: &[Vec<i8>]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let k = codes.first().map_or(0, Vec::len);
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(BINARY_CODES_MAGIC)?;
        w.write_all(&(codes.len() as u32).to_le_bytes())?;
        w.write_all(&(k as u32).to_le_bytes())?;
        for code in codes {
            let bytes: Vec<u8> = code.iter().map(|&s| s as u8).collect();
            w.write_all(&bytes)?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| Error::io(path, e))
}

pub fn load_binary_codes(path: &Path) -> Result<Vec<Vec<i8>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    expect_magic(&mut r, BINARY_CODES_MAGIC)
        .map_err(|_| Error::format(path, "not a binary code file"))?;
    let vectors = read_u32(&mut r)? as usize;
    let k = read_u32(&mut r)? as usize;
    let mut out = Vec::with_capacity(vectors);
    let mut buf = vec![0u8; k];
    for i in 0..vectors {
        r.read_exact(&mut buf)
            .map_err(|_| Error::format(path, format!("truncated at code {i}")))?;
        out.push(buf.iter().map(|&b| b as i8).collect());
    }
    Ok(out)
}

struct Prepend<R> {
    first: Option<u8>,
    inner: R,
}

impl<R: Read> Prepend<R> {
    fn new(first: u8, inner: R) -> Self {
        Prepend {
            first: Some(first),
            inner,
        }
    }
}

impl<R: Read> Read for Prepend<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        if buf.is_empty() {
            return Ok(0);
        }
        if let Some(b) = self.first.take() {
            buf[0] = b;
            let n = self.inner.read(&mut buf[1..])?;
            return Ok(n + 1);
        }
        self.inner.read(buf)
    }
}

struct PrependSlice<R> {
    bytes: Vec<u8>,
    pos: usize,
    inner: R,
}

impl<R: Read> PrependSlice<R> {
    fn new(bytes: &[u8], inner: R) -> Self {
        PrependSlice {
            bytes: bytes.to_vec(),
            pos: 0,
            inner,
        }
    }
}

impl<R: Read> Read for PrependSlice<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        if self.pos < self.bytes.len() {
            let take = (self.bytes.len() - self.pos).min(buf.len());
            buf[..take].copy_from_slice(&self.bytes[self.pos..self.pos + take]);
            self.pos += take;
            return Ok(take);
        }
        self.inner.read(buf)
    }
}
