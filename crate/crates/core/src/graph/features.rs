//! Node feature storage and the flat binary matrix format.
//!
//! Binary layout: `rows: u32 LE`, `cols: u32 LE`, then `rows * cols`
//! little-endian `f32` values in row-major order.

use std::borrow::Cow;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Mixes a base seed with a stream index (splitmix64 finalizer).
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-node feature rows, either materialized or generated on demand.
#[derive(Clone, Debug, PartialEq)]
pub enum Features {
    Dense { data: Vec<f32>, feature_len: usize },
    /// Uniform `[0, 1)` values derived from `(seed, node)`; nothing stored.
    Seeded { seed: u64, feature_len: usize },
}

impl Features {
    pub fn feature_len(&self) -> usize {
        match self {
            Features::Dense { feature_len, .. } | Features::Seeded { feature_len, .. } => *feature_len,
        }
    }

    pub fn row(&self, node: usize) -> Cow<'_, [f32]> {
        match self {
            Features::Dense { data, feature_len } => {
                Cow::Borrowed(&data[node * feature_len..(node + 1) * feature_len])
            }
            Features::Seeded { seed, feature_len } => Cow::Owned(seeded_row(*seed, node, *feature_len)),
        }
    }

    /// Materializes `node_count` rows.
    pub fn to_dense(&self, node_count: usize) -> Features {
        match self {
            Features::Dense { .. } => self.clone(),
            Features::Seeded { seed, feature_len } => {
                let mut data = Vec::with_capacity(node_count * feature_len);
                for n in 0..node_count {
                    data.extend(seeded_row(*seed, n, *feature_len));
                }
                Features::Dense { data, feature_len: *feature_len }
            }
        }
    }

    pub(crate) fn stored_bytes(&self) -> usize {
        match self {
            Features::Dense { data, .. } => data.len() * 4,
            Features::Seeded { .. } => 0,
        }
    }
}

fn seeded_row(seed: u64, node: usize, len: usize) -> Vec<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, node as u64));
    (0..len).map(|_| rng.random::<f32>()).collect()
}

/// A row-major `f32` matrix as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct F32Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f32>,
}

pub fn read_f32_matrix<R: Read>(mut r: R) -> Result<F32Matrix> {
    let mut header = [0u8; 8];
    r.read_exact(&mut header)?;
    let rows = u32::from_le_bytes(header[0..4].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let len = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::Shape(format!("matrix {rows}x{cols} overflows")))?;
    let mut bytes = vec![0u8; len * 4];
    r.read_exact(&mut bytes)
        .map_err(|e| Error::Shape(format!("matrix body shorter than {rows}x{cols}: {e}")))?;
    let data = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(F32Matrix { rows, cols, data })
}

pub fn write_f32_matrix<W: Write>(mut w: W, m: &F32Matrix) -> Result<()> {
    if m.data.len() != m.rows * m.cols {
        return Err(Error::Shape(format!(
            "matrix {}x{} holds {} values",
            m.rows,
            m.cols,
            m.data.len()
        )));
    }
    let rows = u32::try_from(m.rows).map_err(|_| Error::Shape("row count exceeds u32".into()))?;
    let cols = u32::try_from(m.cols).map_err(|_| Error::Shape("column count exceeds u32".into()))?;
    w.write_all(&rows.to_le_bytes())?;
    w.write_all(&cols.to_le_bytes())?;
    for v in &m.data {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}
