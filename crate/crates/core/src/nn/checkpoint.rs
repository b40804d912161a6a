//! Layout: 8-byte magic, `u32` version, `u64` header length, JSON header,
//! then every tensor's values as little-endian `f64` in header order.

use std::io::{Read, Write};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::ParamSet;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"VMAPCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a checkpoint file")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
}

#[derive(Serialize, Deserialize)]
struct Header {
    meta: serde_json::Value,
    tensors: Vec<TensorEntry>,
}

#[derive(Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: (usize, usize),
}

pub fn write_checkpoint(out: &mut impl Write, meta: &serde_json::Value, params: &ParamSet) -> std::io::Result<()> {
    let header = Header {
        meta: meta.clone(),
        tensors: params
            .names()
            .iter()
            .zip(params.tensors())
            .map(|(name, t)| TensorEntry {
                name: name.clone(),
                shape: t.shape(),
            })
            .collect(),
    };
    let json = serde_json::to_vec(&header).map_err(std::io::Error::other)?;
    out.write_all(CHECKPOINT_MAGIC)?;
    out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    out.write_all(&(json.len() as u64).to_le_bytes())?;
    out.write_all(&json)?;
    let mut buf = Vec::with_capacity(params.num_scalars() * 8);
    for t in params.tensors() {
        for v in t.data.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    out.write_all(&buf)
}

pub fn read_checkpoint(input: &mut impl Read) -> Result<(serde_json::Value, ParamSet), CheckpointError> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).map_err(|_| CheckpointError::BadMagic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != CHECKPOINT_VERSION {
        return Err(CheckpointError::Version(version));
    }
    let mut len = [0u8; 8];
    input.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len) as usize;
    if len > 64 << 20 {
        return Err(CheckpointError::Corrupt(format!("header length {len}")));
    }
    let mut json = vec![0u8; len];
    input.read_exact(&mut json)?;
    let header: Header = serde_json::from_slice(&json).map_err(|e| CheckpointError::Corrupt(e.to_string()))?;

    let mut params = ParamSet::new();
    for entry in header.tensors {
        let (r, c) = entry.shape;
        let mut raw = vec![0u8; r * c * 8];
        input
            .read_exact(&mut raw)
            .map_err(|_| CheckpointError::Corrupt(format!("truncated tensor `{}`", entry.name)))?;
        let values: Vec<f64> = raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
        let data = Array2::from_shape_vec((r, c), values).map_err(|e| CheckpointError::Corrupt(e.to_string()))?;
        if params.id(&entry.name).is_some() {
            return Err(CheckpointError::Corrupt(format!("duplicate tensor `{}`", entry.name)));
        }
        params.add(entry.name, data);
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(CheckpointError::Corrupt("trailing bytes".into()));
    }
    Ok((header.meta, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn round_trip_is_exact() {
        let mut p = ParamSet::new();
        p.add("a", array![[1.0, -0.0, f64::MIN_POSITIVE]]);
        p.add("b", array![[std::f64::consts::PI], [1e300]]);
        let meta = serde_json::json!({"hidden": 3, "z": [1, 2]});
        let mut bytes = Vec::new();
        write_checkpoint(&mut bytes, &meta, &p).unwrap();
        let (m2, p2) = read_checkpoint(&mut bytes.as_slice()).unwrap();
        assert_eq!(m2, meta);
        assert_eq!(p2.names(), p.names());
        for (x, y) in p.tensors().iter().zip(p2.tensors()) {
            let bx: Vec<u64> = x.data.iter().map(|v| v.to_bits()).collect();
            let by: Vec<u64> = y.data.iter().map(|v| v.to_bits()).collect();
            assert_eq!(bx, by);
        }
        let mut again = Vec::new();
        write_checkpoint(&mut again, &m2, &p2).unwrap();
        assert_eq!(again, bytes);
    }

    #[test]
    fn rejects_damaged_files() {
        let mut p = ParamSet::new();
        p.add("a", array![[1.0, 2.0]]);
        let mut bytes = Vec::new();
        write_checkpoint(&mut bytes, &serde_json::Value::Null, &p).unwrap();
        assert!(matches!(read_checkpoint(&mut &b"nonsense"[..]), Err(CheckpointError::BadMagic)));
        let truncated = &bytes[..bytes.len() - 3];
        assert!(matches!(read_checkpoint(&mut &truncated[..]), Err(CheckpointError::Corrupt(_))));
        let mut bad_version = bytes.clone();
        bad_version[8] = 7;
        assert!(matches!(read_checkpoint(&mut bad_version.as_slice()), Err(CheckpointError::Version(7))));
    }
}
