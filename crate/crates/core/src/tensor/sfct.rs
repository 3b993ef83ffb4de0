//! SFCT tensor files: 8-byte magic, u32 LE header length, JSON header, LE payload.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{DenseTensor, TensorError};

pub const MAGIC: &[u8; 8] = b"SFCT0001";
pub const LAYOUT: &str = "row-major-nchw";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    F32,
    F64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Header {
    dtype: Dtype,
    shape: Vec<usize>,
    layout: String,
}

pub fn write_sfct<W: Write>(mut w: W, t: &DenseTensor, dtype: Dtype) -> Result<(), TensorError> {
    let header = Header { dtype, shape: t.shape().to_vec(), layout: LAYOUT.into() };
    let json = serde_json::to_vec(&header).map_err(|e| TensorError::Format(e.to_string()))?;
    w.write_all(MAGIC)?;
    w.write_all(&(json.len() as u32).to_le_bytes())?;
    w.write_all(&json)?;
    let mut buf = Vec::with_capacity(t.data().len() * 8);
    for &v in t.data() {
        match dtype {
            Dtype::F32 => buf.extend_from_slice(&(v as f32).to_le_bytes()),
            Dtype::F64 => buf.extend_from_slice(&v.to_le_bytes()),
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_sfct<R: Read>(mut r: R) -> Result<DenseTensor, TensorError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(TensorError::Format("bad SFCT magic".into()));
    }
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let mut json = vec![0u8; u32::from_le_bytes(len) as usize];
    r.read_exact(&mut json)?;
    let header: Header = serde_json::from_slice(&json).map_err(|e| TensorError::Format(e.to_string()))?;
    if header.layout != LAYOUT {
        return Err(TensorError::Format(format!("unsupported layout {}", header.layout)));
    }
    let shape: [usize; 4] = header
        .shape
        .as_slice()
        .try_into()
        .map_err(|_| TensorError::Format(format!("expected 4-d shape, got {:?}", header.shape)))?;
    let count: usize = shape.iter().product();
    let width = match header.dtype {
        Dtype::F32 => 4,
        Dtype::F64 => 8,
    };
    let mut payload = vec![0u8; count * width];
    r.read_exact(&mut payload)?;
    let data = payload
        .chunks_exact(width)
        .map(|c| match header.dtype {
            Dtype::F32 => f32::from_le_bytes(c.try_into().unwrap()) as f64,
            Dtype::F64 => f64::from_le_bytes(c.try_into().unwrap()),
        })
        .collect();
    DenseTensor::new(shape, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_f64_and_f32() {
        let t = DenseTensor::from_fn([1, 2, 3, 2], |n, c, h, w| (n + 2 * c + 3 * h) as f64 - 0.25 * w as f64);
        let mut buf = Vec::new();
        write_sfct(&mut buf, &t, Dtype::F64).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(read_sfct(&buf[..]).unwrap(), t);
        let mut buf32 = Vec::new();
        write_sfct(&mut buf32, &t, Dtype::F32).unwrap();
        assert_eq!(read_sfct(&buf32[..]).unwrap(), t);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_sfct(&b"NOTSFCT0\0\0\0\0"[..]).is_err());
        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        let h = br#"{"dtype":"f64","shape":[1,1,1,2],"layout":"row-major-nchw"}"#;
        buf.extend_from_slice(&(h.len() as u32).to_le_bytes());
        buf.extend_from_slice(h);
        buf.extend_from_slice(&1.0f64.to_le_bytes());
        assert!(read_sfct(&buf[..]).is_err(), "truncated payload");
    }
}
