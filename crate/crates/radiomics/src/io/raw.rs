//! Raw voxel arrays described by a small text header.
//!
//! ```text
//! dims = 64 64 32
//! spacing = 1 1 2.5
//! origin = 0 0 0
//! dtype = int16
//! byte_order = little
//! data = volume.raw
//! ```
//!
//! `dtype` is one of uint8, int16, float32 or float64; `byte_order` defaults to
//! little; `data` is relative to the header. Voxels are stored x fastest.

use std::path::Path;

use crate::error::{Error, Result};
use crate::io::LoadedVolume;
use crate::volume::{GridGeometry, ImageVolume};

/// Voxel encodings of raw arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawDatatype {
    Uint8,
    Int16,
    Float32,
    Float64,
}

impl RawDatatype {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "uint8" => Ok(RawDatatype::Uint8),
            "int16" => Ok(RawDatatype::Int16),
            "float32" => Ok(RawDatatype::Float32),
            "float64" => Ok(RawDatatype::Float64),
            other => Err(Error::UnsupportedDatatype(format!(
                "raw dtype '{other}'; supported are uint8, int16, float32 and float64"
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            RawDatatype::Uint8 => "uint8",
            RawDatatype::Int16 => "int16",
            RawDatatype::Float32 => "float32",
            RawDatatype::Float64 => "float64",
        }
    }

    fn size(self) -> usize {
        match self {
            RawDatatype::Uint8 => 1,
            RawDatatype::Int16 => 2,
            RawDatatype::Float32 => 4,
            RawDatatype::Float64 => 8,
        }
    }
}

/// Parsed header fields.
#[derive(Debug, Clone, PartialEq)]
pub struct RawHeader {
    pub geometry: GridGeometry,
    pub dtype: RawDatatype,
    pub big_endian: bool,
    pub data: String,
}

fn numbers<T: std::str::FromStr>(key: &str, v: &str) -> Result<[T; 3]> {
    let parts: Vec<T> = v
        .split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| Error::Format(format!("raw header {key}: cannot parse '{t}'"))))
        .collect::<Result<_>>()?;
    parts.try_into().map_err(|_| Error::Format(format!("raw header {key}: expected three values")))
}

pub fn parse_raw_header(text: &str) -> Result<RawHeader> {
    let (mut dims, mut spacing, mut origin, mut dtype, mut data) = (None, None, Some([0.0; 3]), None, None);
    let mut big_endian = false;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("raw header line without '=': {line}")))?;
        let (k, v) = (k.trim(), v.trim());
        match k {
            "dims" => dims = Some(numbers::<usize>(k, v)?),
            "spacing" => spacing = Some(numbers::<f64>(k, v)?),
            "origin" => origin = Some(numbers::<f64>(k, v)?),
            "dtype" => dtype = Some(RawDatatype::parse(v)?),
            "byte_order" => {
                big_endian = match v {
                    "little" => false,
                    "big" => true,
                    other => return Err(Error::Format(format!("raw header byte_order '{other}'"))),
                }
            }
            "data" => data = Some(v.to_string()),
            other => return Err(Error::Format(format!("raw header key '{other}' is not recognised"))),
        }
    }
    let missing = |k: &str| Error::Format(format!("raw header lacks '{k}'"));
    let geometry = GridGeometry::new(
        dims.ok_or_else(|| missing("dims"))?,
        spacing.ok_or_else(|| missing("spacing"))?,
        origin.unwrap_or_default(),
    )?;
    Ok(RawHeader { geometry, dtype: dtype.ok_or_else(|| missing("dtype"))?, big_endian, data: data.ok_or_else(|| missing("data"))? })
}

/// Decodes a raw payload described by `h`.
pub fn decode_raw(h: &RawHeader, bytes: &[u8]) -> Result<LoadedVolume> {
    let n = h.geometry.len();
    let expected = n * h.dtype.size();
    if bytes.len() < expected {
        return Err(Error::Truncated { expected, found: bytes.len() });
    }
    if bytes.len() > expected {
        return Err(Error::Mismatch(format!(
            "raw payload holds {} bytes but dims {:?} need {expected}",
            bytes.len(),
            h.geometry.dims
        )));
    }
    let be = h.big_endian;
    let data: Vec<f64> = match h.dtype {
        RawDatatype::Uint8 => bytes.iter().map(|&v| f64::from(v)).collect(),
        RawDatatype::Int16 => bytes
            .chunks_exact(2)
            .map(|c| {
                let a = [c[0], c[1]];
                f64::from(if be { i16::from_be_bytes(a) } else { i16::from_le_bytes(a) })
            })
            .collect(),
        RawDatatype::Float32 => bytes
            .chunks_exact(4)
            .map(|c| {
                let a = [c[0], c[1], c[2], c[3]];
                f64::from(if be { f32::from_be_bytes(a) } else { f32::from_le_bytes(a) })
            })
            .collect(),
        RawDatatype::Float64 => bytes
            .chunks_exact(8)
            .map(|c| {
                let a: [u8; 8] = c.try_into().expect("chunk of 8");
                if be { f64::from_be_bytes(a) } else { f64::from_le_bytes(a) }
            })
            .collect(),
    };
    let integer = matches!(h.dtype, RawDatatype::Uint8 | RawDatatype::Int16);
    Ok(LoadedVolume { image: ImageVolume::new(h.geometry, data)?, integer })
}

pub fn read_raw(header_path: &Path) -> Result<LoadedVolume> {
    let text = std::fs::read_to_string(header_path).map_err(|e| Error::io(header_path, e))?;
    let h = parse_raw_header(&text)?;
    let data_path = header_path.parent().unwrap_or(Path::new(".")).join(&h.data);
    let bytes = std::fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    decode_raw(&h, &bytes)
}

/// Writes a little-endian float64 or int16 array and its header; the payload
/// goes next to the header with a `.raw` extension.
pub fn write_raw(header_path: &Path, img: &ImageVolume, dtype: RawDatatype) -> Result<()> {
    let data_path = header_path.with_extension("raw");
    let g = &img.geometry;
    let join = |v: [f64; 3]| v.map(|x| x.to_string()).join(" ");
    let header = format!(
        "dims = {} {} {}\nspacing = {}\norigin = {}\ndtype = {}\nbyte_order = little\ndata = {}\n",
        g.dims[0],
        g.dims[1],
        g.dims[2],
        join(g.spacing),
        join(g.origin),
        dtype.name(),
        data_path.file_name().and_then(|s| s.to_str()).unwrap_or("volume.raw"),
    );
    let mut bytes = Vec::with_capacity(img.data.len() * dtype.size());
    for &v in &img.data {
        match dtype {
            RawDatatype::Uint8 => bytes.push(v.round().clamp(0.0, 255.0) as u8),
            RawDatatype::Int16 => bytes.extend((v.round().clamp(-32768.0, 32767.0) as i16).to_le_bytes()),
            RawDatatype::Float32 => bytes.extend((v as f32).to_le_bytes()),
            RawDatatype::Float64 => bytes.extend(v.to_le_bytes()),
        }
    }
    std::fs::write(header_path, header).map_err(|e| Error::io(header_path, e))?;
    std::fs::write(&data_path, bytes).map_err(|e| Error::io(&data_path, e))
}
