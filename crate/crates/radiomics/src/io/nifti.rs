//! Single-file NIfTI-1 reading and writing.
//!
//! Supports little-endian `n+1` files holding uint8, int16 or float32 voxels,
//! optionally gzip-compressed. Orientation comes from the sform, else the
//! qform, else the voxel sizes alone; it must be axis-aligned without axis
//! permutation. Axes with negative direction are flipped on load.

use std::io::{Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::error::{Error, Result};
use crate::io::LoadedVolume;
use crate::volume::{GridGeometry, ImageVolume};

const HEADER_SIZE: usize = 348;
const DATA_OFFSET: usize = 352;
/// Relative tolerance on off-diagonal affine terms.
const AXIS_TOLERANCE: f64 = 1e-6;

/// Voxel encodings that can be read and written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiftiDatatype {
    Uint8,
    Int16,
    Float32,
}

impl NiftiDatatype {
    fn code(self) -> i16 {
        match self {
            NiftiDatatype::Uint8 => 2,
            NiftiDatatype::Int16 => 4,
            NiftiDatatype::Float32 => 16,
        }
    }

    fn from_code(code: i16) -> Result<Self> {
        match code {
            2 => Ok(NiftiDatatype::Uint8),
            4 => Ok(NiftiDatatype::Int16),
            16 => Ok(NiftiDatatype::Float32),
            other => Err(Error::UnsupportedDatatype(format!(
                "NIfTI datatype code {other}; supported are uint8 (2), int16 (4) and float32 (16)"
            ))),
        }
    }

    fn size(self) -> usize {
        match self {
            NiftiDatatype::Uint8 => 1,
            NiftiDatatype::Int16 => 2,
            NiftiDatatype::Float32 => 4,
        }
    }

    fn is_integer(self) -> bool {
        self != NiftiDatatype::Float32
    }
}

fn i16_at(b: &[u8], off: usize) -> i16 {
    i16::from_le_bytes([b[off], b[off + 1]])
}

fn f32_at(b: &[u8], off: usize) -> f64 {
    f64::from(f32::from_le_bytes([b[off], b[off + 1], b[off + 2], b[off + 3]]))
}

/// World affine rows `[R | t]` from the header.
fn affine(h: &[u8]) -> [[f64; 4]; 3] {
    let pixdim: Vec<f64> = (0..8).map(|k| f32_at(h, 76 + 4 * k)).collect();
    let (qform, sform) = (i16_at(h, 252), i16_at(h, 254));
    if sform > 0 {
        return [0, 1, 2].map(|r| [0, 1, 2, 3].map(|c| f32_at(h, 280 + 16 * r + 4 * c)));
    }
    if qform > 0 {
        let (b, c, d) = (f32_at(h, 256), f32_at(h, 260), f32_at(h, 264));
        let a = (1.0 - (b * b + c * c + d * d)).max(0.0).sqrt();
        let rot = [
            [a * a + b * b - c * c - d * d, 2.0 * (b * c - a * d), 2.0 * (b * d + a * c)],
            [2.0 * (b * c + a * d), a * a + c * c - b * b - d * d, 2.0 * (c * d - a * b)],
            [2.0 * (b * d - a * c), 2.0 * (c * d + a * b), a * a + d * d - b * b - c * c],
        ];
        let qfac = if pixdim[0] < 0.0 { -1.0 } else { 1.0 };
        let scale = [pixdim[1], pixdim[2], qfac * pixdim[3]];
        let offset = [f32_at(h, 268), f32_at(h, 272), f32_at(h, 276)];
        return [0, 1, 2].map(|r| [rot[r][0] * scale[0], rot[r][1] * scale[1], rot[r][2] * scale[2], offset[r]]);
    }
    [0, 1, 2].map(|r| {
        let mut row = [0.0; 4];
        row[r] = pixdim[r + 1];
        row
    })
}

/// Reverses `data` along `axis`.
fn flip(data: &mut [f64], dims: [usize; 3], axis: usize) {
    let g = GridGeometry { dims, spacing: [1.0; 3], origin: [0.0; 3] };
    let src = data.to_vec();
    for (i, v) in data.iter_mut().enumerate() {
        let mut p = g.position(i);
        p[axis] = dims[axis] - 1 - p[axis];
        *v = src[g.index(p)];
    }
}

/// Parses an in-memory NIfTI-1 file (gzip detected from the magic bytes).
pub fn parse_nifti(raw: &[u8]) -> Result<LoadedVolume> {
    let bytes: std::borrow::Cow<[u8]> = if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw)
            .read_to_end(&mut out)
            .map_err(|e| Error::Format(format!("gzip stream: {e}")))?;
        out.into()
    } else {
        raw.into()
    };
    let b = &bytes[..];
    if b.len() < HEADER_SIZE {
        return Err(Error::Truncated { expected: HEADER_SIZE, found: b.len() });
    }
    let sizeof_hdr = i32::from_le_bytes([b[0], b[1], b[2], b[3]]);
    if sizeof_hdr != HEADER_SIZE as i32 {
        return Err(if sizeof_hdr.swap_bytes() == HEADER_SIZE as i32 {
            Error::Format("big-endian NIfTI files are not supported".into())
        } else {
            Error::Format(format!("header size {sizeof_hdr}, expected 348"))
        });
    }
    if &b[344..348] != b"n+1\0" {
        return Err(Error::Format("not a single-file NIfTI-1 image (magic \"n+1\")".into()));
    }
    let dim: Vec<i64> = (0..8).map(|k| i64::from(i16_at(b, 40 + 2 * k))).collect();
    let ndim = dim[0];
    if !(1..=7).contains(&ndim) {
        return Err(Error::Format(format!("dimension count {ndim} outside 1..7")));
    }
    if (1..=ndim as usize).any(|k| dim[k] < 1) {
        return Err(Error::Format(format!("non-positive dimension in {:?}", &dim[1..=ndim as usize])));
    }
    if (4..=ndim as usize).any(|k| dim[k] != 1) {
        return Err(Error::Format("only single 3D volumes are supported".into()));
    }
    let dims = [1, 2, 3].map(|k| if k <= ndim as usize { dim[k] as usize } else { 1 });
    let dtype = NiftiDatatype::from_code(i16_at(b, 70))?;
    let vox_offset = f32_at(b, 108);
    let offset = if vox_offset >= DATA_OFFSET as f64 { vox_offset as usize } else { DATA_OFFSET };
    let n = dims[0] * dims[1] * dims[2];
    let expected = offset + n * dtype.size();
    if b.len() < expected {
        return Err(Error::Truncated { expected, found: b.len() });
    }
    let payload = &b[offset..expected];
    let slope = f32_at(b, 112);
    let inter = f32_at(b, 116);
    let (slope, inter) = if slope == 0.0 || !slope.is_finite() { (1.0, 0.0) } else { (slope, inter) };
    let mut data: Vec<f64> = match dtype {
        NiftiDatatype::Uint8 => payload.iter().map(|&v| f64::from(v)).collect(),
        NiftiDatatype::Int16 => payload.chunks_exact(2).map(|c| f64::from(i16::from_le_bytes([c[0], c[1]]))).collect(),
        NiftiDatatype::Float32 => payload
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
            .collect(),
    };
    for v in &mut data {
        *v = *v * slope + inter;
        if dtype.is_integer() {
            *v = v.round();
        }
    }

    let a = affine(b);
    let mut spacing = [0.0; 3];
    let mut origin = [a[0][3], a[1][3], a[2][3]];
    for j in 0..3 {
        let diag = a[j][j];
        let off: f64 = (0..3).filter(|&r| r != j).map(|r| a[r][j].abs()).fold(0.0, f64::max);
        if diag == 0.0 || off > AXIS_TOLERANCE * diag.abs() {
            return Err(Error::Format(format!(
                "orientation is not axis-aligned (affine column {j}: {:?})",
                [a[0][j], a[1][j], a[2][j]]
            )));
        }
        spacing[j] = diag.abs();
        if diag < 0.0 {
            flip(&mut data, dims, j);
            origin[j] += (dims[j] - 1) as f64 * diag;
        }
    }
    let geometry = GridGeometry::new(dims, spacing, origin)?;
    Ok(LoadedVolume { image: ImageVolume::new(geometry, data)?, integer: dtype.is_integer() })
}

pub fn read_nifti(path: &Path) -> Result<LoadedVolume> {
    let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_nifti(&raw)
}

/// Encodes `img` as an uncompressed NIfTI-1 file with an axis-aligned sform.
pub fn encode_nifti(img: &ImageVolume, dtype: NiftiDatatype) -> Result<Vec<u8>> {
    let g = &img.geometry;
    let mut h = vec![0u8; DATA_OFFSET];
    let put_i16 = |h: &mut [u8], off: usize, v: i16| h[off..off + 2].copy_from_slice(&v.to_le_bytes());
    let put_f32 = |h: &mut [u8], off: usize, v: f64| h[off..off + 4].copy_from_slice(&(v as f32).to_le_bytes());
    h[0..4].copy_from_slice(&(HEADER_SIZE as i32).to_le_bytes());
    put_i16(&mut h, 40, 3);
    for a in 0..3 {
        let d = i16::try_from(g.dims[a]).map_err(|_| Error::Domain(format!("dimension {} too large", g.dims[a])))?;
        put_i16(&mut h, 42 + 2 * a, d);
        put_f32(&mut h, 80 + 4 * a, g.spacing[a]);
    }
    for k in 4..8 {
        put_i16(&mut h, 40 + 2 * k, 1);
    }
    put_f32(&mut h, 76, 1.0);
    put_i16(&mut h, 70, dtype.code());
    put_i16(&mut h, 72, 8 * dtype.size() as i16);
    put_f32(&mut h, 108, DATA_OFFSET as f64);
    put_f32(&mut h, 112, 1.0);
    put_i16(&mut h, 254, 2);
    for r in 0..3 {
        put_f32(&mut h, 280 + 16 * r + 4 * r, g.spacing[r]);
        put_f32(&mut h, 280 + 16 * r + 12, g.origin[r]);
    }
    h[344..348].copy_from_slice(b"n+1\0");
    let range = |lo: f64, hi: f64, v: f64| -> Result<f64> {
        let r = v.round();
        if r < lo || r > hi || !v.is_finite() {
            return Err(Error::Domain(format!("value {v} does not fit the {dtype:?} datatype")));
        }
        Ok(r)
    };
    for &v in &img.data {
        match dtype {
            NiftiDatatype::Uint8 => h.push(range(0.0, 255.0, v)? as u8),
            NiftiDatatype::Int16 => h.extend((range(-32768.0, 32767.0, v)? as i16).to_le_bytes()),
            NiftiDatatype::Float32 => h.extend((v as f32).to_le_bytes()),
        }
    }
    Ok(h)
}

/// Writes `img`; a `.gz` extension selects gzip compression.
pub fn write_nifti(path: &Path, img: &ImageVolume, dtype: NiftiDatatype) -> Result<()> {
    let mut bytes = encode_nifti(img, dtype)?;
    if path.extension().is_some_and(|e| e == "gz") {
        let mut enc = GzEncoder::new(Vec::new(), Compression::default());
        enc.write_all(&bytes).map_err(|e| Error::io(path, e))?;
        bytes = enc.finish().map_err(|e| Error::io(path, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
