//! Volume and mask files: single-file NIfTI-1 and raw arrays with a text header.

pub mod nifti;
pub mod raw;

use std::path::Path;

pub use nifti::{encode_nifti, parse_nifti, read_nifti, write_nifti, NiftiDatatype};
pub use raw::{decode_raw, parse_raw_header, read_raw, write_raw, RawDatatype, RawHeader};

use crate::error::{Error, Result};
use crate::volume::{ImageVolume, RoiMask};

/// Tolerance on spacing and origin when matching a mask to its image.
const GEOMETRY_TOLERANCE: f64 = 1e-4;

/// A loaded volume and whether its voxels were stored as integers.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedVolume {
    pub image: ImageVolume,
    pub integer: bool,
}

/// File formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeFormat {
    Nifti,
    RawHeader,
}

impl VolumeFormat {
    /// `.nii` and `.nii.gz` are NIfTI; anything else is a raw header.
    pub fn detect(path: &Path) -> Self {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("").to_ascii_lowercase();
        if name.ends_with(".nii") || name.ends_with(".nii.gz") {
            VolumeFormat::Nifti
        } else {
            VolumeFormat::RawHeader
        }
    }
}

pub fn load_volume(path: &Path) -> Result<LoadedVolume> {
    match VolumeFormat::detect(path) {
        VolumeFormat::Nifti => read_nifti(path),
        VolumeFormat::RawHeader => read_raw(path),
    }
}

/// Loads a mask for `image`: non-zero voxels are in the ROI.
pub fn load_mask(path: &Path, image: &ImageVolume) -> Result<RoiMask> {
    let m = load_volume(path)?.image;
    let (a, b) = (&m.geometry, &image.geometry);
    if a.dims != b.dims {
        return Err(Error::Mismatch(format!("mask dimensions {:?} differ from image dimensions {:?}", a.dims, b.dims)));
    }
    let close = |x: [f64; 3], y: [f64; 3]| (0..3).all(|k| (x[k] - y[k]).abs() <= GEOMETRY_TOLERANCE * (1.0 + y[k].abs()));
    if !close(a.spacing, b.spacing) || !close(a.origin, b.origin) {
        return Err(Error::Mismatch("mask spacing or origin differs from the image".into()));
    }
    RoiMask::new(image.geometry, m.data.iter().map(|&v| u8::from(v != 0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::GridGeometry;

    #[test]
    fn mask_must_match_image() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridGeometry::new([3, 3, 2], [1.0; 3], [0.0; 3]).unwrap();
        let img = ImageVolume::filled(g, 5.0);
        let p = dir.path().join("m.nii");
        let mask = ImageVolume::new(g, (0..18).map(|i| f64::from(u8::from(i % 3 == 0))).collect()).unwrap();
        write_nifti(&p, &mask, NiftiDatatype::Uint8).unwrap();
        assert_eq!(load_mask(&p, &img).unwrap().count(), 6);
        let other = ImageVolume::filled(GridGeometry::new([3, 3, 3], [1.0; 3], [0.0; 3]).unwrap(), 0.0);
        assert!(matches!(load_mask(&p, &other), Err(Error::Mismatch(_))));
    }

    #[test]
    fn int16_volume_is_integral() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridGeometry::new([2, 2, 2], [0.7; 3], [0.0; 3]).unwrap();
        let img = ImageVolume::new(g, vec![-1000.0, -3.0, 0.0, 12.0, 40.0, 400.0, 1.0, 2.0]).unwrap();
        let p = dir.path().join("ct.nii.gz");
        write_nifti(&p, &img, NiftiDatatype::Int16).unwrap();
        let v = load_volume(&p).unwrap();
        assert!(v.integer);
        assert_eq!(v.image.data, img.data);
        assert!((v.image.geometry.spacing[0] - 0.7).abs() < 1e-6);
    }
}
