//! Diagnostic descriptors of the image and ROI masks at each processing stage.

use serde::Serialize;

use crate::volume::{ImageVolume, RoiMaskPair};

/// Processing stages at which diagnostics are captured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Initial,
    Interpolated,
    Resegmented,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Initial => "initial",
            Stage::Interpolated => "interpolated",
            Stage::Resegmented => "re-segmented",
        }
    }
}

/// Image and ROI descriptors at one stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageDiagnostics {
    pub stage: Stage,
    pub image_dims: [usize; 3],
    pub voxel_spacing: [f64; 3],
    pub image_mean: f64,
    pub image_min: f64,
    pub image_max: f64,
    pub intensity_mask_dims: [usize; 3],
    /// Bounding box extents in voxels; zero when the mask is empty.
    pub intensity_bbox_dims: [usize; 3],
    pub morphological_bbox_dims: [usize; 3],
    pub intensity_voxels: usize,
    pub morphological_voxels: usize,
    /// ROI intensity summary; `None` when the intensity mask is empty.
    pub roi_mean: Option<f64>,
    pub roi_min: Option<f64>,
    pub roi_max: Option<f64>,
}

/// Diagnostics for every stage reached.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DiagnosticSet {
    pub stages: Vec<StageDiagnostics>,
}

fn min_mean_max<'a>(values: impl Iterator<Item = &'a f64>) -> Option<(f64, f64, f64)> {
    let (mut lo, mut hi, mut sum, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
        n += 1;
    }
    (n > 0).then(|| (lo, sum / n as f64, hi))
}

/// Describes `img` and `pair` at `stage`.
pub fn describe(stage: Stage, img: &ImageVolume, pair: &RoiMaskPair) -> StageDiagnostics {
    let (image_min, image_mean, image_max) = min_mean_max(img.data.iter()).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
    let bbox = |m: &crate::volume::RoiMask| {
        m.bounding_box().map_or([0; 3], |(lo, hi)| [0, 1, 2].map(|a| hi[a] - lo[a] + 1))
    };
    let roi = min_mean_max(
        img.data.iter().zip(&pair.intensity.labels).filter(|(_, &l)| l == 1).map(|(v, _)| v),
    );
    StageDiagnostics {
        stage,
        image_dims: img.geometry.dims,
        voxel_spacing: img.geometry.spacing,
        image_mean,
        image_min,
        image_max,
        intensity_mask_dims: pair.intensity.geometry.dims,
        intensity_bbox_dims: bbox(&pair.intensity),
        morphological_bbox_dims: bbox(&pair.morphological),
        intensity_voxels: pair.intensity.count(),
        morphological_voxels: pair.morphological.count(),
        roi_mean: roi.map(|r| r.1),
        roi_min: roi.map(|r| r.0),
        roi_max: roi.map(|r| r.2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{GridGeometry, RoiMask};

    #[test]
    fn describes_a_small_roi() {
        let g = GridGeometry::new([3, 2, 1], [1.0, 2.0, 3.0], [0.0; 3]).unwrap();
        let img = ImageVolume::new(g, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let m = RoiMask::new(g, vec![0, 1, 1, 0, 0, 1]).unwrap();
        let d = describe(Stage::Initial, &img, &RoiMaskPair::from_mask(m));
        assert_eq!(d.image_dims, [3, 2, 1]);
        assert_eq!(d.image_mean, 3.5);
        assert_eq!(d.intensity_bbox_dims, [2, 2, 1]);
        assert_eq!(d.intensity_voxels, 3);
        assert_eq!((d.roi_min, d.roi_max), (Some(2.0), Some(6.0)));
        assert!((d.roi_mean.unwrap() - 11.0 / 3.0).abs() < 1e-12);
    }
}
