//! Intensity-based re-segmentation of the intensity mask.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{ImageVolume, RoiMaskPair};

/// Order in which range and outlier filters are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainOrder {
    #[default]
    RangeThenOutlier,
    OutlierThenRange,
}

/// Re-segmentation settings. `upper = None` denotes an unbounded range.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResegmentationSpec {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Outlier filter width in standard deviations.
    pub outlier_sigma: Option<f64>,
    #[serde(default)]
    pub order: ChainOrder,
}

impl ResegmentationSpec {
    /// Range filter `[lower, upper]`.
    pub fn range(lower: f64, upper: Option<f64>) -> Self {
        Self { lower: Some(lower), upper, ..Default::default() }
    }

    pub fn has_range(&self) -> bool {
        self.lower.is_some() || self.upper.is_some()
    }

    pub fn is_noop(&self) -> bool {
        !self.has_range() && self.outlier_sigma.is_none()
    }

    /// Checks bound ordering and sigma sign.
    pub fn validate(&self) -> Result<()> {
        if let (Some(a), Some(b)) = (self.lower, self.upper) {
            if !(a <= b) {
                return Err(Error::Config(format!("re-segmentation range [{a}, {b}] is empty")));
            }
        }
        if let Some(k) = self.outlier_sigma {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::Config(format!("outlier sigma must be positive, got {k}")));
            }
        }
        Ok(())
    }
}

fn apply_range(labels: &mut [u8], img: &ImageVolume, lo: Option<f64>, hi: Option<f64>) {
    for (l, &v) in labels.iter_mut().zip(&img.data) {
        if *l == 1 && (lo.is_some_and(|a| v < a) || hi.is_some_and(|b| v > b)) {
            *l = 0;
        }
    }
}

fn apply_outlier(labels: &mut [u8], img: &ImageVolume, k: f64) {
    let vals: Vec<f64> = labels
        .iter()
        .zip(&img.data)
        .filter(|(&l, _)| l == 1)
        .map(|(_, &v)| v)
        .collect();
    if vals.is_empty() {
        return;
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let sd = (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    apply_range(labels, img, Some(mean - k * sd), Some(mean + k * sd));
}

/// Removes voxels outside the range and/or the `μ ± kσ` band from the
/// intensity mask. The morphological mask is returned unchanged.
pub fn resegment(pair: &RoiMaskPair, img: &ImageVolume, spec: &ResegmentationSpec) -> Result<RoiMaskPair> {
    spec.validate()?;
    if img.geometry != pair.intensity.geometry {
        return Err(Error::Mismatch("image and mask geometries differ".into()));
    }
    let mut labels = pair.intensity.labels.clone();
    let range = |l: &mut [u8]| {
        if spec.has_range() {
            apply_range(l, img, spec.lower, spec.upper)
        }
    };
    let outlier = |l: &mut [u8]| {
        if let Some(k) = spec.outlier_sigma {
            apply_outlier(l, img, k)
        }
    };
    match spec.order {
        ChainOrder::RangeThenOutlier => {
            range(&mut labels);
            outlier(&mut labels);
        }
        ChainOrder::OutlierThenRange => {
            outlier(&mut labels);
            range(&mut labels);
        }
    }
    if !labels.contains(&1) {
        return Err(Error::EmptyRoi("re-segmentation".into()));
    }
    let mut intensity = pair.intensity.clone();
    intensity.labels = labels;
    Ok(RoiMaskPair { morphological: pair.morphological.clone(), intensity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{GridGeometry, RoiMask};

    fn line(values: &[f64]) -> (ImageVolume, RoiMaskPair) {
        let g = GridGeometry::new([values.len(), 1, 1], [1.0; 3], [0.0; 3]).unwrap();
        let img = ImageVolume::new(g, values.to_vec()).unwrap();
        (img, RoiMaskPair::from_mask(RoiMask::filled(g, true)))
    }

    #[test]
    fn noop_spec_keeps_pair() {
        let (img, pair) = line(&[1.0, 2.0, 3.0]);
        assert_eq!(resegment(&pair, &img, &ResegmentationSpec::default()).unwrap(), pair);
    }

    #[test]
    fn outlier_then_range_example() {
        let values = [0.0, 10.0, 10.0, 10.0, 10.0, 10.0, 10.0, 10.0, 10.0, 100.0];
        let (img, pair) = line(&values);
        // mean 18, population sd sqrt(756) ≈ 27.5: the 3σ band keeps everything.
        let sigma = ResegmentationSpec { outlier_sigma: Some(3.0), ..Default::default() };
        let out = resegment(&pair, &img, &sigma).unwrap();
        assert_eq!(out.intensity.count(), 10);
        let both = ResegmentationSpec {
            lower: Some(5.0),
            upper: Some(50.0),
            outlier_sigma: Some(3.0),
            order: ChainOrder::OutlierThenRange,
        };
        let out = resegment(&pair, &img, &both).unwrap();
        assert_eq!(out.intensity.labels, vec![0, 1, 1, 1, 1, 1, 1, 1, 1, 0]);
        assert_eq!(out.morphological, pair.morphological);
    }

    #[test]
    fn chain_order_matters() {
        // Range first removes 100, after which 1 lies outside the 1σ band.
        let (img, pair) = line(&[1.0, 5.0, 5.0, 5.0, 100.0]);
        let spec = ResegmentationSpec {
            lower: Some(0.0),
            upper: Some(50.0),
            outlier_sigma: Some(1.0),
            order: ChainOrder::RangeThenOutlier,
        };
        let a = resegment(&pair, &img, &spec).unwrap();
        assert_eq!(a.intensity.labels, vec![0, 1, 1, 1, 0]);
        let b = resegment(&pair, &img, &ResegmentationSpec { order: ChainOrder::OutlierThenRange, ..spec }).unwrap();
        assert_eq!(b.intensity.labels, vec![1, 1, 1, 1, 0]);
    }

    #[test]
    fn half_open_and_empty() {
        let (img, pair) = line(&[1.0, 7.0, 1000.0]);
        let out = resegment(&pair, &img, &ResegmentationSpec::range(5.0, None)).unwrap();
        assert_eq!(out.intensity.labels, vec![0, 1, 1]);
        let none = resegment(&pair, &img, &ResegmentationSpec::range(2000.0, None));
        assert!(matches!(none, Err(Error::EmptyRoi(_))));
    }
}
