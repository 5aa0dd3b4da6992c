//! Intensity-volume histogram preparation.
//!
//! Levels are kept as offsets from the lowest evaluated level in units of the
//! discretisation interval, so fractional volumes are computed by exact
//! comparisons against integer offsets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::discretise::{discretise_fbn, discretise_fbs};
use crate::preprocess::resegment::ResegmentationSpec;

/// How intensities are mapped onto evaluated levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum IvhMode {
    /// Calibrated discrete intensities used as-is with unit interval.
    Discrete,
    /// Calibrated continuous intensities binned at `width` and replaced by bin centers.
    /// `minimum`/`maximum` override the re-segmentation bounds.
    Continuous { width: f64, minimum: Option<f64>, maximum: Option<f64> },
    /// Arbitrary units: fixed bin number discretisation.
    Arbitrary { bins: u32 },
}

/// Fractional volumes and grey level fractions over the evaluated levels.
#[derive(Debug, Clone, PartialEq)]
pub struct IvhData {
    /// Discretised intensities of the ROI voxels.
    pub values: Vec<f64>,
    pub range: (f64, f64),
    /// Discretisation interval between evaluated levels.
    pub interval: f64,
    /// Evaluated levels `G_min + k·interval`.
    pub levels: Vec<f64>,
    /// Fraction of the volume at or above each level.
    pub volume_fraction: Vec<f64>,
    /// Position of each level within the range, from 0 to 1.
    pub level_fraction: Vec<f64>,
}

/// Number of interval steps between `lo` and `hi`, tolerant to rounding.
fn steps(lo: f64, hi: f64, w: f64) -> usize {
    let r = (hi - lo) / w;
    let n = r.round();
    if (r - n).abs() <= 1e-9 * r.abs().max(1.0) {
        n.max(0.0) as usize
    } else {
        r.floor().max(0.0) as usize
    }
}

fn build(values: Vec<f64>, offsets: Vec<f64>, range: (f64, f64), interval: f64) -> IvhData {
    let n_levels = steps(range.0, range.1, interval) + 1;
    let mut sorted = offsets;
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let span = range.1 - range.0;
    let mut levels = Vec::with_capacity(n_levels);
    let mut volume_fraction = Vec::with_capacity(n_levels);
    let mut level_fraction = Vec::with_capacity(n_levels);
    for k in 0..n_levels {
        let below = sorted.partition_point(|&o| o < k as f64);
        let i = range.0 + k as f64 * interval;
        levels.push(i);
        volume_fraction.push(1.0 - below as f64 / n);
        level_fraction.push(if span > 0.0 { (i - range.0) / span } else { 0.0 });
    }
    IvhData { values, range, interval, levels, volume_fraction, level_fraction }
}

/// Maps ROI intensities to discretised values and evaluates the histogram.
pub fn prepare_ivh(values: &[f64], mode: &IvhMode, reseg: &ResegmentationSpec) -> Result<IvhData> {
    if values.is_empty() {
        return Err(Error::EmptyRoi("intensity-volume histogram".into()));
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    match *mode {
        IvhMode::Discrete => {
            let g_min = reseg.lower.unwrap_or(lo);
            let g_max = reseg.upper.unwrap_or(hi);
            if g_max < g_min {
                return Err(Error::Config(format!("IVH range [{g_min}, {g_max}] is empty")));
            }
            let offsets = values.iter().map(|v| v - g_min).collect();
            Ok(build(values.to_vec(), offsets, (g_min, g_max), 1.0))
        }
        IvhMode::Continuous { width, minimum, maximum } => {
            if !(width > 0.0 && width.is_finite()) {
                return Err(Error::Config(format!("IVH bin width must be positive, got {width}")));
            }
            let x_min = minimum.or(reseg.lower).ok_or_else(|| {
                Error::Config(
                    "continuous IVH needs a lower bound from re-segmentation or an explicit minimum".into(),
                )
            })?;
            let x_max = maximum.or(reseg.upper).unwrap_or(hi);
            let d = discretise_fbs(values, width, x_min)?;
            let centers = d.levels.iter().map(|&b| x_min + (b as f64 - 0.5) * width).collect();
            let offsets = d.levels.iter().map(|&b| (b - 1) as f64).collect();
            let range = (x_min + 0.5 * width, (x_max - 0.5 * width).max(x_min + 0.5 * width));
            Ok(build(centers, offsets, range, width))
        }
        IvhMode::Arbitrary { bins } => {
            let d = discretise_fbn(values, bins)?;
            let centers = d.levels.iter().map(|&b| b as f64).collect();
            let offsets = d.levels.iter().map(|&b| (b - 1) as f64).collect();
            Ok(build(centers, offsets, (1.0, bins as f64), 1.0))
        }
    }
}
