//! Fixed bin number and fixed bin size discretisation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Source of the lower bin edge for fixed bin size discretisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinimumSource {
    /// Lower bound of the re-segmentation range, falling back to the ROI minimum.
    ResegmentationLowerBound,
    RoiMinimum,
    Explicit(f64),
}

/// Discretisation algorithm and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum DiscretisationSpec {
    FixedBinNumber { bins: u32 },
    FixedBinSize { width: f64, minimum: MinimumSource },
}

impl DiscretisationSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DiscretisationSpec::FixedBinNumber { bins: 0 } => {
                Err(Error::Config("fixed bin number needs at least one bin".into()))
            }
            DiscretisationSpec::FixedBinSize { width, .. } if !(width > 0.0 && width.is_finite()) => {
                Err(Error::Config(format!("bin width must be positive, got {width}")))
            }
            _ => Ok(()),
        }
    }
}

/// Bin indices (1-based) of the ROI voxels, in the order of the source set.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretisedRoi {
    pub levels: Vec<u32>,
    /// Number of grey levels; for fixed bin size this is the highest bin.
    pub n_levels: u32,
    pub spec: DiscretisationSpec,
    /// Lower bin edge used by fixed bin size discretisation.
    pub minimum: Option<f64>,
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// `floor(N_g (x − min)/(max − min)) + 1`, with the maximum mapped to `N_g`.
pub fn discretise_fbn(values: &[f64], bins: u32) -> Result<DiscretisedRoi> {
    let spec = DiscretisationSpec::FixedBinNumber { bins };
    spec.validate()?;
    if values.is_empty() {
        return Err(Error::EmptyRoi("discretisation".into()));
    }
    let (lo, hi) = min_max(values);
    let ng = bins as f64;
    let levels = values
        .iter()
        .map(|&x| {
            if x >= hi {
                bins
            } else {
                (((ng * (x - lo) / (hi - lo)).floor() as u32) + 1).min(bins)
            }
        })
        .collect();
    Ok(DiscretisedRoi { levels, n_levels: bins, spec, minimum: None })
}

/// `floor((x − minimum)/w) + 1`; values below `minimum` are rejected.
pub fn discretise_fbs(values: &[f64], width: f64, minimum: f64) -> Result<DiscretisedRoi> {
    let spec = DiscretisationSpec::FixedBinSize { width, minimum: MinimumSource::Explicit(minimum) };
    spec.validate()?;
    if values.is_empty() {
        return Err(Error::EmptyRoi("discretisation".into()));
    }
    let mut levels = Vec::with_capacity(values.len());
    for &x in values {
        if x < minimum {
            return Err(Error::Domain(format!(
                "intensity {x} lies below the discretisation minimum {minimum}"
            )));
        }
        levels.push(((x - minimum) / width).floor() as u32 + 1);
    }
    let n_levels = levels.iter().copied().max().unwrap_or(1);
    Ok(DiscretisedRoi { levels, n_levels, spec, minimum: Some(minimum) })
}

/// Discretises by `spec`, resolving the fixed bin size minimum against the
/// re-segmentation lower bound when requested.
pub fn discretise(values: &[f64], spec: &DiscretisationSpec, reseg_lower: Option<f64>) -> Result<DiscretisedRoi> {
    match *spec {
        DiscretisationSpec::FixedBinNumber { bins } => discretise_fbn(values, bins),
        DiscretisationSpec::FixedBinSize { width, minimum } => {
            if values.is_empty() {
                return Err(Error::EmptyRoi("discretisation".into()));
            }
            let m = match minimum {
                MinimumSource::Explicit(m) => m,
                MinimumSource::ResegmentationLowerBound => reseg_lower.unwrap_or(min_max(values).0),
                MinimumSource::RoiMinimum => min_max(values).0,
            };
            let mut d = discretise_fbs(values, width, m)?;
            d.spec = *spec;
            Ok(d)
        }
    }
}
