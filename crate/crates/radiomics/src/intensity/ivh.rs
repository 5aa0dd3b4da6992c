//! Intensity-volume histogram features.
//!
//! `V_x` is the volume fraction at the lowest evaluated level whose grey level
//! fraction is at least `x`. `I_x` is the lowest evaluated level whose volume
//! fraction is at most `x`; when no level qualifies it is the level one
//! interval above the range.

use crate::features::FeatureValue;
use crate::preprocess::IvhData;

const FRACTION_TOLERANCE: f64 = 1e-12;

/// Volume fraction at grey level fraction `x` in `[0, 1]`.
pub fn volume_at(v: &IvhData, x: f64) -> f64 {
    v.level_fraction
        .iter()
        .position(|&g| g >= x - FRACTION_TOLERANCE)
        .map(|k| v.volume_fraction[k])
        .unwrap_or(0.0)
}

/// Lowest level holding at most fraction `x` of the volume.
pub fn intensity_at(v: &IvhData, x: f64) -> f64 {
    v.volume_fraction
        .iter()
        .position(|&nu| nu <= x + FRACTION_TOLERANCE)
        .map(|k| v.levels[k])
        .unwrap_or(v.range.1 + v.interval)
}

/// Trapezoidal area under the fractional volume curve over grey level fractions.
pub fn area_under_curve(v: &IvhData) -> f64 {
    v.level_fraction
        .windows(2)
        .zip(v.volume_fraction.windows(2))
        .map(|(g, nu)| (g[1] - g[0]) * (nu[0] + nu[1]) / 2.0)
        .sum()
}

/// The seven values in catalogue order: V10, V90, I10, I90, V10−V90, I10−I90, AUC.
pub fn ivh_features(v: &IvhData) -> Vec<FeatureValue> {
    let (v10, v90) = (volume_at(v, 0.1), volume_at(v, 0.9));
    let (i10, i90) = (intensity_at(v, 0.1), intensity_at(v, 0.9));
    vec![
        v10.into(),
        v90.into(),
        i10.into(),
        i90.into(),
        (v10 - v90).into(),
        (i10 - i90).into(),
        area_under_curve(v).into(),
    ]
}
