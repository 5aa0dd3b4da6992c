//! Intensity histogram features on discretised grey levels.

use crate::features::FeatureValue;
use crate::intensity::stats::Summary;
use crate::preprocess::DiscretisedRoi;

/// Dense histogram over levels `1..=N_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityHistogram {
    pub counts: Vec<u64>,
    pub probabilities: Vec<f64>,
    pub gradient: Vec<f64>,
}

impl IntensityHistogram {
    pub fn new(levels: &[u32], n_levels: u32) -> Self {
        let mut counts = vec![0u64; n_levels as usize];
        for &l in levels {
            counts[l as usize - 1] += 1;
        }
        let n = levels.len() as f64;
        let probabilities = counts.iter().map(|&c| c as f64 / n).collect();
        let gradient = histogram_gradient(&counts);
        Self { counts, probabilities, gradient }
    }
}

/// Forward difference at the first bin, central differences inside and a
/// backward difference at the last bin.
pub fn histogram_gradient(counts: &[u64]) -> Vec<f64> {
    let n = counts.len();
    let c: Vec<f64> = counts.iter().map(|&v| v as f64).collect();
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| {
            if i == 0 {
                c[1] - c[0]
            } else if i == n - 1 {
                c[n - 1] - c[n - 2]
            } else {
                (c[i + 1] - c[i - 1]) / 2.0
            }
        })
        .collect()
}

/// Most frequent level; ties go to the level closest to the mean, then the lower level.
fn mode(counts: &[u64], mean: f64) -> f64 {
    let top = counts.iter().copied().max().unwrap_or(0);
    let mut best: Option<(f64, usize)> = None;
    for (i, &c) in counts.iter().enumerate() {
        if c != top {
            continue;
        }
        let d = ((i + 1) as f64 - mean).abs();
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, i));
        }
    }
    best.map(|(_, i)| (i + 1) as f64).unwrap_or(1.0)
}

/// Extreme gradient value and its level; ties take the lowest level.
fn gradient_extreme(gradient: &[f64], max: bool) -> (f64, f64) {
    let mut best = 0usize;
    for (i, &g) in gradient.iter().enumerate() {
        let better = if max { g > gradient[best] } else { g < gradient[best] };
        if better {
            best = i;
        }
    }
    (gradient[best], (best + 1) as f64)
}

/// The 23 histogram features in catalogue order.
pub fn histogram_features(d: &DiscretisedRoi) -> Vec<FeatureValue> {
    let x: Vec<f64> = d.levels.iter().map(|&l| l as f64).collect();
    let s = Summary::of(&x);
    let h = IntensityHistogram::new(&d.levels, d.n_levels);
    let entropy: f64 = -h
        .probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>();
    let uniformity: f64 = h.probabilities.iter().map(|p| p * p).sum();
    let (gmax, gmax_level) = gradient_extreme(&h.gradient, true);
    let (gmin, gmin_level) = gradient_extreme(&h.gradient, false);
    vec![
        s.mean.into(),
        s.variance.into(),
        s.skewness.into(),
        s.kurtosis.into(),
        s.median.into(),
        s.min.into(),
        s.p10.into(),
        s.p90.into(),
        s.max.into(),
        mode(&h.counts, s.mean).into(),
        (s.p75 - s.p25).into(),
        (s.max - s.min).into(),
        s.mean_abs_dev.into(),
        s.robust_mean_abs_dev.into(),
        s.median_abs_dev.into(),
        s.coefficient_of_variation(),
        s.quartile_dispersion(),
        (entropy + 0.0).into(),
        uniformity.into(),
        gmax.into(),
        gmax_level.into(),
        gmin.into(),
        gmin_level.into(),
    ]
}
