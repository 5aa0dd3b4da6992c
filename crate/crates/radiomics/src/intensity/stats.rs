//! Intensity-based statistical features.
//!
//! Moments use the population divisor. Percentiles interpolate linearly
//! between closest ranks: for sorted values `x` and probability `q`, the
//! position `h = (n − 1)q` gives `x[⌊h⌋] + (h − ⌊h⌋)(x[⌊h⌋+1] − x[⌊h⌋])`.

use crate::features::FeatureValue;

/// Percentile of already sorted values; `q` in `[0, 1]`.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

/// Location, spread and shape summaries shared by the statistics and histogram families.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub median: f64,
    pub min: f64,
    pub p10: f64,
    pub p25: f64,
    pub p75: f64,
    pub p90: f64,
    pub max: f64,
    pub mean_abs_dev: f64,
    pub robust_mean_abs_dev: f64,
    pub median_abs_dev: f64,
}

impl Summary {
    /// Summaries of a non-empty sample.
    pub fn of(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "summary of an empty sample");
        let n = values.len() as f64;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / n;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &v in values {
            let d = v - mean;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
        let (skewness, kurtosis) = if m2 == 0.0 {
            (0.0, 0.0)
        } else {
            (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
        };
        let median = percentile_sorted(&sorted, 0.5);
        let p10 = percentile_sorted(&sorted, 0.1);
        let p90 = percentile_sorted(&sorted, 0.9);
        let mean_abs_dev = values.iter().map(|v| (v - mean).abs()).sum::<f64>() / n;
        let median_abs_dev = values.iter().map(|v| (v - median).abs()).sum::<f64>() / n;
        let inner: Vec<f64> = sorted.iter().copied().filter(|&v| v >= p10 && v <= p90).collect();
        let robust_mean_abs_dev = if inner.is_empty() {
            0.0
        } else {
            let m = inner.iter().sum::<f64>() / inner.len() as f64;
            inner.iter().map(|v| (v - m).abs()).sum::<f64>() / inner.len() as f64
        };
        Summary {
            mean,
            variance: m2,
            skewness,
            kurtosis,
            median,
            min: sorted[0],
            p10,
            p25: percentile_sorted(&sorted, 0.25),
            p75: percentile_sorted(&sorted, 0.75),
            p90,
            max: sorted[sorted.len() - 1],
            mean_abs_dev,
            robust_mean_abs_dev,
            median_abs_dev,
        }
    }

    pub fn coefficient_of_variation(&self) -> FeatureValue {
        if self.variance == 0.0 {
            return FeatureValue::Value(0.0);
        }
        FeatureValue::ratio(self.variance.sqrt(), self.mean, "mean is zero")
    }

    pub fn quartile_dispersion(&self) -> FeatureValue {
        let num = self.p75 - self.p25;
        if num == 0.0 {
            return FeatureValue::Value(0.0);
        }
        FeatureValue::ratio(num, self.p75 + self.p25, "sum of quartiles is zero")
    }
}

/// The 18 statistical features in catalogue order.
pub fn statistical_features(values: &[f64]) -> Vec<FeatureValue> {
    let s = Summary::of(values);
    let n = values.len() as f64;
    let energy: f64 = values.iter().map(|v| v * v).sum();
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
        (s.p75 - s.p25).into(),
        (s.max - s.min).into(),
        s.mean_abs_dev.into(),
        s.robust_mean_abs_dev.into(),
        s.median_abs_dev.into(),
        s.coefficient_of_variation(),
        s.quartile_dispersion(),
        energy.into(),
        (energy / n).sqrt().into(),
    ]
}
