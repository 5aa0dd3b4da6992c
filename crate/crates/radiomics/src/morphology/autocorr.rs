//! Moran's I and Geary's C spatial autocorrelation with inverse-distance weights.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::features::FeatureValue;
use crate::volume::RoiIntensitySet;

/// When and how to approximate the quadratic-cost evaluation by subsampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubsamplePolicy {
    /// Largest ROI evaluated exactly.
    pub threshold: usize,
    pub repeats: usize,
    pub size: usize,
    pub seed: u64,
}

impl Default for SubsamplePolicy {
    fn default() -> Self {
        Self { threshold: 5000, repeats: 100, size: 1000, seed: 1 }
    }
}

/// How the autocorrelation values were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum AutocorrelationMethod {
    Exact,
    Subsampled { repeats: usize, size: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Autocorrelation {
    pub moran_i: FeatureValue,
    pub geary_c: FeatureValue,
    pub method: AutocorrelationMethod,
}

/// Row sums of weights, weighted deviation products and weighted squared differences.
fn row_sums(points: &[[f64; 3]], values: &[f64], mean: f64, k1: usize) -> [f64; 3] {
    let (p, x) = (points[k1], values[k1]);
    let mut acc = [0.0; 3];
    for (k2, (q, &y)) in points.iter().zip(values).enumerate() {
        if k2 == k1 {
            continue;
        }
        let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
        let w = 1.0 / d;
        acc[0] += w;
        acc[1] += w * (x - mean) * (y - mean);
        acc[2] += w * (x - y) * (x - y);
    }
    acc
}

fn exact(points: &[[f64; 3]], values: &[f64]) -> (FeatureValue, FeatureValue) {
    let n = values.len();
    if n < 2 {
        let r = "spatial autocorrelation needs at least two voxels";
        return (FeatureValue::undefined(r), FeatureValue::undefined(r));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    // Rows are summed in index order, so the result does not depend on thread count.
    let rows: Vec<[f64; 3]> = (0..n).into_par_iter().map(|k| row_sums(points, values, mean, k)).collect();
    let mut tot = [0.0; 3];
    for r in rows {
        for i in 0..3 {
            tot[i] += r[i];
        }
    }
    let reason = "constant intensity in the ROI";
    if var == 0.0 || tot[0] == 0.0 {
        return (FeatureValue::undefined(reason), FeatureValue::undefined(reason));
    }
    let moran = n as f64 / tot[0] * tot[1] / var;
    let geary = (n as f64 - 1.0) / (2.0 * tot[0]) * tot[2] / var;
    (FeatureValue::checked(moran, reason), FeatureValue::checked(geary, reason))
}

fn mean_defined(vals: &[FeatureValue], reason: &str) -> FeatureValue {
    let defined: Vec<f64> = vals.iter().filter_map(FeatureValue::value).collect();
    if defined.is_empty() {
        FeatureValue::undefined(reason)
    } else {
        FeatureValue::Value(defined.iter().sum::<f64>() / defined.len() as f64)
    }
}

/// Subsampled estimate over `policy.repeats` draws without replacement.
pub fn subsampled(s: &RoiIntensitySet, policy: &SubsamplePolicy) -> Autocorrelation {
    let n = s.len();
    let size = policy.size.min(n);
    let mut rng = ChaCha20Rng::seed_from_u64(policy.seed);
    let mut morans = Vec::with_capacity(policy.repeats);
    let mut gearys = Vec::with_capacity(policy.repeats);
    for _ in 0..policy.repeats {
        let mut idx = rand::seq::index::sample(&mut rng, n, size).into_vec();
        idx.sort_unstable();
        let pts: Vec<[f64; 3]> = idx.iter().map(|&i| s.centers.points[i]).collect();
        let vals: Vec<f64> = idx.iter().map(|&i| s.values[i]).collect();
        let (m, g) = exact(&pts, &vals);
        morans.push(m);
        gearys.push(g);
    }
    let reason = "no subsample with varying intensity";
    Autocorrelation {
        moran_i: mean_defined(&morans, reason),
        geary_c: mean_defined(&gearys, reason),
        method: AutocorrelationMethod::Subsampled { repeats: policy.repeats, size, seed: policy.seed },
    }
}

/// Moran's I and Geary's C, exact up to `policy.threshold` voxels and subsampled above.
pub fn moran_geary(s: &RoiIntensitySet, policy: &SubsamplePolicy) -> Autocorrelation {
    if s.len() <= policy.threshold {
        let (moran_i, geary_c) = exact(&s.centers.points, &s.values);
        Autocorrelation { moran_i, geary_c, method: AutocorrelationMethod::Exact }
    } else {
        subsampled(s, policy)
    }
}
