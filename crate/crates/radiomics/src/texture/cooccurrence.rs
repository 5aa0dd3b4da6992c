//! Grey level co-occurrence matrices and their features.

use super::{direction_vectors, Dimension, LevelVolume, NeighbourhoodSpec, Unit};
use crate::error::Result;
use crate::features::FeatureValue;

/// Symmetric co-occurrence counts of grey levels `1..=n_levels`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Glcm {
    pub n_levels: usize,
    /// Row-major counts; entry `(i, j)` is at `(i − 1) · n_levels + (j − 1)`.
    pub counts: Vec<u64>,
}

impl Glcm {
    pub fn new(n_levels: usize) -> Self {
        Self { n_levels, counts: vec![0; n_levels * n_levels] }
    }

    /// Count for grey levels `i` and `j` (1-based).
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[(i - 1) * self.n_levels + j - 1]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn merge(&mut self, other: &Glcm) {
        assert_eq!(self.n_levels, other.n_levels, "merging matrices with different grey level counts");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// Probabilities of `|i − j| = k` for `k = 0..n_levels`.
    pub fn difference_probabilities(&self) -> Vec<f64> {
        let t = self.total() as f64;
        let mut p = vec![0.0; self.n_levels];
        for i in 1..=self.n_levels {
            for j in 1..=self.n_levels {
                p[i.abs_diff(j)] += self.get(i, j) as f64 / t;
            }
        }
        p
    }

    /// Probabilities of `i + j = k` for `k = 2..=2·n_levels`.
    pub fn sum_probabilities(&self) -> Vec<f64> {
        let t = self.total() as f64;
        let mut p = vec![0.0; 2 * self.n_levels - 1];
        for i in 1..=self.n_levels {
            for j in 1..=self.n_levels {
                p[i + j - 2] += self.get(i, j) as f64 / t;
            }
        }
        p
    }

    /// Rows of the matrix, for display and tests.
    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.n_levels.max(1)).map(<[u64]>::to_vec).collect()
    }
}

/// One-sided counts of `(level at x, level at x + m)` over voxels of `scope`, both in the mask.
pub fn one_sided(vol: &LevelVolume, slice: Option<usize>, m: [i64; 3]) -> Glcm {
    let ng = vol.n_levels as usize;
    let mut g = Glcm::new(ng);
    for idx in vol.scope(slice) {
        let a = vol.levels[idx];
        if a == 0 {
            continue;
        }
        let b = vol.level_at(vol.position(idx), m);
        if b > 0 {
            g.counts[(a as usize - 1) * ng + b as usize - 1] += 1;
        }
    }
    g
}

/// Symmetric matrix for direction `m`: one-sided counts plus their transpose.
pub fn symmetric(vol: &LevelVolume, slice: Option<usize>, m: [i64; 3]) -> Glcm {
    let plus = one_sided(vol, slice, m);
    let ng = plus.n_levels;
    let mut g = plus.clone();
    for i in 0..ng {
        for j in 0..ng {
            g.counts[i * ng + j] += plus.counts[j * ng + i];
        }
    }
    g
}

/// One matrix per direction, per slice for 2D and over the volume for 3D.
pub fn glcm_build(vol: &LevelVolume, spec: &NeighbourhoodSpec, dim: Dimension) -> Result<Vec<Unit<Glcm>>> {
    let dirs = direction_vectors(spec, dim)?;
    let mut units = Vec::new();
    for slice in vol.scopes(dim) {
        for (d, &m) in dirs.iter().enumerate() {
            units.push(Unit { slice, direction: Some(d), matrix: symmetric(vol, slice, m) });
        }
    }
    Ok(units)
}

fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|v| -v * v.log2()).sum()
}

/// The 25 co-occurrence features in catalogue order.
pub fn glcm_features(g: &Glcm) -> Vec<FeatureValue> {
    let ng = g.n_levels;
    let total = g.total();
    if total == 0 {
        return vec![FeatureValue::undefined("matrix holds no counts"); 25];
    }
    let t = total as f64;
    let p: Vec<f64> = g.counts.iter().map(|&c| c as f64 / t).collect();
    let at = |i: usize, j: usize| p[(i - 1) * ng + j - 1];
    let mut pi = vec![0.0; ng + 1];
    let mut diff = vec![0.0; ng];
    let mut sum = vec![0.0; 2 * ng + 1];
    for i in 1..=ng {
        for j in 1..=ng {
            let v = at(i, j);
            pi[i] += v;
            diff[i.abs_diff(j)] += v;
            sum[i + j] += v;
        }
    }
    let mu: f64 = (1..=ng).map(|i| i as f64 * pi[i]).sum();
    let var_i: f64 = (1..=ng).map(|i| (i as f64 - mu).powi(2) * pi[i]).sum();
    let hx = entropy(&pi);
    let hxy = entropy(&p);

    let mut s = Sums::default();
    for i in 1..=ng {
        for j in 1..=ng {
            let v = at(i, j);
            if v == 0.0 {
                continue;
            }
            let (fi, fj) = (i as f64, j as f64);
            let k = (fi - fj).abs();
            let ngf = ng as f64;
            s.max = s.max.max(v);
            s.joint_var += (fi - mu).powi(2) * v;
            s.energy += v * v;
            s.contrast += k * k * v;
            s.dissimilarity += k * v;
            s.inv_diff += v / (1.0 + k);
            s.inv_diff_norm += v / (1.0 + k / ngf);
            s.idm += v / (1.0 + k * k);
            s.idm_norm += v / (1.0 + (k / ngf).powi(2));
            if k > 0.0 {
                s.inv_var += v / (k * k);
            }
            s.covariance += (fi - mu) * (fj - mu) * v;
            s.auto += fi * fj * v;
            let c = fi + fj - 2.0 * mu;
            s.tendency += c * c * v;
            s.shade += c.powi(3) * v;
            s.prominence += c.powi(4) * v;
            let q = pi[i] * pi[j];
            s.hxy1 -= v * q.log2();
        }
    }
    let mut hxy2 = 0.0;
    for i in 1..=ng {
        for j in 1..=ng {
            let q = pi[i] * pi[j];
            if q > 0.0 {
                hxy2 -= q * q.log2();
            }
        }
    }

    let diff_avg: f64 = diff.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
    let diff_var: f64 = diff.iter().enumerate().map(|(k, v)| (k as f64 - diff_avg).powi(2) * v).sum();
    let sum_avg: f64 = sum.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
    let sum_var: f64 = sum.iter().enumerate().map(|(k, v)| (k as f64 - sum_avg).powi(2) * v).sum();

    let v = FeatureValue::Value;
    vec![
        v(s.max),
        v(mu),
        v(s.joint_var),
        v(hxy),
        v(diff_avg),
        v(diff_var),
        v(entropy(&diff)),
        v(sum_avg),
        v(sum_var),
        v(entropy(&sum)),
        v(s.energy),
        v(s.contrast),
        v(s.dissimilarity),
        v(s.inv_diff),
        v(s.inv_diff_norm),
        v(s.idm),
        v(s.idm_norm),
        v(s.inv_var),
        FeatureValue::ratio(s.covariance, var_i, "single grey level in the matrix"),
        v(s.auto),
        v(s.tendency),
        v(s.shade),
        v(s.prominence),
        FeatureValue::ratio(hxy - s.hxy1, hx, "single grey level in the matrix"),
        v((1.0 - (-2.0 * (hxy2 - hxy).max(0.0)).exp()).sqrt()),
    ]
}

#[derive(Default)]
struct Sums {
    max: f64,
    joint_var: f64,
    energy: f64,
    contrast: f64,
    dissimilarity: f64,
    inv_diff: f64,
    inv_diff_norm: f64,
    idm: f64,
    idm_norm: f64,
    inv_var: f64,
    covariance: f64,
    auto: f64,
    tendency: f64,
    shade: f64,
    prominence: f64,
    hxy1: f64,
}
