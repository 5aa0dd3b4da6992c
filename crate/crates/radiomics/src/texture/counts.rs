//! Grey level by size count matrices shared by the run length, size zone,
//! distance zone and dependence families, and their common features.

use crate::features::FeatureValue;

/// Counts indexed by grey level (rows, `1..=n_levels`) and a size-like column
/// index (`1..=n_cols`: run length, zone size, zone distance or dependence).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    pub n_levels: usize,
    pub n_cols: usize,
    /// Row-major counts; entry `(i, j)` is at `(i − 1) · n_cols + (j − 1)`.
    pub counts: Vec<u64>,
    /// Voxels in the unit the matrix was built from.
    pub n_voxels: u64,
}

impl CountMatrix {
    pub fn new(n_levels: usize, n_cols: usize, n_voxels: u64) -> Self {
        Self { n_levels, n_cols, counts: vec![0; n_levels * n_cols], n_voxels }
    }

    /// Builds a matrix from `(level, column)` observations, sized to the largest column.
    pub fn from_entries(n_levels: usize, entries: &[(u32, usize)], n_voxels: u64) -> Self {
        let n_cols = entries.iter().map(|e| e.1).max().unwrap_or(0);
        let mut m = Self::new(n_levels, n_cols, n_voxels);
        for &(i, j) in entries {
            m.counts[(i as usize - 1) * n_cols + j - 1] += 1;
        }
        m
    }

    /// Count at grey level `i` and column `j` (both 1-based); 0 beyond the stored width.
    pub fn get(&self, i: usize, j: usize) -> u64 {
        if i == 0 || j == 0 || i > self.n_levels || j > self.n_cols {
            0
        } else {
            self.counts[(i - 1) * self.n_cols + j - 1]
        }
    }

    /// Row `i` padded or cut to `width` columns.
    pub fn row(&self, i: usize, width: usize) -> Vec<u64> {
        (1..=width).map(|j| self.get(i, j)).collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Adds counts and voxel numbers, widening to the larger column range.
    pub fn merge(&mut self, other: &CountMatrix) {
        assert_eq!(self.n_levels, other.n_levels, "merging matrices with different grey level counts");
        let n_cols = self.n_cols.max(other.n_cols);
        let mut counts = vec![0u64; self.n_levels * n_cols];
        for i in 1..=self.n_levels {
            for j in 1..=n_cols {
                counts[(i - 1) * n_cols + j - 1] = self.get(i, j) + other.get(i, j);
            }
        }
        self.n_cols = n_cols;
        self.counts = counts;
        self.n_voxels += other.n_voxels;
    }

    /// The sixteen features shared by the count families, plus the energy of
    /// the probability matrix when `with_energy` is set.
    ///
    /// Order: small/large column emphasis, low/high grey level emphasis, the
    /// four combined emphases, grey level and column non-uniformity (plain and
    /// normalised), percentage, grey level variance, column variance, entropy.
    pub fn features(&self, with_energy: bool) -> Vec<FeatureValue> {
        let n = 16 + usize::from(with_energy);
        let ns = self.total();
        if ns == 0 {
            return vec![FeatureValue::undefined("matrix holds no counts"); n];
        }
        let nsf = ns as f64;
        let mut row_sum = vec![0.0; self.n_levels + 1];
        let mut col_sum = vec![0.0; self.n_cols + 1];
        let mut acc = [0.0f64; 8];
        let (mut entropy, mut energy) = (0.0, 0.0);
        for i in 1..=self.n_levels {
            let fi = i as f64;
            for j in 1..=self.n_cols {
                let c = self.get(i, j);
                if c == 0 {
                    continue;
                }
                let (c, fj) = (c as f64, j as f64);
                row_sum[i] += c;
                col_sum[j] += c;
                let (i2, j2) = (fi * fi, fj * fj);
                acc[0] += c / j2;
                acc[1] += c * j2;
                acc[2] += c / i2;
                acc[3] += c * i2;
                acc[4] += c / (i2 * j2);
                acc[5] += c * i2 / j2;
                acc[6] += c * j2 / i2;
                acc[7] += c * i2 * j2;
                let p = c / nsf;
                entropy -= p * p.log2();
                energy += p * p;
            }
        }
        let glnu: f64 = row_sum.iter().map(|r| r * r).sum::<f64>();
        let cnu: f64 = col_sum.iter().map(|r| r * r).sum::<f64>();
        let variance = |sums: &[f64]| {
            let mu: f64 = sums.iter().enumerate().map(|(k, s)| k as f64 * s / nsf).sum();
            sums.iter().enumerate().map(|(k, s)| (k as f64 - mu).powi(2) * s / nsf).sum::<f64>()
        };
        let mut out: Vec<FeatureValue> = acc.iter().map(|a| FeatureValue::Value(a / nsf)).collect();
        out.push(FeatureValue::Value(glnu / nsf));
        out.push(FeatureValue::Value(glnu / (nsf * nsf)));
        out.push(FeatureValue::Value(cnu / nsf));
        out.push(FeatureValue::Value(cnu / (nsf * nsf)));
        out.push(FeatureValue::ratio(nsf, self.n_voxels as f64, "unit holds no voxels"));
        out.push(FeatureValue::Value(variance(&row_sum)));
        out.push(FeatureValue::Value(variance(&col_sum)));
        out.push(FeatureValue::Value(entropy));
        if with_energy {
            out.push(FeatureValue::Value(energy));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_pads_columns() {
        let mut a = CountMatrix::from_entries(2, &[(1, 1), (2, 1)], 2);
        let b = CountMatrix::from_entries(2, &[(1, 3)], 3);
        a.merge(&b);
        assert_eq!((a.n_cols, a.total(), a.n_voxels), (3, 3, 5));
        assert_eq!(a.row(1, 4), vec![1, 0, 1, 0]);
    }

    #[test]
    fn single_entry_features() {
        let m = CountMatrix::from_entries(3, &[(2, 3)], 3);
        let f: Vec<f64> = m.features(true).iter().map(FeatureValue::or_nan).collect();
        assert_eq!(f[0], 1.0 / 9.0);
        assert_eq!(f[1], 9.0);
        assert_eq!(f[3], 4.0);
        assert_eq!(f[12], 1.0 / 3.0);
        assert_eq!((f[13], f[14], f[15], f[16]), (0.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn empty_is_undefined() {
        let m = CountMatrix::new(3, 0, 0);
        assert!(m.features(false).iter().all(|v| v.value().is_none()));
    }
}
