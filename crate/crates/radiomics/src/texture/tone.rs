//! Neighbourhood grey tone difference matrices and their features.

use super::{neighbour_offsets, Dimension, LevelVolume, NeighbourhoodMode, NeighbourhoodSpec, Unit};
use crate::error::Result;
use crate::features::FeatureValue;

/// Largest coarseness reported when the matrix has no tone differences.
pub const MAX_COARSENESS: f64 = 1e6;

/// Per grey level: number of counted voxels and summed absolute difference
/// from the neighbourhood mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Ngtdm {
    pub n: Vec<u64>,
    pub s: Vec<f64>,
}

impl Ngtdm {
    pub fn new(n_levels: usize) -> Self {
        Self { n: vec![0; n_levels], s: vec![0.0; n_levels] }
    }

    pub fn total(&self) -> u64 {
        self.n.iter().sum()
    }

    pub fn merge(&mut self, other: &Ngtdm) {
        assert_eq!(self.n.len(), other.n.len(), "merging matrices with different grey level counts");
        for k in 0..self.n.len() {
            self.n[k] += other.n[k];
            self.s[k] += other.s[k];
        }
    }
}

/// Tone difference matrix of the slice or volume.
pub fn tone_matrix(vol: &LevelVolume, slice: Option<usize>, offsets: &[[i64; 3]], mode: NeighbourhoodMode) -> Ngtdm {
    let mut t = Ngtdm::new(vol.n_levels as usize);
    for idx in vol.scope(slice) {
        let a = vol.levels[idx];
        if a == 0 {
            continue;
        }
        let p = vol.position(idx);
        let (mut sum, mut w) = (0u64, 0u64);
        for &m in offsets {
            let b = vol.level_at(p, m);
            if b > 0 {
                sum += u64::from(b);
                w += 1;
            }
        }
        let complete = w as usize == offsets.len();
        if w == 0 || (mode == NeighbourhoodMode::Complete && !complete) {
            continue;
        }
        t.n[a as usize - 1] += 1;
        t.s[a as usize - 1] += (f64::from(a) - sum as f64 / w as f64).abs();
    }
    t
}

/// One matrix per slice for 2D, or one for the volume.
pub fn ngtdm_build(
    vol: &LevelVolume,
    spec: &NeighbourhoodSpec,
    dim: Dimension,
    mode: NeighbourhoodMode,
) -> Result<Vec<Unit<Ngtdm>>> {
    let offsets = neighbour_offsets(spec, dim)?;
    Ok(vol
        .scopes(dim)
        .into_iter()
        .map(|slice| Unit { slice, direction: None, matrix: tone_matrix(vol, slice, &offsets, mode) })
        .collect())
}

/// Coarseness, contrast, busyness, complexity and strength.
pub fn ngtdm_features(t: &Ngtdm) -> Vec<FeatureValue> {
    let nvc = t.total();
    if nvc == 0 {
        return vec![FeatureValue::undefined("matrix holds no counts"); 5];
    }
    let nvc = nvc as f64;
    let present: Vec<(f64, f64, f64)> = (0..t.n.len())
        .filter(|&k| t.n[k] > 0)
        .map(|k| ((k + 1) as f64, t.n[k] as f64 / nvc, t.s[k]))
        .collect();
    let ngp = present.len() as f64;
    let s_total: f64 = t.s.iter().sum();
    let ps: f64 = present.iter().map(|&(_, p, s)| p * s).sum();

    let coarseness = if ps == 0.0 { MAX_COARSENESS } else { (1.0 / ps).min(MAX_COARSENESS) };
    let (mut contrast, mut busy_den, mut complexity, mut strength) = (0.0, 0.0, 0.0, 0.0);
    for &(i1, p1, s1) in &present {
        for &(i2, p2, s2) in &present {
            let d = i1 - i2;
            contrast += p1 * p2 * d * d;
            busy_den += (i1 * p1 - i2 * p2).abs();
            complexity += d.abs() * (p1 * s1 + p2 * s2) / (p1 + p2);
            strength += (p1 + p2) * d * d;
        }
    }
    let single = present.len() == 1;
    vec![
        FeatureValue::Value(coarseness),
        FeatureValue::Value(if single { 0.0 } else { contrast / (ngp * (ngp - 1.0)) * s_total / nvc }),
        if single { FeatureValue::Value(0.0) } else { FeatureValue::ratio(ps, busy_den, "no grey level contrast") },
        FeatureValue::Value(complexity / nvc),
        FeatureValue::Value(if s_total == 0.0 { 0.0 } else { strength / s_total }),
    ]
}
