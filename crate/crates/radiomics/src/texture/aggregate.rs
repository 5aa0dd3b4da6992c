//! Combining per-unit texture matrices into one feature vector.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CountMatrix, Dimension, Glcm, Ngtdm};
use crate::error::{Error, Result};
use crate::features::{mean_values, Family, FeatureValue};

/// A matrix built from one slice or the volume, and one direction or all.
#[derive(Debug, Clone, PartialEq)]
pub struct Unit<M> {
    pub slice: Option<usize>,
    pub direction: Option<usize>,
    pub matrix: M,
}

/// Matrices that can be merged and tested for emptiness.
pub trait TextureMatrix: Clone {
    fn is_empty(&self) -> bool;
    fn merge(&mut self, other: &Self);
}

impl TextureMatrix for Glcm {
    fn is_empty(&self) -> bool {
        self.total() == 0
    }
    fn merge(&mut self, other: &Self) {
        Glcm::merge(self, other)
    }
}

impl TextureMatrix for CountMatrix {
    fn is_empty(&self) -> bool {
        self.total() == 0
    }
    fn merge(&mut self, other: &Self) {
        CountMatrix::merge(self, other)
    }
}

impl TextureMatrix for Ngtdm {
    fn is_empty(&self) -> bool {
        self.total() == 0
    }
    fn merge(&mut self, other: &Self) {
        Ngtdm::merge(self, other)
    }
}

/// How units are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// Features of every slice and direction, averaged.
    SliceAverage2d,
    /// Directions merged per slice, features averaged over slices.
    SliceMerge2d,
    /// Every slice and direction merged.
    VolumeMerge2d,
    /// Features of every direction, averaged.
    DirectionAverage3d,
    /// Every direction merged.
    Merge3d,
    /// Features per slice, averaged.
    ZoneSliceAverage2d,
    /// Every slice merged.
    ZoneMerge2d,
    /// One matrix for the volume.
    ZoneVolume3d,
}

impl Aggregation {
    pub const ALL: [Aggregation; 8] = [
        Aggregation::SliceAverage2d,
        Aggregation::SliceMerge2d,
        Aggregation::VolumeMerge2d,
        Aggregation::DirectionAverage3d,
        Aggregation::Merge3d,
        Aggregation::ZoneSliceAverage2d,
        Aggregation::ZoneMerge2d,
        Aggregation::ZoneVolume3d,
    ];

    /// Permanent identifier of the aggregation method.
    pub fn id(self) -> &'static str {
        match self {
            Aggregation::SliceAverage2d => "BTW3",
            Aggregation::SliceMerge2d => "SUJT",
            Aggregation::VolumeMerge2d => "ZW7Z",
            Aggregation::DirectionAverage3d => "ITBB",
            Aggregation::Merge3d => "IAZD",
            Aggregation::ZoneSliceAverage2d => "8QNN",
            Aggregation::ZoneMerge2d => "62GR",
            Aggregation::ZoneVolume3d => "KOBO",
        }
    }

    /// Short code used in feature names.
    pub fn code(self) -> &'static str {
        match self {
            Aggregation::SliceAverage2d => "2D:avg",
            Aggregation::SliceMerge2d => "2D:mrg",
            Aggregation::VolumeMerge2d => "2D:vmrg",
            Aggregation::DirectionAverage3d => "3D:avg",
            Aggregation::Merge3d => "3D:mrg",
            Aggregation::ZoneSliceAverage2d => "2D",
            Aggregation::ZoneMerge2d => "2D:mrg",
            Aggregation::ZoneVolume3d => "3D",
        }
    }

    pub fn dimension(self) -> Dimension {
        match self {
            Aggregation::SliceAverage2d
            | Aggregation::SliceMerge2d
            | Aggregation::VolumeMerge2d
            | Aggregation::ZoneSliceAverage2d
            | Aggregation::ZoneMerge2d => Dimension::TwoD,
            _ => Dimension::ThreeD,
        }
    }

    /// True if the method aggregates matrices of `family`.
    pub fn applies_to(self, family: Family) -> bool {
        match family {
            Family::Cooccurrence | Family::RunLength => self.is_directional(),
            f if f.is_texture() => !self.is_directional(),
            _ => false,
        }
    }

    /// True for methods of families built per direction.
    pub fn is_directional(self) -> bool {
        matches!(
            self,
            Aggregation::SliceAverage2d
                | Aggregation::SliceMerge2d
                | Aggregation::VolumeMerge2d
                | Aggregation::DirectionAverage3d
                | Aggregation::Merge3d
        )
    }
}

/// Aggregated features and how many empty units were left out of averages.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregated {
    pub values: Vec<FeatureValue>,
    pub skipped: usize,
}

fn merged<M: TextureMatrix>(units: &[&Unit<M>]) -> M {
    let mut m = units[0].matrix.clone();
    for u in &units[1..] {
        m.merge(&u.matrix);
    }
    m
}

fn averaged<M: TextureMatrix>(mats: &[M], features: &impl Fn(&M) -> Vec<FeatureValue>) -> Aggregated {
    let kept: Vec<&M> = mats.iter().filter(|m| !m.is_empty()).collect();
    let skipped = mats.len() - kept.len();
    let per_unit: Vec<Vec<FeatureValue>> = kept.iter().map(|m| features(m)).collect();
    let n = features(&mats[0]).len();
    let values = (0..n)
        .map(|k| mean_values(&per_unit.iter().map(|f| f[k].clone()).collect::<Vec<_>>()))
        .collect();
    Aggregated { values, skipped }
}

/// Combines `units` by `method` and evaluates `features`.
///
/// Averages leave out units whose matrix holds no counts. Fails when the units
/// do not fit the method: wrong dimension, or directional units for a
/// non-directional method and vice versa.
pub fn aggregate<M: TextureMatrix>(
    units: &[Unit<M>],
    method: Aggregation,
    features: impl Fn(&M) -> Vec<FeatureValue>,
) -> Result<Aggregated> {
    if units.is_empty() {
        return Err(Error::Config("no texture units to aggregate".into()));
    }
    let per_slice = method.dimension() == Dimension::TwoD;
    let fits = units
        .iter()
        .all(|u| u.slice.is_some() == per_slice && u.direction.is_some() == method.is_directional());
    if !fits {
        return Err(Error::Config(format!("aggregation {} does not apply to these matrices", method.code())));
    }
    let all: Vec<&Unit<M>> = units.iter().collect();
    Ok(match method {
        Aggregation::SliceAverage2d | Aggregation::DirectionAverage3d | Aggregation::ZoneSliceAverage2d => {
            let mats: Vec<M> = units.iter().map(|u| u.matrix.clone()).collect();
            averaged(&mats, &features)
        }
        Aggregation::SliceMerge2d => {
            let mut by_slice: BTreeMap<usize, Vec<&Unit<M>>> = BTreeMap::new();
            for u in units {
                by_slice.entry(u.slice.unwrap_or(0)).or_default().push(u);
            }
            let mats: Vec<M> = by_slice.values().map(|us| merged(us)).collect();
            averaged(&mats, &features)
        }
        Aggregation::VolumeMerge2d | Aggregation::Merge3d | Aggregation::ZoneMerge2d | Aggregation::ZoneVolume3d => {
            Aggregated { values: features(&merged(&all)), skipped: 0 }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(slice: Option<usize>, direction: Option<usize>, entries: &[(u32, usize)]) -> Unit<CountMatrix> {
        let n = entries.len() as u64;
        Unit { slice, direction, matrix: CountMatrix::from_entries(2, entries, n) }
    }

    fn total(m: &CountMatrix) -> Vec<FeatureValue> {
        vec![FeatureValue::Value(m.total() as f64)]
    }

    #[test]
    fn averages_skip_empty_units() {
        let units = vec![unit(Some(0), None, &[(1, 1)]), unit(Some(1), None, &[]), unit(Some(2), None, &[(1, 1), (2, 2)])];
        let a = aggregate(&units, Aggregation::ZoneSliceAverage2d, total).unwrap();
        assert_eq!(a.values, vec![FeatureValue::Value(1.5)]);
        assert_eq!(a.skipped, 1);
        let m = aggregate(&units, Aggregation::ZoneMerge2d, total).unwrap();
        assert_eq!(m.values, vec![FeatureValue::Value(3.0)]);
    }

    #[test]
    fn slice_merge_groups_directions() {
        let units = vec![
            unit(Some(0), Some(0), &[(1, 1)]),
            unit(Some(0), Some(1), &[(1, 1)]),
            unit(Some(1), Some(0), &[(1, 1), (1, 1)]),
            unit(Some(1), Some(1), &[(1, 1), (1, 1)]),
        ];
        let a = aggregate(&units, Aggregation::SliceMerge2d, total).unwrap();
        assert_eq!(a.values, vec![FeatureValue::Value(3.0)]);
        let b = aggregate(&units, Aggregation::SliceAverage2d, total).unwrap();
        assert_eq!(b.values, vec![FeatureValue::Value(1.5)]);
    }

    #[test]
    fn mismatched_methods_are_rejected() {
        let units = vec![unit(None, None, &[(1, 1)])];
        assert!(matches!(aggregate(&units, Aggregation::Merge3d, total), Err(Error::Config(_))));
        assert!(matches!(aggregate(&units, Aggregation::ZoneMerge2d, total), Err(Error::Config(_))));
        assert!(aggregate(&units, Aggregation::ZoneVolume3d, total).is_ok());
    }
}
