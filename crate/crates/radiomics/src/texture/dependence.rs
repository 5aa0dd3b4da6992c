//! Neighbouring grey level dependence matrices.

use serde::{Deserialize, Serialize};

use super::{neighbour_offsets, CountMatrix, Dimension, LevelVolume, NeighbourhoodSpec, Unit};
use crate::error::Result;

/// Which voxels contribute to neighbourhood based matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeighbourhoodMode {
    /// Every ROI voxel, using whichever neighbours lie in the ROI.
    #[default]
    Standard,
    /// Only voxels whose whole neighbourhood lies in the grid and the ROI.
    Complete,
}

/// Dependence matrix of the slice or volume.
///
/// Column `j` counts voxels with `j − 1` dependent neighbours, i.e. neighbours
/// in the ROI whose level differs by at most the coarseness parameter.
pub fn dependence_matrix(
    vol: &LevelVolume,
    slice: Option<usize>,
    offsets: &[[i64; 3]],
    coarseness: u32,
    mode: NeighbourhoodMode,
) -> CountMatrix {
    let mut entries = Vec::new();
    for idx in vol.scope(slice) {
        let a = vol.levels[idx];
        if a == 0 {
            continue;
        }
        let p = vol.position(idx);
        let (mut dependent, mut present) = (0usize, 0usize);
        for &m in offsets {
            let b = vol.level_at(p, m);
            if b > 0 {
                present += 1;
                if a.abs_diff(b) <= coarseness {
                    dependent += 1;
                }
            }
        }
        if mode == NeighbourhoodMode::Complete && present < offsets.len() {
            continue;
        }
        entries.push((a, dependent + 1));
    }
    CountMatrix::from_entries(vol.n_levels as usize, &entries, vol.voxel_count(slice))
}

/// One matrix per slice for 2D, or one for the volume.
pub fn ngldm_build(
    vol: &LevelVolume,
    spec: &NeighbourhoodSpec,
    dim: Dimension,
    mode: NeighbourhoodMode,
) -> Result<Vec<Unit<CountMatrix>>> {
    let offsets = neighbour_offsets(spec, dim)?;
    Ok(vol
        .scopes(dim)
        .into_iter()
        .map(|slice| Unit {
            slice,
            direction: None,
            matrix: dependence_matrix(vol, slice, &offsets, spec.coarseness, mode),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::texture::worked;

    #[test]
    fn worked_complete_neighbourhood() {
        let v = worked::image();
        let u = ngldm_build(&v, &NeighbourhoodSpec::default(), Dimension::TwoD, NeighbourhoodMode::Complete).unwrap();
        let m = &u[0].matrix;
        let expected = [[0, 0, 0, 0], [0, 0, 1, 1], [0, 0, 1, 0], [1, 0, 0, 0]];
        for (i, row) in expected.iter().enumerate() {
            assert_eq!(m.row(i + 1, 4), row.to_vec());
        }
        assert_eq!(m.n_voxels, 16);
    }

    #[test]
    fn standard_mode_counts_every_voxel() {
        let v = worked::image();
        let u = ngldm_build(&v, &NeighbourhoodSpec::default(), Dimension::TwoD, NeighbourhoodMode::Standard).unwrap();
        assert_eq!(u[0].matrix.total(), 16);
        assert_eq!(u[0].matrix.features(true)[12].or_nan(), 1.0);
    }

    #[test]
    fn coarseness_widens_dependence() {
        let v = LevelVolume::new([3, 1, 1], vec![1, 2, 3], 3).unwrap();
        let s = NeighbourhoodSpec { coarseness: 1, ..Default::default() };
        let m = dependence_matrix(&v, None, &neighbour_offsets(&s, Dimension::TwoD).unwrap(), 1, NeighbourhoodMode::Standard);
        assert_eq!(m.get(2, 3), 1);
        assert_eq!(m.get(1, 2), 1);
    }
}
