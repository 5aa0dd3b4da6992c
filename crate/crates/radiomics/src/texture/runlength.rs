//! Grey level run length matrices.

use super::{direction_vectors, CountMatrix, Dimension, LevelVolume, NeighbourhoodSpec, Unit};
use crate::error::Result;

/// Maximal runs of equal grey level along `m` within the slice or volume.
///
/// Voxels outside the mask end a run.
pub fn runs(vol: &LevelVolume, slice: Option<usize>, m: [i64; 3]) -> CountMatrix {
    let back = m.map(|v| -v);
    let mut entries = Vec::new();
    for idx in vol.scope(slice) {
        let a = vol.levels[idx];
        if a == 0 {
            continue;
        }
        let p = vol.position(idx);
        if vol.level_at(p, back) == a {
            continue;
        }
        let mut len = 1;
        let mut cur = p;
        while let Some(next) = vol.shifted(cur, m) {
            if vol.levels[next] != a {
                break;
            }
            len += 1;
            cur = vol.position(next);
        }
        entries.push((a, len));
    }
    CountMatrix::from_entries(vol.n_levels as usize, &entries, vol.voxel_count(slice))
}

/// One run length matrix per direction, per slice for 2D and over the volume for 3D.
pub fn glrlm_build(vol: &LevelVolume, spec: &NeighbourhoodSpec, dim: Dimension) -> Result<Vec<Unit<CountMatrix>>> {
    let dirs = direction_vectors(spec, dim)?;
    let mut units = Vec::new();
    for slice in vol.scopes(dim) {
        for (d, &m) in dirs.iter().enumerate() {
            units.push(Unit { slice, direction: Some(d), matrix: runs(vol, slice, m) });
        }
    }
    Ok(units)
}
