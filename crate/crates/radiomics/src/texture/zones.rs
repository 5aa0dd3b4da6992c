//! Grey level size zone and distance zone matrices.

use std::collections::VecDeque;

use super::{neighbour_offsets, CountMatrix, Dimension, LevelVolume, NeighbourhoodSpec, Norm, Unit};
use crate::error::{Error, Result};

/// A connected set of voxels sharing one grey level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Zone {
    pub level: u32,
    pub voxels: Vec<usize>,
}

/// Connected zones of equal grey level within the slice or volume, in scan order of their first voxel.
pub fn zones(vol: &LevelVolume, slice: Option<usize>, linkage: &[[i64; 3]]) -> Vec<Zone> {
    let mut seen = vec![false; vol.len()];
    let mut out = Vec::new();
    for start in vol.scope(slice) {
        let level = vol.levels[start];
        if level == 0 || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut voxels = vec![start];
        let mut k = 0;
        while k < voxels.len() {
            let p = vol.position(voxels[k]);
            k += 1;
            for &m in linkage {
                if let Some(q) = vol.shifted(p, m) {
                    if !seen[q] && vol.levels[q] == level {
                        seen[q] = true;
                        voxels.push(q);
                    }
                }
            }
        }
        out.push(Zone { level, voxels });
    }
    out
}

/// One size zone matrix per slice for 2D, or one for the volume.
///
/// Zones are linked through the neighbourhood of `spec`.
pub fn glszm_build(vol: &LevelVolume, spec: &NeighbourhoodSpec, dim: Dimension) -> Result<Vec<Unit<CountMatrix>>> {
    let linkage = neighbour_offsets(spec, dim)?;
    Ok(vol
        .scopes(dim)
        .into_iter()
        .map(|slice| {
            let entries: Vec<(u32, usize)> =
                zones(vol, slice, &linkage).iter().map(|z| (z.level, z.voxels.len())).collect();
            let matrix = CountMatrix::from_entries(vol.n_levels as usize, &entries, vol.voxel_count(slice));
            Unit { slice, direction: None, matrix }
        })
        .collect())
}

/// Distance of every ROI voxel to the ROI edge; 0 outside the ROI.
///
/// Voxels next to a non-ROI voxel, or on the grid border, have distance 1.
/// Steps follow the radius 1 neighbourhood of `norm`, in-plane for 2D.
pub fn distance_map(inside: &[bool], dims: [usize; 3], dim: Dimension, norm: Norm) -> Result<Vec<u32>> {
    let grid = LevelVolume::new(dims, inside.iter().map(|&b| u32::from(b)).collect(), 1)?;
    let steps = neighbour_offsets(&NeighbourhoodSpec { distance: 1.0, norm, coarseness: 0 }, dim)?;
    let mut dist = vec![0u32; inside.len()];
    let mut queue = VecDeque::new();
    for idx in 0..inside.len() {
        if !inside[idx] {
            continue;
        }
        let p = grid.position(idx);
        if steps.iter().any(|&m| grid.level_at(p, m) == 0) {
            dist[idx] = 1;
            queue.push_back(idx);
        }
    }
    while let Some(idx) = queue.pop_front() {
        let p = grid.position(idx);
        for &m in &steps {
            if let Some(q) = grid.shifted(p, m) {
                if inside[q] && dist[q] == 0 {
                    dist[q] = dist[idx] + 1;
                    queue.push_back(q);
                }
            }
        }
    }
    Ok(dist)
}

/// One distance zone matrix per slice for 2D, or one for the volume.
///
/// Zones come from the intensity mask and are linked through the neighbourhood
/// of `spec`; distances are measured to the edge of `morphological` with steps
/// of `distance_norm`. A zone's distance is the smallest over its voxels.
pub fn gldzm_build(
    vol: &LevelVolume,
    morphological: &[bool],
    spec: &NeighbourhoodSpec,
    distance_norm: Norm,
    dim: Dimension,
) -> Result<Vec<Unit<CountMatrix>>> {
    if morphological.len() != vol.len() {
        return Err(Error::Mismatch("morphological mask does not match the level grid".into()));
    }
    if vol.levels.iter().zip(morphological).any(|(&l, &m)| l > 0 && !m) {
        return Err(Error::Domain("intensity mask voxel outside the morphological mask".into()));
    }
    let dist = distance_map(morphological, vol.dims, dim, distance_norm)?;
    let linkage = neighbour_offsets(spec, dim)?;
    Ok(vol
        .scopes(dim)
        .into_iter()
        .map(|slice| {
            let entries: Vec<(u32, usize)> = zones(vol, slice, &linkage)
                .iter()
                .map(|z| (z.level, z.voxels.iter().map(|&v| dist[v]).min().unwrap_or(1) as usize))
                .collect();
            let matrix = CountMatrix::from_entries(vol.n_levels as usize, &entries, vol.voxel_count(slice));
            Unit { slice, direction: None, matrix }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::texture::worked;

    #[test]
    fn worked_size_zones() {
        let v = worked::image();
        let u = glszm_build(&v, &NeighbourhoodSpec::default(), Dimension::TwoD).unwrap();
        let m = &u[0].matrix;
        let expected = [[2, 1, 0, 0, 0], [0, 0, 0, 0, 1], [1, 0, 1, 0, 0], [1, 1, 0, 0, 0]];
        for (i, row) in expected.iter().enumerate() {
            assert_eq!(m.row(i + 1, 5), row.to_vec());
        }
        let f = m.features(false);
        assert!((f[0].or_nan() - 0.5814).abs() < 5e-5);
        assert_eq!(f[12].or_nan(), 0.5);
    }

    #[test]
    fn worked_distance_map() {
        let dist = distance_map(&[true; 16], [4, 4, 1], Dimension::TwoD, Norm::Manhattan).unwrap();
        assert_eq!(dist, vec![1, 1, 1, 1, 1, 2, 2, 1, 1, 2, 2, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn worked_distance_zones() {
        let v = worked::image();
        let linkage = NeighbourhoodSpec { norm: Norm::Manhattan, ..Default::default() };
        let u = gldzm_build(&v, &[true; 16], &linkage, Norm::Manhattan, Dimension::TwoD).unwrap();
        let m = &u[0].matrix;
        let expected = [[3, 0], [2, 0], [2, 0], [1, 1]];
        for (i, row) in expected.iter().enumerate() {
            assert_eq!(m.row(i + 1, 2), row.to_vec());
        }
        let f = m.features(false);
        assert!((f[0].or_nan() - (8.0 + 0.25) / 9.0).abs() < 1e-12);
        assert!((f[12].or_nan() - 9.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn distance_inside_a_cube() {
        let dims = [5, 5, 5];
        let dist = distance_map(&[true; 125], dims, Dimension::ThreeD, Norm::Manhattan).unwrap();
        assert_eq!(dist[2 + 5 * (2 + 5 * 2)], 3);
        assert_eq!(*dist.iter().max().unwrap(), 3);
    }

    #[test]
    fn intensity_outside_morphology_is_rejected() {
        let v = LevelVolume::new([2, 1, 1], vec![1, 1], 1).unwrap();
        let r = gldzm_build(&v, &[true, false], &NeighbourhoodSpec::default(), Norm::Manhattan, Dimension::ThreeD);
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
