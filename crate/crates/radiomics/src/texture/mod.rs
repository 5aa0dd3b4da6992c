//! Texture matrices of discretised grey levels and their feature families.
//!
//! Builders produce matrices per unit: one per (slice, direction) for the
//! directional families, one per slice or one for the volume otherwise.
//! [`aggregate`] turns units into a single feature vector per method.

pub mod aggregate;
pub mod cooccurrence;
pub mod counts;
pub mod dependence;
pub mod runlength;
pub mod tone;
pub mod zones;

use serde::{Deserialize, Serialize};

pub use aggregate::{aggregate, Aggregated, Aggregation, TextureMatrix, Unit};
pub use cooccurrence::{glcm_build, glcm_features, Glcm};
pub use counts::CountMatrix;
pub use dependence::{ngldm_build, NeighbourhoodMode};
pub use runlength::glrlm_build;
pub use tone::{ngtdm_build, ngtdm_features, Ngtdm};
pub use zones::{distance_map, gldzm_build, glszm_build};

use crate::error::{Error, Result};
use crate::preprocess::DiscretisedRoi;
use crate::volume::RoiMask;

/// Whether matrices are built per slice or over the volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dimension {
    #[serde(rename = "2D")]
    TwoD,
    #[serde(rename = "3D")]
    ThreeD,
}

/// Distance norm for neighbourhoods and direction vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Norm {
    #[default]
    Chebyshev,
    Manhattan,
    Euclidean,
}

impl Norm {
    pub fn length(self, m: [i64; 3]) -> f64 {
        let a = m.map(|v| v.abs());
        match self {
            Norm::Chebyshev => a[0].max(a[1]).max(a[2]) as f64,
            Norm::Manhattan => (a[0] + a[1] + a[2]) as f64,
            Norm::Euclidean => ((a[0] * a[0] + a[1] * a[1] + a[2] * a[2]) as f64).sqrt(),
        }
    }
}

/// Neighbourhood parameters shared by the texture families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NeighbourhoodSpec {
    /// Neighbourhood radius in voxels.
    pub distance: f64,
    pub norm: Norm,
    /// Largest grey level difference counted as dependent.
    pub coarseness: u32,
}

impl Default for NeighbourhoodSpec {
    fn default() -> Self {
        Self { distance: 1.0, norm: Norm::Chebyshev, coarseness: 0 }
    }
}

impl NeighbourhoodSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance.is_finite() && self.distance >= 1.0) {
            return Err(Error::Config(format!("neighbourhood distance must be at least 1, got {}", self.distance)));
        }
        if self.norm != Norm::Euclidean && self.distance.fract() != 0.0 {
            return Err(Error::Config(format!(
                "{:?} neighbourhood distance must be an integer, got {}",
                self.norm, self.distance
            )));
        }
        Ok(())
    }

    /// True for the default Chebyshev radius 1 neighbourhood.
    pub fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

/// Direction vectors of the default neighbourhood: 4 in-plane, then 9 out-of-plane.
const BASE_DIRECTIONS: [[i64; 3]; 13] = [
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [-1, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [-1, 0, 1],
    [0, 1, 1],
    [0, -1, 1],
    [1, 1, 1],
    [-1, 1, 1],
    [1, -1, 1],
    [-1, -1, 1],
];

/// One representative of each `±m` pair: z > 0, or z = 0 and y > 0, or z = y = 0 and x > 0.
fn is_canonical(m: [i64; 3]) -> bool {
    m[2] > 0 || (m[2] == 0 && (m[1] > 0 || (m[1] == 0 && m[0] > 0)))
}

fn offsets_where(dim: Dimension, reach: i64, keep: impl Fn([i64; 3]) -> bool) -> Vec<[i64; 3]> {
    let zr = if dim == Dimension::TwoD { 0 } else { reach };
    let mut out = Vec::new();
    for z in -zr..=zr {
        for y in -reach..=reach {
            for x in -reach..=reach {
                let m = [x, y, z];
                if m != [0, 0, 0] && keep(m) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Direction vectors for co-occurrence and run length matrices.
///
/// The Chebyshev norm scales the 13 (3D) or 4 (2D) base directions by the
/// distance. Other norms take every offset at the distance, or for the
/// Euclidean norm within `(δ − 1, δ]`, keeping one of each opposite pair.
pub fn direction_vectors(spec: &NeighbourhoodSpec, dim: Dimension) -> Result<Vec<[i64; 3]>> {
    spec.validate()?;
    let d = spec.distance;
    let n = if dim == Dimension::TwoD { 4 } else { 13 };
    Ok(match spec.norm {
        Norm::Chebyshev => BASE_DIRECTIONS[..n].iter().map(|m| m.map(|v| v * d as i64)).collect(),
        Norm::Manhattan => {
            offsets_where(dim, d as i64, |m| is_canonical(m) && Norm::Manhattan.length(m) == d)
        }
        Norm::Euclidean => offsets_where(dim, d.floor() as i64, |m| {
            let l = Norm::Euclidean.length(m);
            is_canonical(m) && l <= d + 1e-12 && l > d - 1.0 + 1e-12
        }),
    })
}

/// All non-zero offsets within the neighbourhood radius.
pub fn neighbour_offsets(spec: &NeighbourhoodSpec, dim: Dimension) -> Result<Vec<[i64; 3]>> {
    spec.validate()?;
    let d = spec.distance;
    Ok(offsets_where(dim, d.floor() as i64, |m| spec.norm.length(m) <= d + 1e-12))
}

/// Discretised grey levels on the image grid; level 0 marks voxels outside the intensity mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelVolume {
    pub dims: [usize; 3],
    pub levels: Vec<u32>,
    /// Number of grey levels; in-mask levels lie in `1..=n_levels`.
    pub n_levels: u32,
}

impl LevelVolume {
    pub fn new(dims: [usize; 3], levels: Vec<u32>, n_levels: u32) -> Result<Self> {
        if levels.len() != dims[0] * dims[1] * dims[2] {
            return Err(Error::Mismatch(format!(
                "{} levels for a {}x{}x{} grid",
                levels.len(),
                dims[0],
                dims[1],
                dims[2]
            )));
        }
        if let Some(&bad) = levels.iter().find(|&&l| l > n_levels) {
            return Err(Error::Domain(format!("grey level {bad} exceeds the {n_levels} levels")));
        }
        Ok(Self { dims, levels, n_levels })
    }

    /// Places the discretised ROI levels back on the grid of `mask`.
    pub fn from_roi(mask: &RoiMask, roi: &DiscretisedRoi) -> Result<Self> {
        if mask.count() != roi.levels.len() {
            return Err(Error::Mismatch("discretised ROI does not match the intensity mask".into()));
        }
        let mut levels = vec![0u32; mask.labels.len()];
        let mut it = roi.levels.iter();
        for (l, &m) in levels.iter_mut().zip(&mask.labels) {
            if m == 1 {
                *l = *it.next().expect("counted above");
            }
        }
        Self::new(mask.geometry.dims, levels, roi.n_levels)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn index(&self, p: [usize; 3]) -> usize {
        p[0] + self.dims[0] * (p[1] + self.dims[1] * p[2])
    }

    pub fn position(&self, idx: usize) -> [usize; 3] {
        let (nx, ny) = (self.dims[0], self.dims[1]);
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    /// Index of `p + m` when it lies on the grid.
    pub fn shifted(&self, p: [usize; 3], m: [i64; 3]) -> Option<usize> {
        let mut q = [0usize; 3];
        for a in 0..3 {
            let v = p[a] as i64 + m[a];
            if v < 0 || v >= self.dims[a] as i64 {
                return None;
            }
            q[a] = v as usize;
        }
        Some(self.index(q))
    }

    /// Level at `p + m`, 0 when off the grid or outside the mask.
    pub fn level_at(&self, p: [usize; 3], m: [i64; 3]) -> u32 {
        self.shifted(p, m).map_or(0, |i| self.levels[i])
    }

    /// Voxel indices in slice `z`, or of the whole volume, in scan order.
    pub(crate) fn scope(&self, slice: Option<usize>) -> std::ops::Range<usize> {
        let plane = self.dims[0] * self.dims[1];
        match slice {
            Some(z) => z * plane..(z + 1) * plane,
            None => 0..self.len(),
        }
    }

    pub fn voxel_count(&self, slice: Option<usize>) -> u64 {
        self.levels[self.scope(slice)].iter().filter(|&&l| l > 0).count() as u64
    }

    /// Slices for a 2D build, or the single volume scope for 3D.
    pub(crate) fn scopes(&self, dim: Dimension) -> Vec<Option<usize>> {
        match dim {
            Dimension::TwoD => (0..self.dims[2]).map(Some).collect(),
            Dimension::ThreeD => vec![None],
        }
    }
}
