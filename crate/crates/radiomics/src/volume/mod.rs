//! Image volumes, grids, ROI masks and contour rasterization.
//!
//! Grids are stored x-fastest with slices stacked along z. World
//! coordinates of a voxel center are `origin + index * spacing`.

mod contour;

pub use contour::{parse_contours, rasterize_contours, ContourSet, Polygon};

use crate::error::{Error, Result};

/// Dimensions, spacing (mm) and origin (mm) of a voxel grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
}

impl GridGeometry {
    /// Validated constructor: every dimension ≥ 1, every spacing > 0 and finite.
    pub fn new(dims: [usize; 3], spacing: [f64; 3], origin: [f64; 3]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::Geometry(format!("dimensions must be >= 1, got {dims:?}")));
        }
        if spacing.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::Geometry(format!("spacing must be positive, got {spacing:?}")));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::Geometry(format!("origin must be finite, got {origin:?}")));
        }
        Ok(Self { dims, spacing, origin })
    }

    /// Number of voxels.
    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// Always false for a validated grid.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Linear index of a grid position (x fastest).
    #[inline]
    pub fn index(&self, p: [usize; 3]) -> usize {
        p[0] + self.dims[0] * (p[1] + self.dims[1] * p[2])
    }

    /// Grid position of a linear index.
    #[inline]
    pub fn position(&self, idx: usize) -> [usize; 3] {
        let x = idx % self.dims[0];
        let r = idx / self.dims[0];
        [x, r % self.dims[1], r / self.dims[1]]
    }

    /// Linear index of a signed position, or `None` outside the grid.
    #[inline]
    pub fn checked_index(&self, p: [i64; 3]) -> Option<usize> {
        for a in 0..3 {
            if p[a] < 0 || p[a] >= self.dims[a] as i64 {
                return None;
            }
        }
        Some(self.index([p[0] as usize, p[1] as usize, p[2] as usize]))
    }

    /// Volume of a single voxel in mm³.
    pub fn voxel_volume(&self) -> f64 {
        self.spacing[0] * self.spacing[1] * self.spacing[2]
    }

    /// World coordinate of a voxel center without bounds checking.
    #[inline]
    pub fn world(&self, p: [usize; 3]) -> [f64; 3] {
        [
            self.origin[0] + p[0] as f64 * self.spacing[0],
            self.origin[1] + p[1] as f64 * self.spacing[1],
            self.origin[2] + p[2] as f64 * self.spacing[2],
        ]
    }

    /// World coordinate of the grid center.
    pub fn center(&self) -> [f64; 3] {
        let mut c = [0.0; 3];
        for a in 0..3 {
            c[a] = self.origin[a] + 0.5 * (self.dims[a] - 1) as f64 * self.spacing[a];
        }
        c
    }
}

/// World coordinate of the voxel center at `index`.
pub fn grid_to_world(index: [usize; 3], g: &GridGeometry) -> Result<[f64; 3]> {
    if (0..3).any(|a| index[a] >= g.dims[a]) {
        return Err(Error::OutOfBounds { index, dims: g.dims });
    }
    Ok(g.world(index))
}

/// Continuous grid coordinate of a world position.
pub fn world_to_grid(p: [f64; 3], g: &GridGeometry) -> [f64; 3] {
    [
        (p[0] - g.origin[0]) / g.spacing[0],
        (p[1] - g.origin[1]) / g.spacing[1],
        (p[2] - g.origin[2]) / g.spacing[2],
    ]
}

/// Dense single-channel intensity volume.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageVolume {
    pub geometry: GridGeometry,
    pub data: Vec<f64>,
}

impl ImageVolume {
    /// Wraps intensities in scan order; the length must match the grid.
    pub fn new(geometry: GridGeometry, data: Vec<f64>) -> Result<Self> {
        if data.len() != geometry.len() {
            return Err(Error::Mismatch(format!(
                "{} intensities for a grid of {} voxels",
                data.len(),
                geometry.len()
            )));
        }
        Ok(Self { geometry, data })
    }

    /// Volume filled with one value.
    pub fn filled(geometry: GridGeometry, value: f64) -> Self {
        Self { data: vec![value; geometry.len()], geometry }
    }

    #[inline]
    pub fn get(&self, p: [usize; 3]) -> f64 {
        self.data[self.geometry.index(p)]
    }
}

/// Binary ROI mask, one byte per voxel.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiMask {
    pub geometry: GridGeometry,
    pub labels: Vec<u8>,
}

impl RoiMask {
    /// Wraps labels in scan order; every label must be 0 or 1.
    pub fn new(geometry: GridGeometry, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != geometry.len() {
            return Err(Error::Mismatch(format!(
                "{} labels for a grid of {} voxels",
                labels.len(),
                geometry.len()
            )));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::Domain("mask labels must be 0 or 1".into()));
        }
        Ok(Self { geometry, labels })
    }

    /// Mask with every voxel set to `label`.
    pub fn filled(geometry: GridGeometry, label: bool) -> Self {
        Self { labels: vec![label as u8; geometry.len()], geometry }
    }

    #[inline]
    pub fn contains(&self, p: [usize; 3]) -> bool {
        self.labels[self.geometry.index(p)] == 1
    }

    /// Number of voxels labelled 1.
    pub fn count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    /// Inclusive grid bounding box of the labelled voxels.
    pub fn bounding_box(&self) -> Option<([usize; 3], [usize; 3])> {
        let mut lo = [usize::MAX; 3];
        let mut hi = [0usize; 3];
        let mut any = false;
        for (i, &l) in self.labels.iter().enumerate() {
            if l == 1 {
                any = true;
                let p = self.geometry.position(i);
                for a in 0..3 {
                    lo[a] = lo[a].min(p[a]);
                    hi[a] = hi[a].max(p[a]);
                }
            }
        }
        any.then_some((lo, hi))
    }
}

/// Morphological and intensity masks over the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiMaskPair {
    pub morphological: RoiMask,
    pub intensity: RoiMask,
}

impl RoiMaskPair {
    /// Pair whose masks start out identical.
    pub fn from_mask(mask: RoiMask) -> Self {
        Self { intensity: mask.clone(), morphological: mask }
    }

    /// Validated constructor: equal geometry and intensity ⊆ morphological.
    pub fn new(morphological: RoiMask, intensity: RoiMask) -> Result<Self> {
        if morphological.geometry != intensity.geometry {
            return Err(Error::Mismatch("mask pair geometries differ".into()));
        }
        if intensity
            .labels
            .iter()
            .zip(&morphological.labels)
            .any(|(&i, &m)| i > m)
        {
            return Err(Error::Mismatch(
                "intensity mask voxel outside the morphological mask".into(),
            ));
        }
        Ok(Self { morphological, intensity })
    }
}

/// World coordinates of voxel centers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VoxelPointSet {
    pub points: Vec<[f64; 3]>,
}

/// Intensities of the ROI voxels and their centers, in scan order.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiIntensitySet {
    pub values: Vec<f64>,
    pub centers: VoxelPointSet,
}

impl RoiIntensitySet {
    /// Number of voxels.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Voxel centers of every labelled voxel.
pub fn mask_points(m: &RoiMask) -> VoxelPointSet {
    let points = m
        .labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == 1)
        .map(|(i, _)| m.geometry.world(m.geometry.position(i)))
        .collect();
    VoxelPointSet { points }
}

/// Intensities and centers of the voxels selected by `m`, x fastest.
pub fn extract_intensity_set(img: &ImageVolume, m: &RoiMask) -> Result<RoiIntensitySet> {
    if img.geometry != m.geometry {
        return Err(Error::Mismatch("image and mask geometries differ".into()));
    }
    let mut values = Vec::new();
    let mut points = Vec::new();
    for (i, &l) in m.labels.iter().enumerate() {
        if l == 1 {
            values.push(img.data[i]);
            points.push(img.geometry.world(img.geometry.position(i)));
        }
    }
    if values.is_empty() {
        return Err(Error::EmptyRoi("roi extraction".into()));
    }
    Ok(RoiIntensitySet { values, centers: VoxelPointSet { points } })
}

/// Extends the volume by `margin` voxels per side along each axis, copying
/// the nearest edge intensity. Original voxels keep their world position.
pub fn pad_replicate(img: &ImageVolume, margin: [usize; 3]) -> ImageVolume {
    let g = &img.geometry;
    let dims = [
        g.dims[0] + 2 * margin[0],
        g.dims[1] + 2 * margin[1],
        g.dims[2] + 2 * margin[2],
    ];
    let origin = [
        g.origin[0] - margin[0] as f64 * g.spacing[0],
        g.origin[1] - margin[1] as f64 * g.spacing[1],
        g.origin[2] - margin[2] as f64 * g.spacing[2],
    ];
    let geometry = GridGeometry { dims, spacing: g.spacing, origin };
    let src = |p: usize, a: usize| -> usize {
        (p as i64 - margin[a] as i64).clamp(0, g.dims[a] as i64 - 1) as usize
    };
    let mut data = Vec::with_capacity(geometry.len());
    for z in 0..dims[2] {
        let sz = src(z, 2);
        for y in 0..dims[1] {
            let sy = src(y, 1);
            for x in 0..dims[0] {
                data.push(img.get([src(x, 0), sy, sz]));
            }
        }
    }
    ImageVolume { geometry, data }
}
