//! Local and global intensity peaks.
//!
//! The peak value at a voxel is the mean intensity of all image voxels whose
//! centers lie within a 1 cm³ sphere around it, regardless of ROI membership.
//! Neighbours outside the image are skipped.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::volume::{ImageVolume, RoiMask};

/// Radius in mm of a sphere with a volume of 1 cm³.
pub fn peak_radius() -> f64 {
    (3.0 / (4.0 * std::f64::consts::PI)).cbrt() * 10.0
}

/// Integer offsets whose world distance from the origin voxel is at most `radius`.
pub fn sphere_offsets(spacing: [f64; 3], radius: f64) -> Vec<[i64; 3]> {
    let reach: Vec<i64> = spacing.iter().map(|s| (radius / s).floor() as i64).collect();
    let mut out = Vec::new();
    for k in -reach[2]..=reach[2] {
        for j in -reach[1]..=reach[1] {
            for i in -reach[0]..=reach[0] {
                let d2 = (i as f64 * spacing[0]).powi(2)
                    + (j as f64 * spacing[1]).powi(2)
                    + (k as f64 * spacing[2]).powi(2);
                if d2 <= radius * radius {
                    out.push([i, j, k]);
                }
            }
        }
    }
    out
}

fn sphere_mean(img: &ImageVolume, offsets: &[[i64; 3]], at: [usize; 3]) -> f64 {
    let g = &img.geometry;
    let (mut sum, mut n) = (0.0, 0usize);
    for o in offsets {
        let p = [at[0] as i64 + o[0], at[1] as i64 + o[1], at[2] as i64 + o[2]];
        if let Some(idx) = g.checked_index(p) {
            sum += img.data[idx];
            n += 1;
        }
    }
    sum / n as f64
}

fn check(img: &ImageVolume, m: &RoiMask) -> Result<()> {
    if img.geometry != m.geometry {
        return Err(Error::Mismatch("image and mask geometries differ".into()));
    }
    if m.count() == 0 {
        return Err(Error::EmptyRoi("intensity peak".into()));
    }
    Ok(())
}

/// Highest sphere mean among the voxels holding the ROI maximum intensity.
pub fn local_intensity_peak(img: &ImageVolume, m: &RoiMask) -> Result<f64> {
    check(img, m)?;
    let g = &img.geometry;
    let top = (0..g.len())
        .filter(|&i| m.labels[i] == 1)
        .map(|i| img.data[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let offsets = sphere_offsets(g.spacing, peak_radius());
    Ok((0..g.len())
        .filter(|&i| m.labels[i] == 1 && img.data[i] == top)
        .map(|i| sphere_mean(img, &offsets, g.position(i)))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Highest sphere mean over all ROI voxels.
pub fn global_intensity_peak(img: &ImageVolume, m: &RoiMask) -> Result<f64> {
    check(img, m)?;
    let g = &img.geometry;
    let offsets = sphere_offsets(g.spacing, peak_radius());
    let means: Vec<f64> = (0..g.len())
        .into_par_iter()
        .filter(|&i| m.labels[i] == 1)
        .map(|i| sphere_mean(img, &offsets, g.position(i)))
        .collect();
    Ok(means.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::GridGeometry;

    fn grid(n: usize, s: f64) -> GridGeometry {
        GridGeometry::new([n, n, n], [s, s, s], [0.0; 3]).unwrap()
    }

    #[test]
    fn radius_is_one_cubic_centimetre() {
        let r = peak_radius();
        assert!((4.0 / 3.0 * std::f64::consts::PI * r.powi(3) - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn ball_counts_by_enumeration() {
        let r = peak_radius();
        for (s, expect) in [(2.0, 123usize), (3.0, 33)] {
            let mut n = 0;
            for k in -10i64..=10 {
                for j in -10i64..=10 {
                    for i in -10i64..=10 {
                        if ((i * i + j * j + k * k) as f64).sqrt() * s <= r {
                            n += 1;
                        }
                    }
                }
            }
            assert_eq!(n, expect);
            assert_eq!(sphere_offsets([s; 3], r).len(), expect);
        }
    }

    #[test]
    fn hot_voxel() {
        let g = grid(9, 2.0);
        let mut img = ImageVolume::filled(g, 0.0);
        let c = g.index([4, 4, 4]);
        img.data[c] = 100.0;
        let m = RoiMask::filled(g, true);
        let v = local_intensity_peak(&img, &m).unwrap();
        assert!((v - 100.0 / 123.0).abs() < 1e-12);
        // Clipped spheres near the border average fewer voxels.
        assert!(global_intensity_peak(&img, &m).unwrap() > v);
        let mut only = RoiMask::filled(g, false);
        only.labels[c] = 1;
        assert_eq!(global_intensity_peak(&img, &only).unwrap(), v);
    }

    #[test]
    fn constant_image() {
        let g = grid(4, 1.0);
        let img = ImageVolume::filled(g, 3.5);
        let m = RoiMask::filled(g, true);
        assert_eq!(local_intensity_peak(&img, &m).unwrap(), 3.5);
        assert_eq!(global_intensity_peak(&img, &m).unwrap(), 3.5);
    }

    #[test]
    fn tied_maxima_take_the_higher_mean() {
        let g = GridGeometry::new([20, 1, 1], [5.0, 5.0, 5.0], [0.0; 3]).unwrap();
        let mut img = ImageVolume::filled(g, 0.0);
        // Radius 6.2 mm at 5 mm spacing reaches one neighbour each way.
        img.data[3] = 10.0;
        img.data[15] = 10.0;
        img.data[16] = 5.0;
        let m = RoiMask::filled(g, true);
        assert!((local_intensity_peak(&img, &m).unwrap() - 5.0).abs() < 1e-12);
    }
}
