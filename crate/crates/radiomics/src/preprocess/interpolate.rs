//! Resampling of image volumes and masks onto center-aligned grids.
//!
//! All methods are separable, so resampling runs as one 1D pass per axis.
//! Samples beyond the source grid see the edge intensity replicated.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{GridGeometry, ImageVolume, RoiMask};

/// Which axes are resampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterpolationMode {
    None,
    InPlane,
    Volumetric,
}

/// Image interpolation kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImageMethod {
    NearestNeighbour,
    Trilinear,
    TricubicSpline,
    TricubicConvolution,
}

/// Mask interpolation kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskMethod {
    NearestNeighbour,
    Trilinear,
}

/// Post-interpolation intensity rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rounding {
    None,
    NearestInteger,
}

/// Interpolation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpolationSpec {
    pub mode: InterpolationMode,
    /// Target spacing in mm; the z component is ignored in-plane.
    pub spacing: [f64; 3],
    pub image_method: ImageMethod,
    pub mask_method: MaskMethod,
    /// Partial-volume threshold for interpolated masks.
    pub threshold: f64,
    pub rounding: Rounding,
}

impl Default for InterpolationSpec {
    fn default() -> Self {
        Self {
            mode: InterpolationMode::None,
            spacing: [1.0; 3],
            image_method: ImageMethod::Trilinear,
            mask_method: MaskMethod::Trilinear,
            threshold: 0.5,
            rounding: Rounding::None,
        }
    }
}

impl InterpolationSpec {
    /// Checks spacing and threshold ranges.
    pub fn validate(&self) -> Result<()> {
        if self.mode != InterpolationMode::None
            && self.spacing.iter().any(|&s| !(s > 0.0 && s.is_finite()))
        {
            return Err(Error::Config(format!(
                "interpolation spacing must be positive, got {:?}",
                self.spacing
            )));
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::Config(format!(
                "partial-volume threshold must lie in (0, 1], got {}",
                self.threshold
            )));
        }
        Ok(())
    }

    fn axes(&self) -> usize {
        match self.mode {
            InterpolationMode::None => 0,
            InterpolationMode::InPlane => 2,
            InterpolationMode::Volumetric => 3,
        }
    }
}

/// Ceiling that treats ratios within 1e-9 (relative) of an integer as that integer.
fn robust_ceil(r: f64) -> usize {
    let n = r.round();
    if (r - n).abs() <= 1e-9 * r.abs().max(1.0) {
        n.max(1.0) as usize
    } else {
        r.ceil().max(1.0) as usize
    }
}

/// Target grid: `ceil(n·s_a/s_b)` points per axis, centered on the source grid.
pub fn plan_interpolation_grid(g: &GridGeometry, spec: &InterpolationSpec) -> Result<GridGeometry> {
    spec.validate()?;
    if spec.mode == InterpolationMode::None {
        return Err(Error::Config("interpolation mode is 'none'".into()));
    }
    let mut out = *g;
    for a in 0..spec.axes() {
        let (n_a, s_a, s_b) = (g.dims[a], g.spacing[a], spec.spacing[a]);
        let n_b = robust_ceil(n_a as f64 * s_a / s_b);
        out.dims[a] = n_b;
        out.spacing[a] = s_b;
        out.origin[a] = g.origin[a] + (s_a * (n_a - 1) as f64 - s_b * (n_b - 1) as f64) / 2.0;
    }
    Ok(out)
}

/// Per-target-sample source taps along one axis.
struct AxisTaps {
    /// Offset added to source indices before lookup into a padded line.
    pad: usize,
    taps: Vec<Vec<(usize, f64)>>,
    spline: bool,
}

fn keys_weight(t: f64) -> f64 {
    let a = -0.5;
    let t = t.abs();
    if t <= 1.0 {
        (a + 2.0) * t * t * t - (a + 3.0) * t * t + 1.0
    } else if t < 2.0 {
        a * t * t * t - 5.0 * a * t * t + 8.0 * a * t - 4.0 * a
    } else {
        0.0
    }
}

fn bspline_weights(t: f64) -> [f64; 4] {
    let u = 1.0 - t;
    [
        u * u * u / 6.0,
        (3.0 * t * t * t - 6.0 * t * t + 4.0) / 6.0,
        (-3.0 * t * t * t + 3.0 * t * t + 3.0 * t + 1.0) / 6.0,
        t * t * t / 6.0,
    ]
}

fn axis_taps(n_src: usize, src_origin: f64, src_spacing: f64, tgt: (usize, f64, f64), method: ImageMethod) -> AxisTaps {
    let (n_tgt, tgt_origin, tgt_spacing) = tgt;
    let coords: Vec<f64> = (0..n_tgt)
        .map(|k| (tgt_origin + k as f64 * tgt_spacing - src_origin) / src_spacing)
        .collect();
    let lo = coords.iter().cloned().fold(0.0f64, f64::min);
    let hi = coords.iter().cloned().fold((n_src - 1) as f64, f64::max);
    let pad = ((-lo).ceil().max(0.0) as usize).max((hi - (n_src - 1) as f64).ceil().max(0.0) as usize) + 3;
    let clamp = |i: i64| -> usize { (i.clamp(0, n_src as i64 - 1)) as usize + pad };
    let spline = method == ImageMethod::TricubicSpline;
    let taps = coords
        .iter()
        .map(|&u| match method {
            ImageMethod::NearestNeighbour => vec![(clamp(u.round_ties_even() as i64), 1.0)],
            ImageMethod::Trilinear => {
                let i0 = u.floor();
                let t = u - i0;
                let i0 = i0 as i64;
                if t == 0.0 {
                    vec![(clamp(i0), 1.0)]
                } else {
                    vec![(clamp(i0), 1.0 - t), (clamp(i0 + 1), t)]
                }
            }
            ImageMethod::TricubicConvolution => {
                let i0 = u.floor();
                let t = u - i0;
                let i0 = i0 as i64;
                (-1..=2).map(|d| (clamp(i0 + d), keys_weight(t - d as f64))).collect()
            }
            ImageMethod::TricubicSpline => {
                // Indices address the padded coefficient line directly.
                let up = u + pad as f64;
                let i0 = up.floor();
                let w = bspline_weights(up - i0);
                let i0 = i0 as i64;
                (0..4).map(|d| ((i0 - 1 + d as i64) as usize, w[d])).collect()
            }
        })
        .collect();
    AxisTaps { pad, taps, spline }
}

/// Cubic B-spline coefficients of a line with mirror-symmetric boundaries.
fn bspline_coefficients(line: &mut [f64]) {
    let n = line.len();
    if n < 2 {
        return;
    }
    let z = 3f64.sqrt() - 2.0;
    let gain = (1.0 - z) * (1.0 - 1.0 / z);
    for v in line.iter_mut() {
        *v *= gain;
    }
    // Exact causal initialisation for the mirror extension.
    let mut zn = z;
    let iz = 1.0 / z;
    let mut z2n = z.powi(n as i32 - 1);
    let mut sum = line[0] + z2n * line[n - 1];
    z2n *= z2n * iz;
    for v in line.iter().take(n - 1).skip(1) {
        sum += (zn + z2n) * v;
        zn *= z;
        z2n *= iz;
    }
    line[0] = sum / (1.0 - zn * zn);
    for k in 1..n {
        line[k] += z * line[k - 1];
    }
    line[n - 1] = (z / (z * z - 1.0)) * (line[n - 1] + z * line[n - 2]);
    for k in (0..n - 1).rev() {
        line[k] = z * (line[k + 1] - line[k]);
    }
}

/// Resamples every line along `axis` of a dense field.
fn resample_axis(data: &[f64], dims: [usize; 3], axis: usize, taps: &AxisTaps) -> (Vec<f64>, [usize; 3]) {
    let n_src = dims[axis];
    let n_tgt = taps.taps.len();
    let mut out_dims = dims;
    out_dims[axis] = n_tgt;
    let stride = match axis {
        0 => 1,
        1 => dims[0],
        _ => dims[0] * dims[1],
    };
    let out_stride = match axis {
        0 => 1,
        1 => out_dims[0],
        _ => out_dims[0] * out_dims[1],
    };
    // Lines are enumerated by their (other-axis) positions in scan order.
    let others: Vec<usize> = (0..3).filter(|&a| a != axis).collect();
    let n_lines = dims[others[0]] * dims[others[1]];
    let lines: Vec<Vec<f64>> = (0..n_lines)
        .into_par_iter()
        .map(|l| {
            let p0 = l % dims[others[0]];
            let p1 = l / dims[others[0]];
            let mut pos = [0usize; 3];
            pos[others[0]] = p0;
            pos[others[1]] = p1;
            let base = pos[0] + dims[0] * (pos[1] + dims[1] * pos[2]);
            let mut padded = vec![0.0; n_src + 2 * taps.pad];
            for (k, v) in padded.iter_mut().enumerate() {
                let s = (k as i64 - taps.pad as i64).clamp(0, n_src as i64 - 1) as usize;
                *v = data[base + s * stride];
            }
            if taps.spline {
                bspline_coefficients(&mut padded);
            }
            taps.taps
                .iter()
                .map(|t| t.iter().map(|&(i, w)| w * padded[i]).sum())
                .collect()
        })
        .collect();
    let mut out = vec![0.0; out_dims[0] * out_dims[1] * out_dims[2]];
    for (l, line) in lines.into_iter().enumerate() {
        let p0 = l % dims[others[0]];
        let p1 = l / dims[others[0]];
        let mut pos = [0usize; 3];
        pos[others[0]] = p0;
        pos[others[1]] = p1;
        let base = pos[0] + out_dims[0] * (pos[1] + out_dims[1] * pos[2]);
        for (k, v) in line.into_iter().enumerate() {
            out[base + k * out_stride] = v;
        }
    }
    (out, out_dims)
}

fn resample_field(data: &[f64], src: &GridGeometry, target: &GridGeometry, method: ImageMethod) -> Vec<f64> {
    let mut cur = data.to_vec();
    let mut dims = src.dims;
    for a in 0..3 {
        let same = src.dims[a] == target.dims[a]
            && src.spacing[a] == target.spacing[a]
            && src.origin[a] == target.origin[a];
        if same {
            continue;
        }
        let taps = axis_taps(
            src.dims[a],
            src.origin[a],
            src.spacing[a],
            (target.dims[a], target.origin[a], target.spacing[a]),
            method,
        );
        let (next, nd) = resample_axis(&cur, dims, a, &taps);
        cur = next;
        dims = nd;
    }
    cur
}

fn check_target(src: &GridGeometry, target: &GridGeometry, spec: &InterpolationSpec) -> Result<()> {
    spec.validate()?;
    if spec.mode == InterpolationMode::InPlane
        && (src.dims[2] != target.dims[2]
            || src.spacing[2] != target.spacing[2]
            || src.origin[2] != target.origin[2])
    {
        return Err(Error::Config("in-plane interpolation must keep the slice axis".into()));
    }
    Ok(())
}

/// Interpolates intensities at the target voxel centers.
pub fn resample_image(img: &ImageVolume, target: &GridGeometry, spec: &InterpolationSpec) -> Result<ImageVolume> {
    check_target(&img.geometry, target, spec)?;
    let mut data = resample_field(&img.data, &img.geometry, target, spec.image_method);
    if spec.rounding == Rounding::NearestInteger {
        for v in &mut data {
            *v = v.round_ties_even();
        }
    }
    ImageVolume::new(*target, data)
}

/// Interpolates a mask; trilinear fractions at or above the threshold become 1.
pub fn resample_mask(m: &RoiMask, target: &GridGeometry, spec: &InterpolationSpec) -> Result<RoiMask> {
    check_target(&m.geometry, target, spec)?;
    let field: Vec<f64> = m.labels.iter().map(|&l| l as f64).collect();
    let labels = match spec.mask_method {
        MaskMethod::NearestNeighbour => {
            resample_field(&field, &m.geometry, target, ImageMethod::NearestNeighbour)
                .into_iter()
                .map(|v| (v >= 0.5) as u8)
                .collect()
        }
        MaskMethod::Trilinear => resample_field(&field, &m.geometry, target, ImageMethod::Trilinear)
            .into_iter()
            .map(|v| (v >= spec.threshold) as u8)
            .collect(),
    };
    RoiMask::new(*target, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(mode: InterpolationMode, s: f64, method: ImageMethod) -> InterpolationSpec {
        InterpolationSpec { mode, spacing: [s; 3], image_method: method, ..Default::default() }
    }

    #[test]
    fn grid_plan_examples() {
        let g = GridGeometry::new([4, 4, 4], [3.0; 3], [0.0; 3]).unwrap();
        let t = plan_interpolation_grid(&g, &spec(InterpolationMode::Volumetric, 2.0, ImageMethod::Trilinear)).unwrap();
        assert_eq!(t.dims, [6, 6, 6]);
        assert_eq!(t.spacing, [2.0; 3]);
        assert_eq!(t.origin, [-0.5; 3]);
        assert_eq!(t.center(), g.center());

        let same = plan_interpolation_grid(&g, &spec(InterpolationMode::Volumetric, 3.0, ImageMethod::Trilinear)).unwrap();
        assert_eq!(same, g);

        let one = GridGeometry::new([1, 1, 1], [1.0; 3], [5.0; 3]).unwrap();
        let t1 = plan_interpolation_grid(&one, &spec(InterpolationMode::Volumetric, 3.0, ImageMethod::Trilinear)).unwrap();
        assert_eq!(t1.dims, [1, 1, 1]);
        assert_eq!(t1.origin, [5.0; 3]);

        let flat = plan_interpolation_grid(&g, &spec(InterpolationMode::InPlane, 2.0, ImageMethod::Trilinear)).unwrap();
        assert_eq!(flat.dims, [6, 6, 4]);
        assert_eq!(flat.spacing[2], 3.0);
        assert_eq!(flat.origin[2], 0.0);
    }

    #[test]
    fn constants_survive_every_method() {
        let g = GridGeometry::new([4, 3, 5], [1.3, 0.7, 2.1], [1.0, -2.0, 3.0]).unwrap();
        let img = ImageVolume::filled(g, 42.0);
        for m in [
            ImageMethod::NearestNeighbour,
            ImageMethod::Trilinear,
            ImageMethod::TricubicSpline,
            ImageMethod::TricubicConvolution,
        ] {
            let s = spec(InterpolationMode::Volumetric, 0.9, m);
            let t = plan_interpolation_grid(&g, &s).unwrap();
            let out = resample_image(&img, &t, &s).unwrap();
            assert!(out.data.iter().all(|&v| (v - 42.0).abs() < 1e-12), "{m:?}");
        }
    }

    #[test]
    fn linear_ramp_midpoints() {
        let g = GridGeometry::new([4, 1, 1], [1.0; 3], [0.0; 3]).unwrap();
        let img = ImageVolume::new(g, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let target = GridGeometry::new([7, 1, 1], [0.5, 1.0, 1.0], [0.0; 3]).unwrap();
        let s = spec(InterpolationMode::Volumetric, 0.5, ImageMethod::Trilinear);
        let out = resample_image(&img, &target, &s).unwrap();
        assert_eq!(out.data, vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
    }

    #[test]
    fn identity_grid_is_exact() {
        let g = GridGeometry::new([3, 4, 2], [1.0; 3], [0.0; 3]).unwrap();
        let img = ImageVolume::new(g, (0..24).map(|v| (v * 7 % 11) as f64).collect()).unwrap();
        for m in [ImageMethod::NearestNeighbour, ImageMethod::Trilinear] {
            let out = resample_image(&img, &g, &spec(InterpolationMode::Volumetric, 1.0, m)).unwrap();
            assert_eq!(out.data, img.data);
        }
    }

    #[test]
    fn spline_interpolates_samples() {
        let src = [3.0, -1.0, 4.0, 1.0, -5.0, 9.0, 2.0];
        let mut line = src.to_vec();
        bspline_coefficients(&mut line);
        for k in 0..src.len() {
            let w = bspline_weights(0.0);
            let get = |i: i64| -> f64 {
                let n = line.len() as i64;
                let m = if i < 0 { -i } else if i >= n { 2 * n - 2 - i } else { i };
                line[m as usize]
            };
            let v = w[0] * get(k as i64 - 1) + w[1] * get(k as i64) + w[2] * get(k as i64 + 1);
            assert!((v - src[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_overshoot_and_rounding() {
        let g = GridGeometry::new([4, 1, 1], [2.0, 1.0, 1.0], [0.0; 3]).unwrap();
        let img = ImageVolume::new(g, vec![0.0, 0.0, 10.0, 10.0]).unwrap();
        let target = GridGeometry::new([1, 1, 1], [1.0; 3], [1.5, 0.0, 0.0]).unwrap();
        let s = spec(InterpolationMode::Volumetric, 1.0, ImageMethod::TricubicConvolution);
        let v = resample_image(&img, &target, &s).unwrap().data[0];
        assert!(v < 0.0, "overshoot kept: {v}");
        let rounded = InterpolationSpec { rounding: Rounding::NearestInteger, ..s };
        let target2 = GridGeometry::new([1, 1, 1], [1.0; 3], [3.0, 0.0, 0.0]).unwrap();
        let img2 = ImageVolume::new(g, vec![0.0, 0.0, 5.0, 5.0]).unwrap();
        let lin = InterpolationSpec { image_method: ImageMethod::Trilinear, ..rounded };
        assert_eq!(resample_image(&img2, &target2, &lin).unwrap().data[0], 2.0);
    }

    #[test]
    fn mask_threshold_behaviour() {
        let g = GridGeometry::new([3, 3, 3], [1.0; 3], [0.0; 3]).unwrap();
        let full = RoiMask::filled(g, true);
        let s = spec(InterpolationMode::Volumetric, 0.5, ImageMethod::Trilinear);
        let t = plan_interpolation_grid(&g, &s).unwrap();
        assert!(resample_mask(&full, &t, &s).unwrap().labels.iter().all(|&l| l == 1));

        let mut labels = vec![0; 27];
        labels[13] = 1;
        let single = RoiMask::new(g, labels).unwrap();
        let out = resample_mask(&single, &t, &s).unwrap();
        for i in 0..t.len() {
            let w = t.world(t.position(i));
            let hat: f64 = (0..3).map(|a| (1.0 - (w[a] - 1.0).abs()).max(0.0)).product();
            assert_eq!(out.labels[i] == 1, hat >= 0.5);
        }
        let strict = InterpolationSpec { threshold: 1.0, ..s };
        let out = resample_mask(&single, &t, &strict).unwrap();
        assert_eq!(out.count(), 0);
    }
}
