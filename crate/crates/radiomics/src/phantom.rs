//! Bundled worked examples with their reference tables, checked end to end.

use crate::intensity::statistical_features;
use crate::morphology::{build_mesh, mesh_area, mesh_volume};
use crate::preprocess::{
    plan_interpolation_grid, prepare_ivh, ImageMethod, InterpolationMode, InterpolationSpec, IvhMode,
    ResegmentationSpec,
};
use crate::texture::cooccurrence::{one_sided, symmetric};
use crate::texture::{
    direction_vectors, distance_map, gldzm_build, glrlm_build, glszm_build, ngldm_build, ngtdm_build, CountMatrix,
    Dimension, LevelVolume, NeighbourhoodMode, NeighbourhoodSpec, Norm,
};
use crate::volume::{GridGeometry, RoiMask};

/// The 4x4 grey level example; printed rows run top to bottom, so y = 3 − row.
pub const PRINTED: [[u32; 4]; 4] = [[1, 2, 2, 3], [1, 2, 3, 3], [4, 2, 4, 1], [4, 1, 2, 3]];

/// Symmetric co-occurrence matrices for directions (1,0), (1,1), (0,1), (−1,1).
pub const GLCM_SYMMETRIC: [[[u64; 4]; 4]; 4] = [
    [[0, 3, 0, 2], [3, 2, 3, 2], [0, 3, 2, 0], [2, 2, 0, 0]],
    [[0, 2, 0, 1], [2, 2, 1, 2], [0, 1, 2, 1], [1, 2, 1, 0]],
    [[2, 1, 2, 1], [1, 4, 1, 1], [2, 1, 2, 1], [1, 1, 1, 2]],
    [[0, 2, 1, 1], [2, 2, 2, 1], [1, 2, 0, 1], [1, 1, 1, 0]],
];

/// One-sided co-occurrence counts for direction (1,0).
pub const GLCM_ONE_SIDED: [[u64; 4]; 4] = [[0, 3, 0, 0], [0, 1, 3, 1], [0, 0, 1, 0], [2, 1, 0, 0]];

/// Difference and sum probabilities of the (1,0) matrix, to two decimals.
pub const GLCM_DIFFERENCE: [f64; 4] = [0.17, 0.50, 0.17, 0.17];
pub const GLCM_SUM: [f64; 7] = [0.00, 0.25, 0.08, 0.42, 0.25, 0.00, 0.00];

/// Run length matrices per direction, rows are grey levels, columns run lengths.
pub const GLRLM: [[[u64; 4]; 4]; 4] = [
    [[4, 0, 0, 0], [3, 1, 0, 0], [2, 1, 0, 0], [3, 0, 0, 0]],
    [[4, 0, 0, 0], [3, 1, 0, 0], [2, 1, 0, 0], [3, 0, 0, 0]],
    [[2, 1, 0, 0], [2, 0, 1, 0], [2, 1, 0, 0], [1, 1, 0, 0]],
    [[4, 0, 0, 0], [3, 1, 0, 0], [4, 0, 0, 0], [3, 0, 0, 0]],
];

/// Size zone matrix with 8-connected zones.
pub const GLSZM: [[u64; 5]; 4] = [[2, 1, 0, 0, 0], [0, 0, 0, 0, 1], [1, 0, 1, 0, 0], [1, 1, 0, 0, 0]];

/// Border distance map in printed row order.
pub const DISTANCE_MAP: [[u32; 4]; 4] = [[1, 1, 1, 1], [1, 2, 2, 1], [1, 2, 2, 1], [1, 1, 1, 1]];

/// Distance zone matrix with 4-connected zones.
pub const GLDZM: [[u64; 2]; 4] = [[3, 0], [2, 0], [2, 0], [1, 1]];

/// Complete-neighbourhood grey tone counts and difference sums. The printed
/// fourth sum is 1.825; its own arithmetic |4 − 17/8| gives 1.875.
pub const NGTDM_N: [u64; 4] = [0, 2, 1, 1];
pub const NGTDM_S: [f64; 4] = [0.0, 1.0, 0.625, 1.875];

/// Complete-neighbourhood dependence matrix; columns count 1 + dependent neighbours.
pub const NGLDM: [[u64; 4]; 4] = [[0, 0, 0, 0], [0, 0, 1, 1], [0, 0, 1, 0], [1, 0, 0, 0]];

/// The worked 4x4 image as a single-slice level volume.
pub fn worked_image() -> LevelVolume {
    let mut levels = vec![0u32; 16];
    for (row, vals) in PRINTED.iter().enumerate() {
        for (x, &v) in vals.iter().enumerate() {
            levels[x + 4 * (3 - row)] = v;
        }
    }
    LevelVolume::new([4, 4, 1], levels, 4).expect("worked image is valid")
}

/// Outcome of one worked example.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name, passed, detail: detail.into() }
    }
}

fn rows_of(m: &CountMatrix, width: usize) -> Vec<Vec<u64>> {
    (1..=m.n_levels).map(|i| m.row(i, width)).collect()
}

fn table<const W: usize>(t: &[[u64; W]]) -> Vec<Vec<u64>> {
    t.iter().map(|r| r.to_vec()).collect()
}

fn matches<T: PartialEq + std::fmt::Debug>(name: &'static str, got: T, want: T) -> Check {
    if got == want {
        Check::new(name, true, "exact match")
    } else {
        Check::new(name, false, format!("got {got:?}, expected {want:?}"))
    }
}

fn round2(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 100.0).round() / 100.0).collect()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}

fn dirs2d() -> Vec<[i64; 3]> {
    direction_vectors(&NeighbourhoodSpec::default(), Dimension::TwoD).expect("default spec is valid")
}

pub fn check_glcm() -> Check {
    let v = worked_image();
    let got: Vec<Vec<Vec<u64>>> = dirs2d().into_iter().map(|m| symmetric(&v, Some(0), m).rows()).collect();
    let want: Vec<Vec<Vec<u64>>> = GLCM_SYMMETRIC.iter().map(|t| table(t)).collect();
    matches("co-occurrence matrices", got, want)
}

pub fn check_glcm_one_sided() -> Check {
    matches("one-sided co-occurrence matrix", one_sided(&worked_image(), Some(0), [1, 0, 0]).rows(), table(&GLCM_ONE_SIDED))
}

pub fn check_glcm_probabilities() -> Check {
    let g = symmetric(&worked_image(), Some(0), [1, 0, 0]);
    let got = (round2(&g.difference_probabilities()), round2(&g.sum_probabilities()));
    matches("co-occurrence difference and sum probabilities", got, (GLCM_DIFFERENCE.to_vec(), GLCM_SUM.to_vec()))
}

pub fn check_glrlm() -> Check {
    let units = glrlm_build(&worked_image(), &NeighbourhoodSpec::default(), Dimension::TwoD).expect("valid spec");
    let got: Vec<Vec<Vec<u64>>> = units.iter().map(|u| rows_of(&u.matrix, 4)).collect();
    matches("run length matrices", got, GLRLM.iter().map(|t| table(t)).collect())
}

pub fn check_glszm() -> Check {
    let units = glszm_build(&worked_image(), &NeighbourhoodSpec::default(), Dimension::TwoD).expect("valid spec");
    matches("size zone matrix", rows_of(&units[0].matrix, 5), table(&GLSZM))
}

pub fn check_gldzm() -> Check {
    let dist = distance_map(&[true; 16], [4, 4, 1], Dimension::TwoD, Norm::Manhattan).expect("valid grid");
    let printed: Vec<Vec<u32>> = (0..4).map(|row| (0..4).map(|x| dist[x + 4 * (3 - row)]).collect()).collect();
    let map = matches("distance map", printed, DISTANCE_MAP.iter().map(|r| r.to_vec()).collect());
    if !map.passed {
        return Check::new("distance map and distance zone matrix", false, map.detail);
    }
    let linkage = NeighbourhoodSpec { norm: Norm::Manhattan, ..Default::default() };
    let units = gldzm_build(&worked_image(), &[true; 16], &linkage, Norm::Manhattan, Dimension::TwoD).expect("valid spec");
    let m = matches("distance map and distance zone matrix", rows_of(&units[0].matrix, 2), table(&GLDZM));
    Check { name: "distance map and distance zone matrix", ..m }
}

pub fn check_ngtdm() -> Check {
    let units = ngtdm_build(&worked_image(), &NeighbourhoodSpec::default(), Dimension::TwoD, NeighbourhoodMode::Complete)
        .expect("valid spec");
    let t = &units[0].matrix;
    let s_ok = t.s.len() == 4 && t.s.iter().zip(NGTDM_S).all(|(a, b)| (a - b).abs() < 1e-12);
    let name = "grey tone difference matrix (complete neighbourhoods)";
    if t.n == NGTDM_N && s_ok {
        Check::new(name, true, "n = (0, 2, 1, 1), s = (0, 1, 0.625, 1.875); printed s4 = 1.825 is an arithmetic slip")
    } else {
        Check::new(name, false, format!("got n = {:?}, s = {:?}", t.n, t.s))
    }
}

pub fn check_ngldm() -> Check {
    let units = ngldm_build(&worked_image(), &NeighbourhoodSpec::default(), Dimension::TwoD, NeighbourhoodMode::Complete)
        .expect("valid spec");
    matches("dependence matrix (complete neighbourhoods)", rows_of(&units[0].matrix, 4), table(&NGLDM))
}

pub fn check_statistics() -> Check {
    let f: Vec<f64> = statistical_features(&[1.0, 2.0, 3.0, 4.0]).iter().map(|v| v.or_nan()).collect();
    let c: Vec<f64> = statistical_features(&[5.0; 4]).iter().map(|v| v.or_nan()).collect();
    let ok = f[0] == 2.5 && f[1] == 1.25 && f[2] == 0.0 && close(f[3], -1.36, 1e-12) && f[16] == 30.0 && c[2] == 0.0 && c[3] == 0.0;
    Check::new(
        "statistics of {1, 2, 3, 4}",
        ok,
        format!("mean {}, variance {}, skewness {}, kurtosis {}, energy {}", f[0], f[1], f[2], f[3], f[16]),
    )
}

pub fn check_ivh() -> Check {
    match prepare_ivh(&[1.0, 1.0, 2.0, 3.0], &IvhMode::Discrete, &ResegmentationSpec::default()) {
        Ok(v) => matches(
            "intensity-volume histogram of four voxels",
            (v.volume_fraction, v.level_fraction),
            (vec![1.0, 0.5, 0.25], vec![0.0, 0.5, 1.0]),
        ),
        Err(e) => Check::new("intensity-volume histogram of four voxels", false, e.to_string()),
    }
}

pub fn check_octahedron() -> Check {
    let name = "single voxel mesh is an octahedron";
    let s = 2.5;
    let g = GridGeometry::new([1, 1, 1], [s; 3], [0.0; 3]).expect("valid grid");
    let mesh = match build_mesh(&RoiMask::filled(g, true)) {
        Ok(m) => m,
        Err(e) => return Check::new(name, false, e.to_string()),
    };
    let v = mesh_volume(&mesh).unwrap_or(f64::NAN);
    let a = mesh_area(&mesh);
    let ok = close(v, s.powi(3) / 6.0, 1e-12) && close(a, 3f64.sqrt() * s * s, 1e-12);
    Check::new(name, ok, format!("volume {v}, area {a} at spacing {s}"))
}

pub fn check_interpolation_grid() -> Check {
    let g = GridGeometry::new([4, 4, 1], [3.0; 3], [0.0; 3]).expect("valid grid");
    let spec = InterpolationSpec {
        mode: InterpolationMode::InPlane,
        spacing: [2.0; 3],
        image_method: ImageMethod::Trilinear,
        ..Default::default()
    };
    match plan_interpolation_grid(&g, &spec) {
        Ok(t) => {
            let ok = t.dims == [6, 6, 1] && t.spacing[..2] == [2.0, 2.0] && t.origin[..2] == [-0.5, -0.5] && t.center() == g.center();
            Check::new("4x4 grid at 3 mm resampled to 6x6 at 2 mm", ok, format!("dims {:?}, origin {:?}", t.dims, t.origin))
        }
        Err(e) => Check::new("4x4 grid at 3 mm resampled to 6x6 at 2 mm", false, e.to_string()),
    }
}

/// Every bundled worked example, in a stable order.
pub fn run_checks() -> Vec<Check> {
    vec![
        check_glcm(),
        check_glcm_one_sided(),
        check_glcm_probabilities(),
        check_glrlm(),
        check_glszm(),
        check_gldzm(),
        check_ngtdm(),
        check_ngldm(),
        check_statistics(),
        check_ivh(),
        check_octahedron(),
        check_interpolation_grid(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_worked_example_passes() {
        for c in run_checks() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn mismatch_is_reported() {
        let c = matches("x", vec![1], vec![2]);
        assert!(!c.passed);
        assert!(c.detail.contains("expected [2]"));
    }
}
