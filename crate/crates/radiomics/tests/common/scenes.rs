//! Random image scenes, axis rotations and report lookups for end-to-end checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use radiomics::pipeline::{run_pipeline, FeatureReport, ProcessingConfig, RoiSource};
use radiomics::preprocess::DiscretisationSpec;
use radiomics::texture::Aggregation;
use radiomics::volume::{GridGeometry, ImageVolume, RoiMask};
use radiomics::Family;

/// A random integer-valued image with a blob-like mask that is never empty.
pub fn random_scene(seed: u64, max_dim: usize) -> (ImageVolume, RoiMask) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = [0; 3].map(|_| rng.random_range(3..=max_dim));
    let g = GridGeometry::new(dims, [1.0; 3], [0.0; 3]).unwrap();
    let c = dims.map(|d| rng.random_range(0.0..d as f64));
    let r = rng.random_range(1.2..(max_dim as f64 / 1.5));
    let data: Vec<f64> = (0..g.len()).map(|_| f64::from(rng.random_range(0..40u8))).collect();
    let mut labels: Vec<u8> = (0..g.len())
        .map(|i| {
            let p = g.position(i);
            let d2: f64 = (0..3).map(|a| (p[a] as f64 - c[a]).powi(2)).sum();
            u8::from(d2 <= r * r || rng.random_bool(0.08))
        })
        .collect();
    if labels.iter().all(|&l| l == 0) {
        labels[0] = 1;
    }
    (ImageVolume::new(g, data).unwrap(), RoiMask::new(g, labels).unwrap())
}

/// Rotates voxel data a quarter turn about `axis`: the two other axes `(u, v)`
/// map to `(v, n_u − 1 − u)`.
pub fn rotate<T: Copy>(data: &[T], dims: [usize; 3], axis: usize) -> (Vec<T>, [usize; 3]) {
    let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
    let mut nd = dims;
    nd[u] = dims[v];
    nd[v] = dims[u];
    let mut out = vec![data[0]; data.len()];
    for z in 0..dims[2] {
        for y in 0..dims[1] {
            for x in 0..dims[0] {
                let p = [x, y, z];
                let mut q = p;
                q[u] = p[v];
                q[v] = dims[u] - 1 - p[u];
                out[q[0] + nd[0] * (q[1] + nd[1] * q[2])] = data[x + dims[0] * (y + dims[1] * z)];
            }
        }
    }
    (out, nd)
}

pub fn rotate_scene(img: &ImageVolume, mask: &RoiMask, axis: usize) -> (ImageVolume, RoiMask) {
    let dims = img.geometry.dims;
    let (d, nd) = rotate(&img.data, dims, axis);
    let (l, _) = rotate(&mask.labels, dims, axis);
    let g = GridGeometry::new(nd, img.geometry.spacing, img.geometry.origin).unwrap();
    (ImageVolume::new(g, d).unwrap(), RoiMask::new(g, l).unwrap())
}

/// 3D approach without interpolation or re-segmentation, 8 bins.
pub fn plain_config() -> ProcessingConfig {
    ProcessingConfig { discretisation: DiscretisationSpec::FixedBinNumber { bins: 8 }, ..ProcessingConfig::custom() }
}

pub fn report(img: &ImageVolume, mask: &RoiMask, cfg: &ProcessingConfig) -> FeatureReport {
    run_pipeline(img, &RoiSource::Mask(mask.clone()), cfg).unwrap().0
}

/// Value of a named feature; `aggregation` None selects the whole-volume record.
pub fn value(report: &FeatureReport, family: Family, name: &str, aggregation: Option<Aggregation>) -> Option<f64> {
    let agg = aggregation.map_or(radiomics::pipeline::VOLUME_AGGREGATION_ID, Aggregation::id);
    report
        .records
        .iter()
        .find(|r| r.family == family && r.feature == name && r.aggregation == agg)
        .unwrap_or_else(|| panic!("no record {name} in {family:?} with {agg}"))
        .value
        .value()
}

/// Records subject to rotation invariance: morphology and merged 3D texture.
pub fn rotation_invariant(report: &FeatureReport) -> Vec<(String, Option<f64>)> {
    report
        .records
        .iter()
        .filter(|r| r.family == Family::Morphology || ["IAZD", "KOBO"].contains(&r.aggregation))
        .map(|r| (r.nomenclature.clone(), r.value.value()))
        .collect()
}

/// First pair of rotation-invariant records that differ beyond `tol` relative.
pub fn rotation_mismatch(a: &FeatureReport, b: &FeatureReport, tol: f64) -> Option<String> {
    let (ra, rb) = (rotation_invariant(a), rotation_invariant(b));
    for ((name, x), (_, y)) in ra.iter().zip(&rb) {
        let ok = match (x, y) {
            (Some(x), Some(y)) => super::agree(*x, *y, tol),
            (None, None) => true,
            _ => false,
        };
        if !ok {
            return Some(format!("{name}: {x:?} vs {y:?}"));
        }
    }
    (ra.len() != rb.len()).then(|| "record counts differ".into())
}
