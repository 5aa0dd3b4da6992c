//! Browser demo bindings: discretisation with a level histogram, co-occurrence
//! features of a small 2D image and the mesh of a digitised sphere.
//!
//! Each export returns a JSON document. The `*_json` functions hold the logic
//! and are plain Rust, so they run in native tests as well.

use std::f64::consts::PI;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use radiomics::features::COOCCURRENCE;
use radiomics::morphology::{build_mesh, mesh_area, mesh_volume};
use radiomics::preprocess::discretise_fbn;
use radiomics::texture::{aggregate, glcm_build, glcm_features, Aggregation, Dimension, LevelVolume, NeighbourhoodSpec};
use radiomics::volume::{GridGeometry, RoiMask};
use radiomics::{Error, Result};

fn finite(v: Option<f64>) -> Value {
    v.filter(|x| x.is_finite()).map_or(Value::Null, Value::from)
}

/// Fixed bin number discretisation of `values` and the count per level.
pub fn discretise_json(values: &[f64], bins: u32) -> Result<String> {
    let d = discretise_fbn(values, bins)?;
    let mut counts = vec![0u64; d.n_levels as usize];
    for &l in &d.levels {
        counts[l as usize - 1] += 1;
    }
    Ok(json!({ "levels": d.levels, "counts": counts }).to_string())
}

/// Symmetric co-occurrence matrices of a `width` × `height` level image
/// (rows top to bottom, levels from 1), and features of the merged matrix.
pub fn cooccurrence_json(levels: &[u32], width: usize, height: usize) -> Result<String> {
    if width * height != levels.len() {
        return Err(Error::Mismatch(format!("{} levels for a {width}x{height} image", levels.len())));
    }
    let mut flipped = vec![0u32; levels.len()];
    for row in 0..height {
        for x in 0..width {
            flipped[x + width * (height - 1 - row)] = levels[x + width * row];
        }
    }
    let n_levels = levels.iter().copied().max().unwrap_or(0);
    let vol = LevelVolume::new([width, height, 1], flipped, n_levels)?;
    let units = glcm_build(&vol, &NeighbourhoodSpec::default(), Dimension::TwoD)?;
    let matrices: Vec<Vec<Vec<u64>>> = units.iter().map(|u| u.matrix.rows()).collect();
    let merged = aggregate(&units, Aggregation::VolumeMerge2d, glcm_features)?;
    let features: serde_json::Map<String, Value> =
        COOCCURRENCE.iter().zip(&merged.values).map(|(d, v)| (d.name.to_string(), finite(v.value()))).collect();
    Ok(json!({ "matrices": matrices, "features": features }).to_string())
}

/// Mesh of a sphere digitised at `spacing` mm with its volume, area and sphericity.
pub fn sphere_json(radius: f64, spacing: f64) -> Result<String> {
    if !(radius > 0.0 && spacing > 0.0 && radius / spacing <= 60.0) {
        return Err(Error::Config("radius and spacing must be positive with at most 60 voxels per radius".into()));
    }
    let n = (2.0 * radius / spacing).ceil() as usize + 3;
    let g = GridGeometry::new([n; 3], [spacing; 3], [0.0; 3])?;
    let c = g.world([n / 2; 3]);
    let labels = (0..g.len())
        .map(|i| {
            let p = g.world(g.position(i));
            u8::from((0..3).map(|a| (p[a] - c[a]).powi(2)).sum::<f64>() <= radius * radius)
        })
        .collect();
    let mask = RoiMask::new(g, labels)?;
    let mesh = build_mesh(&mask)?;
    let (v, a) = (mesh_volume(&mesh)?, mesh_area(&mesh));
    Ok(json!({
        "voxels": mask.count(),
        "triangles": mesh.faces.len(),
        "volume": v,
        "area": a,
        "sphericity": (36.0 * PI * v * v).cbrt() / a,
        "exact_volume": 4.0 / 3.0 * PI * radius.powi(3),
        "exact_area": 4.0 * PI * radius * radius,
    })
    .to_string())
}

fn to_js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn discretise(values: &[f64], bins: u32) -> std::result::Result<String, JsError> {
    to_js(discretise_json(values, bins))
}

#[wasm_bindgen]
pub fn cooccurrence(levels: &[u32], width: usize, height: usize) -> std::result::Result<String, JsError> {
    to_js(cooccurrence_json(levels, width, height))
}

#[wasm_bindgen]
pub fn sphere(radius: f64, spacing: f64) -> std::result::Result<String, JsError> {
    to_js(sphere_json(radius, spacing))
}
