//! Planar contour polygons and their conversion to voxel masks.
//!
//! Rasterization scans each grid row and applies the even-odd rule to edge
//! crossings. An edge is counted on a row when the row lies in `[y_lo, y_hi)`
//! of that edge, and a voxel center is inside when an odd number of counted
//! crossings lie at or left of it. Polygons on the same slice combine by the
//! same rule, so nested polygons form holes.

use crate::error::{Error, Result};
use crate::volume::{GridGeometry, RoiMask};

/// A closed planar polygon at constant world `z`; the last vertex joins the first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub z: f64,
    pub vertices: Vec<[f64; 2]>,
}

/// Collection of per-slice polygons.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContourSet {
    pub polygons: Vec<Polygon>,
}

/// Parses the contour text format.
///
/// Each block starts with a `slice z=<mm>` header followed by one `x y` pair
/// per line. Blocks are separated by blank lines; lines starting with `#` are
/// ignored.
pub fn parse_contours(text: &str) -> Result<ContourSet> {
    let mut polygons = Vec::new();
    let mut current: Option<Polygon> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if let Some(p) = current.take() {
                polygons.push(p);
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("slice") {
            if let Some(p) = current.take() {
                polygons.push(p);
            }
            let z = rest
                .trim()
                .strip_prefix("z=")
                .and_then(|v| v.trim().parse::<f64>().ok())
                .filter(|z| z.is_finite())
                .ok_or_else(|| {
                    Error::Contour(format!("line {}: expected 'slice z=<mm>'", lineno + 1))
                })?;
            current = Some(Polygon { z, vertices: Vec::new() });
            continue;
        }
        let poly = current.as_mut().ok_or_else(|| {
            Error::Contour(format!("line {}: vertex before any slice header", lineno + 1))
        })?;
        let mut it = line.split_whitespace().map(str::parse::<f64>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(x)), Some(Ok(y)), None) if x.is_finite() && y.is_finite() => {
                poly.vertices.push([x, y])
            }
            _ => {
                return Err(Error::Contour(format!(
                    "line {}: expected two coordinates, got '{line}'",
                    lineno + 1
                )))
            }
        }
    }
    if let Some(p) = current.take() {
        polygons.push(p);
    }
    Ok(ContourSet { polygons })
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// True when two non-adjacent edges of the polygon touch or cross.
pub fn is_self_intersecting(vertices: &[[f64; 2]]) -> bool {
    let n = vertices.len();
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return true;
            }
        }
    }
    false
}

/// Slice index of a polygon plane, accepted within half a slice spacing.
fn slice_of(z: f64, g: &GridGeometry) -> Result<usize> {
    let k = ((z - g.origin[2]) / g.spacing[2]).round();
    let plane = g.origin[2] + k * g.spacing[2];
    if k < 0.0 || k >= g.dims[2] as f64 || (z - plane).abs() > 0.5 * g.spacing[2] {
        return Err(Error::Contour(format!("polygon plane z={z} does not match a grid slice")));
    }
    Ok(k as usize)
}

/// Converts contours into a binary mask on `g`.
pub fn rasterize_contours(c: &ContourSet, g: &GridGeometry) -> Result<RoiMask> {
    let mut by_slice: Vec<Vec<&Polygon>> = vec![Vec::new(); g.dims[2]];
    for p in &c.polygons {
        if p.vertices.len() < 3 {
            return Err(Error::Contour(format!(
                "polygon at z={} has {} vertices, at least 3 required",
                p.z,
                p.vertices.len()
            )));
        }
        if is_self_intersecting(&p.vertices) {
            return Err(Error::Contour(format!("polygon at z={} is self-intersecting", p.z)));
        }
        by_slice[slice_of(p.z, g)?].push(p);
    }
    let mut labels = vec![0u8; g.len()];
    let mut crossings = Vec::new();
    for (z, polys) in by_slice.iter().enumerate() {
        if polys.is_empty() {
            continue;
        }
        for y in 0..g.dims[1] {
            let yw = g.origin[1] + y as f64 * g.spacing[1];
            crossings.clear();
            for p in polys {
                let n = p.vertices.len();
                for k in 0..n {
                    let (a, b) = (p.vertices[k], p.vertices[(k + 1) % n]);
                    let (lo, hi) = if a[1] <= b[1] { (a, b) } else { (b, a) };
                    if lo[1] <= yw && yw < hi[1] {
                        crossings.push(lo[0] + (yw - lo[1]) * (hi[0] - lo[0]) / (hi[1] - lo[1]));
                    }
                }
            }
            if crossings.is_empty() {
                continue;
            }
            crossings.sort_by(f64::total_cmp);
            let mut passed = 0;
            for x in 0..g.dims[0] {
                let xw = g.origin[0] + x as f64 * g.spacing[0];
                while passed < crossings.len() && crossings[passed] <= xw {
                    passed += 1;
                }
                if passed % 2 == 1 {
                    labels[g.index([x, y, z])] = 1;
                }
            }
        }
    }
    Ok(RoiMask { geometry: *g, labels })
}
