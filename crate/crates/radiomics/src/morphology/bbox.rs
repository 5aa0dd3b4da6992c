//! Axis-aligned and oriented minimum bounding boxes.
//!
//! The oriented box is searched over a finite set of frames. Each candidate
//! frame takes one axis from a convex hull face normal (or a coordinate axis)
//! and fits the minimum-area rectangle of the projected hull in the orthogonal
//! plane, which is optimal for that axis. The principal axes frame is added as
//! a further candidate.

use std::collections::BTreeSet;

use crate::morphology::mesh::{cross, dot, norm};

/// Box dimensions; volume and area follow from the edge lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxExtent {
    pub edges: [f64; 3],
}

impl BoxExtent {
    pub fn volume(&self) -> f64 {
        self.edges.iter().product()
    }

    pub fn area(&self) -> f64 {
        let [a, b, c] = self.edges;
        2.0 * (a * b + b * c + c * a)
    }
}

/// Smallest axis-aligned box around `points`.
pub fn axis_aligned_box(points: &[[f64; 3]]) -> BoxExtent {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    BoxExtent { edges: [0, 1, 2].map(|a| hi[a] - lo[a]) }
}

fn extent_along(points: &[[f64; 3]], d: [f64; 3]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        let t = dot(*p, d);
        lo = lo.min(t);
        hi = hi.max(t);
    }
    hi - lo
}

/// 2D convex hull by monotone chain, counter-clockwise without collinear points.
fn hull_2d(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut h: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while h.len() >= start + 2 && turn(h[h.len() - 2], h[h.len() - 1], p) <= 0.0 {
                h.pop();
            }
            h.push(p);
        }
        h.pop();
    }
    h
}

/// Minimum-area rectangle of a convex polygon; one side is collinear with a polygon edge.
fn min_rectangle(poly: &[[f64; 2]]) -> (f64, f64) {
    if poly.len() < 2 {
        return (0.0, 0.0);
    }
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        if len == 0.0 {
            continue;
        }
        let e = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
        let (mut u0, mut u1, mut v0, mut v1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in poly {
            let u = p[0] * e[0] + p[1] * e[1];
            let v = -p[0] * e[1] + p[1] * e[0];
            u0 = u0.min(u);
            u1 = u1.max(u);
            v0 = v0.min(v);
            v1 = v1.max(v);
        }
        let area = (u1 - u0) * (v1 - v0);
        if area < best.0 {
            best = (area, u1 - u0, v1 - v0);
        }
    }
    (best.1, best.2)
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = norm(v);
    v.map(|x| x / n)
}

/// Smallest box with one axis along `n` (unit).
fn box_with_axis(points: &[[f64; 3]], n: [f64; 3]) -> BoxExtent {
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let u = unit(cross(n, helper));
    let v = cross(n, u);
    let projected = points.iter().map(|p| [dot(*p, u), dot(*p, v)]).collect();
    let (a, b) = min_rectangle(&hull_2d(projected));
    BoxExtent { edges: [a, b, extent_along(points, n)] }
}

/// Canonical sign for a primitive integer direction.
fn canonical(n: [i64; 3]) -> [i64; 3] {
    let first = n.iter().copied().find(|&x| x != 0).unwrap_or(0);
    if first < 0 {
        n.map(|x| -x)
    } else {
        n
    }
}

/// Oriented minimum bounding box over the candidate frames.
///
/// `lattice_normals` are integer face normals in a lattice whose world step per
/// axis is proportional to `spacing`; `principal` is an orthonormal frame.
pub fn oriented_box(
    hull_points: &[[f64; 3]],
    lattice_normals: &[[i64; 3]],
    spacing: [f64; 3],
    principal: &[[f64; 3]; 3],
) -> BoxExtent {
    let mut dirs: BTreeSet<[i64; 3]> = lattice_normals.iter().map(|&n| canonical(n)).collect();
    dirs.extend([[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
    let mut best = axis_aligned_box(hull_points);
    for d in dirs {
        let n = unit([0, 1, 2].map(|i| d[i] as f64 / spacing[i]));
        let b = box_with_axis(hull_points, n);
        if b.volume() < best.volume() {
            best = b;
        }
    }
    let pca = BoxExtent { edges: principal.map(|axis| extent_along(hull_points, unit(axis))) };
    if pca.volume() < best.volume() {
        best = pca;
    }
    best
}
