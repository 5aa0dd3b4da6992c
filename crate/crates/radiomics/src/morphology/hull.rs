//! Exact 3D convex hull of integer lattice points.
//!
//! Quickhull with conflict lists. Orientation tests use 128-bit integer
//! determinants, so coplanar and collinear lattice configurations are decided
//! exactly. Points on the hull boundary that are not strictly outside the
//! current hull are never inserted. Triangulated faces may still pass through
//! boundary points inserted early, so the vertex list keeps only corners,
//! which makes it independent of insertion order.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::morphology::mesh::{cross, dot, norm, sub, LatticeFrame, TriangleMesh};

/// Hull over lattice points: corner indices into the input point list and
/// outward faces.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeHull {
    pub vertices: Vec<usize>,
    pub faces: Vec<[usize; 3]>,
}

/// Convex hull in world coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHull {
    /// Corners of the hull.
    pub vertices: Vec<[f64; 3]>,
    /// Every point referenced by `faces`, corners included.
    pub points: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    /// Primitive integer outward normals of the faces in lattice coordinates.
    pub lattice_normals: Vec<[i64; 3]>,
}

fn orient(a: [i64; 3], b: [i64; 3], c: [i64; 3], p: [i64; 3]) -> i128 {
    let u = [0, 1, 2].map(|i| (b[i] - a[i]) as i128);
    let v = [0, 1, 2].map(|i| (c[i] - a[i]) as i128);
    let w = [0, 1, 2].map(|i| (p[i] - a[i]) as i128);
    u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) + u[2] * (v[0] * w[1] - v[1] * w[0])
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Outward normal of face `(a, b, c)` reduced to a primitive integer vector.
pub fn primitive_normal(a: [i64; 3], b: [i64; 3], c: [i64; 3]) -> [i64; 3] {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let g = gcd(gcd(n[0], n[1]), n[2]).max(1);
    n.map(|x| x / g)
}

/// Keeps only points that are extreme along each axis within their line of
/// the lattice; other points lie between two others and cannot be hull vertices.
fn column_extremes(points: &[[i64; 3]]) -> Vec<usize> {
    let mut keep = vec![true; points.len()];
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        let mut range: HashMap<(i64, i64), (i64, i64)> = HashMap::new();
        for p in points {
            let e = range.entry((p[u], p[v])).or_insert((p[axis], p[axis]));
            e.0 = e.0.min(p[axis]);
            e.1 = e.1.max(p[axis]);
        }
        for (i, p) in points.iter().enumerate() {
            let (lo, hi) = range[&(p[u], p[v])];
            if p[axis] != lo && p[axis] != hi {
                keep[i] = false;
            }
        }
    }
    (0..points.len()).filter(|&i| keep[i]).collect()
}

struct Face {
    v: [usize; 3],
    alive: bool,
    outside: Vec<usize>,
}

/// Convex hull of lattice points; fails when the points are coplanar.
pub fn lattice_hull(points: &[[i64; 3]]) -> Result<LatticeHull> {
    let mut cand = column_extremes(points);
    cand.sort_by_key(|&i| (points[i], i));
    cand.dedup_by_key(|i| points[*i]);
    let degenerate = || Error::Degenerate("convex hull of coplanar points".into());
    if cand.len() < 4 {
        return Err(degenerate());
    }
    let p = |i: usize| points[i];
    // Initial tetrahedron from extreme and maximally separated points.
    let i0 = cand[0];
    let i1 = *cand.iter().max_by_key(|&&i| {
        let d = [0, 1, 2].map(|k| (p(i)[k] - p(i0)[k]) as i128);
        d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
    })
    .unwrap();
    let area2 = |i: usize| {
        let u = [0, 1, 2].map(|k| (p(i1)[k] - p(i0)[k]) as i128);
        let w = [0, 1, 2].map(|k| (p(i)[k] - p(i0)[k]) as i128);
        let c = [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]];
        c[0] * c[0] + c[1] * c[1] + c[2] * c[2]
    };
    let i2 = *cand.iter().max_by_key(|&&i| area2(i)).unwrap();
    if area2(i2) == 0 {
        return Err(degenerate());
    }
    let i3 = *cand.iter().max_by_key(|&&i| orient(p(i0), p(i1), p(i2), p(i)).abs()).unwrap();
    let o = orient(p(i0), p(i1), p(i2), p(i3));
    if o == 0 {
        return Err(degenerate());
    }
    // Faces are wound so that orient(face, q) > 0 means q is outside.
    let (i1, i2) = if o > 0 { (i2, i1) } else { (i1, i2) };
    let mut faces: Vec<Face> = [[i0, i1, i2], [i0, i3, i1], [i1, i3, i2], [i2, i3, i0]]
        .into_iter()
        .map(|v| Face { v, alive: true, outside: Vec::new() })
        .collect();
    let mut edge_face: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            edge_face.insert((f.v[k], f.v[(k + 1) % 3]), fi);
        }
    }
    let sees = |f: &[usize; 3], q: usize| orient(p(f[0]), p(f[1]), p(f[2]), p(q)) > 0;
    for &q in &cand {
        if [i0, i1, i2, i3].contains(&q) {
            continue;
        }
        if let Some(fi) = (0..4).find(|&fi| sees(&faces[fi].v, q)) {
            faces[fi].outside.push(q);
        }
    }
    let mut stack: Vec<usize> = (0..4).collect();
    while let Some(fi) = stack.pop() {
        if !faces[fi].alive || faces[fi].outside.is_empty() {
            continue;
        }
        let f = faces[fi].v;
        let apex = *faces[fi]
            .outside
            .iter()
            .max_by_key(|&&q| (orient(p(f[0]), p(f[1]), p(f[2]), p(q)), std::cmp::Reverse(q)))
            .unwrap();
        // Visible region by flood fill over edge adjacency.
        let mut visible = vec![fi];
        let mut is_visible: HashMap<usize, bool> = HashMap::from([(fi, true)]);
        let mut k = 0;
        while k < visible.len() {
            let v = faces[visible[k]].v;
            for e in 0..3 {
                let nb = edge_face[&(v[(e + 1) % 3], v[e])];
                if let std::collections::hash_map::Entry::Vacant(e) = is_visible.entry(nb) {
                    let s = sees(&faces[nb].v, apex);
                    e.insert(s);
                    if s {
                        visible.push(nb);
                    }
                }
            }
            k += 1;
        }
        let mut horizon = Vec::new();
        let mut orphans = Vec::new();
        for &vi in &visible {
            let v = faces[vi].v;
            for e in 0..3 {
                let (a, b) = (v[e], v[(e + 1) % 3]);
                if !is_visible[&edge_face[&(b, a)]] {
                    horizon.push((a, b));
                }
            }
        }
        for &vi in &visible {
            let v = faces[vi].v;
            faces[vi].alive = false;
            orphans.append(&mut faces[vi].outside);
            for e in 0..3 {
                edge_face.remove(&(v[e], v[(e + 1) % 3]));
            }
        }
        let first_new = faces.len();
        for &(a, b) in &horizon {
            let nf = faces.len();
            faces.push(Face { v: [a, b, apex], alive: true, outside: Vec::new() });
            for (x, y) in [(a, b), (b, apex), (apex, a)] {
                edge_face.insert((x, y), nf);
            }
        }
        orphans.sort_unstable();
        for q in orphans {
            if q == apex {
                continue;
            }
            if let Some(nf) = (first_new..faces.len()).find(|&nf| sees(&faces[nf].v, q)) {
                faces[nf].outside.push(q);
            }
        }
        stack.extend(first_new..faces.len());
    }
    let faces: Vec<[usize; 3]> = faces.into_iter().filter(|f| f.alive).map(|f| f.v).collect();
    let mut vertices: Vec<usize> = faces.iter().flatten().copied().collect();
    vertices.sort_unstable();
    vertices.dedup();
    let vertices = corners(points, &vertices, &faces);
    Ok(LatticeHull { vertices, faces })
}

/// Boundary points lying on facet planes whose normals span space.
fn corners(points: &[[i64; 3]], boundary: &[usize], faces: &[[usize; 3]]) -> Vec<usize> {
    let mut planes: Vec<([i64; 3], [usize; 3])> = Vec::new();
    for f in faces {
        let n = primitive_normal(points[f[0]], points[f[1]], points[f[2]]);
        if !planes.iter().any(|(m, _)| *m == n) {
            planes.push((n, *f));
        }
    }
    let det = |a: [i64; 3], b: [i64; 3], c: [i64; 3]| orient([0; 3], a, b, c);
    boundary
        .iter()
        .copied()
        .filter(|&i| {
            let q = points[i];
            let on: Vec<[i64; 3]> = planes
                .iter()
                .filter(|(_, f)| orient(points[f[0]], points[f[1]], points[f[2]], q) == 0)
                .map(|(n, _)| *n)
                .collect();
            (0..on.len()).any(|a| {
                (a + 1..on.len()).any(|b| (b + 1..on.len()).any(|c| det(on[a], on[b], on[c]) != 0))
            })
        })
        .collect()
}

impl ConvexHull {
    /// Hull of lattice points mapped to world coordinates through `frame`.
    pub fn from_lattice(points: &[[i64; 3]], frame: &LatticeFrame) -> Result<Self> {
        let h = lattice_hull(points)?;
        let mut remap: HashMap<usize, usize> = HashMap::new();
        let mut boundary = Vec::new();
        for &i in h.faces.iter().flatten() {
            remap.entry(i).or_insert_with(|| {
                boundary.push(frame.world(points[i]));
                boundary.len() - 1
            });
        }
        let vertices = h.vertices.iter().map(|&i| frame.world(points[i])).collect();
        let lattice_normals =
            h.faces.iter().map(|f| primitive_normal(points[f[0]], points[f[1]], points[f[2]])).collect();
        let faces = h.faces.iter().map(|f| f.map(|i| remap[&i])).collect();
        Ok(Self { vertices, points: boundary, faces, lattice_normals })
    }

    /// Hull of a mask-derived mesh; only edge-midpoint vertices are considered.
    pub fn of_mesh(mesh: &TriangleMesh) -> Result<Self> {
        let lat = mesh
            .lattice
            .as_ref()
            .ok_or_else(|| Error::Geometry("convex hull needs a mesh built from a mask".into()))?;
        Self::from_lattice(&lat.points, &lat.frame)
    }

    pub fn volume(&self) -> f64 {
        let c = self.points[0];
        self.faces
            .iter()
            .map(|f| {
                let [a, b, d] = f.map(|i| sub(self.points[i], c));
                dot(a, cross(b, d)) / 6.0
            })
            .sum::<f64>()
            .abs()
    }

    pub fn area(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.points[i]);
                norm(cross(sub(b, a), sub(c, a))) / 2.0
            })
            .sum()
    }

    /// Largest distance between two hull vertices.
    pub fn max_diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(norm(sub(v[i], v[j])));
            }
        }
        best
    }
}
