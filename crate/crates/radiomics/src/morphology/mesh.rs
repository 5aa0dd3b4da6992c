//! Marching cubes surface mesh of a binary mask at isovalue 0.5.
//!
//! Every surface vertex lies on the midpoint of a cell edge whose endpoints
//! differ in label. The per-case table is generated from face segments: each
//! cell face contributes segments between its crossing edges, and faces with
//! diagonally opposite inside corners cut off each inside corner separately.
//! Segments chain into closed loops; three-point loops become one triangle and
//! longer loops are fanned around their centroid. Adjacent cells agree on the
//! shared face segments, so the mesh is closed with outward normals.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::volume::{GridGeometry, RoiMask};

/// Mapping from doubled lattice coordinates to world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeFrame {
    /// World position of lattice coordinate zero.
    pub origin: [f64; 3],
    /// World length of one lattice step per axis (half the voxel spacing).
    pub step: [f64; 3],
}

impl LatticeFrame {
    pub fn world(&self, p: [i64; 3]) -> [f64; 3] {
        [
            self.origin[0] + p[0] as f64 * self.step[0],
            self.origin[1] + p[1] as f64 * self.step[1],
            self.origin[2] + p[2] as f64 * self.step[2],
        ]
    }
}

/// Integer positions of the edge-midpoint vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshLattice {
    pub frame: LatticeFrame,
    /// Lattice coordinates of `vertices[..points.len()]`.
    pub points: Vec<[i64; 3]>,
}

/// Closed triangle mesh with outward face normals.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    /// Present for meshes built from a mask; fan centroids are not included.
    pub lattice: Option<MeshLattice>,
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

impl TriangleMesh {
    pub fn new(vertices: Vec<[f64; 3]>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(f) = faces.iter().find(|f| f.iter().any(|&v| v >= vertices.len())) {
            return Err(Error::Geometry(format!("face {f:?} references a missing vertex")));
        }
        Ok(Self { vertices, faces, lattice: None })
    }

    /// Checks that every directed edge is matched by exactly one reversed edge.
    pub fn check_closed(&self) -> Result<()> {
        let mut edges: HashMap<(usize, usize), i32> = HashMap::with_capacity(self.faces.len() * 3);
        for f in &self.faces {
            for k in 0..3 {
                *edges.entry((f[k], f[(k + 1) % 3])).or_default() += 1;
            }
        }
        for (&(a, b), &n) in &edges {
            if n != 1 || edges.get(&(b, a)) != Some(&1) {
                return Err(Error::Manifold(format!(
                    "edge {a}->{b} used {n} times with {} reversed uses",
                    edges.get(&(b, a)).copied().unwrap_or(0)
                )));
            }
        }
        Ok(())
    }

    /// Signed volume: positive for outward normals.
    pub fn signed_volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                dot(a, cross(b, c)) / 6.0
            })
            .sum()
    }

    pub fn area(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                norm(cross(sub(b, a), sub(c, a))) / 2.0
            })
            .sum()
    }
}

/// Enclosed volume of a closed, consistently wound mesh.
pub fn mesh_volume(m: &TriangleMesh) -> Result<f64> {
    m.check_closed()?;
    Ok(m.signed_volume().abs())
}

/// Total face area.
pub fn mesh_area(m: &TriangleMesh) -> f64 {
    m.area()
}

/// Cube corner `c` sits at offset `(c & 1, c >> 1 & 1, c >> 2 & 1)`.
fn corner_offset(c: usize) -> [i64; 3] {
    [(c & 1) as i64, (c >> 1 & 1) as i64, (c >> 2 & 1) as i64]
}

/// The twelve cube edges as (lower corner, axis).
const EDGES: [(usize, usize); 12] = [
    (0, 0),
    (2, 0),
    (4, 0),
    (6, 0),
    (0, 1),
    (1, 1),
    (4, 1),
    (5, 1),
    (0, 2),
    (1, 2),
    (2, 2),
    (3, 2),
];

fn edge_id(a: usize, b: usize) -> usize {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let axis = (hi ^ lo).trailing_zeros() as usize;
    EDGES.iter().position(|&e| e == (lo, axis)).expect("corners share an edge")
}

/// Edge midpoint in doubled cube coordinates.
fn edge_midpoint2(e: usize) -> [i64; 3] {
    let (c, axis) = EDGES[e];
    let mut p = corner_offset(c).map(|v| 2 * v);
    p[axis] += 1;
    p
}

/// Closed loops of cube edges for each of the 256 corner configurations.
type CaseTable = Vec<Vec<Vec<usize>>>;

fn case_loops(case: usize) -> Vec<Vec<usize>> {
    let inside = |c: usize| case >> c & 1 == 1;
    let mut next = [usize::MAX; 12];
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for side in 0..2 {
            let cycle: Vec<usize> =
                [(0, 0), (1, 0), (1, 1), (0, 1)].iter().map(|&(a, b)| side << axis | a << u | b << v).collect();
            let mut normal = [0i64; 3];
            normal[axis] = if side == 1 { 1 } else { -1 };
            let cyc_edge = |k: usize| edge_id(cycle[k % 4], cycle[(k + 1) % 4]);
            let crossing: Vec<usize> = (0..4).filter(|&k| inside(cycle[k]) != inside(cycle[(k + 1) % 4])).collect();
            let mut segments: Vec<(usize, usize, usize)> = Vec::new();
            match crossing.len() {
                0 => {}
                2 => {
                    let reference = *cycle.iter().find(|&&c| inside(c)).expect("face has an inside corner");
                    segments.push((cyc_edge(crossing[0]), cyc_edge(crossing[1]), reference));
                }
                4 => {
                    for k in 0..4 {
                        if inside(cycle[k]) {
                            segments.push((cyc_edge(k + 3), cyc_edge(k), cycle[k]));
                        }
                    }
                }
                n => unreachable!("a square face has {n} crossing edges"),
            }
            for (e1, e2, reference) in segments {
                let (p1, p2) = (edge_midpoint2(e1), edge_midpoint2(e2));
                let d = [p2[0] - p1[0], p2[1] - p1[1], p2[2] - p1[2]];
                let t = [
                    d[1] * normal[2] - d[2] * normal[1],
                    d[2] * normal[0] - d[0] * normal[2],
                    d[0] * normal[1] - d[1] * normal[0],
                ];
                let r = corner_offset(reference).map(|v| 2 * v);
                let toward = (0..3).map(|i| t[i] * (r[i] - p1[i])).sum::<i64>();
                let (from, to) = if toward > 0 { (e1, e2) } else { (e2, e1) };
                assert_eq!(next[from], usize::MAX, "edge {from} leaves twice in case {case}");
                next[from] = to;
            }
        }
    }
    let mut seen = [false; 12];
    let mut loops = Vec::new();
    for start in 0..12 {
        if next[start] == usize::MAX || seen[start] {
            continue;
        }
        let mut lp = Vec::new();
        let mut e = start;
        while !seen[e] {
            seen[e] = true;
            lp.push(e);
            e = next[e];
        }
        assert_eq!(e, start, "open loop in case {case}");
        loops.push(lp);
    }
    loops
}

fn case_table() -> &'static CaseTable {
    static TABLE: OnceLock<CaseTable> = OnceLock::new();
    TABLE.get_or_init(|| (0..256).map(case_loops).collect())
}

/// Marching cubes on the mask padded with one layer of background voxels.
pub fn build_mesh(mask: &RoiMask) -> Result<TriangleMesh> {
    let (lo, hi) = mask.bounding_box().ok_or_else(|| Error::EmptyRoi("mesh construction".into()))?;
    let g: &GridGeometry = &mask.geometry;
    // Cropped and padded sub-grid: padded index p maps to mask index lo + p - 1.
    let n = [hi[0] - lo[0] + 3, hi[1] - lo[1] + 3, hi[2] - lo[2] + 3];
    let mut field = vec![false; n[0] * n[1] * n[2]];
    for z in 1..n[2] - 1 {
        for y in 1..n[1] - 1 {
            for x in 1..n[0] - 1 {
                field[x + n[0] * (y + n[1] * z)] = mask.contains([lo[0] + x - 1, lo[1] + y - 1, lo[2] + z - 1]);
            }
        }
    }
    let frame = LatticeFrame {
        origin: [0, 1, 2].map(|a| g.origin[a] + (lo[a] as f64 - 1.0) * g.spacing[a]),
        step: g.spacing.map(|s| s / 2.0),
    };
    let table = case_table();
    // Vertex ids per (padded lower corner, axis); u32::MAX marks unassigned.
    let mut edge_vertex = vec![u32::MAX; field.len() * 3];
    let mut points: Vec<[i64; 3]> = Vec::new();
    let mut centroids: Vec<[f64; 3]> = Vec::new();
    let mut loops_out: Vec<Vec<usize>> = Vec::new();
    for z in 0..n[2] - 1 {
        for y in 0..n[1] - 1 {
            for x in 0..n[0] - 1 {
                let mut case = 0usize;
                for c in 0..8 {
                    let o = corner_offset(c);
                    let idx = (x + o[0] as usize) + n[0] * ((y + o[1] as usize) + n[1] * (z + o[2] as usize));
                    if field[idx] {
                        case |= 1 << c;
                    }
                }
                for lp in &table[case] {
                    let ids: Vec<usize> = lp
                        .iter()
                        .map(|&e| {
                            let (c, axis) = EDGES[e];
                            let o = corner_offset(c);
                            let p = [x as i64 + o[0], y as i64 + o[1], z as i64 + o[2]];
                            let key = 3 * (p[0] as usize + n[0] * (p[1] as usize + n[1] * p[2] as usize)) + axis;
                            if edge_vertex[key] == u32::MAX {
                                let mut l = p.map(|v| 2 * v);
                                l[axis] += 1;
                                edge_vertex[key] = points.len() as u32;
                                points.push(l);
                            }
                            edge_vertex[key] as usize
                        })
                        .collect();
                    loops_out.push(ids);
                }
            }
        }
    }
    let mut vertices: Vec<[f64; 3]> = points.iter().map(|&p| frame.world(p)).collect();
    let mut faces = Vec::new();
    for ids in loops_out {
        if ids.len() == 3 {
            faces.push([ids[0], ids[1], ids[2]]);
            continue;
        }
        let k = ids.len() as f64;
        let mut c = [0.0; 3];
        for &i in &ids {
            for a in 0..3 {
                c[a] += vertices[i][a] / k;
            }
        }
        centroids.push(c);
        let ci = vertices.len();
        vertices.push(c);
        for j in 0..ids.len() {
            faces.push([ci, ids[j], ids[(j + 1) % ids.len()]]);
        }
    }
    let mesh = TriangleMesh { vertices, faces, lattice: Some(MeshLattice { frame, points }) };
    mesh.check_closed().map_err(|e| Error::Invariant(format!("marching cubes produced an open mesh: {e}")))?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(dims: [usize; 3], spacing: [f64; 3]) -> RoiMask {
        let g = GridGeometry::new([dims[0] + 2, dims[1] + 2, dims[2] + 2], spacing, [0.0; 3]).unwrap();
        let mut m = RoiMask::filled(g, false);
        for z in 1..=dims[2] {
            for y in 1..=dims[1] {
                for x in 1..=dims[0] {
                    let i = g.index([x, y, z]);
                    m.labels[i] = 1;
                }
            }
        }
        m
    }

    /// Cell-by-cell volume and area of the midpoint surface around a solid block.
    fn block_oracle(n: [usize; 3]) -> (f64, f64) {
        let m = n.map(|v| v as f64 - 1.0);
        let faces = m[0] * m[1] + m[1] * m[2] + m[2] * m[0];
        let edges = m[0] + m[1] + m[2];
        let v = m[0] * m[1] * m[2] + 2.0 * faces * 0.5 + 4.0 * edges / 8.0 + 8.0 / 48.0;
        let a = 2.0 * faces + 4.0 * edges * 0.5f64.sqrt() + 3f64.sqrt();
        (v, a)
    }

    #[test]
    fn every_case_closes() {
        for case in 0..256 {
            let loops = case_loops(case);
            let used: usize = loops.iter().map(Vec::len).sum();
            let crossing = EDGES
                .iter()
                .filter(|&&(c, axis)| (case >> c & 1) != (case >> (c | 1 << axis) & 1))
                .count();
            assert_eq!(used, crossing, "case {case}");
        }
        assert!(case_loops(0).is_empty() && case_loops(255).is_empty());
    }

    #[test]
    fn single_voxel_is_an_octahedron() {
        for s in [1.0, 2.5] {
            let mesh = build_mesh(&block([1, 1, 1], [s; 3])).unwrap();
            assert_eq!((mesh.vertices.len(), mesh.faces.len()), (6, 8));
            let v = mesh_volume(&mesh).unwrap();
            assert!((v - s.powi(3) / 6.0).abs() <= 1e-12 * v);
            assert!((mesh_area(&mesh) - 3f64.sqrt() * s * s).abs() <= 1e-12 * s * s);
        }
    }

    #[test]
    fn blocks_match_cell_oracle() {
        for n in [[2, 2, 2], [3, 1, 2], [4, 3, 5]] {
            let mesh = build_mesh(&block(n, [1.0; 3])).unwrap();
            let (v, a) = block_oracle(n);
            assert!((mesh_volume(&mesh).unwrap() - v).abs() < 1e-9, "{n:?}");
            assert!((mesh_area(&mesh) - a).abs() < 1e-9, "{n:?}");
        }
        assert!((block_oracle([2, 2, 2]).0 - 17.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_voxels_stay_separate() {
        let g = GridGeometry::new([2, 2, 1], [1.0; 3], [0.0; 3]).unwrap();
        let m = RoiMask::new(g, vec![1, 0, 0, 1]).unwrap();
        let mesh = build_mesh(&m).unwrap();
        assert!((mesh_volume(&mesh).unwrap() - 2.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn unit_cube_mesh() {
        let v: Vec<[f64; 3]> = (0..8).map(|c| corner_offset(c).map(|x| x as f64)).collect();
        let quads = [[0, 2, 3, 1], [4, 5, 7, 6], [0, 1, 5, 4], [2, 6, 7, 3], [0, 4, 6, 2], [1, 3, 7, 5]];
        let faces = quads.iter().flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]]).collect();
        let mesh = TriangleMesh::new(v, faces).unwrap();
        assert!((mesh_volume(&mesh).unwrap() - 1.0).abs() < 1e-15);
        assert!((mesh_area(&mesh) - 6.0).abs() < 1e-15);
        let open = TriangleMesh::new(mesh.vertices.clone(), mesh.faces[1..].to_vec()).unwrap();
        assert!(matches!(mesh_volume(&open), Err(Error::Manifold(_))));
    }

    #[test]
    fn empty_mask_is_rejected() {
        let g = GridGeometry::new([2, 2, 2], [1.0; 3], [0.0; 3]).unwrap();
        assert!(matches!(build_mesh(&RoiMask::filled(g, false)), Err(Error::EmptyRoi(_))));
    }
}
