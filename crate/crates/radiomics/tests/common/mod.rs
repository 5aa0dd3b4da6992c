//! Independent reference implementations for texture matrices and features.
//!
//! Matrices are enumerated over all voxel pairs and connected components come
//! from union-find, so none of the scan-order logic of the library is reused.
//! Features are evaluated from their textbook sums on plain nested vectors.

#![allow(dead_code)]

pub mod scenes;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use radiomics::texture::LevelVolume;

/// A random level volume with a morphological mask containing its intensity mask.
pub struct RandomCase {
    pub vol: LevelVolume,
    pub morph: Vec<bool>,
    pub coarseness: u32,
}

pub fn random_case(seed: u64) -> RandomCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = [rng.random_range(1..=6), rng.random_range(1..=6), rng.random_range(1..=6)];
    let n_levels: u32 = rng.random_range(1..=6);
    let fill: f64 = rng.random_range(0.3..1.0);
    let n = dims[0] * dims[1] * dims[2];
    let mut levels = Vec::with_capacity(n);
    let mut morph = Vec::with_capacity(n);
    for _ in 0..n {
        let inside = rng.random_bool(fill);
        levels.push(if inside { rng.random_range(1..=n_levels) } else { 0 });
        morph.push(inside || rng.random_bool(0.3));
    }
    let coarseness = rng.random_range(0..=2);
    RandomCase { vol: LevelVolume::new(dims, levels, n_levels).unwrap(), morph, coarseness }
}

pub fn position(dims: [usize; 3], idx: usize) -> [i64; 3] {
    [(idx % dims[0]) as i64, ((idx / dims[0]) % dims[1]) as i64, (idx / (dims[0] * dims[1])) as i64]
}

fn sub(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn chebyshev(d: [i64; 3]) -> i64 {
    d.iter().map(|v| v.abs()).max().unwrap()
}

pub fn manhattan(d: [i64; 3]) -> i64 {
    d.iter().map(|v| v.abs()).sum()
}

/// Voxels of the scope: one slice, or all when `slice` is None.
pub fn scope(vol: &LevelVolume, slice: Option<usize>) -> Vec<usize> {
    (0..vol.levels.len())
        .filter(|&i| vol.levels[i] > 0 && slice.is_none_or(|z| position(vol.dims, i)[2] == z as i64))
        .collect()
}

/// All thirteen (3D) or four (2D) unit directions, one per opposite pair:
/// the first non-zero component in z, y, x order is positive.
pub fn unit_directions(three_d: bool) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for x in -1..=1 {
        for y in -1..=1 {
            for z in -1..=1 {
                if !three_d && z != 0 {
                    continue;
                }
                let first = [z, y, x].into_iter().find(|&v| v != 0);
                if first == Some(1) {
                    out.push([x, y, z]);
                }
            }
        }
    }
    out
}

/// Symmetric co-occurrence counts for direction `m`, rows and columns 1-based levels.
pub fn glcm(vol: &LevelVolume, slice: Option<usize>, m: [i64; 3]) -> Vec<Vec<u64>> {
    let ng = vol.n_levels as usize;
    let mut c = vec![vec![0u64; ng]; ng];
    let vox = scope(vol, slice);
    for &a in &vox {
        for &b in &vox {
            if sub(position(vol.dims, b), position(vol.dims, a)) == m {
                let (i, j) = (vol.levels[a] as usize - 1, vol.levels[b] as usize - 1);
                c[i][j] += 1;
                c[j][i] += 1;
            }
        }
    }
    c
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }
    fn find(&mut self, a: usize) -> usize {
        let mut r = a;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[a] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// Components of same-level voxels joined when `linked(offset)`: `(level, voxels)`.
pub fn components(vol: &LevelVolume, slice: Option<usize>, linked: impl Fn([i64; 3]) -> bool) -> Vec<(u32, Vec<usize>)> {
    let vox = scope(vol, slice);
    let mut uf = UnionFind::new(vox.len());
    for (ka, &a) in vox.iter().enumerate() {
        for (kb, &b) in vox.iter().enumerate() {
            if vol.levels[a] == vol.levels[b] && linked(sub(position(vol.dims, b), position(vol.dims, a))) {
                uf.union(ka, kb);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (k, &a) in vox.iter().enumerate() {
        groups.entry(uf.find(k)).or_default().push(a);
    }
    groups.into_values().map(|g| (vol.levels[g[0]], g)).collect()
}

/// Count matrix from `(level, column)` observations as nested rows.
pub fn tabulate(ng: usize, obs: impl IntoIterator<Item = (u32, usize)>) -> Vec<Vec<u64>> {
    let obs: Vec<(u32, usize)> = obs.into_iter().collect();
    let width = obs.iter().map(|o| o.1).max().unwrap_or(0);
    let mut t = vec![vec![0u64; width]; ng];
    for (i, j) in obs {
        t[i as usize - 1][j - 1] += 1;
    }
    t
}

/// Runs along `m` are components joined by steps of exactly `±m`.
pub fn glrlm(vol: &LevelVolume, slice: Option<usize>, m: [i64; 3]) -> Vec<Vec<u64>> {
    let neg = [-m[0], -m[1], -m[2]];
    let runs = components(vol, slice, |d| d == m || d == neg);
    tabulate(vol.n_levels as usize, runs.into_iter().map(|(l, v)| (l, v.len())))
}

/// Zones joined by any offset of Chebyshev length 1, in-plane for 2D.
pub fn zones(vol: &LevelVolume, slice: Option<usize>) -> Vec<(u32, Vec<usize>)> {
    components(vol, slice, |d| chebyshev(d) == 1 && (slice.is_none() || d[2] == 0))
}

pub fn glszm(vol: &LevelVolume, slice: Option<usize>) -> Vec<Vec<u64>> {
    tabulate(vol.n_levels as usize, zones(vol, slice).into_iter().map(|(l, v)| (l, v.len())))
}

/// Distance to the nearest voxel outside `inside`, off-grid positions
/// included, with border voxels at 1. 2D restricts to the voxel's slice.
pub fn border_distance(inside: &[bool], dims: [usize; 3], two_d: bool, norm: fn([i64; 3]) -> i64) -> Vec<i64> {
    let mut out = vec![0; inside.len()];
    for (a, d) in out.iter_mut().enumerate() {
        if !inside[a] {
            continue;
        }
        let p = position(dims, a);
        let zr = if two_d { p[2]..=p[2] } else { -1..=dims[2] as i64 };
        let mut best = i64::MAX;
        for z in zr {
            for y in -1..=dims[1] as i64 {
                for x in -1..=dims[0] as i64 {
                    let q = [x, y, z];
                    let on_grid = (0..3).all(|k| q[k] >= 0 && q[k] < dims[k] as i64);
                    let q_inside = on_grid && inside[q[0] as usize + dims[0] * (q[1] as usize + dims[1] * q[2] as usize)];
                    if !q_inside {
                        best = best.min(norm(sub(q, p)));
                    }
                }
            }
        }
        *d = best;
    }
    out
}

/// Distance zone counts with Manhattan distances to the morphological border.
pub fn gldzm(vol: &LevelVolume, morph: &[bool], slice: Option<usize>) -> Vec<Vec<u64>> {
    let dist = border_distance(morph, vol.dims, slice.is_some(), manhattan);
    let obs = zones(vol, slice).into_iter().map(|(l, v)| (l, v.iter().map(|&a| dist[a]).min().unwrap() as usize));
    tabulate(vol.n_levels as usize, obs)
}

fn neighbours(vol: &LevelVolume, slice: Option<usize>, a: usize) -> Vec<usize> {
    let pa = position(vol.dims, a);
    (0..vol.levels.len())
        .filter(|&b| {
            let d = sub(position(vol.dims, b), pa);
            b != a && vol.levels[b] > 0 && chebyshev(d) == 1 && (slice.is_none() || d[2] == 0)
        })
        .collect()
}

/// Grey tone counts and difference sums over voxels with at least one neighbour.
pub fn ngtdm(vol: &LevelVolume, slice: Option<usize>) -> (Vec<u64>, Vec<f64>) {
    let ng = vol.n_levels as usize;
    let (mut n, mut s) = (vec![0u64; ng], vec![0.0; ng]);
    for a in scope(vol, slice) {
        let nb = neighbours(vol, slice, a);
        if nb.is_empty() {
            continue;
        }
        let mean = nb.iter().map(|&b| f64::from(vol.levels[b])).sum::<f64>() / nb.len() as f64;
        let i = vol.levels[a] as usize;
        n[i - 1] += 1;
        s[i - 1] += (i as f64 - mean).abs();
    }
    (n, s)
}

/// Dependence counts: column is one plus the number of neighbours within `alpha` levels.
pub fn ngldm(vol: &LevelVolume, slice: Option<usize>, alpha: u32) -> Vec<Vec<u64>> {
    let obs = scope(vol, slice).into_iter().map(|a| {
        let dep = neighbours(vol, slice, a).iter().filter(|&&b| vol.levels[a].abs_diff(vol.levels[b]) <= alpha).count();
        (vol.levels[a], dep + 1)
    });
    tabulate(vol.n_levels as usize, obs)
}

pub fn add_rows(a: &mut [Vec<u64>], b: &[Vec<u64>]) {
    for (ra, rb) in a.iter_mut().zip(b) {
        if ra.len() < rb.len() {
            ra.resize(rb.len(), 0);
        }
        for (x, y) in ra.iter_mut().zip(rb) {
            *x += y;
        }
    }
}

fn log2_entropy(p: impl IntoIterator<Item = f64>) -> f64 {
    p.into_iter().filter(|&v| v > 0.0).map(|v| -v * v.log2()).sum()
}

/// Co-occurrence features from their defining sums; None marks undefined.
pub fn glcm_features(c: &[Vec<u64>]) -> Vec<Option<f64>> {
    let ng = c.len();
    let total: u64 = c.iter().flatten().sum();
    if total == 0 {
        return vec![None; 25];
    }
    let p: Vec<Vec<f64>> = c.iter().map(|r| r.iter().map(|&v| v as f64 / total as f64).collect()).collect();
    let lv = |k: usize| (k + 1) as f64;
    let cells = || (0..ng).flat_map(move |a| (0..ng).map(move |b| (a, b)));
    let px: Vec<f64> = (0..ng).map(|a| p[a].iter().sum()).collect();
    let py: Vec<f64> = (0..ng).map(|b| (0..ng).map(|a| p[a][b]).sum()).collect();
    let mu_x: f64 = (0..ng).map(|a| lv(a) * px[a]).sum();
    let mu_y: f64 = (0..ng).map(|b| lv(b) * py[b]).sum();
    let sd_x = (0..ng).map(|a| (lv(a) - mu_x).powi(2) * px[a]).sum::<f64>().sqrt();
    let sd_y = (0..ng).map(|b| (lv(b) - mu_y).powi(2) * py[b]).sum::<f64>().sqrt();
    let sum_over = |f: &dyn Fn(f64, f64, f64) -> f64| cells().map(|(a, b)| f(lv(a), lv(b), p[a][b])).sum::<f64>();

    let mut pd = vec![0.0; ng];
    let mut ps = vec![0.0; 2 * ng + 1];
    for (a, b) in cells() {
        pd[a.abs_diff(b)] += p[a][b];
        ps[a + b + 2] += p[a][b];
    }
    let d_avg: f64 = pd.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
    let s_avg: f64 = ps.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
    let joint_avg = sum_over(&|i, _, v| i * v);
    let ngf = ng as f64;
    let hx = log2_entropy(px.iter().copied());
    let hxy = log2_entropy(p.iter().flatten().copied());
    let hxy1 = -cells().filter(|&(a, b)| p[a][b] > 0.0).map(|(a, b)| p[a][b] * (px[a] * py[b]).log2()).sum::<f64>();
    let hxy2 = log2_entropy(cells().map(|(a, b)| px[a] * py[b]));

    vec![
        Some(p.iter().flatten().copied().fold(0.0, f64::max)),
        Some(joint_avg),
        Some(sum_over(&|i, _, v| (i - joint_avg).powi(2) * v)),
        Some(hxy),
        Some(d_avg),
        Some(pd.iter().enumerate().map(|(k, v)| (k as f64 - d_avg).powi(2) * v).sum()),
        Some(log2_entropy(pd.iter().copied())),
        Some(s_avg),
        Some(ps.iter().enumerate().map(|(k, v)| (k as f64 - s_avg).powi(2) * v).sum()),
        Some(log2_entropy(ps.iter().copied())),
        Some(sum_over(&|_, _, v| v * v)),
        Some(sum_over(&|i, j, v| (i - j).powi(2) * v)),
        Some(sum_over(&|i, j, v| (i - j).abs() * v)),
        Some(sum_over(&|i, j, v| v / (1.0 + (i - j).abs()))),
        Some(sum_over(&|i, j, v| v / (1.0 + (i - j).abs() / ngf))),
        Some(sum_over(&|i, j, v| v / (1.0 + (i - j).powi(2)))),
        Some(sum_over(&|i, j, v| v / (1.0 + (i - j).powi(2) / (ngf * ngf)))),
        Some((1..ng).map(|k| pd[k] / (k * k) as f64).sum()),
        (sd_x * sd_y > 0.0).then(|| sum_over(&|i, j, v| (i - mu_x) * (j - mu_y) * v) / (sd_x * sd_y)),
        Some(sum_over(&|i, j, v| i * j * v)),
        Some(sum_over(&|i, j, v| (i + j - mu_x - mu_y).powi(2) * v)),
        Some(sum_over(&|i, j, v| (i + j - mu_x - mu_y).powi(3) * v)),
        Some(sum_over(&|i, j, v| (i + j - mu_x - mu_y).powi(4) * v)),
        (hx > 0.0).then(|| (hxy - hxy1) / hx),
        Some((1.0 - (-2.0 * (hxy2 - hxy).max(0.0)).exp()).sqrt()),
    ]
}

/// Features shared by the count families; `n_voxels` is the voxel count of the unit.
pub fn count_features(r: &[Vec<u64>], n_voxels: u64, with_energy: bool) -> Vec<Option<f64>> {
    let n = 16 + usize::from(with_energy);
    let ns: u64 = r.iter().flatten().sum();
    if ns == 0 {
        return vec![None; n];
    }
    let ns = ns as f64;
    let entries: Vec<(f64, f64, f64)> = r
        .iter()
        .enumerate()
        .flat_map(|(a, row)| row.iter().enumerate().map(move |(b, &c)| ((a + 1) as f64, (b + 1) as f64, c as f64)))
        .filter(|e| e.2 > 0.0)
        .collect();
    let emph = |f: &dyn Fn(f64, f64) -> f64| entries.iter().map(|&(i, j, c)| c * f(i, j)).sum::<f64>() / ns;
    let rows: Vec<f64> = r.iter().map(|row| row.iter().sum::<u64>() as f64).collect();
    let width = r.iter().map(Vec::len).max().unwrap_or(0);
    let cols: Vec<f64> = (0..width).map(|b| r.iter().map(|row| row.get(b).copied().unwrap_or(0)).sum::<u64>() as f64).collect();
    let mu_i = emph(&|i, _| i);
    let mu_j = emph(&|_, j| j);
    let mut out = vec![
        emph(&|_, j| 1.0 / (j * j)),
        emph(&|_, j| j * j),
        emph(&|i, _| 1.0 / (i * i)),
        emph(&|i, _| i * i),
        emph(&|i, j| 1.0 / (i * i * j * j)),
        emph(&|i, j| i * i / (j * j)),
        emph(&|i, j| j * j / (i * i)),
        emph(&|i, j| i * i * j * j),
        rows.iter().map(|v| v * v).sum::<f64>() / ns,
        rows.iter().map(|v| v * v).sum::<f64>() / (ns * ns),
        cols.iter().map(|v| v * v).sum::<f64>() / ns,
        cols.iter().map(|v| v * v).sum::<f64>() / (ns * ns),
        ns / n_voxels as f64,
        emph(&|i, _| (i - mu_i).powi(2)),
        emph(&|_, j| (j - mu_j).powi(2)),
        log2_entropy(entries.iter().map(|e| e.2 / ns)),
    ];
    if with_energy {
        out.push(entries.iter().map(|e| (e.2 / ns).powi(2)).sum());
    }
    out.into_iter().map(Some).collect()
}

/// Grey tone features. A single occupied level gives zero contrast, busyness
/// and (without differences) strength; coarseness is capped at 1e6.
pub fn ngtdm_features(n: &[u64], s: &[f64]) -> Vec<Option<f64>> {
    let nvc: u64 = n.iter().sum();
    if nvc == 0 {
        return vec![None; 5];
    }
    let nvc = nvc as f64;
    let lv: Vec<(f64, f64, f64)> =
        (0..n.len()).filter(|&k| n[k] > 0).map(|k| ((k + 1) as f64, n[k] as f64 / nvc, s[k])).collect();
    let ngp = lv.len() as f64;
    let s_sum: f64 = s.iter().sum();
    let ps: f64 = lv.iter().map(|&(_, p, s)| p * s).sum();
    let pairs = || lv.iter().flat_map(|a| lv.iter().map(move |b| (*a, *b)));
    let coarseness = if ps == 0.0 { 1e6 } else { (1.0 / ps).min(1e6) };
    if lv.len() == 1 {
        let strength = 0.0;
        return vec![Some(coarseness), Some(0.0), Some(0.0), Some(0.0), Some(strength)];
    }
    let contrast = pairs().map(|((i, pi, _), (j, pj, _))| pi * pj * (i - j).powi(2)).sum::<f64>() / (ngp * (ngp - 1.0))
        * s_sum
        / nvc;
    let busy_den: f64 = pairs().map(|((i, pi, _), (j, pj, _))| (i * pi - j * pj).abs()).sum();
    let complexity =
        pairs().map(|((i, pi, si), (j, pj, sj))| (i - j).abs() * (pi * si + pj * sj) / (pi + pj)).sum::<f64>() / nvc;
    let strength_num: f64 = pairs().map(|((i, pi, _), (j, pj, _))| (pi + pj) * (i - j).powi(2)).sum();
    vec![
        Some(coarseness),
        Some(contrast),
        (busy_den > 0.0).then(|| ps / busy_den),
        Some(complexity),
        Some(if s_sum == 0.0 { 0.0 } else { strength_num / s_sum }),
    ]
}

/// Relative agreement `|a − b| ≤ tol · max(|a|, |b|)`, with an absolute floor
/// of `tol · 1e-3` for values that cancel to zero.
pub fn agree(a: f64, b: f64, tol: f64) -> bool {
    let d = (a - b).abs();
    d <= tol * a.abs().max(b.abs()) || d <= tol * 1e-3
}

/// Compares library feature values with reference values; returns the first mismatch.
pub fn compare_features(
    label: &str,
    got: &[radiomics::FeatureValue],
    want: &[Option<f64>],
    tol: f64,
) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("{label}: {} values, expected {}", got.len(), want.len()));
    }
    for (k, (g, w)) in got.iter().zip(want).enumerate() {
        let ok = match (g.value(), w) {
            (None, None) => true,
            (Some(a), Some(b)) => agree(a, *b, tol),
            _ => false,
        };
        if !ok {
            return Err(format!("{label}: feature {k} is {g:?}, expected {w:?}"));
        }
    }
    Ok(())
}

use radiomics::texture::{
    aggregate, direction_vectors, gldzm_build, glcm_build, glcm_features as lib_glcm_features, glrlm_build,
    glszm_build, ngldm_build, ngtdm_build, ngtdm_features as lib_ngtdm_features, Aggregation, CountMatrix, Dimension,
    NeighbourhoodMode, NeighbourhoodSpec, Norm,
};

fn count_rows(m: &CountMatrix, width: usize) -> Vec<Vec<u64>> {
    (1..=m.n_levels).map(|i| m.row(i, width)).collect()
}

fn same_counts(label: &str, m: &CountMatrix, want: &[Vec<u64>]) -> Result<(), String> {
    let width = m.n_cols.max(want.iter().map(Vec::len).max().unwrap_or(0));
    let padded: Vec<Vec<u64>> = want
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.resize(width, 0);
            r
        })
        .collect();
    let got = count_rows(m, width);
    if got == padded {
        Ok(())
    } else {
        Err(format!("{label}: matrix {got:?}, expected {padded:?}"))
    }
}

fn voxels(vol: &LevelVolume, slice: Option<usize>) -> u64 {
    scope(vol, slice).len() as u64
}

/// Checks every texture matrix and feature of one random case against the
/// references, for the 2D and 3D approaches, per unit and merged.
pub fn check_case(seed: u64, tol: f64) -> Result<(), String> {
    let case = random_case(seed);
    let vol = &case.vol;
    let ng = vol.n_levels as usize;
    let spec = NeighbourhoodSpec { coarseness: case.coarseness, ..Default::default() };
    for dim in [Dimension::TwoD, Dimension::ThreeD] {
        let three_d = dim == Dimension::ThreeD;
        let tag = |what: &str| format!("seed {seed} {dim:?} {what}");
        let dirs = direction_vectors(&spec, dim).map_err(|e| e.to_string())?;
        let mut sorted = dirs.clone();
        sorted.sort();
        let mut want_dirs = unit_directions(three_d);
        want_dirs.sort();
        if sorted != want_dirs {
            return Err(tag(&format!("directions {dirs:?}")));
        }
        let (merge_dir, merge_zone) =
            if three_d { (Aggregation::Merge3d, Aggregation::ZoneVolume3d) } else { (Aggregation::VolumeMerge2d, Aggregation::ZoneMerge2d) };

        let units = glcm_build(vol, &spec, dim).map_err(|e| e.to_string())?;
        let mut merged = vec![vec![0u64; ng]; ng];
        for u in &units {
            let want = glcm(vol, u.slice, dirs[u.direction.unwrap()]);
            if u.matrix.rows() != want {
                return Err(tag(&format!("co-occurrence {:?} {:?}: {:?} vs {want:?}", u.slice, u.direction, u.matrix.rows())));
            }
            compare_features(&tag("co-occurrence features"), &lib_glcm_features(&u.matrix), &glcm_features(&want), tol)?;
            add_rows(&mut merged, &want);
        }
        let agg = aggregate(&units, merge_dir, lib_glcm_features).map_err(|e| e.to_string())?;
        compare_features(&tag("merged co-occurrence features"), &agg.values, &glcm_features(&merged), tol)?;

        let units = glrlm_build(vol, &spec, dim).map_err(|e| e.to_string())?;
        let mut merged = vec![vec![]; ng];
        let mut merged_voxels = 0;
        for u in &units {
            let want = glrlm(vol, u.slice, dirs[u.direction.unwrap()]);
            same_counts(&tag("run length"), &u.matrix, &want)?;
            let nv = voxels(vol, u.slice);
            compare_features(&tag("run length features"), &u.matrix.features(false), &count_features(&want, nv, false), tol)?;
            add_rows(&mut merged, &want);
            merged_voxels += nv;
        }
        let agg = aggregate(&units, merge_dir, |m| m.features(false)).map_err(|e| e.to_string())?;
        compare_features(&tag("merged run length features"), &agg.values, &count_features(&merged, merged_voxels, false), tol)?;

        type Reference<'a> = Box<dyn Fn(Option<usize>) -> Vec<Vec<u64>> + 'a>;
        let zone_families: [(&str, Vec<radiomics::texture::Unit<CountMatrix>>, Reference, bool); 3] = [
            ("size zone", glszm_build(vol, &spec, dim).map_err(|e| e.to_string())?, Box::new(|s| glszm(vol, s)), false),
            (
                "distance zone",
                gldzm_build(vol, &case.morph, &spec, Norm::Manhattan, dim).map_err(|e| e.to_string())?,
                Box::new(|s| gldzm(vol, &case.morph, s)),
                false,
            ),
            (
                "dependence",
                ngldm_build(vol, &spec, dim, NeighbourhoodMode::Standard).map_err(|e| e.to_string())?,
                Box::new(|s| ngldm(vol, s, case.coarseness)),
                true,
            ),
        ];
        for (name, units, reference, energy) in zone_families {
            let mut merged = vec![vec![]; ng];
            let mut merged_voxels = 0;
            for u in &units {
                let want = reference(u.slice);
                same_counts(&tag(name), &u.matrix, &want)?;
                let nv = voxels(vol, u.slice);
                compare_features(&tag(name), &u.matrix.features(energy), &count_features(&want, nv, energy), tol)?;
                add_rows(&mut merged, &want);
                merged_voxels += nv;
            }
            let agg = aggregate(&units, merge_zone, |m| m.features(energy)).map_err(|e| e.to_string())?;
            compare_features(&tag(name), &agg.values, &count_features(&merged, merged_voxels, energy), tol)?;
        }

        let units = ngtdm_build(vol, &spec, dim, NeighbourhoodMode::Standard).map_err(|e| e.to_string())?;
        let (mut mn, mut ms) = (vec![0u64; ng], vec![0.0; ng]);
        for u in &units {
            let (n, s) = ngtdm(vol, u.slice);
            let s_ok = s.iter().zip(&u.matrix.s).all(|(a, b)| agree(*a, *b, tol));
            if u.matrix.n != n || !s_ok {
                return Err(tag(&format!("tone difference {:?}: {:?} vs {:?}", u.slice, (&u.matrix.n, &u.matrix.s), (&n, &s))));
            }
            compare_features(&tag("tone difference features"), &lib_ngtdm_features(&u.matrix), &ngtdm_features(&n, &s), tol)?;
            for k in 0..ng {
                mn[k] += n[k];
                ms[k] += s[k];
            }
        }
        let agg = aggregate(&units, merge_zone, lib_ngtdm_features).map_err(|e| e.to_string())?;
        compare_features(&tag("merged tone difference features"), &agg.values, &ngtdm_features(&mn, &ms), tol)?;
    }
    Ok(())
}
