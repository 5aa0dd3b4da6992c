//! Morphological features from the ROI surface mesh, its convex hull and the
//! voxel point sets of the morphological and intensity masks.

pub mod autocorr;
pub mod bbox;
pub mod ellipsoid;
pub mod hull;
pub mod mesh;
pub mod pca;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use autocorr::{moran_geary, Autocorrelation, AutocorrelationMethod, SubsamplePolicy};
pub use bbox::{axis_aligned_box, oriented_box, BoxExtent};
pub use ellipsoid::{ellipsoid_area, mvee, Ellipsoid, MVEE_TOLERANCE};
pub use hull::ConvexHull;
pub use mesh::{build_mesh, mesh_area, mesh_volume, TriangleMesh};
pub use pca::{principal_axes, CovarianceDivisor, PrincipalAxes};

use crate::error::{Error, Result};
use crate::features::FeatureValue;
use crate::volume::{extract_intensity_set, mask_points, ImageVolume, RoiMaskPair};

/// Tunable parameters of the morphological family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MorphologyOptions {
    pub covariance: CovarianceDivisor,
    pub mvee_tolerance: f64,
    pub autocorrelation: SubsamplePolicy,
}

impl Default for MorphologyOptions {
    fn default() -> Self {
        Self {
            covariance: CovarianceDivisor::default(),
            mvee_tolerance: MVEE_TOLERANCE,
            autocorrelation: SubsamplePolicy::default(),
        }
    }
}

/// Feature values in catalogue order plus how autocorrelation was evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct MorphologyResult {
    pub values: Vec<FeatureValue>,
    pub autocorrelation: AutocorrelationMethod,
}

fn centroid(points: &[[f64; 3]], weights: Option<&[f64]>) -> Option<[f64; 3]> {
    let mut c = [0.0; 3];
    let mut total = 0.0;
    for (i, p) in points.iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[i]);
        total += w;
        for a in 0..3 {
            c[a] += w * p[a];
        }
    }
    (total != 0.0).then(|| c.map(|v| v / total))
}

/// Computes all morphological features.
///
/// The mesh, hull and axis features use the morphological mask; intensity
/// weighted features and autocorrelation use the intensity mask.
pub fn compute_morphology(
    pair: &RoiMaskPair,
    img: &ImageVolume,
    opts: &MorphologyOptions,
) -> Result<MorphologyResult> {
    let morph = &pair.morphological;
    if img.geometry != morph.geometry {
        return Err(Error::Mismatch("image and mask geometries differ".into()));
    }
    let mesh = build_mesh(morph)?;
    let v = mesh_volume(&mesh)?;
    let a = mesh_area(&mesh);
    let hull = ConvexHull::of_mesh(&mesh);
    let morph_points = mask_points(morph).points;
    let gl = extract_intensity_set(img, &pair.intensity)?;
    let mean_gl = gl.values.iter().sum::<f64>() / gl.len() as f64;

    let approx_v = morph_points.len() as f64 * morph.geometry.voxel_volume();
    let comp2 = 36.0 * PI * v * v / a.powi(3);
    let shape = "surface of zero area";

    let com_shift = match (centroid(&morph_points, None), centroid(&gl.centers.points, Some(&gl.values))) {
        (Some(g), Some(w)) => FeatureValue::Value(mesh::norm(mesh::sub(g, w))),
        _ => FeatureValue::undefined("intensities sum to zero"),
    };

    let axes = principal_axes(&morph_points, opts.covariance);
    let [l_major, l_minor, l_least] = axes.eigenvalues;
    let lengths = axes.eigenvalues.map(|l| 4.0 * l.sqrt());
    let flat = "major axis of zero length";

    let aabb = axis_aligned_box(&mesh.vertices);
    let (hull_values, ombb_values, mvee_values, max_diam) = match &hull {
        Ok(h) => {
            let ombb = oriented_box(&h.vertices, &h.lattice_normals, morph.geometry.spacing, &axes.axes);
            let mvee_values = match mvee(&h.vertices, opts.mvee_tolerance) {
                Ok(e) => [FeatureValue::ratio(v, e.volume(), shape), FeatureValue::ratio(a, e.area(), shape)],
                Err(e) => [FeatureValue::undefined(e.to_string()), FeatureValue::undefined(e.to_string())],
            };
            (
                [FeatureValue::ratio(v, h.volume(), shape), FeatureValue::ratio(a, h.area(), shape)],
                [FeatureValue::ratio(v, ombb.volume(), shape), FeatureValue::ratio(a, ombb.area(), shape)],
                mvee_values,
                FeatureValue::Value(h.max_diameter()),
            )
        }
        Err(e) => {
            let u = || FeatureValue::undefined(e.to_string());
            ([u(), u()], [u(), u()], [u(), u()], u())
        }
    };

    let [sa, sb, sc] = axes.semi_axes();
    let aee_values = if sc > 0.0 {
        let aee_v = 4.0 * PI * sa * sb * sc / 3.0;
        [FeatureValue::ratio(v, aee_v, shape), FeatureValue::ratio(a, ellipsoid_area(sa, sb, sc), shape)]
    } else {
        let r = "point set has a zero principal axis";
        [FeatureValue::undefined(r), FeatureValue::undefined(r)]
    };

    let ac = moran_geary(&gl, &opts.autocorrelation);
    let [hull_v, hull_a] = hull_values;
    let [ombb_v, ombb_a] = ombb_values;
    let [mvee_v, mvee_a] = mvee_values;
    let [aee_v, aee_a] = aee_values;
    let values = vec![
        FeatureValue::Value(v),
        FeatureValue::Value(approx_v),
        FeatureValue::Value(a),
        FeatureValue::ratio(a, v, "mesh encloses no volume"),
        FeatureValue::ratio(v, PI.sqrt() * a.powf(1.5), shape),
        FeatureValue::checked(comp2, shape),
        FeatureValue::ratio(a, (36.0 * PI * v * v).cbrt(), shape),
        FeatureValue::ratio((36.0 * PI * v * v).cbrt(), a, shape),
        FeatureValue::checked(a / (36.0 * PI * v * v).cbrt() - 1.0, "mesh encloses no volume"),
        com_shift,
        max_diam,
        FeatureValue::Value(lengths[0]),
        FeatureValue::Value(lengths[1]),
        FeatureValue::Value(lengths[2]),
        FeatureValue::ratio(l_minor.sqrt(), l_major.sqrt(), flat),
        FeatureValue::ratio(l_least.sqrt(), l_major.sqrt(), flat),
        FeatureValue::ratio(v, aabb.volume(), shape),
        FeatureValue::ratio(a, aabb.area(), shape),
        ombb_v,
        ombb_a,
        aee_v,
        aee_a,
        mvee_v,
        mvee_a,
        hull_v,
        hull_a,
        FeatureValue::Value(v * mean_gl),
        ac.moran_i,
        ac.geary_c,
    ];
    Ok(MorphologyResult { values, autocorrelation: ac.method })
}
