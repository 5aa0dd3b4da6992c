//! Ellipsoid surface area and the minimum volume enclosing ellipsoid.

use nalgebra::{Matrix3, Matrix4, SymmetricEigen, Vector3, Vector4};

use crate::error::{Error, Result};

/// Ellipsoid with semi-axes sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub center: [f64; 3],
    pub semi_axes: [f64; 3],
    /// Unit axis directions matching `semi_axes`.
    pub axes: [[f64; 3]; 3],
}

impl Ellipsoid {
    pub fn volume(&self) -> f64 {
        4.0 * std::f64::consts::PI * self.semi_axes.iter().product::<f64>() / 3.0
    }

    pub fn area(&self) -> f64 {
        let [a, b, c] = self.semi_axes;
        ellipsoid_area(a, b, c)
    }

    /// Squared normalised radius of `p`; at most 1 inside the ellipsoid.
    pub fn radius2(&self, p: [f64; 3]) -> f64 {
        let d = [0, 1, 2].map(|i| p[i] - self.center[i]);
        (0..3)
            .map(|k| {
                let t: f64 = (0..3).map(|i| d[i] * self.axes[k][i]).sum();
                (t / self.semi_axes[k]).powi(2)
            })
            .sum()
    }
}

/// Number of Legendre terms in the surface area series.
pub const AREA_SERIES_DEGREE: usize = 20;

/// Surface area by the Legendre series truncated at degree 20; requires `a ≥ b ≥ c > 0`.
///
/// Eccentricities are taken against the least axis, `α² = 1 − c²/a²` and
/// `β² = 1 − c²/b²`, which reproduces the spheroid closed forms.
/// Terms are `Q_ν/(1 − 4ν²)` with `Q_ν = (αβ)^ν P_ν((α² + β²)/(2αβ))`, evaluated by
/// the Legendre recurrence scaled so that no division by `αβ` occurs.
pub fn ellipsoid_area(a: f64, b: f64, c: f64) -> f64 {
    let alpha2 = (1.0 - (c / a).powi(2)).max(0.0);
    let beta2 = (1.0 - (c / b).powi(2)).max(0.0);
    let half_sum = (alpha2 + beta2) / 2.0;
    let prod2 = alpha2 * beta2;
    let (mut q_prev, mut q) = (1.0, half_sum);
    let mut sum = 1.0 + q / (1.0 - 4.0);
    for nu in 1..AREA_SERIES_DEGREE {
        let nf = nu as f64;
        let q_next = ((2.0 * nf + 1.0) * half_sum * q - nf * prod2 * q_prev) / (nf + 1.0);
        q_prev = q;
        q = q_next;
        let k = nf + 1.0;
        sum += q / (1.0 - 4.0 * k * k);
    }
    4.0 * std::f64::consts::PI * a * b * sum
}

/// Default Khachiyan stopping tolerance.
pub const MVEE_TOLERANCE: f64 = 0.001;

/// Relative margin under which two Khachiyan scores count as tied.
const TIE_MARGIN: f64 = 1e-9;

/// Minimum volume enclosing ellipsoid by Khachiyan's barycentric coordinate ascent.
///
/// Iterates until the step size falls below `tolerance`, then scales the
/// ellipsoid about its center so that every point is enclosed. Points whose
/// score ties the maximum share the step equally, which keeps the iteration
/// independent of point order.
pub fn mvee(points: &[[f64; 3]], tolerance: f64) -> Result<Ellipsoid> {
    let n = points.len();
    if n < 4 {
        return Err(Error::Degenerate("minimum volume enclosing ellipsoid needs at least 4 points".into()));
    }
    let mut mean = [0.0; 3];
    for p in points {
        for a in 0..3 {
            mean[a] += p[a] / n as f64;
        }
    }
    let d = 3.0;
    let lifted: Vec<Vector4<f64>> =
        points.iter().map(|p| Vector4::new(p[0] - mean[0], p[1] - mean[1], p[2] - mean[2], 1.0)).collect();
    let mut u = vec![1.0 / n as f64; n];
    let mut iterations = 0usize;
    loop {
        let mut x = Matrix4::<f64>::zeros();
        for (q, &w) in lifted.iter().zip(&u) {
            x += w * q * q.transpose();
        }
        let xi = x
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("enclosing ellipsoid of coplanar points".into()))?;
        let scores: Vec<f64> = lifted.iter().map(|q| q.dot(&(xi * q))).collect();
        let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = (0..n).filter(|&i| scores[i] >= top * (1.0 - TIE_MARGIN)).collect();
        let step = (top - d - 1.0) / ((d + 1.0) * (top - 1.0));
        let mut next: Vec<f64> = u.iter().map(|w| w * (1.0 - step)).collect();
        for &i in &tied {
            next[i] += step / tied.len() as f64;
        }
        u = next;
        iterations += 1;
        if step < tolerance || iterations > 1_000_000 {
            break;
        }
    }
    let mut c = Vector3::<f64>::zeros();
    let mut cov = Matrix3::<f64>::zeros();
    for (q, &w) in lifted.iter().zip(&u) {
        let v = Vector3::new(q[0], q[1], q[2]);
        c += w * v;
        cov += w * v * v.transpose();
    }
    cov -= c * c.transpose();
    // Shape matrix A = (cov · d)^-1; semi-axes are 1/sqrt(eig(A)) = sqrt(d · eig(cov)).
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::Degenerate("enclosing ellipsoid collapsed to a plane".into()));
    }
    let semi_axes = order.map(|i| (d * eig.eigenvalues[i]).sqrt());
    let axes = order.map(|i| {
        let v = eig.eigenvectors.column(i);
        [v[0], v[1], v[2]]
    });
    let mut e = Ellipsoid { center: [c[0] + mean[0], c[1] + mean[1], c[2] + mean[2]], semi_axes, axes };
    let reach = points.iter().map(|&p| e.radius2(p)).fold(1.0, f64::max);
    e.semi_axes = e.semi_axes.map(|s| s * reach.sqrt());
    Ok(e)
}
