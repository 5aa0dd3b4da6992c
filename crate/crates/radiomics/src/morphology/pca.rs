//! Principal axes of a voxel center point set.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

/// Divisor of the covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovarianceDivisor {
    /// Divide by the number of points.
    #[default]
    Population,
    /// Divide by the number of points minus one.
    Sample,
}

/// Eigen-decomposition of the point covariance, largest eigenvalue first.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAxes {
    /// `[major, minor, least]`, clamped to be non-negative.
    pub eigenvalues: [f64; 3],
    /// Unit eigenvectors matching `eigenvalues`.
    pub axes: [[f64; 3]; 3],
}

impl PrincipalAxes {
    /// Semi-axis lengths `2√λ`.
    pub fn semi_axes(&self) -> [f64; 3] {
        self.eigenvalues.map(|l| 2.0 * l.sqrt())
    }
}

pub fn principal_axes(points: &[[f64; 3]], divisor: CovarianceDivisor) -> PrincipalAxes {
    let n = points.len() as f64;
    let mut mean = [0.0; 3];
    for p in points {
        for a in 0..3 {
            mean[a] += p[a];
        }
    }
    mean = mean.map(|m| m / n);
    let mut cov = Matrix3::<f64>::zeros();
    for p in points {
        let d = Vector3::new(p[0] - mean[0], p[1] - mean[1], p[2] - mean[2]);
        cov += d * d.transpose();
    }
    let denom = match divisor {
        CovarianceDivisor::Population => n,
        CovarianceDivisor::Sample => (n - 1.0).max(1.0),
    };
    cov /= denom;
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.map(|i| eig.eigenvalues[i].max(0.0));
    let axes = order.map(|i| {
        let v = eig.eigenvectors.column(i);
        [v[0], v[1], v[2]]
    });
    PrincipalAxes { eigenvalues, axes }
}
