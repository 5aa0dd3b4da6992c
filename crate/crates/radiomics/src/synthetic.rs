//! Seeded synthetic CT-like volumes with a lesion mask, for demos and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::volume::{GridGeometry, ImageVolume, RoiMask};

/// A body of soft tissue in air holding an ellipsoidal lesion with a necrotic
/// core, a fatty rim patch and Gaussian noise. Intensities are integral HU.
/// Returns the image and the lesion mask.
pub fn synthetic_ct(dims: [usize; 3], spacing: [f64; 3], seed: u64) -> (ImageVolume, RoiMask) {
    let g = GridGeometry::new(dims, spacing, [0.0; 3]).expect("synthetic geometry is valid");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 18.0).expect("valid deviation");
    let ext = [0, 1, 2].map(|a| dims[a] as f64 * spacing[a]);
    let center = [0, 1, 2].map(|a| ext[a] / 2.0 + rng.random_range(-0.05..0.05) * ext[a]);
    let radii = [0.32, 0.26, 0.3].map(|f: f64| f * ext[0].min(ext[1]).min(ext[2]) * rng.random_range(0.9..1.1));
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);

    let mut data = Vec::with_capacity(g.len());
    let mut labels = Vec::with_capacity(g.len());
    for i in 0..g.len() {
        let p = g.world(g.position(i));
        let d = [0, 1, 2].map(|a| p[a] - center[a]);
        let body = (d[0] / (0.48 * ext[0])).powi(2) + (d[1] / (0.45 * ext[1])).powi(2) <= 1.0;
        let r = (0..3).map(|a| (d[a] / radii[a]).powi(2)).sum::<f64>().sqrt();
        let lesion = r <= 1.0;
        let mut v = if !body {
            -1000.0
        } else if lesion {
            let texture = 35.0 * (0.35 * p[0] + phase).sin() * (0.27 * p[1]).cos() + 15.0 * (0.4 * p[2]).sin();
            let core = if r < 0.35 { -35.0 } else { 0.0 };
            let rim = if r > 0.8 && d[0] > 0.0 && d[1] > 0.0 { -140.0 } else { 0.0 };
            45.0 + texture + core + rim
        } else {
            20.0
        };
        if body {
            v += noise.sample(&mut rng);
        }
        data.push(v.round());
        labels.push(u8::from(lesion));
    }
    let img = ImageVolume::new(g, data).expect("sizes agree");
    let mask = RoiMask::new(g, labels).expect("sizes agree");
    (img, mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_non_empty() {
        let (a, m) = synthetic_ct([16, 16, 8], [1.0, 1.0, 2.0], 4);
        let (b, _) = synthetic_ct([16, 16, 8], [1.0, 1.0, 2.0], 4);
        assert_eq!(a, b);
        assert!(m.count() > 50);
        assert!(a.data.iter().all(|v| v.fract() == 0.0));
    }
}
