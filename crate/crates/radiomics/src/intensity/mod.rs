//! Intensity features: local peaks, statistics, histogram and intensity-volume histogram.

pub mod histogram;
pub mod ivh;
pub mod local;
pub mod stats;

pub use histogram::{histogram_features, histogram_gradient, IntensityHistogram};
pub use ivh::{area_under_curve, intensity_at, ivh_features, volume_at};
pub use local::{global_intensity_peak, local_intensity_peak, peak_radius, sphere_offsets};
pub use stats::{percentile_sorted, statistical_features, Summary};
