//! Image biomarker extraction: volumes and ROI masks, preprocessing, and
//! morphological, intensity and texture feature families with a configurable
//! processing pipeline.

pub mod error;
pub mod features;
pub mod intensity;
pub mod io;
pub mod morphology;
pub mod phantom;
pub mod pipeline;
pub mod preprocess;
pub mod synthetic;
pub mod texture;
pub mod volume;

pub use error::{Error, Result};
pub use features::{Family, FeatureValue};
