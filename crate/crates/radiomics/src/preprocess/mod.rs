//! Interpolation, re-segmentation, discretisation and intensity-volume
//! histogram preparation.

pub mod discretise;
pub mod interpolate;
pub mod ivh;
pub mod resegment;

pub use discretise::{discretise, discretise_fbn, discretise_fbs, DiscretisationSpec, DiscretisedRoi, MinimumSource};
pub use interpolate::{
    plan_interpolation_grid, resample_image, resample_mask, ImageMethod, InterpolationMode, InterpolationSpec,
    MaskMethod, Rounding,
};
pub use ivh::{prepare_ivh, IvhData, IvhMode};
pub use resegment::{resegment, ChainOrder, ResegmentationSpec};
