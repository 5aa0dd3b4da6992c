//! End-to-end processing: configuration, orchestration, diagnostics,
//! feature names and reports.

pub mod config;
pub mod diagnostics;
pub mod nomenclature;
pub mod report;

use rayon::prelude::*;

pub use config::{preset, FamilySelection, ProcessingConfig, TextureSettings, PRESET_NAMES};
pub use diagnostics::{describe, DiagnosticSet, Stage, StageDiagnostics};
pub use nomenclature::{nomenclature, subscript};
pub use report::{format_value, FeatureRecord, FeatureReport, ReportFormat, VOLUME_AGGREGATION_ID};

use crate::error::{Error, Result};
use crate::features::{Family, FeatureValue};
use crate::intensity::{
    global_intensity_peak, histogram_features, ivh_features, local_intensity_peak, statistical_features,
};
use crate::morphology::compute_morphology;
use crate::preprocess::{
    discretise, plan_interpolation_grid, prepare_ivh, resample_image, resample_mask, resegment, DiscretisedRoi,
    InterpolationMode,
};
use crate::texture::{
    aggregate, gldzm_build, glcm_build, glcm_features, glrlm_build, glszm_build, ngldm_build, ngtdm_build,
    ngtdm_features, Aggregation, LevelVolume, NeighbourhoodMode, TextureMatrix, Unit,
};
use crate::volume::{extract_intensity_set, rasterize_contours, ContourSet, ImageVolume, RoiMask, RoiMaskPair};

/// Where the ROI comes from.
#[derive(Debug, Clone)]
pub enum RoiSource {
    Mask(RoiMask),
    Contours(ContourSet),
}

/// Image and ROI after interpolation and re-segmentation.
#[derive(Debug, Clone)]
pub struct ProcessedRoi {
    pub image: ImageVolume,
    pub masks: RoiMaskPair,
    pub diagnostics: DiagnosticSet,
}

fn require_roi(pair: &RoiMaskPair, stage: Stage) -> Result<()> {
    if pair.morphological.count() == 0 || pair.intensity.count() == 0 {
        return Err(Error::EmptyRoi(stage.name().into()));
    }
    Ok(())
}

/// Segmentation, interpolation and re-segmentation, with diagnostics at each stage.
pub fn process_roi(img: &ImageVolume, roi: &RoiSource, cfg: &ProcessingConfig) -> Result<ProcessedRoi> {
    cfg.validate()?;
    let mask = match roi {
        RoiSource::Mask(m) => m.clone(),
        RoiSource::Contours(c) => rasterize_contours(c, &img.geometry)?,
    };
    if mask.geometry != img.geometry {
        return Err(Error::Mismatch(format!(
            "mask grid {:?} differs from image grid {:?}",
            mask.geometry.dims, img.geometry.dims
        )));
    }
    let mut diagnostics = DiagnosticSet::default();
    let pair = RoiMaskPair::from_mask(mask);
    diagnostics.stages.push(describe(Stage::Initial, img, &pair));
    require_roi(&pair, Stage::Initial)?;

    let (image, pair) = if cfg.interpolation.mode == InterpolationMode::None {
        (img.clone(), pair)
    } else {
        let target = plan_interpolation_grid(&img.geometry, &cfg.interpolation)?;
        let image = resample_image(img, &target, &cfg.interpolation)?;
        let mask = resample_mask(&pair.morphological, &target, &cfg.interpolation)?;
        (image, RoiMaskPair::from_mask(mask))
    };
    diagnostics.stages.push(describe(Stage::Interpolated, &image, &pair));
    require_roi(&pair, Stage::Interpolated)?;

    let masks = if cfg.resegmentation.is_noop() { pair } else { resegment(&pair, &image, &cfg.resegmentation)? };
    diagnostics.stages.push(describe(Stage::Resegmented, &image, &masks));
    require_roi(&masks, Stage::Resegmented)?;
    Ok(ProcessedRoi { image, masks, diagnostics })
}

fn records(
    family: Family,
    aggregation: Option<Aggregation>,
    values: Vec<FeatureValue>,
    cfg: &ProcessingConfig,
) -> Result<Vec<FeatureRecord>> {
    let defs = family.features();
    if defs.len() != values.len() {
        return Err(Error::Invariant(format!(
            "{} produced {} values for {} features",
            family.name(),
            values.len(),
            defs.len()
        )));
    }
    Ok(defs
        .iter()
        .zip(values)
        .map(|(d, value)| FeatureRecord {
            ibsi_id: d.id,
            family,
            feature: d.name,
            aggregation: aggregation.map_or(VOLUME_AGGREGATION_ID, Aggregation::id),
            nomenclature: nomenclature(d, family, aggregation, cfg),
            value,
        })
        .collect())
}

fn is_directional(family: Family) -> bool {
    matches!(family, Family::Cooccurrence | Family::RunLength)
}

fn per_method<M: TextureMatrix>(
    units: &[Unit<M>],
    methods: &[Aggregation],
    features: impl Fn(&M) -> Vec<FeatureValue> + Copy,
) -> Result<Vec<(Aggregation, Vec<FeatureValue>)>> {
    methods.iter().map(|&m| Ok((m, aggregate(units, m, features)?.values))).collect()
}

fn texture_values(
    family: Family,
    levels: &LevelVolume,
    morphological: &[bool],
    cfg: &ProcessingConfig,
    methods: &[Aggregation],
) -> Result<Vec<(Aggregation, Vec<FeatureValue>)>> {
    let spec = cfg.texture.neighbourhood();
    let dim = cfg.approach;
    let methods: Vec<Aggregation> =
        methods.iter().copied().filter(|m| m.applies_to(family)).collect();
    match family {
        Family::Cooccurrence => per_method(&glcm_build(levels, &spec, dim)?, &methods, glcm_features),
        Family::RunLength => per_method(&glrlm_build(levels, &spec, dim)?, &methods, |x| x.features(false)),
        Family::SizeZone => per_method(&glszm_build(levels, &spec, dim)?, &methods, |x| x.features(false)),
        Family::DistanceZone => {
            let units = gldzm_build(levels, morphological, &spec, cfg.texture.zone_distance_norm, dim)?;
            per_method(&units, &methods, |x| x.features(false))
        }
        Family::ToneDifference => {
            per_method(&ngtdm_build(levels, &spec, dim, NeighbourhoodMode::Standard)?, &methods, ngtdm_features)
        }
        Family::Dependence => {
            let units = ngldm_build(levels, &spec, dim, NeighbourhoodMode::Standard)?;
            per_method(&units, &methods, |x| x.features(true))
        }
        _ => Err(Error::Invariant(format!("{} is not a texture family", family.name()))),
    }
}

/// Runs every selected family on a processed ROI.
pub fn compute_features(processed: &ProcessedRoi, cfg: &ProcessingConfig) -> Result<FeatureReport> {
    let img = &processed.image;
    let pair = &processed.masks;
    let set = extract_intensity_set(img, &pair.intensity)?;
    let families = cfg.families.families();
    let needs_levels = families.iter().any(|&f| {
        is_directional(f)
            || matches!(
                f,
                Family::Histogram | Family::SizeZone | Family::DistanceZone | Family::ToneDifference | Family::Dependence
            )
    });
    let discretised: Option<DiscretisedRoi> = if needs_levels {
        Some(discretise(&set.values, &cfg.discretisation, cfg.resegmentation.lower)?)
    } else {
        None
    };
    let levels = discretised.as_ref().map(|d| LevelVolume::from_roi(&pair.intensity, d)).transpose()?;
    let morphological: Vec<bool> = pair.morphological.labels.iter().map(|&l| l == 1).collect();
    let methods = cfg.effective_aggregations();
    let mut morph_opts = cfg.morphology;
    morph_opts.autocorrelation.seed = cfg.seed;

    let per_family: Vec<Result<Vec<FeatureRecord>>> = families
        .par_iter()
        .map(|&family| -> Result<Vec<FeatureRecord>> {
            let volume = |values| records(family, None, values, cfg);
            match family {
                Family::Morphology => volume(compute_morphology(pair, img, &morph_opts)?.values),
                Family::LocalIntensity => volume(vec![
                    FeatureValue::Value(local_intensity_peak(img, &pair.intensity)?),
                    FeatureValue::Value(global_intensity_peak(img, &pair.intensity)?),
                ]),
                Family::Statistics => volume(statistical_features(&set.values)),
                Family::Histogram => volume(histogram_features(discretised.as_ref().expect("discretised above"))),
                Family::IntensityVolume => {
                    volume(ivh_features(&prepare_ivh(&set.values, &cfg.ivh, &cfg.resegmentation)?))
                }
                _ => {
                    let lv = levels.as_ref().expect("discretised above");
                    let mut out = Vec::new();
                    for (m, values) in texture_values(family, lv, &morphological, cfg, &methods)? {
                        out.extend(records(family, Some(m), values, cfg)?);
                    }
                    Ok(out)
                }
            }
        })
        .collect();
    let mut all = Vec::new();
    for r in per_family {
        all.extend(r?);
    }
    Ok(FeatureReport { fingerprint: cfg.fingerprint(), records: all })
}

/// Full chain from image and ROI to feature report and diagnostics.
pub fn run_pipeline(img: &ImageVolume, roi: &RoiSource, cfg: &ProcessingConfig) -> Result<(FeatureReport, DiagnosticSet)> {
    let processed = process_roi(img, roi, cfg)?;
    let report = compute_features(&processed, cfg)?;
    Ok((report, processed.diagnostics))
}
