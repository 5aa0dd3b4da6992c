//! Feature names with processing subscripts, e.g. `joint maximum_{CM,3D:mrg,LIN:3D:2mm,RS:[-1000,400],FBS:25}`.
//!
//! Parts that hold their default value are left out.

use crate::features::{FeatureDef, Family};
use crate::pipeline::config::ProcessingConfig;
use crate::preprocess::{ChainOrder, DiscretisationSpec, ImageMethod, InterpolationMode, IvhMode, ResegmentationSpec};
use crate::texture::{Aggregation, Norm};

fn num(v: f64) -> String {
    format!("{v}")
}

fn interpolation_tag(cfg: &ProcessingConfig) -> Option<String> {
    let spec = &cfg.interpolation;
    let dim = match spec.mode {
        InterpolationMode::None => return None,
        InterpolationMode::InPlane => "2D",
        InterpolationMode::Volumetric => "3D",
    };
    let kernel = match spec.image_method {
        ImageMethod::NearestNeighbour => "NNB",
        ImageMethod::Trilinear => "LIN",
        ImageMethod::TricubicConvolution => "CCI",
        ImageMethod::TricubicSpline => "CSI",
    };
    let axes = if spec.mode == InterpolationMode::InPlane { &spec.spacing[..2] } else { &spec.spacing[..] };
    let spacing = if axes.iter().all(|&s| s == axes[0]) {
        num(axes[0])
    } else {
        axes.iter().map(|&s| num(s)).collect::<Vec<_>>().join("x")
    };
    Some(format!("{kernel}:{dim}:{spacing}mm"))
}

fn resegmentation_tag(spec: &ResegmentationSpec) -> Option<String> {
    let range = spec.has_range().then(|| {
        let lo = spec.lower.map_or("(-∞".to_string(), |v| format!("[{}", num(v)));
        let hi = spec.upper.map_or("∞)".to_string(), |v| format!("{}]", num(v)));
        format!("{lo},{hi}")
    });
    let outlier = spec.outlier_sigma.map(|k| format!("{}σ", num(k)));
    let body = match (range, outlier) {
        (None, None) => return None,
        (Some(r), None) => r,
        (None, Some(o)) => o,
        (Some(r), Some(o)) => match spec.order {
            ChainOrder::RangeThenOutlier => format!("{r}+{o}"),
            ChainOrder::OutlierThenRange => format!("{o}+{r}"),
        },
    };
    Some(format!("RS:{body}"))
}

fn discretisation_tag(spec: &DiscretisationSpec) -> String {
    match *spec {
        DiscretisationSpec::FixedBinNumber { bins } => format!("FBN:{bins}"),
        DiscretisationSpec::FixedBinSize { width, .. } => format!("FBS:{}", num(width)),
    }
}

fn distance_tag(cfg: &ProcessingConfig) -> Option<String> {
    let t = &cfg.texture;
    if t.distance == 1.0 && t.norm == Norm::Chebyshev {
        return None;
    }
    let norm = match t.norm {
        Norm::Chebyshev => "",
        Norm::Euclidean => "-2",
        Norm::Manhattan => "-1",
    };
    Some(format!("δ{norm}:{}", num(t.distance)))
}

/// Subscript parts for a feature of `family` under `cfg`.
pub fn subscript(family: Family, aggregation: Option<Aggregation>, cfg: &ProcessingConfig) -> Vec<String> {
    let mut parts = vec![family.abbreviation().to_string()];
    if let Some(a) = aggregation {
        parts.push(a.code().to_string());
    }
    if let Some(m) = &cfg.modality {
        parts.push(m.clone());
    }
    parts.extend(interpolation_tag(cfg));
    if family != Family::Morphology {
        parts.extend(resegmentation_tag(&cfg.resegmentation));
    }
    let texture = matches!(
        family,
        Family::Cooccurrence
            | Family::RunLength
            | Family::SizeZone
            | Family::DistanceZone
            | Family::ToneDifference
            | Family::Dependence
    );
    if texture || family == Family::Histogram {
        parts.push(discretisation_tag(&cfg.discretisation));
    }
    if family == Family::IntensityVolume {
        match cfg.ivh {
            IvhMode::Discrete => {}
            IvhMode::Continuous { width, .. } => parts.push(format!("FBS:{}", num(width))),
            IvhMode::Arbitrary { bins } => parts.push(format!("FBN:{bins}")),
        }
    }
    if texture {
        parts.extend(distance_tag(cfg));
    }
    if family == Family::DistanceZone && cfg.texture.zone_distance_norm == Norm::Chebyshev {
        parts.push("l-∞".into());
    }
    if family == Family::Dependence && cfg.texture.coarseness != 0 {
        parts.push(format!("α:{}", cfg.texture.coarseness));
    }
    parts
}

/// Full feature name: `name_{parts}`.
pub fn nomenclature(feature: &FeatureDef, family: Family, aggregation: Option<Aggregation>, cfg: &ProcessingConfig) -> String {
    format!("{}_{{{}}}", feature.name, subscript(family, aggregation, cfg).join(","))
}
