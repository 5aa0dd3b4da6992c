//! Processing configurations: presets A–E, TOML overrides, validation and fingerprints.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::Family;
use crate::morphology::MorphologyOptions;
use crate::preprocess::{
    DiscretisationSpec, ImageMethod, InterpolationMode, InterpolationSpec, IvhMode, MaskMethod, MinimumSource,
    ResegmentationSpec, Rounding,
};
use crate::texture::{Aggregation, Dimension, NeighbourhoodSpec, Norm};

/// Which feature families are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilySelection {
    pub morphology: bool,
    pub local_intensity: bool,
    pub statistics: bool,
    pub histogram: bool,
    pub intensity_volume: bool,
    pub cooccurrence: bool,
    pub run_length: bool,
    pub size_zone: bool,
    pub distance_zone: bool,
    pub tone_difference: bool,
    pub dependence: bool,
}

impl Default for FamilySelection {
    fn default() -> Self {
        Self {
            morphology: true,
            local_intensity: true,
            statistics: true,
            histogram: true,
            intensity_volume: true,
            cooccurrence: true,
            run_length: true,
            size_zone: true,
            distance_zone: true,
            tone_difference: true,
            dependence: true,
        }
    }
}

impl FamilySelection {
    pub fn contains(&self, f: Family) -> bool {
        match f {
            Family::Morphology => self.morphology,
            Family::LocalIntensity => self.local_intensity,
            Family::Statistics => self.statistics,
            Family::Histogram => self.histogram,
            Family::IntensityVolume => self.intensity_volume,
            Family::Cooccurrence => self.cooccurrence,
            Family::RunLength => self.run_length,
            Family::SizeZone => self.size_zone,
            Family::DistanceZone => self.distance_zone,
            Family::ToneDifference => self.tone_difference,
            Family::Dependence => self.dependence,
        }
    }

    /// Selected families in catalogue order.
    pub fn families(&self) -> Vec<Family> {
        Family::ALL.into_iter().filter(|&f| self.contains(f)).collect()
    }
}

/// Texture matrix parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TextureSettings {
    /// Neighbourhood radius for co-occurrence, zone linkage, tone difference and dependence.
    pub distance: f64,
    pub norm: Norm,
    /// Dependence coarseness.
    pub coarseness: u32,
    /// Steps used for distance zone edge distances.
    pub zone_distance_norm: Norm,
}

impl Default for TextureSettings {
    fn default() -> Self {
        Self { distance: 1.0, norm: Norm::Chebyshev, coarseness: 0, zone_distance_norm: Norm::Manhattan }
    }
}

impl TextureSettings {
    pub fn neighbourhood(&self) -> NeighbourhoodSpec {
        NeighbourhoodSpec { distance: self.distance, norm: self.norm, coarseness: self.coarseness }
    }
}

/// Everything that determines a feature report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessingConfig {
    /// Preset name, or "custom".
    pub name: String,
    pub approach: Dimension,
    pub interpolation: InterpolationSpec,
    pub resegmentation: ResegmentationSpec,
    /// Discretisation for the intensity histogram and texture families.
    pub discretisation: DiscretisationSpec,
    pub ivh: IvhMode,
    #[serde(default)]
    pub families: FamilySelection,
    /// Texture aggregation methods; empty selects every method valid for the approach.
    #[serde(default)]
    pub aggregations: Vec<Aggregation>,
    #[serde(default)]
    pub texture: TextureSettings,
    #[serde(default)]
    pub morphology: MorphologyOptions,
    /// Seed for subsampled spatial autocorrelation.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Optional modality tag for feature names, such as "CT".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modality: Option<String>,
    /// Accept fixed bin size discretisation without a definite lower bound.
    #[serde(default)]
    pub allow_unbounded_fbs: bool,
}

fn default_seed() -> u64 {
    1
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 5] = ["A", "B", "C", "D", "E"];

fn volumetric(image_method: ImageMethod, spacing: f64) -> InterpolationSpec {
    InterpolationSpec {
        mode: InterpolationMode::Volumetric,
        spacing: [spacing; 3],
        image_method,
        mask_method: MaskMethod::Trilinear,
        threshold: 0.5,
        rounding: Rounding::NearestInteger,
    }
}

fn fbs(width: f64) -> DiscretisationSpec {
    DiscretisationSpec::FixedBinSize { width, minimum: MinimumSource::ResegmentationLowerBound }
}

impl ProcessingConfig {
    /// No interpolation or re-segmentation, 32 bins, every family in 3D.
    pub fn custom() -> Self {
        Self {
            name: "custom".into(),
            approach: Dimension::ThreeD,
            interpolation: InterpolationSpec::default(),
            resegmentation: ResegmentationSpec::default(),
            discretisation: DiscretisationSpec::FixedBinNumber { bins: 32 },
            ivh: IvhMode::Discrete,
            families: FamilySelection::default(),
            aggregations: Vec::new(),
            texture: TextureSettings::default(),
            morphology: MorphologyOptions::default(),
            seed: default_seed(),
            modality: None,
            allow_unbounded_fbs: false,
        }
    }

    /// Aggregation methods that will be evaluated.
    pub fn effective_aggregations(&self) -> Vec<Aggregation> {
        if self.aggregations.is_empty() {
            Aggregation::ALL.into_iter().filter(|a| a.dimension() == self.approach).collect()
        } else {
            self.aggregations.clone()
        }
    }

    /// Checks every stage and the discretisation recommendations.
    pub fn validate(&self) -> Result<()> {
        self.interpolation.validate()?;
        self.resegmentation.validate()?;
        self.discretisation.validate()?;
        self.texture.neighbourhood().validate()?;
        if self.texture.zone_distance_norm == Norm::Euclidean {
            return Err(Error::Config("zone distances support the Manhattan and Chebyshev norms only".into()));
        }
        if let DiscretisationSpec::FixedBinSize { minimum, .. } = self.discretisation {
            let bounded = match minimum {
                MinimumSource::Explicit(_) => true,
                MinimumSource::ResegmentationLowerBound => self.resegmentation.lower.is_some(),
                MinimumSource::RoiMinimum => false,
            };
            if !bounded && !self.allow_unbounded_fbs {
                return Err(Error::Config(
                    "fixed bin size discretisation needs a definite lower bound; \
                     set a re-segmentation lower bound, an explicit minimum, or allow_unbounded_fbs"
                        .into(),
                ));
            }
        }
        if let IvhMode::Continuous { minimum: None, .. } = self.ivh {
            if self.resegmentation.lower.is_none() {
                return Err(Error::Config(
                    "continuous intensity-volume histogram needs a re-segmentation lower bound or a minimum".into(),
                ));
            }
        }
        if let Some(a) = self.aggregations.iter().find(|a| a.dimension() != self.approach) {
            return Err(Error::Config(format!(
                "aggregation {} ({}) does not match the {:?} approach",
                a.id(),
                a.code(),
                self.approach
            )));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, as lowercase hex.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("configuration serialises");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Parses a TOML configuration. A top-level `preset` key selects the base
    /// configuration, which the remaining keys override section by section.
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e| Error::Config(format!("config file: {e}")))?;
        let base = match table.remove("preset") {
            Some(toml::Value::String(name)) => preset(&name)?,
            Some(other) => return Err(Error::Config(format!("preset must be a string, got {other}"))),
            None => Self::custom(),
        };
        let mut merged = toml::Table::try_from(&base).map_err(|e| Error::Invariant(format!("preset to TOML: {e}")))?;
        if !table.contains_key("name") {
            merged.insert("name".into(), toml::Value::String(format!("{}+file", base.name)));
        }
        merge_tables(&mut merged, table);
        let cfg: Self = merged.try_into().map_err(|e| Error::Config(format!("config file: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Invariant(format!("config to TOML: {e}")))
    }
}

/// Overrides `base` with `over`; a table that names a different `method` or
/// `mode` replaces the base table instead of merging with it.
fn merge_tables(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => {
                let switches = ["method", "mode"].iter().any(|t| o.get(*t).is_some_and(|x| b.get(*t) != Some(x)));
                if switches {
                    *b = o;
                } else {
                    merge_tables(b, o);
                }
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// The named processing configuration.
pub fn preset(name: &str) -> Result<ProcessingConfig> {
    let base = ProcessingConfig::custom();
    let range = |lo: f64, hi: f64| ResegmentationSpec::range(lo, Some(hi));
    let cfg = match name.trim().to_ascii_uppercase().as_str() {
        "A" => ProcessingConfig {
            approach: Dimension::TwoD,
            resegmentation: range(-500.0, 400.0),
            discretisation: fbs(25.0),
            ..base
        },
        "B" => ProcessingConfig {
            approach: Dimension::TwoD,
            interpolation: InterpolationSpec {
                mode: InterpolationMode::InPlane,
                ..volumetric(ImageMethod::Trilinear, 2.0)
            },
            resegmentation: range(-500.0, 400.0),
            discretisation: DiscretisationSpec::FixedBinNumber { bins: 32 },
            ..base
        },
        "C" => ProcessingConfig {
            interpolation: volumetric(ImageMethod::Trilinear, 2.0),
            resegmentation: range(-1000.0, 400.0),
            discretisation: fbs(25.0),
            ivh: IvhMode::Continuous { width: 2.5, minimum: None, maximum: None },
            ..base
        },
        "D" => ProcessingConfig {
            interpolation: volumetric(ImageMethod::Trilinear, 2.0),
            resegmentation: ResegmentationSpec { outlier_sigma: Some(3.0), ..Default::default() },
            discretisation: DiscretisationSpec::FixedBinNumber { bins: 32 },
            ..base
        },
        "E" => ProcessingConfig {
            interpolation: volumetric(ImageMethod::TricubicSpline, 2.0),
            resegmentation: ResegmentationSpec { outlier_sigma: Some(3.0), ..range(-500.0, 400.0) },
            discretisation: DiscretisationSpec::FixedBinNumber { bins: 32 },
            ivh: IvhMode::Arbitrary { bins: 1000 },
            ..base
        },
        _ => return Err(Error::Config(format!("unknown preset '{name}', expected one of A, B, C, D, E"))),
    };
    Ok(ProcessingConfig { name: name.trim().to_ascii_uppercase(), ..cfg })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_table_values() {
        let a = preset("A").unwrap();
        assert_eq!(a.approach, Dimension::TwoD);
        assert_eq!(a.interpolation.mode, InterpolationMode::None);
        assert_eq!((a.resegmentation.lower, a.resegmentation.upper), (Some(-500.0), Some(400.0)));
        assert!(matches!(a.discretisation, DiscretisationSpec::FixedBinSize { width, .. } if width == 25.0));
        let b = preset("B").unwrap();
        assert_eq!(b.interpolation.mode, InterpolationMode::InPlane);
        let c = preset("C").unwrap();
        assert_eq!(c.interpolation.spacing, [2.0; 3]);
        assert_eq!(c.resegmentation.lower, Some(-1000.0));
        assert!(matches!(c.ivh, IvhMode::Continuous { width, .. } if width == 2.5));
        let d = preset("D").unwrap();
        assert!(!d.resegmentation.has_range() && d.resegmentation.outlier_sigma == Some(3.0));
        let e = preset("E").unwrap();
        assert_eq!(e.interpolation.image_method, ImageMethod::TricubicSpline);
        assert_eq!(e.interpolation.mask_method, MaskMethod::Trilinear);
        assert_eq!(e.ivh, IvhMode::Arbitrary { bins: 1000 });
        for n in PRESET_NAMES {
            preset(n).unwrap().validate().unwrap();
        }
        assert!(matches!(preset("F"), Err(Error::Config(_))));
    }

    #[test]
    fn unbounded_fbs_needs_override() {
        let mut cfg = ProcessingConfig {
            discretisation: DiscretisationSpec::FixedBinSize { width: 25.0, minimum: MinimumSource::RoiMinimum },
            ..ProcessingConfig::custom()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.allow_unbounded_fbs = true;
        cfg.validate().unwrap();
    }

    #[test]
    fn default_aggregations_follow_the_approach() {
        let a = preset("A").unwrap().effective_aggregations();
        assert_eq!(a.len(), 5);
        assert!(a.iter().all(|m| m.dimension() == Dimension::TwoD));
        assert_eq!(preset("C").unwrap().effective_aggregations().len(), 3);
    }

    #[test]
    fn toml_round_trip_and_override() {
        let c = preset("C").unwrap();
        let back = ProcessingConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.fingerprint(), c.fingerprint());

        let text = "preset = \"C\"\nseed = 7\n[discretisation]\nmethod = \"fixed-bin-number\"\nbins = 16\n";
        let o = ProcessingConfig::from_toml(text).unwrap();
        assert_eq!(o.discretisation, DiscretisationSpec::FixedBinNumber { bins: 16 });
        assert_eq!(o.seed, 7);
        assert_eq!(o.resegmentation, c.resegmentation);
        assert_ne!(o.fingerprint(), c.fingerprint());
        let expected = ProcessingConfig {
            name: "C+file".into(),
            seed: 7,
            discretisation: DiscretisationSpec::FixedBinNumber { bins: 16 },
            ..c
        };
        assert_eq!(o.fingerprint(), expected.fingerprint());
    }

    #[test]
    fn bad_toml_is_a_config_error() {
        assert!(matches!(ProcessingConfig::from_toml("preset = \"C\"\nbogus = 1\n"), Err(Error::Config(_))));
        assert!(matches!(ProcessingConfig::from_toml("approach = \"2D\"\naggregations = [\"merge3d\"]\n"), Err(Error::Config(_))));
    }
}
