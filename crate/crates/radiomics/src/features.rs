//! Feature values and the closed catalogue of feature identifiers.

use serde::{Deserialize, Serialize};

/// A feature value, or the reason it is undefined for the given ROI.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureValue {
    Value(f64),
    Undefined(String),
}

impl FeatureValue {
    /// Value if finite, otherwise an undefined value carrying `reason`.
    pub fn checked(v: f64, reason: &str) -> Self {
        if v.is_finite() {
            FeatureValue::Value(v)
        } else {
            FeatureValue::Undefined(reason.to_string())
        }
    }

    /// `num / den`, undefined when the denominator is zero or the result is not finite.
    pub fn ratio(num: f64, den: f64, reason: &str) -> Self {
        if den == 0.0 {
            FeatureValue::Undefined(reason.to_string())
        } else {
            FeatureValue::checked(num / den, reason)
        }
    }

    pub fn undefined(reason: impl Into<String>) -> Self {
        FeatureValue::Undefined(reason.into())
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            FeatureValue::Value(v) => Some(*v),
            FeatureValue::Undefined(_) => None,
        }
    }

    /// Value, or NaN when undefined.
    pub fn or_nan(&self) -> f64 {
        self.value().unwrap_or(f64::NAN)
    }
}

impl From<f64> for FeatureValue {
    fn from(v: f64) -> Self {
        FeatureValue::Value(v)
    }
}

/// Arithmetic mean of per-unit values; undefined if any unit is undefined.
pub fn mean_values(units: &[FeatureValue]) -> FeatureValue {
    if units.is_empty() {
        return FeatureValue::undefined("no matrix with counts to aggregate");
    }
    let mut sum = 0.0;
    for u in units {
        match u {
            FeatureValue::Value(v) => sum += v,
            FeatureValue::Undefined(r) => {
                return FeatureValue::Undefined(format!("undefined in an aggregated unit: {r}"))
            }
        }
    }
    FeatureValue::Value(sum / units.len() as f64)
}

/// Feature families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Morphology,
    LocalIntensity,
    Statistics,
    Histogram,
    IntensityVolume,
    Cooccurrence,
    RunLength,
    SizeZone,
    DistanceZone,
    ToneDifference,
    Dependence,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::Morphology,
        Family::LocalIntensity,
        Family::Statistics,
        Family::Histogram,
        Family::IntensityVolume,
        Family::Cooccurrence,
        Family::RunLength,
        Family::SizeZone,
        Family::DistanceZone,
        Family::ToneDifference,
        Family::Dependence,
    ];

    /// True for families computed from texture matrices.
    pub fn is_texture(self) -> bool {
        matches!(
            self,
            Family::Cooccurrence
                | Family::RunLength
                | Family::SizeZone
                | Family::DistanceZone
                | Family::ToneDifference
                | Family::Dependence
        )
    }

    /// Abbreviation used in nomenclature subscripts.
    pub fn abbreviation(self) -> &'static str {
        match self {
            Family::Morphology => "MORPH",
            Family::LocalIntensity => "LI",
            Family::Statistics => "IS",
            Family::Histogram => "IH",
            Family::IntensityVolume => "IVH",
            Family::Cooccurrence => "CM",
            Family::RunLength => "RLM",
            Family::SizeZone => "SZM",
            Family::DistanceZone => "DZM",
            Family::ToneDifference => "NGTDM",
            Family::Dependence => "NGLDM",
        }
    }

    /// Permanent identifier of the family.
    pub fn id(self) -> &'static str {
        match self {
            Family::Morphology => "HCUG",
            Family::LocalIntensity => "9ST6",
            Family::Statistics => "UHIW",
            Family::Histogram => "ZVCW",
            Family::IntensityVolume => "P88C",
            Family::Cooccurrence => "LFYI",
            Family::RunLength => "TP0I",
            Family::SizeZone => "9SAK",
            Family::DistanceZone => "VMDZ",
            Family::ToneDifference => "IPET",
            Family::Dependence => "REK0",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Morphology => "morphology",
            Family::LocalIntensity => "local intensity",
            Family::Statistics => "intensity-based statistics",
            Family::Histogram => "intensity histogram",
            Family::IntensityVolume => "intensity-volume histogram",
            Family::Cooccurrence => "grey level co-occurrence matrix",
            Family::RunLength => "grey level run length matrix",
            Family::SizeZone => "grey level size zone matrix",
            Family::DistanceZone => "grey level distance zone matrix",
            Family::ToneDifference => "neighbourhood grey tone difference matrix",
            Family::Dependence => "neighbouring grey level dependence matrix",
        }
    }

    /// Features of the family in report order.
    pub fn features(self) -> &'static [FeatureDef] {
        match self {
            Family::Morphology => MORPHOLOGY,
            Family::LocalIntensity => LOCAL_INTENSITY,
            Family::Statistics => STATISTICS,
            Family::Histogram => HISTOGRAM,
            Family::IntensityVolume => INTENSITY_VOLUME,
            Family::Cooccurrence => COOCCURRENCE,
            Family::RunLength => RUN_LENGTH,
            Family::SizeZone => SIZE_ZONE,
            Family::DistanceZone => DISTANCE_ZONE,
            Family::ToneDifference => TONE_DIFFERENCE,
            Family::Dependence => DEPENDENCE,
        }
    }
}

/// Catalogue entry: permanent identifier and feature name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureDef {
    pub id: &'static str,
    pub name: &'static str,
}

const fn f(id: &'static str, name: &'static str) -> FeatureDef {
    FeatureDef { id, name }
}

pub const MORPHOLOGY: &[FeatureDef] = &[
    f("RNU0", "volume"),
    f("YEKZ", "approximate volume"),
    f("C0JK", "surface area"),
    f("2PR5", "surface to volume ratio"),
    f("SKGS", "compactness 1"),
    f("BQWJ", "compactness 2"),
    f("KRCK", "spherical disproportion"),
    f("QCFX", "sphericity"),
    f("25C7", "asphericity"),
    f("KLMA", "centre of mass shift"),
    f("L0JK", "maximum 3D diameter"),
    f("TDIC", "major axis length"),
    f("P9VJ", "minor axis length"),
    f("7J51", "least axis length"),
    f("Q3CK", "elongation"),
    f("N17B", "flatness"),
    f("PBX1", "volume density (AABB)"),
    f("R59B", "area density (AABB)"),
    f("ZH1A", "volume density (OMBB)"),
    f("IQYR", "area density (OMBB)"),
    f("6BDE", "volume density (AEE)"),
    f("RDD2", "area density (AEE)"),
    f("SWZ1", "volume density (MVEE)"),
    f("BRI8", "area density (MVEE)"),
    f("R3ER", "volume density (convex hull)"),
    f("7T7F", "area density (convex hull)"),
    f("99N0", "integrated intensity"),
    f("N365", "Moran's I index"),
    f("NPT7", "Geary's C measure"),
];

pub const LOCAL_INTENSITY: &[FeatureDef] =
    &[f("VJGA", "local intensity peak"), f("0F91", "global intensity peak")];

pub const STATISTICS: &[FeatureDef] = &[
    f("Q4LE", "mean"),
    f("ECT3", "variance"),
    f("KE2A", "skewness"),
    f("IPH6", "kurtosis"),
    f("Y12H", "median"),
    f("1GSF", "minimum"),
    f("QG58", "10th percentile"),
    f("8DWT", "90th percentile"),
    f("84IY", "maximum"),
    f("SALO", "interquartile range"),
    f("2OJQ", "range"),
    f("4FUA", "mean absolute deviation"),
    f("1128", "robust mean absolute deviation"),
    f("N72L", "median absolute deviation"),
    f("7TET", "coefficient of variation"),
    f("9S40", "quartile coefficient of dispersion"),
    f("N8CA", "energy"),
    f("5ZWQ", "root mean square"),
];

pub const HISTOGRAM: &[FeatureDef] = &[
    f("X6K6", "mean"),
    f("CH89", "variance"),
    f("88K1", "skewness"),
    f("C3I7", "kurtosis"),
    f("WIFQ", "median"),
    f("1PR8", "minimum"),
    f("GPMT", "10th percentile"),
    f("OZ0C", "90th percentile"),
    f("3NCY", "maximum"),
    f("AMMC", "mode"),
    f("WR0O", "interquartile range"),
    f("5Z3W", "range"),
    f("D2ZX", "mean absolute deviation"),
    f("WRZB", "robust mean absolute deviation"),
    f("4RNL", "median absolute deviation"),
    f("CWYJ", "coefficient of variation"),
    f("SLWD", "quartile coefficient of dispersion"),
    f("TLU2", "entropy"),
    f("BJ5W", "uniformity"),
    f("12CE", "maximum histogram gradient"),
    f("8E6O", "maximum histogram gradient grey level"),
    f("VQB3", "minimum histogram gradient"),
    f("RHQZ", "minimum histogram gradient grey level"),
];

pub const INTENSITY_VOLUME: &[FeatureDef] = &[
    f("BC2M", "volume at intensity fraction 10%"),
    f("BC2M", "volume at intensity fraction 90%"),
    f("GBPN", "intensity at volume fraction 10%"),
    f("GBPN", "intensity at volume fraction 90%"),
    f("DDTU", "volume fraction difference between intensity fractions"),
    f("CNV2", "intensity fraction difference between volume fractions"),
    f("9CMM", "area under the IVH curve"),
];

pub const COOCCURRENCE: &[FeatureDef] = &[
    f("GYBY", "joint maximum"),
    f("60VM", "joint average"),
    f("UR99", "joint variance"),
    f("TU9B", "joint entropy"),
    f("TF7R", "difference average"),
    f("D3YU", "difference variance"),
    f("NTRS", "difference entropy"),
    f("ZGXS", "sum average"),
    f("OEEB", "sum variance"),
    f("P6QZ", "sum entropy"),
    f("8ZQL", "angular second moment"),
    f("ACUI", "contrast"),
    f("8S9J", "dissimilarity"),
    f("IB1Z", "inverse difference"),
    f("NDRX", "normalised inverse difference"),
    f("WF0Z", "inverse difference moment"),
    f("1QCO", "normalised inverse difference moment"),
    f("E8JP", "inverse variance"),
    f("NI2N", "correlation"),
    f("QWB0", "autocorrelation"),
    f("DG8W", "cluster tendency"),
    f("7NFM", "cluster shade"),
    f("AE86", "cluster prominence"),
    f("R8DG", "first measure of information correlation"),
    f("JN9H", "second measure of information correlation"),
];

pub const RUN_LENGTH: &[FeatureDef] = &[
    f("22OV", "short runs emphasis"),
    f("W4KF", "long runs emphasis"),
    f("V3SW", "low grey level run emphasis"),
    f("G3QZ", "high grey level run emphasis"),
    f("HTZT", "short run low grey level emphasis"),
    f("GD3A", "short run high grey level emphasis"),
    f("IVPO", "long run low grey level emphasis"),
    f("3KUM", "long run high grey level emphasis"),
    f("R5YN", "grey level non-uniformity"),
    f("OVBL", "normalised grey level non-uniformity"),
    f("W92Y", "run length non-uniformity"),
    f("IC23", "normalised run length non-uniformity"),
    f("9ZK5", "run percentage"),
    f("8CE5", "grey level variance"),
    f("SXLW", "run length variance"),
    f("HJ9O", "run entropy"),
];

pub const SIZE_ZONE: &[FeatureDef] = &[
    f("5QRC", "small zone emphasis"),
    f("48P8", "large zone emphasis"),
    f("XMSY", "low grey level zone emphasis"),
    f("5GN9", "high grey level zone emphasis"),
    f("5RAI", "small zone low grey level emphasis"),
    f("HW1V", "small zone high grey level emphasis"),
    f("YH51", "large zone low grey level emphasis"),
    f("J17V", "large zone high grey level emphasis"),
    f("JNSA", "grey level non-uniformity"),
    f("Y1RO", "normalised grey level non-uniformity"),
    f("4JP3", "zone size non-uniformity"),
    f("VB3A", "normalised zone size non-uniformity"),
    f("P30P", "zone percentage"),
    f("BYLV", "grey level variance"),
    f("3NSA", "zone size variance"),
    f("GU8N", "zone size entropy"),
];

pub const DISTANCE_ZONE: &[FeatureDef] = &[
    f("0GBI", "small distance emphasis"),
    f("MB4I", "large distance emphasis"),
    f("S1RA", "low grey level zone emphasis"),
    f("K26C", "high grey level zone emphasis"),
    f("RUVG", "small distance low grey level emphasis"),
    f("DKNJ", "small distance high grey level emphasis"),
    f("A7WM", "large distance low grey level emphasis"),
    f("KLTH", "large distance high grey level emphasis"),
    f("VFT7", "grey level non-uniformity"),
    f("7HP3", "normalised grey level non-uniformity"),
    f("V294", "zone distance non-uniformity"),
    f("IATH", "normalised zone distance non-uniformity"),
    f("VIWW", "zone percentage"),
    f("QK93", "grey level variance"),
    f("7WT1", "zone distance variance"),
    f("GBDU", "zone distance entropy"),
];

pub const TONE_DIFFERENCE: &[FeatureDef] = &[
    f("QCDE", "coarseness"),
    f("65HE", "contrast"),
    f("NQ30", "busyness"),
    f("HDEZ", "complexity"),
    f("1X9X", "strength"),
];

pub const DEPENDENCE: &[FeatureDef] = &[
    f("SODN", "low dependence emphasis"),
    f("IMOQ", "high dependence emphasis"),
    f("TL9H", "low grey level count emphasis"),
    f("OAE7", "high grey level count emphasis"),
    f("EQ3F", "low dependence low grey level emphasis"),
    f("JA6D", "low dependence high grey level emphasis"),
    f("NBZI", "high dependence low grey level emphasis"),
    f("9QMG", "high dependence high grey level emphasis"),
    f("FP8K", "grey level non-uniformity"),
    f("5SPA", "normalised grey level non-uniformity"),
    f("Z87G", "dependence count non-uniformity"),
    f("OKJI", "normalised dependence count non-uniformity"),
    f("6XV8", "dependence count percentage"),
    f("1PFV", "grey level variance"),
    f("DNX2", "dependence count variance"),
    f("FCBV", "dependence count entropy"),
    f("CAS9", "dependence count energy"),
];

/// True when `id` names a catalogued feature or family.
pub fn is_known_id(id: &str) -> bool {
    Family::ALL
        .iter()
        .any(|fam| fam.id() == id || fam.features().iter().any(|d| d.id == id))
}
