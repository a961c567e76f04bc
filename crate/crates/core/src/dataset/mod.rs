//! Binary symptom records: schema, CSV ingestion, published class-conditional counts,
//! synthetic generation, reporting-bias statistics and splitting.

mod bias;
mod csv_io;
mod marginals;
mod split;
mod synth;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use bias::{asymptomatic_negatives, reporter_positive_rate, simulate_bias, BiasSimConfig};
pub use csv_io::{load_csv, write_csv};
pub use marginals::{marginals_from, FeatureCounts, MarginalTable, TableCounts, TABLE_ONE_CSV};
pub use split::split;
pub use synth::{exact_from_counts, synthesize};

/// Number of binary features in every record.
pub const NUM_FEATURES: usize = 8;

/// Name of the label column in dataset files.
pub const LABEL_COLUMN: &str = "label";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("unexpected column `{0}`")]
    UnexpectedColumn(String),
    #[error("non-binary value `{value}` in column `{column}` at line {line}")]
    NonBinary { column: String, value: String, line: u64 },
    #[error("row {line} has {found} cells, expected {expected}")]
    RowLength { line: u64, found: usize, expected: usize },
    #[error("empty body: no records after the header")]
    EmptyBody,
    #[error("degenerate class balance: {0}")]
    DegenerateClassBalance(&'static str),
    #[error("feature never reported: {0}")]
    FeatureNeverReported(Feature),
    #[error("rate {rate} for `{feature}` is outside [0, 1]")]
    RateOutOfRange { feature: Feature, rate: f64 },
    #[error("fraction {0} is outside the allowed range")]
    FractionOutOfRange(f64),
    #[error("malformed marginal table: {0}")]
    MalformedTable(String),
    #[error("dataset is empty")]
    Empty,
}

/// One of the eight binary features, in schema order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    SexMale,
    Age60Plus,
    Cough,
    Fever,
    SoreThroat,
    ShortnessOfBreath,
    Headache,
    ContactConfirmed,
}

impl Feature {
    pub const ALL: [Feature; NUM_FEATURES] = [
        Feature::SexMale,
        Feature::Age60Plus,
        Feature::Cough,
        Feature::Fever,
        Feature::SoreThroat,
        Feature::ShortnessOfBreath,
        Feature::Headache,
        Feature::ContactConfirmed,
    ];

    /// The five clinical symptoms; records with all five at 0 are
    /// asymptomatic.
    pub const SYMPTOMS: [Feature; 5] = [
        Feature::Cough,
        Feature::Fever,
        Feature::SoreThroat,
        Feature::ShortnessOfBreath,
        Feature::Headache,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Feature> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        FeatureSchema::NAMES[self.index()]
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureSchema::position(s)
            .and_then(Feature::from_index)
            .ok_or_else(|| format!("unknown feature `{s}`"))
    }
}

/// The fixed, ordered feature schema shared by files, models and
/// explanations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FeatureSchema;

impl FeatureSchema {
    pub const NAMES: [&'static str; NUM_FEATURES] = [
        "sex_male",
        "age_60_plus",
        "cough",
        "fever",
        "sore_throat",
        "shortness_of_breath",
        "headache",
        "contact_confirmed",
    ];

    pub fn names(&self) -> &'static [&'static str; NUM_FEATURES] {
        &Self::NAMES
    }

    pub fn position(name: &str) -> Option<usize> {
        Self::NAMES.iter().position(|n| *n == name)
    }

    /// True when `names` lists exactly the schema, in order.
    pub fn matches<S: AsRef<str>>(names: &[S]) -> bool {
        names.len() == NUM_FEATURES && names.iter().zip(Self::NAMES).all(|(a, b)| a.as_ref() == b)
    }
}

/// Eight binary features in schema order plus the RT-PCR label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Record {
    pub features: [bool; NUM_FEATURES],
    pub label: bool,
}

impl Record {
    pub fn new(features: [bool; NUM_FEATURES], label: bool) -> Self {
        Self { features, label }
    }

    /// Builds a record from 0/1 integers; anything else is rejected.
    pub fn from_bits(features: [u8; NUM_FEATURES], label: u8) -> Option<Self> {
        let bit = |v: u8| match v {
            0 => Some(false),
            1 => Some(true),
            _ => None,
        };
        let mut out = [false; NUM_FEATURES];
        for (slot, v) in out.iter_mut().zip(features) {
            *slot = bit(v)?;
        }
        Some(Self::new(out, bit(label)?))
    }

    #[inline]
    pub fn get(&self, feature: Feature) -> bool {
        self.features[feature.index()]
    }

    /// Feature vector packed into a byte, bit `i` holding feature `i`.
    #[inline]
    pub fn pattern(&self) -> u8 {
        pattern_of(&self.features)
    }

    pub fn is_asymptomatic(&self) -> bool {
        Feature::SYMPTOMS.iter().all(|&f| !self.get(f))
    }
}

#[inline]
pub fn pattern_of(features: &[bool; NUM_FEATURES]) -> u8 {
    features
        .iter()
        .enumerate()
        .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << i))
}

/// Ordered collection of records with a free-text provenance tag.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    records: Vec<Record>,
    provenance: String,
}

impl Dataset {
    pub fn new(records: Vec<Record>, provenance: impl Into<String>) -> Self {
        Self {
            records,
            provenance: provenance.into(),
        }
    }

    pub fn schema(&self) -> FeatureSchema {
        FeatureSchema
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn n_positive(&self) -> usize {
        self.records.iter().filter(|r| r.label).count()
    }

    pub fn n_negative(&self) -> usize {
        self.len() - self.n_positive()
    }

    pub fn labels(&self) -> impl Iterator<Item = bool> + '_ {
        self.records.iter().map(|r| r.label)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Record> {
        self.records.iter()
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Record;
    type IntoIter = std::slice::Iter<'a, Record>;

    fn into_iter(self) -> Self::IntoIter {
        self.records.iter()
    }
}
