use std::io::Read;

use super::{Dataset, DatasetError, Feature, NUM_FEATURES};

/// Per-class feature counts as published, one row per (feature, level).
///
/// Columns: `feature,level,total_n,total_pct,negative_n,negative_pct,positive_n,positive_pct`.
/// `level` is `true`/`false`, or `male`/`female` for `sex_male`.
pub const TABLE_ONE_CSV: &str = include_str!("../../data/table1.csv");

/// Counts for one feature, split by level and class. Percent columns are
/// kept as the published text.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureCounts {
    pub total_true: u64,
    pub total_false: u64,
    pub negative_true: u64,
    pub negative_false: u64,
    pub positive_true: u64,
    pub positive_false: u64,
    pub percents_true: [String; 3],
    pub percents_false: [String; 3],
}

/// A complete counts table for the eight features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableCounts {
    features: [FeatureCounts; NUM_FEATURES],
}

impl TableCounts {
    /// The bundled table.
    pub fn table_one() -> Self {
        Self::parse(TABLE_ONE_CSV.as_bytes()).expect("bundled table parses")
    }

    pub fn parse<R: Read>(source: R) -> Result<Self, DatasetError> {
        const HEADER: [&str; 8] = [
            "feature",
            "level",
            "total_n",
            "total_pct",
            "negative_n",
            "negative_pct",
            "positive_n",
            "positive_pct",
        ];
        let bad = |m: String| DatasetError::MalformedTable(m);
        let mut reader = csv::Reader::from_reader(source);
        let header = reader.headers()?.clone();
        if header.iter().ne(HEADER) {
            return Err(bad(format!("expected header `{}`", HEADER.join(","))));
        }
        let mut features: [FeatureCounts; NUM_FEATURES] = Default::default();
        let mut seen = [[false; 2]; NUM_FEATURES];
        for row in reader.records() {
            let row = row?;
            let feature: Feature = row[0].parse().map_err(bad)?;
            let level = match (feature, &row[1]) {
                (Feature::SexMale, "male") | (_, "true") => true,
                (Feature::SexMale, "female") | (_, "false") => false,
                (_, other) => return Err(bad(format!("unknown level `{other}` for {feature}"))),
            };
            let slot = &mut seen[feature.index()][level as usize];
            if *slot {
                return Err(bad(format!("duplicate row for {feature}/{}", &row[1])));
            }
            *slot = true;
            let count = |i: usize| -> Result<u64, DatasetError> {
                row[i].parse().map_err(|_| bad(format!("`{}` is not a count", &row[i])))
            };
            let (total, neg, pos) = (count(2)?, count(4)?, count(6)?);
            let pcts = [row[3].to_string(), row[5].to_string(), row[7].to_string()];
            let fc = &mut features[feature.index()];
            if level {
                (fc.total_true, fc.negative_true, fc.positive_true, fc.percents_true) = (total, neg, pos, pcts);
            } else {
                (fc.total_false, fc.negative_false, fc.positive_false, fc.percents_false) = (total, neg, pos, pcts);
            }
        }
        if let Some(i) = seen.iter().position(|s| !(s[0] && s[1])) {
            return Err(bad(format!("missing rows for {}", Feature::ALL[i])));
        }
        Ok(Self { features })
    }

    pub fn get(&self, feature: Feature) -> &FeatureCounts {
        &self.features[feature.index()]
    }

    /// Class sizes `(n_positive, n_negative)`. Some published rows do not
    /// sum to the class size, so each class takes its largest row sum.
    pub fn class_totals(&self) -> (u64, u64) {
        let pos = self
            .features
            .iter()
            .map(|f| f.positive_true + f.positive_false)
            .max()
            .unwrap_or(0);
        let neg = self
            .features
            .iter()
            .map(|f| f.negative_true + f.negative_false)
            .max()
            .unwrap_or(0);
        (pos, neg)
    }

    /// Class-conditional rates `true / class total`.
    pub fn marginals(&self) -> Result<MarginalTable, DatasetError> {
        let (n_pos, n_neg) = self.class_totals();
        if n_pos == 0 || n_neg == 0 {
            return Err(DatasetError::DegenerateClassBalance("counts table has an empty class"));
        }
        let mut rate_pos = [0.0; NUM_FEATURES];
        let mut rate_neg = [0.0; NUM_FEATURES];
        for (i, fc) in self.features.iter().enumerate() {
            rate_pos[i] = fc.positive_true as f64 / n_pos as f64;
            rate_neg[i] = fc.negative_true as f64 / n_neg as f64;
        }
        MarginalTable::new(rate_pos, rate_neg, n_pos as usize, n_neg as usize)
    }
}

/// Class-conditional feature rates with the class sizes they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalTable {
    rate_pos: [f64; NUM_FEATURES],
    rate_neg: [f64; NUM_FEATURES],
    n_positive: usize,
    n_negative: usize,
}

impl MarginalTable {
    pub fn new(
        rate_given_positive: [f64; NUM_FEATURES],
        rate_given_negative: [f64; NUM_FEATURES],
        n_positive: usize,
        n_negative: usize,
    ) -> Result<Self, DatasetError> {
        for (i, &rate) in rate_given_positive.iter().chain(&rate_given_negative).enumerate() {
            if !(0.0..=1.0).contains(&rate) {
                return Err(DatasetError::RateOutOfRange {
                    feature: Feature::ALL[i % NUM_FEATURES],
                    rate,
                });
            }
        }
        Ok(Self {
            rate_pos: rate_given_positive,
            rate_neg: rate_given_negative,
            n_positive,
            n_negative,
        })
    }

    /// Rates derived from the bundled table.
    pub fn table_one() -> Self {
        TableCounts::table_one().marginals().expect("bundled table is valid")
    }

    pub fn rate_given_positive(&self, feature: Feature) -> f64 {
        self.rate_pos[feature.index()]
    }

    pub fn rate_given_negative(&self, feature: Feature) -> f64 {
        self.rate_neg[feature.index()]
    }

    /// Rate for a class: `true` = positive.
    pub fn rate(&self, feature: Feature, label: bool) -> f64 {
        if label {
            self.rate_given_positive(feature)
        } else {
            self.rate_given_negative(feature)
        }
    }

    pub fn n_positive(&self) -> usize {
        self.n_positive
    }

    pub fn n_negative(&self) -> usize {
        self.n_negative
    }

    pub(crate) fn validate(&self) -> Result<(), DatasetError> {
        Self::new(self.rate_pos, self.rate_neg, self.n_positive, self.n_negative).map(|_| ())
    }
}

/// Empirical class-conditional rates of a dataset.
pub fn marginals_from(ds: &Dataset) -> Result<MarginalTable, DatasetError> {
    if ds.is_empty() {
        return Err(DatasetError::Empty);
    }
    let mut ones = [[0usize; NUM_FEATURES]; 2];
    let mut class = [0usize; 2];
    for r in ds {
        let c = r.label as usize;
        class[c] += 1;
        for (i, &b) in r.features.iter().enumerate() {
            ones[c][i] += b as usize;
        }
    }
    if class[0] == 0 || class[1] == 0 {
        return Err(DatasetError::DegenerateClassBalance("both classes must be present"));
    }
    let rates = |c: usize| std::array::from_fn(|i| ones[c][i] as f64 / class[c] as f64);
    MarginalTable::new(rates(1), rates(0), class[1], class[0])
}
