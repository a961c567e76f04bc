use super::{Dataset, DatasetError, Feature, MarginalTable, Record, TableCounts, NUM_FEATURES};
use crate::rng::SeededRng;

/// Draws a dataset whose features are independent Bernoulli variables given
/// the class.
///
/// Labels are laid out as `n_pos` positives then `n_neg` negatives and
/// shuffled; each record then draws its eight features in schema order. The
/// output depends only on `(m, n_pos, n_neg, seed)`.
pub fn synthesize(m: &MarginalTable, n_pos: usize, n_neg: usize, seed: u64) -> Result<Dataset, DatasetError> {
    m.validate()?;
    if n_pos + n_neg == 0 {
        return Err(DatasetError::Empty);
    }
    let mut rng = SeededRng::new(seed);
    let mut labels: Vec<bool> = std::iter::repeat(true)
        .take(n_pos)
        .chain(std::iter::repeat(false).take(n_neg))
        .collect();
    rng.shuffle(&mut labels);

    let records = labels
        .into_iter()
        .map(|label| {
            let features = std::array::from_fn(|i| rng.coin(m.rate(Feature::ALL[i], label)));
            Record::new(features, label)
        })
        .collect();
    Ok(Dataset::new(
        records,
        format!("synth:seed={seed},n_pos={n_pos},n_neg={n_neg}"),
    ))
}

/// Deterministic dataset that reproduces a counts table exactly: within each
/// class, a feature is 1 on the first `k` records of that class, `k` being
/// the published count. Positives come first.
pub fn exact_from_counts(counts: &TableCounts) -> Dataset {
    let (n_pos, n_neg) = counts.class_totals();
    let mut records = Vec::with_capacity((n_pos + n_neg) as usize);
    for (label, n) in [(true, n_pos), (false, n_neg)] {
        for j in 0..n {
            let features: [bool; NUM_FEATURES] = std::array::from_fn(|i| {
                let fc = counts.get(Feature::ALL[i]);
                let k = if label { fc.positive_true } else { fc.negative_true };
                j < k
            });
            records.push(Record::new(features, label));
        }
    }
    Dataset::new(records, "exact:counts")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::marginals_from;

    #[test]
    fn deterministic_for_fixed_seed() {
        let m = MarginalTable::table_one();
        let a = synthesize(&m, 50, 400, 11).unwrap();
        let b = synthesize(&m, 50, 400, 11).unwrap();
        let c = synthesize(&m, 50, 400, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.records(), c.records());
        assert_eq!(a.n_positive(), 50);
        assert_eq!(a.n_negative(), 400);
    }

    #[test]
    fn zero_positives_gives_all_negative() {
        let ds = synthesize(&MarginalTable::table_one(), 0, 5, 1).unwrap();
        assert_eq!(ds.len(), 5);
        assert!(ds.labels().all(|l| !l));
    }

    #[test]
    fn empty_request_is_an_error() {
        assert!(synthesize(&MarginalTable::table_one(), 0, 0, 1).is_err());
    }

    #[test]
    fn full_scale_cough_rate() {
        let ds = synthesize(&MarginalTable::table_one(), 4769, 47062, 3).unwrap();
        let m = marginals_from(&ds).unwrap();
        assert!((m.rate_given_positive(Feature::Cough) - 0.4829).abs() < 0.02);
    }

    #[test]
    fn exact_counts_reproduce_table() {
        let t = TableCounts::table_one();
        let ds = exact_from_counts(&t);
        assert_eq!(ds.len(), 8393 + 90839);
        let m = marginals_from(&ds).unwrap();
        assert_eq!(m.rate_given_positive(Feature::Fever), 3735.0 / 8393.0);
        assert_eq!(m.rate_given_negative(Feature::Headache), 68.0 / 90839.0);
    }
}
