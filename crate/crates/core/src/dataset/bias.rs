use super::{Dataset, DatasetError, Feature};
use crate::rng::SeededRng;

/// Parameters for removing presumed under-reporters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasSimConfig {
    /// Fraction in `[0, 1]` of asymptomatic negative records to drop.
    pub drop_fraction: f64,
    pub seed: u64,
}

/// Among records reporting `feature`, the share that tested positive.
pub fn reporter_positive_rate(ds: &Dataset, feature: Feature) -> Result<f64, DatasetError> {
    let (reported, positive) = ds
        .iter()
        .filter(|r| r.get(feature))
        .fold((0usize, 0usize), |(n, p), r| (n + 1, p + r.label as usize));
    if reported == 0 {
        return Err(DatasetError::FeatureNeverReported(feature));
    }
    Ok(positive as f64 / reported as f64)
}

/// Indices of negative-labelled records with no symptom reported.
pub fn asymptomatic_negatives(ds: &Dataset) -> Vec<usize> {
    ds.iter()
        .enumerate()
        .filter(|(_, r)| !r.label && r.is_asymptomatic())
        .map(|(i, _)| i)
        .collect()
}

/// Drops `round(drop_fraction * k)` of the `k` asymptomatic negative records,
/// chosen uniformly by a seeded shuffle. Survivors keep their order.
pub fn simulate_bias(ds: &Dataset, cfg: &BiasSimConfig) -> Result<Dataset, DatasetError> {
    if !(0.0..=1.0).contains(&cfg.drop_fraction) {
        return Err(DatasetError::FractionOutOfRange(cfg.drop_fraction));
    }
    if ds.is_empty() {
        return Err(DatasetError::Empty);
    }
    let mut candidates = asymptomatic_negatives(ds);
    let n_drop = (cfg.drop_fraction * candidates.len() as f64).round() as usize;
    SeededRng::new(cfg.seed).shuffle(&mut candidates);

    let mut keep = vec![true; ds.len()];
    for &i in &candidates[..n_drop] {
        keep[i] = false;
    }
    let records = ds.iter().zip(&keep).filter(|(_, &k)| k).map(|(r, _)| *r).collect();
    Ok(Dataset::new(
        records,
        format!("{}|bias:drop={},seed={}", ds.provenance(), cfg.drop_fraction, cfg.seed),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{exact_from_counts, Record, TableCounts};

    fn table_one_dataset() -> Dataset {
        exact_from_counts(&TableCounts::table_one())
    }

    #[test]
    fn published_reporter_rates() {
        let ds = table_one_dataset();
        let rate = |f| reporter_positive_rate(&ds, f).unwrap();
        assert!((rate(Feature::Headache) - 1731.0 / 1799.0).abs() < 1e-15);
        assert!((rate(Feature::Headache) - 0.9622).abs() < 5e-5);
        assert!((rate(Feature::Cough) - 0.2744).abs() < 5e-5);
        assert!((rate(Feature::ShortnessOfBreath) - 0.9237).abs() < 5e-5);
    }

    #[test]
    fn never_reported_feature() {
        let ds = Dataset::new(vec![Record::default()], "t");
        assert!(matches!(
            reporter_positive_rate(&ds, Feature::Fever),
            Err(DatasetError::FeatureNeverReported(Feature::Fever))
        ));
    }

    #[test]
    fn zero_fraction_is_identity() {
        let ds = table_one_dataset();
        let out = simulate_bias(
            &ds,
            &BiasSimConfig {
                drop_fraction: 0.0,
                seed: 5,
            },
        )
        .unwrap();
        assert_eq!(out.records(), ds.records());
    }

    #[test]
    fn full_fraction_removes_every_asymptomatic_negative() {
        let ds = table_one_dataset();
        let out = simulate_bias(
            &ds,
            &BiasSimConfig {
                drop_fraction: 1.0,
                seed: 5,
            },
        )
        .unwrap();
        assert!(asymptomatic_negatives(&out).is_empty());
        assert_eq!(out.n_positive(), ds.n_positive());
    }

    #[test]
    fn fraction_out_of_range() {
        let ds = table_one_dataset();
        assert!(simulate_bias(
            &ds,
            &BiasSimConfig {
                drop_fraction: 1.5,
                seed: 0
            }
        )
        .is_err());
        assert!(simulate_bias(
            &ds,
            &BiasSimConfig {
                drop_fraction: -0.1,
                seed: 0
            }
        )
        .is_err());
    }
}
