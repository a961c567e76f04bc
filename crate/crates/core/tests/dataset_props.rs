mod common;

use common::random_features;
use covboost::dataset::{
    asymptomatic_negatives, exact_from_counts, load_csv, marginals_from, reporter_positive_rate, simulate_bias, split,
    synthesize, write_csv, BiasSimConfig, Dataset, Feature, MarginalTable, Record, TableCounts, NUM_FEATURES,
};
use covboost::rng::SeededRng;
use covboost::DatasetError;
use proptest::prelude::*;

fn records() -> impl Strategy<Value = Vec<Record>> {
    prop::collection::vec((any::<u8>(), any::<bool>()), 1..120).prop_map(|v| {
        v.into_iter()
            .map(|(bits, label)| Record::new(std::array::from_fn(|i| bits & (1 << i) != 0), label))
            .collect()
    })
}

#[test]
fn marginals_match_counting() {
    let mut rng = SeededRng::new(6);
    let mut recs: Vec<Record> = (0..100)
        .map(|_| Record::new(random_features(&mut rng), rng.coin(0.4)))
        .collect();
    recs[0].label = true;
    recs[1].label = false;
    let ds = Dataset::new(recs, "t");
    let m = marginals_from(&ds).unwrap();
    for f in Feature::ALL {
        for label in [false, true] {
            let class: Vec<&Record> = ds.iter().filter(|r| r.label == label).collect();
            let ones = class.iter().filter(|r| r.features[f.index()]).count();
            assert_eq!(m.rate(f, label), ones as f64 / class.len() as f64);
        }
    }
    assert_eq!(m.n_positive() + m.n_negative(), 100);
}

#[test]
fn synthetic_rates_concentrate() {
    let target = MarginalTable::table_one();
    let ds = synthesize(&target, 50_000, 50_000, 9).unwrap();
    assert_eq!((ds.n_positive(), ds.n_negative()), (50_000, 50_000));
    let got = marginals_from(&ds).unwrap();
    for f in Feature::ALL {
        for label in [false, true] {
            assert!(
                (got.rate(f, label) - target.rate(f, label)).abs() <= 0.01,
                "{f} {label}"
            );
        }
    }
    assert_eq!(ds, synthesize(&target, 50_000, 50_000, 9).unwrap());
}

#[test]
fn table_one_reporter_rates() {
    let ds = exact_from_counts(&TableCounts::table_one());
    assert_eq!((ds.n_positive(), ds.n_negative()), (8393, 90839));
    for (f, published) in [
        (Feature::Headache, 0.962),
        (Feature::ShortnessOfBreath, 0.924),
        (Feature::Cough, 0.274),
        (Feature::Fever, 0.459),
    ] {
        let rate = reporter_positive_rate(&ds, f).unwrap();
        assert!((rate - published).abs() <= 0.001, "{f}: {rate}");
    }
    let sob = reporter_positive_rate(&ds, Feature::ShortnessOfBreath).unwrap();
    assert_eq!(sob, 859.0 / 930.0);
}

#[test]
fn bias_drop_of_asymptomatic_negatives() {
    let asymptomatic = Record::new([false; NUM_FEATURES], false);
    let mut recs = vec![asymptomatic; 1000];
    let mut rng = SeededRng::new(2);
    for _ in 0..300 {
        let mut x = random_features(&mut rng);
        x[Feature::Headache.index()] = true;
        recs.push(Record::new(x, rng.coin(0.5)));
    }
    let ds = Dataset::new(recs, "t");
    let before = reporter_positive_rate(&ds, Feature::Headache).unwrap();
    let out = simulate_bias(
        &ds,
        &BiasSimConfig {
            drop_fraction: 0.5,
            seed: 7,
        },
    )
    .unwrap();
    assert_eq!(ds.len() - out.len(), 500);
    assert_eq!(asymptomatic_negatives(&out).len(), 500);
    // dropped records report no symptom, so symptom reporter rates are untouched
    assert_eq!(reporter_positive_rate(&out, Feature::Headache).unwrap(), before);
}

#[test]
fn invalid_inputs_are_rejected() {
    let ds = Dataset::new(vec![Record::new([false; NUM_FEATURES], false)], "t");
    assert!(matches!(
        simulate_bias(
            &ds,
            &BiasSimConfig {
                drop_fraction: 1.5,
                seed: 0
            }
        ),
        Err(DatasetError::FractionOutOfRange(_))
    ));
    assert!(matches!(
        reporter_positive_rate(&ds, Feature::Cough),
        Err(DatasetError::FeatureNeverReported(_))
    ));
    let bad = "sex_male,age_60_plus,cough,fever,sore_throat,shortness_of_breath,headache,contact_confirmed,label\n0,0,2,0,0,0,0,0,1\n";
    assert!(matches!(load_csv(bad.as_bytes()), Err(DatasetError::NonBinary { .. })));
}

proptest! {
    #[test]
    fn csv_round_trip(recs in records()) {
        let ds = Dataset::new(recs, "t");
        let mut buf = Vec::new();
        write_csv(&ds, &mut buf).unwrap();
        let back = load_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.records(), ds.records());
        let mut again = Vec::new();
        write_csv(&back, &mut again).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn csv_columns_may_be_permuted(recs in records(), seed in any::<u64>()) {
        let ds = Dataset::new(recs, "t");
        let mut order: Vec<usize> = (0..=NUM_FEATURES).collect();
        SeededRng::new(seed).shuffle(&mut order);
        let mut header: Vec<String> = Feature::ALL.iter().map(|f| f.name().to_string()).collect();
        header.push("label".into());
        let mut text = order.iter().map(|&i| header[i].as_str()).collect::<Vec<_>>().join(",");
        text.push_str("\r\n");
        for r in &ds {
            let cells: Vec<&str> = order
                .iter()
                .map(|&i| {
                    let bit = if i < NUM_FEATURES { r.features[i] } else { r.label };
                    if bit { "1" } else { "0" }
                })
                .collect();
            text.push_str(&cells.join(","));
            text.push_str("\r\n");
        }
        let back = load_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(back.records(), ds.records());
    }

    #[test]
    fn bias_output_is_a_sub_multiset(recs in records(), frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let ds = Dataset::new(recs, "t");
        let out = simulate_bias(&ds, &BiasSimConfig { drop_fraction: frac, seed }).unwrap();
        let k = asymptomatic_negatives(&ds).len();
        prop_assert_eq!(ds.len() - out.len(), (frac * k as f64).round() as usize);
        // survivors appear in input order
        let mut it = ds.iter();
        for r in &out {
            prop_assert!(it.any(|x| x == r));
        }
        let removed_symptomatic = ds.iter().filter(|r| !r.is_asymptomatic() || r.label).count()
            - out.iter().filter(|r| !r.is_asymptomatic() || r.label).count();
        prop_assert_eq!(removed_symptomatic, 0);
    }

    #[test]
    fn split_partitions(recs in records(), frac in 0.0f64..=1.0, seed in any::<u64>(), stratified in any::<bool>()) {
        let ds = Dataset::new(recs, "t");
        if stratified && (ds.n_positive() == 0 || ds.n_negative() == 0) {
            prop_assert!(matches!(split(&ds, frac, seed, true), Err(DatasetError::DegenerateClassBalance(_))));
            return Ok(());
        }
        let (train, test) = split(&ds, frac, seed, stratified).unwrap();
        prop_assert_eq!(train.len() + test.len(), ds.len());
        let mut all: Vec<(u8, bool)> = train.iter().chain(test.iter()).map(|r| (r.pattern(), r.label)).collect();
        let mut orig: Vec<(u8, bool)> = ds.iter().map(|r| (r.pattern(), r.label)).collect();
        all.sort();
        orig.sort();
        prop_assert_eq!(all, orig);
    }
}
