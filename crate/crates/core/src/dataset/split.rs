use super::{Dataset, DatasetError};
use crate::rng::SeededRng;

/// Seeded partition into `(train, test)`. The test side takes
/// `round(test_fraction * n)` records (per class when `stratified`); both
/// sides keep the input order.
pub fn split(
    ds: &Dataset,
    test_fraction: f64,
    seed: u64,
    stratified: bool,
) -> Result<(Dataset, Dataset), DatasetError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(DatasetError::FractionOutOfRange(test_fraction));
    }
    let mut rng = SeededRng::new(seed);
    let mut in_test = vec![false; ds.len()];
    let mut pick = |mut pool: Vec<usize>| {
        let k = (test_fraction * pool.len() as f64).round() as usize;
        rng.shuffle(&mut pool);
        for &i in &pool[..k] {
            in_test[i] = true;
        }
    };
    if stratified {
        let (pos, neg): (Vec<usize>, Vec<usize>) = (0..ds.len()).partition(|&i| ds.records()[i].label);
        if pos.is_empty() || neg.is_empty() {
            return Err(DatasetError::DegenerateClassBalance(
                "stratified split needs both classes",
            ));
        }
        pick(pos);
        pick(neg);
    } else {
        pick((0..ds.len()).collect());
    }

    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (r, &t) in ds.iter().zip(&in_test) {
        if t {
            test.push(*r)
        } else {
            train.push(*r)
        }
    }
    let tag = |side: &str| format!("{}|split:{side},seed={seed}", ds.provenance());
    Ok((Dataset::new(train, tag("train")), Dataset::new(test, tag("test"))))
}
