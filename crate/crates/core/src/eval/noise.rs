use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};

/// Flips the labels of exactly `round(rate * n)` distinct samples.
///
/// Samples are drawn without replacement from a generator seeded with
/// `seed`; each receives a label drawn uniformly from the other classes.
pub fn inject_label_noise(dataset: &Dataset, rate: f64, seed: u64) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidArgument(alloc::format!(
            "noise rate must be in [0, 1], got {rate}"
        )));
    }
    if rate == 0.0 {
        return Ok(dataset.clone());
    }
    let classes = dataset.classes();
    if classes.len() < 2 {
        return Err(Error::InvalidArgument(
            "label noise needs at least two classes".into(),
        ));
    }
    let n = dataset.len();
    let m = libm::round(rate * n as f64) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<Label> = dataset.samples().iter().map(|s| s.label).collect();
    for pos in rand::seq::index::sample(&mut rng, n, m.min(n)) {
        let current = labels[pos];
        let others: Vec<Label> = classes.iter().copied().filter(|&c| c != current).collect();
        labels[pos] = others[rng.gen_range(0..others.len())];
    }
    dataset.relabel(&labels)
}
