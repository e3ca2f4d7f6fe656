#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ridgeless_core::Dataset;

/// Random dataset with `m` in `[4, 12]`, chord slopes in `[-3, 3]` and gaps in
/// `[0.25, 2]`. About one slope in six repeats its predecessor so flat knots show up.
pub fn random_dataset(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(4..=12);
    random_dataset_with(&mut rng, m)
}

pub fn random_dataset_with(rng: &mut ChaCha8Rng, m: usize) -> Dataset {
    let mut x = rng.random_range(-5.0..5.0);
    let mut y = rng.random_range(-5.0..5.0);
    let mut pts = vec![(x, y)];
    let mut slope: f64 = rng.random_range(-3.0..=3.0);
    for _ in 1..m {
        if !rng.random_bool(1.0 / 6.0) {
            slope = rng.random_range(-3.0..=3.0);
        }
        let dx = rng.random_range(0.25..=2.0);
        x += dx;
        y += slope * dx;
        pts.push((x, y));
    }
    Dataset::new(pts).expect("strictly increasing abscissae")
}
