//! Label corruption followed by partial memorization: corrupted training
//! samples are pulled toward the mean of their observed class, and the
//! memorization and NC1 metrics track how far the pull goes.

use nalgebra::DMatrix;
use ncmd::embedding::{class_stats, corrupt_labels, EmbeddingSet, LabelSource, Split};
use ncmd::metrics::{memorization_report, nc1_metric};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const N: usize = 3;
const M: usize = 3;
const PER_CLASS: usize = 400;

fn main() -> ncmd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let jitter = Normal::new(0.0, 0.3).unwrap();
    let mut labels = Vec::new();
    let mut split = Vec::new();
    for c in 0..N {
        for i in 0..PER_CLASS {
            labels.push(c);
            split.push(if i % 4 == 0 { Split::Test } else { Split::Train });
        }
    }
    let s = labels.len();
    let clean = DMatrix::from_fn(
        s,
        M,
        |i, j| if labels[i] == j { 4.0 } else { 0.0 } + jitter.sample(&mut rng),
    );

    let (mut observed, mut corrupted) = corrupt_labels(&labels, N, 0.2, 5)?;
    for i in 0..s {
        if split[i] == Split::Test {
            observed[i] = labels[i];
            corrupted[i] = false;
        }
    }
    let noisy = EmbeddingSet::new(clean, labels, observed, corrupted, split, N)?;
    let observed_means = class_stats(&noisy, Split::Train, LabelSource::Observed)?;

    println!(
        "{:>6} {:>10} {:>12} {:>12} {:>12}",
        "pull", "mem", "mem/sample", "NC1 obs", "NC1 test"
    );
    for step in 0..=5 {
        let t = step as f64 / 5.0;
        let set = noisy.map_features(|x| {
            let mut y = x.clone();
            for i in 0..noisy.len() {
                if noisy.corrupted()[i] {
                    let target = observed_means.class_mean(noisy.observed_labels()[i]).transpose();
                    let row = y.row(i).clone_owned();
                    y.set_row(i, &(row * (1.0 - t) + target * t));
                }
            }
            y
        })?;
        let stats = class_stats(&set, Split::Train, LabelSource::Observed)?;
        let mem = memorization_report(&set, &stats)?;
        let nc1 = nc1_metric(&set, Split::Train, LabelSource::Observed)?;
        let nc1_test = nc1_metric(&set, Split::Test, LabelSource::True)?;
        println!(
            "{t:>6.1} {:>10.3} {:>12.4} {nc1:>12.5} {nc1_test:>12.5}",
            mem.mem, mem.mem_per_corrupted
        );
    }
    Ok(())
}
