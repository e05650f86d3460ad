//! NC1 and memorization for a feature file in the embedding CSV schema.
//! Without an argument a small synthetic file is written and read back.
//!
//! `cargo run --example nc_metrics_from_csv -- features.csv`

use nalgebra::DMatrix;
use ncmd::embedding::{class_stats, load_embeddings, save_embeddings, EmbeddingSet, LabelSource, Split};
use ncmd::metrics::{memorization_report, nc1_metric};
use std::path::PathBuf;

fn synthetic() -> ncmd::Result<PathBuf> {
    let rows: [(usize, usize, bool, Split, [f64; 2]); 8] = [
        (0, 0, false, Split::Train, [2.0, 0.1]),
        (0, 0, false, Split::Train, [1.8, -0.1]),
        (0, 1, true, Split::Train, [0.3, 1.6]),
        (0, 0, false, Split::Test, [2.1, 0.0]),
        (1, 1, false, Split::Train, [0.0, 2.2]),
        (1, 1, false, Split::Train, [0.2, 1.9]),
        (1, 1, false, Split::Train, [-0.1, 2.0]),
        (1, 1, false, Split::Test, [0.1, 2.0]),
    ];
    let x = DMatrix::from_fn(rows.len(), 2, |i, j| rows[i].4[j]);
    let set = EmbeddingSet::new(
        x,
        rows.iter().map(|r| r.0).collect(),
        rows.iter().map(|r| r.1).collect(),
        rows.iter().map(|r| r.2).collect(),
        rows.iter().map(|r| r.3).collect(),
        2,
    )?;
    let path = std::env::temp_dir().join("ncmd_example_features.csv");
    save_embeddings(&set, &path)?;
    Ok(path)
}

fn main() -> ncmd::Result<()> {
    let path = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => synthetic()?,
    };
    let set = load_embeddings(&path)?;
    println!(
        "{}: {} samples, {} classes, dim {}",
        path.display(),
        set.len(),
        set.n_classes(),
        set.dim()
    );
    for (split, labels) in [
        (Split::Train, LabelSource::True),
        (Split::Train, LabelSource::Observed),
        (Split::Test, LabelSource::True),
    ] {
        match nc1_metric(&set, split, labels) {
            Ok(v) => println!("NC1 {split:?}/{labels:?}: {v:.6}"),
            Err(e) => println!("NC1 {split:?}/{labels:?}: {e}"),
        }
    }
    let stats = class_stats(&set, Split::Train, LabelSource::Observed)?;
    let mem = memorization_report(&set, &stats)?;
    println!(
        "mem {:.6} over {} corrupted samples ({:.6} each)",
        mem.mem, mem.n_corrupted, mem.mem_per_corrupted
    );
    Ok(())
}
