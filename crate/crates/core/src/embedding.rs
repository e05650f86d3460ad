//! Numeric containers shared by the rest of the crate: labeled embeddings,
//! layer-peeled model parameters and class statistics, plus CSV ingestion and
//! the label-corruption protocol.
//!
//! Class indices are 0-based in memory and 1-based in the CSV schema.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed leading columns of the feature CSV; feature columns `f0..f{M-1}` follow.
pub const CSV_FIXED_COLUMNS: [&str; 4] = ["true_label", "observed_label", "corrupted", "split"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Split::Train => f.write_str("train"),
            Split::Test => f.write_str("test"),
        }
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split tag {other:?}")),
        }
    }
}

/// Which label column groups samples into classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelSource {
    True,
    Observed,
}

impl FromStr for LabelSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "true" => Ok(LabelSource::True),
            "observed" => Ok(LabelSource::Observed),
            other => Err(format!("unknown label source {other:?}")),
        }
    }
}

/// Labeled feature vectors, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    features: DMatrix<f64>,
    true_label: Vec<usize>,
    observed_label: Vec<usize>,
    corrupted: Vec<bool>,
    split: Vec<Split>,
    n_classes: usize,
}

impl EmbeddingSet {
    pub fn new(
        features: DMatrix<f64>,
        true_label: Vec<usize>,
        observed_label: Vec<usize>,
        corrupted: Vec<bool>,
        split: Vec<Split>,
        n_classes: usize,
    ) -> Result<Self> {
        let s = features.nrows();
        if features.ncols() == 0 {
            return Err(Error::Dimension("feature dimension must be at least 1".into()));
        }
        if n_classes < 2 {
            return Err(Error::Domain(format!("need at least 2 classes, got {n_classes}")));
        }
        for (name, len) in [
            ("true_label", true_label.len()),
            ("observed_label", observed_label.len()),
            ("corrupted", corrupted.len()),
            ("split", split.len()),
        ] {
            if len != s {
                return Err(Error::Dimension(format!("{name} has {len} entries, expected {s}")));
            }
        }
        if let Some(&bad) = true_label.iter().chain(&observed_label).find(|&&l| l >= n_classes) {
            return Err(Error::Domain(format!(
                "label index {bad} out of range for {n_classes} classes"
            )));
        }
        Ok(Self {
            features,
            true_label,
            observed_label,
            corrupted,
            split,
            n_classes,
        })
    }

    /// Noiseless set: observed labels equal true labels, nothing corrupted.
    pub fn clean(features: DMatrix<f64>, labels: Vec<usize>, split: Vec<Split>, n_classes: usize) -> Result<Self> {
        let s = labels.len();
        Self::new(features, labels.clone(), labels, vec![false; s], split, n_classes)
    }

    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn true_labels(&self) -> &[usize] {
        &self.true_label
    }

    pub fn observed_labels(&self) -> &[usize] {
        &self.observed_label
    }

    pub fn corrupted(&self) -> &[bool] {
        &self.corrupted
    }

    pub fn splits(&self) -> &[Split] {
        &self.split
    }

    pub fn labels(&self, source: LabelSource) -> &[usize] {
        match source {
            LabelSource::True => &self.true_label,
            LabelSource::Observed => &self.observed_label,
        }
    }

    pub fn feature(&self, i: usize) -> DVector<f64> {
        self.features.row(i).transpose()
    }

    /// Same samples with every feature mapped through `f`.
    pub fn map_features(&self, f: impl Fn(&DMatrix<f64>) -> DMatrix<f64>) -> Result<Self> {
        let features = f(&self.features);
        if features.nrows() != self.len() {
            return Err(Error::Dimension("feature map changed the sample count".into()));
        }
        Self::new(
            features,
            self.true_label.clone(),
            self.observed_label.clone(),
            self.corrupted.clone(),
            self.split.clone(),
            self.n_classes,
        )
    }
}

/// Layer-peeled optimization variables. `w` is N×M (rows are class weights),
/// `h` is M×(N·K) with columns ordered class-major: column `n*K + k` holds
/// sample `k` of class `n`.
///
/// The constructor only checks shapes so that infeasible pairs can still be
/// scored; everything in this crate that produces parameters keeps `h >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub w: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub n: usize,
    pub k: usize,
}

impl ModelParams {
    pub fn new(w: DMatrix<f64>, h: DMatrix<f64>, k: usize) -> Result<Self> {
        let n = w.nrows();
        if n < 2 {
            return Err(Error::Domain(format!("need at least 2 classes, got {n}")));
        }
        if k == 0 {
            return Err(Error::Domain("K must be positive".into()));
        }
        if h.nrows() != w.ncols() {
            return Err(Error::Dimension(format!(
                "W is {}x{} but H has {} rows",
                n,
                w.ncols(),
                h.nrows()
            )));
        }
        if h.ncols() != n * k {
            return Err(Error::Dimension(format!(
                "H has {} columns, expected N*K = {}",
                h.ncols(),
                n * k
            )));
        }
        Ok(Self { w, h, n, k })
    }

    pub fn zeros(n: usize, k: usize, m: usize) -> Self {
        Self {
            w: DMatrix::zeros(n, m),
            h: DMatrix::zeros(m, n * k),
            n,
            k,
        }
    }

    pub fn m(&self) -> usize {
        self.w.ncols()
    }

    pub fn col(&self, n: usize, k: usize) -> usize {
        n * self.k + k
    }

    pub fn feature(&self, n: usize, k: usize) -> DVector<f64> {
        self.h.column(self.col(n, k)).into_owned()
    }

    pub fn weight(&self, n: usize) -> DVector<f64> {
        self.w.row(n).transpose()
    }

    pub fn is_feasible(&self) -> bool {
        self.h.iter().all(|&x| x >= 0.0)
    }

    pub fn class_means(&self) -> Vec<DVector<f64>> {
        (0..self.n)
            .map(|n| {
                let block = self.h.columns(n * self.k, self.k);
                block.column_sum() / self.k as f64
            })
            .collect()
    }

    pub fn global_mean(&self) -> DVector<f64> {
        let means = self.class_means();
        let mut g = DVector::zeros(self.m());
        for mu in &means {
            g += mu;
        }
        g / self.n as f64
    }
}

/// Per-class feature means and their unweighted average.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    /// N×M; row n is the mean of class n.
    pub class_means: DMatrix<f64>,
    pub global_mean: DVector<f64>,
    /// Mean of test samples per true class, `None` where the class has no test samples.
    pub test_class_means: Vec<Option<DVector<f64>>>,
}

impl ClassStats {
    pub fn class_mean(&self, n: usize) -> DVector<f64> {
        self.class_means.row(n).transpose()
    }
}

fn split_means(set: &EmbeddingSet, split: Split, source: LabelSource) -> (Vec<DVector<f64>>, Vec<usize>) {
    let m = set.dim();
    let labels = set.labels(source);
    let mut sums = vec![DVector::zeros(m); set.n_classes()];
    let mut counts = vec![0usize; set.n_classes()];
    for (i, &c) in labels.iter().enumerate() {
        if set.split[i] != split {
            continue;
        }
        sums[c] += set.features.row(i).transpose();
        counts[c] += 1;
    }
    for (sum, &c) in sums.iter_mut().zip(&counts) {
        if c > 0 {
            *sum /= c as f64;
        }
    }
    (sums, counts)
}

/// Class means and global mean over one split, grouping by `label_source`.
/// The test-class means (by true label) are attached whenever the set has test samples.
pub fn class_stats(set: &EmbeddingSet, use_split: Split, label_source: LabelSource) -> Result<ClassStats> {
    let (means, counts) = split_means(set, use_split, label_source);
    if let Some(class) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyClass { class });
    }
    let n = set.n_classes();
    let m = set.dim();
    let class_means = DMatrix::from_fn(n, m, |i, j| means[i][j]);
    let global_mean = class_means.row_mean().transpose();

    let (test_means, test_counts) = split_means(set, Split::Test, LabelSource::True);
    let test_class_means = test_means
        .into_iter()
        .zip(test_counts)
        .map(|(mu, c)| (c > 0).then_some(mu))
        .collect();

    Ok(ClassStats {
        class_means,
        global_mean,
        test_class_means,
    })
}

/// Label-noise protocol: every index is flagged independently with probability
/// `eta`; flagged labels are redrawn uniformly from all `n_classes` labels, so
/// a redraw may land on the original label and still count as corrupted.
pub fn corrupt_labels(labels: &[usize], n_classes: usize, eta: f64, seed: u64) -> Result<(Vec<usize>, Vec<bool>)> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("noise level must lie in (0,1), got {eta}")));
    }
    if n_classes < 2 {
        return Err(Error::Domain(format!("need at least 2 classes, got {n_classes}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observed = Vec::with_capacity(labels.len());
    let mut corrupted = Vec::with_capacity(labels.len());
    for &label in labels {
        if rng.random_bool(eta) {
            observed.push(rng.random_range(0..n_classes));
            corrupted.push(true);
        } else {
            observed.push(label);
            corrupted.push(false);
        }
    }
    Ok((observed, corrupted))
}

/// Reads the feature CSV. N is taken as the largest label present.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    read_embeddings(file, path)
}

pub fn read_embeddings(reader: impl Read, path: &Path) -> Result<EmbeddingSet> {
    let parse_err = |line: u64, msg: String| Error::Parse {
        path: path.into(),
        line,
        msg,
    };

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.len() < CSV_FIXED_COLUMNS.len() + 1 {
        return Err(parse_err(
            1,
            "header needs the four label columns and at least one feature".into(),
        ));
    }
    for (i, expected) in CSV_FIXED_COLUMNS.iter().enumerate() {
        if &header[i] != *expected {
            return Err(parse_err(
                1,
                format!("column {i} must be {expected:?}, found {:?}", &header[i]),
            ));
        }
    }
    let m = header.len() - CSV_FIXED_COLUMNS.len();
    for j in 0..m {
        let name = &header[CSV_FIXED_COLUMNS.len() + j];
        if name != format!("f{j}") {
            return Err(parse_err(
                1,
                format!("feature column {j} must be named f{j}, found {name:?}"),
            ));
        }
    }

    let mut data = Vec::new();
    let mut true_label = Vec::new();
    let mut observed_label = Vec::new();
    let mut corrupted = Vec::new();
    let mut split = Vec::new();

    let parse_label = |field: &str, line: u64, name: &str| -> Result<usize> {
        let v: i64 = field
            .parse()
            .map_err(|_| parse_err(line, format!("{name} {field:?} is not an integer")))?;
        if v < 1 {
            return Err(parse_err(line, format!("{name} must be >= 1, got {v}")));
        }
        Ok((v - 1) as usize)
    };

    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != header.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        true_label.push(parse_label(&record[0], line, "true_label")?);
        observed_label.push(parse_label(&record[1], line, "observed_label")?);
        corrupted.push(match &record[2] {
            "0" => false,
            "1" => true,
            other => return Err(parse_err(line, format!("corrupted must be 0 or 1, got {other:?}"))),
        });
        split.push(record[3].parse::<Split>().map_err(|msg| parse_err(line, msg))?);
        for j in 0..m {
            let field = &record[CSV_FIXED_COLUMNS.len() + j];
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(line, format!("feature f{j} {field:?} is not a number")))?;
            data.push(v);
        }
    }

    let s = true_label.len();
    let n_classes = true_label.iter().chain(&observed_label).max().map_or(0, |&l| l + 1);
    let features = DMatrix::from_row_slice(s, m, &data);
    EmbeddingSet::new(features, true_label, observed_label, corrupted, split, n_classes.max(2))
}

/// Writes the feature CSV. Floats use the shortest representation that
/// parses back to the identical bit pattern.
pub fn save_embeddings(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    write_embeddings(set, file).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })
}

pub fn write_embeddings(set: &EmbeddingSet, writer: impl Write) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = CSV_FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((0..set.dim()).map(|j| format!("f{j}")));
    wtr.write_record(&header)?;
    for i in 0..set.len() {
        let mut row = vec![
            (set.true_label[i] + 1).to_string(),
            (set.observed_label[i] + 1).to_string(),
            u8::from(set.corrupted[i]).to_string(),
            set.split[i].to_string(),
        ];
        row.extend(set.features.row(i).iter().map(|x| format!("{x:?}")));
        wtr.write_record(&row)?;
    }
    wtr.flush()
}
