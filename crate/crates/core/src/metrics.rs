//! Neural-collapse diagnostics.
//!
//! Sample-level metrics (`covariances`, `nc1_metric`, `memorization`) work on an
//! [`EmbeddingSet`]; `nc_config_report` scores a layer-peeled pair `(W, H)`
//! against the collapsed configuration: identical features within a class,
//! equinorm nonnegative orthogonal class means, and class weights proportional
//! to the centred class means.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingSet, LabelSource, ModelParams, Split};
use crate::error::{Error, Result};

/// Singular values below this fraction of the largest are dropped from the pseudo-inverse.
pub const PINV_RELATIVE_CUTOFF: f64 = 1e-10;

/// Within-class and between-class covariance of labeled rows.
fn scatter(features: &DMatrix<f64>, labels: &[usize], n_classes: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let m = features.ncols();
    let mut sums = vec![DVector::<f64>::zeros(m); n_classes];
    let mut counts = vec![0usize; n_classes];
    for (i, &c) in labels.iter().enumerate() {
        sums[c] += features.row(i).transpose();
        counts[c] += 1;
    }
    if let Some(class) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyClass { class });
    }
    let means: Vec<DVector<f64>> = sums.into_iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    let global = means.iter().fold(DVector::zeros(m), |acc, mu| acc + mu) / n_classes as f64;

    let mut sigma_w = DMatrix::zeros(m, m);
    for (i, &c) in labels.iter().enumerate() {
        let d = features.row(i).transpose() - &means[c];
        sigma_w.ger(1.0, &d, &d, 1.0);
    }
    sigma_w /= labels.len() as f64;

    let mut sigma_b = DMatrix::zeros(m, m);
    for mu in &means {
        let d = mu - &global;
        sigma_b.ger(1.0, &d, &d, 1.0);
    }
    sigma_b /= n_classes as f64;
    Ok((sigma_w, sigma_b))
}

fn select(set: &EmbeddingSet, split: Split, label_source: LabelSource) -> (DMatrix<f64>, Vec<usize>) {
    let rows: Vec<usize> = (0..set.len()).filter(|&i| set.splits()[i] == split).collect();
    let features = set.features().select_rows(rows.iter());
    let labels = rows.iter().map(|&i| set.labels(label_source)[i]).collect();
    (features, labels)
}

/// `(Sigma_W, Sigma_B)` over one split. `Sigma_W` averages over samples, which
/// is `1/(NK)` for a balanced set.
pub fn covariances(
    set: &EmbeddingSet,
    split: Split,
    label_source: LabelSource,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (features, labels) = select(set, split, label_source);
    scatter(&features, &labels, set.n_classes())
}

/// Moore-Penrose pseudo-inverse of a symmetric positive semidefinite matrix,
/// dropping eigenvalues (its singular values) below the relative cutoff.
/// Eigendecomposition rather than SVD: the SVD vectors drift on
/// rank-deficient covariances.
pub fn pseudo_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = a.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.amax();
    let mut out = DMatrix::zeros(a.ncols(), a.nrows());
    if lmax == 0.0 {
        return out;
    }
    let cutoff = PINV_RELATIVE_CUTOFF * lmax;
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > cutoff {
            let v = eig.eigenvectors.column(i);
            out.ger(1.0 / l, &v, &v, 1.0);
        }
    }
    out
}

/// `(1/N) trace(Sigma_W Sigma_B^+)`. Infinite when the class means coincide
/// but the classes are not collapsed; zero when both covariances vanish.
pub fn nc1_from_covariances(sigma_w: &DMatrix<f64>, sigma_b: &DMatrix<f64>, n_classes: usize) -> f64 {
    let b_zero = sigma_b.iter().all(|&x| x == 0.0);
    let w_zero = sigma_w.iter().all(|&x| x == 0.0);
    match (w_zero, b_zero) {
        (true, _) => 0.0,
        (false, true) => f64::INFINITY,
        (false, false) => (sigma_w * pseudo_inverse(sigma_b)).trace() / n_classes as f64,
    }
}

pub fn nc1_metric(set: &EmbeddingSet, split: Split, label_source: LabelSource) -> Result<f64> {
    let (sw, sb) = covariances(set, split, label_source)?;
    Ok(nc1_from_covariances(&sw, &sb, set.n_classes()))
}

/// Summed distance of corrupted training samples to the test mean of their
/// true class.
pub fn memorization(set: &EmbeddingSet, test_means: &crate::embedding::ClassStats) -> Result<f64> {
    Ok(memorization_report(set, test_means)?.mem)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemorizationReport {
    pub mem: f64,
    pub n_corrupted: usize,
    /// `mem / n_corrupted`, zero when nothing is corrupted.
    pub mem_per_corrupted: f64,
}

pub fn memorization_report(
    set: &EmbeddingSet,
    test_means: &crate::embedding::ClassStats,
) -> Result<MemorizationReport> {
    let mut mem = 0.0;
    let mut n_corrupted = 0;
    for i in 0..set.len() {
        if set.splits()[i] != Split::Train || !set.corrupted()[i] {
            continue;
        }
        let class = set.true_labels()[i];
        let center = test_means
            .test_class_means
            .get(class)
            .and_then(Option::as_ref)
            .ok_or(Error::MissingTestMean { class })?;
        mem += (set.feature(i) - center).norm();
        n_corrupted += 1;
    }
    let mem_per_corrupted = if n_corrupted == 0 {
        0.0
    } else {
        mem / n_corrupted as f64
    };
    Ok(MemorizationReport {
        mem,
        n_corrupted,
        mem_per_corrupted,
    })
}

/// Distance of a layer-peeled pair from the collapsed configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NcReport {
    /// Trace metric on the columns of `H`.
    pub nc1: f64,
    /// Mean over classes of the within-class mean squared deviation.
    pub variability_collapse: f64,
    /// `(max ||h_n|| - min ||h_n||) / max ||h_n||`.
    pub equinorm_dev: f64,
    /// Largest absolute cosine between distinct class means.
    pub orthogonality_dev: f64,
    /// Magnitude of the most negative entry of `H`.
    pub negativity_dev: f64,
    /// Largest relative residual of `w_n = C (h_n - h)` with `C` fitted jointly.
    pub duality_dev: f64,
    /// Largest deviation of the centred cosines from `-1/(N-1)`.
    pub etf_angle_dev: f64,
    /// Largest distance between normalized centred means and normalized weights.
    pub self_duality_dev: f64,
    /// Fraction of features where the classifier agrees with the nearest class mean.
    pub ncc_agreement: f64,
}

impl NcReport {
    /// Named residuals that must all vanish at a collapsed configuration.
    /// The nearest-center criterion enters as `1 - ncc_agreement`.
    pub fn deviations(&self) -> [(&'static str, f64); 9] {
        [
            ("nc1", self.nc1),
            ("variability_collapse", self.variability_collapse),
            ("equinorm_dev", self.equinorm_dev),
            ("orthogonality_dev", self.orthogonality_dev),
            ("negativity_dev", self.negativity_dev),
            ("duality_dev", self.duality_dev),
            ("etf_angle_dev", self.etf_angle_dev),
            ("self_duality_dev", self.self_duality_dev),
            ("ncc_disagreement", 1.0 - self.ncc_agreement),
        ]
    }

    pub fn max_deviation(&self) -> f64 {
        self.deviations().iter().map(|&(_, v)| v).fold(0.0, f64::max)
    }

    pub fn accepts(&self, tol: f64) -> bool {
        self.deviations().iter().all(|&(_, v)| v <= tol)
    }
}

/// Projection of `v` onto the orthogonal complement of `h`.
pub fn project_orthogonal(v: &DVector<f64>, h: &DVector<f64>) -> DVector<f64> {
    let hh = h.norm_squared();
    if hh == 0.0 {
        return v.clone();
    }
    v - h * (v.dot(h) / hh)
}

fn cosine(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let d = a.norm() * b.norm();
    if d == 0.0 {
        // undefined angle counts as fully aligned
        1.0
    } else {
        a.dot(b) / d
    }
}

fn safe_ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub fn nc_config_report(params: &ModelParams) -> NcReport {
    let n_cls = params.n;
    let means = params.class_means();
    let global = params.global_mean();
    let centred: Vec<DVector<f64>> = means.iter().map(|mu| mu - &global).collect();
    let weights: Vec<DVector<f64>> = (0..n_cls).map(|n| params.weight(n)).collect();

    let features = params.h.transpose();
    let labels: Vec<usize> = (0..n_cls).flat_map(|n| std::iter::repeat_n(n, params.k)).collect();
    let nc1 = match scatter(&features, &labels, n_cls) {
        Ok((sw, sb)) => nc1_from_covariances(&sw, &sb, n_cls),
        Err(_) => f64::INFINITY,
    };

    let variability_collapse = (0..n_cls)
        .map(|n| {
            (0..params.k)
                .map(|k| (params.feature(n, k) - &means[n]).norm_squared())
                .sum::<f64>()
                / params.k as f64
        })
        .sum::<f64>()
        / n_cls as f64;

    let norms: Vec<f64> = means.iter().map(|mu| mu.norm()).collect();
    let max_norm = norms.iter().copied().fold(0.0, f64::max);
    let min_norm = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let equinorm_dev = safe_ratio(max_norm - min_norm, max_norm);

    let mut orthogonality_dev: f64 = 0.0;
    let mut etf_angle_dev: f64 = 0.0;
    let etf_cos = -1.0 / (n_cls as f64 - 1.0);
    for a in 0..n_cls {
        for b in (a + 1)..n_cls {
            orthogonality_dev = orthogonality_dev.max(cosine(&means[a], &means[b]).abs());
            etf_angle_dev = etf_angle_dev.max((cosine(&centred[a], &centred[b]) - etf_cos).abs());
        }
    }

    let negativity_dev = params.h.iter().copied().fold(0.0, |acc: f64, x| acc.max(-x));

    let num: f64 = weights.iter().zip(&centred).map(|(w, d)| w.dot(d)).sum();
    let den: f64 = centred.iter().map(|d| d.norm_squared()).sum();
    let c = if den > 0.0 { num / den } else { 0.0 };
    let duality_dev = weights
        .iter()
        .zip(&centred)
        .map(|(w, d)| safe_ratio((w - d * c).norm(), w.norm()))
        .fold(0.0, f64::max);

    let self_duality_dev = weights
        .iter()
        .zip(&centred)
        .map(|(w, d)| {
            let (wn, dn) = (w.norm(), d.norm());
            if wn == 0.0 || dn == 0.0 {
                2.0
            } else {
                (d / dn - w / wn).norm()
            }
        })
        .fold(0.0, f64::max);

    let mut agree = 0usize;
    for j in 0..params.h.ncols() {
        let u = params.h.column(j);
        let by_classifier = argmax((0..n_cls).map(|n| weights[n].dot(&u)));
        let by_center = argmax((0..n_cls).map(|n| -(&means[n] - u).norm()));
        if by_classifier == by_center {
            agree += 1;
        }
    }
    let ncc_agreement = agree as f64 / params.h.ncols() as f64;

    NcReport {
        nc1,
        variability_collapse,
        equinorm_dev,
        orthogonality_dev,
        negativity_dev,
        duality_dev,
        etf_angle_dev,
        self_duality_dev,
        ncc_agreement,
    }
}

fn argmax(xs: impl Iterator<Item = f64>) -> usize {
    xs.enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |best, (i, x)| if x > best.1 { (i, x) } else { best },
        )
        .0
}
