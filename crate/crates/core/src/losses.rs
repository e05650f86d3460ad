//! Label-smoothing cross-entropy, the empirical risk of the layer-peeled model
//! in its direct and logit-difference forms, the regularized objective with its
//! analytic gradient, and the scalar lower-bound helpers used to certify the
//! closed-form minimizer.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::embedding::ModelParams;
use crate::error::{Error, Result};

/// Smoothing parameter and weight decays of the regularized problem.
/// `alpha = 0` is plain cross-entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossParams {
    pub alpha: f64,
    pub lambda_w: f64,
    pub lambda_h: f64,
}

impl LossParams {
    pub fn new(alpha: f64, lambda_w: f64, lambda_h: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Domain(format!("alpha must lie in [0,1), got {alpha}")));
        }
        if !(lambda_w > 0.0 && lambda_h > 0.0) {
            return Err(Error::Domain(format!(
                "weight decays must be positive, got lambda_w={lambda_w}, lambda_h={lambda_h}"
            )));
        }
        Ok(Self {
            alpha,
            lambda_w,
            lambda_h,
        })
    }

    /// Mass the smoothed label moves off the true class, `(N-1) alpha / N`.
    pub fn beta(&self, n_classes: usize) -> f64 {
        (n_classes as f64 - 1.0) * self.alpha / n_classes as f64
    }
}

/// `(1 - alpha) e_n + (alpha / N) 1`.
pub fn smoothed_label(n: usize, alpha: f64, n_classes: usize) -> DVector<f64> {
    assert!(n < n_classes, "class {n} out of range for {n_classes} classes");
    let off = alpha / n_classes as f64;
    let mut y = DVector::from_element(n_classes, off);
    y[n] += 1.0 - alpha;
    y
}

pub(crate) fn log_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.into_iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Numerically stable softmax of `W z`.
pub fn softmax_scores(w: &DMatrix<f64>, z: &DVector<f64>) -> DVector<f64> {
    softmax(&(w * z))
}

pub(crate) fn softmax(logits: &DVector<f64>) -> DVector<f64> {
    let max = logits.max();
    let mut p = logits.map(|l| (l - max).exp());
    let s = p.sum();
    p /= s;
    p
}

/// `<-y_n, log softmax(W z)>`, evaluated as `lse(Wz) - <y_n, Wz>`.
pub fn ls_loss(w: &DMatrix<f64>, z: &DVector<f64>, n: usize, alpha: f64) -> f64 {
    let logits = w * z;
    loss_from_logits(&logits, n, alpha)
}

fn loss_from_logits(logits: &DVector<f64>, n: usize, alpha: f64) -> f64 {
    let y = smoothed_label(n, alpha, logits.len());
    log_sum_exp(logits.iter().copied()) - y.dot(logits)
}

/// Mean smoothed loss over all N·K features.
pub fn empirical_risk(params: &ModelParams, lp: &LossParams) -> f64 {
    let logits = &params.w * &params.h;
    let mut total = 0.0;
    for n in 0..params.n {
        for k in 0..params.k {
            let col = logits.column(params.col(n, k)).into_owned();
            total += loss_from_logits(&col, n, lp.alpha);
        }
    }
    total / (params.n * params.k) as f64
}

/// Same risk written through logit differences `d_m = <w_m - w_n, h>`:
/// `log(1 + sum_{m != n} e^{d_m}) - (alpha/N) sum_{m != n} d_m`.
pub fn reformulated_risk(params: &ModelParams, lp: &LossParams) -> f64 {
    let n_cls = params.n;
    let logits = &params.w * &params.h;
    let mut total = 0.0;
    for n in 0..n_cls {
        for k in 0..params.k {
            let col = logits.column(params.col(n, k));
            let diffs: Vec<f64> = (0..n_cls).filter(|&m| m != n).map(|m| col[m] - col[n]).collect();
            let lse = log_sum_exp(std::iter::once(0.0).chain(diffs.iter().copied()));
            total += lse - lp.alpha / n_cls as f64 * diffs.iter().sum::<f64>();
        }
    }
    total / (n_cls * params.k) as f64
}

/// `L_alpha + lambda_w ||W||^2 + (lambda_h / K) ||H||^2`.
pub fn regularized_objective(params: &ModelParams, lp: &LossParams) -> f64 {
    empirical_risk(params, lp)
        + lp.lambda_w * params.w.norm_squared()
        + lp.lambda_h / params.k as f64 * params.h.norm_squared()
}

/// Averaged bilinear term
/// `P(W,H) = 1/(K N (N-1)) sum_{k,n} sum_{m != n} <w_m - w_n, h_n^(k)>`.
pub fn bilinear_term(params: &ModelParams) -> f64 {
    let n_cls = params.n;
    let logits = &params.w * &params.h;
    let mut total = 0.0;
    for n in 0..n_cls {
        for k in 0..params.k {
            let col = logits.column(params.col(n, k));
            // sum_{m != n} (l_m - l_n) = sum_m l_m - N l_n
            total += col.sum() - n_cls as f64 * col[n];
        }
    }
    total / (params.k * n_cls * (n_cls - 1)) as f64
}

/// Lower bound on the empirical risk as a function of the bilinear term:
/// `g(P) = log(1 + (N-1) e^P) - beta P`.
pub fn jensen_lower_bound(p: f64, beta: f64, n_classes: usize) -> f64 {
    let c = (n_classes as f64 - 1.0).ln();
    // log(1 + e^{P + log(N-1)}) computed stably
    softplus(p + c) - beta * p
}

pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Minimizer `t0 = log(beta / ((N-1)(1-beta)))` of the bound `g`;
/// negative infinity when `beta = 0`.
pub fn jensen_minimizer(beta: f64, n_classes: usize) -> f64 {
    if beta == 0.0 {
        return f64::NEG_INFINITY;
    }
    (beta / ((n_classes as f64 - 1.0) * (1.0 - beta))).ln()
}

/// Gradient of [`regularized_objective`] with respect to `W` and `H`, ignoring
/// the sign constraint on `H`.
pub fn objective_gradient(params: &ModelParams, lp: &LossParams) -> (DMatrix<f64>, DMatrix<f64>) {
    let n_cls = params.n;
    let scale = 1.0 / (n_cls * params.k) as f64;
    let logits = &params.w * &params.h;
    // residual R = softmax - y per column; dL/dW = R H^T, dL/dH = W^T R
    let mut resid = DMatrix::zeros(n_cls, params.h.ncols());
    for n in 0..n_cls {
        let y = smoothed_label(n, lp.alpha, n_cls);
        for k in 0..params.k {
            let j = params.col(n, k);
            let p = softmax(&logits.column(j).into_owned());
            resid.set_column(j, &(p - &y));
        }
    }
    resid *= scale;
    let grad_w = &resid * params.h.transpose() + 2.0 * lp.lambda_w * &params.w;
    let grad_h = params.w.transpose() * &resid + 2.0 * lp.lambda_h / params.k as f64 * &params.h;
    (grad_w, grad_h)
}
