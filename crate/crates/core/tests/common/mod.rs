//! Shared oracles and random instance generators for the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use ncmd::md::{Class, MdProblem, NoiseDist};
use ncmd::{LossParams, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    let normal = Normal::new(0.0, scale).unwrap();
    DMatrix::from_fn(rows, cols, |_, _| normal.sample(rng))
}

/// Random `(W, H)` with `H >= 0`.
pub fn random_params(rng: &mut ChaCha8Rng, n: usize, k: usize, m: usize, scale: f64) -> ModelParams {
    let w = gaussian(rng, n, m, scale);
    let h = gaussian(rng, m, n * k, scale).abs();
    ModelParams::new(w, h, k).unwrap()
}

pub fn random_loss(rng: &mut ChaCha8Rng) -> LossParams {
    LossParams::new(
        rng.random_range(0.0..0.9),
        rng.random_range(1e-4..1e-1),
        rng.random_range(1e-4..1e-1),
    )
    .unwrap()
}

/// Random two-class instance with a frozen collapsed configuration.
pub fn random_md(rng: &mut ChaCha8Rng) -> MdProblem {
    let lambda = rng.random_range(2e-4..3e-3);
    let alpha = [0.0, 0.05, 0.1, 0.2][rng.random_range(0..4)];
    let lp = LossParams::new(alpha, lambda, lambda).unwrap();
    let m = rng.random_range(2..5);
    let eta = rng.random_range(0.005..0.2);
    let c_md = rng.random_range(0.5..2.0);
    MdProblem::from_loss(&lp, m, eta, c_md, NoiseDist::TwoPoint).unwrap()
}

/// Exhaustive `n x n` grid over the feasible set of the constrained
/// subproblem for class 1 in the plane of the centers. Returns the best grid
/// cost and an upper bound on the cost variation across one grid cell.
pub fn brute_force_u1(p: &MdProblem, r: f64, n: usize) -> (f64, f64) {
    let h1 = p.center(Class::First);
    let h2 = p.center(Class::Second);
    let e1 = &h1 / h1.norm();
    let e2 = &h2 / h2.norm();
    let b = h2.norm();
    let radius = p.radius(r);
    let (x_lo, x_hi) = (0.0, radius);
    let (y_lo, y_hi) = ((b - radius).max(0.0), b + radius);
    let dx = (x_hi - x_lo) / (n - 1) as f64;
    let dy = (y_hi - y_lo) / (n - 1) as f64;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let x = x_lo + dx * i as f64;
        for j in 0..n {
            let y = y_lo + dy * j as f64;
            if x * x + (y - b) * (y - b) > radius * radius {
                continue;
            }
            let u = &e1 * x + &e2 * y;
            best = best.min(p.sample_cost(Class::First, &u));
        }
    }
    let dw = (p.weight(Class::Second) - p.weight(Class::First)).norm();
    let u_max = (x_hi * x_hi + y_hi * y_hi).sqrt();
    let lipschitz = dw + 2.0 * p.lambda * u_max;
    (best, lipschitz * (dx * dx + dy * dy).sqrt())
}

/// Central finite-difference gradient of `f` with respect to every entry of `x`.
pub fn finite_difference(x: &DMatrix<f64>, step: f64, mut f: impl FnMut(&DMatrix<f64>) -> f64) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(x.nrows(), x.ncols());
    let mut y = x.clone();
    for idx in 0..x.len() {
        let orig = y[idx];
        y[idx] = orig + step;
        let fp = f(&y);
        y[idx] = orig - step;
        let fm = f(&y);
        y[idx] = orig;
        g[idx] = (fp - fm) / (2.0 * step);
    }
    g
}

/// Haar-ish random orthogonal matrix from the QR factorization of a Gaussian.
pub fn random_rotation(rng: &mut ChaCha8Rng, m: usize) -> DMatrix<f64> {
    gaussian(rng, m, m, 1.0).qr().q()
}
