//! The nonnegative layer-peeled problem
//!
//! `min_{W, H >= 0} L_alpha(W, H) + lambda_W ||W||^2 + (lambda_H / K) ||H||^2`
//!
//! solved by projected gradient descent, together with the analytic minimizer
//! norms and an explicit collapsed configuration to compare against.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::ModelParams;
use crate::error::{Error, Result};
use crate::losses::{jensen_lower_bound, jensen_minimizer, objective_gradient, regularized_objective, LossParams};
use crate::metrics::{nc_config_report, NcReport};

/// Norms and objective value of the minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub beta: f64,
    /// Minimizer of `g(t) = log(1 + (N-1) e^t) - beta t`; `-inf` for `beta = 0`.
    pub t0: f64,
    pub w_norm: f64,
    pub h_norm: f64,
    pub objective_at_min: f64,
    pub condition_ok: bool,
    /// `C` in `P(W, H) >= -C ||W|| ||H||`.
    pub bilinear_constant: f64,
}

impl ClosedForm {
    /// Logit gap `-C w0 h0` at the minimizer.
    pub fn bilinear_at_min(&self) -> f64 {
        -self.bilinear_constant * self.w_norm * self.h_norm
    }

    /// The minimizer lies in the region where `-C ||W|| ||H|| >= t0`.
    pub fn region_consistent(&self) -> bool {
        self.bilinear_at_min() > self.t0
    }
}

/// Sharp constant of the bilinear bound under `H >= 0`, `1/sqrt(KN(N-1))`.
pub fn bilinear_constant(n: usize, k: usize) -> f64 {
    1.0 / ((k * n * (n - 1)) as f64).sqrt()
}

fn closed_form_with_constant(n: usize, k: usize, lp: &LossParams, c: f64) -> Result<ClosedForm> {
    if n < 2 || k < 1 {
        return Err(Error::Domain(format!("need N >= 2 and K >= 1, got N={n}, K={k}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let beta = lp.beta(n);
    let s = 2.0 * (lp.lambda_w * lp.lambda_h / kf).sqrt() / c;
    let lhs = beta + s;
    if lhs >= 1.0 {
        return Err(Error::ConditionViolated { lhs });
    }
    let x = ((nf - 1.0) * (1.0 - beta - s) / (beta + s)).ln();
    let w2 = x / c * (lp.lambda_h / (kf * lp.lambda_w)).sqrt();
    let h2 = x / c * (kf * lp.lambda_w / lp.lambda_h).sqrt();
    let (w_norm, h_norm) = (w2.sqrt(), h2.sqrt());
    let objective_at_min = jensen_lower_bound(-c * w_norm * h_norm, beta, n) + lp.lambda_w * w2 + lp.lambda_h / kf * h2;
    Ok(ClosedForm {
        beta,
        t0: jensen_minimizer(beta, n),
        w_norm,
        h_norm,
        objective_at_min,
        condition_ok: true,
        bilinear_constant: c,
    })
}

/// Norms `(||W||, ||H||)` of every global minimizer and the minimal objective.
///
/// With `C = 1/sqrt(KN(N-1))` and `s = 2 sqrt(lambda_W lambda_H / K) / C`,
/// `||W||^2 = (1/C) sqrt(lambda_H / (K lambda_W)) x` and
/// `||H||^2 = (1/C) sqrt(K lambda_W / lambda_H) x` where
/// `x = log((N-1)(1 - beta - s) / (beta + s))`. Requires `beta + s < 1`.
pub fn closed_form_minimizer(n: usize, k: usize, lp: &LossParams) -> Result<ClosedForm> {
    closed_form_with_constant(n, k, lp, bilinear_constant(n, k))
}

/// The same formulas with the looser constant `1/sqrt(K(N-1))`, which ignores
/// the sign constraint. `objective_at_min` is then a lower bound on the
/// objective that no feasible pair attains.
pub fn loose_lower_bound(n: usize, k: usize, lp: &LossParams) -> Result<ClosedForm> {
    closed_form_with_constant(n, k, lp, 1.0 / ((k * (n - 1).max(1)) as f64).sqrt())
}

/// Collapsed pair with `||W|| = w_norm`, `||H|| = h_norm`: class means
/// `(h_norm / sqrt(NK)) e_n` repeated `K` times and `w_n = c (h_n - h)`.
pub fn construct_nc_config(n: usize, k: usize, m: usize, w_norm: f64, h_norm: f64) -> Result<ModelParams> {
    if n < 2 || k < 1 {
        return Err(Error::Domain(format!("need N >= 2 and K >= 1, got N={n}, K={k}")));
    }
    if m < n {
        return Err(Error::Dimension(format!("need M >= N, got M={m}, N={n}")));
    }
    if !(w_norm >= 0.0 && h_norm >= 0.0) {
        return Err(Error::Domain("norms must be nonnegative".into()));
    }
    let a = h_norm / ((n * k) as f64).sqrt();
    let mut h = DMatrix::zeros(m, n * k);
    for cls in 0..n {
        for j in 0..k {
            h[(cls, cls * k + j)] = a;
        }
    }
    let mut w = DMatrix::zeros(n, m);
    if a > 0.0 {
        let c = w_norm / ((n - 1) as f64).sqrt() / a;
        let mean = a / n as f64;
        for cls in 0..n {
            for d in 0..n {
                w[(cls, d)] = c * (if d == cls { a } else { 0.0 } - mean);
            }
        }
    }
    ModelParams::new(w, h, k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub restarts: usize,
    /// Projected-gradient norm at which a run counts as converged.
    pub tol: f64,
    /// Relative objective change below which a run is treated as stalled and stopped.
    pub rel_obj_tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub init_scale: f64,
    pub initial_step: f64,
    pub backtrack: f64,
    pub armijo: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            restarts: 5,
            tol: 1e-8,
            rel_obj_tol: 1e-15,
            max_iter: 200_000,
            seed: 0,
            init_scale: 0.1,
            initial_step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpmSolution {
    pub params: ModelParams,
    pub objective: f64,
    /// `||x - P(x - grad f(x))||` at exit.
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub restarts_used: usize,
}

fn project(h: &mut DMatrix<f64>) {
    h.apply(|x| *x = x.max(0.0));
}

fn projected_grad_norm(p: &ModelParams, gw: &DMatrix<f64>, gh: &DMatrix<f64>) -> f64 {
    let mut stepped = &p.h - gh;
    project(&mut stepped);
    (gw.norm_squared() + (&p.h - stepped).norm_squared()).sqrt()
}

/// Random start: Gaussian `W`, folded Gaussian `H`.
pub fn random_init(n: usize, k: usize, m: usize, scale: f64, seed: u64, stream: u64) -> ModelParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let normal = Normal::new(0.0, scale).expect("scale must be finite and positive");
    let w = DMatrix::from_fn(n, m, |_, _| normal.sample(&mut rng));
    let h = DMatrix::from_fn(m, n * k, |_, _| normal.sample(&mut rng).abs());
    ModelParams { w, h, n, k }
}

/// Projected gradient descent from `init` with Armijo backtracking along the
/// projection arc. Trial steps start from the Barzilai-Borwein estimate of the
/// previous iteration. When `trace` is given, the objective after every
/// accepted step is appended to it.
pub fn descend(
    init: ModelParams,
    lp: &LossParams,
    opts: &SolverOptions,
    mut trace: Option<&mut Vec<f64>>,
) -> LpmSolution {
    let mut x = init;
    project(&mut x.h);
    let mut f = regularized_objective(&x, lp);
    let (mut gw, mut gh) = objective_gradient(&x, lp);
    let mut step = opts.initial_step;
    let mut iterations = 0;
    if let Some(t) = trace.as_deref_mut() {
        t.push(f);
    }

    while iterations < opts.max_iter {
        if projected_grad_norm(&x, &gw, &gh) <= opts.tol {
            break;
        }
        iterations += 1;
        let mut t = step;
        let accepted = loop {
            let mut cand = x.clone();
            cand.w -= t * &gw;
            cand.h -= t * &gh;
            project(&mut cand.h);
            let decrease = gw.dot(&(&cand.w - &x.w)) + gh.dot(&(&cand.h - &x.h));
            let fc = regularized_objective(&cand, lp);
            if fc <= f + opts.armijo * decrease {
                break Some((cand, fc));
            }
            t *= opts.backtrack;
            if t < 1e-300 {
                break None;
            }
        };
        let Some((cand, fc)) = accepted else { break };

        let (ngw, ngh) = objective_gradient(&cand, lp);
        let sw = &cand.w - &x.w;
        let sh = &cand.h - &x.h;
        let ss = sw.norm_squared() + sh.norm_squared();
        let sy = sw.dot(&(&ngw - &gw)) + sh.dot(&(&ngh - &gh));
        step = if sy > 0.0 {
            (ss / sy).clamp(1e-10, 1e10)
        } else {
            (2.0 * t).min(1e10)
        };

        let rel = (f - fc).abs() / f.abs().max(f64::MIN_POSITIVE);
        x = cand;
        f = fc;
        gw = ngw;
        gh = ngh;
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(f);
        }
        if rel <= opts.rel_obj_tol {
            break;
        }
    }
    let grad_norm = projected_grad_norm(&x, &gw, &gh);
    let converged = grad_norm <= opts.tol;
    LpmSolution {
        params: x,
        objective: f,
        grad_norm,
        iterations,
        converged,
        restarts_used: 1,
    }
}

/// Best of `opts.restarts` independent descents. Restarts run in parallel;
/// ties on the objective go to the smaller projected-gradient norm, then to
/// the lower restart index.
pub fn solve_lpm(n: usize, k: usize, m: usize, lp: &LossParams, opts: &SolverOptions) -> Result<LpmSolution> {
    if n < 2 || k < 1 {
        return Err(Error::Domain(format!("need N >= 2 and K >= 1, got N={n}, K={k}")));
    }
    if m < n {
        return Err(Error::Dimension(format!("need M >= N, got M={m}, N={n}")));
    }
    if opts.restarts == 0 {
        return Err(Error::Domain("at least one restart is required".into()));
    }
    let runs: Vec<LpmSolution> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            descend(
                random_init(n, k, m, opts.init_scale, opts.seed, r as u64),
                lp,
                opts,
                None,
            )
        })
        .collect();
    let mut best = runs
        .into_iter()
        .reduce(|a, b| {
            if (b.objective, b.grad_norm) < (a.objective, a.grad_norm) {
                b
            } else {
                a
            }
        })
        .expect("restarts > 0");
    best.restarts_used = opts.restarts;
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseCheck {
    pub report: NcReport,
    pub w_rel_err: f64,
    pub h_rel_err: f64,
    pub objective_rel_err: f64,
    pub holds: bool,
}

/// Checks that a solution is collapsed (every residual `<= tol_geom`) and
/// that its norms and objective agree with `cf` to relative `tol_norm`.
pub fn verify_theorem1(sol: &LpmSolution, cf: &ClosedForm, tol_geom: f64, tol_norm: f64) -> CollapseCheck {
    let report = nc_config_report(&sol.params);
    let w_rel_err = (sol.params.w.norm() - cf.w_norm).abs() / cf.w_norm;
    let h_rel_err = (sol.params.h.norm() - cf.h_norm).abs() / cf.h_norm;
    let objective_rel_err = (sol.objective - cf.objective_at_min).abs() / cf.objective_at_min.abs();
    let holds = cf.condition_ok
        && report.accepts(tol_geom)
        && w_rel_err <= tol_norm
        && h_rel_err <= tol_norm
        && objective_rel_err <= tol_norm;
    CollapseCheck {
        report,
        w_rel_err,
        h_rel_err,
        objective_rel_err,
        holds,
    }
}

/// Wraps a fixed pair as a solution record (objective and gradient filled in).
pub fn evaluate(params: ModelParams, lp: &LossParams) -> LpmSolution {
    let objective = regularized_objective(&params, lp);
    let (gw, gh) = objective_gradient(&params, lp);
    let grad_norm = projected_grad_norm(&params, &gw, &gh);
    LpmSolution {
        params,
        objective,
        grad_norm,
        iterations: 0,
        converged: false,
        restarts_used: 0,
    }
}

/// Column sums of `W`, zero at every collapsed configuration.
pub fn weight_sum(params: &ModelParams) -> DVector<f64> {
    params.w.row_sum().transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::bilinear_term;
    use approx::assert_relative_eq;

    fn lp(alpha: f64, lw: f64, lh: f64) -> LossParams {
        LossParams::new(alpha, lw, lh).unwrap()
    }

    // mpmath, 40 digits
    #[test]
    fn closed_form_matches_high_precision_oracle() {
        let cases = [
            (
                2,
                1,
                0.0025,
                0.0025,
                0.0,
                2.6443879599824648,
                2.6443879599824648,
                0.042060124706053277,
            ),
            (
                2,
                1,
                0.0025,
                0.0025,
                0.1,
                1.9915912626782487,
                1.9915912626782487,
                0.21883122257594799,
            ),
            (
                3,
                1,
                0.0025,
                0.0025,
                0.1,
                2.7778996334385864,
                2.7778996334385864,
                0.33080831745100521,
            ),
            (
                2,
                5,
                0.00025,
                0.00025,
                0.0,
                3.2028377915693778,
                7.1617630228544315,
                0.0058364418586527177,
            ),
            (
                4,
                2,
                0.0025,
                0.001,
                0.1,
                2.7543313546873692,
                6.1588721416400415,
                0.38750721835027079,
            ),
        ];
        for (n, k, lw, lh, a, w0, h0, f0) in cases {
            let cf = closed_form_minimizer(n, k, &lp(a, lw, lh)).unwrap();
            assert_relative_eq!(cf.w_norm, w0, max_relative = 1e-13);
            assert_relative_eq!(cf.h_norm, h0, max_relative = 1e-13);
            assert_relative_eq!(cf.objective_at_min, f0, max_relative = 1e-12);
            assert!(cf.condition_ok && cf.region_consistent());
        }
    }

    #[test]
    fn loose_bound_values_and_ordering() {
        let cases = [
            (0.0, 2.3007183279846519, 0.031479065947166745),
            (0.1, 1.6863723616868464, 0.21298219731276426),
        ];
        for (a, w0, f0) in cases {
            let p = lp(a, 0.0025, 0.0025);
            let loose = loose_lower_bound(2, 1, &p).unwrap();
            assert_relative_eq!(loose.w_norm, w0, max_relative = 1e-13);
            assert_relative_eq!(loose.objective_at_min, f0, max_relative = 1e-12);
            let tight = closed_form_minimizer(2, 1, &p).unwrap();
            assert!(loose.objective_at_min < tight.objective_at_min);
        }
    }

    #[test]
    fn balance_and_beta_zero() {
        let p = lp(0.0, 0.003, 0.0007);
        let cf = closed_form_minimizer(3, 4, &p).unwrap();
        assert_eq!(cf.t0, f64::NEG_INFINITY);
        assert!(cf.bilinear_at_min().is_finite());
        assert_relative_eq!(
            p.lambda_w * cf.w_norm.powi(2),
            p.lambda_h / 4.0 * cf.h_norm.powi(2),
            max_relative = 1e-13
        );
    }

    #[test]
    fn scale_invariance_of_product() {
        let a = closed_form_minimizer(3, 2, &lp(0.1, 0.002, 0.001)).unwrap();
        let b = closed_form_minimizer(3, 2, &lp(0.1, 0.002 * 7.0, 0.001 / 7.0)).unwrap();
        assert_relative_eq!(a.w_norm * a.h_norm, b.w_norm * b.h_norm, max_relative = 1e-13);
        assert_relative_eq!(a.objective_at_min, b.objective_at_min, max_relative = 1e-13);
    }

    #[test]
    fn condition_violation_is_an_error() {
        let err = closed_form_minimizer(2, 1, &lp(0.9, 0.3, 0.3)).unwrap_err();
        assert!(matches!(err, Error::ConditionViolated { lhs } if lhs >= 1.0));
        assert!(err.to_string().contains("< 1"));
    }

    #[test]
    fn constructed_axis_example() {
        let p = construct_nc_config(2, 1, 2, 1.0, 2f64.sqrt()).unwrap();
        assert_relative_eq!(p.h, DMatrix::identity(2, 2), epsilon = 1e-15);
        let d = p.weight(1) - p.weight(0);
        assert_relative_eq!(d[0], -d[1], epsilon = 1e-15);
        assert!(d[1] > 0.0);
        assert!(construct_nc_config(3, 1, 2, 1.0, 1.0).is_err());
    }

    #[test]
    fn constructed_config_is_collapsed_and_tight() {
        for (n, k, m) in [(2, 1, 2), (3, 2, 5), (5, 3, 5), (4, 1, 9)] {
            let (wn, hn) = (1.3, 2.1);
            let p = construct_nc_config(n, k, m, wn, hn).unwrap();
            assert_relative_eq!(p.w.norm(), wn, max_relative = 1e-13);
            assert_relative_eq!(p.h.norm(), hn, max_relative = 1e-13);
            assert!(weight_sum(&p).norm() < 1e-12);
            assert!(nc_config_report(&p).accepts(1e-9), "{:?}", nc_config_report(&p));
            assert_relative_eq!(bilinear_term(&p), -bilinear_constant(n, k) * wn * hn, epsilon = 1e-9);
        }
    }

    #[test]
    fn constructed_minimizer_attains_closed_form_objective() {
        let p = lp(0.1, 0.0025, 0.0025);
        let cf = closed_form_minimizer(3, 2, &p).unwrap();
        let params = construct_nc_config(3, 2, 3, cf.w_norm, cf.h_norm).unwrap();
        assert_relative_eq!(
            regularized_objective(&params, &p),
            cf.objective_at_min,
            max_relative = 1e-12
        );
        let sol = evaluate(params, &p);
        assert!(sol.grad_norm < 1e-10, "{}", sol.grad_norm);
        assert!(verify_theorem1(&sol, &cf, 1e-6, 1e-6).holds);
    }

    #[test]
    fn negative_entry_fails_verification() {
        let p = lp(0.0, 0.0025, 0.0025);
        let cf = closed_form_minimizer(2, 1, &p).unwrap();
        let mut params = construct_nc_config(2, 1, 3, cf.w_norm, cf.h_norm).unwrap();
        params.h[(2, 0)] = -1e-3;
        let check = verify_theorem1(&evaluate(params, &p), &cf, 1e-6, 1e-2);
        assert!(!check.holds);
        assert!(check.report.negativity_dev > 0.0);
    }

    #[test]
    fn descent_is_monotone_and_feasible() {
        let p = lp(0.1, 0.0025, 0.0025);
        let opts = SolverOptions {
            max_iter: 300,
            ..Default::default()
        };
        let mut trace = Vec::new();
        let sol = descend(random_init(3, 2, 4, 0.1, 7, 0), &p, &opts, Some(&mut trace));
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(sol.params.is_feasible());
    }

    #[test]
    fn solver_reaches_closed_form() {
        for alpha in [0.0, 0.1] {
            let p = lp(alpha, 0.0025, 0.0025);
            let cf = closed_form_minimizer(2, 1, &p).unwrap();
            let sol = solve_lpm(2, 1, 2, &p, &SolverOptions::default()).unwrap();
            let check = verify_theorem1(&sol, &cf, 1e-3, 1e-2);
            assert!(check.holds, "{check:?} {sol:?}");
        }
    }

    #[test]
    fn restarts_are_deterministic() {
        let p = lp(0.1, 0.0025, 0.0025);
        let opts = SolverOptions {
            max_iter: 2000,
            seed: 11,
            ..Default::default()
        };
        let a = solve_lpm(3, 1, 3, &p, &opts).unwrap();
        let b = solve_lpm(3, 1, 3, &p, &opts).unwrap();
        assert_eq!(a, b);
    }
}
