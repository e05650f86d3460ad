//! Property suites for the loss, metric, solver and memorization-dilation layers.

mod common;

use nalgebra::{DMatrix, DVector};
use ncmd::embedding::{class_stats, EmbeddingSet, LabelSource, Split};
use ncmd::losses::{
    bilinear_term, empirical_risk, objective_gradient, reformulated_risk, regularized_objective, softmax_scores,
};
use ncmd::lpm::{
    bilinear_constant, closed_form_minimizer, construct_nc_config, descend, loose_lower_bound, random_init,
    SolverOptions,
};
use ncmd::md::{f_eval, g_eval, r_max, solve_half, solve_u1, Class};
use ncmd::metrics::{memorization, nc1_metric, nc_config_report};
use ncmd::LossParams;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use common::*;

fn dims() -> impl Strategy<Value = (usize, usize, usize)> {
    (
        prop::sample::select(vec![2usize, 3, 5]),
        prop::sample::select(vec![1usize, 3]),
        0usize..4,
    )
        .prop_map(|(n, k, extra)| (n, k, n + extra))
}

/// Labelled random cloud with every class present in both splits.
fn random_set(seed: u64, n: usize, m: usize, per_class: usize, noise: f64) -> EmbeddingSet {
    let mut r = rng(seed);
    let mut labels = Vec::new();
    let mut split = Vec::new();
    for c in 0..n {
        for i in 0..per_class {
            labels.push(c);
            split.push(if i % 3 == 2 { Split::Test } else { Split::Train });
        }
    }
    let s = labels.len();
    let centers = gaussian(&mut r, n, m, 3.0);
    let jitter = gaussian(&mut r, s, m, 1.0);
    let features = DMatrix::from_fn(s, m, |i, j| centers[(labels[i], j)] + jitter[(i, j)]);
    let (observed, corrupted): (Vec<usize>, Vec<bool>) = labels
        .iter()
        .zip(&split)
        .map(|(&l, &sp)| {
            if sp == Split::Train && r.random_bool(noise) {
                (r.random_range(0..n), true)
            } else {
                (l, false)
            }
        })
        .unzip();
    EmbeddingSet::new(features, labels, observed, corrupted, split, n).unwrap()
}

fn permute(set: &EmbeddingSet, perm: &[usize]) -> EmbeddingSet {
    let f = DMatrix::from_fn(set.len(), set.dim(), |i, j| set.features()[(perm[i], j)]);
    EmbeddingSet::new(
        f,
        perm.iter().map(|&i| set.true_labels()[i]).collect(),
        perm.iter().map(|&i| set.observed_labels()[i]).collect(),
        perm.iter().map(|&i| set.corrupted()[i]).collect(),
        perm.iter().map(|&i| set.splits()[i]).collect(),
        set.n_classes(),
    )
    .unwrap()
}

fn with_corrupted(set: &EmbeddingSet, keep: impl Fn(usize) -> bool) -> EmbeddingSet {
    EmbeddingSet::new(
        set.features().clone(),
        set.true_labels().to_vec(),
        set.observed_labels().to_vec(),
        (0..set.len()).map(|i| set.corrupted()[i] && keep(i)).collect(),
        set.splits().to_vec(),
        set.n_classes(),
    )
    .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn risk_identity((n, k, m) in dims(), seed in any::<u64>(), alpha in 0.0f64..0.95, scale in 0.01f64..3.0) {
        let mut r = rng(seed);
        let params = random_params(&mut r, n, k, m, scale);
        let lp = LossParams::new(alpha, 1e-3, 1e-3).unwrap();
        let a = empirical_risk(&params, &lp);
        let b = reformulated_risk(&params, &lp);
        prop_assert!(rel(a, b) <= 1e-10, "{a} vs {b}");
    }

    #[test]
    fn gradient_matches_finite_differences((n, k, m) in dims(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let params = random_params(&mut r, n, k, m, 1.0);
        let lp = random_loss(&mut r);
        let (gw, gh) = objective_gradient(&params, &lp);
        let fw = finite_difference(&params.w, 1e-5, |w| {
            let mut p = params.clone();
            p.w = w.clone();
            regularized_objective(&p, &lp)
        });
        let fh = finite_difference(&params.h, 1e-5, |h| {
            let mut p = params.clone();
            p.h = h.clone();
            regularized_objective(&p, &lp)
        });
        prop_assert!((&gw - &fw).norm() <= 1e-4 * gw.norm().max(1e-8), "W gradient {gw} vs {fw}");
        prop_assert!((&gh - &fh).norm() <= 1e-4 * gh.norm().max(1e-8), "H gradient {gh} vs {fh}");
    }

    #[test]
    fn softmax_is_finite_for_huge_logits(logits in prop::collection::vec(-1e6f64..1e6, 2..8)) {
        let n = logits.len();
        let w = DMatrix::identity(n, n);
        let p = softmax_scores(&w, &DVector::from_vec(logits));
        prop_assert!(p.iter().all(|x| x.is_finite() && *x >= 0.0));
        prop_assert!((p.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nc1_invariant_under_rotation_and_scaling(seed in any::<u64>(), n in 2usize..5, extra in 0usize..3, s in prop::sample::select(vec![0.1, 10.0])) {
        let m = n + extra;
        let set = random_set(seed, n, m, 9, 0.0);
        let rot = random_rotation(&mut rng(seed ^ 0xabc), m);
        let moved = set.map_features(|x| x * rot.transpose() * s).unwrap();
        let a = nc1_metric(&set, Split::Train, LabelSource::True).unwrap();
        let b = nc1_metric(&moved, Split::Train, LabelSource::True).unwrap();
        prop_assert!(rel(a, b) <= 1e-8, "{a} vs {b}");
    }

    #[test]
    fn global_mean_is_mean_of_class_means(seed in any::<u64>(), n in 2usize..6, m in 1usize..5) {
        let set = random_set(seed, n, m, 6, 0.2);
        let st = class_stats(&set, Split::Train, LabelSource::Observed);
        // heavy noise can empty an observed class; that is a reported error, not a property failure
        if let Ok(st) = st {
            let mean = (0..n).map(|c| st.class_mean(c)).fold(DVector::zeros(m), |a, b| a + b) / n as f64;
            prop_assert!((mean - &st.global_mean).norm() <= 1e-12 * (1.0 + st.global_mean.norm()));
        }
    }

    #[test]
    fn memorization_additive_and_order_free(seed in any::<u64>(), n in 2usize..4) {
        let set = random_set(seed, n, 3, 12, 0.4);
        let stats = class_stats(&set, Split::Train, LabelSource::True).unwrap();
        let total = memorization(&set, &stats).unwrap();

        let mut perm: Vec<usize> = (0..set.len()).collect();
        perm.shuffle(&mut rng(seed.wrapping_add(1)));
        let shuffled = permute(&set, &perm);
        let stats_p = class_stats(&shuffled, Split::Train, LabelSource::True).unwrap();
        prop_assert!(rel(total, memorization(&shuffled, &stats_p).unwrap()) <= 1e-12);

        let even = memorization(&with_corrupted(&set, |i| i % 2 == 0), &stats).unwrap();
        let odd = memorization(&with_corrupted(&set, |i| i % 2 == 1), &stats).unwrap();
        prop_assert!((total - even - odd).abs() <= 1e-12 * total.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bilinear_lower_bound((n, k, m) in dims(), seed in any::<u64>(), scale in 0.01f64..10.0) {
        let mut r = rng(seed);
        let params = random_params(&mut r, n, k, m, scale);
        let p = bilinear_term(&params);
        let wh = params.w.norm() * params.h.norm();
        let sharp = -bilinear_constant(n, k) * wh;
        let loose = -wh / ((k * (n - 1)) as f64).sqrt();
        prop_assert!(p >= sharp - 1e-12 * wh, "P={p} below {sharp}");
        prop_assert!(p >= loose - 1e-12 * wh);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_scale_and_region(n in 2usize..6, k in 1usize..4, alpha in 0.0f64..0.5, lw in 1e-5f64..1e-3, lh in 1e-5f64..1e-3, s in 0.1f64..10.0) {
        let lp = LossParams::new(alpha, lw, lh).unwrap();
        let scaled = LossParams::new(alpha, lw * s, lh / s).unwrap();
        let (Ok(a), Ok(b)) = (closed_form_minimizer(n, k, &lp), closed_form_minimizer(n, k, &scaled)) else {
            return Ok(());
        };
        prop_assert!(a.region_consistent());
        prop_assert!(rel(a.w_norm * a.h_norm, b.w_norm * b.h_norm) <= 1e-10);
        prop_assert!(rel(a.objective_at_min, b.objective_at_min) <= 1e-10);
        // the constructed configuration attains the closed-form value and beats the loose bound
        let nc = construct_nc_config(n, k, n, a.w_norm, a.h_norm).unwrap();
        let f = regularized_objective(&nc, &lp);
        prop_assert!(rel(f, a.objective_at_min) <= 1e-9);
        if let Ok(lb) = loose_lower_bound(n, k, &lp) {
            prop_assert!(lb.objective_at_min <= f + 1e-12);
        }
        prop_assert!(nc_config_report(&nc).accepts(1e-6));
    }

    #[test]
    fn descent_is_feasible_and_monotone((n, k, m) in dims(), seed in any::<u64>(), stream in 0u64..8) {
        let mut r = rng(seed);
        let lp = random_loss(&mut r);
        let init = random_init(n, k, m, 0.1, seed, stream);
        prop_assert!(init.is_feasible());
        let opts = SolverOptions { max_iter: 400, ..Default::default() };
        let mut trace = Vec::new();
        let sol = descend(init, &lp, &opts, Some(&mut trace));
        prop_assert!(sol.params.is_feasible());
        prop_assert!(trace.windows(2).all(|w| w[1] <= w[0]), "objective increased");
        prop_assert_eq!(sol.converged, sol.grad_norm <= opts.tol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn u1_constraint_active_and_nonnegative(seed in any::<u64>(), frac in 0.0f64..1.0) {
        let p = random_md(&mut rng(seed));
        let rm = r_max(&p);
        let r = frac * rm;
        let gap = p.center_gap();
        for c in [Class::First, Class::Second] {
            let (u, _) = solve_half(&p, c, r);
            prop_assert!(u.iter().all(|&x| x >= 0.0));
            let anchor = p.center(c.other());
            let lhs = p.eta * (anchor - &u).norm();
            prop_assert!((lhs - p.c_md * r / gap).abs() <= 1e-8 * rm, "constraint slack {}", lhs - p.c_md * r / gap);
        }
    }

    #[test]
    fn g_nonincreasing_f_nondecreasing(seed in any::<u64>()) {
        let p = random_md(&mut rng(seed));
        let rm = r_max(&p);
        let rs: Vec<f64> = (0..=40).map(|i| rm * i as f64 / 40.0).collect();
        let g: Vec<f64> = rs.iter().map(|&r| g_eval(&p, r)).collect();
        let f: Vec<f64> = rs.iter().map(|&r| f_eval(&p, r)).collect();
        for i in 1..rs.len() {
            prop_assert!(g[i] <= g[i - 1] + 1e-12 * g[i - 1].abs().max(1.0), "G rose at r={}", rs[i]);
            prop_assert!(f[i] >= f[i - 1] - 1e-12 * f[i - 1].abs().max(1.0), "F fell at r={}", rs[i]);
        }
    }
}

#[test]
fn u1_matches_grid_oracle() {
    let mut r = rng(2024);
    for _ in 0..20 {
        let p = random_md(&mut r);
        let rad = r.random_range(0.05..0.99) * r_max(&p);
        let (_, v) = solve_u1(&p, rad);
        let (grid, resolution) = brute_force_u1(&p, rad, 400);
        assert!(v <= grid + 1e-12, "solver {v} worse than grid {grid}");
        assert!(
            grid - v <= resolution,
            "solver {v} too far below grid {grid} (cell {resolution})"
        );
    }
}
