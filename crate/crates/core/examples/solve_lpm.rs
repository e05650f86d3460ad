//! Projected gradient descent from random starts, checked against the closed form.
//!
//! `cargo run --release --example solve_lpm -- 4 2 0.1 1e-3`

use ncmd::lpm::{closed_form_minimizer, solve_lpm, verify_theorem1, SolverOptions};
use ncmd::LossParams;

fn main() -> ncmd::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let n: usize = arg(0, "3").parse().expect("N");
    let k: usize = arg(1, "2").parse().expect("K");
    let alpha: f64 = arg(2, "0.1").parse().expect("alpha");
    let lambda: f64 = arg(3, "1e-3").parse().expect("lambda");

    let lp = LossParams::new(alpha, lambda, lambda)?;
    let opts = SolverOptions {
        restarts: 8,
        ..Default::default()
    };
    let sol = solve_lpm(n, k, n, &lp, &opts)?;
    println!(
        "objective {:.12}  |W| {:.6}  |H| {:.6}  grad {:.2e}  iters {}  converged {}",
        sol.objective,
        sol.params.w.norm(),
        sol.params.h.norm(),
        sol.grad_norm,
        sol.iterations,
        sol.converged
    );

    let cf = closed_form_minimizer(n, k, &lp)?;
    let check = verify_theorem1(&sol, &cf, 1e-3, 1e-2);
    println!(
        "closed form {:.12}  |W| {:.6}  |H| {:.6}",
        cf.objective_at_min, cf.w_norm, cf.h_norm
    );
    println!(
        "relative errors: W {:.2e}  H {:.2e}  objective {:.2e}",
        check.w_rel_err, check.h_rel_err, check.objective_rel_err
    );
    for (name, dev) in check.report.deviations() {
        println!("  {name:<20} {dev:.3e}");
    }
    println!("collapsed configuration: {}", check.holds);
    Ok(())
}
