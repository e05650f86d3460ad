//! Closed-form minimizer of the layer-peeled problem, the configuration that
//! attains it, and the looser bound that ignores the sign constraint.

use ncmd::losses::regularized_objective;
use ncmd::lpm::{closed_form_minimizer, construct_nc_config, loose_lower_bound};
use ncmd::metrics::nc_config_report;
use ncmd::LossParams;

fn main() -> ncmd::Result<()> {
    println!(
        "{:>3} {:>3} {:>9} {:>5} {:>10} {:>10} {:>12} {:>12} {:>12}",
        "N", "K", "lambda", "alpha", "w0", "h0", "objective", "attained", "loose bound"
    );
    for (n, k) in [(2, 1), (3, 1), (4, 2), (10, 5)] {
        for lambda in [2.5e-3, 2.5e-4] {
            for alpha in [0.0, 0.1] {
                let lp = LossParams::new(alpha, lambda, lambda)?;
                let cf = match closed_form_minimizer(n, k, &lp) {
                    Ok(cf) => cf,
                    Err(e) => {
                        println!("{n:>3} {k:>3} {lambda:>9.1e} {alpha:>5}  {e}");
                        continue;
                    }
                };
                let nc = construct_nc_config(n, k, n, cf.w_norm, cf.h_norm)?;
                assert!(nc_config_report(&nc).accepts(1e-9));
                let attained = regularized_objective(&nc, &lp);
                let loose = loose_lower_bound(n, k, &lp)
                    .map(|b| b.objective_at_min)
                    .unwrap_or(f64::NAN);
                println!(
                    "{n:>3} {k:>3} {lambda:>9.1e} {alpha:>5} {:>10.6} {:>10.6} {:>12.8} {attained:>12.8} {loose:>12.8}",
                    cf.w_norm, cf.h_norm, cf.objective_at_min
                );
            }
        }
    }
    Ok(())
}
