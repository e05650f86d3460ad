//! Cross-entropy against label smoothing over a grid of noise levels: the
//! normalized optimal dilation is larger for cross-entropy whenever the
//! assumptions hold.

use ncmd::md::{compare_ce_ls, NoiseDist};
use ncmd::LossParams;
use rayon::prelude::*;

fn main() -> ncmd::Result<()> {
    let lambda = 1e-3;
    let alpha0 = 0.1;
    let lp_ce = LossParams::new(0.0, lambda, lambda)?;
    let lp_ls = LossParams::new(alpha0, lambda, lambda)?;
    let etas: Vec<f64> = (1..=12).map(|i| 0.0005 * i as f64).collect();
    let rows = etas
        .par_iter()
        .map(|&eta| compare_ce_ls(&lp_ce, &lp_ls, 2, eta, 1.0, NoiseDist::TwoPoint).map(|c| (eta, c)))
        .collect::<ncmd::Result<Vec<_>>>()?;

    println!(
        "{:>8} {:>10} {:>10} {:>8} {:>11} {:>8}",
        "eta", "CE r*/gap", "LS r*/gap", "ratio", "assumptions", "CE > LS"
    );
    for (eta, c) in rows {
        println!(
            "{eta:>8.4} {:>10.6} {:>10.6} {:>8.4} {:>11} {:>8}",
            c.ce.normalized_dilation,
            c.ls.normalized_dilation,
            c.ce.normalized_dilation / c.ls.normalized_dilation,
            c.report.holds(),
            c.theorem2_holds
        );
    }
    Ok(())
}
