//! One instance of the two-class memorization-dilation model: the optimal
//! dilation, the corrupted-feature optima, and the risk profile over `r`.

use ncmd::md::{f_eval, g_eval, r_max, solve_r, MdProblem, NoiseDist};
use ncmd::LossParams;

fn main() -> ncmd::Result<()> {
    let lp = LossParams::new(0.0, 1e-3, 1e-3)?;
    let p = MdProblem::from_loss(&lp, 2, 0.004, 1.0, NoiseDist::TwoPoint)?;
    let sol = solve_r(&p);
    println!("||h1 - h2|| = {:.6}, r_max = {:.6}", p.center_gap(), sol.r_max);
    println!(
        "r* = {:.6} (normalized {:.6}), risk {:.8}",
        sol.r_star, sol.normalized_dilation, sol.risk
    );
    println!("u1 = {:.6?}", sol.u1.as_slice());
    println!("u2 = {:.6?}", sol.u2.as_slice());
    println!("memorization {:.6}", sol.memorization);
    println!("C1 = {:.4e}, C2 = {:.4e}, C' = {:.4}", p.c1(), p.c2(), p.c_prime());

    println!(
        "\n{:>10} {:>14} {:>14} {:>14}",
        "r / r_max", "F(r)", "G(r)", "F + eta G"
    );
    let rm = r_max(&p);
    for i in 0..=10 {
        let r = rm * i as f64 / 10.0;
        let (f, g) = (f_eval(&p, r), g_eval(&p, r));
        println!("{:>10.1} {f:>14.8} {g:>14.8} {:>14.8}", i as f64 / 10.0, f + p.eta * g);
    }
    Ok(())
}
