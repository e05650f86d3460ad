//! The two spread distributions for correctly labeled features: growth of
//! one class's share of `F(r) - F(0)` against the quadratic constant `C2`.
//! The two-point law puts all of its spread along `w2 - w1` and matches `C2`
//! as `r -> 0`; the circle spreads in the plane of the centers and grows slower.

use ncmd::md::{f_eval, r_max, MdProblem, NoiseDist};
use ncmd::LossParams;

fn main() -> ncmd::Result<()> {
    let lp = LossParams::new(0.1, 1e-3, 1e-3)?;
    for dist in [NoiseDist::TwoPoint, NoiseDist::Circle { nodes: 64 }] {
        let p = MdProblem::from_loss(&lp, 3, 0.01, 1.0, dist)?;
        let rm = r_max(&p);
        let f0 = f_eval(&p, 0.0);
        println!("{dist}: C2 = {:.6e}", p.c2());
        for frac in [0.01, 0.1, 0.5, 1.0] {
            let r = frac * rm;
            // F sums two mirror-image classes
            let half = (f_eval(&p, r) - f0) / 2.0;
            println!("  r = {r:.5}  half increase / r^2 = {:.6e}", half / (r * r));
        }
    }
    Ok(())
}
