//! One-dimensional minimization helpers.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping once the
/// bracket is shorter than `tol`. Returns the best point seen and its value.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Evaluates `f` on `n` evenly spaced points of `[a, b]` (endpoints included),
/// refines around the best grid point by golden section and returns the best
/// of the refined point and the grid.
pub fn grid_then_golden(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, n: usize, tol: f64) -> (f64, f64) {
    assert!(n >= 2, "grid needs at least two points");
    if a == b {
        return (a, f(a));
    }
    let step = (b - a) / (n - 1) as f64;
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..n {
        let x = if i == n - 1 { b } else { a + step * i as f64 };
        let v = f(x);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let x_best = if best_i == n - 1 { b } else { a + step * best_i as f64 };
    let lo = (x_best - step).max(a);
    let hi = (x_best + step).min(b);
    let (x, v) = golden_section(&mut f, lo, hi, tol);
    if v < best {
        (x, v)
    } else {
        (x_best, best)
    }
}
