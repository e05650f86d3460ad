//! Two-class memorization-dilation model.
//!
//! The weights `W` and class centers `h1, h2` are frozen at a collapsed
//! minimizer. Correctly labeled features are spread around the centers by a
//! centered distribution of scale `r` (the dilation, cost `F`); the corrupted
//! features `u1, u2` want to sit at their observed class centers (cost `G`)
//! but may only move away from their true class center by an amount
//! proportional to `r`:
//!
//! `eta ||h2 - u1|| <= C_MD r / ||h1 - h2||`, and symmetrically for `u2`.
//!
//! The risk `F(r) + eta G(r)` is minimized over `r in [0, r_max]`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::embedding::ModelParams;
use crate::error::{Error, Result};
use crate::losses::{softplus, LossParams};
use crate::lpm::{closed_form_minimizer, construct_nc_config};
use crate::optim::grid_then_golden;

/// Points in the coarse angle scan of the constrained subproblem.
pub const ANGLE_GRID: usize = 512;
/// Default points in the coarse dilation scan.
pub const R_GRID: usize = 256;

/// Law of the within-class spread `v` around each center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseDist {
    /// `v = +-r u` with equal mass, `u` the unit vector along `w2 - w1`.
    #[default]
    TwoPoint,
    /// `nodes` equally spaced points on the circle of radius `r` in the plane
    /// of the class centers.
    Circle { nodes: usize },
}

impl NoiseDist {
    /// Constant `A` with `||v|| <= A r` on the support.
    pub fn support_bound(&self) -> f64 {
        1.0
    }
}

impl fmt::Display for NoiseDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseDist::TwoPoint => write!(f, "two-point"),
            NoiseDist::Circle { nodes } => write!(f, "circle:{nodes}"),
        }
    }
}

impl FromStr for NoiseDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-point" => Ok(NoiseDist::TwoPoint),
            "circle" => Ok(NoiseDist::Circle { nodes: 64 }),
            _ => {
                let nodes = s
                    .strip_prefix("circle:")
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n >= 3)
                    .ok_or_else(|| Error::Domain(format!("unknown noise distribution {s:?}")))?;
                Ok(NoiseDist::Circle { nodes })
            }
        }
    }
}

/// Class index in the two-class model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    First,
    Second,
}

impl Class {
    fn idx(self) -> usize {
        match self {
            Class::First => 0,
            Class::Second => 1,
        }
    }

    pub fn other(self) -> Class {
        match self {
            Class::First => Class::Second,
            Class::Second => Class::First,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdProblem {
    pub nc: ModelParams,
    pub eta: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub c_md: f64,
    pub noise_dist: NoiseDist,
    /// Coarse grid size for the dilation search.
    pub r_grid: usize,
}

impl MdProblem {
    /// Validates a frozen two-class configuration.
    pub fn new(nc: ModelParams, eta: f64, alpha: f64, lambda: f64, c_md: f64, noise_dist: NoiseDist) -> Result<Self> {
        if nc.n != 2 || nc.k != 1 {
            return Err(Error::Dimension(format!(
                "need N = 2 and K = 1, got N={}, K={}",
                nc.n, nc.k
            )));
        }
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::Domain(format!("eta must lie in (0,1), got {eta}")));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Domain(format!("alpha must lie in [0,1), got {alpha}")));
        }
        if !(lambda > 0.0 && c_md > 0.0) {
            return Err(Error::Domain(format!(
                "lambda and c_md must be positive, got {lambda}, {c_md}"
            )));
        }
        if !nc.is_feasible() {
            return Err(Error::Domain("class centers must be entrywise nonnegative".into()));
        }
        let (h1, h2) = (nc.feature(0, 0), nc.feature(1, 0));
        let scale = h1.norm().max(h2.norm());
        if scale == 0.0 || (h1.norm() - h2.norm()).abs() > 1e-9 * scale || h1.dot(&h2).abs() > 1e-9 * scale * scale {
            return Err(Error::Domain(
                "class centers must be nonzero, orthogonal and of equal norm".into(),
            ));
        }
        Ok(Self {
            nc,
            eta,
            alpha,
            lambda,
            c_md,
            noise_dist,
            r_grid: R_GRID,
        })
    }

    /// Freezes the collapsed minimizer of
    /// `l(h1) + l(h2) + lambda_W ||W||^2 + lambda_H ||H||^2`, which is the
    /// layer-peeled problem with `N = 2, K = 1` at halved weight decays, and
    /// uses `lambda = lambda_H` in `F` and `G`.
    pub fn from_loss(lp: &LossParams, m: usize, eta: f64, c_md: f64, noise_dist: NoiseDist) -> Result<Self> {
        let halved = LossParams::new(lp.alpha, lp.lambda_w / 2.0, lp.lambda_h / 2.0)?;
        let cf = closed_form_minimizer(2, 1, &halved)?;
        let nc = construct_nc_config(2, 1, m, cf.w_norm, cf.h_norm)?;
        Self::new(nc, eta, lp.alpha, lp.lambda_h, c_md, noise_dist)
    }

    pub fn center(&self, c: Class) -> DVector<f64> {
        self.nc.feature(c.idx(), 0)
    }

    pub fn weight(&self, c: Class) -> DVector<f64> {
        self.nc.weight(c.idx())
    }

    /// `||h1 - h2||`.
    pub fn center_gap(&self) -> f64 {
        (self.center(Class::First) - self.center(Class::Second)).norm()
    }

    /// Radius of the feasible ball around the other class center.
    pub fn radius(&self, r: f64) -> f64 {
        self.c_md * r / (self.eta * self.center_gap())
    }

    /// Loss of a feature `u` labeled `c`, plus `lambda ||u||^2`.
    pub fn sample_cost(&self, c: Class, u: &DVector<f64>) -> f64 {
        let d = (self.weight(c.other()) - self.weight(c)).dot(u);
        softplus(d) - 0.5 * self.alpha * d + self.lambda * u.norm_squared()
    }

    /// `A sqrt(2) ||h1 - h2|| / C_MD`.
    pub fn c_prime(&self) -> f64 {
        self.noise_dist.support_bound() * 2f64.sqrt() * self.center_gap() / self.c_md
    }

    /// `<w2 - w1, h1>`, the logit gap at the first center.
    fn logit_gap(&self) -> f64 {
        (self.weight(Class::Second) - self.weight(Class::First)).dot(&self.center(Class::First))
    }

    fn curvature(&self) -> f64 {
        let s = self.logit_gap();
        let dw2 = (self.weight(Class::Second) - self.weight(Class::First)).norm_squared();
        // e^s / (1 + e^s)^2 written to stay finite for large |s|
        let sig = 1.0 / (1.0 + (-s).exp());
        sig * (1.0 - sig) * dw2 / 2.0
    }

    /// Quadratic growth constant of `G` below `r_max`.
    pub fn c1(&self) -> f64 {
        let gap = self.center_gap();
        (self.curvature() + 2.0 * self.lambda) * self.c_md * self.c_md / (gap * gap)
    }

    /// Quadratic growth constant of `F` near zero.
    pub fn c2(&self) -> f64 {
        let a = self.noise_dist.support_bound();
        a * a * (self.curvature() + self.lambda)
    }
}

/// `eta ||h1 - h2||^2 / C_MD`: beyond this dilation the corrupted features
/// reach their observed class centers.
pub fn r_max(p: &MdProblem) -> f64 {
    let gap = p.center_gap();
    p.eta * gap * gap / p.c_md
}

/// Minimizer of the cost of a feature labeled `c` constrained to the ball
/// around the other center, and its cost.
///
/// Below `r_max` the minimizer lies on the circle where the ball meets the
/// plane of the centers; the polar angle is scanned on the nonnegative arc
/// and refined by golden section.
pub fn solve_half(p: &MdProblem, c: Class, r: f64) -> (DVector<f64>, f64) {
    let target = p.center(c);
    if r >= r_max(p) {
        let v = p.sample_cost(c, &target);
        return (target, v);
    }
    let anchor = p.center(c.other());
    let b = anchor.norm();
    let e_a = &target / target.norm();
    let e_b = &anchor / b;
    let dw = p.weight(c.other()) - p.weight(c);
    let (da, db) = (dw.dot(&e_a), dw.dot(&e_b));
    let radius = p.radius(r);
    let cost = |phi: f64| {
        let (x, y) = (radius * phi.cos(), b + radius * phi.sin());
        let d = da * x + db * y;
        softplus(d) - 0.5 * p.alpha * d + p.lambda * (x * x + y * y)
    };
    let lo = if radius > 0.0 {
        -(b / radius).min(1.0).asin()
    } else {
        -FRAC_PI_2
    };
    let hi = FRAC_PI_2;
    let (mut phi, mut val) = grid_then_golden(cost, lo, hi, ANGLE_GRID, 1e-13);
    for end in [lo, hi] {
        let v = cost(end);
        if v < val {
            phi = end;
            val = v;
        }
    }
    // cos and the y offset are clamped at the arc ends
    let x = (radius * phi.cos()).max(0.0);
    let y = (b + radius * phi.sin()).max(0.0);
    let u = e_a * x + e_b * y;
    let v = p.sample_cost(c, &u);
    (u, v)
}

/// Constrained optimum for the corrupted feature labeled as class 1, with its
/// cost `g(u1)`.
pub fn solve_u1(p: &MdProblem, r: f64) -> (DVector<f64>, f64) {
    solve_half(p, Class::First, r)
}

/// `G(r)`: both constrained subproblems at their optima.
pub fn g_eval(p: &MdProblem, r: f64) -> f64 {
    solve_half(p, Class::First, r).1 + solve_half(p, Class::Second, r).1
}

/// Nodes and weights of the spread distribution at scale `r`.
pub fn noise_support(p: &MdProblem, r: f64) -> Vec<(DVector<f64>, f64)> {
    match p.noise_dist {
        NoiseDist::TwoPoint => {
            let dw = p.weight(Class::Second) - p.weight(Class::First);
            let u = &dw / dw.norm();
            vec![(&u * r, 0.5), (&u * -r, 0.5)]
        }
        NoiseDist::Circle { nodes } => {
            let h1 = p.center(Class::First);
            let h2 = p.center(Class::Second);
            let e1 = &h1 / h1.norm();
            let e2 = &h2 / h2.norm();
            (0..nodes)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / nodes as f64;
                    (&e1 * (r * t.cos()) + &e2 * (r * t.sin()), 1.0 / nodes as f64)
                })
                .collect()
        }
    }
}

/// `F(r)`: expected cost of correctly labeled features spread around both centers.
pub fn f_eval(p: &MdProblem, r: f64) -> f64 {
    let support = noise_support(p, r);
    [Class::First, Class::Second]
        .iter()
        .map(|&c| {
            let h = p.center(c);
            support
                .iter()
                .map(|(v, w)| w * p.sample_cost(c, &(&h + v)))
                .sum::<f64>()
        })
        .sum()
}

pub fn md_risk(p: &MdProblem, r: f64) -> f64 {
    f_eval(p, r) + p.eta * g_eval(p, r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdSolution {
    pub u1: DVector<f64>,
    pub u2: DVector<f64>,
    pub r_star: f64,
    pub r_max: f64,
    pub risk: f64,
    /// Whether each ball constraint binds at `r_star`.
    pub constraint_active: (bool, bool),
    /// `r_star / ||h1 - h2||`.
    pub normalized_dilation: f64,
    /// `eta ||h2 - u1|| + eta ||h1 - u2||`.
    pub memorization: f64,
}

/// Optimal dilation: coarse scan of `[0, r_max]` followed by golden section
/// to `1e-9 r_max`.
pub fn solve_r(p: &MdProblem) -> MdSolution {
    let rm = r_max(p);
    let (r_star, risk) = grid_then_golden(|r| md_risk(p, r), 0.0, rm, p.r_grid, 1e-9 * rm);
    let (u1, _) = solve_half(p, Class::First, r_star);
    let (u2, _) = solve_half(p, Class::Second, r_star);
    let memorization = p.eta * ((p.center(Class::Second) - &u1).norm() + (p.center(Class::First) - &u2).norm());
    MdSolution {
        u1,
        u2,
        r_star,
        r_max: rm,
        risk,
        constraint_active: (r_star < rm, r_star < rm),
        normalized_dilation: r_star / p.center_gap(),
        memorization,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// `||H_CE|| / ||H_LS||`.
    pub gamma: f64,
    /// `C_MD / (sqrt(2) ||h1_CE - h2_CE||)`.
    pub c_tilde: f64,
    /// `alpha_0 > 4 sqrt(lambda_W lambda_H)`.
    pub alpha_condition: bool,
    /// `sqrt(eta) < c_tilde (1 - 1/gamma)`.
    pub eta_condition: bool,
    /// `A sqrt(2) ||h1 - h2|| / C_MD` for the cross-entropy problem.
    pub c_prime: f64,
    /// The same constant for the smoothed problem.
    pub c_prime_ls: f64,
}

impl AssumptionReport {
    pub fn holds(&self) -> bool {
        self.alpha_condition && self.eta_condition
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub report: AssumptionReport,
    pub ce: MdSolution,
    pub ls: MdSolution,
    /// Cross-entropy dilates strictly more than label smoothing, after
    /// normalizing by the center gap.
    pub theorem2_holds: bool,
}

/// Solves the model for plain cross-entropy and for label smoothing and
/// compares their normalized dilations. Assumption violations are reported,
/// not raised.
pub fn compare_ce_ls(
    lp_ce: &LossParams,
    lp_ls: &LossParams,
    m: usize,
    eta: f64,
    c_md: f64,
    dist: NoiseDist,
) -> Result<Comparison> {
    if lp_ce.alpha != 0.0 {
        return Err(Error::Domain(format!(
            "cross-entropy problem needs alpha = 0, got {}",
            lp_ce.alpha
        )));
    }
    let p_ce = MdProblem::from_loss(lp_ce, m, eta, c_md, dist)?;
    let p_ls = MdProblem::from_loss(lp_ls, m, eta, c_md, dist)?;
    let gamma = p_ce.nc.h.norm() / p_ls.nc.h.norm();
    let c_tilde = c_md / (2f64.sqrt() * p_ce.center_gap());
    let report = AssumptionReport {
        gamma,
        c_tilde,
        alpha_condition: lp_ls.alpha > 4.0 * (lp_ls.lambda_w * lp_ls.lambda_h).sqrt(),
        eta_condition: eta.sqrt() < c_tilde * (1.0 - 1.0 / gamma),
        c_prime: p_ce.c_prime(),
        c_prime_ls: p_ls.c_prime(),
    };
    let (ce, ls) = rayon::join(|| solve_r(&p_ce), || solve_r(&p_ls));
    let theorem2_holds = ce.normalized_dilation > ls.normalized_dilation;
    Ok(Comparison {
        report,
        ce,
        ls,
        theorem2_holds,
    })
}
