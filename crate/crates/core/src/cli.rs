//! Command-line front end. Single runs write JSON, sweeps write CSV; every
//! artifact carries the resolved configuration and the crate version.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{class_stats, load_embeddings, LabelSource, ModelParams, Split};
use crate::error::{Error, Result};
use crate::losses::LossParams;
use crate::lpm::{closed_form_minimizer, loose_lower_bound, solve_lpm, verify_theorem1, SolverOptions};
use crate::md::{compare_ce_ls, r_max, solve_r, MdProblem, NoiseDist};
use crate::metrics::{memorization_report, nc1_metric, nc_config_report};
use crate::VERSION;

/// Environment variable that fixes the size of the worker pool.
pub const WORKERS_ENV: &str = "NCMD_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "ncmd", version, about = "Neural collapse and memorization-dilation solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Solve the nonnegative layer-peeled problem and compare with the closed form.
    SolveLpm(SolveLpmArgs),
    /// Score a (W, H) pair against the collapsed configuration.
    CheckNc(CheckNcArgs),
    /// Solve one two-class memorization-dilation instance.
    SolveMd(SolveMdArgs),
    /// Compare cross-entropy and label smoothing over a parameter grid.
    SweepMd(SweepMdArgs),
    /// Collapse and memorization metrics of a feature CSV.
    Metrics(MetricsArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Treat assumption violations as errors.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveLpmArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Feature dimension; defaults to N.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long)]
    pub lw: f64,
    #[arg(long)]
    pub lh: f64,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol_geom: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub tol_norm: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckNcArgs {
    /// JSON with `w`, `h` (row-major nested arrays) and `k`, or a solve-lpm artifact.
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveMdArgs {
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long)]
    pub lw: f64,
    #[arg(long)]
    pub lh: f64,
    #[arg(long)]
    pub eta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_md: f64,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// `two-point`, `circle` or `circle:<nodes>`.
    #[arg(long, default_value = "two-point")]
    pub dist: NoiseDist,
    #[arg(long, default_value_t = crate::md::R_GRID)]
    pub r_grid: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepMdArgs {
    /// Noise levels, `start:stop:step` or a single value.
    #[arg(long)]
    pub eta: Range,
    /// Smoothing parameters of the LS side.
    #[arg(long)]
    pub alpha0: Range,
    /// Weight decay used for both W and H.
    #[arg(long)]
    pub lambda: Range,
    #[arg(long, default_value = "1")]
    pub c_md: Range,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value = "two-point")]
    pub dist: NoiseDist,
    /// Also write the per-cell results as a JSON array.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MetricsArgs {
    /// Feature CSV in the embedding schema.
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long, default_value = "train")]
    pub split: Split,
    #[arg(long, default_value = "true")]
    pub labels: LabelSource,
    #[command(flatten)]
    pub common: Common,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::SolveLpm(a) => &a.common,
            Command::CheckNc(a) => &a.common,
            Command::SolveMd(a) => &a.common,
            Command::SweepMd(a) => &a.common,
            Command::Metrics(a) => &a.common,
        }
    }
}

/// Inclusive arithmetic grid `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.step == 0.0 || self.stop == self.start {
            return vec![self.start];
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        // round to 12 significant digits so 0.01 + 7 * 0.005 prints as 0.045
        (0..=n)
            .map(|i| {
                let v = self.start + self.step * i as f64;
                format!("{v:.11e}").parse().unwrap_or(v)
            })
            .collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number {t:?} in range {s:?}: {e}"))
        };
        match parts.as_slice() {
            [v] => {
                let v = num(v)?;
                Ok(Range {
                    start: v,
                    stop: v,
                    step: 0.0,
                })
            }
            [a, b, c] => {
                let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
                if step.is_nan() || step <= 0.0 || stop < start {
                    return Err(format!("range {s:?} needs step > 0 and stop >= start"));
                }
                Ok(Range { start, stop, step })
            }
            _ => Err(format!("range {s:?} must be `value` or `start:stop:step`")),
        }
    }
}

/// `(W, H, K)` with matrices as row-major nested arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub w: Vec<Vec<f64>>,
    pub h: Vec<Vec<f64>>,
    pub k: usize,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Dimension(format!("{what} has ragged rows")));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

impl From<&ModelParams> for ParamsFile {
    fn from(p: &ModelParams) -> Self {
        ParamsFile {
            w: rows_of(&p.w),
            h: rows_of(&p.h),
            k: p.k,
        }
    }
}

impl ParamsFile {
    pub fn to_params(&self) -> Result<ModelParams> {
        ModelParams::new(matrix_from_rows(&self.w, "w")?, matrix_from_rows(&self.h, "h")?, self.k)
    }
}

#[derive(Serialize)]
struct Artifact<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a Command,
    warnings: &'a [String],
    result: T,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_err(path: Option<&Path>) -> impl Fn(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source,
    }
}

fn write_json<T: Serialize>(path: Option<&Path>, config: &Command, warnings: &[String], result: T) -> Result<()> {
    let art = Artifact {
        tool: "ncmd",
        version: VERSION,
        config,
        warnings,
        result,
    };
    let text = serde_json::to_string_pretty(&art).map_err(|e| Error::Domain(format!("serialization failed: {e}")))?;
    let mut out = sink(path)?;
    writeln!(out, "{text}").and_then(|_| out.flush()).map_err(io_err(path))
}

/// Collects warnings; in strict mode the first one becomes an error.
struct Warnings {
    strict: bool,
    list: Vec<String>,
}

impl Warnings {
    fn push(&mut self, msg: String) -> Result<()> {
        if self.strict {
            return Err(Error::AssumptionViolated(msg));
        }
        eprintln!("warning: {msg}");
        self.list.push(msg);
        Ok(())
    }
}

/// Sizes the global worker pool from [`WORKERS_ENV`] when it is set.
pub fn init_workers() -> Result<()> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Domain(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")))?;
        // a pool that is already built (tests, repeated calls) is left alone
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    init_workers()?;
    let cmd = &cli.command;
    let mut warnings = Warnings {
        strict: cmd.common().strict,
        list: Vec::new(),
    };
    let out = cmd.common().output.as_deref();
    match cmd {
        Command::SolveLpm(a) => solve_lpm_cmd(cmd, a, &mut warnings, out),
        Command::CheckNc(a) => check_nc_cmd(cmd, a, &mut warnings, out),
        Command::SolveMd(a) => solve_md_cmd(cmd, a, &mut warnings, out),
        Command::SweepMd(a) => sweep_md_cmd(cmd, a, &mut warnings, out),
        Command::Metrics(a) => metrics_cmd(cmd, a, &mut warnings, out),
    }
}

#[derive(Serialize)]
struct SolutionSummary {
    objective: f64,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
    restarts_used: usize,
    w_norm: f64,
    h_norm: f64,
}

fn solve_lpm_cmd(cmd: &Command, a: &SolveLpmArgs, warnings: &mut Warnings, out: Option<&Path>) -> Result<()> {
    let lp = LossParams::new(a.alpha, a.lw, a.lh)?;
    let m = a.m.unwrap_or(a.n);
    let closed_form = match closed_form_minimizer(a.n, a.k, &lp) {
        Ok(cf) => Some(cf),
        Err(e @ Error::ConditionViolated { .. }) => {
            warnings.push(e.to_string())?;
            None
        }
        Err(e) => return Err(e),
    };
    let opts = SolverOptions {
        restarts: a.restarts,
        tol: a.tol,
        max_iter: a.max_iter,
        seed: a.seed,
        ..Default::default()
    };
    let sol = solve_lpm(a.n, a.k, m, &lp, &opts)?;
    if !sol.converged {
        warnings.push(format!(
            "solver stopped after {} iterations without converging",
            sol.iterations
        ))?;
    }
    let collapse_check = closed_form
        .as_ref()
        .map(|cf| verify_theorem1(&sol, cf, a.tol_geom, a.tol_norm));
    #[derive(Serialize)]
    struct Out {
        closed_form: Option<crate::lpm::ClosedForm>,
        loose_lower_bound: Option<f64>,
        solution: SolutionSummary,
        nc_report: crate::metrics::NcReport,
        collapse_check: Option<crate::lpm::CollapseCheck>,
        params: ParamsFile,
    }
    let result = Out {
        closed_form,
        loose_lower_bound: loose_lower_bound(a.n, a.k, &lp).ok().map(|c| c.objective_at_min),
        solution: SolutionSummary {
            objective: sol.objective,
            grad_norm: sol.grad_norm,
            iterations: sol.iterations,
            converged: sol.converged,
            restarts_used: sol.restarts_used,
            w_norm: sol.params.w.norm(),
            h_norm: sol.params.h.norm(),
        },
        nc_report: nc_config_report(&sol.params),
        collapse_check,
        params: ParamsFile::from(&sol.params),
    };
    write_json(out, cmd, &warnings.list, result)
}

fn read_params(path: &Path) -> Result<ModelParams> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        msg: e.to_string(),
    })?;
    let inner = value
        .get("result")
        .and_then(|r| r.get("params"))
        .cloned()
        .unwrap_or(value);
    let pf: ParamsFile = serde_json::from_value(inner).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        msg: e.to_string(),
    })?;
    pf.to_params()
}

fn check_nc_cmd(cmd: &Command, a: &CheckNcArgs, warnings: &mut Warnings, out: Option<&Path>) -> Result<()> {
    let params = read_params(&a.params)?;
    if !params.is_feasible() {
        warnings.push("H has negative entries".into())?;
    }
    let report = nc_config_report(&params);
    #[derive(Serialize)]
    struct Out {
        report: crate::metrics::NcReport,
        max_deviation: f64,
        accepted: bool,
    }
    let accepted = report.accepts(a.tol);
    if !accepted {
        warnings.push(format!("configuration is not collapsed at tolerance {}", a.tol))?;
    }
    write_json(
        out,
        cmd,
        &warnings.list,
        Out {
            report,
            max_deviation: report.max_deviation(),
            accepted,
        },
    )
}

#[derive(Serialize)]
struct MdOut {
    r_max: f64,
    r_star: f64,
    risk: f64,
    normalized_dilation: f64,
    memorization: f64,
    constraint_active: (bool, bool),
    u1: Vec<f64>,
    u2: Vec<f64>,
    center_gap: f64,
    c1: f64,
    c2: f64,
    c_prime: f64,
    /// `r_max (1 - C' sqrt(eta))`.
    dilation_lower_bound: f64,
}

fn solve_md_cmd(cmd: &Command, a: &SolveMdArgs, warnings: &mut Warnings, out: Option<&Path>) -> Result<()> {
    let lp = LossParams::new(a.alpha, a.lw, a.lh)?;
    let mut p = MdProblem::from_loss(&lp, a.m, a.eta, a.c_md, a.dist)?;
    p.r_grid = a.r_grid.max(2);
    let sol = solve_r(&p);
    let lower = r_max(&p) * (1.0 - p.c_prime() * a.eta.sqrt());
    if sol.r_star < lower {
        warnings.push(format!(
            "optimal dilation {} below the band lower end {lower}",
            sol.r_star
        ))?;
    }
    let result = MdOut {
        r_max: sol.r_max,
        r_star: sol.r_star,
        risk: sol.risk,
        normalized_dilation: sol.normalized_dilation,
        memorization: sol.memorization,
        constraint_active: sol.constraint_active,
        u1: sol.u1.iter().copied().collect(),
        u2: sol.u2.iter().copied().collect(),
        center_gap: p.center_gap(),
        c1: p.c1(),
        c2: p.c2(),
        c_prime: p.c_prime(),
        dilation_lower_bound: lower,
    };
    write_json(out, cmd, &warnings.list, result)
}

/// One line of the sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eta: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub c_md: f64,
    pub gamma: f64,
    pub r_star: f64,
    pub r_max: f64,
    pub normalized_dilation: f64,
    pub memorization: f64,
    pub assumption_ok: bool,
    pub theorem2_holds: bool,
}

#[derive(Serialize)]
struct Cell {
    eta: f64,
    alpha0: f64,
    lambda: f64,
    c_md: f64,
    comparison: crate::md::Comparison,
}

fn sweep_md_cmd(cmd: &Command, a: &SweepMdArgs, warnings: &mut Warnings, out: Option<&Path>) -> Result<()> {
    let mut grid = Vec::new();
    for &eta in &a.eta.values() {
        for &alpha0 in &a.alpha0.values() {
            for &lambda in &a.lambda.values() {
                for &c_md in &a.c_md.values() {
                    grid.push((eta, alpha0, lambda, c_md));
                }
            }
        }
    }
    let cells: Vec<Cell> = grid
        .par_iter()
        .map(|&(eta, alpha0, lambda, c_md)| {
            let lp_ce = LossParams::new(0.0, lambda, lambda)?;
            let lp_ls = LossParams::new(alpha0, lambda, lambda)?;
            let comparison = compare_ce_ls(&lp_ce, &lp_ls, a.m, eta, c_md, a.dist)?;
            Ok(Cell {
                eta,
                alpha0,
                lambda,
                c_md,
                comparison,
            })
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(2 * cells.len());
    for c in &cells {
        let rep = &c.comparison.report;
        if !rep.holds() {
            warnings.push(format!(
                "eta={} alpha0={} lambda={} c_md={}: assumptions fail (alpha condition {}, eta condition {})",
                c.eta, c.alpha0, c.lambda, c.c_md, rep.alpha_condition, rep.eta_condition
            ))?;
        } else if !c.comparison.theorem2_holds {
            warnings.push(format!(
                "eta={} alpha0={} lambda={} c_md={}: cross-entropy does not dilate more",
                c.eta, c.alpha0, c.lambda, c.c_md
            ))?;
        }
        for (alpha, sol) in [(0.0, &c.comparison.ce), (c.alpha0, &c.comparison.ls)] {
            rows.push(SweepRow {
                eta: c.eta,
                alpha,
                lambda: c.lambda,
                c_md: c.c_md,
                gamma: rep.gamma,
                r_star: sol.r_star,
                r_max: sol.r_max,
                normalized_dilation: sol.normalized_dilation,
                memorization: sol.memorization,
                assumption_ok: rep.holds(),
                theorem2_holds: c.comparison.theorem2_holds,
            });
        }
    }

    let config = serde_json::to_string(cmd).map_err(|e| Error::Domain(format!("serialization failed: {e}")))?;
    let mut sinkw = sink(out)?;
    writeln!(sinkw, "# ncmd {VERSION} {config}").map_err(io_err(out))?;
    {
        let mut w = csv::Writer::from_writer(&mut sinkw);
        for r in &rows {
            w.serialize(r)
                .map_err(|e| Error::Domain(format!("csv write failed: {e}")))?;
        }
        w.flush().map_err(io_err(out))?;
    }
    sinkw.flush().map_err(io_err(out))?;

    if let Some(path) = &a.json {
        write_json(Some(path), cmd, &warnings.list, &cells)?;
    }
    Ok(())
}

/// Reads a sweep CSV written by `sweep-md`, skipping the header comment.
pub fn read_sweep(reader: impl io::Read) -> Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Domain(format!("bad sweep row: {e}"))))
        .collect()
}

fn metrics_cmd(cmd: &Command, a: &MetricsArgs, warnings: &mut Warnings, out: Option<&Path>) -> Result<()> {
    let set = load_embeddings(&a.features)?;
    let nc1 = nc1_metric(&set, a.split, a.labels)?;
    let has_test = set.splits().contains(&Split::Test);
    let nc1_test = if has_test {
        Some(nc1_metric(&set, Split::Test, LabelSource::True)?)
    } else {
        None
    };
    let memorization = if set.corrupted().iter().any(|&c| c) {
        let stats = class_stats(&set, Split::Train, LabelSource::Observed)?;
        match memorization_report(&set, &stats) {
            Ok(m) => Some(m),
            Err(e @ Error::MissingTestMean { .. }) => {
                warnings.push(e.to_string())?;
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        Some(crate::metrics::MemorizationReport {
            mem: 0.0,
            n_corrupted: 0,
            mem_per_corrupted: 0.0,
        })
    };
    #[derive(Serialize)]
    struct Out {
        n_samples: usize,
        n_classes: usize,
        dim: usize,
        /// Selected split and labels; null when infinite.
        nc1: f64,
        nc1_test: Option<f64>,
        memorization: Option<crate::metrics::MemorizationReport>,
    }
    let result = Out {
        n_samples: set.len(),
        n_classes: set.n_classes(),
        dim: set.dim(),
        nc1,
        nc1_test,
        memorization,
    };
    write_json(out, cmd, &warnings.list, result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r: Range = "0.01:0.05:0.01".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 5);
        assert!((v[4] - 0.05).abs() < 1e-15);
        assert_eq!("0.3".parse::<Range>().unwrap().values(), vec![0.3]);
        assert!("1:0:0.1".parse::<Range>().is_err());
        assert!("0:1:0".parse::<Range>().is_err());
        assert!("0:1".parse::<Range>().is_err());
        assert!("a:1:0.1".parse::<Range>().is_err());
        let v = "0.01:0.05:0.005".parse::<Range>().unwrap().values();
        assert_eq!(v.len(), 9);
        assert_eq!(v[7], 0.045);
    }

    #[test]
    fn params_file_round_trip() {
        let p = crate::lpm::construct_nc_config(3, 2, 4, 1.0, 2.0).unwrap();
        let pf = ParamsFile::from(&p);
        assert_eq!(pf.w.len(), 3);
        assert_eq!(pf.h.len(), 4);
        assert_eq!(pf.to_params().unwrap(), p);
        let bad = ParamsFile {
            w: vec![vec![1.0], vec![1.0, 2.0]],
            ..pf
        };
        assert!(bad.to_params().is_err());
    }

    #[test]
    fn cli_parses_every_subcommand() {
        for argv in [
            &["ncmd", "solve-lpm", "--n", "2", "--lw", "0.0025", "--lh", "0.0025"][..],
            &["ncmd", "check-nc", "--params", "p.json", "--strict"][..],
            &[
                "ncmd",
                "solve-md",
                "--lw",
                "1e-3",
                "--lh",
                "1e-3",
                "--eta",
                "0.1",
                "--dist",
                "circle:32",
            ][..],
            &[
                "ncmd",
                "sweep-md",
                "--eta",
                "0.01:0.05:0.005",
                "--alpha0",
                "0.1",
                "--lambda",
                "2.5e-4",
            ][..],
            &[
                "ncmd",
                "metrics",
                "--features",
                "f.csv",
                "--split",
                "test",
                "--labels",
                "observed",
            ][..],
        ] {
            Cli::try_parse_from(argv).unwrap();
        }
        assert!(Cli::try_parse_from([
            "ncmd",
            "solve-lpm",
            "--n",
            "2",
            "--lw",
            "1",
            "--lh",
            "1",
            "--bogus",
            "3"
        ])
        .is_err());
    }
}
