//! Command-line front end: config parsing, experiment orchestration and
//! result persistence.
//!
//! Every command writes into `<out>/<command>-<config hash prefix>/`, where
//! `<out>` comes from `--out`, the config file, `$RADIAL_SHOOTING_OUT`, or
//! `runs`, in that order. Exit status: 0 when every check passes, 1 on a
//! failed check, 2 on usage or configuration errors, 3 on numerical errors.

pub mod commands;
pub mod config;
pub mod output;
pub mod report;
pub mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::manifold::Family;
use config::{ClassifySpec, ExperimentConfig, SweepSpec, TraceSpec};
use output::{RunDir, DEFAULT_OUT, OUT_ENV};
use report::{counts, Check, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "radial-shooting", version, about = "Radial shooting for Lane-Emden systems on model manifolds")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML experiment config; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output root.
    #[arg(long, global = true, env = OUT_ENV)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// euclidean, hyperbolic or exp_power.
    #[arg(long, global = true)]
    pub profile: Option<String>,
    /// Curvature scale of the hyperbolic profile.
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// Exponent of the exp_power profile.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Seed of the randomized verification suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Fire one shot and evaluate its diagnostics.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
    },
    /// Trace the existence curve on a complete profile.
    Curve(TraceArgs),
    /// Trace the existence band on an incomplete profile.
    Band(TraceArgs),
    /// Classify a grid of initial data.
    Sweep {
        /// `lo,hi`
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi_range: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eta_range: Option<Vec<f64>>,
        /// `nx,ny`
        #[arg(long, value_delimiter = ',')]
        resolution: Option<Vec<usize>>,
        /// Bisection steps applied to every class change.
        #[arg(long)]
        refine: Option<usize>,
    },
    /// Run a verification suite, or `all`.
    Verify { suite: String },
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    /// Comma-separated increasing ξ values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub tol: Option<f64>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Curve(_) => "curve",
            Command::Band(_) => "band",
            Command::Sweep { .. } => "sweep",
            Command::Verify { .. } => "verify",
        }
    }
}

fn usage(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.to_string(), message: message.into() }
}

/// Loads the config file, if any, and applies the flags on top.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let g = &cli.global;
    let mut c = match &g.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(name) = &g.profile {
        c.profile.family = match name.as_str() {
            "euclidean" => Family::Euclidean,
            "hyperbolic" => Family::Hyperbolic { kappa: g.kappa.unwrap_or(1.0) },
            "exp_power" | "exp-power" => Family::ExpPower { alpha: g.alpha.unwrap_or(3.0) },
            other => return Err(usage("--profile", format!("unknown profile {other:?}"))),
        };
    }
    match (&mut c.profile.family, g.kappa, g.alpha) {
        (Family::Hyperbolic { kappa }, Some(k), _) => *kappa = k,
        (Family::ExpPower { alpha }, _, Some(a)) => *alpha = a,
        (_, None, None) => {}
        (f, _, _) => return Err(usage("--kappa/--alpha", format!("does not apply to profile {f}"))),
    }
    if let Some(n) = g.n {
        c.profile.n = n;
    }
    if let Some(p) = g.p {
        c.exponents.p = p;
    }
    if let Some(q) = g.q {
        c.exponents.q = q;
    }
    if let Some(s) = g.seed {
        c.seed = s;
    }
    if let Some(x) = g.rel_tol {
        c.integrator.rel_tol = x;
    }
    if let Some(x) = g.abs_tol {
        c.integrator.abs_tol = x;
    }
    if let Some(h) = g.horizon {
        c.integrator.horizon = Some(h);
    }
    if g.threads.is_some() {
        c.threads = g.threads;
    }
    if g.out.is_some() {
        c.output = g.out.clone();
    }
    match &cli.command {
        Command::Classify { xi, eta } => {
            let base = c.classify;
            let xi = xi.or(base.map(|b| b.xi)).ok_or_else(|| usage("classify.xi", "missing; pass --xi"))?;
            let eta = eta.or(base.map(|b| b.eta)).ok_or_else(|| usage("classify.eta", "missing; pass --eta"))?;
            c.classify = Some(ClassifySpec { xi, eta });
        }
        Command::Curve(t) | Command::Band(t) => {
            let base = c.trace.clone();
            let xi_grid = t
                .xi_grid
                .clone()
                .or(base.as_ref().map(|b| b.xi_grid.clone()))
                .ok_or_else(|| usage("trace.xi_grid", "missing; pass --xi-grid"))?;
            let tol = t.tol.or(base.map(|b| b.tol)).unwrap_or(1e-8);
            c.trace = Some(TraceSpec { xi_grid, tol });
        }
        Command::Sweep { xi_range, eta_range, resolution, refine } => {
            let base = c.sweep;
            let pair = |v: &Option<Vec<f64>>, b: Option<[f64; 2]>, name: &str| match v.as_deref() {
                Some(&[lo, hi]) => Ok([lo, hi]),
                Some(other) => Err(usage(name, format!("expected lo,hi, got {} values", other.len()))),
                None => b.ok_or_else(|| usage(name, "missing")),
            };
            c.sweep = Some(SweepSpec {
                xi_range: pair(xi_range, base.map(|b| b.xi_range), "sweep.xi_range")?,
                eta_range: pair(eta_range, base.map(|b| b.eta_range), "sweep.eta_range")?,
                resolution: match resolution.as_deref() {
                    Some(&[nx, ny]) => [nx, ny],
                    Some(other) => {
                        return Err(usage("sweep.resolution", format!("expected nx,ny, got {} values", other.len())))
                    }
                    None => base.map(|b| b.resolution).ok_or_else(|| usage("sweep.resolution", "missing"))?,
                },
                refine_steps: refine.or(base.map(|b| b.refine_steps)).unwrap_or(0),
            });
        }
        Command::Verify { .. } => {}
    }
    c.validate()?;
    Ok(c)
}

/// Output root: explicit setting, then the environment variable, then `runs`.
pub fn output_root(config: &ExperimentConfig) -> PathBuf {
    config
        .output
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. }
        | Error::InvalidInput(_)
        | Error::InvalidProfile(_)
        | Error::CompletenessMismatch(_)
        | Error::VolumeNotConvex { .. }
        | Error::Io { .. }
        | Error::Json(_) => EXIT_USAGE,
        Error::MonotonicityViolation { .. } => EXIT_CHECK_FAILED,
        _ => EXIT_NUMERICAL,
    }
}

fn run_verify(suite: &str, config: &ExperimentConfig, root: &std::path::Path) -> Result<Report, Error> {
    let names: Vec<&str> = if suite == "all" { verify::SUITES.to_vec() } else { vec![suite] };
    let mut checks: Vec<Check> = Vec::new();
    for name in names {
        checks.extend(verify::run_suite(name, config)?);
    }
    let mut run = RunDir::new(root, &format!("verify-{suite}"), config);
    run.write_json("report.json", &checks)?;
    Ok(Report::new("verify", checks, run))
}

/// Runs one parsed invocation, printing one line per check. Returns the exit status.
pub fn execute(cli: &Cli) -> i32 {
    let config = match resolve_config(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Some(t) = config.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("thread pool already initialised: {e}");
        }
    }
    let root = output_root(&config);
    let result = match &cli.command {
        Command::Classify { .. } => commands::cmd_classify(&config, &root),
        Command::Curve(_) => commands::cmd_trace(&config, &root, true),
        Command::Band(_) => commands::cmd_trace(&config, &root, false),
        Command::Sweep { .. } => commands::cmd_sweep(&config, &root),
        Command::Verify { suite } => run_verify(suite, &config, &root),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    for c in &report.checks {
        println!("{}", c.line());
    }
    let code = if report.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED };
    let path = report.run.path.clone();
    match report.run.finish(&config, counts(&report.checks), code) {
        Ok(_) => {
            let summary = if report.summary.is_empty() { String::new() } else { format!("{}; ", report.summary) };
            println!("{}: {summary}wrote {}", report.command, path.display());
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses `args` (including the program name) and runs it.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("radial-shooting").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_defaults() {
        let cli = parse(&["classify", "--profile", "hyperbolic", "--kappa", "2", "--xi", "1", "--eta", "2", "--rel-tol", "1e-9"]);
        let c = resolve_config(&cli).unwrap();
        assert_eq!(c.profile.family, Family::Hyperbolic { kappa: 2.0 });
        assert_eq!(c.integrator.rel_tol, 1e-9);
        assert_eq!(c.classify, Some(ClassifySpec { xi: 1.0, eta: 2.0 }));
    }

    #[test]
    fn negative_eta_is_a_usage_error() {
        let cli = parse(&["classify", "--xi", "1", "--eta", "-1"]);
        let err = resolve_config(&cli).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_USAGE);
        assert!(err.to_string().contains("classify.eta"));
    }

    #[test]
    fn misplaced_profile_parameter_is_rejected() {
        let cli = parse(&["classify", "--alpha", "2", "--xi", "1", "--eta", "1"]);
        assert!(resolve_config(&cli).is_err());
    }

    #[test]
    fn sweep_ranges_parse() {
        let cli = parse(&["sweep", "--xi-range", "0.5,2", "--eta-range", "0.5,2", "--resolution", "4,3"]);
        let s = resolve_config(&cli).unwrap().sweep.unwrap();
        assert_eq!((s.xi_range, s.resolution, s.refine_steps), ([0.5, 2.0], [4, 3], 0));
    }
}
