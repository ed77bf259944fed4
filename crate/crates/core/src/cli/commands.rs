use std::collections::HashMap;
use std::path::Path;
use std::sync::mpsc;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::output::{num, opt_num, read_rows, CsvTable, PartialWriter, RunDir};
use super::report::{Check, Report};
use crate::diagnostics::{
    abs_bound, abs_bound_check, energy_ledger, identity_residuals, pohozaev_scan, product_statistic,
    satisfies_feasibility, PohozaevSummary,
};
use crate::error::{Error, Result};
use crate::manifold::Family;
use crate::shooting::{ExponentPair, OutcomeKind, Recording, Regime, ShotOutcome, Shooter};
use crate::solver::{
    classify_cell, curve_trace_report, fit_power_law, grid_axis, grid_points, refine_boundaries, Cell, CellClass,
    Classifier, ExistenceResult, TraceReport,
};

/// Largest `ln ψ^{n-1}` at which energy integrals are still tabulated.
const ENERGY_LN_VOLUME: f64 = 690.0;

pub const POHOZAEV_TOL: f64 = 1e-8;
pub const EQUALITY_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-8;
/// Other component at a first zero, relative to its initial value.
pub const SIMULTANEOUS_ZERO_RATIO: f64 = 1e-6;

#[derive(Debug, Serialize)]
struct ClassifyVerdict<'a> {
    outcome: &'static str,
    kind: &'a OutcomeKind,
    global_proxy: bool,
    reach: f64,
    steps: usize,
    pohozaev_max: f64,
    pohozaev_max_abs: f64,
    product_statistic_min: Option<f64>,
    checks: &'a [Check],
}

/// Checks that hold along every shot: simultaneous zeros and the Pohozaev sign.
pub fn shot_checks(shooter: &Shooter, out: &ShotOutcome) -> Result<(Vec<Check>, Option<PohozaevSummary>)> {
    let mut checks = Vec::new();
    let (xi, eta) = (out.xi, out.eta);
    match out.kind {
        OutcomeKind::FirstZeroU { v_at_r, .. } => checks.push(Check::at_least(
            "no_simultaneous_zero",
            v_at_r / eta,
            SIMULTANEOUS_ZERO_RATIO,
        )),
        OutcomeKind::FirstZeroV { u_at_r, .. } => checks.push(Check::at_least(
            "no_simultaneous_zero",
            u_at_r / xi,
            SIMULTANEOUS_ZERO_RATIO,
        )),
        OutcomeKind::PositiveToHorizon { .. } => {}
    }
    let exps = &shooter.exps;
    let convex = exps.p * exps.q > 1.0 && shooter.profile.check_volume_convexity(exps)?.is_convex();
    let scan = pohozaev_scan(&out.trajectory, &shooter.profile, exps)?;
    let summary = PohozaevSummary::from_samples(&scan);
    if exps.is_critical_supercritical() && convex {
        checks.push(Check::at_most("pohozaev_nonpositive", summary.max_normalized, POHOZAEV_TOL));
        checks.push(Check::at_most("pohozaev_nonincreasing", summary.max_normalized_increment, POHOZAEV_TOL));
    } else {
        checks.push(Check::skipped("pohozaev_nonpositive", "needs critical-supercritical exponents and a convex volume function"));
    }
    if shooter.profile.family == Some(Family::Euclidean) && exps.regime == Regime::Critical {
        checks.push(Check::at_most("pohozaev_equality", summary.max_abs_pohozaev, EQUALITY_TOL));
    }
    if out.trajectory.is_dense() {
        let res = identity_residuals(&out.trajectory, &shooter.profile, exps, &scan)?;
        checks.push(Check::at_most("derivative_identities", res.energy.max(res.pohozaev), IDENTITY_TOL));
    }
    Ok((checks, Some(summary)))
}

pub fn cmd_classify(config: &ExperimentConfig, root: &Path) -> Result<Report> {
    let spec = config.classify.ok_or_else(|| Error::config("classify", "needs xi and eta"))?;
    let shooter = config.shooter()?;
    let exps = shooter.exps;
    let out = shooter.shoot(spec.xi, spec.eta)?;
    let (mut checks, summary) = shot_checks(&shooter, &out)?;
    let summary = summary.expect("scan");

    let scan = pohozaev_scan(&out.trajectory, &shooter.profile, &exps)?;
    let k = (shooter.profile.n - 1) as f64;
    let radii: Vec<f64> = out
        .trajectory
        .samples
        .iter()
        .map(|s| s.r)
        .filter(|&r| r > 0.0 && k * shooter.profile.warp.ln_psi(r) < ENERGY_LN_VOLUME)
        .collect();
    let ledger = if out.trajectory.is_dense() {
        let l = energy_ledger(&out.trajectory, &shooter.profile, &exps, &radii)?;
        checks.push(Check::at_most("energy_identities", l.max_residual(), IDENTITY_TOL));
        Some(l)
    } else {
        None
    };
    if let OutcomeKind::PositiveToHorizon { limit_u, limit_v, .. } = out.kind {
        if let (Some(theta), true) = (shooter.summary.theta(), out.global_proxy) {
            let bound = abs_bound_check((&limit_u, &limit_v), &exps, theta);
            let (bu, bv) = abs_bound(&exps, theta);
            checks.push(Check::at_most("abs_bound", (limit_u.upper / bu).max(limit_v.upper / bv), 1.0));
            debug_assert_eq!(bound.is_satisfied(), (limit_u.upper <= bu && limit_v.upper <= bv));
            checks.push(Check::flag(
                "feasibility",
                satisfies_feasibility(spec.xi, spec.eta, theta, &exps),
                "ξ ≥ θ(η - θξ^p)_+^q and η ≥ θ(ξ - θη^q)_+^p",
            ));
        }
    }

    let mut table = CsvTable::new("trajectory", &["r", "u", "v", "du", "dv", "F", "P", "K", "I_mixed", "I_u", "I_v"])
        .meta("profile", &shooter.profile.name)
        .meta("n", shooter.profile.n)
        .meta("p", exps.p)
        .meta("q", exps.q)
        .meta("xi", spec.xi)
        .meta("eta", spec.eta)
        .meta("outcome", out.kind.label())
        .meta("config_hash", config.hash());
    let energies: HashMap<u64, (f64, f64, f64)> = ledger
        .iter()
        .flat_map(|l| l.checkpoints.iter())
        .map(|c| (c.r.to_bits(), (c.i_mixed, c.i_u, c.i_v)))
        .collect();
    for (s, d) in out.trajectory.samples.iter().zip(&scan) {
        let e = energies.get(&s.r.to_bits()).copied();
        let zero = (s.r == 0.0).then_some((0.0, 0.0, 0.0));
        let e = e.or(zero);
        table.push(vec![
            num(s.r),
            num(s.u),
            num(s.v),
            num(s.du),
            num(s.dv),
            num(d.energy),
            num(d.pohozaev),
            num(d.kernel),
            opt_num(e.map(|x| x.0)),
            opt_num(e.map(|x| x.1)),
            opt_num(e.map(|x| x.2)),
        ]);
    }

    let stat_min = product_statistic(&out, &shooter).into_iter().filter_map(|(_, s)| s).reduce(f64::min);
    let mut run = RunDir::new(root, "classify", config);
    run.write("trajectory.csv", &table.render()?)?;
    if let Some(tail) = &out.tail {
        let mut t = CsvTable::new("tail", &["r", "u", "v"])
            .meta("start", tail.start)
            .meta("correction_u", tail.correction.0)
            .meta("correction_v", tail.correction.1)
            .meta("theta_tail_end", tail.theta_tail_end);
        for &(r, u, v) in &tail.samples {
            t.push(vec![num(r), num(u), num(v)]);
        }
        run.write("tail.csv", &t.render()?)?;
    }
    let verdict = ClassifyVerdict {
        outcome: out.kind.label(),
        kind: &out.kind,
        global_proxy: out.global_proxy,
        reach: out.reach(),
        steps: out.steps,
        pohozaev_max: summary.max_pohozaev,
        pohozaev_max_abs: summary.max_abs_pohozaev,
        product_statistic_min: stat_min,
        checks: &checks,
    };
    run.write_json("verdict.json", &verdict)?;
    Ok(Report::new("classify", checks, run).with_summary(format!("outcome {}", out.kind.label())))
}

pub fn cmd_trace(config: &ExperimentConfig, root: &Path, want_complete: bool) -> Result<Report> {
    let command = if want_complete { "curve" } else { "band" };
    let spec = config.trace.clone().ok_or_else(|| Error::config("trace", "needs xi_grid"))?;
    let shooter = config.shooter()?;
    if shooter.is_complete() != want_complete {
        return Err(Error::CompletenessMismatch(if want_complete {
            format!(
                "profile {} is stochastically incomplete; use band (a single existence curve needs a complete model)",
                shooter.profile.name
            )
        } else {
            format!(
                "profile {} is stochastically complete; use curve (an existence band needs an incomplete model)",
                shooter.profile.name
            )
        }));
    }
    let report = curve_trace_report(&shooter, &spec.xi_grid, spec.tol)?;
    let mut checks = Vec::new();
    checks.push(match &report.monotonicity {
        None => Check::flag("monotonicity", true, "η increases with ξ"),
        Some(msg) => Check::flag("monotonicity", false, msg),
    });
    for f in &report.failures {
        checks.push(Check::flag(&format!("point_xi_{}", f.xi), false, &f.error));
    }
    let table = match &report.result {
        ExistenceResult::Curve(points) => {
            let mut t = CsvTable::new(
                "curve",
                &["xi", "eta", "bracket_width", "eta_low", "eta_high", "witness_class", "witness_reach", "shots", "status"],
            );
            for p in points {
                t.push(vec![
                    num(p.xi),
                    num(p.eta),
                    num(p.bracket_width),
                    num(p.eta_low),
                    num(p.eta_high),
                    p.witness.class.label().into(),
                    num(p.witness.reach),
                    p.shots.to_string(),
                    "ok".into(),
                ]);
            }
            let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.xi, p.eta)).collect();
            if let (Some((k, c)), Some(Family::Euclidean)) = (fit_power_law(&pts), shooter.profile.family) {
                let expected = (shooter.exps.p + 1.0) / (shooter.exps.q + 1.0);
                if shooter.exps.regime == Regime::Critical {
                    checks.push(Check::within("scaling_exponent", k, expected, 1e-3));
                }
                checks.push(Check::info("scaling_constant", c, "fitted c in η = c ξ^((p+1)/(q+1))"));
            }
            t
        }
        ExistenceResult::Band(points) => {
            let mut t = CsvTable::new(
                "band",
                &[
                    "xi",
                    "eta_m",
                    "eta_M",
                    "width_m",
                    "width_M",
                    "gap",
                    "feasibility_upper",
                    "abs_bound",
                    "signature_lower",
                    "signature_middle",
                    "signature_upper",
                    "shots",
                    "status",
                ],
            );
            for p in points {
                let (_, bv) = abs_bound(&shooter.exps, p.theta);
                t.push(vec![
                    num(p.xi),
                    num(p.eta_min),
                    num(p.eta_max),
                    num(p.width_min),
                    num(p.width_max),
                    num(p.gap()),
                    num(p.feasibility_upper),
                    num(bv),
                    p.signatures.lower.to_string(),
                    p.signatures.middle.to_string(),
                    p.signatures.upper.to_string(),
                    p.shots.to_string(),
                    "ok".into(),
                ]);
                checks.extend(band_checks(p, &shooter.exps, spec.tol));
            }
            t
        }
    };
    let mut table = table
        .meta("profile", &shooter.profile.name)
        .meta("n", shooter.profile.n)
        .meta("p", shooter.exps.p)
        .meta("q", shooter.exps.q)
        .meta("tol", spec.tol)
        .meta("config_hash", config.hash());
    for f in &report.failures {
        let mut row = vec![num(f.xi)];
        row.resize(table_width(&report) - 1, String::new());
        row.push(f.error.clone());
        table.push(row);
    }
    let mut run = RunDir::new(root, command, config);
    run.write("points.csv", &table.render()?)?;
    run.write_json("points.json", &report)?;
    Ok(Report::new(command, checks, run).with_summary(format!("{} points", report.result.len())))
}

fn table_width(report: &TraceReport) -> usize {
    match report.result {
        ExistenceResult::Curve(_) => 9,
        ExistenceResult::Band(_) => 13,
    }
}

/// Structural checks on one band point.
pub fn band_checks(p: &crate::solver::BandPoint, exps: &ExponentPair, tol: f64) -> Vec<Check> {
    let tag = |s: &str| format!("{s}_xi_{}", p.xi);
    let (_, bv) = abs_bound(exps, p.theta);
    vec![
        Check::at_least(&tag("band_gap"), p.gap(), 10.0 * tol),
        Check::at_most(&tag("gap_abs_bound"), p.gap(), bv),
        Check::at_most(&tag("feasibility_upper"), p.eta_max, p.feasibility_upper),
        Check::flag(&tag("signature_lower"), p.signatures.lower, "ℓ_u > 0, ℓ_v = 0 at η_m"),
        Check::flag(&tag("signature_middle"), p.signatures.middle, "ℓ_u, ℓ_v > 0 inside the band"),
        Check::flag(&tag("signature_upper"), p.signatures.upper, "ℓ_u = 0, ℓ_v > 0 at η_M"),
    ]
}

const REGION_COLUMNS: [&str; 11] = [
    "xi",
    "eta",
    "class",
    "horizon",
    "lu_lower",
    "lu_upper",
    "lu_vanishes",
    "lv_lower",
    "lv_upper",
    "lv_vanishes",
    "status",
];

fn cell_row(c: &Cell) -> Vec<String> {
    let enc = |e: &Option<crate::diagnostics::LimitEnclosure>| match e {
        Some(e) => [num(e.lower), num(e.upper), e.vanishes.to_string()],
        None => [String::new(), String::new(), String::new()],
    };
    let [a, b, c3] = enc(&c.limit_u);
    let [d, e, f] = enc(&c.limit_v);
    vec![num(c.xi), num(c.eta), c.class.label().into(), num(c.horizon), a, b, c3, d, e, f, c.status.clone()]
}

fn row_cell(r: &csv::StringRecord) -> Option<Cell> {
    let f = |i: usize| r.get(i).and_then(|s| s.parse::<f64>().ok());
    let enc = |i: usize| {
        Some(crate::diagnostics::LimitEnclosure { lower: f(i)?, upper: f(i + 1)?, vanishes: r.get(i + 2)? == "true" })
    };
    Some(Cell {
        xi: f(0)?,
        eta: f(1)?,
        class: CellClass::parse(r.get(2)?)?,
        horizon: f(3)?,
        limit_u: enc(4),
        limit_v: enc(7),
        status: r.get(10)?.to_string(),
    })
}

/// Sweeps the configured grid. Finished cells stream into
/// `region.partial.csv`; a rerun with the same config skips them.
pub fn cmd_sweep(config: &ExperimentConfig, root: &Path) -> Result<Report> {
    let spec = config.sweep.ok_or_else(|| Error::config("sweep", "needs xi_range, eta_range and resolution"))?;
    let shooter = config.shooter()?;
    let classifier = Classifier::new(&shooter);
    let xi = grid_axis(spec.xi_range[0], spec.xi_range[1], spec.resolution[0]);
    let eta = grid_axis(spec.eta_range[0], spec.eta_range[1], spec.resolution[1]);
    let points = grid_points(&xi, &eta);

    let mut run = RunDir::new(root, "sweep", config);
    std::fs::create_dir_all(&run.path).map_err(|e| Error::io(&run.path, e))?;
    let header = CsvTable::new("region", &REGION_COLUMNS)
        .meta("profile", &shooter.profile.name)
        .meta("n", shooter.profile.n)
        .meta("p", shooter.exps.p)
        .meta("q", shooter.exps.q)
        .meta("resolution", format!("{}x{}", spec.resolution[0], spec.resolution[1]))
        .meta("config_hash", config.hash());

    let mut done: HashMap<(u64, u64), Cell> = HashMap::new();
    for name in ["region.csv", "region.partial.csv"] {
        let path = run.file(name);
        if path.exists() {
            for r in read_rows(&path)? {
                if let Some(c) = row_cell(&r) {
                    done.insert((c.xi.to_bits(), c.eta.to_bits()), c);
                }
            }
        }
    }
    let todo: Vec<(f64, f64)> =
        points.iter().copied().filter(|(x, e)| !done.contains_key(&(x.to_bits(), e.to_bits()))).collect();
    let resumed = points.len() - todo.len();
    if resumed > 0 {
        log::info!("resuming sweep: {resumed} of {} cells already classified", points.len());
    }

    if !todo.is_empty() {
        let partial_path = run.file("region.partial.csv");
        let mut header_text = header.preamble();
        header_text.push_str(&REGION_COLUMNS.join(","));
        header_text.push('\n');
        let mut writer = PartialWriter::open(&partial_path, &header_text)?;
        let (tx, rx) = mpsc::channel::<Cell>();
        let fresh = std::thread::scope(|scope| -> Result<Vec<Cell>> {
            let handle = scope.spawn(move || -> Result<Vec<Cell>> {
                let mut got = Vec::new();
                for c in rx {
                    writer.append(&cell_row(&c))?;
                    got.push(c);
                }
                Ok(got)
            });
            todo.par_iter().for_each_with(tx, |tx, &(x, e)| {
                let _ = tx.send(classify_cell(&classifier, x, e));
            });
            handle.join().expect("writer thread")
        })?;
        for c in fresh {
            done.insert((c.xi.to_bits(), c.eta.to_bits()), c);
        }
    }

    let cells: Vec<Cell> = points.iter().map(|(x, e)| done[&(x.to_bits(), e.to_bits())].clone()).collect();
    let mut table = header;
    for c in &cells {
        table.push(cell_row(c));
    }
    run.write("region.csv", &table.render()?)?;
    let partial = run.file("region.partial.csv");
    if partial.exists() {
        std::fs::remove_file(&partial).map_err(|e| Error::io(&partial, e))?;
    }

    let boundary = refine_boundaries(&classifier, &xi, &eta, &cells, spec.refine_steps);
    if spec.refine_steps > 0 {
        let mut t = CsvTable::new("boundary", &["xi", "eta", "eta_low", "eta_high", "class_low", "class_high"])
            .meta("profile", &shooter.profile.name)
            .meta("refine_steps", spec.refine_steps)
            .meta("config_hash", config.hash());
        for b in &boundary {
            t.push(vec![
                num(b.xi),
                num(b.eta()),
                num(b.eta_low),
                num(b.eta_high),
                b.class_low.label().into(),
                b.class_high.label().into(),
            ]);
        }
        run.write("boundary.csv", &t.render()?)?;
    }

    let map = crate::solver::RegionMap {
        profile: shooter.profile.name.clone(),
        exps: shooter.exps,
        config: shooter.config,
        xi,
        eta,
        cells,
        boundary,
    };
    let violations = map.ordering_violations();
    let failed = map.count(CellClass::Failed);
    let checks = vec![
        Check::at_most("ordering", violations.len() as f64, 0.0),
        Check::at_most("failed_cells", failed as f64, 0.0),
    ];
    #[derive(Serialize)]
    struct SweepVerdict<'a> {
        counts: HashMap<&'static str, usize>,
        global_runs: Vec<usize>,
        ordering_violations: Vec<(f64, f64)>,
        resumed_cells: usize,
        checks: &'a [Check],
    }
    let counts = [CellClass::A, CellClass::B, CellClass::GlobalProxy, CellClass::Undecided, CellClass::Failed]
        .into_iter()
        .map(|c| (c.label(), map.count(c)))
        .collect();
    run.write_json(
        "verdict.json",
        &SweepVerdict {
            counts,
            global_runs: map.global_runs(),
            ordering_violations: violations,
            resumed_cells: resumed,
            checks: &checks,
        },
    )?;
    let summary = format!("{} cells, {} globally positive", map.cells.len(), map.count(CellClass::GlobalProxy));
    Ok(Report::new("sweep", checks, run).with_summary(summary))
}

/// Shooter with full recording, as the diagnostics need dense output.
pub fn dense(shooter: &Shooter) -> Shooter {
    shooter.with_config(crate::shooting::IntegratorConfig { recording: Recording::Full, ..shooter.config })
}
