//! Named verification suites. Each returns one [`Check`] per criterion.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::commands::{band_checks, shot_checks, EQUALITY_TOL};
use super::config::ExperimentConfig;
use super::report::{Check, Status};
use crate::diagnostics::{
    abs_bound, divergence_verdict, energy_ledger, ordering_report, pohozaev_scan, PohozaevSummary,
    EUCLIDEAN_CRITICAL_ENERGY,
};
use crate::error::{Error, Result};
use crate::manifold::ManifoldProfile;
use crate::shooting::{seed_thresholds, ExponentPair, IntegratorConfig, OutcomeKind, Recording, Shooter};
use crate::solver::{find_band, find_eta, fit_power_law, Classifier, ShotClass};

pub const SUITES: [&str; 8] =
    ["euclidean-exact", "symmetry", "scaling", "pohozaev", "band", "bounds", "rigidity", "ordering"];

pub const EXACT_TOL: f64 = 1e-8;
pub const RANDOM_SHOTS: usize = 100;
pub const ORDERING_PAIRS: usize = 50;
pub const ORDERING_SLACK: f64 = 1e-10;

pub fn run_suite(name: &str, config: &ExperimentConfig) -> Result<Vec<Check>> {
    let checks = match name {
        "euclidean-exact" => euclidean_exact(config)?,
        "symmetry" => symmetry(config)?,
        "scaling" => scaling(config)?,
        "pohozaev" => pohozaev(config)?,
        "band" => band(config)?,
        "bounds" => bounds(config)?,
        "rigidity" => rigidity(config)?,
        "ordering" => ordering(config)?,
        other => {
            return Err(Error::config(
                "suite",
                format!("unknown suite {other:?}; expected one of {} or all", SUITES.join(", ")),
            ))
        }
    };
    Ok(checks.into_iter().map(|c| c.prefixed(name)).collect())
}

/// `(1 + r²/3)^{-1/2}`, the three-dimensional critical profile with value 1 at the pole.
pub fn aubin_talenti(r: f64) -> f64 {
    (1.0 + r * r / 3.0).powf(-0.5)
}

fn euclidean_critical(config: &IntegratorConfig) -> Result<Shooter> {
    Shooter::new(&ManifoldProfile::euclidean(3)?, ExponentPair::new(5.0, 5.0, 3)?, *config)
}

fn full(config: &IntegratorConfig) -> IntegratorConfig {
    IntegratorConfig { recording: Recording::Full, ..*config }
}

fn euclidean_exact(config: &ExperimentConfig) -> Result<Vec<Check>> {
    let ic = IntegratorConfig { horizon: Some(50.0), ..full(&config.integrator) };
    let sh = euclidean_critical(&ic)?;
    let start = Instant::now();
    let out = sh.shoot(1.0, 1.0)?;
    let elapsed = start.elapsed().as_secs_f64();
    let traj = &out.trajectory;
    let mut worst: f64 = 0.0;
    for w in traj.samples.windows(2) {
        for r in [w[0].r, 0.5 * (w[0].r + w[1].r), w[1].r] {
            let s = traj.eval(r).ok_or_else(|| Error::InvalidInput(format!("no dense output at r = {r}")))?;
            let exact = aubin_talenti(r);
            worst = worst.max(((s.u - exact) / exact).abs()).max(((s.v - exact) / exact).abs());
        }
    }
    let summary = PohozaevSummary::from_samples(&pohozaev_scan(traj, &sh.profile, &sh.exps)?);
    Ok(vec![
        Check::flag("positive", out.kind.is_positive(), out.kind.label()),
        Check::at_least("reach", out.reach(), 50.0),
        Check::at_most("max_rel_err", worst, EXACT_TOL),
        Check::at_most("runtime_s", elapsed, 1.0),
        Check::at_most("pohozaev_max_abs", summary.max_abs_pohozaev, EQUALITY_TOL),
    ])
}

fn symmetry(config: &ExperimentConfig) -> Result<Vec<Check>> {
    let sh = config.shooter()?;
    if sh.exps.p != sh.exps.q {
        return Ok(vec![Check::skipped("diagonal", format!("needs p = q, got p = {}, q = {}", sh.exps.p, sh.exps.q))]);
    }
    let mut checks = Vec::new();
    if sh.is_complete() {
        for xi in [0.5, 1.0, 2.0, 4.0] {
            let point = find_eta(&sh, xi, 1e-8)?;
            checks.push(Check::at_most(&format!("eta_minus_xi_at_{xi}"), (point.eta - xi).abs(), 1e-6));
        }
    } else {
        let point = find_band(&sh, 1.0, 1e-9)?;
        checks.push(Check::flag(
            "diagonal_in_band",
            point.eta_min <= 1.0 && 1.0 <= point.eta_max,
            format!("[{}, {}]", point.eta_min, point.eta_max),
        ));
        let classifier = Classifier::new(&sh);
        for (name, eta) in [("reflected_lower", point.eta_min), ("reflected_upper", point.eta_max)] {
            let c = classifier.classify(eta, 1.0)?.class;
            checks.push(Check::flag(name, c == ShotClass::GlobalProxy, format!("({eta}, 1) is {}", c.label())));
        }
    }
    Ok(checks)
}

fn scaling(config: &ExperimentConfig) -> Result<Vec<Check>> {
    let n = 3;
    let p = 4.0;
    let q = ExponentPair::critical_partner(p, n).ok_or_else(|| Error::InvalidInput("no critical partner".into()))?;
    let exps = ExponentPair::new(p, q, n)?;
    let sh = Shooter::new(&ManifoldProfile::euclidean(n)?, exps, config.integrator)?;
    let mut pts = Vec::new();
    for xi in [1.0, 2.0, 4.0, 8.0] {
        pts.push((xi, find_eta(&sh, xi, 1e-10)?.eta));
    }
    let (k, c) = fit_power_law(&pts).ok_or_else(|| Error::InvalidInput("degenerate fit".into()))?;
    let expected = (p + 1.0) / (q + 1.0);
    Ok(vec![
        Check::within("slope", k, expected, 1e-3).with_detail(format!("expected (p+1)/(q+1) = 5/7.5 = {expected}")),
        Check::info("constant", c, format!("η ≈ c ξ^{expected}")),
    ])
}

/// Random builtin profile, critical-supercritical exponents and initial data in `[0.2, 5]²`.
pub fn random_setup(rng: &mut impl Rng, n: usize) -> Result<(ManifoldProfile, ExponentPair, f64, f64)> {
    let profile = match rng.random_range(0..3) {
        0 => ManifoldProfile::euclidean(n)?,
        1 => ManifoldProfile::hyperbolic(1.0, n)?,
        _ => ManifoldProfile::exp_power(3.0, n)?,
    };
    let p = rng.random_range(2.5..8.0);
    let qc = ExponentPair::critical_partner(p, n).ok_or_else(|| Error::InvalidInput(format!("p = {p}")))?;
    let q = if rng.random_bool(0.25) { qc } else { qc + rng.random_range(0.0..3.0) };
    let (xi, eta) = (rng.random_range(0.2..5.0), rng.random_range(0.2..5.0));
    Ok((profile, ExponentPair::new(p, q, n)?, xi, eta))
}

fn pohozaev(config: &ExperimentConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let ic = full(&config.integrator);
    let mut failures = Vec::new();
    let (mut worst_p, mut worst_inc, mut worst_zero) = (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::INFINITY);
    let mut evaluated = 0;
    for _ in 0..RANDOM_SHOTS {
        let (profile, exps, xi, eta) = random_setup(&mut rng, 3)?;
        let sh = Shooter::new(&profile, exps, ic)?;
        let out = sh.shoot(xi, eta)?;
        let (checks, summary) = shot_checks(&sh, &out)?;
        let tag = format!("{} p={} q={} ({xi}, {eta})", profile.name, exps.p, exps.q);
        for c in &checks {
            match (c.name.as_str(), c.status) {
                (_, Status::Fail) => failures.push(format!("{}: {tag}", c.name)),
                ("no_simultaneous_zero", _) => worst_zero = worst_zero.min(c.measured.unwrap_or(f64::NAN)),
                ("pohozaev_nonpositive", Status::Pass) => evaluated += 1,
                _ => {}
            }
        }
        if let Some(s) = summary {
            worst_p = worst_p.max(s.max_normalized);
            worst_inc = worst_inc.max(s.max_normalized_increment);
        }
    }
    let detail = failures.first().cloned().unwrap_or_default();
    let mut checks = vec![
        Check::at_most("random_violations", failures.len() as f64, 0.0).with_detail(detail),
        Check::at_least("random_shots_evaluated", evaluated as f64, RANDOM_SHOTS as f64),
        Check::info("random_max_pohozaev", worst_p, "largest P over all nodes, in units of max(1, term size)"),
        Check::info("random_max_increment", worst_inc, "largest P increment, same units"),
        Check::info("random_min_zero_ratio", worst_zero, "other component at a first zero, relative"),
    ];

    let hyp = Shooter::new(&ManifoldProfile::hyperbolic(1.0, 3)?, ExponentPair::new(5.0, 5.0, 3)?, ic)?;
    let point = find_eta(&hyp, 1.0, 1e-8)?;
    let scan = pohozaev_scan(&point.witness_shot.trajectory, &hyp.profile, &hyp.exps)?;
    let beyond: Vec<f64> = scan.iter().filter(|s| s.r >= 1.0).map(|s| s.pohozaev).collect();
    let worst = beyond.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::flag("hyperbolic_strict_nonempty", !beyond.is_empty(), "witness reaches r = 1"));
    checks.push(Check::at_most("hyperbolic_strict", worst, -1e-6).with_detail("max P over r ≥ 1 on the global witness"));
    Ok(checks)
}

fn band(config: &ExperimentConfig) -> Result<Vec<Check>> {
    let sh = config.shooter()?;
    if sh.is_complete() {
        return Ok(vec![Check::skipped(
            "band",
            format!("profile {} is stochastically complete; the globally positive set is a curve", sh.profile.name),
        )]);
    }
    let (grid, tol) = match &config.trace {
        Some(t) => (t.xi_grid.clone(), t.tol.min(1e-9)),
        None => (vec![1.0], 1e-9),
    };
    let mut checks = Vec::new();
    for xi in grid {
        checks.extend(band_checks(&find_band(&sh, xi, tol)?, &sh.exps, tol));
    }
    Ok(checks)
}

fn classify_label(c: &Classifier, xi: f64, eta: f64) -> Result<&'static str> {
    Ok(c.classify(xi, eta)?.class.label())
}

fn bounds(config: &ExperimentConfig) -> Result<Vec<Check>> {
    let flat = euclidean_critical(&config.integrator)?;
    let fc = Classifier::new(&flat);
    let mut checks = vec![
        Check::flag("euclidean_1_2.5_is_A", classify_label(&fc, 1.0, 2.5)? == "A", "(1, 2.5)"),
        Check::flag("euclidean_2.5_1_is_B", classify_label(&fc, 2.5, 1.0)? == "B", "(2.5, 1)"),
    ];
    let sh = config.shooter()?;
    let c = Classifier::new(&sh);
    for xi in [0.5, 1.0, 2.0] {
        let seeds = seed_thresholds(&sh.summary, &sh.exps, xi)?;
        let low = classify_label(&c, xi, seeds.eta_low)?;
        let high = classify_label(&c, xi, seeds.eta_high)?;
        checks.push(Check::flag(&format!("threshold_B_at_{xi}"), low == "B", format!("η = {} is {low}", seeds.eta_low)));
        checks.push(Check::flag(&format!("threshold_A_at_{xi}"), high == "A", format!("η = {} is {high}", seeds.eta_high)));
    }
    if let Some(theta) = sh.summary.theta() {
        let point = find_band(&sh, 1.0, 1e-9)?;
        let (bu, bv) = abs_bound(&sh.exps, theta);
        if let OutcomeKind::PositiveToHorizon { limit_u, limit_v, .. } = point.witness_shots[1].kind {
            checks.push(Check::at_most("limit_u_abs_bound", limit_u.upper, bu));
            checks.push(Check::at_most("limit_v_abs_bound", limit_v.upper, bv));
        } else {
            checks.push(Check::flag("band_midpoint_positive", false, point.witness_shots[1].kind.label()));
        }
    }
    Ok(checks)
}

fn geometric(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..=k).map(|i| a * (b / a).powf(i as f64 / k as f64)).collect()
}

fn rigidity(config: &ExperimentConfig) -> Result<Vec<Check>> {
    let base = IntegratorConfig { stop_at_extinction: false, ..full(&config.integrator) };
    let flat = euclidean_critical(&IntegratorConfig { horizon: Some(1e3), ..base })?;
    let out = flat.shoot(1.0, 1.0)?;
    let ledger = energy_ledger(&out.trajectory, &flat.profile, &flat.exps, &geometric(0.1, 1e3, 40))?;
    let i_u = ledger.last().map_or(f64::NAN, |c| c.i_u);
    let mut checks = vec![
        Check::at_most("euclidean_identity_residual", ledger.max_residual(), 1e-8),
        Check::within("euclidean_energy", i_u, EUCLIDEAN_CRITICAL_ENERGY, 1e-6)
            .with_detail(format!("I_u(1000) vs 3√3π/16 = {EUCLIDEAN_CRITICAL_ENERGY}")),
    ];

    let hyp = Shooter::new(
        &ManifoldProfile::hyperbolic(1.0, 3)?,
        ExponentPair::new(5.0, 5.0, 3)?,
        IntegratorConfig { horizon: Some(200.0), ..base },
    )?;
    let out = hyp.shoot(1.0, 1.0)?;
    let ledger = energy_ledger(&out.trajectory, &hyp.profile, &hyp.exps, &geometric(1.0, 200.0, 40))?;
    let verdict = divergence_verdict(&ledger, EUCLIDEAN_CRITICAL_ENERGY, 10.0);
    checks.push(Check::at_most("hyperbolic_identity_residual", ledger.max_residual(), 1e-8));
    checks.push(Check::flag("hyperbolic_mixed_increasing", verdict.increasing, "I_mixed at 41 checkpoints in [1, 200]"));
    checks.push(Check::at_most("hyperbolic_exceeds_10x_by", verdict.exceeds_at.unwrap_or(f64::INFINITY), 200.0));
    checks.push(Check::info(
        "hyperbolic_mixed_at_200",
        ledger.last().map_or(f64::NAN, |c| c.i_mixed),
        format!("last-decade log-log slope {:?}", verdict.last_decade_slope),
    ));
    Ok(checks)
}

fn ordering(config: &ExperimentConfig) -> Result<Vec<Check>> {
    let sh = config.shooter()?.with_config(full(&config.integrator));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut violations = Vec::new();
    let (mut worst_u, mut worst_v) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..ORDERING_PAIRS {
        let xi2 = rng.random_range(0.2..5.0);
        let xi1 = rng.random_range(xi2..=5.0);
        let eta1 = rng.random_range(0.2..5.0);
        let eta2 = rng.random_range(eta1..=5.0);
        if eta2 <= eta1 {
            continue;
        }
        let rep = ordering_report(&sh.shoot(xi1, eta1)?, &sh.shoot(xi2, eta2)?, 400)?;
        worst_u = worst_u.min(rep.min_step_u);
        worst_v = worst_v.min(rep.min_step_v);
        if !rep.holds(ORDERING_SLACK) {
            violations.push(format!("({xi1}, {eta1}) vs ({xi2}, {eta2})"));
        }
    }
    Ok(vec![
        Check::at_most("violations", violations.len() as f64, 0.0).with_detail(violations.join("; ")),
        Check::info("min_step_u", worst_u, "smallest increment of u₁ - u₂"),
        Check::info("min_step_v", worst_v, "smallest increment of v₂ - v₁"),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_a_config_error() {
        let err = run_suite("nope", &ExperimentConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Config { .. }), "{err}");
    }

    #[test]
    fn band_skips_on_complete_profiles() {
        let checks = run_suite("band", &ExperimentConfig::default()).unwrap();
        assert_eq!(checks.len(), 1);
        assert_eq!(checks[0].status, Status::Skipped);
        assert!(checks[0].detail.contains("complete"));
    }

    #[test]
    fn random_setups_are_critical_supercritical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (_, e, xi, eta) = random_setup(&mut rng, 3).unwrap();
            assert!(e.is_critical_supercritical());
            assert!((0.2..5.0).contains(&xi) && (0.2..5.0).contains(&eta));
        }
    }

    #[test]
    fn exact_profile_at_origin() {
        assert_eq!(aubin_talenti(0.0), 1.0);
        assert!((aubin_talenti(3.0) - 0.5).abs() < 1e-15);
    }
}
