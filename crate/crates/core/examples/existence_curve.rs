//! Trace η(ξ) on complete models: the diagonal for p = q, and the scaling
//! law η = c ξ^{(p+1)/(q+1)} for a critical Euclidean pair.

use radial_shooting::prelude::*;
use radial_shooting::solver::{curve_trace, fit_power_law};

fn trace(profile: &ManifoldProfile, exps: ExponentPair, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let shooter = Shooter::new(profile, exps, IntegratorConfig::default())?;
    let result = curve_trace(&shooter, grid, 1e-9)?;
    let points = result.curve().expect("complete profiles give curves");
    println!("{} p={} q={}", profile.name, exps.p, exps.q);
    for p in points {
        println!("  xi {:<4} eta {:.9}  bracket {:.1e}  {} shots", p.xi, p.eta, p.bracket_width, p.shots);
    }
    Ok(points.iter().map(|p| (p.xi, p.eta)).collect())
}

fn main() -> Result<()> {
    let grid = [0.5, 1.0, 2.0, 4.0];
    trace(&ManifoldProfile::euclidean(3)?, ExponentPair::new(5.0, 5.0, 3)?, &grid)?;
    trace(&ManifoldProfile::hyperbolic(1.0, 3)?, ExponentPair::new(5.0, 5.0, 3)?, &grid)?;

    let q = ExponentPair::critical_partner(4.0, 3).expect("critical partner");
    let exps = ExponentPair::new(4.0, q, 3)?;
    let pts = trace(&ManifoldProfile::euclidean(3)?, exps, &[1.0, 2.0, 4.0, 8.0])?;
    let (k, c) = fit_power_law(&pts).expect("fit");
    println!("fitted slope {k:.6} (expected {:.6}), constant {c:.6}", 5.0 / (q + 1.0));
    Ok(())
}
