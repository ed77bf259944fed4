//! Evaluate the Pohozaev function along shots on the three builtin models.
//! P vanishes identically in the Euclidean critical case and is strictly
//! negative once curvature enters.

use radial_shooting::diagnostics::{pohozaev_scan, PohozaevSummary};
use radial_shooting::prelude::*;

fn main() -> Result<()> {
    let exps = ExponentPair::new(5.0, 5.0, 3)?;
    let config = IntegratorConfig { horizon: Some(20.0), ..Default::default() };
    for profile in [
        ManifoldProfile::euclidean(3)?,
        ManifoldProfile::hyperbolic(1.0, 3)?,
        ManifoldProfile::exp_power(3.0, 3)?,
    ] {
        let shooter = Shooter::new(&profile, exps, config)?;
        for (xi, eta) in [(1.0, 1.0), (1.0, 1.3)] {
            let out = shooter.shoot(xi, eta)?;
            let scan = pohozaev_scan(&out.trajectory, &profile, &exps)?;
            let s = PohozaevSummary::from_samples(&scan);
            println!(
                "{:<14} ({xi}, {eta}) {:<17} max P {:>10.3e}  max ΔP {:>10.3e}  max K {:>10.3e}",
                profile.name,
                out.kind.label(),
                s.max_pohozaev,
                s.max_increment,
                s.max_kernel
            );
            for r in [0.5, 1.0, 2.0] {
                if let Some(p) = scan.iter().find(|p| p.r >= r) {
                    println!("    r {:>6.3}  F {:>10.4e}  P {:>11.4e}  K {:>11.4e}", p.r, p.energy, p.pohozaev, p.kernel);
                }
            }
        }
    }
    Ok(())
}
