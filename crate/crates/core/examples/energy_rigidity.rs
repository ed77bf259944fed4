//! Energy integrals of the critical global solution. On flat space the
//! energy converges to 3√3π/16; on hyperbolic space it grows without bound.

use radial_shooting::diagnostics::{divergence_verdict, energy_ledger, EUCLIDEAN_CRITICAL_ENERGY};
use radial_shooting::prelude::*;

fn radii(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..=k).map(|i| a * (b / a).powf(i as f64 / k as f64)).collect()
}

fn main() -> Result<()> {
    let exps = ExponentPair::new(5.0, 5.0, 3)?;
    let base = IntegratorConfig { stop_at_extinction: false, ..Default::default() };

    let flat = ManifoldProfile::euclidean(3)?;
    let shooter = Shooter::new(&flat, exps, IntegratorConfig { horizon: Some(1e3), ..base })?;
    let out = shooter.shoot(1.0, 1.0)?;
    let ledger = energy_ledger(&out.trajectory, &flat, &exps, &radii(1.0, 1e3, 6))?;
    println!("euclidean");
    for c in &ledger.checkpoints {
        println!("  R {:>8.2}  I_mixed {:.12}  I_u {:.12}", c.r, c.i_mixed, c.i_u);
    }
    println!("  reference 3√3π/16 = {EUCLIDEAN_CRITICAL_ENERGY:.12}");
    println!("  identity residual {:.2e}", ledger.max_residual());

    let hyp = ManifoldProfile::hyperbolic(1.0, 3)?;
    let shooter = Shooter::new(&hyp, exps, IntegratorConfig { horizon: Some(200.0), ..base })?;
    let out = shooter.shoot(1.0, 1.0)?;
    let ledger = energy_ledger(&out.trajectory, &hyp, &exps, &radii(1.0, 200.0, 8))?;
    println!("hyperbolic(1)");
    for c in &ledger.checkpoints {
        println!("  R {:>8.2}  I_mixed {:.6e}", c.r, c.i_mixed);
    }
    let v = divergence_verdict(&ledger, EUCLIDEAN_CRITICAL_ENERGY, 10.0);
    println!("  increasing {}, exceeds 10x reference at R = {:?}, diverges {}", v.increasing, v.exceeds_at, v.diverges);
    Ok(())
}
