//! Compare the critical Euclidean shot from (1, 1) with the closed form
//! u = v = (1 + r²/3)^{-1/2}.

use radial_shooting::prelude::*;

fn main() -> Result<()> {
    let profile = ManifoldProfile::euclidean(3)?;
    let exps = ExponentPair::new(5.0, 5.0, 3)?;
    let config = IntegratorConfig { horizon: Some(50.0), ..Default::default() };
    let shooter = Shooter::new(&profile, exps, config)?;

    let start = std::time::Instant::now();
    let out = shooter.shoot(1.0, 1.0)?;
    let elapsed = start.elapsed();

    println!("{:>8} {:>20} {:>20} {:>10}", "r", "u", "exact", "rel err");
    let mut worst: f64 = 0.0;
    for r in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
        let s = out.trajectory.eval(r).expect("dense output");
        let exact = (1.0 + r * r / 3.0).powf(-0.5);
        let err = ((s.u - exact) / exact).abs();
        worst = worst.max(err);
        println!("{r:>8} {:>20.15} {exact:>20.15} {err:>10.2e}", s.u);
    }
    println!("max relative error at the listed radii: {worst:.2e}");
    println!("{} steps in {elapsed:?}", out.steps);
    Ok(())
}
