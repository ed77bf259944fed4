//! Geometric summaries of the builtin models: Θ at a few radii, the total θ,
//! stochastic completeness and the volume-convexity test.

use radial_shooting::prelude::*;

fn main() -> Result<()> {
    let exps = ExponentPair::new(5.0, 5.0, 3)?;
    for profile in [
        ManifoldProfile::euclidean(3)?,
        ManifoldProfile::hyperbolic(1.0, 3)?,
        ManifoldProfile::exp_power(3.0, 3)?,
        ManifoldProfile::exp_power(1.0, 3)?,
    ] {
        let summary = profile.summary()?;
        println!("{}", profile.name);
        for r in [0.1, 1.0, 10.0] {
            println!("  Θ({r:>4}) = {:.12e}", profile.theta(r)?);
        }
        match summary.theta() {
            Some(theta) => println!("  θ = {theta:.15}, stochastically incomplete"),
            None => println!("  Θ not integrable, stochastically complete"),
        }
        println!("  volume convexity for p = q = 5: {:?}", profile.check_volume_convexity(&exps)?);
    }
    Ok(())
}
