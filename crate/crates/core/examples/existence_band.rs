//! Locate the band [η_m(ξ), η_M(ξ)] of globally positive data on the
//! stochastically incomplete model ψ = r e^{r³}.

use radial_shooting::diagnostics::abs_bound;
use radial_shooting::prelude::*;
use radial_shooting::solver::find_band;

fn main() -> Result<()> {
    let profile = ManifoldProfile::exp_power(3.0, 3)?;
    let exps = ExponentPair::new(5.0, 5.0, 3)?;
    let shooter = Shooter::new(&profile, exps, IntegratorConfig::default())?;
    let theta = shooter.summary.theta().expect("incomplete profile");
    println!("θ = {theta:.15}");

    for xi in [0.5, 1.0, 2.0] {
        let band = find_band(&shooter, xi, 1e-9)?;
        println!(
            "xi {xi}: eta in [{:.9}, {:.9}], gap {:.6}, feasibility top {:.6}, {} shots",
            band.eta_min,
            band.eta_max,
            band.gap(),
            band.feasibility_upper,
            band.shots
        );
        for (name, w) in [("eta_m", &band.witness_min), ("mid", &band.witness_mid), ("eta_M", &band.witness_max)] {
            if let Some((lu, lv)) = w.limits() {
                println!(
                    "    {name:<6} l_u in [{:.3e}, {:.3e}]  l_v in [{:.3e}, {:.3e}]",
                    lu.lower, lu.upper, lv.lower, lv.upper
                );
            }
        }
        println!("    signatures match: {}", band.signatures.all());
    }
    let (bu, bv) = abs_bound(&exps, theta);
    println!("limit bounds: l_u <= {bu:.6}, l_v <= {bv:.6}");
    Ok(())
}
