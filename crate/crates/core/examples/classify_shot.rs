//! Fire single shots and print how each one ends.
//!
//! ```text
//! cargo run --example classify_shot -- [xi] [eta]
//! ```

use radial_shooting::prelude::*;
use radial_shooting::solver::Classifier;

fn main() -> Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let data = match args.as_slice() {
        [xi, eta] => vec![(*xi, *eta)],
        _ => vec![(1.0, 2.5), (2.5, 1.0), (1.0, 1.0)],
    };

    let profile = ManifoldProfile::euclidean(3)?;
    let shooter = Shooter::new(&profile, ExponentPair::new(5.0, 5.0, 3)?, IntegratorConfig::default())?;
    let classifier = Classifier::new(&shooter);
    for (xi, eta) in data {
        let c = classifier.classify(xi, eta)?;
        let s = c.summary();
        println!(
            "({xi}, {eta}): {:<17} class {:<6} reach {:.6} after {} steps",
            c.outcome.kind.label(),
            c.class.label(),
            s.reach,
            s.steps
        );
        if let OutcomeKind::FirstZeroU { v_at_r, .. } = c.outcome.kind {
            println!("    v at the zero of u: {v_at_r:.6}");
        }
        if let OutcomeKind::FirstZeroV { u_at_r, .. } = c.outcome.kind {
            println!("    u at the zero of v: {u_at_r:.6}");
        }
    }
    Ok(())
}
