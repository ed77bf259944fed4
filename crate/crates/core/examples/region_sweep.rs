//! Classify a grid of initial data on a complete and an incomplete model and
//! draw the class map: `A`, `B`, and `#` for globally positive cells.
//!
//! ```text
//! cargo run --release --example region_sweep -- [resolution]
//! ```

use radial_shooting::prelude::*;
use radial_shooting::solver::{sweep_region, CellClass, RegionMap};

fn draw(map: &RegionMap) {
    println!("{} (η increases upwards, ξ to the right)", map.profile);
    for j in (0..map.eta.len()).rev() {
        let row: String = (0..map.xi.len())
            .map(|i| match map.cell(i, j).class {
                CellClass::A => 'A',
                CellClass::B => 'B',
                CellClass::GlobalProxy => '#',
                CellClass::Undecided => '?',
                CellClass::Failed => '!',
            })
            .collect();
        println!("  {:>6.3} {row}", map.eta[j]);
    }
    println!("  longest global run per column: {:?}", map.global_runs());
}

fn main() -> Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(24);
    let exps = ExponentPair::new(5.0, 5.0, 3)?;
    for profile in [ManifoldProfile::euclidean(3)?, ManifoldProfile::exp_power(3.0, 3)?] {
        let shooter = Shooter::new(&profile, exps, IntegratorConfig::default())?;
        let map = sweep_region(&shooter, (0.5, 2.0), (0.5, 2.0), (n, n), 0)?;
        draw(&map);
    }
    Ok(())
}
