use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::GeometricSummary;

use super::{ExponentPair, OutcomeKind, Shooter};

/// `η` values known to lie in `B` (below) and `A` (above) for a fixed `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedBrackets {
    pub xi: f64,
    pub eta_low: f64,
    pub eta_high: f64,
}

/// Explicit membership thresholds, each pushed a factor 2 past the boundary.
///
/// Complete profiles: `(s, 2t) ∈ A` when `t > s^{(p+1)/(q+1)}` and `(2s, t) ∈ B`
/// when `t < s^{(p+1)/(q+1)}`. Incomplete profiles replace the power by
/// `(θ s^p) ∨ (s/θ)^{1/q}` for `A` and the mirrored condition for `B`.
pub fn seed_thresholds(summary: &GeometricSummary, exps: &ExponentPair, xi: f64) -> Result<SeedBrackets> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::InvalidInput(format!("ξ must be positive, got {xi}")));
    }
    let (p, q) = (exps.p, exps.q);
    let (eta_low, eta_high) = match summary.theta() {
        None => {
            let power = (p + 1.0) / (q + 1.0);
            let high = 2.0 * (2.0 * xi.powf(power));
            let low = 0.5 * (0.5 * xi).powf(power);
            (low, high)
        }
        Some(theta) => {
            let f = (theta * xi.powf(p)).max((xi / theta).powf(1.0 / q));
            let high = 2.0 * (2.0 * f);
            let s = 0.5 * xi;
            let low = 0.5 * (s / theta).powf(1.0 / q).min(theta * s.powf(p));
            (low, high)
        }
    };
    Ok(SeedBrackets { xi, eta_low, eta_high })
}

/// Seed thresholds confirmed by one shot each.
pub fn ab_seed_brackets(shooter: &Shooter, xi: f64) -> Result<SeedBrackets> {
    let seeds = seed_thresholds(&shooter.summary, &shooter.exps, xi)?;
    let low = shooter.shoot(xi, seeds.eta_low)?;
    if !matches!(low.kind, OutcomeKind::FirstZeroV { .. }) {
        return Err(Error::BracketConfirmationFailed {
            eta: seeds.eta_low,
            expected: "FirstZeroV",
            found: low.kind.label().to_string(),
        });
    }
    let high = shooter.shoot(xi, seeds.eta_high)?;
    if !matches!(high.kind, OutcomeKind::FirstZeroU { .. }) {
        return Err(Error::BracketConfirmationFailed {
            eta: seeds.eta_high,
            expected: "FirstZeroU",
            found: high.kind.label().to_string(),
        });
    }
    Ok(seeds)
}
