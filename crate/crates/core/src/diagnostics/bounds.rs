use serde::{Deserialize, Serialize};

use super::LimitEnclosure;
use crate::shooting::ExponentPair;

/// Explicit upper bounds `(ℓ_u^max, ℓ_v^max)` for the limits of a globally
/// positive solution on a model with finite `θ`. Infinite when `pq <= 1`.
pub fn abs_bound(exps: &ExponentPair, theta: f64) -> (f64, f64) {
    let (p, q) = (exps.p, exps.q);
    let d = p * q - 1.0;
    if d <= 0.0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let bu = p.powf((q + 1.0) / d) * (q + 1.0).powf((q + 2.0) / d)
        / ((p + 1.0).powf(1.0 / d) * d.powf((q + 1.0) / d))
        * theta.powf(-(q + 1.0) / d);
    let bv = q.powf((p + 1.0) / d) * (p + 1.0).powf((p + 2.0) / d)
        / ((q + 1.0).powf(1.0 / d) * d.powf((p + 1.0) / d))
        * theta.powf(-(p + 1.0) / d);
    (bu, bv)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BoundCheck {
    /// Smallest `bound - upper` over both components.
    Satisfied { margin: f64 },
    /// Largest `upper - bound`.
    Violated { excess: f64 },
}

impl BoundCheck {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, BoundCheck::Satisfied { .. })
    }
}

/// Compares enclosure uppers with [`abs_bound`].
pub fn abs_bound_check(enclosures: (&LimitEnclosure, &LimitEnclosure), exps: &ExponentPair, theta: f64) -> BoundCheck {
    let (bu, bv) = abs_bound(exps, theta);
    let margin = (bu - enclosures.0.upper).min(bv - enclosures.1.upper);
    if margin >= 0.0 {
        BoundCheck::Satisfied { margin }
    } else {
        BoundCheck::Violated { excess: -margin }
    }
}

/// `θ ξ^p + (ξ/θ)^{1/q}`, an upper bound for every `η` admitting a globally
/// positive solution from `(ξ, η)` on an incomplete model.
pub fn feasibility_upper(xi: f64, theta: f64, exps: &ExponentPair) -> f64 {
    theta * xi.powf(exps.p) + (xi / theta).powf(1.0 / exps.q)
}

/// `ξ >= θ (η - θ ξ^p)_+^q` and `η >= θ (ξ - θ η^q)_+^p`.
pub fn satisfies_feasibility(xi: f64, eta: f64, theta: f64, exps: &ExponentPair) -> bool {
    let (p, q) = (exps.p, exps.q);
    xi >= theta * (eta - theta * xi.powf(p)).max(0.0).powf(q) && eta >= theta * (xi - theta * eta.powf(q)).max(0.0).powf(p)
}
