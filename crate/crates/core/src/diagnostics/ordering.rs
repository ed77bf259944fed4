//! Comparison of two shots with `ξ₁ ≥ ξ₂` and `η₂ > η₁`: on their common
//! positivity interval `u₁ - u₂` and `v₂ - v₁` increase strictly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::shooting::ShotOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderingReport {
    /// End of the common positivity interval that was sampled.
    pub common: f64,
    pub nodes: usize,
    /// Smallest increment of `u₁ - u₂` between consecutive nodes.
    pub min_step_u: f64,
    /// Smallest increment of `v₂ - v₁`.
    pub min_step_v: f64,
}

impl OrderingReport {
    /// Both differences increase at every node, up to `slack`.
    pub fn holds(&self, slack: f64) -> bool {
        self.min_step_u > -slack && self.min_step_v > -slack
    }
}

/// Samples both differences at `nodes + 1` equally spaced radii of the common
/// interval. Both trajectories must be fully recorded.
pub fn ordering_report(first: &ShotOutcome, second: &ShotOutcome, nodes: usize) -> Result<OrderingReport> {
    if !(first.xi >= second.xi && second.eta > first.eta) {
        return Err(Error::InvalidInput(format!(
            "ordering needs ξ₁ ≥ ξ₂ and η₂ > η₁, got ({}, {}) and ({}, {})",
            first.xi, first.eta, second.xi, second.eta
        )));
    }
    if nodes == 0 {
        return Err(Error::InvalidInput("ordering needs at least one interval".into()));
    }
    let common = first.trajectory.last().r.min(second.trajectory.last().r);
    let eval = |o: &ShotOutcome, r: f64| {
        o.trajectory
            .eval(r)
            .ok_or_else(|| Error::InvalidInput(format!("trajectory from ({}, {}) is not dense at r = {r}", o.xi, o.eta)))
    };
    let (mut min_u, mut min_v) = (f64::INFINITY, f64::INFINITY);
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=nodes {
        let r = (common * k as f64 / nodes as f64).min(common);
        let (a, b) = (eval(first, r)?, eval(second, r)?);
        let d = (a.u - b.u, b.v - a.v);
        if let Some(p) = prev {
            min_u = min_u.min(d.0 - p.0);
            min_v = min_v.min(d.1 - p.1);
        }
        prev = Some(d);
    }
    Ok(OrderingReport { common, nodes, min_step_u: min_u, min_step_v: min_v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::ManifoldProfile;
    use crate::shooting::{ExponentPair, IntegratorConfig, Shooter};

    #[test]
    fn ordered_pair_separates() {
        let m = ManifoldProfile::euclidean(3).unwrap();
        let sh = Shooter::new(&m, ExponentPair::new(5.0, 5.0, 3).unwrap(), IntegratorConfig::default()).unwrap();
        let (a, b) = (sh.shoot(1.2, 0.8).unwrap(), sh.shoot(1.0, 1.1).unwrap());
        let rep = ordering_report(&a, &b, 200).unwrap();
        assert!(rep.holds(0.0), "{rep:?}");
        assert!(ordering_report(&b, &a, 200).is_err());
    }
}
