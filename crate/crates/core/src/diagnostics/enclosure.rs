use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shooting::{OutcomeKind, ShotOutcome, Shooter, Trajectory};

/// Interval containing `lim_{r→∞}` of one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEnclosure {
    pub lower: f64,
    pub upper: f64,
    pub vanishes: bool,
}

impl LimitEnclosure {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lower..=self.upper).contains(&x)
    }
}

/// Log-log slope a component must reach over the last decade to count as decaying.
pub const DECAY_SLOPE: f64 = -0.05;

/// Fitted `d ln w / d ln r` of component `comp` (0 = u, 1 = v) between the last
/// sample and the last sample at or before a tenth of its radius.
pub fn decay_slope(traj: &Trajectory, comp: usize) -> Option<f64> {
    let last = traj.last();
    let probe = traj.sample_at_or_before(0.1 * last.r);
    if probe.r <= 0.0 || last.r / probe.r < 5.0 {
        return None;
    }
    let pick = |s: &crate::shooting::ShotState| if comp == 0 { s.u } else { s.v };
    let (a, b) = (pick(probe), pick(last));
    if !(a > 0.0 && b > 0.0) {
        return None;
    }
    Some((b / a).ln() / (last.r / probe.r).ln())
}

/// Complete profiles: the limit lies in `[0, w(H)]`; it is reported as
/// vanishing when `w(H)` is below the extinction threshold or still decays
/// like a power over the last decade.
pub fn complete_enclosure(traj: &Trajectory, comp: usize, initial: f64, extinction_ratio: f64) -> LimitEnclosure {
    let last = traj.last();
    let value = if comp == 0 { last.u } else { last.v };
    let extinct = value < extinction_ratio * initial;
    let decaying = decay_slope(traj, comp).is_some_and(|s| s <= DECAY_SLOPE);
    LimitEnclosure { lower: 0.0, upper: value, vanishes: extinct || decaying }
}

/// Incomplete profiles: `ℓ ∈ [w(H) - slack, w(H)]` with `slack = c ∫_H^∞ Θ`.
pub fn incomplete_enclosure(value: f64, slack: f64, initial: f64, extinction_ratio: f64) -> LimitEnclosure {
    LimitEnclosure { lower: (value - slack).max(0.0), upper: value, vanishes: value < extinction_ratio * initial }
}

/// Recomputes both limit enclosures of a positive shot.
///
/// For incomplete profiles the enclosure width `ξ^p ∫_H^∞ Θ` must not exceed
/// the shooter's certification width.
pub fn limit_enclosure(outcome: &ShotOutcome, shooter: &Shooter) -> Result<(LimitEnclosure, LimitEnclosure)> {
    let OutcomeKind::PositiveToHorizon { horizon, .. } = outcome.kind else {
        return Err(Error::InvalidInput(format!("limit enclosure needs a positive shot, got {}", outcome.kind.label())));
    };
    let (xi, eta) = (outcome.xi, outcome.eta);
    let ratio = shooter.config.extinction_ratio;
    if shooter.is_complete() {
        let t = &outcome.trajectory;
        return Ok((complete_enclosure(t, 0, xi, ratio), complete_enclosure(t, 1, eta, ratio)));
    }
    let tail = match &outcome.tail {
        Some(t) => t.theta_tail_end,
        None => shooter.profile.theta_tail(horizon)?,
    };
    let (u, v) = outcome.final_values();
    let (su, sv) = (eta.powf(shooter.exps.q) * tail, xi.powf(shooter.exps.p) * tail);
    let requested = shooter.config.certification_width;
    let width = su.max(sv);
    if width > requested {
        return Err(Error::EnclosureTooWide { width, requested });
    }
    Ok((incomplete_enclosure(u, su, xi, ratio), incomplete_enclosure(v, sv, eta, ratio)))
}

/// `ln(u(r) v(r) / ∫_r^∞ ψ^{1-n})` at each sample, the quantity bounded below on
/// positive solutions over incomplete models. Entries are `None` where the
/// tail integral is unavailable.
pub fn product_statistic(outcome: &ShotOutcome, shooter: &Shooter) -> Vec<(f64, Option<f64>)> {
    let profile = &shooter.profile;
    let k = (profile.n - 1) as f64;
    outcome
        .trajectory
        .samples
        .iter()
        .filter(|s| s.r > 0.0 && s.u > 0.0 && s.v > 0.0)
        .map(|s| {
            let stat = profile
                .inverse_volume_tail_scaled(s.r)
                .map(|g| s.u.ln() + s.v.ln() + k * profile.warp.ln_psi(s.r) - g.ln());
            (s.r, stat)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::ManifoldProfile;
    use crate::shooting::{ExponentPair, IntegratorConfig};

    #[test]
    fn symmetric_data_give_identical_enclosures() {
        for m in [ManifoldProfile::euclidean(3).unwrap(), ManifoldProfile::exp_power(3.0, 3).unwrap()] {
            let sh = Shooter::new(&m, ExponentPair::new(5.0, 5.0, 3).unwrap(), IntegratorConfig::default()).unwrap();
            let out = sh.shoot(1.0, 1.0).unwrap();
            let (lu, lv) = limit_enclosure(&out, &sh).unwrap();
            assert_eq!(lu, lv, "{}", m.name);
        }
    }

    #[test]
    fn flat_global_shot_vanishes() {
        let m = ManifoldProfile::euclidean(3).unwrap();
        let sh = Shooter::new(&m, ExponentPair::new(5.0, 5.0, 3).unwrap(), IntegratorConfig::default()).unwrap();
        let out = sh.shoot(2.0, 2.0).unwrap();
        let (lu, lv) = limit_enclosure(&out, &sh).unwrap();
        assert!(lu.vanishes && lv.vanishes);
        let slope = decay_slope(&out.trajectory, 0).unwrap();
        assert!((slope + 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn rejects_zero_outcomes() {
        let m = ManifoldProfile::euclidean(3).unwrap();
        let sh = Shooter::new(&m, ExponentPair::new(5.0, 5.0, 3).unwrap(), IntegratorConfig::default()).unwrap();
        let out = sh.shoot(1.0, 3.0).unwrap();
        assert!(limit_enclosure(&out, &sh).is_err());
    }
}
