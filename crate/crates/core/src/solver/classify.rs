use serde::{Deserialize, Serialize};

use crate::diagnostics::LimitEnclosure;
use crate::error::{Error, Result};
use crate::manifold::Convexity;
use crate::shooting::{IntegratorConfig, OutcomeKind, Recording, Regime, ShotOutcome, Shooter};

/// Horizon of the follow-up shot that resolves a positive shot on a complete profile.
pub const RESOLVE_HORIZON: f64 = 1e12;
/// Step budget of the follow-up shot.
pub const RESOLVE_MAX_STEPS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotClass {
    /// `u` vanishes first.
    A,
    /// `v` vanishes first.
    B,
    GlobalProxy,
    /// Positive at the horizon without passing the proxy test.
    Undecided,
}

impl ShotClass {
    pub fn label(&self) -> &'static str {
        match self {
            ShotClass::A => "A",
            ShotClass::B => "B",
            ShotClass::GlobalProxy => "global",
            ShotClass::Undecided => "undecided",
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ShotClass::A | ShotClass::B)
    }
}

/// How a class was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    /// The first shot decided.
    Direct,
    /// A longer follow-up shot found the zero.
    Extended,
    /// `p = q` and the follow-up stayed positive: `v - u` keeps the sign of
    /// `η - ξ` and grows, so the smaller component is the one that vanishes.
    Lean,
}

/// Serializable digest of one shot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotSummary {
    pub xi: f64,
    pub eta: f64,
    pub class: ShotClass,
    pub resolution: Resolution,
    pub outcome: OutcomeKind,
    pub reach: f64,
    pub steps: usize,
}

impl ShotSummary {
    pub fn limits(&self) -> Option<(LimitEnclosure, LimitEnclosure)> {
        match self.outcome {
            OutcomeKind::PositiveToHorizon { limit_u, limit_v, .. } => Some((limit_u, limit_v)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Classified {
    pub class: ShotClass,
    pub resolution: Resolution,
    pub outcome: ShotOutcome,
}

impl Classified {
    /// Classifies a single shot without any follow-up.
    pub fn direct(outcome: ShotOutcome) -> Self {
        let class = zero_class(&outcome.kind).unwrap_or(if outcome.global_proxy {
            ShotClass::GlobalProxy
        } else {
            ShotClass::Undecided
        });
        Classified { class, resolution: Resolution::Direct, outcome }
    }

    pub fn summary(&self) -> ShotSummary {
        ShotSummary {
            xi: self.outcome.xi,
            eta: self.outcome.eta,
            class: self.class,
            resolution: self.resolution,
            outcome: self.outcome.kind,
            reach: self.outcome.reach(),
            steps: self.outcome.steps,
        }
    }
}

/// Sorts shots into `A`, `B` and the globally positive proxy.
///
/// On complete profiles a positive shot is fired again to [`RESOLVE_HORIZON`]
/// before it may count as global: near the curve the first zero moves out like
/// a negative power of the distance to it.
#[derive(Debug, Clone)]
pub struct Classifier {
    pub shooter: Shooter,
    extended: Shooter,
}

impl Classifier {
    pub fn new(shooter: &Shooter) -> Self {
        let base = shooter.with_config(IntegratorConfig { recording: Recording::Sparse, ..shooter.config });
        let extended = shooter.with_config(IntegratorConfig {
            horizon: Some(RESOLVE_HORIZON.max(shooter.horizon())),
            stop_at_extinction: false,
            soft_step_budget: true,
            max_steps: RESOLVE_MAX_STEPS.min(shooter.config.max_steps),
            recording: Recording::Sparse,
            ..shooter.config
        });
        Classifier { shooter: base, extended }
    }

    pub fn classify(&self, xi: f64, eta: f64) -> Result<Classified> {
        let first = Classified::direct(self.shooter.shoot(xi, eta)?);
        if first.class.is_zero() || !self.shooter.is_complete() {
            return Ok(first);
        }
        let long = self.extended.shoot(xi, eta)?;
        if let Some(class) = zero_class(&long.kind) {
            return Ok(Classified { class, resolution: Resolution::Extended, outcome: long });
        }
        let exps = &self.shooter.exps;
        if exps.p == exps.q {
            let (u, v) = long.final_values();
            if u < v {
                return Ok(Classified { class: ShotClass::A, resolution: Resolution::Lean, outcome: long });
            }
            if v < u {
                return Ok(Classified { class: ShotClass::B, resolution: Resolution::Lean, outcome: long });
            }
        }
        Ok(first)
    }
}

fn zero_class(kind: &OutcomeKind) -> Option<ShotClass> {
    match kind {
        OutcomeKind::FirstZeroU { .. } => Some(ShotClass::A),
        OutcomeKind::FirstZeroV { .. } => Some(ShotClass::B),
        OutcomeKind::PositiveToHorizon { .. } => None,
    }
}

/// Checks the structural hypotheses of the existence theorems. Returns whether
/// the bracket invariants are enforced (false in the subcritical regime).
pub(crate) fn check_preconditions(shooter: &Shooter, want_complete: bool) -> Result<bool> {
    let complete = shooter.is_complete();
    if complete != want_complete {
        return Err(Error::CompletenessMismatch(if complete {
            format!("profile {} is stochastically complete; use curve", shooter.profile.name)
        } else {
            format!("profile {} is stochastically incomplete; use band", shooter.profile.name)
        }));
    }
    if shooter.exps.regime == Regime::Subcritical {
        log::warn!(
            "(p, q) = ({}, {}) is subcritical in dimension {}: the existence theorems do not apply and bracket invariants are not enforced",
            shooter.exps.p,
            shooter.exps.q,
            shooter.exps.n
        );
        return Ok(false);
    }
    if let Convexity::NonConvex { witness } = shooter.profile.check_volume_convexity(&shooter.exps)? {
        return Err(Error::VolumeNotConvex { witness });
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::ManifoldProfile;
    use crate::shooting::ExponentPair;

    fn classifier(m: &ManifoldProfile, p: f64, q: f64) -> Classifier {
        let sh = Shooter::new(m, ExponentPair::new(p, q, 3).unwrap(), IntegratorConfig::default()).unwrap();
        Classifier::new(&sh)
    }

    #[test]
    fn near_diagonal_shots_are_resolved_on_flat_space() {
        let c = classifier(&ManifoldProfile::euclidean(3).unwrap(), 5.0, 5.0);
        assert_eq!(c.classify(1.0, 1.0 + 1e-6).unwrap().class, ShotClass::A);
        assert_eq!(c.classify(1.0, 1.0 - 1e-6).unwrap().class, ShotClass::B);
        let on = c.classify(1.0, 1.0).unwrap();
        assert_eq!(on.class, ShotClass::GlobalProxy);
        assert_eq!(on.resolution, Resolution::Direct);
    }

    #[test]
    fn unequal_exponents_resolve_by_extension() {
        let q = ExponentPair::critical_partner(4.0, 3).unwrap();
        let c = classifier(&ManifoldProfile::euclidean(3).unwrap(), 4.0, q);
        let hi = c.classify(1.0, 5.0).unwrap();
        assert_eq!(hi.class, ShotClass::A);
        assert_eq!(hi.resolution, Resolution::Direct);
    }

    #[test]
    fn incomplete_profiles_use_the_certified_tail() {
        let c = classifier(&ManifoldProfile::exp_power(3.0, 3).unwrap(), 5.0, 5.0);
        let mid = c.classify(1.0, 1.0).unwrap();
        assert_eq!(mid.class, ShotClass::GlobalProxy);
        assert_eq!(c.classify(1.0, 4.0).unwrap().class, ShotClass::A);
    }

    #[test]
    fn curve_command_rejects_incomplete_profiles() {
        let m = ManifoldProfile::exp_power(3.0, 3).unwrap();
        let sh = Shooter::new(&m, ExponentPair::new(5.0, 5.0, 3).unwrap(), IntegratorConfig::default()).unwrap();
        let err = check_preconditions(&sh, true).unwrap_err();
        assert!(err.to_string().contains("use band"), "{err}");
    }
}
