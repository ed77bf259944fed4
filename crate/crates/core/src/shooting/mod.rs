//! Radial Cauchy problem from the pole and classification of single shots.
//!
//! A shot starts at `(u, v) = (ξ, η)` with zero slope and integrates
//!
//! ```text
//! u'' + (n-1)(ψ'/ψ) u' + |v|^{q-1} v = 0,
//! v'' + (n-1)(ψ'/ψ) v' + |u|^{p-1} u = 0,
//! ```
//!
//! until one component hits zero (set `A` for `u`, set `B` for `v`) or both
//! stay positive up to the horizon.

mod exponents;
mod integrate;
mod seeds;
mod tail;

use serde::{Deserialize, Serialize};

use crate::diagnostics::LimitEnclosure;
use crate::ode::DenseStep;

pub use exponents::{ExponentPair, Regime};
pub use integrate::{integrate_shot, origin_series, Shooter};
pub use seeds::{ab_seed_brackets, seed_thresholds, SeedBrackets};
pub use tail::TailContinuation;

/// `|x|^{e-1} x`.
#[inline]
pub fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(e).copysign(x)
    }
}

/// How much of the trajectory a shot keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recording {
    /// Every accepted step together with its dense-output coefficients.
    Full,
    /// Only geometrically spaced samples; enough for decay fits and verdicts.
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Final radius; `None` selects the profile-dependent default.
    pub horizon: Option<f64>,
    /// Multiplier in `r0 = r0_scale · max(1, ξ, η)^{-max(p,q)/2}`.
    pub r0_scale: f64,
    /// Relative positivity margin, scaled by `max(ξ, η)`.
    pub positivity_margin: f64,
    pub max_steps: usize,
    /// Complete profiles: stop once both components are below
    /// `extinction_ratio` times their initial value.
    pub stop_at_extinction: bool,
    pub extinction_ratio: f64,
    /// Incomplete profiles: requested width of the limit enclosures.
    pub certification_width: f64,
    /// Treat an exhausted step budget as reaching the horizon instead of an error.
    pub soft_step_budget: bool,
    pub recording: Recording,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            horizon: None,
            r0_scale: 1e-6,
            positivity_margin: 1e-12,
            max_steps: 2_000_000,
            stop_at_extinction: true,
            extinction_ratio: 1e-6,
            certification_width: 1e-8,
            soft_step_budget: false,
            recording: Recording::Full,
        }
    }
}

/// Default horizon for complete profiles.
pub const COMPLETE_HORIZON: f64 = 1e3;

/// One point of a trajectory.
///
/// `du`, `dv` are the radial derivatives; the weighted fluxes
/// `pu = ψ^{n-1} u'` and `pv = ψ^{n-1} v'` are available through
/// [`ShotState::fluxes`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotState {
    pub r: f64,
    pub u: f64,
    pub v: f64,
    pub du: f64,
    pub dv: f64,
}

impl ShotState {
    pub fn from_array(r: f64, y: [f64; 4]) -> Self {
        ShotState { r, u: y[0], v: y[1], du: y[2], dv: y[3] }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.u, self.v, self.du, self.dv]
    }

    /// `(pu, pv) = ψ^{n-1}(r) · (u', v')`; may overflow far out on fast-growing profiles.
    pub fn fluxes(&self, profile: &crate::manifold::ManifoldProfile) -> (f64, f64) {
        if self.r == 0.0 {
            return (0.0, 0.0);
        }
        let w = profile.volume_density(self.r);
        (w * self.du, w * self.dv)
    }
}

/// Ordered samples of a shot plus the dense interpolant between them.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub samples: Vec<ShotState>,
    /// Dense-output pieces; `steps[i]` covers `[samples[i+1].r, samples[i+2].r]`
    /// when recording is full (the first interval is the origin series).
    pub steps: Vec<DenseStep<4>>,
    pub horizon: f64,
    pub(crate) series: Option<SeriesStart>,
}

/// Second-order series used on `[0, r0]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesStart {
    pub xi: f64,
    pub eta: f64,
    pub p: f64,
    pub q: f64,
    pub n: f64,
    pub r0: f64,
}

impl SeriesStart {
    pub fn eval(&self, r: f64) -> [f64; 4] {
        let (a, b) = (self.eta.powf(self.q), self.xi.powf(self.p));
        let n = self.n;
        [self.xi - a * r * r / (2.0 * n), self.eta - b * r * r / (2.0 * n), -a * r / n, -b * r / n]
    }
}

impl Trajectory {
    pub fn first(&self) -> &ShotState {
        &self.samples[0]
    }

    pub fn last(&self) -> &ShotState {
        self.samples.last().expect("trajectory has samples")
    }

    pub fn is_dense(&self) -> bool {
        !self.steps.is_empty() || self.samples.len() <= 2
    }

    /// Dense evaluation of `(u, v, u', v')` at `r ∈ [0, horizon]`.
    ///
    /// Returns `None` outside the covered range or when only sparse samples were kept.
    pub fn eval(&self, r: f64) -> Option<ShotState> {
        if !(0.0..=self.horizon).contains(&r) {
            return None;
        }
        if let Some(series) = &self.series {
            if r <= series.r0 {
                return Some(ShotState::from_array(r, series.eval(r)));
            }
        }
        if self.steps.is_empty() {
            return None;
        }
        let idx = self.steps.partition_point(|s| s.t1() < r);
        let step = self.steps.get(idx).or_else(|| self.steps.last())?;
        Some(ShotState::from_array(r, step.eval(r)))
    }

    /// Samples restricted to `r <= r_max`.
    pub fn samples_up_to(&self, r_max: f64) -> &[ShotState] {
        let k = self.samples.partition_point(|s| s.r <= r_max);
        &self.samples[..k]
    }

    /// Sample closest to `r` from below (inclusive).
    pub fn sample_at_or_before(&self, r: f64) -> &ShotState {
        let k = self.samples.partition_point(|s| s.r <= r);
        &self.samples[k.saturating_sub(1)]
    }
}

/// Why a positive shot stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Horizon,
    Extinction,
    TailCertified,
    StepBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum OutcomeKind {
    /// `u` vanishes first at `r`: the initial datum lies in `A`.
    FirstZeroU { r: f64, v_at_r: f64 },
    /// `v` vanishes first at `r`: the initial datum lies in `B`.
    FirstZeroV { r: f64, u_at_r: f64 },
    PositiveToHorizon {
        horizon: f64,
        stop: StopReason,
        limit_u: LimitEnclosure,
        limit_v: LimitEnclosure,
    },
}

impl OutcomeKind {
    pub fn label(&self) -> &'static str {
        match self {
            OutcomeKind::FirstZeroU { .. } => "FirstZeroU",
            OutcomeKind::FirstZeroV { .. } => "FirstZeroV",
            OutcomeKind::PositiveToHorizon { .. } => "PositiveToHorizon",
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(self, OutcomeKind::PositiveToHorizon { .. })
    }
}

#[derive(Debug, Clone)]
pub struct ShotOutcome {
    pub xi: f64,
    pub eta: f64,
    pub kind: OutcomeKind,
    pub trajectory: Trajectory,
    pub tail: Option<TailContinuation>,
    /// True when the positive shot passes the globally-positive proxy test.
    pub global_proxy: bool,
    pub steps: usize,
}

impl ShotOutcome {
    /// Radius reached, including a tail continuation.
    pub fn reach(&self) -> f64 {
        match self.kind {
            OutcomeKind::FirstZeroU { r, .. } | OutcomeKind::FirstZeroV { r, .. } => r,
            OutcomeKind::PositiveToHorizon { horizon, .. } => horizon,
        }
    }

    /// Final `(u, v)` values including any tail continuation.
    pub fn final_values(&self) -> (f64, f64) {
        match &self.tail {
            Some(t) => t.end_values(),
            None => {
                let s = self.trajectory.last();
                (s.u, s.v)
            }
        }
    }
}
