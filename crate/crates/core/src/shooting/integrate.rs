use crate::diagnostics::enclosure::{complete_enclosure, incomplete_enclosure};
use crate::error::{Error, Result};
use crate::manifold::{GeometricSummary, ManifoldProfile};
use crate::ode::{DenseStep, Dopri5, StepControl};

use super::tail::{continue_tail, TailEnd};
use super::{
    signed_pow, ExponentPair, IntegratorConfig, OutcomeKind, Recording, SeriesStart, ShotOutcome, ShotState,
    StopReason, Trajectory, COMPLETE_HORIZON,
};

/// Spacing factor between kept samples in sparse recording.
const SPARSE_FACTOR: f64 = 1.02;

/// Quasi-static handoff thresholds for incomplete profiles.
const HANDOFF_THETA_SQ: f64 = 2e-5;
const HANDOFF_THETA_SLOPE: f64 = 1e-2;
const HANDOFF_EPSILON: f64 = 1e-4;
const HANDOFF_LN_VOLUME: f64 = 650.0;

/// Second-order start at `r0`: `u = ξ - η^q r0²/(2n)`, `u' = -η^q r0/n`, and symmetrically.
pub fn origin_series(profile: &ManifoldProfile, exps: &ExponentPair, xi: f64, eta: f64, r0: f64) -> Result<ShotState> {
    check_data(xi, eta)?;
    if !(r0 > 0.0) {
        return Err(Error::InvalidInput(format!("series radius must be positive, got {r0}")));
    }
    let s = SeriesStart { xi, eta, p: exps.p, q: exps.q, n: profile.n as f64, r0 };
    Ok(ShotState::from_array(r0, s.eval(r0)))
}

fn check_data(xi: f64, eta: f64) -> Result<()> {
    if !(xi > 0.0 && eta > 0.0 && xi.is_finite() && eta.is_finite()) {
        return Err(Error::InvalidInput(format!("initial data must be positive, got ξ = {xi}, η = {eta}")));
    }
    Ok(())
}

/// Integrates one shot with a fresh [`Shooter`].
pub fn integrate_shot(
    profile: &ManifoldProfile,
    exps: &ExponentPair,
    xi: f64,
    eta: f64,
    config: &IntegratorConfig,
) -> Result<ShotOutcome> {
    Shooter::new(profile, *exps, *config)?.shoot(xi, eta)
}

/// A profile, its summary, an exponent pair and an integrator configuration:
/// everything needed to fire shots repeatedly.
#[derive(Debug, Clone)]
pub struct Shooter {
    pub profile: ManifoldProfile,
    pub summary: GeometricSummary,
    pub exps: ExponentPair,
    pub config: IntegratorConfig,
}

enum Crossing {
    U,
    V,
}

impl Shooter {
    pub fn new(profile: &ManifoldProfile, exps: ExponentPair, config: IntegratorConfig) -> Result<Self> {
        let summary = profile.summary()?;
        Self::with_summary(profile, summary, exps, config)
    }

    pub fn with_summary(
        profile: &ManifoldProfile,
        summary: GeometricSummary,
        exps: ExponentPair,
        config: IntegratorConfig,
    ) -> Result<Self> {
        if profile.n != exps.n {
            return Err(Error::InvalidInput(format!(
                "profile dimension {} differs from exponent dimension {}",
                profile.n, exps.n
            )));
        }
        if let Some(h) = config.horizon {
            if !(h > 0.0) {
                return Err(Error::InvalidInput(format!("horizon must be positive, got {h}")));
            }
        }
        Ok(Shooter { profile: profile.clone(), summary, exps, config })
    }

    pub fn with_config(&self, config: IntegratorConfig) -> Self {
        Shooter { config, ..self.clone() }
    }

    pub fn is_complete(&self) -> bool {
        self.summary.is_complete()
    }

    pub fn r0(&self, xi: f64, eta: f64) -> f64 {
        let big = 1f64.max(xi).max(eta);
        self.config.r0_scale * big.powf(-0.5 * self.exps.p.max(self.exps.q))
    }

    /// Horizon in effect: explicit, `1e3` for complete profiles, unbounded
    /// (tail-certified) for incomplete ones.
    pub fn horizon(&self) -> f64 {
        self.config
            .horizon
            .unwrap_or(if self.is_complete() { COMPLETE_HORIZON } else { f64::INFINITY })
    }

    fn rhs(&self) -> impl FnMut(f64, &[f64; 4]) -> [f64; 4] + '_ {
        let (p, q) = (self.exps.p, self.exps.q);
        move |r, y| {
            let lambda = self.profile.mean_curvature(r);
            [y[2], y[3], -lambda * y[2] - signed_pow(y[1], q), -lambda * y[3] - signed_pow(y[0], p)]
        }
    }

    /// Fires one shot from `(ξ, η)`.
    pub fn shoot(&self, xi: f64, eta: f64) -> Result<ShotOutcome> {
        check_data(xi, eta)?;
        let cfg = &self.config;
        let (p, q) = (self.exps.p, self.exps.q);
        let r0 = self.r0(xi, eta);
        let series = SeriesStart { xi, eta, p, q, n: self.profile.n as f64, r0 };
        let y0 = series.eval(r0);
        let horizon = self.horizon();
        let margin = cfg.positivity_margin * xi.max(eta);
        let full = cfg.recording == Recording::Full;

        let mut traj = Trajectory {
            samples: vec![ShotState::from_array(0.0, series.eval(0.0)), ShotState::from_array(r0, y0)],
            steps: Vec::new(),
            horizon: r0,
            series: Some(series),
        };
        let control = StepControl {
            rel_tol: cfg.rel_tol,
            abs_tol: cfg.abs_tol,
            max_steps: cfg.max_steps,
            ..Default::default()
        };
        let mut stepper = Dopri5::new(self.rhs(), r0, y0, control);
        let mut next_sparse = r0 * SPARSE_FACTOR;
        let incomplete = !self.is_complete();

        let stop = loop {
            let step = match stepper.step(horizon) {
                Ok(s) => s,
                Err(Error::MaxStepsExceeded { .. }) if cfg.soft_step_budget => break StopReason::StepBudget,
                Err(e) => return Err(e),
            };
            let y = step.end();
            let r1 = step.t1();

            if y[0] <= 0.0 || y[1] <= 0.0 {
                let (r_star, which) = first_crossing(&step, y);
                let at = step.eval(r_star);
                if full {
                    traj.steps.push(step);
                }
                traj.samples.push(ShotState::from_array(r_star, at));
                traj.horizon = r_star;
                let kind = self.zero_kind(which, r_star, at[0], at[1], margin)?;
                return Ok(ShotOutcome {
                    xi,
                    eta,
                    kind,
                    trajectory: traj,
                    tail: None,
                    global_proxy: false,
                    steps: stepper.accepted,
                });
            }

            if full || r1 >= next_sparse || r1 >= horizon {
                traj.samples.push(ShotState::from_array(r1, y));
                next_sparse = r1 * SPARSE_FACTOR;
            }
            if full {
                traj.steps.push(step);
            }
            traj.horizon = r1;

            if r1 >= horizon {
                break StopReason::Horizon;
            }
            if !incomplete
                && cfg.stop_at_extinction
                && y[0] < cfg.extinction_ratio * xi
                && y[1] < cfg.extinction_ratio * eta
            {
                break StopReason::Extinction;
            }
            if incomplete && self.handoff_ready(r1, &y)? {
                return self.finish_with_tail(xi, eta, traj, stepper.accepted, margin);
            }
        };

        if traj.last().r < traj.horizon {
            traj.samples.push(ShotState::from_array(traj.horizon, stepper.y()));
        }
        let (limit_u, limit_v, global_proxy) = if incomplete {
            let t = self.profile.theta_tail(traj.horizon)?;
            let s = traj.last();
            let lu = incomplete_enclosure(s.u, eta.powf(q) * t, xi, cfg.extinction_ratio);
            let lv = incomplete_enclosure(s.v, xi.powf(p) * t, eta, cfg.extinction_ratio);
            let ok = lu.width() <= cfg.certification_width && lv.width() <= cfg.certification_width;
            (lu, lv, ok)
        } else {
            let lu = complete_enclosure(&traj, 0, xi, cfg.extinction_ratio);
            let lv = complete_enclosure(&traj, 1, eta, cfg.extinction_ratio);
            let ok = lu.vanishes && lv.vanishes;
            (lu, lv, ok)
        };
        Ok(ShotOutcome {
            xi,
            eta,
            kind: OutcomeKind::PositiveToHorizon { horizon: traj.horizon, stop, limit_u, limit_v },
            trajectory: traj,
            tail: None,
            global_proxy,
            steps: stepper.accepted,
        })
    }

    fn zero_kind(&self, which: Crossing, r: f64, u: f64, v: f64, margin: f64) -> Result<OutcomeKind> {
        match which {
            Crossing::U if v > margin => Ok(OutcomeKind::FirstZeroU { r, v_at_r: v }),
            Crossing::V if u > margin => Ok(OutcomeKind::FirstZeroV { r, u_at_r: u }),
            _ => Err(Error::SimultaneousZero { r, u, v }),
        }
    }

    /// True once the remaining evolution is slaved to the local source terms.
    fn handoff_ready(&self, r: f64, y: &[f64; 4]) -> Result<bool> {
        let lambda = self.profile.mean_curvature(r);
        if !(lambda * lambda * HANDOFF_THETA_SQ >= 1.0) {
            return Ok(false);
        }
        if (self.profile.n - 1) as f64 * self.profile.warp.ln_psi(r) >= HANDOFF_LN_VOLUME {
            return Ok(true);
        }
        let theta = self.profile.theta(r)?;
        if theta * theta > HANDOFF_THETA_SQ || (1.0 - lambda * theta).abs() > HANDOFF_THETA_SLOPE {
            return Ok(false);
        }
        let (p, q) = (self.exps.p, self.exps.q);
        let (u, v) = (y[0], y[1]);
        let (uq, vq) = (u.powf(p), v.powf(q));
        let eps = theta * theta * (q * v.powf(q - 1.0) * uq + p * u.powf(p - 1.0) * vq) / (vq + uq);
        Ok(eps <= HANDOFF_EPSILON)
    }

    fn finish_with_tail(
        &self,
        xi: f64,
        eta: f64,
        traj: Trajectory,
        steps: usize,
        margin: f64,
    ) -> Result<ShotOutcome> {
        let last = *traj.last();
        let cfg = &self.config;
        let (tail, end) = continue_tail(self, xi, eta, &last, margin)?;
        let (kind, global_proxy) = match end {
            TailEnd::ZeroU { r, v } => (OutcomeKind::FirstZeroU { r, v_at_r: v }, false),
            TailEnd::ZeroV { r, u } => (OutcomeKind::FirstZeroV { r, u_at_r: u }, false),
            TailEnd::Certified => {
                let (u, v) = tail.end_values();
                let t = tail.theta_tail_end;
                let lu = incomplete_enclosure(u, eta.powf(self.exps.q) * t, xi, cfg.extinction_ratio);
                let lv = incomplete_enclosure(v, xi.powf(self.exps.p) * t, eta, cfg.extinction_ratio);
                let ok = lu.width() <= cfg.certification_width && lv.width() <= cfg.certification_width;
                let kind = OutcomeKind::PositiveToHorizon {
                    horizon: tail.end,
                    stop: StopReason::TailCertified,
                    limit_u: lu,
                    limit_v: lv,
                };
                (kind, ok)
            }
        };
        let steps = steps + tail.steps;
        Ok(ShotOutcome { xi, eta, kind, trajectory: traj, tail: Some(tail), global_proxy, steps })
    }

    /// `max_r |ψ^{n-1}u' + ∫₀^r |v|^{q-1}v ψ^{n-1}| / (1 + |ψ^{n-1}u'|)` and the `v` analogue over
    /// the given radii, with the source integral evaluated on the dense output.
    pub fn flux_residual(&self, traj: &Trajectory, radii: &[f64]) -> Result<f64> {
        let (p, q) = (self.exps.p, self.exps.q);
        let quad = self.profile.quadrature.with_abs_tol(1e-300);
        let mut worst: f64 = 0.0;
        let mut prev = 0.0;
        let (mut iu, mut iv) = (0.0, 0.0);
        let mut sorted: Vec<f64> = radii.to_vec();
        sorted.sort_by(f64::total_cmp);
        for r in sorted {
            if r <= prev || r > traj.horizon {
                continue;
            }
            let mut knots = vec![prev];
            knots.extend(traj.samples.iter().map(|s| s.r).filter(|&s| s > prev && s < r));
            knots.push(r);
            let src = |comp: usize, e: f64| {
                move |s: f64| {
                    let st = traj.eval(s).expect("dense trajectory");
                    let w = if comp == 0 { st.v } else { st.u };
                    signed_pow(w, e) * self.profile.volume_density(s)
                }
            };
            iu += quad.integrate_points(src(0, q), &knots)?.value;
            iv += quad.integrate_points(src(1, p), &knots)?.value;
            let st = traj.eval(r).expect("dense trajectory");
            let (pu, pv) = st.fluxes(&self.profile);
            worst = worst.max((pu + iu).abs() / (1.0 + pu.abs())).max((pv + iv).abs() / (1.0 + pv.abs()));
            prev = r;
        }
        Ok(worst)
    }
}

/// Bisects the dense interpolant of component `i` for its zero on the step.
pub(crate) fn bisect_zero<const N: usize>(step: &DenseStep<N>, i: usize) -> f64 {
    let (mut a, mut b) = (step.t0, step.t1());
    let tol = 1e-10 * b.abs().max(1.0);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if step.eval_component(m, i) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    b
}

fn first_crossing(step: &DenseStep<4>, y: [f64; 4]) -> (f64, Crossing) {
    let ru = (y[0] <= 0.0).then(|| bisect_zero(step, 0));
    let rv = (y[1] <= 0.0).then(|| bisect_zero(step, 1));
    match (ru, rv) {
        (Some(a), Some(b)) if b < a => (b, Crossing::V),
        (Some(a), _) => (a, Crossing::U),
        (None, Some(b)) => (b, Crossing::V),
        (None, None) => unreachable!("called without a sign change"),
    }
}
