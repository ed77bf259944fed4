//! Quasi-static continuation for stochastically incomplete profiles.
//!
//! Far out on a fast-growing profile the drift `λ = (n-1)ψ'/ψ` is huge and the
//! slopes relax to their local equilibrium within `O(1/λ)`. Integrating the
//! flux identity by parts gives
//!
//! ```text
//! u' = -Θ v^q - Θ³ q v^{q-1} u^p + …,   v' = -Θ u^p - Θ³ p u^{p-1} v^q + …,
//! ```
//!
//! a first-order system that is not stiff and never touches `ψ^{n-1}`. The
//! mismatch between the true slope and the quasi-static one at the handoff
//! decays across a boundary layer of width `Θ`; its integrated effect is added
//! to `(u, v)` once.

use std::cell::RefCell;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{DenseStep, Dopri5, StepControl};

use super::integrate::{bisect_zero, Shooter};
use super::ShotState;

/// Tail integration record, kept apart from the resolved trajectory samples.
#[derive(Debug, Clone, Serialize)]
pub struct TailContinuation {
    pub start: f64,
    pub end: f64,
    /// Boundary-layer shifts applied to `(u, v)` at the handoff.
    pub correction: (f64, f64),
    /// `∫_end^∞ Θ`.
    pub theta_tail_end: f64,
    /// `(r, u, v)` at each accepted step.
    pub samples: Vec<(f64, f64, f64)>,
    #[serde(skip)]
    pub dense: Vec<DenseStep<2>>,
    pub steps: usize,
}

impl TailContinuation {
    pub fn end_values(&self) -> (f64, f64) {
        let &(_, u, v) = self.samples.last().expect("tail has samples");
        (u, v)
    }

    /// `(u, v)` at `r` inside the tail.
    pub fn eval(&self, r: f64) -> Option<(f64, f64)> {
        if !(self.start..=self.end).contains(&r) || self.dense.is_empty() {
            return None;
        }
        let k = self.dense.partition_point(|s| s.t1() < r).min(self.dense.len() - 1);
        let y = self.dense[k].eval(r);
        Some((y[0], y[1]))
    }
}

pub(crate) enum TailEnd {
    ZeroU { r: f64, v: f64 },
    ZeroV { r: f64, u: f64 },
    Certified,
}

fn source(a: f64, b: f64, ea: f64, eb: f64, theta_sq: f64) -> f64 {
    // -(b^eb) - Θ² eb b^{eb-1} a^ea, keeping only the leading term when eb < 1
    let lead = b.max(0.0).powf(eb);
    if eb < 1.0 || b <= 0.0 {
        return -lead;
    }
    -lead - theta_sq * eb * b.powf(eb - 1.0) * a.max(0.0).powf(ea)
}

/// Radius beyond which `max(ξ^p, η^q) ∫_r^∞ Θ` is below the certification width,
/// together with that tail integral.
fn certification_radius(shooter: &Shooter, start: f64, coeff: f64) -> Result<(f64, f64)> {
    let profile = &shooter.profile;
    let width = shooter.config.certification_width;
    let mut r = start;
    let mut tail = profile.theta_tail(r)?;
    let mut guard = 0;
    while coeff * tail > width {
        let next = 2.0 * r;
        tail -= profile.theta_integral(r, next)?;
        r = next;
        guard += 1;
        if guard > 200 || !(r.is_finite()) {
            return Err(Error::EnclosureTooWide { width: coeff * tail, requested: width });
        }
    }
    if r > start {
        tail = profile.theta_tail(r)?;
    }
    Ok((r, tail))
}

pub(crate) fn continue_tail(
    shooter: &Shooter,
    xi: f64,
    eta: f64,
    last: &ShotState,
    margin: f64,
) -> Result<(TailContinuation, TailEnd)> {
    let profile = &shooter.profile;
    let (p, q) = (shooter.exps.p, shooter.exps.q);
    let h = last.r;
    let theta_h = profile.theta(h)?;
    let th2 = theta_h * theta_h;

    let a_u = last.du / theta_h;
    let a_v = last.dv / theta_h;
    let qs_u = source(last.u, last.v, p, q, th2);
    let qs_v = source(last.v, last.u, q, p, th2);
    let correction = ((a_u - qs_u) * th2, (a_v - qs_v) * th2);
    let y0 = [last.u + correction.0, last.v + correction.1];

    let coeff = xi.powf(p).max(eta.powf(q));
    let (r_cert, tail_cert) = certification_radius(shooter, h, coeff)?;
    let r_end = r_cert.min(shooter.config.horizon.unwrap_or(f64::INFINITY)).max(h);

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let rhs = |r: f64, y: &[f64; 2]| {
        let theta = profile.theta(r).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        });
        let t2 = theta * theta;
        [theta * source(y[0], y[1], p, q, t2), theta * source(y[1], y[0], q, p, t2)]
    };
    let control = StepControl {
        rel_tol: shooter.config.rel_tol,
        abs_tol: shooter.config.abs_tol,
        max_steps: shooter.config.max_steps,
        ..Default::default()
    };
    let mut stepper = Dopri5::new(rhs, h, y0, control);
    let mut tail = TailContinuation {
        start: h,
        end: h,
        correction,
        theta_tail_end: tail_cert,
        samples: vec![(h, y0[0], y0[1])],
        dense: Vec::new(),
        steps: 0,
    };
    let keep_dense = shooter.config.recording == super::Recording::Full;

    if y0[0] <= 0.0 || y0[1] <= 0.0 {
        return Err(Error::SimultaneousZero { r: h, u: y0[0], v: y0[1] });
    }

    while stepper.t() < r_end {
        let step = stepper.step(r_end);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        let step = step?;
        tail.steps += 1;
        let y = step.end();
        if y[0] <= 0.0 || y[1] <= 0.0 {
            let ru = (y[0] <= 0.0).then(|| bisect_zero(&step, 0));
            let rv = (y[1] <= 0.0).then(|| bisect_zero(&step, 1));
            let (r, which_u) = match (ru, rv) {
                (Some(a), Some(b)) if b < a => (b, false),
                (Some(a), _) => (a, true),
                (None, Some(b)) => (b, false),
                (None, None) => unreachable!(),
            };
            let at = step.eval(r);
            tail.samples.push((r, at[0], at[1]));
            tail.end = r;
            if keep_dense {
                tail.dense.push(step);
            }
            let end = match which_u {
                true if at[1] > margin => TailEnd::ZeroU { r, v: at[1] },
                false if at[0] > margin => TailEnd::ZeroV { r, u: at[0] },
                _ => return Err(Error::SimultaneousZero { r, u: at[0], v: at[1] }),
            };
            return Ok((tail, end));
        }
        tail.samples.push((step.t1(), y[0], y[1]));
        tail.end = step.t1();
        if keep_dense {
            tail.dense.push(step);
        }
    }
    if tail.end != r_cert {
        tail.theta_tail_end = profile.theta_tail(tail.end)?;
    }
    Ok((tail, TailEnd::Certified))
}
