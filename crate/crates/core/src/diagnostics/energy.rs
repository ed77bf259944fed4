//! Energy integrals per unit solid angle:
//!
//! ```text
//! I_mixed(R) = ∫₀^R u'v' ψ^{n-1},  I_u(R) = ∫₀^R u^{p+1} ψ^{n-1},  I_v(R) = ∫₀^R v^{q+1} ψ^{n-1}.
//! ```
//!
//! Integrating by parts against the flux identity gives
//! `I_v = I_mixed - ψ^{n-1} u' v` and `I_u = I_mixed - ψ^{n-1} v' u` at every `R`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::ManifoldProfile;
use crate::shooting::{ExponentPair, Trajectory};

/// `∫₀^∞ (1 + r²/3)^{-3} r² dr = 3√3π/16`, the energy of the three-dimensional
/// Aubin-Talenti profile.
pub const EUCLIDEAN_CRITICAL_ENERGY: f64 = 1.020_262_142_381_747_5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyCheckpoint {
    pub r: f64,
    pub i_mixed: f64,
    pub i_u: f64,
    pub i_v: f64,
    /// `|I_v - (I_mixed - ψ^{n-1}u'v)| / |I_v|`.
    pub residual_v: f64,
    /// `|I_u - (I_mixed - ψ^{n-1}v'u)| / |I_u|`.
    pub residual_u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyLedger {
    pub checkpoints: Vec<EnergyCheckpoint>,
}

impl EnergyLedger {
    pub fn max_residual(&self) -> f64 {
        self.checkpoints.iter().map(|c| c.residual_u.max(c.residual_v)).fold(0.0, f64::max)
    }

    pub fn last(&self) -> Option<&EnergyCheckpoint> {
        self.checkpoints.last()
    }
}

/// Cumulative energy integrals at the requested radii (sorted internally).
pub fn energy_ledger(
    traj: &Trajectory,
    profile: &ManifoldProfile,
    exps: &ExponentPair,
    checkpoints: &[f64],
) -> Result<EnergyLedger> {
    let mut radii: Vec<f64> = checkpoints.to_vec();
    radii.sort_by(f64::total_cmp);
    if let Some(&r) = radii.last() {
        if r > traj.horizon {
            return Err(Error::InvalidInput(format!(
                "checkpoint {r} lies beyond the trajectory horizon {}",
                traj.horizon
            )));
        }
    }
    let (p, q) = (exps.p, exps.q);
    let quad = profile.quadrature.with_abs_tol(1e-300);
    let eval = |s: f64| traj.eval(s).expect("dense trajectory");
    let density = |s: f64| if s <= 0.0 { 0.0 } else { profile.volume_density(s) };

    let mut out = Vec::with_capacity(radii.len());
    let (mut im, mut iu, mut iv) = (0.0, 0.0, 0.0);
    let mut prev = 0.0;
    for r in radii {
        if r <= 0.0 {
            out.push(EnergyCheckpoint { r, i_mixed: 0.0, i_u: 0.0, i_v: 0.0, residual_u: 0.0, residual_v: 0.0 });
            continue;
        }
        let mut knots = vec![prev];
        knots.extend(traj.samples.iter().map(|s| s.r).filter(|&s| s > prev && s < r));
        knots.push(r);
        im += quad.integrate_points(|s| { let st = eval(s); st.du * st.dv * density(s) }, &knots)?.value;
        iu += quad.integrate_points(|s| eval(s).u.abs().powf(p + 1.0) * density(s), &knots)?.value;
        iv += quad.integrate_points(|s| eval(s).v.abs().powf(q + 1.0) * density(s), &knots)?.value;
        let st = eval(r);
        let w = density(r);
        let rel = |lhs: f64, rhs: f64| if lhs == 0.0 { (lhs - rhs).abs() } else { ((lhs - rhs) / lhs).abs() };
        out.push(EnergyCheckpoint {
            r,
            i_mixed: im,
            i_u: iu,
            i_v: iv,
            residual_v: rel(iv, im - w * st.du * st.v),
            residual_u: rel(iu, im - w * st.dv * st.u),
        });
        prev = r;
    }
    Ok(EnergyLedger { checkpoints: out })
}

/// Finite-horizon reading of "the mixed energy diverges".
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceVerdict {
    pub increasing: bool,
    /// First checkpoint where `I_mixed` exceeds `multiple × reference`.
    pub exceeds_at: Option<f64>,
    /// `d ln I_mixed / d ln R` over the last decade of checkpoints.
    pub last_decade_slope: Option<f64>,
    pub diverges: bool,
}

/// Minimum last-decade log-log slope for a growing integral to count as not flattening.
pub const FLATTENING_SLOPE: f64 = 0.05;

pub fn divergence_verdict(ledger: &EnergyLedger, reference: f64, multiple: f64) -> DivergenceVerdict {
    let cps = &ledger.checkpoints;
    let increasing = cps.windows(2).all(|w| w[1].i_mixed > w[0].i_mixed);
    let exceeds_at = cps.iter().find(|c| c.i_mixed > multiple * reference).map(|c| c.r);
    let last_decade_slope = cps.last().and_then(|last| {
        let probe = cps.iter().rev().find(|c| c.r <= 0.1 * last.r && c.i_mixed > 0.0)?;
        Some((last.i_mixed / probe.i_mixed).ln() / (last.r / probe.r).ln())
    });
    let diverges = increasing && exceeds_at.is_some() && last_decade_slope.is_some_and(|s| s >= FLATTENING_SLOPE);
    DivergenceVerdict { increasing, exceeds_at, last_decade_slope, diverges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shooting::{IntegratorConfig, Shooter};

    #[test]
    fn reference_constant_matches_closed_form() {
        let exact = 3.0 * 3f64.sqrt() * std::f64::consts::PI / 16.0;
        assert!((EUCLIDEAN_CRITICAL_ENERGY - exact).abs() < 1e-15);
    }

    #[test]
    fn small_radius_integrals_vanish() {
        let m = ManifoldProfile::euclidean(3).unwrap();
        let e = ExponentPair::new(5.0, 5.0, 3).unwrap();
        let sh = Shooter::new(&m, e, IntegratorConfig { horizon: Some(10.0), ..Default::default() }).unwrap();
        let out = sh.shoot(1.0, 1.05).unwrap();
        let reach = out.trajectory.horizon;
        let led = energy_ledger(&out.trajectory, &m, &e, &[1e-3, 1e-2, 1.0, 0.9 * reach]).unwrap();
        assert!(led.checkpoints[0].i_u < 1e-9 && led.checkpoints[0].i_mixed < 1e-9);
        assert!(led.max_residual() < 1e-8, "{:?}", led);
        for c in &led.checkpoints {
            assert!(c.i_mixed <= c.i_u + 1e-14 && c.i_mixed <= c.i_v + 1e-14);
        }
    }
}
