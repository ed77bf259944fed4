//! Energy `F`, Pohozaev function `P` and kernel `K`.
//!
//! `P` and `K` carry a factor `ψ^{n-1}` that overflows on hyperbolic and
//! faster-growing models, so both are computed divided by `ψ^{n-1}(r)` and
//! rescaled only when representable:
//!
//! ```text
//! P/ψ^{n-1} = Θ F + u v'/(p+1) + u' v/(q+1)
//! K/ψ^{n-1} = gap - (2(n-1)/n) (ψ'/ψ) ψ^{1-n} ∫₀^r ψ^n ψ''/(ψ')²
//! ```

use serde::Serialize;

use crate::error::Result;
use crate::manifold::ManifoldProfile;
use crate::quadrature::gk15;
use crate::shooting::{ExponentPair, ShotState, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PohozaevSample {
    pub r: f64,
    pub energy: f64,
    pub pohozaev: f64,
    pub kernel: f64,
    /// `ln ψ^{n-1}(r)`.
    pub ln_volume: f64,
    pub pohozaev_scaled: f64,
    pub kernel_scaled: f64,
    /// `Θ|F| + |u v'|/(p+1) + |u' v|/(q+1)`: the size of the terms that cancel in `P/ψ^{n-1}`.
    pub term_scale: f64,
}

pub fn energy(s: &ShotState, exps: &ExponentPair) -> f64 {
    s.du * s.dv + s.u.abs().powf(exps.p + 1.0) / (exps.p + 1.0) + s.v.abs().powf(exps.q + 1.0) / (exps.q + 1.0)
}

fn kernel_scaled(profile: &ManifoldProfile, exps: &ExponentPair, r: f64) -> Result<f64> {
    let n = profile.n as f64;
    let l = profile.convexity_ratio(r)?;
    Ok(exps.criticality_gap() - 2.0 * (n - 1.0) / n * l * profile.warp.log_derivative(r))
}

fn rescale(scaled: f64, ln_volume: f64) -> f64 {
    if scaled == 0.0 {
        0.0
    } else {
        scaled * ln_volume.exp()
    }
}

fn sample(profile: &ManifoldProfile, exps: &ExponentPair, s: &ShotState) -> Result<PohozaevSample> {
    let f = energy(s, exps);
    if s.r == 0.0 {
        return Ok(PohozaevSample {
            r: 0.0,
            energy: f,
            pohozaev: 0.0,
            kernel: 0.0,
            ln_volume: f64::NEG_INFINITY,
            pohozaev_scaled: 0.0,
            kernel_scaled: 0.0,
            term_scale: 0.0,
        });
    }
    let (p, q) = (exps.p, exps.q);
    let theta = profile.theta(s.r)?;
    let (t1, t2, t3) = (theta * f, s.u * s.dv / (p + 1.0), s.du * s.v / (q + 1.0));
    let ps = t1 + t2 + t3;
    let ks = kernel_scaled(profile, exps, s.r)?;
    let lv = (profile.n - 1) as f64 * profile.warp.ln_psi(s.r);
    Ok(PohozaevSample {
        r: s.r,
        energy: f,
        pohozaev: rescale(ps, lv),
        kernel: rescale(ks, lv),
        ln_volume: lv,
        pohozaev_scaled: ps,
        kernel_scaled: ks,
        term_scale: t1.abs() + t2.abs() + t3.abs(),
    })
}

/// Evaluates `F`, `P` and `K` at every trajectory sample.
pub fn pohozaev_scan(traj: &Trajectory, profile: &ManifoldProfile, exps: &ExponentPair) -> Result<Vec<PohozaevSample>> {
    traj.samples.iter().map(|s| sample(profile, exps, s)).collect()
}

/// `P` in units of `max(1, ψ^{n-1}·term_scale)`: equal to `P` while the
/// terms are of size at most one, relative to them beyond, where `P` itself
/// may not be representable.
pub fn normalized(s: &PohozaevSample) -> f64 {
    s.pohozaev_scaled / (-s.ln_volume).exp().max(s.term_scale).max(f64::MIN_POSITIVE)
}

/// Increments normalized like [`normalized`], against the terms at both ends.
pub fn normalized_increments(samples: &[PohozaevSample]) -> Vec<f64> {
    samples
        .windows(2)
        .map(|w| {
            let rho = (w[0].ln_volume - w[1].ln_volume).exp();
            let bracket = w[1].pohozaev_scaled - rho * w[0].pohozaev_scaled;
            let terms = w[1].term_scale + rho * w[0].term_scale;
            bracket / (-w[1].ln_volume).exp().max(terms).max(f64::MIN_POSITIVE)
        })
        .collect()
}

/// `P(r_{i+1}) - P(r_i)`, computed in scaled form so its sign survives overflow.
pub fn increments(samples: &[PohozaevSample]) -> Vec<f64> {
    samples
        .windows(2)
        .map(|w| {
            let rho = (w[0].ln_volume - w[1].ln_volume).exp();
            let bracket = w[1].pohozaev_scaled - rho * w[0].pohozaev_scaled;
            rescale(bracket, w[1].ln_volume)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PohozaevSummary {
    pub max_pohozaev: f64,
    pub max_abs_pohozaev: f64,
    pub max_increment: f64,
    /// Largest [`normalized`] value of `P`.
    pub max_normalized: f64,
    /// Largest [`normalized_increments`] entry.
    pub max_normalized_increment: f64,
    pub max_kernel: f64,
    pub nodes: usize,
}

impl PohozaevSummary {
    pub fn from_samples(samples: &[PohozaevSample]) -> Self {
        let fold_max = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::NEG_INFINITY, f64::max);
        PohozaevSummary {
            max_pohozaev: fold_max(&mut samples.iter().map(|s| s.pohozaev)),
            max_abs_pohozaev: fold_max(&mut samples.iter().map(|s| s.pohozaev.abs())),
            max_increment: fold_max(&mut increments(samples).into_iter()),
            max_normalized: fold_max(&mut samples.iter().map(normalized)),
            max_normalized_increment: fold_max(&mut normalized_increments(samples).into_iter()),
            max_kernel: fold_max(&mut samples.iter().map(|s| s.kernel)),
            nodes: samples.len(),
        }
    }

    /// `P <= tol` and `P(r_{i+1}) - P(r_i) <= tol` everywhere, in normalized units.
    pub fn is_monotone_nonpositive(&self, tol: f64) -> bool {
        self.max_normalized <= tol && self.max_normalized_increment <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// Max over steps of `|ΔF - ∫F'| / scale`.
    pub energy: f64,
    /// Same for `P`, with `P' = K u'v'`, relative to the size of the terms in `P`.
    pub pohozaev: f64,
}

/// Compares finite differences of `F` and `P` between consecutive samples with
/// the integrals of their claimed derivatives over the same step.
///
/// Needs a fully recorded trajectory.
pub fn identity_residuals(
    traj: &Trajectory,
    profile: &ManifoldProfile,
    exps: &ExponentPair,
    samples: &[PohozaevSample],
) -> Result<IdentityResiduals> {
    let k = (profile.n - 1) as f64;
    let mut worst = IdentityResiduals { energy: 0.0, pohozaev: 0.0 };
    let mut failure = None;
    for (i, w) in samples.windows(2).enumerate() {
        let (a, b) = (w[0].r, w[1].r);
        if i == 0 || b <= a {
            // the first interval is the origin series
            continue;
        }
        let eval = |s: f64| traj.eval(s).expect("dense trajectory");
        let df = gk15(|s| {
            let st = eval(s);
            -2.0 * k * profile.warp.log_derivative(s) * st.du * st.dv
        }, a, b);
        let df_abs = gk15(|s| {
            let st = eval(s);
            (2.0 * k * profile.warp.log_derivative(s) * st.du * st.dv).abs()
        }, a, b);
        let scale = w[0].energy.abs() + w[1].energy.abs() + df_abs.value;
        let res = ((w[1].energy - w[0].energy) - df.value).abs() / scale.max(f64::MIN_POSITIVE);
        worst.energy = worst.energy.max(res);

        let dp = gk15(|s| {
            let st = eval(s);
            let ks = kernel_scaled(profile, exps, s).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::NAN
            });
            ks * (k * profile.warp.ln_psi_ratio(s, b)).exp() * st.du * st.dv
        }, a, b);
        let rho = (w[0].ln_volume - w[1].ln_volume).exp();
        let lhs = w[1].pohozaev_scaled - rho * w[0].pohozaev_scaled;
        let scale = w[1].term_scale + rho * w[0].term_scale + dp.value.abs();
        if scale > 0.0 {
            worst.pohozaev = worst.pohozaev.max((lhs - dp.value).abs() / scale);
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(worst)
}
