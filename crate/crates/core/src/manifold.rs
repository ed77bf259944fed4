//! Rotationally symmetric model geometry.
//!
//! A model manifold is described by its warping function `ψ` about the pole:
//! the metric is `dr² + ψ(r)² g_{S^{n-1}}`. Everything the shooting problem
//! needs from the geometry is a scalar function of `r`: the volume density
//! `ψ^{n-1}`, the volume-surface ratio
//!
//! ```text
//! Θ(r) = ψ(r)^{1-n} ∫₀^r ψ^{n-1} ds,
//! ```
//!
//! its integral `θ = ∫₀^∞ Θ` (finite exactly on stochastically incomplete
//! models) and the convexity of the volume power `𝒱 = (∫₀^r ψ^{n-1})^γ`.
//!
//! All evaluations go through logarithms of `ψ` so that profiles growing like
//! `exp(r³)` stay representable well past the point where `ψ^{n-1}` itself
//! overflows.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gk15, Quadrature};
use crate::shooting::ExponentPair;

/// Evaluation contract for a warping function.
///
/// Implementors must supply analytic `ψ`, `ψ'` and `ψ''`; the log-space
/// methods have defaults but should be overridden whenever `ψ` can overflow.
pub trait Warping: Send + Sync + fmt::Debug {
    fn psi(&self, r: f64) -> f64;
    fn psi_prime(&self, r: f64) -> f64;
    fn psi_second(&self, r: f64) -> f64;

    fn ln_psi(&self, r: f64) -> f64 {
        self.psi(r).ln()
    }

    /// `ln ψ(s) - ln ψ(r)`.
    fn ln_psi_ratio(&self, s: f64, r: f64) -> f64 {
        self.ln_psi(s) - self.ln_psi(r)
    }

    /// `ψ'/ψ`.
    fn log_derivative(&self, r: f64) -> f64 {
        self.psi_prime(r) / self.psi(r)
    }

    /// `ψ''/ψ`.
    fn second_ratio(&self, r: f64) -> f64 {
        self.psi_second(r) / self.psi(r)
    }
}

/// `ψ(r) = r`.
#[derive(Debug, Clone, Copy)]
pub struct Flat;

impl Warping for Flat {
    fn psi(&self, r: f64) -> f64 {
        r
    }
    fn psi_prime(&self, _r: f64) -> f64 {
        1.0
    }
    fn psi_second(&self, _r: f64) -> f64 {
        0.0
    }
    fn ln_psi_ratio(&self, s: f64, r: f64) -> f64 {
        (s / r).ln()
    }
    fn log_derivative(&self, r: f64) -> f64 {
        1.0 / r
    }
    fn second_ratio(&self, _r: f64) -> f64 {
        0.0
    }
}

/// `ψ(r) = sinh(κr)/κ`, constant sectional curvature `-κ²`.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolicWarp {
    pub kappa: f64,
}

fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

impl Warping for HyperbolicWarp {
    fn psi(&self, r: f64) -> f64 {
        (self.kappa * r).sinh() / self.kappa
    }
    fn psi_prime(&self, r: f64) -> f64 {
        (self.kappa * r).cosh()
    }
    fn psi_second(&self, r: f64) -> f64 {
        self.kappa * (self.kappa * r).sinh()
    }
    fn ln_psi(&self, r: f64) -> f64 {
        ln_sinh(self.kappa * r) - self.kappa.ln()
    }
    fn ln_psi_ratio(&self, s: f64, r: f64) -> f64 {
        ln_sinh(self.kappa * s) - ln_sinh(self.kappa * r)
    }
    fn log_derivative(&self, r: f64) -> f64 {
        self.kappa / (self.kappa * r).tanh()
    }
    fn second_ratio(&self, _r: f64) -> f64 {
        self.kappa * self.kappa
    }
}

/// `ψ(r) = r·exp(r^α)`.
#[derive(Debug, Clone, Copy)]
pub struct ExpPowerWarp {
    pub alpha: f64,
}

impl Warping for ExpPowerWarp {
    fn psi(&self, r: f64) -> f64 {
        r * r.powf(self.alpha).exp()
    }
    fn psi_prime(&self, r: f64) -> f64 {
        let ra = r.powf(self.alpha);
        ra.exp() * (1.0 + self.alpha * ra)
    }
    fn psi_second(&self, r: f64) -> f64 {
        let a = self.alpha;
        let ra = r.powf(a);
        a * r.powf(a - 1.0) * ra.exp() * (1.0 + a + a * ra)
    }
    fn ln_psi(&self, r: f64) -> f64 {
        r.ln() + r.powf(self.alpha)
    }
    fn ln_psi_ratio(&self, s: f64, r: f64) -> f64 {
        let log_ratio = (s / r).ln();
        // s^α - r^α without cancellation when s ≈ r
        log_ratio + r.powf(self.alpha) * (self.alpha * log_ratio).exp_m1()
    }
    fn log_derivative(&self, r: f64) -> f64 {
        (1.0 + self.alpha * r.powf(self.alpha)) / r
    }
    fn second_ratio(&self, r: f64) -> f64 {
        let a = self.alpha;
        a * r.powf(a - 2.0) * (1.0 + a + a * r.powf(a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completeness {
    Complete,
    Incomplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Declared,
    NumericallyInferred,
}

/// Builtin warping families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Euclidean,
    Hyperbolic { kappa: f64 },
    ExpPower { alpha: f64 },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Euclidean => write!(f, "euclidean"),
            Family::Hyperbolic { kappa } => write!(f, "hyperbolic({kappa})"),
            Family::ExpPower { alpha } => write!(f, "exp_power({alpha})"),
        }
    }
}

/// Radii below which `Θ(r) = r/n` is used instead of quadrature.
const THETA_SERIES_RADIUS: f64 = 1e-12;

/// Asymptotic `Θ ≈ (1 + λ'/λ²)/λ` is used once `|λ'|/λ²` drops below this.
const ASYMPTOTIC_RATIO: f64 = 1e-6;

/// ... and the pole is at least this many decay lengths `1/λ` away.
const ASYMPTOTIC_DECAY_LENGTHS: f64 = 40.0;

#[derive(Clone)]
pub struct ManifoldProfile {
    pub name: String,
    pub n: usize,
    pub warp: Arc<dyn Warping>,
    pub completeness_hint: Option<Completeness>,
    pub family: Option<Family>,
    pub quadrature: Quadrature,
}

impl fmt::Debug for ManifoldProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManifoldProfile")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("completeness_hint", &self.completeness_hint)
            .finish()
    }
}

impl ManifoldProfile {
    /// Builds one of the builtin families.
    pub fn builtin(family: Family, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidProfile(format!("dimension n = {n} must be at least 3")));
        }
        let (warp, hint): (Arc<dyn Warping>, Completeness) = match family {
            Family::Euclidean => (Arc::new(Flat), Completeness::Complete),
            Family::Hyperbolic { kappa } => {
                if !(kappa > 0.0 && kappa.is_finite()) {
                    return Err(Error::InvalidProfile(format!("curvature scale {kappa} must be positive")));
                }
                (Arc::new(HyperbolicWarp { kappa }), Completeness::Complete)
            }
            Family::ExpPower { alpha } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidProfile(format!("exponent α = {alpha} must be positive")));
                }
                let hint = if alpha > 2.0 { Completeness::Incomplete } else { Completeness::Complete };
                (Arc::new(ExpPowerWarp { alpha }), hint)
            }
        };
        Ok(ManifoldProfile {
            name: family.to_string(),
            n,
            warp,
            completeness_hint: Some(hint),
            family: Some(family),
            quadrature: Quadrature::new(1e-10),
        })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::builtin(Family::Euclidean, n)
    }

    pub fn hyperbolic(kappa: f64, n: usize) -> Result<Self> {
        Self::builtin(Family::Hyperbolic { kappa }, n)
    }

    pub fn exp_power(alpha: f64, n: usize) -> Result<Self> {
        Self::builtin(Family::ExpPower { alpha }, n)
    }

    /// Wraps a user-supplied warping function after checking the pole
    /// conditions `ψ(0) = 0`, `ψ'(0) = 1` and positivity on `(0, 50]`.
    pub fn custom(
        name: impl Into<String>,
        n: usize,
        warp: Arc<dyn Warping>,
        completeness_hint: Option<Completeness>,
    ) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidProfile(format!("dimension n = {n} must be at least 3")));
        }
        let r = 1e-7;
        let slope = warp.psi(r) / r;
        if !((slope - 1.0).abs() < 1e-4) {
            return Err(Error::InvalidProfile(format!("ψ(r)/r = {slope} near the pole, expected 1")));
        }
        for i in 1..=500 {
            let r = 0.1 * i as f64;
            let ln_psi = warp.ln_psi(r);
            if ln_psi.is_nan() || ln_psi == f64::NEG_INFINITY {
                return Err(Error::InvalidProfile(format!("ψ({r}) is not positive")));
            }
        }
        Ok(ManifoldProfile {
            name: name.into(),
            n,
            warp,
            completeness_hint,
            family: None,
            quadrature: Quadrature::new(1e-10),
        })
    }

    fn dim_m1(&self) -> f64 {
        (self.n - 1) as f64
    }

    /// `ψ(r)^{n-1}`; may be `inf` far out on fast-growing profiles.
    pub fn volume_density(&self, r: f64) -> f64 {
        (self.dim_m1() * self.warp.ln_psi(r)).exp()
    }

    /// `λ(r) = (n-1) ψ'/ψ`, the mean curvature of the geodesic sphere.
    pub fn mean_curvature(&self, r: f64) -> f64 {
        self.dim_m1() * self.warp.log_derivative(r)
    }

    fn mean_curvature_prime(&self, r: f64) -> f64 {
        let l = self.warp.log_derivative(r);
        self.dim_m1() * (self.warp.second_ratio(r) - l * l)
    }

    /// Returns the asymptotic value of `Θ(r)` when the expansion is accurate.
    fn theta_asymptotic(&self, r: f64) -> Option<f64> {
        let lambda = self.mean_curvature(r);
        if !(lambda > 0.0) || lambda * r < ASYMPTOTIC_DECAY_LENGTHS {
            return None;
        }
        let ratio = self.mean_curvature_prime(r) / (lambda * lambda);
        (ratio.abs() <= ASYMPTOTIC_RATIO).then(|| (1.0 + ratio) / lambda)
    }

    fn theta_quadrature(&self, r: f64) -> Result<f64> {
        self.weighted_ratio(r, |_| 1.0)
    }

    /// `ψ^{1-n}(r) ∫₀^r w(s) ψ^{n-1}(s) ds`, with break points resolving the
    /// boundary layer of width `1/λ(r)` below `r`.
    pub fn weighted_ratio<W: Fn(f64) -> f64>(&self, r: f64, weight: W) -> Result<f64> {
        let k = self.dim_m1();
        let warp = &self.warp;
        let integrand = |s: f64| {
            let density = (k * warp.ln_psi_ratio(s, r)).exp();
            if density == 0.0 {
                0.0
            } else {
                density * weight(s)
            }
        };
        let lambda = self.mean_curvature(r);
        let width = if lambda > 0.0 { 1.0 / lambda } else { r };
        let mut points = vec![0.0];
        for lengths in [60.0, 8.0] {
            let p = r - lengths * width;
            if p > *points.last().unwrap() {
                points.push(p);
            }
        }
        points.push(r);
        Ok(self.quadrature.integrate_points(integrand, &points)?.value)
    }

    /// Volume-surface ratio `Θ(r)`.
    pub fn theta(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidInput(format!("Θ needs a positive finite radius, got {r}")));
        }
        if r < THETA_SERIES_RADIUS {
            return Ok(r / self.n as f64);
        }
        match self.theta_asymptotic(r) {
            Some(t) => Ok(t),
            None => self.theta_quadrature(r),
        }
    }

    /// `Θ'(r) = 1 - λ(r) Θ(r)`.
    pub fn theta_prime(&self, r: f64) -> Result<f64> {
        Ok(1.0 - self.mean_curvature(r) * self.theta(r)?)
    }

    /// `∫_a^b Θ` for `0 <= a < b < ∞`.
    pub fn theta_integral(&self, a: f64, b: f64) -> Result<f64> {
        let mut failure = None;
        let est = self.quadrature.integrate(
            |s| {
                if s <= 0.0 {
                    return 0.0;
                }
                self.theta(s).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    f64::NAN
                })
            },
            a,
            b,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(est?.value)
    }

    /// `∫_r^∞ Θ`, finite exactly on stochastically incomplete profiles.
    pub fn theta_tail(&self, r: f64) -> Result<f64> {
        let mut failure = None;
        let est = self.quadrature.integrate_to_infinity(
            |s| {
                self.theta(s).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    f64::NAN
                })
            },
            r,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(est?.value)
    }

    /// `∫₀^r ψ^n ψ''/(ψ')²`, written as `ψ^{n-1} (ψ''/ψ)/(ψ'/ψ)²`.
    pub fn convexity_integrand(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let l = self.warp.log_derivative(s);
        self.volume_density(s) * self.warp.second_ratio(s) / (l * l)
    }

    /// Kernel integral `∫₀^r ψ^n ψ''/(ψ')² ds`.
    pub fn convexity_integral(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        let q = self.quadrature.with_abs_tol(1e-300);
        Ok(q.integrate(|s| self.convexity_integrand(s), 0.0, r)?.value)
    }

    /// `ψ^{1-n}(r) ∫₀^r ψ^n ψ''/(ψ')² ds`: the convexity integral scaled by the volume density.
    pub fn convexity_ratio(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        let warp = &self.warp;
        self.weighted_ratio(r, |s| {
            let l = warp.log_derivative(s);
            warp.second_ratio(s) / (l * l)
        })
    }

    /// `ψ^{n-1}(r) ∫_r^∞ ψ^{1-n} ds`; `None` when the integral diverges.
    pub fn inverse_volume_tail_scaled(&self, r: f64) -> Option<f64> {
        let k = self.dim_m1();
        let warp = &self.warp;
        let lambda = self.mean_curvature(r);
        let width = if lambda > 0.0 { (1.0 / lambda).min(r.max(1e-3)) } else { r.max(1e-3) };
        let near = self
            .quadrature
            .integrate_points(|s| (-k * warp.ln_psi_ratio(s, r)).exp(), &[r, r + width, r + 10.0 * width, r + 60.0 * width])
            .ok()?;
        let far = self
            .quadrature
            .integrate_to_infinity(|s| (-k * warp.ln_psi_ratio(s, r)).exp(), r + 60.0 * width)
            .ok()?;
        Some(near.value + far.value)
    }

    pub fn summary(&self) -> Result<GeometricSummary> {
        GeometricSummary::compute(self)
    }

    pub fn check_volume_convexity(&self, exps: &ExponentPair) -> Result<Convexity> {
        check_volume_convexity(self, exps)
    }
}

/// `θ = ∫₀^∞ Θ`, or a divergence marker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaTotal {
    Finite(f64),
    Infinite,
}

impl ThetaTotal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ThetaTotal::Finite(v) => Some(v),
            ThetaTotal::Infinite => None,
        }
    }
}

/// Doubling radii used by the integrability test: `2^FIRST..2^LAST`.
const TAIL_TEST_FIRST: i32 = 8;
const TAIL_TEST_LAST: i32 = 30;

/// Local decay exponents of `Θ` along `r_k = 2^k`, i.e. `-log₂(Θ(2r)/Θ(r))`.
pub fn theta_decay_exponents(profile: &ManifoldProfile) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut prev = profile.theta(2f64.powi(TAIL_TEST_FIRST))?;
    for k in TAIL_TEST_FIRST + 1..=TAIL_TEST_LAST {
        let r = 2f64.powi(k);
        let t = profile.theta(r)?;
        out.push((r, (prev / t).log2()));
        prev = t;
    }
    Ok(out)
}

/// Integrability test for `Θ` on `[1, ∞)` from its decay exponents.
///
/// Returns `Some(Complete)` if `Θ` decays no faster than `1/r`, `Some(Incomplete)`
/// if it decays faster than `r^{-1.2}` over the last doublings, `None` otherwise.
pub fn infer_completeness(profile: &ManifoldProfile) -> Result<Option<Completeness>> {
    let exps = theta_decay_exponents(profile)?;
    let last = &exps[exps.len() - 4..];
    let hi = last.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = last.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    Ok(if hi <= 1.0 + 1e-3 {
        Some(Completeness::Complete)
    } else if lo >= 1.2 {
        Some(Completeness::Incomplete)
    } else {
        None
    })
}

/// `θ` by quadrature; only meaningful when `Θ ∈ L¹`.
pub fn theta_total_value(profile: &ManifoldProfile) -> Result<f64> {
    let split = 4.0;
    Ok(profile.theta_integral(0.0, split)? + profile.theta_tail(split)?)
}

/// Numerical `θ`: infinite when `Θ` fails the integrability test.
pub fn theta_total(profile: &ManifoldProfile) -> Result<ThetaTotal> {
    match infer_completeness(profile)? {
        Some(Completeness::Complete) => Ok(ThetaTotal::Infinite),
        Some(Completeness::Incomplete) => Ok(ThetaTotal::Finite(theta_total_value(profile)?)),
        None => Err(Error::Ambiguous { horizon: 2f64.powi(TAIL_TEST_LAST) }),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometricSummary {
    pub n: usize,
    pub theta_total: ThetaTotal,
    pub completeness: Completeness,
    pub confidence: Confidence,
}

impl GeometricSummary {
    pub fn compute(profile: &ManifoldProfile) -> Result<Self> {
        let (completeness, confidence) = match profile.completeness_hint {
            Some(c) => (c, Confidence::Declared),
            None => match infer_completeness(profile)? {
                Some(c) => (c, Confidence::NumericallyInferred),
                None => return Err(Error::Ambiguous { horizon: 2f64.powi(TAIL_TEST_LAST) }),
            },
        };
        let theta_total = match completeness {
            Completeness::Complete => ThetaTotal::Infinite,
            Completeness::Incomplete => ThetaTotal::Finite(theta_total_value(profile)?),
        };
        Ok(GeometricSummary { n: profile.n, theta_total, completeness, confidence })
    }

    pub fn theta(&self) -> Option<f64> {
        self.theta_total.finite()
    }

    pub fn is_complete(&self) -> bool {
        self.completeness == Completeness::Complete
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Convexity {
    Convex,
    NonConvex { witness: f64 },
}

impl Convexity {
    pub fn is_convex(&self) -> bool {
        matches!(self, Convexity::Convex)
    }
}

/// Radii at which convexity certificates are evaluated.
pub fn convexity_grid() -> Vec<f64> {
    // Geometric from 1e-3 to 50.
    let count = 240;
    let (lo, hi) = (1e-3f64.ln(), 50f64.ln());
    (0..count).map(|i| (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// Exponent `γ = (pq-1)/(2(p+1)(q+1))` of the volume power `𝒱`.
pub fn volume_power(exps: &ExponentPair) -> f64 {
    let (p, q) = (exps.p, exps.q);
    (p * q - 1.0) / (2.0 * (p + 1.0) * (q + 1.0))
}

/// Certifies convexity of `𝒱(r) = (∫₀^r ψ^{n-1})^γ` on the grid.
///
/// Critical pairs use the integral condition `∫₀^r ψ^n ψ''/(ψ')² ≥ 0`; in the
/// supercritical case the sign of `𝒱''` is tested directly through the
/// equivalent condition `λ(r) Θ(r) ≥ 1 - γ`.
pub fn check_volume_convexity(profile: &ManifoldProfile, exps: &ExponentPair) -> Result<Convexity> {
    if !(exps.p * exps.q > 1.0) {
        return Err(Error::InvalidInput(format!(
            "volume convexity needs pq > 1, got p = {}, q = {}",
            exps.p, exps.q
        )));
    }
    let grid = convexity_grid();
    if exps.regime == crate::shooting::Regime::Critical {
        let mut cumulative = 0.0;
        let mut magnitude = 0.0;
        let mut prev = 0.0;
        for &r in &grid {
            let piece = gk15(|s| profile.convexity_integrand(s), prev, r);
            let abs_piece = gk15(|s| profile.convexity_integrand(s).abs(), prev, r);
            cumulative += piece.value;
            magnitude += abs_piece.value;
            if !cumulative.is_finite() {
                break;
            }
            if cumulative < -1e-10 * magnitude.max(f64::MIN_POSITIVE) {
                return Ok(Convexity::NonConvex { witness: r });
            }
            prev = r;
        }
        return Ok(Convexity::Convex);
    }
    let gamma = volume_power(exps);
    for &r in &grid {
        let lhs = profile.mean_curvature(r) * profile.theta(r)?;
        if lhs < 1.0 - gamma - 1e-10 {
            return Ok(Convexity::NonConvex { witness: r });
        }
    }
    Ok(Convexity::Convex)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyperbolic_theta_exact(r: f64) -> f64 {
        // ∫ sinh² = (sinh r cosh r - r)/2
        (r.sinh() * r.cosh() - r) / (2.0 * r.sinh().powi(2))
    }

    #[test]
    fn euclidean_theta_is_r_over_n() {
        let m = ManifoldProfile::euclidean(3).unwrap();
        assert!((m.theta(1.5).unwrap() - 0.5).abs() < 1e-13);
        let m5 = ManifoldProfile::euclidean(5).unwrap();
        assert!((m5.theta(7.0).unwrap() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_theta_matches_closed_form() {
        let m = ManifoldProfile::hyperbolic(1.0, 3).unwrap();
        for r in [0.01f64, 0.3, 1.0, 4.0, 10.0, 19.0, 25.0, 300.0] {
            let exact = if r > 25.0 { 0.5 / r.tanh() - r / (2.0 * r.sinh().powi(2)) } else { hyperbolic_theta_exact(r) };
            let got = m.theta(r).unwrap();
            assert!((got - exact).abs() <= 1e-10 * exact, "r={r}: {got} vs {exact}");
        }
    }

    #[test]
    fn small_radius_behaviour() {
        for m in [
            ManifoldProfile::euclidean(3).unwrap(),
            ManifoldProfile::hyperbolic(1.0, 3).unwrap(),
            ManifoldProfile::exp_power(3.0, 3).unwrap(),
            ManifoldProfile::exp_power(1.0, 4).unwrap(),
        ] {
            for r in [1e-3, 1e-2] {
                let t = m.theta(r).unwrap();
                assert!((t - r / m.n as f64).abs() <= 2.0 * r * r, "{} at {r}: {t}", m.name);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ManifoldProfile::euclidean(2).is_err());
        assert!(ManifoldProfile::exp_power(0.0, 3).is_err());
        assert!(ManifoldProfile::exp_power(-1.0, 3).is_err());
        assert!(ManifoldProfile::hyperbolic(0.0, 3).is_err());
        assert!(matches!(ManifoldProfile::euclidean(3).unwrap().theta(0.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn exp_power_log_ratio_is_stable() {
        let w = ExpPowerWarp { alpha: 3.0 };
        let (s, r) = (9.999_999, 10.0);
        let naive = w.ln_psi(s) - w.ln_psi(r);
        assert!((w.ln_psi_ratio(s, r) - naive).abs() < 1e-8);
        // derivatives are consistent with finite differences of ψ at moderate r
        let r = 0.8;
        let h = 1e-5;
        let fd = (w.psi(r + h) - w.psi(r - h)) / (2.0 * h);
        assert!((fd - w.psi_prime(r)).abs() < 1e-8);
        let fd2 = (w.psi_prime(r + h) - w.psi_prime(r - h)) / (2.0 * h);
        assert!((fd2 - w.psi_second(r)).abs() < 1e-7);
        assert!((w.second_ratio(r) - w.psi_second(r) / w.psi(r)).abs() < 1e-12);
    }

    #[test]
    fn completeness_inference_agrees_with_builtin_hints() {
        for m in [
            ManifoldProfile::euclidean(3).unwrap(),
            ManifoldProfile::hyperbolic(1.0, 3).unwrap(),
            ManifoldProfile::exp_power(3.0, 3).unwrap(),
            ManifoldProfile::exp_power(1.0, 3).unwrap(),
            ManifoldProfile::exp_power(4.0, 5).unwrap(),
        ] {
            assert_eq!(infer_completeness(&m).unwrap(), m.completeness_hint, "{}", m.name);
        }
    }

    #[test]
    fn theta_total_dichotomy() {
        assert_eq!(theta_total(&ManifoldProfile::euclidean(3).unwrap()).unwrap(), ThetaTotal::Infinite);
        assert_eq!(theta_total(&ManifoldProfile::hyperbolic(1.0, 3).unwrap()).unwrap(), ThetaTotal::Infinite);
        let t = theta_total(&ManifoldProfile::exp_power(3.0, 3).unwrap()).unwrap();
        assert!(matches!(t, ThetaTotal::Finite(v) if v > 0.0));
    }

    #[test]
    fn convexity_of_builtins() {
        let crit = ExponentPair::new(5.0, 5.0, 3).unwrap();
        let sup = ExponentPair::new(6.0, 9.0, 3).unwrap();
        for m in [
            ManifoldProfile::euclidean(3).unwrap(),
            ManifoldProfile::hyperbolic(1.0, 3).unwrap(),
            ManifoldProfile::exp_power(3.0, 3).unwrap(),
        ] {
            assert!(m.check_volume_convexity(&crit).unwrap().is_convex(), "{}", m.name);
            assert!(m.check_volume_convexity(&sup).unwrap().is_convex(), "{}", m.name);
        }
    }
}
