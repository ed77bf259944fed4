use serde::Serialize;

use crate::diagnostics::{feasibility_upper, LimitEnclosure};
use crate::error::{Error, Result};
use crate::shooting::{ab_seed_brackets, ShotOutcome, Shooter};

use super::classify::{check_preconditions, Classifier, ShotClass, ShotSummary};
use super::curve::{upper_boundary, witness, Search};

/// Limit signatures of the three band witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BandSignatures {
    /// `ℓ_u > 0` and `ℓ_v` vanishing at the lower endpoint.
    pub lower: bool,
    /// Both limits positive at the midpoint.
    pub middle: bool,
    /// `ℓ_u` vanishing and `ℓ_v > 0` at the upper endpoint.
    pub upper: bool,
}

impl BandSignatures {
    pub fn all(&self) -> bool {
        self.lower && self.middle && self.upper
    }
}

/// The interval of `η` giving globally positive solutions for one `ξ` on an
/// incomplete profile.
///
/// `eta_min` and `eta_max` are the outermost `η` that passed the proxy test;
/// the true endpoints lie within `width_min` below and `width_max` above them.
#[derive(Debug, Clone, Serialize)]
pub struct BandPoint {
    pub xi: f64,
    #[serde(rename = "eta_m")]
    pub eta_min: f64,
    #[serde(rename = "eta_M")]
    pub eta_max: f64,
    pub width_min: f64,
    pub width_max: f64,
    pub theta: f64,
    /// `θ ξ^p + (ξ/θ)^{1/q}`.
    pub feasibility_upper: f64,
    pub shots: usize,
    pub witness_min: ShotSummary,
    pub witness_mid: ShotSummary,
    pub witness_max: ShotSummary,
    pub signatures: BandSignatures,
    #[serde(skip)]
    pub witness_shots: [ShotOutcome; 3],
}

impl BandPoint {
    pub fn gap(&self) -> f64 {
        self.eta_max - self.eta_min
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.eta_min + self.eta_max)
    }
}

fn positive(e: &LimitEnclosure) -> bool {
    e.lower > 0.0 && !e.vanishes
}

fn signatures(min: &ShotSummary, mid: &ShotSummary, max: &ShotSummary) -> BandSignatures {
    let check = |s: &ShotSummary, f: &dyn Fn(&LimitEnclosure, &LimitEnclosure) -> bool| {
        s.class == ShotClass::GlobalProxy && s.limits().is_some_and(|(u, v)| f(&u, &v))
    };
    BandSignatures {
        lower: check(min, &|u, v| positive(u) && v.vanishes),
        middle: check(mid, &|u, v| positive(u) && positive(v)),
        upper: check(max, &|u, v| u.vanishes && positive(v)),
    }
}

/// Locates `[η_m(ξ), η_M(ξ)]`: finds one globally positive datum, then bisects
/// the `B`/global and global/`A` boundaries separately.
pub fn find_band(shooter: &Shooter, xi: f64, tol: f64) -> Result<BandPoint> {
    let enforce = check_preconditions(shooter, false)?;
    find_band_with(&Classifier::new(shooter), shooter, xi, tol, enforce)
}

pub(crate) fn find_band_with(
    classifier: &Classifier,
    shooter: &Shooter,
    xi: f64,
    tol: f64,
    enforce: bool,
) -> Result<BandPoint> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("bisection tolerance must be positive, got {tol}")));
    }
    let theta = shooter
        .summary
        .theta()
        .ok_or_else(|| Error::CompletenessMismatch("band search needs a finite θ".into()))?;
    let top = feasibility_upper(xi, theta, &shooter.exps);
    let seeds = ab_seed_brackets(&classifier.shooter, xi)?;
    let mut s = Search::new(classifier, xi, enforce);
    s.shots += 2;

    let (lo, g, hi) = global_seed(&mut s, seeds.eta_low, seeds.eta_high, top, tol)?;
    let (b, eta_min) = s.boundary(lo, g, ShotClass::B, ShotClass::A, tol)?;
    let (eta_max, a) = upper_boundary(&mut s, g, hi, tol)?;

    let mid = 0.5 * (eta_min + eta_max);
    let w_min = witness(shooter, None, xi, eta_min)?;
    let w_mid = witness(shooter, None, xi, mid)?;
    let w_max = witness(shooter, None, xi, eta_max)?;
    s.shots += 3;
    let (sm, sd, sx) = (w_min.summary(), w_mid.summary(), w_max.summary());
    Ok(BandPoint {
        xi,
        eta_min,
        eta_max,
        width_min: eta_min - b,
        width_max: a - eta_max,
        theta,
        feasibility_upper: top,
        shots: s.shots,
        witness_min: sm,
        witness_mid: sd,
        witness_max: sx,
        signatures: signatures(&sm, &sd, &sx),
        witness_shots: [w_min.outcome, w_mid.outcome, w_max.outcome],
    })
}

/// Returns `(b, g, a)` with `b` in `B`, `g` globally positive and `a` in `A`.
///
/// With `p = q` the diagonal datum is tried first: the swap symmetry puts it in
/// the band whenever the band is nonempty. Otherwise the bracket is bisected
/// until a midpoint lands inside the band.
fn global_seed(s: &mut Search<'_>, mut lo: f64, mut hi: f64, top: f64, tol: f64) -> Result<(f64, f64, f64)> {
    let exps = &s.classifier.shooter.exps;
    let xi = s.xi;
    if exps.p == exps.q && lo < xi && xi < hi && s.classify(xi)? == ShotClass::GlobalProxy {
        return Ok((lo, xi, hi));
    }
    let (low0, high0) = (lo, hi);
    while hi - lo > tol {
        let mid = if lo < top && top < hi { 0.5 * (lo + top.min(hi)) } else { 0.5 * (lo + hi) };
        match s.classify(mid)? {
            ShotClass::GlobalProxy => return Ok((lo, mid, hi)),
            ShotClass::B => lo = mid,
            ShotClass::A => hi = mid,
            ShotClass::Undecided => {
                return Err(Error::BracketInvariantBroken {
                    eta: mid,
                    detail: "positive shot without a certified limit enclosure".into(),
                })
            }
        }
    }
    Err(Error::NoGlobalProxyFound { xi, low: low0, high: high0 })
}

/// Band endpoints must strictly increase along a traced grid.
pub(crate) fn check_band_monotone(points: &[BandPoint]) -> Result<()> {
    for w in points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.eta_min <= a.eta_min - a.width_min {
            return Err(Error::MonotonicityViolation { xi_a: a.xi, eta_a: a.eta_min, xi_b: b.xi, eta_b: b.eta_min });
        }
        if b.eta_max + b.width_max <= a.eta_max {
            return Err(Error::MonotonicityViolation { xi_a: a.xi, eta_a: a.eta_max, xi_b: b.xi, eta_b: b.eta_max });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::ManifoldProfile;
    use crate::shooting::{ExponentPair, IntegratorConfig};

    #[test]
    fn band_brackets_the_diagonal() {
        let m = ManifoldProfile::exp_power(3.0, 3).unwrap();
        let sh = Shooter::new(&m, ExponentPair::new(5.0, 5.0, 3).unwrap(), IntegratorConfig::default()).unwrap();
        let b = find_band(&sh, 1.0, 1e-6).unwrap();
        assert!(b.eta_min < 1.0 && 1.0 < b.eta_max, "{b:?}");
        assert!(b.width_min <= 1e-6 && b.width_max <= 1e-6);
        assert!(b.eta_max <= b.feasibility_upper);
    }

    #[test]
    fn complete_profiles_are_rejected() {
        let m = ManifoldProfile::euclidean(3).unwrap();
        let sh = Shooter::new(&m, ExponentPair::new(5.0, 5.0, 3).unwrap(), IntegratorConfig::default()).unwrap();
        assert!(matches!(find_band(&sh, 1.0, 1e-6), Err(Error::CompletenessMismatch(_))));
    }
}
