use serde::Serialize;

use crate::error::{Error, Result};
use crate::shooting::{ab_seed_brackets, ShotOutcome, Shooter};

use super::classify::{check_preconditions, Classified, Classifier, ShotClass, ShotSummary};

/// A point of the existence curve on a complete profile.
///
/// `eta_low` classifies `B` and `eta_high` classifies `A`; `eta` is their
/// midpoint and `bracket_width = eta_high - eta_low`.
#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub xi: f64,
    pub eta: f64,
    pub bracket_width: f64,
    pub eta_low: f64,
    pub eta_high: f64,
    /// Lowest and highest `η` that neither component vanished for within the
    /// resolving horizon, if any were met.
    pub undecided_zone: Option<(f64, f64)>,
    pub shots: usize,
    pub witness: ShotSummary,
    #[serde(skip)]
    pub witness_shot: ShotOutcome,
}

/// Bisection state for a single `ξ`.
pub(crate) struct Search<'a> {
    pub classifier: &'a Classifier,
    pub xi: f64,
    pub enforce: bool,
    pub shots: usize,
    pub longest: Option<Classified>,
}

impl<'a> Search<'a> {
    pub fn new(classifier: &'a Classifier, xi: f64, enforce: bool) -> Self {
        Search { classifier, xi, enforce, shots: 0, longest: None }
    }

    pub fn classify(&mut self, eta: f64) -> Result<ShotClass> {
        let c = self.classifier.classify(self.xi, eta)?;
        self.shots += 1;
        let class = c.class;
        if self.longest.as_ref().is_none_or(|l| c.outcome.reach() > l.outcome.reach()) {
            self.longest = Some(c);
        }
        Ok(class)
    }

    pub fn broken(&self, eta: f64, detail: String) -> Result<()> {
        if self.enforce {
            Err(Error::BracketInvariantBroken { eta, detail })
        } else {
            Ok(())
        }
    }

    /// Shrinks `[lo, hi]` until `hi - lo <= tol`, keeping `lo` in `low` and
    /// `hi` outside it. `forbidden` may not appear on the upper side.
    pub fn boundary(
        &mut self,
        mut lo: f64,
        mut hi: f64,
        low: ShotClass,
        forbidden: ShotClass,
        tol: f64,
    ) -> Result<(f64, f64)> {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let class = self.classify(mid)?;
            if class == forbidden {
                self.broken(mid, format!("{} between {} and {}", class.label(), low.label(), hi))?;
            }
            if class == low {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo, hi))
    }
}

/// Locates `η(ξ)` by bisection between a confirmed `B` datum and a confirmed `A` datum.
pub fn find_eta(shooter: &Shooter, xi: f64, tol: f64) -> Result<CurvePoint> {
    let enforce = check_preconditions(shooter, true)?;
    find_eta_from(&Classifier::new(shooter), shooter, xi, tol, None, enforce)
}

pub(crate) fn find_eta_from(
    classifier: &Classifier,
    shooter: &Shooter,
    xi: f64,
    tol: f64,
    warm: Option<(f64, f64)>,
    enforce: bool,
) -> Result<CurvePoint> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("bisection tolerance must be positive, got {tol}")));
    }
    let mut s = Search::new(classifier, xi, enforce);
    let (mut lo, mut hi) = initial_bracket(&mut s, warm)?;

    let mut zone: Option<(f64, f64)> = None;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match s.classify(mid)? {
            ShotClass::B => lo = mid,
            ShotClass::A => hi = mid,
            ShotClass::GlobalProxy | ShotClass::Undecided => {
                zone = Some((mid, mid));
                break;
            }
        }
    }
    if let Some((g, _)) = zone {
        // Both boundaries of the undecided zone: B below it, A above it.
        let (l, g_lo) = s.boundary(lo, g, ShotClass::B, ShotClass::A, tol)?;
        let (g_hi, h) = upper_boundary(&mut s, g, hi, tol)?;
        lo = l;
        hi = h;
        zone = Some((g_lo, g_hi));
    }

    let eta = 0.5 * (lo + hi);
    let witness = witness(shooter, s.longest.take(), xi, eta)?;
    s.shots += 1;
    Ok(CurvePoint {
        xi,
        eta,
        bracket_width: hi - lo,
        eta_low: lo,
        eta_high: hi,
        undecided_zone: zone,
        shots: s.shots,
        witness: witness.summary(),
        witness_shot: witness.outcome,
    })
}

/// Bisects `[g, hi]` with `g` not in `A` and `hi` in `A`; `B` inside it breaks ordering.
pub(crate) fn upper_boundary(s: &mut Search<'_>, mut g: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    while hi - g > tol {
        let mid = 0.5 * (g + hi);
        if mid <= g || mid >= hi {
            break;
        }
        match s.classify(mid)? {
            ShotClass::A => hi = mid,
            class => {
                if class == ShotClass::B {
                    s.broken(mid, format!("B between {g} and an A datum"))?;
                }
                g = mid;
            }
        }
    }
    Ok((g, hi))
}

fn initial_bracket(s: &mut Search<'_>, warm: Option<(f64, f64)>) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (None, None);
    if let Some((wl, wh)) = warm {
        if wl > 0.0 && s.classify(wl)? == ShotClass::B {
            lo = Some(wl);
        }
        if wh > 0.0 && s.classify(wh)? == ShotClass::A {
            hi = Some(wh);
        }
    }
    if lo.is_none() || hi.is_none() {
        let seeds = ab_seed_brackets(&s.classifier.shooter, s.xi)?;
        s.shots += 2;
        lo = lo.or(Some(seeds.eta_low));
        hi = hi.or(Some(seeds.eta_high));
    }
    let (lo, hi) = (lo.unwrap(), hi.unwrap());
    if lo >= hi {
        s.broken(lo, format!("B datum at eta = {lo} is not below the A datum at eta = {hi}"))?;
        return Ok((hi.min(lo), hi.max(lo)));
    }
    Ok((lo, hi))
}

/// Fires the witness at `eta` with the caller's configuration; falls back to
/// the longest-surviving bisection shot if it is not positive.
pub(crate) fn witness(shooter: &Shooter, longest: Option<Classified>, xi: f64, eta: f64) -> Result<Classified> {
    let here = Classified::direct(shooter.shoot(xi, eta)?);
    if here.outcome.kind.is_positive() {
        return Ok(here);
    }
    match longest {
        Some(l) if l.outcome.reach() > here.outcome.reach() => Ok(l),
        _ => Ok(here),
    }
}

/// Checks that `η` strictly increases along the traced points, within their brackets.
pub(crate) fn check_curve_monotone(points: &[CurvePoint]) -> Result<()> {
    for w in points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.eta_high <= a.eta_low {
            return Err(Error::MonotonicityViolation { xi_a: a.xi, eta_a: a.eta, xi_b: b.xi, eta_b: b.eta });
        }
    }
    Ok(())
}
