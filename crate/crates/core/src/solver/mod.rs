//! Existence curves, bands and region maps from bracketed bisection over shot
//! classifications.
//!
//! On a stochastically complete model the globally positive data for fixed `ξ`
//! reduce to one `η(ξ)`, which separates `B` (below) from `A` (above). On an
//! incomplete model they fill an interval `[η_m(ξ), η_M(ξ)]` and the two
//! boundaries are located separately.

mod band;
mod classify;
mod curve;
mod region;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::shooting::Shooter;

pub use band::{find_band, BandPoint, BandSignatures};
pub use classify::{Classified, Classifier, Resolution, ShotClass, ShotSummary, RESOLVE_HORIZON, RESOLVE_MAX_STEPS};
pub use curve::{find_eta, CurvePoint};
pub use region::{
    classify_cell, classify_cells, grid_axis, grid_points, refine_boundaries, sweep_region, BoundaryPoint, Cell,
    CellClass, RegionMap,
};

/// Traced points of a curve or a band.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", content = "points", rename_all = "snake_case")]
pub enum ExistenceResult {
    Curve(Vec<CurvePoint>),
    Band(Vec<BandPoint>),
}

impl ExistenceResult {
    pub fn len(&self) -> usize {
        match self {
            ExistenceResult::Curve(v) => v.len(),
            ExistenceResult::Band(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn curve(&self) -> Option<&[CurvePoint]> {
        match self {
            ExistenceResult::Curve(v) => Some(v),
            ExistenceResult::Band(_) => None,
        }
    }

    pub fn band(&self) -> Option<&[BandPoint]> {
        match self {
            ExistenceResult::Band(v) => Some(v),
            ExistenceResult::Curve(_) => None,
        }
    }
}

/// A grid point whose search failed.
#[derive(Debug, Clone, Serialize)]
pub struct PointFailure {
    pub xi: f64,
    pub error: String,
}

/// Outcome of [`curve_trace_report`]: the points that were found, the ones that
/// failed, and a monotonicity violation among the found points, if any.
#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub result: ExistenceResult,
    pub failures: Vec<PointFailure>,
    pub monotonicity: Option<String>,
}

/// Runs [`find_eta`] or [`find_band`] along an increasing `ξ` grid and checks
/// that the results increase with `ξ`.
///
/// Curve brackets are warm-started at `η ± 4·width` of the previous point;
/// endpoints that fail to confirm fall back to the seed brackets.
pub fn curve_trace(shooter: &Shooter, xi_grid: &[f64], tol: f64) -> Result<ExistenceResult> {
    Ok(trace(shooter, xi_grid, tol, true)?.result)
}

/// Like [`curve_trace`], but a failing point is recorded and the trace continues.
/// Only invalid input and unmet preconditions are errors.
pub fn curve_trace_report(shooter: &Shooter, xi_grid: &[f64], tol: f64) -> Result<TraceReport> {
    trace(shooter, xi_grid, tol, false)
}

fn trace(shooter: &Shooter, xi_grid: &[f64], tol: f64, strict: bool) -> Result<TraceReport> {
    if xi_grid.is_empty() || xi_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("ξ grid must be nonempty and strictly increasing".into()));
    }
    let classifier = Classifier::new(shooter);
    let complete = shooter.is_complete();
    let enforce = classify::check_preconditions(shooter, complete)?;
    let mut failures = Vec::new();
    let mut fail = |xi: f64, e: Error| -> Result<()> {
        if strict {
            return Err(e);
        }
        failures.push(PointFailure { xi, error: e.to_string() });
        Ok(())
    };
    let (result, monotone) = if complete {
        let mut points: Vec<CurvePoint> = Vec::with_capacity(xi_grid.len());
        for &xi in xi_grid {
            let warm = points.last().map(|p| (p.eta - 4.0 * p.bracket_width, p.eta + 4.0 * p.bracket_width));
            match curve::find_eta_from(&classifier, shooter, xi, tol, warm, enforce) {
                Ok(p) => points.push(p),
                Err(e) => fail(xi, e)?,
            }
        }
        let m = curve::check_curve_monotone(&points);
        (ExistenceResult::Curve(points), m)
    } else {
        let mut points = Vec::with_capacity(xi_grid.len());
        for &xi in xi_grid {
            match band::find_band_with(&classifier, shooter, xi, tol, enforce) {
                Ok(p) => points.push(p),
                Err(e) => fail(xi, e)?,
            }
        }
        let m = band::check_band_monotone(&points);
        (ExistenceResult::Band(points), m)
    };
    let monotonicity = match monotone {
        Ok(()) => None,
        Err(e) if strict => return Err(e),
        Err(e) => Some(e.to_string()),
    };
    Ok(TraceReport { result, failures, monotonicity })
}

/// Fits `ln η = ln c + k ln ξ` by least squares; returns `(k, c)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let k = sxy / sxx;
    Some((k, (my - k * mx).exp()))
}
