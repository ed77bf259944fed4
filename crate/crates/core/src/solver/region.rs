use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::LimitEnclosure;
use crate::error::{Error, Result};
use crate::shooting::{ExponentPair, IntegratorConfig, Shooter};

use super::classify::{Classifier, ShotClass};

/// Classification of one grid cell; `Failed` carries the error in `status`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellClass {
    A,
    B,
    GlobalProxy,
    Undecided,
    Failed,
}

impl CellClass {
    pub fn label(&self) -> &'static str {
        match self {
            CellClass::A => "A",
            CellClass::B => "B",
            CellClass::GlobalProxy => "global",
            CellClass::Undecided => "undecided",
            CellClass::Failed => "failed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [CellClass::A, CellClass::B, CellClass::GlobalProxy, CellClass::Undecided, CellClass::Failed]
            .into_iter()
            .find(|c| c.label() == s)
    }
}

impl From<ShotClass> for CellClass {
    fn from(c: ShotClass) -> Self {
        match c {
            ShotClass::A => CellClass::A,
            ShotClass::B => CellClass::B,
            ShotClass::GlobalProxy => CellClass::GlobalProxy,
            ShotClass::Undecided => CellClass::Undecided,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub xi: f64,
    pub eta: f64,
    pub class: CellClass,
    /// Radius reached by the deciding shot.
    pub horizon: f64,
    pub limit_u: Option<LimitEnclosure>,
    pub limit_v: Option<LimitEnclosure>,
    /// `ok`, or the error that stopped the shot.
    pub status: String,
}

/// A classification change between two vertically adjacent cells, narrowed by bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub xi: f64,
    pub eta_low: f64,
    pub eta_high: f64,
    pub class_low: CellClass,
    pub class_high: CellClass,
}

impl BoundaryPoint {
    pub fn eta(&self) -> f64 {
        0.5 * (self.eta_low + self.eta_high)
    }
}

/// Classified `(ξ, η)` grid, stored row-major: `η` rows, `ξ` columns.
#[derive(Debug, Clone, Serialize)]
pub struct RegionMap {
    pub profile: String,
    pub exps: ExponentPair,
    pub config: IntegratorConfig,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub cells: Vec<Cell>,
    pub boundary: Vec<BoundaryPoint>,
}

impl RegionMap {
    pub fn cell(&self, i_xi: usize, j_eta: usize) -> &Cell {
        &self.cells[j_eta * self.xi.len() + i_xi]
    }

    /// Classes of one `ξ` column, bottom to top.
    pub fn column(&self, i_xi: usize) -> Vec<CellClass> {
        (0..self.eta.len()).map(|j| self.cell(i_xi, j).class).collect()
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.cells.iter().filter(|c| c.class == class).count()
    }

    /// Longest run of consecutive globally positive cells in each column.
    pub fn global_runs(&self) -> Vec<usize> {
        (0..self.xi.len())
            .map(|i| {
                let (mut best, mut run) = (0, 0);
                for c in self.column(i) {
                    run = if c == CellClass::GlobalProxy { run + 1 } else { 0 };
                    best = best.max(run);
                }
                best
            })
            .collect()
    }

    /// Cells classified `A` lying below a `B` cell of the same column, which
    /// the ordering of solutions forbids.
    pub fn ordering_violations(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for i in 0..self.xi.len() {
            let col = self.column(i);
            for (j, c) in col.iter().enumerate() {
                if *c == CellClass::A && col[j + 1..].contains(&CellClass::B) {
                    out.push((self.xi[i], self.eta[j]));
                }
            }
        }
        out
    }
}

/// `n` points from `lo` to `hi` inclusive.
pub fn grid_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect()
}

/// Row-major `(ξ, η)` pairs of a grid.
pub fn grid_points(xi: &[f64], eta: &[f64]) -> Vec<(f64, f64)> {
    eta.iter().flat_map(|&e| xi.iter().map(move |&x| (x, e))).collect()
}

/// Classifies each point independently in parallel; errors are recorded per cell.
pub fn classify_cells(classifier: &Classifier, points: &[(f64, f64)]) -> Vec<Cell> {
    points.par_iter().map(|&(xi, eta)| classify_cell(classifier, xi, eta)).collect()
}

pub fn classify_cell(classifier: &Classifier, xi: f64, eta: f64) -> Cell {
    match classifier.classify(xi, eta) {
        Ok(c) => {
            let limits = c.summary().limits();
            Cell {
                xi,
                eta,
                class: c.class.into(),
                horizon: c.outcome.reach(),
                limit_u: limits.map(|l| l.0),
                limit_v: limits.map(|l| l.1),
                status: "ok".into(),
            }
        }
        Err(e) => Cell {
            xi,
            eta,
            class: CellClass::Failed,
            horizon: f64::NAN,
            limit_u: None,
            limit_v: None,
            status: e.to_string(),
        },
    }
}

/// Bisects every vertical class change `refine_steps` times.
pub fn refine_boundaries(
    classifier: &Classifier,
    xi: &[f64],
    eta: &[f64],
    cells: &[Cell],
    refine_steps: usize,
) -> Vec<BoundaryPoint> {
    if refine_steps == 0 {
        return Vec::new();
    }
    let nx = xi.len();
    let mut pairs = Vec::new();
    for (i, &x) in xi.iter().enumerate() {
        for j in 0..eta.len().saturating_sub(1) {
            let (lo, hi) = (cells[j * nx + i].class, cells[(j + 1) * nx + i].class);
            if lo != hi && lo != CellClass::Failed && hi != CellClass::Failed {
                pairs.push((x, eta[j], eta[j + 1], lo, hi));
            }
        }
    }
    pairs
        .par_iter()
        .map(|&(x, mut a, mut b, ca, cb)| {
            let (mut class_low, mut class_high) = (ca, cb);
            for _ in 0..refine_steps {
                let mid = 0.5 * (a + b);
                let c = classify_cell(classifier, x, mid).class;
                if c == ca {
                    a = mid;
                    class_low = c;
                } else if c == cb {
                    b = mid;
                    class_high = c;
                } else {
                    // a third class between the two: narrow towards the lower change
                    b = mid;
                    class_high = c;
                }
            }
            BoundaryPoint { xi: x, eta_low: a, eta_high: b, class_low, class_high }
        })
        .collect()
}

/// Classifies an `nx × ny` grid over `xi_range × eta_range` and refines the
/// class boundaries.
pub fn sweep_region(
    shooter: &Shooter,
    xi_range: (f64, f64),
    eta_range: (f64, f64),
    resolution: (usize, usize),
    refine_steps: usize,
) -> Result<RegionMap> {
    let ok = |r: (f64, f64)| r.0 > 0.0 && r.1 >= r.0 && r.1.is_finite();
    if !ok(xi_range) || !ok(eta_range) {
        return Err(Error::InvalidInput(format!("ranges must be positive and ordered, got {xi_range:?} × {eta_range:?}")));
    }
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(Error::InvalidInput(format!("resolution must be at least 2 per axis, got {resolution:?}")));
    }
    let xi = grid_axis(xi_range.0, xi_range.1, resolution.0);
    let eta = grid_axis(eta_range.0, eta_range.1, resolution.1);
    let classifier = Classifier::new(shooter);
    let cells = classify_cells(&classifier, &grid_points(&xi, &eta));
    let boundary = refine_boundaries(&classifier, &xi, &eta, &cells, refine_steps);
    Ok(RegionMap {
        profile: shooter.profile.name.clone(),
        exps: shooter.exps,
        config: shooter.config,
        xi,
        eta,
        cells,
        boundary,
    })
}
