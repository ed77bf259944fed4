use serde::Serialize;

use super::output::{RunDir, VerdictCounts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// A reported value with no pass criterion.
    Info,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
            Status::Info => "INFO",
        }
    }
}

/// One verdict with the value measured and the tolerance it was held to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl Check {
    fn new(name: &str, ok: bool, measured: Option<f64>, tolerance: Option<f64>, detail: impl Into<String>) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Check { name: name.to_string(), status, measured, tolerance, detail: detail.into() }
    }

    /// Passes when `measured <= tol`; NaN fails.
    pub fn at_most(name: &str, measured: f64, tol: f64) -> Self {
        Self::new(name, measured <= tol, Some(measured), Some(tol), "")
    }

    /// Passes when `measured >= tol`; NaN fails.
    pub fn at_least(name: &str, measured: f64, tol: f64) -> Self {
        Self::new(name, measured >= tol, Some(measured), Some(tol), "")
    }

    /// Passes when `|measured - expected| <= tol`.
    pub fn within(name: &str, measured: f64, expected: f64, tol: f64) -> Self {
        Self::new(name, (measured - expected).abs() <= tol, Some(measured), Some(tol), format!("expected {expected}"))
    }

    pub fn flag(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Self::new(name, ok, None, None, detail)
    }

    pub fn info(name: &str, value: f64, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), status: Status::Info, measured: Some(value), tolerance: None, detail: detail.into() }
    }

    pub fn skipped(name: &str, reason: impl Into<String>) -> Self {
        Check { name: name.to_string(), status: Status::Skipped, measured: None, tolerance: None, detail: reason.into() }
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}/{}", self.name);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    /// `PASS name measured=... tol=... detail`.
    pub fn line(&self) -> String {
        let mut s = format!("{} {}", self.status.label(), self.name);
        if let Some(m) = self.measured {
            s.push_str(&format!(" measured={m:e}"));
        }
        if let Some(t) = self.tolerance {
            s.push_str(&format!(" tol={t:e}"));
        }
        if !self.detail.is_empty() {
            s.push_str(&format!(" ({})", self.detail));
        }
        s
    }
}

pub fn counts(checks: &[Check]) -> VerdictCounts {
    let mut c = VerdictCounts::default();
    for k in checks {
        match k.status {
            Status::Pass => c.passed += 1,
            Status::Fail => c.failed += 1,
            Status::Skipped => c.skipped += 1,
            Status::Info => {}
        }
    }
    c
}

/// What a command produced: its checks and the run directory holding its files.
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub run: RunDir,
    pub summary: String,
}

impl Report {
    pub fn new(command: &str, checks: Vec<Check>, run: RunDir) -> Self {
        Report { command: command.to_string(), checks, run, summary: String::new() }
    }

    pub fn with_summary(mut self, summary: String) -> Self {
        self.summary = summary;
        self
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_fails_both_comparisons() {
        assert_eq!(Check::at_most("x", f64::NAN, 1.0).status, Status::Fail);
        assert_eq!(Check::at_least("x", f64::NAN, 1.0).status, Status::Fail);
    }

    #[test]
    fn counts_ignore_info() {
        let cs = [
            Check::at_most("a", 0.0, 1.0),
            Check::at_most("b", 2.0, 1.0),
            Check::skipped("c", "n/a"),
            Check::info("d", 1.0, ""),
        ];
        assert_eq!(counts(&cs), VerdictCounts { passed: 1, failed: 1, skipped: 1 });
    }

    #[test]
    fn line_format() {
        let c = Check::within("slope", 0.6667, 2.0 / 3.0, 1e-3).prefixed("scaling");
        assert!(c.line().starts_with("PASS scaling/slope measured=6.667e-1 tol=1e-3"), "{}", c.line());
    }
}
