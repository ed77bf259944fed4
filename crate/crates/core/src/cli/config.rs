use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::manifold::{Family, ManifoldProfile};
use crate::shooting::{ExponentPair, IntegratorConfig, Shooter};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    #[serde(flatten)]
    pub family: Family,
    pub n: usize,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec { family: Family::Euclidean, n: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentSpec {
    pub p: f64,
    pub q: f64,
}

impl Default for ExponentSpec {
    fn default() -> Self {
        ExponentSpec { p: 5.0, q: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySpec {
    pub xi: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSpec {
    pub xi_grid: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub xi_range: [f64; 2],
    pub eta_range: [f64; 2],
    pub resolution: [usize; 2],
    #[serde(default)]
    pub refine_steps: usize,
}

/// Everything a command needs. Serialized as TOML; `output` and `threads` do
/// not enter the config hash.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub profile: ProfileSpec,
    #[serde(default)]
    pub exponents: ExponentSpec,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    /// Seed for the randomized verification suites.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e.span().map(|s| location(text, s.start)).unwrap_or_else(|| "config".into());
            Error::config(field, e.message().trim().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config { field, message } => Error::config(format!("{}:{field}", path.display()), message),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config serializes")
    }

    /// Hex SHA-256 of the canonical TOML, without output location and thread count.
    pub fn hash(&self) -> String {
        let canonical = ExperimentConfig { output: None, threads: None, ..self.clone() };
        hex::encode(Sha256::digest(canonical.to_toml().as_bytes()))
    }

    pub fn exponents(&self) -> Result<ExponentPair> {
        ExponentPair::new(self.exponents.p, self.exponents.q, self.profile.n)
            .map_err(|e| Error::config("exponents", e.to_string()))
    }

    pub fn manifold(&self) -> Result<ManifoldProfile> {
        ManifoldProfile::builtin(self.profile.family, self.profile.n).map_err(|e| Error::config("profile", e.to_string()))
    }

    pub fn shooter(&self) -> Result<Shooter> {
        Shooter::new(&self.manifold()?, self.exponents()?, self.integrator)
    }

    /// Checks every numeric field the domain constrains.
    pub fn validate(&self) -> Result<()> {
        self.manifold()?;
        self.exponents()?;
        let ic = &self.integrator;
        positive("integrator.rel_tol", ic.rel_tol)?;
        positive("integrator.abs_tol", ic.abs_tol)?;
        positive("integrator.r0_scale", ic.r0_scale)?;
        positive("integrator.positivity_margin", ic.positivity_margin)?;
        positive("integrator.extinction_ratio", ic.extinction_ratio)?;
        positive("integrator.certification_width", ic.certification_width)?;
        if let Some(h) = ic.horizon {
            positive("integrator.horizon", h)?;
        }
        if ic.max_steps == 0 {
            return Err(Error::config("integrator.max_steps", "must be at least 1"));
        }
        if let Some(c) = &self.classify {
            positive("classify.xi", c.xi)?;
            positive("classify.eta", c.eta)?;
        }
        if let Some(t) = &self.trace {
            positive("trace.tol", t.tol)?;
            if t.xi_grid.is_empty() {
                return Err(Error::config("trace.xi_grid", "must not be empty"));
            }
            for &x in &t.xi_grid {
                positive("trace.xi_grid", x)?;
            }
            if t.xi_grid.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::config("trace.xi_grid", "must be strictly increasing"));
            }
        }
        if let Some(s) = &self.sweep {
            for (name, r) in [("sweep.xi_range", s.xi_range), ("sweep.eta_range", s.eta_range)] {
                positive(name, r[0])?;
                positive(name, r[1])?;
                if r[1] < r[0] {
                    return Err(Error::config(name, format!("upper end {} is below lower end {}", r[1], r[0])));
                }
            }
            if s.resolution.iter().any(|&k| k < 2) {
                return Err(Error::config("sweep.resolution", "needs at least 2 points per axis"));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads", "must be at least 1"));
        }
        Ok(())
    }
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be positive and finite, got {x}")))
    }
}

/// `line N, column M` of a byte offset.
fn location(text: &str, offset: usize) -> String {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    format!("line {line}, column {column}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shooting::Recording;
    use proptest::prelude::*;

    const SAMPLE: &str = r#"
seed = 7

[profile]
family = "exp_power"
alpha = 3.0
n = 3

[exponents]
p = 5.0
q = 5.0

[integrator]
rel_tol = 1e-9
horizon = 40.0

[trace]
xi_grid = [1.0, 2.0]
"#;

    #[test]
    fn parses_sample() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(c.profile.family, Family::ExpPower { alpha: 3.0 });
        assert_eq!(c.integrator.rel_tol, 1e-9);
        assert_eq!(c.integrator.abs_tol, IntegratorConfig::default().abs_tol);
        assert_eq!(c.trace.as_ref().unwrap().tol, 1e-8);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_field_names_its_line() {
        let err = ExperimentConfig::from_toml("[exponents]\np = 5.0\nq = 5.0\nr = 1.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 4") && msg.contains('r'), "{msg}");
    }

    #[test]
    fn negative_eta_is_a_field_error() {
        let c = ExperimentConfig { classify: Some(ClassifySpec { xi: 1.0, eta: -1.0 }), ..Default::default() };
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("classify.eta"), "{msg}");
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig { output: Some("/tmp/x".into()), threads: Some(3), ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        let c = ExperimentConfig { seed: 1, ..a.clone() };
        assert_ne!(a.hash(), c.hash());
    }

    fn family() -> impl Strategy<Value = Family> {
        prop_oneof![
            Just(Family::Euclidean),
            (0.01f64..10.0).prop_map(|kappa| Family::Hyperbolic { kappa }),
            (0.1f64..6.0).prop_map(|alpha| Family::ExpPower { alpha }),
        ]
    }

    proptest! {
        #[test]
        fn toml_round_trip(
            family in family(),
            n in 3usize..8,
            p in 1.0f64..20.0,
            q in 1.0f64..20.0,
            rel in 1e-14f64..1e-3,
            horizon in proptest::option::of(1.0f64..1e6),
            seed in any::<u64>(),
            xi in 1e-3f64..1e3,
            grid in proptest::collection::vec(1e-3f64..1e3, 1..5),
            res in (2usize..100, 2usize..100),
            sparse in any::<bool>(),
        ) {
            let c = ExperimentConfig {
                profile: ProfileSpec { family, n },
                exponents: ExponentSpec { p, q },
                integrator: IntegratorConfig {
                    rel_tol: rel,
                    horizon,
                    recording: if sparse { Recording::Sparse } else { Recording::Full },
                    ..Default::default()
                },
                seed,
                classify: Some(ClassifySpec { xi, eta: xi * 1.5 }),
                trace: Some(TraceSpec { xi_grid: grid, tol: 1e-7 }),
                sweep: Some(SweepSpec { xi_range: [0.5, 2.0], eta_range: [xi, 2.0 * xi], resolution: [res.0, res.1], refine_steps: 3 }),
                output: Some(PathBuf::from("runs/x")),
                threads: Some(4),
            };
            let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
