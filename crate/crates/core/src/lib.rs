//! Radial shooting for the Lane-Emden system
//!
//! ```text
//! -Δu = |v|^{q-1} v,   -Δv = |u|^{p-1} u
//! ```
//!
//! on rotationally symmetric model manifolds `dr² + ψ(r)² g_{S^{n-1}}`.
//!
//! The crate integrates the radial Cauchy problem from the pole with data
//! `(u, v)(0) = (ξ, η)`, classifies each shot by which component vanishes
//! first, and locates the initial data of globally positive solutions: a
//! single curve `η(ξ)` on stochastically complete models and a band
//! `[η_m(ξ), η_M(ξ)]` on incomplete ones. Diagnostics evaluate the energy,
//! the Pohozaev function and energy integrals along trajectories.
//!
//! ```no_run
//! use radial_shooting::prelude::*;
//!
//! let profile = ManifoldProfile::euclidean(3)?;
//! let exps = ExponentPair::new(5.0, 5.0, 3)?;
//! let shooter = Shooter::new(&profile, exps, IntegratorConfig::default())?;
//! let outcome = shooter.shoot(1.0, 2.5)?;
//! assert_eq!(outcome.kind.label(), "FirstZeroU");
//! # Ok::<(), radial_shooting::Error>(())
//! ```

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod manifold;
pub mod ode;
pub mod quadrature;
pub mod shooting;
pub mod solver;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::diagnostics::{LimitEnclosure, PohozaevSample};
    pub use crate::error::{Error, Result};
    pub use crate::manifold::{Completeness, Family, GeometricSummary, ManifoldProfile, ThetaTotal};
    pub use crate::shooting::{ExponentPair, IntegratorConfig, OutcomeKind, Regime, ShotOutcome, Shooter};
}
