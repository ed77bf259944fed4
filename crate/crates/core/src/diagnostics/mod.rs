//! Energy, Pohozaev function, energy integrals and limit bounds evaluated
//! along computed trajectories.

pub mod bounds;
pub mod enclosure;
pub mod energy;
pub mod ordering;
pub mod pohozaev;

pub use bounds::{abs_bound, abs_bound_check, feasibility_upper, satisfies_feasibility, BoundCheck};
pub use enclosure::{limit_enclosure, product_statistic, LimitEnclosure};
pub use energy::{
    divergence_verdict, energy_ledger, EnergyCheckpoint, EnergyLedger, EUCLIDEAN_CRITICAL_ENERGY,
};
pub use ordering::{ordering_report, OrderingReport};
pub use pohozaev::{identity_residuals, pohozaev_scan, IdentityResiduals, PohozaevSample, PohozaevSummary};
