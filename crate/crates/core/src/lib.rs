//! Exact finite-size distribution laws for two critical mean-field models,
//! the Stein-equation solutions of their quartic limit laws, and weighted
//! Kolmogorov-distance audits of the associated convergence-rate bounds.
//!
//! The crate is organized around six pieces:
//!
//! * [`limit_law`] — the density family b exp(-a x^{2k}) with numerically
//!   stable CDF, tail, scaled-tail, moment, and quantile evaluation;
//! * [`stein`] — the Stein equation f' - psi f = 1(x <= z) - P(z), its
//!   explicit solution, derivative, and g = (psi f)', all overflow-safe;
//! * [`curie_weiss`] — exact critical Curie-Weiss magnetization laws and
//!   single-site exchangeable-pair diagnostics;
//! * [`monomer_dimer`] — the imitative monomer-dimer model through its
//!   weighted Curie-Weiss reformulation, critical constants, and pair-update
//!   diagnostics;
//! * [`metrics`] — weighted distances, log-log rate fits, and the bound
//!   right-hand sides;
//! * [`oracle`] — brute-force enumeration checks behind the `oracle`
//!   subcommand and the equivalence test suite.

pub mod curie_weiss;
pub mod discrete;
pub mod error;
pub mod limit_law;
pub mod metrics;
pub mod monomer_dimer;
pub mod oracle;
pub mod quad;
pub mod special;
pub mod stein;

pub use discrete::{Atom, BoundCheckReport, DiscreteLaw, PairAtom, PairDiagnostics};
pub use error::{Error, Result};
pub use limit_law::LimitLaw;
pub use metrics::{
    bound_terms, empirical_constant, rate_fit, theorem_audit, weighted_distance, BoundReport,
    DistanceProfile, DistanceRecord, Model, RateFit, TheoremAudit,
};
pub use monomer_dimer::CriticalPoint;
pub use stein::SteinSolution;
