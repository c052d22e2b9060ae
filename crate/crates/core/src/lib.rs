//! Numerical engine for the quenched free energy of a directed random copolymer
//! moving through a random checkerboard of two solvents.
//!
//! The crate is organised bottom-up:
//!
//! * [`oracle`] brute-force lattice counts, Hamiltonians and finite partition functions;
//! * [`entropy`] the path entropy `κ̃(u,l)`, its derivative and inverse derivative;
//! * [`interface`] the single-interface free energy `φ_I` from exact transfer sums;
//! * [`column`] column types and the per-column free energy `ψ(Θ,u)`;
//! * [`varform`] the slope-based and column-based variational formulas;
//! * [`phases`] reduced free energies, critical thresholds and phase labels;
//! * [`maximizer_checks`] uniqueness and attainment probes for the optimizers.

// `!(x > y)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod column;
pub mod entropy;
pub mod error;
pub mod interface;
pub mod maximizer_checks;
pub mod numeric;
pub mod oracle;
pub mod params;
pub mod phases;
pub mod rng;
pub mod varform;

pub use column::{ColumnClass, ColumnGeometry, ColumnType, PsiSolution};
pub use entropy::EntropyEvaluator;
pub use error::{Error, Result};
pub use interface::{InterfaceFreeEnergy, InterfaceSettings, InterfaceTable, PhiEstimate};
pub use oracle::{DirectedPath, DisorderPair, Kind, Step};
pub use params::ModelParams;
pub use phases::{Phase, PhasePoint};
pub use varform::{ColumnMeasure, Family, FamilyMember, FractionProfile, Objective, SlopeMeasure, SpeedProfile};

/// Crate version recorded in every manifest.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
