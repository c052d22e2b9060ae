//! Brute-force ground truth at desk scale.
//!
//! Everything here is exact (big-integer counts, full transfer sums over the
//! path set) and deliberately unoptimised beyond memoisation. The analytic
//! modules are tested against these routines.

mod column_mc;
mod count;
mod disorder;
mod energy;
mod path;

pub use column_mc::{column_free_energy_finite, column_log_partition};
pub use count::{
    big_ln, count_paths_stretch_form, count_paths_stretch_form_from, enumerate_column_paths, HPoint, DEFAULT_BUDGET,
};
pub use disorder::{omega_word, DisorderPair, Kind, MesoField, MesoLabels};
pub use energy::{bond_block, bond_kind, finite_free_energy, hamiltonian, monomer_energy};
pub use path::{DirectedPath, Step};
