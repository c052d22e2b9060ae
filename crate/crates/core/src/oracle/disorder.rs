use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{derive_seed, unit_from_bits};

/// Monomer type or solvent type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    A,
    B,
}

/// Labels of the mesoscopic blocks, indexed by (column, row).
pub trait MesoLabels {
    fn label(&self, col: i64, row: i64) -> Kind;
}

/// Random block field: block `(j,k)` is `A` with probability `p`, independently.
///
/// Labels are a pure function of `(seed, j, k)`, so any window can be
/// regenerated without replaying a stream. `overrides` pins individual blocks
/// for hand-built test instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MesoField {
    pub seed: u64,
    pub p: f64,
    #[serde(default)]
    pub overrides: Vec<(i64, i64, Kind)>,
}

impl MesoField {
    pub fn new(seed: u64, p: f64) -> Self {
        Self { seed, p, overrides: Vec::new() }
    }

    pub fn uniform(kind: Kind) -> Self {
        Self::new(0, if kind == Kind::A { 1.0 } else { 0.0 })
    }

    pub fn with_override(mut self, col: i64, row: i64, kind: Kind) -> Self {
        self.overrides.retain(|&(c, r, _)| (c, r) != (col, row));
        self.overrides.push((col, row, kind));
        self
    }
}

impl MesoLabels for MesoField {
    fn label(&self, col: i64, row: i64) -> Kind {
        if let Some(&(_, _, k)) = self.overrides.iter().find(|&&(c, r, _)| c == col && r == row) {
            return k;
        }
        let bits = derive_seed(self.seed, col as u64, row as u64);
        if unit_from_bits(bits) < self.p {
            Kind::A
        } else {
            Kind::B
        }
    }
}

/// Fair-coin monomer word; prefixes are stable under extension of `n`.
pub fn omega_word(seed: u64, n: usize) -> Vec<Kind> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| if rng.gen::<bool>() { Kind::A } else { Kind::B }).collect()
}

/// Microscopic word `ω` together with the mesoscopic field `Ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderPair {
    pub omega: Vec<Kind>,
    pub omega_seed: u64,
    pub meso: MesoField,
}

impl DisorderPair {
    pub fn generate(omega_seed: u64, n: usize, meso_seed: u64, p: f64) -> Self {
        Self { omega: omega_word(omega_seed, n), omega_seed, meso: MesoField::new(meso_seed, p) }
    }

    pub fn with_parts(omega: Vec<Kind>, meso: MesoField) -> Self {
        Self { omega, omega_seed: 0, meso }
    }

    pub fn p(&self) -> f64 {
        self.meso.p
    }

    pub fn meso_seed(&self) -> u64 {
        self.meso.seed
    }
}

impl MesoLabels for DisorderPair {
    fn label(&self, col: i64, row: i64) -> Kind {
        self.meso.label(col, row)
    }
}
