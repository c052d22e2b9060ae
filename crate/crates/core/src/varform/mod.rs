//! The slope-based and column-based variational formulas.
//!
//! Both are ratios `N/D` maximised over an outer measure and an inner speed
//! profile. For a fixed outer measure the inner problem is solved by Dinkelbach
//! iteration: at a trial value `c` the maximiser of `N − cD` is explicit (each
//! atom picks the speed where its marginal gain equals `c`), and the next trial
//! value is the ratio at that maximiser.

mod columns;
mod family;

pub use columns::{
    column_free_energy_for_measure, column_ratio, lift_at, lift_to_slope, lifted_ratio, push_to_column, ColumnAtom,
    ColumnMeasure, ColumnOptimum, FractionProfile,
};
pub use family::{measure_family_from_disorder, Family, FamilyMember, FamilySettings, Strategy};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::entropy::{chi_inverse, u_kappa};
use crate::error::{Error, Result};
use crate::interface::{InterfaceFreeEnergy, InterfaceTable};

pub const DINKELBACH_TOL: f64 = 1e-9;
pub const DINKELBACH_MAX_ITER: usize = 200;

/// Interaction strengths together with the interface model they pair with.
#[derive(Debug, Clone)]
pub struct Objective {
    pub alpha: f64,
    pub beta: f64,
    pub interface: Arc<InterfaceFreeEnergy>,
}

impl Objective {
    pub fn new(alpha: f64, beta: f64, interface: Arc<InterfaceFreeEnergy>) -> Self {
        Self { alpha, beta, interface }
    }

    /// Interface free energy equal to the entropy of a free path.
    pub fn entropic(alpha: f64, beta: f64) -> Self {
        Self::new(alpha, beta, Arc::new(InterfaceFreeEnergy::Entropic))
    }

    pub fn from_table(table: InterfaceTable) -> Self {
        let (alpha, beta) = (table.alpha, table.beta);
        Self::new(alpha, beta, Arc::new(InterfaceFreeEnergy::from_table(table)))
    }

    /// The objective seen by the delocalised formula, which depends on the
    /// energies only through `α − β`.
    pub fn delocalized(alpha_minus_beta: f64) -> Self {
        Self::entropic(alpha_minus_beta, 0.0)
    }

    pub fn b_shift(&self) -> f64 {
        (self.beta - self.alpha) / 2.0
    }
}

/// Discrete slope measure `ρ̄ = (ρ̄_A, ρ̄_B, ρ̄_I)`.
///
/// Atoms are `(slope, weight)`; weights over all three parts sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeMeasure {
    pub atoms_a: Vec<(f64, f64)>,
    pub atoms_b: Vec<(f64, f64)>,
    pub w_i: f64,
}

fn merge_atoms(atoms: &mut Vec<(f64, f64)>) {
    atoms.retain(|&(_, w)| w > 0.0);
    atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for &(l, w) in atoms.iter() {
        match out.last_mut() {
            Some(last) if (last.0 - l).abs() <= 1e-12 * l.max(1.0) => last.1 += w,
            _ => out.push((l, w)),
        }
    }
    *atoms = out;
}

impl SlopeMeasure {
    pub fn new(atoms_a: Vec<(f64, f64)>, atoms_b: Vec<(f64, f64)>, w_i: f64) -> Result<Self> {
        let m = Self { atoms_a, atoms_b, w_i };
        m.validate()?;
        Ok(m)
    }

    /// Builds a measure from unnormalised weights; equal slopes are merged.
    pub fn normalized(mut atoms_a: Vec<(f64, f64)>, mut atoms_b: Vec<(f64, f64)>, w_i: f64) -> Result<Self> {
        merge_atoms(&mut atoms_a);
        merge_atoms(&mut atoms_b);
        let total: f64 = atoms_a.iter().chain(&atoms_b).map(|a| a.1).sum::<f64>() + w_i;
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::ConstraintViolation("measure has no mass".into()));
        }
        let scale = |v: Vec<(f64, f64)>| v.into_iter().map(|(l, w)| (l, w / total)).collect();
        Self::new(scale(atoms_a), scale(atoms_b), w_i / total)
    }

    pub fn delta_a(l: f64) -> Self {
        Self { atoms_a: vec![(l, 1.0)], atoms_b: vec![], w_i: 0.0 }
    }

    /// Horizontal strategy: stay on the entry row, spending A-A column pairs in
    /// A, B-B pairs in B and mixed pairs along the interface.
    pub fn rho_hor(p: f64) -> Self {
        let q = 1.0 - p;
        let keep = |w: f64| if w > 0.0 { vec![(0.0, w)] } else { vec![] };
        Self { atoms_a: keep(p * p), atoms_b: keep(q * q), w_i: 2.0 * p * q }
    }

    pub fn validate(&self) -> Result<()> {
        let mut total = self.w_i;
        if !(self.w_i >= 0.0) {
            return Err(Error::ConstraintViolation(format!("negative interface mass {}", self.w_i)));
        }
        for &(l, w) in self.atoms_a.iter().chain(&self.atoms_b) {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::ConstraintViolation(format!("slope {l} is not a finite non-negative number")));
            }
            if !(w > 0.0) {
                return Err(Error::ConstraintViolation(format!("atom weight {w} is not positive")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::ConstraintViolation(format!("total weight {total} differs from 1")));
        }
        Ok(())
    }

    pub fn b_mass(&self) -> f64 {
        self.atoms_b.iter().map(|a| a.1).sum()
    }

    /// `∫(1+l) ρ̄_B(dl)`.
    pub fn b_length(&self) -> f64 {
        self.atoms_b.iter().map(|&(l, w)| (1.0 + l) * w).sum()
    }

    /// Moves the interface mass onto the A-atom at slope zero.
    pub fn fold_interface(&self) -> Self {
        let mut atoms_a = self.atoms_a.clone();
        if self.w_i > 0.0 {
            atoms_a.push((0.0, self.w_i));
        }
        merge_atoms(&mut atoms_a);
        Self { atoms_a, atoms_b: self.atoms_b.clone(), w_i: 0.0 }
    }
}

/// Speeds paired atom by atom with a [`SlopeMeasure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedProfile {
    pub v_a: Vec<f64>,
    pub v_b: Vec<f64>,
    pub v_i: f64,
    /// Some speed came from beyond the tabulated interface range.
    pub saturated: bool,
}

impl SpeedProfile {
    pub fn validate(&self, rho: &SlopeMeasure) -> Result<()> {
        if self.v_a.len() != rho.atoms_a.len() || self.v_b.len() != rho.atoms_b.len() {
            return Err(Error::ConstraintViolation("speed profile does not match the measure".into()));
        }
        for (&(l, _), &v) in rho.atoms_a.iter().zip(&self.v_a).chain(rho.atoms_b.iter().zip(&self.v_b)) {
            if v < 1.0 + l - 1e-12 {
                return Err(Error::ConstraintViolation(format!("speed {v} below 1 + {l}")));
            }
        }
        if self.v_i < 1.0 {
            return Err(Error::ConstraintViolation(format!("interface speed {} below 1", self.v_i)));
        }
        Ok(())
    }
}

/// Numerator and denominator of the slope-based ratio.
pub fn slope_terms(rho: &SlopeMeasure, v: &SpeedProfile, obj: &Objective) -> (f64, f64) {
    let shift = obj.b_shift();
    let (mut num, mut den) = (0.0, 0.0);
    for (&(l, w), &s) in rho.atoms_a.iter().zip(&v.v_a) {
        num += w * u_kappa(s, l);
        den += w * s;
    }
    for (&(l, w), &s) in rho.atoms_b.iter().zip(&v.v_b) {
        num += w * (u_kappa(s, l) + shift * s);
        den += w * s;
    }
    if rho.w_i > 0.0 {
        num += rho.w_i * obj.interface.mu_phi(v.v_i);
        den += rho.w_i * v.v_i;
    }
    (num, den)
}

/// `N̄(ρ̄,v)/D̄(ρ̄,v)`; `−∞` when a charged atom has infinite speed.
pub fn slope_ratio(rho: &SlopeMeasure, v: &SpeedProfile, obj: &Objective) -> f64 {
    let charged_a = rho.atoms_a.iter().zip(&v.v_a).any(|(a, s)| a.1 > 0.0 && s.is_infinite());
    let charged_b = rho.atoms_b.iter().zip(&v.v_b).any(|(a, s)| a.1 > 0.0 && s.is_infinite());
    if charged_a || charged_b || (rho.w_i > 0.0 && v.v_i.is_infinite()) {
        return f64::NEG_INFINITY;
    }
    let (num, den) = slope_terms(rho, v, obj);
    num / den
}

/// Maximiser of `N̄ − cD̄` over speed profiles, evaluated at the atoms of `rho`.
pub fn optimal_speed(rho: &SlopeMeasure, c: f64, obj: &Objective) -> SpeedProfile {
    let cb = c - obj.b_shift();
    let (v_i, saturated) = if rho.w_i > 0.0 { obj.interface.speed(c) } else { (chi_inverse(c, 0.0).max(1.0), false) };
    SpeedProfile {
        v_a: rho.atoms_a.iter().map(|&(l, _)| chi_inverse(c, l)).collect(),
        v_b: rho.atoms_b.iter().map(|&(l, _)| chi_inverse(cb, l)).collect(),
        v_i,
        saturated,
    }
}

/// Result of a Dinkelbach solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeOptimum {
    pub value: f64,
    pub speeds: SpeedProfile,
    pub iterations: usize,
    /// `|c − ratio(v(c))|` at the returned value.
    pub residual: f64,
    pub trace: Vec<f64>,
}

/// Trial values for the starting point of the Dinkelbach iteration.
pub(crate) fn probe_grid() -> impl Iterator<Item = f64> {
    (0..25).map(|k| 1e-3 * 1.5f64.powi(k))
}

/// Runs `c ← ratio(c)` to its fixed point from the best probe value.
pub(crate) fn dinkelbach<F: FnMut(f64) -> f64>(mut ratio_at: F) -> Result<(f64, usize, f64, Vec<f64>)> {
    let mut c = probe_grid().map(&mut ratio_at).fold(f64::NEG_INFINITY, f64::max);
    if !(c > 0.0) {
        return Err(Error::NonPositive);
    }
    let mut trace = vec![c];
    for it in 1..=DINKELBACH_MAX_ITER {
        let next = ratio_at(c);
        trace.push(next);
        let step = next - c;
        if next > c {
            c = next;
        }
        if step.abs() <= 1e-13 * c.max(1.0) {
            let residual = (ratio_at(c) - c).abs();
            return Ok((c, it, residual, trace));
        }
    }
    Err(Error::NoConvergence(DINKELBACH_MAX_ITER))
}

/// `h(ρ̄) = sup_v N̄/D̄` by Dinkelbach iteration over `v(c)`.
pub fn free_energy_for_measure(rho: &SlopeMeasure, obj: &Objective) -> Result<SlopeOptimum> {
    let (value, iterations, residual, trace) = dinkelbach(|c| slope_ratio(rho, &optimal_speed(rho, c, obj), obj))?;
    if residual > DINKELBACH_TOL {
        return Err(Error::NoConvergence(iterations));
    }
    Ok(SlopeOptimum { value, speeds: optimal_speed(rho, value, obj), iterations, residual, trace })
}
