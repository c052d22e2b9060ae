use serde::{Deserialize, Serialize};

use super::{dinkelbach, slope_ratio, Objective, SlopeMeasure, SpeedProfile, DINKELBACH_TOL};
use crate::column::{psi_geom, u_theta_of_c, ColumnClass, ColumnGeometry, ColumnType};
use crate::error::{Error, Result};
use crate::oracle::Kind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnAtom {
    pub theta: ColumnType,
    pub geometry: ColumnGeometry,
    pub weight: f64,
}

/// Finite measure on column types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMeasure {
    pub atoms: Vec<ColumnAtom>,
}

impl ColumnMeasure {
    /// Builds a measure from unnormalised weights.
    pub fn normalized(atoms: Vec<(ColumnType, f64)>) -> Result<Self> {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if !(total > 0.0) || atoms.iter().any(|a| !(a.1 > 0.0)) {
            return Err(Error::ConstraintViolation("column weights must be positive".into()));
        }
        let atoms = atoms
            .into_iter()
            .map(|(theta, w)| {
                let geometry = theta.geometry()?;
                Ok(ColumnAtom { theta, geometry, weight: w / total })
            })
            .collect::<Result<_>>()?;
        Ok(Self { atoms })
    }

    pub fn single(theta: ColumnType) -> Result<Self> {
        Self::normalized(vec![(theta, 1.0)])
    }

    /// Whether every atom can be crossed within `m` steps per unit width.
    pub fn within_cap(&self, m: u32) -> bool {
        self.atoms.iter().all(|a| a.geometry.t <= m as f64 + 1e-12)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Horizontal fractions `(h_A, h_B, h_I)` per column atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionProfile {
    pub h: Vec<[f64; 3]>,
}

impl FractionProfile {
    pub fn validate(&self, rho: &ColumnMeasure) -> Result<()> {
        if self.h.len() != rho.len() {
            return Err(Error::ConstraintViolation("fraction profile does not match the measure".into()));
        }
        for (h, atom) in self.h.iter().zip(&rho.atoms) {
            let g = &atom.geometry;
            if h.iter().any(|&x| !(x >= 0.0)) || (h.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::ConstraintViolation(format!("fractions {h:?} are not on the simplex")));
            }
            if (g.l_a > 0.0 && h[0] <= 0.0) || (g.l_b > 0.0 && h[1] <= 0.0) {
                return Err(Error::ConstraintViolation(format!(
                    "fractions {h:?} leave a positive distance without horizontal room"
                )));
            }
            let ok = match g.class {
                ColumnClass::Int => true,
                ColumnClass::Nint { solvent, x: 1 } => h[kind_index(solvent)] == 1.0,
                ColumnClass::Nint { solvent, .. } => h[1 - kind_index(solvent)] == 0.0,
            };
            if !ok {
                return Err(Error::ConstraintViolation(format!("fractions {h:?} violate class {}", g.class)));
            }
        }
        Ok(())
    }

    /// Fractions proportional to the vertical distances, with at least `eta` of
    /// each column on the interface wherever the class allows one.
    pub fn heuristic(rho: &ColumnMeasure, eta: f64) -> Self {
        let h = rho
            .atoms
            .iter()
            .map(|atom| {
                let g = &atom.geometry;
                match g.class {
                    ColumnClass::Nint { solvent, x: 1 } => {
                        let mut h = [0.0; 3];
                        h[kind_index(solvent)] = 1.0;
                        h
                    }
                    ColumnClass::Nint { solvent, .. } => {
                        let mut h = [0.0; 3];
                        let k = kind_index(solvent);
                        h[k] = if g.l_of(solvent) > 0.0 { (1.0 - eta).max(1e-3) } else { 1.0 - eta };
                        h[2] = 1.0 - h[k];
                        h
                    }
                    ColumnClass::Int => {
                        let total = g.l_a + g.l_b;
                        let room = if total > 0.0 { 1.0 - eta } else { 0.0 };
                        let ha = if total > 0.0 { room * g.l_a / total } else { 0.0 };
                        let hb = if total > 0.0 { room * g.l_b / total } else { 0.0 };
                        [ha, hb, 1.0 - ha - hb]
                    }
                }
            })
            .collect();
        Self { h }
    }
}

fn kind_index(kind: Kind) -> usize {
    match kind {
        Kind::A => 0,
        Kind::B => 1,
    }
}

/// `N(ρ,u)/D(ρ,u)` of the column-based formula.
pub fn column_ratio(rho: &ColumnMeasure, u: &[f64], obj: &Objective) -> Result<f64> {
    if u.len() != rho.len() {
        return Err(Error::ConstraintViolation("time map does not match the measure".into()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (atom, &ut) in rho.atoms.iter().zip(u) {
        if ut.is_infinite() {
            return Ok(f64::NEG_INFINITY);
        }
        let s = psi_geom(&atom.geometry, ut, obj)?;
        num += atom.weight * ut * s.value;
        den += atom.weight * ut;
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnOptimum {
    pub value: f64,
    pub u: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub trace: Vec<f64>,
}

fn ratio_at_c(rho: &ColumnMeasure, c: f64, obj: &Objective) -> Result<(f64, Vec<f64>)> {
    let (mut num, mut den) = (0.0, 0.0);
    let mut us = Vec::with_capacity(rho.len());
    for atom in &rho.atoms {
        let r = u_theta_of_c(&atom.geometry, c, obj)?;
        if r.u.is_infinite() {
            return Ok((f64::NEG_INFINITY, vec![]));
        }
        num += atom.weight * r.u_psi;
        den += atom.weight * r.u;
        us.push(r.u);
    }
    Ok((num / den, us))
}

/// `g(ρ) = sup_u N/D` by Dinkelbach iteration over `u_Θ(c)`.
pub fn column_free_energy_for_measure(rho: &ColumnMeasure, obj: &Objective) -> Result<ColumnOptimum> {
    let mut failure = None;
    let outcome = dinkelbach(|c| match ratio_at_c(rho, c, obj) {
        Ok((r, _)) => r,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NEG_INFINITY
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let (value, iterations, residual, trace) = outcome?;
    if residual > DINKELBACH_TOL {
        return Err(Error::NoConvergence(iterations));
    }
    let (_, u) = ratio_at_c(rho, value, obj)?;
    Ok(ColumnOptimum { value, u, iterations, residual, trace })
}

/// Slope measure `G_{ρ,h}` and speeds from per-atom step splits `a`.
///
/// Each atom contributes slope `l_k/h_k` with weight `w·h_k`. Atoms landing on
/// the same slope are merged and get the conditional mean speed
/// `Σ w a_k / Σ w h_k`, which by concavity can only raise the ratio.
pub fn lift_to_slope(rho: &ColumnMeasure, h: &FractionProfile, a: &[[f64; 3]]) -> Result<(SlopeMeasure, SpeedProfile)> {
    h.validate(rho)?;
    if a.len() != rho.len() {
        return Err(Error::ConstraintViolation("step split does not match the measure".into()));
    }
    let mut parts: [Vec<(f64, f64, f64)>; 2] = [Vec::new(), Vec::new()];
    let (mut wi, mut ai) = (0.0, 0.0);
    for ((atom, hk), ak) in rho.atoms.iter().zip(&h.h).zip(a) {
        let w = atom.weight;
        for (k, part) in parts.iter_mut().enumerate() {
            if hk[k] <= 0.0 {
                continue;
            }
            let l = [atom.geometry.l_a, atom.geometry.l_b][k];
            let slope = l / hk[k];
            match part.iter_mut().find(|e| (e.0 - slope).abs() <= 1e-12 * slope.max(1.0)) {
                Some(e) => {
                    e.1 += w * hk[k];
                    e.2 += w * ak[k];
                }
                None => part.push((slope, w * hk[k], w * ak[k])),
            }
        }
        wi += w * hk[2];
        ai += w * ak[2];
    }
    for part in parts.iter_mut() {
        part.sort_by(|x, y| x.0.total_cmp(&y.0));
    }
    let [pa, pb] = parts;
    let measure = SlopeMeasure {
        atoms_a: pa.iter().map(|e| (e.0, e.1)).collect(),
        atoms_b: pb.iter().map(|e| (e.0, e.1)).collect(),
        w_i: wi,
    };
    let speeds = SpeedProfile {
        v_a: pa.iter().map(|e| e.2 / e.1).collect(),
        v_b: pb.iter().map(|e| e.2 / e.1).collect(),
        v_i: if wi > 0.0 { ai / wi } else { 1.0 },
        saturated: false,
    };
    Ok((measure, speeds))
}

/// Lift at the column maximisers: each atom uses the fractions and step split
/// that attain `ψ(Θ,u_Θ)`. The lifted slope ratio dominates `column_ratio(ρ,u)`.
pub fn lift_at(
    rho: &ColumnMeasure,
    u: &[f64],
    obj: &Objective,
) -> Result<(SlopeMeasure, SpeedProfile, FractionProfile)> {
    let mut hs = Vec::with_capacity(rho.len());
    let mut as_ = Vec::with_capacity(rho.len());
    for (atom, &ut) in rho.atoms.iter().zip(u) {
        let s = psi_geom(&atom.geometry, ut, obj)?;
        let mut h = s.h;
        // a zero-distance part with no steps is dropped exactly
        for k in 0..3 {
            if h[k] < 1e-15 {
                h[k] = 0.0;
            }
        }
        let total: f64 = h.iter().sum();
        let h = h.map(|x| x / total);
        hs.push(h);
        as_.push(s.a);
    }
    let h = FractionProfile { h: hs };
    let (m, v) = lift_to_slope(rho, &h, &as_)?;
    Ok((m, v, h))
}

/// Column times `u_Θ = h_A v_A + h_B v_B + h_I v_I` for a menu whose lift under
/// `h` is `rho_bar`. The column ratio at these times dominates the slope ratio.
pub fn push_to_column(
    rho_bar: &SlopeMeasure,
    v: &SpeedProfile,
    menu: &ColumnMeasure,
    h: &FractionProfile,
) -> Result<Vec<f64>> {
    h.validate(menu)?;
    v.validate(rho_bar)?;
    let find = |atoms: &[(f64, f64)], speeds: &[f64], slope: f64| {
        atoms.iter().position(|a| (a.0 - slope).abs() <= 1e-9 * slope.max(1.0)).map(|i| speeds[i])
    };
    let mut u = Vec::with_capacity(menu.len());
    for (atom, hk) in menu.atoms.iter().zip(&h.h) {
        let g = &atom.geometry;
        let mut total = 0.0;
        for (k, (atoms, speeds, l)) in
            [(&rho_bar.atoms_a, &v.v_a, g.l_a), (&rho_bar.atoms_b, &v.v_b, g.l_b)].into_iter().enumerate()
        {
            if hk[k] <= 0.0 {
                total += l;
                continue;
            }
            let slope = l / hk[k];
            let speed = find(atoms, speeds, slope).ok_or_else(|| {
                Error::MenuMismatch(format!("slope {slope} in solvent {}", if k == 0 { "A" } else { "B" }))
            })?;
            total += hk[k] * speed;
        }
        if hk[2] > 0.0 {
            if rho_bar.w_i <= 0.0 {
                return Err(Error::MenuMismatch("interface mass".into()));
            }
            total += hk[2] * v.v_i;
        }
        u.push(total);
    }
    Ok(u)
}

/// Slope-side ratio of a lifted pair, re-exported for callers comparing both
/// formulas.
pub fn lifted_ratio(rho: &ColumnMeasure, u: &[f64], obj: &Objective) -> Result<f64> {
    let (m, v, _) = lift_at(rho, u, obj)?;
    Ok(slope_ratio(&m, &v, obj))
}
