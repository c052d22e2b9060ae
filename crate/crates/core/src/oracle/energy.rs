use std::collections::BTreeMap;

use super::disorder::{DisorderPair, Kind, MesoLabels};
use super::path::{DirectedPath, Step};
use crate::error::{Error, Result};
use crate::numeric::log_add_exp;
use crate::params::ModelParams;

type Bond = ((i64, i64), (i64, i64));

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// Block `(column, row)` used to record where a path sits on the block scale.
///
/// Blocks are `(jL,(j+1)L] × (kL,(k+1)L]`; bonds on a block boundary are
/// attributed to the block below (horizontal) or to the left (vertical).
pub fn bond_block(bond: Bond, l: i64) -> (i64, i64) {
    let ((x0, y0), (x1, y1)) = bond;
    if y0 == y1 {
        (x0.min(x1).div_euclid(l), ceil_div(y0, l) - 1)
    } else {
        ((ceil_div(x0, l) - 1).max(0), y0.min(y1).div_euclid(l))
    }
}

/// Solvent seen by a bond. A bond on the boundary of an A-block counts as A.
pub fn bond_kind<F: MesoLabels + ?Sized>(bond: Bond, l: i64, field: &F) -> Kind {
    let ((x0, y0), (x1, y1)) = bond;
    let mut cells: [(i64, i64); 2] = [(0, 0); 2];
    let n = if y0 == y1 {
        let col = x0.min(x1).div_euclid(l);
        if y0.rem_euclid(l) == 0 {
            cells[0] = (col, y0 / l - 1);
            cells[1] = (col, y0 / l);
            2
        } else {
            cells[0] = (col, y0.div_euclid(l));
            1
        }
    } else {
        let row = y0.min(y1).div_euclid(l);
        if x0 == 0 {
            cells[0] = (0, row);
            1
        } else if x0.rem_euclid(l) == 0 {
            cells[0] = (x0 / l - 1, row);
            cells[1] = (x0 / l, row);
            2
        } else {
            cells[0] = (x0.div_euclid(l), row);
            1
        }
    };
    if cells[..n].iter().any(|&(c, r)| field.label(c, r) == Kind::A) {
        Kind::A
    } else {
        Kind::B
    }
}

/// Energy of one monomer of type `monomer` in solvent `solvent`.
#[inline]
pub fn monomer_energy(monomer: Kind, solvent: Kind, params: &ModelParams) -> f64 {
    match (solvent, monomer) {
        (Kind::A, _) => 0.0,
        (Kind::B, Kind::B) => params.beta,
        (Kind::B, Kind::A) => -params.alpha,
    }
}

pub fn hamiltonian(path: &DirectedPath, dis: &DisorderPair, params: &ModelParams, l: usize) -> Result<f64> {
    if path.len() > dis.omega.len() {
        return Err(Error::DisorderTooShort { needed: path.len(), have: dis.omega.len() });
    }
    let l = l as i64;
    Ok(path.bonds().into_iter().zip(&dis.omega).map(|(b, &w)| monomer_energy(w, bond_kind(b, l, dis), params)).sum())
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct State {
    x: i64,
    y: i64,
    last: u8,
    v_prev: i64,
}

fn dir_index(s: Step) -> u8 {
    match s {
        Step::East => 0,
        Step::North => 1,
        Step::South => 2,
    }
}

/// Row of the block holding the last bond that ended at `(x, y)` via `last`.
fn last_bond_row(y: i64, last: Step, l: i64) -> i64 {
    match last {
        Step::South => y.div_euclid(l),
        _ => ceil_div(y, l) - 1,
    }
}

/// `(1/n) log Σ_{π ∈ W_{n,M}} exp(H(π))` by an exact transfer sum.
///
/// Paths start at `(0,1)`. The state carries the block row at which the
/// previous column was left, so the cap `|v_j − v_{j−1}| ≤ M` is checked every
/// time a path enters a new column and once more for the last column.
pub fn finite_free_energy(n: usize, l: usize, dis: &DisorderPair, params: &ModelParams, budget: usize) -> Result<f64> {
    if n > budget {
        return Err(Error::BudgetExceeded { needed: n, budget });
    }
    if n > dis.omega.len() {
        return Err(Error::DisorderTooShort { needed: n, have: dis.omega.len() });
    }
    if n == 0 {
        return Ok(0.0);
    }
    let li = l as i64;
    let cap = params.big_m as i64;
    let mut layer: BTreeMap<State, f64> = BTreeMap::new();
    layer.insert(State { x: 0, y: 1, last: 0, v_prev: 0 }, 0.0);
    for &w in &dis.omega[..n] {
        let mut next: BTreeMap<State, f64> = BTreeMap::new();
        for (st, &lw) in &layer {
            let last = Step::ALL[st.last as usize];
            for step in Step::ALL {
                if !last.allows(step) {
                    continue;
                }
                let mut v_prev = st.v_prev;
                if step == Step::East && st.x > 0 && st.x % li == 0 {
                    // leaving column x/L − 1 through its last bond
                    let row = last_bond_row(st.y, last, li);
                    if (row - v_prev).abs() > cap {
                        continue;
                    }
                    v_prev = row;
                }
                let (dx, dy) = step.delta();
                let to = (st.x + dx, st.y + dy);
                let e = monomer_energy(w, bond_kind(((st.x, st.y), to), li, dis), params);
                let ns = State { x: to.0, y: to.1, last: dir_index(step), v_prev };
                let val = lw + e;
                next.entry(ns).and_modify(|acc| *acc = log_add_exp(*acc, val)).or_insert(val);
            }
        }
        layer = next;
    }
    let mut total = f64::NEG_INFINITY;
    for (st, &lw) in &layer {
        let row = last_bond_row(st.y, Step::ALL[st.last as usize], li);
        if (row - st.v_prev).abs() <= cap {
            total = log_add_exp(total, lw);
        }
    }
    Ok(total / n as f64)
}
