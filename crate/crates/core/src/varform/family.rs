//! Finite families of slope measures built from coarse-grained strategies on a
//! sampled block field.
//!
//! A strategy picks, column after column, the block row at which the path
//! leaves. Each crossed column becomes a column type; the empirical column
//! measure is lifted to a slope measure with heuristic fractions.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::columns::{lift_to_slope, ColumnMeasure, FractionProfile};
use super::SlopeMeasure;
use crate::column::{ColumnClass, ColumnType};
use crate::error::{Error, Result};
use crate::oracle::{Kind, MesoField, MesoLabels};
use crate::rng::{derive_seed, streams};

/// Coarse-grained path rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    /// `ρ̄_hor`, computed from `p` directly.
    Horizontal,
    /// `δ_{A,0}`, only admitted when every block is A.
    DeltaA,
    /// Never change row.
    Straight { touch: bool, eta: f64 },
    /// Move to the nearest row whose next block is A.
    Greedy { touch: bool, eta: f64 },
    /// Follow a route through A-blocks only, found by a backward sweep; falls
    /// back on `Greedy` when the sampled field has none.
    Percolating { touch: bool, eta: f64 },
}

impl Strategy {
    pub fn name(&self) -> String {
        match *self {
            Strategy::Horizontal => "horizontal".into(),
            Strategy::DeltaA => "delta_a".into(),
            Strategy::Straight { touch, eta } => format!("straight(touch={touch},eta={eta})"),
            Strategy::Greedy { touch, eta } => format!("greedy(touch={touch},eta={eta})"),
            Strategy::Percolating { touch, eta } => format!("percolating(touch={touch},eta={eta})"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    /// Parses the format written by [`Strategy::name`].
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("unknown strategy `{s}`"));
        let s = s.trim();
        match s {
            "horizontal" => return Ok(Strategy::Horizontal),
            "delta_a" => return Ok(Strategy::DeltaA),
            _ => {}
        }
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let body = rest.strip_suffix(')').ok_or_else(bad)?;
        let (mut touch, mut eta) = (None, None);
        for part in body.split(',') {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            match k.trim() {
                "touch" => touch = Some(v.trim().parse::<bool>().map_err(|_| bad())?),
                "eta" => eta = Some(v.trim().parse::<f64>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let (touch, eta) = (touch.ok_or_else(bad)?, eta.ok_or_else(bad)?);
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::Domain(format!("eta = {eta} outside [0,1)")));
        }
        match head.trim() {
            "straight" => Ok(Strategy::Straight { touch, eta }),
            "greedy" => Ok(Strategy::Greedy { touch, eta }),
            "percolating" => Ok(Strategy::Percolating { touch, eta }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySettings {
    pub n_columns: usize,
    /// Half-height of the band searched for all-A routes.
    pub band: i64,
    pub strategies: Vec<Strategy>,
}

impl Default for FamilySettings {
    fn default() -> Self {
        use Strategy::*;
        Self {
            n_columns: 10_000,
            band: 256,
            strategies: vec![
                Horizontal,
                Straight { touch: false, eta: 0.0 },
                Straight { touch: true, eta: 0.5 },
                Straight { touch: true, eta: 0.9 },
                Greedy { touch: false, eta: 0.0 },
                Greedy { touch: false, eta: 0.3 },
                Greedy { touch: true, eta: 0.5 },
                Greedy { touch: true, eta: 0.9 },
                Percolating { touch: false, eta: 0.0 },
                Percolating { touch: true, eta: 0.3 },
                Percolating { touch: true, eta: 0.6 },
                Percolating { touch: true, eta: 0.9 },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub name: String,
    pub strategy: Strategy,
    pub measure: SlopeMeasure,
    pub columns: Option<ColumnMeasure>,
    /// The percolating rule found no all-A route and fell back on greedy moves.
    #[serde(default)]
    pub fallback: bool,
}

impl FamilyMember {
    pub fn is_b_free(&self) -> bool {
        self.measure.atoms_b.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub p: f64,
    pub big_m: u32,
    pub m: u32,
    pub seed: u64,
    pub settings: FamilySettings,
    pub members: Vec<FamilyMember>,
}

impl Family {
    /// Members with zero B-mass.
    pub fn saturated(&self) -> Vec<&FamilyMember> {
        self.members.iter().filter(|m| m.is_b_free()).collect()
    }

    pub fn measures(&self) -> Vec<&SlopeMeasure> {
        self.members.iter().map(|m| &m.measure).collect()
    }
}

struct Walker<'a> {
    field: &'a MesoField,
    big_m: i64,
    radius: i64,
}

impl Walker<'_> {
    fn is_a(&self, col: i64, row: i64) -> bool {
        self.field.label(col, row) == Kind::A
    }

    /// All blocks of column `col` between rows `from` and `to` are A.
    fn clear(&self, col: i64, from: i64, to: i64) -> bool {
        (from.min(to)..=from.max(to)).all(|r| self.is_a(col, r))
    }

    fn moves(&self) -> Vec<i64> {
        let mut d: Vec<i64> = (-self.big_m..=self.big_m).collect();
        d.sort_by_key(|&x| (x.abs(), x < 0));
        d
    }

    fn greedy(&self, n: usize, start: i64) -> Vec<i64> {
        let mut rows = vec![start];
        let moves = self.moves();
        for j in 0..n as i64 {
            let k = *rows.last().expect("non-empty");
            let pick = moves
                .iter()
                .copied()
                .find(|&d| self.clear(j, k, k + d) && self.is_a(j + 1, k + d))
                .or_else(|| moves.iter().copied().find(|&d| self.is_a(j + 1, k + d)))
                .unwrap_or(0);
            rows.push(k + pick);
        }
        rows
    }

    /// Route through A-blocks only, by a backward reachability sweep over a band.
    fn percolating(&self, n: usize, band: i64) -> Option<Vec<i64>> {
        let width = (2 * band + 1) as usize;
        let idx = |r: i64| (r + band) as usize;
        let moves = self.moves();
        let mut good = vec![vec![false; width]; n + 1];
        for r in -band..=band {
            good[n][idx(r)] = self.is_a(n as i64, r);
        }
        for j in (0..n).rev() {
            for r in -band..=band {
                good[j][idx(r)] = moves.iter().any(|&d| {
                    let t = r + d;
                    t.abs() <= band && good[j + 1][idx(t)] && self.clear(j as i64, r, t)
                });
            }
        }
        let start = (0..=band).flat_map(|r| [r, -r]).find(|&r| good[0][idx(r)])?;
        let mut rows = vec![start];
        for j in 0..n {
            let k = *rows.last().expect("non-empty");
            let d = moves
                .iter()
                .copied()
                .find(|&d| (k + d).abs() <= band && good[j + 1][idx(k + d)] && self.clear(j as i64, k, k + d))
                .expect("reachability guarantees a move");
            rows.push(k + d);
        }
        Some(rows)
    }

    fn column_type(&self, col: i64, from: i64, to: i64, touch: bool, m: u32) -> ColumnType {
        let chi: Vec<Kind> = (-self.radius..=self.radius).map(|i| self.field.label(col, from + i)).collect();
        let dpi = (to - from) as i32;
        let plain = ColumnType { chi, dpi, b0: 0.5, b1: 0.5, x: 1 };
        if touch {
            let tagged = ColumnType { x: 2, ..plain.clone() };
            if let Ok(g) = tagged.geometry() {
                if matches!(g.class, ColumnClass::Nint { .. }) && g.t <= m as f64 {
                    return tagged;
                }
            }
        }
        plain
    }
}

type ThetaKey = (Vec<Kind>, i32, u8);

/// Samples the block field and builds one slope measure per strategy.
pub fn measure_family_from_disorder(
    p: f64,
    big_m: u32,
    m: u32,
    seed: u64,
    settings: &FamilySettings,
) -> Result<Family> {
    let field = MesoField::new(derive_seed(seed, streams::FAMILY, 0), p);
    let walker = Walker { field: &field, big_m: big_m as i64, radius: m as i64 - 1 };
    let n = settings.n_columns;
    let mut members = Vec::new();
    for &strategy in &settings.strategies {
        let (touch, eta, rows, fallback) = match strategy {
            Strategy::Horizontal => {
                members.push(FamilyMember {
                    name: strategy.name(),
                    strategy,
                    measure: SlopeMeasure::rho_hor(p),
                    columns: None,
                    fallback: false,
                });
                continue;
            }
            Strategy::DeltaA => {
                if p >= 1.0 {
                    members.push(FamilyMember {
                        name: strategy.name(),
                        strategy,
                        measure: SlopeMeasure::delta_a(0.0),
                        columns: None,
                        fallback: false,
                    });
                }
                continue;
            }
            Strategy::Straight { touch, eta } => (touch, eta, vec![0; n + 1], false),
            Strategy::Greedy { touch, eta } => (touch, eta, walker.greedy(n, 0), false),
            Strategy::Percolating { touch, eta } => match walker.percolating(n, settings.band) {
                Some(rows) => (touch, eta, rows, false),
                None => (touch, eta, walker.greedy(n, 0), true),
            },
        };
        let mut counts: BTreeMap<ThetaKey, usize> = BTreeMap::new();
        for j in 0..n {
            let th = walker.column_type(j as i64, rows[j], rows[j + 1], touch, m);
            *counts.entry((th.chi, th.dpi, th.x)).or_default() += 1;
        }
        let atoms = counts
            .into_iter()
            .map(|((chi, dpi, x), c)| (ColumnType { chi, dpi, b0: 0.5, b1: 0.5, x }, c as f64))
            .collect();
        let columns = ColumnMeasure::normalized(atoms)?;
        let h = FractionProfile::heuristic(&columns, eta);
        // speeds are irrelevant here; only the lifted measure is kept
        let a: Vec<[f64; 3]> = h.h.iter().map(|x| x.map(|y| 2.0 * y)).collect();
        let (lifted, _) = lift_to_slope(&columns, &h, &a)?;
        let measure = SlopeMeasure::normalized(lifted.atoms_a, lifted.atoms_b, lifted.w_i)?;
        members.push(FamilyMember { name: strategy.name(), strategy, measure, columns: Some(columns), fallback });
    }
    Ok(Family { p, big_m, m, seed, settings: settings.clone(), members })
}
