use rayon::prelude::*;

use super::disorder::{omega_word, Kind};
use super::energy::monomer_energy;
use super::path::Step;
use crate::column::{geometry, ColumnClass, ColumnType};
use crate::error::{Error, Result};
use crate::numeric::{log_add_exp, mean_stderr};
use crate::params::ModelParams;
use crate::rng::{derive_seed, streams};

/// Lattice height of a block-unit height, if it sits on the lattice.
fn lattice_height(h: f64, width: usize) -> Result<i64> {
    let y = h * width as f64;
    let r = y.round();
    if (y - r).abs() > 1e-9 {
        return Err(Error::Domain(format!("height {h} is not a multiple of 1/{width}")));
    }
    Ok(r as i64)
}

/// Solvent of a horizontal bond at lattice height `y`; a bond on an interface
/// row sees both neighbouring blocks and A wins.
fn horizontal_kind(theta: &ColumnType, y: i64, width: i64) -> Kind {
    if y.rem_euclid(width) == 0 {
        let k = y.div_euclid(width);
        if theta.label(k - 1) == Kind::A || theta.label(k) == Kind::A {
            Kind::A
        } else {
            Kind::B
        }
    } else {
        theta.label(y.div_euclid(width))
    }
}

/// `log Z^ω_L(Θ,u)` for a path of `steps` monomers crossing one column of
/// width `width`.
///
/// The path enters at `(0, b₀L)` and leaves at `(L, (ΔΠ+b₁)L)`. On the `x = 1`
/// classes it may not visit an interface row; on `x = 2` it must visit one.
pub fn column_log_partition(
    theta: &ColumnType,
    width: usize,
    steps: usize,
    omega: &[Kind],
    params: &ModelParams,
) -> Result<f64> {
    if omega.len() < steps {
        return Err(Error::DisorderTooShort { needed: steps, have: omega.len() });
    }
    let geom = geometry(theta)?;
    let w = width as i64;
    let y0 = lattice_height(theta.b0, width)?;
    let y1 = lattice_height(theta.dpi as f64 + theta.b1, width)?;
    let rows: Vec<i64> = geom.interfaces.iter().map(|&n| n * w).collect();
    let on_interface = |y: i64| rows.contains(&y);
    let (forbid, require) = match geom.class {
        ColumnClass::Nint { x: 1, .. } => (true, false),
        ColumnClass::Nint { .. } => (false, true),
        ColumnClass::Int => (false, false),
    };
    if forbid && on_interface(y0) {
        return Err(Error::EmptyPathSet);
    }

    let span = steps as i64;
    let height = (2 * span + 1) as usize;
    let idx = |x: i64, y: i64, d: usize, t: usize| (((x as usize) * height + (y - y0 + span) as usize) * 3 + d) * 2 + t;
    let size = (width + 1) * height * 6;
    let mut cur = vec![f64::NEG_INFINITY; size];
    cur[idx(0, y0, 0, on_interface(y0) as usize)] = 0.0;
    for &monomer in &omega[..steps] {
        let mut nxt = vec![f64::NEG_INFINITY; size];
        for x in 0..=w {
            for y in y0 - span..=y0 + span {
                for (d, last) in Step::ALL.iter().enumerate() {
                    for t in 0..2 {
                        let lw = cur[idx(x, y, d, t)];
                        if lw == f64::NEG_INFINITY {
                            continue;
                        }
                        for (nd, step) in Step::ALL.iter().enumerate() {
                            if !last.allows(*step) {
                                continue;
                            }
                            let (dx, dy) = step.delta();
                            let (nx, ny) = (x + dx, y + dy);
                            if nx > w || (ny - y0).abs() > span {
                                continue;
                            }
                            let touch = on_interface(ny);
                            if forbid && touch {
                                continue;
                            }
                            let solvent = if dy == 0 {
                                horizontal_kind(theta, y, w)
                            } else {
                                theta.label(y.min(ny).div_euclid(w))
                            };
                            let e = monomer_energy(monomer, solvent, params);
                            let k = idx(nx, ny, nd, t.max(touch as usize));
                            nxt[k] = log_add_exp(nxt[k], lw + e);
                        }
                    }
                }
            }
        }
        cur = nxt;
    }
    if (y1 - y0).abs() > span {
        return Err(Error::EmptyPathSet);
    }
    let mut total = f64::NEG_INFINITY;
    for d in 0..3 {
        for t in 0..2 {
            if require && t == 0 {
                continue;
            }
            total = log_add_exp(total, cur[idx(w, y1, d, t)]);
        }
    }
    if total == f64::NEG_INFINITY {
        return Err(Error::EmptyPathSet);
    }
    Ok(total)
}

/// Mean and standard error of `(1/uL) log Z^ω_L(Θ,u)` over `samples` words.
pub fn column_free_energy_finite(
    theta: &ColumnType,
    u: f64,
    width: usize,
    samples: usize,
    seed: u64,
    params: &ModelParams,
    budget: usize,
) -> Result<(f64, f64)> {
    let steps_real = u * width as f64;
    let steps = steps_real.round() as usize;
    if (steps_real - steps as f64).abs() > 1e-9 {
        return Err(Error::Domain(format!("uL = {steps_real} is not an integer")));
    }
    if steps > budget {
        return Err(Error::BudgetExceeded { needed: steps, budget });
    }
    let values: Vec<f64> = (0..samples.max(1) as u64)
        .into_par_iter()
        .map(|s| {
            let omega = omega_word(derive_seed(seed, streams::COLUMN, s), steps);
            column_log_partition(theta, width, steps, &omega, params).map(|z| z / steps as f64)
        })
        .collect::<Result<_>>()?;
    Ok(mean_stderr(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{big_ln, enumerate_column_paths, HPoint};

    #[test]
    fn all_a_column_counts_paths() {
        let th = ColumnType::uniform(Kind::A, 4, 1, 0.5, 0.5, 1).unwrap();
        let params = ModelParams::with_default_caps(2.0, 1.0, 0.5).unwrap();
        let omega = vec![Kind::B; 8];
        // no interfaces anywhere, so every path counts
        let z = column_log_partition(&th, 2, 8, &omega, &params).unwrap();
        let count = enumerate_column_paths(HPoint::new(2, 8, 2).unwrap(), 24).unwrap();
        assert!((z - big_ln(&count)).abs() < 1e-12);
    }

    #[test]
    fn touching_is_required_for_tag_two() {
        let th = ColumnType::new(vec![Kind::B, Kind::A, Kind::A], 0, 0.5, 0.5, 2).unwrap();
        let params = ModelParams::with_default_caps(1.0, 0.0, 0.5).unwrap();
        let omega = vec![Kind::A; 4];
        // width 2: entry and exit at height 1, the interface row is 0
        assert!(matches!(column_log_partition(&th, 2, 2, &omega, &params), Err(Error::EmptyPathSet)));
        assert!(column_log_partition(&th, 2, 4, &omega, &params).is_ok());
    }
}
