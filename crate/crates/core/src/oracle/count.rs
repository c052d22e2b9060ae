use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::path::Step;
use crate::error::{Error, Result};

/// Default cap on `uL` for exhaustive counting and transfer sums.
pub const DEFAULT_BUDGET: usize = 24;

/// A point of `H_L`: a column of width `L` crossed in `steps = uL` steps with
/// vertical displacement `rise = lL`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HPoint {
    pub width: usize,
    pub steps: usize,
    pub rise: i64,
}

impl HPoint {
    pub fn new(width: usize, steps: usize, rise: i64) -> Result<Self> {
        if width == 0 {
            return Err(Error::Domain("column width must be positive".into()));
        }
        let min = width + rise.unsigned_abs() as usize;
        if steps < min || (steps - min) % 2 != 0 {
            return Err(Error::Domain(format!("({steps} steps, rise {rise}) is not reachable in width {width}")));
        }
        Ok(Self { width, steps, rise })
    }

    /// Builds the point from real coordinates, requiring `uL` and `lL` to be integers.
    pub fn from_real(width: usize, u: f64, l: f64) -> Result<Self> {
        let lw = width as f64;
        let (s, r) = (u * lw, l * lw);
        if (s - s.round()).abs() > 1e-9 || (r - r.round()).abs() > 1e-9 || s < 0.0 {
            return Err(Error::Domain(format!("(u,l) = ({u},{l}) is off the 1/{width} lattice")));
        }
        Self::new(width, s.round() as usize, r.round() as i64)
    }

    pub fn u(&self) -> f64 {
        self.steps as f64 / self.width as f64
    }

    pub fn l(&self) -> f64 {
        self.rise as f64 / self.width as f64
    }

    fn vertical(&self) -> (u64, u64) {
        let v = (self.steps - self.width) as i64;
        (((v + self.rise) / 2) as u64, ((v - self.rise) / 2) as u64)
    }
}

/// Natural logarithm of a big integer, accurate for any size.
pub fn big_ln(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().expect("below f64 range").ln();
    }
    let shift = bits - 900;
    (n >> shift).to_f64().expect("shifted into range").ln() + shift as f64 * std::f64::consts::LN_2
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Compositions of `n` into exactly `k` positive parts.
fn compositions(n: u64, k: u64) -> BigUint {
    match (n, k) {
        (0, 0) => BigUint::one(),
        (_, 0) | (0, _) => BigUint::zero(),
        _ => binomial(n - 1, k - 1),
    }
}

/// `|W_L(u,l)|` by a memoised transfer over (x, y, last step).
pub fn enumerate_column_paths(pt: HPoint, budget: usize) -> Result<BigUint> {
    if pt.steps > budget {
        return Err(Error::BudgetExceeded { needed: pt.steps, budget });
    }
    let span = pt.steps as i64;
    let height = (2 * span + 1) as usize;
    let idx = |x: usize, y: i64, d: usize| (x * height + (y + span) as usize) * 3 + d;
    let size = (pt.width + 1) * height * 3;
    let mut layer = vec![BigUint::zero(); size];
    // The first step is unconstrained, so seed the origin as if arriving East.
    layer[idx(0, 0, 0)] = BigUint::one();
    for _ in 0..pt.steps {
        let mut next = vec![BigUint::zero(); size];
        for x in 0..=pt.width {
            for y in -span..=span {
                for (d, last) in Step::ALL.iter().enumerate() {
                    let w = &layer[idx(x, y, d)];
                    if w.is_zero() {
                        continue;
                    }
                    for (nd, step) in Step::ALL.iter().enumerate() {
                        if !last.allows(*step) {
                            continue;
                        }
                        let (dx, dy) = step.delta();
                        let (nx, ny) = (x + dx as usize, y + dy);
                        if nx > pt.width || ny.abs() > span {
                            continue;
                        }
                        next[idx(nx, ny, nd)] += w;
                    }
                }
            }
        }
        layer = next;
    }
    let mut total = BigUint::zero();
    for d in 0..3 {
        total += &layer[idx(pt.width, pt.rise, d)];
    }
    Ok(total)
}

/// `|W_L(u,l)|` by counting vertical stretches.
///
/// A path is `L` East steps interleaved with `L+1` slots, each holding an empty,
/// all-up or all-down stretch. With `r` non-empty slots of which `r₊` go up, the
/// ups and downs are compositions of the totals into `r₊` and `r − r₊` parts.
/// The `r = 0` term counts the straight path.
pub fn count_paths_stretch_form(pt: HPoint) -> BigUint {
    count_paths_stretch_form_from(pt, 0)
}

/// Stretch count restricted to `r >= r_min`; `r_min = 1` reproduces the
/// textbook formula without the empty-stretch term.
pub fn count_paths_stretch_form_from(pt: HPoint, r_min: u64) -> BigUint {
    let slots = pt.width as u64 + 1;
    let (ups, downs) = pt.vertical();
    let mut total = BigUint::zero();
    for r in r_min..=slots.min(ups + downs) {
        let mut inner = BigUint::zero();
        for r_up in 0..=r {
            let c_up = compositions(ups, r_up);
            if c_up.is_zero() {
                continue;
            }
            let c_down = compositions(downs, r - r_up);
            if c_down.is_zero() {
                continue;
            }
            inner += binomial(r, r_up) * c_up * c_down;
        }
        total += binomial(slots, r) * inner;
    }
    total
}
