//! Path entropy per step `κ̃(u,l)` of directed paths crossing a column at slope `l`
//! with `u` steps per unit width.
//!
//! The limit is the Legendre transform of the per-column generating function of
//! signed vertical stretches. The two tilts of that transform solve a quadratic
//! in closed form, so `κ̃`, its `u`-derivative and the inverse of the derivative
//! are all explicit.

use std::collections::HashMap;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{big_ln, count_paths_stretch_form, HPoint};

/// Slack accepted when a caller sits on the boundary `u = 1 + |l|`.
const BOUNDARY_SLACK: f64 = 1e-12;

/// Limit entropy `κ̃(u,l)`; `−∞` below the boundary `u < 1 + |l|`.
pub fn kappa(u: f64, l: f64) -> f64 {
    let l = l.abs();
    let excess = u - 1.0 - l;
    if excess < -BOUNDARY_SLACK * u.max(1.0) {
        return f64::NEG_INFINITY;
    }
    if u.is_infinite() {
        return 0.0;
    }
    u_kappa(u, l) / u
}

/// `u·κ̃(u,l)`, the log-growth rate per unit width.
pub fn u_kappa(u: f64, l: f64) -> f64 {
    let l = l.abs();
    // up and down totals per unit width
    let up = 0.5 * (u - 1.0 + l);
    let down = (0.5 * (u - 1.0 - l)).max(0.0);
    let w = up * down;
    let root = (4.0 * w + 1.0).sqrt();
    let denom = (2.0 * w + 1.0) + root;
    // s = x² at the saddle, with 1 − s kept exact
    let s = 2.0 * w / denom;
    let one_m_s = (1.0 + root) / denom;
    let gap = up * one_m_s;
    let p = (s + gap) / (1.0 + gap);
    let one_m_p = one_m_s / (1.0 + gap);
    let mut value = one_m_s.ln() - one_m_p.ln();
    if up > 0.0 {
        value -= up * p.ln();
    }
    if down > 0.0 {
        let q = s / p;
        let one_m_q = gap * one_m_p / p;
        value -= one_m_q.ln() + down * q.ln();
    }
    value.max(0.0)
}

/// `∂_u(u·κ̃(u,l))` at `u = v`.
pub fn kappa_derivative(v: f64, l: f64) -> Result<f64> {
    let l = l.abs();
    if !(v > 1.0 + l) {
        return Err(Error::Domain(format!("derivative needs v > 1 + |l|, got v = {v}, l = {l}")));
    }
    if l == 0.0 {
        return Ok((1.0 / (v - 1.0)).asinh());
    }
    Ok(g_ab(v / l, 1.0 / l))
}

/// The derivative in the `(a,b) = (v/l, 1/l)` coordinates, written so that no
/// factor `1/(1 − b)` appears.
fn g_ab(a: f64, b: f64) -> f64 {
    let root = ((a - b).powi(2) + b * b - 1.0).max(0.0).sqrt();
    let lo = 2.0 * b / ((a + 1.0) + root);
    let hi = 2.0 * b / ((a - 1.0) + root);
    -0.5 * (-lo).ln_1p() - 0.5 * (-hi).ln_1p()
}

/// Inverse of `v ↦ ∂_u(u·κ̃(u,l))(v)` on `(1+|l|, ∞)`.
///
/// Returns `+∞` for `c ≤ 0`, where no finite speed attains the slope.
pub fn chi_inverse(c: f64, l: f64) -> f64 {
    if !(c > 0.0) {
        return f64::INFINITY;
    }
    let l = l.abs();
    let sh = c.sinh();
    1.0 + (l * l + 1.0 / (sh * sh)).sqrt()
}

/// Maximiser of `κ̃(·, l)`, i.e. the speed at which `∂_u(uκ̃) = κ̃`.
pub fn best_speed(l: f64) -> (f64, f64) {
    let mut c = kappa(2.0 + l.abs(), l).max(1e-3);
    for _ in 0..200 {
        let v = chi_inverse(c, l);
        let next = kappa(v, l);
        if (next - c).abs() < 1e-15 {
            c = next;
            break;
        }
        c = next;
    }
    (chi_inverse(c, l), c)
}

/// Settings and memo for finite-size entropies.
#[derive(Debug, Serialize, Deserialize)]
pub struct EntropyEvaluator {
    pub ladder: Vec<usize>,
    #[serde(skip)]
    cache: RwLock<HashMap<HPoint, f64>>,
}

impl Default for EntropyEvaluator {
    fn default() -> Self {
        Self::new(vec![8, 16, 32, 64])
    }
}

impl Clone for EntropyEvaluator {
    fn clone(&self) -> Self {
        Self::new(self.ladder.clone())
    }
}

impl EntropyEvaluator {
    pub fn new(ladder: Vec<usize>) -> Self {
        Self { ladder, cache: RwLock::new(HashMap::new()) }
    }

    pub fn kappa(&self, u: f64, l: f64) -> f64 {
        kappa(u, l)
    }

    pub fn kappa_derivative(&self, v: f64, l: f64) -> Result<f64> {
        kappa_derivative(v, l)
    }

    pub fn chi_inverse(&self, c: f64, l: f64) -> f64 {
        chi_inverse(c, l)
    }

    /// `κ̃_L(u,l) = (1/uL) log |W_L(u,l)|`, exact up to the final logarithm.
    pub fn kappa_finite(&self, width: usize, u: f64, l: f64) -> Result<f64> {
        let pt = HPoint::from_real(width, u, l)?;
        self.kappa_finite_at(pt)
    }

    pub fn kappa_finite_at(&self, pt: HPoint) -> Result<f64> {
        if let Some(v) = self.cache.read().expect("entropy cache poisoned").get(&pt) {
            return Ok(*v);
        }
        let value = big_ln(&count_paths_stretch_form(pt)) / pt.steps as f64;
        self.cache.write().expect("entropy cache poisoned").insert(pt, value);
        Ok(value)
    }

    /// `κ̃_L(u,l)` along the configured ladder, skipping widths where `(u,l)` is
    /// off the lattice.
    pub fn ladder_values(&self, u: f64, l: f64) -> Vec<(usize, f64)> {
        self.ladder.iter().filter_map(|&w| self.kappa_finite(w, u, l).ok().map(|k| (w, k))).collect()
    }

    pub fn cached_points(&self) -> usize {
        self.cache.read().expect("entropy cache poisoned").len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_zero() {
        assert_eq!(kappa(1.0, 0.0), 0.0);
    }

    #[test]
    fn boundary_value_is_binomial_rate() {
        // only up-stretches: (1+l)log(1+l) − l log l per unit width
        let l: f64 = 1.5;
        let expect = ((1.0 + l) * (1.0 + l).ln() - l * l.ln()) / (1.0 + l);
        assert!((kappa(1.0 + l, l) - expect).abs() < 1e-13);
    }

    #[test]
    fn derivative_matches_known_value() {
        let d = kappa_derivative(2.5, 1.0).unwrap();
        assert!((d - (1.0 / 1.25f64.sqrt()).asinh()).abs() < 1e-12);
        assert!(kappa_derivative(2.0, 1.0).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        for &(v, l) in &[(1.3, 0.0), (2.5, 1.0), (9.0, 3.0), (4.0, 0.2)] {
            let c = kappa_derivative(v, l).unwrap();
            assert!((chi_inverse(c, l) - v).abs() < 1e-9 * v);
        }
        assert!(chi_inverse(0.0, 1.0).is_infinite());
    }

    #[test]
    fn best_speed_is_a_fixed_point() {
        let (v, k) = best_speed(0.0);
        assert!((kappa(v, 0.0) - k).abs() < 1e-12);
        assert!((kappa_derivative(v, 0.0).unwrap() - k).abs() < 1e-10);
    }

    #[test]
    fn finite_below_limit() {
        let ev = EntropyEvaluator::default();
        let k8 = ev.kappa_finite(8, 2.0, 0.5).unwrap();
        assert!(k8 <= kappa(2.0, 0.5));
        assert_eq!(ev.cached_points(), 1);
        assert_eq!(ev.kappa_finite(8, 2.0, 0.5).unwrap(), k8);
    }
}
