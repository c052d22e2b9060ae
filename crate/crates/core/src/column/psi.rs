//! The concave program behind `ψ(Θ,u)`.
//!
//! The main solver works on the Lagrangian dual of the step budget
//! `a_A + a_B + a_I = u`. For a multiplier `λ` each term maximises in closed form
//! over its own number of steps, leaving at most a one-dimensional concave search
//! over the horizontal fractions. The multiplier is then fixed by bisection on
//! the total number of steps it induces, which is non-increasing in `λ`.

use serde::{Deserialize, Serialize};

use super::{geometry, ColumnClass, ColumnGeometry, ColumnType};
use crate::entropy::{chi_inverse, u_kappa};
use crate::error::{Error, Result};
use crate::numeric::golden_max;
use crate::oracle::Kind;
use crate::varform::Objective;

/// Largest multiplier tried; beyond it every speed equals its lower bound to
/// machine precision.
const LAMBDA_CAP: f64 = 700.0;
const H_TOL: f64 = 1e-12;

/// Maximiser of the column program at one `u`.
///
/// Index 0 is solvent A, 1 is solvent B, 2 the interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiSolution {
    pub u: f64,
    pub value: f64,
    pub h: [f64; 3],
    pub a: [f64; 3],
    pub lambda: f64,
    /// Dual bound minus primal value, per step.
    pub dual_gap: f64,
    pub saturated: bool,
}

/// Maximiser of `u ↦ uψ(Θ,u) − cu` on `[t_Θ, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UTheta {
    pub u: f64,
    /// `u·ψ(Θ,u)` at the maximiser.
    pub u_psi: f64,
    pub solution: Option<PsiSolution>,
    pub saturated: bool,
}

struct Problem<'a> {
    obj: &'a Objective,
    class: ColumnClass,
    l: [f64; 2],
    t: f64,
}

#[derive(Debug, Clone, Copy)]
struct Inner {
    q: f64,
    h: [f64; 3],
    a: [f64; 3],
    saturated: bool,
}

impl Inner {
    fn total(&self) -> f64 {
        self.a.iter().sum()
    }
}

impl<'a> Problem<'a> {
    fn new(geom: &ColumnGeometry, obj: &'a Objective) -> Self {
        Self { obj, class: geom.class, l: [geom.l_a, geom.l_b], t: geom.t }
    }

    fn uses(&self, comp: usize) -> bool {
        match self.class {
            ColumnClass::Int => true,
            ColumnClass::Nint { solvent, x } => {
                let k = solvent_index(solvent);
                comp == k || (comp == 2 && x == 2)
            }
        }
    }

    /// Smallest admissible multiplier (exclusive).
    fn lambda_floor(&self) -> f64 {
        match self.class {
            ColumnClass::Nint { solvent: Kind::B, x: 1 } => self.obj.b_shift(),
            _ => 0.0,
        }
    }

    fn lambdas(&self, lam: f64) -> [f64; 2] {
        [lam, lam - self.obj.b_shift()]
    }

    /// `J_k(h) = sup_a [h κ̂(a/h, l_k/h) − λ_k a]` and the maximising `a`.
    fn term(&self, k: usize, h: f64, lam_k: f64) -> (f64, f64) {
        let l = self.l[k];
        if h <= 0.0 {
            return (-lam_k * l, l);
        }
        let slope = l / h;
        let v = chi_inverse(lam_k, slope);
        (h * (u_kappa(v, slope) - lam_k * v), h * v)
    }

    /// Best fraction for a solvent term competing against the interface at
    /// rate `h_star` per unit fraction, over `h ∈ [0, cap]`.
    fn bracket(&self, k: usize, lam_k: f64, h_star: f64, cap: f64) -> (f64, f64) {
        if self.l[k] == 0.0 {
            let (per_unit, _) = self.term(k, 1.0, lam_k);
            let coef = per_unit - h_star;
            // ties go to the interface
            return if coef > 0.0 { (cap, coef * cap) } else { (0.0, 0.0) };
        }
        golden_max(|h| self.term(k, h, lam_k).0 - h * h_star, 0.0, cap, H_TOL)
    }

    fn inner(&self, lam: f64) -> Inner {
        let lk = self.lambdas(lam);
        let (h_star, v_i, saturated) = if self.uses(2) {
            let (val, v, sat) = self.obj.interface.conjugate(lam);
            (val, v, sat)
        } else {
            (f64::NEG_INFINITY, f64::NAN, false)
        };
        let mut h = [0.0; 3];
        let q = match self.class {
            ColumnClass::Nint { solvent, x: 1 } => {
                let k = solvent_index(solvent);
                h[k] = 1.0;
                self.term(k, 1.0, lk[k]).0
            }
            ColumnClass::Nint { solvent, .. } => {
                let k = solvent_index(solvent);
                let (hk, f) = self.bracket(k, lk[k], h_star, 1.0);
                h[k] = hk;
                h[2] = 1.0 - hk;
                f + h_star
            }
            ColumnClass::Int => {
                let (ha, fa) = self.bracket(0, lk[0], h_star, 1.0);
                let (hb, fb) = self.bracket(1, lk[1], h_star, 1.0);
                if ha + hb <= 1.0 {
                    h = [ha, hb, 1.0 - ha - hb];
                    h_star + fa + fb
                } else {
                    let (x, f) =
                        golden_max(|x| self.term(0, x, lk[0]).0 + self.term(1, 1.0 - x, lk[1]).0, 0.0, 1.0, H_TOL);
                    h = [x, 1.0 - x, 0.0];
                    f
                }
            }
        };
        let mut a = [0.0; 3];
        for k in 0..2 {
            if self.uses(k) {
                a[k] = self.term(k, h[k], lk[k]).1;
            }
        }
        if h[2] > 0.0 {
            a[2] = h[2] * v_i;
        }
        Inner { q, h, a, saturated: saturated && h[2] > 0.0 }
    }

    fn objective(&self, h: &[f64; 3], a: &[f64; 3]) -> f64 {
        let mut total = 0.0;
        for k in 0..2 {
            if h[k] > 0.0 {
                total += h[k] * u_kappa(a[k] / h[k], self.l[k] / h[k]);
            }
        }
        total += self.obj.b_shift() * a[1];
        if h[2] > 0.0 {
            total += h[2] * self.obj.interface.mu_phi(a[2] / h[2]);
        }
        total
    }

    fn min_total(&self) -> f64 {
        1.0 + self.l[0] + self.l[1]
    }

    fn solve(&self, u: f64) -> Result<PsiSolution> {
        if !(u >= self.t - 1e-12) {
            return Err(Error::Domain(format!("u = {u} below the crossing time {}", self.t)));
        }
        let floor = self.lambda_floor();
        let lam_of = |s: f64| floor + s.exp();
        let (mut s_lo, mut s_hi) = (-28.0f64, (LAMBDA_CAP - floor).ln());
        let mut lo = self.inner(lam_of(s_lo));
        let mut hi = self.inner(lam_of(s_hi));
        let finish = |inner: Inner, lam: f64, gap_ref: f64| {
            let value = self.objective(&inner.h, &inner.a) / u;
            PsiSolution {
                u,
                value,
                h: inner.h,
                a: inner.a,
                lambda: lam,
                dual_gap: gap_ref / u - value,
                saturated: inner.saturated,
            }
        };
        if hi.total() >= u || u - self.min_total() <= 1e-13 {
            // the budget sits on its lower bound: every speed is minimal
            let lam = lam_of(s_hi);
            let mut sol = finish(hi, lam, hi.q + lam * u);
            sol.value = (hi.q + lam * u) / u;
            sol.dual_gap = 0.0;
            return Ok(sol);
        }
        if lo.total() < u {
            let lam = lam_of(s_lo);
            let mut sol = finish(lo, lam, lo.q + lam * u);
            sol.saturated = true;
            return Ok(sol);
        }
        for _ in 0..200 {
            if s_hi - s_lo < 1e-15 * s_hi.abs().max(1.0) {
                break;
            }
            let mid = 0.5 * (s_lo + s_hi);
            let inner = self.inner(lam_of(mid));
            if inner.total() >= u {
                s_lo = mid;
                lo = inner;
            } else {
                s_hi = mid;
                hi = inner;
            }
        }
        let (ul, uh) = (lo.total(), hi.total());
        let theta = if ul > uh { ((u - uh) / (ul - uh)).clamp(0.0, 1.0) } else { 1.0 };
        let mix = |x: &[f64; 3], y: &[f64; 3]| [0, 1, 2].map(|i| theta * x[i] + (1.0 - theta) * y[i]);
        let h = mix(&lo.h, &hi.h);
        let a = mix(&lo.a, &hi.a);
        let dual = (lo.q + lam_of(s_lo) * u).min(hi.q + lam_of(s_hi) * u);
        let value = self.objective(&h, &a) / u;
        Ok(PsiSolution {
            u,
            value,
            h,
            a,
            lambda: lam_of(0.5 * (s_lo + s_hi)),
            dual_gap: dual / u - value,
            saturated: lo.saturated || hi.saturated,
        })
    }
}

fn solvent_index(kind: Kind) -> usize {
    match kind {
        Kind::A => 0,
        Kind::B => 1,
    }
}

/// `ψ(Θ,u)` together with its maximiser.
pub fn psi(theta: &ColumnType, u: f64, obj: &Objective) -> Result<PsiSolution> {
    psi_geom(&geometry(theta)?, u, obj)
}

pub fn psi_geom(geom: &ColumnGeometry, u: f64, obj: &Objective) -> Result<PsiSolution> {
    Problem::new(geom, obj).solve(u)
}

/// Maximiser of `uψ(Θ,u) − cu` over `u ≥ t_Θ`.
///
/// The unconstrained maximiser is the total number of steps chosen by the
/// Lagrangian at multiplier `c`; concavity clamps it to `t_Θ` from below. For
/// `c` at or below the smallest admissible multiplier the maximiser is infinite.
pub fn u_theta_of_c(geom: &ColumnGeometry, c: f64, obj: &Objective) -> Result<UTheta> {
    let p = Problem::new(geom, obj);
    if !(c > p.lambda_floor()) {
        return Ok(UTheta { u: f64::INFINITY, u_psi: f64::INFINITY, solution: None, saturated: true });
    }
    let inner = p.inner(c.min(LAMBDA_CAP));
    let u_free = inner.total();
    if u_free >= geom.t {
        let u_psi = p.objective(&inner.h, &inner.a);
        let solution = PsiSolution {
            u: u_free,
            value: u_psi / u_free,
            h: inner.h,
            a: inner.a,
            lambda: c,
            dual_gap: (inner.q + c * u_free - u_psi) / u_free,
            saturated: inner.saturated,
        };
        return Ok(UTheta { u: u_free, u_psi, solution: Some(solution), saturated: inner.saturated });
    }
    let sol = p.solve(geom.t)?;
    Ok(UTheta { u: geom.t, u_psi: geom.t * sol.value, saturated: sol.saturated, solution: Some(sol) })
}

/// Independent primal solves of the column program from structured starting
/// points, by pairwise-transfer coordinate ascent.
///
/// Variables are the fractions `h` on the simplex and slacks `s_k = a_k − h_k − l_k ≥ 0`
/// summing to `u − 1 − l_A − l_B`. Returned in seed order: all-interface,
/// all-A, all-B, proportional split, and the dual solution.
pub fn psi_multistart(geom: &ColumnGeometry, u: f64, obj: &Objective) -> Result<Vec<PsiSolution>> {
    let p = Problem::new(geom, obj);
    if !(u >= geom.t - 1e-12) {
        return Err(Error::Domain(format!("u = {u} below the crossing time {}", geom.t)));
    }
    let active: Vec<usize> = (0..3).filter(|&c| p.uses(c)).collect();
    let budget = (u - p.min_total()).max(0.0);
    let dual = p.solve(u)?;

    let spread = |weights: [f64; 3]| -> ([f64; 3], [f64; 3]) {
        let w: Vec<f64> = (0..3).map(|c| if p.uses(c) { weights[c] } else { 0.0 }).collect();
        let total: f64 = w.iter().sum();
        let h = [0, 1, 2].map(|c| w[c] / total);
        (h, h.map(|x| x * budget))
    };
    let eps = 1e-3;
    let mut seeds = Vec::new();
    for focus in [2usize, 0, 1] {
        let mut w = [eps; 3];
        w[focus] = 1.0;
        seeds.push(spread(w));
    }
    seeds.push(spread([1.0 + p.l[0], 1.0 + p.l[1], 1.0]));
    let dual_s = [0, 1, 2].map(|c| {
        let l = if c < 2 { p.l[c] } else { 0.0 };
        (dual.a[c] - dual.h[c] - l).max(0.0)
    });
    let dual_s_total: f64 = dual_s.iter().sum();
    let dual_s = if dual_s_total > 0.0 { dual_s.map(|x| x * budget / dual_s_total) } else { dual_s };
    seeds.push((dual.h, dual_s));

    let eval = |h: &[f64; 3], s: &[f64; 3]| {
        let a = [0, 1, 2].map(|c| h[c] + if c < 2 { p.l[c] } else { 0.0 } + s[c]);
        p.objective(h, &a)
    };

    let mut out = Vec::with_capacity(seeds.len());
    for (mut h, mut s) in seeds {
        let mut best = eval(&h, &s);
        for _ in 0..2000 {
            let before = best;
            for (ii, &i) in active.iter().enumerate() {
                for &j in &active[ii + 1..] {
                    // directions in (h_i, h_j, s_i, s_j); the last two move along
                    // rays that keep the speed of one part fixed
                    let speed = |c: usize| {
                        if h[c] > 0.0 {
                            (h[c] + if c < 2 { p.l[c] } else { 0.0 } + s[c]) / h[c]
                        } else {
                            1.0
                        }
                    };
                    let (vi, vj) = (speed(i) - 1.0, speed(j) - 1.0);
                    let dirs = [
                        [1.0, -1.0, 0.0, 0.0],
                        [0.0, 0.0, 1.0, -1.0],
                        [1.0, -1.0, -1.0, 1.0],
                        [-1.0, 1.0, -vj, vj],
                        [1.0, -1.0, vi, -vi],
                    ];
                    for d in dirs {
                        let (mut t_lo, mut t_hi) = (f64::NEG_INFINITY, f64::INFINITY);
                        for (x, c) in [h[i], h[j], s[i], s[j]].into_iter().zip(d) {
                            if c > 0.0 {
                                t_lo = t_lo.max(-x / c);
                            } else if c < 0.0 {
                                t_hi = t_hi.min(x / -c);
                            }
                        }
                        if !(t_hi - t_lo > 1e-15) {
                            continue;
                        }
                        let apply = |t: f64| {
                            let (mut h2, mut s2) = (h, s);
                            h2[i] = (h2[i] + t * d[0]).max(0.0);
                            h2[j] = (h2[j] + t * d[1]).max(0.0);
                            s2[i] = (s2[i] + t * d[2]).max(0.0);
                            s2[j] = (s2[j] + t * d[3]).max(0.0);
                            (h2, s2)
                        };
                        let (t, val) = golden_max(
                            |t| {
                                let (h2, s2) = apply(t);
                                eval(&h2, &s2)
                            },
                            t_lo,
                            t_hi,
                            1e-13 * (t_hi - t_lo).max(1.0),
                        );
                        if val > best {
                            let (h2, s2) = apply(t);
                            h = h2;
                            s = s2;
                            best = val;
                        }
                    }
                }
            }
            if best - before <= 1e-15 * best.abs().max(1.0) {
                break;
            }
        }
        let a = [0, 1, 2].map(|c| h[c] + if c < 2 { p.l[c] } else { 0.0 } + s[c]);
        out.push(PsiSolution {
            u,
            value: best / u,
            h,
            a,
            lambda: f64::NAN,
            dual_gap: dual.value + dual.dual_gap - best / u,
            saturated: false,
        });
    }
    Ok(out)
}
