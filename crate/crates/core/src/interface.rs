//! Free energy `φ_I(μ)` of a copolymer near one horizontal AB-interface.
//!
//! The finite-width partition function is an exact transfer sum. Disorder
//! averages are Monte Carlo over `ω`; the width limit is a three-term fit along
//! a ladder of widths. The fitted table is turned into a concave model of
//! `μ ↦ μφ_I(μ)` that never drops below the entropic curve `μκ̃(μ,0)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{chi_inverse, kappa, kappa_derivative, u_kappa};
use crate::error::{Error, Result};
use crate::numeric::{bisect, mean_stderr, solve_dense};
use crate::oracle::{omega_word, Kind};
use crate::rng::{derive_seed, streams};

pub const TABLE_FORMAT_VERSION: u32 = 1;

/// `log Z^{ω,I}_{L,n/L}` for every step count `n ≤ n_max`.
///
/// Entry `n` is `−∞` unless `n ≥ L` and `n − L` is even. One pass yields the
/// whole range because a path that has reached `(L,0)` cannot come back to it.
pub fn interface_log_partitions(width: usize, n_max: usize, omega: &[Kind], alpha: f64, beta: f64) -> Vec<f64> {
    assert!(omega.len() >= n_max, "disorder word shorter than the path");
    let lw = width as i64;
    let span = ((n_max.saturating_sub(width)) / 2 + 1) as i64;
    let height = (2 * span + 1) as usize;
    let size = (width + 1) * height * 3;
    let idx = |x: i64, y: i64, d: usize| ((x as usize) * height + (y + span) as usize) * 3 + d;
    let below = [(-alpha).exp(), beta.exp()];
    let mut cur = vec![0.0f64; size];
    let mut nxt = vec![0.0f64; size];
    cur[idx(0, 0, 0)] = 1.0;
    let mut log_scale = 0.0;
    let mut out = vec![f64::NEG_INFINITY; n_max + 1];
    if width == 0 {
        out[0] = 0.0;
    }
    for n in 0..n_max {
        let f = below[(omega[n] == Kind::B) as usize];
        nxt.iter_mut().for_each(|v| *v = 0.0);
        let remaining = (n_max - n) as i64;
        let x_hi = lw.min(n as i64);
        let mut layer_max = 0.0f64;
        for x in 0..=x_hi {
            let reach = (n as i64 - x).min(span);
            for y in -reach..=reach {
                if y.abs() + (lw - x) > remaining {
                    continue;
                }
                let base = idx(x, y, 0);
                let (we, wn, ws) = (cur[base], cur[base + 1], cur[base + 2]);
                let total = we + wn + ws;
                if total == 0.0 {
                    continue;
                }
                if x < lw {
                    let w = if y < 0 { total * f } else { total };
                    let t = idx(x + 1, y, 0);
                    nxt[t] += w;
                    layer_max = layer_max.max(nxt[t]);
                }
                if y < span {
                    // a vertical bond is below when its lower end is at most −1
                    let w = we + wn;
                    if w > 0.0 {
                        let w = if y <= -1 { w * f } else { w };
                        let t = idx(x, y + 1, 1);
                        nxt[t] += w;
                        layer_max = layer_max.max(nxt[t]);
                    }
                }
                if y > -span {
                    let w = we + ws;
                    if w > 0.0 {
                        let w = if y <= 0 { w * f } else { w };
                        let t = idx(x, y - 1, 2);
                        nxt[t] += w;
                        layer_max = layer_max.max(nxt[t]);
                    }
                }
            }
        }
        std::mem::swap(&mut cur, &mut nxt);
        if layer_max > 0.0 {
            let inv = 1.0 / layer_max;
            cur.iter_mut().for_each(|v| *v *= inv);
            log_scale += layer_max.ln();
        }
        let step = n + 1;
        if step >= width && (step - width) % 2 == 0 {
            let e = idx(lw, 0, 0);
            let z = cur[e] + cur[e + 1] + cur[e + 2];
            if z > 0.0 {
                out[step] = z.ln() + log_scale;
            }
        }
    }
    out
}

/// `log Z^{ω,I}_{L,μ}` at a single lattice-compatible `μ`.
pub fn interface_partition(width: usize, mu: f64, omega: &[Kind], alpha: f64, beta: f64) -> Result<f64> {
    let n = lattice_steps(width, mu)?;
    if omega.len() < n {
        return Err(Error::DisorderTooShort { needed: n, have: omega.len() });
    }
    Ok(interface_log_partitions(width, n, omega, alpha, beta)[n])
}

fn lattice_steps(width: usize, mu: f64) -> Result<usize> {
    let s = mu * width as f64;
    let n = s.round();
    if width == 0 || (s - n).abs() > 1e-9 || n < width as f64 || (n as usize - width) % 2 != 0 {
        return Err(Error::Domain(format!("mu = {mu} is not in 1 + 2N/{width}")));
    }
    Ok(n as usize)
}

/// `μφ^ω_L(μ)` from a vector of log partition functions, interpolated linearly in
/// `μ` between the two neighbouring admissible step counts.
fn mu_phi_interp(log_z: &[f64], width: usize, mu: f64) -> f64 {
    let lw = width as f64;
    let s = mu * lw;
    let mut lo = s.floor() as usize;
    if lo < width {
        lo = width;
    }
    if (lo - width) % 2 == 1 {
        lo -= 1;
    }
    let hi = lo + 2;
    let t = ((s - lo as f64) / 2.0).clamp(0.0, 1.0);
    let a = log_z[lo] / lw;
    if t == 0.0 {
        return a;
    }
    let b = log_z[hi] / lw;
    a + t * (b - a)
}

fn n_max_for(width: usize, mu_max: f64) -> usize {
    let mut n = (mu_max * width as f64).ceil() as usize;
    if n < width {
        n = width;
    }
    if (n - width) % 2 == 1 {
        n += 1;
    }
    n + 2
}

fn sample_omega(seed: u64, width: usize, sample: usize, n: usize) -> Vec<Kind> {
    let tag = ((width as u64) << 32) | sample as u64;
    omega_word(derive_seed(seed, streams::INTERFACE, tag), n)
}

/// Per-sample `μφ^ω_L(μ)` for every `μ` in `mus`, sharing one transfer pass.
fn mu_phi_samples(width: usize, mus: &[f64], samples: usize, seed: u64, alpha: f64, beta: f64) -> Vec<Vec<f64>> {
    let mu_top = mus.iter().copied().fold(1.0, f64::max);
    let n_max = n_max_for(width, mu_top);
    (0..samples)
        .into_par_iter()
        .map(|s| {
            let omega = sample_omega(seed, width, s, n_max);
            let log_z = interface_log_partitions(width, n_max, &omega, alpha, beta);
            mus.iter().map(|&mu| mu_phi_interp(&log_z, width, mu)).collect()
        })
        .collect()
}

/// Monte Carlo `φ^I_L(μ)` over `samples` disorder words: `(mean, stderr)`.
///
/// `μ` need not lie on the lattice of width `L`; off-lattice values are linearly
/// interpolated in `μφ_L` between the admissible neighbours.
pub fn phi_finite(width: usize, mu: f64, samples: usize, seed: u64, alpha: f64, beta: f64) -> (f64, f64) {
    phi_finite_grid(width, &[mu], samples, seed, alpha, beta)[0]
}

pub fn phi_finite_grid(width: usize, mus: &[f64], samples: usize, seed: u64, alpha: f64, beta: f64) -> Vec<(f64, f64)> {
    let rows = mu_phi_samples(width, mus, samples, seed, alpha, beta);
    mus.iter()
        .enumerate()
        .map(|(j, &mu)| {
            let vals: Vec<f64> = rows.iter().map(|r| r[j] / mu).collect();
            mean_stderr(&vals)
        })
        .collect()
}

/// Width-limit estimate with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiEstimate {
    pub mu: f64,
    /// Extrapolated Monte Carlo estimate of `φ_I(μ)`.
    pub estimate: f64,
    pub stderr: f64,
    /// Disagreement between the three-term fit and a two-point extrapolation.
    pub spread: f64,
    /// Value used by the concave model: never below `κ̃(μ,0)`.
    pub model: f64,
}

impl PhiEstimate {
    pub fn error(&self) -> f64 {
        self.stderr.hypot(self.spread)
    }
}

/// Fit `y_L = y + (a log L + b)/L` and return `(y, stderr of y, spread)`.
pub fn extrapolate(widths: &[usize], means: &[f64], errs: &[f64]) -> (f64, f64, f64) {
    let k = widths.len();
    match k {
        0 => (f64::NAN, f64::NAN, f64::NAN),
        1 => (means[0], errs[0], 0.0),
        2 => {
            let (y, se) = richardson(widths, means, errs);
            (y, se, 0.0)
        }
        _ => {
            let rows: Vec<Vec<f64>> = widths
                .iter()
                .map(|&w| {
                    let l = w as f64;
                    vec![1.0, l.ln() / l, 1.0 / l]
                })
                .collect();
            let mut ata = vec![vec![0.0; 3]; 3];
            for r in &rows {
                for i in 0..3 {
                    for j in 0..3 {
                        ata[i][j] += r[i] * r[j];
                    }
                }
            }
            let z = solve_dense(ata, vec![1.0, 0.0, 0.0]).expect("ladder widths are distinct");
            let coef: Vec<f64> = rows.iter().map(|r| r.iter().zip(&z).map(|(a, b)| a * b).sum()).collect();
            let y: f64 = coef.iter().zip(means).map(|(c, m)| c * m).sum();
            let se = coef.iter().zip(errs).map(|(c, e)| (c * e).powi(2)).sum::<f64>().sqrt();
            let (y2, _) = richardson(&widths[k - 2..], &means[k - 2..], &errs[k - 2..]);
            (y, se, (y - y2).abs())
        }
    }
}

fn richardson(widths: &[usize], means: &[f64], errs: &[f64]) -> (f64, f64) {
    let (l1, l2) = (widths[0] as f64, widths[1] as f64);
    let c1 = -l1 / (l2 - l1);
    let c2 = l2 / (l2 - l1);
    (c1 * means[0] + c2 * means[1], (c1 * errs[0]).hypot(c2 * errs[1]))
}

/// Table construction settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceSettings {
    pub mu_max: f64,
    pub mu_step: f64,
    pub ladder: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for InterfaceSettings {
    fn default() -> Self {
        Self { mu_max: 8.0, mu_step: 0.1, ladder: vec![8, 16, 32], samples: 200, seed: 1 }
    }
}

impl InterfaceSettings {
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.mu_max - 1.0) / self.mu_step).round() as usize;
        (0..=n).map(|i| 1.0 + i as f64 * self.mu_step).collect()
    }
}

/// Extrapolated `φ_I(μ)` at an arbitrary `μ ≥ 1`, with error bars.
pub fn estimate_phi(mu: f64, alpha: f64, beta: f64, settings: &InterfaceSettings) -> PhiEstimate {
    estimate_phi_grid(&[mu], alpha, beta, settings).remove(0)
}

pub fn estimate_phi_grid(mus: &[f64], alpha: f64, beta: f64, settings: &InterfaceSettings) -> Vec<PhiEstimate> {
    let per_width: Vec<Vec<(f64, f64)>> = settings
        .ladder
        .iter()
        .map(|&w| phi_finite_grid(w, mus, settings.samples, settings.seed, alpha, beta))
        .collect();
    mus.iter()
        .enumerate()
        .map(|(j, &mu)| {
            if mu <= 1.0 {
                return PhiEstimate { mu, estimate: 0.0, stderr: 0.0, spread: 0.0, model: 0.0 };
            }
            let means: Vec<f64> = per_width.iter().map(|v| v[j].0).collect();
            let errs: Vec<f64> = per_width.iter().map(|v| v[j].1).collect();
            let (estimate, stderr, spread) = extrapolate(&settings.ladder, &means, &errs);
            let entropic = kappa(mu, 0.0);
            let model = if beta <= 0.0 { entropic } else { estimate.max(entropic) };
            PhiEstimate { mu, estimate, stderr, spread, model }
        })
        .collect()
}

/// Tabulated `φ_I` on a `μ` grid, with the least concave majorant of
/// `μ ↦ μφ_I(μ)` over the model values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceTable {
    pub format_version: u32,
    pub alpha: f64,
    pub beta: f64,
    pub settings: InterfaceSettings,
    pub nodes: Vec<PhiEstimate>,
    /// Vertices `(μ, μφ)` of the concave envelope, increasing in `μ`.
    pub envelope: Vec<(f64, f64)>,
}

impl InterfaceTable {
    pub fn build(alpha: f64, beta: f64, settings: &InterfaceSettings) -> Self {
        let grid = settings.grid();
        let nodes = if beta <= 0.0 {
            grid.iter()
                .map(|&mu| {
                    let k = kappa(mu, 0.0);
                    PhiEstimate { mu, estimate: k, stderr: 0.0, spread: 0.0, model: k }
                })
                .collect()
        } else {
            estimate_phi_grid(&grid, alpha, beta, settings)
        };
        Self::from_nodes(alpha, beta, settings.clone(), nodes)
    }

    /// Like [`build`](Self::build) but always runs the Monte Carlo, also for `β ≤ 0`.
    pub fn build_sampled(alpha: f64, beta: f64, settings: &InterfaceSettings) -> Self {
        let nodes = estimate_phi_grid(&settings.grid(), alpha, beta, settings);
        Self::from_nodes(alpha, beta, settings.clone(), nodes)
    }

    pub fn from_nodes(alpha: f64, beta: f64, settings: InterfaceSettings, nodes: Vec<PhiEstimate>) -> Self {
        let pts: Vec<(f64, f64)> = nodes.iter().map(|n| (n.mu, n.mu * n.model)).collect();
        let envelope = concave_majorant(&pts);
        Self { format_version: TABLE_FORMAT_VERSION, alpha, beta, settings, nodes, envelope }
    }

    pub fn mu_max(&self) -> f64 {
        self.envelope.last().map_or(1.0, |p| p.0)
    }

    /// `φ_I(μ)` read from the envelope; `μ` beyond the table is clamped.
    pub fn phi(&self, mu: f64) -> f64 {
        if mu <= 1.0 {
            return 0.0;
        }
        envelope_value(&self.envelope, mu.min(self.mu_max())) / mu
    }

    /// Grid point of the envelope whose subdifferential contains `c`.
    ///
    /// Returns `(μ, saturated)`; `saturated` is set when `c` lies below every
    /// slope of the envelope, so that the true maximiser is beyond the table.
    pub fn v_i_of_c(&self, c: f64) -> Result<(f64, bool)> {
        if self.envelope.is_empty() {
            return Err(Error::TableMissing);
        }
        for w in self.envelope.windows(2) {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            if c >= slope - 1e-12 * slope.abs().max(1.0) {
                return Ok((w[0].0, false));
            }
        }
        let last = *self.envelope.last().expect("non-empty");
        Ok((last.0, true))
    }

    /// Error bar of the node nearest to `μ`.
    pub fn error_at(&self, mu: f64) -> f64 {
        self.nodes.iter().min_by(|a, b| (a.mu - mu).abs().total_cmp(&(b.mu - mu).abs())).map_or(0.0, |n| n.error())
    }

    /// Largest violation of the chord test over consecutive envelope triples.
    pub fn concavity_defect(&self) -> f64 {
        concavity_defect(&self.envelope)
    }

    /// Largest amount by which the raw estimates exceed the envelope, in units of
    /// their error bars.
    pub fn envelope_deviation(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| {
                let env = envelope_value(&self.envelope, n.mu);
                let gap = env - n.mu * n.estimate;
                let err = n.mu * n.error();
                if err > 0.0 {
                    gap / err
                } else if gap.abs() < 1e-12 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table is serialisable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(s).map_err(|e| Error::Domain(format!("bad table: {e}")))?;
        if t.format_version != TABLE_FORMAT_VERSION {
            return Err(Error::Domain(format!("unsupported table version {}", t.format_version)));
        }
        Ok(t)
    }
}

/// Least concave majorant of points sorted by abscissa (upper hull).
pub fn concave_majorant(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

fn concavity_defect(pts: &[(f64, f64)]) -> f64 {
    pts.windows(3)
        .map(|w| {
            let t = (w[1].0 - w[0].0) / (w[2].0 - w[0].0);
            let chord = w[0].1 + t * (w[2].1 - w[0].1);
            chord - w[1].1
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn envelope_value(env: &[(f64, f64)], mu: f64) -> f64 {
    match env.iter().position(|p| p.0 >= mu) {
        None => env.last().map_or(0.0, |p| p.1),
        Some(0) => env[0].1,
        Some(i) => {
            let (a, b) = (env[i - 1], env[i]);
            a.1 + (mu - a.0) * (b.1 - a.1) / (b.0 - a.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
enum Piece {
    /// Arc of the entropic curve `g(μ) = μκ̃(μ,0)` on `[t0, t1]`.
    Curve {
        t0: f64,
        t1: f64,
    },
    Segment {
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
    },
}

impl Piece {
    fn start(&self) -> f64 {
        match *self {
            Piece::Curve { t0, .. } => t0,
            Piece::Segment { x0, .. } => x0,
        }
    }
    fn end(&self) -> f64 {
        match *self {
            Piece::Curve { t1, .. } => t1,
            Piece::Segment { x1, .. } => x1,
        }
    }
}

fn g(mu: f64) -> f64 {
    u_kappa(mu, 0.0)
}

fn g_prime(mu: f64) -> f64 {
    if mu <= 1.0 {
        f64::INFINITY
    } else {
        kappa_derivative(mu, 0.0).unwrap_or(f64::INFINITY)
    }
}

/// The concave model of `H(μ) = μφ_I(μ)` used by the variational formulas.
///
/// `Entropic` is the curve `μκ̃(μ,0)` itself. `Table` is the smallest concave
/// function lying above both that curve and the tabulated model values; it is
/// assembled from arcs of the curve and straight segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InterfaceFreeEnergy {
    Entropic,
    Table { table: Box<InterfaceTable>, pieces: Vec<PieceRecord> },
}

/// Serialisable form of one hull piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PieceRecord(Piece);

impl InterfaceFreeEnergy {
    pub fn from_table(table: InterfaceTable) -> Self {
        let pieces = hull_with_curve(&table).into_iter().map(PieceRecord).collect();
        InterfaceFreeEnergy::Table { table: Box::new(table), pieces }
    }

    pub fn table(&self) -> Option<&InterfaceTable> {
        match self {
            InterfaceFreeEnergy::Entropic => None,
            InterfaceFreeEnergy::Table { table, .. } => Some(table),
        }
    }

    /// Whether the model coincides with the entropic curve.
    pub fn is_entropic(&self) -> bool {
        match self {
            InterfaceFreeEnergy::Entropic => true,
            InterfaceFreeEnergy::Table { pieces, .. } => pieces.iter().all(|p| matches!(p.0, Piece::Curve { .. })),
        }
    }

    fn pieces(&self) -> Option<&[PieceRecord]> {
        match self {
            InterfaceFreeEnergy::Entropic => None,
            InterfaceFreeEnergy::Table { pieces, .. } => Some(pieces),
        }
    }

    /// Top of the tabulated range; `∞` for the entropic model.
    pub fn mu_max(&self) -> f64 {
        match self {
            InterfaceFreeEnergy::Entropic => f64::INFINITY,
            InterfaceFreeEnergy::Table { table, .. } => table.mu_max(),
        }
    }

    /// `H(μ) = μφ_I(μ)`.
    pub fn mu_phi(&self, mu: f64) -> f64 {
        if mu <= 1.0 {
            return 0.0;
        }
        let Some(pieces) = self.pieces() else {
            return g(mu);
        };
        for PieceRecord(p) in pieces {
            if mu <= p.end() {
                if let Piece::Segment { x0, y0, x1, y1 } = *p {
                    return y0 + (mu - x0) * (y1 - y0) / (x1 - x0);
                }
                break;
            }
        }
        g(mu)
    }

    pub fn phi(&self, mu: f64) -> f64 {
        if mu <= 1.0 {
            0.0
        } else {
            self.mu_phi(mu) / mu
        }
    }

    /// Maximiser of `H(μ) − cμ` over `μ ≥ 1`, with a saturation flag.
    ///
    /// At a kink between two segments the left end is returned. The flag is set
    /// when a non-entropic model is queried beyond its tabulated range, where it
    /// falls back on its concave extension along the entropic curve.
    pub fn speed(&self, c: f64) -> (f64, bool) {
        if !(c > 0.0) {
            return (f64::INFINITY, true);
        }
        let Some(pieces) = self.pieces() else {
            return (chi_inverse(c, 0.0), false);
        };
        let mut v = chi_inverse(c, 0.0);
        for PieceRecord(p) in pieces {
            match *p {
                Piece::Curve { t0, t1 } => {
                    if c >= g_prime(t1) {
                        v = v.clamp(t0, t1);
                        break;
                    }
                }
                Piece::Segment { x0, y0, x1, y1 } => {
                    let s = (y1 - y0) / (x1 - x0);
                    if c >= s - 1e-12 * s.abs().max(1.0) {
                        v = x0;
                        break;
                    }
                }
            }
        }
        let saturated = v > self.mu_max() + 1e-9 && !self.is_entropic();
        (v, saturated)
    }

    /// `sup_{μ≥1} [H(μ) − cμ]` and the maximiser.
    pub fn conjugate(&self, c: f64) -> (f64, f64, bool) {
        let (v, sat) = self.speed(c);
        if v.is_infinite() {
            return (f64::INFINITY, v, sat);
        }
        (self.mu_phi(v) - c * v, v, sat)
    }
}

/// First `τ ≥ x` at which the tangent to the curve passes through `(x, y)`,
/// for a point lying above the curve.
fn tangent_from_point(x: f64, y: f64) -> f64 {
    let e = |tau: f64| g(tau) - y - g_prime(tau) * (tau - x);
    let mut hi = (2.0 * x).max(x + 1.0);
    while e(hi) < 0.0 {
        hi *= 2.0;
    }
    bisect(e, x, hi, 1e-13 * hi)
}

/// Concave hull of the entropic curve on `[1, ∞)` together with the table's
/// model points, by gift wrapping from `μ = 1`. The hull always ends on the
/// curve, since `g(μ) − μg'(μ)` grows without bound.
fn hull_with_curve(table: &InterfaceTable) -> Vec<Piece> {
    let active: Vec<(f64, f64)> = table
        .nodes
        .iter()
        .map(|n| (n.mu, n.mu * n.model))
        .filter(|&(mu, y)| mu > 1.0 && y > g(mu) + 1e-12 * y.abs().max(1.0))
        .collect();
    let mut pieces = Vec::new();
    let mut t = 1.0;
    let mut node: Option<usize> = None;
    loop {
        match node {
            None => {
                // earliest tangent point from which some node is visible
                let mut best: Option<(f64, usize)> = None;
                for (j, &(mj, yj)) in active.iter().enumerate() {
                    if mj <= t {
                        continue;
                    }
                    let d = |tau: f64| yj - g(tau) - g_prime(tau) * (mj - tau);
                    let lo = if t <= 1.0 { 1.0 + 1e-14 } else { t };
                    let tau = if d(lo) >= 0.0 { t } else { bisect(d, lo, mj, 1e-13) };
                    match best {
                        Some((bt, _)) if tau > bt + 1e-12 => {}
                        Some((bt, bj)) if (tau - bt).abs() <= 1e-12 && active[bj].0 > mj => {}
                        _ => best = Some((tau, j)),
                    }
                }
                match best {
                    None => {
                        pieces.push(Piece::Curve { t0: t, t1: f64::INFINITY });
                        break;
                    }
                    Some((tau, j)) => {
                        if tau > t {
                            pieces.push(Piece::Curve { t0: t, t1: tau });
                        }
                        let (x1, y1) = active[j];
                        pieces.push(Piece::Segment { x0: tau, y0: g(tau), x1, y1 });
                        node = Some(j);
                    }
                }
            }
            Some(i) => {
                let (x, y) = active[i];
                let mut next: Option<(f64, usize)> = None;
                for (k, &(mk, yk)) in active.iter().enumerate().skip(i + 1) {
                    let s = (yk - y) / (mk - x);
                    match next {
                        Some((bs, _)) if s < bs - 1e-14 => {}
                        _ => next = Some((s, k)),
                    }
                }
                let tau = tangent_from_point(x, y);
                match next {
                    Some((s, k)) if s >= g_prime(tau) => {
                        let (x1, y1) = active[k];
                        pieces.push(Piece::Segment { x0: x, y0: y, x1, y1 });
                        node = Some(k);
                    }
                    _ => {
                        pieces.push(Piece::Segment { x0: x, y0: y, x1: tau, y1: g(tau) });
                        t = tau;
                        node = None;
                    }
                }
            }
        }
    }
    pieces.retain(|p| p.end() > p.start());
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::EntropyEvaluator;

    #[test]
    fn zero_energy_counts_paths() {
        let omega = omega_word(3, 40);
        let lz = interface_partition(4, 2.0, &omega, 0.0, 0.0).unwrap();
        let ev = EntropyEvaluator::default();
        let k = ev.kappa_finite(4, 2.0, 0.0).unwrap();
        assert!((lz - 8.0 * k).abs() < 1e-10);
    }

    #[test]
    fn flat_path_at_mu_one() {
        let omega = omega_word(5, 10);
        assert!(interface_partition(6, 1.0, &omega, 2.0, -1.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn parity_rejected() {
        let omega = omega_word(5, 10);
        assert!(interface_partition(4, 1.25, &omega, 1.0, 0.0).is_err());
    }

    #[test]
    fn majorant_is_concave() {
        let pts = vec![(1.0, 0.0), (2.0, 1.0), (3.0, 1.2), (4.0, 2.0), (5.0, 2.1)];
        let h = concave_majorant(&pts);
        assert!(concavity_defect(&h) <= 0.0);
        assert_eq!(h.first(), Some(&(1.0, 0.0)));
        assert_eq!(h.last(), Some(&(5.0, 2.1)));
    }

    #[test]
    fn extrapolation_is_exact_on_model() {
        let w = [8usize, 16, 32];
        let f = |l: f64| 0.7 + (0.3 * l.ln() - 0.2) / l;
        let m: Vec<f64> = w.iter().map(|&l| f(l as f64)).collect();
        let (y, _, _) = extrapolate(&w, &m, &[0.0; 3]);
        assert!((y - 0.7).abs() < 1e-12);
    }

    #[test]
    fn entropic_table_equals_curve() {
        let settings = InterfaceSettings { mu_max: 4.0, ..Default::default() };
        let t = InterfaceTable::build(2.0, -1.0, &settings);
        let model = InterfaceFreeEnergy::from_table(t);
        assert!(model.is_entropic());
        for mu in [1.5, 2.0, 3.3] {
            assert!((model.phi(mu) - kappa(mu, 0.0)).abs() < 1e-14);
        }
        let (v, sat) = model.speed(0.4);
        assert!(!sat && (v - chi_inverse(0.4, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn hull_dominates_nodes_and_curve() {
        let settings = InterfaceSettings { mu_max: 4.0, mu_step: 0.5, ..Default::default() };
        let nodes: Vec<PhiEstimate> = settings
            .grid()
            .into_iter()
            .map(|mu| {
                let bump = if (mu - 2.0).abs() < 1e-9 { 0.2 } else { 0.0 };
                let k = kappa(mu, 0.0) + bump;
                PhiEstimate { mu, estimate: k, stderr: 0.0, spread: 0.0, model: k }
            })
            .collect();
        let t = InterfaceTable::from_nodes(3.0, 2.0, settings, nodes.clone());
        let model = InterfaceFreeEnergy::from_table(t);
        assert!(!model.is_entropic());
        for n in &nodes {
            assert!(model.mu_phi(n.mu) >= n.mu * n.model - 1e-12);
        }
        let mut prev = f64::INFINITY;
        for i in 0..300 {
            let mu = 1.0 + 3.0 * i as f64 / 299.0;
            assert!(model.mu_phi(mu) >= g(mu) - 1e-12);
            let (v, _) = model.speed(0.05 + i as f64 / 100.0);
            assert!(v <= prev + 1e-12);
            prev = v;
        }
        // the kink at μ = 2 is returned for a range of slopes
        let (v, _) = model.speed(g_prime(2.0));
        assert!((v - 2.0).abs() < 1e-9);
    }
}
