//! The five verbs. Each one computes its tables, records diagnostics and
//! hands everything to [`Artifacts`] for writing.

use std::collections::BTreeMap;
use std::time::Instant;

use copolymer_core::entropy::{chi_inverse, kappa, kappa_derivative, u_kappa, EntropyEvaluator};
use copolymer_core::interface::{estimate_phi_grid, InterfaceTable};
use copolymer_core::maximizer_checks::NEAR_OPTIMAL;
use copolymer_core::oracle::{
    count_paths_stretch_form, count_paths_stretch_form_from, enumerate_column_paths, finite_free_energy, HPoint,
};
use copolymer_core::phases::{alpha_star, beta_c, classify, BetaC, Phase, BASE_MARGIN, P_C};
use copolymer_core::rng::{derive_seed, streams};
use copolymer_core::varform::{
    free_energy_for_measure, measure_family_from_disorder, Family, DINKELBACH_MAX_ITER, DINKELBACH_TOL,
};
use copolymer_core::{DisorderPair, Error, Objective, SlopeMeasure};
use rayon::prelude::*;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{num, sha256_hex, Artifacts, Level, Manifest};

/// Run context shared by every command.
pub struct Context {
    pub config: RunConfig,
    pub config_sha256: Option<String>,
}

impl Context {
    fn artifacts(&self, command: &str) -> Artifacts {
        Artifacts::new(self.config.out.join(command))
    }

    fn manifest(&self, command: &str, details: serde_json::Value) -> Manifest {
        let c = &self.config;
        let seeds = BTreeMap::from([
            ("master".to_string(), c.seed),
            ("interface".to_string(), c.seed),
            ("family_field".to_string(), derive_seed(c.seed, streams::FAMILY, 0)),
        ]);
        let tolerances = BTreeMap::from([
            ("collapse_slack".to_string(), c.collapse_slack),
            ("ladder_gap".to_string(), c.ladder_gap),
            ("derivative_rtol".to_string(), c.derivative_rtol),
            ("inverse_tol".to_string(), c.inverse_tol),
            ("ordering_tol".to_string(), c.ordering_tol),
            ("dinkelbach_tol".to_string(), DINKELBACH_TOL),
            ("dinkelbach_max_iter".to_string(), DINKELBACH_MAX_ITER as f64),
            ("near_optimal".to_string(), NEAR_OPTIMAL),
            ("phase_base_margin".to_string(), BASE_MARGIN),
            ("p_c".to_string(), P_C),
        ]);
        Manifest {
            command: command.to_string(),
            version: copolymer_core::VERSION.to_string(),
            config: c.clone(),
            config_sha256: self.config_sha256.clone(),
            seeds,
            tolerances,
            details,
            diagnostics: Vec::new(),
            outputs: BTreeMap::new(),
        }
    }
}

/// Interface model for `(α, β)`: the entropic curve when `β ≤ 0`, a fitted
/// table otherwise. The table is returned for checksumming.
fn objective(cfg: &RunConfig, alpha: f64, beta: f64) -> (Objective, Option<InterfaceTable>) {
    if beta <= 0.0 {
        (Objective::entropic(alpha, beta), None)
    } else {
        let table = InterfaceTable::build(alpha, beta, &cfg.interface_settings());
        (Objective::from_table(table.clone()), Some(table))
    }
}

fn family(cfg: &RunConfig) -> anyhow::Result<Family> {
    let params = cfg.params()?;
    Ok(measure_family_from_disorder(params.p, params.big_m, params.m, cfg.seed, &cfg.family_settings()?)?)
}

fn lattice(max_width: usize, budget: usize) -> Vec<HPoint> {
    let mut out = Vec::new();
    for width in 1..=max_width {
        for steps in width..=budget {
            let v = (steps - width) as i64;
            for rise in (-v..=v).step_by(2) {
                out.push(HPoint { width, steps, rise });
            }
        }
    }
    out
}

fn entropy_grid(cfg: &RunConfig) -> Vec<(f64, f64)> {
    cfg.l_grid.iter().flat_map(|&l| cfg.du_grid.iter().map(move |&du| (1.0 + l.abs() + du, l))).collect()
}

/// Central difference of `u ↦ uκ̃(u,l)` at `v`.
fn fd_derivative(v: f64, l: f64) -> f64 {
    let h = 1e-5 * (v - 1.0 - l.abs()).min(1.0);
    (u_kappa(v + h, l) - u_kappa(v - h, l)) / (2.0 * h)
}

pub fn entropy(ctx: &Context) -> anyhow::Result<Manifest> {
    let cfg = &ctx.config;
    let mut art = ctx.artifacts("entropy");
    let grid = entropy_grid(cfg);

    art.csv(
        "kappa.csv",
        &["u", "l", "kappa"],
        grid.iter().map(|&(u, l)| vec![num(u), num(l), num(kappa(u, l))]).collect(),
    )?;
    art.check(kappa(1.0, 0.0) == 0.0, "kappa_origin", format!("kappa(1,0) = {}", num(kappa(1.0, 0.0))));

    let mut rows = Vec::new();
    let (mut worst_d, mut worst_inv) = (0.0f64, 0.0f64);
    for &(v, l) in &grid {
        let d = kappa_derivative(v, l)?;
        let fd = fd_derivative(v, l);
        let rel = (d - fd).abs() / d.abs().max(1e-3);
        let inv = (chi_inverse(d, l) - v).abs() / v;
        worst_d = worst_d.max(rel);
        worst_inv = worst_inv.max(inv);
        rows.push(vec![num(v), num(l), num(d), num(fd), num(rel), num(inv)]);
    }
    art.csv("derivative.csv", &["v", "l", "derivative", "finite_difference", "rel_error", "inverse_residual"], rows)?;
    art.check(worst_d <= cfg.derivative_rtol, "derivative", format!("worst relative error {}", num(worst_d)));
    art.check(worst_inv <= cfg.inverse_tol, "inverse", format!("worst round-trip residual {}", num(worst_inv)));

    let ev = EntropyEvaluator::new(cfg.entropy_ladder.clone());
    let values: Vec<Vec<(usize, f64)>> = grid.par_iter().map(|&(u, l)| ev.ladder_values(u, l)).collect();
    let mut rows = Vec::new();
    let (mut above, mut non_monotone, mut worst_gap) = (0, 0, 0.0f64);
    for (&(u, l), vals) in grid.iter().zip(&values) {
        let k = kappa(u, l);
        for &(w, kl) in vals {
            rows.push(vec![num(u), num(l), w.to_string(), num(kl), num(k), num(k - kl)]);
            if kl > k + 1e-12 {
                above += 1;
            }
        }
        non_monotone += vals.windows(2).filter(|p| p[1].1 < p[0].1 - 1e-12).count();
        if let Some(&(w, kl)) = vals.last() {
            if Some(&w) == cfg.entropy_ladder.last() {
                worst_gap = worst_gap.max(k - kl);
            }
        }
    }
    art.csv("ladder.csv", &["u", "l", "width", "kappa_finite", "kappa", "gap"], rows)?;
    art.check(above == 0, "finite_below_limit", format!("{above} finite values above the limit"));
    art.check(non_monotone == 0, "ladder_monotone", format!("{non_monotone} decreasing ladder steps"));
    let level = if worst_gap < cfg.ladder_gap { Level::Info } else { Level::Warn };
    art.diag(level, "ladder_gap", format!("largest gap at the top width {}", num(worst_gap)));

    let pts = lattice(cfg.oracle_max_width, cfg.budget);
    let mut rows = Vec::with_capacity(pts.len());
    let mut mismatches = 0;
    for pt in &pts {
        let e = enumerate_column_paths(*pt, cfg.budget)?;
        let s = if cfg.inject_mutation { count_paths_stretch_form_from(*pt, 1) } else { count_paths_stretch_form(*pt) };
        mismatches += (e != s) as usize;
        rows.push(vec![
            pt.width.to_string(),
            pt.steps.to_string(),
            pt.rise.to_string(),
            e.to_string(),
            s.to_string(),
            (e == s).to_string(),
        ]);
    }
    art.csv("oracle.csv", &["width", "steps", "rise", "enumerated", "stretch_form", "equal"], rows)?;
    art.check(mismatches == 0, "count_equality", format!("{mismatches} of {} points disagree", pts.len()));

    let details = json!({ "grid_points": grid.len(), "oracle_points": pts.len() });
    art.finish(ctx.manifest("entropy", details))
}

pub fn interface(ctx: &Context) -> anyhow::Result<Manifest> {
    let cfg = &ctx.config;
    cfg.params()?;
    let mut art = ctx.artifacts("interface");
    let settings = cfg.interface_settings();
    let table = InterfaceTable::build(cfg.alpha, cfg.beta, &settings);
    let table_json = table.to_json().into_bytes();
    let table_sum = sha256_hex(&table_json);
    art.raw("table.json", table_json);
    let rows = table
        .nodes
        .iter()
        .map(|n| {
            vec![
                num(n.mu),
                num(n.estimate),
                num(n.stderr),
                num(n.spread),
                num(n.model),
                num(table.phi(n.mu)),
                num(kappa(n.mu, 0.0)),
            ]
        })
        .collect();
    art.csv("nodes.csv", &["mu", "estimate", "stderr", "spread", "model", "envelope_phi", "kappa"], rows)?;

    let defect = table.concavity_defect();
    art.check(defect <= 1e-12, "envelope_concavity", format!("largest chord violation {}", num(defect)));
    let dev = table.envelope_deviation();
    let level = if dev <= 3.0 { Level::Info } else { Level::Warn };
    art.diag(level, "envelope_deviation", format!("largest envelope lift {} error bars", num(dev)));

    let mut collapse = Vec::new();
    if cfg.beta <= 0.0 {
        let est = estimate_phi_grid(&cfg.collapse_mus, cfg.alpha, cfg.beta, &settings);
        let mut fails = 0;
        for e in &est {
            let k = kappa(e.mu, 0.0);
            let ok = (e.estimate - k).abs() <= 2.0 * e.error() + cfg.collapse_slack;
            fails += (!ok) as usize;
            collapse.push(vec![
                num(e.mu),
                num(e.estimate),
                num(e.stderr),
                num(e.spread),
                num(k),
                num(e.estimate - k),
                ok.to_string(),
            ]);
        }
        art.check(fails == 0, "collapse", format!("{fails} of {} nodes away from the entropic curve", est.len()));
    } else {
        art.diag(Level::Info, "collapse", "not applicable for beta > 0");
    }
    art.csv("collapse.csv", &["mu", "estimate", "stderr", "spread", "kappa", "difference", "pass"], collapse)?;

    let details = json!({ "mu_grid": settings.grid(), "table_sha256": table_sum });
    art.finish(ctx.manifest("interface", details))
}

pub fn free_energy(ctx: &Context) -> anyhow::Result<Manifest> {
    let cfg = &ctx.config;
    let params = cfg.params()?;
    let mut art = ctx.artifacts("free-energy");
    let fam = family(cfg)?;
    let (obj, table) = objective(cfg, params.alpha, params.beta);

    let results: Vec<_> = fam.members.par_iter().map(|m| free_energy_for_measure(&m.measure, &obj)).collect();
    let mut rows = Vec::new();
    let mut traces = BTreeMap::new();
    let mut best: Option<(usize, f64)> = None;
    let mut values = Vec::new();
    for (i, (m, r)) in fam.members.iter().zip(&results).enumerate() {
        let mut row = vec![i.to_string(), m.name.clone()];
        match r {
            Ok(opt) => {
                row.extend(["ok".into(), num(opt.value), opt.iterations.to_string(), num(opt.residual)]);
                art.check(
                    opt.residual <= DINKELBACH_TOL,
                    "dinkelbach_residual",
                    format!("{}: {}", m.name, num(opt.residual)),
                );
                let monotone = opt.trace.windows(2).skip(1).all(|w| w[1] >= w[0] - 1e-12);
                art.check(monotone, "trace_monotone", m.name.clone());
                traces.insert(m.name.clone(), opt.trace.clone());
                values.push(Some(opt.value));
                if best.map_or(true, |(_, b)| opt.value > b) {
                    best = Some((i, opt.value));
                }
            }
            Err(Error::NonPositive) => {
                row.extend(["non_positive".into(), String::new(), String::new(), String::new()]);
                values.push(None);
            }
            Err(e) => return Err(e.clone().into()),
        }
        row.extend([
            num(m.measure.w_i),
            num(m.measure.b_mass()),
            m.measure.atoms_a.len().to_string(),
            m.measure.atoms_b.len().to_string(),
            m.fallback.to_string(),
        ]);
        rows.push(row);
    }
    art.csv(
        "members.csv",
        &[
            "index",
            "name",
            "status",
            "value",
            "iterations",
            "residual",
            "w_i",
            "b_mass",
            "atoms_a",
            "atoms_b",
            "fallback",
        ],
        rows,
    )?;
    let (argmax, value) = best.ok_or(Error::NonPositive)?;
    let level = if value > 0.0 { Level::Info } else { Level::Warn };
    art.diag(level, "positivity", format!("family optimum {}", num(value)));
    let runner_up = values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != argmax)
        .filter_map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    let speeds = results[argmax].as_ref().map(|o| o.speeds.clone()).ok();
    if speeds.as_ref().is_some_and(|s| s.saturated) {
        art.diag(Level::Warn, "table_saturation", "optimal interface speed lies beyond the table");
    }
    let summary = json!({
        "alpha": params.alpha,
        "beta": params.beta,
        "p": params.p,
        "value": value,
        "argmax": argmax,
        "argmax_name": fam.members[argmax].name,
        "runner_up_margin": value - runner_up,
        "speeds": speeds,
        "traces": traces,
    });
    art.json("result.json", &summary)?;
    let details = json!({
        "family_size": fam.members.len(),
        "table_sha256": table.map(|t| sha256_hex(t.to_json().as_bytes())),
    });
    art.finish(ctx.manifest("free-energy", details))
}

fn flags(pt: &copolymer_core::PhasePoint) -> String {
    let mut f = Vec::new();
    if pt.lower_bound {
        f.push("lower_bound");
    }
    if pt.table_saturated {
        f.push("table_saturated");
    }
    if pt.minimal_b_surrogate {
        f.push("minimal_b_surrogate");
    }
    f.join(";")
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), num)
}

pub fn phase_diagram(ctx: &Context) -> anyhow::Result<Manifest> {
    let cfg = &ctx.config;
    cfg.params()?;
    let mut art = ctx.artifacts("phase-diagram");
    let fam = family(cfg)?;
    let tol = cfg.ordering_tol;

    let points = cfg.scan_points();
    let results: Vec<_> = points
        .par_iter()
        .map(|&(alpha, beta)| {
            let (obj, table) = objective(cfg, alpha, beta);
            (classify(&fam, &obj), table.map(|t| sha256_hex(t.to_json().as_bytes())))
        })
        .collect();

    let mut rows = Vec::new();
    let mut tables = BTreeMap::new();
    let (mut cone_violations, mut order_violations, mut failures) = (0, 0, 0);
    for (&(alpha, beta), (pt, sum)) in points.iter().zip(&results) {
        if let Some(s) = sum {
            tables.insert(format!("alpha={},beta={}", num(alpha), num(beta)), s.clone());
        }
        let pt = match pt {
            Ok(pt) => pt,
            Err(e) => {
                failures += 1;
                art.diag(Level::Error, "classify", format!("({}, {}): {e}", num(alpha), num(beta)));
                rows.push(vec![
                    num(alpha),
                    num(beta),
                    num(fam.p),
                    "error".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
                continue;
            }
        };
        if beta <= 0.0 && matches!(pt.phase, Phase::L1 | Phase::L2) {
            cone_violations += 1;
        }
        let mut ok = pt.f >= pt.f_d - tol;
        if let Some(d2) = pt.f_d2 {
            ok &= pt.f_d >= d2 - tol;
            ok &= pt.f_l2.map_or(true, |l2| l2 >= d2 - tol);
        }
        ok &= pt.f_l2.map_or(true, |l2| pt.f >= l2 - tol);
        order_violations += (!ok) as usize;
        rows.push(vec![
            num(alpha),
            num(beta),
            num(pt.p),
            pt.phase.to_string(),
            num(pt.f),
            num(pt.f_d),
            opt(pt.f_d2),
            opt(pt.f_l2),
            num(pt.margin),
            flags(pt),
        ]);
    }
    art.csv("phase.csv", &["alpha", "beta", "p", "phase", "f", "fD", "fD2", "fL2", "margin", "flags"], rows)?;
    art.check(
        cone_violations == 0,
        "no_localization_below_zero",
        format!("{cone_violations} localized points with beta <= 0"),
    );
    art.check(
        order_violations == 0,
        "ordering",
        format!("{order_violations} points break f >= fD >= fD2, f >= fL2 >= fD2"),
    );
    art.check(failures == 0, "scan_complete", format!("{failures} points failed"));

    let a_star = match alpha_star(&fam) {
        Ok(a) => Some(a),
        Err(e) => {
            art.diag(Level::Warn, "alpha_star", e.to_string());
            None
        }
    };
    let settings = cfg.interface_settings();
    let curve: Vec<(f64, Result<BetaC, Error>)> =
        cfg.critical_alphas.par_iter().map(|&a| (a, beta_c(a, &fam, &settings))).collect();
    let mut rows = Vec::new();
    let mut resolved: Vec<BetaC> = Vec::new();
    for (a, r) in &curve {
        let star = a_star.map_or(String::new(), |s| num(s.value));
        match r {
            Ok(b) => {
                rows.push(vec![num(*a), star, num(b.value), num(b.lo), num(b.hi), num(b.v_bar), "ok".into()]);
                resolved.push(*b);
            }
            Err(e) => {
                art.diag(Level::Warn, "beta_c", format!("alpha = {}: {e}", num(*a)));
                let status = match e {
                    Error::StatisticallyUndecided { .. } => "undecided",
                    Error::TableSaturation(_) => "saturated",
                    _ => "failed",
                };
                rows.push(vec![
                    num(*a),
                    star,
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    status.into(),
                ]);
            }
        }
    }
    art.csv("critical.csv", &["alpha", "alpha_star", "beta_c", "beta_c_lo", "beta_c_hi", "v_bar", "status"], rows)?;
    // non-decreasing within the confidence intervals
    let monotone = resolved.windows(2).all(|w| w[1].hi >= w[0].lo);
    let level = if monotone { Level::Info } else { Level::Warn };
    art.diag(level, "beta_c_monotone", format!("{} resolved points", resolved.len()));

    let details = json!({
        "family_size": fam.members.len(),
        "family_members": fam.members.iter().map(|m| m.name.clone()).collect::<Vec<_>>(),
        "scan_points": points.len(),
        "alpha_star": a_star,
        "beta_c_monotone": monotone,
        "regime": copolymer_core::phases::regime(fam.p),
        "table_sha256": tables,
    });
    art.finish(ctx.manifest("phase-diagram", details))
}

pub fn oracle_check(ctx: &Context) -> anyhow::Result<Manifest> {
    let cfg = &ctx.config;
    let params = cfg.params()?;
    let start = Instant::now();
    let mut art = ctx.artifacts("oracle-check");
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut record = |art: &mut Artifacts, name: &str, ok: bool, detail: String| {
        rows.push(vec![name.to_string(), if ok { "pass" } else { "fail" }.to_string(), detail.clone()]);
        art.check(ok, name, detail);
    };

    let pts = lattice(cfg.oracle_max_width, cfg.budget);
    let enumerated = pts.iter().map(|pt| enumerate_column_paths(*pt, cfg.budget)).collect::<Result<Vec<_>, _>>()?;
    let counter = |pt: HPoint| {
        if cfg.inject_mutation {
            count_paths_stretch_form_from(pt, 1)
        } else {
            count_paths_stretch_form(pt)
        }
    };
    let bad = pts.iter().zip(&enumerated).filter(|(pt, e)| counter(**pt) != **e).count();
    record(&mut art, "count_equality", bad == 0, format!("{bad} of {} points disagree", pts.len()));
    let caught = pts.iter().zip(&enumerated).filter(|(pt, e)| count_paths_stretch_form_from(**pt, 1) != **e).count();
    record(&mut art, "mutation_detected", caught > 0, format!("dropping the straight term breaks {caught} points"));
    let asym = pts.iter().filter(|pt| counter(**pt) != counter(HPoint { rise: -pt.rise, ..**pt })).count();
    record(&mut art, "mirror_symmetry", asym == 0, format!("{asym} asymmetric points"));

    record(&mut art, "kappa_origin", kappa(1.0, 0.0) == 0.0, format!("kappa(1,0) = {}", num(kappa(1.0, 0.0))));
    let ev = EntropyEvaluator::new(cfg.entropy_ladder.clone());
    let grid = entropy_grid(cfg);
    let above = grid
        .par_iter()
        .map(|&(u, l)| ev.ladder_values(u, l).iter().filter(|&&(_, k)| k > kappa(u, l) + 1e-12).count())
        .sum::<usize>();
    record(&mut art, "finite_below_limit", above == 0, format!("{above} finite values above the limit"));

    let mut deriv_grid = Vec::new();
    for l in [0.5, 1.0, 2.0] {
        for du in [0.05, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0] {
            deriv_grid.push((1.0 + l + du, l));
        }
    }
    deriv_grid.truncate(20);
    let (mut worst_d, mut worst_inv) = (0.0f64, 0.0f64);
    for &(v, l) in &deriv_grid {
        let d = kappa_derivative(v, l)?;
        worst_d = worst_d.max((d - fd_derivative(v, l)).abs() / d.abs());
        worst_inv = worst_inv.max((chi_inverse(d, l) - v).abs());
    }
    record(&mut art, "derivative", worst_d <= cfg.derivative_rtol, format!("worst relative error {}", num(worst_d)));
    record(&mut art, "inverse", worst_inv <= cfg.inverse_tol, format!("worst residual {}", num(worst_inv)));

    let mut worst_margin = f64::INFINITY;
    for &l in &cfg.l_grid {
        for &du in &cfg.du_grid {
            let (u1, u2) = (1.0 + l.abs() + du, 1.0 + l.abs() + 2.0 * du);
            let mid = u_kappa(0.5 * (u1 + u2), l) - 0.5 * (u_kappa(u1, l) + u_kappa(u2, l));
            worst_margin = worst_margin.min(mid);
        }
    }
    record(
        &mut art,
        "strict_concavity",
        worst_margin > 1e-8,
        format!("smallest midpoint margin {}", num(worst_margin)),
    );

    let settings = cfg.interface_settings();
    let mut worst = f64::NEG_INFINITY;
    for beta in [0.0, -0.5 * params.alpha] {
        for e in estimate_phi_grid(&cfg.collapse_mus, params.alpha, beta, &settings) {
            worst = worst.max((e.estimate - kappa(e.mu, 0.0)).abs() - 2.0 * e.error());
        }
    }
    record(
        &mut art,
        "interface_collapse",
        worst <= cfg.collapse_slack,
        format!("largest excess over two error bars {}", num(worst)),
    );

    let obj = Objective::entropic(params.alpha, params.beta);
    let hor = free_energy_for_measure(&SlopeMeasure::rho_hor(params.p), &obj);
    let (ok, detail) = match &hor {
        Ok(o) => (
            o.residual <= DINKELBACH_TOL && o.value > 0.0,
            format!("value {} residual {}", num(o.value), num(o.residual)),
        ),
        Err(e) => (false, e.to_string()),
    };
    record(&mut art, "horizontal_positive", ok, detail);

    let bound = 3f64.ln() + params.alpha;
    let mut worst_f = 0.0f64;
    for s in 0..8u64 {
        let dis = DisorderPair::generate(
            derive_seed(cfg.seed, streams::OMEGA, s),
            10,
            derive_seed(cfg.seed, streams::FAMILY, s),
            params.p,
        );
        let f = finite_free_energy(10, 2, &dis, &params, cfg.budget.max(10))?;
        worst_f = worst_f.max(f.abs());
    }
    record(
        &mut art,
        "finite_bound",
        worst_f <= bound,
        format!("largest |f_n| {} against {}", num(worst_f), num(bound)),
    );

    art.csv("checks.csv", &["check", "status", "detail"], rows)?;
    let elapsed = start.elapsed().as_secs_f64();
    eprintln!("oracle-check finished in {elapsed:.2} s");
    if elapsed > cfg.time_limit_secs {
        art.diag(Level::Error, "runtime", format!("exceeded the {} s ceiling", num(cfg.time_limit_secs)));
    }
    let details = json!({ "oracle_points": pts.len(), "mutation_injected": cfg.inject_mutation });
    art.finish(ctx.manifest("oracle-check", details))
}
