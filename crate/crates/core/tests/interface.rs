//! Interface partition sums against brute-force path enumeration, and
//! structural checks on the fitted tables.

use copolymer_core::entropy::{kappa, u_kappa};
use copolymer_core::interface::{
    concave_majorant, estimate_phi, interface_log_partitions, InterfaceFreeEnergy, InterfaceSettings, InterfaceTable,
    PhiEstimate,
};
use copolymer_core::oracle::{omega_word, Kind};
use copolymer_core::Step;
use proptest::prelude::*;

/// Sums `exp(H)` over every step word of length `n` from `(0,0)` to `(width,0)`.
/// Steps below the interface pick up `−α` for an A monomer and `β` for a B one;
/// a horizontal step is below when it runs at negative height, a vertical one
/// when its lower end is at or under `−1`.
fn brute_log_z(width: i64, n: usize, omega: &[Kind], alpha: f64, beta: f64) -> f64 {
    fn walk(
        i: usize,
        x: i64,
        y: i64,
        last: Option<Step>,
        h: f64,
        ctx: &(i64, usize, &[Kind], f64, f64),
        acc: &mut f64,
    ) {
        let (width, n, omega, alpha, beta) = *ctx;
        if i == n {
            if x == width && y == 0 {
                *acc += h.exp();
            }
            return;
        }
        let e = if omega[i] == Kind::A { -alpha } else { beta };
        for s in Step::ALL {
            if last.is_some_and(|l| !l.allows(s)) {
                continue;
            }
            let (dx, dy) = s.delta();
            if x + dx > width {
                continue;
            }
            let below = match s {
                Step::East => y < 0,
                _ => y.min(y + dy) <= -1,
            };
            walk(i + 1, x + dx, y + dy, Some(s), h + if below { e } else { 0.0 }, ctx, acc);
        }
    }
    let mut acc = 0.0;
    walk(0, 0, 0, None, 0.0, &(width, n, omega, alpha, beta), &mut acc);
    acc.ln()
}

#[test]
fn transfer_sum_matches_enumeration() {
    for seed in 0..4 {
        let omega = omega_word(seed, 12);
        for width in 1..=4usize {
            let table = interface_log_partitions(width, 12, &omega, 1.3, 0.4);
            for n in (width..=12).step_by(2) {
                let want = brute_log_z(width as i64, n, &omega, 1.3, 0.4);
                assert!((table[n] - want).abs() < 1e-10, "width {width} n {n}: {} vs {want}", table[n]);
            }
        }
    }
}

#[test]
fn collapse_below_zero_beta() {
    let settings = InterfaceSettings { samples: 100, ..InterfaceSettings::default() };
    for &(alpha, beta) in &[(2.0, 0.0), (1.0, -0.5)] {
        for &mu in &[1.5, 2.5] {
            let e = estimate_phi(mu, alpha, beta, &settings);
            assert!((e.estimate - kappa(mu, 0.0)).abs() <= 2.0 * e.error() + 0.05, "{e:?}");
        }
    }
}

#[test]
fn entropic_model_is_the_curve() {
    let m = InterfaceFreeEnergy::Entropic;
    for &mu in &[1.0, 1.7, 4.0, 30.0] {
        assert!((m.mu_phi(mu) - u_kappa(mu, 0.0)).abs() < 1e-14);
    }
}

fn synthetic_table(bumps: &[f64]) -> InterfaceTable {
    let settings = InterfaceSettings { mu_max: 1.0 + 0.5 * bumps.len() as f64, mu_step: 0.5, ..Default::default() };
    let nodes = bumps
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let mu = 1.5 + 0.5 * i as f64;
            let v = kappa(mu, 0.0) + b;
            PhiEstimate { mu, estimate: v, stderr: 0.0, spread: 0.0, model: v.max(kappa(mu, 0.0)) }
        })
        .collect();
    InterfaceTable::from_nodes(1.0, 0.5, settings, nodes)
}

proptest! {
    #[test]
    fn log_z_non_decreasing_in_beta(seed in any::<u64>(), width in 1usize..6, alpha in 0.0f64..3.0, b1 in -3.0f64..3.0, b2 in -3.0f64..3.0) {
        let omega = omega_word(seed, 20);
        let (lo, hi) = (b1.min(b2), b1.max(b2));
        let a = interface_log_partitions(width, 20, &omega, alpha, lo);
        let b = interface_log_partitions(width, 20, &omega, alpha, hi);
        for n in (width..=20).step_by(2) {
            prop_assert!(b[n] >= a[n] - 1e-9);
        }
    }

    #[test]
    fn envelope_is_concave_and_dominating(bumps in prop::collection::vec(-0.2f64..0.3, 3..12)) {
        let t = synthetic_table(&bumps);
        prop_assert!(t.concavity_defect() <= 1e-12);
        for n in &t.nodes {
            prop_assert!(t.phi(n.mu) >= n.model - 1e-12);
        }
        let model = InterfaceFreeEnergy::from_table(t.clone());
        for i in 0..40 {
            let mu = 1.0 + 0.25 * i as f64;
            prop_assert!(model.mu_phi(mu) >= u_kappa(mu, 0.0) - 1e-12);
            let (x, y, z) = (mu, mu + 0.3, mu + 0.6);
            prop_assert!(model.mu_phi(y) >= 0.5 * (model.mu_phi(x) + model.mu_phi(z)) - 1e-10);
            // μφ grows with μ
            prop_assert!(model.mu_phi(y) >= model.mu_phi(x) - 1e-12);
        }
    }

    #[test]
    fn majorant_of_random_points(ys in prop::collection::vec(-1.0f64..1.0, 2..20)) {
        let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64, y)).collect();
        let hull = concave_majorant(&pts);
        prop_assert_eq!(hull.first().map(|p| p.0), Some(0.0));
        for w in hull.windows(3) {
            let s1 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let s2 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
            prop_assert!(s2 <= s1 + 1e-12);
        }
    }
}
