//! Slope-ratio optimiser against direct searches, and the column/slope
//! transform inequalities.

use copolymer_core::column::{geometry, ColumnType};
use copolymer_core::entropy::u_kappa;
use copolymer_core::maximizer_checks::{perturb, verify_inner_uniqueness};
use copolymer_core::varform::{
    column_ratio, free_energy_for_measure, lift_to_slope, lifted_ratio, push_to_column, slope_ratio, ColumnMeasure,
    FractionProfile, Objective, SlopeMeasure, SpeedProfile,
};
use copolymer_core::Kind::{self, A, B};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn golden_arg<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..90 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            a = c;
        } else {
            b = d;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Best ratio of a two-atom A/B measure, searching both speeds on a log scale.
fn two_atom_search(la: f64, wa: f64, lb: f64, wb: f64, shift: f64) -> f64 {
    let ratio = |xa: f64, xb: f64| {
        let (va, vb) = (1.0 + la + xa.exp(), 1.0 + lb + xb.exp());
        (wa * u_kappa(va, la) + wb * (u_kappa(vb, lb) + shift * vb)) / (wa * va + wb * vb)
    };
    golden_arg(|xa| golden_arg(|xb| ratio(xa, xb), -30.0, 10.0).1, -30.0, 10.0).1
}

#[test]
fn dinkelbach_matches_direct_search() {
    let obj = Objective::entropic(2.0, 1.0);
    for &(la, wa, lb, wb) in &[(0.0, 0.7, 0.0, 0.3), (0.5, 0.4, 1.5, 0.6), (2.0, 0.9, 0.2, 0.1)] {
        let rho = SlopeMeasure::new(vec![(la, wa)], vec![(lb, wb)], 0.0).unwrap();
        let got = free_energy_for_measure(&rho, &obj).unwrap().value;
        let want = two_atom_search(la, wa, lb, wb, obj.b_shift());
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
}

#[test]
fn infinite_speed_is_minus_infinity() {
    let rho = SlopeMeasure::rho_hor(0.5);
    let v = SpeedProfile { v_a: vec![f64::INFINITY], v_b: vec![2.0], v_i: 2.0, saturated: true };
    assert_eq!(slope_ratio(&rho, &v, &Objective::entropic(1.0, 0.0)), f64::NEG_INFINITY);
}

#[test]
fn off_optimum_speed_loses() {
    let rho = SlopeMeasure::rho_hor(0.5);
    let obj = Objective::entropic(2.0, 1.0);
    let opt = free_energy_for_measure(&rho, &obj).unwrap();
    let mut v = opt.speeds.clone();
    v.v_a[0] += 0.5;
    assert!(opt.value - slope_ratio(&rho, &v, &obj) > 1e-6);
}

#[test]
fn horizontal_measure_perturbations_cluster() {
    let r = verify_inner_uniqueness("horizontal", &SlopeMeasure::rho_hor(0.5), &Objective::entropic(2.0, 1.0), 100, 3)
        .unwrap();
    assert!(r.passes(1e-6));
    assert!(r.worst_gap <= 1e-3, "gap {}", r.worst_gap);
}

fn random_measure<R: Rng>(rng: &mut R) -> SlopeMeasure {
    let na = rng.gen_range(0..4);
    let nb = rng.gen_range(0..3);
    let atoms = |n: usize, rng: &mut R| -> Vec<(f64, f64)> {
        (0..n).map(|_| (rng.gen_range(0.0..3.0), rng.gen_range(0.05..1.0))).collect()
    };
    let a = atoms(na, rng);
    let b = atoms(nb, rng);
    let wi = if na + nb == 0 || rng.gen_bool(0.5) { rng.gen_range(0.05..1.0) } else { 0.0 };
    SlopeMeasure::normalized(a, b, wi).unwrap()
}

fn random_theta<R: Rng>(rng: &mut R, x: Option<u8>) -> ColumnType {
    loop {
        let r = rng.gen_range(1..=3usize);
        let chi: Vec<Kind> = (0..2 * r + 1).map(|_| if rng.gen_bool(0.5) { A } else { B }).collect();
        let dpi = rng.gen_range(-(r as i32)..=r as i32);
        let tag = x.unwrap_or_else(|| rng.gen_range(1..=2));
        if let Ok(th) = ColumnType::new(chi, dpi, rng.gen(), rng.gen(), tag) {
            if geometry(&th).is_ok() {
                return th;
            }
        }
    }
}

fn random_menu<R: Rng>(rng: &mut R, x: Option<u8>) -> ColumnMeasure {
    let n = rng.gen_range(1..=4);
    ColumnMeasure::normalized((0..n).map(|_| (random_theta(rng, x), rng.gen_range(0.1..1.0))).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dinkelbach_converges_monotonically(seed in any::<u64>(), alpha in 0.0f64..4.0, t in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_measure(&mut rng);
        let obj = Objective::entropic(alpha, t * alpha);
        match free_energy_for_measure(&rho, &obj) {
            Ok(opt) => {
                prop_assert!(opt.residual <= 1e-9);
                for w in opt.trace.windows(2).skip(1) {
                    prop_assert!(w[1] >= w[0] - 1e-12, "trace {:?}", opt.trace);
                }
                let mut prng = ChaCha8Rng::seed_from_u64(seed ^ 1);
                for _ in 0..20 {
                    let v = perturb(&rho, &opt.speeds, 0.3, &mut prng);
                    prop_assert!(slope_ratio(&rho, &v, &obj) <= opt.value + 1e-9);
                }
            }
            Err(e) => prop_assert_eq!(e, copolymer_core::Error::NonPositive),
        }
    }

    #[test]
    fn ratio_is_scale_invariant(seed in any::<u64>(), lambda in 1e-3f64..1e3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_measure(&mut rng);
        let scaled = SlopeMeasure::normalized(
            rho.atoms_a.iter().map(|&(l, w)| (l, lambda * w)).collect(),
            rho.atoms_b.iter().map(|&(l, w)| (l, lambda * w)).collect(),
            lambda * rho.w_i,
        ).unwrap();
        let v = SpeedProfile {
            v_a: rho.atoms_a.iter().map(|a| 1.5 + a.0).collect(),
            v_b: rho.atoms_b.iter().map(|a| 2.5 + a.0).collect(),
            v_i: 1.7,
            saturated: false,
        };
        let obj = Objective::entropic(2.0, 0.5);
        let (x, y) = (slope_ratio(&rho, &v, &obj), slope_ratio(&scaled, &v, &obj));
        prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
    }

    #[test]
    fn lift_dominates_column_ratio(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_menu(&mut rng, None);
        let u: Vec<f64> = rho.atoms.iter().map(|a| a.geometry.t + rng.gen_range(0.0..4.0)).collect();
        let obj = Objective::entropic(2.0, 1.0);
        let c = column_ratio(&rho, &u, &obj).unwrap();
        let s = lifted_ratio(&rho, &u, &obj).unwrap();
        prop_assert!(s >= c - 1e-9, "{} < {}", s, c);
    }

    #[test]
    fn push_dominates_slope_ratio(seed in any::<u64>(), eta in 0.0f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let menu = random_menu(&mut rng, Some(1));
        let h = FractionProfile::heuristic(&menu, eta);
        let a: Vec<[f64; 3]> = h.h.iter().map(|x| x.map(|y| 2.0 * y)).collect();
        let (rho, _) = lift_to_slope(&menu, &h, &a).unwrap();
        let v = SpeedProfile {
            v_a: rho.atoms_a.iter().map(|x| 1.0 + x.0 + rng.gen_range(0.0..3.0)).collect(),
            v_b: rho.atoms_b.iter().map(|x| 1.0 + x.0 + rng.gen_range(0.0..3.0)).collect(),
            v_i: 1.0 + rng.gen_range(0.0..3.0),
            saturated: false,
        };
        let obj = Objective::entropic(2.0, 1.0);
        let u = push_to_column(&rho, &v, &menu, &h).unwrap();
        let c = column_ratio(&menu, &u, &obj).unwrap();
        prop_assert!(c >= slope_ratio(&rho, &v, &obj) - 1e-9);
    }
}
