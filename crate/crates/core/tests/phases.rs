//! Phase labels, reduced free energies and thresholds on small families.

use copolymer_core::entropy::kappa;
use copolymer_core::interface::{InterfaceSettings, InterfaceTable, PhiEstimate};
use copolymer_core::maximizer_checks::attainment;
use copolymer_core::phases::{
    alpha_star, beta_c, classify, f_delocalized, f_localized_saturated, f_saturated, free_energy,
    hypothesis2_diagnostic, Phase,
};
use copolymer_core::varform::{measure_family_from_disorder, Family, FamilySettings, Objective};
use proptest::prelude::*;

fn family(p: f64, seed: u64) -> Family {
    let s = FamilySettings { n_columns: 400, band: 64, ..FamilySettings::default() };
    measure_family_from_disorder(p, 2, 4, seed, &s).unwrap()
}

/// Interface model raised above the entropic curve by `bump / μ`.
fn bumped(alpha: f64, beta: f64, bump: f64) -> Objective {
    let settings = InterfaceSettings { mu_max: 8.0, mu_step: 0.25, ..Default::default() };
    let nodes = settings
        .grid()
        .into_iter()
        .skip(1)
        .map(|mu| {
            let v = kappa(mu, 0.0) + bump / mu;
            PhiEstimate { mu, estimate: v, stderr: 0.0, spread: 0.0, model: v }
        })
        .collect();
    Objective::from_table(InterfaceTable::from_nodes(alpha, beta, settings, nodes))
}

#[test]
fn negative_beta_is_never_localized() {
    let fam = family(0.7, 2);
    for i in 0..=10 {
        let alpha = 0.5 * i as f64;
        for j in 0..=4 {
            let beta = -alpha * j as f64 / 4.0;
            let pt = classify(&fam, &Objective::entropic(alpha, beta)).unwrap();
            assert!(matches!(pt.phase, Phase::D1 | Phase::D2 | Phase::Boundary), "{pt:?}");
        }
    }
}

#[test]
fn strong_interface_localizes() {
    let fam = family(0.7, 2);
    let pt = classify(&fam, &bumped(2.0, 1.0, 1.0)).unwrap();
    assert!(matches!(pt.phase, Phase::L1 | Phase::L2), "{pt:?}");
}

#[test]
fn alpha_star_separates_saturation() {
    let fam = family(0.7, 2);
    let a = alpha_star(&fam).unwrap();
    let fd2 = f_saturated(&fam).unwrap().value;
    assert!(f_delocalized(&fam, a.value - 1e-3).unwrap().value > fd2);
    assert!(f_delocalized(&fam, a.value + 1e-3).unwrap().value - fd2 <= 1e-12);
}

#[test]
fn hypothesis_diagnostic_properties() {
    let r = hypothesis2_diagnostic(&family(0.7, 2)).unwrap();
    assert!(r.g0_positive && r.decreasing);
    assert!(r.sign_change.is_some());
    assert!(r.integral.abs() <= 1e-3, "{}", r.integral);
}

#[test]
fn attainment_at_argmax() {
    let fam = family(0.6, 9);
    let opt = free_energy(&fam, &Objective::entropic(2.0, 1.0)).unwrap();
    let (i, margin) = attainment(&opt.values).unwrap();
    assert_eq!(i, opt.argmax);
    assert!(margin >= 0.0);
    assert_eq!(opt.values[i], Some(opt.value));
}

#[test]
fn beta_c_interval_shrinks_with_samples() {
    let fam = family(0.7, 2);
    let width = |samples: usize| {
        let s = InterfaceSettings { samples, ..InterfaceSettings::default() };
        let b = beta_c(1.0, &fam, &s).unwrap();
        b.hi - b.lo
    };
    let (w1, w2) = (width(50), width(200));
    assert!(w2 <= w1 * 1.05, "{w1} -> {w2}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn delocalized_value_depends_on_difference(d in 0.0f64..4.0, k in 0u32..8) {
        let fam = family(0.7, 2);
        // exact dyadic shifts keep α − β bitwise equal to d
        let shift = k as f64 * 0.25;
        let (alpha, beta) = (d + shift, shift);
        prop_assume!(alpha - beta == d);
        let x = f_delocalized(&fam, alpha - beta).unwrap().value;
        let y = f_delocalized(&fam, d).unwrap().value;
        prop_assert_eq!(x.to_bits(), y.to_bits());
    }

    #[test]
    fn orderings_hold(alpha in 0.2f64..5.0, t in -1.0f64..1.0, bump in 0.0f64..0.5) {
        let fam = family(0.7, 2);
        let beta = t * alpha;
        let obj = if beta > 0.0 { bumped(alpha, beta, bump) } else { Objective::entropic(alpha, beta) };
        let pt = classify(&fam, &obj).unwrap();
        let fd2 = pt.f_d2.unwrap();
        let fl2 = f_localized_saturated(&fam, &obj).unwrap().value;
        prop_assert!(pt.f >= pt.f_d - 1e-9);
        prop_assert!(pt.f_d >= fd2 - 1e-9);
        prop_assert!(pt.f >= fl2 - 1e-9);
        prop_assert!(fl2 >= fd2 - 1e-9);
    }
}
