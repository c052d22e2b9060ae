//! Column free energy against a direct nested maximisation, plus structural
//! invariants over random column types.

use copolymer_core::column::{geometry, psi, ColumnClass, ColumnType};
use copolymer_core::entropy::{kappa, u_kappa};
use copolymer_core::interface::{InterfaceSettings, InterfaceTable, PhiEstimate};
use copolymer_core::maximizer_checks::verify_column_uniqueness;
use copolymer_core::varform::Objective;
use copolymer_core::Kind::{self, A, B};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    if b <= a {
        return f(a);
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..40 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            a = c;
        } else {
            b = d;
        }
    }
    f(0.5 * (a + b))
}

fn part(h: f64, a: f64, l: f64) -> f64 {
    if h <= 0.0 {
        0.0
    } else {
        h * u_kappa(a / h, l / h)
    }
}

/// `u ψ(Θ,u)` for an interface-crossing column with the entropic interface,
/// by nested golden sections over `(h_A, h_B, a_A, a_B)`.
fn int_column_oracle(l_a: f64, l_b: f64, u: f64, shift: f64) -> f64 {
    golden(
        |ha| {
            golden(
                |hb| {
                    let hi = 1.0 - ha - hb;
                    golden(
                        |aa| {
                            golden(
                                |ab| {
                                    let ai = u - aa - ab;
                                    part(ha, aa, l_a) + part(hb, ab, l_b) + shift * ab + part(hi, ai, 0.0)
                                },
                                hb + l_b,
                                u - aa - hi,
                            )
                        },
                        ha + l_a,
                        u - hb - l_b - hi,
                    )
                },
                0.0,
                1.0 - ha,
            )
        },
        0.0,
        1.0,
    )
}

#[test]
fn interior_columns_match_nested_search() {
    let obj = Objective::entropic(2.0, 1.0);
    let cases = [(vec![B, A, B], 1, 0.5, 0.5), (vec![A, A, B, B, B], -1, 0.3, 0.8), (vec![B, B, A, A, B], 2, 0.5, 0.2)];
    for (chi, dpi, b0, b1) in cases {
        let th = ColumnType::new(chi, dpi, b0, b1, 1).unwrap();
        let g = geometry(&th).unwrap();
        assert_eq!(g.class, ColumnClass::Int);
        {
            let du = 1.0;
            let u = g.t + du;
            let want = int_column_oracle(g.l_a, g.l_b, u, obj.b_shift()) / u;
            let got = psi(&th, u, &obj).unwrap().value;
            assert!((got - want).abs() < 1e-7, "{th:?} u={u}: {got} vs {want}");
        }
    }
}

#[test]
fn single_solvent_columns_are_entropies() {
    let obj = Objective::entropic(3.0, -1.0);
    let a = ColumnType::new(vec![A; 5], 1, 0.2, 0.7, 1).unwrap();
    let b = ColumnType::new(vec![B; 5], -1, 0.6, 0.1, 1).unwrap();
    for u in [3.0, 4.5] {
        assert!((psi(&a, u, &obj).unwrap().value - kappa(u, 1.5)).abs() < 1e-12);
        assert!((psi(&b, u, &obj).unwrap().value - (kappa(u, 1.5) + obj.b_shift())).abs() < 1e-12);
    }
}

fn random_theta<R: Rng>(rng: &mut R, allow_touch: bool) -> ColumnType {
    loop {
        let r = rng.gen_range(1..=3usize);
        let chi: Vec<Kind> = (0..2 * r + 1).map(|_| if rng.gen_bool(0.5) { A } else { B }).collect();
        let dpi = rng.gen_range(-(r as i32)..=r as i32);
        let x = if allow_touch { rng.gen_range(1..=2) } else { 1 };
        if let Ok(th) = ColumnType::new(chi, dpi, rng.gen(), rng.gen(), x) {
            if geometry(&th).is_ok() {
                return th;
            }
        }
    }
}

/// Interface model lying strictly above the entropic curve, so that solvent
/// steps at zero distance never tie with interface steps.
fn lifted_interface() -> Objective {
    let settings = InterfaceSettings { mu_max: 8.0, mu_step: 0.5, ..Default::default() };
    let nodes = settings
        .grid()
        .into_iter()
        .skip(1)
        .map(|mu| {
            let v = kappa(mu, 0.0) + 0.2 / mu;
            PhiEstimate { mu, estimate: v, stderr: 0.0, spread: 0.0, model: v }
        })
        .collect();
    Objective::from_table(InterfaceTable::from_nodes(2.0, 1.0, settings, nodes))
}

#[test]
fn uniqueness_structure_on_random_menu() {
    let obj = lifted_interface();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let th = random_theta(&mut rng, true);
        let g = geometry(&th).unwrap();
        let u = g.t + rng.gen_range(0.2..3.0);
        let r = verify_column_uniqueness(&th, u, &obj).unwrap();
        assert!(r.structure_ok(), "{th:?} u={u}: {:?}", r.violations);
        assert!(r.value_spread < 1e-7, "{th:?} u={u}: spread {}", r.value_spread);
        assert!(r.point_spread < 1e-5, "{th:?} u={u}: points {}", r.point_spread);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_below_uniform_bound(seed in any::<u64>(), du in 0.0f64..6.0, alpha in 0.0f64..3.0, t in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let th = random_theta(&mut rng, true);
        let g = geometry(&th).unwrap();
        let obj = Objective::entropic(alpha, t * alpha);
        let v = psi(&th, g.t + du, &obj).unwrap().value;
        prop_assert!(v <= 3f64.ln() + alpha + 1e-12);
    }

    #[test]
    fn u_psi_concave(seed in any::<u64>(), a in 0.05f64..4.0, gap in 0.1f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let th = random_theta(&mut rng, true);
        let g = geometry(&th).unwrap();
        let obj = Objective::entropic(2.0, 0.5);
        let f = |u: f64| u * psi(&th, u, &obj).unwrap().value;
        let (u1, u2) = (g.t + a, g.t + a + gap);
        prop_assert!(f(0.5 * (u1 + u2)) >= 0.5 * (f(u1) + f(u2)) - 1e-8);
    }

    #[test]
    fn vanishes_at_large_time(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let th = random_theta(&mut rng, true);
        let g = geometry(&th).unwrap();
        prop_assume!(g.class != ColumnClass::Nint { solvent: B, x: 1 });
        let v = psi(&th, 50.0, &Objective::entropic(1.0, 0.0)).unwrap().value;
        prop_assert!(v <= 0.15, "psi = {}", v);
    }
}
