//! Path entropy against a direct maximisation of the stretch-count rate.

use copolymer_core::entropy::{chi_inverse, kappa, kappa_derivative, u_kappa};
use copolymer_core::EntropyEvaluator;
use proptest::prelude::*;

/// `n ln n − k ln k − (n−k) ln(n−k)`, the exponential rate of `C(n,k)`.
fn binom_rate(n: f64, k: f64) -> f64 {
    let xlx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    xlx(n) - xlx(k) - xlx(n - k)
}

fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
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

/// `u κ̃(u,l)` as the maximal rate of `C(L,r) C(r,r₊) C(U,r₊) C(D,r−r₊)` per
/// unit width, over the stretch fractions `r/L` and `r₊/L`.
fn stretch_rate(u: f64, l: f64) -> f64 {
    let up = 0.5 * (u - 1.0 + l.abs());
    let down = 0.5 * (u - 1.0 - l.abs());
    let inner = |rho: f64| {
        let lo = (rho - down).max(0.0);
        let hi = rho.min(up);
        if hi < lo {
            return f64::NEG_INFINITY;
        }
        golden(|s| binom_rate(1.0, rho) + binom_rate(rho, s) + binom_rate(up, s) + binom_rate(down, rho - s), lo, hi)
    };
    golden(inner, 0.0, 1.0f64.min(up + down))
}

#[test]
fn closed_form_matches_stretch_rate() {
    for &l in &[0.0, 0.3, 1.0, 2.5] {
        for &du in &[0.05, 0.5, 1.0, 3.0, 10.0] {
            let u = 1.0 + l + du;
            let want = stretch_rate(u, l) / u;
            assert!((kappa(u, l) - want).abs() < 1e-8, "u={u} l={l}: {} vs {want}", kappa(u, l));
        }
    }
}

#[test]
fn origin_and_boundary() {
    assert_eq!(kappa(1.0, 0.0), 0.0);
    assert_eq!(kappa(0.5, 0.0), f64::NEG_INFINITY);
    // on u = 1 + l every vertical step goes the same way
    let l = 2.0;
    let want = stretch_rate(1.0 + l, l) / (1.0 + l);
    assert!((kappa(1.0 + l, l) - want).abs() < 1e-8);
}

#[test]
fn finite_ladder_below_limit() {
    let ev = EntropyEvaluator::new(vec![8, 16, 32]);
    for &(u, l) in &[(2.0, 0.0), (3.0, 0.5), (4.0, 1.0)] {
        let vals = ev.ladder_values(u, l);
        for w in vals.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-12);
        }
        assert!(vals.iter().all(|&(_, k)| k <= kappa(u, l)));
    }
}

proptest! {
    #[test]
    fn bounded_by_log_three(l in -4.0f64..4.0, du in 0.0f64..30.0) {
        let k = kappa(1.0 + l.abs() + du, l);
        prop_assert!((0.0..=3f64.ln()).contains(&k));
    }

    #[test]
    fn u_kappa_strictly_concave(l in 0.0f64..3.0, a in 0.01f64..8.0, gap in 0.05f64..4.0) {
        let u1 = 1.0 + l + a;
        let u2 = u1 + gap;
        let mid = u_kappa(0.5 * (u1 + u2), l);
        let chord = 0.5 * (u_kappa(u1, l) + u_kappa(u2, l));
        prop_assert!(mid - chord > 1e-10, "margin {}", mid - chord);
    }

    #[test]
    fn decreasing_in_slope(u in 1.5f64..10.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (l1, l2) = ((u - 1.0) * a.min(b), (u - 1.0) * a.max(b));
        prop_assume!(l2 - l1 > 1e-6);
        prop_assert!(kappa(u, l1) > kappa(u, l2));
    }

    #[test]
    fn derivative_matches_differences(l in 0.0f64..3.0, a in 0.05f64..10.0) {
        let v = 1.0 + l + a;
        let h = 1e-5 * a.min(1.0);
        let fd = (u_kappa(v + h, l) - u_kappa(v - h, l)) / (2.0 * h);
        let d = kappa_derivative(v, l).unwrap();
        prop_assert!((d - fd).abs() <= 1e-6 * d.abs().max(1e-3), "{} vs {}", d, fd);
    }

    #[test]
    fn inverse_round_trip(l in 0.0f64..3.0, a in 1e-3f64..20.0) {
        let v = 1.0 + l + a;
        let c = kappa_derivative(v, l).unwrap();
        prop_assert!((chi_inverse(c, l) - v).abs() <= 1e-8 * v);
    }

    #[test]
    fn vanishes_at_large_speed(l in -5.0f64..5.0) {
        prop_assert!(kappa(1e6, l) < 1e-4);
    }
}
