#![allow(clippy::approx_constant, clippy::excessive_precision)]

use shav_lab::special::*;
use std::f64::consts::PI;

// (1/π)∫H^{n+1}/(n+1)! at 30 digits, computed independently with mpmath besselk
const RATIO_1: f64 = 0.392_699_081_698_724_15;
const RATIO_2: f64 = 0.368_646_498_092_798_12;
const RATIO_10: f64 = 0.357_439_195_456_941_13;
const RATIO_20: f64 = 0.357_436_208_708_149_69;
const RATIO_40: f64 = 0.357_436_208_621_970_21;
// 2∫₀^∞ v₁(x)(1+x²)^{-1/2} and 2∫₀^∞ v₁², same tool
const T2: f64 = 17.695_031_908_454_31;
const T3: f64 = 138.738_997_300_255_1;

#[test]
fn kernel_methods_agree_on_log_grid() {
    let tol = 1e-10;
    let evals: Vec<_> = [KernelMethod::AlternatingSeries, KernelMethod::WatsonSeries, KernelMethod::ExpIntegral]
        .into_iter()
        .map(KernelEvaluator::new)
        .collect();
    for i in 0..100 {
        let y = (1e-4f64.ln() + (50f64.ln() - 1e-4f64.ln()) * i as f64 / 99.0).exp();
        let vals: Vec<f64> = evals.iter().map(|e| e.eval(y).unwrap()).collect();
        for a in 0..3 {
            for b in a + 1..3 {
                assert!((vals[a] - vals[b]).abs() <= 2.0 * tol, "y={y}: {vals:?}");
            }
        }
    }
}

#[test]
fn kernel_asymptotics() {
    for &y in &[1e-3, 1e-5, 1e-8] {
        let r = h(y).unwrap() + (y / 2.0).ln() + EULER_GAMMA;
        assert!(r.abs() < 2.0 * y * y * (1.0 - y.ln()), "y={y} r={r}");
    }
    for i in 0..50 {
        let y = 1.0 + i as f64 * 2.0;
        assert!(h(y).unwrap().abs() <= 2f64.sqrt() * PI / y);
    }
    assert!(matches!(h(0.0), Err(SpecialError::DomainError(_))));
}

#[test]
fn h_bounds_exhibit_epsilon() {
    let rep = verify_h_bounds().unwrap();
    assert!(rep.epsilon > 0.0 && rep.epsilon <= 2.0 * (-EULER_GAMMA).exp());
    let y = 0.1;
    assert!(h(y).unwrap() <= -(y / 4.0).ln());
    let y = 0.5 * rep.epsilon;
    assert!(h(y).unwrap() >= -(y / rep.epsilon).ln());
}

#[test]
fn v1_shape() {
    assert!((v1(0.0) - PI).abs() < 1e-8);
    assert!((v1(5.0) - v1(-5.0)).abs() < 1e-10);
    let mut prev = v1(0.0);
    for i in 1..400 {
        let t = i as f64 * 0.25;
        let cur = v1(t);
        assert!(cur > 0.0 && cur < prev && cur <= PI);
        prev = cur;
    }
    for &t in &[0.0, 0.3, 1.0, 4.0, 17.0, 120.0] {
        assert!((v1(t) - v1_quadrature(t)).abs() < 1e-9 * v1(t).max(1e-3), "t={t}");
    }
    for &t in &[0.5, 2.0, 6.0] {
        assert!((v1(t) - v1_fourier(t)).abs() < 1e-6, "t={t}");
    }
}

#[test]
fn v_transform() {
    assert!((v(1.0).unwrap() - PI).abs() < 1e-14);
    let mut prev = PI;
    for i in 1..50 {
        let cur = v(1.0 + i as f64).unwrap();
        assert!(cur < prev);
        prev = cur;
    }
    assert!((v_of_lengths(0.2f64.ln(), 0.2f64.ln()) - PI).abs() < 1e-14);
}

#[test]
fn sl2_bound_and_ratios() {
    let grid: Vec<f64> = (1..=200).map(|i| 0.05 * i as f64 * (1.0 + i as f64 / 20.0)).collect();
    let rep = verify_sl2(&grid).unwrap();
    assert!(rep.max_bound_ratio <= 1.0);
    assert!(v1_prime(1.0) < 0.0);
    assert!(v1_prime(10.0).abs() <= 0.4 * v1(10.0));
    let (_, _, r) = rep.ratios.iter().find(|(t, r, _)| *t == 200.0 && *r == 1.0).unwrap();
    assert!((r - 1.0).abs() < 0.02);
    // quadrature derivative against a central difference of the closed form
    for &t in &[0.5, 3.0, 30.0] {
        let fd = (v1(t + 1e-5) - v1(t - 1e-5)) / 2e-5;
        assert!((fd - v1_prime(t)).abs() < 1e-7, "t={t}");
    }
}

#[test]
fn t_n_against_frozen_values() {
    for (n, want) in [(1, RATIO_1), (2, RATIO_2), (10, RATIO_10), (20, RATIO_20), (40, RATIO_40)] {
        let got = t_ratio(n);
        assert!(((got - want) / want).abs() < 1e-6, "n={n}: {got} vs {want}");
    }
    assert!((t_n(1) - PI).abs() < 1e-6 * PI);
    assert!(((t_n(2) - T2) / T2).abs() < 1e-6);
    assert!(((t_n(3) - T3) / T3).abs() < 1e-6);
    assert!((t_convolution_oracle(2).unwrap() - T2).abs() < 1e-6 * T2);
    assert!((t_convolution_oracle(3).unwrap() - T3).abs() < 1e-6 * T3);
}

#[test]
fn t_ratio_bracket_and_limit() {
    let rows = t_table(20);
    let last = rows.last().unwrap();
    assert!(last.c1_running > 0.0 && last.c1_running <= last.c2_running);
    assert!(rows.iter().all(|r| r.ratio >= last.c1_running && r.ratio <= last.c2_running));
    assert!((last.ratio - t_ratio_limit()).abs() <= 1e-3);
    assert!((t_ratio_limit() - 0.35743).abs() < 1e-5);
}

#[test]
fn sl4_holds_on_grid() {
    for eps in [0.1, 0.25] {
        let rep = verify_sl4(eps, 20).unwrap();
        assert!(rep.big_r > rep.r);
        assert!(rep.c_star >= 2.0);
        assert!(rep.max_lhs_over_rhs <= 1.0);
    }
}
