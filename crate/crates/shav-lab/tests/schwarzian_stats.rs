use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shav_lab::holder::SampledDiffeo;
use shav_lab::partitions::Partition;
use shav_lab::schwarzian::*;
use shav_lab::wiener::{c4, m1_lower_bound, RngConfig};
use std::f64::consts::PI;

fn sine() -> SmoothTestMap {
    SmoothTestMap::sine(0.25)
}

#[test]
fn schwarzian_examples() {
    for g in [SmoothTestMap::Affine { slope: 3.0, shift: -1.0 }, SmoothTestMap::Mobius { c: 0.7 }, SmoothTestMap::Mobius { c: -0.4 }] {
        for i in 0..=100 {
            assert!(schwarzian(&g, i as f64 / 100.0).abs() < 1e-12);
        }
    }
    let g = sine();
    let exact = -PI * PI / 1.25;
    assert!((schwarzian(&g, 0.25) - exact).abs() < 1e-12);
    // five-point differences of g itself
    let h = 1e-3;
    let f = |t: f64| g.eval(t);
    let d1 = (f(0.25 - 2.0 * h) - 8.0 * f(0.25 - h) + 8.0 * f(0.25 + h) - f(0.25 + 2.0 * h)) / (12.0 * h);
    let d2 = (-f(0.25 - 2.0 * h) + 16.0 * f(0.25 - h) - 30.0 * f(0.25) + 16.0 * f(0.25 + h) - f(0.25 + 2.0 * h)) / (12.0 * h * h);
    let d3 = (f(0.25 - 3.0 * h) - 8.0 * f(0.25 - 2.0 * h) + 13.0 * f(0.25 - h) - 13.0 * f(0.25 + h) + 8.0 * f(0.25 + 2.0 * h) - f(0.25 + 3.0 * h)) / (8.0 * h * h * h);
    let fd = d3 / d1 - 1.5 * (d2 / d1).powi(2);
    assert!((fd - schwarzian(&g, 0.25)).abs() < 1e-6 * exact.abs(), "{fd}");
    for i in 0..=1000 {
        let t = i as f64 / 1000.0;
        assert!((schwarzian(&g, t) - schwarzian_alt(&g, t)).abs() < 1e-9);
    }
}

#[test]
fn family_fixes_endpoints() {
    assert!(sine().fixes_endpoints_to_first_order());
    assert!(SmoothTestMap::identity().fixes_endpoints_to_first_order());
    assert!(!SmoothTestMap::Mobius { c: 0.5 }.fixes_endpoints_to_first_order());
    for i in 0..=1000 {
        let t = i as f64 / 1000.0;
        assert!(sine().d1(t) > 0.0);
        assert!((sine().eval(t) - (t + 0.25 / (2.0 * PI) * (1.0 - (2.0 * PI * t).cos()))).abs() < 1e-15);
    }
}

#[test]
fn constants() {
    assert_eq!(c_g(&SmoothTestMap::identity()), 1.0);
    let g = sine();
    let cg = c_g(&g);
    for i in 0..=10_000 {
        assert!(schwarzian(&g, i as f64 / 10_000.0).abs() < 1.5 * cg);
    }
    // grid maximum is approached from below
    let coarse = 1.0 + (0..=100).map(|i| {
        let t = i as f64 / 100.0;
        let r = g.log_deriv_slope(t);
        r.abs() + r * r + (g.d3(t) / g.d1(t)).abs()
    }).fold(0.0, f64::max);
    assert!(cg >= coarse);
    assert!((c_ratio(&g) - 2.0 * PI * 0.25 / 0.75).abs() < 1e-9);
    assert!(c4(m1_lower_bound(), 0.0, 0.0) >= 1.77);
    assert!(c4(1.08, 1.54, 1.16) >= 2.0);
}

#[test]
fn f_terms_special_cases() {
    let x = Partition::uniform(16);
    let ident: Vec<SampledDiffeo> = (0..16).map(|_| SampledDiffeo::identity(64)).collect();
    let zero = f1_f2_sample(&SmoothTestMap::identity(), &x, &ident);
    assert!(zero.x.iter().chain(&zero.y).all(|v| *v == 0.0));
    let g = sine();
    let t = f1_f2_sample(&g, &x, &ident);
    let pts: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
    for k in 0..16 {
        let expect = (pts[k + 1] - pts[k]) * (g.log_deriv_slope(pts[k]) - g.log_deriv_slope(pts[k + 1]));
        assert!((t.x[k] - expect).abs() < 1e-14);
    }
    // equal lengths telescope to l (g″/g′(0) − g″/g′(1)) = 0
    assert!(t.f1.abs() < 1e-13);
    // identity pieces: Y_k = l_k ∫ S_g over the interval
    let rule = 2000;
    for k in [0, 5, 11] {
        let integral: f64 = (0..rule).map(|i| schwarzian(&g, pts[k] + (i as f64 + 0.5) / rule as f64 / 16.0)).sum::<f64>() / rule as f64;
        assert!((t.y[k] - integral / 256.0).abs() < 1e-7);
    }
}

#[test]
fn sl8_concentration() {
    let g = sine();
    let r = check_sl8(&g, 1.0 / 64.0, &Partition::uniform(64), 2000, 128, &RngConfig::new(8)).unwrap();
    assert!(r.passed, "{r:#?}");
    assert!(r.frequency * 10.0 <= r.bound);
    assert!(r.c4 >= 2.0);
    let id = check_sl8(&SmoothTestMap::identity(), 1.0 / 64.0, &Partition::uniform(64), 200, 64, &RngConfig::new(9)).unwrap();
    assert_eq!(id.frequency, 0.0);
    assert_eq!(id.f1_var, 0.0);
    let loose = check_sl8(&g, 0.99, &Partition::uniform(2), 200, 64, &RngConfig::new(10)).unwrap();
    assert!(loose.bound > 1.0 && loose.passed);
    assert!(matches!(check_sl8(&g, 0.01, &Partition::uniform(64), 10, 64, &RngConfig::new(1)), Err(SchwarzianError::MeshTooLarge { .. })));
}

#[test]
fn r_ratio_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let consts = SL9Constants::new(&sine(), 0.5);
    for _ in 0..10_000 {
        let a = rng.random_range(1e-6..consts.delta1);
        let b = rng.random_range(1e-6..consts.delta1);
        let big_a = rng.random_range(-consts.c / 2.0..consts.c / 2.0);
        let big_b = rng.random_range(-consts.c / 2.0..consts.c / 2.0);
        let direct = r_ratio_direct(a, b, a * (1.0 + big_a * a), b * (1.0 + big_b * b));
        assert!((direct - r_ratio_closed_form(a, b, big_a, big_b)).abs() < 1e-12);
    }
}

#[test]
fn tau_plus_beta_identity() {
    for i in 0..=200 {
        let t = 4.5 + 95.5 * i as f64 / 200.0;
        for j in -10..=10 {
            let alpha = j as f64 / 800.0;
            let lhs = (t * (1.0 + alpha)).acosh();
            let rhs = t.acosh() + beta_closed_form(alpha, t.ln());
            assert!((lhs - rhs).abs() < 1e-10);
            assert!((tau_of_log(t.ln()) - t.acosh()).abs() < 1e-12);
        }
    }
}

#[test]
fn log_space_terms_match_direct_evaluation() {
    let g = sine();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let n = rng.random_range(2..12);
        let mut x: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.01..0.99)).collect();
        x.sort_by(f64::total_cmp);
        let Ok(p) = Partition::from_points(&x) else { continue };
        let mut pts = vec![0.0];
        pts.extend(&x);
        pts.push(1.0);
        let gl: Vec<f64> = pts.windows(2).map(|w| g.eval(w[1]) - g.eval(w[0])).collect();
        let l: Vec<f64> = pts.windows(2).map(|w| w[1] - w[0]).collect();
        for t in ratio_terms(&g, &p) {
            let (k, kb) = (t.k - 1, (t.k + n - 2) % n);
            let direct = r_ratio_direct(l[k], l[kb], gl[k], gl[kb]).ln();
            // the direct g-lengths lose ~1e-16 absolute
            let tol = 1e-13 + 4e-16 / l[k].min(l[kb]);
            assert!((t.log_ratio - direct).abs() < tol, "{} {direct} {t:?}", t.log_ratio);
            assert!((r_ratio_closed_form(l[k], l[kb], t.big_a, t.big_b).ln() - direct).abs() < tol);
            let r = (l[k] + l[kb]) / (2.0 * (l[k] * l[kb]).sqrt());
            assert!((t.log_r - r.ln()).abs() < 1e-12);
        }
    }
}

#[test]
fn sl9_identity_is_exact() {
    let consts = SL9Constants::new(&sine(), 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = random_admissible_partition(consts.delta1, 1000f64.ln(), &mut rng);
    let r = check_sl9(&SmoothTestMap::identity(), &x, &consts);
    assert_eq!(r.product_minus_one, 0.0);
    let x = extreme_partition(5, consts.log_r).unwrap();
    assert_eq!(check_sl9(&SmoothTestMap::identity(), &x, &consts).product_minus_one, 0.0);
}

#[test]
fn sl9_extreme_three_interval_partition() {
    let g = sine();
    let consts = SL9Constants::new(&g, 0.5);
    assert!((consts.log_r - 8000.0 * (consts.c + 1.0) / 0.5).abs() < 1e-9);
    let x = extreme_partition(3, consts.log_r).unwrap();
    let r = check_sl9(&g, &x, &consts);
    assert!(r.min_r_ok && r.holds, "{r:#?}");
    assert!(!r.mesh_ok);
    assert!(r.alpha_ok && r.beta_ok && r.omega_ok && r.sigma_ok);
    assert!(matches!(extreme_partition(3, 1e300), Err(SchwarzianError::ConstructionImpossible { .. })));
}

#[test]
fn sl9_moderate_r_per_k_bound() {
    let g = sine();
    let consts = SL9Constants::new(&g, 0.5);
    let log_r = 1000f64.ln();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let x = random_admissible_partition(consts.delta1, log_r, &mut rng);
        assert!(x.mesh() < consts.delta1);
        let b = per_k_bound(&g, &x, consts.c, log_r);
        assert!(b.worst_ratio <= 1.0 && b.worst_v_ratio <= 1.0);
        let terms = ratio_terms(&g, &x);
        assert!(terms.iter().all(|t| t.log_r > log_r));
        assert!(terms.iter().all(|t| t.lambda.abs() < 2.5 * consts.c));
    }
}

#[test]
fn log_estimates() {
    let rows = log_estimates_check().unwrap();
    assert_eq!(rows.len(), 3);
    assert!((0.5f64.ln_1p() - 0.405).abs() < 1e-3);
    assert!(1f64.exp_m1() <= 2.0);
    assert!(rows.iter().all(|r| r.holds && r.worst_quotient <= 1.0));
}

proptest! {
    #[test]
    fn schwarzian_forms_agree(a in -0.9f64..0.9, t in 0.0f64..1.0) {
        let g = SmoothTestMap::sine(a);
        prop_assert!((schwarzian(&g, t) - schwarzian_alt(&g, t)).abs() < 1e-9);
        prop_assert!(schwarzian(&g, t).abs() <= 1.5 * c_g(&g));
    }
}
