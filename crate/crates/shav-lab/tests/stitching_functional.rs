use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shav_lab::embed::default_generator;
use shav_lab::holder::{GroupBall, HolderError, SampledDiffeo};
use shav_lab::partitions::Partition;
use shav_lab::schwarzian::SmoothTestMap;
use shav_lab::stitch::*;
use shav_lab::wiener::{map_b, sample_path};
use std::f64::consts::E;

fn random_phis(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<SampledDiffeo> {
    (0..n).map(|_| map_b(&sample_path(m, rng).to_grid())).collect()
}

fn small_config(seed: u64) -> StitchConfig {
    let mut cfg = StitchConfig::new(seed, 1280);
    cfg.chain.chains = 16;
    cfg.chain.samples = 80;
    cfg
}

#[test]
fn stitch_examples() {
    let half = Partition::from_points(&[0.5]).unwrap();
    let id = SampledDiffeo::identity(64);
    let q = stitch(&half, &[id.clone(), id.clone()]);
    assert!((q.x.points()[0] - 0.5).abs() < 1e-15);
    for i in 0..=100 {
        let t = i as f64 / 100.0;
        assert!((q.eval(t) - t).abs() < 1e-15);
    }
    let expo = SampledDiffeo::from_fn(64, |t| t.exp_m1() / (E - 1.0), |t| t.exp() / (E - 1.0)).unwrap();
    let q = stitch(&half, &[id, expo]);
    assert!((q.x.points()[0] - (E - 1.0) / E).abs() < 1e-12);
    assert!(q.knot_mismatch() < 1e-12);
    // a common φ with unit end slopes forces x = y
    let g = SmoothTestMap::sine(0.3);
    let phi = SampledDiffeo::from_fn(64, |t| g.eval(t), |t| g.d1(t)).unwrap();
    let y = Partition::from_points(&[0.1, 0.45, 0.5, 0.8]).unwrap();
    let q = stitch(&y, &vec![phi; 5]);
    for (a, b) in q.x.points().iter().zip(y.points()) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn stitching_is_unique_and_c1() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let n = rng.random_range(2..10);
        let log_l: Vec<f64> = (0..n).map(|_| rng.random_range(-40.0..0.0)).collect();
        let y = Partition::from_log_lengths(&log_l);
        let phi = random_phis(n, 64, &mut rng);
        let a = stitch_from(&y, &phi, 0.0);
        let b = stitch_from(&y, &phi, rng.random_range(-50.0..50.0));
        for (p, q) in a.x.points().iter().zip(b.x.points()) {
            assert!((p - q).abs() < 1e-12);
        }
        assert!(a.knot_mismatch() <= 1e-9);
        for (i, &k) in a.x.points().iter().enumerate() {
            let (l, r) = (a.pieces[i].eval(k), a.pieces[i + 1].eval(k));
            assert!((l - r).abs() < 1e-12);
        }
        let v = a.grid_values(512);
        assert!(v.windows(2).all(|w| w[1] >= w[0]));
        assert!(a.to_sampled(128).is_ok());
    }
}

#[test]
fn doubly_exponential_ratios_stay_finite() {
    let y = Partition::from_log_lengths(&[0.0, -5000.0, -12000.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let q = stitch(&y, &random_phis(3, 64, &mut rng));
    assert!(q.x.log_lengths().iter().all(|l| l.is_finite()));
    assert!(q.knot_mismatch() < 1e-9);
    let s = q.to_sampled(256).unwrap();
    assert!(s.derivs().iter().all(|d| d.is_finite() && *d > 0.0));
}

#[test]
fn sampled_interpolation() {
    let g = SmoothTestMap::sine(0.25);
    let s = SampledDiffeo::from_fn(128, |t| g.eval(t), |t| g.d1(t)).unwrap();
    for i in 0..=997 {
        let t = i as f64 / 997.0;
        assert!((s.eval(t) - g.eval(t)).abs() < 1e-7);
        assert!((s.deriv_at(t) - g.d1(t)).abs() < 1e-3);
        assert!((g.eval(g.inverse(t)) - t).abs() < 1e-15);
    }
}

#[test]
fn functional_library() {
    let id: Vec<f64> = (0..=1024).map(|i| i as f64 / 1024.0).collect();
    let g = SmoothTestMap::sine(0.25);
    assert_eq!(Functional::SupDistance { scale: 10.0 }.apply(&id), 0.0);
    assert_eq!(Functional::Midpoint.apply(&id), 0.5);
    let gv: Vec<f64> = id.iter().map(|&t| g.eval(t)).collect();
    // F_g(g) = F(id)
    assert!(Functional::SupDistance { scale: 10.0 }.apply_pulled(&g, &gv) < 1e-14);
    assert!((Functional::SupDistance { scale: 1.0 }.apply(&gv) - 0.25 / std::f64::consts::PI).abs() < 1e-12);
    let f = Functional::Midpoint;
    assert_eq!(f.apply_pulled(&SmoothTestMap::identity(), &gv), f.apply(&gv));
}

#[test]
fn l_delta_n_basic_cases() {
    let cfg = small_config(3);
    let one = l_delta_n(&Functional::Constant(1.0), 4, &cfg).unwrap();
    assert_eq!((one.mean, one.stderr), (1.0, 0.0));
    let c = l_delta_n(&Functional::Constant(0.7), 4, &cfg).unwrap();
    assert!((c.mean - 0.7).abs() < 1e-15 && c.stderr < 1e-15);
    let f = Functional::SupDistance { scale: 10.0 };
    let e = l_delta_n(&f, 4, &cfg).unwrap();
    assert!(e.mean >= 0.0 && e.mean <= f.bound() && e.stderr > 0.0);
}

#[test]
fn linear_and_positive_on_fixed_samples() {
    let cfg = small_config(4);
    let (f1, f2) = (Functional::SupDistance { scale: 10.0 }, Functional::Midpoint);
    let (a, b) = (0.3, -2.0);
    let vals = stitched_statistics(3, &cfg, |q| {
        let v = q.grid_values(cfg.eval_grid);
        (f1.apply(&v), f2.apply(&v))
    })
    .unwrap();
    let part = |sel: &dyn Fn(&(f64, f64)) -> f64| chain_estimate(&vals.iter().map(|c| c.iter().map(sel).collect()).collect::<Vec<_>>()).mean;
    let (l1, l2, l12) = (part(&|p| p.0), part(&|p| p.1), part(&|p| a * p.0 + b * p.1));
    assert!((l12 - (a * l1 + b * l2)).abs() < 1e-12);
    assert!(l1 >= 0.0 && l2 >= 0.0);
    assert!((l1 - l_delta_n(&f1, 3, &cfg).unwrap().mean).abs() < 1e-15);
}

#[test]
fn s3_trivial_cases() {
    let cfg = small_config(5);
    let t = check_s3(&Functional::Midpoint, &SmoothTestMap::identity(), &[2, 4], &cfg).unwrap();
    assert!(t.rows.iter().all(|r| r.paired_diff == 0.0 && r.stderr == 0.0));
    assert!(t.indistinguishable_at_largest && t.passed);
    let t = check_s3(&Functional::Constant(0.4), &SmoothTestMap::sine(0.25), &[2, 4], &cfg).unwrap();
    assert!(t.rows.iter().all(|r| r.paired_diff == 0.0 && (r.estimate_f - 0.4).abs() < 1e-15));
    let csv = s3_csv(&t, &cfg);
    assert!(csv.starts_with("# {") && csv.lines().nth(1) == Some("n,estimate_F,estimate_Fg,paired_diff,stderr"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn s3_pairing_shrinks_the_error() {
    let cfg = small_config(6);
    let f = Functional::Midpoint;
    let g = SmoothTestMap::sine(0.25);
    let t = check_s3(&f, &g, &[2], &cfg).unwrap();
    let plain = l_delta_n(&f, 2, &cfg).unwrap();
    assert!(t.rows[0].stderr * 5.0 < plain.stderr);
    // g pushes 1/2 up, so the pulled-back midpoint drops
    assert!(t.rows[0].paired_diff < -10.0 * t.rows[0].stderr);
}

#[test]
fn mean_on_group_cases() {
    let gen = default_generator();
    let ball = GroupBall::new(4, &gen);
    let mut cfg = StitchConfig::new(3, 16);
    cfg.chain.chains = 4;
    cfg.chain.samples = 4;
    cfg.path_grid = 128;
    let one = mean_on_group(|_| 1.0, &ball, 2, &cfg).unwrap();
    assert!((one.mean - 1.0).abs() < 1e-12);
    let ind = mean_on_group(|h| h.is_identity() as u8 as f64, &ball, 2, &cfg).unwrap();
    assert!((0.0..=1.0).contains(&ind.mean));
    let empty = GroupBall::from_elements(0, vec![], vec![], &gen);
    assert!(matches!(mean_on_group(|_| 1.0, &empty, 2, &cfg), Err(MeanError::Holder(HolderError::BallTooSmall { .. }))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn stitched_map_fixes_endpoints(log_l in prop::collection::vec(-300.0f64..0.0, 2..8), seed in 0u64..1000) {
        let y = Partition::from_log_lengths(&log_l);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = stitch(&y, &random_phis(log_l.len(), 32, &mut rng));
        prop_assert!(q.eval(0.0).abs() < 1e-15);
        prop_assert!((q.eval(1.0) - 1.0).abs() < 1e-15);
        prop_assert!((q.x.lengths().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let ys = y.points();
        for (i, &k) in q.x.points().iter().enumerate() {
            prop_assert!((q.eval(k) - ys[i]).abs() < 1e-12);
        }
    }
}
