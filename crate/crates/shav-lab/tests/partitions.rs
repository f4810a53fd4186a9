use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shav_lab::partitions::*;
use shav_lab::wiener::RngConfig;
use std::f64::consts::PI;

// u_{1,n} at x = (1e-7, 0.1) and at x = (0.1, 0.3, 0.35, 0.9), 40-digit AGM evaluation
const U_EXTREME: f64 = 672604293.60484950555;
const U_FIVE: f64 = 4758633.0401491304029;

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.001..0.999)).collect();
    x.sort_by(f64::total_cmp);
    x.dedup();
    x
}

fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    d
}

#[test]
fn uniform_partition_coordinates() {
    let t = transforms(&Partition::uniform(4));
    assert!(t.l.iter().all(|l| (l - 0.25).abs() < 1e-15));
    assert!(t.y.iter().all(|y| (y - 1.0).abs() < 1e-15));
    assert!(t.z.iter().all(|z| z.abs() < 1e-15));
}

#[test]
fn b_jacobian_example() {
    let x = Partition::from_points(&[0.2, 0.5]).unwrap();
    let t = transforms(&x);
    assert!((t.jac_b - 8.0).abs() < 1e-12);
    assert_eq!(t.jac_a, 1.0);
    assert_eq!((t.y[0], t.y[3], t.z[0], t.z[3]), (1.0, 1.0, 0.0, 0.0));
    assert!((t.jac_c_inv - 4.0 * t.y[1] * t.y[2]).abs() < 1e-12);
}

#[test]
fn coordinate_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 2..9 {
        for _ in 0..100 {
            let x = random_points(&mut rng, n);
            let p = Partition::from_points(&x).unwrap();
            let t = transforms(&p);
            let back = from_z(&t.z[1..t.z.len() - 1]).points();
            let via_y = points_from_y(&t.y[1..t.y.len() - 1]);
            for i in 0..x.len() {
                assert!((back[i] - x[i]).abs() < 1e-14);
                assert!((via_y[i] - x[i]).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn b_jacobian_by_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [3, 4, 5] {
        for _ in 0..5 {
            let x = random_points(&mut rng, n);
            let y_of = |x: &[f64]| transforms(&Partition::from_points(x).unwrap()).y[1..n].to_vec();
            let h = 1e-6;
            let cols: Vec<Vec<f64>> = (0..n - 1)
                .map(|j| {
                    let (mut a, mut b) = (x.clone(), x.clone());
                    a[j] += h;
                    b[j] -= h;
                    y_of(&a).iter().zip(y_of(&b)).map(|(p, q)| (p - q) / (2.0 * h)).collect()
                })
                .collect();
            let m: Vec<Vec<f64>> = (0..n - 1).map(|i| (0..n - 1).map(|j| cols[j][i]).collect()).collect();
            let exact = (1.0 - x[n - 2]).powi(-(n as i32));
            assert!((det(m) / exact - 1.0).abs() < 1e-5);
            let t = transforms(&Partition::from_points(&x).unwrap());
            assert!((t.jac_b / exact - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn ratio_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let n = rng.random_range(2..10);
        let x = random_points(&mut rng, n);
        for r in same_ratios(&x) {
            assert!((r[0] - r[1]).abs() <= 1e-12 * r[0]);
            assert!((r[0] - r[2]).abs() <= 1e-12 * r[0]);
        }
    }
}

#[test]
fn larger_of_ratio_or_inverse() {
    for i in 1..40 {
        for j in 1..40 {
            let (a, b) = (i as f64 * 0.37, j as f64 * 0.11);
            let t = (a + b) / (2.0 * (a * b).sqrt());
            let lhs = t + (t * t - 1.0).max(0.0).sqrt();
            let rhs = (a.max(b) / a.min(b)).sqrt();
            assert!((lhs - rhs).abs() < 1e-7 * rhs);
        }
    }
}

#[test]
fn small_cases() {
    assert!((u1n(&Partition::uniform(1)) - PI).abs() < 1e-14);
    let half = Partition::from_points(&[0.5]).unwrap();
    assert!(half.ratio_args().iter().all(|&t| t == 0.0));
    assert!((u1n(&half) / (4.0 * PI * PI) - 1.0).abs() < 1e-14);
    assert!((u1n_x_formula(&[0.5]) / (4.0 * PI * PI) - 1.0).abs() < 1e-14);
    assert!((un(&half, jn(2)) - u1n(&half) / jn(2)).abs() < 1e-18);
}

#[test]
fn log_space_matches_direct_and_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let n = rng.random_range(2..7);
        let x = random_points(&mut rng, n);
        let p = Partition::from_points(&x).unwrap();
        assert!((u1n(&p) / u1n_x_formula(&x) - 1.0).abs() < 1e-10);
    }
    let p = Partition::from_points(&[1e-7, 0.1]).unwrap();
    assert!((u1n(&p) / U_EXTREME - 1.0).abs() < 1e-9);
    assert!((u1n_x_formula(&[1e-7, 0.1]) / U_EXTREME - 1.0).abs() < 1e-7);
    let p = Partition::from_points(&[0.1, 0.3, 0.35, 0.9]).unwrap();
    assert!((u1n(&p) / U_FIVE - 1.0).abs() < 1e-12);
    // far beyond f64 range for the direct form
    let q = Partition::from_log_lengths(&[-900.0, 0.0, -3.0]);
    assert!(log_u1n(&q).is_finite() && log_u1n(&q) > 800.0);
}

#[test]
fn jn_increases_and_is_bracketed() {
    let ratios: Vec<f64> = (1..=10).map(jn_ratio).collect();
    for r in &ratios {
        assert!((0.35..=0.4).contains(r), "{r}");
    }
    for n in 1..15 {
        assert!(jn(n + 1) > jn(n));
    }
}

#[test]
fn jn_matches_simplex_monte_carlo() {
    for (n, seed) in [(2, 21), (3, 22)] {
        let run = jn_direct_mc(n, 10_000_000, &RngConfig::new(seed));
        let z = (run.jn.mean - jn(n as u32)) / run.jn.stderr;
        assert!(z.abs() < 3.0, "n={n} z={z}");
    }
}

#[test]
fn conditional_draw_matches_its_density() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (a, b) in [(0.0f64, 0.0f64), (-1.0, 2.5), (3.0, -40.0)] {
        let n = 200_000;
        let (lo, hi) = (a.min(b) - 0.5, a.max(b) + 0.5);
        let inside = (0..n).filter(|_| {
            let t = conditional_draw(a, b, &mut rng).0;
            lo < t && t < hi
        });
        let freq = inside.count() as f64 / n as f64;
        let dens = |t: f64| 1.0 / ((1.0 + (t - a) * (t - a)) * (1.0 + (t - b) * (t - b))).sqrt();
        let total: f64 = shav_lab::special::v1((b - a).abs());
        let m = 20_000;
        let part: f64 = (0..m).map(|i| dens(lo + (i as f64 + 0.5) * (hi - lo) / m as f64)).sum::<f64>() * (hi - lo) / m as f64;
        let p = part / total;
        assert!((freq - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt(), "{a} {b} {freq} {p}");
    }
}

#[test]
fn chain_marginals_agree_with_importance_sampling() {
    let cfg = ChainConfig::new(31);
    let s2 = sample_un(2, &cfg).unwrap();
    let (x1, _) = s2.estimate(|x| x.points()[0]);
    assert!(x1.within(0.5, 3.0), "{x1:?}");
    let (mesh2, _) = s2.estimate(|x| x.mesh());
    let is2 = importance_expectation(2, 1_000_000, &RngConfig::new(32), |x| x.mesh());
    assert!((mesh2.mean - is2.mean).abs() < 3.0 * mesh2.stderr.hypot(is2.stderr));
    let (over, _) = s2.estimate(|x| (x.mesh() > 0.8) as u8 as f64);
    let is_over = importance_expectation(2, 1_000_000, &RngConfig::new(33), |x| (x.mesh() > 0.8) as u8 as f64);
    assert!((over.mean - is_over.mean).abs() < 3.0 * over.stderr.hypot(is_over.stderr), "{over:?} {is_over:?}");
    let s3 = sample_un(3, &cfg).unwrap();
    let (mesh3, ess) = s3.estimate(|x| x.mesh());
    let is3 = importance_expectation(3, 1_000_000, &RngConfig::new(34), |x| x.mesh());
    assert!((mesh3.mean - is3.mean).abs() < 3.0 * mesh3.stderr.hypot(is3.stderr));
    assert!(ess > 1000.0);
    assert!(s3.dilation_acceptance() > 0.3);
}

#[test]
fn chains_are_deterministic() {
    let mut cfg = ChainConfig::new(7);
    cfg.chains = 4;
    cfg.samples = 20;
    let a = sample_un(5, &cfg).unwrap();
    let b = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(|| sample_un(5, &cfg).unwrap());
    assert_eq!(a, b);
}

#[test]
fn trivial_mass_cases() {
    let cfg = ChainConfig::new(1);
    let t = check_sl5(&[4, 8, 16], 1.0, &cfg).unwrap();
    assert!(t.rows.iter().all(|r| r.estimate == 0.0));
    let t = check_sl6(&[4, 8, 16], 1.0, &cfg).unwrap();
    assert!(t.rows.iter().all(|r| r.estimate == 0.0));
    let grid: Vec<f64> = (-100..=100).map(|i| i as f64 * 0.25).collect();
    for a in [0.01, 0.3, 1.0, 3.0] {
        assert!(odd_inequality_max(a, &grid) <= 1.0);
    }
}

#[test]
fn sl6_mass_decreases() {
    let t = check_sl6(&[4, 8, 16], 1.05, &ChainConfig::new(42)).unwrap();
    assert!(t.strictly_decreasing, "{t:?}");
    let csv = mass_table_csv(&t, &ChainConfig::new(42));
    assert!(csv.starts_with("# {") && csv.lines().nth(1) == Some("n,estimate,stderr,ess"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn min_ratio_is_at_least_one(log_l in prop::collection::vec(-30.0f64..30.0, 2..12)) {
        let p = Partition::from_log_lengths(&log_l);
        prop_assert!(p.min_ratio() >= 1.0);
        prop_assert!((p.lengths().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.mesh() <= 1.0 + 1e-15);
    }

    #[test]
    fn split_parts_sum_to_gap(sum in -1e12f64..1e12, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ((p, q), _) = conditional_split(sum, &mut rng);
        prop_assert!((p + q - sum).abs() <= 1e-9 * sum.abs().max(1.0));
    }
}
