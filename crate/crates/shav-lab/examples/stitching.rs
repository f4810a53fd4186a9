//! Stitching diffeomorphisms over a partition, the functionals L_δ,n, and the paired S-3 experiment.

use shav_lab::embed::default_generator;
use shav_lab::holder::{GroupBall, SampledDiffeo};
use shav_lab::partitions::Partition;
use shav_lab::schwarzian::SmoothTestMap;
use shav_lab::stitch::*;
use std::f64::consts::E;

fn main() {
    let half = Partition::from_points(&[0.5]).expect("interior point");
    let expo = SampledDiffeo::from_fn(64, |t| t.exp_m1() / (E - 1.0), |t| t.exp() / (E - 1.0)).expect("diffeomorphism");
    let q = stitch(&half, &[SampledDiffeo::identity(64), expo]);
    println!("domain knot {:.10} (closed form (e-1)/e = {:.10}), knot mismatch {:.1e}", q.x.points()[0], (E - 1.0) / E, q.knot_mismatch());

    let mut cfg = StitchConfig::new(42, 2560);
    cfg.chain.chains = 32;
    let f = Functional::SupDistance { scale: 10.0 };
    let l = l_delta_n(&f, 4, &cfg).expect("chains");
    println!("L_delta,4(min(1, 10 ||f - id||)) = {:.4} +- {:.4}", l.mean, l.stderr);
    let t = check_s3(&Functional::Midpoint, &SmoothTestMap::sine(0.25), &[2, 4, 8], &cfg).expect("chains");
    print!("{}", s3_csv(&t, &cfg));

    let gen = default_generator();
    let ball = GroupBall::new(4, &gen);
    let mut small = StitchConfig::new(3, 16);
    small.chain.chains = 4;
    small.chain.samples = 4;
    small.path_grid = 128;
    match mean_on_group(|h| h.is_identity() as u8 as f64, &ball, 2, &small) {
        Ok(e) => println!("L(pi_delta 1_id) = {:.4} +- {:.4}", e.mean, e.stderr),
        Err(e) => println!("mean on group: {e}"),
    }
}
