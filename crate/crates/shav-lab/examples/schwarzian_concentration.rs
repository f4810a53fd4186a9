//! Schwarzian derivatives, the S-L8 concentration experiment, and S-L9 ratio products.

use shav_lab::partitions::Partition;
use shav_lab::schwarzian::*;
use shav_lab::wiener::RngConfig;

fn main() {
    let g = SmoothTestMap::sine(0.25);
    println!("S_g(1/4) = {:.10}, C_g = {:.4}, C = {:.4}", schwarzian(&g, 0.25), c_g(&g), c_ratio(&g));
    let r = check_sl8(&g, 1.0 / 64.0, &Partition::uniform(64), 2000, 128, &RngConfig::new(8)).expect("mesh within eps");
    println!("S-L8: threshold {:.3}, frequency {} vs bound {}, c4 = {:.3}, passed {}", r.threshold, r.frequency, r.bound, r.c4, r.passed);

    let consts = SL9Constants::new(&g, 0.5);
    println!("S-L9: delta1 = {:.3e}, log r = {:.1}", consts.delta1, consts.log_r);
    let x = extreme_partition(3, consts.log_r).expect("representable");
    let rep = check_sl9(&g, &x, &consts);
    println!("three intervals: prod R^g/R - 1 = {:.3e}, holds {}", rep.product_minus_one, rep.holds);
}
