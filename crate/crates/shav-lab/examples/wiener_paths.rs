//! Brownian paths, the maps A and B to diffeomorphisms, and moment estimates under ν.

use shav_lab::holder::norm_1_delta;
use shav_lab::wiener::*;

fn main() {
    let cfg = RngConfig::new(3);
    let path = sample_paths(512, 1, &cfg).pop().expect("one path").to_grid();
    let q = map_b(&path);
    println!("q = B(x): q'(0) = {:.6}, q'(1) = {:.6}, ||q||_1,1/3 = {:.6}", q.derivs()[0], q.derivs()[512], norm_1_delta(&q, 1.0 / 3.0));
    let back = map_a(&q);
    let err = back.values.iter().zip(&path.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("A(B(x)) = x to {err:.1e}");
    for (s, l) in [(0.25, 1.0), (1.0, 2.0)] {
        let e = exp_moment(s, l, 200_000, 64, &cfg.derive(1));
        println!("E[exp(-{l} x({s}))] = {:.5} +- {:.5}, exact {:.5}", e.estimate.mean, e.estimate.stderr, e.exact);
    }
    let rep = moment_report(3, 20_000, 512, &cfg.derive(2));
    for r in &rep.rows {
        println!("M_{} = {:.4} +- {:.4} (bound {:.4})", r.l, r.side0.mean, r.side0.stderr, r.upper_bound);
    }
    println!("I = {:.4} +- {:.4}, c4 = {:.4}", rep.energy.mean, rep.energy.stderr, rep.c4);
}
