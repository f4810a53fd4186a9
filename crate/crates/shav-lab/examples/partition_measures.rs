//! The density u_n on partitions, its normalizer J_n, and the restricted masses of S-L5 and S-L6.

use shav_lab::partitions::*;
use shav_lab::wiener::RngConfig;

fn main() {
    let x = Partition::from_points(&[0.1, 0.3, 0.35, 0.9]).expect("increasing points");
    println!("u_1,n at (0.1, 0.3, 0.35, 0.9) = {:.10e}", u1n(&x));
    for n in 1..=6 {
        println!("J_{n} = {:.6e}, J_n/(2^(3n-1)(2n)!) = {:.6}", jn(n), jn_ratio(n));
    }
    let mc = jn_direct_mc(2, 1_000_000, &RngConfig::new(1));
    println!("J_2 by importance sampling: {:.6} +- {:.6}", mc.jn.mean, mc.jn.stderr);

    let cfg = ChainConfig::new(7);
    let s = sample_un(4, &cfg).expect("chain mixes");
    let (mesh, ess) = s.estimate(|p| p.mesh());
    println!("n = 4: E[mesh] = {:.4} +- {:.4} (ess {ess:.0}), dilation acceptance {:.2}", mesh.mean, mesh.stderr, s.dilation_acceptance());
    let t = check_sl6(&[4, 8, 16], 1.05, &cfg).expect("chains");
    print!("{}", mass_table_csv(&t, &cfg));
}
