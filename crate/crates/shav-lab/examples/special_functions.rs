//! The kernel H, the function v₁, the integrals T_n, and the S-L4 inequality.

use shav_lab::special::*;

fn main() {
    for y in [0.01, 0.1, 1.0, 10.0] {
        println!("H({y}) = {:.12}", h(y).expect("positive argument"));
    }
    for tau in [0.0, 0.5, 2.0, 10.0] {
        println!("v1({tau}) = {:.12}, v1'({tau}) = {:.6e}", v1(tau), v1_prime(tau));
    }
    for row in t_table(20).iter().step_by(4) {
        println!("n {:>2}: T_n = {:.6e}, T_n/(2^(n+1)(n+1)!) = {:.8}", row.n, row.t_n, row.ratio);
    }
    println!("limit 2e^(-gamma)/pi = {:.8}", t_ratio_limit());
    let b = verify_h_bounds().expect("bounds");
    println!("H sandwich holds with epsilon = {:.6}", b.epsilon);
    for eps in [0.1, 0.25] {
        let r = verify_sl4(eps, 20).expect("grid check");
        println!("S-L4 eps {eps}: c3 = {:.4}, max lhs/rhs = {:.4} over {} nodes", r.c3, r.max_lhs_over_rhs, r.points);
    }
}
