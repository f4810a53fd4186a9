//! The smooth re-embedding θ_f of F and the condition (b) witnesses.

use shav_lab::embed::*;
use shav_lab::exact::*;

fn main() {
    let f = default_generator();
    println!("fixed point z = {:?}, C = log f'(z) = {:?}", f.z(), f.c());
    let h = x0().compose(&x1().inverse());
    let th = theta_f(&h, &f);
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!("theta_f(x0 x1^-1)({t:.2}) = {:.12}, derivative {:.9}", th.eval(t), th.deriv(t));
    }
    let (a, b) = (x0(), x1());
    let (ta, tb, tab) = (theta_f(&a, &f), theta_f(&b, &f), theta_f(&a.compose(&b), &f));
    let err = (0..=1000).map(|i| i as f64 / 1000.0).map(|t| (tab.eval(t) - ta.eval(tb.eval(t))).abs()).fold(0.0, f64::max);
    println!("homomorphism sup error on x0, x1: {err:.2e}");
    for (word, name) in [(x0(), "x0"), (x1(), "x1"), (h, "x0 x1^-1")] {
        let w = verify_condition_b(&word, name, &f).expect("non-identity element");
        println!("condition (b) for {name}: |log derivative| {:.6} at t* = {:.6} (C = {:.6})", w.value, w.t_star, w.c);
    }
}
