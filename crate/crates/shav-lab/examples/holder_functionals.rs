//! Hölder norms, the functional p_δ, its minimum r_δ over a ball of F, and the averaging π_δ.

use shav_lab::embed::{default_generator, theta_f};
use shav_lab::exact::{f_word_to_pl, FLetter, PLMap};
use shav_lab::holder::*;

fn main() {
    let delta = 1.0 / 3.0;
    let f = TrigDiffeo::new(vec![0.4, -0.2, 0.1]).sample(256);
    println!("||f||_(1,delta) = {:.6}, p_delta(f) = {:.6}", norm_1_delta(&f, delta), p_delta(&f, delta));

    for r in discontinuity_demo(&[0.1, 0.01, 0.001], 2000) {
        println!("eps {:.0e}: ||f_eps||_1,delta {:.2e}, chord {:.6}", r.eps, r.norm_f, r.chord);
    }

    let gen = default_generator();
    let ball = GroupBall::new(4, &gen);
    let g = f_word_to_pl(&[FLetter::X0, FLetter::X1Inv]);
    let image = SampledDiffeo::from_homeo(&theta_f(&g, &gen), 128);
    let r = r_delta(&image, &ball, delta).expect("ball is large enough");
    println!("ball radius 4 with {} elements; r_delta = {:.3e} attained by word length {}", ball.words.len(), r.value, r.word_len);
    let big_f = |h: &PLMap| h.breakpoints().len() as f64;
    match pi_delta(big_f, &image, &ball, delta) {
        Ok(p) => println!("pi_delta(number of breakpoints) = {:.6} over {} active elements", p.value, p.active.len()),
        Err(e) => println!("pi_delta: {e}"),
    }
}
