//! Normal forms in GA(Q₂) and the log-slope separation of elements of F.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shav_lab::exact::*;

fn main() {
    let word = [Letter::D, Letter::T, Letter::DInv, Letter::T, Letter::D];
    let nf = bs_reduce(&word);
    let map = evaluate_word(&word);
    println!("word {word:?}");
    println!("normal form {nf}, map x -> 2^{} x + {}", map.log2_slope, map.offset);
    assert_eq!(nf.to_affine(), map);

    let (a, b) = (x0(), x1());
    let c = a.compose(&b).compose(&a.inverse());
    println!("x0 x1 x0^-1 breakpoints: {}", c.breakpoints().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", "));
    println!("log2 slope separation x0 vs x1: {}", log_slope_separation(&a, &b));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut min_sep = i64::MAX;
    for _ in 0..200 {
        let (p, q) = (f_word_to_pl(&random_f_word(&mut rng, 8)), f_word_to_pl(&random_f_word(&mut rng, 8)));
        if p != q {
            min_sep = min_sep.min(log_slope_separation(&p, &q));
        }
    }
    println!("minimum separation over 200 random distinct pairs: {min_sep}");
    println!("ball of radius 3 in F has {} elements", f_ball(3).len());
}
