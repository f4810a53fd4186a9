//! Exact arithmetic for dyadic rationals, GA(Q₂) with its BS(1,2) normal
//! forms, and the piecewise-linear group PL₂(ℝ) containing Thompson's group F.

mod affine;
mod dyadic;
mod pl;

pub use affine::{affine_to_normal_form, bs_reduce, evaluate_word, AffineMap, BSWord, Letter};
pub use dyadic::Dyadic;
pub use pl::{log_slope_separation, PLError, PLMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

fn dy(n: i64, e: i64) -> Dyadic {
    Dyadic::new(n, e)
}

fn aff(n: i64, num: i64, e: i64) -> AffineMap {
    AffineMap::new(n, dy(num, e))
}

/// The generator `x₀`: slopes 1/2, 1, 2 with breakpoints 1/2 and 3/4,
/// identity outside `[0,1]`.
pub fn x0() -> PLMap {
    PLMap::new(
        vec![dy(0, 0), dy(1, 1), dy(3, 2), dy(1, 0)],
        vec![
            AffineMap::identity(),
            aff(-1, 0, 0),
            aff(0, -1, 2),
            aff(1, -1, 0),
            AffineMap::identity(),
        ],
    )
    .expect("x0 is a valid PL map")
}

/// The generator `x₁`: identity on `[0,1/2]`, a half-scale copy of `x₀` on `[1/2,1]`.
pub fn x1() -> PLMap {
    PLMap::new(
        vec![dy(1, 1), dy(3, 2), dy(7, 3), dy(1, 0)],
        vec![
            AffineMap::identity(),
            aff(-1, 1, 2),
            aff(0, -1, 3),
            aff(1, -1, 0),
            AffineMap::identity(),
        ],
    )
    .expect("x1 is a valid PL map")
}

/// Translation `T_r`.
pub fn translation(r: Dyadic) -> PLMap {
    PLMap::translation(r)
}

/// `D₀`: identity below 0, `2x` on `[0,1]`, `x+1` above 1.
pub fn d0() -> PLMap {
    PLMap::new(
        vec![dy(0, 0), dy(1, 0)],
        vec![AffineMap::identity(), aff(1, 0, 0), aff(0, 1, 0)],
    )
    .expect("D0 is a valid PL map")
}

/// Letters of words in the generators of F.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FLetter {
    X0,
    X0Inv,
    X1,
    X1Inv,
}

impl FLetter {
    pub const ALL: [FLetter; 4] = [FLetter::X0, FLetter::X0Inv, FLetter::X1, FLetter::X1Inv];

    pub fn to_pl(self) -> PLMap {
        match self {
            FLetter::X0 => x0(),
            FLetter::X0Inv => x0().inverse(),
            FLetter::X1 => x1(),
            FLetter::X1Inv => x1().inverse(),
        }
    }

    pub fn inverse(self) -> FLetter {
        match self {
            FLetter::X0 => FLetter::X0Inv,
            FLetter::X0Inv => FLetter::X0,
            FLetter::X1 => FLetter::X1Inv,
            FLetter::X1Inv => FLetter::X1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            FLetter::X0 => "x0",
            FLetter::X0Inv => "x0^-1",
            FLetter::X1 => "x1",
            FLetter::X1Inv => "x1^-1",
        }
    }
}

/// Product of the letters, leftmost applied last.
pub fn f_word_to_pl(word: &[FLetter]) -> PLMap {
    word.iter().fold(PLMap::identity(), |acc, l| acc.compose(&l.to_pl()))
}

pub fn f_word_string(word: &[FLetter]) -> String {
    if word.is_empty() {
        return "id".into();
    }
    word.iter().map(|l| l.symbol()).collect::<Vec<_>>().join(" ")
}

/// A freely reduced random word with length uniform in `1..=max_len`.
pub fn random_f_word<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> Vec<FLetter> {
    let len = rng.random_range(1..=max_len);
    let mut w: Vec<FLetter> = Vec::with_capacity(len);
    while w.len() < len {
        let l = FLetter::ALL[rng.random_range(0..4)];
        if w.last().map(|p| p.inverse()) != Some(l) {
            w.push(l);
        }
    }
    w
}

/// Random word in `t`, `d` and inverses with length in `0..=max_len`.
pub fn random_bs_word<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> Vec<Letter> {
    let len = rng.random_range(0..=max_len);
    let all = [Letter::T, Letter::TInv, Letter::D, Letter::DInv];
    (0..len).map(|_| all[rng.random_range(0..4)]).collect()
}

/// Every element of the word ball of the given radius in `x₀^{±1}`, `x₁^{±1}`,
/// deduplicated, with a shortest word for each. Ordered by word length and
/// then lexicographically.
pub fn f_ball(radius: usize) -> Vec<(Vec<FLetter>, PLMap)> {
    let mut seen = std::collections::HashSet::new();
    let mut out = vec![(vec![], PLMap::identity())];
    seen.insert(PLMap::identity());
    let mut frontier = out.clone();
    for _ in 0..radius {
        let mut next = Vec::new();
        for (w, g) in &frontier {
            for l in FLetter::ALL {
                if w.last().map(|p: &FLetter| p.inverse()) == Some(l) {
                    continue;
                }
                let h = g.compose(&l.to_pl());
                if seen.insert(h.clone()) {
                    let mut w2 = w.clone();
                    w2.push(l);
                    next.push((w2, h));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
