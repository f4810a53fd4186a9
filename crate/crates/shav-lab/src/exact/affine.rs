use super::dyadic::Dyadic;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// `x ↦ 2^n x + b` with `b` dyadic: an element of GA(Q₂).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineMap {
    pub log2_slope: i64,
    pub offset: Dyadic,
}

impl AffineMap {
    pub fn new(log2_slope: i64, offset: Dyadic) -> Self {
        AffineMap { log2_slope, offset }
    }

    pub fn identity() -> Self {
        AffineMap::new(0, Dyadic::zero())
    }

    pub fn translation(r: Dyadic) -> Self {
        AffineMap::new(0, r)
    }

    pub fn dilation(n: i64) -> Self {
        AffineMap::new(n, Dyadic::zero())
    }

    pub fn apply(&self, x: &Dyadic) -> Dyadic {
        &x.shl(self.log2_slope) + &self.offset
    }

    pub fn apply_f64(&self, x: f64) -> f64 {
        x * 2f64.powi(self.log2_slope as i32) + self.offset.to_f64()
    }

    pub fn slope_f64(&self) -> f64 {
        2f64.powi(self.log2_slope as i32)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap::new(
            self.log2_slope + other.log2_slope,
            &other.offset.shl(self.log2_slope) + &self.offset,
        )
    }

    pub fn inverse(&self) -> AffineMap {
        AffineMap::new(-self.log2_slope, (-&self.offset).shl(-self.log2_slope))
    }

    /// Preimage of `y`.
    pub fn solve(&self, y: &Dyadic) -> Dyadic {
        (y - &self.offset).shl(-self.log2_slope)
    }

    pub fn normal_form(&self) -> BSWord {
        affine_to_normal_form(self)
    }
}

/// Normal form `(d^i t^p d^{-i}) d^n` of BS(1,2), with `p` odd or zero.
///
/// Under `t ↦ (x ↦ x+1)`, `d ↦ (x ↦ 2x)` and right-to-left composition the
/// word acts as `x ↦ 2^n x + p·2^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BSWord {
    pub i: i64,
    pub p: BigInt,
    pub n: i64,
}

impl BSWord {
    pub fn identity() -> Self {
        BSWord { i: 0, p: BigInt::zero(), n: 0 }
    }

    pub fn to_affine(&self) -> AffineMap {
        AffineMap::new(self.n, Dyadic::new(self.p.clone(), -self.i))
    }

    /// Expands the normal form into letters.
    pub fn to_letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        let push_d = |out: &mut Vec<Letter>, k: i64| {
            let l = if k >= 0 { Letter::D } else { Letter::DInv };
            out.extend(std::iter::repeat_n(l, k.unsigned_abs() as usize));
        };
        push_d(&mut out, self.i);
        let p: i64 = (&self.p).try_into().expect("translation exponent fits in i64");
        let l = if p >= 0 { Letter::T } else { Letter::TInv };
        out.extend(std::iter::repeat_n(l, p.unsigned_abs() as usize));
        push_d(&mut out, -self.i);
        push_d(&mut out, self.n);
        out
    }
}

impl fmt::Display for BSWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d^{} t^{} d^{}) d^{}", self.i, self.p, -self.i, self.n)
    }
}

/// Rewrites `x ↦ 2^n x + p/2^q` as `(d^{-q} t^p d^q) d^n`.
pub fn affine_to_normal_form(m: &AffineMap) -> BSWord {
    let (p, q) = m.offset.parts();
    BSWord { i: -q, p, n: m.log2_slope }
}

/// Letters of the free group on `t`, `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    T,
    TInv,
    D,
    DInv,
}

impl Letter {
    pub fn to_affine(self) -> AffineMap {
        match self {
            Letter::T => AffineMap::translation(Dyadic::one()),
            Letter::TInv => AffineMap::translation(Dyadic::from_int(-1)),
            Letter::D => AffineMap::dilation(1),
            Letter::DInv => AffineMap::dilation(-1),
        }
    }
}

/// Evaluates a word in GA(Q₂); the leftmost letter is applied last.
pub fn evaluate_word(word: &[Letter]) -> AffineMap {
    word.iter()
        .fold(AffineMap::identity(), |acc, l| acc.compose(&l.to_affine()))
}

/// Reduces a word to normal form by collecting conjugated powers of `t`
/// and pushing every `d` to the right with `d t d⁻¹ = t²`.
pub fn bs_reduce(word: &[Letter]) -> BSWord {
    let mut i: i64 = 0;
    let mut p = BigInt::zero();
    let mut n: i64 = 0;
    for &l in word {
        match l {
            Letter::D => n += 1,
            Letter::DInv => n -= 1,
            Letter::T | Letter::TInv => {
                // (d^i t^p d^-i) d^n t^s = (d^i t^p d^-i)(d^n t^s d^-n) d^n
                let s = if l == Letter::T { BigInt::one() } else { -BigInt::one() };
                let j = n;
                let lo = if p.is_zero() { j } else { i.min(j) };
                let lhs = if p.is_zero() { BigInt::zero() } else { &p << ((i - lo) as usize) };
                p = lhs + (s << ((j - lo) as usize));
                i = lo;
                while !p.is_zero() && (&p & BigInt::one()).is_zero() {
                    p >>= 1;
                    i += 1;
                }
                if p.is_zero() {
                    i = 0;
                }
            }
        }
    }
    BSWord { i, p, n }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Letter::*;

    #[test]
    fn normal_form_examples() {
        let w = affine_to_normal_form(&AffineMap::new(1, Dyadic::new(1, 1)));
        assert_eq!(w, BSWord { i: -1, p: BigInt::one(), n: 1 });
        assert_eq!(affine_to_normal_form(&AffineMap::identity()), BSWord::identity());
        let w = affine_to_normal_form(&AffineMap::translation(Dyadic::new(3, 2)));
        assert_eq!(w, BSWord { i: -2, p: BigInt::from(3), n: 0 });
        assert_eq!(evaluate_word(&w.to_letters()), AffineMap::translation(Dyadic::new(3, 2)));
    }

    #[test]
    fn reduce_examples() {
        // t² is the conjugate d t d⁻¹, i.e. translation by 2
        let tt = bs_reduce(&[T, T]);
        assert_eq!(tt, BSWord { i: 1, p: BigInt::one(), n: 0 });
        assert_eq!(bs_reduce(&[D, T, DInv]), tt);
        let w = [T, D, T];
        assert_eq!(bs_reduce(&w).to_affine(), evaluate_word(&w));
        assert_eq!(bs_reduce(&[T, TInv]), BSWord::identity());
    }

    #[test]
    fn compose_and_invert() {
        let a = AffineMap::new(2, Dyadic::new(3, 3));
        let b = AffineMap::new(-1, Dyadic::new(-5, 1));
        let ab = a.compose(&b);
        let x = Dyadic::new(7, 4);
        assert_eq!(ab.apply(&x), a.apply(&b.apply(&x)));
        assert_eq!(a.compose(&a.inverse()), AffineMap::identity());
        assert_eq!(a.solve(&a.apply(&x)), x);
    }
}
