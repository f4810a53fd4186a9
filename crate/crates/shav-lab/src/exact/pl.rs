use super::affine::AffineMap;
use super::dyadic::Dyadic;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PLError {
    #[error("expected {expected} pieces for {breakpoints} breakpoints, got {got}")]
    PieceCount { breakpoints: usize, expected: usize, got: usize },
    #[error("breakpoints must be strictly increasing")]
    Unordered,
    #[error("discontinuity at breakpoint {0}")]
    Discontinuous(Dyadic),
}

/// A piecewise-linear homeomorphism of ℝ with dyadic breakpoints and
/// power-of-two slopes.
///
/// Piece `k` acts on `[b_{k-1}, b_k]`, with `b_{-1} = -∞` and `b_len = +∞`.
/// The breakpoint list is always minimal, so `==` is equality of maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PLMap {
    breakpoints: Vec<Dyadic>,
    pieces: Vec<AffineMap>,
}

impl PLMap {
    pub fn new(breakpoints: Vec<Dyadic>, pieces: Vec<AffineMap>) -> Result<Self, PLError> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(PLError::PieceCount {
                breakpoints: breakpoints.len(),
                expected: breakpoints.len() + 1,
                got: pieces.len(),
            });
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PLError::Unordered);
        }
        for (k, b) in breakpoints.iter().enumerate() {
            if pieces[k].apply(b) != pieces[k + 1].apply(b) {
                return Err(PLError::Discontinuous(b.clone()));
            }
        }
        let mut m = PLMap { breakpoints, pieces };
        m.normalize();
        Ok(m)
    }

    pub fn identity() -> Self {
        PLMap::affine(AffineMap::identity())
    }

    pub fn affine(a: AffineMap) -> Self {
        PLMap { breakpoints: vec![], pieces: vec![a] }
    }

    pub fn translation(r: Dyadic) -> Self {
        PLMap::affine(AffineMap::translation(r))
    }

    pub fn breakpoints(&self) -> &[Dyadic] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[AffineMap] {
        &self.pieces
    }

    pub fn is_identity(&self) -> bool {
        self.breakpoints.is_empty() && self.pieces[0] == AffineMap::identity()
    }

    fn normalize(&mut self) {
        let mut bps = Vec::with_capacity(self.breakpoints.len());
        let mut pcs = vec![self.pieces[0].clone()];
        for (k, b) in self.breakpoints.iter().enumerate() {
            let next = &self.pieces[k + 1];
            if pcs.last() != Some(next) {
                bps.push(b.clone());
                pcs.push(next.clone());
            }
        }
        self.breakpoints = bps;
        self.pieces = pcs;
    }

    /// Index of the piece acting at `x` (the left one at a breakpoint).
    pub fn piece_index(&self, x: &Dyadic) -> usize {
        self.breakpoints.partition_point(|b| b < x)
    }

    pub fn piece_at(&self, x: &Dyadic) -> &AffineMap {
        &self.pieces[self.piece_index(x)]
    }

    pub fn apply(&self, x: &Dyadic) -> Dyadic {
        self.piece_at(x).apply(x)
    }

    pub fn apply_f64(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|b| b.to_f64() < x);
        self.pieces[k].apply_f64(x)
    }

    /// Preimage of `y`.
    pub fn solve(&self, y: &Dyadic) -> Dyadic {
        let k = self
            .breakpoints
            .partition_point(|b| &self.pieces[self.piece_index(b)].apply(b) < y);
        self.pieces[k].solve(y)
    }

    /// A point strictly inside each piece's interval.
    fn interior_points(bps: &[Dyadic]) -> Vec<Dyadic> {
        if bps.is_empty() {
            return vec![Dyadic::zero()];
        }
        let one = Dyadic::one();
        let mut out = vec![&bps[0] - &one];
        out.extend(bps.windows(2).map(|w| w[0].midpoint(&w[1])));
        out.push(&bps[bps.len() - 1] + &one);
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PLMap) -> PLMap {
        let mut bps: Vec<Dyadic> = other.breakpoints.clone();
        bps.extend(self.breakpoints.iter().map(|b| other.solve(b)));
        bps.sort();
        bps.dedup();
        let pieces = Self::interior_points(&bps)
            .iter()
            .map(|x| {
                let inner = other.piece_at(x);
                self.piece_at(&inner.apply(x)).compose(inner)
            })
            .collect();
        let mut m = PLMap { breakpoints: bps, pieces };
        m.normalize();
        m
    }

    pub fn inverse(&self) -> PLMap {
        let bps = self
            .breakpoints
            .iter()
            .enumerate()
            .map(|(k, b)| self.pieces[k].apply(b))
            .collect();
        let pieces = self.pieces.iter().map(AffineMap::inverse).collect();
        PLMap { breakpoints: bps, pieces }
    }

    pub fn pow(&self, k: i64) -> PLMap {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(PLMap::identity(), |acc, _| acc.compose(&base))
    }

    /// Slope exponent at an interior point of some piece.
    pub fn log2_slope_at(&self, x: &Dyadic) -> i64 {
        self.piece_at(x).log2_slope
    }

    /// Pieces restricted to `[lo, hi]`, as `(left, right, map)` triples.
    pub fn pieces_on(&self, lo: &Dyadic, hi: &Dyadic) -> Vec<(Dyadic, Dyadic, AffineMap)> {
        let mut cuts = vec![lo.clone()];
        cuts.extend(self.breakpoints.iter().filter(|b| *b > lo && *b < hi).cloned());
        cuts.push(hi.clone());
        cuts.windows(2)
            .map(|w| (w[0].clone(), w[1].clone(), self.piece_at(&w[0].midpoint(&w[1])).clone()))
            .collect()
    }
}

/// Maximum of `|n_a(t) − n_b(t)|` over the common refinement of the two
/// breakpoint sets, in units of `log 2`.
pub fn log_slope_separation(a: &PLMap, b: &PLMap) -> i64 {
    let mut bps: Vec<Dyadic> = a.breakpoints.iter().chain(&b.breakpoints).cloned().collect();
    bps.sort();
    bps.dedup();
    PLMap::interior_points(&bps)
        .iter()
        .map(|x| (a.log2_slope_at(x) - b.log2_slope_at(x)).abs())
        .max()
        .unwrap_or(0)
}

#[derive(Serialize, Deserialize)]
struct PieceWire {
    n: i64,
    p: String,
    q: i64,
}

#[derive(Serialize, Deserialize)]
struct PLWire {
    breakpoints: Vec<Dyadic>,
    pieces: Vec<PieceWire>,
}

impl Serialize for PLMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pieces = self
            .pieces
            .iter()
            .map(|a| {
                let (p, q) = a.offset.parts();
                PieceWire { n: a.log2_slope, p: p.to_string(), q }
            })
            .collect();
        PLWire { breakpoints: self.breakpoints.clone(), pieces }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PLMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = PLWire::deserialize(d)?;
        let mut pieces = Vec::with_capacity(w.pieces.len());
        for pw in w.pieces {
            let p: BigInt = pw.p.parse().map_err(serde::de::Error::custom)?;
            pieces.push(AffineMap::new(pw.n, Dyadic::new(p, pw.q)));
        }
        PLMap::new(w.breakpoints, pieces).map_err(serde::de::Error::custom)
    }
}
