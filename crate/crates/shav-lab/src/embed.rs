//! The smooth re-embedding `θ_f` of PL₂(ℝ): generators `f` with
//! `f(x+1) = f(x)+2`, `f(0) = 0`, flat contact with the identity at 0,
//! the bar map `p/2^q ↦ f^{-q}(p)`, and images `θ_f(h)` with derivatives.

use crate::exact::{AffineMap, Dyadic, PLMap};
use crate::quad::{gauss_legendre, gl_integrate};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("profile invalid: {0}")]
    ProfileInvalid(String),
    #[error("generator has no interior repelling fixed point")]
    NoInteriorFixedPoint,
    #[error("condition (b) search failed: best {best} < {target}")]
    SearchFailed { best: f64, target: f64 },
    #[error("identity element has no condition (b) witness")]
    IdentityInput,
}

/// Named derivative profiles `φ = f′|[0,1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Profile {
    /// `1 + β e^{−1/(x(1−x))}` with `β` normalizing `∫φ = 2`.
    FlatBump,
    /// `1 − a·b₁ + c·b₂`, `b₁` a flat bump on `(0, 0.4)`, `b₂` on `(0.5, 1)`,
    /// `c` normalizing `∫φ = 2`.
    TwoBump { a: f64 },
    /// `2 − cos 2πx`.
    Trig,
    /// The two-bump shape with explicit, unnormalized coefficients.
    Custom { dip: f64, spike: f64 },
}

impl Default for Profile {
    fn default() -> Self {
        Profile::TwoBump { a: 0.8 }
    }
}

/// Whether `build_generator` must find the repelling fixed point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Plain,
    ConditionB,
}

/// Standard flat bump on `(0,1)` scaled to peak 1 at `½`.
fn bump(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        (4.0 - 1.0 / (s * (1.0 - s))).exp()
    }
}

fn bump_prime(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        let u = s * (1.0 - s);
        bump(s) * (1.0 - 2.0 * s) / (u * u)
    }
}

/// `∫₀¹ bump`.
fn bump_mass() -> f64 {
    let rule = gauss_legendre(40);
    (0..64)
        .map(|k| gl_integrate(bump, k as f64 / 64.0, (k + 1) as f64 / 64.0, &rule))
        .sum()
}

#[derive(Clone, Debug)]
enum Shape {
    Flat { beta: f64 },
    Bumps { a: f64, c: f64 },
    Trig,
}

impl Shape {
    fn phi(&self, x: f64) -> f64 {
        match *self {
            Shape::Flat { beta } => 1.0 + beta * bump(x) * (-4f64).exp(),
            Shape::Bumps { a, c } => 1.0 - a * bump(x / 0.4) + c * bump((x - 0.5) / 0.5),
            Shape::Trig => 2.0 - (2.0 * PI * x).cos(),
        }
    }

    fn phi_prime(&self, x: f64) -> f64 {
        match *self {
            Shape::Flat { beta } => beta * bump_prime(x) * (-4f64).exp(),
            Shape::Bumps { a, c } => -a * bump_prime(x / 0.4) / 0.4 + c * bump_prime((x - 0.5) / 0.5) / 0.5,
            Shape::Trig => 2.0 * PI * (2.0 * PI * x).sin(),
        }
    }
}

const CELLS: usize = 2048;

/// A generator `f` with its cumulative table and cached fixed point.
#[derive(Clone, Debug)]
pub struct SmoothGenerator {
    shape: Shape,
    pub profile: Profile,
    pub smoothness_order: u32,
    cum: Vec<f64>,
    rule: (Vec<f64>, Vec<f64>),
    pub fixed_point_z: Option<f64>,
    pub log_slope_at_z: Option<f64>,
}

/// Smoothness order standing in for `r = ∞`.
pub const SMOOTH_INFINITY: u32 = u32::MAX;

pub fn build_generator(profile: Profile, r: u32, mode: Mode) -> Result<SmoothGenerator, EmbedError> {
    let mass = bump_mass();
    let shape = match profile {
        Profile::FlatBump => Shape::Flat { beta: (4f64).exp() / mass },
        Profile::TwoBump { a } => Shape::Bumps { a, c: (1.0 + 0.4 * a * mass) / (0.5 * mass) },
        Profile::Trig => Shape::Trig,
        Profile::Custom { dip, spike } => Shape::Bumps { a: dip, c: spike },
    };
    let rule = gauss_legendre(12);
    let mut cum = Vec::with_capacity(CELLS + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    for k in 0..CELLS {
        acc += gl_integrate(|x| shape.phi(x), k as f64 / CELLS as f64, (k + 1) as f64 / CELLS as f64, &rule);
        cum.push(acc);
    }
    let mut g = SmoothGenerator {
        shape,
        profile,
        smoothness_order: r,
        cum,
        rule,
        fixed_point_z: None,
        log_slope_at_z: None,
    };
    g.validate()?;
    if mode == Mode::ConditionB {
        let z = g.find_fixed_point().ok_or(EmbedError::NoInteriorFixedPoint)?;
        let slope = g.deriv(z);
        // a crossing inside the flat contact zone at 0 is rounding, not repulsion
        if slope <= 1.0 + 1e-6 {
            return Err(EmbedError::NoInteriorFixedPoint);
        }
        g.fixed_point_z = Some(z);
        g.log_slope_at_z = Some(slope.ln());
    }
    Ok(g)
}

/// The default generator: two-bump profile, `C^∞`, condition-(b) mode.
pub fn default_generator() -> SmoothGenerator {
    build_generator(Profile::default(), SMOOTH_INFINITY, Mode::ConditionB).expect("default profile is valid")
}

impl SmoothGenerator {
    fn validate(&self) -> Result<(), EmbedError> {
        let total = self.cum[CELLS];
        if (total - 2.0).abs() > 1e-10 {
            return Err(EmbedError::ProfileInvalid(format!("integral {total} != 2")));
        }
        for i in 0..=20_000 {
            let x = i as f64 / 20_000.0;
            if self.shape.phi(x) <= 0.0 {
                return Err(EmbedError::ProfileInvalid(format!("phi({x}) <= 0")));
            }
        }
        if (self.shape.phi(0.0) - 1.0).abs() > 1e-12 {
            return Err(EmbedError::ProfileInvalid("f'(0) != 1".into()));
        }
        // f^{(k)}(0) = φ^{(k-1)}(0) by central differences of the periodic φ
        let h = 2e-3;
        let p = |x: f64| self.shape.phi(x.rem_euclid(1.0));
        let jets = [
            (p(h) - p(-h)) / (2.0 * h),
            (p(h) - 2.0 * p(0.0) + p(-h)) / (h * h),
            (p(2.0 * h) - 2.0 * p(h) + 2.0 * p(-h) - p(-2.0 * h)) / (2.0 * h * h * h),
        ];
        let top = self.smoothness_order.min(4) as usize;
        for k in 2..=top {
            let d = jets[k - 2];
            if d.abs() > 1e-5 {
                return Err(EmbedError::ProfileInvalid(format!("f^({k})(0) ≈ {d} != 0")));
            }
        }
        Ok(())
    }

    /// Largest root of `f(x) = x` in `(0,1)`.
    fn find_fixed_point(&self) -> Option<f64> {
        let g = |x: f64| self.base(x) - x;
        let n = 4096;
        let mut hi = 1.0 - 1.0 / n as f64;
        while hi > 0.0 {
            let lo = hi - 1.0 / n as f64;
            if lo <= 1e-9 {
                return None;
            }
            if g(lo) <= 0.0 && g(hi) > 0.0 {
                let (mut a, mut b) = (lo, hi);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if g(m) <= 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                    if b - a < 1e-16 {
                        break;
                    }
                }
                return Some(0.5 * (a + b));
            }
            hi = lo;
        }
        None
    }

    /// `f` restricted to `[0,1]`.
    fn base(&self, t: f64) -> f64 {
        let pos = t * CELLS as f64;
        let k = (pos.floor() as usize).min(CELLS - 1);
        let left = k as f64 / CELLS as f64;
        if t == left {
            return self.cum[k];
        }
        self.cum[k] + gl_integrate(|x| self.shape.phi(x), left, t, &self.rule)
    }

    pub fn phi(&self, x: f64) -> f64 {
        self.shape.phi(x.rem_euclid(1.0))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = x.floor();
        2.0 * k + self.base(x - k)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.phi(x)
    }

    pub fn second_deriv(&self, x: f64) -> f64 {
        self.shape.phi_prime(x.rem_euclid(1.0))
    }

    /// `f⁻¹` by table bisection and then safeguarded Newton.
    pub fn inv(&self, y: f64) -> f64 {
        let k = (0.5 * y).floor();
        let s = y - 2.0 * k;
        let cell = self.cum.partition_point(|&c| c <= s).clamp(1, CELLS) - 1;
        let (mut lo, mut hi) = (cell as f64 / CELLS as f64, (cell + 1) as f64 / CELLS as f64);
        let (clo, chi) = (self.cum[cell], self.cum[cell + 1]);
        let mut t = lo + (hi - lo) * ((s - clo) / (chi - clo)).clamp(0.0, 1.0);
        for _ in 0..60 {
            let r = self.base(t) - s;
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - r / self.shape.phi(t);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-16 * (1.0 + t.abs()) {
                t = next;
                break;
            }
            t = next;
        }
        k + t
    }

    /// `f^k`, `k` of either sign.
    pub fn iterate(&self, mut x: f64, k: i64) -> f64 {
        if k >= 0 {
            for _ in 0..k {
                x = self.eval(x);
            }
        } else {
            for _ in 0..(-k) {
                x = self.inv(x);
            }
        }
        x
    }

    /// `(f^k)(x)` and `log (f^k)′(x)`.
    pub fn iterate_with_log_deriv(&self, mut x: f64, k: i64) -> (f64, f64) {
        let mut ld = 0.0;
        if k >= 0 {
            for _ in 0..k {
                ld += self.deriv(x).ln();
                x = self.eval(x);
            }
        } else {
            for _ in 0..(-k) {
                x = self.inv(x);
                ld -= self.deriv(x).ln();
            }
        }
        (x, ld)
    }

    /// `r̄ = f^{-q}(p)` for `r = p/2^q`.
    pub fn bar(&self, r: &Dyadic) -> f64 {
        if r.is_integer() {
            return r.to_f64();
        }
        let (p, q) = r.parts();
        let p = crate::exact::Dyadic::new(p, 0).to_f64();
        self.iterate(p, -q)
    }

    pub fn z(&self) -> Option<f64> {
        self.fixed_point_z
    }

    pub fn c(&self) -> Option<f64> {
        self.log_slope_at_z
    }
}

/// Free function form of the bar map.
pub fn bar_map(r: &Dyadic, f: &SmoothGenerator) -> f64 {
    f.bar(r)
}

/// The factor word `f^{-q} T_p f^{q+n}` attached to `x ↦ 2^n x + p/2^q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PieceWord {
    pub q: i64,
    pub p: f64,
    pub n: i64,
}

impl PieceWord {
    pub fn from_affine(a: &AffineMap) -> Self {
        let (p, q) = a.offset.parts();
        if q <= 0 {
            // integer offsets: f^k T_p f^{-k} = T_{2^k p}
            let p = a.offset.to_f64();
            return PieceWord { q: 0, p, n: a.log2_slope };
        }
        PieceWord { q, p: Dyadic::new(p, 0).to_f64(), n: a.log2_slope }
    }

    pub fn is_identity(&self) -> bool {
        self.n == 0 && self.p == 0.0
    }

    fn eval_log_deriv(&self, f: &SmoothGenerator, s: f64) -> (f64, f64) {
        if self.is_identity() {
            return (s, 0.0);
        }
        let (u, l1) = f.iterate_with_log_deriv(s, self.q + self.n);
        let (w, l2) = f.iterate_with_log_deriv(u + self.p, -self.q);
        (w, l1 + l2)
    }
}

/// `θ_f(h)` as a table of pieces over the bar images of the breakpoints.
#[derive(Clone, Debug)]
pub struct SmoothHomeo<'a> {
    gen: &'a SmoothGenerator,
    cuts: Vec<f64>,
    words: Vec<PieceWord>,
}

pub fn theta_f<'a>(h: &PLMap, f: &'a SmoothGenerator) -> SmoothHomeo<'a> {
    SmoothHomeo {
        gen: f,
        cuts: h.breakpoints().iter().map(|b| f.bar(b)).collect(),
        words: h.pieces().iter().map(PieceWord::from_affine).collect(),
    }
}

impl SmoothHomeo<'_> {
    fn word_at(&self, s: f64) -> &PieceWord {
        &self.words[self.cuts.partition_point(|&c| c <= s)]
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, &PieceWord)> {
        let n = self.words.len();
        (0..n).map(move |i| {
            let lo = if i == 0 { f64::NEG_INFINITY } else { self.cuts[i - 1] };
            let hi = if i + 1 == n { f64::INFINITY } else { self.cuts[i] };
            (lo, hi, &self.words[i])
        })
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.word_at(s).eval_log_deriv(self.gen, s).0
    }

    pub fn log_deriv(&self, s: f64) -> f64 {
        self.word_at(s).eval_log_deriv(self.gen, s).1
    }

    pub fn deriv(&self, s: f64) -> f64 {
        self.log_deriv(s).exp()
    }

    /// Largest jump between the two adjacent pieces at any cut.
    pub fn continuity_defect(&self) -> f64 {
        self.cuts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let a = self.words[i].eval_log_deriv(self.gen, c).0;
                let b = self.words[i + 1].eval_log_deriv(self.gen, c).0;
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }
}

pub fn theta_derivative(h: &SmoothHomeo, t: f64) -> f64 {
    h.deriv(t)
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub h_word: String,
    pub t_star: f64,
    pub value: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

/// Finds `t*` with `|log θ_f(h)′(t*)| ≥ log f′(z) − 1e−6`.
///
/// Candidates are a uniform grid with golden-section refinement around the
/// best grid point, plus the conjugated fixed point `θ_f(T_x)(z)` where `x`
/// is the right end of the initial identity segment of `h`.
pub fn verify_condition_b(h: &PLMap, h_word: &str, f: &SmoothGenerator) -> Result<Witness, EmbedError> {
    if h.is_identity() {
        return Err(EmbedError::IdentityInput);
    }
    let (z, c) = match (f.z(), f.c()) {
        (Some(z), Some(c)) => (z, c),
        _ => return Err(EmbedError::NoInteriorFixedPoint),
    };
    let th = theta_f(h, f);
    let score = |t: f64| th.log_deriv(t).abs();
    let mut best_t = 0.0;
    let mut best = f64::NEG_INFINITY;
    let grid = 2000;
    for i in 0..=grid {
        let t = i as f64 / grid as f64;
        let v = score(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let (mut a, mut b) = ((best_t - 1.0 / grid as f64).max(0.0), (best_t + 1.0 / grid as f64).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if score(x1) > score(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let refined = 0.5 * (a + b);
    if score(refined) > best {
        best = score(refined);
        best_t = refined;
    }
    let x = first_moving_point(h);
    let tx = theta_f(&PLMap::translation(x), f);
    let cand = tx.eval(z);
    if (0.0..=1.0).contains(&cand) && score(cand) > best {
        best = score(cand);
        best_t = cand;
    }
    if best < c - 1e-6 {
        return Err(EmbedError::SearchFailed { best, target: c });
    }
    Ok(Witness { h_word: h_word.to_string(), t_star: best_t, value: best, c })
}

/// Largest `x ∈ [0,1]` with `h` the identity on `[0, x]`.
pub fn first_moving_point(h: &PLMap) -> Dyadic {
    let zero = Dyadic::zero();
    for (i, b) in h.breakpoints().iter().enumerate() {
        if *b >= zero && h.pieces()[i + 1] != AffineMap::identity() {
            return b.clone();
        }
    }
    zero
}
