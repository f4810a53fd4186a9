//! Schwarzian derivatives, the constants `C_g` and `c₄`, the statistics `f₁`, `f₂`, and the ratio comparison
//! between a partition and its image.

use crate::holder::SampledDiffeo;
use crate::partitions::Partition;
use crate::quad::cumulative_cubic;
use crate::special::v1;
use crate::wiener::{c4, map_b, pairwise_sum, sample_path, Estimate, RngConfig};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchwarzianError {
    #[error("cannot build a partition with n = {n} and log r = {log_r}")]
    ConstructionImpossible { n: usize, log_r: f64 },
    #[error("bound violated: {0}")]
    BoundViolated(String),
    #[error("partition mesh {mesh} exceeds ε = {eps}")]
    MeshTooLarge { mesh: f64, eps: f64 },
}

/// Closed-form maps with derivatives through third order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SmoothTestMap {
    /// `t + (a/2π)(1 − cos 2πt)` for `|a| < 1`.
    Sine { a: f64 },
    /// `slope·t + shift`.
    Affine { slope: f64, shift: f64 },
    /// `(1+c)t / (1+ct)` for `c > −1`.
    Mobius { c: f64 },
}

impl SmoothTestMap {
    pub fn sine(a: f64) -> Self {
        assert!(a.abs() < 1.0);
        SmoothTestMap::Sine { a }
    }

    pub fn identity() -> Self {
        SmoothTestMap::Sine { a: 0.0 }
    }

    /// `g(t) − t`.
    pub fn displacement(&self, t: f64) -> f64 {
        match *self {
            SmoothTestMap::Sine { a } => a / PI * (PI * t).sin().powi(2),
            SmoothTestMap::Affine { slope, shift } => (slope - 1.0) * t + shift,
            SmoothTestMap::Mobius { c } => c * t * (1.0 - t) / (1.0 + c * t),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        t + self.displacement(t)
    }

    pub fn d1(&self, t: f64) -> f64 {
        match *self {
            SmoothTestMap::Sine { a } => 1.0 + a * (2.0 * PI * t).sin(),
            SmoothTestMap::Affine { slope, .. } => slope,
            SmoothTestMap::Mobius { c } => (1.0 + c) / (1.0 + c * t).powi(2),
        }
    }

    pub fn d2(&self, t: f64) -> f64 {
        match *self {
            SmoothTestMap::Sine { a } => 2.0 * PI * a * (2.0 * PI * t).cos(),
            SmoothTestMap::Affine { .. } => 0.0,
            SmoothTestMap::Mobius { c } => -2.0 * c * (1.0 + c) / (1.0 + c * t).powi(3),
        }
    }

    pub fn d3(&self, t: f64) -> f64 {
        match *self {
            SmoothTestMap::Sine { a } => -4.0 * PI * PI * a * (2.0 * PI * t).sin(),
            SmoothTestMap::Affine { .. } => 0.0,
            SmoothTestMap::Mobius { c } => 6.0 * c * c * (1.0 + c) / (1.0 + c * t).powi(4),
        }
    }

    /// `g″/g′`.
    pub fn log_deriv_slope(&self, t: f64) -> f64 {
        self.d2(t) / self.d1(t)
    }

    /// `g(0) = 0`, `g(1) = 1` and `g′(0) = g′(1) = 1`.
    /// `g⁻¹(s)` by safeguarded Newton iteration on `[0,1]`.
    pub fn inverse(&self, s: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut t = s.clamp(0.0, 1.0);
        for _ in 0..100 {
            let r = self.eval(t) - s;
            if r == 0.0 {
                break;
            }
            if r > 0.0 { hi = t } else { lo = t }
            let next = t - r / self.d1(t);
            let next = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if (next - t).abs() <= f64::EPSILON * t {
                t = next;
                break;
            }
            t = next;
        }
        t
    }

    pub fn fixes_endpoints_to_first_order(&self) -> bool {
        self.eval(0.0).abs() < 1e-15 && (self.eval(1.0) - 1.0).abs() < 1e-15 && (self.d1(0.0) - 1.0).abs() < 1e-15 && (self.d1(1.0) - 1.0).abs() < 1e-15
    }

    pub fn is_identity(&self) -> bool {
        matches!(*self, SmoothTestMap::Sine { a } if a == 0.0) || matches!(*self, SmoothTestMap::Affine { slope, shift } if slope == 1.0 && shift == 0.0)
    }
}

/// `S_g = g‴/g′ − (3/2)(g″/g′)²`.
pub fn schwarzian(g: &SmoothTestMap, t: f64) -> f64 {
    let r = g.log_deriv_slope(t);
    g.d3(t) / g.d1(t) - 1.5 * r * r
}

/// `S_g = (g″/g′)′ − ½(g″/g′)²` with `(g″/g′)′ = (g′g‴ − g″²)/g′²`.
pub fn schwarzian_alt(g: &SmoothTestMap, t: f64) -> f64 {
    let (d1, d2, d3) = (g.d1(t), g.d2(t), g.d3(t));
    (d1 * d3 - d2 * d2) / (d1 * d1) - 0.5 * (d2 / d1).powi(2)
}

/// Maximum of `f` on `[0,1]`: a uniform grid followed by golden-section refinement around the best node.
pub fn grid_max(f: impl Fn(f64) -> f64, m: usize) -> (f64, f64) {
    let (mut best_t, mut best) = (0.0, f(0.0));
    for i in 1..=m {
        let t = i as f64 / m as f64;
        let v = f(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let h = 1.0 / m as f64;
    let (mut lo, mut hi) = ((best_t - h).max(0.0), (best_t + h).min(1.0));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (c, d) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
        if f(c) >= f(d) {
            hi = d;
        } else {
            lo = c;
        }
    }
    let t = 0.5 * (lo + hi);
    let v = f(t);
    if v > best { (t, v) } else { (best_t, best) }
}

/// `C_g = 1 + max_t (|g″/g′| + (g″/g′)² + |g‴/g′|)`.
pub fn c_g(g: &SmoothTestMap) -> f64 {
    1.0 + grid_max(|t| {
        let r = g.log_deriv_slope(t);
        r.abs() + r * r + (g.d3(t) / g.d1(t)).abs()
    }, 4096).1
}

/// `C = max_{t₁,t₂} |g″(t₁)/g′(t₂)|`.
pub fn c_ratio(g: &SmoothTestMap) -> f64 {
    let top = grid_max(|t| g.d2(t).abs(), 4096).1;
    let low = -grid_max(|t| -g.d1(t), 4096).1;
    top / low
}

/// `f₁ = ΣX_k` and `f₂ = ΣY_k` with the per-interval terms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FTerms {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub f1: f64,
    pub f2: f64,
}

/// `X_k = l_k (g″/g′(x_{k−1}) q′_k(0) − g″/g′(x_k) q′_k(1))`,
/// `Y_k = l_k² ∫ S_g(x_{k−1} + l_k q_k(t)) q′_k(t)² dt`.
pub fn f1_f2_sample(g: &SmoothTestMap, x: &Partition, q: &[SampledDiffeo]) -> FTerms {
    let l = x.lengths();
    assert_eq!(q.len(), l.len());
    let mut pts = vec![0.0];
    pts.extend(x.points());
    pts.push(1.0);
    let mut xs = Vec::with_capacity(l.len());
    let mut ys = Vec::with_capacity(l.len());
    for (k, qk) in q.iter().enumerate() {
        let (left, right) = (pts[k], pts[k + 1]);
        let d = qk.derivs();
        let m = qk.m();
        xs.push(l[k] * (g.log_deriv_slope(left) * d[0] - g.log_deriv_slope(right) * d[m]));
        let integrand: Vec<f64> = qk.values().iter().zip(d).map(|(v, dv)| schwarzian(g, left + l[k] * v) * dv * dv).collect();
        ys.push(l[k] * l[k] * cumulative_cubic(&integrand, 1.0 / m as f64)[m]);
    }
    FTerms { f1: xs.iter().sum(), f2: ys.iter().sum(), x: xs, y: ys }
}

/// Outcome of the concentration experiment for `|f₁ + f₂|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SL8Report {
    pub eps: f64,
    pub n: usize,
    pub trials: usize,
    pub grid: usize,
    pub mesh: f64,
    pub c_g: f64,
    pub m1: Estimate,
    pub m2: Estimate,
    pub energy: Estimate,
    pub c4: f64,
    /// `4c₄C_g ε^{1/3}`.
    pub threshold: f64,
    pub frequency: f64,
    /// `2ε^{1/3}`.
    pub bound: f64,
    pub binomial_sigma: f64,
    pub f1_mean: Estimate,
    pub f1_mean_bound: f64,
    pub f1_var: f64,
    pub f1_var_stderr: f64,
    pub f1_var_bound: f64,
    pub f2_abs_mean: Estimate,
    pub f2_abs_bound: f64,
    /// `P(|f₁| > 3c₄C_g ε^{1/3})` against `½ε^{1/3}`.
    pub f1_tail: f64,
    pub f1_tail_bound: f64,
    /// `P(|f₂| > c₄C_g ε^{1/3})` against `(3/2)ε^{1/3}`.
    pub f2_tail: f64,
    pub f2_tail_bound: f64,
    /// Number of `k` with `|E X_k| > l_k² C_g M₁ + 3σ`.
    pub xk_mean_violations: usize,
    pub passed: bool,
}

impl SL8Report {
    pub fn margin(&self) -> f64 {
        if self.frequency > 0.0 { self.bound / self.frequency } else { f64::INFINITY }
    }
}

/// Estimates `P(|f₁+f₂| > 4c₄C_g ε^{1/3})` over `trials` independent tuples of `ν`-samples on `x`.
pub fn check_sl8(g: &SmoothTestMap, eps: f64, x: &Partition, trials: usize, grid: usize, cfg: &RngConfig) -> Result<SL8Report, SchwarzianError> {
    let mesh = x.mesh();
    if mesh > eps * (1.0 + 1e-12) {
        return Err(SchwarzianError::MeshTooLarge { mesh, eps });
    }
    let n = x.n();
    struct Trial {
        terms: FTerms,
        q0: Vec<f64>,
        energy: Vec<f64>,
    }
    let runs: Vec<Trial> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = cfg.item(i);
            let q: Vec<SampledDiffeo> = (0..n).map(|_| map_b(&sample_path(grid, &mut rng).to_grid())).collect();
            let h = 1.0 / grid as f64;
            let energy = q.iter().map(|qk| cumulative_cubic(&qk.derivs().iter().map(|d| d * d).collect::<Vec<_>>(), h)[grid]).collect();
            let q0 = q.iter().map(|qk| qk.derivs()[0]).collect();
            Trial { terms: f1_f2_sample(g, x, &q), q0, energy }
        })
        .collect();
    let q0: Vec<f64> = runs.iter().flat_map(|r| r.q0.iter().copied()).collect();
    let m1 = Estimate::from_samples(&q0);
    let m2 = Estimate::from_samples(&q0.iter().map(|v| v * v).collect::<Vec<_>>());
    let energy = Estimate::from_samples(&runs.iter().flat_map(|r| r.energy.iter().copied()).collect::<Vec<_>>());
    let c4v = c4(m1.mean, m2.mean, energy.mean);
    let cg = c_g(g);
    let e3 = eps.cbrt();
    let threshold = 4.0 * c4v * cg * e3;
    let frac = |pred: &dyn Fn(&FTerms) -> bool| runs.iter().filter(|r| pred(&r.terms)).count() as f64 / trials as f64;
    let frequency = frac(&|t| (t.f1 + t.f2).abs() > threshold);
    let bound = 2.0 * e3;
    let p = bound.min(1.0);
    let binomial_sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let f1: Vec<f64> = runs.iter().map(|r| r.terms.f1).collect();
    let f1_mean = Estimate::from_samples(&f1);
    let dev2: Vec<f64> = f1.iter().map(|v| (v - f1_mean.mean).powi(2)).collect();
    let f1_var = pairwise_sum(&dev2) / (trials as f64 - 1.0);
    let m4 = pairwise_sum(&dev2.iter().map(|d| d * d).collect::<Vec<_>>()) / trials as f64;
    let f1_var_stderr = ((m4 - f1_var * f1_var).max(0.0) / trials as f64).sqrt();
    let f2_abs_mean = Estimate::from_samples(&runs.iter().map(|r| r.terms.f2.abs()).collect::<Vec<_>>());
    let l = x.lengths();
    let xk_mean_violations = (0..n)
        .filter(|&k| {
            let e = Estimate::from_samples(&runs.iter().map(|r| r.terms.x[k]).collect::<Vec<_>>());
            e.mean.abs() > l[k] * l[k] * cg * m1.mean + 3.0 * e.stderr
        })
        .count();
    let t = c4v * cg * e3;
    let mut report = SL8Report {
        eps,
        n,
        trials,
        grid,
        mesh,
        c_g: cg,
        m1,
        m2,
        energy,
        c4: c4v,
        threshold,
        frequency,
        bound,
        binomial_sigma,
        f1_mean,
        f1_mean_bound: c4v * cg * eps,
        f1_var,
        f1_var_stderr,
        f1_var_bound: 4.0 * eps * cg * m2.mean,
        f2_abs_mean,
        f2_abs_bound: 1.5 * c4v * cg * eps,
        f1_tail: frac(&|r| r.f1.abs() > 3.0 * t),
        f1_tail_bound: 0.5 * e3,
        f2_tail: frac(&|r| r.f2.abs() > t),
        f2_tail_bound: 1.5 * e3,
        xk_mean_violations,
        passed: false,
    };
    report.passed = report.frequency <= report.bound + 3.0 * binomial_sigma
        && report.f1_mean.mean.abs() <= report.f1_mean_bound + 3.0 * report.f1_mean.stderr
        && report.f1_var <= report.f1_var_bound + 3.0 * report.f1_var_stderr
        && report.f2_abs_mean.mean <= report.f2_abs_bound + 3.0 * report.f2_abs_mean.stderr
        && report.f1_tail <= report.f1_tail_bound + 3.0 * binomial_sigma
        && report.f2_tail <= report.f2_tail_bound + 3.0 * binomial_sigma
        && report.xk_mean_violations == 0;
    Ok(report)
}

/// `R^g/R = (1 + (Aa² + Bb²)/(a+b)) / √((1+Aa)(1+Bb))`.
pub fn r_ratio_closed_form(a: f64, b: f64, big_a: f64, big_b: f64) -> f64 {
    (1.0 + (big_a * a * a + big_b * b * b) / (a + b)) / ((1.0 + big_a * a) * (1.0 + big_b * b)).sqrt()
}

/// `R^g/R` from the four points `x_{k−2} < x_{k−1} < x_k` and their images.
pub fn r_ratio_direct(a: f64, b: f64, ga: f64, gb: f64) -> f64 {
    let r = (a + b) / (2.0 * (a * b).sqrt());
    let rg = (ga + gb) / (2.0 * (ga * gb).sqrt());
    rg / r
}

/// `β` from its closed form, written in `u = 1/t` so that it stays finite for huge `t`.
pub fn beta_closed_form(alpha: f64, log_t: f64) -> f64 {
    let u = (-log_t).exp();
    let s1 = (1.0 - u * u).sqrt();
    let s2 = ((1.0 + alpha).powi(2) - u * u).sqrt();
    (alpha / (1.0 + s1) * (1.0 + (2.0 + alpha) / (s1 + s2))).ln_1p()
}

/// `τ = log(t + √(t²−1))` from `log t`.
pub fn tau_of_log(log_t: f64) -> f64 {
    if log_t > 30.0 { log_t + LN_2 } else { log_t.exp().acosh() }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Per-`k` quantities of the ratio comparison, logarithmic where the raw values leave `f64` range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioTerms {
    pub k: usize,
    pub log_a: f64,
    pub log_b: f64,
    pub big_a: f64,
    pub big_b: f64,
    /// `log R`.
    pub log_r: f64,
    /// `log(R^g/R)`.
    pub log_ratio: f64,
    pub alpha: f64,
    pub tau: f64,
    pub beta: f64,
    /// `ω(α, t)` with `v₁(τ+β)/v₁(τ) = 1 + ω β/τ`.
    pub omega_at: f64,
    /// `ω_k = ω(α,t) β log t / (τ (x_k − x_{k−2}))`.
    pub omega: f64,
    /// `log(v₁(τ+β)/v₁(τ))`.
    pub log_v_ratio: f64,
    /// `x_k − x_{k−2}`.
    pub d: f64,
    /// `λ = α / (x_k − x_{k−2})`.
    pub lambda: f64,
}

/// `log(g-length / length)` of an interval from its endpoints and log-length.
fn log_stretch(g: &SmoothTestMap, left: f64, right: f64, log_len: f64) -> f64 {
    if log_len > -14.0 {
        let len = log_len.exp();
        ((g.displacement(right) - g.displacement(left)) / len).ln_1p()
    } else {
        let len = log_len.exp();
        let (d1, d2, d3) = (g.d1(left), g.d2(left), g.d3(left));
        d1.ln() + (d2 / (2.0 * d1) * len + d3 / (6.0 * d1) * len * len).ln_1p()
    }
}

/// All per-`k` ratio terms of a partition under `g`, cyclic with `l_0 = l_n`.
pub fn ratio_terms(g: &SmoothTestMap, x: &Partition) -> Vec<RatioTerms> {
    let n = x.n();
    let ll = x.log_lengths();
    let mut pts = vec![0.0];
    pts.extend(x.points());
    pts.push(1.0);
    let stretch: Vec<f64> = (0..n).map(|j| log_stretch(g, pts[j], pts[j + 1], ll[j])).collect();
    (0..n)
        .map(|k| {
            let kb = (k + n - 1) % n;
            let (la, lb) = (ll[k], ll[kb]);
            let (sa, sb) = (stretch[k], stretch[kb]);
            // `1 + Aa` and `1 + Bb` are the stretches relative to `g′` at the shared point
            let anchor = pts[k];
            let ln_d1 = g.d1(anchor).ln();
            let big_a = if la > -30.0 { (sa - ln_d1).exp_m1() / la.exp() } else { g.d2(anchor) / (2.0 * g.d1(anchor)) };
            let b_end = if k == 0 { 1.0 } else { anchor };
            let big_b = if lb > -30.0 { (sb - ln_d1).exp_m1() / lb.exp() } else { -g.d2(b_end) / (2.0 * g.d1(anchor)) };
            let log_sum = log_add_exp(la, lb);
            let log_r = log_sum - LN_2 - 0.5 * (la + lb);
            let w = 1.0 / (1.0 + (lb - la).exp());
            let log_ratio = sb + (w * (sa - sb).exp_m1()).ln_1p() - 0.5 * (sa + sb);
            let alpha = log_ratio.exp_m1();
            let tau = tau_of_log(log_r);
            let beta = beta_closed_form(alpha, log_r);
            let v_tau = v1(tau);
            let log_v_ratio = (v1(tau + beta) / v_tau).ln();
            let omega_at = if beta != 0.0 && (beta / tau).abs() > 1e-9 {
                (v1(tau + beta) / v_tau - 1.0) * tau / beta
            } else {
                let h = 1e-5;
                ((v1(tau * (1.0 + h)) / v1(tau * (1.0 - h))).ln()) / (2.0 * h)
            };
            let d = log_sum.exp();
            // λ = α/d, by its second-order expansion once d leaves f64 range
            let lambda = if log_sum > -30.0 {
                alpha / d
            } else {
                big_a * w * w + big_b * (1.0 - w).powi(2) - 0.5 * (big_a * w + big_b * (1.0 - w))
            };
            let beta_over_alpha = if alpha != 0.0 { beta / alpha } else { 1.0 };
            let omega = omega_at * beta_over_alpha * lambda * log_r / tau;
            RatioTerms { k: k + 1, log_a: la, log_b: lb, big_a, big_b, log_r, log_ratio, alpha, tau, beta, omega_at, omega, log_v_ratio, d, lambda }
        })
        .collect()
}

/// The constants `C`, `δ₁ = 1/(400(C+1))`, `log r = 8000(C+1)/ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SL9Constants {
    pub c: f64,
    pub delta1: f64,
    pub log_r: f64,
    pub eps: f64,
}

impl SL9Constants {
    pub fn new(g: &SmoothTestMap, eps: f64) -> Self {
        let c = c_ratio(g);
        SL9Constants { c, delta1: 1.0 / (400.0 * (c + 1.0)), log_r: 8000.0 * (c + 1.0) / eps, eps }
    }
}

/// Log-lengths in levels `0, −L, 0, −L, …` (ending `−L, −2L` for odd `n`) with every adjacent ratio `R` above `e^{log r}`.
pub fn extreme_partition(n: usize, log_r: f64) -> Result<Partition, SchwarzianError> {
    let big_l = 2.0 * (log_r + LN_2) + 4.0;
    if n < 2 || !big_l.is_finite() || 2.0 * big_l > 1e15 {
        return Err(SchwarzianError::ConstructionImpossible { n, log_r });
    }
    let mut levels: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 0.0 } else { -big_l }).collect();
    if n % 2 == 1 {
        levels[n - 1] = -2.0 * big_l;
    }
    Ok(Partition::from_log_lengths(&levels))
}

/// Alternating partition with mesh below `mesh_target` and every adjacent `R` above `e^{log r}`, randomized.
pub fn random_admissible_partition<R: Rng + ?Sized>(mesh_target: f64, log_r: f64, rng: &mut R) -> Partition {
    let pairs = (2.5 / mesh_target).ceil() as usize + rng.random_range(0..64);
    let gap = 2.0 * (log_r + LN_2);
    let big: Vec<f64> = (0..pairs).map(|_| rng.random_range(0.5f64..1.0).ln()).collect();
    let mut log_l = Vec::with_capacity(2 * pairs);
    for i in 0..pairs {
        log_l.push(big[i]);
        let floor = big[i].min(big[(i + 1) % pairs]);
        log_l.push(floor - gap - rng.random_range(0.5..6.0));
    }
    Partition::from_log_lengths(&log_l)
}

/// Result of the ratio comparison on one partition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SL9Report {
    pub constants: SL9Constants,
    pub n: usize,
    pub mesh: f64,
    pub log_min_r: f64,
    pub mesh_ok: bool,
    pub min_r_ok: bool,
    /// `log ∏ R^g/R`.
    pub sigma: f64,
    /// `Σ log(v(R^g)/v(R))`.
    pub sigma_v: f64,
    /// `∏ R^g/R − 1`.
    pub product_minus_one: f64,
    pub holds: bool,
    pub alpha_ok: bool,
    pub beta_ok: bool,
    pub omega_ok: bool,
    pub sigma_ok: bool,
    pub max_abs_alpha: f64,
    pub max_abs_omega: f64,
}

/// Evaluates `|∏R^g/R − 1| ≤ ε` and the per-`k` inequalities used along the way.
pub fn check_sl9(g: &SmoothTestMap, x: &Partition, consts: &SL9Constants) -> SL9Report {
    let terms = ratio_terms(g, x);
    let c = consts.c;
    let sigma = pairwise_sum(&terms.iter().map(|t| t.log_ratio).collect::<Vec<_>>());
    let sigma_v = pairwise_sum(&terms.iter().map(|t| t.log_v_ratio).collect::<Vec<_>>());
    let log_min_r = terms.iter().map(|t| t.log_r).fold(f64::INFINITY, f64::min);
    let product_minus_one = sigma.exp_m1();
    let alpha_ok = terms.iter().all(|t| t.lambda.abs() <= 2.5 * c && t.alpha.abs() < 1.0 / 80.0);
    let beta_ok = terms.iter().all(|t| 0.25 * t.alpha.abs() <= t.beta.abs() * (1.0 + 1e-12) && t.beta.abs() <= 4.0 * t.alpha.abs() * (1.0 + 1e-12));
    let omega_ok = terms.iter().all(|t| t.omega.abs() <= 200.0 * c);
    SL9Report {
        constants: *consts,
        n: x.n(),
        mesh: x.mesh(),
        log_min_r,
        mesh_ok: x.mesh() < consts.delta1,
        min_r_ok: log_min_r > consts.log_r,
        sigma,
        sigma_v,
        product_minus_one,
        holds: product_minus_one.abs() <= consts.eps,
        alpha_ok,
        beta_ok,
        omega_ok,
        sigma_ok: sigma.abs() <= consts.eps / 10.0 && sigma_v.abs() <= consts.eps / 10.0,
        max_abs_alpha: terms.iter().map(|t| t.alpha.abs()).fold(0.0, f64::max),
        max_abs_omega: terms.iter().map(|t| t.omega.abs()).fold(0.0, f64::max),
    }
}

/// Largest value of `|log(R^g/R)| / (400 C d_k / log r)` and of the same quotient for the `v`-ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PerKBound {
    pub worst_ratio: f64,
    pub worst_v_ratio: f64,
}

pub fn per_k_bound(g: &SmoothTestMap, x: &Partition, c: f64, log_r: f64) -> PerKBound {
    let mut out = PerKBound { worst_ratio: 0.0, worst_v_ratio: 0.0 };
    for t in ratio_terms(g, x) {
        let b = 400.0 * c * t.d / log_r;
        out.worst_ratio = out.worst_ratio.max(t.log_ratio.abs() / b);
        out.worst_v_ratio = out.worst_v_ratio.max(t.log_v_ratio.abs() / b);
    }
    out
}

/// One elementary inequality checked on a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogEstimateRow {
    pub name: String,
    pub domain: (f64, f64),
    /// Largest `lhs / rhs` over nonzero grid points.
    pub worst_quotient: f64,
    pub holds: bool,
}

/// `|log(1+y)| ≤ 2|y|` on `|y| ≤ ½`, `|log(1+3y)| ≤ 4|y|` on `|y| ≤ 0.1`, `|e^x−1| ≤ 2|x|` on `[−1,1]`.
pub fn log_estimates_check() -> Result<Vec<LogEstimateRow>, SchwarzianError> {
    let check = |name: &str, lo: f64, hi: f64, lhs: &dyn Fn(f64) -> f64, rhs: &dyn Fn(f64) -> f64| {
        let m = 10_000;
        let mut worst = 0.0f64;
        let mut holds = true;
        for i in 0..=m {
            let y = lo + (hi - lo) * i as f64 / m as f64;
            let (l, r) = (lhs(y), rhs(y));
            holds &= l <= r;
            if r > 0.0 {
                worst = worst.max(l / r);
            }
        }
        LogEstimateRow { name: name.into(), domain: (lo, hi), worst_quotient: worst, holds }
    };
    let rows = vec![
        check("|log(1+y)| <= 2|y|", -0.5, 0.5, &|y| y.ln_1p().abs(), &|y| 2.0 * y.abs()),
        check("|log(1+3y)| <= 4|y|", -0.1, 0.1, &|y| (3.0 * y).ln_1p().abs(), &|y| 4.0 * y.abs()),
        check("|e^x-1| <= 2|x|", -1.0, 1.0, &|x| x.exp_m1().abs(), &|x| 2.0 * x.abs()),
    ];
    if let Some(bad) = rows.iter().find(|r| !r.holds) {
        return Err(SchwarzianError::BoundViolated(bad.name.clone()));
    }
    Ok(rows)
}
