//! The kernel `H(y) = ∫₀^∞ cos(xy)/√(1+x²) dx` (the Bessel function K₀),
//! the self-convolution `v₁` of `(1+x²)^{-1/2}`, the moments `T_n`, and
//! numeric checks of the bounds built on them.

use crate::quad::{gauss_legendre, gl_integrate, integrate, integrate_points, integrate_real_line, integrate_to_inf};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialError {
    #[error("argument {0} outside the domain")]
    DomainError(f64),
    #[error("bound violated at {at}: {detail}")]
    BoundViolated { at: f64, detail: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    AlternatingSeries,
    WatsonSeries,
    ExpIntegral,
}

/// Evaluates `H` by a fixed method.
#[derive(Clone, Copy, Debug)]
pub struct KernelEvaluator {
    pub method: KernelMethod,
    pub tolerance: f64,
}

impl KernelEvaluator {
    pub fn new(method: KernelMethod) -> Self {
        KernelEvaluator { method, tolerance: 1e-11 }
    }

    pub fn eval(&self, y: f64) -> Result<f64, SpecialError> {
        if !(y > 0.0) {
            return Err(SpecialError::DomainError(y));
        }
        Ok(match self.method {
            KernelMethod::AlternatingSeries => h_alternating(y),
            KernelMethod::WatsonSeries if y < 2.0 => h_watson(y),
            KernelMethod::WatsonSeries => h_watson_extended(y),
            KernelMethod::ExpIntegral => h_cosh_integral(y),
        })
    }
}

/// `H(y)`, by the Watson series below 2 and the `cosh` integral above.
pub fn h(y: f64) -> Result<f64, SpecialError> {
    if !(y > 0.0) {
        return Err(SpecialError::DomainError(y));
    }
    Ok(h_unchecked(y))
}

pub(crate) fn h_unchecked(y: f64) -> f64 {
    if y < 2.0 {
        h_watson(y)
    } else {
        h_cosh_integral(y)
    }
}

/// `Σ_m (y/2)^{2m}/(m!)² (ψ(m+1) − log(y/2))`.
pub fn h_watson(y: f64) -> f64 {
    let l = (0.5 * y).ln();
    let q = 0.25 * y * y;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = -EULER_GAMMA - l;
    for m in 1..200 {
        term *= q / (m as f64 * m as f64);
        harmonic += 1.0 / m as f64;
        let t = term * (harmonic - EULER_GAMMA - l);
        sum += t;
        if t.abs() < 1e-18 * sum.abs() && term < 1e-18 {
            break;
        }
    }
    sum
}

const GAMMA_DIGITS: &str = "0.57721566490153286060651209008240243104215933593992359880576723";

/// Watson series in 320-bit arithmetic; the terms grow like `e^{y}` while the
/// sum decays like `e^{−y}`, so double precision is only adequate for `y < 2`.
pub fn h_watson_extended(y: f64) -> f64 {
    use astro_float::{BigFloat, Consts, Radix, RoundingMode};
    let p = 320;
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().expect("constant cache");
    let half = BigFloat::from_f64(0.5 * y, p);
    let l = half.ln(p, rm, &mut cc);
    let gamma = BigFloat::parse(GAMMA_DIGITS, Radix::Dec, p, rm, &mut cc);
    let q = half.mul(&half, p, rm);
    let one = BigFloat::from_f64(1.0, p);
    let mut term = one.clone();
    let mut harmonic = BigFloat::from_f64(0.0, p);
    let mut sum = gamma.add(&l, p, rm).neg();
    let tiny = BigFloat::from_f64(1e-60, p);
    for m in 1..2000u32 {
        let mf = BigFloat::from_f64(m as f64, p);
        term = term.mul(&q, p, rm).div(&mf.mul(&mf, p, rm), p, rm);
        harmonic = harmonic.add(&one.div(&mf, p, rm), p, rm);
        let t = term.mul(&harmonic.sub(&gamma, p, rm).sub(&l, p, rm), p, rm);
        sum = sum.add(&t, p, rm);
        if m as f64 > y && term.abs().cmp(&tiny) == Some(-1) {
            break;
        }
    }
    let s = sum.format(Radix::Dec, rm, &mut cc).expect("formatting");
    s.parse::<f64>().expect("decimal float")
}

/// `∫₀^∞ e^{−y cosh t} dt` by the trapezoid rule, which converges
/// geometrically for this analytic, rapidly decaying integrand.
pub fn h_cosh_integral(y: f64) -> f64 {
    let step = 1.0 / 32.0;
    let mut sum = 0.5 * (-y).exp();
    let mut k = 1;
    loop {
        let t = k as f64 * step;
        let v = (-y * t.cosh()).exp();
        sum += v;
        if v < 1e-300 || v < 1e-19 * sum {
            break;
        }
        k += 1;
    }
    sum * step
}

fn gl_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(40))
}

/// `H_n(y) = ∫_{−π/2}^{π/2} cos x / √(y² + (x+nπ)²) dx`.
pub fn h_block(n: usize, y: f64) -> f64 {
    let shift = n as f64 * PI;
    let f = |x: f64| x.cos() / (y * y + (x + shift) * (x + shift)).sqrt();
    if n == 0 {
        2.0 * integrate(f, 0.0, PI / 2.0, 1e-15, 1e-14).value
    } else {
        gl_integrate(f, -PI / 2.0, PI / 2.0, gl_rule())
    }
}

/// `½H₀ + Σ_{n≥1} (−1)ⁿ Hₙ`, with the slowly converging tail summed by
/// repeated averaging of partial sums.
pub fn h_alternating(y: f64) -> f64 {
    let n_direct = 64;
    let levels = 24;
    let mut s = 0.5 * h_block(0, y);
    for n in 1..n_direct {
        s += if n % 2 == 1 { -1.0 } else { 1.0 } * h_block(n, y);
    }
    let mut partial = Vec::with_capacity(levels + 1);
    for n in n_direct..=n_direct + levels {
        s += if n % 2 == 1 { -1.0 } else { 1.0 } * h_block(n, y);
        partial.push(s);
    }
    while partial.len() > 1 {
        partial = partial.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    partial[0]
}

/// `v₁(τ) = ∫ dτ₁ / √((1+τ₁²)(1+(τ−τ₁)²))`, via the closed form
/// `2π / AGM(2, √(4+τ²))`.
pub fn v1(tau: f64) -> f64 {
    let b = (4.0 + tau * tau).sqrt();
    2.0 * PI / agm(2.0, b)
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if (an - bn).abs() <= 1e-16 * an {
            return an;
        }
        a = an;
        b = bn;
    }
    a
}

fn kernel(x: f64) -> f64 {
    1.0 / (1.0 + x * x).sqrt()
}

/// `v₁(τ)` by direct quadrature of its defining integral.
pub fn v1_quadrature(tau: f64) -> f64 {
    let (lo, hi) = (tau.min(0.0), tau.max(0.0));
    let mut pts = vec![lo - 1.0, lo];
    if hi > lo {
        pts.push(hi);
    }
    pts.push(hi + 1.0);
    integrate_real_line(|s| kernel(s) * kernel(tau - s), &pts, 1e-13, 1e-13).value
}

/// `v₁(τ) = (4/π) ∫₀^∞ H(y)² cos(τy) dy`, the Fourier-side identity.
pub fn v1_fourier(tau: f64) -> f64 {
    let left = integrate(
        |u: f64| {
            let y = (-u).exp();
            let hy = h_unchecked(y);
            hy * hy * (tau * y).cos() * y
        },
        0.0,
        60.0,
        1e-14,
        1e-12,
    );
    let upper = 45.0;
    let mut pts = vec![1.0];
    let cycles = ((upper - 1.0) * tau.abs() / PI).ceil() as usize;
    let n = cycles.clamp(8, 4000);
    for k in 1..=n {
        pts.push(1.0 + (upper - 1.0) * k as f64 / n as f64);
    }
    let right = integrate_points(
        |y: f64| {
            let hy = h_unchecked(y);
            hy * hy * (tau * y).cos()
        },
        &pts,
        1e-15,
        1e-12,
    );
    4.0 / PI * (left.value + right.value)
}

/// `v₁′(τ)` by quadrature of the differentiated integrand.
pub fn v1_prime(tau: f64) -> f64 {
    let (lo, hi) = (tau.min(0.0), tau.max(0.0));
    let mut pts = vec![lo - 1.0, lo];
    if hi > lo {
        pts.push(hi);
    }
    pts.push(hi + 1.0);
    let f = |s: f64| {
        let d = tau - s;
        -d / (1.0 + d * d).powf(1.5) * kernel(s)
    };
    integrate_real_line(f, &pts, 1e-14, 1e-12).value
}

/// `v(t) = v₁(log(t + √(t²−1)))` for `t ≥ 1`.
pub fn v(t: f64) -> Result<f64, SpecialError> {
    if !(t >= 1.0) {
        return Err(SpecialError::DomainError(t));
    }
    Ok(v1(t.acosh()))
}

/// `v((a+b)/(2√(ab))) = v₁(½|log a − log b|)`, evaluated in log space.
pub fn v_of_lengths(log_a: f64, log_b: f64) -> f64 {
    v1(0.5 * (log_a - log_b).abs())
}

/// `T_n = (2^{n+1}/π) ∫₀^∞ H^{n+1}`, returned as the scaled value
/// `T_n / (2^{n+1}(n+1)!) = (1/π) ∫₀^∞ H^{n+1} / (n+1)!`.
pub fn t_ratio(n: u32) -> f64 {
    let k = (n + 1) as f64;
    let log_fact: f64 = (1..=n + 1).map(|j| (j as f64).ln()).sum();
    // y = e^{-u} on (0, 1]; the integrand peaks near u ≈ n
    let u_max = k + 40.0 * k.sqrt() + 120.0;
    let left = integrate_points(
        |u: f64| {
            let hy = h_unchecked((-u).exp());
            (k * hy.ln() - u - log_fact).exp()
        },
        &[0.0, k * 0.5, k, 2.0 * k + 5.0, u_max],
        1e-300,
        1e-12,
    );
    let right = integrate_points(
        |y: f64| {
            let hy = h_unchecked(y);
            if hy <= 0.0 {
                0.0
            } else {
                (k * hy.ln() - log_fact).exp()
            }
        },
        &[1.0, 2.0, 5.0, 12.0, 40.0, 800.0],
        1e-300,
        1e-12,
    );
    (left.value + right.value) / PI
}

/// `T_n` itself.
pub fn t_n(n: u32) -> f64 {
    let log_fact: f64 = (1..=n + 1).map(|j| (j as f64).ln()).sum();
    t_ratio(n) * ((n + 1) as f64 * std::f64::consts::LN_2 + log_fact).exp()
}

/// Limit of `T_n/(2^{n+1}(n+1)!)`: `G/π` with `log G = log 2 − γ`.
pub fn t_ratio_limit() -> f64 {
    2.0 * (-EULER_GAMMA).exp() / PI
}

/// Convolution-side oracles `T₁ = π`, `T₂ = ∫ v₁(x)(1+x²)^{-1/2}`, `T₃ = ∫ v₁²`.
pub fn t_convolution_oracle(n: u32) -> Option<f64> {
    match n {
        1 => Some(PI),
        2 => Some(2.0 * integrate_to_inf(|x| v1(x) * kernel(x), 0.0, 1e-14, 1e-12).value),
        3 => Some(2.0 * integrate_to_inf(|x| v1(x) * v1(x), 0.0, 1e-14, 1e-12).value),
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TRow {
    pub n: u32,
    pub t_n: f64,
    pub ratio: f64,
    pub c1_running: f64,
    pub c2_running: f64,
}

/// Table of `T_n` and running bracket constants `c₁ ≤ ratio ≤ c₂`.
pub fn t_table(n_max: u32) -> Vec<TRow> {
    let mut rows = Vec::new();
    let (mut c1, mut c2) = (f64::INFINITY, 0.0f64);
    for n in 1..=n_max {
        let ratio = t_ratio(n);
        c1 = c1.min(ratio);
        c2 = c2.max(ratio);
        rows.push(TRow { n, t_n: t_n(n), ratio, c1_running: c1, c2_running: c2 });
    }
    rows
}

#[derive(Clone, Debug, Serialize)]
pub struct HBoundsReport {
    pub epsilon: f64,
    pub lower_checked: usize,
    pub upper_checked: usize,
    pub decay_checked: usize,
    pub decay_constant: f64,
    pub max_decay_ratio: f64,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Finds `ε` with `−log(y/ε) ≤ H(y) ≤ −log(y/4)` on a log grid of `(0, ε)`
/// and checks `|H(y)| ≤ √2·π/y` on `[ε, 10³]`.
pub fn verify_h_bounds() -> Result<HBoundsReport, SpecialError> {
    let grid_pts = 400;
    let holds = |eps: f64| {
        log_grid(1e-12 * eps, eps, grid_pts).iter().all(|&y| {
            let hy = h_unchecked(y);
            -(y / eps).ln() <= hy && hy <= -(y / 4.0).ln()
        })
    };
    // the lower bound forces ε ≤ 2e^{−γ}; bisect below that
    let (mut lo, mut hi) = (1e-6, 2.0 * (-EULER_GAMMA).exp());
    if !holds(lo) {
        return Err(SpecialError::BoundViolated { at: lo, detail: "no admissible epsilon".into() });
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eps = lo;
    let a = 2f64.sqrt() * PI;
    let decay = log_grid(eps, 1e3, grid_pts);
    let mut max_ratio = 0.0f64;
    for &y in &decay {
        let r = h_unchecked(y).abs() * y / a;
        max_ratio = max_ratio.max(r);
        if r > 1.0 {
            return Err(SpecialError::BoundViolated { at: y, detail: "|H(y)| > A/y".into() });
        }
    }
    Ok(HBoundsReport {
        epsilon: eps,
        lower_checked: grid_pts,
        upper_checked: grid_pts,
        decay_checked: decay.len(),
        decay_constant: a,
        max_decay_ratio: max_ratio,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SL2Report {
    pub points: usize,
    pub max_bound_ratio: f64,
    pub all_negative: bool,
    pub ratios: Vec<(f64, f64, f64)>,
}

/// Checks `v₁′(t) < 0` and `|v₁′(t)| ≤ 4v₁(t)/|t|` on `grid` (t > 0), and
/// tabulates `v₁(t−r)/v₁(t)`.
pub fn verify_sl2(grid: &[f64]) -> Result<SL2Report, SpecialError> {
    let mut max_ratio = 0.0f64;
    for &t in grid {
        let d = v1_prime(t);
        if t > 0.0 && d >= 0.0 {
            return Err(SpecialError::BoundViolated { at: t, detail: format!("v1'({t}) = {d} is not negative") });
        }
        let r = d.abs() * t.abs() / (4.0 * v1(t));
        max_ratio = max_ratio.max(r);
        if r > 1.0 {
            return Err(SpecialError::BoundViolated { at: t, detail: "|v1'| > 4 v1/|t|".into() });
        }
    }
    let mut ratios = Vec::new();
    for &t in &[10.0, 50.0, 200.0] {
        for &r in &[-3.0, -1.0, 1.0, 3.0] {
            ratios.push((t, r, v1(t - r) / v1(t)));
        }
    }
    Ok(SL2Report { points: grid.len(), max_bound_ratio: max_ratio, all_negative: true, ratios })
}

#[derive(Clone, Debug, Serialize)]
pub struct SL4Report {
    pub epsilon: f64,
    pub r: f64,
    pub big_r: f64,
    pub c_star: f64,
    pub c3: f64,
    pub points: usize,
    pub max_lhs_over_rhs: f64,
}

/// First `t` (scan by 0.5 then bisection) past which `v₁(t−r) ≤ 2v₁(t)`.
pub fn find_sl4_threshold(r: f64) -> f64 {
    let ok = |t: f64| v1(t - r) <= 2.0 * v1(t);
    let mut t = r.max(0.5);
    while !ok(t) {
        t += 0.5;
    }
    let (mut lo, mut hi) = (t - 0.5, t);
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if ok(m) {
            hi = m;
        } else {
            lo = m;
        }
    }
    // the ratio v₁(t−r)/v₁(t) decreases in t; keep R > r as required
    hi.max(r + 1e-9)
}

/// Checks `v(y₁,a)·v(a,y₂) ≤ c₃·v(y₁,y₂)` on a `k³` grid.
pub fn verify_sl4(eps: f64, k: usize) -> Result<SL4Report, SpecialError> {
    let r = -0.5 * eps.ln();
    let big_r = find_sl4_threshold(r);
    for i in 0..2000 {
        let t = big_r + 0.5 * i as f64;
        if v1(t - r) > 2.0 * v1(t) * (1.0 + 1e-12) {
            return Err(SpecialError::BoundViolated { at: t, detail: "threshold R not monotone".into() });
        }
    }
    let c_star = 2f64.max(PI / v1(big_r));
    let c3 = PI * c_star * c_star;
    let a_grid: Vec<f64> = (0..k).map(|i| eps + (1.0 - eps) * i as f64 / k as f64).collect();
    let y_grid = log_grid(1e-9, 0.999, k);
    let mut worst = 0.0f64;
    let mut points = 0;
    for &a in &a_grid {
        for &y1 in &y_grid {
            for &y2 in &y_grid {
                if y1 + y2 > 1.0 {
                    continue;
                }
                points += 1;
                let (la, l1, l2) = (a.ln(), y1.ln(), y2.ln());
                let lhs = v_of_lengths(l1, la) * v_of_lengths(la, l2);
                let rhs = c3 * v_of_lengths(l1, l2);
                worst = worst.max(lhs / rhs);
                if lhs > rhs {
                    return Err(SpecialError::BoundViolated {
                        at: a,
                        detail: format!("y1={y1}, y2={y2}: {lhs} > {rhs}"),
                    });
                }
            }
        }
    }
    Ok(SL4Report { epsilon: eps, r, big_r, c_star, c3, points, max_lhs_over_rhs: worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k0_reference_values() {
        // K₀(1), K₀(0.1), K₀(5) from standard tables
        assert!((h(1.0).unwrap() - 0.421_024_438_240_708_3).abs() < 1e-14);
        assert!((h(0.1).unwrap() - 2.427_069_024_702_016_6).abs() < 1e-13);
        assert!((h(5.0).unwrap() - 0.003_691_098_334_042_594).abs() < 1e-15);
        assert!(h(0.0).is_err() && h(-1.0).is_err());
    }

    #[test]
    fn methods_agree_at_one() {
        let w = h_watson(1.0);
        let c = h_cosh_integral(1.0);
        let a = h_alternating(1.0);
        assert!((w - c).abs() < 1e-12);
        assert!((w - a).abs() < 1e-10, "{w} {a}");
    }

    #[test]
    fn v1_values() {
        assert!((v1(0.0) - PI).abs() < 1e-14);
        assert_eq!(v1(5.0), v1(-5.0));
        assert!((v1(2.0) - v1_quadrature(2.0)).abs() < 1e-10);
        assert!((v1(2.0) - v1_fourier(2.0)).abs() < 1e-6);
    }

    #[test]
    fn v_of_lengths_matches_v() {
        let (a, b) = (0.3f64, 0.02f64);
        let t = (a + b) / (2.0 * (a * b).sqrt());
        assert!((v(t).unwrap() - v_of_lengths(a.ln(), b.ln())).abs() < 1e-13);
        assert!((v(1.0).unwrap() - PI).abs() < 1e-14);
        assert!(v(0.5).is_err());
    }
}
