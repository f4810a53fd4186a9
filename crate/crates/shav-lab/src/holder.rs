//! Hölder functionals on sampled diffeomorphisms of `[0,1]`.

use crate::embed::{theta_f, SmoothGenerator, SmoothHomeo};
use crate::quad::cumulative_cubic;
use crate::exact::{f_ball, f_word_string, FLetter, PLMap};
use serde::Serialize;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HolderError {
    #[error("invalid sampled diffeomorphism: {0}")]
    InvalidDiffeo(String),
    #[error("ball of radius {radius} too small: relevant element {word} lies on its boundary")]
    BallTooSmall { radius: usize, word: String },
}

/// A diffeomorphism of `[0,1]` sampled on the uniform grid `i/m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledDiffeo {
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl SampledDiffeo {
    pub fn new(values: Vec<f64>, derivs: Vec<f64>) -> Result<Self, HolderError> {
        let bad = |s: &str| Err(HolderError::InvalidDiffeo(s.to_string()));
        if values.len() < 2 || values.len() != derivs.len() {
            return bad("need matching value and derivative samples on at least two points");
        }
        if (values[0]).abs() > 1e-12 || (values[values.len() - 1] - 1.0).abs() > 1e-12 {
            return bad("endpoints must be fixed");
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return bad("values must increase");
        }
        if derivs.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return bad("derivatives must be positive");
        }
        Ok(SampledDiffeo { values, derivs })
    }

    pub fn from_fn(m: usize, value: impl Fn(f64) -> f64, deriv: impl Fn(f64) -> f64) -> Result<Self, HolderError> {
        let ts = (0..=m).map(|i| i as f64 / m as f64);
        Self::new(ts.clone().map(&value).collect(), ts.map(&deriv).collect())
    }

    /// The diffeomorphism with `log f' = x + const`, integrated by the cumulative cubic rule.
    pub fn from_log_deriv(x: &[f64]) -> Self {
        let m = x.len() - 1;
        let shift = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = x.iter().map(|v| (v - shift).exp()).collect();
        let cum = cumulative_cubic(&e, 1.0 / m as f64);
        let z = cum[m];
        let mut values: Vec<f64> = cum.iter().map(|c| c / z).collect();
        values[m] = 1.0;
        SampledDiffeo { values, derivs: e.iter().map(|v| v / z).collect() }
    }

    pub fn identity(m: usize) -> Self {
        Self::from_fn(m, |t| t, |_| 1.0).unwrap()
    }

    /// Samples `θ_f(h)` restricted to `[0,1]`.
    pub fn from_homeo(h: &SmoothHomeo, m: usize) -> Self {
        Self::from_fn(m, |t| h.eval(t).clamp(0.0, 1.0), |t| h.deriv(t)).unwrap()
    }

    /// Cubic Hermite interpolation of the samples.
    pub fn eval(&self, s: f64) -> f64 {
        let m = self.m();
        let u = s.clamp(0.0, 1.0) * m as f64;
        let i = (u.floor() as usize).min(m - 1);
        let r = u - i as f64;
        let h = 1.0 / m as f64;
        let (p0, p1, d0, d1) = (self.values[i], self.values[i + 1], self.derivs[i] * h, self.derivs[i + 1] * h);
        let r2 = r * r;
        let r3 = r2 * r;
        (2.0 * r3 - 3.0 * r2 + 1.0) * p0 + (r3 - 2.0 * r2 + r) * d0 + (3.0 * r2 - 2.0 * r3) * p1 + (r3 - r2) * d1
    }

    /// Linear interpolation of the derivative samples.
    pub fn deriv_at(&self, s: f64) -> f64 {
        let m = self.m();
        let u = s.clamp(0.0, 1.0) * m as f64;
        let i = (u.floor() as usize).min(m - 1);
        let r = u - i as f64;
        (1.0 - r) * self.derivs[i] + r * self.derivs[i + 1]
    }

    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    pub fn log_derivs(&self) -> Vec<f64> {
        self.derivs.iter().map(|d| d.ln()).collect()
    }

    pub fn deriv_min(&self) -> f64 {
        self.derivs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn deriv_max(&self) -> f64 {
        self.derivs.iter().copied().fold(0.0, f64::max)
    }

    /// Log-derivatives of `g ∘ self`.
    pub fn log_derivs_after(&self, g: &SmoothHomeo) -> Vec<f64> {
        self.values.iter().zip(&self.derivs).map(|(&v, &d)| g.log_deriv(v) + d.ln()).collect()
    }

    /// `g ∘ self` on the same grid.
    pub fn compose_after(&self, g: &SmoothHomeo) -> SampledDiffeo {
        let values = self.values.iter().map(|&v| g.eval(v).clamp(0.0, 1.0)).collect();
        let derivs = self.log_derivs_after(g).into_iter().map(f64::exp).collect();
        SampledDiffeo { values, derivs }
    }
}

/// A smooth test diffeomorphism `t + Σ a_k sin(πkt)/(πk)` with `Σ|a_k| < 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrigDiffeo {
    pub coeffs: Vec<f64>,
}

impl TrigDiffeo {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(coeffs.iter().map(|a| a.abs()).sum::<f64>() < 1.0);
        TrigDiffeo { coeffs }
    }

    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, terms: usize, budget: f64) -> Self {
        let raw: Vec<f64> = (0..terms).map(|_| rng.random_range(-1.0..1.0)).collect();
        let total: f64 = raw.iter().map(|a| a.abs()).sum::<f64>().max(1e-300);
        TrigDiffeo::new(raw.iter().map(|a| a * budget / total).collect())
    }

    pub fn eval(&self, t: f64) -> f64 {
        let pi = std::f64::consts::PI;
        t + self.coeffs.iter().enumerate().map(|(k, a)| {
            let w = pi * (k + 1) as f64;
            a * (w * t).sin() / w
        }).sum::<f64>()
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let pi = std::f64::consts::PI;
        1.0 + self.coeffs.iter().enumerate().map(|(k, a)| a * (pi * (k + 1) as f64 * t).cos()).sum::<f64>()
    }

    pub fn second_deriv(&self, t: f64) -> f64 {
        let pi = std::f64::consts::PI;
        -self.coeffs.iter().enumerate().map(|(k, a)| {
            let w = pi * (k + 1) as f64;
            a * w * (w * t).sin()
        }).sum::<f64>()
    }

    pub fn inverse_eval(&self, s: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut t = s;
        for _ in 0..100 {
            let r = self.eval(t) - s;
            if r.abs() < 1e-16 {
                break;
            }
            if r > 0.0 { hi = t } else { lo = t }
            let next = t - r / self.deriv(t);
            t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        t
    }

    pub fn sample(&self, m: usize) -> SampledDiffeo {
        SampledDiffeo::from_fn(m, |t| self.eval(t), |t| self.deriv(t)).unwrap()
    }
}

/// `sup |v_j − v_i| / |t_j − t_i|^δ` over all pairs of sample points.
pub fn holder_quotient(ts: &[f64], vals: &[f64], delta: f64) -> f64 {
    let mut best = 0.0f64;
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            let d = (ts[j] - ts[i]).abs();
            if d > 0.0 {
                best = best.max((vals[j] - vals[i]).abs() / d.powf(delta));
            }
        }
    }
    best
}

/// The same supremum on the uniform grid `i/m`, with `m = vals.len() − 1`.
pub fn grid_quotient(vals: &[f64], delta: f64) -> f64 {
    let m = vals.len() - 1;
    let scale: Vec<f64> = (0..=m).map(|k| if k == 0 { 0.0 } else { (k as f64 / m as f64).powf(-delta) }).collect();
    let mut best = 0.0f64;
    for i in 0..=m {
        for j in i + 1..=m {
            best = best.max((vals[j] - vals[i]).abs() * scale[j - i]);
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderProfile {
    pub delta: f64,
    pub holder_quotient_sup: f64,
    pub norm_1_delta: f64,
}

pub fn holder_profile(f: &SampledDiffeo, delta: f64) -> HolderProfile {
    let q = grid_quotient(f.derivs(), delta);
    HolderProfile { delta, holder_quotient_sup: q, norm_1_delta: f.derivs()[0].abs() + q }
}

pub fn norm_1_delta(f: &SampledDiffeo, delta: f64) -> f64 {
    holder_profile(f, delta).norm_1_delta
}

/// `‖f − g‖₁,δ` for two samples on the same grid.
pub fn norm_1_delta_diff(f: &SampledDiffeo, g: &SampledDiffeo, delta: f64) -> f64 {
    let d: Vec<f64> = f.derivs().iter().zip(g.derivs()).map(|(a, b)| a - b).collect();
    d[0].abs() + grid_quotient(&d, delta)
}

pub fn p_delta_from_log_derivs(log_derivs: &[f64], delta: f64) -> f64 {
    log_derivs[0].abs() + grid_quotient(log_derivs, delta)
}

pub fn p_delta(f: &SampledDiffeo, delta: f64) -> f64 {
    p_delta_from_log_derivs(&f.log_derivs(), delta)
}

/// A grid functional evaluated on nested grids `m` and `2m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refinement {
    pub m: usize,
    pub coarse: f64,
    pub fine: f64,
    pub gap: f64,
}

impl Refinement {
    pub fn of(m: usize, eval: impl Fn(usize) -> f64) -> Self {
        let (coarse, fine) = (eval(m), eval(2 * m));
        Refinement { m, coarse, fine, gap: fine - coarse }
    }
}

/// Hölder constant of `(f⁻¹)'` from that of `f'` and `min f'`.
pub fn inverse_holder_constant(c: f64, m: f64, delta: f64) -> f64 {
    c / m.powf(2.0 + delta)
}

/// Hölder constant of `(f∘g)'`.
pub fn compose_holder_constant(c_f: f64, c_g: f64, m_f: f64, m_g: f64, delta: f64) -> f64 {
    c_g * m_f + c_f * m_g.powf(1.0 + delta)
}

/// Bound on `|p_δ(f) − p_δ(f₀)|` valid when `‖f − f₀‖₁,δ < ε < m/2`.
pub fn p_delta_continuity_bound(f0: &SampledDiffeo, delta: f64, eps: f64) -> f64 {
    let (m, big_m) = (f0.deriv_min(), f0.deriv_max());
    (2.0 / m + 2.0 * big_m * (m + norm_1_delta(f0, delta)) / m.powi(3)) * eps
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityRow {
    pub eps: f64,
    pub dist: f64,
    pub dp: f64,
    pub bound: f64,
}

/// Perturbs `f0` by `f ↦ (f + s·b)/(1 + s·b(1))`-style bumps and compares `p_δ` drift to the bound.
pub fn p_delta_continuity_sweep(f0: &TrigDiffeo, m: usize, delta: f64, scales: &[f64]) -> Vec<ContinuityRow> {
    let base = f0.sample(m);
    let p0 = p_delta(&base, delta);
    let pi = std::f64::consts::PI;
    scales
        .iter()
        .map(|&s| {
            // f0 + s·sin²(πt)·t has the same endpoints and stays increasing for small s
            let g = SampledDiffeo::from_fn(
                m,
                |t| f0.eval(t) + s * (pi * t).sin().powi(2) * t,
                |t| f0.deriv(t) + s * ((pi * t).sin().powi(2) + t * pi * (2.0 * pi * t).sin()),
            )
            .unwrap();
            let dist = norm_1_delta_diff(&g, &base, delta);
            let eps = dist * (1.0 + 1e-9);
            ContinuityRow { eps, dist, dp: (p_delta(&g, delta) - p0).abs(), bound: p_delta_continuity_bound(&base, delta, eps) }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscontinuityRow {
    pub eps: f64,
    pub norm_f: f64,
    pub norm_f_closed: f64,
    pub norm_gf: f64,
    pub chord: f64,
    pub chord_closed: f64,
}

fn g_prime(y: f64) -> f64 {
    0.5 + 5.0 / 6.0 * y.abs().powf(2.0 / 3.0)
}

/// `|φ(ε) − φ(0)| / ε^{2/3}` in closed form for the `[−1,1]` counterexample.
pub fn discontinuity_chord(eps: f64) -> f64 {
    (-5.0 / 3.0 + 11.0 / 6.0 * eps.powf(4.0 / 3.0) + 5.0 / 3.0 * eps.powf(10.0 / 3.0)).abs()
}

/// The counterexample on `[−1,1]` with `g(x) = (x + x^{5/3})/2`, `f_ε(x) = x − ε + εx²`, `δ = 2/3`.
pub fn discontinuity_demo(eps_grid: &[f64], points: usize) -> Vec<DiscontinuityRow> {
    let delta = 2.0 / 3.0;
    eps_grid
        .iter()
        .map(|&eps| {
            assert!(eps > 0.0 && eps < 0.5);
            let mut ts: Vec<f64> = (0..=points).map(|i| -1.0 + 2.0 * i as f64 / points as f64).collect();
            ts.extend([0.0, eps]);
            ts.sort_by(f64::total_cmp);
            ts.dedup();
            let dfe = |x: f64| 1.0 + 2.0 * eps * x;
            let fe = |x: f64| x - eps + eps * x * x;
            let d1: Vec<f64> = ts.iter().map(|&x| dfe(x) - 1.0).collect();
            let phi = |x: f64| g_prime(fe(x)) * dfe(x) - g_prime(x);
            let d2: Vec<f64> = ts.iter().map(|&x| phi(x)).collect();
            DiscontinuityRow {
                eps,
                norm_f: d1[0].abs() + holder_quotient(&ts, &d1, delta),
                norm_f_closed: (2.0 + 2f64.powf(4.0 / 3.0)) * eps,
                norm_gf: d2[0].abs() + holder_quotient(&ts, &d2, delta),
                chord: (phi(eps) - phi(0.0)).abs() / eps.powf(delta),
                chord_closed: discontinuity_chord(eps),
            }
        })
        .collect()
}

pub fn discontinuity_csv(rows: &[DiscontinuityRow]) -> String {
    let mut s = String::from("# g(x)=(x+x^(5/3))/2 on [-1,1], delta=2/3\neps,norm_f,norm_f_closed,norm_gf,chord,chord_closed\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{},{}", r.eps, r.norm_f, r.norm_f_closed, r.norm_gf, r.chord, r.chord_closed);
    }
    s
}

pub fn continuity_csv(rows: &[ContinuityRow]) -> String {
    let mut s = String::from("# |p(f)-p(f0)| against the continuity bound\neps,dist,dp,bound\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.eps, r.dist, r.dp, r.bound);
    }
    s
}

/// A finite symmetric word ball of `F`, with the smooth images of each element's inverse.
pub struct GroupBall<'a> {
    pub radius: usize,
    pub words: Vec<Vec<FLetter>>,
    pub maps: Vec<PLMap>,
    inverses: Vec<SmoothHomeo<'a>>,
}

impl<'a> GroupBall<'a> {
    pub fn new(radius: usize, f: &'a SmoothGenerator) -> Self {
        let (words, maps): (Vec<_>, Vec<_>) = f_ball(radius).into_iter().unzip();
        Self::from_elements(radius, words, maps, f)
    }

    pub fn from_elements(radius: usize, words: Vec<Vec<FLetter>>, maps: Vec<PLMap>, f: &'a SmoothGenerator) -> Self {
        let inverses = maps.iter().map(|h| theta_f(&h.inverse(), f)).collect();
        GroupBall { radius, words, maps, inverses }
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn index_of(&self, h: &PLMap) -> Option<usize> {
        self.maps.iter().position(|m| m == h)
    }

    /// `p_δ(h⁻¹ ∘ f)` for every `h` in the ball.
    pub fn pulled_back_p(&self, f: &SampledDiffeo, delta: f64) -> Vec<f64> {
        self.inverses.iter().map(|g| p_delta_from_log_derivs(&f.log_derivs_after(g), delta)).collect()
    }

    fn on_boundary(&self, i: usize) -> bool {
        self.radius > 0 && self.words[i].len() >= self.radius
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RDelta {
    pub value: f64,
    pub argmin: usize,
    pub word: String,
    pub word_len: usize,
    pub radius: usize,
    pub interior: bool,
}

fn r_from_ps(ball: &GroupBall, ps: &[f64]) -> Result<RDelta, HolderError> {
    let Some((argmin, &value)) = ps.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)) else {
        return Err(HolderError::BallTooSmall { radius: ball.radius, word: String::new() });
    };
    let word = f_word_string(&ball.words[argmin]);
    if ball.on_boundary(argmin) {
        return Err(HolderError::BallTooSmall { radius: ball.radius, word });
    }
    Ok(RDelta { value, argmin, word, word_len: ball.words[argmin].len(), radius: ball.radius, interior: true })
}

/// `min_h p_δ(h⁻¹ ∘ f)` over the ball.
pub fn r_delta(f: &SampledDiffeo, ball: &GroupBall, delta: f64) -> Result<RDelta, HolderError> {
    r_from_ps(ball, &ball.pulled_back_p(f, delta))
}

fn cutoff(t: f64) -> f64 {
    if t <= 1.0 { (1.0 - t).max(0.0) } else { 0.0 }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiDelta {
    pub value: f64,
    pub r: RDelta,
    /// `(ball index, normalized weight)` for each element with nonzero weight.
    pub active: Vec<(usize, f64)>,
}

/// The weighted average `π_δF(f)` of `F` over the ball.
pub fn pi_delta(big_f: impl Fn(&PLMap) -> f64, f: &SampledDiffeo, ball: &GroupBall, delta: f64) -> Result<PiDelta, HolderError> {
    let ps = ball.pulled_back_p(f, delta);
    let r = r_from_ps(ball, &ps)?;
    let raw: Vec<(usize, f64)> = ps
        .iter()
        .enumerate()
        .map(|(i, p)| (i, cutoff(p - r.value)))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    if let Some(&(i, _)) = raw.iter().find(|&&(i, _)| ball.on_boundary(i)) {
        return Err(HolderError::BallTooSmall { radius: ball.radius, word: f_word_string(&ball.words[i]) });
    }
    let total: f64 = raw.iter().map(|w| w.1).sum();
    let active: Vec<(usize, f64)> = raw.into_iter().map(|(i, w)| (i, w / total)).collect();
    let value = active.iter().map(|&(i, w)| w * big_f(&ball.maps[i])).sum();
    Ok(PiDelta { value, r, active })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_pair_quotients_agree() {
        let vals: Vec<f64> = (0..=40).map(|i| ((i as f64) / 40.0).powi(2)).collect();
        let ts: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
        let a = grid_quotient(&vals, 0.3);
        let b = holder_quotient(&ts, &vals, 0.3);
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn constructor_rejects_bad_samples() {
        assert!(SampledDiffeo::new(vec![0.0, 0.6, 0.5, 1.0], vec![1.0; 4]).is_err());
        assert!(SampledDiffeo::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(SampledDiffeo::new(vec![0.1, 1.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn trig_inverse_round_trips() {
        let f = TrigDiffeo::new(vec![0.4, -0.3, 0.2]);
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            assert!((f.inverse_eval(f.eval(t)) - t).abs() < 1e-14);
        }
    }
}
