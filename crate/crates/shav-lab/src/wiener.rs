//! Wiener measure on `C₀[0,1]`, the path/diffeomorphism correspondence, and moment estimators.

use crate::holder::{grid_quotient, SampledDiffeo};
use crate::quad::cumulative_cubic;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write as _;
use std::path::Path;

/// Counter-based stream addressing: every item index owns an independent ChaCha stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngConfig {
    pub seed: u64,
    pub stream: u64,
    pub counter: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngConfig {
    pub fn new(seed: u64) -> Self {
        RngConfig { seed, stream: 0, counter: 0 }
    }

    /// A child configuration for an independent sub-experiment.
    pub fn derive(&self, label: u64) -> Self {
        RngConfig { seed: splitmix(self.seed ^ splitmix(self.stream.wrapping_add(label))), stream: label, counter: self.counter }
    }

    /// The generator for item `i`, identical no matter which thread asks for it.
    pub fn item(&self, i: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix(self.seed ^ self.stream.rotate_left(32)));
        rng.set_stream(self.counter.wrapping_add(i));
        rng
    }
}

/// Values of a real function on the uniform grid `i/m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(values.len() >= 2);
        GridFunction { values }
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Self {
        GridFunction::new((0..=m).map(|i| f(i as f64 / m as f64)).collect())
    }

    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn at_time(&self, s: f64) -> f64 {
        let m = self.m();
        let u = (s * m as f64).clamp(0.0, m as f64);
        let i = (u.floor() as usize).min(m - 1);
        let w = u - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Every `k`-th sample.
    pub fn coarsen(&self, k: usize) -> GridFunction {
        assert!(self.m().is_multiple_of(k));
        GridFunction::new(self.values.iter().step_by(k).copied().collect())
    }
}

/// A Brownian path stored by its grid increments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WienerPath {
    pub increments: Vec<f64>,
}

impl WienerPath {
    pub fn m(&self) -> usize {
        self.increments.len()
    }

    pub fn to_grid(&self) -> GridFunction {
        let mut v = Vec::with_capacity(self.m() + 1);
        v.push(0.0);
        let mut acc = 0.0;
        for d in &self.increments {
            acc += d;
            v.push(acc);
        }
        GridFunction::new(v)
    }

    /// `x(t) ↦ x(1−t) − x(1)`, which reverses the increment sequence.
    pub fn time_reverse(&self) -> WienerPath {
        WienerPath { increments: self.increments.iter().rev().copied().collect() }
    }
}

pub fn sample_path<R: Rng + ?Sized>(m: usize, rng: &mut R) -> WienerPath {
    assert!(m >= 2);
    let sd = (1.0 / m as f64).sqrt();
    WienerPath { increments: (0..m).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect() }
}

/// `T(x)(t) = x(1−t) − x(1)` on grid values.
pub fn time_reverse(x: &GridFunction) -> GridFunction {
    let m = x.m();
    GridFunction::new((0..=m).map(|i| x.values[m - i] - x.values[m]).collect())
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Wiener mass of the cylinder whose increments `x(t_k) − x(t_{k−1})` lie in `[lo_k, hi_k]`.
pub fn cylinder_probability(times: &[f64], boxes: &[(f64, f64)]) -> f64 {
    assert_eq!(times.len(), boxes.len());
    let mut prev = 0.0;
    let mut p = 1.0;
    for (&t, &(lo, hi)) in times.iter().zip(boxes) {
        assert!(t > prev && t <= 1.0, "times must increase in (0,1]");
        let sd = (t - prev).sqrt();
        p *= normal_cdf(hi / sd) - normal_cdf(lo / sd);
        prev = t;
    }
    p
}

/// `A(q)(t) = log q'(t) − log q'(0)`.
pub fn map_a(q: &SampledDiffeo) -> GridFunction {
    let l0 = q.derivs()[0].ln();
    GridFunction::new(q.derivs().iter().map(|d| d.ln() - l0).collect())
}

/// `B(x)(t) = ∫₀ᵗ e^x / ∫₀¹ e^x`, derivatives in closed form `e^{x(t)}/∫e^x`.
pub fn map_b(x: &GridFunction) -> SampledDiffeo {
    SampledDiffeo::from_log_deriv(&x.values)
}

/// Grid quantities of `q = B(x)` needed by the moment estimators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathStats {
    /// `∫₀¹ e^x` by the cumulative cubic rule.
    pub z: f64,
    pub x1: f64,
    /// `∫₀¹ q'(t)² dt`.
    pub energy: f64,
}

impl PathStats {
    pub fn of(x: &GridFunction) -> Self {
        let m = x.m();
        let h = 1.0 / m as f64;
        let e: Vec<f64> = x.values.iter().map(|v| v.exp()).collect();
        let z = cumulative_cubic(&e, h)[m];
        let e2: Vec<f64> = e.iter().map(|v| v * v).collect();
        PathStats { z, x1: x.values[m], energy: cumulative_cubic(&e2, h)[m] / (z * z) }
    }

    pub fn q0(&self) -> f64 {
        1.0 / self.z
    }

    pub fn q1(&self) -> f64 {
        self.x1.exp() / self.z
    }
}

/// Pairwise summation, order fixed by the slice.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_samples(v: &[f64]) -> Self {
        let n = v.len();
        let mean = pairwise_sum(v) / n as f64;
        let dev: Vec<f64> = v.iter().map(|x| (x - mean).powi(2)).collect();
        let var = if n > 1 { pairwise_sum(&dev) / (n - 1) as f64 } else { 0.0 };
        Estimate { mean, stderr: (var / n as f64).sqrt(), n }
    }

    /// `|mean − target| ≤ k·stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }
}

/// Samples `n` paths in parallel; path `i` always uses stream `i`.
pub fn sample_paths(m: usize, n: usize, cfg: &RngConfig) -> Vec<WienerPath> {
    (0..n as u64).into_par_iter().map(|i| sample_path(m, &mut cfg.item(i))).collect()
}

/// Maps each of `n` paths through `f` in parallel, returning results in path order.
pub fn map_paths<T: Send>(m: usize, n: usize, cfg: &RngConfig, f: impl Fn(&WienerPath) -> T + Sync) -> Vec<T> {
    (0..n as u64).into_par_iter().map(|i| f(&sample_path(m, &mut cfg.item(i)))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Zero,
    One,
}

/// `M_l = E[q'(side)^l]` for `q = B(x)`.
pub fn moment_ml(l: u32, side: Side, n: usize, m: usize, cfg: &RngConfig) -> Estimate {
    let v = map_paths(m, n, cfg, |p| {
        let s = PathStats::of(&p.to_grid());
        match side {
            Side::Zero => s.q0(),
            Side::One => s.q1(),
        }
        .powi(l as i32)
    });
    Estimate::from_samples(&v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentRow {
    pub l: u32,
    pub side0: Estimate,
    pub side1: Estimate,
    /// Paired estimate of `q'(1)^l − q'(0)^l` on the same paths.
    pub diff: Estimate,
    pub upper_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub m: usize,
    pub paths: usize,
    pub rows: Vec<MomentRow>,
    pub energy: Estimate,
    pub energy_bound: f64,
    pub m1_lower_bound: f64,
    pub c4: f64,
}

/// All moment quantities from a single batch of paths.
pub fn moment_report(max_l: u32, n: usize, m: usize, cfg: &RngConfig) -> MomentReport {
    let stats = map_paths(m, n, cfg, |p| PathStats::of(&p.to_grid()));
    let rows: Vec<MomentRow> = (1..=max_l)
        .map(|l| {
            let a: Vec<f64> = stats.iter().map(|s| s.q0().powi(l as i32)).collect();
            let b: Vec<f64> = stats.iter().map(|s| s.q1().powi(l as i32)).collect();
            let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| y - x).collect();
            MomentRow {
                l,
                side0: Estimate::from_samples(&a),
                side1: Estimate::from_samples(&b),
                diff: Estimate::from_samples(&d),
                upper_bound: (0.5 * (l * l) as f64).exp(),
            }
        })
        .collect();
    let energy = Estimate::from_samples(&stats.iter().map(|s| s.energy).collect::<Vec<_>>());
    let m1 = rows.first().map_or(f64::NAN, |r| r.side0.mean);
    let m2 = rows.get(1).map_or(f64::NAN, |r| r.side0.mean);
    MomentReport {
        m,
        paths: n,
        c4: c4(m1, m2, energy.mean),
        rows,
        energy,
        energy_bound: (std::f64::consts::E.powi(2) - 1.0) / 2.0,
        m1_lower_bound: m1_lower_bound(),
    }
}

pub fn m1_lower_bound() -> f64 {
    1.0 / (2.0 * (0.5f64.exp() - 1.0))
}

pub fn c4(m1: f64, m2: f64, energy: f64) -> f64 {
    1.0 + m1 + m2 + energy
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpMoment {
    pub s: f64,
    pub l: f64,
    pub estimate: Estimate,
    pub exact: f64,
    pub skewness: f64,
}

/// `E[e^{−l x(s)}]` from `n` paths on a grid of size `m` containing `s`.
pub fn exp_moment(s: f64, l: f64, n: usize, m: usize, cfg: &RngConfig) -> ExpMoment {
    let k = (s * m as f64).round() as usize;
    assert!(k >= 1 && k <= m && ((k as f64 / m as f64) - s).abs() < 1e-12, "s must be a grid point");
    let v = map_paths(m, n, cfg, |p| (-l * p.increments[..k].iter().sum::<f64>()).exp());
    let est = Estimate::from_samples(&v);
    let sd = est.stderr * (n as f64).sqrt();
    let third: Vec<f64> = v.iter().map(|x| ((x - est.mean) / sd).powi(3)).collect();
    ExpMoment { s, l, estimate: est, exact: (s * l * l / 2.0).exp(), skewness: pairwise_sum(&third) / n as f64 }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderSupportReport {
    pub delta: f64,
    pub levels: Vec<usize>,
    /// Median over paths of the grid Hölder quotient at each level.
    pub medians: Vec<f64>,
    /// Median of the ratio between consecutive levels.
    pub growth: Vec<f64>,
    /// Paths whose finest quotient stays within `threshold` times their coarsest.
    pub bounded_fraction: f64,
    pub threshold: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
}

/// Grid Hölder quotients of sampled paths under refinement.
pub fn holder_support_check(delta: f64, n: usize, levels: &[usize], threshold: f64, cfg: &RngConfig) -> HolderSupportReport {
    let finest = *levels.iter().max().unwrap();
    let per_path: Vec<Vec<f64>> = map_paths(finest, n, cfg, |p| {
        let g = p.to_grid();
        levels
            .iter()
            .map(|&lv| {
                grid_quotient(&g.coarsen(finest / lv).values, delta)
            })
            .collect()
    });
    let medians = (0..levels.len()).map(|j| median(per_path.iter().map(|q| q[j]).collect())).collect();
    let growth = (1..levels.len()).map(|j| median(per_path.iter().map(|q| q[j] / q[j - 1]).collect())).collect();
    let last = levels.len() - 1;
    let bounded = per_path.iter().filter(|q| q[last] <= threshold * q[0]).count();
    HolderSupportReport { delta, levels: levels.to_vec(), medians, growth, bounded_fraction: bounded as f64 / n as f64, threshold }
}

/// `E[∫ q'(t)² dt]`.
pub fn i_energy(n: usize, m: usize, cfg: &RngConfig) -> Estimate {
    let v = map_paths(m, n, cfg, |p| PathStats::of(&p.to_grid()).energy);
    Estimate::from_samples(&v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncrementRow {
    pub interval: (f64, f64),
    pub order: u32,
    pub forward: Estimate,
    pub reversed: Estimate,
    pub diff: Estimate,
}

/// Increment moments of `x` and `T(x)` over the same intervals.
pub fn increment_table(intervals: &[(f64, f64)], orders: &[u32], n: usize, m: usize, cfg: &RngConfig) -> Vec<IncrementRow> {
    let paths = map_paths(m, n, cfg, |p| (p.to_grid(), p.time_reverse().to_grid()));
    let mut rows = Vec::new();
    for &(a, b) in intervals {
        for &k in orders {
            let inc = |g: &GridFunction| (g.at_time(b) - g.at_time(a)).powi(k as i32);
            let f: Vec<f64> = paths.iter().map(|(x, _)| inc(x)).collect();
            let r: Vec<f64> = paths.iter().map(|(_, y)| inc(y)).collect();
            let d: Vec<f64> = f.iter().zip(&r).map(|(p, q)| p - q).collect();
            rows.push(IncrementRow {
                interval: (a, b),
                order: k,
                forward: Estimate::from_samples(&f),
                reversed: Estimate::from_samples(&r),
                diff: Estimate::from_samples(&d),
            });
        }
    }
    rows
}

/// Monte Carlo estimate of a cylinder probability on grid-aligned times.
pub fn cylinder_mc(times: &[f64], boxes: &[(f64, f64)], n: usize, m: usize, cfg: &RngConfig) -> Estimate {
    let v = map_paths(m, n, cfg, |p| {
        let g = p.to_grid();
        let mut prev = 0.0;
        let mut inside = true;
        for (&t, &(lo, hi)) in times.iter().zip(boxes) {
            let d = g.at_time(t) - g.at_time(prev);
            inside &= d >= lo && d <= hi;
            prev = t;
        }
        if inside { 1.0 } else { 0.0 }
    });
    Estimate::from_samples(&v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpMeta {
    pub m: usize,
    pub paths: usize,
    pub rng: RngConfig,
    pub layout: String,
}

/// Writes `<stem>.bin` (little-endian f64, one path of `m+1` values after another) and `<stem>.json`.
pub fn dump_paths(dir: &Path, stem: &str, paths: &[WienerPath], rng: RngConfig) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let m = paths.first().map_or(0, |p| p.m());
    let mut bin = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("{stem}.bin")))?);
    for p in paths {
        for v in p.to_grid().values {
            bin.write_all(&v.to_le_bytes())?;
        }
    }
    bin.flush()?;
    let meta = DumpMeta { m, paths: paths.len(), rng, layout: "path-major f64le, m+1 values per path".into() };
    std::fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(&meta)?)
}

pub fn read_dump(dir: &Path, stem: &str) -> std::io::Result<(DumpMeta, Vec<GridFunction>)> {
    let meta: DumpMeta = serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{stem}.json")))?)?;
    let raw = std::fs::read(dir.join(format!("{stem}.bin")))?;
    let vals: Vec<f64> = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let grids = vals.chunks(meta.m + 1).map(|c| GridFunction::new(c.to_vec())).collect();
    Ok((meta, grids))
}
