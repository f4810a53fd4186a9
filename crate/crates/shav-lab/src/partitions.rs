//! Partitions of `[0,1]`, the density `u_n` on `D_n`, and its samplers.

use crate::special::{t_n, v, v1};
use crate::wiener::{pairwise_sum, Estimate, RngConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("partition points must increase strictly inside (0,1)")]
    NotIncreasing,
    #[error("chain diverged: dilation acceptance {0:.4} below 1%")]
    ChainDiverged(f64),
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// A point of `D_n`, stored as the logarithms of its `n` lengths so that extreme ratios stay representable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Partition {
    log_l: Vec<f64>,
}

impl Partition {
    /// From interior points `x_1 < … < x_{n−1}`.
    pub fn from_points(x: &[f64]) -> Result<Self, PartitionError> {
        let mut pts = vec![0.0];
        pts.extend_from_slice(x);
        pts.push(1.0);
        if pts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(PartitionError::NotIncreasing);
        }
        Ok(Partition { log_l: pts.windows(2).map(|w| (w[1] - w[0]).ln()).collect() })
    }

    /// From unnormalized log-lengths.
    pub fn from_log_lengths(log_l: &[f64]) -> Self {
        let s = log_sum_exp(log_l);
        Partition { log_l: log_l.iter().map(|l| l - s).collect() }
    }

    pub fn uniform(n: usize) -> Self {
        Partition { log_l: vec![-(n as f64).ln(); n] }
    }

    pub fn n(&self) -> usize {
        self.log_l.len()
    }

    pub fn log_lengths(&self) -> &[f64] {
        &self.log_l
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.log_l.iter().map(|l| l.exp()).collect()
    }

    /// `x_1, …, x_{n−1}`.
    pub fn points(&self) -> Vec<f64> {
        let l = self.lengths();
        let mut acc = 0.0;
        l[..l.len() - 1].iter().map(|d| {
            acc += d;
            acc
        }).collect()
    }

    pub fn mesh(&self) -> f64 {
        self.log_l.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp()
    }

    /// `½|log l_k − log l_{k−1}|` for `k = 1..n`, with `l_0 = l_n`.
    pub fn ratio_args(&self) -> Vec<f64> {
        let n = self.n();
        (0..n).map(|k| 0.5 * (self.log_l[k] - self.log_l[(k + n - 1) % n]).abs()).collect()
    }

    /// `min_k (l_k + l_{k−1}) / (2√(l_k l_{k−1}))` through `cosh` of the log form.
    pub fn min_ratio(&self) -> f64 {
        self.ratio_args().into_iter().fold(f64::INFINITY, f64::min).cosh()
    }
}

/// The coordinates `l`, `y`, `z` of a partition and the Jacobians of `A`, `B`, `C⁻¹`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transforms {
    pub l: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub jac_a: f64,
    pub jac_b: f64,
    pub jac_c_inv: f64,
}

/// `y_k`, `z_k` for `k = 0..n` (so `y_0 = y_n = 1`, `z_0 = z_n = 0`).
pub fn transforms(x: &Partition) -> Transforms {
    let n = x.n();
    let ln_n = x.log_l[n - 1];
    let l = x.lengths();
    let mut z = vec![0.0];
    z.extend(x.log_l[..n - 1].iter().map(|lk| 0.5 * (lk - ln_n)));
    z.push(0.0);
    let y: Vec<f64> = z.iter().map(|zk| (2.0 * zk).exp()).collect();
    let jac_c_inv = 2f64.powi(n as i32 - 1) * y[1..n].iter().product::<f64>();
    Transforms { jac_b: (-(n as f64) * ln_n).exp(), l, y, z, jac_a: 1.0, jac_c_inv }
}

/// Inverse of `C∘B∘A` from `z_1, …, z_{n−1}`.
pub fn from_z(z: &[f64]) -> Partition {
    let mut log_l: Vec<f64> = z.iter().map(|zk| 2.0 * zk).collect();
    log_l.push(0.0);
    Partition::from_log_lengths(&log_l)
}

/// Recovers `x` from `y_1, …, y_{n−1}` by `x_k = Σ_{j≤k} y_j / (1 + Σ y_j)`.
pub fn points_from_y(y: &[f64]) -> Vec<f64> {
    let s: f64 = y.iter().sum();
    let mut acc = 0.0;
    y.iter().map(|yk| {
        acc += yk;
        acc / (1.0 + s)
    }).collect()
}

/// The three forms of each ratio argument: from `x`, from `l`, from `y`.
pub fn same_ratios(points: &[f64]) -> Vec<[f64; 3]> {
    let n = points.len() + 1;
    let xs = |k: i64| -> f64 {
        if k == -1 { points[n - 2] - 1.0 } else if k == 0 { 0.0 } else if k as usize == n { 1.0 } else { points[k as usize - 1] }
    };
    let l: Vec<f64> = (1..=n as i64).map(|k| xs(k) - xs(k - 1)).collect();
    let ln = l[n - 1];
    let y: Vec<f64> = l.iter().map(|lk| lk / ln).collect();
    let r = |a: f64, b: f64| (a + b) / (2.0 * (a * b).sqrt());
    (1..=n)
        .map(|k| {
            let prev = if k == 1 { n } else { k - 1 };
            let kx = k as i64;
            let rx = (xs(kx) - xs(kx - 2)) / (2.0 * ((xs(kx) - xs(kx - 1)) * (xs(kx - 1) - xs(kx - 2))).sqrt());
            [rx, r(l[k - 1], l[prev - 1]), r(y[k - 1], y[prev - 1])]
        })
        .collect()
}

pub fn log_u1n(x: &Partition) -> f64 {
    -x.log_l.iter().sum::<f64>() + x.ratio_args().iter().map(|&t| v1(t).ln()).sum::<f64>()
}

pub fn u1n(x: &Partition) -> f64 {
    log_u1n(x).exp()
}

/// `u_{1,n}` straight from the `x`-coordinate display, for moderate partitions.
pub fn u1n_x_formula(points: &[f64]) -> f64 {
    same_ratios(points)
        .iter()
        .zip(Partition::from_points(points).unwrap().lengths())
        .map(|(r, lk)| v(r[0].max(1.0)).unwrap() / lk)
        .product()
}

pub fn un(x: &Partition, jn_value: f64) -> f64 {
    u1n(x) / jn_value
}

/// `J_n = 2^{n−1} T_{2n−1}`.
pub fn jn(n: u32) -> f64 {
    assert!((1..=15).contains(&n));
    2f64.powi(n as i32 - 1) * t_n(2 * n - 1)
}

/// `J_n / (2^{3n−1} (2n)!)`.
pub fn jn_ratio(n: u32) -> f64 {
    let log_fact: f64 = (1..=2 * n).map(|j| (j as f64).ln()).sum();
    (jn(n).ln() - (3 * n - 1) as f64 * std::f64::consts::LN_2 - log_fact).exp()
}

/// Symmetric Pareto proposal for the log-ratio coordinates `s_k = log(l_k/l_n)`.
const IS_ALPHA: f64 = 0.5;
const IS_SCALE: f64 = 2.0;

fn is_draw(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u: f64 = rng.random();
    let mag = IS_SCALE * ((1.0 - u).powf(-1.0 / IS_ALPHA) - 1.0);
    let s = if rng.random::<bool>() { mag } else { -mag };
    let log_q = (0.5 * IS_ALPHA / IS_SCALE).ln() - (IS_ALPHA + 1.0) * (1.0 + mag / IS_SCALE).ln();
    (s, log_q)
}

/// One importance draw on `D_n`: the partition and its weight `u_{1,n}(x)/q(x)`.
pub fn importance_draw(n: usize, rng: &mut ChaCha8Rng) -> (Partition, f64) {
    let mut s = Vec::with_capacity(n);
    let mut log_q = 0.0;
    for _ in 0..n - 1 {
        let (sk, lq) = is_draw(rng);
        s.push(sk);
        log_q += lq;
    }
    s.push(0.0);
    let x = Partition::from_log_lengths(&s);
    // density of x under the proposal: q(s) / |dx/ds|, |dx/ds| = l_n^n Π y_k
    let log_dx_ds = n as f64 * x.log_l[n - 1] + s[..n - 1].iter().sum::<f64>();
    let w = (log_u1n(&x) + log_dx_ds - log_q).exp();
    (x, w)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImportanceRun {
    pub n: usize,
    pub samples: usize,
    pub jn: Estimate,
}

/// Direct Monte Carlo estimate of `J_n` over `D_n`.
pub fn jn_direct_mc(n: usize, samples: usize, cfg: &RngConfig) -> ImportanceRun {
    let w = importance_weights(n, samples, cfg, |_| ());
    ImportanceRun { n, samples, jn: Estimate::from_samples(&w.iter().map(|p| p.0).collect::<Vec<_>>()) }
}

fn importance_weights<T: Send>(n: usize, samples: usize, cfg: &RngConfig, stat: impl Fn(&Partition) -> T + Sync) -> Vec<(f64, T)> {
    const BLOCK: usize = 4096;
    let blocks = samples.div_ceil(BLOCK);
    let stat = &stat;
    (0..blocks as u64)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = cfg.item(b);
            let len = BLOCK.min(samples - b as usize * BLOCK);
            (0..len).map(move |_| {
                let (x, w) = importance_draw(n, &mut rng);
                (w, stat(&x))
            }).collect::<Vec<_>>()
        })
        .collect()
}

/// Self-normalized importance estimate of `E_{u_n}[f]` with delta-method standard error.
pub fn importance_expectation(n: usize, samples: usize, cfg: &RngConfig, f: impl Fn(&Partition) -> f64 + Sync) -> Estimate {
    let wf = importance_weights(n, samples, cfg, f);
    let sw = pairwise_sum(&wf.iter().map(|p| p.0).collect::<Vec<_>>());
    let mean = pairwise_sum(&wf.iter().map(|p| p.0 * p.1).collect::<Vec<_>>()) / sw;
    let var = pairwise_sum(&wf.iter().map(|p| (p.0 * (p.1 - mean)).powi(2)).collect::<Vec<_>>()) / (sw * sw);
    Estimate { mean, stderr: var.sqrt(), n: samples }
}

/// Settings for the t-coordinate chains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainConfig {
    pub chains: usize,
    pub burn_in: usize,
    pub samples: usize,
    pub thin: usize,
    /// Standard deviation of `log λ` in the global dilation move.
    pub dilation_sigma: f64,
    pub rng: RngConfig,
}

impl ChainConfig {
    pub fn new(seed: u64) -> Self {
        ChainConfig { chains: 64, burn_in: 1000, samples: 200, thin: 5, dilation_sigma: 1.0, rng: RngConfig::new(seed) }
    }
}

/// Exact draw from the density `∝ 1/√((1+(t−a)²)(1+(t−b)²))` by rejection from a three-piece envelope.
pub fn conditional_draw<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> (f64, u32) {
    let ((da, _), tries) = conditional_split(b - a, rng);
    (a + da, tries)
}

/// Splits `D` as `t − a` and `b − t` for `t` drawn as in [`conditional_draw`] with `b − a = D`.
/// The smaller of the two parts is computed without cancellation.
pub fn conditional_split<R: Rng + ?Sized>(sum: f64, rng: &mut R) -> ((f64, f64), u32) {
    let d = sum.abs();
    let l = d.ln_1p();
    let small = d < 1e-12;
    let m_tail = if small { 1.0 } else { l / d };
    let m_mid = 2.0 * l / (2.0 + d);
    let total = 2.0 * m_tail + m_mid;
    let mut tries = 0;
    loop {
        tries += 1;
        let pick = rng.random::<f64>() * total;
        let v: f64 = rng.random();
        // (u, d − u): offsets from the lower and the upper neighbour
        let (u, w) = if pick < m_tail || pick > m_tail + m_mid {
            let s = if small { v / (1.0 - v) } else { (v * l).exp_m1() / -((v - 1.0) * l).exp_m1() };
            if pick < m_tail { (-s, d + s) } else { (d + s, -s) }
        } else {
            let w = (v * l).exp_m1();
            if rng.random::<bool>() { (w, d - w) } else { (d - w, w) }
        };
        let (p, q) = (u.abs(), w.abs());
        let acc = 0.5 * (1.0 + p) / p.hypot(1.0) * (1.0 + q) / q.hypot(1.0);
        if rng.random::<f64>() < acc {
            let parts = if sum >= 0.0 { (u, w) } else { (-w, -u) };
            return (parts, tries);
        }
    }
}

fn log1p_sq(d: f64) -> f64 {
    let a = d.abs();
    if a > 1e8 { 2.0 * a.ln() + (1.0 / (a * a)).ln_1p() } else { (a * a).ln_1p() }
}

/// One chain's output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainRun {
    /// `z_k − z_{k−1}` for `k = 1..n` of each retained state.
    pub dz: Vec<Vec<f64>>,
    pub dilation_acceptance: f64,
    pub draw_acceptance: f64,
}

/// Heat-bath sweeps over the odd then even interior sites, followed by a dilation `t ↦ λt`.
/// The state is kept as the increments `t_k − t_{k−1}`.
pub fn run_chain(n: usize, cfg: &ChainConfig, rng: &mut ChaCha8Rng) -> ChainRun {
    let m = 2 * n;
    let mut d = vec![0.0; m];
    let (mut dil_acc, mut draws, mut tries) = (0usize, 0u64, 0u64);
    let mut out = Vec::with_capacity(cfg.samples);
    let total = cfg.burn_in + cfg.samples * cfg.thin;
    for sweep in 0..total {
        for parity in [0, 1] {
            for j in (parity..m - 1).step_by(2) {
                let ((left, right), k) = conditional_split(d[j] + d[j + 1], rng);
                d[j] = left;
                d[j + 1] = right;
                draws += 1;
                tries += k as u64;
            }
        }
        let ll = cfg.dilation_sigma * rng.sample::<f64, _>(StandardNormal);
        let lam = ll.exp();
        let delta: f64 = d.iter().map(|&x| -0.5 * (log1p_sq(lam * x) - log1p_sq(x))).sum::<f64>() + (m - 1) as f64 * ll;
        if rng.random::<f64>().ln() < delta {
            d.iter_mut().for_each(|x| *x *= lam);
            dil_acc += 1;
        }
        if sweep >= cfg.burn_in && (sweep - cfg.burn_in + 1).is_multiple_of(cfg.thin) {
            out.push(d.chunks(2).map(|c| c[0] + c[1]).collect());
        }
    }
    ChainRun { dz: out, dilation_acceptance: dil_acc as f64 / total as f64, draw_acceptance: draws as f64 / tries as f64 }
}

/// `z_1, …, z_{n−1}` from the increments.
pub fn z_from_increments(dz: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    dz[..dz.len() - 1].iter().map(|x| {
        acc += x;
        acc
    }).collect()
}

/// Samples from `u_n` on independent chains.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSet {
    pub n: usize,
    pub config: ChainConfig,
    pub chains: Vec<ChainRun>,
}

impl SampleSet {
    pub fn partitions(&self) -> impl Iterator<Item = Partition> + '_ {
        self.chains.iter().flat_map(|c| c.dz.iter().map(|z| from_z(&z_from_increments(z))))
    }

    pub fn dilation_acceptance(&self) -> f64 {
        self.chains.iter().map(|c| c.dilation_acceptance).sum::<f64>() / self.chains.len() as f64
    }

    /// Mean of `f`, standard error from the spread of per-chain means, and the implied effective sample size.
    pub fn estimate(&self, f: impl Fn(&Partition) -> f64 + Sync) -> (Estimate, f64) {
        self.estimate_increments(|dz| f(&from_z(&z_from_increments(dz))))
    }

    /// As [`SampleSet::estimate`] for a statistic of the increments `z_k − z_{k−1}`.
    pub fn estimate_increments(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> (Estimate, f64) {
        let per_chain: Vec<(Vec<f64>, f64)> = self
            .chains
            .par_iter()
            .map(|c| {
                let v: Vec<f64> = c.dz.iter().map(|z| f(z)).collect();
                let mean = pairwise_sum(&v) / v.len() as f64;
                (v, mean)
            })
            .collect();
        let means: Vec<f64> = per_chain.iter().map(|p| p.1).collect();
        let chain_est = Estimate::from_samples(&means);
        let all: Vec<f64> = per_chain.iter().flat_map(|p| p.0.iter().copied()).collect();
        let pooled = Estimate::from_samples(&all);
        let var = pooled.stderr.powi(2) * all.len() as f64;
        let ess = if chain_est.stderr > 0.0 { (var / chain_est.stderr.powi(2)).min(all.len() as f64) } else { all.len() as f64 };
        (Estimate { mean: chain_est.mean, stderr: chain_est.stderr, n: all.len() }, ess)
    }
}

pub fn sample_un(n: usize, cfg: &ChainConfig) -> Result<SampleSet, PartitionError> {
    assert!(n >= 2);
    let chains: Vec<ChainRun> = (0..cfg.chains as u64).into_par_iter().map(|c| run_chain(n, cfg, &mut cfg.rng.item(c))).collect();
    let set = SampleSet { n, config: *cfg, chains };
    let acc = set.dilation_acceptance();
    if acc < 0.01 {
        return Err(PartitionError::ChainDiverged(acc));
    }
    Ok(set)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassRow {
    pub n: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub ess: f64,
    /// For S-L6: `n` times the mean per-pair probability.
    pub n_times_pair: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassTable {
    pub check: String,
    pub parameter: f64,
    pub rows: Vec<MassRow>,
    /// Every consecutive pair decreases by more than two combined standard errors.
    pub strictly_decreasing: bool,
}

fn decreasing(rows: &[MassRow]) -> bool {
    rows.windows(2).all(|w| w[0].estimate - w[1].estimate > 2.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt())
}

/// `P_{u_n}(mesh > ε)` for each `n`.
pub fn check_sl5(ns: &[usize], eps: f64, cfg: &ChainConfig) -> Result<MassTable, PartitionError> {
    let mut rows = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        if eps >= 1.0 {
            rows.push(MassRow { n, estimate: 0.0, stderr: 0.0, ess: f64::INFINITY, n_times_pair: None });
            continue;
        }
        let c = ChainConfig { rng: cfg.rng.derive(i as u64), ..*cfg };
        let set = sample_un(n, &c)?;
        let (e, ess) = set.estimate(|x| if x.mesh() > eps { 1.0 } else { 0.0 });
        rows.push(MassRow { n, estimate: e.mean, stderr: e.stderr, ess, n_times_pair: None });
    }
    Ok(MassTable { check: "S-L5".into(), parameter: eps, strictly_decreasing: decreasing(&rows), rows })
}

/// `P_{u_n}(min_k (l_k+l_{k−1})/(2√(l_k l_{k−1})) ≤ r)` for each `n`.
pub fn check_sl6(ns: &[usize], r: f64, cfg: &ChainConfig) -> Result<MassTable, PartitionError> {
    let a = r.acosh();
    let mut rows = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        if r <= 1.0 {
            rows.push(MassRow { n, estimate: 0.0, stderr: 0.0, ess: f64::INFINITY, n_times_pair: Some(0.0) });
            continue;
        }
        let c = ChainConfig { rng: cfg.rng.derive(i as u64), ..*cfg };
        let set = sample_un(n, &c)?;
        let (e, ess) = set.estimate_increments(|dz| if dz.iter().any(|t| t.abs() <= a) { 1.0 } else { 0.0 });
        let (pair, _) = set.estimate_increments(|dz| dz.iter().filter(|t| t.abs() <= a).count() as f64 / n as f64);
        rows.push(MassRow { n, estimate: e.mean, stderr: e.stderr, ess, n_times_pair: Some(n as f64 * pair.mean) });
    }
    Ok(MassTable { check: "S-L6".into(), parameter: r, strictly_decreasing: decreasing(&rows), rows })
}

/// The proof's per-pair bound `c₂πa(1+a)/(c₁(2n−1)(2n))`.
pub fn sl6_pair_bound(n: usize, r: f64, c1: f64, c2: f64) -> f64 {
    let a = r.acosh();
    c2 * std::f64::consts::PI * a * (1.0 + a) / (c1 * (2 * n - 1) as f64 * (2 * n) as f64)
}

/// Largest `(1+p²) / ((1+q²)·4(1+a)²)` over a grid with `|p| ≤ |q| + a`.
pub fn odd_inequality_max(a: f64, grid: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for &q in grid {
        for &p in grid {
            if p.abs() <= q.abs() + a {
                worst = worst.max((1.0 + p * p) / ((1.0 + q * q) * 4.0 * (1.0 + a).powi(2)));
            }
        }
    }
    worst
}

pub fn mass_table_csv(table: &MassTable, cfg: &ChainConfig) -> String {
    let header = serde_json::json!({ "check": table.check, "parameter": table.parameter, "chain": cfg });
    let mut s = format!("# {header}\nn,estimate,stderr,ess\n");
    for r in &table.rows {
        let _ = writeln!(s, "{},{},{},{}", r.n, r.estimate, r.stderr, r.ess);
    }
    s
}
