//! Affine distortions, the stitching map `Q_n` and the finite-`n` functionals `L_{δ,n}`.

use crate::exact::PLMap;
use crate::holder::{pi_delta, GroupBall, HolderError, SampledDiffeo};
use crate::partitions::{from_z, sample_un, z_from_increments, ChainConfig, Partition, PartitionError};
use crate::schwarzian::SmoothTestMap;
use crate::wiener::{map_b, pairwise_sum, sample_path, Estimate, RngConfig};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

/// `t ↦ y + k·φ((t − x)/j)` on `[x, x + j]`, with `j` and `k` stored by their logarithms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortedPiece {
    pub phi: SampledDiffeo,
    pub x: f64,
    pub log_j: f64,
    pub y: f64,
    pub log_k: f64,
}

impl DistortedPiece {
    pub fn slope(&self) -> f64 {
        (self.log_k - self.log_j).exp()
    }

    fn local(&self, t: f64) -> f64 {
        if t <= self.x {
            return 0.0;
        }
        ((t - self.x) / self.log_j.exp()).min(1.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.y + self.log_k.exp() * self.phi.eval(self.local(t))
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.slope() * self.phi.deriv_at(self.local(t))
    }

    pub fn left_end_deriv(&self) -> f64 {
        self.slope() * self.phi.derivs()[0]
    }

    pub fn right_end_deriv(&self) -> f64 {
        self.slope() * self.phi.derivs()[self.phi.m()]
    }
}

/// `Q_n(y, φ)`: the pieces laid over the domain partition `x` that makes the map `C¹`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StitchedDiffeo {
    pub x: Partition,
    pub y: Partition,
    pub pieces: Vec<DistortedPiece>,
}

fn left_points(p: &Partition) -> Vec<f64> {
    let mut v = vec![0.0];
    v.extend(p.points());
    v
}

/// Stitches with the first domain length set to `e^{log_j1}` before the final rescaling.
pub fn stitch_from(y: &Partition, phi: &[SampledDiffeo], log_j1: f64) -> StitchedDiffeo {
    assert_eq!(y.n(), phi.len());
    let log_k = y.log_lengths();
    let mut log_j = Vec::with_capacity(phi.len());
    log_j.push(log_j1);
    for i in 1..phi.len() {
        // (k_i/j_i) φ_i′(0) = (k_{i−1}/j_{i−1}) φ_{i−1}′(1)
        let prev = &phi[i - 1];
        let next = log_j[i - 1] + log_k[i] - log_k[i - 1] + phi[i].derivs()[0].ln() - prev.derivs()[prev.m()].ln();
        log_j.push(next);
    }
    let x = Partition::from_log_lengths(&log_j);
    let (xs, ys) = (left_points(&x), left_points(y));
    let pieces = phi
        .iter()
        .enumerate()
        .map(|(i, p)| DistortedPiece { phi: p.clone(), x: xs[i], log_j: x.log_lengths()[i], y: ys[i], log_k: log_k[i] })
        .collect();
    StitchedDiffeo { x, y: y.clone(), pieces }
}

pub fn stitch(y: &Partition, phi: &[SampledDiffeo]) -> StitchedDiffeo {
    stitch_from(y, phi, 0.0)
}

impl StitchedDiffeo {
    fn piece_at(&self, t: f64) -> &DistortedPiece {
        let i = self.pieces.partition_point(|p| p.x < t).max(1) - 1;
        &self.pieces[i]
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t >= 1.0 {
            return 1.0;
        }
        self.piece_at(t).eval(t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.piece_at(t.min(1.0)).deriv(t)
    }

    /// Largest `|left − right|/right` over the interior knots.
    pub fn knot_mismatch(&self) -> f64 {
        self.pieces.windows(2).map(|w| {
            let (l, r) = (w[0].right_end_deriv(), w[1].left_end_deriv());
            (l - r).abs() / r
        }).fold(0.0, f64::max)
    }

    /// Values on the grid `i/m`.
    pub fn grid_values(&self, m: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..=m).map(|i| self.eval(i as f64 / m as f64)).collect();
        v[0] = 0.0;
        v[m] = 1.0;
        v
    }

    pub fn to_sampled(&self, m: usize) -> Result<SampledDiffeo, HolderError> {
        SampledDiffeo::new(self.grid_values(m), (0..=m).map(|i| self.deriv(i as f64 / m as f64)).collect())
    }
}

/// Bounded functionals of a diffeomorphism, read off its values on a uniform grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Functional {
    Constant(f64),
    /// `min(1, scale·‖f − id‖∞)`.
    SupDistance { scale: f64 },
    /// `f(1/2)`, clamped to `[0,1]`.
    Midpoint,
}

impl Functional {
    pub fn apply(&self, values: &[f64]) -> f64 {
        let m = values.len() - 1;
        match *self {
            Functional::Constant(c) => c,
            Functional::SupDistance { scale } => {
                let d = values.iter().enumerate().map(|(i, v)| (v - i as f64 / m as f64).abs()).fold(0.0, f64::max);
                (scale * d).min(1.0)
            }
            Functional::Midpoint => {
                assert!(m.is_multiple_of(2));
                values[m / 2].clamp(0.0, 1.0)
            }
        }
    }

    /// `F_g(f) = F(g⁻¹ ∘ f)`.
    pub fn apply_pulled(&self, g: &SmoothTestMap, values: &[f64]) -> f64 {
        if g.is_identity() {
            return self.apply(values);
        }
        let pulled: Vec<f64> = values.iter().map(|&v| g.inverse(v)).collect();
        self.apply(&pulled)
    }

    pub fn bound(&self) -> f64 {
        match *self {
            Functional::Constant(c) => c.abs(),
            _ => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StitchConfig {
    /// Grid of each sampled path.
    pub path_grid: usize,
    /// Grid on which functionals read the stitched map.
    pub eval_grid: usize,
    pub delta: f64,
    pub chain: ChainConfig,
    pub paths: RngConfig,
}

impl StitchConfig {
    /// About `samples` draws spread over the default chains.
    pub fn new(seed: u64, samples: usize) -> Self {
        let mut chain = ChainConfig::new(seed);
        chain.samples = samples.div_ceil(chain.chains).max(2);
        StitchConfig { path_grid: 256, eval_grid: 1024, delta: 1.0 / 3.0, chain, paths: RngConfig::new(seed).derive(0x5717) }
    }
}

/// `stat(Q_n(y, φ))` for every retained range partition `y ~ u_n` and fresh `φ_i = B(W_i)`, grouped by chain.
pub fn stitched_statistics<T: Send>(n: usize, cfg: &StitchConfig, stat: impl Fn(&StitchedDiffeo) -> T + Sync) -> Result<Vec<Vec<T>>, PartitionError> {
    let set = sample_un(n, &cfg.chain)?;
    let per_chain = cfg.chain.samples;
    Ok(set
        .chains
        .par_iter()
        .enumerate()
        .map(|(c, run)| {
            run.dz
                .iter()
                .enumerate()
                .map(|(s, dz)| {
                    let y = from_z(&z_from_increments(dz));
                    let mut rng = cfg.paths.item((c * per_chain + s) as u64);
                    let phi: Vec<SampledDiffeo> = (0..n).map(|_| map_b(&sample_path(cfg.path_grid, &mut rng).to_grid())).collect();
                    stat(&stitch(&y, &phi))
                })
                .collect()
        })
        .collect())
}

/// Mean over all samples with the standard error of the per-chain means.
pub fn chain_estimate(values: &[Vec<f64>]) -> Estimate {
    let means: Vec<f64> = values.iter().map(|v| pairwise_sum(v) / v.len() as f64).collect();
    let e = Estimate::from_samples(&means);
    Estimate { n: values.iter().map(Vec::len).sum(), ..e }
}

/// Monte Carlo estimate of `L_{δ,n}(F)`.
pub fn l_delta_n(f: &Functional, n: usize, cfg: &StitchConfig) -> Result<Estimate, PartitionError> {
    let m = cfg.eval_grid;
    Ok(chain_estimate(&stitched_statistics(n, cfg, |q| f.apply(&q.grid_values(m)))?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct S3Row {
    pub n: usize,
    pub estimate_f: f64,
    pub estimate_fg: f64,
    pub paired_diff: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct S3Table {
    pub functional: Functional,
    pub g: SmoothTestMap,
    pub rows: Vec<S3Row>,
    /// Each `|diff|` drops below its predecessor by more than two combined standard errors.
    pub decreasing: bool,
    /// The last difference lies within two standard errors of zero.
    pub indistinguishable_at_largest: bool,
    pub passed: bool,
}

/// Paired estimates of `L_{δ,n}(F_g) − L_{δ,n}(F)` over common samples.
pub fn check_s3(f: &Functional, g: &SmoothTestMap, ns: &[usize], cfg: &StitchConfig) -> Result<S3Table, PartitionError> {
    let m = cfg.eval_grid;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let pairs = stitched_statistics(n, cfg, |q| {
            let v = q.grid_values(m);
            (f.apply(&v), f.apply_pulled(g, &v))
        })?;
        let pick = |sel: fn(&(f64, f64)) -> f64| -> Vec<Vec<f64>> { pairs.iter().map(|c| c.iter().map(sel).collect()).collect() };
        let (ef, efg, diff) = (chain_estimate(&pick(|p| p.0)), chain_estimate(&pick(|p| p.1)), chain_estimate(&pick(|p| p.1 - p.0)));
        rows.push(S3Row { n, estimate_f: ef.mean, estimate_fg: efg.mean, paired_diff: diff.mean, stderr: diff.stderr });
    }
    let decreasing = rows.windows(2).all(|w| w[0].paired_diff.abs() - w[1].paired_diff.abs() > 2.0 * w[0].stderr.hypot(w[1].stderr));
    let last = rows.last().expect("at least one n");
    let indistinguishable_at_largest = last.paired_diff.abs() <= 2.0 * last.stderr;
    Ok(S3Table { functional: *f, g: *g, passed: decreasing || indistinguishable_at_largest, indistinguishable_at_largest, decreasing, rows })
}

pub fn s3_csv(t: &S3Table, cfg: &StitchConfig) -> String {
    let mut s = String::new();
    let header = serde_json::json!({ "functional": t.functional, "g": t.g, "config": cfg });
    writeln!(s, "# {header}").unwrap();
    writeln!(s, "n,estimate_F,estimate_Fg,paired_diff,stderr").unwrap();
    for r in &t.rows {
        writeln!(s, "{},{},{},{},{}", r.n, r.estimate_f, r.estimate_fg, r.paired_diff, r.stderr).unwrap();
    }
    s
}

#[derive(Debug, thiserror::Error)]
pub enum MeanError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Holder(#[from] HolderError),
}

/// Estimate of `L_{δ,n}(π_δF)` for `F` on the elements of a ball.
pub fn mean_on_group(big_f: impl Fn(&PLMap) -> f64 + Sync, ball: &GroupBall, n: usize, cfg: &StitchConfig) -> Result<Estimate, MeanError> {
    let m = cfg.path_grid;
    let values = stitched_statistics(n, cfg, |q| -> Result<f64, HolderError> { Ok(pi_delta(&big_f, &q.to_sampled(m)?, ball, cfg.delta)?.value) })?;
    let values = values.into_iter().map(|c| c.into_iter().collect::<Result<Vec<f64>, _>>()).collect::<Result<Vec<_>, _>>()?;
    Ok(chain_estimate(&values))
}
