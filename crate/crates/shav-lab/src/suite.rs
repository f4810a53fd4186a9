//! Named numerical checks grouped into suites, each tagged with the acceptance criterion it covers.

use crate::embed::{default_generator, theta_f, verify_condition_b};
use crate::exact::{bs_reduce, evaluate_word, f_word_string, f_word_to_pl, log_slope_separation, random_bs_word, random_f_word};
use crate::holder::{discontinuity_csv, discontinuity_demo, p_delta, p_delta_continuity_sweep, pi_delta, continuity_csv, GroupBall, SampledDiffeo, TrigDiffeo};
use crate::partitions::{check_sl5, check_sl6, jn, jn_direct_mc, jn_ratio, mass_table_csv, ChainConfig, Partition};
use crate::schwarzian::{check_sl8, check_sl9, extreme_partition, log_estimates_check, per_k_bound, random_admissible_partition, SL9Constants, SmoothTestMap};
use crate::special::{t_ratio_limit, t_table, v1, verify_h_bounds, verify_sl2, verify_sl4};
use crate::stitch::{check_s3, s3_csv, stitch_from, Functional, StitchConfig};
use crate::wiener::{exp_moment, holder_support_check, increment_table, moment_report, RngConfig};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use thiserror::Error;

pub const SUITES: [&str; 8] = ["group-algebra", "theta-embed", "holder", "special-fn", "partitions", "wiener", "schwarzian", "stitch"];

/// Tunable parameters and their defaults.
pub const PARAMS: [(&str, f64); 14] = [
    ("ga.words", 1000.0),
    ("ga.pairs", 500.0),
    ("theta.splits", 200.0),
    ("theta.witnesses", 50.0),
    ("jn.samples", 1e7),
    ("sl4.grid", 20.0),
    ("wiener.exp_samples", 1e6),
    ("wiener.moment_samples", 1e5),
    ("sl8.trials", 1e4),
    ("sl8.grid", 128.0),
    ("sl9.partitions", 100.0),
    ("chain.samples", 200.0),
    ("s3.samples", 12800.0),
    ("mass.eps", 0.25),
];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("parameter `{0}` must be a positive finite number, got `{1}`")]
    BadValue(String, String),
    #[error("expected `key=value`, got `{0}`")]
    Malformed(String),
    #[error("tolerance scale must be positive and finite")]
    BadScale,
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

/// Everything a check depends on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tolerance_scale: f64,
    pub params: BTreeMap<String, f64>,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig { seed, tolerance_scale: 1.0, params: BTreeMap::new() }
    }

    pub fn with_overrides(seed: u64, tolerance_scale: f64, overrides: &[String]) -> Result<Self, ConfigError> {
        if !(tolerance_scale > 0.0 && tolerance_scale.is_finite()) {
            return Err(ConfigError::BadScale);
        }
        let mut params = BTreeMap::new();
        for kv in overrides {
            let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError::Malformed(kv.clone()))?;
            if !PARAMS.iter().any(|p| p.0 == k) {
                return Err(ConfigError::UnknownParam(k.to_string()));
            }
            let x: f64 = v.parse().map_err(|_| ConfigError::BadValue(k.to_string(), v.to_string()))?;
            if !(x > 0.0 && x.is_finite()) {
                return Err(ConfigError::BadValue(k.to_string(), v.to_string()));
            }
            params.insert(k.to_string(), x);
        }
        Ok(SuiteConfig { seed, tolerance_scale, params })
    }

    pub fn param(&self, key: &str) -> f64 {
        self.params.get(key).copied().unwrap_or_else(|| PARAMS.iter().find(|p| p.0 == key).expect("registered parameter").1)
    }

    /// A count that is never rescaled.
    fn fixed(&self, key: &str) -> usize {
        self.param(key).round().max(1.0) as usize
    }

    /// A Monte Carlo sample size, divided by the square of the tolerance scale unless set explicitly.
    fn samples(&self, key: &str) -> usize {
        if self.params.contains_key(key) {
            return self.fixed(key);
        }
        (self.param(key) / self.tolerance_scale.powi(2)).ceil().max(16.0) as usize
    }

    fn tol(&self, x: f64) -> f64 {
        x * self.tolerance_scale
    }

    /// The number of standard errors allowed where the nominal criterion says three.
    fn sigmas(&self) -> f64 {
        self.tol(3.0)
    }

    fn rng(&self, label: u64) -> RngConfig {
        RngConfig::new(self.seed).derive(label)
    }

    fn chain(&self, label: u64) -> ChainConfig {
        let mut c = ChainConfig::new(self.seed);
        c.rng = self.rng(label);
        c.samples = self.samples("chain.samples").div_ceil(c.chains).max(16);
        c
    }
}

/// The outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub id: &'static str,
    pub suite: &'static str,
    pub criterion: Option<u8>,
    pub passed: bool,
    pub detail: Value,
    /// `(file stem, CSV text)` side tables.
    #[serde(skip)]
    pub tables: Vec<(String, String)>,
}

struct Outcome {
    passed: bool,
    detail: Value,
    tables: Vec<(String, String)>,
}

fn outcome(passed: bool, detail: Value) -> Outcome {
    Outcome { passed, detail, tables: vec![] }
}

fn failed(msg: impl std::fmt::Display) -> Outcome {
    outcome(false, json!({ "error": msg.to_string() }))
}

pub struct CheckSpec {
    pub id: &'static str,
    pub suite: &'static str,
    pub criterion: Option<u8>,
    run: fn(&SuiteConfig) -> Outcome,
}

impl CheckSpec {
    pub fn run(&self, cfg: &SuiteConfig) -> CheckReport {
        let o = (self.run)(cfg);
        CheckReport { id: self.id, suite: self.suite, criterion: self.criterion, passed: o.passed, detail: o.detail, tables: o.tables }
    }
}

macro_rules! check {
    ($id:literal, $suite:literal, $crit:expr, $f:expr) => {
        CheckSpec { id: concat!($suite, "/", $id), suite: $suite, criterion: $crit, run: $f }
    };
}

/// All checks in canonical order.
pub fn registry() -> Vec<CheckSpec> {
    let mut v = vec![
        check!("bs-normal-forms", "group-algebra", Some(1), bs_normal_forms),
        check!("slope-separation", "group-algebra", Some(1), slope_separation),
        check!("homomorphism", "theta-embed", Some(2), theta_homomorphism),
        check!("condition-b", "theta-embed", Some(2), condition_b),
        check!("endpoint-derivatives", "theta-embed", Some(2), endpoint_derivatives),
        check!("p-delta-profile", "holder", None, p_delta_profile),
        check!("continuity-bound", "holder", None, continuity_bound),
        check!("discontinuity", "holder", None, discontinuity),
        check!("pi-delta-constant", "holder", None, pi_delta_constant),
        check!("v1-at-zero", "special-fn", Some(3), v1_at_zero),
        check!("sl2-bound", "special-fn", Some(3), sl2_bound),
        check!("h-bounds", "special-fn", Some(3), h_bounds),
        check!("t-ratio-limit", "special-fn", Some(3), t_ratio_check),
        check!("sl4", "special-fn", Some(5), sl4),
        check!("jn-monte-carlo", "partitions", Some(4), jn_monte_carlo),
        check!("jn-bracket", "partitions", Some(4), jn_bracket),
        check!("sl5-mass", "partitions", Some(9), sl5_mass),
        check!("sl6-mass", "partitions", Some(9), sl6_mass),
        check!("exp-moments", "wiener", Some(6), exp_moments),
        check!("moments", "wiener", Some(6), moments),
        check!("time-reversal", "wiener", Some(6), time_reversal),
        check!("holder-support", "wiener", None, holder_support),
        check!("sl8", "schwarzian", Some(7), sl8),
        check!("sl9-identity", "schwarzian", Some(8), sl9_identity),
        check!("sl9-extreme", "schwarzian", Some(8), sl9_extreme),
        check!("sl9-moderate", "schwarzian", Some(8), sl9_moderate),
        check!("log-estimates", "schwarzian", None, log_estimates),
        check!("knot-matching", "stitch", None, knot_matching),
        check!("s3-identity", "stitch", Some(10), s3_identity),
        check!("s3-sup-clamp", "stitch", Some(10), s3_sup_clamp),
    ];
    v.sort_by_key(|c| c.id);
    v
}

/// The checks of one suite, or of every suite for `all`.
pub fn select(suite: &str) -> Result<Vec<CheckSpec>, ConfigError> {
    if suite == "all" {
        return Ok(registry());
    }
    if !SUITES.contains(&suite) {
        return Err(ConfigError::UnknownSuite(suite.to_string()));
    }
    Ok(registry().into_iter().filter(|c| c.suite == suite).collect())
}

/// One JSON line per report, in the order given.
pub fn jsonl(reports: &[CheckReport], cfg: &SuiteConfig) -> String {
    let mut s = String::new();
    for r in reports {
        let line = json!({
            "id": r.id,
            "suite": r.suite,
            "criterion": r.criterion,
            "status": if r.passed { "pass" } else { "fail" },
            "config": cfg,
            "detail": r.detail,
        });
        writeln!(s, "{line}").unwrap();
    }
    s
}

fn bs_normal_forms(cfg: &SuiteConfig) -> Outcome {
    let mut rng = cfg.rng(1).item(0);
    let words = cfg.fixed("ga.words");
    let mismatches = (0..words).filter(|_| {
        let w = random_bs_word(&mut rng, 20);
        bs_reduce(&w).to_affine() != evaluate_word(&w)
    }).count();
    outcome(mismatches == 0, json!({ "words": words, "mismatches": mismatches }))
}

fn slope_separation(cfg: &SuiteConfig) -> Outcome {
    let mut rng = cfg.rng(2).item(0);
    let pairs = cfg.fixed("ga.pairs");
    let (mut done, mut min_sep, mut equal_ok) = (0, i64::MAX, true);
    while done < pairs {
        let a = f_word_to_pl(&random_f_word(&mut rng, 10));
        let b = f_word_to_pl(&random_f_word(&mut rng, 10));
        if a == b {
            equal_ok &= log_slope_separation(&a, &b) == 0;
            continue;
        }
        min_sep = min_sep.min(log_slope_separation(&a, &b));
        done += 1;
    }
    outcome(min_sep >= 1 && equal_ok, json!({ "pairs": pairs, "min_separation": min_sep }))
}

fn theta_homomorphism(cfg: &SuiteConfig) -> Outcome {
    let f = default_generator();
    let mut rng = cfg.rng(3).item(0);
    let splits = cfg.fixed("theta.splits");
    let mut worst = 0.0f64;
    for _ in 0..splits {
        let (a, b) = (f_word_to_pl(&random_f_word(&mut rng, 6)), f_word_to_pl(&random_f_word(&mut rng, 6)));
        let (ta, tb, tab) = (theta_f(&a, &f), theta_f(&b, &f), theta_f(&a.compose(&b), &f));
        for i in 0..=1000 {
            let t = i as f64 / 1000.0;
            worst = worst.max((tab.eval(t) - ta.eval(tb.eval(t))).abs());
        }
    }
    let tol = cfg.tol(1e-9);
    outcome(worst <= tol, json!({ "splits": splits, "sup_error": worst, "tolerance": tol }))
}

fn condition_b(cfg: &SuiteConfig) -> Outcome {
    let f = default_generator();
    let Some(c) = f.c() else { return failed("generator has no interior fixed point") };
    let mut rng = cfg.rng(4).item(0);
    let target = cfg.fixed("theta.witnesses");
    let (mut done, mut worst) = (0, f64::INFINITY);
    while done < target {
        let w = random_f_word(&mut rng, 6);
        let h = f_word_to_pl(&w);
        if h.is_identity() {
            continue;
        }
        match verify_condition_b(&h, &f_word_string(&w), &f) {
            Ok(wit) => worst = worst.min(wit.value - c),
            Err(e) => return failed(e),
        }
        done += 1;
    }
    let tol = cfg.tol(1e-6);
    outcome(worst >= -tol, json!({ "elements": target, "C": c, "min_margin": worst, "tolerance": tol }))
}

fn endpoint_derivatives(cfg: &SuiteConfig) -> Outcome {
    let f = default_generator();
    let mut rng = cfg.rng(5).item(0);
    let mut worst = 0.0f64;
    for _ in 0..cfg.fixed("theta.splits") {
        let th = theta_f(&f_word_to_pl(&random_f_word(&mut rng, 6)), &f);
        worst = worst.max((th.deriv(0.0) - 1.0).abs()).max((th.deriv(1.0) - 1.0).abs());
    }
    let tol = cfg.tol(1e-9);
    outcome(worst <= tol, json!({ "max_deviation": worst, "tolerance": tol }))
}

fn exponential_diffeo(m: usize) -> SampledDiffeo {
    let e = std::f64::consts::E;
    SampledDiffeo::from_fn(m, |t| t.exp_m1() / (e - 1.0), |t| t.exp() / (e - 1.0)).expect("valid diffeomorphism")
}

fn p_delta_profile(cfg: &SuiteConfig) -> Outcome {
    let got = p_delta(&exponential_diffeo(256), 1.0 / 3.0);
    let want = (std::f64::consts::E - 1.0).ln() + 1.0;
    let tol = cfg.tol(1e-12);
    outcome((got - want).abs() <= tol, json!({ "p_delta": got, "closed_form": want }))
}

fn continuity_bound(cfg: &SuiteConfig) -> Outcome {
    let f0 = TrigDiffeo::new(vec![0.3, -0.2, 0.1]);
    let rows = p_delta_continuity_sweep(&f0, 256, 1.0 / 3.0, &[1e-1, 3e-2, 1e-2, 1e-3, 1e-4]);
    let m = f0.sample(256).deriv_min();
    let ok = rows.iter().filter(|r| r.eps < m / 2.0).all(|r| r.dp <= r.bound * cfg.tolerance_scale);
    Outcome { passed: ok, detail: json!({ "rows": rows }), tables: vec![("holder_continuity".into(), continuity_csv(&rows))] }
}

fn discontinuity(cfg: &SuiteConfig) -> Outcome {
    let rows = discontinuity_demo(&[0.1, 0.01, 0.001, 1e-4, 1e-5], 2000);
    let last = rows.last().expect("rows");
    let ok = rows.iter().all(|r| r.norm_gf >= r.chord) && (last.chord - 5.0 / 3.0).abs() < cfg.tol(0.05) && last.norm_f < 1e-4;
    Outcome { passed: ok, detail: json!({ "rows": rows }), tables: vec![("holder_discontinuity".into(), discontinuity_csv(&rows))] }
}

fn pi_delta_constant(cfg: &SuiteConfig) -> Outcome {
    let gen = default_generator();
    let ball = GroupBall::new(4, &gen);
    match pi_delta(|_| 2.5, &exponential_diffeo(128), &ball, 1.0 / 3.0) {
        Ok(p) => outcome((p.value - 2.5).abs() <= cfg.tol(1e-12), json!({ "value": p.value, "active": p.active.len(), "ball": ball.words.len() })),
        Err(e) => failed(e),
    }
}

fn v1_at_zero(cfg: &SuiteConfig) -> Outcome {
    let v = v1(0.0);
    outcome((v - PI).abs() <= cfg.tol(1e-8), json!({ "v1_0": v }))
}

fn sl2_bound(_: &SuiteConfig) -> Outcome {
    let grid: Vec<f64> = (1..=200).map(|i| 0.05 * i as f64 * (1.0 + i as f64 / 20.0)).collect();
    match verify_sl2(&grid) {
        Ok(r) => outcome(r.max_bound_ratio <= 1.0, json!({ "points": r.points, "max_bound_ratio": r.max_bound_ratio })),
        Err(e) => failed(e),
    }
}

fn h_bounds(_: &SuiteConfig) -> Outcome {
    match verify_h_bounds() {
        Ok(r) => outcome(r.epsilon > 0.0, json!(r)),
        Err(e) => failed(e),
    }
}

fn t_ratio_check(cfg: &SuiteConfig) -> Outcome {
    let rows = t_table(20);
    let last = rows.last().expect("rows");
    let gap = (last.ratio - t_ratio_limit()).abs();
    let mut csv = String::from("n,t_n,ratio,c1_running,c2_running\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{},{}", r.n, r.t_n, r.ratio, r.c1_running, r.c2_running).unwrap();
    }
    Outcome {
        passed: gap <= cfg.tol(1e-3),
        detail: json!({ "ratio_20": last.ratio, "limit": t_ratio_limit(), "gap": gap }),
        tables: vec![("t_ratio".into(), csv)],
    }
}

fn sl4(cfg: &SuiteConfig) -> Outcome {
    let mut reports = vec![];
    for eps in [0.1, 0.25] {
        match verify_sl4(eps, cfg.fixed("sl4.grid")) {
            Ok(r) => reports.push(r),
            Err(e) => return failed(e),
        }
    }
    outcome(reports.iter().all(|r| r.max_lhs_over_rhs <= 1.0), json!(reports))
}

fn jn_monte_carlo(cfg: &SuiteConfig) -> Outcome {
    let samples = cfg.samples("jn.samples");
    let mut rows = vec![];
    let mut ok = true;
    for n in [2usize, 3] {
        let run = jn_direct_mc(n, samples, &cfg.rng(10 + n as u64));
        let z = (run.jn.mean - jn(n as u32)) / run.jn.stderr;
        ok &= z.abs() <= cfg.sigmas();
        rows.push(json!({ "n": n, "exact": jn(n as u32), "estimate": run.jn, "z": z }));
    }
    outcome(ok, json!({ "samples": samples, "rows": rows }))
}

fn jn_bracket(_: &SuiteConfig) -> Outcome {
    let rows = t_table(20);
    let last = rows.last().expect("rows");
    let (c1, c2) = (last.c1_running, last.c2_running);
    let ratios: Vec<f64> = (1..=10).map(jn_ratio).collect();
    let ok = c1 > 0.0 && ratios.iter().all(|r| (c1..=c2).contains(r));
    outcome(ok, json!({ "c1": c1, "c2": c2, "ratios": ratios }))
}

fn mass_outcome(t: Result<crate::partitions::MassTable, crate::partitions::PartitionError>, chain: &ChainConfig, stem: &str) -> Outcome {
    match t {
        Ok(t) => Outcome { passed: t.strictly_decreasing, tables: vec![(stem.into(), mass_table_csv(&t, chain))], detail: json!(t) },
        Err(e) => failed(e),
    }
}

fn sl5_mass(cfg: &SuiteConfig) -> Outcome {
    let chain = cfg.chain(20);
    mass_outcome(check_sl5(&[4, 8, 16], cfg.param("mass.eps"), &chain), &chain, "sl5_mass")
}

fn sl6_mass(cfg: &SuiteConfig) -> Outcome {
    let chain = cfg.chain(21);
    mass_outcome(check_sl6(&[4, 8, 16], 1.05, &chain), &chain, "sl6_mass")
}

fn exp_moments(cfg: &SuiteConfig) -> Outcome {
    let n = cfg.samples("wiener.exp_samples");
    let rng = cfg.rng(30);
    let rows: Vec<_> = [(0.25, 1.0), (0.25, 2.0), (1.0, 1.0), (1.0, 2.0)]
        .into_iter()
        .enumerate()
        .map(|(i, (s, l))| exp_moment(s, l, n, 64, &rng.derive(i as u64)))
        .collect();
    outcome(rows.iter().all(|e| e.estimate.within(e.exact, cfg.sigmas())), json!(rows))
}

fn moments(cfg: &SuiteConfig) -> Outcome {
    let rep = moment_report(3, cfg.samples("wiener.moment_samples"), 1024, &cfg.rng(31));
    let k = cfg.sigmas();
    let equal = rep.rows.iter().all(|r| r.diff.within(0.0, k));
    let upper = rep.rows.iter().all(|r| r.side0.mean <= r.upper_bound + k * r.side0.stderr);
    let m1 = rep.rows[0].side0;
    let m1_ok = m1.mean >= rep.m1_lower_bound - k * m1.stderr && m1.mean <= 0.5f64.exp();
    let energy_ok = rep.energy.mean <= rep.energy_bound + k * rep.energy.stderr;
    outcome(equal && upper && m1_ok && energy_ok, json!({ "report": rep, "equality": equal, "upper": upper, "m1": m1_ok, "energy": energy_ok }))
}

fn time_reversal(cfg: &SuiteConfig) -> Outcome {
    let rows = increment_table(&[(0.0, 0.25), (0.25, 0.75), (0.0, 1.0), (0.5, 1.0)], &[1, 2, 4], cfg.samples("wiener.moment_samples") / 2, 64, &cfg.rng(32));
    outcome(rows.iter().all(|r| r.diff.within(0.0, cfg.sigmas())), json!(rows))
}

fn holder_support(cfg: &SuiteConfig) -> Outcome {
    let levels = [256, 512, 1024, 2048, 4096];
    let third = holder_support_check(1.0 / 3.0, 100, &levels, 1.5, &cfg.rng(33));
    let two_thirds = holder_support_check(2.0 / 3.0, 100, &levels, 1.5, &cfg.rng(33));
    let ok = third.bounded_fraction >= 0.99 && two_thirds.growth.iter().all(|&g| g > 1.1);
    outcome(ok, json!({ "delta_1_3": third, "delta_2_3": two_thirds }))
}

fn sl8(cfg: &SuiteConfig) -> Outcome {
    let g = SmoothTestMap::sine(0.25);
    match check_sl8(&g, 1.0 / 64.0, &Partition::uniform(64), cfg.samples("sl8.trials"), cfg.fixed("sl8.grid"), &cfg.rng(40)) {
        Ok(r) => outcome(r.passed && r.frequency * 10.0 <= r.bound, json!(r)),
        Err(e) => failed(e),
    }
}

fn sl9_identity(cfg: &SuiteConfig) -> Outcome {
    let consts = SL9Constants::new(&SmoothTestMap::sine(0.25), 0.5);
    let mut rng = cfg.rng(41).item(0);
    let x = random_admissible_partition(consts.delta1, 1000f64.ln(), &mut rng);
    let a = check_sl9(&SmoothTestMap::identity(), &x, &consts).product_minus_one;
    let b = match extreme_partition(5, consts.log_r) {
        Ok(x) => check_sl9(&SmoothTestMap::identity(), &x, &consts).product_minus_one,
        Err(e) => return failed(e),
    };
    outcome(a == 0.0 && b == 0.0, json!({ "admissible": a, "extreme": b }))
}

fn sl9_extreme(_: &SuiteConfig) -> Outcome {
    let g = SmoothTestMap::sine(0.25);
    let consts = SL9Constants::new(&g, 0.5);
    match extreme_partition(3, consts.log_r) {
        Ok(x) => {
            let r = check_sl9(&g, &x, &consts);
            outcome(r.min_r_ok && r.holds, json!(r))
        }
        Err(e) => failed(e),
    }
}

fn sl9_moderate(cfg: &SuiteConfig) -> Outcome {
    let g = SmoothTestMap::sine(0.25);
    let consts = SL9Constants::new(&g, 0.5);
    let log_r = 1000f64.ln();
    let mut rng = cfg.rng(42).item(0);
    let count = cfg.fixed("sl9.partitions");
    let (mut worst, mut worst_v) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let x = random_admissible_partition(consts.delta1, log_r, &mut rng);
        let b = per_k_bound(&g, &x, consts.c, log_r);
        worst = worst.max(b.worst_ratio);
        worst_v = worst_v.max(b.worst_v_ratio);
    }
    outcome(worst <= 1.0 && worst_v <= 1.0, json!({ "partitions": count, "worst_ratio": worst, "worst_v_ratio": worst_v }))
}

fn log_estimates(_: &SuiteConfig) -> Outcome {
    match log_estimates_check() {
        Ok(rows) => outcome(rows.iter().all(|r| r.holds), json!(rows)),
        Err(e) => failed(e),
    }
}

fn knot_matching(cfg: &SuiteConfig) -> Outcome {
    use crate::wiener::{map_b, sample_path};
    use rand::Rng;
    let mut rng = cfg.rng(50).item(0);
    let (mut mismatch, mut spread) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let n = rng.random_range(2..10);
        let log_l: Vec<f64> = (0..n).map(|_| rng.random_range(-40.0..0.0)).collect();
        let y = Partition::from_log_lengths(&log_l);
        let phi: Vec<SampledDiffeo> = (0..n).map(|_| map_b(&sample_path(64, &mut rng).to_grid())).collect();
        let a = stitch_from(&y, &phi, 0.0);
        let b = stitch_from(&y, &phi, rng.random_range(-50.0..50.0));
        mismatch = mismatch.max(a.knot_mismatch());
        spread = a.x.points().iter().zip(b.x.points()).map(|(p, q)| (p - q).abs()).fold(spread, f64::max);
    }
    outcome(mismatch <= cfg.tol(1e-9) && spread <= cfg.tol(1e-12), json!({ "knot_mismatch": mismatch, "initial_choice_spread": spread }))
}

fn s3_config(cfg: &SuiteConfig) -> StitchConfig {
    let mut s = StitchConfig::new(cfg.seed, cfg.samples("s3.samples"));
    s.chain.rng = cfg.rng(60);
    s.paths = cfg.rng(61);
    s
}

fn s3_identity(cfg: &SuiteConfig) -> Outcome {
    let s = s3_config(cfg);
    match check_s3(&Functional::SupDistance { scale: 10.0 }, &SmoothTestMap::identity(), &[2, 4, 8], &s) {
        Ok(t) => outcome(t.rows.iter().all(|r| r.paired_diff == 0.0 && r.stderr == 0.0), json!(t)),
        Err(e) => failed(e),
    }
}

fn s3_sup_clamp(cfg: &SuiteConfig) -> Outcome {
    let s = s3_config(cfg);
    match check_s3(&Functional::SupDistance { scale: 10.0 }, &SmoothTestMap::sine(0.25), &[2, 4, 8], &s) {
        Ok(t) => {
            let k = cfg.tol(2.0);
            let decreasing = t.rows.windows(2).all(|w| w[0].paired_diff.abs() - w[1].paired_diff.abs() > k * w[0].stderr.hypot(w[1].stderr));
            Outcome { passed: decreasing, tables: vec![("s3_sup_clamp".into(), s3_csv(&t, &s))], detail: json!(t) }
        }
        Err(e) => failed(e),
    }
}
