use anyhow::Context;
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;
use shav_lab::suite::{jsonl, select, CheckReport, SuiteConfig};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(version, about = "Numerical checks for Thompson's group F and Wiener-measure functionals on interval diffeomorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite of checks: group-algebra, theta-embed, holder, special-fn, partitions, wiener, schwarzian, stitch, or all.
    Run {
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Worker threads; reports do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, env = "SHAV_LAB_OUT", default_value = "shav-lab-out")]
        out: PathBuf,
        /// Parameter override `key=value`, repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Multiplies every numeric tolerance and divides default Monte Carlo sizes by its square.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn write_outputs(out: &PathBuf, reports: &[CheckReport], cfg: &SuiteConfig, run: &serde_json::Value) -> anyhow::Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    std::fs::write(out.join("report.jsonl"), jsonl(reports, cfg))?;
    std::fs::write(out.join("run.json"), serde_json::to_string_pretty(run)? + "\n")?;
    for r in reports {
        for (stem, csv) in &r.tables {
            std::fs::write(out.join(format!("{stem}.csv")), csv)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let Command::Run { suite, seed, workers, out, params, tolerance_scale } = Cli::parse().command;
    let cfg = match SuiteConfig::with_overrides(seed, tolerance_scale, &params) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    let checks = match select(&suite) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    if let Some(w) = workers {
        if w == 0 {
            return config_error("--workers must be at least 1");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            return config_error(e);
        }
    }
    let reports: Vec<CheckReport> = checks
        .par_iter()
        .map(|c| {
            let t = Instant::now();
            let r = c.run(&cfg);
            eprintln!("{} {} ({:.1}s)", if r.passed { "pass" } else { "FAIL" }, r.id, t.elapsed().as_secs_f64());
            r
        })
        .collect();
    let run = json!({ "suite": suite, "seed": seed, "workers": workers.unwrap_or_else(rayon::current_num_threads), "out": out, "tolerance_scale": tolerance_scale, "params": cfg.params });
    if let Err(e) = write_outputs(&out, &reports, &cfg, &run) {
        return config_error(format!("{e:#}"));
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    eprintln!("{} of {} checks passed; report in {}", reports.len() - failed.len(), reports.len(), out.join("report.jsonl").display());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed: {}", failed.join(", "));
        ExitCode::from(1)
    }
}
