//! On-disk layout of experiment results:
//!
//! ```text
//! <output>/runs/<config-hash>/steps_to_optimal.csv
//! <output>/runs/<config-hash>/<seed>/eval.csv
//! <output>/runs/<config-hash>/<seed>/meta.json
//! <output>/runs/<config-hash>/<seed>/si/step_<n>.csv
//! <output>/runs/<config-hash>/<seed>/q/step_<n>.{csv,json}
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::critical::{si_per_state, SIMap};
use crate::error::{Error, Result};
use crate::exploration::PolicyKind;
use crate::harness::config::ExperimentConfig;
use crate::harness::run::RunRecord;
use crate::mdp::CliffMaze;
use crate::qlearn::Checkpoint;

pub const NOT_REACHED: &str = "not reached";
pub const QUANTILE_RULE: &str =
    "threshold = (1 - q) quantile of SI with linear interpolation between order statistics; critical iff SI > threshold";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunMeta {
    pub tool: String,
    pub version: String,
    pub policy: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: String,
    pub steps: u64,
    pub episodes: u64,
    pub steps_to_optimal: Option<u64>,
    pub exploit_fraction: f64,
    pub wall_clock_ms: u128,
    pub quantile_rule: String,
    pub evaluation: String,
    pub comparison_model: String,
}

pub fn arm_dir(root: &Path, hash: &str) -> PathBuf {
    root.join("runs").join(hash)
}

/// Fails early if `root` cannot be created or written to.
pub fn probe_output(root: &Path) -> Result<()> {
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let probe = root.join(".write-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

pub fn eval_csv(record: &RunRecord) -> String {
    let mut out = String::from("step,return\n");
    for (s, r) in &record.eval {
        let _ = writeln!(out, "{s},{r:?}");
    }
    out
}

pub fn steps_cell(steps: Option<u64>) -> String {
    steps.map_or_else(|| NOT_REACHED.to_string(), |s| s.to_string())
}

/// `seed,steps` for one arm.
pub fn steps_to_optimal_csv(records: &[&RunRecord]) -> String {
    let mut out = String::from("seed,steps\n");
    for r in records {
        let _ = writeln!(out, "{},{}", r.seed, steps_cell(r.steps_to_optimal));
    }
    out
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Writes one run directory.
pub fn save_run(root: &Path, cfg: &ExperimentConfig, record: &RunRecord) -> Result<PathBuf> {
    let maze = CliffMaze::standard();
    let dir = arm_dir(root, &record.config_hash).join(record.seed.to_string());
    let si_dir = dir.join("si");
    let q_dir = dir.join("q");
    mkdir(&si_dir)?;
    mkdir(&q_dir)?;
    write(&dir.join("eval.csv"), eval_csv(record))?;
    let ratio = cfg.schedule.q;
    for cp in &record.checkpoints {
        let stem = format!("step_{}", cp.step);
        cp.save(&q_dir, &stem, record.seed)?;
        let q = cp.to_qtable(1.0, 1.0)?;
        let map = SIMap::from_table(&q, 0..q.state_count(), ratio)?;
        write(&si_dir.join(format!("{stem}.csv")), map.to_csv(&maze))?;
    }
    let meta = RunMeta {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        policy: record.policy.as_str().to_string(),
        seed: record.seed,
        config_hash: record.config_hash.clone(),
        config: cfg.canonical(record.policy),
        steps: record.steps,
        episodes: record.episodes,
        steps_to_optimal: record.steps_to_optimal,
        exploit_fraction: record.exploit_fraction,
        wall_clock_ms: record.wall_clock_ms,
        quantile_rule: QUANTILE_RULE.to_string(),
        evaluation: format!(
            "undiscounted return of one greedy episode from the start state, capped at {} steps",
            cfg.eval_step_cap
        ),
        comparison_model: "bayes: per-run Gaussian likelihood around random-walk latent curves; \
            uniform priors on scales in [1e-6, 10] x data range and latent values within 10 x data range \
            of the observed extremes; 4 chains, 20000 iterations, 10000 burn-in, thin 5; \
            10-evaluation trailing mean applied to posterior delta draws (defaults)"
            .to_string(),
    };
    write(&dir.join("meta.json"), serde_json::to_string_pretty(&meta)?)?;
    Ok(dir)
}

/// Writes every record plus one `steps_to_optimal.csv` per arm.
pub fn save_experiment(
    root: &Path,
    cfg: &ExperimentConfig,
    records: &[RunRecord],
) -> Result<Vec<PathBuf>> {
    let mut arms = Vec::new();
    for &kind in &cfg.policies {
        let hash = cfg.config_hash(kind);
        let arm: Vec<&RunRecord> = records.iter().filter(|r| r.policy == kind).collect();
        let dir = arm_dir(root, &hash);
        mkdir(&dir)?;
        for r in &arm {
            save_run(root, cfg, r)?;
        }
        write(
            &dir.join("steps_to_optimal.csv"),
            steps_to_optimal_csv(&arm),
        )?;
        arms.push(dir);
    }
    Ok(arms)
}

fn parse_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

pub fn parse_eval_csv(path: &Path) -> Result<Vec<(u64, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("step,return") {
        return Err(parse_err(path, "expected header 'step,return'"));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (s, r) = l
                .split_once(',')
                .ok_or_else(|| parse_err(path, format!("bad row '{l}'")))?;
            let s = s
                .trim()
                .parse()
                .map_err(|e| parse_err(path, format!("{e}")))?;
            let r = r
                .trim()
                .parse()
                .map_err(|e| parse_err(path, format!("{e}")))?;
            Ok((s, r))
        })
        .collect()
}

/// Reads a run directory written by [`save_run`].
pub fn load_run(dir: &Path) -> Result<RunRecord> {
    let meta_path = dir.join("meta.json");
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: RunMeta = serde_json::from_str(&text)?;
    let policy: PolicyKind = meta
        .policy
        .parse()
        .map_err(|_| parse_err(&meta_path, format!("unknown policy '{}'", meta.policy)))?;
    let eval = parse_eval_csv(&dir.join("eval.csv"))?;

    let q_dir = dir.join("q");
    let mut steps: Vec<u64> = Vec::new();
    if q_dir.is_dir() {
        for entry in fs::read_dir(&q_dir).map_err(|e| Error::io(&q_dir, e))? {
            let name = entry.map_err(|e| Error::io(&q_dir, e))?.file_name();
            let name = name.to_string_lossy();
            if let Some(n) = name
                .strip_prefix("step_")
                .and_then(|n| n.strip_suffix(".json"))
            {
                if let Ok(n) = n.parse() {
                    steps.push(n);
                }
            }
        }
    }
    steps.sort_unstable();
    let checkpoints = steps
        .iter()
        .map(|s| Checkpoint::load(&q_dir, &format!("step_{s}")).map(|(c, _)| c))
        .collect::<Result<Vec<_>>>()?;

    Ok(RunRecord {
        policy,
        seed: meta.seed,
        config_hash: meta.config_hash,
        steps_to_optimal: meta.steps_to_optimal,
        eval,
        checkpoints,
        steps: meta.steps,
        episodes: meta.episodes,
        exploit_fraction: meta.exploit_fraction,
        wall_clock_ms: meta.wall_clock_ms,
    })
}

/// Reads every run of one arm directory, ordered as in its
/// `steps_to_optimal.csv` when present, else by seed.
pub fn load_arm(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut runs = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.join("meta.json").is_file() {
            runs.push(load_run(&path)?);
        }
    }
    if runs.is_empty() {
        return Err(parse_err(dir, "no run directories found"));
    }
    let order_path = dir.join("steps_to_optimal.csv");
    let order: Vec<u64> = fs::read_to_string(&order_path)
        .map(|t| {
            t.lines()
                .skip(1)
                .filter_map(|l| l.split(',').next()?.trim().parse().ok())
                .collect()
        })
        .unwrap_or_default();
    runs.sort_by_key(|r| {
        (
            order
                .iter()
                .position(|&s| s == r.seed)
                .unwrap_or(usize::MAX),
            r.seed,
        )
    });
    Ok(runs)
}

/// SI values per state of a checkpoint; handy for the CLI.
pub fn checkpoint_si(cp: &Checkpoint) -> Result<Vec<f64>> {
    Ok(si_per_state(&cp.to_qtable(1.0, 1.0)?))
}
