//! Experiment configuration: plain `key = value` files, with later sources
//! (command-line flags) overriding earlier ones.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exploration::{PolicyKind, PolicySpec, ScheduleSpec};
use crate::mdp::{DEFAULT_GAMMA, EPISODE_STEP_CAP};
use crate::qlearn::DEFAULT_ALPHA;

pub const ENV_CLIFF_MAZE: &str = "cliff-maze";

/// Where the proposed rule gets the states it thresholds over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SiSource {
    /// Every state of the table, refreshed after each Q update.
    AllStates,
    /// The most recently visited states, refreshed on a fixed step period.
    Recent {
        capacity: usize,
        refresh_every: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SeedSpec {
    Derived { base: u64, count: usize },
    List(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub env: String,
    pub policies: Vec<PolicyKind>,
    pub schedule: ScheduleSpec,
    pub exploit_ratio: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
    pub seeds: SeedSpec,
    pub total_steps: u64,
    pub eval_every: u64,
    pub checkpoint_every: u64,
    pub si_source: SiSource,
    pub eval_step_cap: usize,
    pub episode_step_cap: usize,
    pub stop_at_optimal: bool,
    pub top_k: usize,
    pub workers: usize,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            env: ENV_CLIFF_MAZE.to_string(),
            policies: vec![PolicyKind::EpsilonGreedy, PolicyKind::Proposed],
            schedule: ScheduleSpec::default(),
            exploit_ratio: None,
            alpha: DEFAULT_ALPHA,
            gamma: DEFAULT_GAMMA,
            seeds: SeedSpec::Derived {
                base: 0,
                count: 100,
            },
            total_steps: 100_000,
            eval_every: 1000,
            checkpoint_every: 10_000,
            si_source: SiSource::AllStates,
            eval_step_cap: 200,
            episode_step_cap: EPISODE_STEP_CAP,
            stop_at_optimal: false,
            top_k: 10,
            workers: 0,
            output: None,
        }
    }
}

/// Keys accepted in config files and as `--key` flags (dashes allowed).
pub const KEYS: &[&str] = &[
    "env",
    "policy",
    "eps_start",
    "eps_end",
    "anneal_steps",
    "k",
    "q",
    "e",
    "alpha",
    "gamma",
    "base_seed",
    "seed_count",
    "seeds",
    "total_steps",
    "eval_every",
    "checkpoint_every",
    "si_source",
    "buffer_capacity",
    "refresh_every",
    "eval_step_cap",
    "episode_step_cap",
    "stop_at_optimal",
    "top_k",
    "workers",
    "output",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::Config(format!("{key} = '{value}': {e}")))
}

/// splitmix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `index` derived from `base` without enumerating a list.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix64(mix64(base) ^ index)
}

impl ExperimentConfig {
    /// Parses a config file body. Blank lines and `#` comments are skipped.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_str(text)?;
        Ok(cfg)
    }

    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_str(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.replace('-', "_");
        match key.as_str() {
            "env" => self.env = value.trim().to_string(),
            "policy" | "policies" => {
                self.policies = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "eps_start" => self.schedule.eps_start = parse(&key, value)?,
            "eps_end" => self.schedule.eps_end = parse(&key, value)?,
            "anneal_steps" => self.schedule.anneal_steps = parse(&key, value)?,
            "k" => self.schedule.k = parse(&key, value)?,
            "q" => self.schedule.q = parse(&key, value)?,
            "e" => {
                self.exploit_ratio = match value.trim() {
                    "" | "auto" => None,
                    v => Some(parse(&key, v)?),
                }
            }
            "alpha" => self.alpha = parse(&key, value)?,
            "gamma" => self.gamma = parse(&key, value)?,
            "base_seed" => {
                let count = match self.seeds {
                    SeedSpec::Derived { count, .. } => count,
                    SeedSpec::List(ref l) => l.len(),
                };
                self.seeds = SeedSpec::Derived {
                    base: parse(&key, value)?,
                    count,
                };
            }
            "seed_count" => {
                let base = match self.seeds {
                    SeedSpec::Derived { base, .. } => base,
                    SeedSpec::List(_) => 0,
                };
                self.seeds = SeedSpec::Derived {
                    base,
                    count: parse(&key, value)?,
                };
            }
            "seeds" => {
                self.seeds = SeedSpec::List(
                    value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| parse(&key, s))
                        .collect::<Result<_>>()?,
                )
            }
            "total_steps" => self.total_steps = parse(&key, value)?,
            "eval_every" => self.eval_every = parse(&key, value)?,
            "checkpoint_every" => self.checkpoint_every = parse(&key, value)?,
            "si_source" => {
                self.si_source = match value.trim() {
                    "all" | "all_states" => SiSource::AllStates,
                    "recent" => SiSource::Recent {
                        capacity: crate::critical::DEFAULT_BUFFER_CAPACITY,
                        refresh_every: crate::critical::DEFAULT_REFRESH_PERIOD,
                    },
                    other => return Err(Error::Config(format!("unknown si_source '{other}'"))),
                }
            }
            "buffer_capacity" | "refresh_every" => {
                let n: usize = parse(&key, value)?;
                let (mut capacity, mut refresh_every) = match self.si_source {
                    SiSource::Recent {
                        capacity,
                        refresh_every,
                    } => (capacity, refresh_every),
                    SiSource::AllStates => (
                        crate::critical::DEFAULT_BUFFER_CAPACITY,
                        crate::critical::DEFAULT_REFRESH_PERIOD,
                    ),
                };
                if key == "buffer_capacity" {
                    capacity = n;
                } else {
                    refresh_every = n;
                }
                self.si_source = SiSource::Recent {
                    capacity,
                    refresh_every,
                };
            }
            "eval_step_cap" => self.eval_step_cap = parse(&key, value)?,
            "episode_step_cap" => self.episode_step_cap = parse(&key, value)?,
            "stop_at_optimal" => self.stop_at_optimal = parse(&key, value)?,
            "top_k" => self.top_k = parse(&key, value)?,
            "workers" => self.workers = parse(&key, value)?,
            "output" => self.output = Some(PathBuf::from(value.trim())),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.env != ENV_CLIFF_MAZE {
            return Err(Error::Config(format!("unknown environment '{}'", self.env)));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("no policy selected".into()));
        }
        for kind in &self.policies {
            self.policy_spec(*kind)
                .validate()
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!(
                "alpha = {} outside (0, 1]",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!(
                "gamma = {} outside [0, 1]",
                self.gamma
            )));
        }
        if self.seeds().is_empty() {
            return Err(Error::Config("seed list is empty".into()));
        }
        if self.eval_every == 0 || self.checkpoint_every == 0 {
            return Err(Error::Config(
                "evaluation and checkpoint cadences must be positive".into(),
            ));
        }
        if let SiSource::Recent {
            capacity,
            refresh_every,
        } = self.si_source
        {
            if capacity == 0 || refresh_every == 0 {
                return Err(Error::Config(
                    "buffer capacity and refresh period must be positive".into(),
                ));
            }
        }
        if self.eval_step_cap == 0 || self.episode_step_cap == 0 || self.top_k == 0 {
            return Err(Error::Config("step caps and top_k must be positive".into()));
        }
        Ok(())
    }

    pub fn policy_spec(&self, kind: PolicyKind) -> PolicySpec {
        PolicySpec {
            kind,
            schedule: self.schedule,
            exploit_ratio: self.exploit_ratio,
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        match &self.seeds {
            SeedSpec::Derived { base, count } => {
                (0..*count as u64).map(|i| derive_seed(*base, i)).collect()
            }
            SeedSpec::List(list) => list.clone(),
        }
    }

    /// Every result-affecting key for one arm, one `key = value` per line.
    pub fn canonical(&self, kind: PolicyKind) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("env", self.env.clone());
        kv("policy", kind.to_string());
        kv("eps_start", format!("{:?}", self.schedule.eps_start));
        kv("eps_end", format!("{:?}", self.schedule.eps_end));
        kv("anneal_steps", self.schedule.anneal_steps.to_string());
        kv("k", format!("{:?}", self.schedule.k));
        kv("q", format!("{:?}", self.schedule.q));
        kv(
            "e",
            self.exploit_ratio
                .map_or_else(|| "auto".to_string(), |e| format!("{e:?}")),
        );
        kv("alpha", format!("{:?}", self.alpha));
        kv("gamma", format!("{:?}", self.gamma));
        match &self.seeds {
            SeedSpec::Derived { base, count } => {
                kv("base_seed", base.to_string());
                kv("seed_count", count.to_string());
            }
            SeedSpec::List(l) => {
                kv(
                    "seeds",
                    l.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
                );
            }
        }
        kv("total_steps", self.total_steps.to_string());
        kv("eval_every", self.eval_every.to_string());
        kv("checkpoint_every", self.checkpoint_every.to_string());
        match self.si_source {
            SiSource::AllStates => kv("si_source", "all".into()),
            SiSource::Recent {
                capacity,
                refresh_every,
            } => {
                kv("si_source", "recent".into());
                kv("buffer_capacity", capacity.to_string());
                kv("refresh_every", refresh_every.to_string());
            }
        }
        kv("eval_step_cap", self.eval_step_cap.to_string());
        kv("episode_step_cap", self.episode_step_cap.to_string());
        kv("stop_at_optimal", self.stop_at_optimal.to_string());
        kv("top_k", self.top_k.to_string());
        out
    }

    /// First 16 hex digits of the SHA-256 of [`canonical`](Self::canonical).
    pub fn config_hash(&self, kind: PolicyKind) -> String {
        let digest = Sha256::digest(self.canonical(kind).as_bytes());
        hex::encode(&digest[..8])
    }
}
