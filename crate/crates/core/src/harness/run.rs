use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::critical::{
    normalized_grid, refresh_critical_set, si_per_state, RecentStateBuffer, SIMap, TopKRecord,
};
use crate::error::{Error, Result};
use crate::exploration::{select_action, Mode, PolicyKind};
use crate::harness::config::{ExperimentConfig, SiSource};
use crate::mdp::{CliffMaze, Step, Trajectory};
use crate::qlearn::{greedy_episode, Checkpoint, OptimalityCheck, QTable};
use crate::stats::trailing_mean;

/// Outcome of one seed of one arm.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub policy: PolicyKind,
    pub seed: u64,
    pub config_hash: String,
    /// Exploration steps taken when the greedy policy first traced a
    /// shortest path; `None` if that never happened.
    pub steps_to_optimal: Option<u64>,
    /// (exploration step, undiscounted greedy return)
    pub eval: Vec<(u64, f64)>,
    /// Q snapshots at step 0, every checkpoint, and the final step.
    pub checkpoints: Vec<Checkpoint>,
    pub steps: u64,
    pub episodes: u64,
    pub exploit_fraction: f64,
    pub wall_clock_ms: u128,
}

impl RunRecord {
    /// Latest Q snapshot taken at or before `step`.
    pub fn checkpoint_at(&self, step: u64) -> Option<&Checkpoint> {
        self.checkpoints.iter().rev().find(|c| c.step <= step)
    }

    /// Per-state SI at the latest snapshot at or before `step`.
    pub fn si_at(&self, step: u64) -> Option<(u64, Vec<f64>)> {
        let cp = self.checkpoint_at(step)?;
        let q = QTable::from_values(cp.values.clone(), cp.state_count, cp.action_count, 1.0, 1.0)
            .ok()?;
        Some((cp.step, si_per_state(&q)))
    }
}

/// Trains one seed of one arm on the cliff maze.
pub fn run_single(cfg: &ExperimentConfig, kind: PolicyKind, seed: u64) -> Result<RunRecord> {
    let started = Instant::now();
    let maze = CliffMaze::standard();
    let mdp = maze.to_mdp(cfg.gamma)?;
    let policy = cfg.policy_spec(kind);
    let check = OptimalityCheck::new(&mdp, maze.state_of(maze.goal()))?;
    let all_states: Vec<usize> = (0..mdp.state_count()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = QTable::for_mdp(&mdp, cfg.alpha)?;
    let mut si_map: Option<SIMap> = None;
    let mut buffer = match cfg.si_source {
        SiSource::Recent {
            capacity,
            refresh_every,
        } => Some(RecentStateBuffer::new(capacity, refresh_every)?),
        SiSource::AllStates => None,
    };
    let track_si = kind == PolicyKind::Proposed;

    let mut record = RunRecord {
        policy: kind,
        seed,
        config_hash: cfg.config_hash(kind),
        steps_to_optimal: None,
        eval: Vec::new(),
        checkpoints: vec![q.checkpoint(0)],
        steps: 0,
        episodes: 0,
        exploit_fraction: 0.0,
        wall_clock_ms: 0,
    };
    let mut exploits = 0u64;
    let mut traj = Trajectory::with_capacity(256);

    let mut steps = 0u64;
    'episodes: while steps < cfg.total_steps {
        traj.clear();
        let mut s = mdp.initial_state();
        loop {
            let (a, mode) = select_action(&policy, s, &q, si_map.as_ref(), steps, &mut rng);
            exploits += u64::from(mode == Mode::Exploit);
            let t = mdp.step(s, a)?;
            traj.push(Step {
                state: s,
                action: a,
                reward: t.reward,
                next_state: t.next_state,
            })?;
            steps += 1;

            if let (true, Some(buf)) = (track_si, buffer.as_mut()) {
                if buf.push(s) {
                    si_map = Some(refresh_critical_set(buf, &q, policy.schedule.q)?);
                }
            }
            if steps.is_multiple_of(cfg.eval_every) {
                let (ret, _) = greedy_episode(&mdp, &q, cfg.eval_step_cap);
                record.eval.push((steps, ret));
            }
            if steps.is_multiple_of(cfg.checkpoint_every) {
                record.checkpoints.push(q.checkpoint(steps));
            }

            s = t.next_state;
            if t.terminal {
                traj.mark_terminated();
                break;
            }
            if traj.len() >= cfg.episode_step_cap || steps >= cfg.total_steps {
                break;
            }
        }
        q.update_episode(&traj)?;
        record.episodes += 1;
        if track_si && buffer.is_none() {
            si_map = Some(SIMap::from_table(
                &q,
                all_states.iter().copied(),
                policy.schedule.q,
            )?);
        }
        if record.steps_to_optimal.is_none() && check.is_optimal(&mdp, &q) {
            record.steps_to_optimal = Some(steps);
            if cfg.stop_at_optimal {
                break 'episodes;
            }
        }
    }

    if record.checkpoints.last().is_some_and(|c| c.step != steps) {
        record.checkpoints.push(q.checkpoint(steps));
    }
    record.steps = steps;
    record.exploit_fraction = if steps > 0 {
        exploits as f64 / steps as f64
    } else {
        0.0
    };
    record.wall_clock_ms = started.elapsed().as_millis();
    Ok(record)
}

/// Runs every (policy, seed) pair of the configuration on a bounded worker
/// pool. Records come back grouped by policy in configuration order, seeds
/// in seed order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let seeds = cfg.seeds();
    let jobs: Vec<(PolicyKind, u64)> = cfg
        .policies
        .iter()
        .flat_map(|&k| seeds.iter().map(move |&s| (k, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(k, s)| run_single(cfg, k, s))
            .collect()
    })
}

/// Normalised SI grid of the maze at the latest snapshot not after `at_step`.
pub fn emit_si_grid(record: &RunRecord, at_step: u64) -> Result<Vec<Vec<f64>>> {
    let maze = CliffMaze::standard();
    let (_, si) = record.si_at(at_step).ok_or(Error::NoSnapshot(at_step))?;
    if si.len() != maze.state_count() {
        return Err(Error::contract("snapshot shape does not match the maze"));
    }
    Ok(normalized_grid(&si, &maze))
}

pub fn grid_to_csv(grid: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in grid {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Match-ratio series of one run together with the learning-speed
/// comparison: does the top-K set settle before the return takes off?
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct KnackAnalysis {
    pub steps: Vec<u64>,
    pub distances: Vec<f64>,
    pub match_ratio: Vec<f64>,
    pub first_match_step: Option<u64>,
    pub first_return_step: Option<u64>,
    pub match_precedes_return: bool,
}

pub const KNACK_LEVEL: f64 = 0.9;
pub const SMOOTHING_WINDOW: usize = 10;

/// Compares each checkpoint's top-K SI states with those of the final
/// checkpoint, skipping the untrained step-0 snapshot.
pub fn knack_analysis(record: &RunRecord, top_k: usize) -> Result<KnackAnalysis> {
    let maze = CliffMaze::standard();
    let tops: Vec<TopKRecord> = record
        .checkpoints
        .iter()
        .filter(|c| c.step > 0)
        .map(|c| {
            let q = c.to_qtable(1.0, 1.0)?;
            Ok(TopKRecord::for_maze(c.step, &q, &maze, top_k))
        })
        .collect::<Result<_>>()?;
    let last = tops
        .last()
        .ok_or_else(|| Error::contract("run has no trained checkpoints"))?
        .clone();
    let distances: Vec<f64> = tops
        .iter()
        .map(|t| crate::critical::set_distance(&t.points, &last.points))
        .collect();
    let match_ratio = crate::critical::match_ratio_series(&tops, &last)?;
    let steps: Vec<u64> = tops.iter().map(|t| t.step).collect();
    let first_match_step = steps
        .iter()
        .zip(&match_ratio)
        .find(|(_, &m)| m >= KNACK_LEVEL)
        .map(|(&s, _)| s);

    let smoothed = trailing_mean(
        &record.eval.iter().map(|e| e.1).collect::<Vec<_>>(),
        SMOOTHING_WINDOW,
    );
    let first_return_step = smoothed.last().and_then(|&fin| {
        if fin <= 0.0 {
            return None;
        }
        smoothed
            .iter()
            .position(|&v| v > KNACK_LEVEL * fin)
            .map(|i| record.eval[i].0)
    });
    let match_precedes_return = matches!(
        (first_match_step, first_return_step),
        (Some(m), Some(r)) if m < r
    );
    Ok(KnackAnalysis {
        steps,
        distances,
        match_ratio,
        first_match_step,
        first_return_step,
        match_precedes_return,
    })
}
