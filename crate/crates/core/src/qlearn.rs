//! Tabular Q-learning with backward per-episode updates.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{DiscreteMdp, Trajectory};

pub const DEFAULT_ALPHA: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieRule {
    /// Lowest action index wins; used for evaluation rollouts.
    FixedOrder,
    /// Uniform among maximisers; used while exploring.
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    values: Vec<f64>,
    state_count: usize,
    action_count: usize,
    alpha: f64,
    gamma: f64,
}

impl QTable {
    /// Zero-initialised table.
    pub fn new(state_count: usize, action_count: usize, alpha: f64, gamma: f64) -> Result<Self> {
        if state_count == 0 || action_count == 0 {
            return Err(Error::contract("Q-table shape must be positive"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::contract(format!(
                "learning rate {alpha} outside (0, 1]"
            )));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::contract(format!("discount {gamma} outside [0, 1]")));
        }
        Ok(Self {
            values: vec![0.0; state_count * action_count],
            state_count,
            action_count,
            alpha,
            gamma,
        })
    }

    pub fn for_mdp(mdp: &DiscreteMdp, alpha: f64) -> Result<Self> {
        Self::new(mdp.state_count(), mdp.action_count(), alpha, mdp.gamma())
    }

    /// Table with the given row-major values.
    pub fn from_values(
        values: Vec<f64>,
        state_count: usize,
        action_count: usize,
        alpha: f64,
        gamma: f64,
    ) -> Result<Self> {
        let mut q = Self::new(state_count, action_count, alpha, gamma)?;
        if values.len() != q.values.len() {
            return Err(Error::contract(format!(
                "expected {} Q-values, got {}",
                q.values.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("Q-values must be finite"));
        }
        q.values = values;
        Ok(q)
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, state: usize) -> &[f64] {
        let a = self.action_count;
        &self.values[state * a..(state + 1) * a]
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.action_count + action]
    }

    pub fn set(&mut self, state: usize, action: usize, value: f64) {
        self.values[state * self.action_count + action] = value;
    }

    pub fn max_value(&self, state: usize) -> f64 {
        self.row(state)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sweeps the episode from its last step to its first. The final step of
    /// a terminated episode uses the reward alone as its target.
    pub fn update_episode(&mut self, traj: &Trajectory) -> Result<()> {
        if traj.is_empty() {
            return Err(Error::contract("cannot update from an empty trajectory"));
        }
        let last = traj.len() - 1;
        for (i, step) in traj.steps().iter().enumerate().rev() {
            if step.state >= self.state_count || step.next_state >= self.state_count {
                return Err(Error::UnknownState {
                    state: step.state.max(step.next_state),
                    count: self.state_count,
                });
            }
            if step.action >= self.action_count {
                return Err(Error::UnknownAction {
                    action: step.action,
                    count: self.action_count,
                });
            }
            let target = if i == last && traj.terminated() {
                step.reward
            } else {
                step.reward + self.gamma * self.max_value(step.next_state)
            };
            let q = self.get(step.state, step.action);
            self.set(step.state, step.action, q + self.alpha * (target - q));
        }
        Ok(())
    }

    pub fn greedy_action<R: Rng + ?Sized>(&self, state: usize, tie: TieRule, rng: &mut R) -> usize {
        match tie {
            TieRule::FixedOrder => self.greedy_fixed(state),
            TieRule::UniformRandom => {
                let row = self.row(state);
                let best = self.max_value(state);
                let ties = row.iter().filter(|&&v| v == best).count();
                let mut pick = if ties > 1 {
                    rng.random_range(0..ties)
                } else {
                    0
                };
                for (a, &v) in row.iter().enumerate() {
                    if v == best {
                        if pick == 0 {
                            return a;
                        }
                        pick -= 1;
                    }
                }
                unreachable!("maximum must appear in its own row")
            }
        }
    }

    pub fn greedy_fixed(&self, state: usize) -> usize {
        let row = self.row(state);
        let mut best = 0;
        for a in 1..row.len() {
            if row[a] > row[best] {
                best = a;
            }
        }
        best
    }

    pub fn checkpoint(&self, step: u64) -> Checkpoint {
        Checkpoint {
            step,
            state_count: self.state_count,
            action_count: self.action_count,
            values: self.values.clone(),
        }
    }
}

/// Detects whether the fixed-order greedy rollout from the initial state
/// traces a shortest path to `goal`.
#[derive(Debug, Clone)]
pub struct OptimalityCheck {
    start: usize,
    goal: usize,
    shortest: usize,
}

impl OptimalityCheck {
    pub fn new(mdp: &DiscreteMdp, goal: usize) -> Result<Self> {
        let start = mdp.initial_state();
        let shortest = mdp.shortest_path(start, goal)?;
        Ok(Self {
            start,
            goal,
            shortest,
        })
    }

    pub fn shortest(&self) -> usize {
        self.shortest
    }

    pub fn is_optimal(&self, mdp: &DiscreteMdp, q: &QTable) -> bool {
        let mut s = self.start;
        for _ in 0..self.shortest {
            if mdp.is_terminal(s) {
                return false;
            }
            match mdp.step(s, q.greedy_fixed(s)) {
                Ok(t) => s = t.next_state,
                Err(_) => return false,
            }
        }
        s == self.goal
    }
}

/// True iff the fixed-order greedy rollout reaches the maze goal in exactly
/// the shortest-path number of steps.
pub fn greedy_rollout_is_optimal(maze: &crate::mdp::CliffMaze, q: &QTable) -> bool {
    let Ok(mdp) = maze.to_mdp(q.gamma()) else {
        return false;
    };
    match OptimalityCheck::new(&mdp, maze.state_of(maze.goal())) {
        Ok(check) => check.is_optimal(&mdp, q),
        Err(_) => false,
    }
}

/// Runs the fixed-order greedy policy from the initial state for at most
/// `cap` steps and returns the undiscounted episode reward and length.
pub fn greedy_episode(mdp: &DiscreteMdp, q: &QTable, cap: usize) -> (f64, usize) {
    let mut s = mdp.initial_state();
    let mut total = 0.0;
    for n in 0..cap {
        if mdp.is_terminal(s) {
            return (total, n);
        }
        let Ok(t) = mdp.step(s, q.greedy_fixed(s)) else {
            return (total, n);
        };
        total += t.reward;
        s = t.next_state;
    }
    (total, cap)
}

/// Snapshot of a Q-table at a given exploration step.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub step: u64,
    pub state_count: usize,
    pub action_count: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
struct CheckpointMeta {
    step: u64,
    shape: [usize; 2],
    seed: u64,
}

impl Checkpoint {
    pub fn to_qtable(&self, alpha: f64, gamma: f64) -> Result<QTable> {
        QTable::from_values(
            self.values.clone(),
            self.state_count,
            self.action_count,
            alpha,
            gamma,
        )
    }

    /// Writes `<stem>.csv` (one row per state) and `<stem>.json`.
    pub fn save(&self, dir: &Path, stem: &str, seed: u64) -> Result<()> {
        let mut csv = String::new();
        for row in self.values.chunks(self.action_count) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            csv.push_str(&line.join(","));
            csv.push('\n');
        }
        let csv_path = dir.join(format!("{stem}.csv"));
        fs::write(&csv_path, csv).map_err(|e| Error::io(&csv_path, e))?;
        let meta = CheckpointMeta {
            step: self.step,
            shape: [self.state_count, self.action_count],
            seed,
        };
        let json_path = dir.join(format!("{stem}.json"));
        fs::write(&json_path, serde_json::to_string_pretty(&meta)?)
            .map_err(|e| Error::io(&json_path, e))?;
        Ok(())
    }

    /// Reads a checkpoint written by [`Checkpoint::save`]; returns it with its seed.
    pub fn load(dir: &Path, stem: &str) -> Result<(Self, u64)> {
        let json_path = dir.join(format!("{stem}.json"));
        let text = fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
        let meta: CheckpointMeta = serde_json::from_str(&text)?;
        let csv_path = dir.join(format!("{stem}.csv"));
        let text = fs::read_to_string(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
        let parse_err = |msg: String| Error::Parse {
            path: csv_path.clone(),
            msg,
        };
        let mut values = Vec::with_capacity(meta.shape[0] * meta.shape[1]);
        for (ln, line) in text.lines().enumerate() {
            let before = values.len();
            for field in line.split(',') {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|e| parse_err(format!("line {}: {e}", ln + 1)))?;
                values.push(v);
            }
            if values.len() - before != meta.shape[1] {
                return Err(parse_err(format!("line {} has wrong arity", ln + 1)));
            }
        }
        if values.len() != meta.shape[0] * meta.shape[1] {
            return Err(parse_err("row count does not match shape".into()));
        }
        Ok((
            Self {
                step: meta.step,
                state_count: meta.shape[0],
                action_count: meta.shape[1],
                values,
            },
            meta.seed,
        ))
    }
}
