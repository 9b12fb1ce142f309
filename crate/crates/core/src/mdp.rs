//! Finite deterministic MDPs, episode trajectories, the cliff maze, and an
//! exhaustive return-distribution enumerator used as an oracle for SI.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// Discount used for the maze experiments.
pub const DEFAULT_GAMMA: f64 = 0.99;

/// Exploration episodes longer than this are cut.
pub const EPISODE_STEP_CAP: usize = 10_000;

/// Upper bound on trajectories enumerated by [`return_distribution`].
pub const ENUMERATION_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub next_state: usize,
    pub reward: f64,
    pub terminal: bool,
}

/// Deterministic finite MDP with one transition entry per (state, action).
#[derive(Debug, Clone)]
pub struct DiscreteMdp {
    state_count: usize,
    action_count: usize,
    transitions: Vec<Transition>,
    terminal: Vec<bool>,
    initial_state: usize,
    gamma: f64,
}

impl DiscreteMdp {
    /// `transitions` is row-major over (state, action). Entries leaving a
    /// terminal state are stored but never used.
    pub fn new(
        state_count: usize,
        action_count: usize,
        transitions: Vec<Transition>,
        terminal: Vec<bool>,
        initial_state: usize,
        gamma: f64,
    ) -> Result<Self> {
        if state_count == 0 || action_count == 0 {
            return Err(Error::contract("state and action counts must be positive"));
        }
        if transitions.len() != state_count * action_count {
            return Err(Error::contract(format!(
                "expected {} transition entries, got {}",
                state_count * action_count,
                transitions.len()
            )));
        }
        if terminal.len() != state_count {
            return Err(Error::contract("terminal flags must cover every state"));
        }
        if initial_state >= state_count {
            return Err(Error::UnknownState {
                state: initial_state,
                count: state_count,
            });
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::contract(format!("discount {gamma} outside [0, 1]")));
        }
        for (idx, t) in transitions.iter().enumerate() {
            if t.next_state >= state_count {
                return Err(Error::UnknownState {
                    state: t.next_state,
                    count: state_count,
                });
            }
            if !t.reward.is_finite() {
                return Err(Error::contract(format!("non-finite reward at entry {idx}")));
            }
            if t.terminal != terminal[t.next_state] {
                return Err(Error::contract(format!(
                    "entry {idx}: terminal flag disagrees with state {}",
                    t.next_state
                )));
            }
        }
        Ok(Self {
            state_count,
            action_count,
            transitions,
            terminal,
            initial_state,
            gamma,
        })
    }

    /// Builds the table by evaluating `f(state, action)` for every pair.
    pub fn from_fn(
        state_count: usize,
        action_count: usize,
        terminal: Vec<bool>,
        initial_state: usize,
        gamma: f64,
        f: impl Fn(usize, usize) -> (usize, f64),
    ) -> Result<Self> {
        let mut transitions = Vec::with_capacity(state_count * action_count);
        for s in 0..state_count {
            for a in 0..action_count {
                let (next_state, reward) = f(s, a);
                let terminal = *terminal.get(next_state).ok_or(Error::UnknownState {
                    state: next_state,
                    count: state_count,
                })?;
                transitions.push(Transition {
                    next_state,
                    reward,
                    terminal,
                });
            }
        }
        Self::new(
            state_count,
            action_count,
            transitions,
            terminal,
            initial_state,
            gamma,
        )
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_terminal(&self, state: usize) -> bool {
        self.terminal.get(state).copied().unwrap_or(false)
    }

    pub fn step(&self, state: usize, action: usize) -> Result<Transition> {
        if state >= self.state_count {
            return Err(Error::UnknownState {
                state,
                count: self.state_count,
            });
        }
        if action >= self.action_count {
            return Err(Error::UnknownAction {
                action,
                count: self.action_count,
            });
        }
        if self.terminal[state] {
            return Err(Error::TerminalState(state));
        }
        Ok(self.transitions[state * self.action_count + action])
    }

    /// Breadth-first distance from `from` to `to`, never expanding through
    /// terminal states other than the target.
    pub fn shortest_path(&self, from: usize, to: usize) -> Result<usize> {
        for s in [from, to] {
            if s >= self.state_count {
                return Err(Error::UnknownState {
                    state: s,
                    count: self.state_count,
                });
            }
        }
        if from == to {
            return Ok(0);
        }
        let mut dist = vec![usize::MAX; self.state_count];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(s) = queue.pop_front() {
            if self.terminal[s] {
                continue;
            }
            for a in 0..self.action_count {
                let next = self.transitions[s * self.action_count + a].next_state;
                if dist[next] == usize::MAX {
                    dist[next] = dist[s] + 1;
                    if next == to {
                        return Ok(dist[next]);
                    }
                    queue.push_back(next);
                }
            }
        }
        Err(Error::NoPath)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
}

/// One episode in visit order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    steps: Vec<Step>,
    terminated: bool,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(cap: usize) -> Self {
        Self {
            steps: Vec::with_capacity(cap),
            terminated: false,
        }
    }

    /// Appends a step; it must start where the previous one ended.
    pub fn push(&mut self, step: Step) -> Result<()> {
        if self.terminated {
            return Err(Error::contract("trajectory already terminated"));
        }
        if let Some(last) = self.steps.last() {
            if last.next_state != step.state {
                return Err(Error::contract(format!(
                    "step from {} does not chain after arrival at {}",
                    step.state, last.next_state
                )));
            }
        }
        self.steps.push(step);
        Ok(())
    }

    pub fn mark_terminated(&mut self) {
        self.terminated = true;
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn clear(&mut self) {
        self.steps.clear();
        self.terminated = false;
    }

    /// Discounted return from the first step.
    pub fn discounted_return(&self, gamma: f64) -> f64 {
        self.steps
            .iter()
            .rev()
            .fold(0.0, |acc, s| s.reward + gamma * acc)
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum()
    }
}

/// Finite distribution over returns, outcomes sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnDistribution {
    outcomes: Vec<(f64, f64)>,
}

impl ReturnDistribution {
    /// Merges equal returns and drops zero-probability outcomes.
    pub fn from_outcomes(mut raw: Vec<(f64, f64)>) -> Self {
        raw.retain(|&(_, p)| p > 0.0);
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut outcomes: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (c, p) in raw {
            match outcomes.last_mut() {
                Some(last) if last.0 == c => last.1 += p,
                _ => outcomes.push((c, p)),
            }
        }
        Self { outcomes }
    }

    /// Weighted mixture of several distributions.
    pub fn mixture<'a>(parts: impl IntoIterator<Item = (f64, &'a ReturnDistribution)>) -> Self {
        let raw = parts
            .into_iter()
            .flat_map(|(w, d)| d.outcomes.iter().map(move |&(c, p)| (c, w * p)))
            .collect();
        Self::from_outcomes(raw)
    }

    pub fn outcomes(&self) -> &[(f64, f64)] {
        &self.outcomes
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.1).sum()
    }

    pub fn probability_of(&self, ret: f64) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| (o.0 - ret).abs() < 1e-12)
            .map(|o| o.1)
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.outcomes.iter().map(|&(c, p)| c * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.outcomes
            .iter()
            .map(|&(c, p)| p * (c - mean) * (c - mean))
            .sum()
    }
}

/// Enumerates every trajectory from `state` under `policy` and returns the
/// exact distribution of the discounted return.
///
/// `policy(s)` gives action probabilities at `s`. When `first_action` is set
/// the first step takes that action and the policy is followed afterwards,
/// which yields p(c | s, a). Paths still running after `horizon` steps
/// contribute their partial return.
pub fn return_distribution<P>(
    mdp: &DiscreteMdp,
    state: usize,
    policy: P,
    first_action: Option<usize>,
    horizon: usize,
) -> Result<ReturnDistribution>
where
    P: Fn(usize) -> Vec<f64>,
{
    if state >= mdp.state_count() {
        return Err(Error::UnknownState {
            state,
            count: mdp.state_count(),
        });
    }
    if let Some(a) = first_action {
        if a >= mdp.action_count() {
            return Err(Error::UnknownAction {
                action: a,
                count: mdp.action_count(),
            });
        }
    }
    if mdp.is_terminal(state) {
        return Ok(ReturnDistribution::from_outcomes(vec![(0.0, 1.0)]));
    }

    struct Node {
        state: usize,
        depth: usize,
        prob: f64,
        ret: f64,
        discount: f64,
    }

    let mut leaves = Vec::new();
    let mut stack = vec![Node {
        state,
        depth: 0,
        prob: 1.0,
        ret: 0.0,
        discount: 1.0,
    }];
    while let Some(node) = stack.pop() {
        if node.depth == horizon || mdp.is_terminal(node.state) {
            leaves.push((node.ret, node.prob));
            if leaves.len() > ENUMERATION_BUDGET {
                return Err(Error::EnumerationBudget(ENUMERATION_BUDGET));
            }
            continue;
        }
        let probs = match (node.depth, first_action) {
            (0, Some(a)) => {
                let mut p = vec![0.0; mdp.action_count()];
                p[a] = 1.0;
                p
            }
            _ => policy(node.state),
        };
        if probs.len() != mdp.action_count() {
            return Err(Error::contract(format!(
                "policy returned {} probabilities for {} actions",
                probs.len(),
                mdp.action_count()
            )));
        }
        for (a, &pa) in probs.iter().enumerate() {
            if pa <= 0.0 {
                continue;
            }
            let t = mdp.step(node.state, a)?;
            stack.push(Node {
                state: t.next_state,
                depth: node.depth + 1,
                prob: node.prob * pa,
                ret: node.ret + node.discount * t.reward,
                discount: node.discount * mdp.gamma(),
            });
        }
    }
    Ok(ReturnDistribution::from_outcomes(leaves))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Up, Action::Down, Action::Left, Action::Right];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(idx: usize) -> Option<Action> {
        Self::ALL.get(idx).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Grid world with cliffs. Entering a cliff pays -1 and ends the episode,
/// entering the goal pays +1 and ends it, bumping a wall leaves the agent
/// in place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffMaze {
    width: usize,
    height: usize,
    start: Cell,
    goal: Cell,
    cliffs: Vec<bool>,
}

pub const GOAL_REWARD: f64 = 1.0;
pub const CLIFF_REWARD: f64 = -1.0;

impl CliffMaze {
    /// 11x11 maze, cliffs down the centre column except the centre cell.
    pub fn standard() -> Self {
        let cliffs = (0..11).filter(|&r| r != 5).map(|r| Cell::new(r, 5));
        Self::new(11, 11, Cell::new(0, 0), Cell::new(10, 10), cliffs)
            .expect("standard maze is well formed")
    }

    pub fn new(
        width: usize,
        height: usize,
        start: Cell,
        goal: Cell,
        cliffs: impl IntoIterator<Item = Cell>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Grid("empty grid".into()));
        }
        let inside = |c: Cell| c.row < height && c.col < width;
        if !inside(start) || !inside(goal) {
            return Err(Error::Grid("start or goal outside the grid".into()));
        }
        let mut mask = vec![false; width * height];
        for c in cliffs {
            if !inside(c) {
                return Err(Error::Grid(format!("cliff {c} outside the grid")));
            }
            if c == start || c == goal {
                return Err(Error::Grid(format!("cliff {c} overlaps start or goal")));
            }
            mask[c.row * width + c.col] = true;
        }
        Ok(Self {
            width,
            height,
            start,
            goal,
            cliffs: mask,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn start(&self) -> Cell {
        self.start
    }

    pub fn goal(&self) -> Cell {
        self.goal
    }

    pub fn state_count(&self) -> usize {
        self.width * self.height
    }

    pub fn state_of(&self, cell: Cell) -> usize {
        cell.row * self.width + cell.col
    }

    pub fn cell_of(&self, state: usize) -> Cell {
        Cell::new(state / self.width, state % self.width)
    }

    pub fn is_cliff(&self, cell: Cell) -> bool {
        self.cliffs[self.state_of(cell)]
    }

    pub fn is_terminal(&self, cell: Cell) -> bool {
        cell == self.goal || self.is_cliff(cell)
    }

    pub fn cliff_count(&self) -> usize {
        self.cliffs.iter().filter(|&&c| c).count()
    }

    pub fn cliff_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.state_count())
            .filter(|&s| self.cliffs[s])
            .map(|s| self.cell_of(s))
    }

    /// Cells from which an action is taken (neither cliff nor goal).
    pub fn non_terminal_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.state_count()).filter(|&s| !self.is_terminal(self.cell_of(s)))
    }

    /// Moves from `cell`; leaving the grid keeps the agent in place.
    pub fn move_from(&self, cell: Cell, action: Action) -> (Cell, f64, bool) {
        let next = match action {
            Action::Up if cell.row > 0 => Cell::new(cell.row - 1, cell.col),
            Action::Down if cell.row + 1 < self.height => Cell::new(cell.row + 1, cell.col),
            Action::Left if cell.col > 0 => Cell::new(cell.row, cell.col - 1),
            Action::Right if cell.col + 1 < self.width => Cell::new(cell.row, cell.col + 1),
            _ => cell,
        };
        if next == self.goal {
            (next, GOAL_REWARD, true)
        } else if self.is_cliff(next) {
            (next, CLIFF_REWARD, true)
        } else {
            (next, 0.0, false)
        }
    }

    pub fn to_mdp(&self, gamma: f64) -> Result<DiscreteMdp> {
        let terminal = (0..self.state_count())
            .map(|s| self.is_terminal(self.cell_of(s)))
            .collect();
        DiscreteMdp::from_fn(
            self.state_count(),
            Action::ALL.len(),
            terminal,
            self.state_of(self.start),
            gamma,
            |s, a| {
                let (next, reward, _) = self.move_from(self.cell_of(s), Action::ALL[a]);
                (self.state_of(next), reward)
            },
        )
    }

    /// Length of the shortest start-to-goal path avoiding cliffs.
    pub fn shortest_path_length(&self) -> Result<usize> {
        let mdp = self.to_mdp(DEFAULT_GAMMA)?;
        mdp.shortest_path(self.state_of(self.start), self.state_of(self.goal))
    }

    /// Parses the `S`/`G`/`C`/`.` text format, one row per line.
    pub fn parse(text: &str) -> Result<Self> {
        let rows: Vec<&str> = text
            .lines()
            .map(str::trim_end)
            .filter(|l| !l.is_empty())
            .collect();
        let height = rows.len();
        let width = rows.first().map(|r| r.chars().count()).unwrap_or(0);
        let (mut start, mut goal) = (None, None);
        let mut cliffs = Vec::new();
        for (r, line) in rows.iter().enumerate() {
            if line.chars().count() != width {
                return Err(Error::Grid(format!("row {r} has ragged width")));
            }
            for (c, ch) in line.chars().enumerate() {
                let cell = Cell::new(r, c);
                match ch {
                    '.' => {}
                    'C' => cliffs.push(cell),
                    'S' if start.is_none() => start = Some(cell),
                    'G' if goal.is_none() => goal = Some(cell),
                    'S' | 'G' => return Err(Error::Grid(format!("duplicate '{ch}' at {cell}"))),
                    other => {
                        return Err(Error::Grid(format!("unknown symbol '{other}' at {cell}")))
                    }
                }
            }
        }
        let start = start.ok_or_else(|| Error::Grid("missing start 'S'".into()))?;
        let goal = goal.ok_or_else(|| Error::Grid("missing goal 'G'".into()))?;
        Self::new(width, height, start, goal, cliffs)
    }
}

impl fmt::Display for CliffMaze {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.height {
            for c in 0..self.width {
                let cell = Cell::new(r, c);
                let ch = if cell == self.start {
                    'S'
                } else if cell == self.goal {
                    'G'
                } else if self.is_cliff(cell) {
                    'C'
                } else {
                    '.'
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maze() -> CliffMaze {
        CliffMaze::standard()
    }

    fn step_cell(m: &CliffMaze, from: Cell, a: Action) -> (Cell, f64, bool) {
        let mdp = m.to_mdp(DEFAULT_GAMMA).unwrap();
        let t = mdp.step(m.state_of(from), a.index()).unwrap();
        (m.cell_of(t.next_state), t.reward, t.terminal)
    }

    #[test]
    fn maze_steps() {
        let m = maze();
        assert_eq!(
            step_cell(&m, Cell::new(0, 0), Action::Right),
            (Cell::new(0, 1), 0.0, false)
        );
        assert_eq!(
            step_cell(&m, Cell::new(5, 4), Action::Right),
            (Cell::new(5, 5), 0.0, false)
        );
        assert_eq!(
            step_cell(&m, Cell::new(4, 4), Action::Right),
            (Cell::new(4, 5), -1.0, true)
        );
        assert_eq!(
            step_cell(&m, Cell::new(10, 9), Action::Right),
            (Cell::new(10, 10), 1.0, true)
        );
    }

    #[test]
    fn walls_keep_agent_in_place() {
        let m = maze();
        assert_eq!(
            step_cell(&m, Cell::new(0, 0), Action::Up),
            (Cell::new(0, 0), 0.0, false)
        );
        assert_eq!(
            step_cell(&m, Cell::new(0, 0), Action::Left),
            (Cell::new(0, 0), 0.0, false)
        );
    }

    #[test]
    fn maze_geometry() {
        let m = maze();
        assert_eq!(m.state_count(), 121);
        assert_eq!(m.cliff_count(), 10);
        let terminals = (0..121).filter(|&s| m.is_terminal(m.cell_of(s))).count();
        assert_eq!(terminals, 11);
        assert_eq!(m.non_terminal_states().count(), 110);
        assert!(!m.is_cliff(Cell::new(5, 5)));
        assert!(m.cliff_cells().all(|c| c.col == 5 && c.row != 5));
    }

    #[test]
    fn step_errors() {
        let m = maze();
        let mdp = m.to_mdp(DEFAULT_GAMMA).unwrap();
        assert!(matches!(mdp.step(121, 0), Err(Error::UnknownState { .. })));
        assert!(matches!(mdp.step(0, 4), Err(Error::UnknownAction { .. })));
        let cliff = m.state_of(Cell::new(0, 5));
        assert!(matches!(mdp.step(cliff, 0), Err(Error::TerminalState(_))));
    }

    #[test]
    fn shortest_paths() {
        assert_eq!(maze().shortest_path_length().unwrap(), 20);
        let open = CliffMaze::new(11, 11, Cell::new(0, 0), Cell::new(10, 10), []).unwrap();
        assert_eq!(open.shortest_path_length().unwrap(), 20);
        let same = CliffMaze::new(3, 3, Cell::new(1, 1), Cell::new(1, 1), []).unwrap();
        assert_eq!(same.shortest_path_length().unwrap(), 0);
        let walled = CliffMaze::parse("S.C.\n..C.\n..CG\n").unwrap();
        assert!(matches!(walled.shortest_path_length(), Err(Error::NoPath)));
    }

    #[test]
    fn grid_text_roundtrip() {
        let m = maze();
        let text = m.to_string();
        assert_eq!(text.lines().count(), 11);
        assert_eq!(text.lines().next().unwrap(), "S....C.....");
        assert_eq!(text.lines().nth(5).unwrap(), "...........");
        assert_eq!(text.lines().last().unwrap(), ".....C....G");
        assert_eq!(CliffMaze::parse(&text).unwrap(), m);
    }

    #[test]
    fn grid_parse_errors() {
        assert!(CliffMaze::parse("S..\n...\n").is_err());
        assert!(CliffMaze::parse("S.G\n..\n").is_err());
        assert!(CliffMaze::parse("S.X\n..G\n").is_err());
        assert!(CliffMaze::parse("SSG\n").is_err());
    }

    #[test]
    fn trajectory_chaining() {
        let mut t = Trajectory::new();
        t.push(Step {
            state: 0,
            action: 3,
            reward: 0.0,
            next_state: 1,
        })
        .unwrap();
        assert!(t
            .push(Step {
                state: 2,
                action: 3,
                reward: 0.0,
                next_state: 3
            })
            .is_err());
        t.push(Step {
            state: 1,
            action: 3,
            reward: 1.0,
            next_state: 2,
        })
        .unwrap();
        t.mark_terminated();
        assert!(t
            .push(Step {
                state: 2,
                action: 0,
                reward: 0.0,
                next_state: 2
            })
            .is_err());
        assert!((t.discounted_return(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(t.total_reward(), 1.0);
    }

    #[test]
    fn return_distribution_two_state() {
        let mdp = DiscreteMdp::from_fn(2, 1, vec![false, true], 0, 0.9, |_, _| (1, 1.0)).unwrap();
        let d = return_distribution(&mdp, 0, |_| vec![1.0], None, 10).unwrap();
        assert_eq!(d.outcomes(), &[(1.0, 1.0)]);
    }

    #[test]
    fn return_distribution_cliff_adjacent() {
        // state 0 next to a cliff (state 1) and a goal (state 2)
        let mdp = DiscreteMdp::from_fn(3, 2, vec![false, true, true], 0, 0.99, |_, a| {
            if a == 0 {
                (1, -1.0)
            } else {
                (2, 1.0)
            }
        })
        .unwrap();
        let d = return_distribution(&mdp, 0, |_| vec![0.5, 0.5], None, 10).unwrap();
        assert!((d.probability_of(-1.0) - 0.5).abs() < 1e-15);
        assert!((d.total_probability() - 1.0).abs() < 1e-12);
        assert!((d.variance() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn return_distribution_budget() {
        // a self-looping two-action chain explodes combinatorially
        let mdp =
            DiscreteMdp::from_fn(2, 2, vec![false, true], 0, 0.9, |_, a| (0, a as f64)).unwrap();
        let r = return_distribution(&mdp, 0, |_| vec![0.5, 0.5], None, 20);
        assert!(matches!(r, Err(Error::EnumerationBudget(_))));
    }
}
